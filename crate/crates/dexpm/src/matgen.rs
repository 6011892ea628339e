//! Seeded test-matrix generators: a randsvd-style factor with prescribed
//! condition number, similarity-transformed diagonal spectra with a known
//! closed-form exponential, and a convection-diffusion finite-difference
//! operator on the unit square.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lu::lu_factor;
use crate::matrix::ComplexMatrix;

#[derive(Clone, Copy, Debug)]
pub struct RandSvdSpec {
    pub n: usize,
    /// Target 2-norm condition number; singular values are geometrically
    /// spaced from 1 down to 1/kappa.
    pub kappa: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct ConvDiffSpec {
    /// Interior grid points per axis; the matrix is grid_n^2 square.
    pub grid_n: usize,
    /// Diffusion coefficient.
    pub d: f64,
    /// Convection velocity (x, y).
    pub c: (f64, f64),
}

/// Similarity factor, spectrum, and assembled matrix of `test_matrix`,
/// exposed so callers can form the closed-form exponential Z e^D Z^-1.
#[derive(Clone, Debug)]
pub struct TestMatrixParts {
    pub z: ComplexMatrix,
    pub d: Vec<Complex64>,
    pub a: ComplexMatrix,
}

fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
    .expect("normal draws are finite")
}

/// Householder QR of `g`, returning Q with the phase convention that makes
/// the implicit R diagonal real positive, so the factor is unique and
/// reproducible regardless of the factorization internals.
fn unitary_from_gaussian(g: &ComplexMatrix) -> ComplexMatrix {
    let n = g.rows();
    let mut r = g.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n {
        let xnorm = (k..n).map(|i| r.get(i, k).norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = r.get(k, k);
        let phase = if x0 == Complex64::ZERO {
            Complex64::ONE
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<Complex64> = (k..n).map(|i| r.get(i, k)).collect();
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        for j in k..n {
            let s: Complex64 = (0..v.len()).map(|i| v[i].conj() * r.get(k + i, j)).sum();
            let s = s * tau;
            for i in 0..v.len() {
                let cur = r.get(k + i, j);
                r.set(k + i, j, cur - s * v[i]);
            }
        }
        // accumulate Q = H_0 H_1 ... by right-multiplication
        let w: Vec<Complex64> = (0..n)
            .map(|row| (0..v.len()).map(|i| q.get(row, k + i) * v[i]).sum())
            .collect();
        for j in 0..v.len() {
            let vc = v[j].conj() * tau;
            for (row, wr) in w.iter().enumerate() {
                let cur = q.get(row, k + j);
                q.set(row, k + j, cur - wr * vc);
            }
        }
    }
    for j in 0..n {
        let d = r.get(j, j);
        if d != Complex64::ZERO {
            let phase = d / d.norm();
            for i in 0..n {
                let cur = q.get(i, j);
                q.set(i, j, cur * phase);
            }
        }
    }
    q
}

fn validate_randsvd(spec: &RandSvdSpec) -> Result<()> {
    if spec.n == 0 {
        return Err(Error::InvalidParam("matrix order must be positive".into()));
    }
    if !(spec.kappa >= 1.0) {
        return Err(Error::InvalidParam(format!(
            "condition target must be at least 1, got {}",
            spec.kappa
        )));
    }
    Ok(())
}

fn randsvd_from_rng(n: usize, kappa: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let u = unitary_from_gaussian(&gaussian_matrix(n, rng));
    let v = unitary_from_gaussian(&gaussian_matrix(n, rng));
    let sigma: Vec<f64> = (0..n)
        .map(|k| {
            if n == 1 {
                1.0
            } else {
                kappa.powf(-(k as f64) / (n as f64 - 1.0))
            }
        })
        .collect();
    let mut us = u;
    for (k, s) in sigma.iter().enumerate() {
        for i in 0..n {
            let cur = us.get(i, k);
            us.set(i, k, cur * s);
        }
    }
    us.matmul(&v.adjoint())
}

/// Z = U diag(kappa^(-i/(n-1))) V^H with seeded random unitary factors;
/// the 2-norm condition number of Z equals kappa by construction.
pub fn randsvd(spec: &RandSvdSpec) -> Result<ComplexMatrix> {
    validate_randsvd(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(randsvd_from_rng(spec.n, spec.kappa, &mut rng))
}

/// Test matrix A = Z D Z^-1 with d_i = 1 - 10^(2k i/(n-1)) + i nu_i/20,
/// nu_i standard normal, and kappa(Z) = 100. Eigenvalue real parts spread
/// from 0 down to 1 - 10^(2k); imaginary parts are O(1/20).
pub fn test_matrix(k: u32, n: usize, seed: u64) -> Result<ComplexMatrix> {
    Ok(test_matrix_parts(k, n, seed)?.a)
}

pub fn test_matrix_parts(k: u32, n: usize, seed: u64) -> Result<TestMatrixParts> {
    if !(k == 1 || k == 2) {
        return Err(Error::InvalidParam(format!(
            "spectrum family index must be 1 or 2, got {k}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParam(format!(
            "matrix order must be at least 2, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = randsvd_from_rng(n, 100.0, &mut rng);
    let d: Vec<Complex64> = (0..n)
        .map(|i| {
            let nu: f64 = StandardNormal.sample(&mut rng);
            let exponent = 2.0 * k as f64 * i as f64 / (n as f64 - 1.0);
            Complex64::new(1.0 - 10f64.powf(exponent), nu / 20.0)
        })
        .collect();

    let mut zd = z.clone();
    for j in 0..n {
        for i in 0..n {
            let cur = zd.get(i, j);
            zd.set(i, j, cur * d[j]);
        }
    }
    let zinv = lu_factor(&z)?.inverse();
    let a = zd.matmul(&zinv);
    Ok(TestMatrixParts { z, d, a })
}

/// Five-point centered-difference discretization of d*Laplace(u) - c.grad(u)
/// on the unit square with homogeneous Dirichlet boundaries, mesh width
/// 1/(grid_n+1), row index iy*grid_n + ix.
pub fn convection_diffusion(spec: &ConvDiffSpec) -> Result<ComplexMatrix> {
    if spec.grid_n < 3 {
        return Err(Error::InvalidParam(format!(
            "grid must have at least 3 interior points per axis, got {}",
            spec.grid_n
        )));
    }
    if !(spec.d > 0.0) {
        return Err(Error::InvalidParam(format!(
            "diffusion coefficient must be positive, got {}",
            spec.d
        )));
    }
    let gn = spec.grid_n;
    let hg = 1.0 / (gn as f64 + 1.0);
    let dd = spec.d / (hg * hg);
    let cx2 = spec.c.0 / (2.0 * hg);
    let cy2 = spec.c.1 / (2.0 * hg);

    let n = gn * gn;
    let mut a = ComplexMatrix::zeros(n, n);
    let re = |v: f64| Complex64::new(v, 0.0);
    for iy in 0..gn {
        for ix in 0..gn {
            let row = iy * gn + ix;
            a.set(row, row, re(-4.0 * dd));
            if ix > 0 {
                a.set(row, row - 1, re(dd + cx2));
            }
            if ix + 1 < gn {
                a.set(row, row + 1, re(dd - cx2));
            }
            if iy > 0 {
                a.set(row, row - gn, re(dd + cy2));
            }
            if iy + 1 < gn {
                a.set(row, row + gn, re(dd - cy2));
            }
        }
    }
    Ok(a)
}
