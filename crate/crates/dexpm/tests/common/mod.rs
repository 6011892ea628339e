//! Shared oracles for the integration suites: a one-sided Jacobi SVD kept
//! independent of the library's linear algebra, the closed-form exponential
//! of similarity-built test matrices, and seeded matrix builders.

#![allow(dead_code)]

use dexpm::{randsvd, ComplexMatrix, RandSvdSpec, TestMatrixParts};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
    .unwrap()
}

/// Random matrix with spectrum strictly inside the left half-plane:
/// rho(G) <= ||G||_1, so G - (||G||_1 + 1) I keeps every eigenvalue
/// left of Re = -1.
pub fn stable_random(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian(n, &mut rng);
    g.add_diagonal(Complex64::new(-(g.norm_1() + 1.0), 0.0))
}

/// Singular values by one-sided Jacobi: unitary 2x2 right-rotations
/// orthogonalize column pairs until the Gram matrix is diagonal; the
/// column norms are then the singular values. Descending order.
pub fn jacobi_singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let rows = a.rows();
    let n = a.cols();
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..rows).map(|i| a.get(i, j)).collect())
        .collect();

    let dot = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
        x.iter().zip(y).map(|(p, q)| p.conj() * q).sum()
    };

    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let gpp = cols[p].iter().map(|z| z.norm_sqr()).sum::<f64>();
                let gqq = cols[q].iter().map(|z| z.norm_sqr()).sum::<f64>();
                let gpq = dot(&cols[p], &cols[q]);
                let r = gpq.norm();
                if r <= 1e-15 * (gpp * gqq).sqrt().max(f64::MIN_POSITIVE) {
                    continue;
                }
                rotated = true;
                // phase out gpq, then a real Jacobi rotation
                let alpha = gpq / r;
                let tau = (gqq - gpp) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let vp = cols[p][i];
                    let vq = cols[q][i] * alpha.conj();
                    cols[p][i] = c * vp - s * vq;
                    cols[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    jacobi_singular_values(a)[0]
}

/// Relative 2-norm error via the Jacobi oracle.
pub fn rel_2norm(x: &ComplexMatrix, truth: &ComplexMatrix) -> f64 {
    spectral_norm(&x.sub(truth)) / spectral_norm(truth)
}

/// e^A for A = Z D Z^-1 assembled exactly from the parts.
pub fn closed_form_expm(parts: &TestMatrixParts) -> ComplexMatrix {
    let n = parts.z.rows();
    let mut zd = parts.z.clone();
    for j in 0..n {
        let e = parts.d[j].exp();
        for i in 0..n {
            let cur = zd.get(i, j);
            zd.set(i, j, cur * e);
        }
    }
    let zinv = dexpm::lu_factor(&parts.z).unwrap().inverse();
    zd.matmul(&zinv)
}

/// Normal matrix Q D Q^H whose rightmost eigenvalue real part is exactly
/// `sigma`; the rest of the spectrum sits up to 20 deeper in the left
/// half-plane with imaginary parts in [-5, 5].
pub fn shifted_normal(n: usize, seed: u64, sigma: f64) -> ComplexMatrix {
    let q = randsvd(&RandSvdSpec {
        n,
        kappa: 1.0,
        seed,
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let d: Vec<Complex64> = (0..n)
        .map(|i| {
            if i == 0 {
                Complex64::new(sigma, 0.0)
            } else {
                Complex64::new(
                    sigma - 20.0 * rng.random::<f64>(),
                    10.0 * rng.random::<f64>() - 5.0,
                )
            }
        })
        .collect();
    let mut qd = q.clone();
    for j in 0..n {
        for i in 0..n {
            let cur = qd.get(i, j);
            qd.set(i, j, cur * d[j]);
        }
    }
    qd.matmul(&q.adjoint())
}

pub fn rel_fro(x: &ComplexMatrix, truth: &ComplexMatrix) -> f64 {
    x.sub(truth).norm_fro() / truth.norm_fro()
}
