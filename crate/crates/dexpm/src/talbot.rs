//! Midpoint-rule Talbot contour evaluation of e^A, the baseline contour
//! method the quadrature results are compared against. Shape constants are
//! the midpoint-optimized values from Dingfelder & Weideman (Numer.
//! Algorithms 68, 2015).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lu::lu_factor;
use crate::matrix::ComplexMatrix;

pub const SIGMA_T: f64 = 0.6122;
pub const MU_T: f64 = 0.5017;
pub const ALPHA_T: f64 = 0.6407;
pub const NU_T: f64 = 0.2645;

/// Angles this close to zero use the analytic limit of the contour map.
const THETA_TAU: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct TalbotParams {
    pub m: usize,
    pub sigma_t: f64,
    pub mu_t: f64,
    pub alpha_t: f64,
    pub nu_t: f64,
}

impl TalbotParams {
    /// Reference contour with `m` midpoint nodes.
    pub fn new(m: usize) -> Result<Self> {
        let p = TalbotParams {
            m,
            sigma_t: SIGMA_T,
            mu_t: MU_T,
            alpha_t: ALPHA_T,
            nu_t: NU_T,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 || self.m % 2 != 0 {
            return Err(Error::InvalidParam(format!(
                "node count must be even and at least 2, got {}",
                self.m
            )));
        }
        if !(self.mu_t > 0.0) {
            return Err(Error::InvalidParam(format!(
                "contour width must be positive, got {}",
                self.mu_t
            )));
        }
        Ok(())
    }
}

/// z(theta) = m(-sigma + mu theta cot(alpha theta) + i nu theta) on
/// theta in [-pi, pi].
pub fn contour_point(p: &TalbotParams, theta: f64) -> Complex64 {
    let m = p.m as f64;
    if theta.abs() < THETA_TAU {
        return Complex64::new(m * (-p.sigma_t + p.mu_t / p.alpha_t), 0.0);
    }
    let at = p.alpha_t * theta;
    let re = -p.sigma_t + p.mu_t * theta * at.cos() / at.sin();
    Complex64::new(m * re, m * p.nu_t * theta)
}

pub fn contour_deriv(p: &TalbotParams, theta: f64) -> Complex64 {
    let m = p.m as f64;
    if theta.abs() < THETA_TAU {
        return Complex64::new(0.0, m * p.nu_t);
    }
    let at = p.alpha_t * theta;
    let s = at.sin();
    let re = p.mu_t * (at.cos() / s - at / (s * s));
    Complex64::new(m * re, m * p.nu_t)
}

fn node_term(a: &ComplexMatrix, eye: &ComplexMatrix, z: Complex64, zp: Complex64) -> Result<ComplexMatrix> {
    let mut m = a.scale(-1.0);
    m = m.add_diagonal(z);
    let r = lu_factor(&m)?.solve(eye)?;
    Ok(r.scale(z.exp() * zp))
}

/// Cauchy-integral evaluation X = (1/(2 pi i)) sum over the contour of
/// e^z (zI - A)^-1 dz, discretized by the midpoint rule with m nodes
/// theta_j = -pi + (j - 1/2) 2pi/m. For real input the conjugate symmetry
/// of the node pairs is used: only theta > 0 is evaluated and the result
/// is exactly real.
pub fn expm_talbot(a: &ComplexMatrix, p: &TalbotParams) -> Result<ComplexMatrix> {
    p.validate()?;
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let eye = ComplexMatrix::identity(n);
    let step = 2.0 * PI / p.m as f64;
    let theta = |j: usize| -PI + (j as f64 + 0.5) * step;

    if a.imag_residue() == 0.0 {
        let mut sum = ComplexMatrix::zeros(n, n);
        for j in p.m / 2..p.m {
            let t = theta(j);
            let term = node_term(a, &eye, contour_point(p, t), contour_deriv(p, t))?;
            sum = sum.add(&term);
        }
        Ok(sum.imag_part().scale(2.0 / p.m as f64))
    } else {
        let mut sum = ComplexMatrix::zeros(n, n);
        for j in 0..p.m {
            let t = theta(j);
            let term = node_term(a, &eye, contour_point(p, t), contour_deriv(p, t))?;
            sum = sum.add(&term);
        }
        Ok(sum.scale(Complex64::new(0.0, -1.0 / p.m as f64)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn params_validation() {
        assert!(TalbotParams::new(32).is_ok());
        assert!(TalbotParams::new(0).is_err());
        assert!(TalbotParams::new(7).is_err());
        let mut p = TalbotParams::new(8).unwrap();
        p.mu_t = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn contour_limit_branch_is_continuous() {
        let p = TalbotParams::new(16).unwrap();
        let z0 = contour_point(&p, 0.0);
        let z_eps = contour_point(&p, 2e-8);
        assert!((z0.re - 16.0 * (-SIGMA_T + MU_T / ALPHA_T)).abs() <= 1e-12);
        assert!((z_eps - z0).norm() <= 1e-6 * z0.norm());
        let d0 = contour_deriv(&p, 0.0);
        assert_eq!(d0, c(0.0, 16.0 * NU_T));
        assert!((contour_deriv(&p, 2e-8) - d0).norm() <= 1e-6 * d0.norm());
    }

    #[test]
    fn scalar_negative_one() {
        let a = ComplexMatrix::diagonal(&[c(-1.0, 0.0)]);
        let p = TalbotParams::new(32).unwrap();
        let x = expm_talbot(&a, &p).unwrap();
        let err = (x.get(0, 0).re - (-1f64).exp()).abs();
        assert!(err <= 1e-10, "error {err}");
        assert_eq!(x.get(0, 0).im, 0.0);
    }

    #[test]
    fn hermitian_spread_spectrum() {
        let d: Vec<Complex64> = (1..=100).map(|i| c(-(i as f64), 0.0)).collect();
        let a = ComplexMatrix::diagonal(&d);
        let p = TalbotParams::new(64).unwrap();
        let x = expm_talbot(&a, &p).unwrap();
        let truth = ComplexMatrix::diagonal(&d.iter().map(|z| z.exp()).collect::<Vec<_>>());
        let rel = x.sub(&truth).norm_fro() / truth.norm_fro();
        assert!(rel <= 1e-8, "relative error {rel}");
        assert_eq!(x.imag_residue(), 0.0);
    }

    #[test]
    fn geometric_convergence_in_node_count() {
        let d = [c(-1.0, 0.0), c(-4.0, 0.0), c(-9.0, 0.0), c(-16.0, 0.0)];
        let a = ComplexMatrix::diagonal(&d);
        let truth = ComplexMatrix::diagonal(&d.iter().map(|z| z.exp()).collect::<Vec<_>>());
        let errs: Vec<f64> = [8usize, 16, 32, 64]
            .iter()
            .map(|&m| {
                let p = TalbotParams::new(m).unwrap();
                let x = expm_talbot(&a, &p).unwrap();
                x.sub(&truth).norm_fro() / truth.norm_fro()
            })
            .collect();
        // the roundoff floor rises with m (node heights scale with m, so
        // e^z amplifies rounding); require decrease only above the floor
        let floor = 1e-12;
        let mut converged = false;
        for w in errs.windows(2) {
            if converged || w[0] <= floor {
                converged = true;
                assert!(w[1] <= 1e-10, "error ladder {errs:?}");
            } else {
                assert!(w[1] < w[0], "error ladder not decreasing: {errs:?}");
            }
        }
        assert!(errs[3] <= 1e-10, "error ladder {errs:?}");
    }

    #[test]
    fn complex_spectrum_full_sum_path() {
        let d = [c(-1.0, 5.0), c(-3.0, -2.0)];
        let a = ComplexMatrix::diagonal(&d);
        let p = TalbotParams::new(64).unwrap();
        let x = expm_talbot(&a, &p).unwrap();
        for (i, z) in d.iter().enumerate() {
            let err = (x.get(i, i) - z.exp()).norm();
            assert!(err <= 1e-8, "entry {i}: error {err}");
        }
    }

    #[test]
    fn singular_node_is_reported() {
        // put an eigenvalue exactly on a contour node
        let p = TalbotParams::new(8).unwrap();
        let z0 = contour_point(&p, -PI + 0.5 * (2.0 * PI / 8.0));
        let a = ComplexMatrix::diagonal(&[z0]);
        match expm_talbot(&a, &p) {
            Err(Error::SingularMatrix { .. }) => {}
            other => panic!("expected singular node, got {other:?}"),
        }
    }
}
