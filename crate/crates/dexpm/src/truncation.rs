//! Truncation-range selection for the infinite trapezoidal sum: tail
//! bounds for both ends and the scan that picks the smallest index window
//! [l, r] meeting a tolerance. The right tail bounds the resolvent norm by
//! (1+sqrt(2))/|sigma| via the numerical range; the left tail needs only
//! the node-map derivative.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lu::lu_factor;
use crate::matrix::ComplexMatrix;
use crate::transform::{phi, phi_deriv, u_dev_unchecked, DeParams};

pub const DEFAULT_TAIL_TERMS: usize = 50;

/// Scan limit for |l| and r; beyond this the tolerance is declared
/// unattainable for the given mesh.
const INTERVAL_CAP: i64 = 1_000_000;

#[derive(Clone, Copy, Debug)]
pub struct TruncationInterval {
    pub l: i64,
    pub r: i64,
    /// Left tail estimate at the chosen l.
    pub left_bound: f64,
    /// Right tail estimate at the chosen r.
    pub right_bound: f64,
    /// Tolerance the interval was selected for.
    pub epsilon: f64,
}

impl TruncationInterval {
    pub fn node_count(&self) -> usize {
        (self.r - self.l + 1) as usize
    }
}

/// (h/pi) * sum of phi'(kh) over the `terms` indices below l.
pub fn left_tail(p: &DeParams, l: i64, terms: usize) -> f64 {
    let mut s = 0.0;
    for k in l - terms as i64..l {
        s += phi_deriv(p, k as f64 * p.h);
    }
    p.h / std::f64::consts::PI * s
}

/// (4 pi (1+sqrt(2)) / |sigma|) * sum of k*u(kh) over the `terms` indices
/// above r.
pub fn right_tail(p: &DeParams, r: i64, sigma: f64, terms: usize) -> Result<f64> {
    if !(sigma < 0.0) {
        return Err(Error::InvalidParam(format!(
            "right tail bound requires a negative shift, got {sigma}"
        )));
    }
    let sqrt2p1 = 1.0 + 2f64.sqrt();
    let mut s = 0.0;
    for k in r + 1..=r + terms as i64 {
        s += k as f64 * u_dev_unchecked(p, k as f64 * p.h);
    }
    Ok(4.0 * std::f64::consts::PI * sqrt2p1 * s / sigma.abs())
}

pub fn get_interval(p: &DeParams, sigma: f64, eps: f64) -> Result<TruncationInterval> {
    get_interval_with_terms(p, sigma, eps, DEFAULT_TAIL_TERMS)
}

/// Maximum l with left_tail <= eps/2 (scanned downward from 0, clamped to
/// l <= -1) and minimum r >= 1 with right_tail <= eps/2 (scanned upward).
pub fn get_interval_with_terms(
    p: &DeParams,
    sigma: f64,
    eps: f64,
    terms: usize,
) -> Result<TruncationInterval> {
    if !(eps > 0.0) {
        return Err(Error::InvalidTolerance { eps });
    }
    if !(sigma < 0.0) {
        return Err(Error::InvalidParam(format!(
            "interval selection requires a negative shift, got {sigma}"
        )));
    }
    let half = eps / 2.0;

    let mut l = 0i64;
    while left_tail(p, l, terms) > half {
        l -= 1;
        if l <= -INTERVAL_CAP {
            return Err(Error::IntervalOverflow {
                cap: INTERVAL_CAP,
                h: p.h,
                eps,
            });
        }
    }
    l = l.min(-1);

    let mut r = 1i64;
    while right_tail(p, r, sigma, terms)? > half {
        r += 1;
        if r >= INTERVAL_CAP {
            return Err(Error::IntervalOverflow {
                cap: INTERVAL_CAP,
                h: p.h,
                eps,
            });
        }
    }

    Ok(TruncationInterval {
        l,
        r,
        left_bound: left_tail(p, l, terms),
        right_bound: right_tail(p, r, sigma, terms)?,
        epsilon: eps,
    })
}

/// Full truncation bound with the actual resolvent norms of A at the
/// discarded nodes (50-term tails): the left tail as in the scan, the
/// right tail as 2 pi sum k*u(kh)*(||(A+i x I)^-1|| + ||(A-i x I)^-1||).
pub fn verify_prop1_bound(
    p: &DeParams,
    a: &ComplexMatrix,
    iv: &TruncationInterval,
) -> Result<f64> {
    let n = a.rows();
    let eye = ComplexMatrix::identity(n);
    let left = left_tail(p, iv.l, DEFAULT_TAIL_TERMS);

    let mut right = 0.0;
    for k in iv.r + 1..=iv.r + DEFAULT_TAIL_TERMS as i64 {
        let t = k as f64 * p.h;
        let ku = k as f64 * u_dev_unchecked(p, t);
        if ku == 0.0 {
            continue;
        }
        let x = phi(p, t);
        let plus = a.add_diagonal(Complex64::new(0.0, x));
        let minus = a.add_diagonal(Complex64::new(0.0, -x));
        let norm_plus = lu_factor(&plus)?.solve(&eye)?.norm2_estimate().value;
        let norm_minus = lu_factor(&minus)?.solve(&eye)?.norm2_estimate().value;
        right += ku * (norm_plus + norm_minus);
    }
    Ok(left + 2.0 * std::f64::consts::PI * right)
}

/// Checks x_h(l h) <= 1 / sqrt(2 ||A^-2||_2), the small-abscissa
/// hypothesis of the truncation bound. Not enforced during interval
/// selection (which only sees sigma); callers use it as a post-check.
pub fn small_x_precondition_holds(
    p: &DeParams,
    a: &ComplexMatrix,
    iv: &TruncationInterval,
) -> Result<bool> {
    let f = lu_factor(a)?;
    let inv = f.solve(&ComplexMatrix::identity(a.rows()))?;
    let inv2 = f.solve(&inv)?;
    let norm = inv2.norm2_estimate().value;
    let x_left = phi(p, iv.l as f64 * p.h);
    Ok(x_left <= 1.0 / (2.0 * norm).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{make_params, TransformVariant};

    fn p99(h: f64) -> DeParams {
        make_params(h, TransformVariant::Ooura1999).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn left_tail_frozen_values() {
        let p = p99(0.05);
        assert!(rel(left_tail(&p, -40, 50), 0.4031068009000926) <= 1e-13);
        assert!(rel(left_tail(&p, -40, 500), 0.40316891130485943) <= 1e-13);
        // the 50-term and long sums agree once the scan is anywhere near
        // its stopping region
        let short = left_tail(&p, -150, 50);
        let long = left_tail(&p, -150, 500);
        assert!((short - long).abs() <= 1e-16 * short.max(1.0));
        assert!(rel(short, 1.0816715246365044e-48) <= 1e-12);
    }

    #[test]
    fn left_tail_first_term_dominates() {
        let p = p99(0.1);
        let one = left_tail(&p, -100, 1);
        let fifty = left_tail(&p, -100, 50);
        assert!((one - fifty).abs() <= 1e-30);
    }

    #[test]
    fn left_tail_underflows_to_zero() {
        let p = p99(0.1);
        assert_eq!(left_tail(&p, -2000, 50), 0.0);
    }

    #[test]
    fn right_tail_frozen_value_and_long_sum() {
        let p = p99(0.05);
        let short = right_tail(&p, 60, -2.5, 50).unwrap();
        let long = right_tail(&p, 60, -2.5, 500).unwrap();
        assert!(rel(short, 0.032376263601070786) <= 1e-13);
        assert!((short - long).abs() <= 1e-16);
    }

    #[test]
    fn right_tail_scales_inversely_with_shift() {
        let p = p99(0.05);
        let at_2_5 = right_tail(&p, 30, -2.5, 50).unwrap();
        let at_5 = right_tail(&p, 30, -5.0, 50).unwrap();
        assert_eq!(at_5, at_2_5 / 2.0);
    }

    #[test]
    fn right_tail_rejects_nonnegative_shift() {
        let p = p99(0.1);
        assert!(right_tail(&p, 10, 0.0, 50).is_err());
        assert!(right_tail(&p, 10, 1.5, 50).is_err());
    }

    #[test]
    fn right_tail_underflows_to_zero() {
        let p = p99(0.1);
        assert_eq!(right_tail(&p, 1000, -2.5, 50).unwrap(), 0.0);
    }

    #[test]
    fn interval_golden_table() {
        let cases = [
            (0.2, [(-23i64, 20i64), (-26, 23), (-27, 24)]),
            (0.1, [(-51, 42), (-56, 46), (-59, 48)]),
            (0.05, [(-109, 85), (-119, 93), (-126, 98)]),
        ];
        for (h, expected) in cases {
            let p = p99(h);
            for (eps, want) in [1e-8, 1e-12, 2.2e-16].iter().zip(expected) {
                let iv = get_interval(&p, -2.5, *eps).unwrap();
                assert_eq!((iv.l, iv.r), want, "h={h}, eps={eps}");
                assert!(iv.left_bound <= eps / 2.0);
                assert!(iv.right_bound <= eps / 2.0);
                // 50 terms already saturate the tail sums here
                let long = get_interval_with_terms(&p, -2.5, *eps, 500).unwrap();
                assert_eq!((long.l, long.r), want);
            }
        }
    }

    #[test]
    fn interval_nesting_in_tolerance() {
        let p = p99(0.1);
        let loose = get_interval(&p, -2.5, 1e-8).unwrap();
        let tight = get_interval(&p, -2.5, 2.2e-16).unwrap();
        assert!(loose.l >= tight.l && loose.r <= tight.r);
    }

    #[test]
    fn interval_clamps_for_huge_tolerance() {
        let p = p99(0.1);
        let iv = get_interval(&p, -2.5, 1e10).unwrap();
        assert_eq!((iv.l, iv.r), (-1, 1));
        assert_eq!(iv.node_count(), 3);
    }

    #[test]
    fn interval_rejects_bad_tolerance_and_shift() {
        let p = p99(0.1);
        assert!(matches!(
            get_interval(&p, -2.5, 0.0),
            Err(Error::InvalidTolerance { .. })
        ));
        assert!(matches!(
            get_interval(&p, -2.5, -1e-8),
            Err(Error::InvalidTolerance { .. })
        ));
        assert!(get_interval(&p, 0.5, 1e-8).is_err());
    }

    #[test]
    fn prop1_bound_negative_identity() {
        let p = p99(0.1);
        let iv = get_interval(&p, -1.0, 2.2e-16).unwrap();
        let a = ComplexMatrix::identity(3).scale(-1.0);
        let bound = verify_prop1_bound(&p, &a, &iv).unwrap();
        assert!(bound < 1e-15, "bound {bound}");
    }

    #[test]
    fn prop1_bound_matches_scalar_closed_form() {
        let p = p99(0.1);
        let iv = get_interval(&p, -1.0, 1e-8).unwrap();
        let a = ComplexMatrix::diagonal(&[Complex64::new(-1.0, 0.0)]);
        let bound = verify_prop1_bound(&p, &a, &iv).unwrap();

        let mut hand = left_tail(&p, iv.l, 50);
        for k in iv.r + 1..=iv.r + 50 {
            let t = k as f64 * p.h;
            let x = phi(&p, t);
            let res = 1.0 / (1.0 + x * x).sqrt();
            hand += 2.0 * std::f64::consts::PI
                * (k as f64 * u_dev_unchecked(&p, t))
                * (2.0 * res);
        }
        assert!(
            (bound - hand).abs() <= 1e-14 * hand.max(1e-300),
            "bound {bound} vs hand {hand}"
        );
    }

    #[test]
    fn small_x_precondition_on_identity_scale() {
        let p = p99(0.1);
        let iv = get_interval(&p, -1.0, 1e-12).unwrap();
        let a = ComplexMatrix::identity(2).scale(-1.0);
        // x_h at the left end is tiny; 1/sqrt(2||A^-2||) = 1/sqrt(2)
        assert!(small_x_precondition_holds(&p, &a, &iv).unwrap());
    }
}
