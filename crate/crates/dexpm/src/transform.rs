//! Double-exponential variable transforms used to discretize the resolvent
//! integral. `phi` maps the quadrature variable t to the integration
//! abscissa x, clustering nodes so the trapezoidal sum converges
//! double-exponentially; `phi_deriv` is its derivative and `u_dev` the
//! relative deviation of `phi(t)` from the asymptote pi*t/h.

use crate::error::{Error, Result};

/// At |t| up to and including this threshold the transform is evaluated by
/// its t -> 0 limit; direct evaluation loses all digits there to
/// cancellation in (e^v - 1)^2.
const LIMIT_TAU: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformVariant {
    /// sinh-based inner map, alpha = 6
    Ooura1991,
    /// mesh-adapted inner map with alpha tied to h, beta = 1/4
    Ooura1999,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeParams {
    pub h: f64,
    pub variant: TransformVariant,
    pub alpha: f64,
    pub beta: f64,
}

pub fn make_params(h: f64, variant: TransformVariant) -> Result<DeParams> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "mesh width must be positive and finite, got {h}"
        )));
    }
    let (alpha, beta) = match variant {
        TransformVariant::Ooura1991 => (6.0, 0.0),
        TransformVariant::Ooura1999 => {
            let beta = 0.25;
            let alpha = beta / (1.0 + (1.0 + std::f64::consts::PI / h).ln() / (4.0 * h)).sqrt();
            (alpha, beta)
        }
    };
    Ok(DeParams {
        h,
        variant,
        alpha,
        beta,
    })
}

fn v_of(p: &DeParams, t: f64) -> f64 {
    match p.variant {
        TransformVariant::Ooura1991 => -6.0 * t.sinh(),
        TransformVariant::Ooura1999 => {
            // exp_m1 keeps the small-|t| terms fully accurate
            -2.0 * t + p.alpha * (-t).exp_m1() - p.beta * t.exp_m1()
        }
    }
}

fn vp_of(p: &DeParams, t: f64) -> f64 {
    match p.variant {
        TransformVariant::Ooura1991 => -6.0 * t.cosh(),
        TransformVariant::Ooura1999 => -2.0 - p.alpha * (-t).exp() - p.beta * t.exp(),
    }
}

/// Node map x = phi(t), positive and strictly increasing (until the far
/// left tail underflows below the smallest subnormal).
pub fn phi(p: &DeParams, t: f64) -> f64 {
    let pi = std::f64::consts::PI;
    if t.abs() <= LIMIT_TAU {
        return match p.variant {
            TransformVariant::Ooura1991 => pi / (p.alpha * p.h),
            TransformVariant::Ooura1999 => pi / (p.h * (p.alpha + p.beta + 2.0)),
        };
    }
    if t > 0.0 {
        let v = v_of(p, t);
        let ev = v.exp();
        if ev == 0.0 {
            return pi * t / p.h;
        }
        (pi / p.h) * t / -v.exp_m1()
    } else {
        // v grows large for t < 0; rearrange through exp(-v) to stay
        // finite. emv comes from exp directly (it may be doubly tiny),
        // em1 from exp_m1 (cancellation only matters near t = 0).
        let v = v_of(p, t);
        let emv = (-v).exp();
        let em1 = (-v).exp_m1();
        (pi / p.h) * t * emv / em1
    }
}

/// Derivative of the node map, bounded by 2*pi/h on the right half-line.
pub fn phi_deriv(p: &DeParams, t: f64) -> f64 {
    let pi = std::f64::consts::PI;
    if t.abs() <= LIMIT_TAU {
        return match p.variant {
            TransformVariant::Ooura1991 => pi / (2.0 * p.h),
            TransformVariant::Ooura1999 => {
                let (a, b) = (p.alpha, p.beta);
                let num = a * a + 2.0 * a * b + 5.0 * a + b * b + 3.0 * b + 4.0;
                let den = a * a + 2.0 * a * b + 4.0 * a + b * b + 4.0 * b + 4.0;
                (pi / (2.0 * p.h)) * num / den
            }
        };
    }
    if t > 0.0 {
        let v = v_of(p, t);
        let ev = v.exp();
        if ev == 0.0 {
            return pi / p.h;
        }
        let vp = vp_of(p, t);
        let d = -v.exp_m1();
        (pi / p.h) * (d + t * vp * ev) / (d * d)
    } else {
        let vp = vp_of(p, t);
        let v = v_of(p, t);
        let emv = (-v).exp();
        let em1 = (-v).exp_m1();
        // emv underflows to 0 while t*vp overflows for very negative t;
        // the true limit of the product is 0
        if !(emv * (t * vp)).is_finite() {
            return 0.0;
        }
        (pi / p.h) * emv * (em1 + t * vp) / (em1 * em1)
    }
}

/// Relative deviation u(t) = h*phi(t)/(pi*t) - 1 = e^v/(1-e^v), for t > 0.
/// At integer nodes t = kh this gives phi(kh) = pi*k*(1+u), so
/// sin(phi(kh)) can be reduced exactly modulo pi.
pub fn u_dev(p: &DeParams, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParam(format!(
            "u_dev is defined for t > 0, got {t}"
        )));
    }
    Ok(u_dev_unchecked(p, t))
}

pub(crate) fn u_dev_unchecked(p: &DeParams, t: f64) -> f64 {
    let v = v_of(p, t);
    v.exp() / -v.exp_m1()
}

/// sin(phi(kh)) for a positive node index, reduced through u_dev so the
/// doubly-exponentially small tail values survive argument reduction.
pub(crate) fn sin_phi_at_node(p: &DeParams, k: i64) -> f64 {
    debug_assert!(k >= 1);
    let u = u_dev_unchecked(p, k as f64 * p.h);
    let s = (std::f64::consts::PI * k as f64 * u).sin();
    if k % 2 == 0 {
        s
    } else {
        -s
    }
}
