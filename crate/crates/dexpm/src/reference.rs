//! Reference evaluations of the matrix exponential used as oracles: the
//! degree-13 Pade approximant with scaling and squaring, and a plain
//! Taylor sum for small-norm cross-checks on an independent code path.

use crate::error::{Error, Result};
use crate::lu::lu_factor;
use crate::matrix::ComplexMatrix;

/// Degree-13 Pade numerator coefficients (denominator is the same with
/// alternating signs); all are exactly representable in f64.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

pub const DEFAULT_TAYLOR_TERMS: usize = 30;

#[derive(Clone, Copy, Debug)]
pub struct PadeConfig {
    /// 1-norm above which the argument is halved until it fits.
    pub scaling_threshold: f64,
    /// Approximant degree; only 13 is implemented.
    pub degree: usize,
}

impl Default for PadeConfig {
    fn default() -> Self {
        PadeConfig {
            scaling_threshold: 5.37,
            degree: 13,
        }
    }
}

pub fn expm_pade(a: &ComplexMatrix, cfg: &PadeConfig) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if cfg.degree != 13 {
        return Err(Error::InvalidParam(format!(
            "only the degree-13 approximant is implemented, got {}",
            cfg.degree
        )));
    }
    if !(cfg.scaling_threshold > 0.0) {
        return Err(Error::InvalidParam(format!(
            "scaling threshold must be positive, got {}",
            cfg.scaling_threshold
        )));
    }

    let norm = a.norm_1();
    let s = if norm > cfg.scaling_threshold {
        (norm / cfg.scaling_threshold).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(0.5f64.powi(s as i32));

    let n = a.rows();
    let eye = ComplexMatrix::identity(n);
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let b = &PADE13;
    let u_inner = a6
        .matmul(&a6.scale(b[13]).add(&a4.scale(b[11])).add(&a2.scale(b[9])))
        .add(&a6.scale(b[7]))
        .add(&a4.scale(b[5]))
        .add(&a2.scale(b[3]))
        .add(&eye.scale(b[1]));
    let u = scaled.matmul(&u_inner);
    let v = a6
        .matmul(&a6.scale(b[12]).add(&a4.scale(b[10])).add(&a2.scale(b[8])))
        .add(&a6.scale(b[6]))
        .add(&a4.scale(b[4]))
        .add(&a2.scale(b[2]))
        .add(&eye.scale(b[0]));

    let mut x = lu_factor(&v.sub(&u))?.solve(&v.add(&u))?;
    for _ in 0..s {
        x = x.matmul(&x);
    }
    Ok(x)
}

/// Truncated Taylor sum; restricted to ||A||_1 <= 1 where `terms` around
/// 30 leave the remainder below 1/31! and the recurrence stays stable.
pub fn expm_taylor(a: &ComplexMatrix, terms: usize) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let norm = a.norm_1();
    if norm > 1.0 {
        return Err(Error::InvalidParam(format!(
            "Taylor reference requires 1-norm at most 1, got {norm}"
        )));
    }
    let n = a.rows();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for j in 1..=terms {
        term = term.matmul(a).scale(1.0 / j as f64);
        sum = sum.add(&term);
    }
    Ok(sum)
}
