//! Dense complex eigenvalue solver: Householder reduction to Hessenberg
//! form followed by an explicitly shifted QR iteration with complex Givens
//! rotations. Eigenvalues only; no Schur vectors are accumulated.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Subdiagonal entries below this multiple of the local diagonal scale are
/// treated as zero during deflation.
const DEFLATION_TOL: f64 = f64::EPSILON;

/// QR sweep budget is this factor times the matrix dimension.
const MAX_SWEEPS_PER_DIM: usize = 30;

/// Stalled-iteration period after which an exceptional shift is used.
const EXCEPTIONAL_PERIOD: usize = 10;

/// Eigenvalues sorted by descending real part, ties by descending
/// imaginary part, so the rightmost eigenvalue is first.
#[derive(Clone, Debug)]
pub struct Spectrum {
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn rightmost(&self) -> Complex64 {
        self.values[0]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn eigenvalues(a: &ComplexMatrix) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut values = match n {
        1 => vec![a.get(0, 0)],
        2 => {
            let (l1, l2) = eig2(a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
            vec![l1, l2]
        }
        _ => {
            let mut h = a.clone();
            hessenberg_in_place(&mut h);
            qr_eigenvalues(h)?
        }
    };
    values.sort_by(|p, q| q.re.total_cmp(&p.re).then(q.im.total_cmp(&p.im)));
    Ok(Spectrum { values })
}

pub fn rightmost_eigenvalue(a: &ComplexMatrix) -> Result<Complex64> {
    Ok(eigenvalues(a)?.rightmost())
}

/// Eigenvalues of [[a, b], [c, d]], larger-magnitude root by the quadratic
/// formula, the other recovered from the determinant to avoid cancellation.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mean = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (mean * mean - det).sqrt();
    let l1 = if (mean.conj() * disc).re >= 0.0 {
        mean + disc
    } else {
        mean - disc
    };
    let l2 = if l1 == Complex64::ZERO { l1 } else { det / l1 };
    (l1, l2)
}

/// In-place unitary similarity reduction to upper Hessenberg form.
fn hessenberg_in_place(h: &mut ComplexMatrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let mut v: Vec<Complex64> = Vec::with_capacity(n - 1);
    for k in 0..n - 2 {
        let mut xnorm2 = 0.0;
        for i in k + 1..n {
            xnorm2 += h.get(i, k).norm_sqr();
        }
        let xnorm = xnorm2.sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = h.get(k + 1, k);
        let phase = if x0 == Complex64::ZERO {
            Complex64::ONE
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;

        v.clear();
        v.extend((k + 1..n).map(|i| h.get(i, k)));
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // H <- (I - tau v v^H) H on rows k+1.., then H <- H (I - tau v v^H)
        // on columns k+1.., a unitary similarity.
        for j in k..n {
            let mut w = Complex64::ZERO;
            for (idx, i) in (k + 1..n).enumerate() {
                w += v[idx].conj() * h.get(i, j);
            }
            w *= tau;
            for (idx, i) in (k + 1..n).enumerate() {
                let val = h.get(i, j) - v[idx] * w;
                h.set(i, j, val);
            }
        }
        for i in 0..n {
            let mut w = Complex64::ZERO;
            for (idx, j) in (k + 1..n).enumerate() {
                w += h.get(i, j) * v[idx];
            }
            w *= tau;
            for (idx, j) in (k + 1..n).enumerate() {
                let val = h.get(i, j) - w * v[idx].conj();
                h.set(i, j, val);
            }
        }
        h.set(k + 1, k, alpha);
        for i in k + 2..n {
            h.set(i, k, Complex64::ZERO);
        }
    }
}

/// Rotation G = [[c, s], [-conj(s), c]] with real c zeroing y below x.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let xn = x.norm();
    let yn = y.norm();
    if yn == 0.0 {
        return (1.0, Complex64::ZERO);
    }
    if xn == 0.0 {
        return (0.0, y.conj() / yn);
    }
    let d = xn.hypot(yn);
    (xn / d, (x / xn) * y.conj() / d)
}

fn subdiag_negligible(h: &ComplexMatrix, i: usize) -> bool {
    let sub = h.get(i, i - 1).norm();
    if sub == 0.0 {
        return true;
    }
    let scale = h.get(i - 1, i - 1).norm() + h.get(i, i).norm();
    let thr = if scale == 0.0 {
        f64::MIN_POSITIVE
    } else {
        DEFLATION_TOL * scale
    };
    sub <= thr
}

/// One explicitly shifted QR similarity step on the window [lo, hi]:
/// factor the shifted window as QR via Givens rotations, then form RQ and
/// restore the shift.
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, mu: Complex64) {
    let n = h.rows();
    for i in lo..=hi {
        let d = h.get(i, i) - mu;
        h.set(i, i, d);
    }
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h.get(k, k), h.get(k + 1, k));
        rot.push((c, s));
        for j in k..n {
            let a = h.get(k, j);
            let b = h.get(k + 1, j);
            h.set(k, j, c * a + s * b);
            h.set(k + 1, j, -s.conj() * a + c * b);
        }
        h.set(k + 1, k, Complex64::ZERO);
    }
    for (idx, k) in (lo..hi).enumerate() {
        let (c, s) = rot[idx];
        for i in 0..=k + 1 {
            let a = h.get(i, k);
            let b = h.get(i, k + 1);
            h.set(i, k, c * a + s.conj() * b);
            h.set(i, k + 1, -s * a + c * b);
        }
    }
    for i in lo..=hi {
        let d = h.get(i, i) + mu;
        h.set(i, i, d);
    }
}

fn qr_eigenvalues(mut h: ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let max_sweeps = MAX_SWEEPS_PER_DIM * n;
    let mut values = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut stall = 0usize;

    loop {
        // Pop converged trailing eigenvalues.
        loop {
            if hi == 0 {
                values.push(h.get(0, 0));
                return Ok(values);
            }
            if subdiag_negligible(&h, hi) {
                h.set(hi, hi - 1, Complex64::ZERO);
                values.push(h.get(hi, hi));
                hi -= 1;
                stall = 0;
            } else {
                break;
            }
        }

        // Active window [lo, hi] with no interior negligible subdiagonals.
        let mut lo = hi;
        while lo > 0 {
            if subdiag_negligible(&h, lo) {
                h.set(lo, lo - 1, Complex64::ZERO);
                break;
            }
            lo -= 1;
        }

        if hi - lo == 1 {
            let (l1, l2) = eig2(
                h.get(lo, lo),
                h.get(lo, hi),
                h.get(hi, lo),
                h.get(hi, hi),
            );
            values.push(l1);
            values.push(l2);
            if lo == 0 {
                return Ok(values);
            }
            hi = lo - 1;
            stall = 0;
            continue;
        }

        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence { sweeps, n });
        }
        stall += 1;
        let mu = if stall % EXCEPTIONAL_PERIOD == 0 {
            h.get(hi, hi) + Complex64::new(0.75 * h.get(hi, hi - 1).norm(), 0.0)
        } else {
            let (l1, l2) = eig2(
                h.get(hi - 1, hi - 1),
                h.get(hi - 1, hi),
                h.get(hi, hi - 1),
                h.get(hi, hi),
            );
            let d = h.get(hi, hi);
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        qr_step(&mut h, lo, hi, mu);
    }
}
