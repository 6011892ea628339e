use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix in column-major order.
///
/// Entries are validated to be finite on construction from external data;
/// internal arithmetic uses the unchecked path.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Result of the power-iteration 2-norm estimate.
///
/// `converged` is false when the iteration cap was hit; in that case `value`
/// falls back to the Frobenius norm (an upper bound within a factor sqrt(rank)).
#[derive(Clone, Copy, Debug)]
pub struct Norm2Estimate {
    pub value: f64,
    pub converged: bool,
}

const NORM2_REL_TOL: f64 = 1e-6;
const NORM2_MAX_ITERS: usize = 500;

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParam(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        let m = Self { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![Complex64::ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, d[i]);
        }
        m
    }

    fn check_finite(&self) -> Result<()> {
        for j in 0..self.cols {
            for i in 0..self.rows {
                let v = self.get(i, j);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add: shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self::from_raw(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub: shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self::from_raw(self.rows, self.cols, data)
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let data = self.data.iter().map(|a| a * c).collect();
        Self::from_raw(self.rows, self.cols, data)
    }

    /// self + c·I
    pub fn add_diagonal(&self, c: impl Into<Complex64>) -> Self {
        assert!(self.is_square(), "add_diagonal: matrix must be square");
        let c = c.into();
        let mut m = self.clone();
        for i in 0..self.rows {
            let v = m.get(i, i);
            m.set(i, i, v + c);
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimension mismatch");
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let mut out = vec![Complex64::ZERO; m * n];
        for j in 0..n {
            let out_col = &mut out[j * m..(j + 1) * m];
            for l in 0..k {
                let b = other.get(l, j);
                if b == Complex64::ZERO {
                    continue;
                }
                let a_col = self.col(l);
                for i in 0..m {
                    out_col[i] += a_col[i] * b;
                }
            }
        }
        Self::from_raw(m, n, out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| self.col(j).iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut sums = vec![0.0; self.rows];
        for j in 0..self.cols {
            for (i, v) in self.col(j).iter().enumerate() {
                sums[i] += v.norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise absolute imaginary part (0 for a real matrix).
    pub fn imag_residue(&self) -> f64 {
        self.data.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Entrywise real part.
    pub fn real_part(&self) -> Self {
        let data = self.data.iter().map(|v| Complex64::new(v.re, 0.0)).collect();
        Self::from_raw(self.rows, self.cols, data)
    }

    /// Entrywise imaginary part (as a real matrix).
    pub fn imag_part(&self) -> Self {
        let data = self.data.iter().map(|v| Complex64::new(v.im, 0.0)).collect();
        Self::from_raw(self.rows, self.cols, data)
    }

    fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.cols);
        let mut out = vec![Complex64::ZERO; self.rows];
        for j in 0..self.cols {
            let c = v[j];
            if c == Complex64::ZERO {
                continue;
            }
            for (i, a) in self.col(j).iter().enumerate() {
                out[i] += a * c;
            }
        }
        out
    }

    fn adjoint_matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![Complex64::ZERO; self.cols];
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for (i, a) in self.col(j).iter().enumerate() {
                acc += a.conj() * v[i];
            }
            *o = acc;
        }
        out
    }

    /// Estimate of the largest singular value by power iteration on the Gram
    /// operator, with a deterministic all-ones start vector.
    ///
    /// Falls back to the Frobenius norm (flagged) if the iteration cap is hit
    /// or the start vector lies in the null space.
    pub fn norm2_estimate(&self) -> Norm2Estimate {
        let fro = self.norm_fro();
        if fro == 0.0 {
            return Norm2Estimate { value: 0.0, converged: true };
        }
        let n = self.cols;
        let scale = 1.0 / (n as f64).sqrt();
        let mut v = vec![Complex64::new(scale, 0.0); n];
        let mut sigma_prev = 0.0;
        for _ in 0..NORM2_MAX_ITERS {
            let u = self.matvec(&v);
            let sigma = vec_norm2(&u);
            if sigma == 0.0 {
                return Norm2Estimate { value: fro, converged: false };
            }
            if (sigma - sigma_prev).abs() <= NORM2_REL_TOL * sigma {
                return Norm2Estimate { value: sigma, converged: true };
            }
            sigma_prev = sigma;
            let w = self.adjoint_matvec(&u);
            let wn = vec_norm2(&w);
            if wn == 0.0 {
                return Norm2Estimate { value: fro, converged: false };
            }
            let inv = 1.0 / wn;
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi * inv;
            }
        }
        Norm2Estimate { value: fro, converged: false }
    }
}

pub(crate) fn vec_norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[j * self.rows + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[j * self.rows + i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn construction_validates_shape_and_finiteness() {
        assert!(ComplexMatrix::new(2, 2, vec![Complex64::ZERO; 3]).is_err());
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        let bad = vec![c(1.0, 0.0), c(f64::NAN, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        match ComplexMatrix::new(2, 2, bad) {
            Err(Error::NonFinite { row: 1, col: 0 }) => {}
            other => panic!("expected NonFinite at (1,0), got {other:?}"),
        }
    }

    #[test]
    fn column_major_layout() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        // data = [a11, a21, a12, a22]
        assert_eq!(m.get(0, 0), c(1.0, 0.0));
        assert_eq!(m.get(1, 0), c(2.0, 0.0));
        assert_eq!(m.get(0, 1), c(3.0, 0.0));
        assert_eq!(m.get(1, 1), c(4.0, 0.0));
    }

    #[test]
    fn matmul_against_hand_product() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| c((2 * i + j + 1) as f64, 0.0)).unwrap();
        let b = ComplexMatrix::from_fn(2, 2, |i, j| c(0.0, (i + 2 * j + 1) as f64)).unwrap();
        let p = a.matmul(&b);
        // a = [[1,2],[3,4]], b = i·[[1,3],[2,4]]
        assert_eq!(p.get(0, 0), c(0.0, 5.0));
        assert_eq!(p.get(0, 1), c(0.0, 11.0));
        assert_eq!(p.get(1, 0), c(0.0, 11.0));
        assert_eq!(p.get(1, 1), c(0.0, 25.0));
    }

    #[test]
    fn norm_identities() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(3.0, 0.0), c(-2.0, 0.0), c(4.0, 0.0)],
        )
        .unwrap();
        assert_eq!(m.norm_1(), 6.0);
        assert_eq!(m.norm_inf(), 7.0);
        let d = ComplexMatrix::diagonal(&[c(3.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(d.norm_fro(), 5.0);
        assert_eq!(ComplexMatrix::identity(4).norm_1(), 1.0);
    }

    #[test]
    fn norm2_estimate_diagonal() {
        let d = ComplexMatrix::diagonal(&[c(3.0, 0.0), c(1.0, 0.0)]);
        let est = d.norm2_estimate();
        assert!(est.converged);
        assert!((est.value - 3.0).abs() <= 1e-4 * 3.0, "got {}", est.value);
    }

    #[test]
    fn norm2_estimate_rank_one() {
        // uv^H has sole singular value ‖u‖‖v‖.
        let u = [c(1.0, 2.0), c(-0.5, 0.25), c(3.0, -1.0)];
        let v = [c(2.0, -1.0), c(0.5, 0.5)];
        let m = ComplexMatrix::from_fn(3, 2, |i, j| u[i] * v[j].conj()).unwrap();
        let expect = vec_norm2(&u) * vec_norm2(&v);
        let est = m.norm2_estimate();
        assert!(est.converged);
        assert!((est.value - expect).abs() <= 1e-10 * expect);
    }

    #[test]
    fn norm2_estimate_zero_matrix() {
        let est = ComplexMatrix::zeros(3, 3).norm2_estimate();
        assert!(est.converged);
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn adjoint_swaps_and_conjugates() {
        let m = ComplexMatrix::new(1, 2, vec![c(1.0, 2.0), c(3.0, -4.0)]).unwrap();
        let a = m.adjoint();
        assert_eq!(a.rows(), 2);
        assert_eq!(a.get(0, 0), c(1.0, -2.0));
        assert_eq!(a.get(1, 0), c(3.0, 4.0));
    }
}
