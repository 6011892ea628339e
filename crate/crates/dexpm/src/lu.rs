use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// LU factorization with partial pivoting, PM = LU.
///
/// `lu` stores the unit-lower and upper factors in combined form; `swaps[k]`
/// is the row exchanged with row k at elimination step k.
#[derive(Clone, Debug)]
pub struct LuFactors {
    lu: ComplexMatrix,
    swaps: Vec<usize>,
}

/// Pivot magnitudes below n·u·‖M‖_∞ (unit roundoff u) are treated as zero.
fn singularity_threshold(n: usize, norm_inf: f64) -> f64 {
    n as f64 * (f64::EPSILON / 2.0) * norm_inf
}

pub fn lu_factor(m: &ComplexMatrix) -> Result<LuFactors> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "lu_factor needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let threshold = singularity_threshold(n, m.norm_inf());
    let mut a = m.clone();
    let mut swaps = vec![0usize; n];

    for k in 0..n {
        let mut p = k;
        let mut best = a.get(k, k).norm();
        for i in k + 1..n {
            let v = a.get(i, k).norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best < threshold || best == 0.0 {
            return Err(Error::SingularMatrix {
                step: k,
                pivot: best,
                threshold,
            });
        }
        swaps[k] = p;
        if p != k {
            for j in 0..n {
                let t = a.get(k, j);
                a.set(k, j, a.get(p, j));
                a.set(p, j, t);
            }
        }
        let pivot = a.get(k, k);
        let inv = Complex64::ONE / pivot;
        for i in k + 1..n {
            let l = a.get(i, k) * inv;
            a.set(i, k, l);
        }
        for j in k + 1..n {
            let akj = a.get(k, j);
            if akj == Complex64::ZERO {
                continue;
            }
            for i in k + 1..n {
                let l = a.get(i, k);
                let v = a.get(i, j) - l * akj;
                a.set(i, j, v);
            }
        }
    }
    Ok(LuFactors { lu: a, swaps })
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Combined L/U storage (unit lower triangle implicit).
    pub fn combined(&self) -> &ComplexMatrix {
        &self.lu
    }

    /// Row-exchange list: step k swapped rows k and swaps[k].
    pub fn swaps(&self) -> &[usize] {
        &self.swaps
    }

    /// Full permutation as a vector: row i of PM is row perm[i] of M.
    pub fn permutation(&self) -> Vec<usize> {
        let n = self.dim();
        let mut perm: Vec<usize> = (0..n).collect();
        for (k, &p) in self.swaps.iter().enumerate() {
            perm.swap(k, p);
        }
        perm
    }

    /// Solve M·X = B for X.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim();
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "solve: rhs has {} rows, factorization is {}x{}",
                b.rows(),
                n,
                n
            )));
        }
        let mut x = b.clone();
        for k in 0..n {
            let p = self.swaps[k];
            if p != k {
                for j in 0..x.cols() {
                    let t = x.get(k, j);
                    x.set(k, j, x.get(p, j));
                    x.set(p, j, t);
                }
            }
        }
        for j in 0..x.cols() {
            // forward substitution with unit lower factor
            for k in 0..n {
                let xk = x.get(k, j);
                if xk == Complex64::ZERO {
                    continue;
                }
                for i in k + 1..n {
                    let v = x.get(i, j) - self.lu.get(i, k) * xk;
                    x.set(i, j, v);
                }
            }
            // back substitution with the upper factor
            for k in (0..n).rev() {
                let xk = x.get(k, j) / self.lu.get(k, k);
                x.set(k, j, xk);
                if xk == Complex64::ZERO {
                    continue;
                }
                for i in 0..k {
                    let v = x.get(i, j) - self.lu.get(i, k) * xk;
                    x.set(i, j, v);
                }
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve(&ComplexMatrix::identity(self.dim()))
            .expect("identity rhs always has matching dimensions")
    }

    /// Reconstruct P·M from the factors (test support).
    pub fn reconstruct_pm(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut l = ComplexMatrix::identity(n);
        let mut u = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                if i > j {
                    l.set(i, j, self.lu.get(i, j));
                } else {
                    u.set(i, j, self.lu.get(i, j));
                }
            }
        }
        l.matmul(&u)
    }
}

/// Convenience wrapper: factor then solve.
pub fn lu_solve(m: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    lu_factor(m)?.solve(b)
}
