//! Complex Schur forms, reordering, and triangular Sylvester solves.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{MixError, Result};

type CMat = DMatrix<Complex64>;

/// `A = Q T Qᴴ` with `Q` unitary and `T` upper triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: CMat,
    pub t: CMat,
}

impl SchurForm {
    pub fn new(a: CMat) -> Result<Self> {
        let n = a.nrows();
        if n == 1 {
            return Ok(SchurForm {
                q: CMat::identity(1, 1),
                t: a,
            });
        }
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let s = nalgebra::linalg::Schur::try_new(a, f64::EPSILON, 10_000 * n)
            .ok_or_else(|| MixError::Numerical("Schur iteration did not converge".into()))?;
        let (q, t) = s.unpack();
        let mut form = SchurForm { q, t };
        form.triangularize(scale);
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.t[(i, i)]).collect()
    }

    /// Split any remaining 2×2 diagonal blocks and clear round-off below the diagonal.
    fn triangularize(&mut self, scale: f64) {
        let n = self.dim();
        let tiny = 1e-15 * scale;
        for j in 0..n.saturating_sub(1) {
            let sub = self.t[(j + 1, j)];
            if sub.norm() <= tiny {
                continue;
            }
            let (a, b, c, d) = (self.t[(j, j)], self.t[(j, j + 1)], sub, self.t[(j + 1, j + 1)]);
            let tr = 0.5 * (a + d);
            let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
            let mu = tr + disc;
            // eigenvector of [[a,b],[c,d]] for mu
            let (x, y) = if (mu - a).norm() >= (mu - d).norm() {
                (b, mu - a)
            } else {
                (mu - d, c)
            };
            self.rotate(j, x, y);
        }
        for j in 0..n {
            for i in j + 1..n {
                self.t[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Apply the unitary whose first column is `(x, y)/‖·‖` to rows/columns `j, j+1`.
    fn rotate(&mut self, j: usize, x: Complex64, y: Complex64) {
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        if r == 0.0 {
            return;
        }
        let (c, s) = (x / r, y / r);
        // G = [[c, -s̄], [s, c̄]]
        let n = self.dim();
        for col in 0..n {
            let (u, v) = (self.t[(j, col)], self.t[(j + 1, col)]);
            self.t[(j, col)] = c.conj() * u + s.conj() * v;
            self.t[(j + 1, col)] = -s * u + c * v;
        }
        for row in 0..n {
            let (u, v) = (self.t[(row, j)], self.t[(row, j + 1)]);
            self.t[(row, j)] = u * c + v * s;
            self.t[(row, j + 1)] = -u * s.conj() + v * c.conj();
        }
        for row in 0..self.q.nrows() {
            let (u, v) = (self.q[(row, j)], self.q[(row, j + 1)]);
            self.q[(row, j)] = u * c + v * s;
            self.q[(row, j + 1)] = -u * s.conj() + v * c.conj();
        }
        self.t[(j + 1, j)] = Complex64::new(0.0, 0.0);
    }

    /// Exchange diagonal entries `j` and `j+1`.
    pub fn swap(&mut self, j: usize) {
        let (t11, t12, t22) = (self.t[(j, j)], self.t[(j, j + 1)], self.t[(j + 1, j + 1)]);
        // eigenvector of the 2×2 block for t22
        self.rotate(j, t12, t22 - t11);
        self.t[(j, j)] = t22;
        self.t[(j + 1, j + 1)] = t11;
    }

    /// Move the selected diagonal entries to the leading positions (keeping their
    /// relative order); returns how many were selected.
    pub fn reorder(&mut self, select: &[bool]) -> usize {
        let mut sel = select.to_vec();
        let mut front = 0;
        for i in 0..sel.len() {
            if !sel[i] {
                continue;
            }
            let mut p = i;
            while p > front {
                self.swap(p - 1);
                sel.swap(p - 1, p);
                p -= 1;
            }
            front += 1;
        }
        front
    }
}

/// Solve `T11 X − X T22 = C` for upper-triangular `T11`, `T22` with disjoint spectra.
pub fn triangular_sylvester(t11: &CMat, t22: &CMat, c: &CMat) -> Result<CMat> {
    let (p, q) = (t11.nrows(), t22.nrows());
    let mut x = CMat::zeros(p, q);
    for j in 0..q {
        for i in (0..p).rev() {
            let mut acc = c[(i, j)];
            for k in i + 1..p {
                acc -= t11[(i, k)] * x[(k, j)];
            }
            for k in 0..j {
                acc += x[(i, k)] * t22[(k, j)];
            }
            let den = t11[(i, i)] - t22[(j, j)];
            if den.norm() == 0.0 {
                return Err(MixError::Numerical("Sylvester equation is singular".into()));
            }
            x[(i, j)] = acc / den;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> CMat {
        CMat::from_fn(n, n, |i, j| {
            let a = ((i * 7 + j * 13) % 11) as f64 - 5.0;
            let b = ((i * 3 + j * 5) % 7) as f64 - 3.0;
            Complex64::new(a, 0.5 * b)
        })
    }

    fn residual(a: &CMat, f: &SchurForm) -> f64 {
        (a - &f.q * &f.t * f.q.adjoint()).norm()
    }

    #[test]
    fn schur_is_triangular_and_reproduces_matrix() {
        let a = sample(9);
        let f = SchurForm::new(a.clone()).unwrap();
        assert!(residual(&a, &f) < 1e-11 * a.norm());
        assert!((f.q.adjoint() * &f.q - CMat::identity(9, 9)).norm() < 1e-12);
    }

    #[test]
    fn reorder_moves_selection_to_front() {
        let a = sample(8);
        let mut f = SchurForm::new(a.clone()).unwrap();
        let ev = f.eigenvalues();
        let select: Vec<bool> = (0..8).map(|i| i == 5 || i == 7).collect();
        let k = f.reorder(&select);
        assert_eq!(k, 2);
        assert!((f.t[(0, 0)] - ev[5]).norm() < 1e-9);
        assert!((f.t[(1, 1)] - ev[7]).norm() < 1e-9);
        assert!(residual(&a, &f) < 1e-10 * a.norm());
    }

    #[test]
    fn sylvester_solution() {
        let f = SchurForm::new(sample(6)).unwrap();
        let t11 = f.t.view((0, 0), (2, 2)).into_owned();
        let t22 = f.t.view((2, 2), (4, 4)).into_owned();
        let c = f.t.view((0, 2), (2, 4)).into_owned();
        let x = triangular_sylvester(&t11, &t22, &c).unwrap();
        assert!((&t11 * &x - &x * &t22 - c).norm() < 1e-10);
    }
}
