//! Singular value decompositions backed by faer, with nalgebra as the
//! fallback when faer reports non-convergence.

use nalgebra::{DMatrix, DVector, Scalar};

use crate::matrix::C64;

/// `X = U diag(σ) V*` with `σ` descending. `U` has `min(rows, cols)`
/// columns; `V` is square so that it also spans the nullspace.
#[derive(Debug, Clone)]
pub struct Svd<T: Scalar> {
    pub u: DMatrix<T>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<T>,
}

impl<T: Scalar> Svd<T> {
    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.first().cloned().unwrap_or(0.0)
    }

    /// Columns of `V` whose singular value is at most `eps · max(1, σ_max)`,
    /// including the columns beyond `min(rows, cols)`.
    pub fn nullspace(&self, eps: f64) -> Vec<DVector<T>> {
        let cut = eps * self.max_singular_value().max(1.0);
        (0..self.v.ncols())
            .filter(|&k| self.singular_values.get(k).is_none_or(|&s| s <= cut))
            .map(|k| self.v.column(k).into_owned())
            .collect()
    }

    /// Number of singular values above `eps · max(1, σ_max)`.
    pub fn rank(&self, eps: f64) -> usize {
        let cut = eps * self.max_singular_value().max(1.0);
        self.singular_values.iter().filter(|&&s| s > cut).count()
    }
}

impl Svd<f64> {
    /// Minimum-norm least-squares solution, dropping singular values at or
    /// below `rcond · σ_max`.
    pub fn solve(&self, b: &DVector<f64>, rcond: f64) -> DVector<f64> {
        let cut = rcond * self.max_singular_value();
        let mut x = DVector::zeros(self.v.nrows());
        for (k, &s) in self.singular_values.iter().enumerate() {
            if s > cut {
                let c = self.u.column(k).dot(b) / s;
                x += self.v.column(k) * c;
            }
        }
        x
    }
}

macro_rules! decompose {
    ($name:ident, $t:ty, $re:expr) => {
        pub fn $name(m: &DMatrix<$t>) -> Svd<$t> {
            let (rows, cols) = m.shape();
            if rows == 0 || cols == 0 {
                return Svd {
                    u: DMatrix::zeros(rows, 0),
                    singular_values: Vec::new(),
                    v: DMatrix::identity(cols, cols),
                };
            }
            let f = faer::Mat::<$t>::from_fn(rows, cols, |i, j| m[(i, j)]);
            let k = rows.min(cols);
            let decomposed = if rows >= cols { f.thin_svd() } else { f.svd() };
            match decomposed {
                Ok(s) => {
                    let (u, sigma, v) = (s.U(), s.S(), s.V());
                    Svd {
                        u: DMatrix::from_fn(rows, k, |i, j| u[(i, j)]),
                        singular_values: (0..k).map(|k| $re(sigma[k])).collect(),
                        v: DMatrix::from_fn(cols, cols, |i, j| v[(i, j)]),
                    }
                }
                Err(_) => fallback(m),
            }
        }
    };
}

decompose!(svd, C64, |z: C64| z.re);
decompose!(svd_real, f64, |x: f64| x);

/// nalgebra's decomposition; wide inputs are padded with zero rows so that
/// `V` is complete.
fn fallback<T: nalgebra::ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Svd<T> {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let padded = if rows < cols {
        DMatrix::from_fn(cols, cols, |i, j| if i < rows { m[(i, j)].clone() } else { T::zero() })
    } else {
        m.clone()
    };
    let s = padded.svd(true, true);
    let mut order: Vec<usize> = (0..s.singular_values.len()).collect();
    order.sort_by(|&a, &b| s.singular_values[b].total_cmp(&s.singular_values[a]));
    let u = s.u.expect("requested U");
    let v = s.v_t.expect("requested V^T").adjoint();
    Svd {
        u: DMatrix::from_fn(rows, k, |i, j| u[(i, order[j])].clone()),
        singular_values: order.iter().take(k).map(|&j| s.singular_values[j]).collect(),
        v: DMatrix::from_fn(cols, cols, |i, j| v[(i, order[j])].clone()),
    }
}
