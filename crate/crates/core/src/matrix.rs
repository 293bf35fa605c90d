//! Dense complex square matrices and vectors.
//!
//! [`Operator`] is a thin newtype over `nalgebra::DMatrix<Complex64>` that
//! only admits square matrices and carries the tolerance-aware predicates the
//! rest of the crate relies on. Predicates compare Frobenius residuals against
//! `tol * max(1, ‖X‖_F)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix, DVector};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct Operator(DMatrix<C64>);

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.0[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Operator {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Operator(m))
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Operator(m)
    }

    pub fn zeros(n: usize) -> Self {
        Operator(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Operator(DMatrix::identity(n, n))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Operator(DMatrix::from_fn(n, n, f))
    }

    /// Builds an operator from complex rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Operator::from_fn(n, |i, j| rows[i][j]))
    }

    /// Builds an operator from real rows. Panics on ragged input; intended for
    /// literals in scenarios and tests.
    pub fn real(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "ragged real matrix literal");
        Operator::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(values: &[C64]) -> Self {
        Operator(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Operator::diag(&v)
    }

    /// `|v⟩⟨w|`
    pub fn outer(v: &Vector, w: &Vector) -> Self {
        Operator(v * w.adjoint())
    }

    /// `|v⟩⟨v|`
    pub fn projector(v: &Vector) -> Self {
        Operator::outer(v, v)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Operator {
        Operator(self.0.adjoint())
    }

    pub fn transpose(&self) -> Operator {
        Operator(self.0.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Trace inner product `tr(X* Y)`.
    pub fn inner(&self, other: &Operator) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
    }

    pub fn fro_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator (spectral) norm.
    pub fn norm(&self) -> f64 {
        if self.fro_norm() == 0.0 {
            return 0.0;
        }
        self.0
            .clone()
            .singular_values()
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> Operator {
        Operator(self.0.map(|z| z * c))
    }

    pub fn scale_real(&self, c: f64) -> Operator {
        Operator(self.0.map(|z| z * c))
    }

    pub fn kron(&self, other: &Operator) -> Operator {
        Operator(self.0.kronecker(&other.0))
    }

    /// `[X, Y] = XY - YX`
    pub fn commutator(&self, other: &Operator) -> Operator {
        Operator(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// `|X|² = X* X`
    pub fn abs_squared(&self) -> Operator {
        Operator(self.0.adjoint() * &self.0)
    }

    pub fn powi(&self, k: usize) -> Operator {
        let mut acc = Operator::identity(self.dim());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `(X + X*) / 2`
    pub fn hermitian_part(&self) -> Operator {
        Operator((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// `(X - X*) / 2i`, Hermitian, so that `X = re + i·im`.
    pub fn skew_part(&self) -> Operator {
        Operator((&self.0 - self.0.adjoint()) * C64::new(0.0, -0.5))
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.0 * v
    }

    /// Column-major vectorization.
    pub fn vectorize(&self) -> Vector {
        DVector::from_iterator(self.dim() * self.dim(), self.0.iter().cloned())
    }

    pub fn from_vectorized(v: &Vector, n: usize) -> Operator {
        Operator(DMatrix::from_iterator(n, n, v.iter().cloned()))
    }

    fn scale_ref(&self) -> f64 {
        self.fro_norm().max(1.0)
    }

    pub fn hermitian_residual(&self) -> f64 {
        (self - &self.adjoint()).fro_norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol * self.scale_ref()
    }

    /// `X = X* = X²`
    pub fn is_projection(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (&(self * self) - self).fro_norm() <= tol * self.scale_ref()
    }

    pub fn unitary_residual(&self) -> f64 {
        let id = Operator::identity(self.dim());
        let a = (&(&self.adjoint() * self) - &id).fro_norm();
        let b = (&(self * &self.adjoint()) - &id).fro_norm();
        a.max(b)
    }

    /// `X*X = XX* = I`
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_residual() <= tol * self.scale_ref()
    }

    /// `XX*X = X`
    pub fn is_partial_isometry(&self, tol: f64) -> bool {
        (&(&(self * &self.adjoint()) * self) - self).fro_norm() <= tol * self.scale_ref()
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.dim() == other.dim() && (self - other).fro_norm() <= tol * self.scale_ref()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Operator> for &Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                Operator(&self.0 $op &rhs.0)
            }
        }
        impl $trait<Operator> for Operator {
            type Output = Operator;
            fn $method(self, rhs: Operator) -> Operator {
                Operator(self.0 $op rhs.0)
            }
        }
        impl $trait<&Operator> for Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                Operator(self.0 $op &rhs.0)
            }
        }
        impl $trait<Operator> for &Operator {
            type Output = Operator;
            fn $method(self, rhs: Operator) -> Operator {
                Operator(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator(-&self.0)
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator(-self.0)
    }
}

impl Mul<&Vector> for &Operator {
    type Output = Vector;
    fn mul(self, rhs: &Vector) -> Vector {
        &self.0 * rhs
    }
}

// Matrix literals are nested arrays of `[re, im]` pairs; bare numbers are read
// as real entries.
impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let mut rows = serializer.serialize_seq(Some(n))?;
        for i in 0..n {
            let row: Vec<[f64; 2]> = (0..n)
                .map(|j| {
                    let z = self.0[(i, j)];
                    [z.re, z.im]
                })
                .collect();
            rows.serialize_element(&row)?;
        }
        rows.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

impl From<Entry> for C64 {
    fn from(e: Entry) -> C64 {
        match e {
            Entry::Pair([re, im]) => C64::new(re, im),
            Entry::Real(re) => C64::new(re, 0.0),
        }
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<Entry>> = Vec::deserialize(deserializer)?;
        let rows: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(C64::from).collect())
            .collect();
        Operator::from_rows(&rows).map_err(de::Error::custom)
    }
}

/// Parses a vector literal (array of `[re, im]` pairs or reals).
pub fn vector_from_value(value: &serde_json::Value) -> std::result::Result<Vector, String> {
    let entries: Vec<Entry> =
        serde_json::from_value(value.clone()).map_err(|e| format!("invalid vector literal: {e}"))?;
    if entries.is_empty() {
        return Err("vector literal is empty".into());
    }
    Ok(DVector::from_iterator(
        entries.len(),
        entries.into_iter().map(C64::from),
    ))
}

pub fn vector_to_value(v: &Vector) -> serde_json::Value {
    serde_json::Value::Array(
        v.iter()
            .map(|z| serde_json::json!([z.re, z.im]))
            .collect(),
    )
}

pub fn real_vector(values: &[f64]) -> Vector {
    DVector::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0)))
}

pub fn basis_vector(n: usize, k: usize) -> Vector {
    let mut v = DVector::zeros(n);
    v[k] = ONE;
    v
}

pub fn kron_vec(a: &Vector, b: &Vector) -> Vector {
    a.kronecker(b)
}

/// Rotates the global phase so that the largest-magnitude component is real
/// and positive (first such component on ties).
pub fn fix_phase(v: &Vector) -> Vector {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (k, z) in v.iter().enumerate() {
        if z.norm() > best_abs + 1e-12 {
            best = k;
            best_abs = z.norm();
        }
    }
    if best_abs <= 0.0 {
        return v.clone();
    }
    let phase = v[best] / v[best].norm();
    v.map(|z| z * phase.conj())
}

/// Pauli matrices and related literals.
pub mod pauli {
    use super::*;

    pub fn x() -> Operator {
        Operator::real(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn y() -> Operator {
        Operator::from_fn(2, |i, j| match (i, j) {
            (0, 1) => C64::new(0.0, -1.0),
            (1, 0) => C64::new(0.0, 1.0),
            _ => ZERO,
        })
    }

    pub fn z() -> Operator {
        Operator::diag_real(&[1.0, -1.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicates_on_literals() {
        let p = Operator::diag_real(&[1.0, 0.0]);
        assert!(p.is_projection(1e-12));
        assert!(p.is_partial_isometry(1e-12));
        assert!(!p.is_unitary(1e-12));
        assert!(pauli::x().is_unitary(1e-12));
        assert!(pauli::y().is_hermitian(1e-12));
        let nil = Operator::real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(nil.is_partial_isometry(1e-12));
        assert!(!nil.is_hermitian(1e-12));
    }

    #[test]
    fn spectral_norm_of_commutator() {
        let r = Operator::diag_real(&[1.0, 0.0]);
        let s = Operator::real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!((r.commutator(&s).norm() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn kron_and_vectorize_layout() {
        let a = pauli::z().kron(&Operator::identity(2));
        assert_eq!(a.dim(), 4);
        assert_eq!(a.get(2, 2), C64::new(-1.0, 0.0));
        let m = Operator::from_fn(3, |i, j| C64::new((i * 3 + j) as f64, 0.0));
        let v = m.vectorize();
        assert_eq!(v[1], m.get(1, 0));
        assert_eq!(Operator::from_vectorized(&v, 3), m);
    }

    #[test]
    fn hermitian_and_skew_parts_recombine() {
        let m = Operator::from_fn(3, |i, j| C64::new(i as f64 - j as f64, (i * j) as f64));
        let back = m.hermitian_part() + m.skew_part().scale(I);
        assert!(back.approx_eq(&m, 1e-14));
        assert!(m.skew_part().is_hermitian(1e-14));
    }

    #[test]
    fn serde_literal_roundtrip() {
        let y = pauli::y();
        let json = serde_json::to_string(&y).unwrap();
        let back: Operator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, y);
        let real: Operator = serde_json::from_str("[[1, 0], [0, [0, 2]]]").unwrap();
        assert_eq!(real.get(1, 1), C64::new(0.0, 2.0));
        assert!(serde_json::from_str::<Operator>("[[1, 0], [0]]").is_err());
    }
}
