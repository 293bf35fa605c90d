//! Unital *-subalgebras of `M_n`, stored as an orthonormal Hermitian basis of
//! their linear span under the trace inner product `⟨X, Y⟩ = tr(X* Y)`.
//!
//! A *-closed span always admits a Hermitian basis: every element splits as
//! `re + i·im` with both parts in the span. Keeping the basis Hermitian makes
//! Gram-Schmidt coefficients real and keeps adjoint closure automatic.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{Operator, Vector, C64, ONE, ZERO};
use crate::spectral::spectral_decomposition;
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone)]
pub struct StarAlgebra {
    ambient_dim: usize,
    basis: Vec<Operator>,
}

/// Incremental orthonormal Hermitian basis.
struct SpanBuilder {
    n: usize,
    eps: f64,
    basis: Vec<Operator>,
}

impl SpanBuilder {
    fn new(n: usize, eps: f64) -> Self {
        SpanBuilder {
            n,
            eps,
            basis: Vec::new(),
        }
    }

    fn full(&self) -> bool {
        self.basis.len() >= self.n * self.n
    }

    /// Adds the component of Hermitian `h` orthogonal to the current span when
    /// its norm exceeds `eps * scale`. Two Gram-Schmidt passes.
    fn push_hermitian(&mut self, h: &Operator, scale: f64) -> bool {
        if self.full() {
            return false;
        }
        let threshold = self.eps * scale;
        if h.fro_norm() <= threshold {
            return false;
        }
        let mut r = h.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.inner(&r).re;
                r = r - b.scale_real(c);
            }
        }
        let norm = r.fro_norm();
        if norm <= threshold {
            return false;
        }
        self.basis.push(r.scale_real(1.0 / norm).hermitian_part());
        true
    }

    fn push(&mut self, x: &Operator, scale: f64) -> bool {
        let a = self.push_hermitian(&x.hermitian_part(), scale);
        let b = self.push_hermitian(&x.skew_part(), scale);
        a || b
    }
}

impl StarAlgebra {
    /// `ℂ I`
    pub fn scalars(n: usize) -> Self {
        StarAlgebra {
            ambient_dim: n,
            basis: vec![Operator::identity(n).scale_real(1.0 / (n as f64).sqrt())],
        }
    }

    /// The full matrix algebra `M_n` with the Hermitian matrix-unit basis.
    pub fn full(n: usize) -> Self {
        let mut basis = Vec::with_capacity(n * n);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..n {
            for j in i..n {
                if i == j {
                    basis.push(Operator::from_fn(n, |a, b| if a == i && b == i { ONE } else { ZERO }));
                } else {
                    basis.push(Operator::from_fn(n, |a, b| {
                        if (a, b) == (i, j) || (a, b) == (j, i) {
                            C64::new(h, 0.0)
                        } else {
                            ZERO
                        }
                    }));
                    basis.push(Operator::from_fn(n, |a, b| {
                        if (a, b) == (i, j) {
                            C64::new(0.0, -h)
                        } else if (a, b) == (j, i) {
                            C64::new(0.0, h)
                        } else {
                            ZERO
                        }
                    }));
                }
            }
        }
        StarAlgebra {
            ambient_dim: n,
            basis,
        }
    }

    /// Linear span of `elements` and their adjoints together with `I`. The
    /// caller guarantees the span is already closed under multiplication.
    pub(crate) fn from_star_closed_span(n: usize, elements: &[Operator], tol: &ToleranceConfig) -> Self {
        let mut b = SpanBuilder::new(n, tol.eps_rank);
        b.push(&Operator::identity(n), 1.0);
        for e in elements {
            b.push(e, e.fro_norm().max(1.0));
        }
        StarAlgebra {
            ambient_dim: n,
            basis: b.basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Operator] {
        &self.basis
    }

    /// Coordinates `⟨Bₖ, X⟩` of the orthogonal projection of `X` onto the span.
    pub fn coordinates(&self, x: &Operator) -> Vec<C64> {
        self.basis.iter().map(|b| b.inner(x)).collect()
    }

    pub fn project(&self, x: &Operator) -> Operator {
        self.basis
            .iter()
            .zip(self.coordinates(x))
            .fold(Operator::zeros(self.ambient_dim), |acc, (b, c)| acc + b.scale(c))
    }

    /// `‖X − P(X)‖_F / max(1, ‖X‖_F)` where `P` projects onto the span.
    pub fn membership_residual(&self, x: &Operator) -> f64 {
        (x - &self.project(x)).fro_norm() / x.fro_norm().max(1.0)
    }

    pub fn contains(&self, x: &Operator, tol: &ToleranceConfig) -> bool {
        self.membership_residual(x) < tol.eps_rank
    }

    /// Largest commutator among basis pairs (Frobenius norm).
    pub fn max_basis_commutator(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                worst = worst.max(a.commutator(b).fro_norm());
            }
        }
        worst
    }

    pub fn is_abelian(&self, tol: &ToleranceConfig) -> bool {
        self.max_basis_commutator() <= tol.eps_zero
    }

    /// Largest membership residual of any basis product in the span.
    pub fn closure_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.membership_residual(&(a * b)));
            }
        }
        worst
    }

    /// Symmetric subspace distance: 1 if dimensions differ, otherwise the
    /// largest membership residual of either orthonormal basis in the other span.
    pub fn subspace_distance(&self, other: &StarAlgebra) -> f64 {
        if self.dim() != other.dim() || self.ambient_dim != other.ambient_dim {
            return 1.0;
        }
        let a = self
            .basis
            .iter()
            .map(|x| other.membership_residual(x))
            .fold(0.0, f64::max);
        let b = other
            .basis
            .iter()
            .map(|x| self.membership_residual(x))
            .fold(0.0, f64::max);
        a.max(b)
    }

    pub fn same_span(&self, other: &StarAlgebra, tol: &ToleranceConfig) -> bool {
        self.subspace_distance(other) < tol.eps_rank
    }

    /// `U* B U` for unitary `U`.
    pub fn conjugate(&self, u: &Operator) -> StarAlgebra {
        let ud = u.adjoint();
        StarAlgebra {
            ambient_dim: self.ambient_dim,
            basis: self.basis.iter().map(|b| (&(&ud * b) * u).hermitian_part()).collect(),
        }
    }

    /// Largest commutator between basis elements of `self` and `other`.
    pub fn max_cross_commutator(&self, other: &StarAlgebra) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.basis {
            for b in &other.basis {
                worst = worst.max(a.commutator(b).fro_norm());
            }
        }
        worst
    }
}

fn check_dims(generators: &[Operator], ambient_dim: usize) -> Result<()> {
    if ambient_dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    for g in generators {
        if g.dim() != ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: g.dim(),
            });
        }
    }
    Ok(())
}

/// Smallest unital *-subalgebra of `M_n` containing `generators`.
///
/// Starts from `I` and the Hermitian and skew parts of each generator, then
/// repeatedly adjoins the parts of all new pairwise products until a full
/// pass adds nothing. Terminates after at most `n²` additions.
pub fn generate_algebra(
    generators: &[Operator],
    ambient_dim: usize,
    tol: &ToleranceConfig,
) -> Result<StarAlgebra> {
    check_dims(generators, ambient_dim)?;
    let n = ambient_dim;
    let mut b = SpanBuilder::new(n, tol.eps_rank);
    b.push(&Operator::identity(n), 1.0);
    for g in generators {
        b.push(g, g.fro_norm().max(f64::MIN_POSITIVE));
    }

    // Pairs (i, j) with both indices below `done` have been multiplied already.
    let mut done = 0;
    loop {
        let len = b.basis.len();
        if done == len || b.full() {
            break;
        }
        for i in 0..len {
            for j in 0..len {
                if i < done && j < done {
                    continue;
                }
                let p = &b.basis[i] * &b.basis[j];
                b.push(&p, 1.0);
                if b.full() {
                    break;
                }
            }
        }
        done = len;
    }
    Ok(StarAlgebra {
        ambient_dim: n,
        basis: b.basis,
    })
}

/// Right singular vectors of `m` whose singular values are at most
/// `eps * max(1, σ_max)`.
fn nullspace(m: DMatrix<C64>, eps: f64) -> Vec<Vector> {
    crate::svd::svd(&m).nullspace(eps)
}

/// Commutant of an abelian algebra as the block algebra over the eigenspaces
/// of a generic element. `None` if the element turned out not to separate the
/// minimal projections.
fn abelian_commutant(b: &StarAlgebra, tol: &ToleranceConfig) -> Option<StarAlgebra> {
    let n = b.ambient_dim;
    let generic = b
        .basis
        .iter()
        .enumerate()
        .fold(Operator::zeros(n), |acc, (k, g)| acc + g.scale_real(1.0 + ((k + 2) as f64).sqrt().fract()));
    let (values, vectors) = crate::spectral::eigh(&generic);
    let radius = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = tol.eps_rank * radius.max(1.0);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..values.len() {
        match groups.last_mut() {
            Some(g) if values[k] - values[*g.last().unwrap()] <= gap => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    let unit = |a: usize, c: usize| Operator::from_matrix_unchecked(vectors.column(a) * vectors.column(c).adjoint());
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::new();
    for g in &groups {
        for (x, &a) in g.iter().enumerate() {
            basis.push(unit(a, a).hermitian_part());
            for &c in &g[x + 1..] {
                let (ac, ca) = (unit(a, c), unit(c, a));
                basis.push((&ac + &ca).scale_real(r));
                basis.push((&ac - &ca).scale(C64::new(0.0, r)));
            }
        }
    }
    let candidate = StarAlgebra { ambient_dim: n, basis };
    let scale = b.basis.iter().map(Operator::norm).fold(1.0, f64::max);
    (candidate.max_cross_commutator(b) <= tol.eps_zero * scale).then_some(candidate)
}

/// `{X : XG = GX for every basis element G}`.
pub fn commutant(b: &StarAlgebra, tol: &ToleranceConfig) -> StarAlgebra {
    let n = b.ambient_dim;
    let gens: Vec<&Operator> = b
        .basis
        .iter()
        .filter(|g| {
            // the identity direction constrains nothing
            let off_identity = *g - &Operator::identity(n).scale(g.trace() / n as f64);
            off_identity.fro_norm() > tol.eps_zero
        })
        .collect();
    if gens.is_empty() {
        return StarAlgebra::full(n);
    }
    if b.is_abelian(tol) {
        if let Some(c) = abelian_commutant(b, tol) {
            return c;
        }
    }
    nullspace_commutant(n, &gens, tol)
}

/// Nullspace of the stacked maps `vec(X) ↦ (Gᵀ ⊗ I − I ⊗ G) vec(X)`.
fn nullspace_commutant(n: usize, gens: &[&Operator], tol: &ToleranceConfig) -> StarAlgebra {
    let nn = n * n;
    let mut m = DMatrix::<C64>::zeros(gens.len() * nn, nn);
    for (k, g) in gens.iter().enumerate() {
        let off = k * nn;
        for i in 0..n {
            for j in 0..n {
                let row = off + i + j * n;
                for l in 0..n {
                    // (XG)_ij = Σ_l X_il G_lj
                    m[(row, i + l * n)] += g.get(l, j);
                    // (GX)_ij = Σ_l G_il X_lj
                    m[(row, l + j * n)] -= g.get(i, l);
                }
            }
        }
    }
    let null: Vec<Operator> = nullspace(m, tol.eps_rank)
        .iter()
        .map(|v| Operator::from_vectorized(v, n))
        .collect();
    StarAlgebra::from_star_closed_span(n, &null, tol)
}

/// `B ∩ B′`, computed as the coefficient vectors `c` with
/// `[Σ cₖ Bₖ, Bⱼ] = 0` for every `j`.
pub fn center(b: &StarAlgebra, tol: &ToleranceConfig) -> StarAlgebra {
    let n = b.ambient_dim;
    let nn = n * n;
    let d = b.dim();
    let mut m = DMatrix::<C64>::zeros(d * nn, d);
    for (j, bj) in b.basis.iter().enumerate() {
        for (k, bk) in b.basis.iter().enumerate() {
            let c = bk.commutator(bj);
            for (r, z) in c.matrix().iter().enumerate() {
                m[(j * nn + r, k)] = *z;
            }
        }
    }
    let elements: Vec<Operator> = nullspace(m, tol.eps_rank)
        .iter()
        .map(|c| {
            b.basis
                .iter()
                .zip(c.iter())
                .fold(Operator::zeros(n), |acc, (bk, ck)| acc + bk.scale(*ck))
        })
        .collect();
    StarAlgebra::from_star_closed_span(n, &elements, tol)
}

/// A pair of projections in `B` with a nonzero commutator.
///
/// Candidates are the spectral projections of the basis elements (each is a
/// Hermitian element of `B`, so its spectral projections lie in `B`). All
/// pairs are scanned and the one with the largest commutator norm wins; the
/// first such pair is kept on ties.
pub fn find_noncommuting_projections(
    b: &StarAlgebra,
    tol: &ToleranceConfig,
) -> Result<(Operator, Operator)> {
    let mut candidates: Vec<Operator> = Vec::new();
    for g in &b.basis {
        let spectrum = spectral_decomposition(g, tol)?;
        if spectrum.len() < 2 {
            continue;
        }
        for c in spectrum.components {
            if !candidates.iter().any(|p| p.approx_eq(&c.projection, tol.eps_rank)) {
                candidates.push(c.projection);
            }
        }
    }
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let norm = candidates[i].commutator(&candidates[j]).norm();
            if best.is_none_or(|(_, _, m)| norm > m + 1e-15) {
                best = Some((i, j, norm));
            }
        }
    }
    match best {
        Some((i, j, norm)) if norm > tol.eps_zero => Ok((candidates[i].clone(), candidates[j].clone())),
        _ => Err(Error::AbelianAlgebra),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::pauli;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn m2_tensor_id() -> StarAlgebra {
        StarAlgebra::from_star_closed_span(
            4,
            &[pauli::x(), pauli::y(), pauli::z()]
                .iter()
                .map(|p| p.kron(&Operator::identity(2)))
                .collect::<Vec<_>>(),
            &tol(),
        )
    }

    /// Brute-force closure oracle: multiply every element of the current
    /// spanning list with every other and count rank with a plain SVD.
    fn brute_force_dim(generators: &[Operator], n: usize) -> usize {
        let mut elems: Vec<Operator> = vec![Operator::identity(n)];
        elems.extend(generators.iter().cloned());
        elems.extend(generators.iter().map(|g| g.adjoint()));
        let rank = |elems: &[Operator]| {
            let m = DMatrix::from_fn(n * n, elems.len(), |r, c| elems[c].vectorize()[r]);
            m.singular_values().iter().filter(|&&s| s > 1e-8).count()
        };
        let mut prev = 0;
        for _ in 0..8 {
            let r = rank(&elems);
            if r == prev {
                break;
            }
            prev = r;
            let cur = elems.clone();
            for a in &cur {
                for b in &cur {
                    elems.push(a * b);
                }
            }
            if elems.len() > 400 {
                let m = DMatrix::from_fn(n * n, elems.len(), |r, c| elems[c].vectorize()[r]);
                let svd = crate::svd::svd(&m);
                let u = svd.u;
                elems = (0..svd.singular_values.len())
                    .filter(|&k| svd.singular_values[k] > 1e-8)
                    .map(|k| Operator::from_vectorized(&u.column(k).into_owned(), n))
                    .collect();
            }
        }
        prev
    }

    #[test]
    fn empty_generators_give_scalars() {
        let b = generate_algebra(&[], 3, &tol()).unwrap();
        assert_eq!(b.dim(), 1);
        assert!(b.contains(&Operator::identity(3), &tol()));
    }

    #[test]
    fn idempotent_generator_gives_two_dims() {
        let b = generate_algebra(&[Operator::diag_real(&[1.0, 0.0])], 2, &tol()).unwrap();
        assert_eq!(b.dim(), 2);
        assert!(b.is_abelian(&tol()));
    }

    #[test]
    fn pauli_x_z_generate_m2() {
        let gens = [pauli::x(), pauli::z()];
        let b = generate_algebra(&gens, 2, &tol()).unwrap();
        assert_eq!(brute_force_dim(&gens, 2), 4);
        assert_eq!(b.dim(), 4);
    }

    #[test]
    fn basis_is_orthonormal_and_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gens = [random::ginibre(&mut rng, 2).kron(&Operator::identity(2))];
        let b = generate_algebra(&gens, 4, &tol()).unwrap();
        assert_eq!(b.dim(), brute_force_dim(&gens, 4));
        for (i, x) in b.basis().iter().enumerate() {
            assert!(x.is_hermitian(1e-14));
            for (j, y) in b.basis().iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((x.inner(y) - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
        assert!(b.closure_residual() < 1e-10);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let err = generate_algebra(&[pauli::x(), Operator::identity(3)], 2, &tol()).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn commutant_of_full_is_scalars() {
        let c = commutant(&StarAlgebra::full(2), &tol());
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&Operator::identity(2), &tol()));
    }

    #[test]
    fn commutant_of_scalars_is_full() {
        assert_eq!(commutant(&StarAlgebra::scalars(3), &tol()).dim(), 9);
    }

    #[test]
    fn abelian_commutant_matches_nullspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3usize, 4, 6] {
            let u = random::unitary(&mut rng, n);
            // eigenvalue pattern with repeats, so blocks of size > 1 appear
            let d = Operator::diag_real(&(0..n).map(|k| (k % 2) as f64 + (k / 3) as f64).collect::<Vec<_>>());
            let h = &(&u.adjoint() * &d) * &u;
            let a = generate_algebra(&[h], n, &tol()).unwrap();
            let fast = commutant(&a, &tol());
            let gens: Vec<&Operator> = a.basis().iter().collect();
            let slow = nullspace_commutant(n, &gens, &tol());
            assert_eq!(fast.dim(), slow.dim());
            assert!(fast.subspace_distance(&slow) < 1e-9);
        }
    }

    #[test]
    fn commutant_of_tensor_factor() {
        let c = commutant(&m2_tensor_id(), &tol());
        let expected = StarAlgebra::from_star_closed_span(
            4,
            &[pauli::x(), pauli::y(), pauli::z()]
                .iter()
                .map(|p| Operator::identity(2).kron(p))
                .collect::<Vec<_>>(),
            &tol(),
        );
        assert_eq!(c.dim(), 4);
        assert!(c.same_span(&expected, &tol()));
    }

    #[test]
    fn center_of_block_algebra() {
        let gens = [
            Operator::diag_real(&[1.0, 0.0]).kron(&pauli::x()),
            Operator::diag_real(&[1.0, 0.0]).kron(&pauli::z()),
            Operator::diag_real(&[0.0, 1.0]).kron(&Operator::identity(2)),
        ];
        let b = generate_algebra(&gens, 4, &tol()).unwrap();
        assert_eq!(b.dim(), 5);
        let z = center(&b, &tol());
        assert_eq!(z.dim(), 2);
        assert!(z.is_abelian(&tol()));
    }

    #[test]
    fn noncommuting_projections_in_m2() {
        let (r, s) = find_noncommuting_projections(&StarAlgebra::full(2), &tol()).unwrap();
        assert!(r.is_projection(1e-12) && s.is_projection(1e-12));
        // two rank-one projections at 45 degrees maximize the commutator
        assert!((r.commutator(&s).norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_algebra_is_abelian() {
        let b = generate_algebra(&[Operator::diag_real(&[1.0, 2.0, 3.0])], 3, &tol()).unwrap();
        assert_eq!(b.dim(), 3);
        assert_eq!(
            find_noncommuting_projections(&b, &tol()).unwrap_err(),
            Error::AbelianAlgebra
        );
    }

    #[test]
    fn noncommuting_projections_stay_in_factor() {
        let b = m2_tensor_id();
        let (r, s) = find_noncommuting_projections(&b, &tol()).unwrap();
        assert!(b.contains(&r, &tol()) && b.contains(&s, &tol()));
        assert!((r.commutator(&s).norm() - 0.5).abs() < 1e-12);
    }
}
