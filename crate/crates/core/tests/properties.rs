mod common;

use beable_lab::algebra::{commutant, generate_algebra};
use beable_lab::beable::{build_appropriate_mixture, check_beable_subalgebra, verify_exclusion, MeasurementContext, VerifyOptions};
use beable_lab::classical::{block_decomposition, characters, classicality_check, dispersion_free_check};
use beable_lab::epr::{default_time_grid, incommensurability_check, is_epr_state, joint_distribution, marginal_residual, CommutingPair};
use beable_lab::gns::gns_construct;
use beable_lab::matrix::Vector;
use beable_lab::random;
use beable_lab::spectral::{min_eigenvalue, polar_decomposition, spectral_decomposition};
use beable_lab::state::State;
use beable_lab::weyl::{FiniteEprState, WeylSystem};
use beable_lab::witness::{construct_epr_witness, local_generators};
use beable_lab::{Operator, ToleranceConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_block_algebra, random_density};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

/// Hermitian `U diag(λ) U*` with eigenvalues drawn from a small set, so that
/// degeneracies are common.
fn degenerate_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Operator {
    let u = random::unitary(rng, n);
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(-2..=2) as f64).collect();
    &(&u * &Operator::diag_real(&values)) * &u.adjoint()
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn double_commutant_is_the_algebra(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_block_algebra(&mut rng, n);
        prop_assert_eq!(b.algebra.dim(), b.dim());
        let bcc = commutant(&commutant(&b.algebra, &tol()), &tol());
        prop_assert!(bcc.subspace_distance(&b.algebra) < tol().eps_rank);
    }

    #[test]
    fn generation_is_idempotent(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_block_algebra(&mut rng, n).algebra;
        let again = generate_algebra(b.basis(), n, &tol()).unwrap();
        prop_assert!(again.same_span(&b, &tol()));
    }

    #[test]
    fn polar_decomposition_contract(seed in any::<u64>(), n in 1usize..=6, rank in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rank = rank.min(n);
        let g = random::ginibre(&mut rng, n);
        let mask: Vec<f64> = (0..n).map(|k| if k < rank { 1.0 } else { 0.0 }).collect();
        let t = &(&g * &Operator::diag_real(&mask)) * &random::unitary(&mut rng, n);
        let p = polar_decomposition(&t, &tol());
        let v = &p.isometry;
        prop_assert!((&t - &(v * &p.modulus)).norm() <= tol().eps_zero * t.norm().max(1.0));
        prop_assert!((&(&(v * &v.adjoint()) * v) - v).norm() < tol().eps_zero);
        prop_assert!(min_eigenvalue(&p.modulus) > -tol().eps_zero);
    }

    #[test]
    fn spectral_projections_resolve_identity(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = degenerate_hermitian(&mut rng, n);
        let s = spectral_decomposition(&h, &tol()).unwrap();
        let sum = s.components.iter().fold(Operator::zeros(n), |acc, c| acc + &c.projection);
        prop_assert!(sum.approx_eq(&Operator::identity(n), tol().eps_zero));
        for (i, a) in s.components.iter().enumerate() {
            for (j, b) in s.components.iter().enumerate() {
                let prod = &a.projection * &b.projection;
                let expected = if i == j { a.projection.clone() } else { Operator::zeros(n) };
                prop_assert!(prod.approx_eq(&expected, tol().eps_zero));
            }
        }
        prop_assert!(s.reconstruct().approx_eq(&h, tol().eps_zero * h.norm().max(1.0)));
    }

    #[test]
    fn state_transform_preserves_positivity(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_density(&mut rng, n);
        let moved = phi.transformed(&random::unitary(&mut rng, n), &tol()).unwrap();
        prop_assert!(min_eigenvalue(moved.density()) > -tol().eps_zero);
        prop_assert!((moved.density().trace().re - 1.0).abs() < tol().eps_zero);
    }

    #[test]
    fn characters_are_dispersion_free(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_block_algebra(&mut rng, n);
        let chars = characters(&b.algebra, &tol());
        let one_dim = b.layout.iter().filter(|&&(k, _)| k == 1).count();
        prop_assert_eq!(chars.len(), one_dim);
        for c in &chars {
            prop_assert!(dispersion_free_check(&c.functional(), &b.algebra, &tol()));
        }
    }

    /// On an abelian algebra the weights are the state's values on the
    /// minimal projections.
    #[test]
    fn abelian_algebras_are_classical(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let blocks: Vec<f64> = (0..n).map(|_| rng.random_range(0..3) as f64).collect();
        let u = random::unitary(&mut rng, n);
        let h = &(&u * &Operator::diag_real(&blocks)) * &u.adjoint();
        let b = generate_algebra(&[h], n, &tol()).unwrap();
        let phi = random_density(&mut rng, n);
        let cert = classicality_check(&phi, &b, &tol());
        prop_assert!(cert.classical);
        prop_assert!(cert.residual < tol().eps_feas);
        let weights = cert.weights.unwrap();
        let decomposition = block_decomposition(&b, &tol());
        for (c, w) in cert.characters.iter().zip(&weights) {
            let z = &decomposition[c.source_block].central_projection;
            prop_assert!((phi.expect(z).re - w).abs() < tol().eps_feas);
        }
    }

    /// Weight on a block of size `k > 1` is never a mixture of characters.
    #[test]
    fn support_on_nonabelian_block_is_not_classical(seed in any::<u64>(), k in 2usize..=3, m in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + k * m;
        let mut gens = vec![Operator::diag_real(&(0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect::<Vec<_>>())];
        for i in 0..k {
            for j in 0..k {
                gens.push(Operator::from_fn(n, |r, c| {
                    let hit = r >= 1 && c >= 1 && (r - 1) / m == i && (c - 1) / m == j && (r - 1) % m == (c - 1) % m;
                    if hit { beable_lab::matrix::ONE } else { beable_lab::matrix::ZERO }
                }));
            }
        }
        let b = generate_algebra(&gens, n, &tol()).unwrap();
        let phi = random_density(&mut rng, n);
        prop_assert!(!classicality_check(&phi, &b, &tol()).classical);
    }

    #[test]
    fn gns_reproduces_the_state(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_block_algebra(&mut rng, n).algebra;
        let phi = if seed % 2 == 0 {
            State::vector(random::unit_vector(&mut rng, n), &tol()).unwrap()
        } else {
            random_density(&mut rng, n)
        };
        let g = gns_construct(&b, &phi, &tol());
        prop_assert!(g.contract_residual(&b, &phi) < tol().eps_zero);
        prop_assert!(g.homomorphism_residual(&b) < tol().eps_zero);
        prop_assert!(g.unit_residual(n) < tol().eps_zero);
    }

    #[test]
    fn epr_characterizations_agree(seed in any::<u64>(), n in 2usize..=5, epr in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random::unitary(&mut rng, n);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..3) as f64).collect();
        let mut b: Vec<f64> = (0..n).map(|_| rng.random_range(0..3) as f64).collect();
        b[0] = a[0];
        let conj = |v: &[f64]| &(&u * &Operator::diag_real(v)) * &u.adjoint();
        let pair = CommutingPair::new(conj(&a), conj(&b), &tol()).unwrap();
        let phi = if epr {
            let support: Vec<Vector> = (0..n).filter(|&j| a[j] == b[j]).map(|j| u.matrix().column(j).into_owned()).collect();
            State::from_density(random::density_on(&mut rng, &support, 1), &tol()).unwrap()
        } else {
            random_density(&mut rng, n)
        };
        let d = is_epr_state(&phi, &pair, &default_time_grid(), &tol()).unwrap();
        prop_assert!(d.consistent());
        prop_assert!(!epr || d.is_epr);
        let dist = joint_distribution(&pair, &phi, &tol()).unwrap();
        prop_assert!(marginal_residual(&dist, &pair, &phi, &tol()).unwrap() < tol().eps_feas);
        let total: f64 = dist.probabilities.iter().sum();
        prop_assert!((total - 1.0).abs() < tol().eps_zero);
    }
}

proptest! {
    #![proptest_config(config(24))]

    /// Random local unitaries and a random global conjugation of the factor
    /// embeddings leave every witness postcondition intact.
    #[test]
    fn witness_survives_conjugation(seed in any::<u64>(), layout in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sites, r1, r2): (Vec<usize>, Vec<usize>, Vec<usize>) = match layout {
            0 => (vec![2, 2], vec![0], vec![1]),
            1 => (vec![3, 3], vec![0], vec![1]),
            2 => (vec![2, 3], vec![0], vec![1]),
            _ => (vec![2, 2, 2], vec![0], vec![2]),
        };
        let n: usize = sites.iter().product();
        let u = random::unitary(&mut rng, n);
        let n1 = generate_algebra(&local_generators(&sites, &r1), n, &tol()).unwrap().conjugate(&u);
        let n2 = generate_algebra(&local_generators(&sites, &r2), n, &tol()).unwrap().conjugate(&u);
        let w = construct_epr_witness(&n1, &n2, &tol()).unwrap();
        prop_assert!(w.violations(&tol()).is_empty());
    }

    /// Violation reported for each second-pair candidate dominates the
    /// incommensurability modulus of its side; the mixture stays beable.
    #[test]
    fn exclusion_duality_and_mixture(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random::unitary(&mut rng, 4);
        let sites = [2, 2];
        let n1 = generate_algebra(&local_generators(&sites, &[0]), 4, &tol()).unwrap().conjugate(&u);
        let n2 = generate_algebra(&local_generators(&sites, &[1]), 4, &tol()).unwrap().conjugate(&u);
        let w = construct_epr_witness(&n1, &n2, &tol()).unwrap();
        let (e, f) = (w.e_pair(&tol()).unwrap(), w.f_pair(&tol()).unwrap());
        let opts = VerifyOptions::default();
        let ctx = MeasurementContext::new(w.state.clone(), e.first().clone(), &tol()).unwrap();
        let inc = incommensurability_check(&w.state, &e, &f, 4, &tol()).unwrap();
        let moduli = inc.moduli();
        for (side, candidate) in [f.first(), f.second()].into_iter().enumerate() {
            let r = verify_exclusion(&ctx, &e, &f, candidate, &opts, &tol()).unwrap();
            prop_assert!(r.excluded && r.violation >= moduli[side]);
        }
        let pool = [e.second().clone(), f.second().clone(), f.first().clone()];
        let mix = build_appropriate_mixture(&ctx, &pool, &opts, &tol()).unwrap();
        prop_assert!(check_beable_subalgebra(&mix.algebra, &ctx, &opts, &tol()).premises_ok());
    }

    #[test]
    fn weyl_grid_and_monotonicity(d in 2usize..=7, u in 0i64..7, v in 0i64..7) {
        let w = WeylSystem::new(d).unwrap();
        prop_assert!(w.weyl_residual() < 1e-13);
        let s = FiniteEprState::new(d, u, v).unwrap();
        prop_assert!(s.correlator_residual() < tol().eps_zero);
        for a in 0..d as i64 {
            for b in 0..d as i64 {
                let nonzero = s.commutator_modulus(a, b) > tol().eps_zero;
                prop_assert_eq!(nonzero, (a * b) % d as i64 != 0);
            }
        }
    }
}
