use discord_witness::circuit::{two_setting_measurement, witness_via_circuit};
use discord_witness::dqc1::{self, Dqc1Config};
use discord_witness::linalg::{
    c, identity, kron, max_abs_diff, partial_trace, random_state, random_unitary, von_neumann_entropy, Subsystem,
};
use discord_witness::loo::LooBasis;
use discord_witness::oracle::random_classical_quantum;
use discord_witness::witness::{
    dephase, q_value, tilde_purity, witness_via_permutation, witness_via_r, CorrelationMatrix,
};
use discord_witness::{states, BipartiteState, DEFAULT_SIZE_CAP};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn shape() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((2, 2)), Just((2, 3)), Just((3, 2)), Just((3, 3))]
}

/// `(state, seed)` over all small shapes and ranks.
fn any_state() -> impl Strategy<Value = (BipartiteState, u64)> {
    (shape(), any::<u64>(), 0usize..9).prop_map(|((da, db), seed, r)| {
        let rank = 1 + r % (da * db);
        (random_state(da, db, rank, seed).unwrap(), seed)
    })
}

fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    g.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witness_is_never_positive((s, _) in any_state()) {
        prop_assert!(witness_via_r(&s) <= 1e-12);
    }

    #[test]
    fn r_matrix_and_permutation_routes_agree((s, _) in any_state()) {
        let gap = (witness_via_r(&s) - witness_via_permutation(&s).unwrap()).abs();
        prop_assert!(gap <= 1e-10, "gap {gap:e}");
    }

    #[test]
    fn circuit_route_agrees(seed in any::<u64>(), db in 2usize..4) {
        let s = random_state(2, db, 2 * db, seed).unwrap();
        let gap = (witness_via_circuit(&s, DEFAULT_SIZE_CAP).unwrap() - witness_via_r(&s)).abs();
        prop_assert!(gap <= 1e-10);
    }

    #[test]
    fn two_setting_tables_are_consistent(seed in any::<u64>()) {
        let s = random_state(2, 2, 4, seed).unwrap();
        let r = two_setting_measurement(&s, DEFAULT_SIZE_CAP).unwrap();
        for t in [&r.setting_a, &r.setting_b] {
            prop_assert!((t.probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
            prop_assert!(t.probabilities.iter().all(|&p| p >= -1e-12));
        }
        prop_assert!(r.marginal_gap <= 1e-10);
        prop_assert!((r.witness - witness_via_r(&s)).abs() <= 1e-10);
    }

    #[test]
    fn local_unitaries_leave_the_witness_unchanged((s, seed) in any_state()) {
        let (da, db) = s.dims();
        let rotated = s.local_unitary(&random_unitary(da, seed ^ 1), &random_unitary(db, seed ^ 2)).unwrap();
        prop_assert!((witness_via_r(&s) - witness_via_r(&rotated)).abs() <= 1e-10);
    }

    #[test]
    fn witness_does_not_depend_on_the_local_basis((s, seed) in any_state()) {
        let (da, db) = s.dims();
        let ga = LooBasis::gell_mann(da).unwrap();
        let gb = LooBasis::gell_mann(db).unwrap();
        let ra = ga.rotated(&random_orthogonal(da * da - 1, seed)).unwrap();
        let rb = gb.rotated(&random_orthogonal(db * db - 1, seed.wrapping_add(7))).unwrap();
        let w = CorrelationMatrix::in_bases(&s, &ra, &rb).unwrap().witness();
        prop_assert!((w - witness_via_r(&s)).abs() <= 1e-10);
    }

    #[test]
    fn structural_identities((s, _) in any_state()) {
        let r = CorrelationMatrix::new(&s);
        prop_assert!((r.trace_gram() - tilde_purity(&s)).abs() <= 1e-12);
        prop_assert!(r.trace_gram_squared() >= -1e-14);
        let radicand = witness_via_r(&s) + tilde_purity(&s).powi(2);
        prop_assert!((radicand - r.trace_gram_squared()).abs() <= 1e-12);
        prop_assert!(max_abs_diff(&r.reconstruct(), s.matrix()) <= 1e-12);
    }

    #[test]
    fn q_is_at_least_the_marginal_term((s, _) in any_state()) {
        let q = q_value(&s, witness_via_r(&s)).unwrap();
        let floor = s.reduced_b().iter().map(|z| z.norm_sqr()).sum::<f64>() / s.d_a() as f64;
        prop_assert!(q >= floor - 1e-12);
    }

    #[test]
    fn low_rank_r_states_are_dephasing_invariant(seed in any::<u64>(), db in 2usize..4, da in 2usize..4) {
        // Qubit classical-quantum states and product states have rank(R) <= 1.
        let cq = random_classical_quantum(2, db, 2, seed).unwrap();
        let sigma = random_state(da, 2, 2 * da, seed ^ 3).unwrap().reduced_a();
        let tau = random_state(db, 2, 2 * db, seed ^ 5).unwrap().reduced_a();
        let prod = states::product(&sigma, &tau).unwrap();
        for s in [cq, prod] {
            let r = CorrelationMatrix::new(&s);
            prop_assert!(r.rank() <= 1);
            let projectors = r.dephasing_projectors().unwrap();
            prop_assert!(max_abs_diff(&dephase(s.matrix(), &projectors, db), s.matrix()) <= 1e-10);
            prop_assert!(witness_via_r(&s).abs() <= 1e-10);
        }
    }

    #[test]
    fn entropy_and_purity_bounds((s, _) in any_state()) {
        let d = s.dim() as f64;
        let h = s.entropy();
        prop_assert!((-1e-12..=d.log2() + 1e-12).contains(&h));
        let p = s.purity();
        prop_assert!(p >= 1.0 / d - 1e-12 && p <= 1.0 + 1e-12);
        prop_assert!(h >= -p.log2() - 1e-9);
        let ha = von_neumann_entropy(&s.reduced_a()).unwrap();
        prop_assert!(ha <= (s.d_a() as f64).log2() + 1e-12);
    }

    #[test]
    fn partial_trace_inverts_kron(sa in any::<u64>(), sb in any::<u64>(), da in 2usize..4, db in 2usize..4) {
        let rho_a = random_state(da, 2, 2 * da, sa).unwrap().reduced_a();
        let rho_b = random_state(db, 2, 2 * db, sb).unwrap().reduced_a();
        let joint = kron(&rho_a, &rho_b).unwrap();
        prop_assert!(max_abs_diff(&partial_trace(&joint, da, db, Subsystem::A).unwrap(), &rho_a) <= 1e-14);
        prop_assert!(max_abs_diff(&partial_trace(&joint, da, db, Subsystem::B).unwrap(), &rho_b) <= 1e-14);
    }

    #[test]
    fn dqc1_invariants(seed in any::<u64>(), n in 1usize..3, alpha in 0.0f64..=1.0) {
        let d = 1 << n;
        let cfg = Dqc1Config::new(n, alpha, random_unitary(d, seed)).unwrap();
        let rho = dqc1::output_state(&cfg).unwrap();
        let mixed = identity(d) / c(d as f64, 0.0);
        prop_assert!(max_abs_diff(&rho.reduced_b(), &mixed) <= 1e-14);
        let w = dqc1::witness_closed_form(&cfg);
        prop_assert!(w <= 1e-15);
        prop_assert!((w - witness_via_permutation(&rho).unwrap()).abs() <= 1e-12);
        let t = dqc1::normalized_trace(&cfg).unwrap();
        prop_assert!((c(t.sigma_x, t.sigma_y) - t.tau() * c(alpha, 0.0)).norm() <= 1e-12);
    }
}
