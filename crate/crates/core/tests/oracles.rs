use discord_witness::linalg::{random_state, random_unitary};
use discord_witness::oracle::{
    apply_measurement, branch_purity_sum, conditional_entropy, discord_at, discord_vn, geometric_discord,
    random_classical_quantum, MMatrix, MeasurementBasis, OptimizerConfig,
};
use discord_witness::witness::{discord_lower_bound, geometric_discord_lower_bound, q_value, witness_via_r};
use discord_witness::states;

#[test]
fn werner_family_oracles_match_grid_and_bounds() {
    let cfg = OptimizerConfig::default().with_grid();
    for k in 0..=5 {
        let s = states::werner(k as f64 / 5.0).unwrap();
        let d = discord_vn(&s, &cfg).unwrap();
        assert!((d.grid_value.unwrap() - d.value).abs() < 1e-8, "p = {}", k as f64 / 5.0);
        assert!(discord_lower_bound(&s) <= d.value + 1e-6);
        let g = geometric_discord(&s, &cfg).unwrap();
        assert!(geometric_discord_lower_bound(&s) <= g.value + 1e-6);
    }
}

#[test]
fn qubit_oracle_is_not_beaten_by_the_grid() {
    let cfg = OptimizerConfig::default().with_grid();
    for seed in 0..6 {
        let s = random_state(2, 2, 1 + seed as usize % 4, seed).unwrap();
        let d = discord_vn(&s, &cfg).unwrap();
        assert!(d.value <= d.grid_value.unwrap() + 1e-9, "seed {seed}");
    }
}

#[test]
fn qubit_zero_discord_iff_zero_witness() {
    let cfg = OptimizerConfig::default();
    for seed in 0..10 {
        let cq = random_classical_quantum(2, 3, 2, seed).unwrap();
        assert!(discord_vn(&cq, &cfg).unwrap().value < 1e-6);
        assert!(witness_via_r(&cq).abs() < 1e-10);
        let generic = random_state(2, 3, 6, seed).unwrap();
        assert!(discord_vn(&generic, &cfg).unwrap().value > 1e-6);
        assert!(witness_via_r(&generic) < -1e-12);
    }
}

#[test]
fn inequality_chain_on_random_bases() {
    for seed in 0..200u64 {
        let (da, db) = [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)][seed as usize % 5];
        let s = random_state(da, db, 1 + seed as usize % (da * db), seed).unwrap();
        let basis = MeasurementBasis::from_unitary(random_unitary(da, seed + 1000)).unwrap();
        let bps = branch_purity_sum(&s, &basis).unwrap();
        let q = q_value(&s, witness_via_r(&s)).unwrap();
        assert!(bps <= q + 1e-9, "seed {seed}");
        assert!((MMatrix::new(&s).branch_purity_sum(&basis).unwrap() - bps).abs() < 1e-10);
        let cond = conditional_entropy(&apply_measurement(&s, &basis).unwrap());
        assert!(cond >= -(da as f64).log2() - bps.log2() - 1e-9, "seed {seed}");
        assert!(discord_at(&s, &basis).unwrap() >= discord_lower_bound(&s) - 1e-9);
    }
}

#[test]
fn oracle_reports_are_reproducible() {
    let s = random_state(3, 3, 5, 21).unwrap();
    let cfg = OptimizerConfig { restarts: 8, seed: 4, ..Default::default() };
    let a = discord_vn(&s, &cfg).unwrap();
    let b = discord_vn(&s, &cfg).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.converged);
    assert!(a.restart_diagnostics.iter().any(|r| r.converged));
}
