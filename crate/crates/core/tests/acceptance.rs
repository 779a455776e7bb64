//! Acceptance gate: eight end-to-end criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the verdict lines always
//! reach the test log. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use discord_witness::circuit::{sample_circuit, two_setting_measurement, witness_via_circuit};
use discord_witness::dqc1::{self, Dqc1Config, UnitarySpec};
use discord_witness::linalg::{c, identity, random_state, random_unitary};
use discord_witness::loo::{swap_operator, LooBasis};
use discord_witness::oracle::{
    apply_measurement, branch_purity_sum, classical_quantum_state, conditional_entropy, discord_vn,
    geometric_discord, random_classical_quantum, MeasurementBasis, OptimizerConfig,
};
use discord_witness::perm::witness_term_traces;
use discord_witness::witness::{
    discord_lower_bound, geometric_discord_lower_bound, q_value, tilde_purity, witness_via_permutation,
    witness_via_r, CorrelationMatrix,
};
use discord_witness::{states, BipartiteState, DEFAULT_SIZE_CAP};
use nalgebra::DVector;
use rayon::prelude::*;

const CAP: usize = DEFAULT_SIZE_CAP;

/// Random state with rank cycling through `1..=dA·dB`.
fn corpus_state(da: usize, db: usize, seed: u64) -> BipartiteState {
    let rank = 1 + (seed as usize % (da * db));
    random_state(da, db, rank, seed).expect("valid rank")
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut worst = f64::NEG_INFINITY;
    for (k, (da, db)) in [(2, 2), (2, 3), (3, 2), (3, 3)].into_iter().enumerate() {
        let shape_worst = (0..1000u64)
            .into_par_iter()
            .map(|i| {
                let s = corpus_state(da, db, 1_000_000 * (k as u64 + 1) + i);
                witness_via_r(&s).max(witness_via_permutation(&s).expect("within cap"))
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        worst = worst.max(shape_worst);
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= 1e-12 && secs < 60.0,
        format!("max witness over 4000 states = {worst:.3e} (limit 1e-12), {secs:.1} s"),
    )
}

fn criterion_2() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut worst_two: f64 = 0.0;
    for (k, (da, db)) in [(2, 2), (2, 3)].into_iter().enumerate() {
        let gaps: Vec<(f64, f64)> = (0..200u64)
            .into_par_iter()
            .map(|i| {
                let s = corpus_state(da, db, 2_000_000 * (k as u64 + 1) + i);
                let r = witness_via_r(&s);
                let p = witness_via_permutation(&s).expect("within cap");
                let circ = witness_via_circuit(&s, CAP).expect("within cap");
                let pairwise = max_of([(r - p).abs(), (r - circ).abs(), (p - circ).abs()]);
                let two = if da == 2 && db == 2 {
                    (two_setting_measurement(&s, CAP).expect("within cap").witness - p).abs()
                } else {
                    0.0
                };
                (pairwise, two)
            })
            .collect();
        worst = worst.max(max_of(gaps.iter().map(|g| g.0)));
        worst_two = worst_two.max(max_of(gaps.iter().map(|g| g.1)));
    }
    verdict(
        worst <= 1e-9 && worst_two <= 1e-9,
        format!("max pairwise route gap {worst:.3e}, two-setting gap {worst_two:.3e} (limit 1e-9)"),
    )
}

fn criterion_3() -> Verdict {
    let cq_worst = [2usize, 3]
        .into_iter()
        .map(|db| {
            (0..200u64)
                .into_par_iter()
                .map(|i| {
                    let branches = 1 + (i as usize % 2);
                    let s = random_classical_quantum(2, db, branches, 3_000_000 + 1000 * db as u64 + i).expect("valid");
                    witness_via_permutation(&s).expect("within cap").abs()
                })
                .reduce(|| 0.0, f64::max)
        })
        .fold(0.0, f64::max);

    // Full-rank 2x2 states with discord above 1e-3, collected until 200.
    let cfg = OptimizerConfig::default();
    let mut discordant = Vec::new();
    let mut seed = 3_100_000u64;
    let mut oracle_failures = 0;
    while discordant.len() < 200 {
        let batch: Vec<_> = (seed..seed + 64)
            .into_par_iter()
            .map(|s| {
                let st = random_state(2, 2, 4, s).expect("valid");
                let d = discord_vn(&st, &cfg);
                (st, d)
            })
            .collect();
        seed += 64;
        for (st, d) in batch {
            match d {
                Ok(d) if d.value > 1e-3 && discordant.len() < 200 => discordant.push(st),
                Ok(_) => {}
                Err(_) => oracle_failures += 1,
            }
        }
    }
    let max_discordant = max_of(discordant.iter().map(|s| witness_via_permutation(s).expect("within cap")));

    // Classical-classical 3x3 state whose R has rank two.
    let ket = |k: usize| {
        let mut v = DVector::zeros(3);
        v[k] = c(1.0, 0.0);
        v
    };
    let branches: Vec<_> = (0..3).map(|k| states::projector(&ket(k))).collect();
    let cc = classical_quantum_state(&[0.5, 0.3, 0.2], &[ket(0), ket(1), ket(2)], &branches).expect("valid");
    let w_cc = witness_via_permutation(&cc).expect("within cap");
    let d_cc = discord_vn(&cc, &cfg).map(|r| r.value).unwrap_or(f64::INFINITY);

    verdict(
        cq_worst < 1e-10 && max_discordant < -1e-9 && w_cc < -1e-6 && d_cc < 1e-6 && oracle_failures == 0,
        format!(
            "cq max |w| = {cq_worst:.3e}; discordant max w = {max_discordant:.3e}; \
             3x3 classical w = {w_cc:.4e}, discord = {d_cc:.3e}; oracle failures {oracle_failures}"
        ),
    )
}

fn criterion_4() -> Verdict {
    let cfg = OptimizerConfig::default();
    let mut worst_d = f64::NEG_INFINITY;
    let mut worst_g = f64::NEG_INFINITY;
    let mut failures = 0usize;
    for (k, (da, db, count)) in [(2, 2, 500u64), (2, 3, 200)].into_iter().enumerate() {
        let gaps: Vec<Option<(f64, f64)>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let s = corpus_state(da, db, 4_000_000 * (k as u64 + 1) + i);
                let d = discord_vn(&s, &cfg).ok()?;
                let g = geometric_discord(&s, &cfg).ok()?;
                Some((discord_lower_bound(&s) - d.value, geometric_discord_lower_bound(&s) - g.value))
            })
            .collect();
        for g in gaps {
            match g {
                Some((a, b)) => {
                    worst_d = worst_d.max(a);
                    worst_g = worst_g.max(b);
                }
                None => failures += 1,
            }
        }
    }
    let bell = states::bell();
    let (bd, bg) = (discord_lower_bound(&bell), geometric_discord_lower_bound(&bell));
    let od = discord_vn(&bell, &cfg).map(|r| r.value).unwrap_or(f64::NAN);
    let og = geometric_discord(&bell, &cfg).map(|r| r.value).unwrap_or(f64::NAN);
    let bell_ok = (bd - 0.5500).abs() <= 1e-3
        && (bg - 0.3170).abs() <= 1e-3
        && (od - 1.0).abs() <= 1e-6
        && (og - 0.5).abs() <= 1e-6;
    verdict(
        worst_d <= 1e-6 && worst_g <= 1e-6 && bell_ok && failures == 0,
        format!(
            "max(bound - oracle): discord {worst_d:.3e}, geometric {worst_g:.3e}; \
             Bell bounds {bd:.4} / {bg:.4} vs oracles {od:.6} / {og:.6}; oracle failures {failures}"
        ),
    )
}

fn criterion_5() -> Verdict {
    let results: Vec<(f64, f64)> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let (da, db) = [(2, 2), (2, 3), (3, 2), (3, 3)][i as usize % 4];
            let s = corpus_state(da, db, 5_000_000 + i);
            let basis = MeasurementBasis::from_unitary(random_unitary(da, 5_500_000 + i)).expect("unitary");
            let bps = branch_purity_sum(&s, &basis).expect("dims match");
            let q = q_value(&s, witness_via_r(&s)).expect("radicand is nonnegative");
            let cond = conditional_entropy(&apply_measurement(&s, &basis).expect("dims match"));
            let lower = -(da as f64).log2() - bps.log2();
            (bps - q, lower - cond)
        })
        .collect();
    let worst_q = max_of(results.iter().map(|r| r.0));
    let worst_h = max_of(results.iter().map(|r| r.1));
    verdict(
        worst_q <= 1e-9 && worst_h <= 1e-9,
        format!("max(bps - Q) = {worst_q:.3e}, max(entropy lower bound - conditional entropy) = {worst_h:.3e}"),
    )
}

fn criterion_6() -> Verdict {
    let mut worst_w: f64 = 0.0;
    let mut worst_t: f64 = 0.0;
    for n in [1usize, 2] {
        for alpha in [0.0, 0.5, 1.0] {
            let gaps: Vec<(f64, f64)> = (0..50u64)
                .into_par_iter()
                .map(|i| {
                    let u = random_unitary(1 << n, 6_000_000 + 1000 * n as u64 + i);
                    let cfg = Dqc1Config::new(n, alpha, u).expect("unitary");
                    let rho = dqc1::output_state(&cfg).expect("valid state");
                    let w = witness_via_permutation(&rho).expect("within cap");
                    let t = witness_term_traces(&rho, CAP).expect("within cap");
                    let tc = dqc1::term_traces_closed_form(&cfg);
                    let tgap = max_of((0..4).map(|k| (t[k] - tc[k]).abs()));
                    ((w - dqc1::witness_closed_form(&cfg)).abs(), tgap)
                })
                .collect();
            worst_w = worst_w.max(max_of(gaps.iter().map(|g| g.0)));
            worst_t = worst_t.max(max_of(gaps.iter().map(|g| g.1)));
        }
    }
    let u = UnitarySpec::Diag(vec![0.0, 90.0, 180.0, 270.0]).build(2).expect("four phases");
    let cfg = Dqc1Config::new(2, 1.0, u).expect("unitary");
    let w = dqc1::witness_closed_form(&cfg);
    let bound = dqc1::discord_bound(&cfg, w).unwrap_or(f64::NAN);
    let target = 1.0 - (1.0 + 0.5f64.sqrt()).log2();
    let rho = dqc1::output_state(&cfg).expect("valid state");
    let oracle = discord_vn(&rho, &OptimizerConfig::default()).map(|r| r.value).unwrap_or(f64::NAN);
    let point_ok = (w + 1.0 / 128.0).abs() <= 1e-9 && (bound - target).abs() <= 1e-9 && bound <= oracle + 1e-6;
    verdict(
        worst_w <= 1e-9 && worst_t <= 1e-9 && point_ok,
        format!(
            "closed-form witness gap {worst_w:.3e}, term-trace gap {worst_t:.3e}; \
             n=2 point w = {w:.6e}, bound = {bound:.10} (target {target:.10}), discord oracle {oracle:.6}"
        ),
    )
}

fn criterion_7() -> Verdict {
    let bell = states::bell();
    let shots = [1_000u64, 10_000, 100_000];
    let mut rms = Vec::new();
    let mut within = 0;
    for &n in &shots {
        let records: Vec<_> = (0..20u64)
            .map(|seed| sample_circuit(&bell, n, 7_000_000 + seed, CAP).expect("within cap"))
            .collect();
        let ms: f64 = records.iter().map(|r| (r.witness + 0.375).powi(2)).sum::<f64>() / records.len() as f64;
        rms.push(ms.sqrt());
        if n == 100_000 {
            within = records.iter().filter(|r| (r.witness + 0.375).abs() <= 5.0 * r.witness_standard_error).count();
        }
    }
    let xs: Vec<f64> = shots.iter().map(|&n| (n as f64).log10()).collect();
    let ys: Vec<f64> = rms.iter().map(|e| e.log10()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    verdict(
        (slope + 0.5).abs() <= 0.15 && within >= 19,
        format!(
            "log-log slope {slope:.3} (target -0.5 +/- 0.15), rms errors {:.2e} / {:.2e} / {:.2e}; \
             {within}/20 runs within 5 SE at 1e5 shots",
            rms[0], rms[1], rms[2]
        ),
    )
}

fn criterion_8() -> Verdict {
    let mut corpus: Vec<BipartiteState> = vec![
        states::bell(),
        states::maximally_mixed(2, 2).unwrap(),
        states::maximally_mixed(3, 3).unwrap(),
    ];
    corpus.extend((0..=20).map(|k| states::werner(k as f64 / 20.0).unwrap()));
    for (k, (da, db)) in [(2, 2), (2, 3), (3, 2), (3, 3), (2, 4), (4, 2)].into_iter().enumerate() {
        corpus.extend((0..100u64).map(|i| corpus_state(da, db, 8_000_000 + 1000 * k as u64 + i)));
        if da <= db {
            corpus.extend((0..20u64).map(|i| random_classical_quantum(da, db, da, 8_500_000 + i).unwrap()));
        }
    }
    let (worst_trace, worst_radicand) = corpus
        .par_iter()
        .map(|s| {
            let r = CorrelationMatrix::new(s);
            let trace_gap = (r.trace_gram() - tilde_purity(s)).abs();
            let w = witness_via_r(s);
            let radicand = w + tilde_purity(s).powi(2);
            let radicand_gap = (radicand - r.trace_gram_squared()).abs().max(-radicand);
            (trace_gap, radicand_gap)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let swap_gap = max_of((2..=4).map(|d| {
        let loo = LooBasis::gell_mann(d).unwrap();
        let sum = (0..loo.len()).fold(identity(d * d) * c(0.0, 0.0), |acc, i| acc + loo.get(i).kronecker(loo.get(i)));
        discord_witness::linalg::max_abs_diff(&sum, &swap_operator(d))
    }));
    verdict(
        worst_trace <= 1e-10 && worst_radicand <= 1e-10 && swap_gap <= 1e-12,
        format!(
            "{} corpus states: Tr(RR^T) gap {worst_trace:.3e}, radicand gap {worst_radicand:.3e}; \
             sum G(x)G vs swap {swap_gap:.3e}",
            corpus.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("non-positivity", criterion_1),
        ("route equivalence", criterion_2),
        ("zero-discord equivalence for dA = 2", criterion_3),
        ("discord and geometric-discord bounds", criterion_4),
        ("branch-purity inequality chain", criterion_5),
        ("DQC1 closed forms", criterion_6),
        ("shot-noise convergence", criterion_7),
        ("structural identities", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        if !v.pass {
            failed += 1;
        }
        println!("criterion {} [{tag}] {name}: {} ({:.1} s)", i + 1, v.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {}/8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
