//! Simulation of the ancilla interferometry circuit and of the two-setting
//! direct measurement.
//!
//! Four ancillas prepared in `|+⟩` control `U₁..U₄` in that order on four
//! copies of the state, then each ancilla is measured in the σx basis. The
//! ancillas carry index bits `a = a₁a₂a₃a₄` with ancilla 1 most significant.
//! Because every controlled gate is a permutation, the 16x16 ancilla state
//! has entries `(1/16) Tr(G_{a'}^† G_a ρ^{⊗4})` with
//! `G_a = U₄^{a₄} U₃^{a₃} U₂^{a₂} U₁^{a₁}`, each computed by index
//! contraction. The full total state is only materialized on request.

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, BipartiteState, ComplexMatrix, C64};
use crate::oracle::optimize::derive_seed;
use crate::perm::{CopyPermutation, PermutationOperator, COPIES};

pub const ANCILLAS: usize = 4;
const OUTCOMES: usize = 1 << ANCILLAS;

/// Shots drawn per independently seeded batch.
pub const SHOT_BATCH: u64 = 8192;

/// The controlled-permutation circuit for a `dA x dB` system.
#[derive(Debug, Clone)]
pub struct WitnessCircuit {
    d_a: usize,
    d_b: usize,
    controlled_ops: Vec<(usize, PermutationOperator)>,
}

impl WitnessCircuit {
    pub fn new(d_a: usize, d_b: usize) -> Self {
        let controlled_ops = (1..=ANCILLAS).map(|i| (i - 1, PermutationOperator::witness_term(i, d_a, d_b))).collect();
        Self { d_a, d_b, controlled_ops }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    /// `(ancilla index, U_i)` in application order.
    pub fn controlled_ops(&self) -> &[(usize, PermutationOperator)] {
        &self.controlled_ops
    }

    /// Dimension of the four data copies, `(dA·dB)⁴`.
    pub fn data_dimension(&self) -> usize {
        (self.d_a * self.d_b).pow(COPIES as u32)
    }

    /// `2⁴·(dA·dB)⁴`.
    pub fn total_dimension(&self) -> usize {
        OUTCOMES * self.data_dimension()
    }

    /// The data-space permutation applied when the ancillas read `a`.
    pub fn gate(&self, a: usize) -> PermutationOperator {
        self.controlled_ops
            .iter()
            .filter(|(anc, _)| ancilla_bit(a, *anc) == 1)
            .fold(PermutationOperator::identity(self.d_a, self.d_b), |acc, (_, u)| u.compose(&acc))
    }

    fn check_state(&self, state: &BipartiteState) -> Result<()> {
        if state.dims() != self.dims() {
            return Err(Error::DimensionMismatch(format!(
                "circuit built for {:?}, state is {:?}",
                self.dims(),
                state.dims()
            )));
        }
        Ok(())
    }

    /// Reduced state of the four ancillas after all controlled gates.
    pub fn ancilla_state(&self, state: &BipartiteState, cap: usize) -> Result<ComplexMatrix> {
        self.check_state(state)?;
        let dim = self.data_dimension();
        if dim > cap {
            return Err(Error::SizeOverflow { requested: dim, cap });
        }
        let gates: Vec<PermutationOperator> = (0..OUTCOMES).map(|a| self.gate(a)).collect();
        let mut cache: HashMap<(CopyPermutation, CopyPermutation), C64> = HashMap::new();
        let mut out = ComplexMatrix::zeros(OUTCOMES, OUTCOMES);
        for a in 0..OUTCOMES {
            for a2 in 0..OUTCOMES {
                let p = gates[a2].adjoint().compose(&gates[a]);
                let tr = *cache
                    .entry((p.perm_a(), p.perm_b()))
                    .or_insert_with(|| p.contract(state.matrix()));
                out[(a, a2)] = tr / c(OUTCOMES as f64, 0.0);
            }
        }
        Ok(out)
    }

    /// Dense state of ancillas ⊗ data copies, ancillas most significant.
    pub fn build_total_state(&self, state: &BipartiteState, cap: usize) -> Result<ComplexMatrix> {
        self.check_state(state)?;
        let total = self.total_dimension();
        if total > cap {
            return Err(Error::SizeOverflow { requested: total, cap });
        }
        let dim = self.data_dimension();
        let rho = state.matrix();
        let local = state.dim();
        // ρ^{⊗4}[y, y'] as a product over copies.
        let digits = |mut y: usize| {
            let mut d = [0usize; COPIES];
            for k in (0..COPIES).rev() {
                d[k] = y % local;
                y /= local;
            }
            d
        };
        let copy_digits: Vec<[usize; COPIES]> = (0..dim).map(digits).collect();
        // With G|y⟩ = |g(y)⟩, (G M G'^†)[g(y), g'(y')] = M[y, y'].
        let maps: Vec<Vec<usize>> = (0..OUTCOMES).map(|a| self.gate(a).basis_map()).collect();
        let mut out = ComplexMatrix::zeros(total, total);
        let weight = c(1.0 / OUTCOMES as f64, 0.0);
        for y in 0..dim {
            let dy = &copy_digits[y];
            for y2 in 0..dim {
                let dy2 = &copy_digits[y2];
                let v = (0..COPIES).fold(c(1.0, 0.0), |acc, k| acc * rho[(dy[k], dy2[k])]);
                if v == c(0.0, 0.0) {
                    continue;
                }
                let v = v * weight;
                for (a, map_a) in maps.iter().enumerate() {
                    let row = a * dim + map_a[y];
                    for (a2, map_a2) in maps.iter().enumerate() {
                        out[(row, a2 * dim + map_a2[y2])] = v;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn ancilla_bit(a: usize, ancilla: usize) -> usize {
    (a >> (ANCILLAS - 1 - ancilla)) & 1
}

/// `⟨σx^i⟩` for each ancilla from a 16x16 ancilla state.
pub fn sigma_x_expectations(ancilla_state: &ComplexMatrix) -> [f64; ANCILLAS] {
    std::array::from_fn(|i| {
        let flip = 1 << (ANCILLAS - 1 - i);
        (0..OUTCOMES).map(|a| ancilla_state[(a ^ flip, a)].re).sum()
    })
}

/// `Σ_a ρ_total[(a, y), (a', y)]`, the ancilla marginal of a dense total state.
pub fn trace_out_data(total: &ComplexMatrix) -> ComplexMatrix {
    let dim = total.nrows() / OUTCOMES;
    ComplexMatrix::from_fn(OUTCOMES, OUTCOMES, |a, a2| (0..dim).map(|y| total[(a * dim + y, a2 * dim + y)]).sum())
}

/// The four `⟨σx^i⟩` of the exact circuit output.
pub fn exact_ancilla_expectations(state: &BipartiteState, cap: usize) -> Result<[f64; ANCILLAS]> {
    let (da, db) = state.dims();
    let rho_anc = WitnessCircuit::new(da, db).ancilla_state(state, cap)?;
    Ok(sigma_x_expectations(&rho_anc))
}

/// `2(⟨σx¹⟩ − ⟨σx³⟩) − (4/dA)(⟨σx²⟩ − ⟨σx⁴⟩)`.
pub fn reconstruct_witness(expectations: &[f64; ANCILLAS], d_a: usize) -> f64 {
    let e = expectations;
    2.0 * (e[0] - e[2]) - 4.0 / d_a as f64 * (e[1] - e[3])
}

/// Probability of each joint σx outcome; bit `i` of the outcome index (ancilla
/// 1 most significant) is 1 for the eigenvalue −1.
pub fn outcome_distribution(ancilla_state: &ComplexMatrix) -> [f64; OUTCOMES] {
    std::array::from_fn(|s| {
        let mut p = 0.0;
        for a in 0..OUTCOMES {
            for a2 in 0..OUTCOMES {
                let sign = if ((a ^ a2) & s).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                p += sign * ancilla_state[(a, a2)].re;
            }
        }
        (p / OUTCOMES as f64).max(0.0)
    })
}

/// Finite-shot estimates from sampling the four ancillas jointly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub shots: u64,
    pub seed: u64,
    pub per_ancilla_means: [f64; ANCILLAS],
    /// Sample standard deviation over `√shots`.
    pub standard_errors: [f64; ANCILLAS],
    /// How often each of the 16 joint outcomes occurred.
    pub counts: Vec<u64>,
    pub witness: f64,
    /// Standard error of the reconstructed witness, including covariance
    /// between ancillas.
    pub witness_standard_error: f64,
}

pub fn sample_circuit(state: &BipartiteState, shots: u64, seed: u64, cap: usize) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let (da, db) = state.dims();
    let probs = outcome_distribution(&WitnessCircuit::new(da, db).ancilla_state(state, cap)?);
    let dist = WeightedIndex::new(probs).map_err(|e| Error::InvalidParameter(format!("outcome distribution: {e}")))?;
    let batches = shots.div_ceil(SHOT_BATCH);
    let per_batch: Vec<[u64; OUTCOMES]> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let n = SHOT_BATCH.min(shots - b * SHOT_BATCH);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, b));
            let mut counts = [0u64; OUTCOMES];
            for _ in 0..n {
                counts[dist.sample(&mut rng)] += 1;
            }
            counts
        })
        .collect();
    let mut counts = [0u64; OUTCOMES];
    for batch in &per_batch {
        for (total, k) in counts.iter_mut().zip(batch) {
            *total += k;
        }
    }
    Ok(summarize_counts(&counts, shots, seed, da))
}

fn summarize_counts(counts: &[u64; OUTCOMES], shots: u64, seed: u64, d_a: usize) -> ShotRecord {
    let n = shots as f64;
    let z = |s: usize, i: usize| if ancilla_bit(s, i) == 1 { -1.0 } else { 1.0 };
    let per_shot_witness = |s: usize| {
        let e: [f64; ANCILLAS] = std::array::from_fn(|i| z(s, i));
        reconstruct_witness(&e, d_a)
    };
    let mean_std = |f: &dyn Fn(usize) -> f64| {
        let mean = (0..OUTCOMES).map(|s| counts[s] as f64 * f(s)).sum::<f64>() / n;
        if shots < 2 {
            return (mean, 0.0);
        }
        let ss: f64 = (0..OUTCOMES).map(|s| counts[s] as f64 * (f(s) - mean).powi(2)).sum();
        (mean, (ss / (n - 1.0)).sqrt() / n.sqrt())
    };
    let mut means = [0.0; ANCILLAS];
    let mut errors = [0.0; ANCILLAS];
    for i in 0..ANCILLAS {
        (means[i], errors[i]) = mean_std(&|s| z(s, i));
    }
    let (witness, witness_standard_error) = mean_std(&per_shot_witness);
    ShotRecord {
        shots,
        seed,
        per_ancilla_means: means,
        standard_errors: errors,
        counts: counts.to_vec(),
        witness,
        witness_standard_error,
    }
}

/// A binary symmetric/antisymmetric test on one pair of copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairTest {
    pub subsystem: char,
    /// 1-based copy labels.
    pub pair: (usize, usize),
}

impl PairTest {
    fn operator(&self, d_a: usize, d_b: usize) -> PermutationOperator {
        let swap = [self.pair];
        let (sa, sb): (&[(usize, usize)], &[(usize, usize)]) =
            if self.subsystem == 'A' { (&swap, &[]) } else { (&[], &swap) };
        PermutationOperator::from_pair_swaps(sa, sb, d_a, d_b).expect("valid pair")
    }
}

/// Setting (a) tests `A₁₄, A₂₃, B₁₂, B₃₄`; setting (b) tests `A₁₂, A₃₄, B₁₂, B₃₄`.
pub const SETTING_A: [PairTest; 4] = [
    PairTest { subsystem: 'A', pair: (1, 4) },
    PairTest { subsystem: 'A', pair: (2, 3) },
    PairTest { subsystem: 'B', pair: (1, 2) },
    PairTest { subsystem: 'B', pair: (3, 4) },
];
pub const SETTING_B: [PairTest; 4] = [
    PairTest { subsystem: 'A', pair: (1, 2) },
    PairTest { subsystem: 'A', pair: (3, 4) },
    PairTest { subsystem: 'B', pair: (1, 2) },
    PairTest { subsystem: 'B', pair: (3, 4) },
];

/// Joint outcome probabilities of four commuting pair tests. In outcome `s`,
/// bit `t` (test 0 most significant) is 1 when test `t` found the pair
/// antisymmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingOutcomeTable {
    pub label: String,
    pub tests: [PairTest; 4],
    pub probabilities: Vec<f64>,
}

impl SettingOutcomeTable {
    pub fn compute(label: &str, tests: [PairTest; 4], state: &BipartiteState, cap: usize) -> Result<Self> {
        let (da, db) = state.dims();
        let dim = (da * db).pow(COPIES as u32);
        if dim > cap {
            return Err(Error::SizeOverflow { requested: dim, cap });
        }
        let ops: Vec<PermutationOperator> = tests.iter().map(|t| t.operator(da, db)).collect();
        // Tr(V_T ρ^{⊗4}) for every subset T of the tests.
        let subset_traces: Vec<f64> = (0..16usize)
            .map(|mask| {
                let op = (0..4)
                    .filter(|t| mask & (8 >> t) != 0)
                    .fold(PermutationOperator::identity(da, db), |acc, t| acc.compose(&ops[t]));
                op.contract(state.matrix()).re
            })
            .collect();
        let probabilities = (0..16usize)
            .map(|s| {
                let total: f64 = subset_traces
                    .iter()
                    .enumerate()
                    .map(|(mask, tr)| if (mask & s).count_ones() % 2 == 0 { *tr } else { -tr })
                    .sum();
                total / 16.0
            })
            .collect();
        Ok(Self { label: label.to_string(), tests, probabilities })
    }

    /// `Σ_s p(s) f(n₁, n₂, n₃, n₄)`.
    pub fn expectation(&self, f: impl Fn([f64; 4]) -> f64) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(s, p)| p * f(std::array::from_fn(|t| ((s >> (3 - t)) & 1) as f64)))
            .sum()
    }

    /// Marginal over the tests listed (indices into `tests`), in that order.
    pub fn marginal(&self, keep: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << keep.len()];
        for (s, p) in self.probabilities.iter().enumerate() {
            let idx = keep.iter().fold(0, |acc, &t| (acc << 1) | ((s >> (3 - t)) & 1));
            out[idx] += p;
        }
        out
    }
}

/// Both setting tables and the witness recombined from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSettingResult {
    pub setting_a: SettingOutcomeTable,
    pub setting_b: SettingOutcomeTable,
    pub witness: f64,
    /// Largest difference between the two settings' marginals on the shared
    /// B tests.
    pub marginal_gap: f64,
}

/// Writing each swap as `V = 1 − 2P₋`,
/// `W = E_a[V₁₄ᴬ (V₂₃ᴬ − 2/dA) V₁₂ᴮ V₃₄ᴮ] − E_b[V₁₂ᴬ (V₃₄ᴬ − 2/dA) V₁₂ᴮ V₃₄ᴮ]`,
/// where `V − 2/dA = (dA − 2)/dA − 2P₋`.
pub fn two_setting_measurement(state: &BipartiteState, cap: usize) -> Result<TwoSettingResult> {
    let da = state.d_a() as f64;
    let setting_a = SettingOutcomeTable::compute("a", SETTING_A, state, cap)?;
    let setting_b = SettingOutcomeTable::compute("b", SETTING_B, state, cap)?;
    let g = |n: [f64; 4]| (1.0 - 2.0 * n[0]) * ((da - 2.0) / da - 2.0 * n[1]) * (1.0 - 2.0 * n[2]) * (1.0 - 2.0 * n[3]);
    let witness = setting_a.expectation(g) - setting_b.expectation(g);
    let ma = setting_a.marginal(&[2, 3]);
    let mb = setting_b.marginal(&[2, 3]);
    let marginal_gap = ma.iter().zip(&mb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(TwoSettingResult { setting_a, setting_b, witness, marginal_gap })
}

/// `Tr(Wρ⊗4)` through the circuit's exact expectations.
pub fn witness_via_circuit(state: &BipartiteState, cap: usize) -> Result<f64> {
    Ok(reconstruct_witness(&exact_ancilla_expectations(state, cap)?, state.d_a()))
}

/// The four `⟨σx^i⟩` predicted from `Tr(U_i ρ⊗4)`:
/// `⟨σx¹⟩ = t₁`, `⟨σx²⟩ = t₂`, `⟨σx³⟩ = (t₃ + t₁)/2`, `⟨σx⁴⟩ = (t₄ + t₂)/2`.
pub fn expectations_from_terms(t: &[f64; 4]) -> [f64; ANCILLAS] {
    [t[0], t[1], 0.5 * (t[2] + t[0]), 0.5 * (t[3] + t[1])]
}
