//! Multi-start Nelder–Mead minimization over von Neumann measurement bases.
//!
//! A basis is the set of columns of `exp(i Σ_k θ_k G_k)` where `G_k` are the
//! traceless Gell-Mann generators, so the search space is `R^{d²−1}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, BipartiteState, ComplexMatrix, SpectralDecomposition};
use crate::loo::LooBasis;

use super::measurement::MeasurementBasis;

/// Largest subsystem-A dimension the oracles accept.
pub const MAX_ORACLE_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Stop once the simplex's objective spread falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial_step: f64,
    pub seed: u64,
    /// `(polar, azimuthal)` grid resolution for the qubit cross-check.
    pub bloch_grid: Option<(usize, usize)>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            tolerance: 1e-9,
            max_iterations: 5000,
            initial_step: 0.6,
            seed: 0,
            bloch_grid: None,
        }
    }
}

impl OptimizerConfig {
    pub fn with_grid(mut self) -> Self {
        self.bloch_grid = Some((180, 360));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartDiagnostic {
    pub index: usize,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Best value found and where. The value is an upper bound on the true
/// minimum over von Neumann measurements.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    pub value: f64,
    #[serde(skip)]
    pub argmin: MeasurementBasis,
    /// Generator coefficients of the minimizing unitary.
    pub parameters: Vec<f64>,
    pub restarts: usize,
    pub converged: bool,
    pub iterations: usize,
    pub restart_diagnostics: Vec<RestartDiagnostic>,
    /// Minimum over the Bloch-sphere grid, when requested (qubits only).
    pub grid_value: Option<f64>,
}

/// Outcome of a single Nelder–Mead run.
#[derive(Debug, Clone)]
pub struct LocalMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead with standard coefficients. After the simplex's value spread
/// drops below `tol` the search is restarted from the best vertex with a
/// smaller simplex, and accepted once a restart no longer improves by more
/// than `tol`.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, tol: f64, max_iter: usize) -> LocalMinimum {
    let mut best = x0.to_vec();
    let mut best_val = f(&best);
    let mut iterations = 0;
    let mut step = step;
    for _ in 0..8 {
        let (x, v, it, ok) = nelder_mead_once(&f, &best, step, tol, max_iter.saturating_sub(iterations));
        iterations += it;
        if !ok {
            if v < best_val {
                best = x;
                best_val = v;
            }
            return LocalMinimum { x: best, value: best_val, iterations, converged: false };
        }
        let improvement = best_val - v;
        if v < best_val {
            best = x;
            best_val = v;
        }
        if improvement.abs() <= tol && step < 0.1 {
            return LocalMinimum { x: best, value: best_val, iterations, converged: true };
        }
        step *= 0.25;
    }
    LocalMinimum { x: best, value: best_val, iterations, converged: true }
}

fn nelder_mead_once(
    f: &impl Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64, usize, bool) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };

    for it in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if values[n] - values[0] <= tol {
            return (simplex[0].clone(), values[0], it, true);
        }

        let centroid: Vec<f64> =
            (0..n).map(|k| simplex[..n].iter().map(|x| x[k]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        let reflected = lerp(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = lerp(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let (contracted, fc) = if fr < values[n] {
                let x = lerp(&centroid, &reflected, 0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = lerp(&centroid, &worst, 0.5);
                let v = f(&x);
                (x, v)
            };
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = lerp(&best, &simplex[i], 0.5);
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let k = (0..=n).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap_or(0);
    (simplex[k].clone(), values[k], max_iter, false)
}

/// `exp(i Σ_k θ_k G_k)`.
pub fn unitary_from_parameters(params: &[f64], generators: &[ComplexMatrix]) -> ComplexMatrix {
    let d = generators[0].nrows();
    let mut h = ComplexMatrix::zeros(d, d);
    for (g, &t) in generators.iter().zip(params) {
        h += g * c(t, 0.0);
    }
    SpectralDecomposition::new(&h).map_spectrum(|l| c(l.cos(), l.sin()))
}

pub(crate) fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Minimizes `objective` over von Neumann bases of a `d`-level system.
pub fn minimize_over_bases<F>(d: usize, objective: F, cfg: &OptimizerConfig) -> Result<OptimizationResult>
where
    F: Fn(&MeasurementBasis) -> f64 + Sync,
{
    if !(2..=MAX_ORACLE_DIM).contains(&d) {
        return Err(Error::InvalidParameter(format!("oracle supports 2 <= dA <= {MAX_ORACLE_DIM}, got {d}")));
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidParameter("at least one restart is required".into()));
    }
    let loo = LooBasis::gell_mann(d)?;
    let generators = loo.traceless().to_vec();
    let n = generators.len();
    let eval = |x: &[f64]| objective(&MeasurementBasis::from_unitary_unchecked(unitary_from_parameters(x, &generators)));

    let runs: Vec<LocalMinimum> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let x0: Vec<f64> = if k == 0 {
                vec![0.0; n]
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, k as u64));
                (0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
            };
            nelder_mead(eval, &x0, cfg.initial_step, cfg.tolerance, cfg.max_iterations)
        })
        .collect();

    let best_index = (0..runs.len())
        .min_by(|&i, &j| runs[i].value.total_cmp(&runs[j].value).then(i.cmp(&j)))
        .expect("at least one restart");
    if !runs.iter().any(|r| r.converged) {
        return Err(Error::DidNotConverge { restarts: cfg.restarts, best: runs[best_index].value });
    }
    let best = &runs[best_index];
    let argmin = MeasurementBasis::from_unitary_unchecked(unitary_from_parameters(&best.x, &generators));

    let grid_value = match (cfg.bloch_grid, d) {
        (Some((nt, np)), 2) => Some(bloch_grid_minimum(&objective, nt, np).0),
        _ => None,
    };

    Ok(OptimizationResult {
        value: best.value,
        argmin,
        parameters: best.x.clone(),
        restarts: cfg.restarts,
        converged: best.converged,
        iterations: runs.iter().map(|r| r.iterations).sum(),
        restart_diagnostics: runs
            .iter()
            .enumerate()
            .map(|(index, r)| RestartDiagnostic { index, value: r.value, iterations: r.iterations, converged: r.converged })
            .collect(),
        grid_value,
    })
}

/// Minimum of a qubit-basis objective over a `(θ, φ)` grid on the Bloch
/// sphere, with cell-centred polar angles.
pub fn bloch_grid_minimum<F>(objective: &F, n_theta: usize, n_phi: usize) -> (f64, MeasurementBasis)
where
    F: Fn(&MeasurementBasis) -> f64 + Sync,
{
    let (value, theta, phi) = (0..n_theta)
        .into_par_iter()
        .map(|i| {
            let theta = (i as f64 + 0.5) * std::f64::consts::PI / n_theta as f64;
            (0..n_phi)
                .map(|j| {
                    let phi = j as f64 * 2.0 * std::f64::consts::PI / n_phi as f64;
                    (objective(&MeasurementBasis::qubit(theta, phi)), theta, phi)
                })
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .expect("non-empty grid")
        })
        .collect::<Vec<_>>()
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("non-empty grid");
    (value, MeasurementBasis::qubit(theta, phi))
}

/// Checks the dimension precondition shared by both oracles.
pub(crate) fn oracle_dims(state: &BipartiteState) -> Result<usize> {
    let da = state.d_a();
    if da > MAX_ORACLE_DIM {
        return Err(Error::InvalidParameter(format!("oracle supports dA <= {MAX_ORACLE_DIM}, got {da}")));
    }
    Ok(da)
}
