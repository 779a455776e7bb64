//! The one-clean-qubit (DQC1) output state and its closed-form witness.
//!
//! Subsystem A is the control qubit, B the `n`-qubit register.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, identity, max_abs_diff, random_unitary, BipartiteState, ComplexMatrix, C64};

/// Tolerance on `U^H U = I` for the register unitary.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Dqc1Config {
    n: usize,
    alpha: f64,
    unitary: ComplexMatrix,
}

impl Dqc1Config {
    pub fn new(n: usize, alpha: f64, unitary: ComplexMatrix) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("DQC1 needs at least one register qubit".into()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [0, 1]")));
        }
        let dim = 1usize << n;
        if unitary.nrows() != dim || unitary.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "unitary is {}x{}, expected {dim}x{dim}",
                unitary.nrows(),
                unitary.ncols()
            )));
        }
        let deviation = max_abs_diff(&(unitary.adjoint() * &unitary), &identity(dim));
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { n, alpha, unitary })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn register_dim(&self) -> usize {
        1 << self.n
    }

    pub fn trace_u(&self) -> C64 {
        self.unitary.trace()
    }

    pub fn trace_u_squared(&self) -> C64 {
        crate::linalg::trace_of_product(&self.unitary, &self.unitary)
    }
}

/// `ρ_out = 2^{-(n+1)} [[I, αU^H], [αU, I]]`.
pub fn output_state(cfg: &Dqc1Config) -> Result<BipartiteState> {
    let d = cfg.register_dim();
    let scale = 1.0 / (2 * d) as f64;
    let mut rho = ComplexMatrix::zeros(2 * d, 2 * d);
    let u = &cfg.unitary;
    for i in 0..d {
        rho[(i, i)] = c(scale, 0.0);
        rho[(d + i, d + i)] = c(scale, 0.0);
        for j in 0..d {
            rho[(i, d + j)] = u[(j, i)].conj() * (cfg.alpha * scale);
            rho[(d + i, j)] = u[(i, j)] * (cfg.alpha * scale);
        }
    }
    BipartiteState::new(rho, 2, d)
}

/// `Tr(Wρ_out⊗4) = α⁴/2^{2n+3} (|Tr U²/2ⁿ|² − 1)`.
pub fn witness_closed_form(cfg: &Dqc1Config) -> f64 {
    let d = cfg.register_dim() as f64;
    let tau2 = cfg.trace_u_squared().norm() / d;
    // Adding zero turns the -0.0 produced at alpha = 0 into 0.0.
    cfg.alpha.powi(4) / (8.0 * d * d) * (tau2 * tau2 - 1.0) + 0.0
}

/// Closed forms for `Tr(U_i ρ_out⊗4)`, `i = 1..4`.
pub fn term_traces_closed_form(cfg: &Dqc1Config) -> [f64; 4] {
    let d = cfg.register_dim() as f64;
    let d2 = d * d;
    let a2 = cfg.alpha * cfg.alpha;
    let a4 = a2 * a2;
    let tr1 = cfg.trace_u().norm_sqr();
    let tr2 = cfg.trace_u_squared().norm_sqr();
    let norm = 1.0 / (16.0 * d2 * d2);
    [
        norm * (4.0 * d2 + 8.0 * a2 * tr1 + 2.0 * a4 * tr2 + 2.0 * d2 * a4),
        norm * (8.0 * d2 + 8.0 * a2 * tr1),
        norm * (4.0 * d2 + 8.0 * d2 * a2 + 4.0 * d2 * a4),
        norm * (8.0 * d2 + 8.0 * d2 * a2),
    ]
}

/// Whether `cfg` lies in the regime `Tr U = 0`, `α = 1`.
pub fn in_bound_regime(cfg: &Dqc1Config) -> std::result::Result<(), String> {
    let tr = cfg.trace_u().norm();
    if tr > 1e-9 * cfg.register_dim() as f64 {
        return Err(format!("|Tr U| = {tr:.3e} is not zero"));
    }
    if (cfg.alpha - 1.0).abs() > 1e-12 {
        return Err(format!("alpha = {} is not 1", cfg.alpha));
    }
    Ok(())
}

/// `max{0, 1 − log₂(1 + √(2^{2n+2} w + 1))}`, valid for `Tr U = 0`, `α = 1`.
pub fn discord_bound(cfg: &Dqc1Config, witness_value: f64) -> Result<f64> {
    in_bound_regime(cfg).map_err(Error::RegimeViolation)?;
    let d = cfg.register_dim() as f64;
    let radicand = (4.0 * d * d * witness_value + 1.0).max(0.0);
    Ok((1.0 - (1.0 + radicand.sqrt()).log2()).max(0.0))
}

/// The normalized trace and the control-qubit expectation values that
/// estimate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedTrace {
    pub tau_re: f64,
    pub tau_im: f64,
    /// `⟨σx⟩` on the control qubit of `ρ_out`.
    pub sigma_x: f64,
    /// `⟨σy⟩` on the control qubit of `ρ_out`.
    pub sigma_y: f64,
}

impl NormalizedTrace {
    pub fn tau(&self) -> C64 {
        c(self.tau_re, self.tau_im)
    }
}

pub fn normalized_trace(cfg: &Dqc1Config) -> Result<NormalizedTrace> {
    let tau = cfg.trace_u() / c(cfg.register_dim() as f64, 0.0);
    let rho_a = output_state(cfg)?.reduced_a();
    // ⟨σx⟩ = 2 Re ρ₀₁, ⟨σy⟩ = −2 Im ρ₀₁.
    let r01 = rho_a[(0, 1)];
    Ok(NormalizedTrace { tau_re: tau.re, tau_im: tau.im, sigma_x: 2.0 * r01.re, sigma_y: -2.0 * r01.im })
}

/// Best fit of `U² ≈ e^{iφ} I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquarePhaseFit {
    pub phase: f64,
    /// `max |U² − e^{iφ} I|`.
    pub deviation: f64,
    pub proportional_to_identity: bool,
}

/// Fits `φ = arg Tr(U²)`, falling back to `φ = 0` when `Tr U² = 0`.
pub fn square_phase_fit(cfg: &Dqc1Config, tol: f64) -> SquarePhaseFit {
    let tr2 = cfg.trace_u_squared();
    let phase = if tr2.norm() > 0.0 { tr2.arg() } else { 0.0 };
    let u2 = &cfg.unitary * &cfg.unitary;
    let target = identity(cfg.register_dim()) * C64::from_polar(1.0, phase);
    let deviation = max_abs_diff(&u2, &target);
    SquarePhaseFit { phase, deviation, proportional_to_identity: deviation <= tol }
}

/// Named register unitaries accepted on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitarySpec {
    Identity,
    HadamardTensor,
    Fourier,
    Random(u64),
    /// Diagonal phases in degrees.
    Diag(Vec<f64>),
}

impl FromStr for UnitarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::InvalidParameter(m);
        match s {
            "identity" => return Ok(Self::Identity),
            "hadamard" | "hadamard-tensor" => return Ok(Self::HadamardTensor),
            "fourier" => return Ok(Self::Fourier),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("random:") {
            return rest.parse().map(Self::Random).map_err(|_| bad(format!("bad seed in '{s}'")));
        }
        if let Some(rest) = s.strip_prefix("diag:") {
            let phases = rest
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad(format!("bad phase list in '{s}'")))?;
            return Ok(Self::Diag(phases));
        }
        Err(bad(format!("unknown unitary '{s}'")))
    }
}

impl UnitarySpec {
    pub fn build(&self, n: usize) -> Result<ComplexMatrix> {
        let d = 1usize << n;
        Ok(match self {
            Self::Identity => identity(d),
            Self::HadamardTensor => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let h = ComplexMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
                (1..n).fold(h.clone(), |acc, _| acc.kronecker(&h))
            }
            Self::Fourier => {
                let norm = 1.0 / (d as f64).sqrt();
                ComplexMatrix::from_fn(d, d, |j, k| {
                    C64::from_polar(norm, 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64)
                })
            }
            Self::Random(seed) => random_unitary(d, *seed),
            Self::Diag(phases) => {
                if phases.len() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "{} phases given for a {d}-dimensional register",
                        phases.len()
                    )));
                }
                ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    d,
                    phases.iter().map(|deg| C64::from_polar(1.0, deg.to_radians())),
                ))
            }
        })
    }
}
