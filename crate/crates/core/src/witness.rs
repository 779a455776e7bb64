//! The four-copy discord witness `Tr(Wρ⊗4)`, the quantity `Q(ρ)` and the
//! lower bounds on entropic and geometric discord derived from it.
//!
//! Two exact routes are provided here: the correlation-matrix identity
//! `Tr[(RRᵀ)²] − [Tr(RRᵀ)]²` and the explicit contraction of
//! `W = U₁ − U₃ − (2/dA)(U₂ − U₄)` against four copies. The ancilla-circuit
//! route lives in [`crate::circuit`].

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, identity, purity, BipartiteState, ComplexMatrix, SpectralDecomposition, Subsystem, DEFAULT_SIZE_CAP};
use crate::loo::LooBasis;
use crate::perm::{combine_witness_terms, witness_term_traces};

/// Values above this are treated as a genuine violation of non-positivity.
pub const NON_POSITIVITY_TOL: f64 = 1e-12;
/// Radicands in `(−RADICAND_FLOOR, 0)` are roundoff and clamp to zero.
pub const RADICAND_FLOOR: f64 = 1e-10;
/// Relative singular-value threshold for the rank of `R`.
pub const RANK_RELATIVE_TOL: f64 = 1e-8;
/// Singular values below this are zero regardless of `σ_max`.
pub const RANK_ABSOLUTE_TOL: f64 = 1e-14;

/// How a witness value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    RMatrix,
    Permutation,
    Circuit,
    TwoSetting,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::RMatrix => "r-matrix",
            Route::Permutation => "permutation",
            Route::Circuit => "circuit",
            Route::TwoSetting => "two-setting",
        }
    }
}

/// `r_ij = ⟨A_i ⊗ B_j⟩` for traceless `A_i` (`i ≥ 1`) and all `B_j`.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    basis_a: LooBasis,
    basis_b: LooBasis,
    entries: DMatrix<f64>,
    y: Vec<f64>,
    max_imag: f64,
}

impl CorrelationMatrix {
    /// Correlation matrix in the Gell-Mann bases of both subsystems.
    pub fn new(state: &BipartiteState) -> Self {
        let (da, db) = state.dims();
        let ba = LooBasis::gell_mann(da).expect("validated dimension");
        let bb = LooBasis::gell_mann(db).expect("validated dimension");
        Self::in_bases(state, &ba, &bb).expect("matching bases")
    }

    pub fn in_bases(state: &BipartiteState, basis_a: &LooBasis, basis_b: &LooBasis) -> Result<Self> {
        let (da, db) = state.dims();
        if basis_a.dim() != da || basis_b.dim() != db {
            return Err(Error::DimensionMismatch("LOO bases do not match the state".into()));
        }
        let rho = state.matrix();
        // X_i = Tr_A((A_i ⊗ I) ρ), so that r_ij = Tr(X_i B_j).
        let blocks: Vec<ComplexMatrix> = basis_a.observables().iter().map(|a| a_side_contraction(rho, a, da, db)).collect();
        let mut max_imag: f64 = 0.0;
        let mut expect = |x: &ComplexMatrix, b: &ComplexMatrix| {
            let z = crate::linalg::trace_of_product(x, b);
            max_imag = max_imag.max(z.im.abs());
            z.re
        };
        let rows = da * da - 1;
        let cols = db * db;
        let mut entries = DMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                entries[(i, j)] = expect(&blocks[i + 1], basis_b.get(j));
            }
        }
        let y = (1..cols).map(|j| expect(&blocks[0], basis_b.get(j))).collect();
        Ok(Self { basis_a: basis_a.clone(), basis_b: basis_b.clone(), entries, y, max_imag })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.basis_a.dim(), self.basis_b.dim())
    }

    /// The full `(dA²−1) x dB²` matrix.
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// First column: the local Bloch vector of A.
    pub fn x(&self) -> Vec<f64> {
        self.entries.column(0).iter().copied().collect()
    }

    /// Correlation block `T`, columns `1..dB²`.
    pub fn t(&self) -> DMatrix<f64> {
        self.entries.columns(1, self.entries.ncols() - 1).into_owned()
    }

    /// Local Bloch vector of B, `⟨I/√dA ⊗ B_j⟩` for `j ≥ 1`.
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Largest imaginary part discarded while forming the entries.
    pub fn max_imag(&self) -> f64 {
        self.max_imag
    }

    pub fn basis_a(&self) -> &LooBasis {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &LooBasis {
        &self.basis_b
    }

    /// `R Rᵀ`.
    pub fn gram(&self) -> DMatrix<f64> {
        &self.entries * self.entries.transpose()
    }

    /// `Tr(R Rᵀ)`.
    pub fn trace_gram(&self) -> f64 {
        self.entries.norm_squared()
    }

    /// `Tr[(R Rᵀ)²]`.
    pub fn trace_gram_squared(&self) -> f64 {
        self.gram().norm_squared()
    }

    /// `Tr[(RRᵀ)²] − [Tr(RRᵀ)]²`.
    pub fn witness(&self) -> f64 {
        let t = self.trace_gram();
        self.trace_gram_squared() - t * t
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.entries.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Threshold used by [`Self::rank`]: `max(1e-8·σ_max, 1e-14)`.
    pub fn rank_threshold(&self) -> f64 {
        let smax = self.singular_values().first().copied().unwrap_or(0.0);
        (RANK_RELATIVE_TOL * smax).max(RANK_ABSOLUTE_TOL)
    }

    pub fn rank(&self) -> usize {
        let thr = self.rank_threshold();
        self.singular_values().iter().filter(|&&s| s > thr).count()
    }

    /// `ρ_B = I/dB + √dA Σ_{j≥1} y_j B_j`.
    pub fn reduced_b(&self) -> ComplexMatrix {
        let (da, db) = self.dims();
        let mut rho_b = identity(db) / c(db as f64, 0.0);
        for (j, &yj) in self.y.iter().enumerate() {
            rho_b += self.basis_b.get(j + 1) * c((da as f64).sqrt() * yj, 0.0);
        }
        rho_b
    }

    /// Rebuilds `ρ = Σ r_ij A_i ⊗ B_j + I/dA ⊗ ρ_B`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let da = self.dims().0;
        let mut rho = (identity(da) / c(da as f64, 0.0)).kronecker(&self.reduced_b());
        for i in 0..self.entries.nrows() {
            for j in 0..self.entries.ncols() {
                let r = self.entries[(i, j)];
                if r != 0.0 {
                    rho += self.basis_a.get(i + 1).kronecker(self.basis_b.get(j)) * c(r, 0.0);
                }
            }
        }
        rho
    }

    /// For a correlation matrix of rank at most one, the eigenprojectors of
    /// `Σ_i α_i A_i` where `R = α βᵀ`; dephasing in this basis leaves the
    /// state unchanged. `None` when the rank exceeds one.
    pub fn dephasing_projectors(&self) -> Option<Vec<ComplexMatrix>> {
        let (da, _) = self.dims();
        match self.rank() {
            0 => Some((0..da).map(|k| basis_projector(da, k)).collect()),
            1 => {
                let svd = self.entries.clone().svd(true, false);
                let u = svd.u.expect("left singular vectors requested");
                let k = svd
                    .singular_values
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(k, _)| k)
                    .unwrap_or(0);
                let mut op = ComplexMatrix::zeros(da, da);
                for i in 0..u.nrows() {
                    op += self.basis_a.get(i + 1) * c(u[(i, k)], 0.0);
                }
                let spec = SpectralDecomposition::new(&op);
                let v = &spec.eigenvectors;
                Some((0..da).map(|k| { let col = v.column(k); &col * col.adjoint() }).collect())
            }
            _ => None,
        }
    }
}

fn basis_projector(d: usize, k: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(d, d);
    p[(k, k)] = c(1.0, 0.0);
    p
}

/// `Tr_A((op ⊗ I) ρ)` for an operator `op` on A.
pub fn a_side_contraction(rho: &ComplexMatrix, op: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(db, db, |b, bp| {
        let mut acc = c(0.0, 0.0);
        for a in 0..da {
            for ap in 0..da {
                let o = op[(a, ap)];
                if o != c(0.0, 0.0) {
                    acc += o * rho[(ap * db + b, a * db + bp)];
                }
            }
        }
        acc
    })
}

/// `Σ_k (Π_k ⊗ I) ρ (Π_k ⊗ I)`.
pub fn dephase(rho: &ComplexMatrix, projectors: &[ComplexMatrix], db: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
    for p in projectors {
        let big = p.kronecker(&identity(db));
        out += &big * rho * &big;
    }
    out
}

/// `Tr(Wρ⊗4)` via the correlation-matrix identity.
pub fn witness_via_r(state: &BipartiteState) -> f64 {
    CorrelationMatrix::new(state).witness()
}

/// `Tr(Wρ⊗4)` by contracting each permutation operator against four copies.
pub fn witness_via_permutation(state: &BipartiteState) -> Result<f64> {
    witness_via_permutation_capped(state, DEFAULT_SIZE_CAP)
}

pub fn witness_via_permutation_capped(state: &BipartiteState, cap: usize) -> Result<f64> {
    let t = witness_term_traces(state, cap)?;
    Ok(combine_witness_terms(&t, state.d_a()))
}

/// `ρ̃ = ρ − I/dA ⊗ ρ_B`.
pub fn tilde_state(state: &BipartiteState) -> ComplexMatrix {
    let da = state.d_a();
    state.matrix() - (identity(da) / c(da as f64, 0.0)).kronecker(&state.reduced_b())
}

/// `Tr ρ̃²`.
pub fn tilde_purity(state: &BipartiteState) -> f64 {
    purity(&tilde_state(state))
}

/// `Q(ρ) = Tr ρ_B²/dA + (dA − 1)√(Tr(Wρ⊗4) + (Tr ρ̃²)²)`.
pub fn q_value(state: &BipartiteState, witness_value: f64) -> Result<f64> {
    let da = state.d_a() as f64;
    let tp = tilde_purity(state);
    let mut radicand = witness_value + tp * tp;
    if radicand < 0.0 {
        if radicand < -RADICAND_FLOOR {
            return Err(Error::NegativeRadicand { radicand });
        }
        radicand = 0.0;
    }
    Ok(purity(&state.reduced_b()) / da + (da - 1.0) * radicand.sqrt())
}

fn entropy_difference(state: &BipartiteState) -> f64 {
    let s_a = crate::linalg::von_neumann_entropy(&state.partial_trace(Subsystem::A)).expect("marginal of a valid state");
    s_a - state.entropy()
}

/// `max{0, S(ρ_A) − S(ρ) − log₂[dA·Q(ρ)]}` in bits; a lower bound on the
/// discord minimized over von Neumann measurements on A.
pub fn discord_lower_bound(state: &BipartiteState) -> f64 {
    let q = q_value(state, witness_via_r(state)).expect("radicand equals Tr[(RRᵀ)²] >= 0");
    discord_bound_from_q(state, q)
}

fn discord_bound_from_q(state: &BipartiteState, q: f64) -> f64 {
    (entropy_difference(state) - (state.d_a() as f64 * q).log2()).max(0.0)
}

/// `max{0, Tr ρ² − Q(ρ)}`.
pub fn geometric_discord_lower_bound(state: &BipartiteState) -> f64 {
    let q = q_value(state, witness_via_r(state)).expect("radicand equals Tr[(RRᵀ)²] >= 0");
    (state.purity() - q).max(0.0)
}

/// Witness value with the derived quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub witness_value: f64,
    pub q: f64,
    /// Bits; valid for discord restricted to von Neumann measurements.
    pub discord_lower_bound: f64,
    pub geo_discord_lower_bound: f64,
    pub route: Route,
    pub rank_r: usize,
    pub rank_threshold: f64,
    /// Whether `witness_value <= NON_POSITIVITY_TOL`.
    pub non_positive: bool,
}

impl WitnessReport {
    /// Evaluates the witness by an exact route held in this module.
    pub fn evaluate(state: &BipartiteState, route: Route) -> Result<Self> {
        let value = match route {
            Route::RMatrix => witness_via_r(state),
            Route::Permutation => witness_via_permutation(state)?,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "route {} is evaluated by the circuit module",
                    other.name()
                )))
            }
        };
        Self::from_value(state, value, route)
    }

    /// Builds a report around an externally computed witness value.
    pub fn from_value(state: &BipartiteState, witness_value: f64, route: Route) -> Result<Self> {
        let corr = CorrelationMatrix::new(state);
        let q = q_value(state, witness_value)?;
        Ok(Self {
            witness_value,
            q,
            discord_lower_bound: discord_bound_from_q(state, q),
            geo_discord_lower_bound: (state.purity() - q).max(0.0),
            route,
            rank_r: corr.rank(),
            rank_threshold: corr.rank_threshold(),
            non_positive: witness_value <= NON_POSITIVITY_TOL,
        })
    }
}
