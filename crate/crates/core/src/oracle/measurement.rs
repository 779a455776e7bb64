use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{c, identity, max_abs_diff, purity, shannon_entropy, BipartiteState, ComplexMatrix, SpectralDecomposition, C64};
use crate::loo::LooBasis;
use crate::witness::a_side_contraction;

/// Outcomes with probability below this are dropped from entropies.
pub const BRANCH_FLOOR: f64 = 1e-12;

/// A rank-one von Neumann measurement `{Π_k = |v_k⟩⟨v_k|}` on subsystem A.
#[derive(Debug, Clone)]
pub struct MeasurementBasis {
    vectors: ComplexMatrix,
    projectors: Vec<ComplexMatrix>,
    loo_coefficients: DMatrix<f64>,
}

impl MeasurementBasis {
    /// The columns of `u` are the measurement vectors.
    pub fn from_unitary(u: ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::InvalidBasis("basis matrix must be square".into()));
        }
        let d = u.nrows();
        let dev = max_abs_diff(&(u.adjoint() * &u), &identity(d));
        if dev > 1e-10 {
            return Err(Error::InvalidBasis(format!("vectors are not orthonormal ({dev:.3e})")));
        }
        Ok(Self::from_unitary_unchecked(u))
    }

    pub(crate) fn from_unitary_unchecked(u: ComplexMatrix) -> Self {
        let d = u.nrows();
        let projectors: Vec<ComplexMatrix> = (0..d)
            .map(|k| {
                let v = u.column(k);
                &v * v.adjoint()
            })
            .collect();
        let loo = LooBasis::gell_mann(d.max(2)).expect("d >= 2");
        let loo_coefficients = DMatrix::from_fn(d, d * d, |k, i| {
            crate::linalg::trace_of_product(&projectors[k], loo.get(i)).re
        });
        Self { vectors: u, projectors, loo_coefficients }
    }

    pub fn computational(d: usize) -> Self {
        Self::from_unitary_unchecked(identity(d))
    }

    /// Qubit measurement along the Bloch direction `(θ, φ)`.
    pub fn qubit(theta: f64, phi: f64) -> Self {
        let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let e = C64::from_polar(1.0, phi);
        let u = ComplexMatrix::from_row_slice(2, 2, &[c(ct, 0.0), c(st, 0.0), e * st, -e * ct]);
        Self::from_unitary_unchecked(u)
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> DVector<C64> {
        self.vectors.column(k).into_owned()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// `e_i^k = Tr(Π_k A_i)` in the Gell-Mann basis; row `k`, column `i`.
    pub fn loo_coefficients(&self) -> &DMatrix<f64> {
        &self.loo_coefficients
    }

    /// Largest of `|Σ_k Π_k − I|` and `|Π_j Π_k − δ_jk Π_k|`.
    pub fn projector_deviation(&self) -> f64 {
        let d = self.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        let mut dev: f64 = 0.0;
        for (j, pj) in self.projectors.iter().enumerate() {
            sum += pj;
            for (k, pk) in self.projectors.iter().enumerate() {
                let prod = pj * pk;
                let target = if j == k { pk.clone() } else { ComplexMatrix::zeros(d, d) };
                dev = dev.max(max_abs_diff(&prod, &target));
            }
        }
        dev.max(max_abs_diff(&sum, &identity(d)))
    }
}

/// Probabilities and post-measurement states of B for one basis.
#[derive(Debug, Clone)]
pub struct MeasurementOutcomeSet {
    pub probabilities: Vec<f64>,
    /// `ρ'_{B|k} = Tr_A((Π_k ⊗ I) ρ)`.
    pub unnormalized: Vec<ComplexMatrix>,
}

impl MeasurementOutcomeSet {
    /// `ρ_{B|k} = ρ'_{B|k} / p_k`, `None` for outcomes below the floor.
    pub fn branch(&self, k: usize) -> Option<ComplexMatrix> {
        let p = self.probabilities[k];
        (p >= BRANCH_FLOOR).then(|| &self.unnormalized[k] / c(p, 0.0))
    }

    pub fn branches(&self) -> Vec<Option<ComplexMatrix>> {
        (0..self.probabilities.len()).map(|k| self.branch(k)).collect()
    }
}

pub fn apply_measurement(state: &BipartiteState, basis: &MeasurementBasis) -> Result<MeasurementOutcomeSet> {
    let (da, db) = state.dims();
    if basis.dim() != da {
        return Err(Error::DimensionMismatch(format!(
            "basis acts on dimension {}, subsystem A has {da}",
            basis.dim()
        )));
    }
    let unnormalized: Vec<ComplexMatrix> =
        basis.projectors().iter().map(|p| a_side_contraction(state.matrix(), p, da, db)).collect();
    let probabilities = unnormalized.iter().map(|m| m.trace().re).collect();
    Ok(MeasurementOutcomeSet { probabilities, unnormalized })
}

/// `Σ_k p_k S(ρ_{B|k})` in bits.
pub fn conditional_entropy(outcomes: &MeasurementOutcomeSet) -> f64 {
    outcomes
        .probabilities
        .iter()
        .zip(&outcomes.unnormalized)
        .filter(|(&p, _)| p >= BRANCH_FLOOR)
        .map(|(&p, m)| {
            // p S(ρ'/p) = p log p − Σ λ log λ over the eigenvalues of ρ'.
            let spec = SpectralDecomposition::new(m);
            let lambdas: Vec<f64> = spec.eigenvalues.iter().map(|&l| l / p).collect();
            p * shannon_entropy(lambdas, BRANCH_FLOOR)
        })
        .sum::<f64>()
        .max(0.0)
}

/// `Σ_k Tr[(ρ'_{B|k})²]`, computed directly from the branches.
pub fn branch_purity_sum(state: &BipartiteState, basis: &MeasurementBasis) -> Result<f64> {
    let out = apply_measurement(state, basis)?;
    Ok(out.unnormalized.iter().map(purity).sum())
}

/// `M_ij = Tr(A_i¹ ⊗ A_j² V₁₂ᴮ ρ⊗2) = Tr(X_i X_j)` with
/// `X_i = Tr_A((A_i ⊗ I) ρ)`, over the traceless Gell-Mann generators.
#[derive(Debug, Clone)]
pub struct MMatrix {
    entries: DMatrix<f64>,
    d_a: usize,
    purity_b: f64,
}

impl MMatrix {
    pub fn new(state: &BipartiteState) -> Self {
        let (da, db) = state.dims();
        let loo = LooBasis::gell_mann(da).expect("validated dimension");
        let xs: Vec<ComplexMatrix> =
            loo.traceless().iter().map(|a| a_side_contraction(state.matrix(), a, da, db)).collect();
        let n = xs.len();
        let entries = DMatrix::from_fn(n, n, |i, j| crate::linalg::trace_of_product(&xs[i], &xs[j]).re);
        Self { entries, d_a: da, purity_b: purity(&state.reduced_b()) }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn asymmetry(&self) -> f64 {
        (&self.entries - self.entries.transpose()).abs().max()
    }

    /// `Tr(M Mᵀ)`.
    pub fn trace_m_mt(&self) -> f64 {
        self.entries.norm_squared()
    }

    /// `Σ_k Σ_ij e_i^k e_j^k M_ij + Tr ρ_B² / dA`.
    pub fn branch_purity_sum(&self, basis: &MeasurementBasis) -> Result<f64> {
        if basis.dim() != self.d_a {
            return Err(Error::DimensionMismatch("basis does not match subsystem A".into()));
        }
        let e = basis.loo_coefficients();
        let mut total = self.purity_b / self.d_a as f64;
        for k in 0..basis.dim() {
            let ek: DVector<f64> = DVector::from_iterator(self.entries.nrows(), (1..e.ncols()).map(|i| e[(k, i)]));
            total += ek.dot(&(&self.entries * &ek));
        }
        Ok(total)
    }
}
