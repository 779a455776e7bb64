//! Local orthogonal observables: Hilbert–Schmidt orthonormal Hermitian bases
//! of a single subsystem, with the identity as element 0.

use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_deviation, identity, trace_of_product, ComplexMatrix};

/// A complete set of `d²` orthonormal Hermitian observables; element 0 is
/// `I/√d`, the rest are traceless.
#[derive(Debug, Clone, PartialEq)]
pub struct LooBasis {
    d: usize,
    observables: Vec<ComplexMatrix>,
}

impl LooBasis {
    /// Normalized generalized Gell-Mann basis.
    ///
    /// Ordering after the identity: the symmetric generators for pairs
    /// `j < k` in lexicographic order, then the antisymmetric ones in the same
    /// pair order, then the diagonal generators `l = 1..d`. For `d = 2` this
    /// is `{I, σx, σy, σz}/√2`.
    pub fn gell_mann(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("Gell-Mann basis needs d >= 2, got {d}")));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut obs = Vec::with_capacity(d * d);
        obs.push(identity(d) / c((d as f64).sqrt(), 0.0));
        let pairs: Vec<(usize, usize)> =
            (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
        for &(j, k) in &pairs {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = c(s, 0.0);
            m[(k, j)] = c(s, 0.0);
            obs.push(m);
        }
        for &(j, k) in &pairs {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = c(0.0, -s);
            m[(k, j)] = c(0.0, s);
            obs.push(m);
        }
        for l in 1..d {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut m = ComplexMatrix::zeros(d, d);
            for a in 0..l {
                m[(a, a)] = c(norm, 0.0);
            }
            m[(l, l)] = c(-(l as f64) * norm, 0.0);
            obs.push(m);
        }
        Ok(Self { d, observables: obs })
    }

    /// Builds a basis from explicit observables, checking orthonormality,
    /// Hermiticity and that element 0 is `I/√d`.
    pub fn from_observables(d: usize, observables: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        if observables.len() != d * d {
            return Err(Error::InvalidBasis(format!("expected {} observables, got {}", d * d, observables.len())));
        }
        if observables.iter().any(|g| g.nrows() != d || g.ncols() != d) {
            return Err(Error::InvalidBasis("observable has wrong shape".into()));
        }
        let first = identity(d) / c((d as f64).sqrt(), 0.0);
        if crate::linalg::max_abs_diff(&observables[0], &first) > tol {
            return Err(Error::InvalidBasis("element 0 must be I/sqrt(d)".into()));
        }
        let basis = Self { d, observables };
        let dev = basis.orthonormality_deviation();
        if dev > tol {
            return Err(Error::InvalidBasis(format!("Gram deviation {dev:.3e}")));
        }
        if let Some(h) = basis.observables.iter().map(hermiticity_deviation).find(|&h| h > tol) {
            return Err(Error::InvalidBasis(format!("non-Hermitian observable ({h:.3e})")));
        }
        Ok(basis)
    }

    /// Mixes the traceless sector by a real orthogonal matrix:
    /// `G'_i = Σ_j o_ij G_j` for `i, j ≥ 1`.
    pub fn rotated(&self, o: &nalgebra::DMatrix<f64>) -> Result<Self> {
        let n = self.len() - 1;
        if o.nrows() != n || o.ncols() != n {
            return Err(Error::DimensionMismatch(format!("rotation must be {n}x{n}")));
        }
        let mut obs = vec![self.observables[0].clone()];
        for i in 0..n {
            let mut g = ComplexMatrix::zeros(self.d, self.d);
            for j in 0..n {
                g += &self.observables[j + 1] * c(o[(i, j)], 0.0);
            }
            obs.push(g);
        }
        Self::from_observables(self.d, obs, 1e-10)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn observables(&self) -> &[ComplexMatrix] {
        &self.observables
    }

    pub fn get(&self, i: usize) -> &ComplexMatrix {
        &self.observables[i]
    }

    /// The traceless generators (elements `1..d²`).
    pub fn traceless(&self) -> &[ComplexMatrix] {
        &self.observables[1..]
    }

    /// Largest `|Tr(G_i G_j) − δ_ij|`.
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for (i, gi) in self.observables.iter().enumerate() {
            for (j, gj) in self.observables.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((trace_of_product(gi, gj) - c(target, 0.0)).norm());
            }
        }
        dev
    }

    /// Real coefficients `Tr(m G_i)` of a Hermitian operator.
    pub fn coefficients(&self, m: &ComplexMatrix) -> Vec<f64> {
        self.observables.iter().map(|g| trace_of_product(m, g).re).collect()
    }

    /// `Σ_i coeffs_i G_i`.
    pub fn expand(&self, coeffs: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.d, self.d);
        for (g, &x) in self.observables.iter().zip(coeffs) {
            m += g * c(x, 0.0);
        }
        m
    }
}

/// The swap operator `V = Σ_{kl} |k⟩⟨l| ⊗ |l⟩⟨k|` on `d ⊗ d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(d * d, d * d);
    for k in 0..d {
        for l in 0..d {
            v[(k * d + l, l * d + k)] = c(1.0, 0.0);
        }
    }
    v
}
