//! Named reference states.

use nalgebra::DVector;

use crate::error::Result;
use crate::linalg::{c, identity, BipartiteState, ComplexMatrix, C64};

/// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector, normalized.
pub fn projector(psi: &DVector<C64>) -> ComplexMatrix {
    let norm = psi.norm();
    let v = psi / c(norm, 0.0);
    &v * v.adjoint()
}

/// `|Φ⁺⟩⟨Φ⁺|` with `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell() -> BipartiteState {
    let psi = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    BipartiteState::new(projector(&psi), 2, 2).expect("Bell projector is a valid state")
}

/// `p |Φ⁺⟩⟨Φ⁺| + (1 - p) I/4`.
pub fn werner(p: f64) -> Result<BipartiteState> {
    let mix = bell().into_matrix() * c(p, 0.0) + identity(4) * c((1.0 - p) / 4.0, 0.0);
    BipartiteState::new(mix, 2, 2)
}

pub fn maximally_mixed(d_a: usize, d_b: usize) -> Result<BipartiteState> {
    let d = d_a * d_b;
    BipartiteState::new(identity(d) / c(d as f64, 0.0), d_a, d_b)
}

/// `σ ⊗ τ`.
pub fn product(sigma: &ComplexMatrix, tau: &ComplexMatrix) -> Result<BipartiteState> {
    BipartiteState::new(sigma.kronecker(tau), sigma.nrows(), tau.nrows())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn werner_endpoints() {
        let close = |a: &BipartiteState, b: &BipartiteState| crate::linalg::max_abs_diff(a.matrix(), b.matrix()) < 1e-15;
        assert!(close(&werner(1.0).unwrap(), &bell()));
        assert!(close(&werner(0.0).unwrap(), &maximally_mixed(2, 2).unwrap()));
    }
}
