//! Zero-discord (classical-quantum) state constructors.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_deviation, random_state, random_unitary_from, BipartiteState, ComplexMatrix, SpectralDecomposition, C64};

/// `Σ_k p_k |ψ_k⟩⟨ψ_k| ⊗ ρ_k` for orthonormal `|ψ_k⟩`.
///
/// Fewer branches than the dimension of A are allowed; a single branch with
/// `p = 1` gives a product state.
pub fn classical_quantum_state(
    probabilities: &[f64],
    basis_a: &[DVector<C64>],
    branches: &[ComplexMatrix],
) -> Result<BipartiteState> {
    let n = probabilities.len();
    if n == 0 || basis_a.len() != n || branches.len() != n {
        return Err(Error::InvalidEnsemble(format!(
            "{} probabilities, {} vectors, {} branches",
            n,
            basis_a.len(),
            branches.len()
        )));
    }
    if probabilities.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidEnsemble("probabilities must lie in [0, 1]".into()));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
    }
    let da = basis_a[0].len();
    if da < n || basis_a.iter().any(|v| v.len() != da) {
        return Err(Error::InvalidEnsemble("basis vectors have inconsistent dimension".into()));
    }
    for (j, vj) in basis_a.iter().enumerate() {
        for (k, vk) in basis_a.iter().enumerate() {
            let target = if j == k { 1.0 } else { 0.0 };
            if (vj.dotc(vk) - c(target, 0.0)).norm() > 1e-10 {
                return Err(Error::InvalidEnsemble(format!("vectors {j} and {k} are not orthonormal")));
            }
        }
    }
    let db = branches[0].nrows();
    for (k, b) in branches.iter().enumerate() {
        let ok = b.is_square()
            && b.nrows() == db
            && hermiticity_deviation(b) <= 1e-9
            && (b.trace().re - 1.0).abs() <= 1e-9
            && SpectralDecomposition::new(b).eigenvalues.last().is_some_and(|&l| l >= -1e-9);
        if !ok {
            return Err(Error::InvalidEnsemble(format!("branch {k} is not a density matrix of size {db}")));
        }
    }
    let mut rho = ComplexMatrix::zeros(da * db, da * db);
    for ((&p, v), b) in probabilities.iter().zip(basis_a).zip(branches) {
        let proj = v * v.adjoint();
        rho += proj.kronecker(b) * c(p, 0.0);
    }
    BipartiteState::new(rho, da, db).map_err(|e| Error::InvalidEnsemble(e.to_string()))
}

/// Random classical-quantum state with `branches` outcomes on a random
/// orthonormal basis of A, random weights and random full-rank branches.
pub fn random_classical_quantum(d_a: usize, d_b: usize, branches: usize, seed: u64) -> Result<BipartiteState> {
    if branches == 0 || branches > d_a {
        return Err(Error::InvalidEnsemble(format!("{branches} branches for dA = {d_a}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_unitary_from(d_a, &mut rng);
    let weights: Vec<f64> = (0..branches).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let probabilities: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let vectors: Vec<DVector<C64>> = (0..branches).map(|k| u.column(k).into_owned()).collect();
    let rhos: Vec<ComplexMatrix> = (0..branches)
        .map(|_| {
            let s: u64 = rng.random();
            random_state(d_b, 2, 2 * d_b, s).map(|st| st.reduced_a())
        })
        .collect::<Result<_>>()?;
    classical_quantum_state(&probabilities, &vectors, &rhos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use crate::witness::{witness_via_permutation, witness_via_r};

    fn ket(d: usize, k: usize) -> DVector<C64> {
        let mut v = DVector::zeros(d);
        v[k] = c(1.0, 0.0);
        v
    }

    #[test]
    fn qubit_flag_states_have_zero_witness() {
        for seed in 0..10 {
            let s = random_classical_quantum(2, 3, 2, seed).unwrap();
            assert!(witness_via_permutation(&s).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn single_branch_is_product() {
        let rho_b = random_state(2, 2, 4, 3).unwrap().reduced_b();
        let s = classical_quantum_state(&[1.0], &[ket(2, 1)], &[rho_b]).unwrap();
        assert_eq!(witness_via_r(&s), 0.0);
    }

    #[test]
    fn rejects_bad_ensembles() {
        let half = identity(2) / c(2.0, 0.0);
        assert!(classical_quantum_state(&[0.5, 0.6], &[ket(2, 0), ket(2, 1)], &[half.clone(), half.clone()]).is_err());
        assert!(classical_quantum_state(&[0.5, 0.5], &[ket(2, 0), ket(2, 0)], &[half.clone(), half.clone()]).is_err());
        assert!(classical_quantum_state(&[0.5, 0.5], &[ket(2, 0), ket(2, 1)], &[half.clone(), identity(2)]).is_err());
        assert!(classical_quantum_state(&[1.0], &[ket(2, 0)], &[]).is_err());
        assert!(random_classical_quantum(2, 2, 3, 0).is_err());
    }
}
