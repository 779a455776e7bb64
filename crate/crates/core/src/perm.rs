//! Permutation operators on four copies of a bipartite system.
//!
//! The four-copy space is ordered `A₁B₁A₂B₂A₃B₃A₄B₄` with copy 1 most
//! significant, which is the ordering of `ρ ⊗ ρ ⊗ ρ ⊗ ρ` built by repeated
//! Kronecker products. A copy permutation `σ` acts by moving the content of
//! copy `c` to copy `σ(c)`; A and B factors are permuted independently.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{c, BipartiteState, ComplexMatrix, C64};

pub const COPIES: usize = 4;

/// A permutation of the four copies, stored as `image[c] = σ(c)` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CopyPermutation([u8; COPIES]);

impl CopyPermutation {
    pub const IDENTITY: Self = Self([0, 1, 2, 3]);

    pub fn new(image: [u8; COPIES]) -> Result<Self> {
        let mut seen = [false; COPIES];
        for &x in &image {
            if x as usize >= COPIES || seen[x as usize] {
                return Err(Error::InvalidPermutation(format!("{image:?} is not a permutation of 0..4")));
            }
            seen[x as usize] = true;
        }
        Ok(Self(image))
    }

    /// Product of transpositions given as 1-based copy pairs, which must be
    /// pairwise disjoint.
    pub fn from_pair_swaps(pairs: &[(usize, usize)]) -> Result<Self> {
        let mut image = [0u8, 1, 2, 3];
        let mut used = [false; COPIES];
        for &(i, j) in pairs {
            if !(1..=COPIES).contains(&i) || !(1..=COPIES).contains(&j) || i == j {
                return Err(Error::InvalidPermutation(format!("bad copy pair ({i}, {j})")));
            }
            let (i, j) = (i - 1, j - 1);
            if used[i] || used[j] {
                return Err(Error::InvalidPermutation(format!(
                    "copy pairs overlap at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            used[i] = true;
            used[j] = true;
            image.swap(i, j);
        }
        Ok(Self(image))
    }

    pub fn apply(&self, copy: usize) -> usize {
        self.0[copy] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let mut image = [0u8; COPIES];
        for (k, slot) in image.iter_mut().enumerate() {
            *slot = self.0[other.0[k] as usize];
        }
        Self(image)
    }

    pub fn inverse(&self) -> Self {
        let mut image = [0u8; COPIES];
        for (k, &x) in self.0.iter().enumerate() {
            image[x as usize] = k as u8;
        }
        Self(image)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let mut seen = [false; COPIES];
        let mut cycles = 0;
        for start in 0..COPIES {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.0[k] as usize;
            }
        }
        cycles
    }
}

/// `V_σA ⊗ V_σB` on the four-copy space of a `dA x dB` system.
#[derive(Debug, Clone)]
pub struct PermutationOperator {
    d_a: usize,
    d_b: usize,
    perm_a: CopyPermutation,
    perm_b: CopyPermutation,
    dense: OnceLock<ComplexMatrix>,
}

impl PartialEq for PermutationOperator {
    fn eq(&self, other: &Self) -> bool {
        (self.d_a, self.d_b, self.perm_a, self.perm_b) == (other.d_a, other.d_b, other.perm_a, other.perm_b)
    }
}

/// Which of the four operators `U₁..U₄` entering the witness.
///
/// `U₁ = V₁₄ᴬV₂₃ᴬV₁₂ᴮV₃₄ᴮ`, `U₂ = V₁₄ᴬV₁₂ᴮV₃₄ᴮ`, `U₃ = V₁₂ᴬV₃₄ᴬV₁₂ᴮV₃₄ᴮ`,
/// `U₄ = V₁₂ᴬV₁₂ᴮV₃₄ᴮ`.
pub const WITNESS_SWAPS: [(&[(usize, usize)], &[(usize, usize)]); 4] = [
    (&[(1, 4), (2, 3)], &[(1, 2), (3, 4)]),
    (&[(1, 4)], &[(1, 2), (3, 4)]),
    (&[(1, 2), (3, 4)], &[(1, 2), (3, 4)]),
    (&[(1, 2)], &[(1, 2), (3, 4)]),
];

impl PermutationOperator {
    pub fn new(perm_a: CopyPermutation, perm_b: CopyPermutation, d_a: usize, d_b: usize) -> Self {
        Self { d_a, d_b, perm_a, perm_b, dense: OnceLock::new() }
    }

    pub fn from_pair_swaps(
        swaps_a: &[(usize, usize)],
        swaps_b: &[(usize, usize)],
        d_a: usize,
        d_b: usize,
    ) -> Result<Self> {
        Ok(Self::new(
            CopyPermutation::from_pair_swaps(swaps_a)?,
            CopyPermutation::from_pair_swaps(swaps_b)?,
            d_a,
            d_b,
        ))
    }

    /// `U_i` for `i ∈ {1, 2, 3, 4}`.
    pub fn witness_term(i: usize, d_a: usize, d_b: usize) -> Self {
        assert!((1..=4).contains(&i), "witness terms are U1..U4");
        let (sa, sb) = WITNESS_SWAPS[i - 1];
        Self::from_pair_swaps(sa, sb, d_a, d_b).expect("static swap lists are valid")
    }

    pub fn identity(d_a: usize, d_b: usize) -> Self {
        Self::new(CopyPermutation::IDENTITY, CopyPermutation::IDENTITY, d_a, d_b)
    }

    pub fn perm_a(&self) -> CopyPermutation {
        self.perm_a
    }

    pub fn perm_b(&self) -> CopyPermutation {
        self.perm_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    /// Dimension of the four-copy space, `(dA·dB)⁴`.
    pub fn dimension(&self) -> usize {
        (self.d_a * self.d_b).pow(COPIES as u32)
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dims(), other.dims());
        Self::new(self.perm_a.compose(&other.perm_a), self.perm_b.compose(&other.perm_b), self.d_a, self.d_b)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.perm_a.inverse(), self.perm_b.inverse(), self.d_a, self.d_b)
    }

    fn digits(&self, mut y: usize) -> ([usize; COPIES], [usize; COPIES]) {
        let (mut a, mut b) = ([0; COPIES], [0; COPIES]);
        for k in (0..COPIES).rev() {
            b[k] = y % self.d_b;
            y /= self.d_b;
            a[k] = y % self.d_a;
            y /= self.d_a;
        }
        (a, b)
    }

    fn index(&self, a: &[usize; COPIES], b: &[usize; COPIES]) -> usize {
        (0..COPIES).fold(0, |acc, k| (acc * self.d_a + a[k]) * self.d_b + b[k])
    }

    /// `f` with `P|y⟩ = |f(y)⟩`.
    pub fn basis_map(&self) -> Vec<usize> {
        (0..self.dimension()).map(|y| self.map_index(y)).collect()
    }

    pub fn map_index(&self, y: usize) -> usize {
        let (a, b) = self.digits(y);
        let (mut fa, mut fb) = ([0; COPIES], [0; COPIES]);
        for k in 0..COPIES {
            fa[self.perm_a.apply(k)] = a[k];
            fb[self.perm_b.apply(k)] = b[k];
        }
        self.index(&fa, &fb)
    }

    /// Dense permutation matrix, built once on first use.
    pub fn to_dense(&self, cap: usize) -> Result<&ComplexMatrix> {
        let dim = self.dimension();
        if dim > cap {
            return Err(Error::SizeOverflow { requested: dim, cap });
        }
        Ok(self.dense.get_or_init(|| {
            let mut m = ComplexMatrix::zeros(dim, dim);
            for (y, fy) in self.basis_map().into_iter().enumerate() {
                m[(fy, y)] = c(1.0, 0.0);
            }
            m
        }))
    }

    /// `Tr(P ρ^{⊗4})` by direct index contraction, without materializing
    /// either operator.
    pub fn expectation(&self, state: &BipartiteState, cap: usize) -> Result<C64> {
        if state.dims() != self.dims() {
            return Err(Error::DimensionMismatch(format!(
                "operator built for {:?}, state is {:?}",
                self.dims(),
                state.dims()
            )));
        }
        let dim = self.dimension();
        if dim > cap {
            return Err(Error::SizeOverflow { requested: dim, cap });
        }
        Ok(self.contract(state.matrix()))
    }

    pub(crate) fn contract(&self, rho: &ComplexMatrix) -> C64 {
        let (da, db) = (self.d_a, self.d_b);
        let sa: [usize; COPIES] = std::array::from_fn(|k| self.perm_a.apply(k));
        let sb: [usize; COPIES] = std::array::from_fn(|k| self.perm_b.apply(k));
        let mut total = C64::new(0.0, 0.0);
        let mut a = [0usize; COPIES];
        let mut b = [0usize; COPIES];
        // Odometer over all eight local indices.
        loop {
            let mut term = C64::new(1.0, 0.0);
            for k in 0..COPIES {
                let row = a[sa[k]] * db + b[sb[k]];
                let col = a[k] * db + b[k];
                term *= rho[(row, col)];
            }
            total += term;

            let mut k = 0;
            loop {
                if k == 2 * COPIES {
                    return total;
                }
                let (digit, base) = if k < COPIES { (&mut a[k], da) } else { (&mut b[k - COPIES], db) };
                *digit += 1;
                if *digit < base {
                    break;
                }
                *digit = 0;
                k += 1;
            }
        }
    }
}

/// `[Tr(U₁ρ⊗4), …, Tr(U₄ρ⊗4)]`, real because each `U_i` is Hermitian.
pub fn witness_term_traces(state: &BipartiteState, cap: usize) -> Result<[f64; 4]> {
    let (da, db) = state.dims();
    let mut out = [0.0; 4];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = PermutationOperator::witness_term(i + 1, da, db).expectation(state, cap)?.re;
    }
    Ok(out)
}

/// `Tr(Wρ⊗4)` from the four term traces, `W = U₁ − U₃ − (2/dA)(U₂ − U₄)`.
pub fn combine_witness_terms(t: &[f64; 4], d_a: usize) -> f64 {
    t[0] - t[2] - 2.0 / d_a as f64 * (t[1] - t[3])
}
