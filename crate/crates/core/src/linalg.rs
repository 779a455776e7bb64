//! Dense complex linear algebra used throughout the toolkit: tensor products,
//! partial traces, Hermitian spectral decompositions, entropies and seeded
//! random generation of unitaries and bipartite states.
//!
//! Matrices are `nalgebra` dense matrices over `Complex64`. Entropies are in
//! bits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Default cap on the dimension of any materialized operator.
pub const DEFAULT_SIZE_CAP: usize = 1 << 14;

/// Numerical tolerances and limits shared by validation and the witness routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericConfig {
    /// Maximum entrywise deviation from Hermiticity.
    pub herm: f64,
    /// Maximum deviation of the trace from one.
    pub trace: f64,
    /// Most negative eigenvalue accepted as roundoff.
    pub psd: f64,
    /// Eigenvalues below this are treated as exact zeros in entropies.
    pub spectral_floor: f64,
    /// Total eigenvalue violation above which validation rejects instead of
    /// clamping.
    pub clamp_limit: f64,
    /// Largest operator dimension that may be materialized.
    pub size_cap: usize,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            herm: 1e-9,
            trace: 1e-9,
            psd: 1e-9,
            spectral_floor: 1e-12,
            clamp_limit: 1e-7,
            size_cap: DEFAULT_SIZE_CAP,
        }
    }
}

/// Which half of a bipartite system an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `(m + m^H) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Real part of `Tr(a b)` computed without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    assert_eq!(a.ncols(), b.nrows());
    assert_eq!(a.nrows(), b.ncols());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Tensor product with the default size cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_capped(a, b, DEFAULT_SIZE_CAP)
}

pub fn kron_capped(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let rows = a.nrows().checked_mul(b.nrows()).unwrap_or(usize::MAX);
    let cols = a.ncols().checked_mul(b.ncols()).unwrap_or(usize::MAX);
    let requested = rows.max(cols);
    if requested > cap {
        return Err(Error::SizeOverflow { requested, cap });
    }
    Ok(a.kronecker(b))
}

/// Partial trace of an operator on `d1 ⊗ d2`, keeping the named factor.
pub fn partial_trace(m: &ComplexMatrix, d1: usize, d2: usize, keep: Subsystem) -> Result<ComplexMatrix> {
    if m.nrows() != d1 * d2 || m.ncols() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {} = {}·{}",
            m.nrows(),
            m.ncols(),
            d1 * d2,
            d1,
            d2
        )));
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(d1, d1, |a, ap| {
            (0..d2).map(|b| m[(a * d2 + b, ap * d2 + b)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(d2, d2, |b, bp| {
            (0..d1).map(|a| m[(a * d2 + b, a * d2 + bp)]).sum()
        }),
    })
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, aligned with `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn new(m: &ComplexMatrix) -> Self {
        let herm = hermitian_part(m);
        let eig = herm.symmetric_eigen();
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = ComplexMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
        Self { eigenvalues, eigenvectors }
    }

    /// `V f(Λ) V^H`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let diag = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&l| f(l)),
        ));
        v * diag * v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| c(l, 0.0))
    }
}

fn check_density(m: &ComplexMatrix, cfg: &NumericConfig) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::NotDensityMatrix(format!("{}x{} is not square", m.nrows(), m.ncols())));
    }
    let dev = hermiticity_deviation(m);
    if dev > cfg.herm {
        return Err(Error::NotDensityMatrix(format!("Hermiticity deviation {dev:.3e}")));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > cfg.trace || tr.im.abs() > cfg.trace {
        return Err(Error::NotDensityMatrix(format!("trace {tr}")));
    }
    let spec = SpectralDecomposition::new(m);
    if let Some(&min) = spec.eigenvalues.last() {
        if min < -cfg.psd {
            return Err(Error::NotDensityMatrix(format!("eigenvalue {min:.3e}")));
        }
    }
    Ok(spec)
}

/// Shannon entropy in bits of a list of probabilities; entries below `floor`
/// contribute nothing.
pub fn shannon_entropy(p: impl IntoIterator<Item = f64>, floor: f64) -> f64 {
    p.into_iter()
        .filter(|&x| x > floor)
        .map(|x| -x * x.log2())
        .sum()
}

/// `S(m) = -Tr m log2 m` for a density matrix.
pub fn von_neumann_entropy(m: &ComplexMatrix) -> Result<f64> {
    von_neumann_entropy_with(m, &NumericConfig::default())
}

pub fn von_neumann_entropy_with(m: &ComplexMatrix, cfg: &NumericConfig) -> Result<f64> {
    let spec = check_density(m, cfg)?;
    Ok(shannon_entropy(spec.eigenvalues, cfg.spectral_floor).max(0.0))
}

/// `Tr(m^2)` for a square matrix, as a real number.
pub fn purity(m: &ComplexMatrix) -> f64 {
    trace_of_product(m, m).re
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    // Fill row-major so the draw order does not depend on nalgebra's layout.
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-distributed `d x d` unitary, deterministic for a given seed.
///
/// QR of a complex Ginibre matrix with the phases of `R`'s diagonal moved
/// into `Q`, so every column phase is fixed by the draw.
pub fn random_unitary(d: usize, seed: u64) -> ComplexMatrix {
    assert!(d >= 1, "random_unitary needs d >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_from(d, &mut rng)
}

pub(crate) fn random_unitary_from(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let z = ginibre(d, d, rng);
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Random bipartite state of the given rank, deterministic per seed.
///
/// The state is the reduced density matrix of a Haar-random pure state on
/// `(dA·dB) ⊗ rank`, i.e. `G G^H / Tr(G G^H)` for a Ginibre `G`.
pub fn random_state(d_a: usize, d_b: usize, rank: usize, seed: u64) -> Result<BipartiteState> {
    let dim = d_a * d_b;
    if rank == 0 || rank > dim {
        return Err(Error::BadRank { rank, max: dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(dim, rank, &mut rng);
    let mut rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho /= c(tr, 0.0);
    BipartiteState::new(hermitian_part(&rho), d_a, d_b)
}

/// A validated bipartite density matrix on `dA ⊗ dB`, A the leading factor.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    d_a: usize,
    d_b: usize,
    rho: ComplexMatrix,
}

impl BipartiteState {
    /// Validates with the default tolerances.
    pub fn new(raw: ComplexMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        Self::validate(raw, d_a, d_b, &NumericConfig::default())
    }

    /// Checks shape, finiteness, Hermiticity, trace and positivity.
    ///
    /// Eigenvalues slightly outside `[0, 1]` are clamped and the spectrum
    /// renormalized, provided each lies above `-cfg.psd` and the summed
    /// violation stays under `cfg.clamp_limit`.
    pub fn validate(raw: ComplexMatrix, d_a: usize, d_b: usize, cfg: &NumericConfig) -> Result<Self> {
        if d_a < 2 || d_b < 2 {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dimensions must be at least 2, got {d_a}x{d_b}"
            )));
        }
        let dim = d_a * d_b;
        if raw.nrows() != dim || raw.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, expected {dim}x{dim} for {d_a}x{d_b}",
                raw.nrows(),
                raw.ncols()
            )));
        }
        for j in 0..dim {
            for i in 0..dim {
                let z = raw[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        let deviation = hermiticity_deviation(&raw);
        if deviation > cfg.herm {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = raw.trace();
        let trace_dev = (tr - c(1.0, 0.0)).norm();
        if trace_dev > cfg.trace {
            return Err(Error::TraceNotOne { trace: tr.re, deviation: trace_dev });
        }
        let rho = hermitian_part(&raw);
        let spec = SpectralDecomposition::new(&rho);
        let min_eigenvalue = *spec.eigenvalues.last().expect("non-empty spectrum");
        let violation: f64 = spec
            .eigenvalues
            .iter()
            .map(|&l| if l < 0.0 { -l } else if l > 1.0 { l - 1.0 } else { 0.0 })
            .sum();
        if min_eigenvalue < -cfg.psd || violation >= cfg.clamp_limit {
            return Err(Error::NotPositive { min_eigenvalue, violation });
        }
        // Violations at roundoff level are left alone rather than rebuilding
        // the matrix from its eigenvectors.
        let rho = if violation > cfg.spectral_floor {
            let clamped: Vec<f64> = spec.eigenvalues.iter().map(|l| l.clamp(0.0, 1.0)).collect();
            let total: f64 = clamped.iter().sum();
            let fixed = SpectralDecomposition {
                eigenvalues: clamped.iter().map(|l| l / total).collect(),
                eigenvectors: spec.eigenvectors,
            };
            hermitian_part(&fixed.reconstruct())
        } else {
            rho
        };
        Ok(Self { d_a, d_b, rho })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    pub fn partial_trace(&self, keep: Subsystem) -> ComplexMatrix {
        partial_trace(&self.rho, self.d_a, self.d_b, keep).expect("validated dimensions")
    }

    pub fn reduced_a(&self) -> ComplexMatrix {
        self.partial_trace(Subsystem::A)
    }

    pub fn reduced_b(&self) -> ComplexMatrix {
        self.partial_trace(Subsystem::B)
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(self.spectrum(), NumericConfig::default().spectral_floor).max(0.0)
    }

    pub fn spectrum(&self) -> Vec<f64> {
        SpectralDecomposition::new(&self.rho).eigenvalues
    }

    pub fn purity(&self) -> f64 {
        purity(&self.rho)
    }

    /// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)^H`.
    pub fn local_unitary(&self, u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> Result<Self> {
        if u_a.nrows() != self.d_a || u_b.nrows() != self.d_b {
            return Err(Error::DimensionMismatch("local unitary dimensions".into()));
        }
        let u = u_a.kronecker(u_b);
        let rho = hermitian_part(&(&u * &self.rho * u.adjoint()));
        Self::new(rho, self.d_a, self.d_b)
    }

    /// The same state with the roles of A and B exchanged.
    pub fn swapped(&self) -> Self {
        let (da, db) = (self.d_a, self.d_b);
        let idx = |a: usize, b: usize| a * db + b;
        let rho = ComplexMatrix::from_fn(da * db, da * db, |r, s| {
            let (b, a) = (r / da, r % da);
            let (bp, ap) = (s / da, s % da);
            self.rho[(idx(a, b), idx(ap, bp))]
        });
        Self { d_a: db, d_b: da, rho }
    }
}
