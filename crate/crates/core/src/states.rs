//! Pure and mixed states: the named families used throughout the analysis
//! plus seeded Haar sampling.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{check_range, Error, Result};
use crate::linalg::{self, c, ComplexMatrix, DimsSpec, PartitionSpec, C64, HERMITIAN_TOL};

/// Tolerance on `‖ψ‖₂ = 1`.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance on trace and positivity of density operators.
pub const STATE_TOL: f64 = 1e-10;

/// Deterministic generator for a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit vector on a composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    dims: DimsSpec,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>, dims: DimsSpec) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                found: amplitudes.len(),
            });
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotAState(format!("state vector has norm {norm}")));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>, dims: DimsSpec) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::NotAState("cannot normalize a zero or non-finite vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(amplitudes, dims)
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(index: usize, dims: DimsSpec) -> Result<Self> {
        let n = dims.total();
        if index >= n {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dim {n}"
            )));
        }
        let mut amplitudes = vec![C64::default(); n];
        amplitudes[index] = c(1.0, 0.0);
        Self::new(amplitudes, dims)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &DimsSpec {
        &self.dims
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            matrix: self.projector(),
            dims: self.dims.clone(),
        }
    }

    /// `self ⊗ other`, concatenating the factor lists.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        let mut factors = self.dims.factors().to_vec();
        factors.extend_from_slice(other.dims.factors());
        PureState {
            amplitudes,
            dims: DimsSpec::new(factors).expect("concatenated dims are valid"),
        }
    }
}

fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Positive semidefinite, unit-trace operator on a composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dims: DimsSpec,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and unit trace.
    pub fn new(matrix: ComplexMatrix, dims: DimsSpec) -> Result<Self> {
        dims.check_matrix(&matrix)?;
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotAState(format!(
                "not Hermitian (max |m - m†| = {deviation:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > STATE_TOL || trace.im.abs() > STATE_TOL {
            return Err(Error::NotAState(format!("trace is {trace}, expected 1")));
        }
        let min = linalg::min_eigenvalue(&matrix)?;
        if min < -STATE_TOL {
            return Err(Error::NotAState(format!(
                "not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dims: DimsSpec) -> Self {
        debug_assert_eq!(matrix.dim(), dims.total());
        Self { matrix, dims }
    }

    pub fn maximally_mixed(dims: DimsSpec) -> Self {
        let n = dims.total();
        Self::new_unchecked(ComplexMatrix::identity(n).scale(1.0 / n as f64), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &DimsSpec {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        linalg::min_eigenvalue(&self.matrix)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `x·self + (1-x)·other`.
    pub fn mix(&self, other: &DensityOperator, x: f64) -> Result<DensityOperator> {
        check_range("mixing weight", x, 0.0, 1.0, "[0, 1]")?;
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self::new_unchecked(
            self.matrix.scale(x) + other.matrix.scale(1.0 - x),
            self.dims.clone(),
        ))
    }

    /// Marginal on the listed factors.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityOperator> {
        let matrix = linalg::partial_trace(&self.matrix, &self.dims, keep)?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let dims = DimsSpec::new(keep.iter().map(|&k| self.dims.factors()[k]).collect())?;
        Ok(Self::new_unchecked(matrix, dims))
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        let mut factors = self.dims.factors().to_vec();
        factors.extend_from_slice(other.dims.factors());
        Self::new_unchecked(
            self.matrix.kron(&other.matrix),
            DimsSpec::new(factors).expect("concatenated dims are valid"),
        )
    }
}

impl From<&PureState> for DensityOperator {
    fn from(psi: &PureState) -> Self {
        psi.density()
    }
}

fn qubits(n: usize) -> DimsSpec {
    DimsSpec::uniform(2, n).expect("n >= 1")
}

/// `(1/√d) Σ_j |jj⟩` on `[d, d]`.
pub fn max_entangled(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("max_entangled needs d >= 2, got {d}")));
    }
    let s = 1.0 / (d as f64).sqrt();
    let mut amplitudes = vec![C64::default(); d * d];
    for j in 0..d {
        amplitudes[j * d + j] = c(s, 0.0);
    }
    PureState::new(amplitudes, DimsSpec::new(vec![d, d])?)
}

/// `λ P₊ + (1-λ) I/d ⊗ I/d`.
pub fn werner(lambda: f64, d: usize) -> Result<DensityOperator> {
    check_range("lambda", lambda, 0.0, 1.0, "[0, 1]")?;
    let p_plus = max_entangled(d)?.density();
    let mixed = DensityOperator::maximally_mixed(p_plus.dims.clone());
    p_plus.mix(&mixed, lambda)
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
pub fn ghz(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("ghz needs n >= 2, got {n}")));
    }
    ghz_on(&qubits(n))
}

/// `(|0…0⟩ + |1…1⟩)/√2` on arbitrary factors, each of dimension ≥ 2.
pub fn ghz_on(dims: &DimsSpec) -> Result<PureState> {
    require_excitable(dims)?;
    let mut amplitudes = vec![C64::default(); dims.total()];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    amplitudes[0] = c(s, 0.0);
    amplitudes[dims.index_of(&vec![1; dims.len()])] = c(s, 0.0);
    PureState::new(amplitudes, dims.clone())
}

/// Uniform superposition of single-excitation basis vectors on `n` qubits.
pub fn w_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("w_state needs n >= 2, got {n}")));
    }
    w_on(&qubits(n))
}

/// Single-excitation superposition (one factor in `|1⟩`, rest `|0⟩`).
pub fn w_on(dims: &DimsSpec) -> Result<PureState> {
    require_excitable(dims)?;
    let n = dims.len();
    let s = 1.0 / (n as f64).sqrt();
    let mut amplitudes = vec![C64::default(); dims.total()];
    for k in 0..n {
        let mut digits = vec![0; n];
        digits[k] = 1;
        amplitudes[dims.index_of(&digits)] = c(s, 0.0);
    }
    PureState::new(amplitudes, dims.clone())
}

fn require_excitable(dims: &DimsSpec) -> Result<()> {
    if dims.len() < 2 || dims.factors().iter().any(|&d| d < 2) {
        return Err(Error::InvalidArgument(format!(
            "need at least two factors of dimension >= 2, got {dims}"
        )));
    }
    Ok(())
}

/// Maximally entangled state of rank `min(d_A, d_B)` across `partition`,
/// pairing the `j`-th basis vector of each block.
pub fn max_entangled_across(dims: &DimsSpec, partition: &PartitionSpec) -> Result<PureState> {
    partition.check_dims(dims)?;
    let first = DimsSpec::new(partition.first().iter().map(|&k| dims.factors()[k]).collect())?;
    let second = DimsSpec::new(partition.second().iter().map(|&k| dims.factors()[k]).collect())?;
    let rank = first.total().min(second.total());
    let s = 1.0 / (rank as f64).sqrt();
    let mut amplitudes = vec![C64::default(); dims.total()];
    let mut digits = vec![0; dims.len()];
    for j in 0..rank {
        for (&k, v) in partition.first().iter().zip(first.digits(j)) {
            digits[k] = v;
        }
        for (&k, v) in partition.second().iter().zip(second.digits(j)) {
            digits[k] = v;
        }
        amplitudes[dims.index_of(&digits)] = c(s, 0.0);
    }
    PureState::new(amplitudes, dims.clone())
}

/// `½(|00⟩⟨00| + |11⟩⟨11|)`, the classically correlated two-qubit state.
pub fn theta_cc() -> DensityOperator {
    DensityOperator::new_unchecked(ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]), qubits(2))
}

/// `√q₀|00⟩ + √(1-q₀)|11⟩`.
pub fn schmidt_pure(q0: f64) -> Result<PureState> {
    check_range("q0", q0, 0.0, 1.0, "[0, 1]")?;
    let mut amplitudes = vec![C64::default(); 4];
    amplitudes[0] = c(q0.sqrt(), 0.0);
    amplitudes[3] = c((1.0 - q0).sqrt(), 0.0);
    PureState::normalized(amplitudes, qubits(2))
}

/// Schmidt form `Σ_k s_k |a_k⟩⊗|b_k⟩` of a pure state across a partition.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Descending `√q_k`; there are `min(d_A, d_B)` of them.
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<Vec<C64>>,
    pub right_basis: Vec<Vec<C64>>,
    pub partition: PartitionSpec,
    pub dims: DimsSpec,
}

impl SchmidtDecomposition {
    /// `q_k = s_k²`.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|s| s * s).collect()
    }

    /// Reassembles the amplitude vector in the original factor order.
    pub fn reconstruct(&self) -> Vec<C64> {
        let (first, second) = block_dims(&self.dims, &self.partition);
        let mut out = vec![C64::default(); self.dims.total()];
        for (k, &s) in self.coefficients.iter().enumerate() {
            for (a, &u) in self.left_basis[k].iter().enumerate() {
                for (b, &v) in self.right_basis[k].iter().enumerate() {
                    let idx = composite_index(&self.dims, &self.partition, &first, &second, a, b);
                    out[idx] += u * v * s;
                }
            }
        }
        out
    }
}

fn block_dims(dims: &DimsSpec, partition: &PartitionSpec) -> (DimsSpec, DimsSpec) {
    let pick = |b: &[usize]| DimsSpec::new(b.iter().map(|&k| dims.factors()[k]).collect()).expect("nonempty block");
    (pick(partition.first()), pick(partition.second()))
}

fn composite_index(
    dims: &DimsSpec,
    partition: &PartitionSpec,
    first: &DimsSpec,
    second: &DimsSpec,
    a: usize,
    b: usize,
) -> usize {
    let mut digits = vec![0; dims.len()];
    for (&k, v) in partition.first().iter().zip(first.digits(a)) {
        digits[k] = v;
    }
    for (&k, v) in partition.second().iter().zip(second.digits(b)) {
        digits[k] = v;
    }
    dims.index_of(&digits)
}

/// Schmidt decomposition via the SVD of the coefficient matrix
/// `C[a, b] = ⟨a ⊗ b|ψ⟩` reshaped by the partition.
pub fn schmidt(psi: &PureState, partition: &PartitionSpec) -> Result<SchmidtDecomposition> {
    partition.check_dims(psi.dims())?;
    let dims = psi.dims();
    let (first, second) = block_dims(dims, partition);
    let (rows, cols) = (first.total(), second.total());
    let coeff = DMatrix::from_fn(rows, cols, |a, b| {
        psi.amplitudes()[composite_index(dims, partition, &first, &second, a, b)]
    });
    let svd = coeff.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    // Stable sort keeps first-occurrence order among ties.
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    Ok(SchmidtDecomposition {
        coefficients: order.iter().map(|&k| svd.singular_values[k]).collect(),
        left_basis: order.iter().map(|&k| u.column(k).iter().copied().collect()).collect(),
        right_basis: order.iter().map(|&k| v_t.row(k).iter().copied().collect()).collect(),
        partition: partition.clone(),
        dims: dims.clone(),
    })
}

/// Haar-random pure state drawn from `rng`.
pub fn haar_pure_from_rng<R: Rng + ?Sized>(dims: &DimsSpec, rng: &mut R) -> PureState {
    loop {
        let amplitudes: Vec<C64> = (0..dims.total())
            .map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        if let Ok(psi) = PureState::normalized(amplitudes, dims.clone()) {
            return psi;
        }
    }
}

/// Haar-random pure state, deterministic in `seed`.
pub fn haar_pure(dims: &DimsSpec, seed: u64) -> PureState {
    haar_pure_from_rng(dims, &mut rng_from_seed(seed))
}

/// Mixture of `rank` Haar states with flat-Dirichlet weights.
pub fn random_density_from_rng<R: Rng + ?Sized>(dims: &DimsSpec, rank: usize, rng: &mut R) -> Result<DensityOperator> {
    if rank == 0 || rank > dims.total() {
        return Err(Error::InvalidArgument(format!(
            "rank must be in 1..={}, got {rank}",
            dims.total()
        )));
    }
    let weights: Vec<f64> = (0..rank).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = weights.iter().sum();
    let mut matrix = ComplexMatrix::zeros(dims.total());
    for w in weights {
        let psi = haar_pure_from_rng(dims, rng);
        matrix = matrix + psi.projector().scale(w / total);
    }
    Ok(DensityOperator::new_unchecked(matrix, dims.clone()))
}

pub fn random_density(dims: &DimsSpec, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_density_from_rng(dims, rank, &mut rng_from_seed(seed))
}
