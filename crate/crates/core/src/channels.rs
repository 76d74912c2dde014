//! Completely positive trace-preserving maps in Kraus or Choi form.
//!
//! The Choi operator uses the unit-trace convention `Ω = (E ⊗ I)[P₊]` with
//! factor order `[output, input]`, so that the Choi operator of the qubit
//! depolarizing channel is literally the Werner state of the same parameter.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{check_range, Error, Result};
use crate::linalg::{self, c, ComplexMatrix, DimsSpec, C64};
use crate::states::{self, DensityOperator, PureState};

/// Tolerance on `Σ K†K = I` and on positivity of the Choi operator.
pub const CHANNEL_TOL: f64 = 1e-10;
/// Choi eigenvalues below this are dropped when extracting Kraus operators.
pub const KRAUS_CUTOFF: f64 = 1e-12;

/// A Kraus operator, `out_dim × in_dim`.
pub type KrausOperator = DMatrix<C64>;

#[derive(Clone, Debug)]
pub enum Representation {
    Kraus(Vec<KrausOperator>),
    Choi(DensityOperator),
}

/// A quantum channel from `in_dims` to `out_dims`.
#[derive(Clone, Debug)]
pub struct Channel {
    in_dims: DimsSpec,
    out_dims: DimsSpec,
    repr: Representation,
}

impl Channel {
    /// Single-factor channel from a Kraus set; checks shapes and trace
    /// preservation.
    pub fn from_kraus(ops: Vec<KrausOperator>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::NotAChannel("empty Kraus set".into()))?;
        let (out_dim, in_dim) = first.shape();
        Self::from_kraus_with_dims(ops, DimsSpec::new(vec![in_dim])?, DimsSpec::new(vec![out_dim])?)
    }

    pub fn from_kraus_with_dims(ops: Vec<KrausOperator>, in_dims: DimsSpec, out_dims: DimsSpec) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::NotAChannel("empty Kraus set".into()));
        }
        let shape = (out_dims.total(), in_dims.total());
        if let Some(bad) = ops.iter().find(|k| k.shape() != shape) {
            return Err(Error::NotAChannel(format!(
                "Kraus operator has shape {:?}, expected {:?}",
                bad.shape(),
                shape
            )));
        }
        let channel = Self {
            in_dims,
            out_dims,
            repr: Representation::Kraus(ops),
        };
        let tp = channel.trace_preservation_error();
        if tp.is_nan() || tp > CHANNEL_TOL {
            return Err(Error::NotAChannel(format!(
                "trace preservation violated: max |sum K^dag K - I| = {tp:e}"
            )));
        }
        Ok(channel)
    }

    /// Channel held in Choi form. `omega` must live on `[out_dim, in_dim]`.
    pub fn from_choi(omega: DensityOperator) -> Result<Self> {
        let factors = omega.dims().factors();
        if factors.len() != 2 {
            return Err(Error::NotAChannel(format!(
                "Choi operator needs dims [out, in], got {}",
                omega.dims()
            )));
        }
        let (out_dim, in_dim) = (factors[0], factors[1]);
        Self::from_choi_with_dims(
            omega.into_matrix(),
            DimsSpec::new(vec![in_dim])?,
            DimsSpec::new(vec![out_dim])?,
        )
    }

    fn from_choi_with_dims(omega: ComplexMatrix, in_dims: DimsSpec, out_dims: DimsSpec) -> Result<Self> {
        let (in_dim, out_dim) = (in_dims.total(), out_dims.total());
        let choi_dims = DimsSpec::new(vec![out_dim, in_dim])?;
        choi_dims.check_matrix(&omega)?;
        let deviation = omega.hermitian_deviation();
        if deviation > CHANNEL_TOL {
            return Err(Error::NotAChannel(format!(
                "Choi operator is not Hermitian (max |m - m^dag| = {deviation:e})"
            )));
        }
        let marginal = linalg::partial_trace(&omega, &choi_dims, &[1])?;
        let tp = marginal.max_abs_diff(&ComplexMatrix::identity(in_dim).scale(1.0 / in_dim as f64));
        if tp > CHANNEL_TOL {
            return Err(Error::NotAChannel(format!(
                "trace preservation violated: max |tr_out(Choi) - I/d| = {tp:e}"
            )));
        }
        let min = linalg::min_eigenvalue(&omega)?;
        if min < -CHANNEL_TOL {
            return Err(Error::NotAChannel(format!(
                "complete positivity violated: Choi operator has eigenvalue {min:e}"
            )));
        }
        Ok(Self {
            in_dims,
            out_dims,
            repr: Representation::Choi(DensityOperator::new_unchecked(omega, choi_dims)),
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::unitary(&ComplexMatrix::identity(d)).expect("identity is unitary")
    }

    /// `X ↦ U X U†`.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        Self::from_kraus(vec![u.as_dmatrix().clone()])
    }

    /// Contraction of the whole state space to `I/d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        let target = DensityOperator::maximally_mixed(DimsSpec::new(vec![d]).expect("d >= 1"));
        Self::constant(d, &target)
    }

    /// `X ↦ tr(X)·ω`.
    pub fn constant(in_dim: usize, omega: &DensityOperator) -> Self {
        let mp = MeasurePrepare {
            povm: vec![ComplexMatrix::identity(in_dim)],
            prepares: vec![omega.clone()],
        };
        measure_prepare_channel(&mp).expect("single-outcome POVM is valid")
    }

    pub fn in_dim(&self) -> usize {
        self.in_dims.total()
    }

    pub fn out_dim(&self) -> usize {
        self.out_dims.total()
    }

    pub fn in_dims(&self) -> &DimsSpec {
        &self.in_dims
    }

    pub fn out_dims(&self) -> &DimsSpec {
        &self.out_dims
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    /// Reinterprets the factor structure without touching the map.
    pub fn with_dims(mut self, in_dims: DimsSpec, out_dims: DimsSpec) -> Result<Self> {
        if in_dims.total() != self.in_dim() || out_dims.total() != self.out_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim(),
                found: in_dims.total(),
            });
        }
        self.in_dims = in_dims;
        self.out_dims = out_dims;
        Ok(self)
    }

    /// Kraus operators, extracted from the Choi operator if needed.
    pub fn kraus(&self) -> Vec<KrausOperator> {
        match &self.repr {
            Representation::Kraus(ops) => ops.clone(),
            Representation::Choi(omega) => kraus_from_choi_matrix(omega.matrix(), self.in_dim(), self.out_dim())
                .expect("validated Choi operator is Hermitian"),
        }
    }

    /// `(E ⊗ I)[P₊]` on `[out_dim, in_dim]`.
    pub fn choi(&self) -> DensityOperator {
        match &self.repr {
            Representation::Choi(omega) => omega.clone(),
            Representation::Kraus(ops) => choi_from_kraus_ops(ops, self.in_dim(), self.out_dim()),
        }
    }

    /// `max |Σ K†K - I|`, or the Choi marginal deviation in Choi form.
    pub fn trace_preservation_error(&self) -> f64 {
        match &self.repr {
            Representation::Kraus(ops) => {
                let n = self.in_dim();
                let sum = ops.iter().fold(DMatrix::zeros(n, n), |acc, k| acc + k.adjoint() * k);
                (sum - DMatrix::<C64>::identity(n, n))
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max)
            }
            Representation::Choi(omega) => {
                let marginal = linalg::partial_trace(omega.matrix(), omega.dims(), &[1]).expect("Choi dims");
                let n = self.in_dim();
                marginal.max_abs_diff(&ComplexMatrix::identity(n).scale(1.0 / n as f64))
            }
        }
    }

    /// Applies the channel to an operator of matching dimension.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.in_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim(),
                found: x.dim(),
            });
        }
        let x = x.as_dmatrix();
        let out = match &self.repr {
            Representation::Kraus(ops) => {
                let m = self.out_dim();
                ops.iter()
                    .fold(DMatrix::zeros(m, m), |acc, k| acc + k * x * k.adjoint())
            }
            Representation::Choi(omega) => {
                // E(X)[a, b] = d Σ_ij X[i, j] Ω[(a, i), (b, j)]
                let (n, m) = (self.in_dim(), self.out_dim());
                let w = omega.matrix();
                DMatrix::from_fn(m, m, |a, b| {
                    let mut acc = C64::default();
                    for i in 0..n {
                        for j in 0..n {
                            acc += x[(i, j)] * w[(a * n + i, b * n + j)];
                        }
                    }
                    acc * n as f64
                })
            }
        };
        ComplexMatrix::new(out)
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let out = self.apply_matrix(rho.matrix())?;
        let dims = if rho.dims().total() == self.out_dim() && self.in_dims == self.out_dims {
            rho.dims().clone()
        } else {
            self.out_dims.clone()
        };
        Ok(DensityOperator::new_unchecked(out, dims))
    }

    pub fn apply_pure(&self, psi: &PureState) -> Result<DensityOperator> {
        self.apply(&psi.density())
    }

    /// `self ⊗ other`; factor lists are concatenated.
    pub fn tensor(&self, other: &Channel) -> Channel {
        let (ka, kb) = (self.kraus(), other.kraus());
        let ops = ka.iter().flat_map(|a| kb.iter().map(move |b| a.kronecker(b))).collect();
        Channel {
            in_dims: concat_dims(&self.in_dims, &other.in_dims),
            out_dims: concat_dims(&self.out_dims, &other.out_dims),
            repr: Representation::Kraus(ops),
        }
    }

    /// `self^{⊗k}`; `k = 0` is rejected.
    pub fn tensor_power(&self, k: usize) -> Result<Channel> {
        if k == 0 {
            return Err(Error::InvalidArgument("tensor power needs k >= 1".into()));
        }
        let mut out = self.clone();
        for _ in 1..k {
            out = out.tensor(self);
        }
        Ok(out)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Channel) -> Result<Channel> {
        if inner.out_dim() != self.in_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim(),
                found: inner.out_dim(),
            });
        }
        let (outer_ops, inner_ops) = (self.kraus(), inner.kraus());
        let ops = outer_ops
            .iter()
            .flat_map(|a| inner_ops.iter().map(move |b| a * b))
            .collect();
        Ok(Channel {
            in_dims: inner.in_dims.clone(),
            out_dims: self.out_dims.clone(),
            repr: Representation::Kraus(ops),
        })
    }

    /// Convex mixture `p·self + (1-p)·other`, formed on Choi operators.
    pub fn mix(&self, other: &Channel, p: f64) -> Result<Channel> {
        check_range("p", p, 0.0, 1.0, "[0, 1]")?;
        if self.in_dim() != other.in_dim() || self.out_dim() != other.out_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim() * self.out_dim(),
                found: other.in_dim() * other.out_dim(),
            });
        }
        let omega = self.choi().mix(&other.choi(), p)?;
        Ok(Channel {
            in_dims: self.in_dims.clone(),
            out_dims: self.out_dims.clone(),
            repr: Representation::Choi(omega),
        })
    }

    /// Largest entrywise difference between the Choi operators of two
    /// channels; zero exactly when they act identically.
    pub fn distance(&self, other: &Channel) -> f64 {
        let (a, b) = (self.choi(), other.choi());
        if a.dim() != b.dim() {
            return f64::INFINITY;
        }
        a.matrix().max_abs_diff(b.matrix())
    }
}

fn concat_dims(a: &DimsSpec, b: &DimsSpec) -> DimsSpec {
    let mut f = a.factors().to_vec();
    f.extend_from_slice(b.factors());
    DimsSpec::new(f).expect("concatenated dims are valid")
}

fn choi_from_kraus_ops(ops: &[KrausOperator], in_dim: usize, out_dim: usize) -> DensityOperator {
    let n = in_dim * out_dim;
    let mut omega = ComplexMatrix::zeros(n);
    for k in ops {
        // (K ⊗ I)|Φ⟩ has component K[a, i] at index (a, i).
        let v: Vec<C64> = (0..n).map(|idx| k[(idx / in_dim, idx % in_dim)]).collect();
        omega = omega + ComplexMatrix::outer(&v);
    }
    DensityOperator::new_unchecked(
        omega.scale(1.0 / in_dim as f64),
        DimsSpec::new(vec![out_dim, in_dim]).expect("positive dims"),
    )
}

fn kraus_from_choi_matrix(omega: &ComplexMatrix, in_dim: usize, out_dim: usize) -> Result<Vec<KrausOperator>> {
    let eig = linalg::hermitian_eigen(omega)?;
    let ops: Vec<KrausOperator> = eig
        .values
        .iter()
        .zip(&eig.vectors)
        .filter(|(&mu, _)| mu > KRAUS_CUTOFF)
        .map(|(&mu, v)| {
            let s = (mu * in_dim as f64).sqrt();
            DMatrix::from_fn(out_dim, in_dim, |a, i| v[a * in_dim + i] * s)
        })
        .collect();
    if ops.is_empty() {
        return Err(Error::NotAChannel(
            "Choi operator has no eigenvalue above the cutoff".into(),
        ));
    }
    Ok(ops)
}

/// Qubit or qudit depolarizing channel `X ↦ λX + (1-λ) tr(X) I/d`, for
/// `λ ∈ [0, 1]`.
pub fn depolarizing(lambda: f64, d: usize) -> Result<Channel> {
    check_range("lambda", lambda, 0.0, 1.0, "[0, 1]")?;
    depolarizing_kraus(lambda, d)
}

/// Depolarizing channel over the full completely positive range
/// `-1/(d²-1) ≤ λ ≤ 1`.
pub fn depolarizing_extended(lambda: f64, d: usize) -> Result<Channel> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("depolarizing needs d >= 2, got {d}")));
    }
    let lower = -1.0 / ((d * d - 1) as f64);
    check_range("lambda", lambda, lower, 1.0, "[-1/(d^2-1), 1]")?;
    depolarizing_kraus(lambda, d)
}

fn depolarizing_kraus(lambda: f64, d: usize) -> Result<Channel> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("depolarizing needs d >= 2, got {d}")));
    }
    // Σ_{a,b} W_ab X W_ab† = d tr(X) I over the d² Weyl operators W_ab = X^a Z^b.
    let d2 = (d * d) as f64;
    let identity_weight = (lambda + (1.0 - lambda) / d2).max(0.0);
    let other_weight = ((1.0 - lambda) / d2).max(0.0);
    let mut ops = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let w = if a == 0 && b == 0 {
                identity_weight
            } else {
                other_weight
            };
            if w > 0.0 {
                ops.push(weyl(d, a, b) * c(w.sqrt(), 0.0));
            }
        }
    }
    Channel::from_kraus(ops)
}

/// `X^a Z^b` with `X|j⟩ = |j+1⟩` and `Z|j⟩ = e^{2πij/d}|j⟩`.
fn weyl(d: usize, a: usize, b: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        let phase = 2.0 * std::f64::consts::PI * (b * j) as f64 / d as f64;
        m[((j + a) % d, j)] = C64::from_polar(1.0, phase);
    }
    m
}

/// A measure-and-prepare specification: POVM elements `F_j` and the states
/// `ϱ_j` prepared on each outcome.
#[derive(Clone, Debug)]
pub struct MeasurePrepare {
    pub povm: Vec<ComplexMatrix>,
    pub prepares: Vec<DensityOperator>,
}

impl MeasurePrepare {
    pub fn new(povm: Vec<ComplexMatrix>, prepares: Vec<DensityOperator>) -> Result<Self> {
        let mp = Self { povm, prepares };
        mp.validate()?;
        Ok(mp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.povm.is_empty() {
            return Err(Error::NotAChannel("POVM is empty".into()));
        }
        if self.povm.len() != self.prepares.len() {
            return Err(Error::NotAChannel(format!(
                "{} POVM elements but {} prepared states",
                self.povm.len(),
                self.prepares.len()
            )));
        }
        let in_dim = self.povm[0].dim();
        let out_dims = self.prepares[0].dims();
        let mut sum = ComplexMatrix::zeros(in_dim);
        for (j, (f, rho)) in self.povm.iter().zip(&self.prepares).enumerate() {
            if f.dim() != in_dim {
                return Err(Error::NotAChannel(format!(
                    "POVM element {j} has dim {}, expected {in_dim}",
                    f.dim()
                )));
            }
            if rho.dims().total() != out_dims.total() {
                return Err(Error::NotAChannel(format!(
                    "prepared state {j} has a different dimension"
                )));
            }
            let min = linalg::min_eigenvalue(f)
                .map_err(|_| Error::NotAChannel(format!("POVM element {j} is not Hermitian")))?;
            if min < -CHANNEL_TOL {
                return Err(Error::NotAChannel(format!(
                    "POVM element {j} is not positive (eigenvalue {min:e})"
                )));
            }
            sum = sum + f.clone();
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(in_dim));
        if dev > CHANNEL_TOL {
            return Err(Error::NotAChannel(format!(
                "POVM does not sum to identity (max deviation {dev:e})"
            )));
        }
        Ok(())
    }
}

/// `X ↦ Σ_j tr(X F_j) ϱ_j`, stored in Choi form `Ω = (1/d) Σ_j ϱ_j ⊗ F_jᵀ`.
pub fn measure_prepare_channel(mp: &MeasurePrepare) -> Result<Channel> {
    mp.validate()?;
    let in_dim = mp.povm[0].dim();
    let out_dims = mp.prepares[0].dims().clone();
    let out_dim = out_dims.total();
    let mut omega = ComplexMatrix::zeros(in_dim * out_dim);
    for (f, rho) in mp.povm.iter().zip(&mp.prepares) {
        omega = omega + rho.matrix().kron(&f.transpose());
    }
    let channel = Channel::from_choi_with_dims(
        omega.scale(1.0 / in_dim as f64),
        DimsSpec::new(vec![in_dim])?,
        DimsSpec::new(vec![out_dim])?,
    )?;
    if out_dims.len() > 1 {
        let in_dims = DimsSpec::new(vec![in_dim])?;
        return channel.with_dims(in_dims, out_dims);
    }
    Ok(channel)
}

pub fn apply(e: &Channel, rho: &DensityOperator) -> Result<DensityOperator> {
    e.apply(rho)
}

pub fn tensor(a: &Channel, b: &Channel) -> Channel {
    a.tensor(b)
}

pub fn tensor_power(e: &Channel, k: usize) -> Result<Channel> {
    e.tensor_power(k)
}

/// `e ∘ f`.
pub fn compose(e: &Channel, f: &Channel) -> Result<Channel> {
    e.compose(f)
}

pub fn choi_of(e: &Channel) -> DensityOperator {
    e.choi()
}

/// Channel with Kraus operators read off the eigendecomposition of `omega`
/// (factor order `[out, in]`).
pub fn channel_from_choi(omega: &DensityOperator) -> Result<Channel> {
    let checked = Channel::from_choi(omega.clone())?;
    let ops = checked.kraus();
    Channel::from_kraus(ops)
}

pub fn kraus_from_choi(omega: &DensityOperator) -> Result<Vec<KrausOperator>> {
    Ok(channel_from_choi(omega)?.kraus())
}

pub fn choi_from_kraus(ops: &[KrausOperator]) -> Result<DensityOperator> {
    Ok(Channel::from_kraus(ops.to_vec())?.choi())
}

/// Random channel with `n_kraus` Kraus operators, read off a random
/// isometry `C^in → C^out ⊗ C^n_kraus` (QR of a complex Gaussian matrix).
pub fn random_channel_from_rng<R: Rng + ?Sized>(
    in_dim: usize,
    out_dim: usize,
    n_kraus: usize,
    rng: &mut R,
) -> Result<Channel> {
    if n_kraus == 0 || out_dim * n_kraus < in_dim {
        return Err(Error::InvalidArgument(format!(
            "need out_dim * n_kraus >= in_dim, got {out_dim} * {n_kraus} < {in_dim}"
        )));
    }
    use rand_distr::{Distribution, StandardNormal};
    let rows = out_dim * n_kraus;
    let g = DMatrix::from_fn(rows, in_dim, |_, _| {
        c(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let q = g.qr().q();
    let ops = (0..n_kraus)
        .map(|k| DMatrix::from_fn(out_dim, in_dim, |a, i| q[(k * out_dim + a, i)]))
        .collect();
    Channel::from_kraus(ops)
}

pub fn random_channel(in_dim: usize, out_dim: usize, n_kraus: usize, seed: u64) -> Result<Channel> {
    random_channel_from_rng(in_dim, out_dim, n_kraus, &mut states::rng_from_seed(seed))
}

/// Random measure-and-prepare channel: POVM `F_k = K_k†K_k` from a random
/// channel, prepared states drawn by `prepare`.
pub fn random_measure_prepare_from_rng<R: Rng + ?Sized>(
    in_dim: usize,
    outcomes: usize,
    rng: &mut R,
    mut prepare: impl FnMut(&mut R) -> DensityOperator,
) -> Result<MeasurePrepare> {
    let source = random_channel_from_rng(in_dim, in_dim, outcomes, rng)?;
    let povm = source
        .kraus()
        .iter()
        .map(|k| ComplexMatrix::new(k.adjoint() * k))
        .collect::<Result<Vec<_>>>()?;
    let prepares = (0..povm.len()).map(|_| prepare(rng)).collect();
    MeasurePrepare::new(povm, prepares)
}
