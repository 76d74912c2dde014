//! Closed-form partial-transpose spectra for local qubit depolarizing noise.
//!
//! Local depolarizing channels commute with local unitaries, so for two
//! qubits it suffices to look at Schmidt-form inputs `√q₀|00⟩ + √q₁|11⟩`.
//! The output is an X-state whose partial transpose has eigenvalues
//!
//! ```text
//! μ₁ = (1-λ)²/4 + λq₀        μ₂ = (1-λ)²/4 + λq₁
//! μ± = (1 - λ² ± 4λ²√(q₀q₁)) / 4
//! ```
//!
//! and only `μ₋` can go negative. It is smallest at `q₀ = q₁ = ½`, where it
//! equals `(1 - 3λ²)/4`. For three qubits fed a GHZ state the cut `0|12`
//! exposes the single possibly-negative eigenvalue `((1-λ²)/4 - λ³)/2`.

use crate::channels::{depolarizing, Channel};
use crate::error::{check_range, Result};
use crate::linalg::PartitionSpec;
use crate::states::{ghz, schmidt_pure, DensityOperator};

use super::{ppt_verdict, verdict_from_min_eig, SeparabilityVerdict, VERDICT_TOL};

/// Partial-transpose spectrum of `(E_λ⊗E_λ)[|ψ⟩⟨ψ|]` for a Schmidt-form `ψ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLeaSpectrum {
    pub mu1: f64,
    pub mu2: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
}

impl TwoLeaSpectrum {
    pub fn sorted(&self) -> [f64; 4] {
        let mut v = [self.mu1, self.mu2, self.mu_plus, self.mu_minus];
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min(&self) -> f64 {
        self.sorted()[0]
    }
}

pub fn two_lea_depolarizing_mu(lambda: f64, q0: f64) -> Result<TwoLeaSpectrum> {
    check_range("lambda", lambda, 0.0, 1.0, "[0, 1]")?;
    check_range("q0", q0, 0.0, 1.0, "[0, 1]")?;
    let q1 = 1.0 - q0;
    let base = (1.0 - lambda).powi(2) / 4.0;
    let coherence = 4.0 * lambda * lambda * (q0 * q1).sqrt();
    Ok(TwoLeaSpectrum {
        mu1: base + lambda * q0,
        mu2: base + lambda * q1,
        mu_plus: (1.0 - lambda * lambda + coherence) / 4.0,
        mu_minus: (1.0 - lambda * lambda - coherence) / 4.0,
    })
}

/// `min_{q₀} μ₋(λ, q₀) = (1 - 3λ²)/4`, attained at `q₀ = ½`.
pub fn two_lea_min_mu(lambda: f64) -> Result<f64> {
    Ok(two_lea_depolarizing_mu(lambda, 0.5)?.mu_minus)
}

/// Smallest eigenvalue of `(E_λ^{⊗3})[GHZ]` partially transposed across `0|12`.
pub fn ghz_three_lea_min_eig(lambda: f64) -> Result<f64> {
    check_range("lambda", lambda, 0.0, 1.0, "[0, 1]")?;
    Ok(0.5 * (0.25 * (1.0 - lambda * lambda) - lambda.powi(3)))
}

/// Verdict on 2-local entanglement annihilation by the qubit depolarizing
/// channel. Exact: the worst input is the Bell state and outputs are `2⊗2`.
pub fn two_lea_verdict_depolarizing(lambda: f64) -> Result<SeparabilityVerdict> {
    let min = two_lea_min_mu(lambda)?;
    Ok(verdict_from_min_eig(
        min,
        PartitionSpec::bipartite(),
        (2, 2),
        VERDICT_TOL,
    ))
}

/// `(E_λ⊗E_λ)[|ψ⟩⟨ψ|]` with `ψ = √q₀|00⟩ + √(1-q₀)|11⟩`, built numerically.
pub fn two_lea_output(lambda: f64, q0: f64) -> Result<DensityOperator> {
    let e2 = local(lambda, 2)?;
    e2.apply_pure(&schmidt_pure(q0)?)
}

/// `(E_λ^{⊗3})[|GHZ⟩⟨GHZ|]`, built numerically.
pub fn ghz_three_lea_output(lambda: f64) -> Result<DensityOperator> {
    let e3 = local(lambda, 3)?;
    e3.apply_pure(&ghz(3)?)
}

/// Numerical PPT verdict on the GHZ output across `0|12`. Never
/// `SeparableCertified`: the blocks are `2⊗4`.
pub fn three_lea_ppt_verdict_depolarizing(lambda: f64) -> Result<SeparabilityVerdict> {
    let out = ghz_three_lea_output(lambda)?;
    ppt_verdict(&out, &PartitionSpec::split_off(vec![0], 3)?, VERDICT_TOL)
}

fn local(lambda: f64, k: usize) -> Result<Channel> {
    depolarizing(lambda, 2)?.tensor_power(k)
}
