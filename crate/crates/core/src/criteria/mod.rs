//! Separability verdicts built on the positive-partial-transpose test, the
//! closed-form spectra of the local depolarizing family, threshold search,
//! and randomized falsification of entanglement annihilation.
//!
//! A negative partial-transpose eigenvalue always certifies entanglement.
//! A nonnegative spectrum certifies separability only for `2⊗2` and `2⊗3`
//! blocks; anywhere else the verdict is [`Status::Inconclusive`].

use std::fmt;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::linalg::{self, DimsSpec};
use crate::states::DensityOperator;

mod depolarizing;
mod falsify;
mod heuristic;
mod threshold;

pub use crate::linalg::PartitionSpec;
pub use depolarizing::{
    ghz_three_lea_min_eig, ghz_three_lea_output, three_lea_ppt_verdict_depolarizing, two_lea_depolarizing_mu,
    two_lea_min_mu, two_lea_output, two_lea_verdict_depolarizing, TwoLeaSpectrum,
};
pub use falsify::{
    ea_falsify, k_lea_falsify, lift_counterexample, Counterexample, FalsifierReport, FalsifyOptions,
    LiftedCounterexample,
};
pub use heuristic::{two_lea_heuristic, HeuristicTwoLea, DEFAULT_RESTARTS};
pub use threshold::{
    bisect_threshold, separable_mixing_threshold, sub_threshold_ea_channel, ThresholdResult, DEFAULT_BISECTION_TOL,
    MAX_BISECTION_ITERATIONS,
};

/// Partial-transpose eigenvalues above `-VERDICT_TOL` count as nonnegative.
pub const VERDICT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Status {
    Entangled,
    SeparableCertified,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Entangled => "Entangled",
            Status::SeparableCertified => "SeparableCertified",
            Status::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SeparabilityVerdict {
    pub status: Status,
    /// Smallest partial-transpose eigenvalue.
    pub witness_min_eig: f64,
    pub partition: PartitionSpec,
}

/// Whether PPT is sufficient for separability on blocks of these sizes.
pub fn ppt_is_exact(block_dims: (usize, usize)) -> bool {
    matches!(block_dims, (2, 2) | (2, 3) | (3, 2))
}

fn partial_transpose_over(rho: &DensityOperator, part: &PartitionSpec) -> Result<linalg::ComplexMatrix> {
    part.check_dims(rho.dims())?;
    linalg::partial_transpose(rho.matrix(), rho.dims(), part.second())
}

/// Smallest eigenvalue of the partial transpose over the second block.
pub fn ppt_min_eigenvalue(rho: &DensityOperator, part: &PartitionSpec) -> Result<f64> {
    linalg::min_eigenvalue(&partial_transpose_over(rho, part)?)
}

pub fn ppt_verdict(rho: &DensityOperator, part: &PartitionSpec, tol: f64) -> Result<SeparabilityVerdict> {
    let min = ppt_min_eigenvalue(rho, part)?;
    Ok(verdict_from_min_eig(
        min,
        part.clone(),
        part.block_dims(rho.dims()),
        tol,
    ))
}

/// Verdict for a known partial-transpose minimum on blocks of the given sizes.
pub fn verdict_from_min_eig(
    min: f64,
    partition: PartitionSpec,
    block_dims: (usize, usize),
    tol: f64,
) -> SeparabilityVerdict {
    let status = if min < -tol {
        Status::Entangled
    } else if ppt_is_exact(block_dims) {
        Status::SeparableCertified
    } else {
        Status::Inconclusive
    };
    SeparabilityVerdict {
        status,
        witness_min_eig: min,
        partition,
    }
}

/// Sum of the magnitudes of the negative partial-transpose eigenvalues.
pub fn negativity(rho: &DensityOperator, part: &PartitionSpec) -> Result<f64> {
    let values = linalg::hermitian_eigenvalues(&partial_transpose_over(rho, part)?)?;
    Ok(values.iter().filter(|&&v| v < 0.0).map(|v| -v).sum())
}

/// Entanglement-breaking test: PPT verdict on the Choi operator across the
/// output|input cut. Exact for qubit-to-qubit and qubit-to-qutrit channels.
pub fn is_eb(e: &Channel, tol: f64) -> SeparabilityVerdict {
    let omega = e.choi();
    ppt_verdict(&omega, &PartitionSpec::bipartite(), tol).expect("Choi operator is bipartite")
}

/// Checks a state lives on two-qubit dims.
pub(crate) fn require_two_qubits(rho: &DensityOperator, what: &str) -> Result<()> {
    if rho.dims() != &DimsSpec::new(vec![2, 2])? {
        return Err(Error::Unsupported(format!(
            "{what} needs a two-qubit state (dims [2,2]), got {}",
            rho.dims()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing, measure_prepare_channel, MeasurePrepare};
    use crate::states::{ghz, max_entangled, random_density, theta_cc, werner, DensityOperator};

    #[test]
    fn product_states_are_ppt() {
        let a = random_density(&DimsSpec::new(vec![2]).unwrap(), 2, 1).unwrap();
        let b = random_density(&DimsSpec::new(vec![3]).unwrap(), 3, 2).unwrap();
        let ab = a.tensor(&b);
        let part = PartitionSpec::bipartite();
        assert!(ppt_min_eigenvalue(&ab, &part).unwrap() >= -1e-10);
        let v = ppt_verdict(&ab, &part, VERDICT_TOL).unwrap();
        assert_eq!(v.status, Status::SeparableCertified);
        assert_eq!(negativity(&ab, &part).unwrap(), 0.0);
    }

    #[test]
    fn bell_state_witness() {
        let p = max_entangled(2).unwrap().density();
        let part = PartitionSpec::bipartite();
        assert!((ppt_min_eigenvalue(&p, &part).unwrap() + 0.5).abs() < 1e-14);
        assert!((negativity(&p, &part).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(ppt_verdict(&p, &part, VERDICT_TOL).unwrap().status, Status::Entangled);
    }

    #[test]
    fn theta_is_certified_separable() {
        let v = ppt_verdict(&theta_cc(), &PartitionSpec::bipartite(), VERDICT_TOL).unwrap();
        assert_eq!(v.status, Status::SeparableCertified);
    }

    #[test]
    fn werner_negativity_closed_form() {
        // PT of the qubit Werner state has spectrum {(1-3λ)/4, (1+λ)/4 ×3}.
        for k in 0..=20 {
            let lambda = k as f64 / 20.0;
            let w = werner(lambda, 2).unwrap();
            let n = negativity(&w, &PartitionSpec::bipartite()).unwrap();
            assert!(
                (n - f64::max(0.0, (3.0 * lambda - 1.0) / 4.0)).abs() < 1e-14,
                "λ={lambda}"
            );
        }
    }

    #[test]
    fn invalid_partitions_are_rejected() {
        let rho = ghz(3).unwrap().density();
        assert!(matches!(
            ppt_min_eigenvalue(&rho, &PartitionSpec::bipartite()),
            Err(Error::InvalidPartition(_))
        ));
        assert!(negativity(&rho, &PartitionSpec::bipartite()).is_err());
    }

    #[test]
    fn larger_blocks_are_inconclusive_when_ppt() {
        let rho = DensityOperator::maximally_mixed(DimsSpec::new(vec![2, 2, 2]).unwrap());
        let part = PartitionSpec::split_off(vec![0], 3).unwrap();
        assert_eq!(
            ppt_verdict(&rho, &part, VERDICT_TOL).unwrap().status,
            Status::Inconclusive
        );
        let rho = DensityOperator::maximally_mixed(DimsSpec::new(vec![2, 3]).unwrap());
        assert_eq!(
            ppt_verdict(&rho, &PartitionSpec::bipartite(), VERDICT_TOL)
                .unwrap()
                .status,
            Status::SeparableCertified
        );
    }

    #[test]
    fn eb_verdicts_for_depolarizing() {
        let boundary = is_eb(&depolarizing(1.0 / 3.0, 2).unwrap(), VERDICT_TOL);
        assert_eq!(boundary.status, Status::SeparableCertified);
        assert!(boundary.witness_min_eig.abs() < 1e-14);
        assert_eq!(
            is_eb(&depolarizing(0.5, 2).unwrap(), VERDICT_TOL).status,
            Status::Entangled
        );
    }

    #[test]
    fn measure_prepare_is_eb() {
        let q = DimsSpec::new(vec![2]).unwrap();
        let p0 = linalg::ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let p1 = linalg::ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        let mp = MeasurePrepare::new(
            vec![p0, p1],
            vec![random_density(&q, 2, 3).unwrap(), random_density(&q, 1, 4).unwrap()],
        )
        .unwrap();
        let e = measure_prepare_channel(&mp).unwrap();
        assert_eq!(is_eb(&e, VERDICT_TOL).status, Status::SeparableCertified);
    }

    #[test]
    fn status_strings() {
        assert_eq!(Status::SeparableCertified.to_string(), "SeparableCertified");
        assert_eq!(Status::Entangled.to_string(), "Entangled");
        assert_eq!(Status::Inconclusive.to_string(), "Inconclusive");
    }
}
