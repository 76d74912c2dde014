use crate::channels::{measure_prepare_channel, Channel, MeasurePrepare};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, PartitionSpec};
use crate::states::DensityOperator;

use super::{ppt_min_eigenvalue, require_two_qubits, VERDICT_TOL};

pub const DEFAULT_BISECTION_TOL: f64 = 1e-9;
pub const MAX_BISECTION_ITERATIONS: usize = 200;

/// A located critical parameter value.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ThresholdResult {
    /// Midpoint of the final bracket.
    pub critical_value: f64,
    pub bracket: [f64; 2],
    pub tol: f64,
    pub criterion_id: String,
    /// Criterion re-evaluated at the final bracket endpoints.
    pub endpoint_values: [f64; 2],
    pub iterations: usize,
    /// Set when the criterion never changes sign and the full bracket is
    /// returned instead (see [`separable_mixing_threshold`]).
    pub degenerate: bool,
}

impl ThresholdResult {
    pub fn width(&self) -> f64 {
        self.bracket[1] - self.bracket[0]
    }
}

/// Bisection on the sign class `criterion(x) >= 0`.
///
/// The endpoints must fall in different classes. The caller is responsible
/// for continuity and monotonicity inside the bracket; only the endpoints
/// are checked. Stops once the bracket is no wider than `tol`, after
/// [`MAX_BISECTION_ITERATIONS`], or when floating-point resolution is hit.
pub fn bisect_threshold(
    criterion_id: &str,
    criterion: impl Fn(f64) -> f64,
    bracket: [f64; 2],
    tol: f64,
) -> Result<ThresholdResult> {
    let [mut lo, mut hi] = bracket;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidArgument(format!("bad bracket [{lo}, {hi}]")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let eval = |x: f64| -> Result<f64> {
        let v = criterion(x);
        if v.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "criterion {criterion_id} is NaN at {x}"
            )));
        }
        Ok(v)
    };
    let (f_lo, f_hi) = (eval(lo)?, eval(hi)?);
    let lo_class = f_lo >= 0.0;
    if lo_class == (f_hi >= 0.0) {
        return Err(Error::SameSignBracket { lo, hi, f_lo, f_hi });
    }
    let mut iterations = 0;
    while hi - lo > tol && iterations < MAX_BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (eval(mid)? >= 0.0) == lo_class {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let endpoint_values = [eval(lo)?, eval(hi)?];
    Ok(ThresholdResult {
        critical_value: 0.5 * (lo + hi),
        bracket: [lo, hi],
        tol,
        criterion_id: criterion_id.to_string(),
        endpoint_values,
        iterations,
        degenerate: false,
    })
}

fn isotropic_mixture(omega: &DensityOperator, x: f64) -> DensityOperator {
    let mixed = DensityOperator::maximally_mixed(omega.dims().clone());
    omega.mix(&mixed, x).expect("x in [0, 1]")
}

/// Largest `x ∈ [0, 1]` for which `x·ω + (1-x)·I/4` is separable, for a
/// two-qubit `ω` (where PPT is exact). A PPT `ω` yields `κ = 1` flagged as
/// degenerate.
pub fn separable_mixing_threshold(omega: &DensityOperator, tol: f64) -> Result<ThresholdResult> {
    require_two_qubits(omega, "separable_mixing_threshold")?;
    let part = PartitionSpec::bipartite();
    let criterion = |x: f64| ppt_min_eigenvalue(&isotropic_mixture(omega, x), &part).expect("two-qubit state");
    let at_one = criterion(1.0);
    if at_one >= -VERDICT_TOL {
        return Ok(ThresholdResult {
            critical_value: 1.0,
            bracket: [0.0, 1.0],
            tol,
            criterion_id: "separable_mixing".into(),
            endpoint_values: [criterion(0.0), at_one],
            iterations: 0,
            degenerate: true,
        });
    }
    bisect_threshold("separable_mixing", criterion, [0.0, 1.0], tol)
}

/// The channel `ρ ↦ tr(ρF)·ω + tr(ρ(I-F))·I/4` on two qubits. Every output is
/// `x·ω + (1-x)·I/4` with `x = tr(ρF) < κ(ω)`, so it is separable; the map is
/// measure-and-prepare, so it also breaks entanglement with any ancilla.
///
/// Requires `F ≥ 0` with largest eigenvalue strictly below the lower end of
/// the bracket for `κ(ω)`, and `ω` entangled.
pub fn sub_threshold_ea_channel(f: &ComplexMatrix, omega: &DensityOperator) -> Result<Channel> {
    require_two_qubits(omega, "sub_threshold_ea_channel")?;
    if f.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: f.dim(),
        });
    }
    let kappa = separable_mixing_threshold(omega, DEFAULT_BISECTION_TOL)?;
    if kappa.degenerate {
        return Err(Error::Precondition("omega must be entangled".into()));
    }
    let eig = linalg::hermitian_eigenvalues(f)?;
    let (min, max) = (eig[0], eig[eig.len() - 1]);
    if min < -linalg::HERMITIAN_TOL {
        return Err(Error::Precondition(format!("F is not positive (eigenvalue {min:e})")));
    }
    if max >= kappa.bracket[0] {
        return Err(Error::Precondition(format!(
            "largest eigenvalue of F is {max}, must be below kappa = {}",
            kappa.critical_value
        )));
    }
    let rest = ComplexMatrix::identity(4) - f.clone();
    let mp = MeasurePrepare::new(
        vec![f.clone(), rest],
        vec![omega.clone(), DensityOperator::maximally_mixed(omega.dims().clone())],
    )?;
    measure_prepare_channel(&mp)
}

#[cfg(test)]
mod tests {
    use super::super::{is_eb, ppt_verdict, Status};
    use super::*;
    use crate::linalg::{c, DimsSpec};
    use crate::states::{max_entangled, random_density_from_rng, rng_from_seed, theta_cc, werner, PureState};

    #[test]
    fn bisection_finds_simple_root() {
        let r = bisect_threshold("sqrt2", |x| 2.0 - x * x, [0.0, 2.0], 1e-12).unwrap();
        assert!((r.critical_value - 2f64.sqrt()).abs() < 1e-12);
        assert!(r.width() <= 1e-12);
        assert!(r.endpoint_values[0] >= 0.0 && r.endpoint_values[1] < 0.0);
    }

    #[test]
    fn bisection_errors() {
        assert!(matches!(
            bisect_threshold("pos", |x| x + 1.0, [0.0, 1.0], 1e-9),
            Err(Error::SameSignBracket { .. })
        ));
        assert!(bisect_threshold("x", |x| x - 0.5, [1.0, 0.0], 1e-9).is_err());
        assert!(bisect_threshold("x", |x| x - 0.5, [0.0, 1.0], 0.0).is_err());
        assert!(bisect_threshold("nan", |_| f64::NAN, [0.0, 1.0], 1e-9).is_err());
    }

    #[test]
    fn bisection_stops_at_float_resolution() {
        let r = bisect_threshold("step", |x| if x < 0.3 { 1.0 } else { -1.0 }, [0.0, 1.0], 1e-300).unwrap();
        assert!(r.width() < 1e-15);
        assert!(r.iterations <= MAX_BISECTION_ITERATIONS);
    }

    #[test]
    fn werner_eb_threshold() {
        let crit = |l: f64| ppt_min_eigenvalue(&werner(l, 2).unwrap(), &PartitionSpec::bipartite()).unwrap();
        let r = bisect_threshold("werner", crit, [0.1, 0.6], 1e-9).unwrap();
        assert!((r.critical_value - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn kappa_values() {
        let p_plus = max_entangled(2).unwrap().density();
        let k = separable_mixing_threshold(&p_plus, 1e-10).unwrap();
        assert!((k.critical_value - 1.0 / 3.0).abs() < 1e-9);
        assert!(!k.degenerate);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let dims = DimsSpec::new(vec![2, 2]).unwrap();
        let singlet = PureState::new(vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)], dims).unwrap();
        let k = separable_mixing_threshold(&singlet.density(), 1e-10).unwrap();
        assert!((k.critical_value - 1.0 / 3.0).abs() < 1e-9);

        let k = separable_mixing_threshold(&theta_cc(), 1e-9).unwrap();
        assert!(k.degenerate);
        assert_eq!(k.critical_value, 1.0);

        let ghz = crate::states::ghz(3).unwrap().density();
        assert!(matches!(
            separable_mixing_threshold(&ghz, 1e-9),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn sub_threshold_zero_f_is_constant_map() {
        let p_plus = max_entangled(2).unwrap().density();
        let e = sub_threshold_ea_channel(&ComplexMatrix::zeros(4), &p_plus).unwrap();
        let mut rng = rng_from_seed(3);
        let rho = random_density_from_rng(&DimsSpec::new(vec![2, 2]).unwrap(), 4, &mut rng).unwrap();
        let out = e.apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)) < 1e-14);
    }

    #[test]
    fn sub_threshold_outputs_separable_and_channel_is_eb() {
        let p_plus = max_entangled(2).unwrap().density();
        let e = sub_threshold_ea_channel(&ComplexMatrix::identity(4).scale(0.3), &p_plus).unwrap();
        let dims = DimsSpec::new(vec![2, 2]).unwrap();
        let mut rng = rng_from_seed(99);
        for rank in [1, 1, 2, 4] {
            let rho = random_density_from_rng(&dims, rank, &mut rng).unwrap();
            let v = ppt_verdict(&e.apply(&rho).unwrap(), &PartitionSpec::bipartite(), VERDICT_TOL).unwrap();
            assert_eq!(v.status, Status::SeparableCertified);
        }
        // Choi operator on [4, 4]: PPT but the 4⊗4 blocks keep it inconclusive.
        assert_ne!(is_eb(&e, VERDICT_TOL).status, Status::Entangled);
    }

    #[test]
    fn sub_threshold_preconditions() {
        let p_plus = max_entangled(2).unwrap().density();
        assert!(matches!(
            sub_threshold_ea_channel(&ComplexMatrix::identity(4).scale(0.34), &p_plus),
            Err(Error::Precondition(_))
        ));
        assert!(sub_threshold_ea_channel(&ComplexMatrix::from_real_diagonal(&[0.1, -0.1, 0.0, 0.0]), &p_plus).is_err());
        assert!(sub_threshold_ea_channel(&ComplexMatrix::zeros(4), &theta_cc()).is_err());
        assert!(sub_threshold_ea_channel(&ComplexMatrix::zeros(2), &p_plus).is_err());
    }
}
