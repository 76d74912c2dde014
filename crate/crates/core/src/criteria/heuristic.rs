//! Local search for the worst two-qubit input of `E⊗E` for a general qubit
//! channel `E`. Without unitary covariance there is no Schmidt reduction, so
//! this is a multi-start Nelder–Mead over the pure-state manifold and its
//! nonnegative outcomes are not certificates.

use std::f64::consts::PI;

use rand::Rng;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::linalg::{c, DimsSpec, PartitionSpec, C64};
use crate::states::{rng_from_seed, PureState};

use super::{ppt_min_eigenvalue, SeparabilityVerdict, Status, VERDICT_TOL};

pub const DEFAULT_RESTARTS: usize = 32;
const MAX_ITERATIONS: usize = 400;

#[derive(Clone, Debug)]
pub struct HeuristicTwoLea {
    /// `Entangled` when a negative PPT eigenvalue was found (a genuine
    /// witness), otherwise `Inconclusive`.
    pub verdict: SeparabilityVerdict,
    /// Best input found.
    pub minimizer: PureState,
    pub restarts: usize,
    /// Always true; nonnegative results are not certified.
    pub heuristic: bool,
}

/// Pure two-qubit state from three hyperspherical angles and three phases.
fn chart(x: &[f64]) -> PureState {
    let (t1, t2, t3) = (x[0], x[1], x[2]);
    let amps: [C64; 4] = [
        c(t1.cos(), 0.0),
        C64::from_polar(t1.sin() * t2.cos(), x[3]),
        C64::from_polar(t1.sin() * t2.sin() * t3.cos(), x[4]),
        C64::from_polar(t1.sin() * t2.sin() * t3.sin(), x[5]),
    ];
    PureState::normalized(amps.to_vec(), DimsSpec::uniform(2, 2).expect("two qubits")).expect("unit vector")
}

fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: Vec<f64>, step: f64) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.clone(), f(&x0)));
    for i in 0..n {
        let mut x = x0.clone();
        x[i] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect() };

    for _ in 0..MAX_ITERATIONS {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[n].1 - simplex[0].1).abs() < 1e-14 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].0.clone();
        let reflected = lerp(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = lerp(&centroid, &worst, 0.5);
            let fc = f(&contracted);
            if fc < simplex[n].1 {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x = lerp(&best, &entry.0, 0.5);
                    let fx = f(&x);
                    *entry = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Minimizes the PPT eigenvalue of `(E⊗E)[|ψ⟩⟨ψ|]` over pure two-qubit `ψ`
/// from `restarts` seeded random starting points.
pub fn two_lea_heuristic(single: &Channel, restarts: usize, seed: u64) -> Result<HeuristicTwoLea> {
    if single.in_dim() != 2 || single.out_dim() != 2 {
        return Err(Error::Unsupported(
            "the two-copy search is implemented for qubit channels".into(),
        ));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    let e2 = single.tensor_power(2)?;
    let part = PartitionSpec::bipartite();
    let objective = |x: &[f64]| -> f64 {
        let out = e2.apply_pure(&chart(x)).expect("dims match");
        ppt_min_eigenvalue(&out, &part).expect("two-qubit output")
    };
    let mut rng = rng_from_seed(seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..restarts {
        let x0: Vec<f64> = (0..6)
            .map(|k| {
                if k < 3 {
                    rng.random::<f64>() * PI
                } else {
                    rng.random::<f64>() * 2.0 * PI
                }
            })
            .collect();
        let candidate = nelder_mead(&objective, x0, 0.3);
        if best.as_ref().is_none_or(|b| candidate.1 < b.1) {
            best = Some(candidate);
        }
    }
    let (x, min) = best.expect("at least one restart");
    let status = if min < -VERDICT_TOL {
        Status::Entangled
    } else {
        Status::Inconclusive
    };
    Ok(HeuristicTwoLea {
        verdict: SeparabilityVerdict {
            status,
            witness_min_eig: min,
            partition: part,
        },
        minimizer: chart(&x),
        restarts,
        heuristic: true,
    })
}
