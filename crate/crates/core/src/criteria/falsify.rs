//! Randomized search for inputs whose output stays entangled.
//!
//! A channel annihilates entanglement when every pure input is mapped to a
//! separable state, so a single NPT output across any cut refutes it. The
//! search tries a fixed probe list first (GHZ, W, and a maximally entangled
//! state across each cut), then Haar-random pure states. Trial `t` draws
//! from its own ChaCha stream `(seed, t)` and the reported counterexample is
//! the lowest-indexed failing trial, so results do not depend on whether
//! trials run in parallel.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::linalg::{self, DimsSpec, PartitionSpec};
use crate::states::{self, PureState};

use super::{negativity, ppt_min_eigenvalue, VERDICT_TOL};

const CHUNK: usize = 64;

#[derive(Clone, Debug)]
pub struct FalsifyOptions {
    /// Try the fixed probe list before Haar sampling.
    pub probes: bool,
    /// Evaluate trials on the rayon pool.
    pub parallel: bool,
    /// An output is entangled when its PPT minimum is below `-tol`.
    pub tol: f64,
}

impl Default for FalsifyOptions {
    fn default() -> Self {
        Self {
            probes: true,
            parallel: true,
            tol: VERDICT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    /// `probe:GHZ`, `probe:W`, `probe:psi+[0|1,2]` or `haar:<trial>`.
    pub label: String,
    pub trial: usize,
    pub state: PureState,
    pub partition: PartitionSpec,
    pub min_eig: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FalsifierReport {
    pub counterexample: Option<Counterexample>,
    /// Trials evaluated, up to and including the counterexample.
    pub trials_used: usize,
    /// Smallest PPT eigenvalue over those trials and all cuts.
    pub min_eig_seen: f64,
    pub seed: u64,
    pub budget: usize,
    pub partitions_checked: Vec<PartitionSpec>,
}

impl FalsifierReport {
    /// Recomputes the counterexample's PPT minimum under `e`. `None` when
    /// there is no counterexample.
    pub fn reverify(&self, e: &Channel) -> Result<Option<f64>> {
        self.counterexample
            .as_ref()
            .map(|cx| ppt_min_eigenvalue(&e.apply_pure(&cx.state)?, &cx.partition))
            .transpose()
    }
}

struct Trial {
    label: String,
    state: PureState,
    min_eig: f64,
    partition: usize,
}

fn probe_list(dims: &DimsSpec, partitions: &[PartitionSpec]) -> Vec<(String, PureState)> {
    let mut out = Vec::new();
    if let Ok(psi) = states::ghz_on(dims) {
        out.push(("probe:GHZ".to_string(), psi));
    }
    if let Ok(psi) = states::w_on(dims) {
        out.push(("probe:W".to_string(), psi));
    }
    for part in partitions {
        if let Ok(psi) = states::max_entangled_across(dims, part) {
            out.push((format!("probe:psi+[{part}]"), psi));
        }
    }
    out
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = states::rng_from_seed(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Searches for a pure input whose image under `e` is NPT across some cut
/// of `dims`. `budget` counts every trial, probes included.
pub fn ea_falsify(
    e: &Channel,
    dims: &DimsSpec,
    budget: usize,
    seed: u64,
    opts: &FalsifyOptions,
) -> Result<FalsifierReport> {
    if e.in_dim() != dims.total() || e.out_dim() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: e.in_dim(),
        });
    }
    let partitions = PartitionSpec::all(dims.len());
    let probes = if opts.probes {
        probe_list(dims, &partitions)
    } else {
        Vec::new()
    };

    let run_trial = |t: usize| -> Result<Trial> {
        let (label, state) = match probes.get(t) {
            Some((label, psi)) => (label.clone(), psi.clone()),
            None => (
                format!("haar:{t}"),
                states::haar_pure_from_rng(dims, &mut trial_rng(seed, t)),
            ),
        };
        let out = e.apply_pure(&state)?;
        let out = states::DensityOperator::new_unchecked(out.into_matrix(), dims.clone());
        let mut best = (f64::INFINITY, 0);
        for (k, part) in partitions.iter().enumerate() {
            let m = ppt_min_eigenvalue(&out, part)?;
            if m < best.0 {
                best = (m, k);
            }
        }
        Ok(Trial {
            label,
            state,
            min_eig: best.0,
            partition: best.1,
        })
    };

    let mut min_eig_seen = f64::INFINITY;
    let mut trials_used = 0;
    let mut counterexample = None;
    let mut start = 0;
    'search: while start < budget {
        let end = (start + CHUNK).min(budget);
        let results: Vec<Result<Trial>> = if opts.parallel {
            (start..end).into_par_iter().map(run_trial).collect()
        } else {
            (start..end).map(run_trial).collect()
        };
        for (t, trial) in (start..end).zip(results) {
            let trial = trial?;
            trials_used = t + 1;
            min_eig_seen = min_eig_seen.min(trial.min_eig);
            if trial.min_eig < -opts.tol {
                counterexample = Some(Counterexample {
                    label: trial.label,
                    trial: t,
                    state: trial.state,
                    partition: partitions[trial.partition].clone(),
                    min_eig: trial.min_eig,
                });
                break 'search;
            }
        }
        start = end;
    }

    Ok(FalsifierReport {
        counterexample,
        trials_used,
        min_eig_seen,
        seed,
        budget,
        partitions_checked: partitions,
    })
}

/// [`ea_falsify`] on `single^{⊗k}` over `k` copies of its input space.
pub fn k_lea_falsify(
    single: &Channel,
    k: usize,
    budget: usize,
    seed: u64,
    opts: &FalsifyOptions,
) -> Result<FalsifierReport> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if single.in_dim() != single.out_dim() {
        return Err(Error::DimensionMismatch {
            expected: single.in_dim(),
            found: single.out_dim(),
        });
    }
    let e = single.tensor_power(k)?;
    ea_falsify(&e, &DimsSpec::uniform(single.in_dim(), k)?, budget, seed, opts)
}

/// A `k-1` party counterexample `σ` embedded as `|0⟩⊗σ` for `k` parties.
#[derive(Clone, Debug)]
pub struct LiftedCounterexample {
    pub state: PureState,
    /// The original cut shifted by one, with the new factor in the first block.
    pub partition: PartitionSpec,
    /// PPT minimum of the lifted image.
    pub min_eig: f64,
    /// Largest eigenvalue of the channel applied to the anchor `|0⟩⟨0|`.
    /// The lifted image is `E[|0⟩⟨0|] ⊗ X`, so its PPT minimum is
    /// `anchor_weight × (PPT minimum of X)`.
    pub anchor_weight: f64,
    pub negativity: f64,
    /// PPT minimum after tracing the anchor back out of the lifted image,
    /// across the original cut. Equals the original witness.
    pub reduced_min_eig: f64,
}

/// Lifts a counterexample for `single^{⊗(k-1)}` to one for `single^{⊗k}`.
pub fn lift_counterexample(single: &Channel, cx: &Counterexample) -> Result<LiftedCounterexample> {
    let d = single.in_dim();
    let anchor = PureState::basis(0, DimsSpec::new(vec![d])?)?;
    let anchor_weight = *linalg::hermitian_eigenvalues(single.apply_pure(&anchor)?.matrix())?
        .last()
        .expect("nonempty spectrum");
    let lifted = anchor.tensor(&cx.state);
    let n = lifted.dims().len();
    let mut first = vec![0];
    first.extend(cx.partition.first().iter().map(|k| k + 1));
    let second = cx.partition.second().iter().map(|k| k + 1).collect();
    let partition = PartitionSpec::new(first, second, n)?;
    let e = single.tensor_power(n)?;
    let out = e.apply_pure(&lifted)?;
    let out = states::DensityOperator::new_unchecked(out.into_matrix(), lifted.dims().clone());
    let rest: Vec<usize> = (1..n).collect();
    let reduced = states::DensityOperator::new_unchecked(
        linalg::partial_trace(out.matrix(), out.dims(), &rest)?,
        cx.state.dims().clone(),
    );
    Ok(LiftedCounterexample {
        min_eig: ppt_min_eigenvalue(&out, &partition)?,
        negativity: negativity(&out, &partition)?,
        reduced_min_eig: ppt_min_eigenvalue(&reduced, &cx.partition)?,
        state: lifted,
        partition,
        anchor_weight,
    })
}
