use std::fmt::Write as _;
use std::path::Path;

use ea_lab::channels::depolarizing;
use ea_lab::criteria::{
    bisect_threshold, ghz_three_lea_min_eig, is_eb, k_lea_falsify, ppt_min_eigenvalue, two_lea_min_mu,
    verdict_from_min_eig, FalsifierReport, FalsifyOptions, ThresholdResult, VERDICT_TOL,
};
use ea_lab::spec::load_channel;
use ea_lab::states::{ghz, werner};
use ea_lab::{Channel, PartitionSpec, Result};
use serde_json::{json, Value};

use crate::numfmt::{fixed, g12};

pub const INV_SQRT3: f64 = 0.577_350_269_189_625_8;

/// Most rows a sweep may produce.
const MAX_ROWS: usize = 1_000_000;

fn werner_min_eig(lambda: f64) -> f64 {
    ppt_min_eigenvalue(
        &werner(lambda, 2).expect("lambda in range"),
        &PartitionSpec::bipartite(),
    )
    .expect("two qubits")
}

fn three_lea_cut() -> PartitionSpec {
    PartitionSpec::split_off(vec![0], 3).expect("three factors")
}

pub fn thresholds(tol: f64) -> Result<Vec<ThresholdResult>> {
    Ok(vec![
        bisect_threshold("eb_werner", werner_min_eig, [0.1, 0.6], tol)?,
        bisect_threshold(
            "two_lea_depolarizing",
            |l| two_lea_min_mu(l).expect("lambda in range"),
            [0.3, 0.9],
            tol,
        )?,
        bisect_threshold(
            "three_lea_ghz_ppt",
            |l| ghz_three_lea_min_eig(l).expect("lambda in range"),
            [0.3, 0.9],
            tol,
        )?,
    ])
}

pub fn thresholds_table(results: &[ThresholdResult]) -> String {
    let mut out = String::from("criterion,critical_value,bracket_lo,bracket_hi,tol,iterations\n");
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.criterion_id,
            g12(r.critical_value),
            g12(r.bracket[0]),
            g12(r.bracket[1]),
            g12(r.tol),
            r.iterations
        )
        .expect("string write");
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub min_mu_2lea: f64,
    pub ghz_mu_3lea: f64,
    pub werner_min_eig: f64,
    pub verdict_2lea: String,
    pub verdict_eb: String,
    pub verdict_3lea_ppt: String,
}

pub const SWEEP_HEADER: &str = "lambda,min_mu_2lea,ghz_mu_3lea,werner_min_eig,verdict_2lea,verdict_eb,verdict_3lea_ppt";

impl SweepRow {
    pub fn at(lambda: f64) -> Result<Self> {
        let min_mu_2lea = two_lea_min_mu(lambda)?;
        let ghz_mu_3lea = ghz_three_lea_min_eig(lambda)?;
        let eb = is_eb(&depolarizing(lambda, 2)?, VERDICT_TOL);
        let two = verdict_from_min_eig(min_mu_2lea, PartitionSpec::bipartite(), (2, 2), VERDICT_TOL);
        let three = verdict_from_min_eig(ghz_mu_3lea, three_lea_cut(), (2, 4), VERDICT_TOL);
        Ok(Self {
            lambda,
            min_mu_2lea,
            ghz_mu_3lea,
            werner_min_eig: eb.witness_min_eig,
            verdict_2lea: two.status.to_string(),
            verdict_eb: eb.status.to_string(),
            verdict_3lea_ppt: three.status.to_string(),
        })
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            g12(self.lambda),
            g12(self.min_mu_2lea),
            g12(self.ghz_mu_3lea),
            g12(self.werner_min_eig),
            self.verdict_2lea,
            self.verdict_eb,
            self.verdict_3lea_ppt
        )
    }
}

/// Grid `lo, lo+step, …` up to `hi`; the last point snaps to `hi` when it
/// lands within rounding of it.
pub fn sweep_grid(lo: f64, hi: f64, step: f64) -> std::result::Result<Vec<f64>, String> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err("lo, hi and step must be finite".into());
    }
    if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
        return Err(format!("need 0 <= lo <= hi <= 1, got lo={lo} hi={hi}"));
    }
    if step <= 0.0 {
        return Err(format!("step must be positive, got {step}"));
    }
    let span = (hi - lo) / step;
    if span >= MAX_ROWS as f64 {
        return Err(format!("grid would have more than {MAX_ROWS} rows"));
    }
    let n = (span + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let x = lo + i as f64 * step;
            if (x - hi).abs() < 1e-9 * step.max(1.0) {
                hi
            } else {
                x.min(hi)
            }
        })
        .collect())
}

pub fn sweep_csv(grid: &[f64]) -> Result<String> {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for &lambda in grid {
        out.push_str(&SweepRow::at(lambda)?.csv());
        out.push('\n');
    }
    Ok(out)
}

pub fn write_sweep(grid: &[f64], path: &Path) -> std::result::Result<usize, String> {
    let csv = sweep_csv(grid).map_err(|e| e.to_string())?;
    std::fs::write(path, csv).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(grid.len())
}

pub struct FalsifyRun {
    pub channel: Channel,
    pub report: FalsifierReport,
}

pub fn falsify(spec: &Path, k: usize, budget: usize, seed: u64, opts: &FalsifyOptions) -> Result<FalsifyRun> {
    let channel = load_channel(spec)?;
    let report = k_lea_falsify(&channel, k, budget, seed, opts)?;
    Ok(FalsifyRun { channel, report })
}

pub fn report_json(run: &FalsifyRun, k: usize) -> Value {
    let r = &run.report;
    let counterexample = r.counterexample.as_ref().map(|cx| {
        let amps: Vec<[f64; 2]> = cx.state.amplitudes().iter().map(|z| [z.re, z.im]).collect();
        json!({
            "label": cx.label,
            "trial": cx.trial,
            "partition": cx.partition.to_string(),
            "min_eig": cx.min_eig,
            "dims": cx.state.dims().factors(),
            "amplitudes": amps,
        })
    });
    let reverified = r.reverify(&run.channel.tensor_power(k).expect("k >= 2")).ok().flatten();
    json!({
        "k": k,
        "seed": r.seed,
        "budget": r.budget,
        "trials_used": r.trials_used,
        "min_eig_seen": finite_or_null(r.min_eig_seen),
        "partitions_checked": r.partitions_checked.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "counterexample": counterexample,
        "reverified_min_eig": reverified,
    })
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

/// Numerical walk through why the depolarizing pair at `λ = 1/√3`
/// annihilates entanglement without breaking it.
pub fn ea_not_eb_report() -> Result<String> {
    let lambda = INV_SQRT3;
    let e = depolarizing(lambda, 2)?;
    let e2 = e.tensor_power(2)?;
    let e3 = e.tensor_power(3)?;
    let psi = ghz(3)?;

    let mu = two_lea_min_mu(lambda)?;
    let two = verdict_from_min_eig(mu, PartitionSpec::bipartite(), (2, 2), VERDICT_TOL);
    let three_out = e3.apply_pure(&psi)?;
    let three_min = ppt_min_eigenvalue(&three_out, &three_lea_cut())?;
    let last_cut = PartitionSpec::split_off(vec![2], 3)?;
    let three_last = ppt_min_eigenvalue(&three_out, &last_cut)?;
    let single_eb = is_eb(&e, VERDICT_TOL);
    let pair_eb = is_eb(&e2, VERDICT_TOL);
    let pair_id = e2.tensor(&Channel::identity(2));
    let anc_out = pair_id.apply_pure(&psi)?;
    let anc_min = ppt_min_eigenvalue(&anc_out, &last_cut)?;

    let mut s = String::new();
    let w = &mut s;
    let p = 12;
    writeln!(w, "lambda = 1/sqrt(3) = {}", fixed(lambda, p)).ok();
    writeln!(w).ok();
    writeln!(w, "[1] E(x)E annihilates two-qubit entanglement").ok();
    writeln!(w, "    2-LEA min mu_minus = {}  ({})", fixed(mu, p), two.status).ok();
    writeln!(w, "[2] single-copy E is not entanglement breaking").ok();
    writeln!(
        w,
        "    Choi min PT eigenvalue = {}  ({})",
        fixed(single_eb.witness_min_eig, p),
        single_eb.status
    )
    .ok();
    writeln!(w, "[3] three copies keep GHZ entangled").ok();
    writeln!(
        w,
        "    min PT eigenvalue of E^(x3)[GHZ] across 0|1,2 = {}",
        fixed(three_min, p)
    )
    .ok();
    writeln!(
        w,
        "    min PT eigenvalue of E^(x3)[GHZ] across 2|0,1 = {}",
        fixed(three_last, p)
    )
    .ok();
    writeln!(w, "[4] E(x)E as a 4-dimensional channel").ok();
    writeln!(
        w,
        "    Choi min PT eigenvalue (out|in) = {}  ({})",
        fixed(pair_eb.witness_min_eig, p),
        pair_eb.status
    )
    .ok();
    writeln!(
        w,
        "    min PT eigenvalue of (E(x)E(x)I)[GHZ] across 0,1|2 = {}",
        fixed(anc_min, p)
    )
    .ok();
    writeln!(w).ok();
    writeln!(w, "implication chain:").ok();
    writeln!(
        w,
        "    if E(x)E were entanglement breaking, (E(x)E(x)I)[GHZ] would be separable across 0,1|2"
    )
    .ok();
    writeln!(
        w,
        "    => applying E to party 2 keeps it separable, so E^(x3)[GHZ] would be PPT across 2|0,1"
    )
    .ok();
    writeln!(
        w,
        "    but that PT eigenvalue is {} < 0, a contradiction",
        fixed(three_last, p)
    )
    .ok();
    let conclusion = if two.status != ea_lab::Status::Entangled && three_last < -VERDICT_TOL && anc_min < -VERDICT_TOL {
        "E(x)E is entanglement annihilating but not entanglement breaking"
    } else {
        "the numbers above do not support the separation at this lambda"
    };
    writeln!(w, "    => {conclusion}").ok();
    Ok(s)
}
