//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p ea-lab --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ea_lab::channels::{
    choi_of, depolarizing, measure_prepare_channel, random_channel_from_rng, random_measure_prepare_from_rng,
};
use ea_lab::criteria::{
    bisect_threshold, ghz_three_lea_min_eig, is_eb, k_lea_falsify, lift_counterexample, ppt_min_eigenvalue,
    ppt_verdict, separable_mixing_threshold, two_lea_depolarizing_mu, two_lea_min_mu, two_lea_output,
    two_lea_verdict_depolarizing, FalsifyOptions, Status, VERDICT_TOL,
};
use ea_lab::linalg::{self, c, ComplexMatrix, DimsSpec, PartitionSpec};
use ea_lab::states::{ghz, max_entangled, random_density_from_rng, rng_from_seed, werner, DensityOperator};
use rand_chacha::ChaCha8Rng;

const INV_SQRT3: f64 = 0.577_350_269_189_625_8;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: ea_lab::Error) -> String {
    e.to_string()
}

// Oracles written independently of the library.

/// Golden-section minimizer on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Root of `4x³ + x² - 1` by Newton's method.
fn cubic_root() -> f64 {
    let mut x: f64 = 0.55;
    for _ in 0..50 {
        x -= (4.0 * x.powi(3) + x * x - 1.0) / (12.0 * x * x + 2.0 * x);
    }
    x
}

/// Eigenvalues of the partially transposed X-state, straight from its entries.
fn x_state_pt_eigenvalues(lambda: f64, q0: f64) -> [f64; 4] {
    let q1 = 1.0 - q0;
    let (a, b) = ((1.0 + lambda) / 2.0, (1.0 - lambda) / 2.0);
    // Populations of |00⟩,|01⟩,|10⟩,|11⟩ and the |00⟩⟨11| coherence.
    let p00 = q0 * a * a + q1 * b * b;
    let p11 = q1 * a * a + q0 * b * b;
    let p01 = q0 * a * b + q1 * a * b;
    let p10 = p01;
    let coh = lambda * lambda * (q0 * q1).sqrt();
    // Under PT the coherence moves to the |01⟩,|10⟩ block.
    let mid = 0.5 * (p01 + p10);
    let half_gap = (0.25 * (p01 - p10).powi(2) + coh * coh).sqrt();
    let mut v = [p00, p11, mid + half_gap, mid - half_gap];
    v.sort_by(f64::total_cmp);
    v
}

fn werner_oracle(lambda: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, |i, j| {
        let bell = if (i == 0 || i == 3) && (j == 0 || j == 3) {
            0.5
        } else {
            0.0
        };
        let id = if i == j { 0.25 } else { 0.0 };
        c(lambda * bell + (1.0 - lambda) * id, 0.0)
    })
}

fn werner_pt_min(lambda: f64) -> f64 {
    ppt_min_eigenvalue(&werner(lambda, 2).unwrap(), &PartitionSpec::bipartite()).unwrap()
}

fn criterion_1() -> Check {
    let r = bisect_threshold("eb_werner", werner_pt_min, [0.1, 0.6], 1e-10).map_err(err)?;
    let gap = (r.critical_value - 1.0 / 3.0).abs();
    ensure(gap < 1e-8, || format!("critical {} off by {gap:e}", r.critical_value))?;
    Ok(format!("lambda* = {:.10} (|diff| {gap:.1e})", r.critical_value))
}

fn criterion_2() -> Check {
    let crit = |l: f64| two_lea_min_mu(l).unwrap();
    let r = bisect_threshold("two_lea", crit, [0.3, 0.9], 1e-10).map_err(err)?;
    let gap = (r.critical_value - INV_SQRT3).abs();
    ensure(gap < 1e-8, || format!("critical {} off by {gap:e}", r.critical_value))?;
    let mut worst: f64 = 0.0;
    for k in 1..=19 {
        let lambda = k as f64 / 20.0;
        let f = |q0: f64| two_lea_depolarizing_mu(lambda, q0).unwrap().mu_minus;
        let grid_best = (0..=200)
            .map(|i| i as f64 / 200.0)
            .min_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap();
        let q = golden_min(f, (grid_best - 0.005).max(0.0), (grid_best + 0.005).min(1.0), 1e-10);
        worst = worst.max((q - 0.5).abs());
        let closed = two_lea_min_mu(lambda).unwrap();
        ensure((f(q) - closed).abs() < 1e-12, || {
            format!("λ={lambda}: numeric min {} vs closed {closed}", f(q))
        })?;
    }
    ensure(worst < 1e-6, || format!("minimizer off by {worst:e}"))?;
    Ok(format!(
        "lambda* = {:.10} (|diff| {gap:.1e}); argmin q0 within {worst:.1e} of 1/2",
        r.critical_value
    ))
}

fn criterion_3() -> Check {
    let crit = |l: f64| ghz_three_lea_min_eig(l).unwrap();
    let r = bisect_threshold("three_lea_ghz", crit, [0.3, 0.9], 1e-10).map_err(err)?;
    let root = cubic_root();
    let gap = (r.critical_value - root).abs();
    ensure(gap < 1e-8, || format!("critical {} vs root {root}", r.critical_value))?;
    let rounded = (r.critical_value - 0.5567).abs();
    ensure(rounded < 5e-4, || format!("|critical - 0.5567| = {rounded}"))?;
    Ok(format!("lambda* = {:.10}, cubic root {root:.10}", r.critical_value))
}

fn criterion_4() -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..=10 {
        for j in 0..=10 {
            let (lambda, q0) = (i as f64 / 10.0, j as f64 / 10.0);
            let out = two_lea_output(lambda, q0).map_err(err)?;
            let pt = linalg::partial_transpose(out.matrix(), out.dims(), &[1]).map_err(err)?;
            let numeric = linalg::hermitian_eigenvalues(&pt).map_err(err)?;
            let analytic = two_lea_depolarizing_mu(lambda, q0).map_err(err)?.sorted();
            let oracle = x_state_pt_eigenvalues(lambda, q0);
            for k in 0..4 {
                worst = worst.max((analytic[k] - numeric[k]).abs());
                worst = worst.max((analytic[k] - oracle[k]).abs());
            }
        }
    }
    ensure(worst < 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("121 points, max deviation {worst:.1e}"))
}

fn criterion_5() -> Check {
    let mut worst: f64 = 0.0;
    for lambda in [0.0, 0.25, 1.0 / 3.0, 0.5, 1.0] {
        let choi = choi_of(&depolarizing(lambda, 2).map_err(err)?);
        worst = worst.max(choi.matrix().max_abs_diff(werner(lambda, 2).map_err(err)?.matrix()));
        worst = worst.max(choi.matrix().max_abs_diff(&werner_oracle(lambda)));
    }
    ensure(worst < 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("5 values, max deviation {worst:.1e}"))
}

fn criterion_6() -> Check {
    let two = two_lea_verdict_depolarizing(INV_SQRT3).map_err(err)?;
    ensure(
        two.status == Status::SeparableCertified && two.witness_min_eig >= -1e-9,
        || format!("2-LEA verdict {:?}", two),
    )?;
    let e = depolarizing(INV_SQRT3, 2).map_err(err)?;
    let out = e
        .tensor_power(3)
        .map_err(err)?
        .apply_pure(&ghz(3).map_err(err)?)
        .map_err(err)?;
    let three = ppt_min_eigenvalue(&out, &PartitionSpec::split_off(vec![0], 3).map_err(err)?).map_err(err)?;
    ensure(three < -1e-4, || format!("GHZ PT minimum {three}"))?;
    let eb = is_eb(&e, VERDICT_TOL);
    ensure(eb.status == Status::Entangled, || format!("is_eb gave {}", eb.status))?;
    Ok(format!(
        "2-LEA min {:.1e} ({}), GHZ PT min {three:.6}, is_eb {}",
        two.witness_min_eig, two.status, eb.status
    ))
}

fn random_qubit_eb(rng: &mut ChaCha8Rng) -> ea_lab::Channel {
    let q = DimsSpec::new(vec![2]).unwrap();
    let mp = random_measure_prepare_from_rng(2, 3, rng, |r| random_density_from_rng(&q, 2, r).unwrap()).unwrap();
    measure_prepare_channel(&mp).unwrap()
}

fn criterion_7() -> Check {
    let mut rng = rng_from_seed(2024);
    for pair in 0..50 {
        let (a, b) = (random_qubit_eb(&mut rng), random_qubit_eb(&mut rng));
        let p = (pair as f64 + 0.5) / 50.0;
        let v = is_eb(&a.mix(&b, p).map_err(err)?, VERDICT_TOL);
        ensure(v.status == Status::SeparableCertified, || {
            format!("convexity pair {pair}: {}", v.status)
        })?;
    }
    for k in 0..50 {
        let eb = random_qubit_eb(&mut rng);
        let f = random_channel_from_rng(2, 2, 1 + k % 4, &mut rng).map_err(err)?;
        for (name, g) in [("E∘F", eb.compose(&f)), ("F∘E", f.compose(&eb))] {
            let v = is_eb(&g.map_err(err)?, VERDICT_TOL);
            ensure(v.status == Status::SeparableCertified, || {
                format!("closure {name} #{k}: {}", v.status)
            })?;
        }
    }
    let q = DimsSpec::new(vec![2]).unwrap();
    let two = DimsSpec::new(vec![2, 2]).unwrap();
    let mp = random_measure_prepare_from_rng(4, 4, &mut rng, |r| {
        let a = random_density_from_rng(&q, 2, r).unwrap();
        let b = random_density_from_rng(&q, 2, r).unwrap();
        a.tensor(&b)
    })
    .map_err(err)?;
    let e = measure_prepare_channel(&mp).map_err(err)?;
    for s in 0..200 {
        let rho = random_density_from_rng(&two, 1 + s % 4, &mut rng).map_err(err)?;
        let out = e.apply(&rho).map_err(err)?;
        let v = ppt_verdict(&out, &PartitionSpec::bipartite(), VERDICT_TOL).map_err(err)?;
        ensure(v.status == Status::SeparableCertified, || {
            format!("measure-prepare output {s}: {}", v.status)
        })?;
    }
    let kappa = separable_mixing_threshold(&max_entangled(2).map_err(err)?.density(), 1e-9).map_err(err)?;
    let gap = (kappa.critical_value - 1.0 / 3.0).abs();
    ensure(gap < 1e-6, || format!("kappa(P+) = {}", kappa.critical_value))?;
    Ok(format!(
        "50 convex pairs, 100 compositions, 200 outputs; kappa(P+) = {:.9}",
        kappa.critical_value
    ))
}

fn criterion_8() -> Check {
    let mut rng = rng_from_seed(8);
    let mut channels = vec![
        ("depolarizing 0.6, k=2", depolarizing(0.6, 2).map_err(err)?, 2),
        ("depolarizing 0.6, k=3", depolarizing(0.6, 2).map_err(err)?, 3),
        ("depolarizing 0.56, k=2", depolarizing(0.56, 2).map_err(err)?, 2),
        ("depolarizing 0.9, k=2", depolarizing(0.9, 2).map_err(err)?, 2),
    ];
    for k in 0..4 {
        channels.push((
            "random qubit channel, k=2",
            random_channel_from_rng(2, 2, 1 + k, &mut rng).map_err(err)?,
            2,
        ));
    }
    let mut found = 0;
    let mut reports = 0;
    for (name, single, k) in &channels {
        for probes in [true, false] {
            for seed in [0u64, 17] {
                let par = FalsifyOptions {
                    probes,
                    parallel: true,
                    tol: VERDICT_TOL,
                };
                let ser = FalsifyOptions {
                    parallel: false,
                    ..par.clone()
                };
                let a = k_lea_falsify(single, *k, 256, seed, &par).map_err(err)?;
                let b = k_lea_falsify(single, *k, 256, seed, &ser).map_err(err)?;
                ensure(a == b, || {
                    format!("{name}: parallel and serial reports differ (seed {seed})")
                })?;
                reports += 1;
                if let Some(min) = a.reverify(&single.tensor_power(*k).map_err(err)?).map_err(err)? {
                    ensure(min < -1e-9, || format!("{name}: counterexample re-evaluates to {min}"))?;
                    found += 1;
                }
            }
        }
    }
    ensure(found > 0, || "no counterexamples exercised".into())?;
    Ok(format!(
        "{reports} report pairs identical, {found} counterexamples re-verified"
    ))
}

fn criterion_9() -> Check {
    let single = depolarizing(0.6, 2).map_err(err)?;
    let opts = FalsifyOptions {
        parallel: false,
        ..FalsifyOptions::default()
    };
    let report = k_lea_falsify(&single, 3, 1000, 0, &opts).map_err(err)?;
    let cx = report.counterexample.ok_or("no k=3 counterexample")?;
    ensure(cx.label == "probe:GHZ", || {
        format!("first counterexample is {}", cx.label)
    })?;
    let lifted = lift_counterexample(&single, &cx).map_err(err)?;
    ensure(lifted.min_eig < -1e-9, || {
        format!("lifted state is not NPT ({})", lifted.min_eig)
    })?;
    // Independent recomputation of the lifted k=4 image.
    let out = single
        .tensor_power(4)
        .map_err(err)?
        .apply_pure(&lifted.state)
        .map_err(err)?;
    let out = DensityOperator::new(out.into_matrix(), DimsSpec::uniform(2, 4).map_err(err)?).map_err(err)?;
    let check = ppt_min_eigenvalue(&out, &lifted.partition).map_err(err)?;
    ensure((check - lifted.min_eig).abs() < 1e-10, || {
        format!("k=4 minimum {check} vs {}", lifted.min_eig)
    })?;
    // Tracing the anchor back out recovers the k=3 witness.
    let reduced = linalg::partial_trace(out.matrix(), out.dims(), &[1, 2, 3]).map_err(err)?;
    let reduced = DensityOperator::new(reduced, DimsSpec::uniform(2, 3).map_err(err)?).map_err(err)?;
    let back = ppt_min_eigenvalue(&reduced, &cx.partition).map_err(err)?;
    let gap = (back - cx.min_eig).abs();
    ensure(gap < 1e-10, || {
        format!("reduced minimum {back} vs k=3 minimum {}", cx.min_eig)
    })?;
    ensure((lifted.reduced_min_eig - cx.min_eig).abs() < 1e-10, || {
        "library reduction disagrees".into()
    })?;
    Ok(format!(
        "k=3 min {:.10}, k=4 min {:.10}, anchor traced out {:.10} (|diff| {gap:.1e})",
        cx.min_eig, lifted.min_eig, back
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("EB threshold 1/3", criterion_1, Duration::from_secs(1)),
        ("2-LEA threshold 1/sqrt(3)", criterion_2, Duration::from_secs(1)),
        ("3-LEA GHZ PPT threshold", criterion_3, Duration::from_secs(1)),
        ("analytic vs numeric spectrum", criterion_4, Duration::from_secs(5)),
        ("Choi of depolarizing is Werner", criterion_5, Duration::from_secs(5)),
        ("EA but not EB at 1/sqrt(3)", criterion_6, Duration::from_secs(1)),
        ("closure property suites", criterion_7, Duration::from_secs(30)),
        (
            "falsifier soundness and determinism",
            criterion_8,
            Duration::from_secs(60),
        ),
        ("monotonicity lift k=3 -> k=4", criterion_9, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > *budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
