//! End-to-end acceptance checks. Each check builds its own problems with
//! fixed seeds and returns an [`Outcome`]; nothing here is tuned per seed.

use std::path::PathBuf;

use super::config::{ProblemSpec, RunConfig};
use super::run::{build_problem, run, run_on};
use crate::error::Result;
use crate::grad_stats::GradMoments;
use crate::numerics::{finite_diff_gradient, relative_error, RngStream};
use crate::optim::{
    rmsprop_step, train_loop, LoopConfig, OptimizerConfig, OptimizerKind, RunSummary,
    StopperConfig, StopperKind,
};
use crate::problems::{
    logreg_per_sample_grad, make_quadratic, mlp_forward_backward, poly2_expand, Blobs,
    FourierFeatures, FourierToy, LeastSquares, MlpArchitecture, Model, Objective, QuadraticInit,
    QuadraticProblem, SpectrumKind, Target, WdbcSplit,
};
use crate::stopping::{
    eb_criterion, expected_log_evidence, log_evidence, off_fraction_rmsprop, DEFAULT_BETA,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(id: u8, title: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            id,
            title,
            passed,
            detail: detail.into(),
        }
    }

    fn errored(id: u8, title: &'static str, err: crate::Error) -> Self {
        Outcome::new(id, title, false, format!("error: {err}"))
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail
        )
    }
}

pub const TITLES: [&str; 11] = [
    "criterion algebra",
    "evidence identity",
    "gradient correctness",
    "variance unbiasedness",
    "quadratic stopping",
    "quadratic counterexample",
    "fourier toy",
    "wdbc vs validation",
    "element-wise stopping",
    "rmsprop properties",
    "determinism",
];

pub fn run_criterion(id: u8) -> Outcome {
    let title = TITLES[(id as usize).saturating_sub(1).min(10)];
    let result = match id {
        1 => criterion_algebra(),
        2 => evidence_identity(),
        3 => gradient_correctness(),
        4 => variance_unbiasedness(),
        5 => quadratic_stopping(),
        6 => quadratic_counterexample(),
        7 => fourier_toy(),
        8 => wdbc_comparison(),
        9 => elementwise_stopping(),
        10 => rmsprop_properties(),
        11 => determinism(),
        _ => return Outcome::new(id, "unknown", false, "no such criterion"),
    };
    result.unwrap_or_else(|e| Outcome::errored(id, title, e))
}

pub fn run_all() -> Vec<Outcome> {
    (1..=11).map(run_criterion).collect()
}

const ALGEBRA_TOL: f64 = 1e-12;

pub fn criterion_algebra() -> Result<Outcome> {
    let zero: f64 = eb_criterion(&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0], 7, 3)?;
    // g_k² = Σ_k / n for every k.
    let var = [0.5, 2.0, 8.0];
    let n = 8;
    let grad: Vec<f64> = var.iter().map(|v: &f64| (v / n as f64).sqrt()).collect();
    let boundary = eb_criterion(&grad, &var, n, 3)?;
    let hand: f64 = eb_criterion(&[0.1, 0.2], &[1.0, 1.0], 4, 2)?;
    let errs = [(zero - 1.0).abs(), boundary.abs(), (hand - 0.9).abs()];
    let passed = errs.iter().all(|&e| e <= ALGEBRA_TOL);
    Ok(Outcome::new(
        1,
        TITLES[0],
        passed,
        format!("zero-grad {zero}, boundary {boundary:e}, hand case {hand}"),
    ))
}

pub fn evidence_identity() -> Result<Outcome> {
    let mut rng = RngStream::new(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = 1 + rng.below(50);
        let m = 2 + rng.below(999);
        let var: Vec<f64> = (0..d).map(|_| rng.standard_normal().exp()).collect();
        let spread = 3.0 * rng.uniform();
        let grad: Vec<f64> = var
            .iter()
            .map(|&v| spread * (v / m as f64).sqrt() * rng.standard_normal())
            .collect();
        let lhs =
            2.0 / d as f64 * (log_evidence(&grad, &var, m)? - expected_log_evidence(&var, m)?);
        let rhs = eb_criterion(&grad, &var, m, d)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(Outcome::new(
        2,
        TITLES[1],
        worst <= ALGEBRA_TOL,
        format!("max |difference| over 100 tuples {worst:e}"),
    ))
}

pub const GRADCHECK_TOL: f64 = 1e-5;
const FD_EPS: f64 = 1e-6;

/// Worst finite-difference relative error per model over `points` random points.
pub fn gradient_checks(points: usize, seed: u64) -> Result<Vec<(&'static str, f64)>> {
    let mut rng = RngStream::new(seed);
    let normal = |rng: &mut RngStream, n: usize, s: f64| -> Vec<f64> {
        (0..n).map(|_| s * rng.standard_normal()).collect()
    };

    let features = FourierFeatures::integer(24);
    let ls = LeastSquares {
        n_features: features.dim(),
    };
    let mut worst_ls: f64 = 0.0;
    for _ in 0..points {
        let x: Vec<f64> = features.map(rng.uniform());
        let y = Target::Real(rng.standard_normal());
        let w = normal(&mut rng, features.dim(), 0.5);
        let mut g = vec![0.0; w.len()];
        ls.loss_grad(&w, &x, y, Some(&mut g));
        let fd = finite_diff_gradient(|w| ls.loss_grad(w, &x, y, None), &w, FD_EPS)?;
        worst_ls = worst_ls.max(relative_error(&g, &fd));
    }

    let mut worst_lr: f64 = 0.0;
    for _ in 0..points {
        let x = poly2_expand(&normal(&mut rng, 5, 1.0));
        let y = rng.below(2) as f64;
        let w = normal(&mut rng, x.len(), 0.3);
        let (_, g) = logreg_per_sample_grad(&w, &x, y);
        let fd = finite_diff_gradient(|w| logreg_per_sample_grad(w, &x, y).0, &w, FD_EPS)?;
        worst_lr = worst_lr.max(relative_error(&g, &fd));
    }

    let arch = MlpArchitecture::new(vec![8, 16, 8, 3])?;
    let mut worst_mlp: f64 = 0.0;
    for _ in 0..points {
        let params: Vec<f64> = arch.he_init(&mut rng);
        let x = normal(&mut rng, 8, 1.0);
        let class = rng.below(3);
        let (_, g) = mlp_forward_backward(&arch, &params, &x, class);
        let fd = finite_diff_gradient(|p| arch.loss_grad(p, &x, class, None), &params, FD_EPS)?;
        worst_mlp = worst_mlp.max(relative_error(&g, &fd));
    }
    Ok(vec![
        ("least squares", worst_ls),
        ("logistic", worst_lr),
        ("mlp", worst_mlp),
    ])
}

pub fn gradient_correctness() -> Result<Outcome> {
    let checks = gradient_checks(10, 3)?;
    let passed = checks.iter().all(|&(_, e)| e <= GRADCHECK_TOL);
    let detail = checks
        .iter()
        .map(|(name, e)| format!("{name} {e:.2e}"))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(Outcome::new(
        3,
        TITLES[2],
        passed,
        format!("max rel. error: {detail}"),
    ))
}

pub fn variance_unbiasedness() -> Result<Outcome> {
    let true_var: [f64; 4] = [0.25, 1.0, 4.0, 9.0];
    let mean = [1.0, -2.0, 0.0, 3.0];
    let reps = 2000;
    let n = 16;
    let mut rng = RngStream::new(4);
    let mut avg = [0.0; 4];
    let mut sample = [0.0; 4];
    for _ in 0..reps {
        let mut m = GradMoments::<f64>::new(4);
        for _ in 0..n {
            for k in 0..4 {
                sample[k] = mean[k] + true_var[k].sqrt() * rng.standard_normal();
            }
            m.accumulate(&sample)?;
        }
        let (_, var) = m.finalize()?;
        for k in 0..4 {
            avg[k] += var[k] / reps as f64;
        }
    }
    let rel: Vec<f64> = avg
        .iter()
        .zip(&true_var)
        .map(|(a, t)| (a / t - 1.0).abs())
        .collect();
    let worst = rel.iter().copied().fold(0.0, f64::max);
    Ok(Outcome::new(
        4,
        TITLES[3],
        worst <= 0.05,
        format!("max relative deviation {worst:.4} over {reps} datasets of {n}"),
    ))
}

pub const QUAD_DIM: usize = 1000;
pub const QUAD_LAMBDA: f64 = 10.0;
pub const QUAD_LR: f64 = 0.02;
pub const QUAD_INIT_VARIANCE: f64 = 20.0;
pub const QUAD_SEED: u64 = 1;
/// Upper bound on steps before the criterion must have fired.
pub const QUAD_CAP: usize = 20_000;

pub fn quad_spectra() -> [(&'static str, SpectrumKind); 3] {
    [
        ("uniform", SpectrumKind::Uniform { min: 0.1, max: 1.0 }),
        (
            "exponential",
            SpectrumKind::Exponential { min: 0.1, max: 1.0 },
        ),
        (
            "structured",
            SpectrumKind::Structured {
                small: 0.1,
                large: 1.0,
                n_large: 10,
            },
        ),
    ]
}

fn eb_stopper(beta: f64, grouped: bool) -> StopperConfig {
    StopperConfig {
        kind: StopperKind::Eb {
            beta,
            warmup: crate::stopping::DEFAULT_WARMUP,
            boundary: crate::stopping::Boundary::Inclusive,
            grouped,
        },
        halt: true,
    }
}

fn gd(lr: f64) -> OptimizerConfig {
    OptimizerConfig {
        kind: OptimizerKind::Gd,
        learning_rate: lr,
        ..OptimizerConfig::default()
    }
}

fn train(
    problem: &dyn Objective<f64>,
    optimizer: &OptimizerConfig,
    stopper: &StopperConfig,
    max_steps: usize,
    log_interval: usize,
    seed: u64,
) -> Result<RunSummary<f64>> {
    train_loop(
        problem,
        optimizer,
        stopper,
        &LoopConfig {
            max_steps,
            log_interval,
            seed,
        },
        &mut |_| Ok(()),
    )
}

/// EB stop step (if any within `cap`) and the per-step test-loss curve of
/// the unstopped run over `factor` times that many steps.
pub fn stop_and_extend(
    problem: &dyn Objective<f64>,
    optimizer: &OptimizerConfig,
    stopper: &StopperConfig,
    factor: usize,
    cap: usize,
) -> Result<Option<(usize, Vec<f64>)>> {
    let first = train(problem, optimizer, stopper, cap, cap, 0)?;
    let Some(stop) = first.stop_step else {
        return Ok(None);
    };
    let horizon = (factor * stop).max(1);
    let long = train(
        problem,
        optimizer,
        &stopper.clone().observe(),
        horizon,
        1,
        0,
    )?;
    debug_assert_eq!(long.stop_step, Some(stop));
    let curve: Vec<f64> = long.test_curve().into_iter().map(|(_, l)| l).collect();
    Ok(Some((stop, curve)))
}

fn quad_base(spectrum: SpectrumKind) -> Result<QuadraticProblem<f64>> {
    let mut rng = RngStream::with_stream(QUAD_SEED, super::run::DATA_STREAM);
    make_quadratic(QUAD_DIM, spectrum, QUAD_LAMBDA, &mut rng)
}

fn quad_init(base: QuadraticProblem<f64>, init: QuadraticInit) -> Result<QuadraticProblem<f64>> {
    base.with_init(
        init,
        &mut RngStream::with_stream(QUAD_SEED, super::run::INIT_STREAM),
    )
}

fn min_of(curve: &[f64]) -> f64 {
    curve.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn quadratic_stopping() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, spectrum) in quad_spectra() {
        let problem = quad_init(
            quad_base(spectrum)?,
            QuadraticInit::Gaussian {
                variance: QUAD_INIT_VARIANCE,
            },
        )?;
        match stop_and_extend(
            &problem,
            &gd(QUAD_LR),
            &eb_stopper(DEFAULT_BETA, false),
            5,
            QUAD_CAP,
        )? {
            None => {
                passed = false;
                parts.push(format!("{name}: no stop within {QUAD_CAP}"));
            }
            Some((stop, curve)) => {
                let at_stop = curve[stop];
                let at_end = *curve.last().expect("nonempty");
                let best = min_of(&curve);
                let overfit = at_stop < at_end;
                let near = at_stop <= 3.0 * best;
                passed &= overfit && near;
                parts.push(format!(
                    "{name}: stop {stop}, L(stop)={at_stop:.4} L(5x)={at_end:.4} min={best:.4} ratio {:.2}",
                    at_stop / best
                ));
            }
        }
    }
    Ok(Outcome::new(5, TITLES[4], passed, parts.join("; ")))
}

pub const COUNTEREXAMPLE_FACTOR: f64 = 3.0;

pub fn quadratic_counterexample() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, spectrum) in quad_spectra() {
        let problem = quad_init(
            quad_base(spectrum)?,
            QuadraticInit::Counterexample {
                factor: COUNTEREXAMPLE_FACTOR,
            },
        )?;
        match stop_and_extend(
            &problem,
            &gd(QUAD_LR),
            &eb_stopper(DEFAULT_BETA, false),
            5,
            QUAD_CAP,
        )? {
            None => {
                passed = false;
                parts.push(format!("{name}: no stop within {QUAD_CAP}"));
            }
            Some((stop, curve)) => {
                let at_stop = curve[stop];
                let still_falling =
                    curve[stop + 1] <= at_stop && (stop == 0 || at_stop <= curve[stop - 1]);
                let best = min_of(&curve);
                let ratio = at_stop / best;
                passed &= still_falling && ratio >= 1.1;
                parts.push(format!(
                    "{name}: stop {stop}, test loss still falling {still_falling}, L(stop)/min {ratio:.3}"
                ));
            }
        }
    }
    Ok(Outcome::new(6, TITLES[5], passed, parts.join("; ")))
}

pub const FOURIER_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
pub const FOURIER_LR: f64 = 0.05;
pub const FOURIER_CAP: usize = 100_000;

pub fn fourier_toy_spec() -> FourierToy {
    FourierToy {
        n_train: 20,
        n_val: 10,
        n_test: 2000,
        noise_std: 1.0,
        intercept: 1.0,
        slope: 2.0,
        n_frequencies: 24,
    }
}

pub fn fourier_toy() -> Result<Outcome> {
    let spec = ProblemSpec::Fourier(fourier_toy_spec());
    let mut wins = 0;
    let mut parts = Vec::new();
    for seed in FOURIER_SEEDS {
        let problem = build_problem(&spec, seed)?;
        match stop_and_extend(
            problem.as_ref(),
            &gd(FOURIER_LR),
            &eb_stopper(DEFAULT_BETA, false),
            10,
            FOURIER_CAP,
        )? {
            None => parts.push(format!("seed {seed}: no stop")),
            Some((stop, curve)) => {
                let at_stop = curve[stop];
                let at_end = *curve.last().expect("nonempty");
                let best = min_of(&curve);
                let ok = at_end > at_stop && at_stop <= 2.0 * best;
                wins += usize::from(ok);
                parts.push(format!(
                    "seed {seed}: stop {stop} {} (x{:.2} of min, end/stop {:.2})",
                    if ok { "ok" } else { "miss" },
                    at_stop / best,
                    at_end / at_stop
                ));
            }
        }
    }
    Ok(Outcome::new(
        7,
        TITLES[6],
        wins >= 4,
        format!("{wins}/5 seeds; {}", parts.join("; ")),
    ))
}

pub const WDBC_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
pub const WDBC_LR: f64 = 0.03;
pub const WDBC_HORIZON: usize = 2000;

fn wdbc_config(split: WdbcSplit, stopper: StopperConfig, seed: u64) -> RunConfig {
    RunConfig {
        problem: ProblemSpec::Wdbc {
            data_path: super::config::default_wdbc_path(),
            split,
        },
        optimizer: gd(WDBC_LR),
        stopper,
        seed,
        max_steps: WDBC_HORIZON,
        log_interval: Some(1),
        output: None,
        log_wall_time: false,
    }
}

pub fn wdbc_comparison() -> Result<Outcome> {
    let mut wins = 0;
    let mut parts = Vec::new();
    for seed in WDBC_SEEDS {
        let eb = run(&wdbc_config(
            WdbcSplit::FULL_TRAIN,
            eb_stopper(DEFAULT_BETA, false),
            seed,
        ))?;
        let val = run(&wdbc_config(
            WdbcSplit::WITH_VALIDATION,
            StopperConfig::default(),
            seed,
        ))?;
        let best_val_run = val.best_test.map(|(_, l)| l).unwrap_or(f64::INFINITY);
        match (eb.stop_step, eb.test_at_stop()) {
            (Some(stop), Some(test)) => {
                let ok = test < best_val_run;
                wins += usize::from(ok);
                parts.push(format!(
                    "seed {seed}: eb stop {stop} test {test:.4} vs val-run best {best_val_run:.4}"
                ));
            }
            _ => parts.push(format!(
                "seed {seed}: eb did not stop within {WDBC_HORIZON}"
            )),
        }
    }
    Ok(Outcome::new(
        8,
        TITLES[7],
        wins >= 3,
        format!("{wins}/5 seeds; {}", parts.join("; ")),
    ))
}

pub const MLP_SEED: u64 = 1;
pub const MLP_STEPS: usize = 2000;
/// One configuration per learning rate.
pub const MLP_LRS: [f64; 3] = [0.01, 0.02, 0.05];
pub const MLP_BATCH: usize = 32;

/// First step at which the warm-up value's share of the greedy EMA has
/// decayed below a tenth of the threshold.
pub fn mask_warmup_end(beta: f64, init: f64, threshold: f64) -> usize {
    ((0.1 * threshold / init).ln() / beta.ln()).ceil() as usize
}

fn mlp_config(kind: OptimizerKind, lr: f64) -> RunConfig {
    RunConfig {
        problem: ProblemSpec::Mlp {
            blobs: Blobs::default(),
            hidden: vec![32, 32],
        },
        optimizer: OptimizerConfig {
            kind,
            learning_rate: lr,
            batch_size: MLP_BATCH,
            ..OptimizerConfig::default()
        },
        stopper: StopperConfig::default(),
        seed: MLP_SEED,
        max_steps: MLP_STEPS,
        log_interval: Some(1),
        output: None,
        log_wall_time: false,
    }
}

/// Every configuration must keep the off-fraction monotone and the final
/// test loss within 10% of the unmasked run; at least one must have more
/// than 10% of the parameters switched off right after warm-up.
pub fn elementwise_stopping() -> Result<Outcome> {
    let base = mlp_config(OptimizerKind::MaskedSgdGreedy, MLP_LRS[0]);
    let problem = build_problem(&base.problem, MLP_SEED)?;
    let mut all_ok = true;
    let mut any_off = false;
    let mut parts = Vec::new();
    for lr in MLP_LRS {
        let masked_cfg = mlp_config(OptimizerKind::MaskedSgdGreedy, lr);
        let plain_cfg = RunConfig {
            log_interval: Some(MLP_STEPS),
            ..mlp_config(OptimizerKind::Sgd, lr)
        };
        let masked = run_on(&masked_cfg, problem.as_ref())?;
        let plain = run_on(&plain_cfg, problem.as_ref())?;
        let off: Vec<f64> = masked
            .records
            .iter()
            .filter_map(|r| r.off_fraction)
            .collect();
        let monotone = off.windows(2).all(|p| p[1] >= p[0]);
        let o = &masked_cfg.optimizer;
        let warm = mask_warmup_end(
            o.mask_beta,
            o.mask_init_value().expect("masked"),
            o.mask_threshold,
        );
        let off_warm = off.get(warm).copied().unwrap_or(0.0);
        let masked_test = masked.final_losses.test.unwrap_or(f64::NAN);
        let plain_test = plain.final_losses.test.unwrap_or(f64::NAN);
        let rel = (masked_test - plain_test) / plain_test;
        all_ok &= monotone && rel.abs() <= 0.1;
        any_off |= off_warm > 0.1;
        parts.push(format!(
            "lr {lr}: monotone {monotone}, off {off_warm:.3} at step {warm} ({:.3} final), test {masked_test:.4} vs {plain_test:.4} ({:+.1}%)",
            off.last().copied().unwrap_or(0.0),
            100.0 * rel
        ));
    }
    Ok(Outcome::new(
        9,
        TITLES[8],
        all_ok && any_off,
        parts.join("; "),
    ))
}

pub fn rmsprop_properties() -> Result<Outcome> {
    let mut rng = RngStream::new(10);
    let lr = 0.01;
    let grad: Vec<f64> = (0..100)
        .map(|_| rng.standard_normal() * 10f64.powf(4.0 * rng.uniform() - 2.0))
        .collect();
    let w: Vec<f64> = (0..100).map(|_| rng.standard_normal()).collect();
    let v: Vec<f64> = (0..100).map(|_| rng.uniform()).collect();
    let (w_new, _) = rmsprop_step(&w, &grad, &v, lr, 0.0, 0.0)?;
    let sign_err = w_new
        .iter()
        .zip(&w)
        .zip(&grad)
        .map(|((a, b), g)| ((b - a) - lr * g.signum()).abs())
        .fold(0.0, f64::max);
    let two = off_fraction_rmsprop(&[1.0, 1e4], 0.1)?;
    let uniform_zero = [0.1, 0.5, 0.9, 0.999]
        .iter()
        .all(|&t| off_fraction_rmsprop(&[3.0; 8], t).is_ok_and(|f| f == 0.0));
    let passed = sign_err <= 1e-12 && two == 0.5 && uniform_zero;
    Ok(Outcome::new(
        10,
        TITLES[9],
        passed,
        format!("sign-step error {sign_err:e}, two-element fraction {two}, uniform v gives 0: {uniform_zero}"),
    ))
}

fn scratch_path(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!(
        "ebstop-determinism-{}-{tag}.csv",
        std::process::id()
    ))
}

pub fn determinism_configs() -> Vec<RunConfig> {
    let mut mlp = mlp_config(OptimizerKind::MaskedSgdGreedy, MLP_LRS[1]);
    mlp.max_steps = 300;
    mlp.stopper = eb_stopper(DEFAULT_BETA, true).observe();
    if let ProblemSpec::Mlp { blobs, .. } = &mut mlp.problem {
        blobs.n_train = 300;
        blobs.n_test = 300;
    }
    let quad = RunConfig {
        problem: ProblemSpec::Quadratic {
            dim: 60,
            spectrum: SpectrumKind::Exponential { min: 0.1, max: 1.0 },
            lambda: QUAD_LAMBDA,
            init: QuadraticInit::Gaussian { variance: 20.0 },
        },
        optimizer: gd(QUAD_LR),
        stopper: eb_stopper(DEFAULT_BETA, false),
        seed: 7,
        max_steps: 3000,
        log_interval: None,
        output: None,
        log_wall_time: false,
    };
    let mut fourier = RunConfig {
        problem: ProblemSpec::Fourier(fourier_toy_spec()),
        optimizer: OptimizerConfig {
            kind: OptimizerKind::Sgd,
            learning_rate: FOURIER_LR,
            batch_size: 8,
            ..OptimizerConfig::default()
        },
        stopper: StopperConfig {
            kind: StopperKind::validation(),
            halt: true,
        },
        seed: 3,
        max_steps: 2000,
        log_interval: None,
        output: None,
        log_wall_time: false,
    };
    fourier.stopper.halt = false;
    vec![mlp, quad, fourier]
}

pub fn determinism() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for (i, base) in determinism_configs().into_iter().enumerate() {
        let mut bytes = Vec::new();
        for rep in 0..2 {
            let path = scratch_path(&format!("{i}-{rep}"));
            let cfg = RunConfig {
                output: Some(path.clone()),
                ..base.clone()
            };
            run(&cfg)?;
            bytes.push(std::fs::read(&path)?);
            std::fs::remove_file(&path)?;
        }
        let same = bytes[0] == bytes[1] && !bytes[0].is_empty();
        passed &= same;
        parts.push(format!(
            "{} ({} bytes) {}",
            base.problem.kind(),
            bytes[0].len(),
            if same { "identical" } else { "differ" }
        ));
    }
    Ok(Outcome::new(11, TITLES[10], passed, parts.join(", ")))
}
