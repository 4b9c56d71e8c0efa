use ebstop::numerics::{DenseMatrix, RngStream};
use ebstop::optim::{
    train_loop, LoopConfig, OptimizerConfig, OptimizerKind, RunSummary, StopperConfig, StopperKind,
};
use ebstop::problems::{
    make_fourier_toy, make_quadratic, LeastSquares, Objective, QuadraticInit, QuadraticProblem,
    SpectrumKind, SupervisedProblem,
};
use ebstop::stopping::{Boundary, EbState, StopDecision};
use ebstop::EmaSmoother;
use ebstop::{Error, Result};

fn quadratic(dim: usize, init: QuadraticInit) -> QuadraticProblem<f64> {
    let mut rng = RngStream::new(21);
    make_quadratic(
        dim,
        SpectrumKind::Uniform { min: 0.1, max: 1.0 },
        10.0,
        &mut rng,
    )
    .unwrap()
    .with_init(init, &mut rng)
    .unwrap()
}

fn fourier() -> SupervisedProblem<f64, LeastSquares> {
    let (data, phi) = make_fourier_toy::<f64>(20, 10, 1.0, &mut RngStream::new(8)).unwrap();
    SupervisedProblem::new(
        "fourier",
        LeastSquares {
            n_features: phi.dim(),
        },
        &data,
        vec![0.0; phi.dim()],
    )
    .unwrap()
}

fn optimizer(kind: OptimizerKind, lr: f64, batch_size: usize) -> OptimizerConfig {
    OptimizerConfig {
        kind,
        learning_rate: lr,
        batch_size,
        ..OptimizerConfig::default()
    }
}

fn eb(beta: f64) -> StopperConfig {
    StopperConfig {
        kind: StopperKind::Eb {
            beta,
            warmup: -9.0,
            boundary: Boundary::Inclusive,
            grouped: false,
        },
        halt: true,
    }
}

fn train(
    problem: &dyn Objective<f64>,
    opt: &OptimizerConfig,
    stopper: &StopperConfig,
    max_steps: usize,
) -> Result<RunSummary<f64>> {
    let config = LoopConfig {
        max_steps,
        log_interval: 1,
        seed: 5,
    };
    train_loop(problem, opt, stopper, &config, &mut |_| Ok(()))
}

#[test]
fn ema_crossing_matches_closed_form() {
    let mut state = EbState::new(1, 0.999, -9.0, Boundary::Inclusive).unwrap();
    let mut updates = 0;
    loop {
        updates += 1;
        if state.update_and_decide(&[0.1]).unwrap() == StopDecision::Stop {
            break;
        }
    }
    let closed = ((0.1f64 / 9.1).ln() / 0.999f64.ln()).ceil() as usize;
    assert_eq!(closed, 4509);
    assert_eq!(updates, closed);
    assert_eq!(
        EmaSmoother::crossing_steps(0.999, -9.0, 0.1, 0.0),
        Some(closed)
    );
}

#[test]
fn zero_gradient_problem_stops_at_warmup_crossing() {
    // Started at the empirical minimizer the sampled gradient is exactly zero,
    // so the raw criterion is 1 at every step.
    let p = quadratic(20, QuadraticInit::Counterexample { factor: 1.0 });
    let s = train(&p, &optimizer(OptimizerKind::Gd, 0.1, 1), &eb(0.99), 10_000).unwrap();
    let expected = EmaSmoother::crossing_steps(0.99, -9.0, 1.0, 0.0).unwrap();
    assert_eq!(expected, 230);
    assert_eq!(s.stop_step, Some(expected - 1));
    assert_eq!(s.steps_run, expected - 1);
    assert!(s.records.iter().all(|r| r.criterion == Some(1.0)));
}

#[test]
fn no_stopper_runs_exactly_max_steps() {
    let p = fourier();
    let s = train(
        &p,
        &optimizer(OptimizerKind::Gd, 0.05, 1),
        &StopperConfig::default(),
        37,
    )
    .unwrap();
    assert_eq!(s.steps_run, 37);
    assert_eq!(s.stop_step, None);
    assert_eq!(s.records.len(), 38);
    assert!(s.records.windows(2).all(|r| r[1].step > r[0].step));
}

#[test]
fn rejects_zero_steps_and_single_sample_batches() {
    let p = fourier();
    let gd = optimizer(OptimizerKind::Gd, 0.05, 1);
    assert!(train(&p, &gd, &StopperConfig::default(), 0).is_err());
    let sgd1 = optimizer(OptimizerKind::Sgd, 0.05, 1);
    assert!(matches!(
        train(&p, &sgd1, &eb(0.99), 10),
        Err(Error::InsufficientSamples { needed: 2, have: 1 })
    ));
    assert!(train(&p, &sgd1, &StopperConfig::default(), 10).is_ok());
    let too_big = optimizer(OptimizerKind::Sgd, 0.05, 21);
    assert!(train(&p, &too_big, &StopperConfig::default(), 10).is_err());
}

#[test]
fn divergence_reports_step() {
    let p = quadratic(10, QuadraticInit::Gaussian { variance: 1.0 });
    match train(
        &p,
        &optimizer(OptimizerKind::Gd, 100.0, 1),
        &StopperConfig::default(),
        5000,
    ) {
        Err(Error::Divergence { step }) => assert!(step > 0 && step < 5000),
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn gd_contracts_in_hessian_norm() {
    let p = quadratic(40, QuadraticInit::Gaussian { variance: 5.0 });
    let target = p.empirical_minimizer();
    let b: &DenseMatrix<f64> = p.hessian();
    let b_norm = |w: &[f64]| {
        let d: Vec<f64> = w.iter().zip(&target).map(|(a, t)| a - t).collect();
        let bd = b.matvec(&d).unwrap();
        d.iter().zip(&bd).map(|(x, y)| x * y).sum::<f64>()
    };
    let mut w = p.init().to_vec();
    let mut last = b_norm(&w);
    for _ in 0..100 {
        let g = p.evaluate(&w).unwrap().emp_grad;
        w = ebstop::optim::gd_step(&w, &g, 1.5).unwrap();
        let now = b_norm(&w);
        assert!(now < last);
        last = now;
    }
}

#[test]
fn full_batch_sgd_equals_gd() {
    let p = fourier();
    let gd = train(
        &p,
        &optimizer(OptimizerKind::Gd, 0.05, 1),
        &StopperConfig::default(),
        50,
    )
    .unwrap();
    let sgd = train(
        &p,
        &optimizer(OptimizerKind::Sgd, 0.05, 20),
        &StopperConfig::default(),
        50,
    )
    .unwrap();
    assert_eq!(gd.final_params, sgd.final_params);
}

#[test]
fn same_seed_same_trajectory() {
    let p = fourier();
    let opt = optimizer(OptimizerKind::Sgd, 0.05, 8);
    let a = train(&p, &opt, &eb(0.9).observe(), 300).unwrap();
    let b = train(&p, &opt, &eb(0.9).observe(), 300).unwrap();
    assert_eq!(a.final_params, b.final_params);
    assert_eq!(a.stop_step, b.stop_step);
}

#[test]
fn observe_mode_records_stop_and_continues() {
    let p = fourier();
    let opt = optimizer(OptimizerKind::Gd, 0.05, 1);
    let halted = train(&p, &opt, &eb(0.99), 5000).unwrap();
    let stop = halted.stop_step.expect("criterion fires");
    let observed = train(&p, &opt, &eb(0.99).observe(), 2 * stop).unwrap();
    assert_eq!(observed.stop_step, Some(stop));
    assert_eq!(observed.steps_run, 2 * stop);
    assert_eq!(observed.params_at_stop, Some(halted.final_params.clone()));
    assert_eq!(observed.records.iter().filter(|r| r.stop_event).count(), 1);
}

#[test]
fn validation_stopper_halts_on_patience() {
    let p = fourier();
    let stopper = StopperConfig {
        kind: StopperKind::Validation {
            patience: 5,
            eval_interval: 10,
        },
        halt: true,
    };
    let s = train(
        &p,
        &optimizer(OptimizerKind::Gd, 0.05, 1),
        &stopper,
        100_000,
    )
    .unwrap();
    let stop = s.stop_step.expect("validation loss stops improving");
    let best = s.best_val_step.unwrap();
    assert_eq!(stop - best, 50);
}

#[test]
fn masked_and_rmsprop_runs_log_off_fractions() {
    let p = fourier();
    for kind in [
        OptimizerKind::MaskedSgdGreedy,
        OptimizerKind::MaskedSgdNongreedy,
        OptimizerKind::Rmsprop,
    ] {
        let s = train(
            &p,
            &optimizer(kind, 0.01, 10),
            &StopperConfig::default(),
            200,
        )
        .unwrap();
        let offs: Vec<f64> = s.records.iter().filter_map(|r| r.off_fraction).collect();
        assert_eq!(offs.len(), 200, "{kind:?}");
        assert!(offs.iter().all(|f| (0.0..=1.0).contains(f)));
        if kind == OptimizerKind::MaskedSgdGreedy {
            assert!(offs.windows(2).all(|w| w[1] >= w[0]));
        }
    }
}
