use std::fs::File;
use std::io::BufWriter;

use super::config::{ProblemSpec, RunConfig};
use super::log::{format_float, LogSchema, LogWriter};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::optim::{default_log_interval, train_loop, LoopConfig, RunSummary, StopperKind};
use crate::problems::{
    load_wdbc_raw, make_quadratic, wdbc_dataset, LeastSquares, Logistic, MlpArchitecture,
    Objective, SupervisedProblem,
};

/// Stream ids derived from the run seed. Mini-batches use stream 0.
pub const DATA_STREAM: u64 = 1;
pub const INIT_STREAM: u64 = 2;

/// Instantiates the problem a spec describes; all randomness comes from `seed`.
pub fn build_problem(spec: &ProblemSpec, seed: u64) -> Result<Box<dyn Objective<f64>>> {
    let mut data_rng = RngStream::with_stream(seed, DATA_STREAM);
    let mut init_rng = RngStream::with_stream(seed, INIT_STREAM);
    Ok(match spec {
        ProblemSpec::Quadratic {
            dim,
            spectrum,
            lambda,
            init,
        } => Box::new(
            make_quadratic::<f64>(*dim, *spectrum, *lambda, &mut data_rng)?
                .with_init(*init, &mut init_rng)?,
        ),
        ProblemSpec::Fourier(toy) => {
            let (data, features) = toy.generate::<f64>(&mut data_rng)?;
            let model = LeastSquares {
                n_features: features.dim(),
            };
            Box::new(SupervisedProblem::new(
                "fourier",
                model,
                &data,
                vec![0.0; features.dim()],
            )?)
        }
        ProblemSpec::Wdbc { data_path, split } => {
            let raw = load_wdbc_raw(data_path)?;
            let data = wdbc_dataset::<f64>(&raw, *split, &mut data_rng)?;
            let n = data.n_features();
            let model = Logistic {
                n_features: n,
                split_bias: true,
            };
            Box::new(SupervisedProblem::new("wdbc", model, &data, vec![0.0; n])?)
        }
        ProblemSpec::Mlp { blobs, hidden } => {
            let data = blobs.generate::<f64>(&mut data_rng)?;
            let mut widths = vec![blobs.n_features];
            widths.extend(hidden);
            widths.push(blobs.n_classes);
            let arch = MlpArchitecture::new(widths)?;
            let init = arch.he_init(&mut init_rng);
            Box::new(SupervisedProblem::new("mlp", arch, &data, init)?)
        }
    })
}

fn log_schema(config: &RunConfig, problem: &dyn Objective<f64>) -> LogSchema {
    let partition = problem.partition();
    let names = || partition.names().to_vec();
    let criterion_groups = match config.stopper.kind {
        StopperKind::Eb { grouped: true, .. } if partition.len() > 1 => names(),
        _ => Vec::new(),
    };
    let off_groups = if config.optimizer.kind.mask_mode().is_some() && partition.len() > 1 {
        names()
    } else {
        Vec::new()
    };
    LogSchema {
        criterion_groups,
        off_groups,
        wall_time: config.log_wall_time,
    }
}

/// Executes one run and writes its log to `config.output` when set.
pub fn run(config: &RunConfig) -> Result<RunSummary<f64>> {
    let problem = build_problem(&config.problem, config.seed)?;
    run_on(config, problem.as_ref())
}

/// Like [`run`] on an already built problem.
pub fn run_on(config: &RunConfig, problem: &dyn Objective<f64>) -> Result<RunSummary<f64>> {
    let loop_config = LoopConfig {
        max_steps: config.max_steps,
        log_interval: config
            .log_interval
            .unwrap_or_else(|| default_log_interval(problem.dim())),
        seed: config.seed,
    };
    match &config.output {
        Some(path) => {
            let file = BufWriter::new(File::create(path)?);
            let mut writer = LogWriter::new(file, log_schema(config, problem))?;
            let summary = train_loop(
                problem,
                &config.optimizer,
                &config.stopper,
                &loop_config,
                &mut |r| writer.write(r),
            )?;
            writer.finish()?;
            Ok(summary)
        }
        None => train_loop(
            problem,
            &config.optimizer,
            &config.stopper,
            &loop_config,
            &mut |_| Ok(()),
        ),
    }
}

fn opt_float(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), format_float)
}

/// Human-readable run summary.
pub fn summary_text(config: &RunConfig, summary: &RunSummary<f64>) -> String {
    let mut out = String::new();
    let stop = match summary.stop_step {
        Some(s) => s.to_string(),
        None => format!("{} (no stop)", summary.steps_run),
    };
    out.push_str(&format!(
        "problem {} | optimizer {} | stopper {} | seed {}\n",
        config.problem.kind(),
        config.optimizer.kind.name(),
        config.stopper.kind.name(),
        config.seed
    ));
    out.push_str(&format!("stop step          {stop}\n"));
    out.push_str(&format!(
        "criterion at stop  {}\n",
        opt_float(summary.stop_criterion)
    ));
    let at_stop = summary.stop_losses.unwrap_or(summary.final_losses);
    out.push_str(&format!(
        "train loss at stop {}\n",
        format_float(at_stop.train)
    ));
    out.push_str(&format!("test loss at stop  {}\n", opt_float(at_stop.test)));
    match summary.best_test {
        Some((step, loss)) => out.push_str(&format!(
            "best test          {} at step {step}\n",
            format_float(loss)
        )),
        None => out.push_str("best test          -\n"),
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub label: String,
    pub stop_step: Option<usize>,
    pub steps_run: usize,
    pub test_at_stop: Option<f64>,
    pub best_test: Option<(usize, f64)>,
}

impl CompareRow {
    /// Test loss at the stop minus the best test loss seen in the run.
    pub fn regret(&self) -> Option<f64> {
        Some(self.test_at_stop? - self.best_test?.1)
    }
}

/// Runs every config to `max_steps` (stop events are recorded but do not
/// halt), so the hindsight-best loss covers the whole horizon.
pub fn compare(configs: &[RunConfig]) -> Result<Vec<CompareRow>> {
    let Some(first) = configs.first() else {
        return Err(Error::invalid("compare needs at least one config"));
    };
    for c in &configs[1..] {
        if !c.problem.same_data(&first.problem) || c.seed != first.seed {
            return Err(Error::invalid(format!(
                "compared configs must share problem data and seed ({} seed {} vs {} seed {})",
                first.problem.kind(),
                first.seed,
                c.problem.kind(),
                c.seed
            )));
        }
    }
    configs
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.stopper.halt = false;
            let summary = run(&c)?;
            let test_at_stop = match summary.stop_step {
                Some(s) => summary
                    .records
                    .iter()
                    .find(|r| r.step == s)
                    .and_then(|r| r.test_loss),
                None => summary.final_losses.test,
            };
            Ok(CompareRow {
                label: format!("{}/{}", c.stopper.kind.name(), c.optimizer.kind.name()),
                stop_step: summary.stop_step,
                steps_run: summary.steps_run,
                test_at_stop,
                best_test: summary.best_test,
            })
        })
        .collect()
}

pub fn compare_table(rows: &[CompareRow]) -> String {
    let mut out = format!(
        "{:<28} {:>9} {:>14} {:>9} {:>14} {:>12}\n",
        "stopper", "stop", "test@stop", "best@", "best_test", "regret"
    );
    for r in rows {
        let stop = r
            .stop_step
            .map_or_else(|| format!("{}*", r.steps_run), |s| s.to_string());
        let (best_step, best) = match r.best_test {
            Some((s, l)) => (s.to_string(), format!("{l:.6}")),
            None => ("-".into(), "-".into()),
        };
        out.push_str(&format!(
            "{:<28} {:>9} {:>14} {:>9} {:>14} {:>12}\n",
            r.label,
            stop,
            r.test_at_stop
                .map_or_else(|| "-".into(), |l| format!("{l:.6}")),
            best_step,
            best,
            r.regret()
                .map_or_else(|| "-".into(), |x| format!("{x:.3e}")),
        ));
    }
    out
}
