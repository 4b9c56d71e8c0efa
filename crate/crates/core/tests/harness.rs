use std::path::Path;
use std::process::Command;

use ebstop::harness::{compare, parse_config, run, ProblemSpec, RunConfig};
use ebstop::optim::{OptimizerKind, StopperKind};
use ebstop::problems::SpectrumKind;
use ebstop::Error;

fn config_error_key(text: &str) -> (String, usize) {
    match parse_config(text) {
        Err(Error::Config { key, line, .. }) => (key, line),
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn minimal_quadratic_gets_defaults() {
    let c = parse_config("problem = quadratic\ndim = 1000\nspectrum = exponential\nseed = 1\n")
        .unwrap();
    match c.problem {
        ProblemSpec::Quadratic {
            dim,
            spectrum,
            lambda,
            ..
        } => {
            assert_eq!(dim, 1000);
            assert_eq!(spectrum, SpectrumKind::Exponential { min: 0.1, max: 1.0 });
            assert_eq!(lambda, 10.0);
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(c.seed, 1);
    assert_eq!(c.optimizer.kind, OptimizerKind::Gd);
    assert_eq!(c.stopper.kind, StopperKind::None);
}

#[test]
fn config_errors_name_key_and_line() {
    assert_eq!(
        config_error_key("problem = fourier\n# note\nlearning_rate = 0.1\n"),
        ("learning_rate".into(), 3)
    );
    assert_eq!(
        config_error_key("problem = fourier\nlr = fast\n"),
        ("lr".into(), 2)
    );
    assert_eq!(config_error_key("seed = 3\n"), ("problem".into(), 0));
    assert_eq!(
        config_error_key("problem = fourier\nspectrum = uniform\n"),
        ("spectrum".into(), 2)
    );
    assert_eq!(
        config_error_key("problem = fourier\noptimizer = sgd\nbatch_size = 64\n"),
        ("batch_size".into(), 3)
    );
    assert_eq!(
        config_error_key("problem = quadratic\noptimizer = sgd\n"),
        ("optimizer".into(), 2)
    );
    assert!(matches!(
        parse_config("problem fourier\n"),
        Err(Error::Parse { line: 1, .. })
    ));
}

#[test]
fn mlp_settings_parse() {
    let c = parse_config(
        "problem = mlp\nhidden = 64,32\noptimizer = masked_sgd_greedy\nlr = 0.01\nbatch_size = 128\nstopper = eb\neb_grouped = true\n",
    )
    .unwrap();
    assert_eq!(c.optimizer.learning_rate, 0.01);
    assert_eq!(c.optimizer.batch_size, 128);
    assert!(matches!(c.problem, ProblemSpec::Mlp { ref hidden, .. } if hidden == &[64, 32]));
}

#[test]
fn config_text_round_trips() {
    let texts = [
        "problem = quadratic\nspectrum = structured\nn_large = 4\ninit = counterexample\nstopper = eb\neb_boundary = strict\n",
        "problem = fourier\noptimizer = rmsprop\nbatch_size = 10\nrmsprop_epsilon = 0\nstopper = validation\npatience = 3\n",
        "problem = wdbc\nn_val = 60\noptimizer = sgd\nbatch_size = 20\noutput = /tmp/x.csv\n",
        "problem = mlp\nhidden = none\noptimizer = masked_sgd_nongreedy\nmask_init = -5\nlog_interval = 7\n",
    ];
    for t in texts {
        let c = parse_config(t).unwrap();
        assert_eq!(parse_config(&c.to_text()).unwrap(), c, "{t}");
    }
}

fn small_config(dir: &Path, name: &str) -> RunConfig {
    let mut c = parse_config(
        "problem = mlp\nhidden = 8\nn_train = 120\nn_test = 50\nn_val = 30\noptimizer = masked_sgd_greedy\nbatch_size = 16\nlr = 0.05\nstopper = eb\nhalt = false\nmax_steps = 120\nlog_interval = 1\n",
    )
    .unwrap();
    c.output = Some(dir.join(name));
    c
}

#[test]
fn log_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path(), "log.csv");
    let summary = run(&config).unwrap();
    let text = std::fs::read_to_string(dir.path().join("log.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..3], &["step", "train_loss", "test_loss"]);
    assert!(header.contains(&"off_W0") && header.contains(&"criterion_b1"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), summary.records.len());
    for (row, rec) in rows.iter().zip(&summary.records) {
        assert_eq!(row.len(), header.len());
        assert_eq!(row[0].parse::<usize>().unwrap(), rec.step);
        assert_eq!(row[1].parse::<f64>().unwrap(), rec.train_loss);
        assert_eq!(row[2].parse::<f64>().unwrap(), rec.test_loss.unwrap());
        let opt = |s: &str| (!s.is_empty()).then(|| s.parse::<f64>().unwrap());
        assert_eq!(opt(row[5]), rec.smoothed_criterion);
        assert_eq!(opt(row[6]), rec.off_fraction);
    }
}

#[test]
fn compare_tables_share_data() {
    let dir = tempfile::tempdir().unwrap();
    let eb = small_config(dir.path(), "a.csv");
    let mut none = eb.clone();
    none.stopper.kind = StopperKind::None;
    none.output = None;
    let rows = compare(&[eb.clone(), none.clone()]).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].stop_step.is_none());
    assert!(rows[1].regret().unwrap() >= 0.0);
    assert_eq!(compare(&[none.clone()]).unwrap().len(), 1);
    let mut other = none;
    other.seed += 1;
    assert!(compare(&[eb, other]).is_err());
}

#[test]
fn wdbc_validation_and_full_splits_compare() {
    let full = parse_config("problem = wdbc\nstopper = eb\nlr = 0.03\nmax_steps = 50\nseed = 4\n")
        .unwrap();
    let val = parse_config(
        "problem = wdbc\nn_val = 60\nstopper = validation\nlr = 0.03\nmax_steps = 50\nseed = 4\n",
    )
    .unwrap();
    assert!(full.problem.same_data(&val.problem));
    assert_eq!(compare(&[full, val]).unwrap().len(), 2);
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ebstop"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let good = write(
        "good.cfg",
        "problem = fourier\nstopper = eb\nlr = 0.05\nmax_steps = 2000\n",
    );
    let out_path = dir.path().join("run.csv");
    let out = cli(&[
        "run",
        "--config",
        &good,
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("stop step"));
    assert!(out_path.exists());

    let bad = write("bad.cfg", "problem = fourier\nbogus = 1\n");
    let out = cli(&["run", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let out = cli(&["run", "--config", &good, "--set", "lr=-1"]);
    assert_eq!(out.status.code(), Some(2));

    let diverge = write(
        "div.cfg",
        "problem = quadratic\ndim = 10\nlr = 100\nmax_steps = 5000\n",
    );
    assert_eq!(cli(&["run", "--config", &diverge]).status.code(), Some(3));

    let missing = dir.path().join("missing.cfg");
    assert_eq!(
        cli(&["run", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );
    let unwritable = dir.path().join("no/such/dir/log.csv");
    assert_eq!(
        cli(&[
            "run",
            "--config",
            &good,
            "--out",
            unwritable.to_str().unwrap()
        ])
        .status
        .code(),
        Some(4)
    );

    assert_eq!(cli(&["run"]).status.code(), Some(2));
    let out = cli(&["gradcheck", "--points", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let out = cli(&["repro", "--only", "1", "--only", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 2);
}

#[test]
fn cli_seed_override_changes_log() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    std::fs::write(
        &cfg,
        "problem = fourier\noptimizer = sgd\nbatch_size = 5\nmax_steps = 50\n",
    )
    .unwrap();
    let log = |seed: &str, name: &str| {
        let p = dir.path().join(name);
        let out = cli(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    assert_eq!(log("1", "a"), log("1", "b"));
    assert_ne!(log("1", "c"), log("2", "d"));
}
