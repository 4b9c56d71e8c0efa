use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::optim::{OptimizerConfig, OptimizerKind, StopperConfig, StopperKind};
use crate::problems::{Blobs, FourierToy, QuadraticInit, SpectrumKind, WdbcSplit};
use crate::stopping::{Boundary, DEFAULT_BETA, DEFAULT_PATIENCE, DEFAULT_WARMUP};

/// Location of the bundled breast-cancer file.
pub fn default_wdbc_path() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/wdbc.data"))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Quadratic {
        dim: usize,
        spectrum: SpectrumKind,
        lambda: f64,
        init: QuadraticInit,
    },
    Fourier(FourierToy),
    Wdbc {
        data_path: PathBuf,
        split: WdbcSplit,
    },
    Mlp {
        blobs: Blobs,
        hidden: Vec<usize>,
    },
}

impl ProblemSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemSpec::Quadratic { .. } => "quadratic",
            ProblemSpec::Fourier(_) => "fourier",
            ProblemSpec::Wdbc { .. } => "wdbc",
            ProblemSpec::Mlp { .. } => "mlp",
        }
    }

    /// Whether two specs draw the same underlying data. The WDBC
    /// validation hold-out may differ, since it only moves training rows.
    pub fn same_data(&self, other: &ProblemSpec) -> bool {
        match (self, other) {
            (
                ProblemSpec::Wdbc {
                    data_path: a,
                    split: sa,
                },
                ProblemSpec::Wdbc {
                    data_path: b,
                    split: sb,
                },
            ) => a == b && sa.n_test == sb.n_test,
            _ => self == other,
        }
    }
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub optimizer: OptimizerConfig,
    pub stopper: StopperConfig,
    pub seed: u64,
    pub max_steps: usize,
    /// `None` picks the default for the problem dimension.
    pub log_interval: Option<usize>,
    pub output: Option<PathBuf>,
    /// Adds a wall-clock column; such logs are no longer byte-reproducible.
    pub log_wall_time: bool,
}

/// One `key = value` assignment with its source line (0 for command-line
/// overrides).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Splits config text into entries. `#` starts a comment.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Parse {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty key".into(),
            });
        }
        out.push(Entry {
            key: key.to_string(),
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(out)
}

/// Parses a `key=value` command-line override.
pub fn parse_override(s: &str) -> Result<Entry> {
    let (key, value) = s.split_once('=').ok_or_else(|| Error::Config {
        key: s.to_string(),
        line: 0,
        message: "override must look like key=value".into(),
    })?;
    Ok(Entry {
        key: key.trim().to_string(),
        value: value.trim().to_string(),
        line: 0,
    })
}

const GENERAL_KEYS: &[&str] = &[
    "problem",
    "seed",
    "max_steps",
    "log_interval",
    "output",
    "log_wall_time",
    "optimizer",
    "lr",
    "batch_size",
    "rmsprop_gamma",
    "rmsprop_epsilon",
    "rmsprop_off_threshold",
    "mask_beta",
    "mask_threshold",
    "mask_init",
    "stopper",
    "halt",
    "eb_beta",
    "eb_warmup",
    "eb_boundary",
    "eb_grouped",
    "patience",
    "eval_interval",
];

fn problem_keys(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "quadratic" => &[
            "dim",
            "spectrum",
            "eig_min",
            "eig_max",
            "n_large",
            "lambda",
            "init",
            "init_variance",
            "counterexample_factor",
        ],
        "fourier" => &[
            "n_train",
            "n_val",
            "n_test",
            "noise_std",
            "intercept",
            "slope",
            "n_frequencies",
        ],
        "wdbc" => &["data_path", "n_test", "n_val"],
        "mlp" => &[
            "hidden",
            "n_features",
            "n_informative",
            "n_classes",
            "separation",
            "n_train",
            "n_val",
            "n_test",
        ],
        _ => return None,
    })
}

/// Last assignment wins, so overrides appended after the file take effect.
struct Lookup<'a> {
    entries: &'a [Entry],
}

impl<'a> Lookup<'a> {
    fn get(&self, key: &str) -> Option<&'a Entry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse_opt(key)?.unwrap_or(default))
    }

    fn parse_opt<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|e| {
                e.value.parse::<T>().map_err(|err| Error::Config {
                    key: key.to_string(),
                    line: e.line,
                    message: format!("cannot parse `{}`: {err}", e.value),
                })
            })
            .transpose()
    }

    fn word<'s>(&self, key: &str, default: &'s str) -> &'s str
    where
        'a: 's,
    {
        self.get(key).map_or(default, |e| e.value.as_str())
    }

    fn error(&self, key: &str, message: impl Into<String>) -> Error {
        Error::Config {
            key: key.to_string(),
            line: self.get(key).map_or(0, |e| e.line),
            message: message.into(),
        }
    }
}

/// Parses config text into a validated [`RunConfig`].
pub fn parse_config(text: &str) -> Result<RunConfig> {
    build_config(&parse_entries(text)?)
}

/// Builds a config from entries; later entries override earlier ones.
pub fn build_config(entries: &[Entry]) -> Result<RunConfig> {
    let lookup = Lookup { entries };
    let Some(problem_entry) = lookup.get("problem") else {
        return Err(Error::Config {
            key: "problem".into(),
            line: 0,
            message: "missing required key".into(),
        });
    };
    let kind = problem_entry.value.as_str();
    let Some(specific) = problem_keys(kind) else {
        return Err(lookup.error(
            "problem",
            format!("unknown problem `{kind}` (expected quadratic, fourier, wdbc or mlp)"),
        ));
    };
    for e in entries {
        if !GENERAL_KEYS.contains(&e.key.as_str()) && !specific.contains(&e.key.as_str()) {
            let message = if problem_keys("quadratic")
                .into_iter()
                .chain(problem_keys("fourier"))
                .chain(problem_keys("wdbc"))
                .chain(problem_keys("mlp"))
                .any(|keys| keys.contains(&e.key.as_str()))
            {
                format!("key does not apply to problem `{kind}`")
            } else {
                "unknown key".to_string()
            };
            return Err(Error::Config {
                key: e.key.clone(),
                line: e.line,
                message,
            });
        }
    }

    let problem = match kind {
        "quadratic" => {
            let eig_min = lookup.parse("eig_min", 0.1)?;
            let eig_max = lookup.parse("eig_max", 1.0)?;
            let spectrum = match lookup.word("spectrum", "exponential") {
                "uniform" => SpectrumKind::Uniform {
                    min: eig_min,
                    max: eig_max,
                },
                "exponential" => SpectrumKind::Exponential {
                    min: eig_min,
                    max: eig_max,
                },
                "structured" => SpectrumKind::Structured {
                    small: eig_min,
                    large: eig_max,
                    n_large: lookup.parse("n_large", 10)?,
                },
                other => return Err(lookup.error(
                    "spectrum",
                    format!(
                        "unknown spectrum `{other}` (expected uniform, exponential or structured)"
                    ),
                )),
            };
            let init =
                match lookup.word("init", "random") {
                    "random" => QuadraticInit::Gaussian {
                        variance: lookup.parse("init_variance", 20.0)?,
                    },
                    "counterexample" => QuadraticInit::Counterexample {
                        factor: lookup.parse("counterexample_factor", 3.0)?,
                    },
                    "optimum" => QuadraticInit::AtOptimum,
                    other => return Err(lookup.error(
                        "init",
                        format!(
                            "unknown init `{other}` (expected random, counterexample or optimum)"
                        ),
                    )),
                };
            ProblemSpec::Quadratic {
                dim: lookup.parse("dim", 1000)?,
                spectrum,
                lambda: lookup.parse("lambda", 10.0)?,
                init,
            }
        }
        "fourier" => {
            let d = FourierToy::default();
            ProblemSpec::Fourier(FourierToy {
                n_train: lookup.parse("n_train", d.n_train)?,
                n_val: lookup.parse("n_val", d.n_val)?,
                n_test: lookup.parse("n_test", d.n_test)?,
                noise_std: lookup.parse("noise_std", d.noise_std)?,
                intercept: lookup.parse("intercept", d.intercept)?,
                slope: lookup.parse("slope", d.slope)?,
                n_frequencies: lookup.parse("n_frequencies", d.n_frequencies)?,
            })
        }
        "wdbc" => ProblemSpec::Wdbc {
            data_path: lookup
                .get("data_path")
                .map_or_else(default_wdbc_path, |e| PathBuf::from(&e.value)),
            split: WdbcSplit {
                n_test: lookup.parse("n_test", 369)?,
                n_val: lookup.parse("n_val", 0)?,
            },
        },
        "mlp" => {
            let d = Blobs::default();
            let hidden = match lookup.get("hidden") {
                None => vec![32, 32],
                Some(e) if e.value.is_empty() || e.value == "none" => Vec::new(),
                Some(e) => e
                    .value
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|err| {
                        lookup.error("hidden", format!("expected widths like 32,32: {err}"))
                    })?,
            };
            ProblemSpec::Mlp {
                blobs: Blobs {
                    n_features: lookup.parse("n_features", d.n_features)?,
                    n_informative: lookup.parse("n_informative", d.n_informative)?,
                    n_classes: lookup.parse("n_classes", d.n_classes)?,
                    separation: lookup.parse("separation", d.separation)?,
                    n_train: lookup.parse("n_train", d.n_train)?,
                    n_val: lookup.parse("n_val", d.n_val)?,
                    n_test: lookup.parse("n_test", d.n_test)?,
                },
                hidden,
            }
        }
        _ => unreachable!("checked above"),
    };

    let od = OptimizerConfig::default();
    let optimizer_kind = {
        let name = lookup.word("optimizer", "gd");
        OptimizerKind::parse(name).ok_or_else(|| {
            lookup.error(
                "optimizer",
                format!("unknown optimizer `{name}` (expected gd, sgd, rmsprop, masked_sgd_greedy or masked_sgd_nongreedy)"),
            )
        })?
    };
    let optimizer = OptimizerConfig {
        kind: optimizer_kind,
        learning_rate: lookup.parse("lr", od.learning_rate)?,
        batch_size: lookup.parse("batch_size", od.batch_size)?,
        rmsprop_gamma: lookup.parse("rmsprop_gamma", od.rmsprop_gamma)?,
        rmsprop_epsilon: lookup.parse("rmsprop_epsilon", od.rmsprop_epsilon)?,
        rmsprop_off_threshold: lookup.parse("rmsprop_off_threshold", od.rmsprop_off_threshold)?,
        mask_beta: lookup.parse("mask_beta", od.mask_beta)?,
        mask_threshold: lookup.parse("mask_threshold", od.mask_threshold)?,
        mask_init: lookup.parse_opt("mask_init")?,
    };

    let kind = match lookup.word("stopper", "none") {
        "none" => StopperKind::None,
        "eb" => StopperKind::Eb {
            beta: lookup.parse("eb_beta", DEFAULT_BETA)?,
            warmup: lookup.parse("eb_warmup", DEFAULT_WARMUP)?,
            boundary: match lookup.word("eb_boundary", "inclusive") {
                "inclusive" => Boundary::Inclusive,
                "strict" => Boundary::Strict,
                other => {
                    return Err(lookup.error(
                        "eb_boundary",
                        format!("unknown boundary `{other}` (expected inclusive or strict)"),
                    ))
                }
            },
            grouped: lookup.parse("eb_grouped", true)?,
        },
        "validation" => StopperKind::Validation {
            patience: lookup.parse("patience", DEFAULT_PATIENCE)?,
            eval_interval: lookup.parse("eval_interval", 1)?,
        },
        other => {
            return Err(lookup.error(
                "stopper",
                format!("unknown stopper `{other}` (expected none, eb or validation)"),
            ))
        }
    };
    let stopper = StopperConfig {
        kind,
        halt: lookup.parse("halt", true)?,
    };

    let config = RunConfig {
        problem,
        optimizer,
        stopper,
        seed: lookup.parse("seed", 0)?,
        max_steps: lookup.parse("max_steps", 1000)?,
        log_interval: lookup.parse_opt("log_interval")?,
        output: lookup.get("output").map(|e| PathBuf::from(&e.value)),
        log_wall_time: lookup.parse("log_wall_time", false)?,
    };
    validate(&config, &lookup)?;
    Ok(config)
}

/// Checks that depend only on the config, reported against the offending key.
fn validate(config: &RunConfig, lookup: &Lookup<'_>) -> Result<()> {
    if config.max_steps == 0 {
        return Err(lookup.error("max_steps", "must be at least 1"));
    }
    if config.log_interval == Some(0) {
        return Err(lookup.error("log_interval", "must be at least 1"));
    }
    let opt = &config.optimizer;
    if !(opt.learning_rate > 0.0 && opt.learning_rate.is_finite()) {
        return Err(lookup.error("lr", "must be positive"));
    }
    let train_size = match &config.problem {
        ProblemSpec::Quadratic { dim, lambda, .. } => {
            if *dim == 0 {
                return Err(lookup.error("dim", "must be at least 1"));
            }
            if !(*lambda > 0.0) {
                return Err(lookup.error("lambda", "must be positive"));
            }
            if opt.kind.uses_batches() {
                return Err(
                    lookup.error("optimizer", "the quadratic problem has no samples; use gd")
                );
            }
            None
        }
        ProblemSpec::Fourier(toy) => Some(toy.n_train),
        ProblemSpec::Wdbc { split, .. } => {
            Some(569usize.saturating_sub(split.n_test + split.n_val))
        }
        ProblemSpec::Mlp { blobs, .. } => Some(blobs.n_train),
    };
    if let Some(n) = train_size {
        if opt.kind.uses_batches() && opt.batch_size > n {
            return Err(lookup.error(
                "batch_size",
                format!("{} exceeds the training-set size {n}", opt.batch_size),
            ));
        }
    }
    if opt.kind.uses_batches()
        && opt.batch_size < 2
        && (matches!(config.stopper.kind, StopperKind::Eb { .. }) || opt.kind.mask_mode().is_some())
    {
        return Err(lookup.error(
            "batch_size",
            "gradient variance needs at least 2 samples per batch",
        ));
    }
    if let StopperKind::Validation { .. } = config.stopper.kind {
        let has_val = match &config.problem {
            ProblemSpec::Quadratic { .. } => false,
            ProblemSpec::Fourier(toy) => toy.n_val > 0,
            ProblemSpec::Wdbc { split, .. } => split.n_val > 0,
            ProblemSpec::Mlp { blobs, .. } => blobs.n_val > 0,
        };
        if !has_val {
            return Err(lookup.error("stopper", "validation stopper needs n_val > 0"));
        }
    }
    Ok(())
}

fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

impl RunConfig {
    /// Config text that parses back to `self`.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<String> = Vec::new();
        let mut put = |k: &str, v: String| lines.push(format!("{k} = {v}"));
        put("problem", self.problem.kind().into());
        match &self.problem {
            ProblemSpec::Quadratic {
                dim,
                spectrum,
                lambda,
                init,
            } => {
                put("dim", dim.to_string());
                match spectrum {
                    SpectrumKind::Uniform { min, max } | SpectrumKind::Exponential { min, max } => {
                        let name = if matches!(spectrum, SpectrumKind::Uniform { .. }) {
                            "uniform"
                        } else {
                            "exponential"
                        };
                        put("spectrum", name.into());
                        put("eig_min", format_f64(*min));
                        put("eig_max", format_f64(*max));
                    }
                    SpectrumKind::Structured {
                        small,
                        large,
                        n_large,
                    } => {
                        put("spectrum", "structured".into());
                        put("eig_min", format_f64(*small));
                        put("eig_max", format_f64(*large));
                        put("n_large", n_large.to_string());
                    }
                }
                put("lambda", format_f64(*lambda));
                match init {
                    QuadraticInit::AtOptimum => put("init", "optimum".into()),
                    QuadraticInit::Gaussian { variance } => {
                        put("init", "random".into());
                        put("init_variance", format_f64(*variance));
                    }
                    QuadraticInit::Counterexample { factor } => {
                        put("init", "counterexample".into());
                        put("counterexample_factor", format_f64(*factor));
                    }
                }
            }
            ProblemSpec::Fourier(t) => {
                put("n_train", t.n_train.to_string());
                put("n_val", t.n_val.to_string());
                put("n_test", t.n_test.to_string());
                put("noise_std", format_f64(t.noise_std));
                put("intercept", format_f64(t.intercept));
                put("slope", format_f64(t.slope));
                put("n_frequencies", t.n_frequencies.to_string());
            }
            ProblemSpec::Wdbc { data_path, split } => {
                put("data_path", data_path.display().to_string());
                put("n_test", split.n_test.to_string());
                put("n_val", split.n_val.to_string());
            }
            ProblemSpec::Mlp { blobs, hidden } => {
                let widths: Vec<String> = hidden.iter().map(|w| w.to_string()).collect();
                put(
                    "hidden",
                    if widths.is_empty() {
                        "none".into()
                    } else {
                        widths.join(",")
                    },
                );
                put("n_features", blobs.n_features.to_string());
                put("n_informative", blobs.n_informative.to_string());
                put("n_classes", blobs.n_classes.to_string());
                put("separation", format_f64(blobs.separation));
                put("n_train", blobs.n_train.to_string());
                put("n_val", blobs.n_val.to_string());
                put("n_test", blobs.n_test.to_string());
            }
        }
        let o = &self.optimizer;
        put("optimizer", o.kind.name().into());
        put("lr", format_f64(o.learning_rate));
        put("batch_size", o.batch_size.to_string());
        put("rmsprop_gamma", format_f64(o.rmsprop_gamma));
        put("rmsprop_epsilon", format_f64(o.rmsprop_epsilon));
        put("rmsprop_off_threshold", format_f64(o.rmsprop_off_threshold));
        put("mask_beta", format_f64(o.mask_beta));
        put("mask_threshold", format_f64(o.mask_threshold));
        if let Some(init) = o.mask_init {
            put("mask_init", format_f64(init));
        }
        put("stopper", self.stopper.kind.name().into());
        put("halt", self.stopper.halt.to_string());
        match &self.stopper.kind {
            StopperKind::None => {}
            StopperKind::Eb {
                beta,
                warmup,
                boundary,
                grouped,
            } => {
                put("eb_beta", format_f64(*beta));
                put("eb_warmup", format_f64(*warmup));
                put(
                    "eb_boundary",
                    match boundary {
                        Boundary::Inclusive => "inclusive",
                        Boundary::Strict => "strict",
                    }
                    .into(),
                );
                put("eb_grouped", grouped.to_string());
            }
            StopperKind::Validation {
                patience,
                eval_interval,
            } => {
                put("patience", patience.to_string());
                put("eval_interval", eval_interval.to_string());
            }
        }
        put("seed", self.seed.to_string());
        put("max_steps", self.max_steps.to_string());
        if let Some(n) = self.log_interval {
            put("log_interval", n.to_string());
        }
        if let Some(p) = &self.output {
            put("output", p.display().to_string());
        }
        put("log_wall_time", self.log_wall_time.to_string());
        let mut text = lines.join("\n");
        text.push('\n');
        text
    }
}
