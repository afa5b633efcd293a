//! Flat key-value benchmark configuration. Lines are `key = value`; `#`
//! starts a comment; dotted keys select sections (`ffeam.epochs`,
//! `dataset.mydata.path`). Unknown keys are rejected.

use std::path::PathBuf;

use serde::Serialize;

use crate::baselines::{AeConfig, CeAannConfig, KnnConfig};
use crate::dataset::SyntheticSpec;
use crate::error::{Error, Result};
use crate::model::{RbfConfig, RbfNorm, TrainConfig};
use crate::prefill::{PrefillConfig, PrefillMethod};

/// One of the shipped imputation methods.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Means,
    Knn,
    Ae,
    CeAann,
    Ffeam,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Means,
        Method::Knn,
        Method::Ae,
        Method::CeAann,
        Method::Ffeam,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Means => "means",
            Method::Knn => "knn",
            Method::Ae => "ae",
            Method::CeAann => "ce_aann",
            Method::Ffeam => "ffeam",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "means" => Ok(Method::Means),
            "knn" => Ok(Method::Knn),
            "ae" => Ok(Method::Ae),
            "ce_aann" => Ok(Method::CeAann),
            "ffeam" => Ok(Method::Ffeam),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (expected means | knn | ae | ce_aann | ffeam)"
            ))),
        }
    }
}

/// Where a named dataset comes from.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    /// One of the bundled fixtures (`iris`, `seeds`, `ds3_7`, ...).
    Builtin,
    Csv {
        path: PathBuf,
        missing_token: String,
    },
    Synthetic(SyntheticSpec),
}

#[derive(Clone, Debug, Serialize)]
pub struct DatasetSpec {
    pub name: String,
    pub source: DatasetSource,
}

/// Fully resolved benchmark configuration.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub datasets: Vec<DatasetSpec>,
    pub rates: Vec<f64>,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    pub normalize: bool,
    pub prefill: PrefillConfig,
    pub rbf: RbfConfig,
    pub ffeam: TrainConfig,
    pub ae: AeConfig,
    pub ce_aann: CeAannConfig,
    pub knn: KnnConfig,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            datasets: vec![DatasetSpec {
                name: "iris".into(),
                source: DatasetSource::Builtin,
            }],
            rates: vec![0.2, 0.3, 0.4, 0.5],
            seeds: vec![0, 1, 2, 3, 4],
            methods: Method::ALL.to_vec(),
            normalize: false,
            prefill: PrefillConfig::default(),
            rbf: RbfConfig::default(),
            ffeam: TrainConfig::default(),
            ae: AeConfig::default(),
            ce_aann: CeAannConfig::default(),
            knn: KnnConfig::default(),
            output_dir: None,
        }
    }
}

fn cfg_err(key: &str, detail: impl std::fmt::Display) -> Error {
    Error::Config(format!("key '{key}': {detail}"))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| cfg_err(key, format!("'{v}' is not a number")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| cfg_err(key, format!("'{v}' is not a non-negative integer")))
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse::<u64>()
        .map_err(|_| cfg_err(key, format!("'{v}' is not a non-negative integer")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(cfg_err(key, format!("'{v}' is not a boolean"))),
    }
}

fn parse_list<T>(key: &str, v: &str, f: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| f(key, t))
        .collect()
}

/// Set one field of a training-config section; returns false when the field
/// name is not part of the shared hyperparameter surface.
fn apply_train_key(t: &mut TrainConfig, key: &str, field: &str, v: &str) -> Result<bool> {
    match field {
        "learning_rate" => t.learning_rate = parse_f64(key, v)?,
        "epochs" => t.epochs = parse_usize(key, v)?,
        "batch_size" => t.batch_size = parse_usize(key, v)?,
        "m1" => t.m1 = parse_usize(key, v)?,
        "m2" => t.m2 = parse_usize(key, v)?,
        "adam_beta1" => t.adam_beta1 = parse_f64(key, v)?,
        "adam_beta2" => t.adam_beta2 = parse_f64(key, v)?,
        "adam_eps" => t.adam_eps = parse_f64(key, v)?,
        "init_scale" => t.init_scale = parse_f64(key, v)?,
        "seed" => t.seed = parse_u64(key, v)?,
        "rbf_norm" => {
            t.rbf_norm = match v {
                "squared" => RbfNorm::Squared,
                "as_written" => RbfNorm::AsWritten,
                _ => {
                    return Err(cfg_err(
                        key,
                        format!("'{v}' is not a norm mode (squared | as_written)"),
                    ))
                }
            }
        }
        _ => return Ok(false),
    }
    Ok(true)
}

/// Per-dataset keys arrive before we know the dataset list, so they are
/// staged here and resolved at the end.
#[derive(Default)]
struct DatasetOverride {
    path: Option<PathBuf>,
    missing_token: Option<String>,
    synthetic: Option<SyntheticSpec>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut dataset_names: Option<Vec<String>> = None;
        let mut overrides: Vec<(String, DatasetOverride)> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            cfg.apply(key, value, &mut dataset_names, &mut overrides)?;
        }

        cfg.resolve_datasets(dataset_names, overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    fn apply(
        &mut self,
        key: &str,
        v: &str,
        dataset_names: &mut Option<Vec<String>>,
        overrides: &mut Vec<(String, DatasetOverride)>,
    ) -> Result<()> {
        match key {
            "datasets" => {
                *dataset_names = Some(
                    v.split(',')
                        .map(str::trim)
                        .filter(|t| !t.is_empty())
                        .map(String::from)
                        .collect(),
                );
                return Ok(());
            }
            "rates" => {
                self.rates = parse_list(key, v, parse_f64)?;
                return Ok(());
            }
            "seeds" => {
                self.seeds = parse_list(key, v, parse_u64)?;
                return Ok(());
            }
            "methods" => {
                self.methods = v
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(Method::parse)
                    .collect::<Result<_>>()?;
                return Ok(());
            }
            "normalize" => {
                self.normalize = parse_bool(key, v)?;
                return Ok(());
            }
            "output_dir" => {
                self.output_dir = Some(PathBuf::from(v));
                return Ok(());
            }
            "knn.k" => {
                self.knn.k = parse_usize(key, v)?;
                return Ok(());
            }
            "knn.epsilon" => {
                self.knn.epsilon = parse_f64(key, v)?;
                return Ok(());
            }
            "ae.static_fill" => {
                self.ae.static_fill = parse_bool(key, v)?;
                return Ok(());
            }
            _ => {}
        }

        if let Some(field) = key.strip_prefix("prefill.") {
            match field {
                "method" => {
                    self.prefill.method = match v {
                        "mean" => PrefillMethod::Mean,
                        "forest" => PrefillMethod::Forest,
                        _ => {
                            return Err(cfg_err(
                                key,
                                format!("'{v}' is not a pre-fill method (mean | forest)"),
                            ))
                        }
                    }
                }
                "n_trees" => self.prefill.forest.n_trees = parse_usize(key, v)?,
                "max_depth" => self.prefill.forest.max_depth = parse_usize(key, v)?,
                "min_samples_leaf" => self.prefill.forest.min_samples_leaf = parse_usize(key, v)?,
                "feature_subsample" => self.prefill.forest.feature_subsample = parse_f64(key, v)?,
                "seed" => self.prefill.forest.seed = parse_u64(key, v)?,
                _ => return Err(Error::Config(format!("unknown key '{key}'"))),
            }
            return Ok(());
        }
        if let Some(field) = key.strip_prefix("rbf.") {
            match field {
                "k" => self.rbf.k = Some(parse_usize(key, v)?),
                "kmeans_max_iters" => self.rbf.kmeans_max_iters = Some(parse_usize(key, v)?),
                "kmeans_tol" => self.rbf.kmeans_tol = Some(parse_f64(key, v)?),
                "seed" => self.rbf.seed = Some(parse_u64(key, v)?),
                _ => return Err(Error::Config(format!("unknown key '{key}'"))),
            }
            return Ok(());
        }
        if let Some(field) = key.strip_prefix("ffeam.") {
            if apply_train_key(&mut self.ffeam, key, field, v)? {
                return Ok(());
            }
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
        if let Some(field) = key.strip_prefix("ae.") {
            if apply_train_key(&mut self.ae.train, key, field, v)? {
                return Ok(());
            }
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
        if let Some(field) = key.strip_prefix("ce_aann.") {
            if apply_train_key(&mut self.ce_aann.train, key, field, v)? {
                return Ok(());
            }
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
        if let Some(rest) = key.strip_prefix("dataset.") {
            let (name, field) = rest.split_once('.').ok_or_else(|| {
                Error::Config(format!("key '{key}': expected dataset.<name>.<field>"))
            })?;
            let entry = match overrides.iter_mut().find(|(n, _)| n == name) {
                Some((_, e)) => e,
                None => {
                    overrides.push((name.to_string(), DatasetOverride::default()));
                    &mut overrides.last_mut().unwrap().1
                }
            };
            match field {
                "path" => entry.path = Some(PathBuf::from(v)),
                "missing_token" => entry.missing_token = Some(v.to_string()),
                "synthetic" => {
                    // n_samples, n_valid, n_noise, seed
                    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                    if parts.len() != 4 {
                        return Err(cfg_err(
                            key,
                            "expected 'n_samples, n_valid, n_noise, seed'",
                        ));
                    }
                    entry.synthetic = Some(
                        SyntheticSpec::new(
                            parse_usize(key, parts[0])?,
                            parse_usize(key, parts[1])?,
                            parse_usize(key, parts[2])?,
                            parse_u64(key, parts[3])?,
                        )
                        .map_err(|e| cfg_err(key, e))?,
                    );
                }
                _ => return Err(Error::Config(format!("unknown key '{key}'"))),
            }
            return Ok(());
        }
        Err(Error::Config(format!("unknown key '{key}'")))
    }

    fn resolve_datasets(
        &mut self,
        names: Option<Vec<String>>,
        mut overrides: Vec<(String, DatasetOverride)>,
    ) -> Result<()> {
        let names = match names {
            Some(n) => n,
            None => {
                if overrides.is_empty() {
                    return Ok(()); // keep the default dataset list
                }
                overrides.iter().map(|(n, _)| n.clone()).collect()
            }
        };
        let mut datasets = Vec::with_capacity(names.len());
        for name in names {
            let ov = overrides
                .iter_mut()
                .find(|(n, _)| *n == name)
                .map(|(_, e)| std::mem::take(e))
                .unwrap_or_default();
            let source = match (ov.path, ov.synthetic) {
                (Some(_), Some(_)) => {
                    return Err(Error::Config(format!(
                        "dataset '{name}' sets both a path and a synthetic spec"
                    )))
                }
                (Some(path), None) => DatasetSource::Csv {
                    path,
                    missing_token: ov.missing_token.unwrap_or_default(),
                },
                (None, Some(spec)) => DatasetSource::Synthetic(spec),
                (None, None) => DatasetSource::Builtin,
            };
            datasets.push(DatasetSpec { name, source });
        }
        self.datasets = datasets;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::Config("no datasets configured".into()));
        }
        if self.rates.is_empty() || self.seeds.is_empty() || self.methods.is_empty() {
            return Err(Error::Config(
                "rates, seeds, and methods must be non-empty".into(),
            ));
        }
        for &r in &self.rates {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::Config(format!("rate {r} outside [0, 1)")));
            }
        }
        self.ffeam.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.ae.train.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.ce_aann.train.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.prefill.forest.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.knn.k == 0 {
            return Err(Error::Config("knn.k must be >= 1".into()));
        }
        Ok(())
    }

    /// Force one seed everywhere (CLI `--seed` override).
    pub fn override_seed(&mut self, seed: u64) {
        self.seeds = vec![seed];
        self.ffeam.seed = seed;
        self.ae.train.seed = seed;
        self.ce_aann.train.seed = seed;
        self.prefill.forest.seed = seed;
        self.rbf.seed = Some(seed);
    }
}
