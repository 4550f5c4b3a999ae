//! `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored; a `#` after a value
//! starts a comment. Lists are comma separated. Every error names the line
//! (or "command line" for overrides) and the offending field.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use cur_core::cluster::ModelSpec;
use thiserror::Error;

/// Where a setting came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    CommandLine,
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::CommandLine => f.write_str("command line"),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{origin}, field `{field}`: {message}")]
pub struct ConfigError {
    pub origin: Origin,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(origin: Origin, field: &str, message: impl Into<String>) -> Self {
        Self { origin, field: field.to_owned(), message: message.into() }
    }
}

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub origin: Origin,
    pub key: String,
    pub value: String,
}

/// Splits text into entries without interpreting keys.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let origin = Origin::Line(i + 1);
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::new(origin, line, "expected `key = value`"));
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::new(origin, "", "missing key"));
        }
        out.push(Entry { origin, key: key.to_owned(), value: value.trim().to_owned() });
    }
    Ok(out)
}

/// Parses a `key=value` override given on the command line.
pub fn parse_override(text: &str) -> Result<Entry, ConfigError> {
    let Some((key, value)) = text.split_once('=') else {
        return Err(ConfigError::new(Origin::CommandLine, text, "expected `key=value`"));
    };
    Ok(Entry { origin: Origin::CommandLine, key: key.trim().to_owned(), value: value.trim().to_owned() })
}

fn scalar<T: FromStr>(e: &Entry) -> Result<T, ConfigError> {
    e.value.parse().map_err(|_| ConfigError::new(e.origin, &e.key, format!("cannot parse `{}`", e.value)))
}

fn list<T: FromStr>(e: &Entry) -> Result<Vec<T>, ConfigError> {
    if e.value.is_empty() {
        return Ok(Vec::new());
    }
    e.value
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| ConfigError::new(e.origin, &e.key, format!("cannot parse list item `{}`", t.trim())))
        })
        .collect()
}

fn flag(e: &Entry) -> Result<bool, ConfigError> {
    match e.value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(ConfigError::new(e.origin, &e.key, format!("expected a boolean, found `{}`", e.value))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SuccessProb,
    NoiseStability,
    DeimCheck,
    Clustering,
}

impl FromStr for ExperimentKind {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "success_prob" => Ok(Self::SuccessProb),
            "noise_stability" => Ok(Self::NoiseStability),
            "deim_check" => Ok(Self::DeimCheck),
            "clustering" => Ok(Self::Clustering),
            _ => Err(()),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SuccessProb => "success_prob",
            Self::NoiseStability => "noise_stability",
            Self::DeimCheck => "deim_check",
            Self::Clustering => "clustering",
        })
    }
}

/// Sampling scheme named in a configuration; leverage scores use the
/// configured rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeName {
    Uniform,
    Length,
    Leverage,
}

impl FromStr for SchemeName {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "length" => Ok(Self::Length),
            "leverage" => Ok(Self::Leverage),
            _ => Err(()),
        }
    }
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::Length => "length",
            Self::Leverage => "leverage",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    /// Ranks cycled through by trial index in `deim_check`; empty means `[k]`.
    pub ranks: Vec<usize>,
    /// Target `‖E‖₂` relative to `‖A‖₂ = 1`.
    pub sigma: f64,
    pub schemes: Vec<SchemeName>,
    /// Sample sizes (`d1 = d2 = d`). When empty the size comes from
    /// `eps`, `delta`, `big_c` and each trial's stable rank.
    pub d_grid: Vec<usize>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub big_c: f64,
    pub trials: usize,
    pub seed: u64,
    pub kappa: Option<f64>,
    pub sparsity: f64,
    pub dedup: bool,
    /// Record wall time per trial; makes output nondeterministic.
    pub timing: bool,
    pub out: Option<PathBuf>,
    pub ambient_dim: usize,
    pub dims: Vec<usize>,
    pub points: Vec<usize>,
    pub d_max: Option<usize>,
    pub zero_tol: f64,
    /// Rank tolerance override.
    pub tol: Option<f64>,
    /// Use the rayon thread pool for trials.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::SuccessProb,
            m: 50,
            n: 40,
            k: 4,
            ranks: Vec::new(),
            sigma: 0.0,
            schemes: vec![SchemeName::Length],
            d_grid: Vec::new(),
            eps: None,
            delta: None,
            big_c: 1.0,
            trials: 100,
            seed: 0,
            kappa: None,
            sparsity: 0.0,
            dedup: false,
            timing: false,
            out: None,
            ambient_dim: 20,
            dims: vec![2, 3, 4],
            points: vec![10, 10, 10],
            d_max: None,
            zero_tol: cur_core::cluster::DEFAULT_ZERO_TOL,
            tol: None,
            parallel: true,
        }
    }
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = Seen::default();
        for e in parse_entries(text)? {
            cfg.apply(&e, &mut seen)?;
        }
        cfg.validate_with(&seen)?;
        Ok(cfg)
    }
}

/// Origin of each field that was set explicitly, for validation messages.
#[derive(Debug, Default, Clone)]
pub struct Seen(Vec<(String, Origin)>);

impl Seen {
    fn origin(&self, key: &str) -> Origin {
        self.0.iter().rev().find(|(k, _)| k == key).map_or(Origin::Default, |&(_, o)| o)
    }
}

impl ExperimentConfig {
    /// Applies entries on top of `self` and re-validates.
    pub fn with_overrides(mut self, entries: &[Entry]) -> Result<Self, ConfigError> {
        let mut seen = Seen::default();
        for e in entries {
            self.apply(e, &mut seen)?;
        }
        self.validate_with(&seen)?;
        Ok(self)
    }

    fn apply(&mut self, e: &Entry, seen: &mut Seen) -> Result<(), ConfigError> {
        let key = match e.key.as_str() {
            "scheme" => "schemes",
            "d" => "d_grid",
            "c" => "big_c",
            "master_seed" => "seed",
            "out_path" => "out",
            other => other,
        };
        match key {
            "kind" => {
                self.kind = e.value.parse().map_err(|_| {
                    ConfigError::new(
                        e.origin,
                        &e.key,
                        format!("unknown kind `{}` (success_prob, noise_stability, deim_check, clustering)", e.value),
                    )
                })?
            }
            "m" => self.m = scalar(e)?,
            "n" => self.n = scalar(e)?,
            "k" => self.k = scalar(e)?,
            "ranks" => self.ranks = list(e)?,
            "sigma" => self.sigma = scalar(e)?,
            "schemes" => {
                self.schemes = e
                    .value
                    .split(',')
                    .map(|s| {
                        s.trim().parse().map_err(|_| {
                            ConfigError::new(
                                e.origin,
                                &e.key,
                                format!("unknown scheme `{}` (uniform, length, leverage)", s.trim()),
                            )
                        })
                    })
                    .collect::<Result<_, _>>()?
            }
            "d_grid" => self.d_grid = list(e)?,
            "eps" => self.eps = Some(scalar(e)?),
            "delta" => self.delta = Some(scalar(e)?),
            "big_c" => self.big_c = scalar(e)?,
            "trials" => self.trials = scalar(e)?,
            "seed" => self.seed = scalar(e)?,
            "kappa" => self.kappa = Some(scalar(e)?),
            "sparsity" => self.sparsity = scalar(e)?,
            "dedup" => self.dedup = flag(e)?,
            "timing" => self.timing = flag(e)?,
            "parallel" => self.parallel = flag(e)?,
            "out" => self.out = Some(PathBuf::from(&e.value)),
            "ambient_dim" => self.ambient_dim = scalar(e)?,
            "dims" => self.dims = list(e)?,
            "points" => self.points = list(e)?,
            "d_max" => self.d_max = Some(scalar(e)?),
            "zero_tol" => self.zero_tol = scalar(e)?,
            "tol" => self.tol = Some(scalar(e)?),
            _ => return Err(ConfigError::new(e.origin, &e.key, "unknown field")),
        }
        seen.0.push((key.to_owned(), e.origin));
        Ok(())
    }

    /// Checks the invariants; errors point at the field's origin.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_with(&Seen::default())
    }

    fn validate_with(&self, seen: &Seen) -> Result<(), ConfigError> {
        let err = |key: &str, msg: &str| Err(ConfigError::new(seen.origin(key), key, msg));
        if self.trials < 1 {
            return err("trials", "must be at least 1");
        }
        if self.d_grid.contains(&0) {
            return err("d_grid", "sample sizes must be at least 1");
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return err("sigma", "must be finite and nonnegative");
        }
        if self.schemes.is_empty() {
            return err("schemes", "at least one scheme is required");
        }
        if !(self.big_c > 0.0) || !self.big_c.is_finite() {
            return err("big_c", "must be positive");
        }
        if !(0.0..1.0).contains(&self.sparsity) {
            return err("sparsity", "must lie in [0, 1)");
        }
        if let Some(k) = self.kappa {
            if !(k >= 1.0) || !k.is_finite() {
                return err("kappa", "must be at least 1");
            }
        }
        if let Some(e) = self.eps {
            if !(e > 0.0 && e < 1.0) {
                return err("eps", "must lie in (0, 1)");
            }
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 1.0) {
                return err("delta", "must lie in (0, 1)");
            }
        }
        if !(self.zero_tol >= 0.0) {
            return err("zero_tol", "must be nonnegative");
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0) {
                return err("tol", "must be nonnegative");
            }
        }
        match self.kind {
            ExperimentKind::SuccessProb | ExperimentKind::NoiseStability => {
                self.check_shape(seen)?;
                if self.d_grid.is_empty() && (self.eps.is_none() || self.delta.is_none()) {
                    return err("d_grid", "give a d_grid, or eps and delta for the sample-size bound");
                }
            }
            ExperimentKind::DeimCheck => {
                self.check_shape(seen)?;
                if self.ranks.iter().any(|&r| r == 0 || r > self.m.min(self.n)) {
                    return err("ranks", "each rank must lie in 1..=min(m, n)");
                }
            }
            ExperimentKind::Clustering => {
                if let Err(e) = self.model_spec(0).validate() {
                    let field = if self.dims.len() != self.points.len() { "points" } else { "dims" };
                    return Err(ConfigError::new(seen.origin(field), field, e.to_string()));
                }
                if self.d_max == Some(0) {
                    return err("d_max", "must be at least 1");
                }
            }
        }
        Ok(())
    }

    fn check_shape(&self, seen: &Seen) -> Result<(), ConfigError> {
        if self.m == 0 {
            return Err(ConfigError::new(seen.origin("m"), "m", "must be at least 1"));
        }
        if self.n == 0 {
            return Err(ConfigError::new(seen.origin("n"), "n", "must be at least 1"));
        }
        if self.k == 0 || self.k > self.m.min(self.n) {
            return Err(ConfigError::new(seen.origin("k"), "k", "must lie in 1..=min(m, n)"));
        }
        Ok(())
    }

    /// Union-of-subspaces model for one trial.
    pub fn model_spec(&self, seed: u64) -> ModelSpec {
        ModelSpec { ambient_dim: self.ambient_dim, dims: self.dims.clone(), points: self.points.clone(), seed }
    }
}

/// Parses a union-of-subspaces model block (`ambient_dim`, `dims`, `points`,
/// `seed`).
pub fn parse_model_spec(text: &str) -> Result<ModelSpec, ConfigError> {
    let mut spec = ModelSpec { ambient_dim: 0, dims: Vec::new(), points: Vec::new(), seed: 0 };
    let mut last = Origin::Default;
    for e in parse_entries(text)? {
        match e.key.as_str() {
            "ambient_dim" => spec.ambient_dim = scalar(&e)?,
            "dims" => spec.dims = list(&e)?,
            "points" => spec.points = list(&e)?,
            "seed" => spec.seed = scalar(&e)?,
            _ => return Err(ConfigError::new(e.origin, &e.key, "unknown field")),
        }
        last = e.origin;
    }
    spec.validate().map_err(|e| ConfigError::new(last, "dims", e.to_string()))?;
    Ok(spec)
}
