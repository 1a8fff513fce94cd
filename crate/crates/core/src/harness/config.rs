//! `key = value` experiment configuration.

use super::expr::{Expr, ExprError};
use super::nodes::{NodeError, NodeSource};
use crate::domain::{BoxDomain, DomainError};
use crate::projector::{DualMode, ProjectorError};
use crate::sampling::{PsiFamily, SamplingError};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected 'key = value'")]
    Syntax { line: usize },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("bad value '{value}' for '{key}': {message}")]
    BadValue {
        key: String,
        value: String,
        message: String,
    },
    #[error("missing required key '{0}'")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Mask,
    DualMask,
    Gramian,
    Restore,
    Integrate,
    CondTable,
    Decay,
    GpStudy,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Mask,
        Command::DualMask,
        Command::Gramian,
        Command::Restore,
        Command::Integrate,
        Command::CondTable,
        Command::Decay,
        Command::GpStudy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Mask => "mask",
            Command::DualMask => "dualmask",
            Command::Gramian => "gramian",
            Command::Restore => "restore",
            Command::Integrate => "integrate",
            Command::CondTable => "condtable",
            Command::Decay => "decay",
            Command::GpStudy => "gpstudy",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| ConfigError::BadValue {
                key: "command".into(),
                value: s.into(),
                message: "unknown command".into(),
            })
    }
}

/// Every setting of a run. [`ExperimentConfig::to_text`] writes all of them, so a
/// report echo can be fed back as a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n: u32,
    pub h: f64,
    pub mask_file: Option<PathBuf>,
    pub level: u32,
    pub domain: BoxDomain,
    pub dual: DualMode,
    pub psi: PsiFamily,
    pub nodes: NodeSource,
    pub seed: u64,
    /// Radius of the density certificate; half the element support when unset.
    pub delta: Option<f64>,
    /// Run even when the density certificate fails.
    pub allow_sparse: bool,
    pub tau: Option<f64>,
    pub n_max: usize,
    pub tol: f64,
    pub function: Expr,
    /// Reference integral; direct quadrature of `function` when unset.
    pub reference: Option<f64>,
    pub h_list: Vec<f64>,
    pub j_list: Vec<u32>,
    pub dual_factor: Option<u32>,
    pub dual_degree: Option<usize>,
    pub moments: u32,
    pub checkpoints: Vec<usize>,
    pub cascade_level: u32,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            n: 3,
            h: 3.0,
            mask_file: None,
            level: 0,
            domain: BoxDomain::interval(0.0, 1.0).expect("unit interval"),
            dual: DualMode::default(),
            psi: PsiFamily::Voronoi,
            nodes: NodeSource::Random { count: 16 },
            seed: 0,
            delta: None,
            allow_sparse: false,
            tau: None,
            n_max: crate::reconstruction::DEFAULT_MAX_ITERATIONS,
            tol: crate::reconstruction::DEFAULT_TOL,
            function: Expr::parse("sin(pi*x)").expect("valid default"),
            reference: None,
            h_list: vec![3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 20.0],
            j_list: vec![3, 4, 5, 6, 7],
            dual_factor: None,
            dual_degree: None,
            moments: 2,
            checkpoints: vec![0, 50, 100, 300, 2000],
            cascade_level: crate::refinable::DEFAULT_CASCADE_LEVEL,
            out: PathBuf::from("out"),
        }
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let command = pairs
            .iter()
            .find(|(k, _)| k == "command")
            .ok_or(ConfigError::Missing("command"))?
            .1
            .parse()?;
        let mut cfg = Self::new(command);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_text(&text)
    }

    /// Applies one setting; `h` follows `n` until it is set explicitly.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn bad<E: fmt::Display>(key: &str, value: &str) -> impl FnOnce(E) -> ConfigError {
            let (key, value) = (key.to_string(), value.to_string());
            move |e| ConfigError::BadValue {
                key,
                value,
                message: e.to_string(),
            }
        }
        fn list<T: FromStr>(value: &str) -> Result<Vec<T>, T::Err> {
            value
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect()
        }
        let opt = |v: &str| (!v.is_empty() && v != "none").then(|| v.to_string());
        match key {
            "command" => self.command = value.parse()?,
            "n" => {
                let follow = self.h == self.n as f64;
                self.n = value.parse().map_err(bad(key, value))?;
                if follow {
                    self.h = self.n as f64;
                }
            }
            "h" => self.h = value.parse().map_err(bad(key, value))?,
            "mask" | "mask_file" => self.mask_file = opt(value).map(PathBuf::from),
            "level" | "j" => self.level = value.parse().map_err(bad(key, value))?,
            "domain" => self.domain = value.parse().map_err(bad::<DomainError>(key, value))?,
            "dual" => self.dual = value.parse().map_err(bad::<ProjectorError>(key, value))?,
            "psi" => self.psi = value.parse().map_err(bad::<SamplingError>(key, value))?,
            "nodes" => self.nodes = value.parse().map_err(bad::<NodeError>(key, value))?,
            "seed" => self.seed = value.parse().map_err(bad(key, value))?,
            "delta" => self.delta = opt(value).map(|v| v.parse()).transpose().map_err(bad(key, value))?,
            "allow_sparse" => self.allow_sparse = value.parse().map_err(bad(key, value))?,
            "tau" => self.tau = opt(value).map(|v| v.parse()).transpose().map_err(bad(key, value))?,
            "nmax" | "n_max" => self.n_max = value.parse().map_err(bad(key, value))?,
            "tol" => self.tol = value.parse().map_err(bad(key, value))?,
            "function" | "f" => self.function = value.parse().map_err(bad::<ExprError>(key, value))?,
            "reference" => {
                self.reference = opt(value).map(|v| v.parse()).transpose().map_err(bad(key, value))?
            }
            "h_list" => self.h_list = list(value).map_err(bad(key, value))?,
            "j_list" => self.j_list = list(value).map_err(bad(key, value))?,
            "dual_factor" => {
                self.dual_factor = opt(value).map(|v| v.parse()).transpose().map_err(bad(key, value))?
            }
            "dual_degree" => {
                self.dual_degree = opt(value).map(|v| v.parse()).transpose().map_err(bad(key, value))?
            }
            "moments" => self.moments = value.parse().map_err(bad(key, value))?,
            "checkpoints" => self.checkpoints = list(value).map_err(bad(key, value))?,
            "cascade_level" => self.cascade_level = value.parse().map_err(bad(key, value))?,
            "out" => self.out = PathBuf::from(value),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Checks cross-field constraints and that referenced files exist.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.n == 0 {
            return invalid("n must be at least 1".into());
        }
        if self.mask_file.is_none() && self.h <= self.n as f64 - 1.0 {
            return invalid(format!("h = {} must exceed n − 1 = {}", self.h, self.n - 1));
        }
        if self.command == Command::CondTable {
            if let Some(h) = self.h_list.iter().find(|&&h| h <= self.n as f64 - 1.0) {
                return invalid(format!("h_list entry {h} must exceed n − 1"));
            }
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return invalid("tol must be nonnegative".into());
        }
        let positive = |v: f64| v > 0.0;
        if self.delta.is_some_and(|d| !positive(d)) || self.tau.is_some_and(|t| !positive(t)) {
            return invalid("delta and tau must be positive".into());
        }
        if self.j_list.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("j_list must be increasing".into());
        }
        let files = self
            .mask_file
            .iter()
            .chain(match &self.nodes {
                NodeSource::File(p) => Some(p),
                _ => None,
            });
        for f in files {
            if !f.exists() {
                return Err(ConfigError::Io {
                    path: f.clone(),
                    source: std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
                });
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        fn join<T: fmt::Display>(v: &[T]) -> String {
            v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
        }
        fn or_none<T: fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map_or("none".into(), T::to_string)
        }
        let lines = [
            ("command", self.command.to_string()),
            ("n", self.n.to_string()),
            ("h", self.h.to_string()),
            ("mask", or_none(&self.mask_file.as_ref().map(|p| p.display()))),
            ("level", self.level.to_string()),
            ("domain", self.domain.to_string()),
            ("dual", self.dual.to_string()),
            ("psi", self.psi.to_string()),
            ("nodes", self.nodes.to_string()),
            ("seed", self.seed.to_string()),
            ("delta", or_none(&self.delta)),
            ("allow_sparse", self.allow_sparse.to_string()),
            ("tau", or_none(&self.tau)),
            ("nmax", self.n_max.to_string()),
            ("tol", self.tol.to_string()),
            ("function", self.function.to_string()),
            ("reference", or_none(&self.reference)),
            ("h_list", join(&self.h_list)),
            ("j_list", join(&self.j_list)),
            ("dual_factor", or_none(&self.dual_factor)),
            ("dual_degree", or_none(&self.dual_degree)),
            ("moments", self.moments.to_string()),
            ("checkpoints", join(&self.checkpoints)),
            ("cascade_level", self.cascade_level.to_string()),
            ("out", self.out.display().to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_echoes() {
        let text = "command = restore\n# comment\nn = 3\ndomain = 0,4\nnodes = random:7 \nseed=5\ntol = 1e-12\n";
        let cfg = ExperimentConfig::from_text(text).unwrap();
        assert_eq!(cfg.command, Command::Restore);
        assert_eq!(cfg.h, 3.0);
        assert_eq!(cfg.nodes, NodeSource::Random { count: 7 });
        assert_eq!(cfg.tol, 1e-12);
        let again = ExperimentConfig::from_text(&cfg.to_text()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn h_follows_n_until_set() {
        let mut cfg = ExperimentConfig::new(Command::Mask);
        cfg.set("n", "5").unwrap();
        assert_eq!(cfg.h, 5.0);
        cfg.set("h", "4.1").unwrap();
        cfg.set("n", "4").unwrap();
        assert_eq!(cfg.h, 4.1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            ExperimentConfig::from_text("command = restore\ncolour = red"),
            Err(ConfigError::UnknownKey(_))
        ));
        assert!(matches!(ExperimentConfig::from_text("n = 3"), Err(ConfigError::Missing("command"))));
        assert!(matches!(
            ExperimentConfig::from_text("command = restore\nn three"),
            Err(ConfigError::Syntax { line: 2 })
        ));
        let mut cfg = ExperimentConfig::new(Command::Restore);
        cfg.set("h", "1.5").unwrap();
        assert!(cfg.validate().is_err());
        cfg.set("h", "3").unwrap();
        cfg.set("nodes", "/definitely/missing.csv").unwrap();
        assert!(matches!(cfg.validate(), Err(ConfigError::Io { .. })));
    }
}
