//! Pipeline configuration: command-line flags, overridden by a TOML file.

use std::path::{Path, PathBuf};

use conetree_core::charseq::{Strategy, MAX_DELTA};
use conetree_core::cone::MAX_RADIUS;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::Generator;

/// Environment variable naming the default root for run directories.
pub const OUT_ENV: &str = "CONETREE_OUT";

/// How the tree distances are combined into the product distance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductMetric {
    /// Sum over colors.
    #[default]
    L1,
}

impl ProductMetric {
    pub fn as_str(self) -> &'static str {
        match self {
            ProductMetric::L1 => "l1",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub generator: Generator,
    pub r: f64,
    /// Number of levels `J`.
    pub depth: usize,
    /// Requested number of colors.
    pub colors: usize,
    /// Requested δ; the achieved one when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Covering strategy name; the generator's default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub product_metric: ProductMetric,
    /// Refuse to run `separate` when its standing assumptions on
    /// `(r, δ, λ)` fail, instead of certifying the output.
    #[serde(default)]
    pub strict: bool,
    /// Also write every `(d_source, d_target)` pair to `pairs.csv`.
    #[serde(default)]
    pub write_pairs: bool,
}

impl PipelineConfig {
    pub fn new(generator: Generator, r: f64, depth: usize, colors: usize) -> Self {
        Self {
            generator,
            r,
            depth,
            colors,
            delta: None,
            seed: 0,
            strategy: None,
            out_dir: None,
            product_metric: ProductMetric::L1,
            strict: false,
            write_pairs: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::Config(format!("r = {} is not in (0, 1)", self.r)));
        }
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        let radius = self.depth as f64 * (1.0 / self.r).ln();
        if radius > MAX_RADIUS {
            return Err(Error::Config(format!(
                "depth · ln(1/r) = {radius} exceeds {MAX_RADIUS}"
            )));
        }
        if self.colors == 0 {
            return Err(Error::Config("colors must be at least 1".into()));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d <= MAX_DELTA) {
                return Err(Error::Config(format!("δ = {d} is not in (0, 2/3]")));
            }
        }
        self.strategy()?;
        Ok(())
    }

    pub fn strategy(&self) -> Result<Strategy> {
        match &self.strategy {
            None => Ok(self.generator.default_strategy()),
            Some(name) => Strategy::from_name(name).ok_or_else(|| {
                let known: Vec<&str> = Strategy::ALL.iter().map(|s| s.name()).collect();
                Error::Config(format!("unknown strategy {name}; expected one of {}", known.join(", ")))
            }),
        }
    }

    /// A directory name determined by the configuration.
    pub fn run_name(&self) -> String {
        let params = match &self.generator {
            Generator::Circle { n } | Generator::Interval { n } => format!("n{n}"),
            Generator::RandomCircle { n } | Generator::VisualCircle { n } => format!("n{n}"),
            Generator::Cantor { depth } => format!("d{depth}"),
            Generator::TreeBoundary { branching, depth } => format!("b{branching}d{depth}"),
            Generator::SinglePoint => "p".into(),
        };
        format!(
            "{}-{params}-r{}-J{}-c{}-s{}",
            self.generator.name(),
            self.r,
            self.depth,
            self.colors,
            self.seed
        )
    }

    /// `out_dir`, else `$CONETREE_OUT/<run name>`, else `runs/<run name>`.
    pub fn output_dir(&self) -> PathBuf {
        if let Some(dir) = &self.out_dir {
            return dir.clone();
        }
        let root = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
        root.join(self.run_name())
    }

    /// `self` with every key present in `text` replaced by the file's value.
    pub fn overridden_by(&self, text: &str) -> Result<Self> {
        let file: toml::Table = toml::from_str(text)?;
        let mut merged = toml::Table::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        for (key, value) in file {
            merged.insert(key, value);
        }
        let config: PipelineConfig = merged.try_into()?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: PipelineConfig = toml::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }
}
