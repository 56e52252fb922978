//! Run configuration, loadable from flat `key = value` files.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gallery::Provenance;
use crate::generate::{GenerationParams, DEFAULT_MARGIN_RATIO};
use crate::identify::MethodParams;
use crate::meanshift::PruningParams;

pub const DEFAULT_TARGET_FPIRS: [f64; 5] = [0.001, 0.005, 0.01, 0.05, 0.1];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub radius: f64,
    /// `None` means `DEFAULT_MARGIN_RATIO * radius`.
    pub margin: Option<f64>,
    pub bandwidth: f64,
    pub pruning_ratio: f64,
    pub target_fpirs: Vec<f64>,
    pub normalize_on_ingest: bool,
    pub seed: u64,
    pub method: Provenance,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            radius: 0.7,
            margin: None,
            bandwidth: 0.9,
            pruning_ratio: 1.0,
            target_fpirs: DEFAULT_TARGET_FPIRS.to_vec(),
            normalize_on_ingest: true,
            seed: 0,
            method: Provenance::PrunedGenerated,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad value `{value}` for `{key}`")))
}

pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

impl RunConfig {
    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("line {}: expected `key = value`", n + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "radius" => self.radius = parse_num(key, value)?,
            "margin" => self.margin = Some(parse_num(key, value)?),
            "bandwidth" => self.bandwidth = parse_num(key, value)?,
            "pruning_ratio" => self.pruning_ratio = parse_num(key, value)?,
            "target_fpirs" => self.target_fpirs = parse_list(key, value)?,
            "normalize_on_ingest" => self.normalize_on_ingest = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "method" => self.method = value.parse()?,
            other => return Err(Error::InvalidParameter(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.generation_params()?;
        self.pruning_params()?;
        if self.target_fpirs.is_empty() || self.target_fpirs.iter().any(|&f| !(f > 0.0 && f < 1.0)) {
            return Err(Error::InvalidParameter("target_fpirs must be a non-empty list in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn generation_params(&self) -> Result<GenerationParams> {
        GenerationParams::new(self.radius, self.margin.unwrap_or(DEFAULT_MARGIN_RATIO * self.radius))
    }

    pub fn pruning_params(&self) -> Result<PruningParams> {
        PruningParams::new(self.bandwidth, self.pruning_ratio)
    }

    pub fn method_params(&self) -> Result<MethodParams> {
        Ok(MethodParams { pruning: Some(self.pruning_params()?), generation: Some(self.generation_params()?) })
    }
}
