//! Instance files and rational list parsing.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use relmech_core::{parse_rational, Instance, Rational};
use serde::{Deserialize, Serialize};

/// `{"jobs": ["2", "1"], "bids": ["1", "3/2"], "seed": 7}`. Rationals are
/// strings so nothing passes through a float.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub jobs: Vec<String>,
    pub bids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance, seed: Option<u64>) -> Self {
        InstanceFile {
            jobs: instance.jobs().iter().map(ToString::to_string).collect(),
            bids: instance.bids().iter().map(ToString::to_string).collect(),
            seed,
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let jobs = parse_all(&self.jobs).context("jobs")?;
        let bids = parse_all(&self.bids).context("bids")?;
        Ok(Instance::new(jobs, bids)?)
    }
}

fn parse_all(items: &[String]) -> Result<Vec<Rational>> {
    items.iter().map(|s| parse_rational(s.trim()).map_err(Into::into)).collect()
}

pub fn read_instance_file(path: &Path) -> Result<InstanceFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_instance(path: &Path) -> Result<(Instance, Option<u64>)> {
    let file = read_instance_file(path)?;
    Ok((file.to_instance()?, file.seed))
}

/// `"2,1,3/2"` → rationals.
pub fn parse_list(text: &str) -> Result<Vec<Rational>> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        bail!("empty list {text:?}");
    }
    items.into_iter().map(|s| parse_rational(s).map_err(Into::into)).collect()
}

/// `key=value` pairs such as `m=3 c=3/2`.
pub fn parse_assignments<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<Vec<(String, String)>> {
    pairs
        .into_iter()
        .map(|p| match p.split_once('=') {
            Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
            _ => bail!("expected key=value, found {p:?}"),
        })
        .collect()
}
