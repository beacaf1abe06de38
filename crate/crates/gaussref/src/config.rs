//! Run configuration: every tunable of the pipeline in one flat record.
//!
//! Files hold `key = value` lines with `#` comments. A file that contains
//! `# config: key=value` lines (the header of a report CSV) is read from
//! those lines alone, so a report can be fed back as a configuration.
//! Empty values mean "unset" for optional keys.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gaussref_core::color::HueMetric;
use gaussref_core::energy::OverlapForm;
use gaussref_core::solver::{RunParams, SolverConfig, StepRule};

use crate::error::{Error, Result};
use crate::fsutil::read_text;

/// Prefix of configuration lines in report headers.
pub const HEADER_PREFIX: &str = "# config:";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub params: RunParams,
    pub solver: SolverConfig,
    /// Overrides the manifest's reference frame.
    pub reference: Option<usize>,
    /// Overrides the manifest's region mask.
    pub mask: Option<PathBuf>,
    /// Worker threads, 0 = one per core.
    pub threads: usize,
}

/// Recognized keys in echo order.
pub const KEYS: &[&str] = &[
    "wreg",
    "delta_color",
    "delta_geo",
    "cull_factor",
    "hue_metric",
    "overlap",
    "sigma_hat",
    "subdiv",
    "bias",
    "quadtree_depth",
    "split_threshold",
    "min_patch_side",
    "visibility_tolerance",
    "initial_step",
    "grow",
    "shrink",
    "step_min",
    "step_max",
    "max_iters",
    "convergence_eps",
    "convergence_window",
    "visibility_refresh",
    "step_rule",
    "reference",
    "mask",
    "threads",
];

fn num<T: FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("malformed value `{v}`"))
}

fn opt<T: FromStr>(v: &str) -> std::result::Result<Option<T>, String> {
    if v.is_empty() {
        Ok(None)
    } else {
        num(v).map(Some)
    }
}

fn boolean(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "on" | "1" | "yes" => Ok(true),
        "false" | "off" | "0" | "no" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

fn show<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.merge_text(&read_text(path)?, path)?;
        Ok(cfg)
    }

    /// Applies the settings of a configuration text on top of `self`.
    pub fn merge_text(&mut self, text: &str, path: &Path) -> Result<()> {
        let from_header = text.lines().any(|l| l.trim_start().starts_with(HEADER_PREFIX));
        for (n, raw) in text.lines().enumerate() {
            let trimmed = raw.trim();
            let body = if from_header {
                match trimmed.strip_prefix(HEADER_PREFIX) {
                    Some(b) => b,
                    None => continue,
                }
            } else {
                trimmed.split('#').next().unwrap_or("")
            };
            let body = body.trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::parse(path, n + 1, format!("expected key = value, got `{body}`")))?;
            self.set(key.trim(), value.trim())
                .map_err(|m| Error::parse(path, n + 1, m))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        let e = &mut self.params.energy;
        let q = &mut self.params.quadtree;
        let s = &mut self.solver;
        match key {
            "wreg" => e.w_reg = num(v)?,
            "delta_color" => e.delta_color = num(v)?,
            "delta_geo" => e.delta_geo = num(v)?,
            "cull_factor" => e.cull_factor = num(v)?,
            "hue_metric" => {
                e.hue_metric = match v {
                    "circular" => HueMetric::Circular,
                    "linear" => HueMetric::Linear,
                    _ => return Err(format!("hue_metric must be circular or linear, got `{v}`")),
                }
            }
            "overlap" => {
                e.overlap = match v {
                    "exact" => OverlapForm::Exact,
                    "published" => OverlapForm::Published,
                    _ => return Err(format!("overlap must be exact or published, got `{v}`")),
                }
            }
            "sigma_hat" => self.params.sigma_hat = num(v)?,
            "subdiv" => self.params.subdiv_levels = num(v)?,
            "bias" => self.params.bias_compensation = boolean(v)?,
            "quadtree_depth" => q.max_depth = num(v)?,
            "split_threshold" => q.split_threshold = num(v)?,
            "min_patch_side" => q.min_patch_side = num(v)?,
            "visibility_tolerance" => self.params.visibility_tolerance = opt(v)?,
            "initial_step" => s.initial_step = num(v)?,
            "grow" => s.grow = num(v)?,
            "shrink" => s.shrink = num(v)?,
            "step_min" => s.step_min = num(v)?,
            "step_max" => s.step_max = num(v)?,
            "max_iters" => s.max_iters = num(v)?,
            "convergence_eps" => s.convergence_eps = num(v)?,
            "convergence_window" => s.convergence_window = num(v)?,
            "visibility_refresh" => s.visibility_refresh = num(v)?,
            "step_rule" => {
                s.rule = match v {
                    "scaled" => StepRule::Scaled,
                    "sign" => StepRule::Sign,
                    _ => return Err(format!("step_rule must be scaled or sign, got `{v}`")),
                }
            }
            "reference" => self.reference = opt(v)?,
            "mask" => self.mask = (!v.is_empty()).then(|| PathBuf::from(v)),
            "threads" => self.threads = num(v)?,
            _ => return Err(format!("unknown configuration key `{key}`")),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let e = &self.params.energy;
        let q = &self.params.quadtree;
        let s = &self.solver;
        Some(match key {
            "wreg" => e.w_reg.to_string(),
            "delta_color" => e.delta_color.to_string(),
            "delta_geo" => e.delta_geo.to_string(),
            "cull_factor" => e.cull_factor.to_string(),
            "hue_metric" => match e.hue_metric {
                HueMetric::Circular => "circular",
                HueMetric::Linear => "linear",
            }
            .into(),
            "overlap" => match e.overlap {
                OverlapForm::Exact => "exact",
                OverlapForm::Published => "published",
            }
            .into(),
            "sigma_hat" => self.params.sigma_hat.to_string(),
            "subdiv" => self.params.subdiv_levels.to_string(),
            "bias" => self.params.bias_compensation.to_string(),
            "quadtree_depth" => q.max_depth.to_string(),
            "split_threshold" => q.split_threshold.to_string(),
            "min_patch_side" => q.min_patch_side.to_string(),
            "visibility_tolerance" => show(&self.params.visibility_tolerance),
            "initial_step" => s.initial_step.to_string(),
            "grow" => s.grow.to_string(),
            "shrink" => s.shrink.to_string(),
            "step_min" => s.step_min.to_string(),
            "step_max" => s.step_max.to_string(),
            "max_iters" => s.max_iters.to_string(),
            "convergence_eps" => s.convergence_eps.to_string(),
            "convergence_window" => s.convergence_window.to_string(),
            "visibility_refresh" => s.visibility_refresh.to_string(),
            "step_rule" => match s.rule {
                StepRule::Scaled => "scaled",
                StepRule::Sign => "sign",
            }
            .into(),
            "reference" => show(&self.reference),
            "mask" => self.mask.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            "threads" => self.threads.to_string(),
            _ => return None,
        })
    }

    /// `key=value` for every key, in [`KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        KEYS.iter().map(|&k| (k, self.get(k).unwrap_or_default())).collect()
    }

    /// Report header: one `# config: key=value` line per key.
    pub fn header(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{HEADER_PREFIX} {k}={v}");
        }
        out
    }
}
