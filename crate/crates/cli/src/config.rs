//! Config-file loading: a flat `key = value` document mirroring the
//! analysis thresholds, with `#` comments and a repeatable `exclude` key.
//! Unknown keys are rejected. Flag overrides are applied afterwards.

use std::path::Path;

use anyhow::{bail, Context, Result};
use uivet_core::model::{AnalysisConfig, BoundingBox};

pub fn parse_config(raw: &str) -> Result<AnalysisConfig> {
    let mut config = AnalysisConfig::default();
    for (lineno, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key = value, got {line:?}", lineno + 1);
        };
        let key = key.trim();
        let value = value.trim();
        let ctx = || format!("config line {}: invalid value for {key}", lineno + 1);
        match key {
            "mt" => config.mt = Some(value.parse().with_context(ctx)?),
            "dt" => config.dt = value.parse().with_context(ctx)?,
            "lt" => config.lt = value.parse().with_context(ctx)?,
            "ct" => config.ct = value.parse().with_context(ctx)?,
            "idt" => config.idt = value.parse().with_context(ctx)?,
            "pid_fov_degrees" => config.pid_fov_degrees = value.parse().with_context(ctx)?,
            "pid_luminance_cdm2" => config.pid_luminance_cdm2 = value.parse().with_context(ctx)?,
            "pid_color_factor" => config.pid_color_factor = value.parse().with_context(ctx)?,
            "exclude" => {
                let b = BoundingBox::from_csv(value)
                    .with_context(|| format!("config line {}: exclude wants x,y,w,h", lineno + 1))?;
                config.exclusion_regions.push(b);
            }
            other => bail!("config line {}: unknown key {other:?}", lineno + 1),
        }
    }
    Ok(config)
}

#[derive(Debug, Default, Clone, clap::Args)]
pub struct ThresholdOverrides {
    /// GC-matching threshold in pixels (default: screen width / 8)
    #[arg(long)]
    pub mt: Option<u32>,
    /// Suspicious-pair difference-density threshold, 0..=1
    #[arg(long)]
    pub dt: Option<f64>,
    /// Layout threshold in pixels
    #[arg(long)]
    pub lt: Option<u32>,
    /// Color histogram similarity threshold, 0..=1
    #[arg(long)]
    pub ct: Option<f64>,
    /// Binarized image-difference threshold, 0..=1
    #[arg(long)]
    pub idt: Option<f64>,
}

/// File values override defaults; flags override the file.
pub fn load_config(
    path: Option<&Path>,
    overrides: &ThresholdOverrides,
    excludes: &[BoundingBox],
) -> Result<AnalysisConfig> {
    let mut config = match path {
        Some(p) => {
            let raw = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read config {}", p.display()))?;
            parse_config(&raw)?
        }
        None => AnalysisConfig::default(),
    };
    if let Some(v) = overrides.mt {
        config.mt = Some(v);
    }
    if let Some(v) = overrides.dt {
        config.dt = v;
    }
    if let Some(v) = overrides.lt {
        config.lt = v;
    }
    if let Some(v) = overrides.ct {
        config.ct = v;
    }
    if let Some(v) = overrides.idt {
        config.idt = v;
    }
    config.exclusion_regions.extend_from_slice(excludes);
    config
        .validate()
        .map_err(|e| anyhow::anyhow!("invalid configuration: {e}"))?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, AnalysisConfig::default());
    }

    #[test]
    fn file_values_and_flag_overrides() {
        let c = parse_config("lt = 9\ndt = 0.5\nexclude = 0,0,100,50\n# comment\n").unwrap();
        assert_eq!(c.lt, 9);
        assert_eq!(c.dt, 0.5);
        assert_eq!(c.exclusion_regions.len(), 1);

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cfg");
        std::fs::write(&p, "lt = 5\n").unwrap();
        let overrides = ThresholdOverrides {
            lt: Some(8),
            ..Default::default()
        };
        let c = load_config(Some(&p), &overrides, &[]).unwrap();
        assert_eq!(c.lt, 8, "flag overrides file");
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(parse_config("zoom = 3\n").is_err());
        assert!(parse_config("lt = fast\n").is_err());
        assert!(parse_config("exclude = 1,2,3\n").is_err());
    }
}
