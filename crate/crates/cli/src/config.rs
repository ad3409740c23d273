//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::Example;
use crate::error::CliError;

pub const DEFAULT_POINTS: usize = 8;
pub const DEFAULT_SEED: u64 = 1;

/// Identity sets that `verify` can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Pointwise,
    Th2,
    Tb,
    Th3,
    Sur,
    /// Gauss equation against the intrinsic scalar curvature (curvature command only).
    Gauss,
}

impl Suite {
    pub const SELECTABLE: [Suite; 5] = [Suite::Pointwise, Suite::Th2, Suite::Tb, Suite::Th3, Suite::Sur];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Pointwise => "pointwise",
            Suite::Th2 => "th2",
            Suite::Tb => "tb",
            Suite::Th3 => "th3",
            Suite::Sur => "sur",
            Suite::Gauss => "gauss",
        }
    }

    /// Relative tolerance used when no `tol` is configured.
    pub fn default_tol(self) -> f64 {
        match self {
            Suite::Pointwise => 1e-12,
            _ => g2kit::curvature::FIELD_TOL,
        }
    }

    fn parse(text: &str) -> Result<Suite, CliError> {
        Suite::SELECTABLE
            .into_iter()
            .find(|s| s.name().eq_ignore_ascii_case(text.trim()))
            .ok_or_else(|| {
                let known: Vec<&str> = Suite::SELECTABLE.iter().map(|s| s.name()).collect();
                CliError::config(format!("unknown suite {text:?} (expected one of {})", known.join(", ")))
            })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A suite list written either as `"th2,sur"` or `["th2", "sur"]`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SuiteField {
    One(String),
    Many(Vec<String>),
}

/// Scalars and expressions are both accepted as parameter values in the file.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ParamValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl ParamValue {
    fn into_text(self) -> String {
        match self {
            ParamValue::Int(i) => i.to_string(),
            ParamValue::Float(x) => x.to_string(),
            ParamValue::Text(s) => s,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    example: Option<String>,
    #[serde(default)]
    params: BTreeMap<String, ParamValue>,
    points: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    suite: Option<SuiteField>,
    json: Option<PathBuf>,
    dilation: Option<String>,
}

/// Values given on the command line; each one overrides the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub example: Option<String>,
    /// `key=value` items; an item may hold several pairs separated by commas.
    pub params: Vec<String>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub suite: Option<String>,
    pub json: Option<PathBuf>,
    pub dilation: Option<String>,
}

/// Fully resolved settings for one command.
#[derive(Debug)]
pub struct RunConfig {
    pub example: Example,
    pub points: usize,
    pub seed: u64,
    /// Overrides every suite's default tolerance when set.
    pub tol: Option<f64>,
    pub suites: Vec<Suite>,
    pub json: Option<PathBuf>,
    pub dilation: Option<String>,
}

impl RunConfig {
    pub fn resolve(flags: Overrides) -> Result<RunConfig, CliError> {
        let file = match &flags.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };

        let mut params: BTreeMap<String, String> = file.params.into_iter().map(|(k, v)| (k, v.into_text())).collect();
        for item in &flags.params {
            for pair in item.split(',').filter(|s| !s.trim().is_empty()) {
                let (key, value) = pair
                    .split_once('=')
                    .ok_or_else(|| CliError::config(format!("parameter {pair:?} is not of the form key=value")))?;
                params.insert(key.trim().to_string(), value.trim().to_string());
            }
        }

        let name = flags
            .example
            .or(file.example)
            .ok_or_else(|| CliError::config("no example selected (use --example NAME)"))?;
        let example = Example::build(&name, &params)?;

        let points = flags.points.or(file.points).unwrap_or(DEFAULT_POINTS);
        if points == 0 {
            return Err(CliError::config("points must be at least 1"));
        }
        let tol = flags.tol.or(file.tol);
        if let Some(t) = tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::config(format!(
                    "tolerance must be positive and finite, got {t}"
                )));
            }
        }

        let suite_names: Vec<String> = match (flags.suite, file.suite) {
            (Some(s), _) | (None, Some(SuiteField::One(s))) => s.split(',').map(str::to_string).collect(),
            (None, Some(SuiteField::Many(v))) => v,
            (None, None) => vec!["pointwise".into(), "th2".into()],
        };
        let mut suites = suite_names
            .iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| Suite::parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        suites.sort();
        suites.dedup();
        if suites.is_empty() {
            return Err(CliError::config("empty suite list"));
        }

        Ok(RunConfig {
            example,
            points,
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            tol,
            suites,
            json: flags.json.or(file.json),
            dilation: flags.dilation.or(file.dilation),
        })
    }

    pub fn tol_for(&self, suite: Suite) -> f64 {
        self.tol.unwrap_or_else(|| suite.default_tol())
    }
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(example: &str) -> Overrides {
        Overrides {
            example: Some(example.into()),
            ..Overrides::default()
        }
    }

    #[test]
    fn defaults_apply_without_file() {
        let cfg = RunConfig::resolve(flags("parallel")).unwrap();
        assert_eq!(cfg.points, DEFAULT_POINTS);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.suites, vec![Suite::Pointwise, Suite::Th2]);
        assert_eq!(cfg.tol_for(Suite::Pointwise), 1e-12);
        assert_eq!(cfg.tol_for(Suite::Th2), 1e-6);
    }

    #[test]
    fn unknown_example_and_bad_tolerance_are_rejected() {
        let err = RunConfig::resolve(flags("torus")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let mut f = flags("parallel");
        f.tol = Some(0.0);
        assert_eq!(RunConfig::resolve(f).unwrap_err().exit_code(), 2);
        let mut f = flags("parallel");
        f.suite = Some("th2,bogus".into());
        assert_eq!(RunConfig::resolve(f).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "example = \"sphere\"\npoints = 3\nseed = 9\nsuite = [\"sur\", \"th2\"]\n[params]\nr = 2\n",
        )
        .unwrap();
        let from_file = RunConfig::resolve(Overrides {
            config: Some(path.clone()),
            ..Overrides::default()
        })
        .unwrap();
        assert_eq!(from_file.example.name(), "sphere");
        assert_eq!(from_file.example.params()["r"], "2");
        assert_eq!((from_file.points, from_file.seed), (3, 9));
        assert_eq!(from_file.suites, vec![Suite::Th2, Suite::Sur]);

        let mixed = RunConfig::resolve(Overrides {
            config: Some(path),
            points: Some(5),
            params: vec!["r=0.5".into()],
            suite: Some("pointwise".into()),
            ..Overrides::default()
        })
        .unwrap();
        assert_eq!(mixed.points, 5);
        assert_eq!(mixed.seed, 9);
        assert_eq!(mixed.example.params()["r"], "0.5");
        assert_eq!(mixed.suites, vec![Suite::Pointwise]);
    }

    #[test]
    fn unknown_file_keys_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "example = \"parallel\"\npoint = 3\n").unwrap();
        let err = RunConfig::resolve(Overrides {
            config: Some(path),
            ..Overrides::default()
        })
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
