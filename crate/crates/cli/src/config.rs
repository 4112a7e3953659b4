//! JSON config files and presets.
//!
//! A config holds exactly one of `objective` (polynomial JSON), `problem`
//! (portfolio JSON) or `samples` (`[[y, h(y)], ...]`), plus optional
//! `mode`, `f_min`, `f_max`, `n`, `iterations` and `oracle`. Missing
//! extrema are computed exhaustively; `n` defaults to 1. A bare portfolio
//! problem file is accepted wherever a config is.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use qsera::preset::{self, PRESET_NAME};
use qsera::{
    discretize_continuous, objective_extrema, IterationRule, MultilinearPoly, OracleKind, PolyF64,
    PolyJson, PortfolioF64, PortfolioProblem, ProblemJson, QseraConfig, RescaleMode,
};

use crate::args::{Overrides, Source};
use crate::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub objective: Option<PolyJson>,
    pub problem: Option<ProblemJson>,
    pub samples: Option<Vec<[f64; 2]>>,
    pub mode: Option<String>,
    pub f_min: Option<f64>,
    pub f_max: Option<f64>,
    pub n: Option<u32>,
    pub iterations: Option<IterationSetting>,
    pub oracle: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum IterationSetting {
    Count(usize),
    Rule(String),
}

/// What a command operates on.
#[derive(Debug, Clone)]
pub enum Loaded {
    Preset,
    File(Box<ConfigParts>),
}

#[derive(Debug, Clone)]
pub struct ConfigParts {
    pub objective: PolyF64,
    pub problem: Option<PortfolioF64>,
    pub mode: Option<RescaleMode>,
    pub f_min: Option<f64>,
    pub f_max: Option<f64>,
    pub n: Option<u32>,
    pub iterations: Option<IterationRule>,
    pub oracle: Option<OracleKind>,
}

fn read_json(path: &Path) -> CliResult<serde_json::Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Err(CliError::Input(format!(
            "{}: config file is empty",
            path.display()
        )));
    }
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn from_value<T: serde::de::DeserializeOwned>(
    path: &Path,
    value: serde_json::Value,
) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn parse_config(path: &Path) -> CliResult<ConfigParts> {
    let value = read_json(path)?;
    let is_bare_problem = value.get("mu").is_some();
    let file: ConfigFile = if is_bare_problem {
        let problem: ProblemJson = from_value(path, value)?;
        ConfigFile {
            objective: None,
            problem: Some(problem),
            samples: None,
            mode: None,
            f_min: None,
            f_max: None,
            n: None,
            iterations: None,
            oracle: None,
        }
    } else {
        from_value(path, value)?
    };

    let given = [
        file.objective.is_some(),
        file.problem.is_some(),
        file.samples.is_some(),
    ];
    if given.iter().filter(|&&b| b).count() != 1 {
        return Err(CliError::Input(format!(
            "{}: exactly one of `objective`, `problem`, `samples` is required",
            path.display()
        )));
    }

    let mut problem = None;
    let objective = if let Some(poly) = &file.objective {
        MultilinearPoly::from_json(poly)?
    } else if let Some(p) = &file.problem {
        let p = PortfolioProblem::from_json(p)?;
        let poly = p.objective_to_polynomial()?;
        problem = Some(p);
        poly
    } else {
        let samples: Vec<(f64, f64)> = file
            .samples
            .unwrap_or_default()
            .iter()
            .map(|s| (s[0], s[1]))
            .collect();
        discretize_continuous(&samples)?.to_polynomial()?
    };

    let iterations = match file.iterations {
        None => None,
        Some(IterationSetting::Count(m)) => Some(IterationRule::Explicit(m)),
        Some(IterationSetting::Rule(s)) => Some(s.parse()?),
    };
    Ok(ConfigParts {
        objective,
        problem,
        mode: file.mode.as_deref().map(str::parse).transpose()?,
        f_min: file.f_min,
        f_max: file.f_max,
        n: file.n,
        iterations,
        oracle: file.oracle.as_deref().map(str::parse).transpose()?,
    })
}

pub fn load(source: &Source) -> CliResult<Loaded> {
    match (&source.preset, &source.config) {
        (Some(name), None) if name == PRESET_NAME => Ok(Loaded::Preset),
        (Some(name), None) => Err(CliError::Input(format!(
            "unknown preset `{name}` (available: {PRESET_NAME})"
        ))),
        (None, Some(path)) => parse_config(path).map(|p| Loaded::File(Box::new(p))),
        _ => Err(CliError::Input(
            "give exactly one of --preset or --config".into(),
        )),
    }
}

/// Search config from a loaded source with command-line overrides applied.
pub fn search_config(
    loaded: &Loaded,
    overrides: &Overrides,
    n: Option<u32>,
) -> CliResult<QseraConfig<f64>> {
    let mut cfg = match loaded {
        Loaded::Preset => preset::reference_config::<f64>(),
        Loaded::File(parts) => {
            let (lo, hi) = objective_extrema(&parts.objective);
            QseraConfig {
                objective: parts.objective.clone(),
                mode: parts.mode.unwrap_or(RescaleMode::Minimise),
                f_min: parts.f_min.unwrap_or(lo),
                f_max: parts.f_max.unwrap_or(hi),
                n_power: parts.n.unwrap_or(1),
                iterations: parts.iterations.unwrap_or_default(),
                oracle: parts.oracle.unwrap_or_default(),
            }
        }
    };
    if let Some(mode) = overrides.mode {
        cfg.mode = mode;
    }
    if let Some(rule) = overrides.iterations {
        cfg.iterations = rule;
    }
    if let Some(oracle) = overrides.oracle {
        cfg.oracle = oracle;
    }
    if let Some(n) = n {
        cfg.n_power = n;
    }
    Ok(cfg)
}

pub fn portfolio(loaded: &Loaded) -> CliResult<PortfolioF64> {
    match loaded {
        Loaded::Preset => Ok(preset::reference_problem()),
        Loaded::File(parts) => parts
            .problem
            .clone()
            .ok_or_else(|| CliError::Input("config does not describe a portfolio problem".into())),
    }
}
