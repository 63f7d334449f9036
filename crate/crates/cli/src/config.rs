//! Parameters from a TOML file, overridden by command-line flags.

use std::path::Path;

use clap::Args;
use pairquant_core::bcs::{BcsOptions, GapBranch, MeanFieldShift};
use pairquant_core::model::{PairType, PairingModel, StrengthConvention};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every key the configuration file may set. All optional.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega1: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega2: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g11: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g12: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g22: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_range: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_type: Option<toml::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strength_convention: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_field_shift: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Degeneracy of both levels.
    #[arg(long)]
    pub omega: Option<u32>,
    #[arg(long)]
    pub omega1: Option<u32>,
    #[arg(long)]
    pub omega2: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps2: Option<f64>,
    /// Uniform strength for g11, g12 and g22.
    #[arg(long, short = 'g')]
    pub g: Option<f64>,
    #[arg(long)]
    pub g11: Option<f64>,
    #[arg(long)]
    pub g12: Option<f64>,
    #[arg(long)]
    pub g22: Option<f64>,
    /// raw | times_four
    #[arg(long)]
    pub convention: Option<String>,
    /// included | omitted
    #[arg(long)]
    pub shift: Option<String>,
    /// minus | plus | auto
    #[arg(long)]
    pub branch: Option<String>,
}

fn parse<T: std::str::FromStr>(what: &str, s: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>()
        .map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

pub fn pair_type_from(v: &toml::Value) -> Result<PairType, CliError> {
    match v {
        toml::Value::Integer(n) => u8::try_from(*n)
            .map_err(|_| CliError::Validation(format!("pair_type {n}")))
            .and_then(|n| PairType::from_number(n).map_err(|e| CliError::Validation(e.to_string()))),
        toml::Value::String(s) => parse("pair_type", s),
        other => Err(CliError::Validation(format!("pair_type: unexpected {other}"))),
    }
}

/// Inclusive `a:b`, or a single `a`.
pub fn parse_range(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Validation(format!("bad p range '{s}', expected a:b"));
    match s.split_once(':') {
        Some((a, b)) => {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(CliError::Validation(format!("empty p range '{s}'")));
            }
            Ok((a, b))
        }
        None => {
            let a = s.trim().parse().map_err(|_| bad())?;
            Ok((a, a))
        }
    }
}

/// Fully resolved model and solver settings.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub model: PairingModel,
    pub bcs: BcsOptions,
}

pub fn resolve_model(file: &FileConfig, args: &ModelArgs) -> Result<Resolved, CliError> {
    let omega1 = args.omega1.or(args.omega).or(file.omega1).unwrap_or(20);
    let omega2 = args.omega2.or(args.omega).or(file.omega2).unwrap_or(omega1);
    let eps1 = args.eps1.or(file.eps1).unwrap_or(0.0);
    let eps2 = args.eps2.or(file.eps2).unwrap_or(1.0);
    let g11 = args.g11.or(args.g).or(file.g11).unwrap_or(0.6);
    let g12 = args.g12.or(args.g).or(file.g12).unwrap_or(0.6);
    let g22 = args.g22.or(args.g).or(file.g22).unwrap_or(0.6);
    let convention = match args.convention.as_deref().or(file.strength_convention.as_deref()) {
        Some(s) => parse::<StrengthConvention>("strength_convention", s)?,
        None => StrengthConvention::default(),
    };
    let model = PairingModel::new(omega1, omega2, eps1, eps2, g11, g12, g22, convention)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let mut bcs = BcsOptions::default();
    if let Some(s) = args.shift.as_deref().or(file.mean_field_shift.as_deref()) {
        bcs.shift = parse::<MeanFieldShift>("mean_field_shift", s)?;
    }
    if let Some(s) = args.branch.as_deref().or(file.branch.as_deref()) {
        bcs.branch = if s.eq_ignore_ascii_case("auto") {
            None
        } else {
            Some(parse::<GapBranch>("branch", s)?)
        };
    }
    Ok(Resolved { model, bcs })
}

pub fn resolve_pair_type(flag: Option<&str>, file: &FileConfig) -> Result<PairType, CliError> {
    match (flag, &file.pair_type) {
        (Some(s), _) => parse("pair type", s),
        (None, Some(v)) => pair_type_from(v),
        (None, None) => Ok(PairType::Cross),
    }
}

/// `--p-range` beats `--p` beats the file; the default spans every pair count.
pub fn resolve_p_range(
    range_flag: Option<&str>,
    p_flag: Option<u32>,
    file: &FileConfig,
    max: u32,
) -> Result<(u32, u32), CliError> {
    if let Some(r) = range_flag {
        return parse_range(r);
    }
    if let Some(p) = p_flag {
        return Ok((p, p));
    }
    if let Some(r) = &file.p_range {
        return parse_range(r);
    }
    if let Some(p) = file.p {
        return Ok((p, p));
    }
    Ok((0, max))
}
