//! Parameter scans and their CSV/JSON output.
//!
//! Points are independent and run on a bounded rayon pool; rows are sorted
//! by `(p, g)` before they are returned so output never depends on thread
//! count or scheduling.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bcs::{bcs_two_qubit_state, solve_bcs_with, BcsOptions};
use crate::exact::{exact_rho, solve_exact};
use crate::model::{validate, ModelError, Occupancy, PairType, PairingModel};
use crate::onelevel::{asymptotes, one_level_measures, one_level_rho, OneLevelParams};
use crate::projection::{pbcs_energy, pbcs_rho};
use crate::xstate::{discord, discord_a_side, CorrelationSet, XState};

pub const THREADS_ENV: &str = "PAIRQUANT_THREADS";

pub const BASE_COLUMNS: [&str; 16] = [
    "p",
    "g",
    "energy",
    "rho11",
    "rho22",
    "rho33",
    "rho44",
    "rho23",
    "concurrence",
    "mutual_info",
    "classical",
    "discord",
    "s1",
    "s2",
    "theta",
    "branch",
];

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("invalid scan: {0}")]
    Spec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("nothing to write: the table is empty")]
    EmptyTable,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Encode { path: PathBuf, message: String },
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bcs,
    Pbcs,
    Exact,
    OneLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(ScanError::Spec(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub method: Method,
    /// For [`Method::OneLevel`] only `omega1` is read, as the level degeneracy.
    pub model: PairingModel,
    pub p_min: u32,
    pub p_max: u32,
    /// Uniform strengths to sweep; empty keeps the model's own `G_ij`.
    pub g_values: Vec<f64>,
    pub pair_type: PairType,
    pub bcs: BcsOptions,
    /// Add the discord with the measurement on `A`.
    pub a_side: bool,
    /// Add `discord / discord(g_ref)` at the same `p`.
    pub ratio_reference: Option<f64>,
}

impl ScanSpec {
    pub fn new(method: Method, model: PairingModel, p_min: u32, p_max: u32, pair_type: PairType) -> Self {
        ScanSpec {
            method,
            model,
            p_min,
            p_max,
            g_values: Vec::new(),
            pair_type,
            bcs: BcsOptions::default(),
            a_side: false,
            ratio_reference: None,
        }
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        if self.p_min > self.p_max {
            return Err(ScanError::Spec(format!(
                "empty p range {}:{}",
                self.p_min, self.p_max
            )));
        }
        for g in self.g_values.iter().chain(self.ratio_reference.iter()) {
            if !g.is_finite() || *g < 0.0 {
                return Err(ScanError::Spec(format!("G values must be finite and >= 0, got {g}")));
            }
        }
        match self.method {
            Method::OneLevel => {
                let omega = self.model.omega1;
                if omega < 2 {
                    return Err(ScanError::Spec(format!("one-level degeneracy must be >= 2, got {omega}")));
                }
                if self.p_max > omega {
                    return Err(ModelError::PairCountOutOfRange { p: self.p_max, max: omega }.into());
                }
            }
            _ => {
                validate(&self.model, Occupancy::new(self.p_max), self.pair_type)?;
            }
        }
        Ok(())
    }

    /// Extra columns after the fixed ones, in output order.
    pub fn extra_columns(&self) -> Vec<&'static str> {
        let mut cols = Vec::new();
        if self.a_side {
            cols.push("discord_a");
        }
        if self.method == Method::OneLevel {
            cols.extend(["concurrence_asymptote", "mutual_info_asymptote", "classical_asymptote", "discord_asymptote"]);
        }
        if self.ratio_reference.is_some() {
            cols.push("discord_ratio");
        }
        cols
    }

    fn g_points(&self) -> Vec<Option<f64>> {
        if self.g_values.is_empty() {
            vec![None]
        } else {
            let mut g = self.g_values.clone();
            g.sort_by(f64::total_cmp);
            g.dedup();
            g.into_iter().map(Some).collect()
        }
    }
}

/// One output line. Numeric fields are `None` only on error rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub p: u32,
    pub g: f64,
    pub energy: Option<f64>,
    pub rho11: Option<f64>,
    pub rho22: Option<f64>,
    pub rho33: Option<f64>,
    pub rho44: Option<f64>,
    pub rho23: Option<f64>,
    pub concurrence: Option<f64>,
    pub mutual_info: Option<f64>,
    pub classical: Option<f64>,
    pub discord: Option<f64>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub theta: Option<f64>,
    pub branch: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discord_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concurrence_asymptote: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutual_info_asymptote: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical_asymptote: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discord_asymptote: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discord_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Folds `-0.0` into `0.0` so tables never print signed zeros.
fn unsigned(x: f64) -> Option<f64> {
    Some(x + 0.0)
}

impl ScanRow {
    fn from_state(p: u32, g: f64, energy: Option<f64>, rho: &XState, m: &CorrelationSet) -> Self {
        ScanRow {
            p,
            g,
            energy: energy.and_then(unsigned),
            rho11: unsigned(rho.rho11),
            rho22: unsigned(rho.rho22),
            rho33: unsigned(rho.rho33),
            rho44: unsigned(rho.rho44),
            rho23: unsigned(rho.rho23),
            concurrence: unsigned(m.concurrence),
            mutual_info: unsigned(m.mutual_info),
            classical: unsigned(m.classical),
            discord: unsigned(m.discord),
            s1: unsigned(m.s1),
            s2: unsigned(m.s2),
            theta: unsigned(m.theta),
            branch: m.branch.to_string(),
            discord_a: None,
            concurrence_asymptote: None,
            mutual_info_asymptote: None,
            classical_asymptote: None,
            discord_asymptote: None,
            discord_ratio: None,
            error: None,
        }
    }

    fn failed(p: u32, g: f64, message: String) -> Self {
        ScanRow {
            p,
            g,
            energy: None,
            rho11: None,
            rho22: None,
            rho33: None,
            rho44: None,
            rho23: None,
            concurrence: None,
            mutual_info: None,
            classical: None,
            discord: None,
            s1: None,
            s2: None,
            theta: None,
            branch: "error".into(),
            discord_a: None,
            concurrence_asymptote: None,
            mutual_info_asymptote: None,
            classical_asymptote: None,
            discord_asymptote: None,
            discord_ratio: None,
            error: Some(message),
        }
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }

    fn column(&self, name: &str) -> Option<f64> {
        match name {
            "energy" => self.energy,
            "rho11" => self.rho11,
            "rho22" => self.rho22,
            "rho33" => self.rho33,
            "rho44" => self.rho44,
            "rho23" => self.rho23,
            "concurrence" => self.concurrence,
            "mutual_info" => self.mutual_info,
            "classical" => self.classical,
            "discord" => self.discord,
            "s1" => self.s1,
            "s2" => self.s2,
            "theta" => self.theta,
            "discord_a" => self.discord_a,
            "concurrence_asymptote" => self.concurrence_asymptote,
            "mutual_info_asymptote" => self.mutual_info_asymptote,
            "classical_asymptote" => self.classical_asymptote,
            "discord_asymptote" => self.discord_asymptote,
            "discord_ratio" => self.discord_ratio,
            _ => None,
        }
    }
}

/// A scan result plus the column layout it should be written with.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn error_rows(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| r.is_error())
    }
}

/// The strength reported in the `g` column: the swept value, or `g12` when
/// the model's own strengths are used.
fn effective_model(model: &PairingModel, g: Option<f64>) -> (PairingModel, f64) {
    match g {
        Some(g) => (model.with_uniform_strength(g), g),
        None => (*model, model.g12),
    }
}

fn two_level_point(spec: &ScanSpec, p: u32, g: Option<f64>) -> ScanRow {
    let (model, g_eff) = effective_model(&spec.model, g);
    let fail = |e: String| ScanRow::failed(p, g_eff, e);
    let checked = match validate(&model, Occupancy::new(p), spec.pair_type) {
        Ok(c) => c,
        Err(e) => return fail(e.to_string()),
    };
    let t = checked.pair_type;
    let occ = checked.occupancy;
    let result: Result<(Option<f64>, XState), String> = match spec.method {
        Method::Bcs => solve_bcs_with(&model, occ, &spec.bcs)
            .map_err(|e| e.to_string())
            .and_then(|s| {
                let rho = bcs_two_qubit_state(&s, t).map_err(|e| e.to_string())?;
                Ok((Some(s.energy), rho))
            }),
        Method::Pbcs => solve_bcs_with(&model, occ, &spec.bcs)
            .map_err(|e| e.to_string())
            .and_then(|s| {
                let e = pbcs_energy(&model, &s, p).map_err(|e| e.to_string())?;
                let rho = pbcs_rho(&model, &s, p, t).map_err(|e| e.to_string())?;
                Ok((Some(e), rho))
            }),
        Method::Exact => solve_exact(&model, occ)
            .map_err(|e| e.to_string())
            .and_then(|st| {
                let rho = exact_rho(&st, t).map_err(|e| e.to_string())?;
                Ok((Some(st.e0), rho))
            }),
        Method::OneLevel => unreachable!("one-level points are built separately"),
    };
    match result {
        Ok((energy, rho)) => {
            if let Err(e) = rho.check() {
                return fail(e.to_string());
            }
            let m = discord(&rho);
            let mut row = ScanRow::from_state(p, g_eff, energy, &rho, &m);
            if spec.a_side {
                row.discord_a = unsigned(discord_a_side(&rho).discord);
            }
            row
        }
        Err(e) => fail(e),
    }
}

fn one_level_point(spec: &ScanSpec, p: u32, g: Option<f64>) -> ScanRow {
    let g_eff = g.unwrap_or(spec.model.g11);
    let params = match OneLevelParams::new(u64::from(spec.model.omega1), u64::from(p)) {
        Ok(x) => x,
        Err(e) => {
            return ScanRow::failed(p, g_eff, e.to_string())
        }
    };
    let rho = match one_level_rho(params) {
        Ok(r) => r,
        Err(e) => {
            return ScanRow::failed(p, g_eff, e.to_string())
        }
    };
    let m = one_level_measures(params);
    let mut row = ScanRow::from_state(p, g_eff, None, &rho, &m);
    let a = asymptotes(params);
    row.concurrence_asymptote = unsigned(a.concurrence);
    row.mutual_info_asymptote = unsigned(a.mutual_info);
    row.classical_asymptote = unsigned(a.classical);
    row.discord_asymptote = unsigned(a.discord);
    if spec.a_side {
        row.discord_a = unsigned(discord_a_side(&rho).discord);
    }
    row
}

fn point(spec: &ScanSpec, p: u32, g: Option<f64>) -> ScanRow {
    match spec.method {
        Method::OneLevel => one_level_point(spec, p, g),
        _ => two_level_point(spec, p, g),
    }
}

/// `PAIRQUANT_THREADS` if set to a positive integer, else the number of
/// logical processors.
pub fn worker_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

pub fn run_scan(spec: &ScanSpec) -> Result<ScanTable, ScanError> {
    run_scan_with_threads(spec, worker_count())
}

pub fn run_scan_with_threads(spec: &ScanSpec, threads: usize) -> Result<ScanTable, ScanError> {
    spec.validate()?;
    let gs = spec.g_points();
    let tasks: Vec<(u32, Option<f64>)> = (spec.p_min..=spec.p_max)
        .flat_map(|p| gs.iter().map(move |&g| (p, g)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| ScanError::Pool(e.to_string()))?;
    let mut rows: Vec<ScanRow> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(p, g)| point(spec, p, g))
            .collect()
    });
    rows.sort_by(|a, b| a.p.cmp(&b.p).then(a.g.total_cmp(&b.g)));

    if let Some(g_ref) = spec.ratio_reference {
        for row in rows.iter_mut() {
            let reference = point(spec, row.p, Some(g_ref)).discord;
            row.discord_ratio = match (row.discord, reference) {
                (Some(d), Some(r)) if r != 0.0 => unsigned(d / r),
                _ => None,
            };
        }
    }

    let mut columns: Vec<&'static str> = BASE_COLUMNS.to_vec();
    columns.extend(spec.extra_columns());
    Ok(ScanTable { columns, rows })
}

/// Seventeen significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_bytes(table: &ScanTable) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        let record: Vec<String> = table
            .columns
            .iter()
            .map(|&c| match c {
                "p" => row.p.to_string(),
                "g" => format_float(row.g),
                "branch" => row.branch.clone(),
                other => row.column(other).map(format_float).unwrap_or_default(),
            })
            .collect();
        w.write_record(&record)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Serialized table, ending in a newline.
pub fn render(table: &ScanTable, format: Format) -> Result<Vec<u8>, String> {
    match format {
        Format::Csv => csv_bytes(table).map_err(|e| e.to_string()),
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&table.rows).map_err(|e| e.to_string())?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// Writes the table. An empty table is refused before any file is created.
pub fn emit(table: &ScanTable, format: Format, path: &Path) -> Result<(), ScanError> {
    if table.rows.is_empty() {
        return Err(ScanError::EmptyTable);
    }
    let bytes = render(table, format).map_err(|message| ScanError::Encode {
        path: path.to_path_buf(),
        message,
    })?;
    let io = |source| ScanError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(&bytes).map_err(io)?;
    f.flush().map_err(io)
}

/// Parses JSON written by [`emit`].
pub fn parse_json(bytes: &[u8]) -> Result<Vec<ScanRow>, serde_json::Error> {
    serde_json::from_slice(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pbcs_spec() -> ScanSpec {
        ScanSpec::new(Method::Pbcs, PairingModel::symmetric(6, 0.6).unwrap(), 0, 12, PairType::Cross)
    }

    #[test]
    fn header_is_fixed() {
        let t = run_scan_with_threads(&pbcs_spec(), 1).unwrap();
        let out = String::from_utf8(render(&t, Format::Csv).unwrap()).unwrap();
        assert_eq!(
            out.lines().next().unwrap(),
            "p,g,energy,rho11,rho22,rho33,rho44,rho23,concurrence,mutual_info,classical,discord,s1,s2,theta,branch"
        );
        assert!(out.ends_with('\n'));
        assert_eq!(out.lines().count(), 14);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let mut spec = pbcs_spec();
        spec.g_values = vec![0.8, 0.4, 0.6];
        let a = run_scan_with_threads(&spec, 1).unwrap();
        let b = run_scan_with_threads(&spec, 4).unwrap();
        assert_eq!(render(&a, Format::Csv).unwrap(), render(&b, Format::Csv).unwrap());
        assert_eq!(a.rows[0].g, 0.4);
        assert_eq!(a.rows[2].g, 0.8);
    }

    #[test]
    fn empty_range_rejected() {
        let mut spec = pbcs_spec();
        spec.p_min = 5;
        spec.p_max = 4;
        assert!(matches!(run_scan(&spec), Err(ScanError::Spec(_))));
    }

    #[test]
    fn empty_table_creates_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let t = ScanTable {
            columns: BASE_COLUMNS.to_vec(),
            rows: vec![],
        };
        assert!(matches!(emit(&t, Format::Csv, &path), Err(ScanError::EmptyTable)));
        assert!(!path.exists());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut spec = pbcs_spec();
        spec.a_side = true;
        let t = run_scan_with_threads(&spec, 2).unwrap();
        let bytes = render(&t, Format::Json).unwrap();
        assert_eq!(parse_json(&bytes).unwrap(), t.rows);
    }

    #[test]
    fn one_level_has_asymptote_columns() {
        let model = PairingModel::symmetric(40, 0.6).unwrap();
        let spec = ScanSpec::new(Method::OneLevel, model, 0, 40, PairType::SameLower);
        let t = run_scan_with_threads(&spec, 2).unwrap();
        assert_eq!(t.rows.len(), 41);
        assert!(t.columns.contains(&"discord_asymptote"));
        assert!(t.rows.iter().all(|r| r.energy.is_none() && !r.is_error()));
    }
}
