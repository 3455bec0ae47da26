//! Declarative experiment description and its validation.

use std::fmt;
use std::str::FromStr;

use fas_core::{Method, QuadratureConfig, SeriesTruncation};
use serde::{Deserialize, Serialize};

/// A value given either once or as a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

impl<T> From<Vec<T>> for OneOrMany<T> {
    fn from(v: Vec<T>) -> Self {
        OneOrMany::Many(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVar {
    #[serde(rename = "phi_db")]
    PhiDb,
    K,
    M,
    W,
}

impl SweepVar {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVar::PhiDb => "phi_db",
            SweepVar::K => "K",
            SweepVar::M => "M",
            SweepVar::W => "W",
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepVar {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "phi_db" => Ok(SweepVar::PhiDb),
            "K" => Ok(SweepVar::K),
            "M" => Ok(SweepVar::M),
            "W" => Ok(SweepVar::W),
            other => Err(format!("unknown sweep variable '{other}' (expected phi_db, K, M or W)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(rename = "M")]
    pub ports: OneOrMany<usize>,
    #[serde(rename = "K")]
    pub active: OneOrMany<usize>,
    #[serde(rename = "W")]
    pub aperture: OneOrMany<f64>,
    #[serde(rename = "R")]
    pub rate: OneOrMany<f64>,
    pub phi_db: OneOrMany<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSettings {
    pub samples: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chunk_size: Option<u64>,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 1,
            chunk_size: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationOverride {
    pub n_max: Option<u32>,
    pub tail_tol: Option<f64>,
    pub term_cap: Option<usize>,
}

impl TruncationOverride {
    pub fn resolve(&self) -> SeriesTruncation {
        let d = SeriesTruncation::default();
        SeriesTruncation {
            n_max: self.n_max.unwrap_or(d.n_max),
            tail_tol: self.tail_tol.unwrap_or(d.tail_tol),
            term_cap: self.term_cap.unwrap_or(d.term_cap),
        }
    }
}

/// Node counts and cutoff; the cutoff defaults to the SNR-scaled value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureOverride {
    #[serde(rename = "H")]
    pub h: Option<f64>,
    #[serde(rename = "U_p")]
    pub u_p: Option<usize>,
    #[serde(rename = "U_l")]
    pub u_l: Option<usize>,
    pub normalize: Option<bool>,
}

impl QuadratureOverride {
    pub fn resolve(&self, avg_snr: f64) -> QuadratureConfig {
        let d = QuadratureConfig::for_snr(avg_snr);
        QuadratureConfig {
            h: self.h.unwrap_or(d.h),
            u_p: self.u_p.unwrap_or(d.u_p),
            u_l: self.u_l.unwrap_or(d.u_l),
            normalize: self.normalize.unwrap_or(d.normalize),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    pub path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_name")]
    pub name: String,
    pub sweep: SweepVar,
    pub methods: Vec<Method>,
    pub scenario: Scenario,
    #[serde(default)]
    pub mc: McSettings,
    #[serde(default)]
    pub truncation: TruncationOverride,
    #[serde(default)]
    pub quadrature: QuadratureOverride,
    #[serde(default)]
    pub output: OutputSettings,
}

fn default_name() -> String {
    "experiment".into()
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec always serializes")
    }

    /// Values of the swept variable, as given.
    pub fn sweep_values(&self) -> Vec<f64> {
        let s = &self.scenario;
        match self.sweep {
            SweepVar::PhiDb => s.phi_db.to_vec(),
            SweepVar::W => s.aperture.to_vec(),
            SweepVar::K => s.active.to_vec().into_iter().map(|k| k as f64).collect(),
            SweepVar::M => s.ports.to_vec().into_iter().map(|m| m as f64).collect(),
        }
    }
}

/// A single problem in the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub ports: usize,
    pub active: usize,
    pub aperture: f64,
    pub rate: f64,
    pub phi_db: f64,
    pub sweep_value: f64,
}

/// Every point of the sweep: the cartesian product of the non-swept lists in
/// the order M, K, W, R, phi_db (outer), then the swept variable (inner).
pub fn expand_points(spec: &ExperimentSpec) -> Vec<Point> {
    let s = &spec.scenario;
    let single = |on: bool, v: Vec<f64>| if on { vec![f64::NAN] } else { v };
    let ms = single(spec.sweep == SweepVar::M, s.ports.to_vec().into_iter().map(|x| x as f64).collect());
    let ks = single(spec.sweep == SweepVar::K, s.active.to_vec().into_iter().map(|x| x as f64).collect());
    let ws = single(spec.sweep == SweepVar::W, s.aperture.to_vec());
    let rs = s.rate.to_vec();
    let ps = single(spec.sweep == SweepVar::PhiDb, s.phi_db.to_vec());
    let sweep = spec.sweep_values();
    let mut out = Vec::new();
    for &m in &ms {
        for &k in &ks {
            for &w in &ws {
                for &r in &rs {
                    for &p in &ps {
                        for &x in &sweep {
                            let pick = |var: SweepVar, fixed: f64| if spec.sweep == var { x } else { fixed };
                            out.push(Point {
                                ports: pick(SweepVar::M, m) as usize,
                                active: pick(SweepVar::K, k) as usize,
                                aperture: pick(SweepVar::W, w),
                                rate: r,
                                phi_db: pick(SweepVar::PhiDb, p),
                                sweep_value: x,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// Every problem with a spec. Never fails; an empty list means valid.
pub fn validate_spec(spec: &ExperimentSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut flag = |code: &'static str, message: String| {
        if !out.iter().any(|v: &Violation| v.code == code && v.message == message) {
            out.push(Violation { code, message });
        }
    };
    if spec.methods.is_empty() {
        flag("EMPTY_METHODS", "at least one method is required".into());
    }
    let sweep = spec.sweep_values();
    if sweep.is_empty() {
        flag("EMPTY_SWEEP", format!("sweep variable {} has no values", spec.sweep));
    }
    if sweep.windows(2).any(|w| !(w[1] > w[0])) {
        flag("SWEEP_NOT_INCREASING", format!("{} values must be strictly increasing", spec.sweep));
    }
    let s = &spec.scenario;
    for (name, len) in [
        ("M", s.ports.to_vec().len()),
        ("K", s.active.to_vec().len()),
        ("W", s.aperture.to_vec().len()),
        ("R", s.rate.to_vec().len()),
        ("phi_db", s.phi_db.to_vec().len()),
    ] {
        if len == 0 && name != spec.sweep.as_str() {
            flag("EMPTY_FIELD", format!("{name} has no values"));
        }
    }
    if s.ports.to_vec().contains(&0) {
        flag("ZERO_PORTS", "M must be at least 1".into());
    }
    if s.active.to_vec().contains(&0) {
        flag("ZERO_ACTIVE", "K must be at least 1".into());
    }
    if s.aperture.to_vec().iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        flag("NONPOSITIVE_APERTURE", "W must be positive and finite".into());
    }
    if s.rate.to_vec().iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        flag("NONPOSITIVE_RATE", "R must be positive and finite".into());
    }
    if s.phi_db.to_vec().iter().any(|p| !p.is_finite()) {
        flag("NONFINITE_SNR", "phi_db must be finite".into());
    }
    let analytic = spec.methods.iter().any(|m| m.is_analytic());
    for p in expand_points(spec) {
        if p.active > p.ports {
            flag("K_EXCEEDS_M", format!("K = {} exceeds M = {}", p.active, p.ports));
        } else if analytic && p.active == p.ports && p.active > 0 {
            flag(
                "ANALYTIC_REQUIRES_K_LT_M",
                format!("methods gc, lb and asy need K < M (got K = M = {})", p.ports),
            );
        }
    }
    if spec.methods.contains(&Method::Mc) && spec.mc.samples == 0 {
        flag("ZERO_SAMPLES", "mc needs a positive sample count".into());
    }
    if spec.mc.chunk_size == Some(0) {
        flag("ZERO_CHUNK", "mc chunk_size must be positive".into());
    }
    if spec.truncation.resolve().validate().is_err() {
        flag("INVALID_TRUNCATION", "n_max >= 1, tail_tol > 0 and term_cap > 0 are required".into());
    }
    let q = &spec.quadrature;
    if q.h.is_some_and(|h| !(h > 0.0 && h.is_finite())) || q.u_p == Some(0) || q.u_l == Some(0) {
        flag("INVALID_QUADRATURE", "H > 0 and U_p, U_l >= 1 are required".into());
    }
    if spec.name.is_empty() || spec.name.contains(['/', '\\']) {
        flag("INVALID_NAME", "name must be nonempty and free of path separators".into());
    }
    out
}
