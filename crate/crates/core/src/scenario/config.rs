//! Sectioned `key = value` scenario files.
//!
//! ```text
//! [scenario]
//! preset = example1-itm   # optional; keys below override the preset
//! [grid]
//! ds = 0.01
//! ```

use super::presets;
use crate::ddm::{check_cfl_ddm, ActivityMethod, ConvolutionWeights};
use crate::grid::{build_grid, cfl_dt_ddm, cfl_dt_itm, DensityVector, Grid};
use crate::hazard::{HazardModel, Rate, Refractory};
use crate::initial::InitialDensity;
use crate::itm::FluxSolve;
use crate::kernel::{DelayKernel, KernelShape};
use crate::roots::{BranchPolicy, ScanOptions};
use std::collections::BTreeMap;
use std::fmt;

const SECTIONS: &[(&str, &[&str])] = &[
    ("scenario", &["preset", "name"]),
    ("model", &["equation"]),
    (
        "hazard",
        &[
            "rate",
            "value",
            "amplitude",
            "decay",
            "offset",
            "slope",
            "shift",
            "refractory",
            "sigma",
            "max_period",
            "drop",
            "scale",
            "width",
        ],
    ),
    ("kernel", &["kind", "lambda", "d", "J", "method", "weights"]),
    (
        "initial",
        &[
            "kind", "height", "knee", "onset", "start", "end", "rate", "width",
        ],
    ),
    ("grid", &["ds", "T", "s_max", "dt"]),
    ("branch", &["policy", "index"]),
    ("solver", &["tolerance", "activity_cap", "flux_solve"]),
    ("output", &["flux", "density", "snapshots"]),
    ("convergence", &["reference", "prescribed_flux"]),
];

pub const DEFAULT_ACTIVITY_CAP: f64 = 1e3;
const CFL_SAFETY: f64 = 0.9;

/// One problem in a scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub section: String,
    /// 1-based line in the user text; 0 when the key is missing or came from a preset.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.section.is_empty()) {
            (0, true) => write!(f, "{}", self.message),
            (0, false) => write!(f, "[{}]: {}", self.section, self.message),
            (l, true) => write!(f, "line {l}: {}", self.message),
            (l, false) => write!(f, "line {l} [{}]: {}", self.section, self.message),
        }
    }
}

/// Every problem found in one parse.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    Itm,
    Ddm,
}

impl Equation {
    pub fn name(self) -> &'static str {
        match self {
            Equation::Itm => "itm",
            Equation::Ddm => "ddm",
        }
    }
}

/// How the activity is computed, as written in the file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    /// Delta-limit path when `lambda` is below the transport step, quadrature otherwise.
    Auto,
    Convolution,
    Ode,
    DeltaLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub kernel: DelayKernel,
    pub mode: KernelMode,
    pub weights: ConvolutionWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Characteristics solution of the linear problem with prescribed flux.
    Oracle,
    /// Differences between successive refinements.
    SelfConvergence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub reference: Reference,
    pub prescribed_flux: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub flux: String,
    pub density: String,
    pub snapshots: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub equation: Equation,
    pub model: HazardModel,
    pub kernel: Option<KernelConfig>,
    pub initial: InitialDensity,
    pub ds: f64,
    pub t_final: f64,
    pub s_max: f64,
    pub dt: f64,
    pub dt_explicit: bool,
    /// Resolved activity path (delayed model only).
    pub method: Option<ActivityMethod>,
    pub policy: BranchPolicy,
    pub flux_solve: FluxSolve,
    pub tolerance: f64,
    pub output: OutputConfig,
    pub convergence: ConvergenceConfig,
}

impl ScenarioConfig {
    pub fn grid(&self) -> crate::Result<Grid> {
        build_grid(self.ds, self.dt, self.s_max, self.t_final)
    }

    pub fn scan(&self) -> ScanOptions {
        ScanOptions {
            tolerance: self.tolerance,
            ..ScanOptions::default()
        }
    }

    /// Kernel mass `J` (1 for the instantaneous model).
    pub fn coupling(&self) -> f64 {
        self.kernel.map_or(1.0, |k| k.kernel.scale)
    }

    /// Same scenario on a mesh refined by `2^level` in both `ds` and `dt`.
    pub fn refined(&self, level: u32) -> ScenarioConfig {
        let f = f64::from(1u32 << level);
        ScenarioConfig {
            ds: self.ds / f,
            dt: self.dt / f,
            ..self.clone()
        }
    }

    /// Largest stable `dt` for the resolved method, from the analytic initial data.
    pub fn cfl_bound(&self) -> crate::Result<f64> {
        cfl_bound(
            &self.model,
            self.method,
            self.kernel.as_ref(),
            &self.initial,
            self.ds,
        )
    }

    /// CFL check against the discretized initial data, as the solver does it.
    pub fn check_cfl(&self, grid: &Grid, n0: &DensityVector) -> crate::Result<()> {
        match (self.equation, self.method, self.kernel) {
            (Equation::Ddm, Some(method), Some(k)) => {
                check_cfl_ddm(&self.model, &k.kernel, grid, method, n0)
            }
            _ => crate::itm::check_cfl_itm(&self.model, grid),
        }
    }
}

fn cfl_bound(
    model: &HazardModel,
    method: Option<ActivityMethod>,
    kernel: Option<&KernelConfig>,
    initial: &InitialDensity,
    ds: f64,
) -> crate::Result<f64> {
    let p_sup = model.norms()?.p_sup;
    match (method, kernel) {
        (Some(ActivityMethod::Convolution(_)), Some(k)) => {
            let mass = initial.mass();
            let lip = model.flux_lipschitz(mass, initial.sup())?;
            let per_mass = if mass > 0.0 { lip / mass } else { 0.0 };
            cfl_dt_ddm(ds, p_sup, per_mass, k.kernel.eval(0.0), mass)
        }
        _ => cfl_dt_itm(ds, p_sup),
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    /// 0 for preset entries.
    line: usize,
    used: bool,
}

type Table = BTreeMap<(String, String), Entry>;

fn tokenize(text: &str, user: bool, table: &mut Table, errors: &mut Vec<ConfigError>) {
    let mut section: Option<String> = None;
    let err = |section: &str, i: usize, message: String| ConfigError {
        section: section.to_string(),
        line: if user { i + 1 } else { 0 },
        message,
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                errors.push(err("", i, format!("malformed section header `{line}`")));
                section = None;
                continue;
            };
            let name = name.trim();
            if SECTIONS.iter().any(|(s, _)| *s == name) {
                section = Some(name.to_string());
            } else {
                errors.push(err(name, i, format!("unknown section `{name}`")));
                section = None;
            }
            continue;
        }
        let Some(sec) = section.clone() else {
            errors.push(err("", i, format!("`{line}` is outside any known section")));
            continue;
        };
        let Some((k, v)) = line.split_once('=') else {
            errors.push(err(
                &sec,
                i,
                format!("expected `key = value`, got `{line}`"),
            ));
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        let known = SECTIONS
            .iter()
            .find(|(s, _)| *s == sec)
            .map_or(&[][..], |(_, keys)| *keys);
        if !known.contains(&k) {
            errors.push(err(&sec, i, format!("unknown key `{k}`")));
            continue;
        }
        let key = (sec.clone(), k.to_string());
        if user && table.get(&key).is_some_and(|e| e.line > 0) {
            errors.push(err(&sec, i, format!("duplicate key `{k}`")));
            continue;
        }
        table.insert(
            key,
            Entry {
                value: v.to_string(),
                line: if user { i + 1 } else { 0 },
                used: false,
            },
        );
    }
}

/// Typed access to the merged table; every lookup marks the key as used.
struct Fields {
    table: Table,
    errors: Vec<ConfigError>,
}

impl Fields {
    fn raw(&mut self, sec: &str, key: &str) -> Option<(String, usize)> {
        let e = self.table.get_mut(&(sec.to_string(), key.to_string()))?;
        e.used = true;
        Some((e.value.clone(), e.line))
    }

    fn line(&self, sec: &str, key: &str) -> usize {
        self.table
            .get(&(sec.to_string(), key.to_string()))
            .map_or(0, |e| e.line)
    }

    fn error(&mut self, sec: &str, line: usize, message: impl Into<String>) {
        self.errors.push(ConfigError {
            section: sec.to_string(),
            line,
            message: message.into(),
        });
    }

    fn text(&mut self, sec: &str, key: &str) -> Option<String> {
        self.raw(sec, key).map(|(v, _)| v)
    }

    fn num(&mut self, sec: &str, key: &str) -> Option<f64> {
        let (v, line) = self.raw(sec, key)?;
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Some(x),
            _ => {
                self.error(
                    sec,
                    line,
                    format!("`{key}` must be a finite number, got `{v}`"),
                );
                None
            }
        }
    }

    fn req_num(&mut self, sec: &str, key: &str) -> Option<f64> {
        if !self.table.contains_key(&(sec.to_string(), key.to_string())) {
            self.error(sec, 0, format!("missing required key `{key}`"));
            return None;
        }
        self.num(sec, key)
    }

    fn num_or(&mut self, sec: &str, key: &str, default: f64) -> f64 {
        self.num(sec, key).unwrap_or(default)
    }

    fn list(&mut self, sec: &str, key: &str) -> Option<Vec<f64>> {
        let (v, line) = self.raw(sec, key)?;
        let mut out = Vec::new();
        for part in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.parse::<f64>() {
                Ok(x) if x.is_finite() => out.push(x),
                _ => {
                    self.error(
                        sec,
                        line,
                        format!("`{key}` entry `{part}` is not a finite number"),
                    );
                    return None;
                }
            }
        }
        Some(out)
    }

    fn choice(&mut self, sec: &str, key: &str, allowed: &[&str]) -> Option<String> {
        let (v, line) = self.raw(sec, key)?;
        if allowed.contains(&v.as_str()) {
            Some(v)
        } else {
            self.error(
                sec,
                line,
                format!("`{key}` must be one of {}, got `{v}`", allowed.join(", ")),
            );
            None
        }
    }

    fn req_choice(&mut self, sec: &str, key: &str, allowed: &[&str]) -> Option<String> {
        if !self.table.contains_key(&(sec.to_string(), key.to_string())) {
            self.error(
                sec,
                0,
                format!(
                    "missing required key `{key}` (one of {})",
                    allowed.join(", ")
                ),
            );
            return None;
        }
        self.choice(sec, key, allowed)
    }

    /// Flags user keys that nothing read.
    fn unused(&mut self) {
        let stray: Vec<_> = self
            .table
            .iter()
            .filter(|(_, e)| !e.used && e.line > 0)
            .map(|((s, k), e)| (s.clone(), k.clone(), e.line))
            .collect();
        for (s, k, line) in stray {
            self.error(
                &s,
                line,
                format!("key `{k}` does not apply to this scenario"),
            );
        }
    }
}

fn rate(f: &mut Fields) -> Option<Rate> {
    const S: &str = "hazard";
    let kind = f.req_choice(
        S,
        "rate",
        &["constant", "exp-decay", "hill", "logistic", "quadratic"],
    )?;
    Some(match kind.as_str() {
        "constant" => Rate::Constant {
            value: f.req_num(S, "value")?,
        },
        "exp-decay" => Rate::ExpDecay {
            amplitude: f.num_or(S, "amplitude", 1.0),
            decay: f.req_num(S, "decay")?,
        },
        "hill" => Rate::Hill {
            amplitude: f.req_num(S, "amplitude")?,
            offset: f.num_or(S, "offset", 0.0),
        },
        "logistic" => Rate::Logistic {
            slope: f.req_num(S, "slope")?,
            shift: f.req_num(S, "shift")?,
        },
        _ => Rate::Quadratic {
            offset: f.num_or(S, "offset", 1.0),
        },
    })
}

fn refractory(f: &mut Fields) -> Option<Refractory> {
    const S: &str = "hazard";
    let kind = f
        .choice(S, "refractory", &["none", "fixed", "variable", "sigmoid"])
        .unwrap_or_else(|| "none".into());
    Some(match kind.as_str() {
        "fixed" => Refractory::Fixed {
            sigma: f.req_num(S, "sigma")?,
        },
        "variable" => Refractory::Variable {
            max_period: f.req_num(S, "max_period")?,
            drop: f.req_num(S, "drop")?,
            scale: f.num_or(S, "scale", 1.0),
        },
        "sigmoid" => Refractory::Sigmoid {
            sigma: f.req_num(S, "sigma")?,
            width: f.req_num(S, "width")?,
        },
        _ => Refractory::None,
    })
}

fn initial(f: &mut Fields) -> Option<InitialDensity> {
    const S: &str = "initial";
    let kind = f.req_choice(
        S,
        "kind",
        &[
            "plateau-exp",
            "shifted-exp",
            "indicator",
            "exponential",
            "cosine-bump",
        ],
    )?;
    let n0 = match kind.as_str() {
        "plateau-exp" => InitialDensity::PlateauExp {
            height: f.req_num(S, "height")?,
            knee: f.req_num(S, "knee")?,
        },
        "shifted-exp" => InitialDensity::ShiftedExp {
            onset: f.req_num(S, "onset")?,
        },
        "indicator" => InitialDensity::Indicator {
            start: f.num_or(S, "start", 0.0),
            end: f.req_num(S, "end")?,
            height: f.num_or(S, "height", 1.0),
        },
        "exponential" => InitialDensity::Exponential {
            rate: f.req_num(S, "rate")?,
        },
        _ => InitialDensity::CosineBump {
            width: f.req_num(S, "width")?,
        },
    };
    if let Err(e) = n0.validate() {
        let line = f.line(S, "kind");
        f.error(S, line, e.to_string());
        return None;
    }
    Some(n0)
}

fn kernel(f: &mut Fields) -> Option<KernelConfig> {
    const S: &str = "kernel";
    let kind = f.req_choice(S, "kind", &["exponential", "gaussian"])?;
    let lambda = f.req_num(S, "lambda")?;
    let shape = if kind == "gaussian" {
        KernelShape::Gaussian {
            d: f.req_num(S, "d")?,
            lambda,
        }
    } else {
        KernelShape::Exponential { lambda }
    };
    let kernel = DelayKernel {
        shape,
        scale: f.num_or(S, "J", 1.0),
    };
    if let Err(e) = kernel.validate() {
        let line = f.line(S, "kind");
        f.error(S, line, e.to_string());
        return None;
    }
    let mode = match f
        .choice(S, "method", &["auto", "convolution", "ode", "delta-limit"])
        .as_deref()
    {
        Some("convolution") => KernelMode::Convolution,
        Some("ode") => KernelMode::Ode,
        Some("delta-limit") => KernelMode::DeltaLimit,
        _ => KernelMode::Auto,
    };
    let weights = match f
        .choice(S, "weights", &["trapezoid", "uniform-half"])
        .as_deref()
    {
        Some("uniform-half") => ConvolutionWeights::UniformHalf,
        _ => ConvolutionWeights::Trapezoid,
    };
    Some(KernelConfig {
        kernel,
        mode,
        weights,
    })
}

fn branch(f: &mut Fields) -> Option<BranchPolicy> {
    const S: &str = "branch";
    let policy = f.choice(
        S,
        "policy",
        &["nearest", "lowest", "highest", "fixed-index"],
    );
    Some(match policy.as_deref() {
        Some("lowest") => BranchPolicy::Lowest,
        Some("highest") => BranchPolicy::Highest,
        Some("fixed-index") => {
            let i = f.req_num(S, "index")?;
            if i < 1.0 || i.fract() != 0.0 {
                let line = f.line(S, "index");
                f.error(
                    S,
                    line,
                    format!("`index` must be a positive integer, got {i}"),
                );
                return None;
            }
            BranchPolicy::FixedIndex(i as usize)
        }
        _ => BranchPolicy::Nearest,
    })
}

fn delta_limit(kernel: &DelayKernel) -> ActivityMethod {
    match kernel.shape {
        KernelShape::Gaussian { .. } => ActivityMethod::DelayShift,
        KernelShape::Exponential { .. } => ActivityMethod::ExponentialOde,
    }
}

/// Resolves the activity path and `dt`. Returns `(method, dt, explicit)`.
fn time_step(
    f: &mut Fields,
    model: &HazardModel,
    kernel: Option<&KernelConfig>,
    n0: &InitialDensity,
    ds: f64,
    t_final: f64,
) -> Option<(Option<ActivityMethod>, f64, bool)> {
    const S: &str = "grid";
    let explicit = f.num(S, "dt");
    let dt_line = f.line(S, "dt");
    if let Some(dt) = explicit {
        if !(dt > 0.0) {
            f.error(S, dt_line, format!("`dt` must be positive, got {dt}"));
            return None;
        }
    }
    let transport = if model.is_bounded() {
        cfl_dt_itm(ds, model.norms().ok()?.p_sup).ok()
    } else {
        None
    };
    let method = kernel.map(|k| match k.mode {
        KernelMode::Convolution => ActivityMethod::Convolution(k.weights),
        KernelMode::Ode => ActivityMethod::ExponentialOde,
        KernelMode::DeltaLimit => delta_limit(&k.kernel),
        KernelMode::Auto => {
            let probe = explicit
                .or(transport.map(|b| CFL_SAFETY * b))
                .unwrap_or(f64::INFINITY);
            if k.kernel.lambda() < probe {
                delta_limit(&k.kernel)
            } else {
                ActivityMethod::Convolution(k.weights)
            }
        }
    });
    if let (Some(k), Some(m)) = (kernel, method) {
        let ok = match m {
            ActivityMethod::ExponentialOde => {
                matches!(k.kernel.shape, KernelShape::Exponential { .. })
            }
            ActivityMethod::DelayShift => matches!(k.kernel.shape, KernelShape::Gaussian { .. }),
            ActivityMethod::Convolution(_) => true,
        };
        if !ok {
            let line = f.line("kernel", "method");
            f.error(
                "kernel",
                line,
                "the chosen method does not match the kernel kind",
            );
            return None;
        }
    }
    if !model.is_bounded() {
        let Some(dt) = explicit else {
            f.error(S, 0, "an unbounded rate needs an explicit `dt`");
            return None;
        };
        return Some((method, dt, true));
    }
    let bound = match cfl_bound(model, method, kernel, n0, ds) {
        Ok(b) => b,
        Err(e) => {
            f.error(S, 0, e.to_string());
            return None;
        }
    };
    if let Some(dt) = explicit {
        if dt > bound * (1.0 + 1e-12) {
            f.error(
                S,
                dt_line,
                format!("dt = {dt} violates the CFL bound {}", describe_bound(bound)),
            );
            return None;
        }
        return Some((method, dt, true));
    }
    let mut dt = CFL_SAFETY * bound;
    if method == Some(ActivityMethod::DelayShift) {
        let d = kernel.map_or(0.0, |k| k.kernel.delay());
        if d > 0.0 {
            dt = d / (d / dt).ceil();
        }
    }
    dt = t_final / (t_final / dt).ceil();
    Some((method, dt, false))
}

/// `0.0196... (= 1/51)` when the reciprocal is a whole number.
fn describe_bound(bound: f64) -> String {
    let r = 1.0 / bound;
    if (r - r.round()).abs() < 1e-9 * r {
        format!("{bound} (= 1/{})", r.round())
    } else {
        format!("{bound}")
    }
}

/// Parses and validates a scenario file, collecting every error.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let mut user = Table::new();
    tokenize(text, true, &mut user, &mut errors);
    let mut table = Table::new();
    if let Some(e) = user.get(&("scenario".to_string(), "preset".to_string())) {
        match presets::preset_text(&e.value) {
            Some(base) => tokenize(base, false, &mut table, &mut errors),
            None => errors.push(ConfigError {
                section: "scenario".into(),
                line: e.line,
                message: format!(
                    "unknown preset `{}` (known: {})",
                    e.value,
                    presets::PRESET_NAMES.join(", ")
                ),
            }),
        }
    }
    table.extend(user);
    let mut f = Fields { table, errors };
    let cfg = build(&mut f);
    f.unused();
    match cfg {
        Some(cfg) if f.errors.is_empty() => Ok(cfg),
        _ => {
            if f.errors.is_empty() {
                f.error("", 0, "invalid configuration");
            }
            Err(ConfigErrors(f.errors))
        }
    }
}

fn build(f: &mut Fields) -> Option<ScenarioConfig> {
    f.text("scenario", "preset");
    let name = f
        .text("scenario", "name")
        .unwrap_or_else(|| "scenario".into());
    if name.is_empty()
        || !name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        let line = f.line("scenario", "name");
        f.error(
            "scenario",
            line,
            format!("`name` must be a nonempty [A-Za-z0-9_-] word, got `{name}`"),
        );
    }
    let equation = match f
        .req_choice("model", "equation", &["itm", "ddm"])
        .as_deref()
    {
        Some("ddm") => Some(Equation::Ddm),
        Some(_) => Some(Equation::Itm),
        None => None,
    };
    let rate = rate(f);
    let refractory = refractory(f);
    let cap = f.num("solver", "activity_cap");
    let model = match (rate, refractory) {
        (Some(r), Some(g)) => {
            let mut m = HazardModel::new(r, g);
            if !r.is_bounded() {
                m = m.with_cap(cap.unwrap_or(DEFAULT_ACTIVITY_CAP));
            } else if let Some(c) = cap {
                m = m.with_cap(c);
            }
            match m.validate() {
                Ok(()) => Some(m),
                Err(e) => {
                    let line = f.line("hazard", "rate");
                    f.error("hazard", line, e.to_string());
                    None
                }
            }
        }
        _ => None,
    };
    let kernel = match equation {
        Some(Equation::Ddm) => kernel(f),
        _ => None,
    };
    let initial = initial(f);
    let ds = f.req_num("grid", "ds");
    let t_final = f.req_num("grid", "T");
    for (key, v) in [("ds", ds), ("T", t_final)] {
        if let Some(v) = v {
            if !(v > 0.0) {
                let line = f.line("grid", key);
                f.error("grid", line, format!("`{key}` must be positive, got {v}"));
            }
        }
    }
    let s_max_in = f.num("grid", "s_max");
    let policy = branch(f);
    let tolerance = f.num_or("solver", "tolerance", 1e-12);
    if !(tolerance > 0.0) {
        let line = f.line("solver", "tolerance");
        f.error("solver", line, "`tolerance` must be positive");
    }
    let flux_solve = match f
        .choice("solver", "flux_solve", &["full", "frozen"])
        .as_deref()
    {
        Some("frozen") => FluxSolve::Frozen,
        _ => FluxSolve::Full,
    };
    let reference = match f
        .choice("convergence", "reference", &["oracle", "self"])
        .as_deref()
    {
        Some("oracle") => Reference::Oracle,
        _ => Reference::SelfConvergence,
    };
    let prescribed_flux = f.num("convergence", "prescribed_flux");
    if reference == Reference::Oracle && prescribed_flux.is_none() {
        f.error(
            "convergence",
            0,
            "the oracle reference needs `prescribed_flux`",
        );
    }
    let flux_path = f
        .text("output", "flux")
        .unwrap_or_else(|| format!("{name}_flux.csv"));
    let density_path = f
        .text("output", "density")
        .unwrap_or_else(|| format!("{name}_density.csv"));
    let snapshots = f.list("output", "snapshots");

    let (equation, model, initial, ds, t_final, policy) =
        (equation?, model?, initial?, ds?, t_final?, policy?);
    if !(ds > 0.0 && t_final > 0.0) {
        return None;
    }
    if equation == Equation::Ddm && kernel.is_none() {
        return None;
    }
    let reach = initial.support_bound() + t_final;
    let s_max = match s_max_in {
        Some(s) if s < reach => {
            let line = f.line("grid", "s_max");
            f.error(
                "grid",
                line,
                format!("`s_max` = {s} is below support + T = {reach}"),
            );
            return None;
        }
        Some(s) => s,
        None => reach + 2.0 * ds,
    };
    let (method, dt, dt_explicit) = time_step(f, &model, kernel.as_ref(), &initial, ds, t_final)?;
    let snap_line = f.line("output", "snapshots");
    let mut snapshots = snapshots.unwrap_or_else(|| vec![0.0, t_final]);
    if snap_line == 0 {
        snapshots.retain(|t| (0.0..=t_final).contains(t));
    } else if let Some(&bad) = snapshots.iter().find(|&&t| !(0.0..=t_final).contains(&t)) {
        f.error(
            "output",
            snap_line,
            format!("snapshot time {bad} is outside [0, T]"),
        );
    }
    Some(ScenarioConfig {
        name,
        equation,
        model,
        kernel,
        initial,
        ds,
        t_final,
        s_max,
        dt,
        dt_explicit,
        method,
        policy,
        flux_solve,
        tolerance,
        output: OutputConfig {
            flux: flux_path,
            density: density_path,
            snapshots,
        },
        convergence: ConvergenceConfig {
            reference,
            prescribed_flux,
        },
    })
}
