//! Experiment configuration: TOML parsing and validation.
//!
//! Parsing happens in two stages. The TOML is first deserialized into raw
//! structures that keep byte spans, then every semantic rule is checked and
//! all violations are reported together with line and column.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use swaptest::noise::{gate_duration, GateDurations};
use swaptest::{Complex64, ContrastModel, ModeLayout, NoiseConfig, PrepRecipe64};

use crate::bundled;
use crate::error::{Issue, Result, RunnerError};

/// Steps used for pulsed gates and calibration when the config is silent.
pub const DEFAULT_PULSE_STEPS: usize = 400;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub description: String,
    pub seed: u64,
    pub shots: Option<u64>,
    pub output: Option<PathBuf>,
    /// Free-form experiment constants carried along for reference.
    pub metadata: toml::Table,
    pub experiment: Experiment,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Experiment {
    Sweep(SweepSpec),
    Calibration(CalibrationSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub layout: ModeLayout,
    pub b: RecipeSpec,
    pub c: RecipeSpec,
    /// Outermost axis first.
    pub axes: Vec<Axis>,
    pub noise: Option<NoiseConfig<f64>>,
    pub contrast: ContrastModel<f64>,
    pub pulse: Option<PulseSpec>,
}

impl SweepSpec {
    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis values of grid point `index`, row-major with the first axis outermost.
    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut rest = index;
        let mut out = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            let n = axis.values.len();
            out[k] = axis.values[rest % n];
            rest /= n;
        }
        out
    }

    /// Recipes for B and C at the given axis values.
    pub fn recipes_at(&self, values: &[f64]) -> std::result::Result<(PrepRecipe64, PrepRecipe64), String> {
        let (mut b, mut c) = (self.b.params.clone(), self.c.params.clone());
        for (axis, &v) in self.axes.iter().zip(values) {
            for t in &axis.targets {
                let map = match t.register {
                    Register::B => &mut b,
                    Register::C => &mut c,
                };
                map.insert(t.field.clone(), v);
            }
        }
        Ok((self.b.kind.build(&b)?, self.c.kind.build(&c)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Register {
    B,
    C,
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::B => "b",
            Self::C => "c",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub register: Register,
    pub field: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    /// CSV column name.
    pub name: String,
    pub targets: Vec<Target>,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSpec {
    /// Peak coupling in rad/s.
    pub omega0: f64,
    pub ramp_tau: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationSpec {
    /// Peak coupling in rad/s.
    pub omega0: f64,
    pub ramp_tau: f64,
    pub steps: usize,
    pub durations: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecipeKind {
    Vacuum,
    Fock,
    Superposition01,
    Coherent,
    Squeezed,
    Cat,
    MixedRho1,
    MixedRho2,
}

impl RecipeKind {
    const ALL: [RecipeKind; 8] = [
        Self::Vacuum,
        Self::Fock,
        Self::Superposition01,
        Self::Coherent,
        Self::Squeezed,
        Self::Cat,
        Self::MixedRho1,
        Self::MixedRho2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Vacuum => "vacuum",
            Self::Fock => "fock",
            Self::Superposition01 => "superposition01",
            Self::Coherent => "coherent",
            Self::Squeezed => "squeezed",
            Self::Cat => "cat",
            Self::MixedRho1 => "mixed-rho1",
            Self::MixedRho2 => "mixed-rho2",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Parameters and their defaults; `None` means required.
    pub fn fields(self) -> &'static [(&'static str, Option<f64>)] {
        match self {
            Self::Vacuum => &[],
            Self::Fock => &[("n", None)],
            Self::Superposition01 => &[("phi", None)],
            Self::Coherent => &[("alpha_sq", None), ("phase", Some(0.0))],
            Self::Squeezed => &[("r", None), ("phi", Some(0.0))],
            Self::Cat => &[("alpha_sq", None), ("phase", Some(0.0)), ("phi_cat", Some(0.0))],
            Self::MixedRho1 => &[("phi1", None)],
            Self::MixedRho2 => &[("phi2", None), ("alpha_sq", None)],
        }
    }

    fn has_field(self, field: &str) -> bool {
        self.fields().iter().any(|(f, _)| *f == field)
    }

    /// Range check for one field value.
    fn check(self, field: &str, v: f64) -> std::result::Result<(), String> {
        if !v.is_finite() {
            return Err(format!("{field} must be finite"));
        }
        match field {
            "n" if v < 0.0 || v.fract() != 0.0 => Err(format!("n must be a non-negative integer, got {v}")),
            "alpha_sq" | "r" if v < 0.0 => Err(format!("{field} must be ≥ 0, got {v}")),
            _ => Ok(()),
        }
    }

    pub fn build(self, p: &BTreeMap<String, f64>) -> std::result::Result<PrepRecipe64, String> {
        let get = |f: &str| -> std::result::Result<f64, String> {
            let v = p
                .get(f)
                .copied()
                .or_else(|| self.fields().iter().find(|(n, _)| *n == f).and_then(|(_, d)| *d))
                .ok_or_else(|| format!("{} recipe needs `{f}`", self.name()))?;
            self.check(f, v)?;
            Ok(v)
        };
        let amplitude = |a2: f64, phase: f64| Complex64::from_polar(a2.sqrt(), phase);
        Ok(match self {
            Self::Vacuum => PrepRecipe64::Vacuum,
            Self::Fock => PrepRecipe64::Fock { n: get("n")? as usize },
            Self::Superposition01 => PrepRecipe64::Superposition01 { phi: get("phi")? },
            Self::Coherent => PrepRecipe64::Coherent { alpha: amplitude(get("alpha_sq")?, get("phase")?) },
            Self::Squeezed => PrepRecipe64::Squeezed { r: get("r")?, phi: get("phi")? },
            Self::Cat => PrepRecipe64::Cat { alpha: amplitude(get("alpha_sq")?, get("phase")?), phi_cat: get("phi_cat")? },
            Self::MixedRho1 => PrepRecipe64::MixedRho1 { phi1: get("phi1")? },
            Self::MixedRho2 => PrepRecipe64::MixedRho2 { phi2: get("phi2")?, alpha_sq: get("alpha_sq")? },
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecipeSpec {
    pub kind: RecipeKind,
    pub params: BTreeMap<String, f64>,
}

// ---- raw layer ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Spanned<String>,
    #[serde(default)]
    description: String,
    kind: Option<Spanned<String>>,
    seed: Spanned<i64>,
    shots: Option<Spanned<i64>>,
    output: Option<String>,
    layout: Option<Spanned<RawLayout>>,
    b: Option<Spanned<BTreeMap<String, Spanned<toml::Value>>>>,
    c: Option<Spanned<BTreeMap<String, Spanned<toml::Value>>>>,
    #[serde(default)]
    sweep: Vec<Spanned<RawAxis>>,
    noise: Option<Spanned<RawNoise>>,
    contrast: Option<Spanned<RawContrast>>,
    pulse: Option<Spanned<RawPulse>>,
    calibration: Option<Spanned<RawCalibration>>,
    #[serde(default)]
    metadata: toml::Table,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayout {
    register_dim: Option<Spanned<i64>>,
    mode_dims: Option<Spanned<Vec<i64>>>,
}

/// Either explicit `values` or `start`/`stop`/`points`.
struct RawGrid<'a> {
    values: &'a Option<Spanned<Vec<f64>>>,
    start: Option<f64>,
    stop: Option<f64>,
    points: &'a Option<Spanned<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    name: Option<String>,
    parameters: Spanned<Vec<Spanned<String>>>,
    values: Option<Spanned<Vec<f64>>>,
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<Spanned<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    heating_rates: Option<Spanned<[f64; 3]>>,
    dephasing_time: Option<Spanned<f64>>,
    trajectories: Spanned<i64>,
    transfer_duration: Option<Spanned<f64>>,
    interfere_duration: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContrast {
    gamma: Option<Spanned<f64>>,
    fock_gammas: Option<Spanned<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPulse {
    omega0_hz: Spanned<f64>,
    ramp_tau: Spanned<f64>,
    steps: Option<Spanned<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalibration {
    omega0_hz: Spanned<f64>,
    ramp_tau: Option<Spanned<f64>>,
    steps: Option<Spanned<i64>>,
    values: Option<Spanned<Vec<f64>>>,
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<Spanned<i64>>,
}

// ---- validation ----

struct Checker<'a> {
    src: &'a str,
    issues: Vec<Issue>,
}

impl Checker<'_> {
    fn locate(&self, offset: usize) -> (usize, usize) {
        let before = &self.src[..offset.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    }

    fn at(&mut self, span: Range<usize>, message: impl Into<String>) {
        let (line, column) = self.locate(span.start);
        self.issues.push(Issue { line, column, message: message.into() });
    }

    fn positive_int(&mut self, v: &Spanned<i64>, what: &str) -> Option<u64> {
        if *v.get_ref() >= 1 {
            Some(*v.get_ref() as u64)
        } else {
            self.at(v.span(), format!("{what} must be ≥ 1, got {}", v.get_ref()));
            None
        }
    }

    fn grid(&mut self, g: RawGrid<'_>, span: Range<usize>, what: &str) -> Option<Vec<f64>> {
        let values = match (g.values, g.start, g.stop, g.points) {
            (Some(v), None, None, None) => v.get_ref().clone(),
            (None, Some(a), Some(b), Some(n)) => {
                let n = self.positive_int(n, &format!("{what} points"))? as usize;
                if n == 1 {
                    vec![a]
                } else {
                    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
                }
            }
            _ => {
                self.at(span, format!("{what} needs either `values` or all of `start`, `stop`, `points`"));
                return None;
            }
        };
        let at = g.values.as_ref().map_or(span, |v| v.span());
        if values.is_empty() {
            self.at(at, format!("{what} grid is empty"));
            return None;
        }
        if values.iter().any(|v| !v.is_finite()) {
            self.at(at, format!("{what} grid has a non-finite value"));
            return None;
        }
        let up = values.windows(2).all(|w| w[1] > w[0]);
        let down = values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            self.at(at, format!("{what} grid must be strictly monotone"));
            return None;
        }
        Some(values)
    }

    fn recipe(&mut self, raw: &Spanned<BTreeMap<String, Spanned<toml::Value>>>, reg: Register) -> Option<RecipeSpec> {
        let table = raw.get_ref();
        let Some(kind_value) = table.get("kind") else {
            self.at(raw.span(), format!("[{reg}] needs a `kind`"));
            return None;
        };
        let Some(kind) = kind_value.get_ref().as_str().and_then(RecipeKind::parse) else {
            let names: Vec<_> = RecipeKind::ALL.iter().map(|k| k.name()).collect();
            self.at(kind_value.span(), format!("[{reg}] kind must be one of {}", names.join(", ")));
            return None;
        };
        let mut params = BTreeMap::new();
        let mut ok = true;
        for (key, value) in table.iter().filter(|(k, _)| k.as_str() != "kind") {
            if !kind.has_field(key) {
                self.at(value.span(), format!("[{reg}] {} recipe has no parameter `{key}`", kind.name()));
                ok = false;
                continue;
            }
            let v = match value.get_ref() {
                toml::Value::Float(f) => *f,
                toml::Value::Integer(i) => *i as f64,
                other => {
                    self.at(value.span(), format!("[{reg}] `{key}` must be a number, got {}", other.type_str()));
                    ok = false;
                    continue;
                }
            };
            if let Err(e) = kind.check(key, v) {
                self.at(value.span(), format!("[{reg}] {e}"));
                ok = false;
            }
            params.insert(key.clone(), v);
        }
        ok.then_some(RecipeSpec { kind, params })
    }

    fn layout(&mut self, raw: &Spanned<RawLayout>) -> Option<ModeLayout> {
        let l = raw.get_ref();
        let result = match (&l.register_dim, &l.mode_dims) {
            (Some(n), None) => {
                // the truncation diagnostic watches the top two levels
                if *n.get_ref() < 3 {
                    self.at(n.span(), format!("register_dim must be ≥ 3, got {}", n.get_ref()));
                    return None;
                }
                ModeLayout::for_swap_test(*n.get_ref() as usize)
            }
            (None, Some(dims)) => {
                let d = dims.get_ref();
                if d.len() != 3 || d.iter().any(|&x| x < 1) {
                    self.at(dims.span(), "mode_dims must be three integers ≥ 1");
                    return None;
                }
                ModeLayout::new([d[0] as usize, d[1] as usize, d[2] as usize])
            }
            _ => {
                self.at(raw.span(), "[layout] needs exactly one of `register_dim` or `mode_dims`");
                return None;
            }
        };
        match result {
            Ok(layout) => Some(layout),
            Err(e) => {
                self.at(raw.span(), e.to_string());
                None
            }
        }
    }

    fn noise(&mut self, raw: &Spanned<RawNoise>) -> Option<NoiseConfig<f64>> {
        let n = raw.get_ref();
        let mut ok = true;
        let heating_rates = match &n.heating_rates {
            Some(r) if r.get_ref().iter().any(|v| !(v.is_finite() && *v >= 0.0)) => {
                self.at(r.span(), "heating rates must be finite and ≥ 0");
                ok = false;
                [0.0; 3]
            }
            Some(r) => *r.get_ref(),
            None => swaptest::noise::MEASURED_HEATING_RATES,
        };
        let dephasing_time = match &n.dephasing_time {
            Some(t) if !(t.get_ref().is_finite() && *t.get_ref() > 0.0) => {
                self.at(t.span(), "dephasing_time must be > 0");
                ok = false;
                None
            }
            t => t.as_ref().map(|t| *t.get_ref()),
        };
        let mut duration = |d: &Option<Spanned<f64>>, theta: f64, name: &str| match d {
            Some(v) if !(v.get_ref().is_finite() && *v.get_ref() >= 0.0) => {
                self.at(v.span(), format!("{name} must be ≥ 0"));
                ok = false;
                0.0
            }
            Some(v) => *v.get_ref(),
            None => gate_duration(theta),
        };
        let gate_durations = GateDurations {
            transfer: duration(&n.transfer_duration, std::f64::consts::PI, "transfer_duration"),
            interfere: duration(&n.interfere_duration, std::f64::consts::FRAC_PI_2, "interfere_duration"),
        };
        let trajectories = self.positive_int(&n.trajectories, "trajectories");
        let cfg = NoiseConfig { heating_rates, dephasing_time, gate_durations, trajectories: trajectories? as usize };
        ok.then_some(cfg)
    }

    fn contrast(&mut self, raw: &Spanned<RawContrast>) -> Option<ContrastModel<f64>> {
        let c = raw.get_ref();
        let model = match (&c.gamma, &c.fock_gammas) {
            (Some(g), None) => ContrastModel::Uniform(*g.get_ref()),
            (None, Some(gs)) => ContrastModel::FockDiagonal(gs.get_ref().clone()),
            _ => {
                self.at(raw.span(), "[contrast] needs exactly one of `gamma` or `fock_gammas`");
                return None;
            }
        };
        if let Err(e) = model.validate() {
            self.at(raw.span(), e.to_string());
            return None;
        }
        Some(model)
    }

    fn coupling(&mut self, omega0_hz: &Spanned<f64>, ramp_tau: Option<&Spanned<f64>>) -> Option<(f64, f64)> {
        let mut ok = true;
        if !(omega0_hz.get_ref().is_finite() && *omega0_hz.get_ref() > 0.0) {
            self.at(omega0_hz.span(), "omega0_hz must be > 0");
            ok = false;
        }
        let tau = ramp_tau.map_or(0.0, |t| *t.get_ref());
        if let Some(t) = ramp_tau.filter(|_| !(tau.is_finite() && tau >= 0.0)) {
            self.at(t.span(), "ramp_tau must be ≥ 0");
            ok = false;
        }
        ok.then(|| (TAU * omega0_hz.get_ref(), tau))
    }

    fn steps(&mut self, s: &Option<Spanned<i64>>) -> Option<usize> {
        match s {
            Some(s) => self.positive_int(s, "steps").map(|v| v as usize),
            None => Some(DEFAULT_PULSE_STEPS),
        }
    }

    fn axis(&mut self, raw: &Spanned<RawAxis>, b: Option<&RecipeSpec>, c: Option<&RecipeSpec>) -> Option<Axis> {
        let a = raw.get_ref();
        let mut targets = Vec::new();
        let mut ok = true;
        if a.parameters.get_ref().is_empty() {
            self.at(a.parameters.span(), "sweep axis needs at least one parameter");
            ok = false;
        }
        for p in a.parameters.get_ref() {
            let text = p.get_ref();
            let parsed = text.split_once('.').and_then(|(r, f)| match r {
                "b" => Some((Register::B, f)),
                "c" => Some((Register::C, f)),
                _ => None,
            });
            let Some((register, field)) = parsed else {
                self.at(p.span(), format!("sweep parameter `{text}` must look like `b.<field>` or `c.<field>`"));
                ok = false;
                continue;
            };
            let recipe = match register {
                Register::B => b,
                Register::C => c,
            };
            if let Some(r) = recipe {
                if !r.kind.has_field(field) {
                    self.at(p.span(), format!("sweep parameter `{text}`: {} recipe has no `{field}`", r.kind.name()));
                    ok = false;
                    continue;
                }
            }
            targets.push(Target { register, field: field.to_string() });
        }
        let grid = RawGrid { values: &a.values, start: a.start, stop: a.stop, points: &a.points };
        let values = self.grid(grid, raw.span(), "sweep")?;
        for t in &targets {
            let kind = match t.register {
                Register::B => b,
                Register::C => c,
            }
            .map(|r| r.kind);
            if let Some(kind) = kind {
                if let Some(e) = values.iter().find_map(|&v| kind.check(&t.field, v).err()) {
                    self.at(raw.span(), format!("sweep over {}.{}: {e}", t.register, t.field));
                    ok = false;
                }
            }
        }
        let name = a.name.clone().unwrap_or_else(|| a.parameters.get_ref().first().map_or(String::new(), |p| p.get_ref().clone()));
        ok.then_some(Axis { name, targets, values })
    }
}

const RESERVED_COLUMNS: [&str; 7] = ["p_g_exact", "overlap_from_pg", "overlap_oracle", "p_g_sampled", "stderr", "shots", "seed"];

/// Parses and validates a configuration. `origin` labels error messages.
pub fn parse_config(src: &str, origin: &str) -> Result<ExperimentConfig> {
    let fail = |issues| RunnerError::Config { origin: origin.to_string(), issues };
    let raw: RawConfig = match toml::from_str(src) {
        Ok(r) => r,
        Err(e) => {
            let ck = Checker { src, issues: Vec::new() };
            let (line, column) = e.span().map_or((0, 0), |s| ck.locate(s.start));
            return Err(fail(vec![Issue { line, column, message: e.message().trim().to_string() }]));
        }
    };
    let mut ck = Checker { src, issues: Vec::new() };

    if raw.name.get_ref().trim().is_empty() {
        ck.at(raw.name.span(), "name must not be empty");
    }
    let seed = if *raw.seed.get_ref() < 0 {
        ck.at(raw.seed.span(), format!("seed must be ≥ 0, got {}", raw.seed.get_ref()));
        0
    } else {
        *raw.seed.get_ref() as u64
    };
    let shots = raw.shots.as_ref().and_then(|s| ck.positive_int(s, "shots"));

    let kind = raw.kind.as_ref().map_or("sweep", |k| k.get_ref().as_str());
    let experiment = match kind {
        "sweep" => {
            if let Some(c) = &raw.calibration {
                ck.at(c.span(), "[calibration] only applies to kind = \"calibration\"");
            }
            let layout = match &raw.layout {
                Some(l) => ck.layout(l),
                None => {
                    ck.at(0..0, "missing [layout]");
                    None
                }
            };
            let mut recipe = |r: &Option<Spanned<BTreeMap<String, Spanned<toml::Value>>>>, reg| match r {
                Some(r) => ck.recipe(r, reg),
                None => {
                    ck.at(0..0, format!("missing [{reg}] recipe"));
                    None
                }
            };
            let b = recipe(&raw.b, Register::B);
            let c = recipe(&raw.c, Register::C);
            if raw.sweep.is_empty() {
                ck.at(0..0, "at least one [[sweep]] axis is required");
            }
            let axes: Vec<Option<Axis>> = raw.sweep.iter().map(|a| ck.axis(a, b.as_ref(), c.as_ref())).collect();
            let mut names: Vec<&str> = Vec::new();
            for (a, raw_axis) in axes.iter().zip(&raw.sweep) {
                if let Some(a) = a {
                    if RESERVED_COLUMNS.contains(&a.name.as_str()) || names.contains(&a.name.as_str()) {
                        ck.at(raw_axis.span(), format!("sweep column name `{}` clashes with another column", a.name));
                    }
                    names.push(&a.name);
                }
            }
            // every required recipe field is either given or swept
            for (recipe, reg, span) in [(&b, Register::B, raw.b.as_ref().map(|x| x.span())), (&c, Register::C, raw.c.as_ref().map(|x| x.span()))] {
                let Some(r) = recipe else { continue };
                for (field, default) in r.kind.fields() {
                    let swept = axes.iter().flatten().any(|a| a.targets.iter().any(|t| t.register == reg && t.field == *field));
                    if default.is_none() && !swept && !r.params.contains_key(*field) {
                        ck.at(span.clone().unwrap_or(0..0), format!("[{reg}] {} recipe needs `{field}`", r.kind.name()));
                    }
                }
            }
            let noise = raw.noise.as_ref().map(|n| ck.noise(n));
            let contrast = raw.contrast.as_ref().map(|c| ck.contrast(c));
            let pulse = raw.pulse.as_ref().map(|p| {
                let p = p.get_ref();
                let coupling = ck.coupling(&p.omega0_hz, Some(&p.ramp_tau));
                let steps = ck.steps(&p.steps);
                coupling.zip(steps).map(|((omega0, ramp_tau), steps)| PulseSpec { omega0, ramp_tau, steps })
            });
            match (layout, b, c, axes.into_iter().collect::<Option<Vec<_>>>(), noise, contrast, pulse) {
                (Some(layout), Some(b), Some(c), Some(axes), noise, contrast, pulse)
                    if noise.as_ref().is_none_or(|n| n.is_some())
                        && contrast.as_ref().is_none_or(|c| c.is_some())
                        && pulse.as_ref().is_none_or(|p| p.is_some()) =>
                {
                    Some(Experiment::Sweep(SweepSpec {
                        layout,
                        b,
                        c,
                        axes,
                        noise: noise.flatten(),
                        contrast: contrast.flatten().unwrap_or(ContrastModel::Ideal),
                        pulse: pulse.flatten(),
                    }))
                }
                _ => None,
            }
        }
        "calibration" => {
            let stray = [
                (raw.layout.as_ref().map(|x| x.span()), "layout"),
                (raw.b.as_ref().map(|x| x.span()), "b"),
                (raw.c.as_ref().map(|x| x.span()), "c"),
                (raw.noise.as_ref().map(|x| x.span()), "noise"),
                (raw.contrast.as_ref().map(|x| x.span()), "contrast"),
                (raw.pulse.as_ref().map(|x| x.span()), "pulse"),
            ];
            for (span, table) in stray {
                if let Some(span) = span {
                    ck.at(span, format!("[{table}] does not apply to a calibration"));
                }
            }
            if let Some(a) = raw.sweep.first() {
                ck.at(a.span(), "calibrations take their grid from [calibration], not [[sweep]]");
            }
            match &raw.calibration {
                Some(cal) => {
                    let c = cal.get_ref();
                    let coupling = ck.coupling(&c.omega0_hz, c.ramp_tau.as_ref());
                    let steps = ck.steps(&c.steps);
                    let grid = RawGrid { values: &c.values, start: c.start, stop: c.stop, points: &c.points };
                    let durations = ck.grid(grid, cal.span(), "duration");
                    if let Some(d) = &durations {
                        if d.iter().any(|&t| t < 0.0) {
                            ck.at(cal.span(), "durations must be ≥ 0");
                        }
                    }
                    match (coupling, steps, durations) {
                        (Some((omega0, ramp_tau)), Some(steps), Some(durations)) => {
                            Some(Experiment::Calibration(CalibrationSpec { omega0, ramp_tau, steps, durations }))
                        }
                        _ => None,
                    }
                }
                None => {
                    ck.at(0..0, "missing [calibration]");
                    None
                }
            }
        }
        other => {
            let span = raw.kind.as_ref().map_or(0..0, |k| k.span());
            ck.at(span, format!("kind must be \"sweep\" or \"calibration\", got \"{other}\""));
            None
        }
    };

    if !ck.issues.is_empty() {
        ck.issues.sort_by_key(|i| (i.line, i.column));
        return Err(fail(ck.issues));
    }
    Ok(ExperimentConfig {
        name: raw.name.into_inner(),
        description: raw.description,
        seed,
        shots,
        output: raw.output.map(PathBuf::from),
        metadata: raw.metadata,
        experiment: experiment.expect("validated experiment"),
    })
}

/// Loads a config from a file path, or from the bundled set by name.
pub fn load_config(path_or_name: &str) -> Result<ExperimentConfig> {
    let path = Path::new(path_or_name);
    if path.exists() {
        let src = std::fs::read_to_string(path).map_err(|e| RunnerError::io(path, e))?;
        return parse_config(&src, path_or_name);
    }
    match bundled::source(path_or_name) {
        Some(src) => parse_config(src, path_or_name),
        None if path_or_name.ends_with(".toml") || path_or_name.contains('/') => Err(RunnerError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        )),
        None => Err(RunnerError::UnknownConfig(path_or_name.to_string())),
    }
}
