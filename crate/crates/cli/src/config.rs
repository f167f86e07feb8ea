//! Flat key-value run configuration: an INI file (section headers become
//! `section.` key prefixes) plus `--set key=value` overrides.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use ini::Ini;
use tcphase_core::tc::TcBranch;
use tcphase_core::{Algebra, Schedule};

pub type RawConfig = BTreeMap<String, String>;

/// Bad or missing configuration. Maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RawConfig, ConfigError> {
    let mut raw = RawConfig::new();
    if let Some(path) = path {
        let ini = Ini::load_from_file(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        for (section, props) in ini.iter() {
            let prefix = section.map(|s| format!("{}.", s.trim())).unwrap_or_default();
            for (k, v) in props.iter() {
                raw.insert(format!("{prefix}{}", k.trim()), v.trim().to_string());
            }
        }
    }
    for item in overrides {
        let Some((k, v)) = item.split_once('=') else {
            return bad(format!("--set expects KEY=VALUE, got {item:?}"));
        };
        raw.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Su11Linear,
    Su2Linear,
    TcSu11,
    TcSu2,
    TcFullSector,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] =
        [ModelKind::Su11Linear, ModelKind::Su2Linear, ModelKind::TcSu11, ModelKind::TcSu2, ModelKind::TcFullSector];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Su11Linear => "su11-linear",
            ModelKind::Su2Linear => "su2-linear",
            ModelKind::TcSu11 => "tc-su11",
            ModelKind::TcSu2 => "tc-su2",
            ModelKind::TcFullSector => "tc-full-sector",
        }
    }

    fn parse(s: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ConfigError(format!("unknown model {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    Constant,
    LinearRamp,
    Sinusoid,
}

/// A coefficient schedule given relative to the loop period, so the same
/// schedule can be replayed at several periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSpec {
    pub kind: ScheduleKind,
    /// Constant value, ramp start, or sinusoid mean.
    pub value: f64,
    /// Ramp value at `t = T`.
    pub end: f64,
    pub amplitude: f64,
    /// Sinusoid periods per loop.
    pub cycles: f64,
    pub phase: f64,
}

impl ScheduleSpec {
    pub fn schedule(&self, period: f64) -> Schedule {
        match self.kind {
            ScheduleKind::Constant => Schedule::Constant(self.value),
            ScheduleKind::LinearRamp => Schedule::Linear { start: self.value, slope: (self.end - self.value) / period },
            ScheduleKind::Sinusoid => Schedule::Sinusoid {
                mean: self.value,
                amplitude: self.amplitude,
                omega: 2.0 * PI * self.cycles / period,
                phase: self.phase,
            },
        }
    }

    pub fn is_constant(&self) -> bool {
        self.schedule(1.0).is_constant()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    Su2,
    Su11,
}

impl Scope {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "all" => Ok(Scope::All),
            "su2" => Ok(Scope::Su2),
            "su11" => Ok(Scope::Su11),
            _ => bad(format!("unknown scope {s:?} (expected all, su2 or su11)")),
        }
    }

    pub fn includes(self, algebra: Algebra) -> bool {
        match self {
            Scope::All => true,
            Scope::Su2 => algebra == Algebra::Su2,
            Scope::Su11 => algebra == Algebra::Su11,
        }
    }
}

/// One sweep axis: a config key and the values it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub k: f64,
    pub j: f64,
    pub trunc_dim: usize,
    pub c0: ScheduleSpec,
    pub lambda: ScheduleSpec,
    pub omega1: ScheduleSpec,
    pub omega2: ScheduleSpec,
    pub omega3: ScheduleSpec,
    /// Relative amplitude of a periodic wobble added to the phase ramp.
    pub phi_wobble: f64,
    /// Initial phase of the coupling.
    pub phi: f64,
    pub periods: Vec<f64>,
    pub dt: f64,
    pub steps: Option<usize>,
    pub sample_every: usize,
    pub winding: i64,
    pub branch: i64,
    pub n: usize,
    pub mu: f64,
    pub n_a: usize,
    pub n_c: usize,
    pub n_l: usize,
    pub m_n: usize,
    pub tc_branch: TcBranch,
    pub tau: f64,
    pub wave: Algebra,
    pub zeta_re: f64,
    pub zeta_im: f64,
    pub rho_max: f64,
    pub rho_points: usize,
    pub angle_points: usize,
    pub axes: Vec<Axis>,
    pub scope: Scope,
    pub draws: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
}

/// Reads typed values and remembers which keys were consumed.
struct Reader<'a> {
    raw: &'a RawConfig,
    used: RefCell<BTreeSet<String>>,
}

impl<'a> Reader<'a> {
    fn get(&self, key: &str) -> Option<&'a str> {
        let v = self.raw.get(key)?;
        self.used.borrow_mut().insert(key.to_string());
        Some(v.as_str())
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| ConfigError(format!("{key}: cannot parse {v:?}"))),
        }
    }

    fn finite(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.parse(key, default)?;
        if !v.is_finite() {
            return bad(format!("{key}: {v} is not finite"));
        }
        Ok(v)
    }

    fn schedule(&self, key: &str, default: f64) -> Result<ScheduleSpec, ConfigError> {
        let value = self.finite(key, default)?;
        let kind = match self.get(&format!("{key}.kind")).unwrap_or("constant") {
            "constant" => ScheduleKind::Constant,
            "linear-ramp" => ScheduleKind::LinearRamp,
            "sinusoid" => ScheduleKind::Sinusoid,
            other => return bad(format!("{key}.kind: unknown schedule kind {other:?}")),
        };
        Ok(ScheduleSpec {
            kind,
            value,
            end: self.finite(&format!("{key}.end"), value)?,
            amplitude: self.finite(&format!("{key}.amplitude"), 0.0)?,
            cycles: self.finite(&format!("{key}.cycles"), 1.0)?,
            phase: self.finite(&format!("{key}.phase"), 0.0)?,
        })
    }

    fn unused(&self) -> Vec<String> {
        let used = self.used.borrow();
        self.raw.keys().filter(|k| !used.contains(*k) && !k.starts_with("tol.")).cloned().collect()
    }
}

/// `start:stop:count` (inclusive, evenly spaced) or a comma list.
pub fn parse_values(key: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    let fail = || ConfigError(format!("{key}: cannot parse values {s:?}"));
    let mut values: Vec<f64> = if let [a, b, n] = s.split(':').collect::<Vec<_>>()[..] {
        let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| fail())?, b.trim().parse().map_err(|_| fail())?);
        let n: usize = n.trim().parse().map_err(|_| fail())?;
        match n {
            0 => return Err(fail()),
            1 => vec![a],
            _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
        }
    } else {
        s.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| fail())).collect::<Result<_, _>>()?
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(fail());
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(values)
}

fn half_integer(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v <= 0.0 || ((2.0 * v) - (2.0 * v).round()).abs() > 1e-12 {
        return bad(format!("{key}: {v} is not a positive half-integer"));
    }
    Ok(v)
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let r = Reader { raw, used: RefCell::new(BTreeSet::new()) };
        let model = ModelKind::parse(r.get("model").unwrap_or("su2-linear"))?;
        let tc_branch = match r.get("tc_branch").unwrap_or(if model == ModelKind::TcSu11 { "su11" } else { "su2" }) {
            "su11" => TcBranch::Su11,
            "su2" => TcBranch::Su2,
            other => return bad(format!("tc_branch: unknown branch {other:?}")),
        };
        let su11_like = matches!(model, ModelKind::Su11Linear | ModelKind::TcSu11)
            || (model == ModelKind::TcFullSector && tc_branch == TcBranch::Su11);
        let (c0, lambda) = match model {
            ModelKind::Su11Linear => (5.0, 1.0),
            ModelKind::Su2Linear => (1.0, 0.5),
            _ if su11_like => (5.0, 1.0),
            _ => (1.0, 0.5),
        };
        let (w1, w2, w3) = if su11_like { (0.0, 2.0, 3.0) } else { (0.0, 1.0, 0.0) };

        let period = r.finite("T", 500.0)?;
        let periods = match (r.get("periods"), r.parse::<usize>("doublings", 0)?) {
            (Some(list), _) => parse_values("periods", list)?,
            (None, 0) => vec![period],
            (None, d) => (0..d).map(|i| period * (1u64 << i) as f64).collect(),
        };
        if periods.iter().any(|&t| t <= 0.0) {
            return bad("periods must be positive");
        }
        let steps = match r.get("steps") {
            None => None,
            Some(v) => Some(v.parse::<usize>().map_err(|_| ConfigError(format!("steps: cannot parse {v:?}")))?),
        };
        if steps == Some(0) {
            return bad("steps must be positive");
        }
        let dt = r.finite("dt", 0.025)?;
        if dt <= 0.0 {
            return bad("dt must be positive");
        }

        let mut axes = Vec::new();
        for i in 1..=2 {
            match (r.get(&format!("sweep.axis{i}")), r.get(&format!("sweep.values{i}"))) {
                (Some(key), Some(values)) => axes.push(Axis { key: key.to_string(), values: parse_values(key, values)? }),
                (None, None) => {}
                _ => return bad(format!("sweep.axis{i} and sweep.values{i} go together")),
            }
        }

        let wave = match r.get("wave").unwrap_or("su11") {
            "su11" => Algebra::Su11,
            "su2" => Algebra::Su2,
            other => return bad(format!("wave: unknown algebra {other:?}")),
        };
        let tolerances = raw
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("tol.").map(|name| (name, v)))
            .map(|(name, v)| match v.parse::<f64>() {
                Ok(t) if t.is_finite() && t >= 0.0 => Ok((name.to_string(), t)),
                _ => bad(format!("tol.{name}: cannot parse {v:?}")),
            })
            .collect::<Result<_, _>>()?;

        let cfg = RunConfig {
            model,
            k: r.finite("k", 0.5)?,
            j: half_integer("j", r.finite("j", 0.5)?)?,
            trunc_dim: r.parse("trunc_dim", 128)?,
            c0: r.schedule("c0", c0)?,
            lambda: r.schedule("lambda", lambda)?,
            omega1: r.schedule("omega1", w1)?,
            omega2: r.schedule("omega2", w2)?,
            omega3: r.schedule("omega3", w3)?,
            phi_wobble: r.finite("phi.wobble", 0.0)?,
            phi: r.finite("phi", 0.0)?,
            periods,
            dt,
            steps,
            sample_every: r.parse("sample_every", 4)?,
            winding: r.parse("winding", 1)?,
            branch: r.parse("branch", 1)?,
            n: r.parse("n", 0)?,
            mu: r.finite("mu", 0.5)?,
            n_a: r.parse("n_a", 1)?,
            n_c: r.parse("n_c", 1)?,
            n_l: r.parse("n_l", 0)?,
            m_n: r.parse("m_n", if su11_like { 0 } else { 1 })?,
            tc_branch,
            tau: r.finite("tau", 0.5)?,
            wave,
            zeta_re: r.finite("zeta_re", 0.0)?,
            zeta_im: r.finite("zeta_im", 0.0)?,
            rho_max: r.finite("rho_max", 6.0)?,
            rho_points: r.parse("rho_points", 121)?,
            angle_points: r.parse("angle_points", 64)?,
            axes,
            scope: Scope::parse(r.get("scope").unwrap_or("all"))?,
            draws: r.parse("draws", 20)?,
            tolerances,
            seed: r.parse("seed", 0)?,
        };
        if cfg.sample_every == 0 {
            return bad("sample_every must be positive");
        }
        if cfg.winding == 0 {
            return bad("winding must be nonzero");
        }
        let unused = r.unused();
        if !unused.is_empty() {
            return bad(format!("unknown keys: {}", unused.join(", ")));
        }
        Ok(cfg)
    }

    /// Integrator step for a loop of length `period`.
    pub fn step_for(&self, period: f64) -> f64 {
        match self.steps {
            Some(n) => period / n as f64,
            None => self.dt,
        }
    }

    /// Phase ramp with the optional wobble; winds exactly `winding` times.
    pub fn phi_schedule(&self, period: f64) -> Schedule {
        let ramp = Schedule::Linear { start: self.phi, slope: 2.0 * PI * self.winding as f64 / period };
        if self.phi_wobble == 0.0 {
            return ramp;
        }
        Schedule::Sum(vec![
            ramp,
            Schedule::Sinusoid {
                mean: 0.0,
                amplitude: 2.0 * PI * self.winding as f64 * self.phi_wobble,
                omega: 2.0 * PI / period,
                phase: 0.0,
            },
        ])
    }

    /// Algebra the single-algebra commands (diagonalize, coherent-state) use.
    pub fn algebra(&self) -> Algebra {
        match self.model {
            ModelKind::Su11Linear | ModelKind::TcSu11 => Algebra::Su11,
            ModelKind::Su2Linear | ModelKind::TcSu2 => Algebra::Su2,
            ModelKind::TcFullSector => match self.tc_branch {
                TcBranch::Su11 => Algebra::Su11,
                TcBranch::Su2 => Algebra::Su2,
            },
        }
    }

    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }
}
