//! INI-style scenario configuration: parsing, defaults, validation, echo.
//!
//! A file names a scenario (a preset, or `custom` with an explicit task)
//! and may override any key. Every problem is reported with its line, not
//! just the first one.

use crate::presets;
use ciscat::field::{Encoding, Grid2D};
use ciscat::models::{Barrier, ModelKind, TwoStatePotential};
use ciscat::propagator::{AbsorberKind, AbsorberSpec, PacketSpec, PropagationConfig};
use ciscat::topo::DislocationOptions;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Propagate,
    CrossSection,
    Wilson,
    Dislocations,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Propagate => "propagate",
            Task::CrossSection => "crosssection",
            Task::Wilson => "wilson",
            Task::Dislocations => "dislocations",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        [Task::Propagate, Task::CrossSection, Task::Wilson, Task::Dislocations].into_iter().find(|t| t.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    None,
    HardDisk,
    Gaussian,
}

impl Potential {
    fn name(&self) -> &'static str {
        match self {
            Potential::None => "none",
            Potential::HardDisk => "hard_disk",
            Potential::Gaussian => "gaussian",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        [Potential::None, Potential::HardDisk, Potential::Gaussian].into_iter().find(|p| p.name() == s)
    }
}

/// Which component of a dump to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// The component with the larger norm.
    Auto,
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSection {
    pub n_xi: usize,
    pub n_eta: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    pub eta_min: f64,
    pub eta_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSection {
    pub kind: ModelKind,
    pub delta: f64,
    pub rho0: f64,
    pub x0: f64,
    pub cap_two_ci: bool,
    pub barrier: bool,
    pub barrier_height: f64,
    pub barrier_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketSection {
    pub xi0: f64,
    pub eta0: f64,
    pub direction: f64,
    pub sigma_long: f64,
    pub half_width: f64,
    pub rolloff: f64,
    pub transport_phase: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub beta: f64,
    /// `None` until defaults are materialized.
    pub dtau: Option<f64>,
    pub n_steps: Option<usize>,
    pub snapshot_every: usize,
    pub snapshots: bool,
    pub absorber: bool,
    pub absorber_margin: f64,
    pub absorber_power: f64,
    pub marker: Option<f64>,
    pub encoding: Encoding,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSection {
    pub dislocations: bool,
    pub eps_amp: f64,
    pub eps_ph: f64,
    pub min_cells: usize,
    pub noise_floor: f64,
    pub charge_radius: f64,
    pub component: Component,
    pub surfaces: bool,
    pub alpha: f64,
    pub k: f64,
    pub potential: Potential,
    pub radius: f64,
    pub height: f64,
    pub width: f64,
    pub n_theta: usize,
    pub m_max: usize,
    pub compare_pure_ab: bool,
    pub field_dump: bool,
    pub dump_n: usize,
    pub dump_half: f64,
    pub loop_x: f64,
    pub loop_y: f64,
    pub loop_radius: f64,
    /// Polygon loop; empty selects the circle.
    pub loop_vertices: Vec<[f64; 2]>,
}

/// A fully specified scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub task: Task,
    pub grid: GridSection,
    pub model: ModelSection,
    pub packet: PacketSection,
    pub run: RunSection,
    pub analysis: AnalysisSection,
}

/// One configuration problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

const SECTIONS: [&str; 5] = ["grid", "model", "packet", "run", "analysis"];

fn parse_f64(v: &str) -> Result<f64, String> {
    v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| format!("expected a finite number, got `{v}`"))
}

fn parse_usize(v: &str) -> Result<usize, String> {
    v.parse::<usize>().map_err(|_| format!("expected a non-negative integer, got `{v}`"))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

/// `x y; x y; ...` or `none`.
fn parse_vertices(v: &str) -> Result<Vec<[f64; 2]>, String> {
    if v == "none" {
        return Ok(Vec::new());
    }
    v.split(';')
        .map(|pair| {
            let xs: Vec<&str> = pair.split_whitespace().collect();
            match xs.as_slice() {
                [x, y] => Ok([parse_f64(x)?, parse_f64(y)?]),
                _ => Err(format!("expected `x y` vertex, got `{}`", pair.trim())),
            }
        })
        .collect()
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map_or("none".into(), |x| format!("{x:?}"))
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: "custom".into(),
            task: Task::Propagate,
            grid: GridSection { n_xi: 512, n_eta: 512, xi_min: -40.0, xi_max: 40.0, eta_min: -40.0, eta_max: 40.0 },
            model: ModelSection {
                kind: ModelKind::CappedJT,
                delta: 1.0,
                rho0: 5.0,
                x0: 3.0,
                cap_two_ci: true,
                barrier: false,
                barrier_height: 50.0,
                barrier_radius: 1.0,
            },
            packet: {
                let p = PacketSpec::default();
                PacketSection {
                    xi0: p.center.0,
                    eta0: p.center.1,
                    direction: p.direction,
                    sigma_long: p.sigma_long,
                    half_width: p.half_width,
                    rolloff: p.rolloff,
                    transport_phase: p.transport_phase,
                }
            },
            run: RunSection {
                beta: 1.0,
                dtau: None,
                n_steps: None,
                snapshot_every: 500,
                snapshots: true,
                absorber: true,
                absorber_margin: 0.1,
                absorber_power: 8.0,
                marker: Some(0.75),
                encoding: Encoding::Binary,
            },
            analysis: AnalysisSection {
                dislocations: true,
                eps_amp: 0.02,
                eps_ph: 0.3,
                min_cells: 5,
                noise_floor: 1e-6,
                charge_radius: 2.0,
                component: Component::Auto,
                surfaces: false,
                alpha: 0.5,
                k: 1.0,
                potential: Potential::HardDisk,
                radius: 1.0,
                height: 1.0,
                width: 1.0,
                n_theta: 360,
                m_max: 40,
                compare_pure_ab: false,
                field_dump: false,
                dump_n: 256,
                dump_half: 10.0,
                loop_x: 0.0,
                loop_y: 0.0,
                loop_radius: 1.5,
                loop_vertices: Vec::new(),
            },
        }
    }
}

impl ScenarioConfig {
    /// Set one key from its textual value.
    fn set(&mut self, section: &str, key: &str, v: &str) -> Result<(), String> {
        let unknown = || Err(format!("unknown key `{key}` in [{section}]"));
        match section {
            "grid" => {
                let g = &mut self.grid;
                match key {
                    "n_xi" => g.n_xi = parse_usize(v)?,
                    "n_eta" => g.n_eta = parse_usize(v)?,
                    "xi_min" => g.xi_min = parse_f64(v)?,
                    "xi_max" => g.xi_max = parse_f64(v)?,
                    "eta_min" => g.eta_min = parse_f64(v)?,
                    "eta_max" => g.eta_max = parse_f64(v)?,
                    _ => return unknown(),
                }
            }
            "model" => {
                let m = &mut self.model;
                match key {
                    "kind" => m.kind = ModelKind::from_name(v).ok_or_else(|| format!("unknown model kind `{v}`"))?,
                    "delta" => m.delta = parse_f64(v)?,
                    "rho0" => m.rho0 = parse_f64(v)?,
                    "x0" => m.x0 = parse_f64(v)?,
                    "cap_two_ci" => m.cap_two_ci = parse_bool(v)?,
                    "barrier" => m.barrier = parse_bool(v)?,
                    "barrier_height" => m.barrier_height = parse_f64(v)?,
                    "barrier_radius" => m.barrier_radius = parse_f64(v)?,
                    _ => return unknown(),
                }
            }
            "packet" => {
                let p = &mut self.packet;
                match key {
                    "xi0" => p.xi0 = parse_f64(v)?,
                    "eta0" => p.eta0 = parse_f64(v)?,
                    "direction" => p.direction = parse_f64(v)?,
                    "sigma_long" => p.sigma_long = parse_f64(v)?,
                    "half_width" => p.half_width = parse_f64(v)?,
                    "rolloff" => p.rolloff = parse_f64(v)?,
                    "transport_phase" => p.transport_phase = parse_bool(v)?,
                    _ => return unknown(),
                }
            }
            "run" => {
                let r = &mut self.run;
                match key {
                    "task" => self.task = Task::from_name(v).ok_or_else(|| format!("unknown task `{v}`"))?,
                    "beta" => r.beta = parse_f64(v)?,
                    "dtau" => r.dtau = if v == "auto" { None } else { Some(parse_f64(v)?) },
                    "n_steps" => r.n_steps = if v == "auto" { None } else { Some(parse_usize(v)?) },
                    "snapshot_every" => r.snapshot_every = parse_usize(v)?,
                    "snapshots" => r.snapshots = parse_bool(v)?,
                    "absorber" => {
                        r.absorber = match v {
                            "mask" => true,
                            "none" => false,
                            _ => return Err(format!("expected mask or none, got `{v}`")),
                        }
                    }
                    "absorber_margin" => r.absorber_margin = parse_f64(v)?,
                    "absorber_power" => r.absorber_power = parse_f64(v)?,
                    "marker" => r.marker = if v == "none" { None } else { Some(parse_f64(v)?) },
                    "encoding" => {
                        r.encoding = match v {
                            "binary" => Encoding::Binary,
                            "ascii" => Encoding::Ascii,
                            _ => return Err(format!("expected binary or ascii, got `{v}`")),
                        }
                    }
                    _ => return unknown(),
                }
            }
            "analysis" => {
                let a = &mut self.analysis;
                match key {
                    "dislocations" => a.dislocations = parse_bool(v)?,
                    "eps_amp" => a.eps_amp = parse_f64(v)?,
                    "eps_ph" => a.eps_ph = parse_f64(v)?,
                    "min_cells" => a.min_cells = parse_usize(v)?,
                    "noise_floor" => a.noise_floor = parse_f64(v)?,
                    "charge_radius" => a.charge_radius = parse_f64(v)?,
                    "component" => {
                        a.component = match v {
                            "auto" => Component::Auto,
                            "1" => Component::First,
                            "2" => Component::Second,
                            _ => return Err(format!("expected auto, 1 or 2, got `{v}`")),
                        }
                    }
                    "surfaces" => a.surfaces = parse_bool(v)?,
                    "alpha" => a.alpha = parse_f64(v)?,
                    "k" => a.k = parse_f64(v)?,
                    "potential" => {
                        a.potential = Potential::from_name(v).ok_or_else(|| format!("unknown potential `{v}`"))?
                    }
                    "radius" => a.radius = parse_f64(v)?,
                    "height" => a.height = parse_f64(v)?,
                    "width" => a.width = parse_f64(v)?,
                    "n_theta" => a.n_theta = parse_usize(v)?,
                    "m_max" => a.m_max = parse_usize(v)?,
                    "compare_pure_ab" => a.compare_pure_ab = parse_bool(v)?,
                    "field_dump" => a.field_dump = parse_bool(v)?,
                    "dump_n" => a.dump_n = parse_usize(v)?,
                    "dump_half" => a.dump_half = parse_f64(v)?,
                    "loop_x" => a.loop_x = parse_f64(v)?,
                    "loop_y" => a.loop_y = parse_f64(v)?,
                    "loop_radius" => a.loop_radius = parse_f64(v)?,
                    "loop_vertices" => a.loop_vertices = parse_vertices(v)?,
                    _ => return unknown(),
                }
            }
            _ => return Err(format!("unknown section [{section}]")),
        }
        Ok(())
    }

    /// Every key with its current value, in echo order.
    pub fn entries(&self) -> Vec<(&'static str, &'static str, String)> {
        let (g, m, p, r, a) = (&self.grid, &self.model, &self.packet, &self.run, &self.analysis);
        let f = |x: f64| format!("{x:?}");
        let b = |x: bool| x.to_string();
        vec![
            ("run", "scenario", self.scenario.clone()),
            ("run", "task", self.task.name().into()),
            ("run", "beta", f(r.beta)),
            ("run", "dtau", fmt_opt_f64(r.dtau).replace("none", "auto")),
            ("run", "n_steps", r.n_steps.map_or("auto".into(), |n| n.to_string())),
            ("run", "snapshot_every", r.snapshot_every.to_string()),
            ("run", "snapshots", b(r.snapshots)),
            ("run", "absorber", if r.absorber { "mask".into() } else { "none".into() }),
            ("run", "absorber_margin", f(r.absorber_margin)),
            ("run", "absorber_power", f(r.absorber_power)),
            ("run", "marker", fmt_opt_f64(r.marker)),
            ("run", "encoding", if r.encoding == Encoding::Binary { "binary".into() } else { "ascii".into() }),
            ("grid", "n_xi", g.n_xi.to_string()),
            ("grid", "n_eta", g.n_eta.to_string()),
            ("grid", "xi_min", f(g.xi_min)),
            ("grid", "xi_max", f(g.xi_max)),
            ("grid", "eta_min", f(g.eta_min)),
            ("grid", "eta_max", f(g.eta_max)),
            ("model", "kind", m.kind.name().into()),
            ("model", "delta", f(m.delta)),
            ("model", "rho0", f(m.rho0)),
            ("model", "x0", f(m.x0)),
            ("model", "cap_two_ci", b(m.cap_two_ci)),
            ("model", "barrier", b(m.barrier)),
            ("model", "barrier_height", f(m.barrier_height)),
            ("model", "barrier_radius", f(m.barrier_radius)),
            ("packet", "xi0", f(p.xi0)),
            ("packet", "eta0", f(p.eta0)),
            ("packet", "direction", f(p.direction)),
            ("packet", "sigma_long", f(p.sigma_long)),
            ("packet", "half_width", f(p.half_width)),
            ("packet", "rolloff", f(p.rolloff)),
            ("packet", "transport_phase", b(p.transport_phase)),
            ("analysis", "dislocations", b(a.dislocations)),
            ("analysis", "eps_amp", f(a.eps_amp)),
            ("analysis", "eps_ph", f(a.eps_ph)),
            ("analysis", "min_cells", a.min_cells.to_string()),
            ("analysis", "noise_floor", f(a.noise_floor)),
            ("analysis", "charge_radius", f(a.charge_radius)),
            (
                "analysis",
                "component",
                match a.component {
                    Component::Auto => "auto".into(),
                    Component::First => "1".into(),
                    Component::Second => "2".into(),
                },
            ),
            ("analysis", "surfaces", b(a.surfaces)),
            ("analysis", "alpha", f(a.alpha)),
            ("analysis", "k", f(a.k)),
            ("analysis", "potential", a.potential.name().into()),
            ("analysis", "radius", f(a.radius)),
            ("analysis", "height", f(a.height)),
            ("analysis", "width", f(a.width)),
            ("analysis", "n_theta", a.n_theta.to_string()),
            ("analysis", "m_max", a.m_max.to_string()),
            ("analysis", "compare_pure_ab", b(a.compare_pure_ab)),
            ("analysis", "field_dump", b(a.field_dump)),
            ("analysis", "dump_n", a.dump_n.to_string()),
            ("analysis", "dump_half", f(a.dump_half)),
            ("analysis", "loop_x", f(a.loop_x)),
            ("analysis", "loop_y", f(a.loop_y)),
            ("analysis", "loop_radius", f(a.loop_radius)),
            (
                "analysis",
                "loop_vertices",
                if a.loop_vertices.is_empty() {
                    "none".into()
                } else {
                    a.loop_vertices.iter().map(|v| format!("{:?} {:?}", v[0], v[1])).collect::<Vec<_>>().join("; ")
                },
            ),
        ]
    }

    /// Canonical text of the configuration; reparses to an equal value.
    pub fn echo(&self) -> String {
        let entries = self.entries();
        let mut out = String::from("# ciscat scenario configuration\n");
        for section in ["run", "grid", "model", "packet", "analysis"] {
            out.push_str(&format!("\n[{section}]\n"));
            for (s, k, v) in &entries {
                if *s == section {
                    out.push_str(&format!("{k} = {v}\n"));
                }
            }
        }
        out
    }

    pub fn grid(&self) -> ciscat::Result<Grid2D> {
        let g = &self.grid;
        Grid2D::new(g.n_xi, g.n_eta, (g.xi_min, g.xi_max), (g.eta_min, g.eta_max))
    }

    pub fn model(&self) -> TwoStatePotential {
        let m = &self.model;
        let barrier = m.barrier.then_some(Barrier { height: m.barrier_height, radius: m.barrier_radius });
        TwoStatePotential { kind: m.kind, delta: m.delta, rho0: m.rho0, x0: m.x0, cap_two_ci: m.cap_two_ci, barrier }
    }

    /// Propagation settings with `auto` values resolved.
    pub fn propagation(&self) -> ciscat::Result<PropagationConfig> {
        let p = &self.packet;
        let r = &self.run;
        let mut cfg = PropagationConfig::new(self.model(), r.beta)?;
        cfg.grid = self.grid()?;
        cfg.snapshot_every = r.snapshot_every;
        cfg.packet = PacketSpec {
            center: (p.xi0, p.eta0),
            direction: p.direction,
            sigma_long: p.sigma_long,
            half_width: p.half_width,
            rolloff: p.rolloff,
            transport_phase: p.transport_phase,
        };
        cfg.absorber = AbsorberSpec {
            kind: if r.absorber { AbsorberKind::Mask } else { AbsorberKind::None },
            margin: r.absorber_margin,
            power: r.absorber_power,
        };
        cfg.marker = r.marker;
        cfg.dtau = r.dtau.unwrap_or_else(|| cfg.resolved_dtau());
        cfg.n_steps = match r.n_steps {
            Some(n) => n,
            None if cfg.beta > 0.0 && cfg.dtau > 0.0 => cfg.step_budget(),
            None => 0,
        };
        Ok(cfg)
    }

    pub fn dislocation_options(&self) -> DislocationOptions {
        let a = &self.analysis;
        DislocationOptions { eps_amp: a.eps_amp, eps_ph: a.eps_ph, min_cells: a.min_cells, noise_floor: a.noise_floor }
    }

    /// Fill `auto` values.
    fn materialize(&mut self) {
        if let Ok(cfg) = self.propagation() {
            self.run.dtau.get_or_insert(cfg.dtau);
            self.run.n_steps.get_or_insert(cfg.n_steps);
        }
    }

    /// Constraint violations, each naming its key.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut need = |ok: bool, key: &str, what: &str| {
            if !ok {
                out.push(format!("{key} {what}"));
            }
        };
        let (g, m, p, r, a) = (&self.grid, &self.model, &self.packet, &self.run, &self.analysis);
        need(g.n_xi >= 8 && g.n_xi.is_power_of_two(), "[grid].n_xi", "must be a power of two >= 8");
        need(g.n_eta >= 8 && g.n_eta.is_power_of_two(), "[grid].n_eta", "must be a power of two >= 8");
        need(g.xi_max > g.xi_min, "[grid].xi_max", "must exceed [grid].xi_min");
        need(g.eta_max > g.eta_min, "[grid].eta_max", "must exceed [grid].eta_min");
        need(m.delta > 0.0, "[model].delta", "must be positive");
        need(m.rho0 > 0.0, "[model].rho0", "must be positive");
        need(m.x0 != 0.0, "[model].x0", "must be nonzero");
        need(m.barrier_radius > 0.0, "[model].barrier_radius", "must be positive");
        need(p.direction == 1.0 || p.direction == -1.0, "[packet].direction", "must be 1 or -1");
        need(p.sigma_long > 0.0, "[packet].sigma_long", "must be positive");
        need(p.half_width >= 0.0, "[packet].half_width", "must be non-negative");
        need(p.rolloff > 0.0, "[packet].rolloff", "must be positive");
        need(r.beta > 0.0, "[run].beta", "must be positive");
        need(r.dtau.map_or(true, |d| d > 0.0), "[run].dtau", "must be positive");
        need(r.snapshot_every >= 1, "[run].snapshot_every", "must be at least 1");
        need(r.absorber_margin > 0.0 && r.absorber_margin < 0.5, "[run].absorber_margin", "must lie in (0, 0.5)");
        need(r.absorber_power > 0.0, "[run].absorber_power", "must be positive");
        need(r.marker.map_or(true, |x| x > 0.0 && x < 1.0), "[run].marker", "must lie in (0, 1) or be none");
        need(a.eps_amp > 0.0 && a.eps_amp < 1.0, "[analysis].eps_amp", "must lie in (0, 1)");
        need(a.eps_ph > 0.0 && a.eps_ph < std::f64::consts::PI, "[analysis].eps_ph", "must lie in (0, π)");
        need(a.noise_floor >= 0.0 && a.noise_floor < a.eps_amp, "[analysis].noise_floor", "must lie in [0, eps_amp)");
        need(a.charge_radius > 0.0, "[analysis].charge_radius", "must be positive");
        need(a.k > 0.0, "[analysis].k", "must be positive");
        need(a.radius > 0.0, "[analysis].radius", "must be positive");
        need(a.width > 0.0, "[analysis].width", "must be positive");
        need(a.n_theta >= 2, "[analysis].n_theta", "must be at least 2");
        need(a.dump_n >= 8 && a.dump_n.is_power_of_two(), "[analysis].dump_n", "must be a power of two >= 8");
        need(a.dump_half > 0.0, "[analysis].dump_half", "must be positive");
        need(a.loop_radius > 0.0, "[analysis].loop_radius", "must be positive");
        need(
            a.loop_vertices.is_empty() || a.loop_vertices.len() >= 3,
            "[analysis].loop_vertices",
            "needs at least three vertices",
        );
        if self.task == Task::Propagate && out.is_empty() {
            if let Err(e) = self.propagation().and_then(|c| c.validate()) {
                out.push(format!("propagation settings: {e}"));
            }
        }
        out
    }
}

/// Parse configuration text into a fully defaulted scenario.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, Vec<ConfigError>> {
    let mut errors = Vec::new();
    let mut entries: Vec<(usize, String, String, String)> = Vec::new();
    let mut section: Option<String> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            let name = name.trim();
            if SECTIONS.contains(&name) {
                section = Some(name.into());
            } else {
                errors.push(ConfigError { line: Some(line), message: format!("unknown section [{name}]") });
                section = None;
            }
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            errors.push(ConfigError { line: Some(line), message: format!("expected `key = value`, got `{body}`") });
            continue;
        };
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        let Some(sec) = section.clone() else {
            errors.push(ConfigError {
                line: Some(line),
                message: format!("key `{key}` appears outside a known section"),
            });
            continue;
        };
        if let Some(prev) = entries.iter().find(|e| e.1 == sec && e.2 == key) {
            errors.push(ConfigError {
                line: Some(line),
                message: format!("duplicate key [{sec}].{key} (first set on line {})", prev.0),
            });
            continue;
        }
        entries.push((line, sec, key, value));
    }

    let scenario = entries.iter().find(|e| e.1 == "run" && e.2 == "scenario");
    let mut cfg = match scenario {
        None => {
            errors.push(ConfigError { line: None, message: "missing scenario: set `scenario` in [run]".into() });
            return Err(errors);
        }
        Some((line, _, _, name)) if name == "custom" => {
            if !entries.iter().any(|e| e.1 == "run" && e.2 == "task") {
                errors.push(ConfigError { line: Some(*line), message: "scenario `custom` needs [run].task".into() });
            }
            ScenarioConfig::default()
        }
        Some((line, _, _, name)) => match presets::preset(name) {
            Some(p) => p,
            None => {
                errors.push(ConfigError {
                    line: Some(*line),
                    message: format!("unknown scenario `{name}`; see `ciscat list`"),
                });
                return Err(errors);
            }
        },
    };
    for (line, sec, key, value) in &entries {
        if sec == "run" && key == "scenario" {
            continue;
        }
        if let Err(message) = cfg.set(sec, key, value) {
            errors.push(ConfigError { line: Some(*line), message: format!("[{sec}].{key}: {message}") });
        }
    }
    for v in cfg.violations() {
        let line = entries.iter().find(|e| v.starts_with(&format!("[{}].{} ", e.1, e.2))).map(|e| e.0);
        errors.push(ConfigError { line, message: format!("constraint violated: {v}") });
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    cfg.materialize();
    Ok(cfg)
}

/// A preset with `auto` values resolved, as if parsed from `[run] scenario = name`.
pub fn from_preset(name: &str) -> Result<ScenarioConfig, Vec<ConfigError>> {
    parse_config(&format!("[run]\nscenario = {name}\n"))
        .map_err(|errs| errs.into_iter().map(|e| ConfigError { line: None, ..e }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_preset_is_fully_defaulted() {
        let cfg = parse_config("[run]\nscenario = fig6_row1_left\n").unwrap();
        assert_eq!(cfg.task, Task::Propagate);
        assert_eq!(cfg.model.kind, ModelKind::CappedJT);
        assert_eq!(cfg.run.beta, 1.0);
        assert!(cfg.run.dtau.is_some() && cfg.run.n_steps.is_some());
    }

    #[test]
    fn negative_beta_names_the_key() {
        let errs = parse_config("[run]\nscenario = fig6_row1_left\nbeta = -1\n").unwrap_err();
        assert!(errs.iter().any(|e| e.message.contains("[run].beta") && e.line == Some(3)), "{errs:?}");
    }

    #[test]
    fn empty_file_reports_missing_scenario() {
        let errs = parse_config("").unwrap_err();
        assert!(errs.iter().any(|e| e.message.contains("missing scenario")));
    }

    #[test]
    fn all_errors_are_collected() {
        let text = "[run]\nscenario = custom\ntask = wilson\nbogus = 1\n[grid]\nn_xi = many\n[nowhere]\nx = 1\n";
        let errs = parse_config(text).unwrap_err();
        assert!(errs.len() >= 3, "{errs:?}");
        assert!(errs.iter().any(|e| e.line == Some(4) && e.message.contains("unknown key")));
        assert!(errs.iter().any(|e| e.line == Some(6) && e.message.contains("integer")));
        assert!(errs.iter().any(|e| e.line == Some(7) && e.message.contains("unknown section")));
    }

    #[test]
    fn echo_round_trips_for_every_preset() {
        for (name, _) in presets::catalog() {
            let cfg = from_preset(&name).unwrap();
            let again = parse_config(&cfg.echo()).unwrap();
            assert_eq!(cfg, again, "{name}");
            assert_eq!(cfg.echo(), again.echo());
        }
    }

    #[test]
    fn overrides_apply_on_top_of_presets() {
        let cfg = parse_config("[run]\nscenario = fig6_row1_left\nbeta = 0.5 # slower\n[grid]\nn_xi = 256\n").unwrap();
        assert_eq!(cfg.run.beta, 0.5);
        assert_eq!(cfg.grid.n_xi, 256);
    }
}
