//! Scenario execution: binds a configuration to the library and writes
//! the artifact bundle.

use crate::config::{Component, Potential, ScenarioConfig, Task};
use ciscat::field::{read_dump, to_adiabatic, write_dump, Grid2D, ScalarField, SpinorField, UnitaryField};
use ciscat::gauge::{wilson_loop, wilson_sign_predicted, LoopPath, Projected, Quadratic};
use ciscat::partialwave::{
    differential_cross_section, psi_ab, xs_pure_ab, PartialWaveSolution, RadialPotential, SolveOptions,
};
use ciscat::propagator::{run_with, Record};
use ciscat::topo::{charge_at_point, dislocation_lines, DislocationSet};
use ciscat::{Error, Result, C64};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Angular window around `θ = ±π` left out of cross-section comparisons.
pub const COMPARE_EXCLUSION: f64 = 0.1;

/// Cap on surface-table points per axis.
const SURFACE_POINTS: usize = 256;

/// What a scenario reports on stdout.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
}

impl Report {
    fn say(&mut self, line: String) {
        self.lines.push(line);
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn write_field(path: &Path, field: &SpinorField, cfg: &ScenarioConfig) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    write_dump(field, cfg.run.encoding, &mut out)?;
    out.flush().map_err(|e| io_err(path, e))
}

/// Create `<out>` and `<out>/analysis`, and write the echoed configuration.
fn prepare_outdir(cfg: &ScenarioConfig, out: &Path) -> Result<PathBuf> {
    let analysis = out.join("analysis");
    fs::create_dir_all(&analysis).map_err(|e| io_err(&analysis, e))?;
    write_text(&out.join("config.echo.ini"), &cfg.echo())?;
    Ok(analysis)
}

/// Run the scenario's task, writing its bundle under `out`.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path, input: Option<&Path>) -> Result<Report> {
    let analysis = prepare_outdir(cfg, out)?;
    match cfg.task {
        Task::Propagate => propagate(cfg, out, &analysis),
        Task::CrossSection => crosssection(cfg, &analysis),
        Task::Wilson => wilson(cfg, &analysis),
        Task::Dislocations => {
            let path = input.ok_or_else(|| Error::Config("dislocations needs --input <dump>".into()))?;
            let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
            let field = read_dump(BufReader::new(file))?;
            let scalar = pick_component(&field, cfg.analysis.component);
            let mut report = Report::default();
            dislocations(cfg, &scalar, &analysis, &mut report)?;
            Ok(report)
        }
    }
}

fn pick_component(field: &SpinorField, which: Component) -> ScalarField {
    let power = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    match which {
        Component::First => field.component(0),
        Component::Second => field.component(1),
        Component::Auto => field.component(usize::from(power(&field.g2) > power(&field.g1))),
    }
}

fn propagate(cfg: &ScenarioConfig, out: &Path, analysis: &Path) -> Result<Report> {
    let prop = cfg.propagation()?;
    prop.validate()?;
    let mut report = Report::default();
    if cfg.analysis.surfaces {
        write_text(&analysis.join("surfaces.csv"), &surfaces_table(&prop.grid, cfg))?;
    }
    let mut csv = String::from("step,tau,norm,p_ground,p_excited,absorbed,backscatter\n");
    let mut last: Option<SpinorField> = None;
    let mut index = 0;
    let records = run_with(&prop, |r: &Record, field: &SpinorField| {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.step, r.tau, r.norm, r.p_ground, r.p_excited, r.absorbed, r.backscatter
        );
        if cfg.run.snapshots {
            write_field(&out.join(format!("snap_{index}.field")), field, cfg)?;
        }
        index += 1;
        last = Some(field.clone());
        Ok(())
    })?;
    write_text(&out.join("diagnostics.csv"), &csv)?;
    let final_field = last.ok_or_else(|| Error::Config("run produced no snapshot".into()))?;
    let frames = UnitaryField::model_frame(prop.grid, &prop.model)?;
    let adiabatic = to_adiabatic(&final_field, &frames)?;
    write_field(&out.join("adiabatic_final.field"), &adiabatic, cfg)?;

    if let Some(r) = records.last() {
        let ratio = if r.norm > 0.0 { r.p_excited / r.norm } else { 0.0 };
        report.say(format!(
            "final step={} tau={} norm={:.6} p_ground={:.6e} p_excited={:.6e} excited_fraction={:.6e} absorbed={:.6e} backscatter={:.6e}",
            r.step, r.tau, r.norm, r.p_ground, r.p_excited, ratio, r.absorbed, r.backscatter
        ));
    }
    if cfg.analysis.dislocations && !records.is_empty() {
        // The ground adiabatic amplitude is the second component.
        let ground = adiabatic.component(1);
        let cis = prop.model.intersections();
        let set = dislocations(cfg, &ground, analysis, &mut report)?;
        if let Some(&(cx, cy)) = cis.first() {
            let axis = if prop.packet.direction > 0.0 { 0.0 } else { PI };
            let h = prop.grid.h_xi().max(prop.grid.h_eta());
            let length = (prop.grid.xi_range().1 - cx).abs().min((prop.grid.xi_range().0 - cx).abs());
            match set.along_ray((cx, cy), axis, 2.0 * h, length, h) {
                Some(c) => report.say(format!(
                    "downstream dislocation: start={:.4} end={:.4} coverage={:.4}",
                    c.start, c.end, c.coverage
                )),
                None => report.say("downstream dislocation: none".into()),
            }
        }
        charges(cfg, &ground, &cis, &set, analysis, &mut report)?;
    }
    Ok(report)
}

fn surfaces_table(grid: &Grid2D, cfg: &ScenarioConfig) -> String {
    let model = cfg.model();
    let stride_i = grid.n_xi().div_ceil(SURFACE_POINTS);
    let stride_j = grid.n_eta().div_ceil(SURFACE_POINTS);
    let mut s = String::from("xi,eta,e_lower,e_upper,scalar\n");
    for i in (0..grid.n_xi()).step_by(stride_i) {
        for j in (0..grid.n_eta()).step_by(stride_j) {
            let (x, y) = (grid.xi(i), grid.eta(j));
            let (lo, hi) = model.eigenvalues(x, y);
            let v = model.scalar(x, y);
            let _ = writeln!(s, "{x},{y},{},{},{v}", lo + v, hi + v);
        }
    }
    s
}

fn dislocations(
    cfg: &ScenarioConfig,
    field: &ScalarField,
    analysis: &Path,
    report: &mut Report,
) -> Result<DislocationSet> {
    let set = dislocation_lines(field, &cfg.dislocation_options());
    let mut lines = String::from("segment,xi,eta\n");
    let mut summary = String::from("segment,cells,points,suppression,phase_jump,start_xi,start_eta,end_xi,end_eta\n");
    for (id, s) in set.segments.iter().enumerate() {
        for p in &s.points {
            let _ = writeln!(lines, "{id},{},{}", p[0], p[1]);
        }
        let (a, b) = (s.points[0], s.points[s.points.len() - 1]);
        let _ = writeln!(
            summary,
            "{id},{},{},{},{},{},{},{},{}",
            s.cells,
            s.points.len(),
            s.suppression,
            s.phase_jump,
            a[0],
            a[1],
            b[0],
            b[1]
        );
    }
    write_text(&analysis.join("dislocations.csv"), &lines)?;
    write_text(&analysis.join("dislocations_summary.csv"), &summary)?;
    let largest = set.segments.iter().map(|s| s.cells).max().unwrap_or(0);
    report.say(format!("dislocation segments={} largest_cells={largest}", set.segments.len()));
    Ok(set)
}

/// Winding of `field` around each intersection. The loop is opened along
/// the direction of dislocation points crossing it, if any.
fn charges(
    cfg: &ScenarioConfig,
    field: &ScalarField,
    cis: &[(f64, f64)],
    set: &DislocationSet,
    analysis: &Path,
    report: &mut Report,
) -> Result<()> {
    let radius = cfg.analysis.charge_radius;
    let h = field.grid.h_xi().max(field.grid.h_eta());
    let mut csv = String::from("ci_xi,ci_eta,radius,opening,charge,status\n");
    for &(cx, cy) in cis {
        let (mut sx, mut sy) = (0.0f64, 0.0f64);
        for p in set.segments.iter().flat_map(|s| &s.points) {
            let (dx, dy) = (p[0] - cx, p[1] - cy);
            let d = dx.hypot(dy);
            if (d - radius).abs() <= 2.0 * h && d > 0.0 {
                sx += dx / d;
                sy += dy / d;
            }
        }
        let ray = (sx.hypot(sy) > 0.0).then(|| sy.atan2(sx));
        let opening = ray.map_or("closed".to_string(), |a| format!("{a}"));
        match charge_at_point(field, (cx, cy), radius, ray) {
            Ok(q) => {
                let _ = writeln!(csv, "{cx},{cy},{radius},{opening},{},ok", q.raw);
                report.say(format!("charge at ({cx}, {cy}) r={radius} opening={opening}: {:.4}", q.raw));
            }
            Err(e) => {
                let _ = writeln!(csv, "{cx},{cy},{radius},{opening},NaN,{}", e.to_string().replace(',', ";"));
                report.say(format!("charge at ({cx}, {cy}) r={radius}: {e}"));
            }
        }
    }
    write_text(&analysis.join("charges.csv"), &csv)
}

fn crosssection(cfg: &ScenarioConfig, analysis: &Path) -> Result<Report> {
    let a = &cfg.analysis;
    let mut report = Report::default();
    let n = a.n_theta;
    let thetas: Vec<f64> = (0..n).map(|j| -PI + 2.0 * PI * (j as f64 + 0.5) / n as f64).collect();
    let dump_kr = if a.field_dump { a.k * a.dump_half * std::f64::consts::SQRT_2 } else { 0.0 };
    let solution = match a.potential {
        Potential::None => None,
        Potential::HardDisk => {
            let m_max = a.m_max.max((dump_kr + 10.0 * dump_kr.cbrt() + 20.0).ceil() as usize);
            Some(PartialWaveSolution::hard_disk_exact(a.radius, a.k, a.alpha, m_max)?)
        }
        Potential::Gaussian => {
            let opts = SolveOptions { m_max: a.m_max, max_kr: dump_kr, ..Default::default() };
            Some(PartialWaveSolution::solve(&RadialPotential::gaussian(a.height, a.width), a.k, a.alpha, opts)?)
        }
    };
    let values = match &solution {
        Some(sol) => differential_cross_section(sol, &thetas)?,
        None => thetas.iter().map(|&t| xs_pure_ab(a.alpha, t)).collect::<Result<Vec<_>>>()?,
    };
    let mut csv = String::from(if a.compare_pure_ab {
        "theta,k_dsigma_dtheta,pure_ab,relative_deviation\n"
    } else {
        "theta,k_dsigma_dtheta\n"
    });
    let mut worst: f64 = 0.0;
    for (&t, &v) in thetas.iter().zip(&values) {
        if a.compare_pure_ab {
            let reference = xs_pure_ab(a.alpha, t)?;
            let dev = if reference != 0.0 { (v - reference).abs() / reference.abs() } else { (v - reference).abs() };
            if t.abs() < PI - COMPARE_EXCLUSION {
                worst = worst.max(dev);
            }
            let _ = writeln!(csv, "{t},{v},{reference},{dev}");
        } else {
            let _ = writeln!(csv, "{t},{v}");
        }
    }
    write_text(&analysis.join("crosssection.csv"), &csv)?;
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    report.say(format!("k={} alpha={} points={n} min={lo:.6e} max={hi:.6e}", a.k, a.alpha));
    if a.compare_pure_ab {
        report.say(format!("max relative deviation from pure AB (|theta| < pi - {COMPARE_EXCLUSION}) = {worst:.6e}"));
    }
    if a.field_dump {
        let grid = Grid2D::square(a.dump_n, a.dump_half)?;
        let inner = if a.potential == Potential::HardDisk {
            a.radius
        } else {
            solution.as_ref().map_or(0.0, |s| s.exterior_radius)
        };
        let mut failure = None;
        let field = SpinorField::from_fn(grid, |x, y| {
            let (r, t) = (x.hypot(y), y.atan2(x));
            let psi = if r <= inner || r == 0.0 {
                Ok(C64::new(0.0, 0.0))
            } else {
                match &solution {
                    None => Ok(psi_ab(r, t, a.k)),
                    Some(sol) if sol.alpha == 0.5 => sol.psi_total_folded(r, t),
                    Some(sol) => sol.psi_total(r, t),
                }
            };
            let psi = psi.unwrap_or_else(|e| {
                failure.get_or_insert(e);
                C64::new(0.0, 0.0)
            });
            [psi, C64::new(0.0, 0.0)]
        });
        if let Some(e) = failure {
            return Err(e);
        }
        write_field(&analysis.join("psi.field"), &field, cfg)?;
        report.say(format!("field dump {}x{} over [-{h}, {h}]^2", a.dump_n, a.dump_n, h = a.dump_half));
    }
    Ok(report)
}

fn wilson(cfg: &ScenarioConfig, analysis: &Path) -> Result<Report> {
    let a = &cfg.analysis;
    let model = cfg.model();
    let pair = Quadratic::from_model(&model).ok_or_else(|| {
        Error::Config(format!("wilson needs a model with a real coupling; `{}` has none", model.kind.name()))
    })?;
    let path = if a.loop_vertices.is_empty() {
        LoopPath::circle(a.loop_x, a.loop_y, a.loop_radius)
    } else {
        LoopPath::polyline(a.loop_vertices.clone()).map_err(|e| Error::Config(e.to_string()))?
    };
    let cis = model.intersections();
    path.validate(&cis)?;
    let enclosed: Vec<(f64, f64)> = cis.iter().copied().filter(|&p| path.encloses(p)).collect();
    let w = wilson_loop(&Projected(pair), &path)?;
    let predicted = wilson_sign_predicted(&pair, &enclosed)?;
    // Round away residues below the printed precision and drop negative zeros.
    let clean = |x: f64| if x.abs() < 5e-7 { 0.0 } else { x + 0.0 };
    let mut report = Report::default();
    report.say(format!("wilson = {:.6}{:+.6}i", clean(w.value.re), clean(w.value.im)));
    report.say(format!("predicted = {predicted:+}"));
    report.say(format!("enclosed intersections = {}", enclosed.len()));
    let csv = format!(
        "re,im,phase,predicted,enclosed,samples\n{},{},{},{},{},{}\n",
        w.value.re,
        w.value.im,
        w.phase,
        predicted,
        enclosed.len(),
        w.samples
    );
    write_text(&analysis.join("wilson.csv"), &csv)?;
    Ok(report)
}
