//! Phase winding and phase-dislocation lines of complex scalar fields.
//!
//! The charge of a loop is `(1/2π)·Σ wrap(arg ψ_{n+1} - arg ψ_n)` over
//! samples along it. A field with a nodal ray (across which the phase jumps
//! by π) is measured on a loop opened at that ray, which gives half-integer
//! charges for flux-line fields.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::gauge::LoopPath;
use crate::linalg::wrap_angle;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Anything that can be sampled at a point of the plane.
pub trait ComplexSampler {
    fn value(&self, x: f64, y: f64) -> Option<C64>;

    /// Angular gap left on each side of a nodal ray at the given radius.
    fn ray_gap(&self, _radius: f64) -> f64 {
        1e-9
    }
}

impl ComplexSampler for ScalarField {
    fn value(&self, x: f64, y: f64) -> Option<C64> {
        self.sample(x, y)
    }

    /// Half a grid cell.
    fn ray_gap(&self, radius: f64) -> f64 {
        0.5 * self.grid.h_xi().min(self.grid.h_eta()) / radius
    }
}

/// A closure sampled exactly.
pub struct FnField<F>(pub F);

impl<F: Fn(f64, f64) -> C64> ComplexSampler for FnField<F> {
    fn value(&self, x: f64, y: f64) -> Option<C64> {
        Some((self.0)(x, y))
    }
}

/// Result of a winding measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseLoopResult {
    /// Winding rounded to the nearest half-integer.
    pub charge: f64,
    /// Unrounded winding in turns.
    pub raw: f64,
    /// `|raw - charge|`.
    pub residual: f64,
    /// Residual below [`CHARGE_TOLERANCE`].
    pub converged: bool,
    pub samples: usize,
}

pub const CHARGE_TOLERANCE: f64 = 0.05;
const START_SAMPLES: usize = 64;
const MAX_SAMPLES: usize = 1 << 16;
/// Doubling stops once the winding changes by less than this.
const WINDING_STABILITY: f64 = 1e-3;
/// Consecutive samples whose phases differ by more than this, at full
/// resolution, straddle a zero of the field.
const CROSSING_JUMP: f64 = 0.5 * PI;

/// Where to open a circular loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Opening {
    Closed,
    /// Open at the ray leaving the center at this angle.
    AtRay(f64),
}

fn loop_points(path: &LoopPath, opening: Opening, gap: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    match (path, opening) {
        (LoopPath::Circle { center, radius }, Opening::Closed) => Ok((0..=n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                (center[0] + radius * t.cos(), center[1] + radius * t.sin())
            })
            .collect()),
        (LoopPath::Circle { center, radius }, Opening::AtRay(angle)) => {
            let span = 2.0 * PI - 2.0 * gap;
            Ok((0..=n)
                .map(|i| {
                    let t = angle + gap + span * i as f64 / n as f64;
                    (center[0] + radius * t.cos(), center[1] + radius * t.sin())
                })
                .collect())
        }
        (LoopPath::Polyline(v), Opening::Closed) => {
            let m = v.len();
            let per_edge = n.div_ceil(m).max(1);
            let mut out = Vec::with_capacity(m * per_edge + 1);
            for e in 0..m {
                let (a, b) = (v[e], v[(e + 1) % m]);
                for s in 0..per_edge {
                    let t = s as f64 / per_edge as f64;
                    out.push((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])));
                }
            }
            out.push((v[0][0], v[0][1]));
            Ok(out)
        }
        (LoopPath::Polyline(_), Opening::AtRay(_)) => {
            Err(Error::Domain("only circular loops can be opened at a ray".into()))
        }
    }
}

fn winding(field: &dyn ComplexSampler, points: &[(f64, f64)]) -> Result<(f64, f64, (f64, f64))> {
    let values: Vec<C64> = points
        .iter()
        .map(|&(x, y)| {
            field.value(x, y).ok_or_else(|| Error::Domain(format!("loop point ({x}, {y}) lies outside the field")))
        })
        .collect::<Result<_>>()?;
    let peak = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(i) = values.iter().position(|z| !(z.norm() > 1e-12 * peak)) {
        return Err(Error::NodalCrossing { x: points[i].0, y: points[i].1 });
    }
    let mut total = 0.0;
    let mut worst = (0.0, points[0]);
    for i in 1..values.len() {
        let d = wrap_angle(values[i].arg() - values[i - 1].arg());
        if d.abs() > worst.0 {
            let mid = (0.5 * (points[i].0 + points[i - 1].0), 0.5 * (points[i].1 + points[i - 1].1));
            worst = (d.abs(), mid);
        }
        total += d;
    }
    Ok((total / (2.0 * PI), worst.0, worst.1))
}

/// Winding of `field` along `path`, doubling the sampling until stable.
pub fn topological_charge(field: &dyn ComplexSampler, path: &LoopPath, opening: Opening) -> Result<PhaseLoopResult> {
    let gap = match path {
        LoopPath::Circle { radius, .. } => field.ray_gap(*radius),
        LoopPath::Polyline(_) => 0.0,
    };
    let mut n = START_SAMPLES;
    let (mut raw, _, _) = winding(field, &loop_points(path, opening, gap, n)?)?;
    loop {
        let m = 2 * n;
        let (next, jump, at) = winding(field, &loop_points(path, opening, gap, m)?)?;
        let stable = (next - raw).abs() < WINDING_STABILITY;
        raw = next;
        n = m;
        if stable && jump < CROSSING_JUMP {
            break;
        }
        if n >= MAX_SAMPLES {
            if jump >= CROSSING_JUMP {
                return Err(Error::NodalCrossing { x: at.0, y: at.1 });
            }
            break;
        }
    }
    let charge = (2.0 * raw).round() / 2.0;
    let residual = (raw - charge).abs();
    Ok(PhaseLoopResult { charge, raw, residual, converged: residual < CHARGE_TOLERANCE, samples: n + 1 })
}

/// Winding on a circle, opened at `ray` when given.
pub fn charge_at_point(
    field: &dyn ComplexSampler,
    center: (f64, f64),
    radius: f64,
    ray: Option<f64>,
) -> Result<PhaseLoopResult> {
    let path = LoopPath::circle(center.0, center.1, radius);
    let opening = ray.map_or(Opening::Closed, Opening::AtRay);
    topological_charge(field, &path, opening)
}

/// Detector thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DislocationOptions {
    /// Largest amplitude on a flagged edge, relative to the field maximum.
    pub eps_amp: f64,
    /// Largest deviation of the phase jump from π.
    pub eps_ph: f64,
    /// Shortest reported segment, in cells.
    pub min_cells: usize,
    /// Edge endpoints below this fraction of the maximum carry no phase.
    pub noise_floor: f64,
}

impl Default for DislocationOptions {
    fn default() -> Self {
        DislocationOptions { eps_amp: 0.02, eps_ph: 0.3, min_cells: 5, noise_floor: 1e-6 }
    }
}

/// One connected dislocation line.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// Zero crossings on flagged edges, ordered along the segment.
    pub points: Vec<[f64; 2]>,
    pub cells: usize,
    /// Mean of the interpolated minimum amplitude over the field maximum.
    pub suppression: f64,
    /// Mean absolute phase jump across the flagged edges.
    pub phase_jump: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DislocationSet {
    pub segments: Vec<Segment>,
}

/// Extent of dislocation points near a ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayCoverage {
    /// Distance along the ray of the nearest and farthest points.
    pub start: f64,
    pub end: f64,
    /// Fraction of the probed length with a point within one cell.
    pub coverage: f64,
    pub points: usize,
}

impl DislocationSet {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Points within `tolerance` of the ray from `origin` at `angle`, over
    /// ray distances `[0, length]`, binned at spacing `cell`.
    pub fn along_ray(
        &self,
        origin: (f64, f64),
        angle: f64,
        tolerance: f64,
        length: f64,
        cell: f64,
    ) -> Option<RayCoverage> {
        let (c, s) = (angle.cos(), angle.sin());
        let mut along: Vec<f64> = self
            .segments
            .iter()
            .flat_map(|seg| seg.points.iter())
            .filter_map(|p| {
                let (dx, dy) = (p[0] - origin.0, p[1] - origin.1);
                let t = dx * c + dy * s;
                let d = (-dx * s + dy * c).abs();
                (d <= tolerance && t >= -tolerance && t <= length).then_some(t)
            })
            .collect();
        if along.is_empty() {
            return None;
        }
        along.sort_by(f64::total_cmp);
        let bins = (length / cell).ceil().max(1.0) as usize;
        let mut hit = vec![false; bins];
        for t in &along {
            let b = ((t / cell).floor().max(0.0) as usize).min(bins - 1);
            hit[b] = true;
        }
        let coverage = hit.iter().filter(|h| **h).count() as f64 / bins as f64;
        Some(RayCoverage { start: along[0], end: along[along.len() - 1], coverage, points: along.len() })
    }
}

/// Smallest `|a + t(b - a)|` for `t ∈ [0, 1]` and the minimizing `t`.
fn min_on_edge(a: C64, b: C64) -> (f64, f64) {
    let d = b - a;
    let dd = d.norm_sqr();
    let t = if dd > 0.0 { (-(a.conj() * d).re / dd).clamp(0.0, 1.0) } else { 0.0 };
    ((a + d * t).norm(), t)
}

/// Phase-dislocation lines: lattice edges with a phase jump within `eps_ph`
/// of π and a near-zero between their endpoints, grouped by 8-connectivity.
pub fn dislocation_lines(field: &ScalarField, opts: &DislocationOptions) -> DislocationSet {
    let g = &field.grid;
    let (nx, ny) = (g.n_xi(), g.n_eta());
    let peak = field.max_abs();
    if !(peak > 0.0) {
        return DislocationSet::default();
    }
    let floor = opts.noise_floor * peak;
    // Per node: flagged edge data (point, amplitude ratio, jump), at most two.
    let mut marks: Vec<Vec<([f64; 2], f64, f64)>> = vec![Vec::new(); nx * ny];
    let consider = |i: usize, j: usize, i2: usize, j2: usize, marks: &mut Vec<Vec<([f64; 2], f64, f64)>>| {
        let (a, b) = (field.at(i, j), field.at(i2, j2));
        if !(a.norm() > floor && b.norm() > floor) {
            return;
        }
        let jump = wrap_angle(b.arg() - a.arg()).abs();
        if jump < PI - opts.eps_ph {
            return;
        }
        let (amp, t) = min_on_edge(a, b);
        if amp >= opts.eps_amp * peak {
            return;
        }
        let (x, y) = (g.xi(i) + t * (g.xi(i2) - g.xi(i)), g.eta(j) + t * (g.eta(j2) - g.eta(j)));
        marks[g.index(i, j)].push(([x, y], amp / peak, jump));
    };
    for i in 0..nx {
        for j in 0..ny {
            if i + 1 < nx {
                consider(i, j, i + 1, j, &mut marks);
            }
            if j + 1 < ny {
                consider(i, j, i, j + 1, &mut marks);
            }
        }
    }
    let mut seen = vec![false; nx * ny];
    let mut segments = Vec::new();
    for start in 0..nx * ny {
        if seen[start] || marks[start].is_empty() {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut cells = Vec::new();
        while let Some(n) = stack.pop() {
            cells.push(n);
            let (i, j) = ((n / ny) as i64, (n % ny) as i64);
            for di in -1..=1 {
                for dj in -1..=1 {
                    let (p, q) = (i + di, j + dj);
                    if p < 0 || q < 0 || p >= nx as i64 || q >= ny as i64 {
                        continue;
                    }
                    let m = p as usize * ny + q as usize;
                    if !seen[m] && !marks[m].is_empty() {
                        seen[m] = true;
                        stack.push(m);
                    }
                }
            }
        }
        if cells.len() < opts.min_cells {
            continue;
        }
        let entries: Vec<&([f64; 2], f64, f64)> = cells.iter().flat_map(|c| marks[*c].iter()).collect();
        let count = entries.len() as f64;
        let suppression = entries.iter().map(|e| e.1).sum::<f64>() / count;
        let phase_jump = entries.iter().map(|e| e.2).sum::<f64>() / count;
        let points = order_points(entries.iter().map(|e| e.0).collect());
        segments.push(Segment { points, cells: cells.len(), suppression, phase_jump });
    }
    DislocationSet { segments }
}

/// Order points along their principal axis.
fn order_points(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &pts {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (c, s) = (angle.cos(), angle.sin());
    pts.sort_by(|a, b| (a[0] * c + a[1] * s).total_cmp(&(b[0] * c + b[1] * s)));
    pts
}
