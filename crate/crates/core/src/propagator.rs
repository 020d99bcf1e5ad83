//! Split-operator propagation of two-component diabatic wave packets.
//!
//! Solves `i ∂G/∂τ = -∇²G + H(ξ, η)·G` with the Strang factorization
//! `exp(-iδτT/2)·exp(-iδτH)·exp(-iδτT/2)`. The kinetic factor is applied in
//! Fourier space and the potential factor nodewise in closed form. An
//! optional mask absorbs outgoing flux near the (periodic) box edges.

use crate::error::{Error, Result};
use crate::field::{Grid2D, SpinorField};
use crate::linalg::{expm_traceless, Mat2};
use crate::models::TwoStatePotential;
use crate::spectral::{wavenumbers, Spectral2};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Largest relative norm change tolerated in one step.
pub const STEP_DRIFT_LIMIT: f64 = 1e-6;
/// Largest packet mass allowed inside the cone region at launch.
pub const LAUNCH_TAIL_LIMIT: f64 = 1e-8;

/// Initial ground-surface packet: a Gaussian along ξ times a flat slab with
/// raised-cosine edges along η, carrying wavenumber `k` along `direction·ξ̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    pub center: (f64, f64),
    /// `+1` moves toward `+ξ`, `-1` toward `-ξ`.
    pub direction: f64,
    pub sigma_long: f64,
    /// Half-width of the flat part of the slab.
    pub half_width: f64,
    /// Width of each raised-cosine edge.
    pub rolloff: f64,
    /// Multiply by the parallel-transport phase of the ground frame so the
    /// packet is a smooth plane-wave packet in the adiabatic picture.
    pub transport_phase: bool,
}

impl Default for PacketSpec {
    fn default() -> Self {
        PacketSpec {
            center: (-21.0, 0.0),
            direction: 1.0,
            sigma_long: 3.5,
            half_width: 12.0,
            rolloff: 4.0,
            transport_phase: true,
        }
    }
}

impl PacketSpec {
    /// Transverse slab profile at offset `d` from the packet axis.
    pub fn slab(&self, d: f64) -> f64 {
        let d = d.abs();
        if d <= self.half_width {
            1.0
        } else if d < self.half_width + self.rolloff {
            0.5 * (1.0 + (PI * (d - self.half_width) / self.rolloff).cos())
        } else {
            0.0
        }
    }

    /// Scalar packet `ψ₀` with carrier wavenumber `k`, unnormalized.
    pub fn amplitude(&self, x: f64, y: f64, k: f64) -> C64 {
        let s = (x - self.center.0) / self.sigma_long;
        let envelope = self.slab(y - self.center.1) * (-0.5 * s * s).exp();
        C64::from_polar(envelope, self.direction * k * x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsorberKind {
    None,
    Mask,
}

/// Edge absorber: `[(1 - cos(πd/m))/2]^{1/p}` at depth `d` into a band of
/// width `m` (a fraction of each box side), and 1 elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorberSpec {
    pub kind: AbsorberKind,
    pub margin: f64,
    pub power: f64,
}

impl Default for AbsorberSpec {
    fn default() -> Self {
        AbsorberSpec { kind: AbsorberKind::Mask, margin: 0.1, power: 8.0 }
    }
}

impl AbsorberSpec {
    pub fn none() -> Self {
        AbsorberSpec { kind: AbsorberKind::None, ..Default::default() }
    }

    fn profile(&self, d: f64, m: f64) -> f64 {
        if d >= m {
            1.0
        } else {
            (0.5 * (1.0 - (PI * d.max(0.0) / m).cos())).powf(1.0 / self.power)
        }
    }

    /// Mask values at every node, or `None` without absorber.
    pub fn mask(&self, grid: &Grid2D) -> Option<Vec<f64>> {
        if self.kind == AbsorberKind::None {
            return None;
        }
        let (x0, x1) = grid.xi_range();
        let (y0, y1) = grid.eta_range();
        let (mx, my) = (self.margin * (x1 - x0), self.margin * (y1 - y0));
        Some(
            grid.nodes()
                .map(|(_, x, y)| self.profile((x - x0).min(x1 - x), mx) * self.profile((y - y0).min(y1 - y), my))
                .collect(),
        )
    }
}

/// Everything needed for one propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationConfig {
    pub grid: Grid2D,
    pub model: TwoStatePotential,
    /// Collision energy over the asymptotic gap, `β = k²/Δ`.
    pub beta: f64,
    pub dtau: f64,
    /// Step budget; the run ends earlier once the marker is passed.
    pub n_steps: usize,
    pub snapshot_every: usize,
    pub packet: PacketSpec,
    pub absorber: AbsorberSpec,
    /// Stop once the transmitted density peak passes this fraction of the
    /// downstream half-length of the box.
    pub marker: Option<f64>,
}

impl PropagationConfig {
    /// Defaults: 512² nodes over `[-40, 40]²`, capped cone with `Δ = 1`,
    /// `ρ₀ = 5`, marker at 0.75.
    pub fn new(model: TwoStatePotential, beta: f64) -> Result<Self> {
        let grid = Grid2D::square(512, 40.0)?;
        let packet = PacketSpec::default();
        let mut cfg = PropagationConfig {
            grid,
            model,
            beta,
            dtau: 0.0,
            n_steps: 0,
            snapshot_every: 500,
            packet,
            absorber: AbsorberSpec::default(),
            marker: Some(0.75),
        };
        cfg.dtau = cfg.resolved_dtau();
        cfg.n_steps = cfg.step_budget();
        Ok(cfg)
    }

    /// Carrier wavenumber `k = sqrt(β·Δ)`.
    pub fn carrier_k(&self) -> f64 {
        (self.beta * self.model.delta).sqrt()
    }

    /// Largest step keeping the kinetic phase below π/4 at every grid
    /// wavenumber.
    pub fn nyquist_dtau(&self) -> f64 {
        let kx = PI / self.grid.h_xi();
        let ky = PI / self.grid.h_eta();
        0.25 * PI / (kx * kx + ky * ky)
    }

    /// Step keeping the kinetic phase below π/4 over the populated part of
    /// the spectrum (carrier plus eight spectral widths), capped at 0.01.
    pub fn resolved_dtau(&self) -> f64 {
        let kl = self.carrier_k() + 8.0 / self.packet.sigma_long;
        let kt = 8.0 / self.packet.rolloff.max(self.grid.h_eta());
        (0.25 * PI / (kl * kl + kt * kt)).min(0.01)
    }

    /// Enough steps for the packet to cross the box twice at group speed.
    pub fn step_budget(&self) -> usize {
        let (x0, x1) = self.grid.xi_range();
        let speed = 2.0 * self.carrier_k();
        (2.0 * (x1 - x0) / speed / self.dtau).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.dtau > 0.0 && self.dtau.is_finite()) {
            return bad(format!("dtau must be positive, got {}", self.dtau));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.model.delta > 0.0) {
            return bad(format!("delta must be positive, got {}", self.model.delta));
        }
        let k = self.carrier_k();
        let limit = PI / (2.0 * self.grid.h_xi());
        if !(k < limit) {
            return bad(format!("carrier wavenumber {k} exceeds half the grid Nyquist limit {limit}"));
        }
        if self.snapshot_every == 0 {
            return bad("snapshot_every must be at least 1".into());
        }
        let p = &self.packet;
        if !(p.sigma_long > 0.0 && p.half_width >= 0.0 && p.rolloff > 0.0) {
            return bad("packet needs sigma_long > 0, half_width >= 0, rolloff > 0".into());
        }
        if p.direction != 1.0 && p.direction != -1.0 {
            return bad(format!("packet direction must be +1 or -1, got {}", p.direction));
        }
        if !self.grid.contains(p.center.0, p.center.1) {
            return bad(format!("packet center {:?} lies outside the grid", p.center));
        }
        let a = &self.absorber;
        if a.kind == AbsorberKind::Mask && !(a.margin > 0.0 && a.margin < 0.5 && a.power > 0.0) {
            return bad(format!("absorber needs 0 < margin < 0.5 and power > 0 (got {}, {})", a.margin, a.power));
        }
        if let Some(m) = self.marker {
            if !(m > 0.0 && m < 1.0) {
                return bad(format!("marker must lie in (0, 1), got {m}"));
            }
        }
        Ok(())
    }

    /// Position of the marker line along the incidence axis.
    pub fn marker_position(&self) -> Option<f64> {
        let (x0, x1) = self.grid.xi_range();
        self.marker.map(|m| if self.packet.direction > 0.0 { m * x1 } else { m * x0 })
    }

    /// Dividing line between the launch point and the first intersection.
    pub fn dividing_line(&self) -> f64 {
        let ci = self.model.intersections().first().map_or(0.0, |c| c.0);
        0.5 * (self.packet.center.0 + ci)
    }
}

/// Ground-surface packet mapped to the diabatic picture, normalized to 1.
pub fn prepare_packet(config: &PropagationConfig) -> Result<SpinorField> {
    prepare_packet_with(config, false)
}

/// As [`prepare_packet`]; `adjoint_frame` maps with `W†` instead of `W`,
/// which is the wrong convention and is kept for tests.
pub fn prepare_packet_with(config: &PropagationConfig, adjoint_frame: bool) -> Result<SpinorField> {
    config.validate()?;
    let k = config.carrier_k();
    let model = &config.model;
    let p = &config.packet;
    let mut field = SpinorField::zeros(config.grid);
    for (n, x, y) in config.grid.nodes() {
        let mut psi = p.amplitude(x, y, k);
        if psi == C64::new(0.0, 0.0) {
            continue;
        }
        if p.transport_phase {
            psi *= C64::from_polar(1.0, model.transport_phase(x, y, p.center));
        }
        let w = model.frame(x, y)?;
        let w = if adjoint_frame { w.adjoint() } else { w };
        let [a, b] = w.apply([C64::new(0.0, 0.0), psi]);
        field.g1[n] = a;
        field.g2[n] = b;
    }
    let norm = field.norm_unchecked();
    if !(norm > 0.0) {
        return Err(Error::Config("packet has no support on the grid".into()));
    }
    field.scale(1.0 / norm.sqrt());
    let tail = cone_mass(&field, model);
    if tail > LAUNCH_TAIL_LIMIT {
        return Err(Error::Config(format!(
            "packet mass {tail:e} inside the cone region exceeds {LAUNCH_TAIL_LIMIT:e}; move the packet away from the intersection"
        )));
    }
    Ok(field)
}

/// Probability within `ρ₀` of any intersection.
pub fn cone_mass(field: &SpinorField, model: &TwoStatePotential) -> f64 {
    let cis = model.intersections();
    let mut mass = 0.0;
    for (n, x, y) in field.grid.nodes() {
        if cis.iter().any(|c| (x - c.0).hypot(y - c.1) < model.rho0) {
            mass += field.g1[n].norm_sqr() + field.g2[n].norm_sqr();
        }
    }
    mass * field.grid.cell_area()
}

/// Nodewise `G ← exp(-iδτH)·G`.
pub fn potential_step(field: &mut SpinorField, model: &TwoStatePotential, dtau: f64) {
    for (n, x, y) in field.grid.nodes() {
        let u = potential_propagator(model, x, y, dtau);
        let [a, b] = u.apply([field.g1[n], field.g2[n]]);
        field.g1[n] = a;
        field.g2[n] = b;
    }
}

/// `exp(-iδτH)` at one node, including the scalar barrier.
pub fn potential_propagator(model: &TwoStatePotential, x: f64, y: f64, dtau: f64) -> Mat2 {
    let (h, c) = model.coefficients(x, y);
    let u = expm_traceless(h, c, dtau);
    let v = model.scalar(x, y);
    if v == 0.0 {
        u
    } else {
        u.scale(C64::from_polar(1.0, -v * dtau))
    }
}

/// Both components multiplied by `exp(-i(δτ/2)(k_ξ² + k_η²))` in Fourier
/// space.
pub fn kinetic_half_step(field: &mut SpinorField, dtau: f64) {
    let mut plan = Spectral2::new(&field.grid);
    let phases = kinetic_phases(&field.grid, 0.5 * dtau);
    for comp in [&mut field.g1, &mut field.g2] {
        apply_kinetic(&mut plan, &phases, comp);
    }
}

/// Kinetic phase factors in the transposed spectral layout, including the
/// `1/N` of the unnormalized round trip.
fn kinetic_phases(grid: &Grid2D, dt: f64) -> Vec<C64> {
    let kx = wavenumbers(grid.n_xi(), grid.xi_range().1 - grid.xi_range().0);
    let ky = wavenumbers(grid.n_eta(), grid.eta_range().1 - grid.eta_range().0);
    let scale = 1.0 / grid.len() as f64;
    let mut out = Vec::with_capacity(grid.len());
    for qy in &ky {
        for qx in &kx {
            out.push(C64::from_polar(scale, -dt * (qx * qx + qy * qy)));
        }
    }
    out
}

fn apply_kinetic(plan: &mut Spectral2, phases: &[C64], data: &mut [C64]) {
    plan.forward_transposed(data);
    for (d, p) in data.iter_mut().zip(phases) {
        *d *= p;
    }
    plan.inverse_transposed(data);
}

/// Reusable Strang stepper with precomputed kinetic phases, nodewise
/// potential propagators and absorber mask.
///
/// The mask is diagonal in position like the potential factor and is
/// applied right after it, so consecutive kinetic half-steps fuse into one
/// full step when several steps are taken at once.
pub struct SplitOperator {
    grid: Grid2D,
    dtau: f64,
    plan: Spectral2,
    half_kinetic: Vec<C64>,
    full_kinetic: Vec<C64>,
    potential: Vec<Mat2>,
    mask: Option<Vec<f64>>,
    steps_taken: usize,
}

impl SplitOperator {
    pub fn new(grid: Grid2D, model: &TwoStatePotential, dtau: f64, absorber: &AbsorberSpec) -> Self {
        SplitOperator {
            grid,
            dtau,
            plan: Spectral2::new(&grid),
            half_kinetic: kinetic_phases(&grid, 0.5 * dtau),
            full_kinetic: kinetic_phases(&grid, dtau),
            potential: grid.nodes().map(|(_, x, y)| potential_propagator(model, x, y, dtau)).collect(),
            mask: absorber.mask(&grid),
            steps_taken: 0,
        }
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    /// One step `K/2 · M·V · K/2`. Returns the absorbed mass.
    pub fn step(&mut self, field: &mut SpinorField) -> Result<f64> {
        self.advance(field, 1)
    }

    fn kinetic(&mut self, field: &mut SpinorField, full: bool) {
        let phases = if full { &self.full_kinetic } else { &self.half_kinetic };
        apply_kinetic(&mut self.plan, phases, &mut field.g1);
        apply_kinetic(&mut self.plan, phases, &mut field.g2);
    }

    /// `n` Strang steps with fused interior kinetic factors. Returns the
    /// absorbed mass.
    pub fn advance(&mut self, field: &mut SpinorField, n: usize) -> Result<f64> {
        if field.grid != self.grid {
            return Err(Error::InvalidField("field grid does not match the stepper".into()));
        }
        if n == 0 {
            return Ok(0.0);
        }
        let mut absorbed = 0.0;
        let mut previous = field.norm_unchecked();
        self.kinetic(field, false);
        for s in 0..n {
            let mut unitary = 0.0;
            let mut kept = 0.0;
            for (n, ((a, b), u)) in field.g1.iter_mut().zip(field.g2.iter_mut()).zip(&self.potential).enumerate() {
                let [p, q] = u.apply([*a, *b]);
                let w = p.norm_sqr() + q.norm_sqr();
                unitary += w;
                match &self.mask {
                    Some(mask) => {
                        let m = mask[n];
                        *a = p * m;
                        *b = q * m;
                        kept += w * m * m;
                    }
                    None => {
                        *a = p;
                        *b = q;
                        kept += w;
                    }
                }
            }
            let area = self.grid.cell_area();
            let (unitary, kept) = (unitary * area, kept * area);
            let drift = (unitary - previous).abs() / previous.max(f64::MIN_POSITIVE);
            if !(drift <= STEP_DRIFT_LIMIT) {
                return Err(Error::Instability { step: self.steps_taken + s + 1, drift });
            }
            absorbed += unitary - kept;
            previous = kept;
            self.kinetic(field, s + 1 < n);
        }
        self.steps_taken += n;
        field.tau += n as f64 * self.dtau;
        Ok(absorbed)
    }
}

/// Strang step on a field without precomputation.
pub fn step(field: &mut SpinorField, model: &TwoStatePotential, dtau: f64, absorber: &AbsorberSpec) -> Result<f64> {
    SplitOperator::new(field.grid, model, dtau, absorber).step(field)
}

/// Per-snapshot diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub step: usize,
    pub tau: f64,
    pub norm: f64,
    pub p_ground: f64,
    pub p_excited: f64,
    /// Cumulative mass removed by the absorber.
    pub absorbed: f64,
    pub backscatter: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<SpinorField>,
    pub diagnostics: Vec<Record>,
}

impl Trajectory {
    pub fn final_field(&self) -> &SpinorField {
        self.snapshots.last().expect("a trajectory has at least the initial snapshot")
    }
}

/// Populations in precomputed frames.
struct Frames(Vec<Mat2>);

impl Frames {
    fn new(grid: &Grid2D, model: &TwoStatePotential) -> Result<Self> {
        grid.nodes().map(|(_, x, y)| model.frame(x, y).map(|w| w.adjoint())).collect::<Result<Vec<_>>>().map(Frames)
    }

    fn populations(&self, field: &SpinorField) -> (f64, f64) {
        let (mut ground, mut excited) = (0.0, 0.0);
        for ((a, b), wd) in field.g1.iter().zip(&field.g2).zip(&self.0) {
            let [fe, fg] = wd.apply([*a, *b]);
            excited += fe.norm_sqr();
            ground += fg.norm_sqr();
        }
        let area = field.grid.cell_area();
        (ground * area, excited * area)
    }
}

/// Propagate and collect every snapshot in memory.
pub fn run(config: &PropagationConfig) -> Result<Trajectory> {
    let mut snapshots = Vec::new();
    let diagnostics = run_with(config, |_, field| {
        snapshots.push(field.clone());
        Ok(())
    })?;
    Ok(Trajectory { snapshots, diagnostics })
}

/// Propagate, handing each snapshot to `sink` as it is taken. The initial
/// field and the final field are always snapshots.
pub fn run_with(
    config: &PropagationConfig,
    mut sink: impl FnMut(&Record, &SpinorField) -> Result<()>,
) -> Result<Vec<Record>> {
    let mut field = prepare_packet(config)?;
    let mut stepper = SplitOperator::new(config.grid, &config.model, config.dtau, &config.absorber);
    let frames = Frames::new(&config.grid, &config.model)?;
    let line = config.dividing_line();
    let direction = config.packet.direction;
    let marker = config.marker_position();
    let mut absorbed = 0.0;
    let mut records = Vec::new();
    let mut take = |step: usize, field: &SpinorField, absorbed: f64, records: &mut Vec<Record>| -> Result<()> {
        let (p_ground, p_excited) = frames.populations(field);
        let record = Record {
            step,
            tau: field.tau,
            norm: field.norm_unchecked(),
            p_ground,
            p_excited,
            absorbed,
            backscatter: backscatter_fraction(field, line, direction),
        };
        sink(&record, field)?;
        records.push(record);
        Ok(())
    };
    take(0, &field, absorbed, &mut records)?;
    if config.n_steps == 0 {
        return Ok(records);
    }
    let floor = MARKER_FLOOR * longitudinal_marginal(&field).iter().fold(0.0, |a: f64, b| a.max(*b));
    let mut done = 0;
    while done < config.n_steps {
        let next_snapshot = (done / config.snapshot_every + 1) * config.snapshot_every;
        let chunk = MARKER_STRIDE.min(next_snapshot - done).min(config.n_steps - done);
        absorbed += stepper.advance(&mut field, chunk)?;
        done += chunk;
        if marker.is_some_and(|m| transmitted_peak_passed(&field, direction, m, floor)) || done == config.n_steps {
            break;
        }
        if done % config.snapshot_every == 0 {
            take(done, &field, absorbed, &mut records)?;
        }
    }
    let last = done;
    take(last, &field, absorbed, &mut records)?;
    Ok(records)
}

/// Marginal density along ξ, `∫(|g1|² + |g2|²) dη`.
pub fn longitudinal_marginal(field: &SpinorField) -> Vec<f64> {
    let g = &field.grid;
    let n_eta = g.n_eta();
    let density = field.density();
    density.chunks(n_eta).map(|row| row.iter().sum::<f64>() * g.h_eta()).collect()
}

/// Steps between marker checks.
pub const MARKER_STRIDE: usize = 25;

/// A transmitted peak counts once it exceeds this fraction of the initial
/// marginal peak; below that the downstream marginal is roundoff.
pub const MARKER_FLOOR: f64 = 1e-3;

/// Whether the peak of the downstream part of the marginal exceeds `floor`
/// and lies beyond the marker.
pub fn transmitted_peak_passed(field: &SpinorField, direction: f64, marker: f64, floor: f64) -> bool {
    let g = &field.grid;
    let marginal = longitudinal_marginal(field);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for (i, m) in marginal.iter().enumerate() {
        let x = g.xi(i);
        if direction * x > 0.0 && *m > best.0 {
            best = (*m, x);
        }
    }
    best.0 > floor && direction * (best.1 - marker) >= 0.0
}

/// Share of the surviving probability upstream of the line `ξ = line` for
/// incidence along `direction·ξ̂`.
pub fn backscatter_fraction(field: &SpinorField, line: f64, direction: f64) -> f64 {
    let g = &field.grid;
    let marginal = longitudinal_marginal(field);
    let total: f64 = marginal.iter().sum();
    if !(total > 0.0) {
        return 0.0;
    }
    let upstream: f64 =
        marginal.iter().enumerate().filter(|(i, _)| direction * (g.xi(*i) - line) < 0.0).map(|(_, m)| m).sum();
    upstream / total
}

/// Expectation of the kinetic and potential energies, per unit norm.
pub fn energy(field: &SpinorField, model: &TwoStatePotential) -> Result<(f64, f64)> {
    field.validate()?;
    let g = field.grid;
    let mut plan = Spectral2::new(&g);
    let kx = wavenumbers(g.n_xi(), g.xi_range().1 - g.xi_range().0);
    let ky = wavenumbers(g.n_eta(), g.eta_range().1 - g.eta_range().0);
    let mut kinetic = 0.0;
    let mut weight = 0.0;
    for comp in [&field.g1, &field.g2] {
        let mut data = comp.clone();
        plan.forward(&mut data);
        for (n, z) in data.iter().enumerate() {
            let (i, j) = (n / g.n_eta(), n % g.n_eta());
            kinetic += z.norm_sqr() * (kx[i] * kx[i] + ky[j] * ky[j]);
            weight += z.norm_sqr();
        }
    }
    let mut potential = 0.0;
    for (n, x, y) in g.nodes() {
        let v = [field.g1[n], field.g2[n]];
        let hv = model.matrix(x, y).apply(v);
        potential += (v[0].conj() * hv[0] + v[1].conj() * hv[1]).re;
    }
    let norm: f64 = field.g1.iter().chain(&field.g2).map(|z| z.norm_sqr()).sum();
    Ok((kinetic / weight, potential / norm))
}

/// Spectral mean wavenumber `(⟨k_ξ⟩, ⟨k_η⟩)` of the total density.
pub fn mean_wavenumber(field: &SpinorField) -> (f64, f64) {
    let g = field.grid;
    let mut plan = Spectral2::new(&g);
    let kx = wavenumbers(g.n_xi(), g.xi_range().1 - g.xi_range().0);
    let ky = wavenumbers(g.n_eta(), g.eta_range().1 - g.eta_range().0);
    let (mut sx, mut sy, mut w) = (0.0, 0.0, 0.0);
    for comp in [&field.g1, &field.g2] {
        let mut data = comp.clone();
        plan.forward(&mut data);
        for (n, z) in data.iter().enumerate() {
            let p = z.norm_sqr();
            sx += p * kx[n / g.n_eta()];
            sy += p * ky[n % g.n_eta()];
            w += p;
        }
    }
    (sx / w, sy / w)
}

/// Density-weighted mean and variance of ξ.
pub fn longitudinal_moments(field: &SpinorField) -> (f64, f64) {
    let g = &field.grid;
    let marginal = longitudinal_marginal(field);
    let total: f64 = marginal.iter().sum();
    let mean = marginal.iter().enumerate().map(|(i, m)| g.xi(i) * m).sum::<f64>() / total;
    let var = marginal.iter().enumerate().map(|(i, m)| (g.xi(i) - mean).powi(2) * m).sum::<f64>() / total;
    (mean, var)
}
