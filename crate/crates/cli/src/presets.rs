//! Named scenarios, indexed by the figure each one regenerates.

use crate::config::{Potential, ScenarioConfig, Task};
use ciscat::models::ModelKind;

const FIG1_K: [(&str, f64); 4] = [("a", 0.01), ("b", 0.1), ("c", 1.0), ("d", 10.0)];
const FIG6_BETA: [(&str, f64); 3] = [("row1", 1.0), ("row2", 0.5), ("row3", 0.125)];
const FIG2_K: [(&str, f64); 3] = [("k0.01", 0.01), ("k1", 1.0), ("k10", 10.0)];

/// Preset name and the figure it reproduces, in listing order.
pub fn catalog() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (panel, k) in FIG1_K {
        out.push((format!("fig1{panel}_green"), format!("Fig. 1({panel}): hard disk a=1, no flux, k={k}")));
        out.push((format!("fig1{panel}_blue"), format!("Fig. 1({panel}): hard disk a=1, half flux, k={k}")));
        out.push((format!("fig1{panel}_red"), format!("Fig. 1({panel}): pure Aharonov-Bohm, half flux, k={k}")));
    }
    out.push((
        "fig1a_bluevsred".into(),
        "Fig. 1(a): hard disk with half flux against pure Aharonov-Bohm, k=0.01".into(),
    ));
    for (tag, k) in FIG2_K {
        out.push((format!("fig2_{tag}"), format!("Fig. 2: analytic field dump, hard disk a=1, half flux, k={k}")));
    }
    out.push(("fig4_packet".into(), "Fig. 4: capped cone packet density snapshots, beta=1".into()));
    out.push(("fig5_surfaces".into(), "Fig. 5: capped cone adiabatic surfaces".into()));
    for (row, beta) in FIG6_BETA {
        out.push((format!("fig6_{row}_left"), format!("Fig. 6 left: capped cone, beta={beta}")));
        out.push((format!("fig6_{row}_right"), format!("Fig. 6 right: twisted capped cone, beta={beta}")));
    }
    out.push(("fig7_twoci".into(), "Fig. 7: two intersections with central barrier, beta=1".into()));
    out.push(("wilson_fig7_inner".into(), "Fig. 7: Wilson loop enclosing one intersection".into()));
    out.push(("wilson_fig7_outer".into(), "Fig. 7: Wilson loop enclosing both intersections".into()));
    out
}

fn crosssection(potential: Potential, alpha: f64, k: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig { task: Task::CrossSection, ..Default::default() };
    c.analysis.potential = potential;
    c.analysis.alpha = alpha;
    c.analysis.k = k;
    c.analysis.radius = 1.0;
    c
}

/// The scenario behind `name`, before `auto` values are resolved.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    let mut c = match name {
        "fig1a_bluevsred" => {
            let mut c = crosssection(Potential::HardDisk, 0.5, 0.01);
            c.analysis.compare_pure_ab = true;
            c
        }
        "fig4_packet" => {
            let mut c = ScenarioConfig::default();
            c.run.snapshot_every = 250;
            c.analysis.dislocations = false;
            c
        }
        "fig5_surfaces" => {
            let mut c = ScenarioConfig::default();
            c.run.n_steps = Some(0);
            c.run.snapshots = false;
            c.analysis.dislocations = false;
            c.analysis.surfaces = true;
            c
        }
        "fig7_twoci" => {
            let mut c = ScenarioConfig::default();
            c.model.kind = ModelKind::TwoCI;
            c.model.barrier = true;
            c
        }
        "wilson_fig7_inner" | "wilson_fig7_outer" => {
            let mut c = ScenarioConfig { task: Task::Wilson, ..Default::default() };
            c.model.kind = ModelKind::TwoCI;
            if name.ends_with("outer") {
                c.analysis.loop_x = 1.5;
                c.analysis.loop_radius = 6.0;
            }
            c
        }
        _ => {
            if let Some(rest) = name.strip_prefix("fig1") {
                let (panel, colour) = rest.split_once('_')?;
                let k = FIG1_K.iter().find(|p| p.0 == panel)?.1;
                match colour {
                    "green" => crosssection(Potential::HardDisk, 0.0, k),
                    "blue" => crosssection(Potential::HardDisk, 0.5, k),
                    "red" => crosssection(Potential::None, 0.5, k),
                    _ => return None,
                }
            } else if let Some(tag) = name.strip_prefix("fig2_") {
                let k = FIG2_K.iter().find(|p| p.0 == tag)?.1;
                let mut c = crosssection(Potential::HardDisk, 0.5, k);
                c.analysis.field_dump = true;
                c.analysis.dump_half = (3.0 / k).max(5.0);
                c
            } else if let Some(rest) = name.strip_prefix("fig6_") {
                let (row, side) = rest.split_once('_')?;
                let beta = FIG6_BETA.iter().find(|p| p.0 == row)?.1;
                let mut c = ScenarioConfig::default();
                c.run.beta = beta;
                c.model.kind = match side {
                    "left" => ModelKind::CappedJT,
                    "right" => ModelKind::TwistedCappedJT,
                    _ => return None,
                };
                c
            } else {
                return None;
            }
        }
    };
    c.scenario = name.to_string();
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_catalog_entry_resolves() {
        for (name, _) in catalog() {
            let c = preset(&name).unwrap_or_else(|| panic!("{name}"));
            assert_eq!(c.scenario, name);
        }
        assert!(preset("fig9").is_none());
        assert!(preset("fig1e_green").is_none());
    }

    #[test]
    fn fig6_row3_right_is_twisted_at_one_eighth() {
        let c = preset("fig6_row3_right").unwrap();
        assert_eq!(c.model.kind, ModelKind::TwistedCappedJT);
        assert_eq!(c.run.beta, 0.125);
    }
}
