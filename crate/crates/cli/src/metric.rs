use inputsel::controllability::{EnergyTarget, LinearSystem, MinEnergy, SystemVariant};
use inputsel::graph::{directed_ring, named_graph, Graph, NamedGraph};
use inputsel::numerics::expm;
use inputsel::optimize::objectives::{
    ConvergenceObjective, CtrbRankObjective, GciObjective, GramianEnergyObjective, GramianH2Objective, KalmanObjective,
    MinEnergyObjective, NoiseObjective,
};
use inputsel::optimize::SetFunction;
use inputsel::perf::{ConvergenceParams, KalmanSetup};
use inputsel::{Error, Result};
use nalgebra::DVector;

use crate::args::{Metric, MetricArgs, Variant};

/// Loads a graph file (JSON or edge list) or builds a named graph given as
/// `ring:10`, `path:5`, `star:6` or `directed-ring:8`.
pub fn load_graph(spec: &str) -> Result<Graph> {
    if let Some((kind, n)) = spec.split_once(':') {
        if let Ok(n) = n.parse::<usize>() {
            let named = match kind {
                "ring" => Some(NamedGraph::Ring),
                "path" => Some(NamedGraph::Path),
                "star" => Some(NamedGraph::Star),
                "directed-ring" => return directed_ring(n),
                _ => None,
            };
            if let Some(kind) = named {
                return named_graph(kind, n);
            }
        }
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Error::InvalidParameter(format!("cannot read {spec}: {e}")))?;
    if text.trim_start().starts_with('{') {
        Graph::from_json(&text)
    } else {
        Ok(Graph::from_edge_list(&text)?.0)
    }
}

fn system(g: &Graph, a: &MetricArgs) -> Result<LinearSystem> {
    let variant = match a.variant {
        Variant::Actuated => SystemVariant::Actuated,
        Variant::Grounded => SystemVariant::Grounded,
    };
    LinearSystem::new(-g.laplacian(), variant)?.with_horizon(0.0, a.t1)
}

fn state(given: &[f64], n: usize, default: impl Fn(usize) -> f64, name: &str) -> Result<DVector<f64>> {
    if given.is_empty() {
        return Ok(DVector::from_fn(n, |i, _| default(i)));
    }
    if given.len() != n {
        return Err(Error::DimensionMismatch(format!("--{name} has {} entries, graph has {n} nodes", given.len())));
    }
    Ok(DVector::from_column_slice(given))
}

pub fn convergence_params(g: &Graph, a: &MetricArgs) -> Result<ConvergenceParams> {
    ConvergenceParams::new(a.t, a.delta.unwrap_or_else(|| ConvergenceParams::default_delta(g)), a.p)
}

pub fn objective(g: &Graph, metric: Metric, a: &MetricArgs) -> Result<Box<dyn SetFunction>> {
    let n = g.n();
    Ok(match metric {
        Metric::Noise => Box::new(NoiseObjective { graph: g.clone() }),
        Metric::Convergence => Box::new(ConvergenceObjective { graph: g.clone(), params: convergence_params(g, a)? }),
        Metric::Kalman => {
            let transition = expm(&(-g.laplacian() * a.kalman_step))?;
            Box::new(KalmanObjective { setup: KalmanSetup::with_defaults(transition, a.kalman_horizon)? })
        }
        Metric::CtrbRank => Box::new(CtrbRankObjective::new(system(g, a)?)),
        Metric::GramianH2 => Box::new(GramianH2Objective { system: system(g, a)?, output: None }),
        Metric::GramianEnergy => Box::new(GramianEnergyObjective { system: system(g, a)? }),
        Metric::MinEnergy => {
            let x0 = state(&a.x0, n, |_| 0.0, "x0")?;
            let x1 = state(&a.x1, n, |i| i as f64 / (n.max(2) - 1) as f64, "x1")?;
            let target = EnergyTarget::new(x0, x1, a.epsilon)?;
            Box::new(MinEnergyObjective { model: MinEnergy::new(&system(g, a)?, &target)? })
        }
        Metric::Gci => Box::new(GciObjective { graph: g.clone() }),
    })
}
