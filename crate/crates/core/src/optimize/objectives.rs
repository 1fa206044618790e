//! [`SetFunction`] adapters for the network metrics, plus simple modular and
//! coverage functions used as test instances.

use crate::controllability::{self, LinearSystem, MinEnergy};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::DenseMatrix;
use crate::perf::{self, ConvergenceParams, KalmanSetup};

use super::{Orientation, SetFunction};

/// `f(S) = sum_{i in S} w_i`. Monotone only for nonnegative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Modular {
    weights: Vec<f64>,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Self {
        Self { weights }
    }
}

impl SetFunction for Modular {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        Ok(s.iter().map(|&i| self.weights[i]).sum())
    }
    fn orientation(&self) -> Orientation {
        Orientation::MaximizeSubmodular
    }
    fn monotone(&self) -> bool {
        self.weights.iter().all(|&w| w >= 0.0)
    }
    fn description(&self) -> String {
        format!("modular(n={})", self.weights.len())
    }
}

/// Weighted coverage: total weight of universe elements covered by the
/// chosen subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    sets: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl Coverage {
    pub fn new(universe: usize, sets: Vec<Vec<usize>>, weights: Option<Vec<f64>>) -> Result<Self> {
        if let Some(&e) = sets.iter().flatten().find(|&&e| e >= universe) {
            return Err(Error::UnknownNode(e));
        }
        let weights = weights.unwrap_or_else(|| vec![1.0; universe]);
        if weights.len() != universe || weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidParameter("need one nonnegative weight per universe element".into()));
        }
        Ok(Self { sets, weights })
    }
}

impl SetFunction for Coverage {
    fn ground_size(&self) -> usize {
        self.sets.len()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        let mut covered = vec![false; self.weights.len()];
        for &i in s {
            for &e in &self.sets[i] {
                covered[e] = true;
            }
        }
        Ok(covered.iter().zip(&self.weights).filter(|(c, _)| **c).map(|(_, w)| w).sum())
    }
    fn orientation(&self) -> Orientation {
        Orientation::MaximizeSubmodular
    }
    fn monotone(&self) -> bool {
        true
    }
    fn description(&self) -> String {
        format!("coverage(sets={}, universe={})", self.sets.len(), self.weights.len())
    }
}

/// Noise variance `R(S)`; infinite when some follower cannot reach an input.
#[derive(Debug, Clone)]
pub struct NoiseObjective {
    pub graph: Graph,
}

impl SetFunction for NoiseObjective {
    fn ground_size(&self) -> usize {
        self.graph.n()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        match perf::noise_variance(&self.graph, s) {
            Err(Error::SingularLaplacian) => Ok(f64::INFINITY),
            r => r,
        }
    }
    fn orientation(&self) -> Orientation {
        Orientation::MinimizeSupermodular
    }
    fn monotone(&self) -> bool {
        true
    }
    fn description(&self) -> String {
        "noise variance trace(L_ff^-1)".into()
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceObjective {
    pub graph: Graph,
    pub params: ConvergenceParams,
}

impl SetFunction for ConvergenceObjective {
    fn ground_size(&self) -> usize {
        self.graph.n()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        perf::convergence_bound(&self.graph, s, &self.params)
    }
    fn orientation(&self) -> Orientation {
        Orientation::MinimizeSupermodular
    }
    fn monotone(&self) -> bool {
        true
    }
    fn description(&self) -> String {
        format!("convergence bound (tau={}, delta={}, p={})", self.params.tau, self.params.delta, self.params.p)
    }
}

#[derive(Debug, Clone)]
pub struct KalmanObjective {
    pub setup: KalmanSetup,
}

impl SetFunction for KalmanObjective {
    fn ground_size(&self) -> usize {
        self.setup.n()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        perf::kalman_log_det(&self.setup, s)
    }
    fn orientation(&self) -> Orientation {
        Orientation::MinimizeSupermodular
    }
    fn monotone(&self) -> bool {
        true
    }
    fn description(&self) -> String {
        format!("kalman log det (horizon={})", self.setup.horizon)
    }
}

#[derive(Debug, Clone)]
pub struct CtrbRankObjective {
    pub system: LinearSystem,
}

impl CtrbRankObjective {
    pub fn new(system: LinearSystem) -> Self {
        Self { system }
    }
}

impl SetFunction for CtrbRankObjective {
    fn ground_size(&self) -> usize {
        self.system.n()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        controllability::ctrb_rank(&self.system, s).map(|r| r as f64)
    }
    fn orientation(&self) -> Orientation {
        Orientation::MaximizeSubmodular
    }
    fn monotone(&self) -> bool {
        true
    }
    fn description(&self) -> String {
        format!("controllability matrix rank ({:?})", self.system.variant)
    }
}

/// `trace(X W_S X^T)`, modular in `S` under diagonal actuation.
#[derive(Debug, Clone)]
pub struct GramianH2Objective {
    pub system: LinearSystem,
    pub output: Option<DenseMatrix>,
}

impl SetFunction for GramianH2Objective {
    fn ground_size(&self) -> usize {
        self.system.n()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        controllability::gramian_h2(&self.system, s, self.output.as_ref())
    }
    fn orientation(&self) -> Orientation {
        Orientation::MaximizeSubmodular
    }
    fn monotone(&self) -> bool {
        true
    }
    fn description(&self) -> String {
        "gramian trace".into()
    }
}

/// `trace(W_S^{-1})`; infinite for uncontrollable input sets.
#[derive(Debug, Clone)]
pub struct GramianEnergyObjective {
    pub system: LinearSystem,
}

impl SetFunction for GramianEnergyObjective {
    fn ground_size(&self) -> usize {
        self.system.n()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        match controllability::gramian_avg_energy(&self.system, s) {
            Err(Error::GramianSingular) => Ok(f64::INFINITY),
            r => r,
        }
    }
    fn orientation(&self) -> Orientation {
        Orientation::MinimizeSupermodular
    }
    fn monotone(&self) -> bool {
        true
    }
    fn description(&self) -> String {
        "gramian trace inverse".into()
    }
}

#[derive(Debug, Clone)]
pub struct MinEnergyObjective {
    pub model: MinEnergy,
}

impl SetFunction for MinEnergyObjective {
    fn ground_size(&self) -> usize {
        self.model.n()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        self.model.evaluate(s)
    }
    fn orientation(&self) -> Orientation {
        Orientation::MinimizeSupermodular
    }
    fn monotone(&self) -> bool {
        true
    }
    fn description(&self) -> String {
        "regularized minimum energy".into()
    }
}

#[derive(Debug, Clone)]
pub struct GciObjective {
    pub graph: Graph,
}

impl SetFunction for GciObjective {
    fn ground_size(&self) -> usize {
        self.graph.n()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        controllability::gci(&self.graph, s).map(|g| g as f64)
    }
    fn orientation(&self) -> Orientation {
        Orientation::MaximizeSubmodular
    }
    fn monotone(&self) -> bool {
        true
    }
    fn description(&self) -> String {
        "graph controllability index".into()
    }
}

/// `g(S) = f(empty) - f(S)` for a decreasing supermodular `f`: nonnegative,
/// nondecreasing and submodular.
pub struct Shifted<F> {
    inner: F,
    baseline: f64,
}

impl<F: SetFunction> Shifted<F> {
    pub fn new(inner: F) -> Result<Self> {
        if inner.orientation() != Orientation::MinimizeSupermodular {
            return Err(Error::InvalidParameter("only minimization objectives are shifted".into()));
        }
        let baseline = inner.evaluate(&[])?;
        if !baseline.is_finite() {
            return Err(Error::InvalidParameter(format!("{} is not finite at the empty set", inner.description())));
        }
        Ok(Self { inner, baseline })
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }
}

impl<F: SetFunction> SetFunction for Shifted<F> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        Ok(self.baseline - self.inner.evaluate(s)?)
    }
    fn orientation(&self) -> Orientation {
        Orientation::MaximizeSubmodular
    }
    fn monotone(&self) -> bool {
        self.inner.monotone()
    }
    fn description(&self) -> String {
        format!("{} - ({})", self.baseline, self.inner.description())
    }
}

/// Nonnegative combination `sum_i c_i f_i` of maximization objectives.
pub struct Combination {
    terms: Vec<(f64, Box<dyn SetFunction>)>,
}

impl Combination {
    pub fn new(terms: Vec<(f64, Box<dyn SetFunction>)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidParameter("empty combination".into()));
        };
        let n = first.ground_size();
        for (c, f) in &terms {
            if !(*c >= 0.0) || f.orientation() != Orientation::MaximizeSubmodular || f.ground_size() != n {
                return Err(Error::InvalidParameter(
                    "combination terms must be maximization objectives on one ground set with nonnegative weights"
                        .into(),
                ));
            }
        }
        Ok(Self { terms })
    }
}

impl SetFunction for Combination {
    fn ground_size(&self) -> usize {
        self.terms[0].1.ground_size()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        let mut total = 0.0;
        for (c, f) in &self.terms {
            total += c * f.evaluate(s)?;
        }
        Ok(total)
    }
    fn orientation(&self) -> Orientation {
        Orientation::MaximizeSubmodular
    }
    fn monotone(&self) -> bool {
        self.terms.iter().all(|(_, f)| f.monotone())
    }
    fn description(&self) -> String {
        let parts: Vec<String> = self.terms.iter().map(|(c, f)| format!("{c} * {}", f.description())).collect();
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named_graph, NamedGraph};

    #[test]
    fn noise_objective_is_infinite_without_inputs() {
        let f = NoiseObjective { graph: named_graph(NamedGraph::Path, 3).unwrap() };
        assert_eq!(f.evaluate(&[]).unwrap(), f64::INFINITY);
        assert_eq!(f.evaluate(&[2]).unwrap(), 3.0);
        assert!(Shifted::new(f).is_err());
    }

    #[test]
    fn shifted_and_combined() {
        let g = named_graph(NamedGraph::Path, 3).unwrap();
        let params = ConvergenceParams::with_steps(0, 0.1, 1.0).unwrap();
        let shifted = Shifted::new(ConvergenceObjective { graph: g.clone(), params }).unwrap();
        assert_eq!(shifted.baseline(), 6.0);
        assert_eq!(shifted.evaluate(&[0]).unwrap(), 2.0);
        let joint = Combination::new(vec![
            (1.0, Box::new(shifted) as Box<dyn SetFunction>),
            (10.0, Box::new(GciObjective { graph: g })),
        ])
        .unwrap();
        assert_eq!(joint.evaluate(&[0]).unwrap(), 2.0 + 10.0 * 3.0);
    }

    #[test]
    fn energy_objective_is_infinite_when_uncontrollable() {
        let sys = LinearSystem::new(-DenseMatrix::identity(2, 2), controllability::SystemVariant::Actuated).unwrap();
        let f = GramianEnergyObjective { system: sys };
        assert_eq!(f.evaluate(&[0]).unwrap(), f64::INFINITY);
        assert!((f.evaluate(&[0, 1]).unwrap() - 4.0).abs() < 1e-12);
    }
}
