//! Objectives over several topologies or constraints: expected value,
//! worst-case cover via truncation, and multi-constraint cover.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par::Exec;

use super::{greedy_cover, ConstraintStatus, Orientation, SelectionResult, SetFunction};

/// How per-topology values are averaged.
#[derive(Debug, Clone, PartialEq)]
pub enum Averaging {
    Uniform,
    /// Probability of each topology.
    Weighted(Vec<f64>),
    /// Empirical frequencies of `draws` topologies sampled from `weights`
    /// with a fixed seed, so evaluation stays deterministic.
    Sampled { weights: Vec<f64>, draws: usize, seed: u64 },
}

/// `sum_i w_i f_i(S)` over a family sharing one ground set and orientation.
pub struct Expected {
    terms: Vec<Box<dyn SetFunction>>,
    weights: Vec<f64>,
}

fn check_weights(weights: &[f64], count: usize) -> Result<()> {
    if weights.len() != count || weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidParameter("need one nonnegative weight per topology".into()));
    }
    if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("weights must sum to 1".into()));
    }
    Ok(())
}

fn check_family(terms: &[Box<dyn SetFunction>]) -> Result<(usize, Orientation)> {
    let Some(first) = terms.first() else {
        return Err(Error::InvalidParameter("empty objective family".into()));
    };
    let (n, orient) = (first.ground_size(), first.orientation());
    if terms.iter().any(|f| f.ground_size() != n || f.orientation() != orient) {
        return Err(Error::InvalidParameter("objectives differ in ground set or orientation".into()));
    }
    Ok((n, orient))
}

pub fn expected_objective(terms: Vec<Box<dyn SetFunction>>, averaging: Averaging) -> Result<Expected> {
    check_family(&terms)?;
    let m = terms.len();
    let weights = match averaging {
        Averaging::Uniform => vec![1.0 / m as f64; m],
        Averaging::Weighted(w) => {
            check_weights(&w, m)?;
            w
        }
        Averaging::Sampled { weights, draws, seed } => {
            check_weights(&weights, m)?;
            if draws == 0 {
                return Err(Error::InvalidParameter("need at least one draw".into()));
            }
            let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut counts = vec![0usize; m];
            for _ in 0..draws {
                counts[dist.sample(&mut rng)] += 1;
            }
            counts.iter().map(|&c| c as f64 / draws as f64).collect()
        }
    };
    Ok(Expected { terms, weights })
}

impl Expected {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SetFunction for Expected {
    fn ground_size(&self) -> usize {
        self.terms[0].ground_size()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        let mut total = 0.0;
        for (f, &w) in self.terms.iter().zip(&self.weights) {
            if w > 0.0 {
                total += w * f.evaluate(s)?;
            }
        }
        Ok(total)
    }
    fn orientation(&self) -> Orientation {
        self.terms[0].orientation()
    }
    fn monotone(&self) -> bool {
        self.terms.iter().all(|f| f.monotone())
    }
    fn description(&self) -> String {
        format!("expectation over {} topologies", self.terms.len())
    }
}

/// `(1/M) sum_i max(f_i(S) - alpha, 0)`: zero exactly when every `f_i` meets
/// the target, and supermodular decreasing whenever each `f_i` is.
struct Truncated<'a> {
    terms: &'a [Box<dyn SetFunction>],
    alpha: f64,
}

impl SetFunction for Truncated<'_> {
    fn ground_size(&self) -> usize {
        self.terms[0].ground_size()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        let mut total = 0.0;
        for f in self.terms {
            total += (f.evaluate(s)? - self.alpha).max(0.0);
        }
        Ok(total / self.terms.len() as f64)
    }
    fn orientation(&self) -> Orientation {
        Orientation::MinimizeSupermodular
    }
    fn monotone(&self) -> bool {
        self.terms.iter().all(|f| f.monotone())
    }
    fn description(&self) -> String {
        format!("worst-case truncation at {}", self.alpha)
    }
}

fn statuses(values: Vec<(f64, f64, bool)>) -> Vec<ConstraintStatus> {
    values
        .into_iter()
        .enumerate()
        .map(|(index, (value, target, satisfied))| ConstraintStatus { index, value, target, satisfied })
        .collect()
}

/// Smallest greedy set with `f_i(S) <= alpha` for every topology `i`, by
/// greedy cover on the truncated average. Trace values are those of the
/// truncated function; per-topology values are reported as constraints.
pub fn worst_case_cover(terms: &[Box<dyn SetFunction>], alpha: f64, exec: Exec) -> Result<SelectionResult> {
    let (n, orient) = check_family(terms)?;
    if orient != Orientation::MinimizeSupermodular {
        return Err(Error::InvalidParameter("worst-case cover expects decreasing cost functions".into()));
    }
    let all: Vec<usize> = (0..n).collect();
    for f in terms {
        let best = f.evaluate(&all)?;
        if best > alpha {
            return Err(Error::InfeasibleTarget { target: alpha, best });
        }
    }
    let mut r = greedy_cover(&Truncated { terms, alpha }, 0.0, exec)?;
    let mut values = Vec::with_capacity(terms.len());
    for f in terms {
        let v = f.evaluate(&r.selected)?;
        values.push((v, alpha, v <= alpha));
    }
    r.constraints = statuses(values);
    Ok(r)
}

/// `sum_i min(f_i(S) - alpha_i, 0)`: zero exactly when every constraint
/// `f_i(S) >= alpha_i` holds.
struct Saturated<'a> {
    constraints: &'a [(Box<dyn SetFunction>, f64)],
}

impl SetFunction for Saturated<'_> {
    fn ground_size(&self) -> usize {
        self.constraints[0].0.ground_size()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        let mut total = 0.0;
        for (f, alpha) in self.constraints {
            total += (f.evaluate(s)? - alpha).min(0.0);
        }
        Ok(total)
    }
    fn orientation(&self) -> Orientation {
        Orientation::MaximizeSubmodular
    }
    fn monotone(&self) -> bool {
        self.constraints.iter().all(|(f, _)| f.monotone())
    }
    fn description(&self) -> String {
        format!("saturated sum of {} constraints", self.constraints.len())
    }
}

/// Smallest greedy set meeting every constraint `f_i(S) >= alpha_i`, for
/// nondecreasing submodular `f_i`. Decreasing costs must be negated or
/// shifted by the caller.
pub fn multi_constraint_cover(constraints: &[(Box<dyn SetFunction>, f64)], exec: Exec) -> Result<SelectionResult> {
    let Some((first, _)) = constraints.first() else {
        return Err(Error::InvalidParameter("no constraints".into()));
    };
    let n = first.ground_size();
    let all: Vec<usize> = (0..n).collect();
    for (index, (f, alpha)) in constraints.iter().enumerate() {
        if f.ground_size() != n || f.orientation() != Orientation::MaximizeSubmodular {
            return Err(Error::InvalidParameter(format!(
                "constraint {index} must be a maximization objective on {n} elements"
            )));
        }
        let best = f.evaluate(&all)?;
        if best < *alpha {
            return Err(Error::InfeasibleConstraint { index, target: *alpha, best });
        }
    }
    let mut r = greedy_cover(&Saturated { constraints }, 0.0, exec)?;
    let mut values = Vec::with_capacity(constraints.len());
    for (f, alpha) in constraints {
        let v = f.evaluate(&r.selected)?;
        values.push((v, *alpha, v >= *alpha));
    }
    r.constraints = statuses(values);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::super::objectives::{Modular, NoiseObjective};
    use super::*;
    use crate::graph::{geometric_graph, named_graph, NamedGraph};
    use crate::set;

    fn noise(g: crate::graph::Graph) -> Box<dyn SetFunction> {
        Box::new(NoiseObjective { graph: g })
    }

    #[test]
    fn single_topology_is_identity() {
        let g = named_graph(NamedGraph::Ring, 5).unwrap();
        let e = expected_objective(vec![noise(g.clone())], Averaging::Uniform).unwrap();
        let f = NoiseObjective { graph: g };
        for mask in 1u32..32 {
            let s = set::from_mask(mask);
            assert_eq!(e.evaluate(&s).unwrap(), f.evaluate(&s).unwrap());
        }
    }

    #[test]
    fn two_topologies_average_pointwise() {
        let a = named_graph(NamedGraph::Ring, 5).unwrap();
        let b = named_graph(NamedGraph::Path, 5).unwrap();
        let e = expected_objective(vec![noise(a.clone()), noise(b.clone())], Averaging::Uniform).unwrap();
        for mask in 1u32..32 {
            let s = set::from_mask(mask);
            let fa = NoiseObjective { graph: a.clone() }.evaluate(&s).unwrap();
            let fb = NoiseObjective { graph: b.clone() }.evaluate(&s).unwrap();
            assert!((e.evaluate(&s).unwrap() - 0.5 * (fa + fb)).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_weights_are_frequencies() {
        let fs = vec![
            Box::new(Modular::new(vec![1.0, 0.0])) as Box<dyn SetFunction>,
            Box::new(Modular::new(vec![0.0, 1.0])),
        ];
        let e = expected_objective(fs, Averaging::Sampled { weights: vec![0.25, 0.75], draws: 4000, seed: 2 })
            .unwrap();
        assert!((e.weights()[0] - 0.25).abs() < 0.03);
        assert_eq!(e.weights().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn rejects_mixed_orientation() {
        let g = named_graph(NamedGraph::Ring, 2).unwrap();
        let fs = vec![noise(g), Box::new(Modular::new(vec![1.0, 1.0])) as Box<dyn SetFunction>];
        assert!(expected_objective(fs, Averaging::Uniform).is_err());
    }

    #[test]
    fn worst_case_single_topology_matches_plain_cover() {
        let g = geometric_graph(8, 100.0, 60.0, 4).unwrap();
        if !g.is_weakly_connected() {
            return;
        }
        let f = NoiseObjective { graph: g.clone() };
        let alpha = 2.0;
        let plain = greedy_cover(&f, alpha, Exec::Sequential).unwrap();
        let wc = worst_case_cover(&[noise(g)], alpha, Exec::Sequential).unwrap();
        assert_eq!(plain.selected.len(), wc.selected.len());
        assert!(wc.constraints.iter().all(|c| c.satisfied));
    }

    #[test]
    fn worst_case_meets_every_topology() {
        let a = named_graph(NamedGraph::Ring, 8).unwrap();
        let b = named_graph(NamedGraph::Path, 8).unwrap();
        let terms = vec![noise(a.clone()), noise(b.clone())];
        let r = worst_case_cover(&terms, 3.0, Exec::Parallel).unwrap();
        for g in [a, b] {
            assert!(NoiseObjective { graph: g }.evaluate(&r.selected).unwrap() <= 3.0);
        }
        assert!(matches!(worst_case_cover(&terms, -1.0, Exec::Parallel), Err(Error::InfeasibleTarget { .. })));
    }

    #[test]
    fn multi_constraint_cover_satisfies_all() {
        let cs = vec![
            (Box::new(Modular::new(vec![1.0, 0.0, 2.0, 0.0])) as Box<dyn SetFunction>, 2.0),
            (Box::new(Modular::new(vec![0.0, 1.0, 0.0, 3.0])) as Box<dyn SetFunction>, 3.0),
        ];
        let r = multi_constraint_cover(&cs, Exec::Sequential).unwrap();
        assert_eq!(r.selected, vec![2, 3]);
        assert!(r.constraints.iter().all(|c| c.satisfied));
        let bad = vec![(Box::new(Modular::new(vec![1.0])) as Box<dyn SetFunction>, 5.0)];
        assert_eq!(multi_constraint_cover(&bad, Exec::Sequential).unwrap_err(), Error::InfeasibleConstraint {
            index: 0,
            target: 5.0,
            best: 1.0
        });
    }
}
