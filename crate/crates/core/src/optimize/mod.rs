//! Set-function optimization: greedy maximization, greedy cover, and
//! matroid-constrained greedy, with the bound certificates each carries.

mod baseline;
mod brute;
pub mod objectives;
mod topology;

pub use baseline::{baseline_select, BaselineKind};
pub use brute::{brute_force_opt, BruteConstraint};
pub use topology::{expected_objective, multi_constraint_cover, worst_case_cover, Averaging, Expected};

use std::collections::BinaryHeap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::par::Exec;
use crate::set;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Larger is better; monotone means nondecreasing.
    MaximizeSubmodular,
    /// Smaller is better; monotone means nonincreasing.
    MinimizeSupermodular,
}

impl Orientation {
    /// Maps a value to a score where larger is always better. NaN scores
    /// lowest.
    pub fn score(self, value: f64) -> f64 {
        let s = match self {
            Orientation::MaximizeSubmodular => value,
            Orientation::MinimizeSupermodular => -value,
        };
        if s.is_nan() {
            f64::NEG_INFINITY
        } else {
            s
        }
    }
}

/// A deterministic set function over the ground set `0..ground_size()`.
/// `evaluate` receives sorted, duplicate-free sets and may return infinite
/// values (for example noise variance with no inputs).
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;
    fn evaluate(&self, s: &[usize]) -> Result<f64>;
    fn orientation(&self) -> Orientation;
    fn monotone(&self) -> bool;
    fn description(&self) -> String;
}

impl<F: SetFunction + ?Sized> SetFunction for &F {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        (**self).evaluate(s)
    }
    fn orientation(&self) -> Orientation {
        (**self).orientation()
    }
    fn monotone(&self) -> bool {
        (**self).monotone()
    }
    fn description(&self) -> String {
        (**self).description()
    }
}

impl<F: SetFunction + ?Sized> SetFunction for Box<F> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn evaluate(&self, s: &[usize]) -> Result<f64> {
        (**self).evaluate(s)
    }
    fn orientation(&self) -> Orientation {
        (**self).orientation()
    }
    fn monotone(&self) -> bool {
        (**self).monotone()
    }
    fn description(&self) -> String {
        (**self).description()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// `g(S) >= (1 - 1/e) g(S*)`.
    OneMinusInvE,
    /// `|S| <= value * |S*|`.
    LnCover,
    /// `g(S) >= g(S*) / 2`.
    HalfMatroid,
    /// Enumerated optimum.
    Exact,
    None,
}

/// Approximation guarantee attached to a selection. For minimization the
/// guarantee refers to the shifted function `g(S) = f(empty) - f(S)`, whose
/// baseline `f(empty)` is recorded (absent when infinite).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<f64>,
}

impl Certificate {
    pub fn none() -> Self {
        Self { kind: CertificateKind::None, value: None, baseline: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub element: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintStatus {
    pub index: usize,
    pub value: f64,
    pub target: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Sorted selected set.
    pub selected: Vec<usize>,
    /// Picks in order, with the objective value after each pick.
    pub trace: Vec<TraceStep>,
    /// Objective at the empty set (absent when not finite).
    pub initial_value: Option<f64>,
    pub value: Option<f64>,
    pub certificate: Certificate,
    pub evaluations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub constraints: Vec<ConstraintStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controllable: Option<bool>,
    pub wall_time_ms: f64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl SelectionResult {
    fn new(trace: Vec<TraceStep>, initial: f64, final_value: f64, evaluations: u64, started: Instant) -> Self {
        let mut selected: Vec<usize> = trace.iter().map(|t| t.element).collect();
        selected.sort_unstable();
        Self {
            selected,
            trace,
            initial_value: finite(initial),
            value: finite(final_value),
            certificate: Certificate::none(),
            evaluations,
            seed: None,
            constraints: Vec::new(),
            controllable: None,
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        }
    }

    /// The picks in selection order.
    pub fn order(&self) -> Vec<usize> {
        self.trace.iter().map(|t| t.element).collect()
    }
}

/// Relative score difference below which two candidates count as tied, so
/// that rounding noise in symmetric instances does not override the
/// lowest-id rule.
pub const TIE_RTOL: f64 = 1e-12;

/// `score` ties the maximum `best`.
pub(crate) fn ties_best(score: f64, best: f64) -> bool {
    if score == best {
        return true;
    }
    if !score.is_finite() || !best.is_finite() {
        return false;
    }
    best - score <= TIE_RTOL * best.abs().max(score.abs())
}

/// Position of the first score that ties the maximum.
pub(crate) fn first_best(scores: &[f64]) -> Option<usize> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    scores.iter().position(|&s| ties_best(s, max))
}

/// Scans `candidates` and returns `(candidate, value)` of the best score,
/// ties to the earliest candidate.
fn best_candidate(
    f: &dyn SetFunction,
    current: &[usize],
    candidates: &[usize],
    exec: Exec,
) -> Result<Option<(usize, f64)>> {
    let values = exec.map(candidates, |&v| f.evaluate(&set::with(current, v)));
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let orient = f.orientation();
    let scores: Vec<f64> = values.iter().map(|&v| orient.score(v)).collect();
    Ok(first_best(&scores).map(|i| (candidates[i], values[i])))
}

fn check_ground(f: &dyn SetFunction, k: usize) -> Result<usize> {
    let n = f.ground_size();
    if k > n {
        return Err(Error::InvalidParameter(format!("k={k} exceeds ground set size {n}")));
    }
    Ok(n)
}

fn greedy_certificate(f: &dyn SetFunction, initial: f64, kind: CertificateKind, value: f64) -> Certificate {
    if !f.monotone() {
        return Certificate::none();
    }
    let baseline = match f.orientation() {
        Orientation::MaximizeSubmodular => None,
        Orientation::MinimizeSupermodular => finite(initial),
    };
    Certificate { kind, value: Some(value), baseline }
}

/// Evaluates the prefixes of a fixed pick order, e.g. a baseline ranking.
/// No guarantee is attached.
pub fn fixed_order(f: &dyn SetFunction, order: &[usize]) -> Result<SelectionResult> {
    let started = Instant::now();
    let n = f.ground_size();
    let mut current = Vec::with_capacity(order.len());
    let mut trace = Vec::with_capacity(order.len());
    for &v in order {
        if v >= n {
            return Err(Error::UnknownNode(v));
        }
        if current.contains(&v) {
            return Err(Error::InvalidParameter(format!("node {v} repeated in order")));
        }
        current.push(v);
        trace.push(TraceStep { element: v, value: f.evaluate(&current)? });
    }
    let initial = f.evaluate(&[])?;
    let last = trace.last().map_or(initial, |t| t.value);
    Ok(SelectionResult::new(trace, initial, last, order.len() as u64 + 1, started))
}

/// Picks `k` elements, each maximizing the objective given the previous
/// picks (lowest id on ties). At most `n (k + 1)` evaluations.
pub fn greedy_max(f: &dyn SetFunction, k: usize, exec: Exec) -> Result<SelectionResult> {
    let started = Instant::now();
    let n = check_ground(f, k)?;
    let initial = f.evaluate(&[])?;
    let mut evaluations = 1;
    let mut current = Vec::new();
    let mut trace = Vec::new();
    let mut value = initial;
    for _ in 0..k {
        let candidates = set::complement(n, &current);
        evaluations += candidates.len() as u64;
        let (v, val) = best_candidate(f, &current, &candidates, exec)?.expect("k <= n leaves a candidate");
        current = set::with(&current, v);
        value = val;
        trace.push(TraceStep { element: v, value: val });
    }
    let mut r = SelectionResult::new(trace, initial, value, evaluations, started);
    r.certificate = greedy_certificate(f, initial, CertificateKind::OneMinusInvE, 1.0 - (-1.0f64).exp());
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bound {
    gain: f64,
    id: usize,
}

impl Eq for Bound {}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.gain.total_cmp(&other.gain).then(other.id.cmp(&self.id))
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lazy variant of [`greedy_max`]: stale marginal gains serve as upper
/// bounds (valid under submodularity), so most candidates are not
/// re-evaluated. Selects the same set as the plain scan for submodular `f`.
pub fn lazy_greedy_max(f: &dyn SetFunction, k: usize) -> Result<SelectionResult> {
    let started = Instant::now();
    let n = check_ground(f, k)?;
    let orient = f.orientation();
    let initial = f.evaluate(&[])?;
    let mut evaluations = 1;
    let mut current = Vec::new();
    let mut trace = Vec::new();
    let mut value = initial;
    let mut score = orient.score(initial);
    let mut heap: BinaryHeap<Bound> = (0..n).map(|id| Bound { gain: f64::INFINITY, id }).collect();
    let mut fresh = vec![usize::MAX; n];
    let mut last = vec![f64::NAN; n];
    while trace.len() < k {
        let top = heap.pop().expect("k <= n leaves a candidate");
        if fresh[top.id] == trace.len() {
            // Settle near-ties as the plain scan does: refresh every entry
            // whose bound is within rounding of the top, then take the
            // lowest id among the tied scores.
            let top_score = orient.score(last[top.id]);
            let slack = 2.0 * TIE_RTOL * top_score.abs();
            let mut group = vec![top];
            while let Some(&next) = heap.peek() {
                if !(next.gain >= top.gain - slack) || !top.gain.is_finite() && next.gain != top.gain {
                    break;
                }
                heap.pop();
                if fresh[next.id] != trace.len() {
                    let val = f.evaluate(&set::with(&current, next.id))?;
                    evaluations += 1;
                    let gain = if score.is_finite() { orient.score(val) - score } else { orient.score(val) };
                    fresh[next.id] = trace.len();
                    last[next.id] = val;
                    heap.push(Bound { gain, id: next.id });
                    continue;
                }
                group.push(next);
            }
            group.sort_by_key(|b| b.id);
            let scores: Vec<f64> = group.iter().map(|b| orient.score(last[b.id])).collect();
            let pick = first_best(&scores).expect("nonempty group");
            for (i, b) in group.iter().enumerate() {
                if i != pick {
                    heap.push(*b);
                }
            }
            let v = group[pick].id;
            current = set::with(&current, v);
            value = last[v];
            if !score.is_finite() {
                // Stale entries were raw scores, not gains: reset them.
                heap = set::complement(n, &current).into_iter().map(|id| Bound { gain: f64::INFINITY, id }).collect();
            }
            score = orient.score(value);
            trace.push(TraceStep { element: v, value });
            continue;
        }
        let val = f.evaluate(&set::with(&current, top.id))?;
        evaluations += 1;
        let gain = if score.is_finite() { orient.score(val) - score } else { orient.score(val) };
        fresh[top.id] = trace.len();
        last[top.id] = val;
        heap.push(Bound { gain, id: top.id });
    }
    let mut r = SelectionResult::new(trace, initial, value, evaluations, started);
    r.certificate = greedy_certificate(f, initial, CertificateKind::OneMinusInvE, 1.0 - (-1.0f64).exp());
    Ok(r)
}

fn meets(orient: Orientation, value: f64, alpha: f64) -> bool {
    match orient {
        Orientation::MaximizeSubmodular => value >= alpha,
        Orientation::MinimizeSupermodular => value <= alpha,
    }
}

/// `1 + ln((g(V) - g(empty)) / (g(S') - g(S'')))` on scores, with `S''` the
/// penultimate greedy set. When `g(empty)` is not finite the bound is
/// anchored at the first pick: `2 + ln((g(V) - g(S_1)) / (g(S') - g(S'')))`.
fn ln_cover_value(scores: &[f64], full: f64) -> Option<f64> {
    let m = scores.len() - 1;
    if m <= 1 {
        return Some(1.0);
    }
    let last = scores[m] - scores[m - 1];
    let (offset, anchor) = if scores[0].is_finite() { (1.0, scores[0]) } else { (2.0, scores[1]) };
    let v = offset + ((full - anchor) / last).ln();
    (v.is_finite() && last > 0.0).then_some(v.max(1.0))
}

/// Smallest greedy prefix whose value meets `alpha` (`>=` for maximization,
/// `<=` for minimization).
pub fn greedy_cover(f: &dyn SetFunction, alpha: f64, exec: Exec) -> Result<SelectionResult> {
    let started = Instant::now();
    let n = f.ground_size();
    let orient = f.orientation();
    let all: Vec<usize> = (0..n).collect();
    let full = f.evaluate(&all)?;
    if !meets(orient, full, alpha) {
        return Err(Error::InfeasibleTarget { target: alpha, best: full });
    }
    let initial = f.evaluate(&[])?;
    let mut evaluations = 2;
    let mut current = Vec::new();
    let mut trace = Vec::new();
    let mut value = initial;
    let mut scores = vec![orient.score(initial)];
    while !meets(orient, value, alpha) {
        let candidates = set::complement(n, &current);
        evaluations += candidates.len() as u64;
        let Some((v, val)) = best_candidate(f, &current, &candidates, exec)? else {
            return Err(Error::InfeasibleTarget { target: alpha, best: value });
        };
        current = set::with(&current, v);
        value = val;
        scores.push(orient.score(val));
        trace.push(TraceStep { element: v, value: val });
    }
    let mut r = SelectionResult::new(trace, initial, value, evaluations, started);
    if f.monotone() {
        r.certificate = Certificate {
            kind: CertificateKind::LnCover,
            value: ln_cover_value(&scores, orient.score(full)),
            baseline: None,
        };
    }
    Ok(r)
}

/// Greedy over independence-preserving augmentations until none remain.
pub fn matroid_greedy(f: &dyn SetFunction, m: &dyn Matroid, exec: Exec) -> Result<SelectionResult> {
    let started = Instant::now();
    let n = f.ground_size();
    if m.ground_size() != n {
        return Err(Error::DimensionMismatch("matroid and objective ground sets differ".into()));
    }
    let initial = f.evaluate(&[])?;
    let mut evaluations = 1;
    let mut current = Vec::new();
    let mut trace = Vec::new();
    let mut value = initial;
    loop {
        let candidates: Vec<usize> = set::complement(n, &current)
            .into_iter()
            .filter(|&v| m.is_independent(&set::with(&current, v)))
            .collect();
        if candidates.is_empty() {
            break;
        }
        evaluations += candidates.len() as u64;
        let (v, val) = best_candidate(f, &current, &candidates, exec)?.expect("nonempty candidates");
        current = set::with(&current, v);
        value = val;
        trace.push(TraceStep { element: v, value: val });
    }
    let mut r = SelectionResult::new(trace, initial, value, evaluations, started);
    r.certificate = greedy_certificate(f, initial, CertificateKind::HalfMatroid, 0.5);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::objectives::{Coverage, Modular};
    use super::*;
    use crate::controllability::{LinearSystem, SystemVariant};
    use crate::graph::directed_ring;
    use crate::matroid::uniform_matroid;
    use objectives::CtrbRankObjective;

    // Four subsets over eight elements.
    fn cover_instance() -> Coverage {
        Coverage::new(8, vec![vec![0, 1, 2, 3], vec![3, 4, 5], vec![5, 6, 7], vec![0, 4, 7]], None).unwrap()
    }

    #[test]
    fn modular_top_two() {
        let f = Modular::new(vec![0.5, 3.0, 1.0, 2.5]);
        let r = greedy_max(&f, 2, Exec::Sequential).unwrap();
        assert_eq!(r.selected, vec![1, 3]);
        assert_eq!(r.order(), vec![1, 3]);
        assert_eq!(r.value, Some(5.5));
        assert_eq!(r.certificate.kind, CertificateKind::OneMinusInvE);
    }

    #[test]
    fn k_zero_records_initial() {
        let f = Modular::new(vec![1.0, 2.0]);
        let r = greedy_max(&f, 0, Exec::Sequential).unwrap();
        assert!(r.selected.is_empty() && r.trace.is_empty());
        assert_eq!(r.initial_value, Some(0.0));
        assert!(greedy_max(&f, 3, Exec::Sequential).is_err());
    }

    #[test]
    fn cover_instance_bound() {
        let f = cover_instance();
        let r = greedy_max(&f, 2, Exec::Sequential).unwrap();
        let opt = set::combinations(4, 2).iter().map(|s| f.evaluate(s).unwrap()).fold(0.0, f64::max);
        assert!(r.value.unwrap() >= (1.0 - (-1.0f64).exp()) * opt);
    }

    #[test]
    fn ties_break_to_lowest_id() {
        let f = Modular::new(vec![1.0, 2.0, 2.0, 2.0]);
        assert_eq!(greedy_max(&f, 1, Exec::Parallel).unwrap().selected, vec![1]);
        assert_eq!(lazy_greedy_max(&f, 2).unwrap().order(), vec![1, 2]);
    }

    #[test]
    fn evaluation_budget() {
        let f = cover_instance();
        for k in 0..=4 {
            let r = greedy_max(&f, k, Exec::Sequential).unwrap();
            assert!(r.evaluations <= (4 * (k + 1)) as u64);
        }
    }

    #[test]
    fn lazy_matches_plain_on_random_coverage() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let n = rng.random_range(3..12);
            let sets = (0..n).map(|_| (0..15).filter(|_| rng.random_bool(0.25)).collect()).collect();
            let weights = (0..15).map(|_| rng.random_range(1..5) as f64).collect();
            let f = Coverage::new(15, sets, Some(weights)).unwrap();
            for k in 0..=n {
                let a = greedy_max(&f, k, Exec::Parallel).unwrap();
                let b = lazy_greedy_max(&f, k).unwrap();
                assert_eq!(a.order(), b.order());
                assert_eq!(a.value, b.value);
                assert!(b.evaluations <= a.evaluations);
            }
        }
    }

    #[test]
    fn cover_empty_when_target_met() {
        let f = Modular::new(vec![1.0, 2.0]);
        let r = greedy_cover(&f, 0.0, Exec::Sequential).unwrap();
        assert!(r.selected.is_empty());
        assert_eq!(greedy_cover(&f, 4.0, Exec::Sequential).unwrap_err(), Error::InfeasibleTarget {
            target: 4.0,
            best: 3.0
        });
    }

    #[test]
    fn ring_rank_cover_needs_one_input() {
        let g = directed_ring(6).unwrap();
        let sys = LinearSystem::new(g.weight_matrix(), SystemVariant::Actuated).unwrap();
        let f = CtrbRankObjective::new(sys);
        let r = greedy_cover(&f, 6.0, Exec::Parallel).unwrap();
        assert_eq!(r.selected, vec![0]);
        assert_eq!(r.certificate.value, Some(1.0));
    }

    #[test]
    fn ln_cover_certificate_formula() {
        // Scores 0 -> 4 -> 6 -> 7 with g(V) = 7: 1 + ln(7 / 1).
        let v = ln_cover_value(&[0.0, 4.0, 6.0, 7.0], 7.0).unwrap();
        assert!((v - (1.0 + 7f64.ln())).abs() < 1e-12);
        let anchored = ln_cover_value(&[f64::NEG_INFINITY, -4.0, -2.0, -1.5], -1.0).unwrap();
        assert!((anchored - (2.0 + (3.0f64 / 0.5).ln())).abs() < 1e-12);
    }

    #[test]
    fn matroid_greedy_uniform_equals_greedy() {
        let f = cover_instance();
        for k in 0..=4 {
            let a = greedy_max(&f, k, Exec::Sequential).unwrap();
            let b = matroid_greedy(&f, &uniform_matroid(4, k), Exec::Sequential).unwrap();
            assert_eq!(a.order(), b.order());
            assert_eq!(b.certificate.kind, CertificateKind::HalfMatroid);
        }
    }
}
