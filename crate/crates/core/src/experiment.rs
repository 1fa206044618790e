//! Batch harness for the three numerical studies: required inputs versus a
//! noise target, convergence bound versus input count, and structural
//! controllability success rate versus input count.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::controllability::structural_report;
use crate::error::{Error, Result};
use crate::graph::{erdos_renyi, first_connected, geometric_graph, Graph};
use crate::matroid::controllability_matroid;
use crate::optimize::objectives::{Combination, ConvergenceObjective, GciObjective, NoiseObjective, Shifted};
use crate::optimize::{baseline_select, greedy_cover, greedy_max, matroid_greedy, BaselineKind, SetFunction};
use crate::par::Exec;
use crate::perf::{self, ConvergenceParams};

/// Attempts allowed when rejection-sampling a connected graph.
pub const CONNECTED_ATTEMPTS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    Greedy,
    MatroidGreedy,
    MaxDegree,
    AvgDegree,
    Random,
}

impl Selector {
    pub fn name(self) -> &'static str {
        match self {
            Selector::Greedy => "greedy",
            Selector::MatroidGreedy => "matroid-greedy",
            Selector::MaxDegree => "max-degree",
            Selector::AvgDegree => "avg-degree",
            Selector::Random => "random",
        }
    }

    fn baseline(self, seed: u64) -> Option<BaselineKind> {
        match self {
            Selector::MaxDegree => Some(BaselineKind::MaxDegree),
            Selector::AvgDegree => Some(BaselineKind::AvgDegree),
            // Decorrelated from the graph seed.
            Selector::Random => Some(BaselineKind::Random { seed: seed ^ 0x5EED_0F_BA5E_u64 }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Study {
    /// Inputs needed for `R(S) <= target` on connected geometric graphs.
    /// Each trial uses a geometric grid of `targets` values from
    /// `min_v R({v}) / 2` down to `1.1 R(greedy of size n / 3)`.
    Robustness { n: usize, width: f64, radius: f64, targets: usize },
    /// Convergence bound at walk length `t / delta` with
    /// `delta = 0.1 / max_i L_ii`, for `k = 1..=k_max` inputs.
    Convergence { n: usize, width: f64, radius: f64, p: f64, t: f64, k_max: usize },
    /// Structural controllability of the selection on undirected
    /// Erdos-Renyi graphs. Greedy maximizes `(f(empty) - f(S)) + lambda GCI(S)`
    /// with `f` the convergence bound and `lambda = lambda_factor f(empty)`.
    Controllability { n: usize, q: f64, p: f64, t: f64, k_max: usize, lambda_factor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub study: Study,
    pub selectors: Vec<Selector>,
    pub trials: usize,
    /// Trial `i` uses `seeds[i]` when given, else `seed + i`.
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
}

const DEFAULT_SELECTORS: [Selector; 4] = [Selector::Greedy, Selector::MaxDegree, Selector::AvgDegree, Selector::Random];

impl ExperimentConfig {
    pub fn robustness() -> Self {
        Self::preset(Study::Robustness { n: 100, width: 1000.0, radius: 300.0, targets: 8 }, 50)
    }

    pub fn convergence() -> Self {
        Self::preset(Study::Convergence { n: 100, width: 1400.0, radius: 250.0, p: 2.0, t: 2.0, k_max: 10 }, 50)
    }

    pub fn controllability() -> Self {
        Self::preset(
            Study::Controllability { n: 70, q: 0.07, p: 2.0, t: 2.0, k_max: 6, lambda_factor: 10.0 },
            50,
        )
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "robustness" => Ok(Self::robustness()),
            "convergence" => Ok(Self::convergence()),
            "controllability" => Ok(Self::controllability()),
            _ => Err(Error::InvalidParameter(format!(
                "unknown preset {name:?} (expected robustness, convergence or controllability)"
            ))),
        }
    }

    fn preset(study: Study, trials: usize) -> Self {
        Self { study, selectors: DEFAULT_SELECTORS.to_vec(), trials, seed: 1, seeds: Vec::new() }
    }

    /// Changes the node count. Geometric studies keep the node density by
    /// scaling the width with `sqrt(n / n_old)`.
    pub fn with_n(mut self, new_n: usize) -> Self {
        match &mut self.study {
            Study::Robustness { n, width, .. } | Study::Convergence { n, width, .. } => {
                *width *= (new_n as f64 / *n as f64).sqrt();
                *n = new_n;
            }
            Study::Controllability { n, .. } => *n = new_n,
        }
        self
    }

    pub fn n(&self) -> usize {
        match self.study {
            Study::Robustness { n, .. } | Study::Convergence { n, .. } | Study::Controllability { n, .. } => n,
        }
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seeds.get(trial).copied().unwrap_or_else(|| self.seed.wrapping_add(trial as u64))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.trials == 0 {
            return bad("trials must be positive");
        }
        if !self.seeds.is_empty() && self.seeds.len() < self.trials {
            return bad("seed list is shorter than the trial count");
        }
        if self.selectors.is_empty() {
            return bad("no selectors");
        }
        let n = self.n();
        if n < 2 {
            return bad("n must be at least 2");
        }
        match self.study {
            Study::Robustness { width, radius, targets, .. } => {
                if !(width > 0.0 && radius > 0.0) || targets == 0 {
                    return bad("robustness needs positive width, radius and target count");
                }
            }
            Study::Convergence { width, radius, p, t, k_max, .. } => {
                if !(width > 0.0 && radius > 0.0) || !(p >= 1.0) || !(t >= 0.0) || k_max == 0 || k_max > n {
                    return bad("convergence needs positive width and radius, p >= 1, t >= 0 and 1 <= k_max <= n");
                }
            }
            Study::Controllability { q, p, t, k_max, lambda_factor, .. } => {
                if !(0.0..=1.0).contains(&q) || !(p >= 1.0) || !(t >= 0.0) || k_max == 0 || k_max > n {
                    return bad("controllability needs q in [0, 1], p >= 1, t >= 0 and 1 <= k_max <= n");
                }
                if !(lambda_factor > 0.0) {
                    return bad("lambda_factor must be positive");
                }
            }
        }
        Ok(())
    }
}

/// One (trial, selector, k or target) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub selector: Selector,
    /// Input count; for the robustness study, the inputs required.
    pub k: usize,
    pub target_index: Option<usize>,
    pub target: Option<f64>,
    pub value: Option<f64>,
    pub controllable: Option<bool>,
    pub inputs: Vec<usize>,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub selector: Selector,
    /// Set for the convergence and controllability studies.
    pub k: Option<usize>,
    /// Set for the robustness study.
    pub target_index: Option<usize>,
    pub mean_target: Option<f64>,
    /// Cells without an error.
    pub trials: usize,
    pub failed: usize,
    pub mean_value: Option<f64>,
    pub mean_inputs: f64,
    pub success_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<TrialRow>,
    pub aggregate: Vec<AggregateRow>,
}

fn csv_opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(T::to_string).unwrap_or_default()
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn header_block(header: &[String]) -> String {
    header.iter().map(|h| format!("# {h}\n")).collect()
}

impl ExperimentReport {
    /// Per-cell CSV; `header` lines are emitted first as `# ` comments.
    pub fn rows_csv(&self, header: &[String]) -> String {
        let mut out = header_block(header);
        out.push_str("trial,seed,selector,k,target_index,target,value,controllable,inputs,wall_time_ms,error\n");
        for r in &self.rows {
            let inputs: Vec<String> = r.inputs.iter().map(usize::to_string).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{:.3},{}",
                r.trial,
                r.seed,
                r.selector.name(),
                r.k,
                csv_opt(&r.target_index),
                csv_opt(&r.target),
                csv_opt(&r.value),
                csv_opt(&r.controllable),
                inputs.join(" "),
                r.wall_time_ms,
                csv_text(r.error.as_deref().unwrap_or("")),
            );
        }
        out
    }

    pub fn aggregate_csv(&self, header: &[String]) -> String {
        let mut out = header_block(header);
        out.push_str("selector,k,target_index,mean_target,trials,failed,mean_value,mean_inputs,success_rate\n");
        for a in &self.aggregate {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                a.selector.name(),
                csv_opt(&a.k),
                csv_opt(&a.target_index),
                csv_opt(&a.mean_target),
                a.trials,
                a.failed,
                csv_opt(&a.mean_value),
                a.mean_inputs,
                csv_opt(&a.success_rate),
            );
        }
        out
    }

    /// The aggregate row for `selector` at input count `k`.
    pub fn at_k(&self, selector: Selector, k: usize) -> Option<&AggregateRow> {
        self.aggregate.iter().find(|a| a.selector == selector && a.k == Some(k))
    }

    /// The aggregate row for `selector` at robustness target `index`.
    pub fn at_target(&self, selector: Selector, index: usize) -> Option<&AggregateRow> {
        self.aggregate.iter().find(|a| a.selector == selector && a.target_index == Some(index))
    }
}

/// Runs every trial (in parallel under `Exec::Parallel`) and aggregates in
/// trial order, so the report does not depend on `exec`.
pub fn run_experiment(config: &ExperimentConfig, exec: Exec) -> Result<ExperimentReport> {
    config.validate()?;
    let per_trial = exec.map_range(config.trials, |trial| run_trial(config, trial));
    let rows: Vec<TrialRow> = per_trial.into_iter().flatten().collect();
    let aggregate = aggregate(config, &rows);
    Ok(ExperimentReport { config: config.clone(), rows, aggregate })
}

fn run_trial(config: &ExperimentConfig, trial: usize) -> Vec<TrialRow> {
    let seed = config.trial_seed(trial);
    let error_row = |selector: Selector, e: &Error| TrialRow {
        trial,
        seed,
        selector,
        k: 0,
        target_index: None,
        target: None,
        value: None,
        controllable: None,
        inputs: Vec::new(),
        wall_time_ms: 0.0,
        error: Some(e.to_string()),
    };
    let result = match config.study {
        Study::Robustness { n, width, radius, targets } => {
            robustness_trial(config, trial, seed, n, width, radius, targets)
        }
        Study::Convergence { n, width, radius, p, t, k_max } => {
            convergence_trial(config, trial, seed, n, width, radius, p, t, k_max)
        }
        Study::Controllability { n, q, p, t, k_max, lambda_factor } => {
            controllability_trial(config, trial, seed, n, q, p, t, k_max, lambda_factor)
        }
    };
    result.unwrap_or_else(|e| config.selectors.iter().map(|&s| error_row(s, &e)).collect())
}

fn connected_geometric(n: usize, width: f64, radius: f64, seed: u64) -> Result<Graph> {
    first_connected(seed, CONNECTED_ATTEMPTS, |s| geometric_graph(n, width, radius, s)).map(|(g, _)| g)
}

/// Selection order of length `k` for `selector`, plus the wall time spent.
fn ordering(
    selector: Selector,
    g: &Graph,
    objective: &dyn SetFunction,
    k: usize,
    seed: u64,
) -> Result<(Vec<usize>, f64)> {
    let started = Instant::now();
    let order = match selector.baseline(seed) {
        Some(kind) => baseline_select(g, k, kind)?,
        None => greedy_max(objective, k, Exec::Sequential)?.order(),
    };
    Ok((order, started.elapsed().as_secs_f64() * 1e3))
}

fn sorted(prefix: &[usize]) -> Vec<usize> {
    let mut s = prefix.to_vec();
    s.sort_unstable();
    s
}

fn robustness_trial(
    config: &ExperimentConfig,
    trial: usize,
    seed: u64,
    n: usize,
    width: f64,
    radius: f64,
    targets: usize,
) -> Result<Vec<TrialRow>> {
    let g = connected_geometric(n, width, radius, seed)?;
    let f = NoiseObjective { graph: g.clone() };
    let singles = (0..n).map(|v| perf::noise_variance(&g, &[v])).collect::<Result<Vec<_>>>()?;
    let hi = singles.iter().fold(f64::INFINITY, |m, &x| m.min(x)) / 2.0;
    let greedy_ref = greedy_max(&f, (n / 3).max(1), Exec::Sequential)?;
    let lo = 1.1 * greedy_ref.value.unwrap_or(0.0);
    let grid: Vec<f64> = if targets == 1 || !(lo > 0.0) || lo >= hi {
        vec![hi]
    } else {
        (0..targets).map(|i| hi * (lo / hi).powf(i as f64 / (targets - 1) as f64)).collect()
    };
    let mut rows = Vec::new();
    for &selector in &config.selectors {
        let started = Instant::now();
        let order = match selector {
            Selector::Greedy => {
                let tightest = grid.iter().fold(f64::INFINITY, |m, &x| m.min(x));
                greedy_cover(&f, tightest, Exec::Sequential)?.order()
            }
            Selector::MatroidGreedy => {
                return Err(Error::InvalidParameter("matroid-greedy is not defined for the robustness study".into()))
            }
            _ => baseline_select(&g, n, selector.baseline(seed).expect("baseline selector"))?,
        };
        // Prefix values are nonincreasing, so one pass serves every target.
        let mut values = Vec::with_capacity(order.len());
        let mut tightest_met = false;
        for len in 1..=order.len() {
            let v = perf::noise_variance(&g, &order[..len])?;
            values.push(v);
            if grid.iter().all(|&t| v <= t) {
                tightest_met = true;
                break;
            }
        }
        let wall = started.elapsed().as_secs_f64() * 1e3;
        for (ti, &target) in grid.iter().enumerate() {
            let row = match values.iter().position(|&v| v <= target) {
                Some(i) => TrialRow {
                    trial,
                    seed,
                    selector,
                    k: i + 1,
                    target_index: Some(ti),
                    target: Some(target),
                    value: Some(values[i]),
                    controllable: None,
                    inputs: sorted(&order[..=i]),
                    wall_time_ms: wall,
                    error: None,
                },
                None => TrialRow {
                    trial,
                    seed,
                    selector,
                    k: 0,
                    target_index: Some(ti),
                    target: Some(target),
                    value: None,
                    controllable: None,
                    inputs: Vec::new(),
                    wall_time_ms: wall,
                    error: Some(format!("target not met (tightest met: {tightest_met})")),
                },
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn convergence_trial(
    config: &ExperimentConfig,
    trial: usize,
    seed: u64,
    n: usize,
    width: f64,
    radius: f64,
    p: f64,
    t: f64,
    k_max: usize,
) -> Result<Vec<TrialRow>> {
    let g = connected_geometric(n, width, radius, seed)?;
    let params = ConvergenceParams::new(t, ConvergenceParams::default_delta(&g), p)?;
    let f = ConvergenceObjective { graph: g.clone(), params };
    let mut rows = Vec::new();
    for &selector in &config.selectors {
        if selector == Selector::MatroidGreedy {
            return Err(Error::InvalidParameter("matroid-greedy is not defined for the convergence study".into()));
        }
        let (order, wall) = ordering(selector, &g, &f, k_max, seed)?;
        for k in 1..=k_max {
            let inputs = sorted(&order[..k]);
            rows.push(TrialRow {
                trial,
                seed,
                selector,
                k,
                target_index: None,
                target: None,
                value: Some(f.evaluate(&inputs)?),
                controllable: None,
                inputs,
                wall_time_ms: wall,
                error: None,
            });
        }
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn controllability_trial(
    config: &ExperimentConfig,
    trial: usize,
    seed: u64,
    n: usize,
    q: f64,
    p: f64,
    t: f64,
    k_max: usize,
    lambda_factor: f64,
) -> Result<Vec<TrialRow>> {
    let g = erdos_renyi(n, q, seed, false)?;
    let params = ConvergenceParams::new(t, ConvergenceParams::default_delta(&g), p)?;
    let conv = ConvergenceObjective { graph: g.clone(), params };
    let shifted = Shifted::new(conv.clone())?;
    let lambda = lambda_factor * shifted.baseline();
    let joint = Combination::new(vec![(1.0, Box::new(shifted)), (lambda, Box::new(GciObjective { graph: g.clone() }))])?;
    let mut rows = Vec::new();
    for &selector in &config.selectors {
        if selector == Selector::MatroidGreedy {
            // A separate matroid per budget: the bases are the dilation-free k-sets.
            for k in 1..=k_max {
                let started = Instant::now();
                let picked = controllability_matroid(&g, k)
                    .and_then(|m| matroid_greedy(&joint, &m, Exec::Sequential))
                    .map(|r| r.selected);
                let wall = started.elapsed().as_secs_f64() * 1e3;
                rows.push(controllability_row(&g, &conv, trial, seed, selector, k, picked, wall)?);
            }
            continue;
        }
        let (order, wall) = ordering(selector, &g, &joint, k_max, seed)?;
        for k in 1..=k_max {
            rows.push(controllability_row(&g, &conv, trial, seed, selector, k, Ok(sorted(&order[..k])), wall)?);
        }
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn controllability_row(
    g: &Graph,
    conv: &ConvergenceObjective,
    trial: usize,
    seed: u64,
    selector: Selector,
    k: usize,
    picked: Result<Vec<usize>>,
    wall_time_ms: f64,
) -> Result<TrialRow> {
    let base = TrialRow {
        trial,
        seed,
        selector,
        k,
        target_index: None,
        target: None,
        value: None,
        controllable: None,
        inputs: Vec::new(),
        wall_time_ms,
        error: None,
    };
    Ok(match picked {
        Ok(inputs) => TrialRow {
            value: Some(conv.evaluate(&inputs)?),
            controllable: Some(structural_report(g, &inputs)?.controllable),
            inputs,
            ..base
        },
        // An infeasible budget counts as a failure to certify controllability.
        Err(e @ Error::InfeasibleK { .. }) => TrialRow { controllable: Some(false), error: Some(e.to_string()), ..base },
        Err(e) => return Err(e),
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn aggregate(config: &ExperimentConfig, rows: &[TrialRow]) -> Vec<AggregateRow> {
    let robustness = matches!(config.study, Study::Robustness { .. });
    let mut keys: Vec<(Selector, usize)> = Vec::new();
    for r in rows {
        let key = (r.selector, if robustness { r.target_index.unwrap_or(usize::MAX) } else { r.k });
        if (robustness && r.target_index.is_none()) || (!robustness && r.k == 0) {
            continue;
        }
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.sort_by_key(|&(s, x)| (config.selectors.iter().position(|&c| c == s), x));
    keys.into_iter()
        .map(|(selector, x)| {
            let cell: Vec<&TrialRow> = rows
                .iter()
                .filter(|r| r.selector == selector && if robustness { r.target_index == Some(x) } else { r.k == x })
                .collect();
            let ok: Vec<&&TrialRow> = cell.iter().filter(|r| r.error.is_none()).collect();
            let flags: Vec<bool> = cell.iter().filter_map(|r| r.controllable).collect();
            AggregateRow {
                selector,
                k: (!robustness).then_some(x),
                target_index: robustness.then_some(x),
                mean_target: mean(cell.iter().filter_map(|r| r.target)),
                trials: ok.len(),
                failed: cell.len() - ok.len(),
                mean_value: mean(ok.iter().filter_map(|r| r.value)),
                mean_inputs: mean(ok.iter().map(|r| r.k as f64)).unwrap_or(0.0),
                success_rate: (!flags.is_empty())
                    .then(|| flags.iter().filter(|&&b| b).count() as f64 / flags.len() as f64),
            }
        })
        .collect()
}
