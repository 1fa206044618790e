//! Randomized verification suites: exhaustive property sweeps, matroid
//! checks, structural-versus-numerical rank agreement, Monte-Carlo
//! agreement and greedy-versus-optimum ratios. Shared by the command line
//! `verify` command and the acceptance tests.

use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::controllability::{ctrb_rank, structural_report, EnergyTarget, LinearSystem, MinEnergy, SystemVariant};
use crate::error::{Error, Result};
use crate::graph::{erdos_renyi, first_connected, grounded_laplacian, Edge, Graph};
use crate::matroid::{
    check_axioms, controllability_matroid, transversal_matroid, uniform_matroid, Matroid, TransversalInstance,
};
use crate::numerics;
use crate::optimize::objectives::{
    ConvergenceObjective, Coverage, CtrbRankObjective, GciObjective, GramianEnergyObjective, KalmanObjective,
    MinEnergyObjective, NoiseObjective, Shifted,
};
use crate::optimize::{brute_force_opt, greedy_cover, greedy_max, matroid_greedy, BruteConstraint, SetFunction};
use crate::par::Exec;
use crate::perf::{self, ConvergenceParams, KalmanSetup};
use crate::set;
use crate::simulate::{estimate_stationary_covariance, CovarianceConfig};
use crate::verify::{check_property, tabulate, Property};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Submodularity,
    Matroid,
    Structural,
    Montecarlo,
    Bounds,
}

impl SuiteName {
    pub const ALL: [SuiteName; 5] =
        [SuiteName::Submodularity, SuiteName::Matroid, SuiteName::Structural, SuiteName::Montecarlo, SuiteName::Bounds];

    pub fn name(self) -> &'static str {
        match self {
            SuiteName::Submodularity => "submodularity",
            SuiteName::Matroid => "matroid",
            SuiteName::Structural => "structural",
            SuiteName::Montecarlo => "montecarlo",
            SuiteName::Bounds => "bounds",
        }
    }

    pub fn parse(name: &str) -> Result<Vec<SuiteName>> {
        Ok(match name {
            "submodularity" => vec![SuiteName::Submodularity],
            "matroid" => vec![SuiteName::Matroid],
            "structural" => vec![SuiteName::Structural],
            "montecarlo" => vec![SuiteName::Montecarlo],
            "bounds" => vec![SuiteName::Bounds],
            "all" => Self::ALL.to_vec(),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown suite {name:?} (expected submodularity, matroid, structural, montecarlo, bounds or all)"
                )))
            }
        })
    }
}

/// Failing instance for a property check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Graph in the JSON file format.
    pub graph: serde_json::Value,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub v: usize,
    pub margin: f64,
    pub tolerance: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, summary: impl Into<String>) -> Self {
        Self { name: name.into(), passed, summary: summary.into(), counterexample: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub checks: Vec<Check>,
    pub elapsed_ms: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Sizes and seeds for every suite. [`SuiteConfig::default`] matches the
/// acceptance criteria; [`SuiteConfig::quick`] is a smoke-test scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random connected graphs per property sweep, sizes `4..=sweep_max_n`.
    pub sweep_graphs: usize,
    pub sweep_max_n: usize,
    /// Allowed violation, relative to the largest finite `|f|`.
    pub rel_slack: f64,
    /// Structurally controllable (and uncontrollable) digraphs for the rank
    /// cross-validation, with weight draws per graph.
    pub structural_graphs: usize,
    pub structural_draws: usize,
    pub commute_graphs: usize,
    pub commute_walks: u64,
    /// Allowed `(max - min) / mean` spread of the commute-time ratio.
    pub commute_spread: f64,
    pub covariance_graphs: usize,
    pub covariance_replications: usize,
    pub covariance_samples: usize,
    pub bound_instances: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            sweep_graphs: 200,
            sweep_max_n: 7,
            rel_slack: 1e-9,
            structural_graphs: 200,
            structural_draws: 100,
            commute_graphs: 20,
            commute_walks: 100_000,
            commute_spread: 0.05,
            covariance_graphs: 10,
            covariance_replications: 100,
            covariance_samples: 100,
            bound_instances: 100,
        }
    }
}

impl SuiteConfig {
    pub fn quick() -> Self {
        Self {
            sweep_graphs: 12,
            sweep_max_n: 6,
            structural_graphs: 20,
            structural_draws: 20,
            commute_graphs: 3,
            commute_walks: 20_000,
            commute_spread: 0.1,
            covariance_graphs: 2,
            covariance_replications: 100,
            covariance_samples: 30,
            bound_instances: 10,
            ..Self::default()
        }
    }
}

pub fn run_suite(name: SuiteName, cfg: &SuiteConfig, exec: Exec) -> Result<SuiteReport> {
    let started = Instant::now();
    let checks = match name {
        SuiteName::Submodularity => submodularity(cfg, exec)?,
        SuiteName::Matroid => matroid(cfg)?,
        SuiteName::Structural => structural(cfg, exec)?,
        SuiteName::Montecarlo => montecarlo(cfg, exec)?,
        SuiteName::Bounds => bounds(cfg, exec)?,
    };
    Ok(SuiteReport { suite: name, checks, elapsed_ms: started.elapsed().as_secs_f64() * 1e3 })
}

fn mix(seed: u64, i: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Connected undirected Erdos-Renyi graph number `i` of a sweep.
fn sweep_graph(seed: u64, i: usize, n: usize, q: f64) -> Result<Graph> {
    first_connected(mix(seed, i as u64), 10_000, |s| erdos_renyi(n, q, s, false)).map(|(g, _)| g)
}

fn graph_value(g: &Graph) -> serde_json::Value {
    serde_json::from_str(&g.to_json()).expect("graph JSON parses")
}

/// One property applied to a family of set functions, aggregated over the
/// whole sweep.
struct PropertyTally {
    name: String,
    instances: usize,
    failing: usize,
    checked: u64,
    skipped: u64,
    worst: Option<(f64, Counterexample)>,
}

impl PropertyTally {
    fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), instances: 0, failing: 0, checked: 0, skipped: 0, worst: None }
    }

    fn record(&mut self, g: &Graph, f: &dyn SetFunction, props: &[Property], rel_slack: f64, note: &str) -> Result<()> {
        let table = tabulate(f, Exec::Sequential)?;
        self.instances += 1;
        let mut failed = false;
        for &p in props {
            let r = check_property(&table, p, rel_slack);
            self.checked += r.checked;
            self.skipped += r.skipped;
            if let Some(w) = r.worst {
                failed = true;
                let rel = w.margin / table.scale();
                if self.worst.as_ref().is_none_or(|(best, _)| rel > *best) {
                    let note = format!("{note}; {p:?} violated, scale {:.6e}", table.scale());
                    let cx = Counterexample {
                        graph: graph_value(g),
                        s: w.s,
                        t: w.t,
                        v: w.v,
                        margin: w.margin,
                        tolerance: r.tolerance,
                        note,
                    };
                    self.worst = Some((rel, cx));
                }
            }
        }
        if failed {
            self.failing += 1;
        }
        Ok(())
    }

    fn finish(self) -> Check {
        let mut summary = format!(
            "{} instances, {} triples checked, {} skipped (non-finite), {} failing instances",
            self.instances, self.checked, self.skipped, self.failing
        );
        if let Some((rel, _)) = &self.worst {
            summary.push_str(&format!(", worst relative margin {rel:.3e}"));
        }
        Check {
            name: self.name,
            passed: self.failing == 0,
            summary,
            counterexample: self.worst.map(|(_, c)| c),
        }
    }
}

fn sin_cos_target(n: usize, eps: f64) -> Result<EnergyTarget> {
    let x0 = DVector::from_fn(n, |i, _| (0.37 * i as f64).sin());
    let x1 = DVector::from_fn(n, |i, _| (1.3 * i as f64).cos());
    EnergyTarget::new(x0, x1, eps)
}

/// Property names reported by the submodularity suite.
pub const SWEEP_CHECKS: [&str; 9] = [
    "noise_variance_supermodular",
    "convergence_bound_supermodular",
    "kalman_log_det_supermodular",
    "min_energy_eps_1e-2_supermodular",
    "min_energy_eps_1e-4_supermodular",
    "gramian_trace_inverse_supermodular",
    "ctrb_rank_submodular",
    "gci_submodular",
    "gramian_h2_modular",
];

fn submodularity(cfg: &SuiteConfig, exec: Exec) -> Result<Vec<Check>> {
    let sizes = 4..=cfg.sweep_max_n.max(4);
    let span = sizes.clone().count();
    // Each graph yields one tally per check, merged in order below.
    let per_graph = exec.map_range(cfg.sweep_graphs, |i| -> Result<Vec<PropertyTally>> {
        let n = 4 + i % span;
        let g = sweep_graph(cfg.seed, i, n, 0.5)?;
        let slack = cfg.rel_slack;
        let mut out: Vec<PropertyTally> = SWEEP_CHECKS.iter().map(|&c| PropertyTally::new(c)).collect();
        use Property::*;
        out[0].record(&g, &NoiseObjective { graph: g.clone() }, &[Supermodular, Nonincreasing], slack, "R(S)")?;
        let delta = 5.0 * ConvergenceParams::default_delta(&g);
        for (tau, p) in [(1, 1.0), (2, 1.0), (4, 1.0), (1, 2.0), (2, 2.0), (4, 2.0)] {
            let params = ConvergenceParams::with_steps(tau, delta, p)?;
            let note = format!("tau={tau}, p={p}, delta={delta}");
            out[1].record(&g, &ConvergenceObjective { graph: g.clone(), params }, &[Supermodular, Nonincreasing], slack, &note)?;
        }
        let a = numerics::expm(&(-g.laplacian() * 0.1))?;
        let kalman = KalmanObjective { setup: KalmanSetup::with_defaults(a, 2)? };
        out[2].record(&g, &kalman, &[Supermodular, Nonincreasing], slack, "A=expm(-0.1 L), prior I, sigma2 default, horizon 2")?;
        let actuated = LinearSystem::new(-g.laplacian(), SystemVariant::Actuated)?;
        for (slot, eps) in [(3, 1e-2), (4, 1e-4)] {
            let model = MinEnergy::new(&actuated, &sin_cos_target(n, eps)?)?;
            let note = format!("A=-L actuated, horizon [0,1], x0_i=sin(0.37 i), x1_i=cos(1.3 i), eps={eps}");
            out[slot].record(&g, &MinEnergyObjective { model }, &[Supermodular], slack, &note)?;
        }
        let energy = GramianEnergyObjective { system: actuated.clone() };
        out[5].record(&g, &energy, &[Supermodular, Nonincreasing], slack, "A=-L actuated, finite horizon [0,1]")?;
        let rank = CtrbRankObjective::new(actuated.clone());
        out[6].record(&g, &rank, &[Submodular, Nondecreasing], slack, "A=-L actuated")?;
        let dg = erdos_renyi(n, 0.35, mix(cfg.seed ^ 0xD1, i as u64), true)?;
        out[7].record(&dg, &GciObjective { graph: dg.clone() }, &[Submodular, Nondecreasing], slack, "directed ER q=0.35")?;
        let stable = LinearSystem::new(-g.laplacian() - nalgebra::DMatrix::identity(n, n), SystemVariant::Actuated)?;
        let h2 = crate::optimize::objectives::GramianH2Objective { system: stable, output: None };
        out[8].record(&g, &h2, &[Submodular, Supermodular], slack, "A=-L-I actuated (Lyapunov Gramian)")?;
        Ok(out)
    });
    let mut merged: Vec<PropertyTally> = SWEEP_CHECKS.iter().map(|&c| PropertyTally::new(c)).collect();
    for tallies in per_graph {
        for (m, t) in merged.iter_mut().zip(tallies?) {
            m.instances += t.instances;
            m.failing += t.failing;
            m.checked += t.checked;
            m.skipped += t.skipped;
            if let Some((rel, cx)) = t.worst {
                if m.worst.as_ref().is_none_or(|(best, _)| rel > *best) {
                    m.worst = Some((rel, cx));
                }
            }
        }
    }
    Ok(merged.into_iter().map(PropertyTally::finish).collect())
}

/// Kuhn's augmenting-path matching, independent of the Hopcroft-Karp code.
fn kuhn_rank(adj: &[Vec<usize>], left_count: usize) -> usize {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &l in &adj[u] {
            if !seen[l] {
                seen[l] = true;
                if owner[l].is_none_or(|o| augment(o, adj, seen, owner)) {
                    owner[l] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; left_count];
    (0..adj.len()).filter(|&u| augment(u, adj, &mut vec![false; left_count], &mut owner)).count()
}

fn random_digraph(rng: &mut ChaCha8Rng, n: usize, q: f64) -> Result<Graph> {
    erdos_renyi(n, q, rng.random(), true)
}

fn matroid(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, 0xA7));
    let mut axiom_failures = Vec::new();
    let mut instances = 0;
    for n in 0..=8 {
        for k in 0..=n {
            instances += 1;
            if let Err(e) = check_axioms(&uniform_matroid(n, k)) {
                axiom_failures.push(e.to_string());
            }
        }
    }
    let mut rank_mismatch = Vec::new();
    let mut rank_checks = 0u64;
    for _ in 0..60 {
        let ground = rng.random_range(1..=8);
        let left = rng.random_range(1..=6);
        let adj: Vec<Vec<usize>> =
            (0..ground).map(|_| (0..left).filter(|_| rng.random::<f64>() < 0.35).collect()).collect();
        let m = transversal_matroid(TransversalInstance { left_count: left, adj: adj.clone() })?;
        instances += 1;
        if let Err(e) = check_axioms(&m) {
            axiom_failures.push(e.to_string());
        }
        for mask in 0..(1u32 << ground) {
            let x = set::from_mask(mask);
            let sub: Vec<Vec<usize>> = x.iter().map(|&j| adj[j].clone()).collect();
            rank_checks += 1;
            if m.rank(&x) != kuhn_rank(&sub, left) {
                rank_mismatch.push(format!("{adj:?} at {x:?}"));
            }
        }
    }
    let mut basis_mismatch = Vec::new();
    let mut basis_instances = 0;
    let mut attempts = 0;
    while basis_instances < 40 && attempts < 10_000 {
        attempts += 1;
        let n = rng.random_range(3..=7);
        let g = random_digraph(&mut rng, n, 0.3)?;
        if !g.is_strongly_connected() {
            continue;
        }
        basis_instances += 1;
        for k in 1..=n {
            let m = match controllability_matroid(&g, k) {
                Ok(m) => m,
                Err(Error::InfeasibleK { .. }) => {
                    // No k-set may then be controllable.
                    if set::combinations(n, k).iter().any(|s| structural_report(&g, s).map(|r| r.controllable).unwrap_or(false)) {
                        basis_mismatch.push(format!("{} k={k}: infeasible but a controllable set exists", g.to_json()));
                    }
                    continue;
                }
                Err(e) => {
                    axiom_failures.push(e.to_string());
                    continue;
                }
            };
            instances += 1;
            for s in set::combinations(n, k) {
                let basis = m.is_independent(&s);
                let controllable = structural_report(&g, &s)?.controllable;
                if basis != controllable {
                    basis_mismatch.push(format!("{} k={k} S={s:?}: basis {basis}, controllable {controllable}", g.to_json()));
                }
            }
        }
    }
    let first = |v: &Vec<String>| v.first().map(|s| format!("; first: {s}")).unwrap_or_default();
    Ok(vec![
        Check::new(
            "matroid_axioms",
            axiom_failures.is_empty(),
            format!("{instances} instances (uniform, transversal, controllability), {} failures{}", axiom_failures.len(), first(&axiom_failures)),
        ),
        Check::new(
            "transversal_rank_oracle",
            rank_mismatch.is_empty(),
            format!("{rank_checks} subsets against an augmenting-path oracle, {} mismatches{}", rank_mismatch.len(), first(&rank_mismatch)),
        ),
        Check::new(
            "controllability_bases",
            basis_mismatch.is_empty() && basis_instances == 40,
            format!(
                "{basis_instances} strongly connected digraphs, every k: bases vs controllable k-sets, {} mismatches{}",
                basis_mismatch.len(),
                first(&basis_mismatch)
            ),
        ),
    ])
}

/// Copy of `g` with independent uniform(0.5, 1.5) edge weights.
fn reweighted(g: &Graph, rng: &mut ChaCha8Rng) -> Result<Graph> {
    let edges = g
        .edges()
        .iter()
        .map(|e| Edge { source: e.source, target: e.target, weight: rng.random_range(0.5..1.5) })
        .collect();
    Graph::new(g.n(), g.is_directed(), edges)
}

fn full_rank_fraction(g: &Graph, s: &[usize], draws: usize, rng: &mut ChaCha8Rng) -> Result<usize> {
    let mut full = 0;
    for _ in 0..draws {
        let sys = LinearSystem::new(reweighted(g, rng)?.weight_matrix(), SystemVariant::Grounded)?;
        if ctrb_rank(&sys, s)? == g.n() - s.len() {
            full += 1;
        }
    }
    Ok(full)
}

/// Structural controllability declared by matching versus numerical rank of
/// random-weight realizations of the grounded pair `(W_FF, W_FS)`.
pub fn structural_rank_agreement(cfg: &SuiteConfig, exec: Exec) -> Result<(Check, Check)> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, 0x5C));
    let mut yes = Vec::new();
    let mut no = Vec::new();
    let mut attempts = 0;
    while (yes.len() < cfg.structural_graphs || no.len() < cfg.structural_graphs) && attempts < 1_000_000 {
        attempts += 1;
        let n = rng.random_range(2..=6);
        let g = random_digraph(&mut rng, n, 0.4)?;
        let k = rng.random_range(1..=2.min(n - 1));
        let mut s: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = rng.random_range(i..n);
            s.swap(i, j);
        }
        s.truncate(k);
        s.sort_unstable();
        let controllable = structural_report(&g, &s)?.controllable;
        let bucket = if controllable { &mut yes } else { &mut no };
        if bucket.len() < cfg.structural_graphs {
            bucket.push((g, s, rng.random::<u64>()));
        }
    }
    let draws = cfg.structural_draws;
    let count = |items: &[(Graph, Vec<usize>, u64)]| -> Result<usize> {
        let per = exec.map(items, |(g, s, seed)| full_rank_fraction(g, s, draws, &mut ChaCha8Rng::seed_from_u64(*seed)));
        per.into_iter().sum()
    };
    let full_yes = count(&yes)?;
    let full_no = count(&no)?;
    let total_yes = yes.len() * draws;
    let rate = full_yes as f64 / total_yes.max(1) as f64;
    let pos = Check::new(
        "structural_implies_full_rank",
        yes.len() == cfg.structural_graphs && rate >= 0.99,
        format!("{} controllable (digraph, S) pairs, {draws} weight draws each: full rank in {full_yes}/{total_yes} = {:.4}", yes.len(), rate),
    );
    let neg = Check::new(
        "uncontrollable_is_rank_deficient",
        full_no == 0,
        format!("{} uncontrollable pairs, {draws} draws each: full rank in {full_no} draws", no.len()),
    );
    Ok((pos, neg))
}

fn structural(cfg: &SuiteConfig, exec: Exec) -> Result<Vec<Check>> {
    let (pos, neg) = structural_rank_agreement(cfg, exec)?;
    Ok(vec![pos, neg])
}

/// Commute time `kappa(S, u)` over `(L_ff^-1)_uu`: constant in `u`.
pub fn commute_ratio_check(cfg: &SuiteConfig, exec: Exec) -> Result<Check> {
    let mut worst: (f64, String) = (0.0, String::new());
    let mut passed = true;
    for i in 0..cfg.commute_graphs {
        let n = 4 + i % 5;
        let g = sweep_graph(cfg.seed ^ 0xC0, i, n, 0.5)?;
        let s: Vec<usize> = if i % 2 == 0 { vec![0] } else { vec![0, n / 2] };
        let inv = numerics::inverse_spd(&grounded_laplacian(&g, &s)?.l_ff)?;
        let followers = set::complement(n, &s);
        let mut ratios = Vec::new();
        for (r, &u) in followers.iter().enumerate() {
            let est = perf::commute_time_mc(&g, &s, u, cfg.commute_walks, mix(cfg.seed, (i * 64 + u) as u64), 10_000_000, exec)?;
            ratios.push(est.mean / inv[(r, r)]);
        }
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let spread = (hi - lo) / mean;
        let expected = 2.0 * g.edges().iter().map(|e| e.weight).sum::<f64>();
        if spread > cfg.commute_spread {
            passed = false;
        }
        if spread >= worst.0 {
            worst = (spread, format!("graph {i} (n={n}, S={s:?}): ratio mean {mean:.3}, 2|E| = {expected}"));
        }
    }
    Ok(Check::new(
        "commute_time_ratio_constant",
        passed,
        format!(
            "{} graphs, {} walks per follower: worst relative spread {:.4} (limit {}) at {}",
            cfg.commute_graphs, cfg.commute_walks, worst.0, cfg.commute_spread, worst.1
        ),
    ))
}

/// Empirical stationary covariance of noisy consensus versus `L_ff^-1 / 2`.
pub fn covariance_check(cfg: &SuiteConfig, exec: Exec) -> Result<Check> {
    let mut compared = 0;
    let mut outside = Vec::new();
    let mut max_z: f64 = 0.0;
    for i in 0..cfg.covariance_graphs {
        let n = 4 + i % 3;
        let g = sweep_graph(cfg.seed ^ 0xC4, i, n, 0.5)?;
        let s = vec![i % n];
        let gl = grounded_laplacian(&g, &s)?;
        let exact = numerics::inverse_spd(&gl.l_ff)? * 0.5;
        // Euler-Maruyama bias is about dt * lambda / 2 relative, kept near 1e-3.
        let dt = 1e-3 / g.max_laplacian_diagonal();
        let cov_cfg = CovarianceConfig {
            dt,
            noise_sigma: 1.0,
            replications: cfg.covariance_replications,
            samples_per_replication: cfg.covariance_samples,
        };
        let est = estimate_stationary_covariance(&g, &s, cov_cfg, mix(cfg.seed, i as u64), exec)?;
        let nf = exact.nrows();
        for r in 0..nf {
            for c in r..nf {
                compared += 1;
                let z = (est.mean[(r, c)] - exact[(r, c)]) / est.std_error[(r, c)];
                max_z = max_z.max(z.abs());
                if z.abs() > 3.0 {
                    outside.push(format!("graph {i} entry ({r},{c}): z = {z:.2}"));
                }
            }
        }
    }
    Ok(Check::new(
        "noisy_consensus_covariance",
        outside.is_empty(),
        format!(
            "{} graphs, {compared} distinct entries: max |z| = {max_z:.2}, {} beyond 3 std-errors{}",
            cfg.covariance_graphs,
            outside.len(),
            outside.first().map(|s| format!("; first: {s}")).unwrap_or_default()
        ),
    ))
}

fn montecarlo(cfg: &SuiteConfig, exec: Exec) -> Result<Vec<Check>> {
    Ok(vec![commute_ratio_check(cfg, exec)?, covariance_check(cfg, exec)?])
}

/// Objectives used by the bound checks; all are maximization objectives
/// with finite values at the empty set.
fn bound_objective(kind: usize, n: usize, seed: u64) -> Result<(Box<dyn SetFunction>, Graph, String)> {
    let g = sweep_graph(seed, 0, n, 0.45)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match kind % 5 {
        0 => {
            let universe = 2 * n;
            let sets = (0..n).map(|_| (0..universe).filter(|_| rng.random::<f64>() < 0.25).collect()).collect();
            let weights = (0..universe).map(|_| rng.random_range(0.5..2.0)).collect();
            (Box::new(Coverage::new(universe, sets, Some(weights))?), g, "weighted coverage".into())
        }
        1 => {
            let params = ConvergenceParams::with_steps(3, 5.0 * ConvergenceParams::default_delta(&g), 2.0)?;
            (Box::new(Shifted::new(ConvergenceObjective { graph: g.clone(), params })?), g, "shifted convergence bound".into())
        }
        2 => {
            let a = numerics::expm(&(-g.laplacian() * 0.1))?;
            (Box::new(Shifted::new(KalmanObjective { setup: KalmanSetup::with_defaults(a, 2)? })?), g, "shifted kalman log det".into())
        }
        3 => {
            let dg = erdos_renyi(n, 0.3, rng.random(), true)?;
            (Box::new(GciObjective { graph: dg.clone() }), dg, "gci".into())
        }
        _ => {
            let sys = LinearSystem::new(-g.laplacian(), SystemVariant::Actuated)?;
            (Box::new(CtrbRankObjective::new(sys)), g, "actuated ctrb rank".into())
        }
    })
}

/// Ratios of greedy to exhaustive optimum on small instances.
pub fn bound_checks(cfg: &SuiteConfig, exec: Exec) -> Result<Vec<Check>> {
    let bound = 1.0 - (-1.0f64).exp();
    let per = exec.map_range(cfg.bound_instances, |i| -> Result<(f64, f64, f64, String)> {
        let n = 6 + i % 5;
        let seed = mix(cfg.seed ^ 0xB0, i as u64);
        let (f, g, what) = bound_objective(i, n, seed)?;
        let k = 2 + i % 3;
        let greedy = greedy_max(f.as_ref(), k, Exec::Sequential)?.value.unwrap_or(0.0);
        let opt = brute_force_opt(f.as_ref(), BruteConstraint::Cardinality(k), Exec::Sequential)?.value.unwrap_or(0.0);
        let max_ratio = if opt > 0.0 { greedy / opt } else { 1.0 };
        // Cover: target 90% of the full-set value.
        let all: Vec<usize> = (0..n).collect();
        let alpha = 0.9 * f.evaluate(&all)? + 0.1 * f.evaluate(&[])?;
        let cover = greedy_cover(f.as_ref(), alpha, Exec::Sequential)?;
        let best = brute_force_opt(f.as_ref(), BruteConstraint::Target(alpha), Exec::Sequential)?;
        let cert = cover.certificate.value.unwrap_or(f64::INFINITY);
        let cover_ratio = if best.selected.is_empty() {
            if cover.selected.is_empty() { 0.0 } else { f64::INFINITY }
        } else {
            cover.selected.len() as f64 / best.selected.len() as f64 / cert
        };
        let m: Box<dyn Matroid> = match i % 3 {
            0 => Box::new(uniform_matroid(n, k)),
            1 => {
                let left = n / 2 + 1;
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
                let adj = (0..n).map(|_| (0..left).filter(|_| rng.random::<f64>() < 0.4).collect()).collect();
                Box::new(transversal_matroid(TransversalInstance { left_count: left, adj })?)
            }
            _ => match controllability_matroid(&g, k) {
                Ok(m) => Box::new(m),
                Err(Error::InfeasibleK { needed, .. }) => Box::new(controllability_matroid(&g, needed)?),
                Err(e) => return Err(e),
            },
        };
        let mg = matroid_greedy(f.as_ref(), m.as_ref(), Exec::Sequential)?.value.unwrap_or(0.0);
        let mopt = brute_force_opt(f.as_ref(), BruteConstraint::Matroid(m.as_ref()), Exec::Sequential)?.value.unwrap_or(0.0);
        let matroid_ratio = if mopt > 0.0 { mg / mopt } else { 1.0 };
        Ok((max_ratio, cover_ratio, matroid_ratio, format!("instance {i}: {what}, n={n}, k={k}, {}", m.description())))
    });
    let per: Vec<_> = per.into_iter().collect::<Result<_>>()?;
    let tally = |name: &str, pick: fn(&(f64, f64, f64, String)) -> f64, ok: &dyn Fn(f64) -> bool, label: &str| {
        let fails: Vec<&(f64, f64, f64, String)> = per.iter().filter(|r| !ok(pick(r))).collect();
        let lo = per.iter().map(pick).fold(f64::INFINITY, f64::min);
        let hi = per.iter().map(pick).fold(f64::NEG_INFINITY, f64::max);
        Check::new(
            name,
            fails.is_empty(),
            format!(
                "{} instances, {} failures; {label} min {lo:.4}, max {hi:.4}{}",
                per.len(),
                fails.len(),
                fails.first().map(|r| format!("; first: {}", r.3)).unwrap_or_default()
            ),
        )
    };
    Ok(vec![
        tally("greedy_max_ratio", |r| r.0, &|x| x >= bound - 1e-12, "greedy/OPT"),
        tally("greedy_cover_certificate", |r| r.1, &|x| x <= 1.0 + 1e-12, "(|S'|/|S*|)/certificate"),
        tally("matroid_greedy_ratio", |r| r.2, &|x| x >= 0.5 - 1e-12, "greedy/OPT"),
    ])
}

fn bounds(cfg: &SuiteConfig, exec: Exec) -> Result<Vec<Check>> {
    bound_checks(cfg, exec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_run() {
        let cfg = SuiteConfig::quick();
        for name in [SuiteName::Matroid, SuiteName::Structural, SuiteName::Bounds] {
            let r = run_suite(name, &cfg, Exec::Parallel).unwrap();
            assert!(r.passed(), "{r:#?}");
        }
    }

    #[test]
    fn sweep_reports_every_property() {
        let cfg = SuiteConfig { sweep_graphs: 3, sweep_max_n: 5, ..SuiteConfig::quick() };
        let r = run_suite(SuiteName::Submodularity, &cfg, Exec::Parallel).unwrap();
        let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, SWEEP_CHECKS);
        for name in ["noise_variance_supermodular", "ctrb_rank_submodular", "gci_submodular", "gramian_h2_modular"] {
            assert!(r.check(name).unwrap().passed, "{:?}", r.check(name));
        }
    }

    #[test]
    fn kuhn_oracle_small() {
        assert_eq!(kuhn_rank(&[vec![0, 1], vec![0], vec![0]], 2), 2);
        assert_eq!(kuhn_rank(&[], 3), 0);
    }

    #[test]
    fn parse_suite_names() {
        assert_eq!(SuiteName::parse("all").unwrap().len(), 5);
        assert!(SuiteName::parse("bogus").is_err());
    }
}
