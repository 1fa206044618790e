use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use inputsel::controllability::structural_report;
use inputsel::experiment::{run_experiment, ExperimentConfig, CONNECTED_ATTEMPTS};
use inputsel::graph::{directed_ring, erdos_renyi, first_connected, geometric_graph, named_graph, Graph, NamedGraph};
use inputsel::matroid::controllability_matroid;
use inputsel::optimize::{
    baseline_select, brute_force_opt, fixed_order, greedy_cover, greedy_max, lazy_greedy_max, matroid_greedy,
    BaselineKind, BruteConstraint, SelectionResult, SetFunction,
};
use inputsel::par::Exec;
use inputsel::perf::ConvergenceParams;
use inputsel::simulate::{
    absorbing_walk_probabilities, simulate_noisy_consensus, simulate_weighted_consensus, SimConfig, Trajectory,
};
use inputsel::suite::{run_suite, SuiteConfig, SuiteName, SuiteReport};
use serde::Serialize;

use crate::args::*;
use crate::metric::{load_graph, objective};
use crate::output::*;

pub const DEFAULT_SEED: u64 = 1;

struct Ctx {
    seed: u64,
    explicit_seed: bool,
    output: Option<std::path::PathBuf>,
    format: Option<Format>,
    exec: Exec,
}

impl Ctx {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        emit(self.output.as_deref(), text)
    }
}

fn exec_for(jobs: Option<usize>) -> Result<Exec, Failure> {
    match jobs {
        None => Ok(Exec::Parallel),
        Some(0) => Err(Failure::invalid("--jobs must be at least 1")),
        Some(1) => Ok(Exec::Sequential),
        Some(j) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build_global()
                .map_err(|e| Failure::invalid(format!("thread pool: {e}")))?;
            Ok(Exec::Parallel)
        }
    }
}

/// Runs the command; the returned code is 0 on success and 1 when a
/// verification suite fails.
pub fn run(cli: Cli) -> Result<u8, Failure> {
    let ctx = Ctx {
        seed: cli.global.seed.unwrap_or(DEFAULT_SEED),
        explicit_seed: cli.global.seed.is_some(),
        output: cli.global.output,
        format: cli.global.format,
        exec: exec_for(cli.global.jobs)?,
    };
    match cli.command {
        Command::Generate(a) => generate(&ctx, a),
        Command::Select(a) => select(&ctx, a),
        Command::Evaluate(a) => evaluate(&ctx, a),
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Experiment(a) => experiment(&ctx, a),
        Command::Verify(a) => verify(&ctx, a),
    }
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn random_graph(
    seed: u64,
    connected: bool,
    generate: impl FnMut(u64) -> inputsel::Result<Graph>,
) -> Result<(Graph, Option<u64>), Failure> {
    let mut generate = generate;
    if connected {
        let (g, s) = first_connected(seed, CONNECTED_ATTEMPTS, generate)?;
        Ok((g, Some(s)))
    } else {
        Ok((generate(seed)?, Some(seed)))
    }
}

fn generate(ctx: &Ctx, a: GenerateArgs) -> Result<u8, Failure> {
    let named = |kind| named_graph(kind, a.n);
    let (g, graph_seed) = match a.kind {
        GraphKind::Ring => (named(NamedGraph::Ring)?, None),
        GraphKind::Path => (named(NamedGraph::Path)?, None),
        GraphKind::Star => (named(NamedGraph::Star)?, None),
        GraphKind::DirectedRing => (directed_ring(a.n)?, None),
        GraphKind::Geometric => random_graph(ctx.seed, a.connected, |s| geometric_graph(a.n, a.width, a.radius, s))?,
        GraphKind::Er => random_graph(ctx.seed, a.connected, |s| erdos_renyi(a.n, a.q, s, a.directed))?,
    };
    let weak = g.is_weakly_connected();
    let strong = g.is_strongly_connected();
    eprintln!(
        "n={} edges={} directed={} weakly_connected={weak} strongly_connected={strong}",
        g.n(),
        g.edges().len(),
        g.is_directed()
    );
    let meta = Meta::new(ctx.seed);
    let text = match ctx.format_or(Format::Json) {
        Format::Json => {
            let mut body: serde_json::Value = serde_json::from_str(&g.to_json())?;
            let map = body.as_object_mut().expect("graph JSON is an object");
            map.insert("graph_seed".into(), serde_json::to_value(graph_seed)?);
            map.insert("weakly_connected".into(), weak.into());
            map.insert("strongly_connected".into(), strong.into());
            json_document(&meta, &body)?
        }
        Format::Csv => {
            let mut out = meta.csv_header();
            if let Some(s) = graph_seed {
                let _ = writeln!(out, "# graph_seed: {s}");
            }
            out + &g.to_edge_list()
        }
    };
    ctx.emit(&text)?;
    Ok(0)
}

#[derive(Serialize)]
struct SelectOutput {
    metric: String,
    selector: String,
    #[serde(flatten)]
    result: SelectionResult,
}

fn run_selector(ctx: &Ctx, g: &Graph, f: &dyn SetFunction, a: &SelectArgs) -> Result<SelectionResult, Failure> {
    let name = value_name(&a.selector);
    let k = || a.k.ok_or_else(|| Failure::invalid(format!("selector {name} needs --k")));
    let alpha = || a.alpha.ok_or_else(|| Failure::invalid(format!("selector {name} needs --alpha")));
    let baseline = |kind| -> Result<SelectionResult, Failure> { Ok(fixed_order(f, &baseline_select(g, k()?, kind)?)?) };
    let result = match a.selector {
        SelectorArg::Greedy => match (a.k, a.alpha) {
            (Some(k), None) => greedy_max(f, k, ctx.exec)?,
            (None, Some(alpha)) => greedy_cover(f, alpha, ctx.exec)?,
            _ => return Err(Failure::invalid("selector greedy needs exactly one of --k and --alpha")),
        },
        SelectorArg::LazyGreedy => lazy_greedy_max(f, k()?)?,
        SelectorArg::Cover => greedy_cover(f, alpha()?, ctx.exec)?,
        SelectorArg::MatroidGreedy => matroid_greedy(f, &controllability_matroid(g, k()?)?, ctx.exec)?,
        SelectorArg::MaxDegree => baseline(BaselineKind::MaxDegree)?,
        SelectorArg::AvgDegree => baseline(BaselineKind::AvgDegree)?,
        SelectorArg::Random => {
            let mut r = baseline(BaselineKind::Random { seed: ctx.seed })?;
            r.seed = Some(ctx.seed);
            r
        }
        SelectorArg::Brute => match (a.k, a.alpha) {
            (Some(k), None) => brute_force_opt(f, BruteConstraint::Cardinality(k), ctx.exec)?,
            (None, Some(alpha)) => brute_force_opt(f, BruteConstraint::Target(alpha), ctx.exec)?,
            _ => return Err(Failure::invalid("selector brute needs exactly one of --k and --alpha")),
        },
    };
    Ok(result)
}

fn select(ctx: &Ctx, a: SelectArgs) -> Result<u8, Failure> {
    let g = load_graph(&a.graph)?;
    let f = objective(&g, a.metric, &a.metric_args)?;
    let mut result = run_selector(ctx, &g, f.as_ref(), &a)?;
    result.controllable = Some(structural_report(&g, &result.selected)?.controllable);
    let meta = Meta::new(ctx.seed);
    let out = SelectOutput { metric: a.metric.name(), selector: value_name(&a.selector), result };
    let text = match ctx.format_or(Format::Json) {
        Format::Json => json_document(&meta, &out)?,
        Format::Csv => {
            let r = &out.result;
            let mut text = meta.csv_header();
            let _ = writeln!(text, "# metric: {}", out.metric);
            let _ = writeln!(text, "# selector: {}", out.selector);
            let _ = writeln!(text, "# certificate: {}", serde_json::to_string(&r.certificate)?);
            let _ = writeln!(text, "# structurally_controllable: {}", r.controllable.unwrap_or(false));
            text.push_str("step,element,value\n");
            for (i, step) in r.trace.iter().enumerate() {
                let _ = writeln!(text, "{},{},{}", i + 1, step.element, csv_float(step.value));
            }
            text
        }
    };
    ctx.emit(&text)?;
    Ok(0)
}

#[derive(Serialize)]
struct MetricValue {
    metric: String,
    /// A number, or "inf" / "-inf" when the metric is unbounded at the set.
    value: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct EvaluateOutput {
    set: Vec<usize>,
    metrics: Vec<MetricValue>,
    structural: inputsel::controllability::StructuralReport,
}

fn evaluate(ctx: &Ctx, a: EvaluateArgs) -> Result<u8, Failure> {
    let g = load_graph(&a.graph)?;
    let structural = structural_report(&g, &a.set)?;
    let metrics = match a.metric {
        Some(m) => vec![m],
        None => Metric::ALL.to_vec(),
    };
    let mut values = Vec::with_capacity(metrics.len());
    for m in metrics {
        // The noise objective maps a singular Laplacian to +inf for the
        // optimizers; evaluation reports it as an error instead.
        let outcome = match m {
            Metric::Noise => inputsel::perf::noise_variance(&g, &a.set),
            _ => objective(&g, m, &a.metric_args).and_then(|f| f.evaluate(&a.set)),
        };
        let (value, error) = match outcome {
            Ok(v) => (Some(finite(v).map_or_else(|| csv_float(v).into(), Into::into)), None),
            // A single requested metric fails the command with its exit code.
            Err(e) if a.metric.is_some() => return Err(e.into()),
            Err(e) => (None, Some(e.to_string())),
        };
        values.push(MetricValue { metric: m.name(), value, error });
    }
    let meta = Meta::new(ctx.seed);
    let out = EvaluateOutput { set: structural.inputs.clone(), metrics: values, structural };
    let text = match ctx.format_or(Format::Json) {
        Format::Json => json_document(&meta, &out)?,
        Format::Csv => {
            let mut text = meta.csv_header();
            let set: Vec<String> = out.set.iter().map(usize::to_string).collect();
            let _ = writeln!(text, "# set: {}", set.join(" "));
            text.push_str("metric,value,error\n");
            for m in &out.metrics {
                let value = match &m.value {
                    Some(serde_json::Value::String(s)) => s.clone(),
                    Some(v) => v.to_string(),
                    None => String::new(),
                };
                let _ = writeln!(text, "{},{value},{}", m.metric, csv_text(m.error.as_deref().unwrap_or("")));
            }
            let _ = writeln!(text, "structurally_controllable,{},", out.structural.controllable);
            text
        }
    };
    ctx.emit(&text)?;
    Ok(0)
}

#[derive(Serialize)]
struct TrajectoryOutput<'a> {
    model: String,
    inputs: &'a [usize],
    input_values: &'a [f64],
    times: &'a [f64],
    /// One row per sample instant.
    states: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct WalkOutput {
    model: String,
    delta: f64,
    tau: u64,
    followers: Vec<usize>,
    inputs: Vec<usize>,
    g: Vec<Vec<f64>>,
    h: Vec<f64>,
    absorbed: Vec<Vec<f64>>,
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn simulate(ctx: &Ctx, a: SimulateArgs) -> Result<u8, Failure> {
    let g = load_graph(&a.graph)?;
    let n = g.n();
    let default_step = ConvergenceParams::default_delta(&g);
    let meta = Meta::new(ctx.seed);
    let model = value_name(&a.model);
    if a.model == SimModel::Walk {
        let delta = a.delta.unwrap_or(default_step);
        let w = absorbing_walk_probabilities(&g, &a.inputs, delta, a.tau)?;
        let out = WalkOutput {
            model,
            delta,
            tau: a.tau,
            g: rows(&w.g),
            absorbed: rows(&w.absorbed),
            followers: w.followers,
            inputs: w.inputs,
            h: w.h,
        };
        let text = match ctx.format_or(Format::Csv) {
            Format::Json => json_document(&meta, &out)?,
            Format::Csv => {
                let mut text = meta.csv_header();
                let _ = writeln!(text, "# delta: {delta}, tau: {}", a.tau);
                text.push_str("follower,h");
                for c in &out.followers {
                    let _ = write!(text, ",g{c}");
                }
                text.push('\n');
                for (r, f) in out.followers.iter().enumerate() {
                    let _ = write!(text, "{f},{}", out.h[r]);
                    for x in &out.g[r] {
                        let _ = write!(text, ",{x}");
                    }
                    text.push('\n');
                }
                text
            }
        };
        ctx.emit(&text)?;
        return Ok(0);
    }
    let values = if a.values.is_empty() { vec![0.0; a.inputs.len()] } else { a.values.clone() };
    let x0 = if a.x0.is_empty() { (0..n).map(|i| i as f64 / n as f64).collect() } else { a.x0.clone() };
    let config = SimConfig { dt: a.dt.unwrap_or(default_step), t_end: a.t_end, record_every: a.record_every };
    let traj: Trajectory = match a.model {
        SimModel::Noisy => simulate_noisy_consensus(&g, &a.inputs, &values, &x0, config, a.sigma, ctx.seed)?,
        _ => simulate_weighted_consensus(&g, &a.inputs, &values, &x0, config)?,
    };
    let text = match ctx.format_or(Format::Csv) {
        Format::Json => json_document(
            &meta,
            &TrajectoryOutput {
                model,
                inputs: &traj.inputs,
                input_values: &traj.input_values,
                times: &traj.times,
                states: rows(&traj.states),
            },
        )?,
        Format::Csv => {
            let mut text = meta.csv_header();
            let _ = writeln!(text, "# model: {model}, dt: {}, t_end: {}", config.dt, config.t_end);
            text + &traj.to_csv()
        }
    };
    ctx.emit(&text)?;
    Ok(0)
}

fn load_config(spec: &str) -> Result<ExperimentConfig, Failure> {
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| Failure::invalid(format!("cannot read {spec}: {e}")))?;
        return Ok(serde_json::from_str(&text)?);
    }
    Ok(ExperimentConfig::by_name(spec)?)
}

fn experiment(ctx: &Ctx, a: ExperimentArgs) -> Result<u8, Failure> {
    let mut cfg = load_config(&a.config)?;
    if let Some(n) = a.n {
        cfg = cfg.with_n(n);
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if ctx.explicit_seed {
        cfg.seed = ctx.seed;
    }
    cfg.validate()?;
    let report = run_experiment(&cfg, ctx.exec)?;
    let meta = Meta::new(cfg.seed);
    for agg in &report.aggregate {
        let at = match (agg.k, agg.target_index) {
            (Some(k), _) => format!("k={k}"),
            (None, Some(t)) => format!("target#{t}"),
            _ => String::new(),
        };
        eprintln!(
            "{:<15} {at:<10} mean_value={} mean_inputs={:.2} success={} failed={}",
            agg.selector.name(),
            agg.mean_value.map_or("-".into(), |v| format!("{v:.4}")),
            agg.mean_inputs,
            agg.success_rate.map_or("-".into(), |v| format!("{v:.2}")),
            agg.failed
        );
    }
    match ctx.format_or(Format::Csv) {
        Format::Json => ctx.emit(&json_document(&meta, &report)?)?,
        Format::Csv => {
            let mut header = meta.header();
            header.push(format!("config: {}", serde_json::to_string(&cfg)?));
            header.push(if cfg.seeds.is_empty() {
                format!("trial seeds: {} + trial", cfg.seed)
            } else {
                "trial seeds: config seeds list".to_string()
            });
            if matches!(cfg.study, inputsel::experiment::Study::Robustness { .. }) {
                header.push(
                    "targets: per-trial geometric grid from min_v R({v}) / 2 down to 1.1 R(greedy of size n/3)".into(),
                );
            }
            ctx.emit(&report.rows_csv(&header))?;
            let aggregate = report.aggregate_csv(&header);
            match a.aggregate.or_else(|| ctx.output.as_deref().map(|p| sibling(p, "aggregate"))) {
                Some(path) => emit(Some(&path), &aggregate)?,
                None => eprint!("{aggregate}"),
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    passed: bool,
    config: &'a SuiteConfig,
    suites: &'a [SuiteReport],
}

fn verify(ctx: &Ctx, a: VerifyArgs) -> Result<u8, Failure> {
    let names = SuiteName::parse(&a.suite)?;
    let mut cfg = if a.quick { SuiteConfig::quick() } else { SuiteConfig::default() };
    cfg.seed = ctx.seed;
    let mut reports = Vec::with_capacity(names.len());
    for name in names {
        let report = run_suite(name, &cfg, ctx.exec)?;
        for c in &report.checks {
            eprintln!("{} {}/{}: {}", if c.passed { "PASS" } else { "FAIL" }, name.name(), c.name, c.summary);
            if let Some(ce) = &c.counterexample {
                eprintln!("  counterexample: {}", serde_json::to_string(ce)?);
            }
        }
        reports.push(report);
    }
    let passed = reports.iter().all(SuiteReport::passed);
    let meta = Meta::new(ctx.seed);
    let text = match ctx.format_or(Format::Json) {
        Format::Json => json_document(&meta, &VerifyOutput { passed, config: &cfg, suites: &reports })?,
        Format::Csv => {
            let mut text = meta.csv_header();
            text.push_str("suite,check,passed,summary,counterexample\n");
            for r in &reports {
                for c in &r.checks {
                    let ce = match &c.counterexample {
                        Some(ce) => serde_json::to_string(ce)?,
                        None => String::new(),
                    };
                    let _ = writeln!(
                        text,
                        "{},{},{},{},{}",
                        r.suite.name(),
                        c.name,
                        c.passed,
                        csv_text(&c.summary),
                        csv_text(&ce)
                    );
                }
            }
            text
        }
    };
    ctx.emit(&text)?;
    Ok(if passed { 0 } else { EXIT_VERIFY_FAILED })
}
