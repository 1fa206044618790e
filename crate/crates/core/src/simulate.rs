//! Trajectory simulators used to validate the analytic metrics: noisy
//! consensus (Euler-Maruyama), deterministic consensus via the exact
//! propagator, and absorbing random walks.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{grounded_laplacian, Graph, GroundedLaplacian};
use crate::numerics::{self, DenseMatrix};
use crate::par::Exec;
use crate::perf::{chunk_rng, Estimate, WALK_CHUNK};
use crate::set;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// One row per sample instant, one column per node.
    pub states: DenseMatrix,
    pub inputs: Vec<usize>,
    pub input_values: Vec<f64>,
}

impl Trajectory {
    pub fn n(&self) -> usize {
        self.states.ncols()
    }

    pub fn state(&self, k: usize) -> Vec<f64> {
        self.states.row(k).iter().copied().collect()
    }

    /// `t,x0,x1,...` header followed by one row per instant.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for i in 0..self.n() {
            write!(out, ",x{i}").unwrap();
        }
        out.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            write!(out, "{t}").unwrap();
            for x in self.states.row(k).iter() {
                write!(out, ",{x}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Step size, horizon and recording stride shared by the simulators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Record every `record_every`-th step (the initial state is always
    /// recorded).
    pub record_every: usize,
}

impl SimConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self { dt, t_end, record_every: 1 }
    }

    fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) || self.record_every == 0 {
            return Err(Error::InvalidParameter("need dt > 0, t_end >= 0 and record_every >= 1".into()));
        }
        Ok((self.t_end / self.dt).round() as usize)
    }
}

fn initial_state(n: usize, inputs: &[usize], input_values: &[f64], x0: &[f64]) -> Result<Vec<f64>> {
    if input_values.len() != inputs.len() {
        return Err(Error::DimensionMismatch("one input value per input node required".into()));
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch(format!("x0 has {} entries, graph has {n} nodes", x0.len())));
    }
    let mut x = x0.to_vec();
    for (&v, &c) in inputs.iter().zip(input_values) {
        x[v] = c;
    }
    Ok(x)
}

/// Follower in-neighbor lists used by the explicit integrator.
struct Stepper {
    followers: Vec<usize>,
    in_adj: Vec<Vec<(usize, f64)>>,
    dt: f64,
    noise: f64,
}

impl Stepper {
    fn new(g: &Graph, gl: &GroundedLaplacian, dt: f64, noise_sigma: f64) -> Result<Self> {
        let max_diag = (0..gl.followers.len()).map(|r| gl.l_ff[(r, r)]).fold(0.0, f64::max);
        if max_diag > 0.0 && dt * max_diag >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "unstable step size: dt={dt} must be below 1/{max_diag}"
            )));
        }
        let in_adj = gl.followers.iter().map(|&i| g.in_neighbors(i).to_vec()).collect();
        Ok(Self { followers: gl.followers.clone(), in_adj, dt, noise: noise_sigma * dt.sqrt() })
    }

    /// One Euler-Maruyama step; `drift` is scratch space.
    fn step(&self, x: &mut [f64], drift: &mut [f64], rng: &mut impl rand::Rng) {
        for (r, &i) in self.followers.iter().enumerate() {
            let xi = x[i];
            drift[r] = -self.in_adj[r].iter().map(|&(j, w)| w * (xi - x[j])).sum::<f64>();
        }
        for (r, &i) in self.followers.iter().enumerate() {
            x[i] += self.dt * drift[r];
            if self.noise > 0.0 {
                let z: f64 = rng.sample(StandardNormal);
                x[i] += self.noise * z;
            }
        }
    }
}

/// Euler-Maruyama integration of `dx_f = -(L_ff x_f + L_fl x_l) dt + sigma dW`
/// with input states held at `input_values`. Requires `dt < 1 / max L_ii`.
pub fn simulate_noisy_consensus(
    g: &Graph,
    s: &[usize],
    input_values: &[f64],
    x0: &[f64],
    config: SimConfig,
    noise_sigma: f64,
    seed: u64,
) -> Result<Trajectory> {
    let steps = config.steps()?;
    let gl = grounded_laplacian(g, s)?;
    if gl.inputs.is_empty() {
        return Err(Error::InvalidParameter("noisy consensus needs at least one input".into()));
    }
    let stepper = Stepper::new(g, &gl, config.dt, noise_sigma)?;
    let mut x = initial_state(g.n(), &gl.inputs, input_values, x0)?;
    let mut drift = vec![0.0; gl.followers.len()];
    let mut rng = chunk_rng(seed, 0);
    let mut times = vec![0.0];
    let mut rows = vec![x.clone()];
    for k in 1..=steps {
        stepper.step(&mut x, &mut drift, &mut rng);
        if k % config.record_every == 0 {
            times.push(k as f64 * config.dt);
            rows.push(x.clone());
        }
    }
    Ok(Trajectory {
        times,
        states: DMatrix::from_fn(rows.len(), g.n(), |k, i| rows[k][i]),
        inputs: gl.inputs,
        input_values: input_values.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceConfig {
    pub dt: f64,
    pub noise_sigma: f64,
    /// Independent replications; the standard error is their spread.
    pub replications: usize,
    /// Thinned samples recorded per replication after burn-in.
    pub samples_per_replication: usize,
}

/// Stationary covariance of the followers estimated from independent
/// noisy-consensus replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub followers: Vec<usize>,
    pub mean: DenseMatrix,
    pub std_error: DenseMatrix,
    /// Discarded time per replication, `10 / lambda_min(L_ff)`.
    pub burn_in: f64,
    /// Time between recorded samples, `1 / (2 lambda_min(L_ff))`.
    pub thinning: f64,
    pub effective_samples: usize,
}

/// Estimates `E[x_f x_f^T]` of the follower deviations at stationarity. The
/// inputs are held at zero, so the stationary mean is zero.
pub fn estimate_stationary_covariance(
    g: &Graph,
    s: &[usize],
    config: CovarianceConfig,
    seed: u64,
    exec: Exec,
) -> Result<CovarianceEstimate> {
    if config.replications < 2 || config.samples_per_replication == 0 {
        return Err(Error::InvalidParameter("need at least two replications and one sample each".into()));
    }
    let gl = grounded_laplacian(g, s)?;
    if gl.inputs.is_empty() {
        return Err(Error::InvalidParameter("noisy consensus needs at least one input".into()));
    }
    let lambda_min = gl.l_ff.clone().symmetric_eigen().eigenvalues.min();
    if !(lambda_min > 0.0) {
        return Err(Error::SingularLaplacian);
    }
    let stepper = Stepper::new(g, &gl, config.dt, config.noise_sigma)?;
    let burn_in = 10.0 / lambda_min;
    let thinning = 0.5 / lambda_min;
    let burn_steps = (burn_in / config.dt).ceil() as usize;
    let thin_steps = ((thinning / config.dt).ceil() as usize).max(1);
    let nf = gl.followers.len();
    let per_rep = exec.map_range(config.replications, |rep| {
        let mut rng = chunk_rng(seed, rep as u64);
        let mut x = vec![0.0; g.n()];
        let mut drift = vec![0.0; nf];
        for _ in 0..burn_steps {
            stepper.step(&mut x, &mut drift, &mut rng);
        }
        let mut acc = DMatrix::<f64>::zeros(nf, nf);
        for _ in 0..config.samples_per_replication {
            for _ in 0..thin_steps {
                stepper.step(&mut x, &mut drift, &mut rng);
            }
            let xf = DVector::from_fn(nf, |r, _| x[gl.followers[r]]);
            acc += &xf * xf.transpose();
        }
        acc / config.samples_per_replication as f64
    });
    let r = config.replications as f64;
    let mean = per_rep.iter().fold(DMatrix::zeros(nf, nf), |a, m| a + m) / r;
    let var = per_rep.iter().fold(DMatrix::zeros(nf, nf), |a, m| {
        let d = m - &mean;
        a + d.component_mul(&d)
    }) / (r - 1.0);
    Ok(CovarianceEstimate {
        followers: gl.followers,
        mean,
        std_error: (var / r).map(f64::sqrt),
        burn_in,
        thinning,
        effective_samples: config.replications * config.samples_per_replication,
    })
}

/// Deterministic consensus `x(t + dt) = e^{-L dt} x(t)` with input rows of
/// `L` zeroed, exact at the sample instants.
pub fn simulate_weighted_consensus(
    g: &Graph,
    s: &[usize],
    input_values: &[f64],
    x0: &[f64],
    config: SimConfig,
) -> Result<Trajectory> {
    let steps = config.steps()?;
    let gl = grounded_laplacian(g, s)?;
    let x = initial_state(g.n(), &gl.inputs, input_values, x0)?;
    let p = numerics::expm(&(-gl.full() * config.dt))?;
    let mut x = DVector::from_vec(x);
    let mut times = vec![0.0];
    let mut rows = vec![x.clone()];
    for k in 1..=steps {
        x = &p * x;
        if k % config.record_every == 0 {
            times.push(k as f64 * config.dt);
            rows.push(x.clone());
        }
    }
    Ok(Trajectory {
        times,
        states: DMatrix::from_fn(rows.len(), g.n(), |k, i| rows[k][i]),
        inputs: gl.inputs,
        input_values: input_values.to_vec(),
    })
}

/// `sum_i dist(x_i, [lo, hi])^p` over followers, with `[lo, hi]` the range of
/// the input values.
pub fn containment_error(state: &[f64], inputs: &[usize], input_values: &[f64], p: f64) -> f64 {
    let lo = input_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = input_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let is_input = set::membership(state.len(), inputs);
    state
        .iter()
        .enumerate()
        .filter(|&(i, _)| !is_input[i])
        .map(|(_, &x)| {
            let d = if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                0.0
            };
            d.powf(p)
        })
        .sum()
}

/// `tau`-step absorption statistics of the walk with transition matrix
/// `P = e^{-L delta}`, input rows of `L` zeroed so inputs absorb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkProbabilities {
    pub followers: Vec<usize>,
    pub inputs: Vec<usize>,
    /// `g[(r, c)]`: probability of being at follower `c` after `tau` steps
    /// from follower `r`.
    pub g: DenseMatrix,
    /// Mass still on followers: row sums of `g`.
    pub h: Vec<f64>,
    /// `absorbed[(r, c)]`: probability of sitting at input `c`.
    pub absorbed: DenseMatrix,
}

pub fn transition_matrix(g: &Graph, s: &[usize], delta: f64) -> Result<DenseMatrix> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let gl = grounded_laplacian(g, s)?;
    numerics::expm(&(-gl.full() * delta))
}

pub fn absorbing_walk_probabilities(g: &Graph, s: &[usize], delta: f64, tau: u64) -> Result<WalkProbabilities> {
    let inputs = set::normalize(g.n(), s)?;
    let followers = set::complement(g.n(), &inputs);
    let pt = numerics::matrix_power(&transition_matrix(g, &inputs, delta)?, tau)?;
    let rows = pt.select_rows(&followers);
    let gm = rows.select_columns(&followers);
    let h = (0..followers.len()).map(|r| gm.row(r).sum()).collect();
    let absorbed = rows.select_columns(&inputs);
    Ok(WalkProbabilities { followers, inputs, g: gm, h, absorbed })
}

/// Monte-Carlo estimate of row `start` of `P^tau`: the fraction of `walks`
/// walks from `start` ending at each node, with binomial standard errors.
pub fn walk_distribution_mc(
    g: &Graph,
    s: &[usize],
    delta: f64,
    tau: u64,
    start: usize,
    walks: u64,
    seed: u64,
    exec: Exec,
) -> Result<Vec<Estimate>> {
    let n = g.n();
    if start >= n {
        return Err(Error::UnknownNode(start));
    }
    if walks == 0 {
        return Err(Error::InvalidParameter("need at least one walk".into()));
    }
    let p = transition_matrix(g, s, delta)?;
    let dists = (0..n)
        .map(|i| {
            WeightedIndex::new(p.row(i).iter().map(|&x| x.max(0.0)))
                .map_err(|e| Error::InvalidParameter(format!("transition row {i}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let chunks = walks.div_ceil(WALK_CHUNK);
    let counts = exec.map_range(chunks as usize, |c| {
        let mut rng = chunk_rng(seed, c as u64);
        let mut counts = vec![0u64; n];
        for _ in 0..WALK_CHUNK.min(walks - c as u64 * WALK_CHUNK) {
            let mut v = start;
            for _ in 0..tau {
                v = dists[v].sample(&mut rng);
            }
            counts[v] += 1;
        }
        counts
    });
    let mut total = vec![0u64; n];
    for c in counts {
        for (t, x) in total.iter_mut().zip(c) {
            *t += x;
        }
    }
    let w = walks as f64;
    Ok(total
        .into_iter()
        .map(|c| {
            let mean = c as f64 / w;
            Estimate { mean, std_error: (mean * (1.0 - mean) / w).sqrt(), samples: walks }
        })
        .collect())
}
