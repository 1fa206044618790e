//! Performance metrics of an input set: noise robustness, Kalman-filter
//! log-determinant error, and the random-walk convergence-error bound, plus a
//! Monte-Carlo commute-time estimator.

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{grounded_laplacian, Graph};
use crate::numerics::{self, DenseMatrix};
use crate::par::Exec;
use crate::set;

fn inverse_grounded(l_ff: &DenseMatrix, symmetric: bool) -> Result<DenseMatrix> {
    if symmetric {
        numerics::inverse_spd(l_ff).map_err(|_| Error::SingularLaplacian)
    } else {
        l_ff.clone().try_inverse().ok_or(Error::SingularLaplacian)
    }
}

/// `R(S) = trace(L_ff^{-1})`, twice the total steady-state variance of the
/// followers under unit white noise. `R(V) = 0`.
pub fn noise_variance(g: &Graph, s: &[usize]) -> Result<f64> {
    let gl = grounded_laplacian(g, s)?;
    if gl.inputs.is_empty() {
        return Err(Error::SingularLaplacian);
    }
    Ok(inverse_grounded(&gl.l_ff, !g.is_directed())?.trace())
}

/// `(L_ff^{-1})_{uu}`, the effective resistance between follower `u` and the
/// input set.
pub fn node_noise_variance(g: &Graph, s: &[usize], u: usize) -> Result<f64> {
    let gl = grounded_laplacian(g, s)?;
    if u >= g.n() {
        return Err(Error::UnknownNode(u));
    }
    let Some(row) = gl.row_of[u] else {
        return Err(Error::InputNode(u));
    };
    if gl.inputs.is_empty() {
        return Err(Error::SingularLaplacian);
    }
    if g.is_directed() {
        return Ok(inverse_grounded(&gl.l_ff, false)?[(row, row)]);
    }
    let mut e = DMatrix::zeros(gl.followers.len(), 1);
    e[(row, 0)] = 1.0;
    let x = numerics::solve_spd(&gl.l_ff, &e).map_err(|_| Error::SingularLaplacian)?;
    Ok(x[(row, 0)])
}

/// Linear system `x_{i+1} = A x_i + w_i` observed through selected state
/// coordinates with measurement noise variance `sigma2` over steps `0..=k`.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanSetup {
    pub a: DenseMatrix,
    /// Covariance of `(x_0, w_0, ..., w_{k-1})`, either the full
    /// `n(k+1)`-square matrix or an `n`-square block repeated on the diagonal.
    pub prior_cov: DenseMatrix,
    pub sigma2: f64,
    pub horizon: usize,
}

impl KalmanSetup {
    pub fn new(a: DenseMatrix, prior_cov: DenseMatrix, sigma2: f64, horizon: usize) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch("A must be square".into()));
        }
        let full = n * (horizon + 1);
        let d = prior_cov.nrows();
        if prior_cov.ncols() != d || (d != n && d != full) {
            return Err(Error::DimensionMismatch(format!("prior covariance must be {n}x{n} or {full}x{full}")));
        }
        if !(sigma2 > 0.0) {
            return Err(Error::InvalidParameter("sigma2 must be positive".into()));
        }
        numerics::log_det_spd(&prior_cov)?;
        Ok(Self { a, prior_cov, sigma2, horizon })
    }

    /// Identity prior and unit measurement noise.
    pub fn with_defaults(a: DenseMatrix, horizon: usize) -> Result<Self> {
        let n = a.nrows();
        Self::new(a, DMatrix::identity(n, n), 1.0, horizon)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    fn full_prior(&self) -> DenseMatrix {
        let n = self.n();
        let dim = n * (self.horizon + 1);
        if self.prior_cov.nrows() == dim {
            return self.prior_cov.clone();
        }
        let mut c = DMatrix::zeros(dim, dim);
        for b in 0..=self.horizon {
            c.view_mut((b * n, b * n), (n, n)).copy_from(&self.prior_cov);
        }
        c
    }

    /// `L_i` maps `(x_0, w_0, ..., w_{k-1})` to `x_i`.
    fn propagation(&self, i: usize, powers: &[DenseMatrix]) -> DenseMatrix {
        let n = self.n();
        let mut l = DMatrix::zeros(n, n * (self.horizon + 1));
        l.view_mut((0, 0), (n, n)).copy_from(&powers[i]);
        for j in 0..i {
            l.view_mut((0, (j + 1) * n), (n, n)).copy_from(&powers[i - 1 - j]);
        }
        l
    }

    /// Stacked observation matrix `O_k` with rows `C L_i`, `i = 0..=k`.
    pub fn observation_matrix(&self, s: &[usize]) -> Result<DenseMatrix> {
        let n = self.n();
        let s = set::normalize(n, s)?;
        let k = self.horizon;
        let mut powers = vec![DMatrix::identity(n, n)];
        for i in 1..=k {
            powers.push(&self.a * &powers[i - 1]);
        }
        let mut o = DMatrix::zeros(s.len() * (k + 1), n * (k + 1));
        for i in 0..=k {
            let l = self.propagation(i, &powers);
            for (r, &v) in s.iter().enumerate() {
                o.row_mut(i * s.len() + r).copy_from(&l.row(v));
            }
        }
        Ok(o)
    }
}

/// `log det` of the posterior covariance of `(x_0, w_0, ..., w_{k-1})`
/// after observing the states in `s` at every step.
pub fn kalman_log_det(setup: &KalmanSetup, s: &[usize]) -> Result<f64> {
    let c = setup.full_prior();
    let o = setup.observation_matrix(s)?;
    if o.nrows() == 0 {
        return numerics::log_det_spd(&c);
    }
    let oc = &o * &c;
    let m = &oc * o.transpose() + DMatrix::identity(o.nrows(), o.nrows()) * setup.sigma2;
    let sigma = &c - oc.transpose() * numerics::solve_spd(&m, &oc)?;
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    numerics::log_det_spd(&sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceParams {
    pub delta: f64,
    pub p: f64,
    /// Walk length `tau = round(t / delta)`.
    pub tau: u64,
}

impl ConvergenceParams {
    pub fn new(t: f64, delta: f64, p: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter("delta must be positive".into()));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter("t must be nonnegative".into()));
        }
        Self::with_steps((t / delta).round() as u64, delta, p)
    }

    pub fn with_steps(tau: u64, delta: f64, p: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter("delta must be positive".into()));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter("p must be at least 1".into()));
        }
        Ok(Self { delta, p, tau })
    }

    /// `0.1 / max_i L_ii`, or `0.1` for an edgeless graph.
    pub fn default_delta(g: &Graph) -> f64 {
        let d = g.max_laplacian_diagonal();
        if d > 0.0 {
            0.1 / d
        } else {
            0.1
        }
    }

    pub fn t(&self) -> f64 {
        self.tau as f64 * self.delta
    }
}

/// Follower block of `e^{-L delta}` with input rows of `L` zeroed.
pub fn follower_transition(g: &Graph, s: &[usize], delta: f64) -> Result<DenseMatrix> {
    let gl = grounded_laplacian(g, s)?;
    numerics::expm(&(-gl.l_ff * delta))
}

fn bound_from_block(g_block: &DenseMatrix, p: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..g_block.nrows() {
        let row = g_block.row(i);
        let h: f64 = row.iter().sum();
        total += row.iter().map(|x| x.max(0.0).powf(p)).sum::<f64>() + h.max(0.0).powf(p);
    }
    total
}

/// `sum_{i in F} [ sum_{j in F} g_ij^p + h_i^p ]` with `g = (P^tau)_{FF}` and
/// `h_i = sum_{j in F} g_ij`, the probability that a walk from `i` has not
/// been absorbed by the inputs after `tau` steps.
pub fn convergence_bound(g: &Graph, s: &[usize], params: &ConvergenceParams) -> Result<f64> {
    let p_ff = follower_transition(g, s, params.delta)?;
    let g_block = numerics::matrix_power(&p_ff, params.tau)?;
    Ok(bound_from_block(&g_block, params.p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalBound {
    pub value: f64,
    /// Number of terms summed.
    pub steps: u64,
    /// `true` when the step cap was reached before the tail fell below
    /// tolerance; `value` is then a lower bound.
    pub capped: bool,
}

pub const TOTAL_BOUND_TOLERANCE: f64 = 1e-6;

/// Left Riemann sum `delta * sum_{k >= 0} f_k` of the convergence bound at
/// walk lengths `k`, stopped once a term falls below `1e-6` of the running
/// sum or after `max_steps` terms.
pub fn total_convergence_bound(g: &Graph, s: &[usize], delta: f64, p: f64, max_steps: u64) -> Result<TotalBound> {
    let params = ConvergenceParams::with_steps(0, delta, p)?;
    let inputs = set::normalize(g.n(), s)?;
    if inputs.is_empty() {
        return Err(Error::InvalidParameter("total convergence bound needs a nonempty input set".into()));
    }
    let p_ff = follower_transition(g, &inputs, params.delta)?;
    let mut block = DMatrix::identity(p_ff.nrows(), p_ff.nrows());
    let mut sum = 0.0;
    for k in 0..max_steps {
        let term = bound_from_block(&block, p);
        sum += term;
        if term <= TOTAL_BOUND_TOLERANCE * sum {
            return Ok(TotalBound { value: delta * sum, steps: k + 1, capped: false });
        }
        block = &p_ff * block;
    }
    Ok(TotalBound { value: delta * sum, steps: max_steps, capped: true })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Self { mean, std_error: (var / n).sqrt(), samples: xs.len() as u64 }
    }
}

/// Walks per independent RNG stream in Monte-Carlo estimators.
pub const WALK_CHUNK: u64 = 4096;

/// Random-walk transition sampler on an undirected graph: neighbors chosen
/// in proportion to edge weight.
pub(crate) struct WalkSampler {
    neighbors: Vec<Vec<usize>>,
    dists: Vec<Option<WeightedIndex<f64>>>,
}

impl WalkSampler {
    pub(crate) fn new(g: &Graph) -> Self {
        let neighbors = (0..g.n()).map(|v| g.in_neighbors(v).iter().map(|&(j, _)| j).collect()).collect();
        let dists = (0..g.n())
            .map(|v| WeightedIndex::new(g.in_neighbors(v).iter().map(|&(_, w)| w)).ok())
            .collect();
        Self { neighbors, dists }
    }

    pub(crate) fn step(&self, v: usize, rng: &mut ChaCha8Rng) -> Option<usize> {
        self.dists[v].as_ref().map(|d| self.neighbors[v][d.sample(rng)])
    }
}

pub(crate) fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Monte-Carlo estimate of the commute time between follower `u` and the
/// input set: steps for a walk from `u` to first hit `s`, plus steps from
/// that hitting point back to `u`. Walks exceeding `step_cap` total steps
/// fail with [`Error::WalkStepCap`]. The estimate depends only on `seed`,
/// not on `exec`.
pub fn commute_time_mc(
    g: &Graph,
    s: &[usize],
    u: usize,
    walks: u64,
    seed: u64,
    step_cap: u64,
    exec: Exec,
) -> Result<Estimate> {
    if g.is_directed() {
        return Err(Error::InvalidGraph("commute times need an undirected graph".into()));
    }
    let inputs = set::normalize(g.n(), s)?;
    if u >= g.n() {
        return Err(Error::UnknownNode(u));
    }
    if inputs.contains(&u) {
        return Err(Error::InputNode(u));
    }
    if inputs.is_empty() || walks == 0 {
        return Err(Error::InvalidParameter("need a nonempty input set and at least one walk".into()));
    }
    let is_input = set::membership(g.n(), &inputs);
    let sampler = WalkSampler::new(g);
    let chunks = walks.div_ceil(WALK_CHUNK);
    let results = exec.map_range(chunks as usize, |c| -> Result<Vec<f64>> {
        let mut rng = chunk_rng(seed, c as u64);
        let count = WALK_CHUNK.min(walks - c as u64 * WALK_CHUNK);
        let mut out = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let mut v = u;
            let mut steps = 0u64;
            let mut outbound = true;
            loop {
                if steps >= step_cap {
                    return Err(Error::WalkStepCap(step_cap));
                }
                v = sampler.step(v, &mut rng).ok_or(Error::WalkStepCap(step_cap))?;
                steps += 1;
                if outbound && is_input[v] {
                    outbound = false;
                } else if !outbound && v == u {
                    break;
                }
            }
            out.push(steps as f64);
        }
        Ok(out)
    });
    let mut samples = Vec::with_capacity(walks as usize);
    for r in results {
        samples.extend(r?);
    }
    Ok(Estimate::from_samples(&samples))
}
