//! Controllability metrics: Kalman rank, Gramian energy metrics, the
//! regularized minimum-energy function, and structural controllability via
//! accessibility and bipartite matching.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::{Bipartite, Matching};
use crate::numerics::{self, DenseMatrix, RankTolerance};
use crate::set;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemVariant {
    /// `A = W` for every input set; `B` holds the identity columns of `S`.
    Actuated,
    /// `A = W[F, F]`, `B = W[F, S]` with `F` the followers.
    Grounded,
}

/// Linear network system `x' = A x + B u` derived from a full weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub w: DenseMatrix,
    pub variant: SystemVariant,
    /// Finite horizon `(t0, t1)` used when a Gramian cannot be computed from
    /// the Lyapunov equation, and by the minimum-energy metric.
    pub horizon: (f64, f64),
}

impl LinearSystem {
    pub fn new(w: DenseMatrix, variant: SystemVariant) -> Result<Self> {
        if w.nrows() != w.ncols() {
            return Err(Error::DimensionMismatch("system matrix must be square".into()));
        }
        Ok(Self { w, variant, horizon: (0.0, 1.0) })
    }

    pub fn with_horizon(mut self, t0: f64, t1: f64) -> Result<Self> {
        if !(t1 > t0) {
            return Err(Error::InvalidParameter(format!("need t1 > t0, got [{t0}, {t1}]")));
        }
        self.horizon = (t0, t1);
        Ok(self)
    }

    /// Grounded consensus system `W = -L`.
    pub fn consensus(g: &Graph) -> Self {
        Self { w: -g.laplacian(), variant: SystemVariant::Grounded, horizon: (0.0, 1.0) }
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    /// `(A, B)` for input set `s`.
    pub fn pair(&self, s: &[usize]) -> Result<(DenseMatrix, DenseMatrix)> {
        let n = self.n();
        let s = set::normalize(n, s)?;
        match self.variant {
            SystemVariant::Actuated => {
                let mut b = DMatrix::zeros(n, s.len());
                for (c, &v) in s.iter().enumerate() {
                    b[(v, c)] = 1.0;
                }
                Ok((self.w.clone(), b))
            }
            SystemVariant::Grounded => {
                let f = set::complement(n, &s);
                let a = self.w.select_rows(&f).select_columns(&f);
                let b = self.w.select_rows(&f).select_columns(&s);
                Ok((a, b))
            }
        }
    }
}

/// `[B, AB, ..., A^{d-1} B]` for a `d`-dimensional state.
pub fn controllability_matrix(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let d = a.nrows();
    let m = b.ncols();
    let mut c = DMatrix::zeros(d, d * m);
    let mut block = b.clone();
    for k in 0..d {
        c.view_mut((0, k * m), (d, m)).copy_from(&block);
        block = a * block;
    }
    c
}

/// Numerical rank of the controllability matrix for input set `s`.
pub fn ctrb_rank(sys: &LinearSystem, s: &[usize]) -> Result<usize> {
    let (a, b) = sys.pair(s)?;
    Ok(numerics::numerical_rank(&controllability_matrix(&a, &b), RankTolerance::Default))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GramianKind {
    Infinite,
    FiniteHorizon,
}

/// Controllability Gramian of `(A, B)`: the Lyapunov solution when `A` is
/// Hurwitz, otherwise the finite-horizon Gramian over `horizon`.
pub fn gramian(a: &DenseMatrix, b: &DenseMatrix, horizon: (f64, f64)) -> Result<(DenseMatrix, GramianKind)> {
    if numerics::is_hurwitz(a)? {
        Ok((numerics::lyapunov_gramian(a, b)?, GramianKind::Infinite))
    } else {
        let g = numerics::finite_horizon_gramian(a, b, horizon.0, horizon.1)?;
        Ok((g, GramianKind::FiniteHorizon))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramianMetrics {
    /// `trace(X W X^T)`.
    pub h2: f64,
    /// `trace(W^{-1})`.
    pub avg_energy: f64,
    pub kind: GramianKind,
}

fn trace_weighted(w: &DenseMatrix, x: Option<&DenseMatrix>) -> Result<f64> {
    match x {
        None => Ok(w.trace()),
        Some(x) => {
            if x.ncols() != w.nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "output matrix has {} columns, state dimension is {}",
                    x.ncols(),
                    w.nrows()
                )));
            }
            Ok((x * w * x.transpose()).trace())
        }
    }
}

fn trace_inverse_gramian(w: &DenseMatrix) -> Result<f64> {
    let d = w.nrows();
    if d == 0 {
        return Ok(0.0);
    }
    let eig = w.clone().symmetric_eigen().eigenvalues;
    let hi = eig.iter().cloned().fold(0.0, f64::max);
    let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(hi > 0.0) || lo <= d as f64 * f64::EPSILON * hi {
        return Err(Error::GramianSingular);
    }
    numerics::inverse_spd(w).map(|inv| inv.trace()).map_err(|_| Error::GramianSingular)
}

/// `h2 = trace(X W_S X^T)`; `x = None` means `X = I`.
pub fn gramian_h2(sys: &LinearSystem, s: &[usize], x: Option<&DenseMatrix>) -> Result<f64> {
    let (a, b) = sys.pair(s)?;
    let (w, _) = gramian(&a, &b, sys.horizon)?;
    trace_weighted(&w, x)
}

/// `trace(W_S^{-1})`; fails with [`Error::GramianSingular`] for an
/// uncontrollable pair.
pub fn gramian_avg_energy(sys: &LinearSystem, s: &[usize]) -> Result<f64> {
    let (a, b) = sys.pair(s)?;
    let (w, _) = gramian(&a, &b, sys.horizon)?;
    trace_inverse_gramian(&w)
}

pub fn gramian_metrics(sys: &LinearSystem, s: &[usize], x: Option<&DenseMatrix>) -> Result<GramianMetrics> {
    let (a, b) = sys.pair(s)?;
    let (w, kind) = gramian(&a, &b, sys.horizon)?;
    Ok(GramianMetrics { h2: trace_weighted(&w, x)?, avg_energy: trace_inverse_gramian(&w)?, kind })
}

/// Boundary conditions and regularizer of the minimum-energy problem.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTarget {
    pub x0: DVector<f64>,
    pub x1: DVector<f64>,
    pub epsilon: f64,
}

impl EnergyTarget {
    pub fn new(x0: DVector<f64>, x1: DVector<f64>, epsilon: f64) -> Result<Self> {
        if x0.len() != x1.len() {
            return Err(Error::DimensionMismatch("x0 and x1 differ in length".into()));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        Ok(Self { x0, x1, epsilon })
    }
}

/// Regularized minimum-energy set function under diagonal actuation:
///
/// `f(S) = v^T (G + e I)^{-1} v + e * sum_i vb_i^T (G + e^2 I)^{-1} vb_i`
///
/// with `G = sum_{i in S} G_i`, `G_i` the finite-horizon Gramian of input
/// `e_i` for `A = W`, `v = x1 - e^{A (t1 - t0)} x0`, and `vb_i` an
/// orthonormal basis of the complement of `v`.
#[derive(Debug, Clone)]
pub struct MinEnergy {
    gammas: Vec<DenseMatrix>,
    v: DVector<f64>,
    basis: DenseMatrix,
    epsilon: f64,
}

impl MinEnergy {
    pub fn new(sys: &LinearSystem, target: &EnergyTarget) -> Result<Self> {
        Self::build(sys, target, None)
    }

    /// Uses the caller's orthonormal complement basis (columns).
    pub fn with_basis(sys: &LinearSystem, target: &EnergyTarget, basis: DenseMatrix) -> Result<Self> {
        Self::build(sys, target, Some(basis))
    }

    fn build(sys: &LinearSystem, target: &EnergyTarget, basis: Option<DenseMatrix>) -> Result<Self> {
        let n = sys.n();
        if target.x0.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "target has dimension {}, system has {n}",
                target.x0.len()
            )));
        }
        let (t0, t1) = sys.horizon;
        let a = &sys.w;
        let v = &target.x1 - numerics::expm(&(a * (t1 - t0)))? * &target.x0;
        let gammas = (0..n)
            .map(|i| {
                let mut q = DMatrix::zeros(n, n);
                q[(i, i)] = 1.0;
                numerics::finite_horizon_gramian_q(a, &q, t1 - t0)
            })
            .collect::<Result<Vec<_>>>()?;
        let basis = match basis {
            Some(b) => {
                let expected = n.saturating_sub(1);
                if b.nrows() != n || b.ncols() != expected {
                    return Err(Error::DimensionMismatch(format!("basis must be {n}x{expected}")));
                }
                b
            }
            None => complement_basis(&v),
        };
        Ok(Self { gammas, v, basis, epsilon: target.epsilon })
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn evaluate(&self, s: &[usize]) -> Result<f64> {
        let n = self.n();
        let s = set::normalize(n, s)?;
        let mut gamma = DMatrix::zeros(n, n);
        for &i in &s {
            gamma += &self.gammas[i];
        }
        let eps = self.epsilon;
        let id = DMatrix::<f64>::identity(n, n);
        let first = {
            let m = &gamma + &id * eps;
            let x = numerics::solve_spd(&m, &DMatrix::from_column_slice(n, 1, self.v.as_slice()))?;
            self.v.dot(&x.column(0))
        };
        let second = if self.basis.ncols() == 0 {
            0.0
        } else {
            let m = &gamma + &id * (eps * eps);
            let x = numerics::solve_spd(&m, &self.basis)?;
            (self.basis.transpose() * x).trace()
        };
        Ok(first + eps * second)
    }
}

/// Orthonormal basis (as columns) of the orthogonal complement of `v`, from
/// the Householder reflector mapping `v` onto a coordinate axis. A zero `v`
/// yields `e_2, ..., e_n`.
pub fn complement_basis(v: &DVector<f64>) -> DenseMatrix {
    let n = v.len();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let norm = v.norm();
    if norm == 0.0 {
        return DMatrix::identity(n, n).columns(1, n - 1).clone_owned();
    }
    let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut u = v.clone();
    u[0] += sign * norm;
    let u = &u / u.norm();
    let h = DMatrix::identity(n, n) - (&u * u.transpose()) * 2.0;
    h.columns(1, n - 1).clone_owned()
}

pub fn min_energy_metric(sys: &LinearSystem, s: &[usize], target: &EnergyTarget) -> Result<f64> {
    MinEnergy::new(sys, target)?.evaluate(s)
}

/// A set `A` of followers whose in-neighborhood `N(A)` is smaller than `A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dilation {
    pub set: Vec<usize>,
    pub neighbors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralReport {
    pub inputs: Vec<usize>,
    pub accessible: bool,
    pub inaccessible: Vec<usize>,
    pub dilation_free: bool,
    pub dilation: Option<Dilation>,
    pub controllable: bool,
    /// Matched `(source, follower)` edges of a maximum matching.
    pub max_matching: Vec<(usize, usize)>,
    pub gci: usize,
}

/// Followers as left vertices, every node as a right vertex, and an edge
/// `(z_j, u_i)` for each graph edge `i -> j`.
fn follower_bipartite(g: &Graph, followers: &[usize]) -> Bipartite {
    let adj = followers
        .iter()
        .map(|&j| g.in_neighbors(j).iter().map(|&(i, _)| i).collect())
        .collect();
    Bipartite::new(g.n(), adj)
}

fn follower_matching(g: &Graph, followers: &[usize]) -> (Bipartite, Matching) {
    let b = follower_bipartite(g, followers);
    let m = b.maximum_matching();
    (b, m)
}

/// Size of a maximum matching of `nodes` into their in-neighbors: the
/// transversal-matroid rank of `nodes`.
pub fn matched_rank(g: &Graph, nodes: &[usize]) -> usize {
    follower_matching(g, nodes).1.size
}

/// Accessibility and dilation-freeness of `g` from input set `s`. Undirected
/// graphs are treated as bidirected.
pub fn structural_report(g: &Graph, s: &[usize]) -> Result<StructuralReport> {
    let inputs = set::normalize(g.n(), s)?;
    let followers = set::complement(g.n(), &inputs);
    let reach = g.reachable_from(&inputs);
    let inaccessible: Vec<usize> = (0..g.n()).filter(|&v| !reach[v]).collect();
    let (b, m) = follower_matching(g, &followers);
    let dilation = m.unmatched_left().first().map(|&free| {
        let (a, na) = b.hall_witness(&m, free);
        Dilation { set: a.iter().map(|&l| followers[l]).collect(), neighbors: na }
    });
    let accessible = inaccessible.is_empty();
    let dilation_free = dilation.is_none();
    let max_matching = m.pairs().into_iter().map(|(l, r)| (r, followers[l])).collect();
    Ok(StructuralReport {
        gci: m.size + inputs.len(),
        inputs,
        accessible,
        inaccessible,
        dilation_free,
        dilation,
        controllable: accessible && dilation_free,
        max_matching,
    })
}

/// Graph controllability index `r(V \ S) + |S|`.
pub fn gci(g: &Graph, s: &[usize]) -> Result<usize> {
    let inputs = set::normalize(g.n(), s)?;
    let followers = set::complement(g.n(), &inputs);
    Ok(matched_rank(g, &followers) + inputs.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralInputs {
    pub inputs: Vec<usize>,
    /// `false` means the matching rule is only advisory; consult `report`.
    pub strongly_connected: bool,
    pub report: StructuralReport,
}

/// Minimum structural input set: the nodes left unmatched by a maximum
/// matching of every node into its in-neighbors, or the lowest-id node when
/// the matching is perfect.
pub fn min_input_set_structural(g: &Graph) -> Result<StructuralInputs> {
    let all: Vec<usize> = (0..g.n()).collect();
    let (_, m) = follower_matching(g, &all);
    let mut inputs = m.unmatched_left();
    if inputs.is_empty() && g.n() > 0 {
        inputs.push(0);
    }
    let report = structural_report(g, &inputs)?;
    Ok(StructuralInputs { inputs, strongly_connected: g.is_strongly_connected(), report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{directed_ring, named_graph, NamedGraph};
    use approx::assert_relative_eq;

    fn one_based_graph(n: usize, pairs: &[(usize, usize)]) -> Graph {
        let pairs: Vec<_> = pairs.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
        Graph::from_pairs(n, true, &pairs).unwrap()
    }

    fn accessibility_example() -> Graph {
        one_based_graph(6, &[(6, 2), (6, 3), (2, 1), (3, 1), (1, 2), (5, 4), (4, 5)])
    }

    // n1 and n3 hear only from the input n6.
    fn dilation_example() -> Graph {
        one_based_graph(6, &[(6, 1), (6, 3), (6, 2), (2, 4), (4, 5), (5, 2)])
    }

    #[test]
    fn rank_examples() {
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let sys = LinearSystem::new(w, SystemVariant::Actuated).unwrap();
        assert_eq!(ctrb_rank(&sys, &[]).unwrap(), 0);
        assert_eq!(ctrb_rank(&sys, &[0]).unwrap(), 2);
        assert_eq!(ctrb_rank(&sys, &[0, 1]).unwrap(), 2);
    }

    #[test]
    fn decoupled_gramian_metrics() {
        let sys = LinearSystem::new(-DMatrix::identity(2, 2), SystemVariant::Actuated).unwrap();
        let m = gramian_metrics(&sys, &[0, 1], None).unwrap();
        assert_relative_eq!(m.h2, 1.0, epsilon = 1e-12);
        assert_relative_eq!(m.avg_energy, 4.0, epsilon = 1e-12);
        assert_eq!(m.kind, GramianKind::Infinite);
        assert_eq!(gramian_metrics(&sys, &[], None), Err(Error::GramianSingular));
        assert_eq!(gramian_avg_energy(&sys, &[0]), Err(Error::GramianSingular));
    }

    #[test]
    fn unstable_system_uses_finite_horizon() {
        let sys = LinearSystem::new(DMatrix::from_element(1, 1, 0.0), SystemVariant::Actuated)
            .unwrap()
            .with_horizon(0.0, 2.0)
            .unwrap();
        let m = gramian_metrics(&sys, &[0], None).unwrap();
        assert_eq!(m.kind, GramianKind::FiniteHorizon);
        assert_relative_eq!(m.h2, 2.0, epsilon = 1e-12);
        assert_relative_eq!(m.avg_energy, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn path_grounded_gramian_matches_simpson_quadrature() {
        let g = named_graph(NamedGraph::Path, 3).unwrap();
        let sys = LinearSystem::consensus(&g);
        let (a, b) = sys.pair(&[2]).unwrap();
        // Composite Simpson on [0, 60] of e^{At} B B^T e^{A^T t}.
        let steps = 6000;
        let h = 60.0 / steps as f64;
        let step = numerics::expm(&(&a * h)).unwrap();
        let bbt = &b * b.transpose();
        let mut e = DMatrix::identity(2, 2);
        let mut acc = DMatrix::zeros(2, 2);
        for k in 0..=steps {
            let wgt = if k == 0 || k == steps { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += (&e * &bbt * e.transpose()) * wgt;
            e = &step * e;
        }
        let quad = acc * (h / 3.0);
        let m = gramian_metrics(&sys, &[2], None).unwrap();
        assert!((m.h2 - quad.trace()).abs() < 1e-7);
        let inv = quad.try_inverse().unwrap();
        assert!((m.avg_energy - inv.trace()).abs() < 1e-7 * inv.trace());
    }

    #[test]
    fn scalar_min_energy() {
        let sys = LinearSystem::new(DMatrix::from_element(1, 1, -1.0), SystemVariant::Actuated)
            .unwrap()
            .with_horizon(0.0, 30.0)
            .unwrap();
        for eps in [1e-2, 1e-4, 1.0] {
            let target =
                EnergyTarget::new(DVector::from_element(1, 0.0), DVector::from_element(1, 1.0), eps).unwrap();
            let f = min_energy_metric(&sys, &[0], &target).unwrap();
            let gamma = (1.0 - (-60.0f64).exp()) / 2.0;
            assert!((f - 1.0 / (gamma + eps)).abs() < 1e-6);
        }
    }

    #[test]
    fn empty_set_min_energy_closed_form() {
        let w = DMatrix::from_row_slice(3, 3, &[-1.0, 0.5, 0.0, 0.2, -2.0, 0.3, 0.0, 0.4, -1.5]);
        let sys = LinearSystem::new(w.clone(), SystemVariant::Actuated).unwrap();
        let eps = 0.1;
        let x0 = DVector::from_vec(vec![1.0, -1.0, 0.5]);
        let x1 = DVector::from_vec(vec![0.0, 2.0, 1.0]);
        let target = EnergyTarget::new(x0.clone(), x1.clone(), eps).unwrap();
        let f = min_energy_metric(&sys, &[], &target).unwrap();
        let v = &x1 - numerics::expm(&w).unwrap() * &x0;
        let expected = v.norm_squared() / eps + eps * 2.0 / (eps * eps);
        assert!((f - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn zero_v_is_defined() {
        let sys = LinearSystem::new(-DMatrix::identity(2, 2), SystemVariant::Actuated).unwrap();
        let zero = DVector::zeros(2);
        let target = EnergyTarget::new(zero.clone(), zero, 0.5).unwrap();
        let me = MinEnergy::new(&sys, &target).unwrap();
        assert!(me.evaluate(&[0]).unwrap().is_finite());
    }

    #[test]
    fn min_energy_basis_invariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 4;
        let w = DMatrix::from_fn(n, n, |i, j| if i == j { -2.0 } else { rng.random::<f64>() - 0.5 });
        let sys = LinearSystem::new(w, SystemVariant::Actuated).unwrap();
        let x0 = DVector::from_fn(n, |_, _| rng.random::<f64>());
        let x1 = DVector::from_fn(n, |_, _| rng.random::<f64>());
        let target = EnergyTarget::new(x0, x1, 1e-2).unwrap();
        let base = MinEnergy::new(&sys, &target).unwrap();
        let b0 = complement_basis(base.v());
        for _ in 0..2 {
            // Rotate the basis by a random orthogonal matrix.
            let r = DMatrix::from_fn(n - 1, n - 1, |_, _| rng.random::<f64>() - 0.5);
            let q = r.qr().q();
            let rotated = &b0 * q;
            let other = MinEnergy::with_basis(&sys, &target, rotated).unwrap();
            for s in [vec![], vec![1], vec![0, 3]] {
                let a = base.evaluate(&s).unwrap();
                let b = other.evaluate(&s).unwrap();
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn accessibility_example_report() {
        let r = structural_report(&accessibility_example(), &[5]).unwrap();
        assert!(!r.accessible);
        assert_eq!(r.inaccessible, vec![3, 4]);
        assert!(!r.controllable);
        // Formula value on an inaccessible graph.
        assert_eq!(r.gci, 6);
    }

    #[test]
    fn dilation_example_witness() {
        let r = structural_report(&dilation_example(), &[5]).unwrap();
        assert!(!r.dilation_free);
        let d = r.dilation.unwrap();
        assert_eq!(d.set, vec![0, 2]);
        assert_eq!(d.neighbors, vec![5]);
        assert!(!r.controllable);
    }

    #[test]
    fn directed_ring_is_controllable_from_one_node() {
        let g = directed_ring(4).unwrap();
        let r = structural_report(&g, &[0]).unwrap();
        assert!(r.accessible && r.dilation_free && r.controllable);
        assert_eq!(r.max_matching, vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(gci(&g, &[0]).unwrap(), 4);
    }

    #[test]
    fn gci_examples() {
        let g = directed_ring(5).unwrap();
        assert_eq!(gci(&g, &[0, 1, 2, 3, 4]).unwrap(), 5);
        let iso = Graph::from_pairs(2, true, &[]).unwrap();
        assert_eq!(gci(&iso, &[0]).unwrap(), 1);
    }

    #[test]
    fn structural_inputs() {
        for n in 2..8 {
            let r = min_input_set_structural(&directed_ring(n).unwrap()).unwrap();
            assert_eq!(r.inputs.len(), 1);
            assert!(r.strongly_connected && r.report.controllable);
        }
        let single = Graph::from_pairs(1, true, &[]).unwrap();
        assert_eq!(min_input_set_structural(&single).unwrap().inputs, vec![0]);
    }

    #[test]
    fn out_star_needs_center_and_all_but_one_leaf() {
        let k = 4;
        let pairs: Vec<_> = (1..=k).map(|i| (0, i)).collect();
        let g = Graph::from_pairs(k + 1, true, &pairs).unwrap();
        let r = min_input_set_structural(&g).unwrap();
        assert!(!r.strongly_connected);
        assert!(r.report.controllable);
        assert_eq!(r.inputs.len(), k);
        assert!(r.inputs.contains(&0));
        // Brute force: no smaller controllable input set exists.
        for mask in 0u32..(1 << (k + 1)) {
            let s = set::from_mask(mask);
            if s.len() < k {
                assert!(!structural_report(&g, &s).unwrap().controllable);
            }
        }
    }
}
