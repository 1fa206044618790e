//! Matroids given by independence oracles: uniform, transversal, and the
//! controllability matroid used for joint performance/controllability
//! selection.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::controllability::matched_rank;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::Bipartite;
use crate::set;

pub trait Matroid: Send + Sync {
    /// Ground set is `0..ground_size()`.
    fn ground_size(&self) -> usize;

    /// `x` is sorted and duplicate-free.
    fn is_independent(&self, x: &[usize]) -> bool;

    /// Size of a largest independent subset of `x`. The default builds one
    /// greedily, which is exact for any matroid.
    fn rank(&self, x: &[usize]) -> usize {
        let mut basis = Vec::new();
        for &v in x {
            let cand = set::with(&basis, v);
            if self.is_independent(&cand) {
                basis = cand;
            }
        }
        basis.len()
    }

    fn description(&self) -> String;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Uniform {
    pub n: usize,
    pub k: usize,
}

pub fn uniform_matroid(n: usize, k: usize) -> Uniform {
    Uniform { n, k }
}

impl Matroid for Uniform {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn is_independent(&self, x: &[usize]) -> bool {
        x.len() <= self.k
    }

    fn rank(&self, x: &[usize]) -> usize {
        x.len().min(self.k)
    }

    fn description(&self) -> String {
        format!("uniform(n={}, k={})", self.n, self.k)
    }
}

/// Ground element `j` may be matched to any vertex in `adj[j]`, a subset of
/// `0..left_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransversalInstance {
    pub left_count: usize,
    pub adj: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transversal {
    inst: TransversalInstance,
}

pub fn transversal_matroid(inst: TransversalInstance) -> Result<Transversal> {
    if let Some(&u) = inst.adj.iter().flatten().find(|&&u| u >= inst.left_count) {
        return Err(Error::UnknownNode(u));
    }
    Ok(Transversal { inst })
}

impl Matroid for Transversal {
    fn ground_size(&self) -> usize {
        self.inst.adj.len()
    }

    fn is_independent(&self, x: &[usize]) -> bool {
        self.rank(x) == x.len()
    }

    fn rank(&self, x: &[usize]) -> usize {
        let adj = x.iter().map(|&j| self.inst.adj[j].clone()).collect();
        Bipartite::new(self.inst.left_count, adj).maximum_matching().size
    }

    fn description(&self) -> String {
        format!("transversal(ground={}, left={})", self.inst.adj.len(), self.inst.left_count)
    }
}

/// `X` is independent iff it extends to an input set of size at most `k`
/// whose followers are perfectly matched into their in-neighbors:
/// `max(1, n - r(V \ X)) <= k`, where `r` is the follower matching rank.
/// This is the dual of the transversal matroid of followers truncated to
/// rank `n - k`, so its bases are exactly the dilation-free `k`-sets.
#[derive(Debug, Clone)]
pub struct ControllabilityMatroid {
    g: Graph,
    k: usize,
    /// `false` when `g` is not strongly connected: bases are dilation-free
    /// but not necessarily accessible, and selections must be re-verified.
    pub strongly_connected: bool,
}

pub fn controllability_matroid(g: &Graph, k: usize) -> Result<ControllabilityMatroid> {
    let g = g.to_directed();
    let n = g.n();
    let all: Vec<usize> = (0..n).collect();
    let needed = (n - matched_rank(&g, &all)).max(1).min(n.max(1));
    if k < needed || n == 0 {
        return Err(Error::InfeasibleK { k, needed });
    }
    let m = ControllabilityMatroid { strongly_connected: g.is_strongly_connected(), g, k: k.min(n) };
    if n <= AXIOM_CHECK_LIMIT {
        check_axioms(&m)?;
    }
    Ok(m)
}

impl ControllabilityMatroid {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn graph(&self) -> &Graph {
        &self.g
    }
}

impl Matroid for ControllabilityMatroid {
    fn ground_size(&self) -> usize {
        self.g.n()
    }

    fn is_independent(&self, x: &[usize]) -> bool {
        let n = self.g.n();
        if x.len() > self.k {
            return false;
        }
        let followers = set::complement(n, x);
        (n - matched_rank(&self.g, &followers)).max(1) <= self.k
    }

    fn description(&self) -> String {
        format!("controllability(n={}, k={})", self.g.n(), self.k)
    }
}

/// Memoizes independence and rank queries on the sorted-set key. Safe for
/// concurrent use; `enabled = false` bypasses the cache entirely.
pub struct Cached<M> {
    inner: M,
    enabled: bool,
    independent: RwLock<HashMap<Vec<usize>, bool>>,
    rank: RwLock<HashMap<Vec<usize>, usize>>,
}

impl<M: Matroid> Cached<M> {
    pub fn new(inner: M, enabled: bool) -> Self {
        Self { inner, enabled, independent: RwLock::default(), rank: RwLock::default() }
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }

    pub fn cached_entries(&self) -> usize {
        self.independent.read().unwrap().len() + self.rank.read().unwrap().len()
    }
}

fn memo<V: Copy>(cache: &RwLock<HashMap<Vec<usize>, V>>, key: &[usize], f: impl FnOnce() -> V) -> V {
    if let Some(&v) = cache.read().unwrap().get(key) {
        return v;
    }
    let v = f();
    cache.write().unwrap().insert(key.to_vec(), v);
    v
}

impl<M: Matroid> Matroid for Cached<M> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn is_independent(&self, x: &[usize]) -> bool {
        if !self.enabled {
            return self.inner.is_independent(x);
        }
        memo(&self.independent, x, || self.inner.is_independent(x))
    }

    fn rank(&self, x: &[usize]) -> usize {
        if !self.enabled {
            return self.inner.rank(x);
        }
        memo(&self.rank, x, || self.inner.rank(x))
    }

    fn description(&self) -> String {
        self.inner.description()
    }
}

/// Largest ground set for which [`check_axioms`] enumerates exhaustively.
pub const AXIOM_CHECK_LIMIT: usize = 10;

/// Exhaustive check of M1 (empty set independent), M2 (closed under
/// subsets) and M3 (exchange), plus agreement of `rank` with the largest
/// independent subset.
pub fn check_axioms(m: &dyn Matroid) -> Result<()> {
    let n = m.ground_size();
    if n > AXIOM_CHECK_LIMIT {
        return Err(Error::InstanceTooLarge(format!(
            "axiom check enumerates 2^{n} sets; limit is {AXIOM_CHECK_LIMIT}"
        )));
    }
    let size = 1usize << n;
    let indep: Vec<bool> = (0..size).map(|mask| m.is_independent(&set::from_mask(mask as u32))).collect();
    let name = m.description();
    if !indep[0] {
        return Err(Error::MatroidAxiom(format!("{name}: M1 fails, empty set dependent")));
    }
    for mask in 1..size {
        if !indep[mask] {
            continue;
        }
        for v in 0..n {
            let sub = mask & !(1 << v);
            if sub != mask && !indep[sub] {
                return Err(Error::MatroidAxiom(format!(
                    "{name}: M2 fails, {:?} independent but {:?} dependent",
                    set::from_mask(mask as u32),
                    set::from_mask(sub as u32)
                )));
            }
        }
    }
    let bits = |m: usize| m.count_ones();
    for i in 0..size {
        if !indep[i] {
            continue;
        }
        for j in 0..size {
            if !indep[j] || bits(j) <= bits(i) {
                continue;
            }
            let extra = j & !i;
            let ok = (0..n).any(|e| extra & (1 << e) != 0 && indep[i | (1 << e)]);
            if !ok {
                return Err(Error::MatroidAxiom(format!(
                    "{name}: M3 fails, I = {:?} cannot be augmented from J = {:?}",
                    set::from_mask(i as u32),
                    set::from_mask(j as u32)
                )));
            }
        }
    }
    let mut best = vec![0usize; size];
    for mask in 0..size {
        best[mask] = if indep[mask] {
            bits(mask) as usize
        } else {
            (0..n).filter(|&v| mask & (1 << v) != 0).map(|v| best[mask & !(1 << v)]).max().unwrap_or(0)
        };
        let r = m.rank(&set::from_mask(mask as u32));
        if r != best[mask] {
            return Err(Error::MatroidAxiom(format!(
                "{name}: rank of {:?} is {r}, largest independent subset has {}",
                set::from_mask(mask as u32),
                best[mask]
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controllability::structural_report;
    use crate::graph::{directed_ring, erdos_renyi};

    // Items 1..5 over users 1..6, one-based.
    fn small_instance() -> Transversal {
        let adj = vec![vec![0, 1], vec![1, 2, 3], vec![5], vec![3, 4], vec![5]];
        transversal_matroid(TransversalInstance { left_count: 6, adj }).unwrap()
    }

    #[test]
    fn uniform_examples() {
        let m = uniform_matroid(5, 0);
        assert!(m.is_independent(&[]));
        assert!(!m.is_independent(&[2]));
        let m = uniform_matroid(5, 5);
        assert!(m.is_independent(&[0, 1, 2, 3, 4]));
        let m = uniform_matroid(6, 3);
        assert_eq!(m.rank(&[0, 1]), 2);
        assert_eq!(m.rank(&[0, 1, 2, 3, 4]), 3);
        check_axioms(&m).unwrap();
    }

    #[test]
    fn small_transversal() {
        let m = small_instance();
        assert!(m.is_independent(&[0, 1, 4]));
        assert!(!m.is_independent(&[2, 4]));
        assert!(m.is_independent(&[]));
        check_axioms(&m).unwrap();
    }

    #[test]
    fn axiom_checker_rejects_non_matroid() {
        // {0,1} and {2} maximal: exchange fails for I={2}, J={0,1}.
        struct Bad;
        impl Matroid for Bad {
            fn ground_size(&self) -> usize {
                3
            }
            fn is_independent(&self, x: &[usize]) -> bool {
                x.len() <= 1 || x == [0, 1]
            }
            fn description(&self) -> String {
                "bad".into()
            }
        }
        assert!(matches!(check_axioms(&Bad), Err(Error::MatroidAxiom(msg)) if msg.contains("M3")));
    }

    #[test]
    fn ring_controllability_matroid() {
        let g = directed_ring(5).unwrap();
        let m = controllability_matroid(&g, 1).unwrap();
        assert!(m.strongly_connected);
        for v in 0..5 {
            assert!(m.is_independent(&[v]));
            for u in v + 1..5 {
                assert!(!m.is_independent(&[v, u]));
            }
        }
        let full = controllability_matroid(&g, 5).unwrap();
        assert!(full.is_independent(&[0, 1, 2, 3, 4]));
    }

    #[test]
    fn infeasible_k() {
        let g = directed_ring(4).unwrap();
        assert_eq!(controllability_matroid(&g, 0).unwrap_err(), Error::InfeasibleK { k: 0, needed: 1 });
        let star = Graph::from_pairs(4, true, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(controllability_matroid(&star, 2).unwrap_err(), Error::InfeasibleK { k: 2, needed: 3 });
    }

    #[test]
    fn advisory_flag_off_strongly_connected() {
        let pairs: Vec<_> = [(6, 1), (6, 3), (6, 2), (2, 4), (4, 5), (5, 2)]
            .iter()
            .map(|&(a, b)| (a - 1, b - 1))
            .collect();
        let g = Graph::from_pairs(6, true, &pairs).unwrap();
        let m = controllability_matroid(&g, 3).unwrap();
        assert!(!m.strongly_connected);
    }

    #[test]
    fn bases_are_controllable_sets_on_strong_digraphs() {
        let mut checked = 0;
        for seed in 0..40u64 {
            let n = 4 + (seed as usize % 4);
            let g = erdos_renyi(n, 0.35, seed, true).unwrap();
            if !g.is_strongly_connected() {
                continue;
            }
            for k in 1..=n {
                let Ok(m) = controllability_matroid(&g, k) else { continue };
                for s in set::combinations(n, k) {
                    let ctrl = structural_report(&g, &s).unwrap().controllable;
                    assert_eq!(m.is_independent(&s), ctrl, "seed {seed} k {k} s {s:?}");
                }
            }
            checked += 1;
        }
        assert!(checked >= 5);
    }

    #[test]
    fn random_transversal_ranks_and_axioms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let ground = rng.random_range(1..=8);
            let left = rng.random_range(1..=6);
            let adj = (0..ground)
                .map(|_| (0..left).filter(|_| rng.random_bool(0.35)).collect())
                .collect();
            let m = transversal_matroid(TransversalInstance { left_count: left, adj }).unwrap();
            check_axioms(&m).unwrap();
        }
    }

    #[test]
    fn cache_agrees_and_fills() {
        let g = directed_ring(6).unwrap();
        let plain = controllability_matroid(&g, 2).unwrap();
        let cached = Cached::new(plain.clone(), true);
        let off = Cached::new(plain.clone(), false);
        for s in set::combinations(6, 2) {
            assert_eq!(cached.is_independent(&s), plain.is_independent(&s));
            assert_eq!(cached.is_independent(&s), off.is_independent(&s));
        }
        assert_eq!(cached.cached_entries(), 15);
        assert_eq!(off.cached_entries(), 0);
        check_axioms(&cached).unwrap();
    }
}
