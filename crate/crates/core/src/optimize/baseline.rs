//! Heuristic input selections used as experimental baselines.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    MaxDegree,
    AvgDegree,
    Random { seed: u64 },
}

/// `k` nodes in ranking order, so shorter selections are prefixes of longer
/// ones. Degree ties go to the lower node id.
pub fn baseline_select(g: &Graph, k: usize, kind: BaselineKind) -> Result<Vec<usize>> {
    let n = g.n();
    if k > n {
        return Err(Error::InvalidParameter(format!("k={k} exceeds node count {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    match kind {
        BaselineKind::MaxDegree => order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v)),
        BaselineKind::AvgDegree => {
            let mean = (0..n).map(|v| g.degree(v) as f64).sum::<f64>() / n.max(1) as f64;
            order.sort_by(|&a, &b| {
                let da = (g.degree(a) as f64 - mean).abs();
                let db = (g.degree(b) as f64 - mean).abs();
                da.total_cmp(&db).then(a.cmp(&b))
            });
        }
        BaselineKind::Random { seed } => order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
    }
    order.truncate(k);
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named_graph, NamedGraph};

    #[test]
    fn star_center_has_max_degree() {
        let star = named_graph(NamedGraph::Star, 5).unwrap();
        assert_eq!(baseline_select(&star, 1, BaselineKind::MaxDegree).unwrap(), vec![0]);
        assert_eq!(baseline_select(&star, 2, BaselineKind::AvgDegree).unwrap(), vec![1, 2]);
    }

    #[test]
    fn ring_avg_degree_takes_lowest_ids() {
        let ring = named_graph(NamedGraph::Ring, 8).unwrap();
        assert_eq!(baseline_select(&ring, 3, BaselineKind::AvgDegree).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn random_is_reproducible_and_prefix_closed() {
        let ring = named_graph(NamedGraph::Ring, 20).unwrap();
        let a = baseline_select(&ring, 5, BaselineKind::Random { seed: 3 }).unwrap();
        let b = baseline_select(&ring, 8, BaselineKind::Random { seed: 3 }).unwrap();
        assert_eq!(a, b[..5]);
        assert_ne!(a, baseline_select(&ring, 5, BaselineKind::Random { seed: 4 }).unwrap());
        assert!(baseline_select(&ring, 21, BaselineKind::MaxDegree).is_err());
    }
}
