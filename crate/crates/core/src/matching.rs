//! Maximum bipartite matching (Hopcroft-Karp) and Hall-violation witnesses.

use std::collections::VecDeque;

/// Bipartite graph given by left-to-right adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartite {
    pub right_count: usize,
    pub adj: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub left: Vec<Option<usize>>,
    pub right: Vec<Option<usize>>,
    pub size: usize,
}

impl Matching {
    pub fn unmatched_left(&self) -> Vec<usize> {
        (0..self.left.len()).filter(|&l| self.left[l].is_none()).collect()
    }

    pub fn unmatched_right(&self) -> Vec<usize> {
        (0..self.right.len()).filter(|&r| self.right[r].is_none()).collect()
    }

    /// `(left, right)` pairs in left order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.left.iter().enumerate().filter_map(|(l, r)| r.map(|r| (l, r))).collect()
    }
}

const INF: usize = usize::MAX;

impl Bipartite {
    pub fn new(right_count: usize, adj: Vec<Vec<usize>>) -> Self {
        debug_assert!(adj.iter().flatten().all(|&r| r < right_count));
        Self { right_count, adj }
    }

    pub fn left_count(&self) -> usize {
        self.adj.len()
    }

    /// Maximum matching by Hopcroft-Karp layered augmentation.
    pub fn maximum_matching(&self) -> Matching {
        let nl = self.left_count();
        let mut left = vec![None; nl];
        let mut right = vec![None; self.right_count];
        let mut dist = vec![INF; nl];
        let mut size = 0;
        loop {
            // BFS layering from free left vertices.
            let mut queue = VecDeque::new();
            for l in 0..nl {
                if left[l].is_none() {
                    dist[l] = 0;
                    queue.push_back(l);
                } else {
                    dist[l] = INF;
                }
            }
            let mut found = false;
            while let Some(l) = queue.pop_front() {
                for &r in &self.adj[l] {
                    match right[r] {
                        None => found = true,
                        Some(l2) if dist[l2] == INF => {
                            dist[l2] = dist[l] + 1;
                            queue.push_back(l2);
                        }
                        _ => {}
                    }
                }
            }
            if !found {
                break;
            }
            let mut next = vec![0usize; nl];
            for l in 0..nl {
                if left[l].is_none() && self.augment(l, &mut left, &mut right, &mut dist, &mut next) {
                    size += 1;
                }
            }
        }
        Matching { left, right, size }
    }

    // Iterative DFS along the BFS layers.
    fn augment(
        &self,
        root: usize,
        left: &mut [Option<usize>],
        right: &mut [Option<usize>],
        dist: &mut [usize],
        next: &mut [usize],
    ) -> bool {
        let mut stack = vec![root];
        while let Some(&l) = stack.last() {
            if next[l] >= self.adj[l].len() {
                dist[l] = INF;
                stack.pop();
                continue;
            }
            let r = self.adj[l][next[l]];
            next[l] += 1;
            match right[r] {
                None => {
                    // Flip the path: every stacked left vertex takes the
                    // right vertex it last advanced to.
                    let mut r_cur = r;
                    while let Some(lv) = stack.pop() {
                        let prev = left[lv];
                        left[lv] = Some(r_cur);
                        right[r_cur] = Some(lv);
                        match prev {
                            Some(p) => r_cur = p,
                            None => break,
                        }
                    }
                    return true;
                }
                Some(l2) if dist[l2] == dist[l] + 1 => stack.push(l2),
                _ => {}
            }
        }
        false
    }

    /// Given a maximum matching and an unmatched left vertex, returns the set
    /// `A` of left vertices reachable by alternating paths from it and its
    /// neighborhood `N(A)`; `|N(A)| = |A| - 1`, a Hall violation.
    pub fn hall_witness(&self, m: &Matching, free_left: usize) -> (Vec<usize>, Vec<usize>) {
        debug_assert!(m.left[free_left].is_none());
        let mut seen_l = vec![false; self.left_count()];
        let mut seen_r = vec![false; self.right_count];
        let mut queue = VecDeque::from([free_left]);
        seen_l[free_left] = true;
        while let Some(l) = queue.pop_front() {
            for &r in &self.adj[l] {
                if !seen_r[r] {
                    seen_r[r] = true;
                    if let Some(l2) = m.right[r] {
                        if !seen_l[l2] {
                            seen_l[l2] = true;
                            queue.push_back(l2);
                        }
                    }
                }
            }
        }
        let a = (0..seen_l.len()).filter(|&l| seen_l[l]).collect();
        let na = (0..seen_r.len()).filter(|&r| seen_r[r]).collect();
        (a, na)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Kuhn's simple augmenting-path algorithm as an independent oracle.
    fn kuhn(b: &Bipartite) -> usize {
        fn try_kuhn(b: &Bipartite, l: usize, seen: &mut [bool], right: &mut [Option<usize>]) -> bool {
            for &r in &b.adj[l] {
                if !seen[r] {
                    seen[r] = true;
                    if right[r].is_none() || try_kuhn(b, right[r].unwrap(), seen, right) {
                        right[r] = Some(l);
                        return true;
                    }
                }
            }
            false
        }
        let mut right = vec![None; b.right_count];
        (0..b.left_count())
            .filter(|&l| try_kuhn(b, l, &mut vec![false; b.right_count], &mut right))
            .count()
    }

    fn is_valid(b: &Bipartite, m: &Matching) -> bool {
        let pairs = m.pairs();
        pairs.len() == m.size
            && pairs.iter().all(|&(l, r)| b.adj[l].contains(&r) && m.right[r] == Some(l))
    }

    #[test]
    fn sidebar_example() {
        // Users u1..u6 choosing items w1..w4.
        let b = Bipartite::new(4, vec![vec![0], vec![1], vec![], vec![2], vec![2], vec![3]]);
        let m = b.maximum_matching();
        assert_eq!(m.size, 4);
        assert!(is_valid(&b, &m));
    }

    #[test]
    fn witness_is_a_hall_violation() {
        // Left 0 and 1 both only see right 0.
        let b = Bipartite::new(3, vec![vec![0], vec![0], vec![1, 2]]);
        let m = b.maximum_matching();
        assert_eq!(m.size, 2);
        let free = m.unmatched_left()[0];
        let (a, na) = b.hall_witness(&m, free);
        assert_eq!(a, vec![0, 1]);
        assert_eq!(na, vec![0]);
    }

    proptest! {
        #[test]
        fn matches_kuhn_oracle(
            nl in 0usize..9,
            nr in 1usize..9,
            bits in proptest::collection::vec(any::<bool>(), 81),
        ) {
            let adj: Vec<Vec<usize>> = (0..nl)
                .map(|l| (0..nr).filter(|&r| bits[l * 9 + r]).collect())
                .collect();
            let b = Bipartite::new(nr, adj);
            let m = b.maximum_matching();
            prop_assert!(is_valid(&b, &m));
            prop_assert_eq!(m.size, kuhn(&b));
            for free in m.unmatched_left() {
                let (a, na) = b.hall_witness(&m, free);
                prop_assert_eq!(na.len() + 1, a.len());
            }
        }
    }
}
