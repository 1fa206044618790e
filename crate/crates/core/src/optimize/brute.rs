//! Exhaustive optimization for small instances: the oracle behind every
//! greedy bound check.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::par::Exec;
use crate::set;

use super::{Certificate, CertificateKind, SelectionResult, SetFunction, TraceStep};

pub enum BruteConstraint<'a> {
    /// Exactly `k` elements.
    Cardinality(usize),
    /// Any independent set.
    Matroid(&'a dyn Matroid),
    /// Fewest elements meeting the target (`>=` for maximization, `<=` for
    /// minimization).
    Target(f64),
}

/// Ground sets up to this size are enumerated without restriction.
pub const BRUTE_FULL_LIMIT: usize = 12;
/// Larger ground sets (up to [`BRUTE_SMALL_K_GROUND`]) allow subsets of at
/// most this size.
pub const BRUTE_SMALL_K: usize = 4;
pub const BRUTE_SMALL_K_GROUND: usize = 20;

fn guard(n: usize, max_size: usize) -> Result<()> {
    if n <= BRUTE_FULL_LIMIT || (n <= BRUTE_SMALL_K_GROUND && max_size <= BRUTE_SMALL_K) {
        Ok(())
    } else {
        Err(Error::InstanceTooLarge(format!(
            "exhaustive search over {n} elements with sets up to size {max_size}"
        )))
    }
}

/// Best set among `sets` by score, ties to the earliest.
fn best_of(f: &dyn SetFunction, sets: &[Vec<usize>], exec: Exec) -> Result<Option<(usize, f64)>> {
    let orient = f.orientation();
    let values: Vec<f64> = exec.map(sets, |s| f.evaluate(s)).into_iter().collect::<Result<_>>()?;
    let scores: Vec<f64> = values.iter().map(|&v| orient.score(v)).collect();
    Ok(super::first_best(&scores).map(|i| (i, values[i])))
}

/// Exact optimum by enumeration in size-then-lexicographic order; among
/// equal values the first enumerated set wins.
pub fn brute_force_opt(f: &dyn SetFunction, constraint: BruteConstraint, exec: Exec) -> Result<SelectionResult> {
    let started = Instant::now();
    let n = f.ground_size();
    let orient = f.orientation();
    let initial = f.evaluate(&[])?;
    let mut evaluations = 1u64;
    let (set, value) = match constraint {
        BruteConstraint::Cardinality(k) => {
            if k > n {
                return Err(Error::InvalidParameter(format!("k={k} exceeds ground set size {n}")));
            }
            guard(n, k)?;
            let sets = set::combinations(n, k);
            evaluations += sets.len() as u64;
            let (i, v) = best_of(f, &sets, exec)?.expect("at least one k-subset");
            (sets[i].clone(), v)
        }
        BruteConstraint::Matroid(m) => {
            guard(n, n)?;
            let sets: Vec<Vec<usize>> = (0..=n)
                .flat_map(|k| set::combinations(n, k))
                .filter(|s| m.is_independent(s))
                .collect();
            evaluations += sets.len() as u64;
            let (i, v) = best_of(f, &sets, exec)?.expect("empty set is independent");
            (sets[i].clone(), v)
        }
        BruteConstraint::Target(alpha) => {
            let meets = |v: f64| match orient {
                super::Orientation::MaximizeSubmodular => v >= alpha,
                super::Orientation::MinimizeSupermodular => v <= alpha,
            };
            let max_size = if n <= BRUTE_FULL_LIMIT { n } else { BRUTE_SMALL_K.min(n) };
            guard(n, max_size)?;
            let mut found = None;
            for k in 0..=max_size {
                let sets = set::combinations(n, k);
                evaluations += sets.len() as u64;
                let values = exec.map(&sets, |s| f.evaluate(s));
                let mut hit: Vec<Vec<usize>> = Vec::new();
                for (s, v) in sets.into_iter().zip(values) {
                    if meets(v?) {
                        hit.push(s);
                    }
                }
                if !hit.is_empty() {
                    let (i, v) = best_of(f, &hit, exec)?.expect("nonempty");
                    found = Some((hit[i].clone(), v));
                    break;
                }
            }
            match found {
                Some(x) => x,
                None if max_size < n => {
                    return Err(Error::InstanceTooLarge(format!("no set of size <= {max_size} meets the target")))
                }
                None => {
                    let all: Vec<usize> = (0..n).collect();
                    return Err(Error::InfeasibleTarget { target: alpha, best: f.evaluate(&all)? });
                }
            }
        }
    };
    let trace = set.iter().map(|&element| TraceStep { element, value }).collect();
    let mut r = SelectionResult::new(trace, initial, value, evaluations, started);
    r.certificate = Certificate { kind: CertificateKind::Exact, value: Some(1.0), baseline: None };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::super::objectives::{Coverage, Modular};
    use super::super::{greedy_max, matroid_greedy};
    use super::*;
    use crate::matroid::uniform_matroid;
    use rand::{Rng, SeedableRng};

    #[test]
    fn modular_matches_greedy() {
        let f = Modular::new(vec![0.3, 2.0, 1.5, 0.1]);
        let b = brute_force_opt(&f, BruteConstraint::Cardinality(2), Exec::Sequential).unwrap();
        let g = greedy_max(&f, 2, Exec::Sequential).unwrap();
        assert_eq!(b.selected, g.selected);
        assert_eq!(b.certificate.kind, CertificateKind::Exact);
    }

    #[test]
    fn guard_rails() {
        let f = Modular::new(vec![1.0; 21]);
        assert!(matches!(
            brute_force_opt(&f, BruteConstraint::Cardinality(2), Exec::Sequential),
            Err(Error::InstanceTooLarge(_))
        ));
        let f = Modular::new(vec![1.0; 15]);
        assert!(brute_force_opt(&f, BruteConstraint::Cardinality(4), Exec::Sequential).is_ok());
        assert!(matches!(
            brute_force_opt(&f, BruteConstraint::Cardinality(5), Exec::Sequential),
            Err(Error::InstanceTooLarge(_))
        ));
    }

    #[test]
    fn target_finds_fewest() {
        let f = Modular::new(vec![1.0, 3.0, 2.0]);
        let r = brute_force_opt(&f, BruteConstraint::Target(4.0), Exec::Sequential).unwrap();
        assert_eq!(r.selected, vec![1, 2]);
        assert!(matches!(
            brute_force_opt(&f, BruteConstraint::Target(7.0), Exec::Sequential),
            Err(Error::InfeasibleTarget { .. })
        ));
    }

    #[test]
    fn greedy_within_bounds_on_random_coverage() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..40 {
            let n = 10;
            let sets = (0..n).map(|_| (0..20).filter(|_| rng.random_bool(0.2)).collect()).collect();
            let f = Coverage::new(20, sets, None).unwrap();
            for k in 1..=4 {
                let g = greedy_max(&f, k, Exec::Parallel).unwrap();
                let b = brute_force_opt(&f, BruteConstraint::Cardinality(k), Exec::Parallel).unwrap();
                assert!(b.value >= g.value);
                assert!(g.value.unwrap() >= (1.0 - (-1.0f64).exp()) * b.value.unwrap() - 1e-12);
                let m = uniform_matroid(n, k);
                let mg = matroid_greedy(&f, &m, Exec::Parallel).unwrap();
                let mb = brute_force_opt(&f, BruteConstraint::Matroid(&m), Exec::Parallel).unwrap();
                assert!(mg.value.unwrap() >= 0.5 * mb.value.unwrap());
            }
        }
    }
}
