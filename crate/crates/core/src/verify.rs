//! Exhaustive property checks on tabulated set functions: sub- and
//! supermodularity and monotonicity, with counterexamples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::SetFunction;
use crate::par::Exec;
use crate::set;

/// Largest ground set that [`tabulate`] accepts.
pub const TABULATE_LIMIT: usize = 16;

/// All `2^n` values of a set function, indexed by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub n: usize,
    pub values: Vec<f64>,
}

impl Table {
    pub fn get(&self, s: &[usize]) -> f64 {
        self.values[set::to_mask(s) as usize]
    }

    /// Largest finite `|f(S)|`, at least 1; used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.values.iter().filter(|x| x.is_finite()).fold(1.0f64, |m, x| m.max(x.abs()))
    }
}

pub fn tabulate(f: &dyn SetFunction, exec: Exec) -> Result<Table> {
    let n = f.ground_size();
    if n > TABULATE_LIMIT {
        return Err(Error::InstanceTooLarge(format!("tabulating 2^{n} sets")));
    }
    let values = exec.map_range(1 << n, |mask| f.evaluate(&set::from_mask(mask as u32)));
    Ok(Table { n, values: values.into_iter().collect::<Result<_>>()? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// `f(S + v) - f(S) >= f(T + v) - f(T)` for `S ⊆ T`, `v ∉ T`.
    Submodular,
    /// `f(S) - f(S + v) >= f(T) - f(T + v)` for `S ⊆ T`, `v ∉ T`.
    Supermodular,
    /// `f(S + v) >= f(S)`.
    Nondecreasing,
    /// `f(S + v) <= f(S)`.
    Nonincreasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub s: Vec<usize>,
    /// Equal to `s` for monotonicity checks.
    pub t: Vec<usize>,
    pub v: usize,
    /// Amount by which the inequality fails (positive).
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub checked: u64,
    /// Triples involving a non-finite value are skipped.
    pub skipped: u64,
    pub violations: u64,
    pub tolerance: f64,
    pub worst: Option<Violation>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `property` on every applicable triple, allowing a violation of up
/// to `rel_slack * table.scale()`.
pub fn check_property(table: &Table, property: Property, rel_slack: f64) -> PropertyReport {
    let n = table.n;
    let full = (1usize << n) - 1;
    let f = &table.values;
    let tolerance = rel_slack * table.scale();
    let mut report = PropertyReport { property, checked: 0, skipped: 0, violations: 0, tolerance, worst: None };
    let record = |report: &mut PropertyReport, deficit: f64, s: usize, t: usize, v: usize| {
        if !deficit.is_finite() {
            report.skipped += 1;
            return;
        }
        report.checked += 1;
        if deficit > tolerance {
            report.violations += 1;
            if report.worst.as_ref().is_none_or(|w| deficit > w.margin) {
                report.worst = Some(Violation {
                    s: set::from_mask(s as u32),
                    t: set::from_mask(t as u32),
                    v,
                    margin: deficit,
                });
            }
        }
    };
    match property {
        Property::Nondecreasing | Property::Nonincreasing => {
            for s in 0..=full {
                for v in (0..n).filter(|&v| s & (1 << v) == 0) {
                    let (a, b) = (f[s], f[s | (1 << v)]);
                    let deficit = if property == Property::Nondecreasing { a - b } else { b - a };
                    let deficit = if a == b { 0.0 } else { deficit };
                    record(&mut report, deficit, s, s, v);
                }
            }
        }
        Property::Submodular | Property::Supermodular => {
            for t in 0..=full {
                let outside: Vec<usize> = (0..n).filter(|&v| t & (1 << v) == 0).collect();
                // Iterate over all submasks s of t.
                let mut s = t;
                loop {
                    for &v in &outside {
                        let gain_s = f[s | (1 << v)] - f[s];
                        let gain_t = f[t | (1 << v)] - f[t];
                        let deficit = match property {
                            Property::Submodular => gain_t - gain_s,
                            _ => gain_s - gain_t,
                        };
                        let finite = [f[s], f[t], f[s | (1 << v)], f[t | (1 << v)]].iter().all(|x| x.is_finite());
                        record(&mut report, if finite { deficit } else { f64::NAN }, s, t, v);
                    }
                    if s == 0 {
                        break;
                    }
                    s = (s - 1) & t;
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::objectives::{Coverage, Modular};
    use crate::optimize::Orientation;

    struct Square(usize);

    impl SetFunction for Square {
        fn ground_size(&self) -> usize {
            self.0
        }
        fn evaluate(&self, s: &[usize]) -> Result<f64> {
            Ok((s.len() * s.len()) as f64)
        }
        fn orientation(&self) -> Orientation {
            Orientation::MaximizeSubmodular
        }
        fn monotone(&self) -> bool {
            true
        }
        fn description(&self) -> String {
            "|S|^2".into()
        }
    }

    #[test]
    fn coverage_is_submodular_not_supermodular() {
        let f = Coverage::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]], None).unwrap();
        let t = tabulate(&f, Exec::Sequential).unwrap();
        assert!(check_property(&t, Property::Submodular, 1e-12).passed());
        assert!(check_property(&t, Property::Nondecreasing, 1e-12).passed());
        assert!(!check_property(&t, Property::Supermodular, 1e-12).passed());
    }

    #[test]
    fn square_violation_is_reported() {
        let t = tabulate(&Square(3), Exec::Parallel).unwrap();
        let r = check_property(&t, Property::Submodular, 1e-12);
        assert!(!r.passed());
        let w = r.worst.unwrap();
        assert!(w.s.iter().all(|x| w.t.contains(x)) && !w.t.contains(&w.v));
        assert_eq!(w.margin, 4.0);
    }

    #[test]
    fn modular_is_both_and_triples_counted() {
        let t = tabulate(&Modular::new(vec![1.0, -2.0, 0.5]), Exec::Sequential).unwrap();
        let sub = check_property(&t, Property::Submodular, 0.0);
        assert!(sub.passed() && check_property(&t, Property::Supermodular, 0.0).passed());
        // sum over T of 2^|T| (n - |T|) = 3 * 3^2 = 27.
        assert_eq!(sub.checked, 27);
        assert!(!check_property(&t, Property::Nondecreasing, 0.0).passed());
    }
}
