//! Node-set helpers. Sets are sorted, deduplicated `Vec<usize>`; exhaustive
//! sweeps use `u32` bitmasks over ground sets of at most 31 elements.

use crate::error::{Error, Result};

/// Sorts, deduplicates and range-checks a node set against ground size `n`.
pub fn normalize(n: usize, s: &[usize]) -> Result<Vec<usize>> {
    let mut out = s.to_vec();
    out.sort_unstable();
    out.dedup();
    if let Some(&bad) = out.iter().find(|&&v| v >= n) {
        return Err(Error::UnknownNode(bad));
    }
    Ok(out)
}

/// Membership table of length `n`.
pub fn membership(n: usize, s: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in s {
        m[v] = true;
    }
    m
}

/// Elements of `0..n` not in `s` (ascending).
pub fn complement(n: usize, s: &[usize]) -> Vec<usize> {
    let m = membership(n, s);
    (0..n).filter(|&v| !m[v]).collect()
}

/// Sorted copy of `s` with `v` inserted.
pub fn with(s: &[usize], v: usize) -> Vec<usize> {
    let mut out = s.to_vec();
    if let Err(pos) = out.binary_search(&v) {
        out.insert(pos, v);
    }
    out
}

pub fn from_mask(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask & (1 << i) != 0).collect()
}

pub fn to_mask(s: &[usize]) -> u32 {
    s.iter().fold(0, |m, &v| m | (1 << v))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}
