//! Families of partitions with pairwise disjoint `pairs(P)`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::ConstructionError;
use crate::field::FiniteField;

/// Ordered partitions `P_1..P_k` of (a subset of) `[v]` into equal blocks.
/// Blocks keep their construction order; each block is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPartition {
    pub v: usize,
    pub parts: Vec<Vec<Vec<usize>>>,
}

impl PairPartition {
    pub fn new(v: usize, parts: Vec<Vec<Vec<usize>>>) -> Self {
        let parts = parts
            .into_iter()
            .map(|p| {
                p.into_iter()
                    .map(|mut b| {
                        b.sort_unstable();
                        b
                    })
                    .collect()
            })
            .collect();
        PairPartition { v, parts }
    }

    /// All 2-subsets lying inside some block of part `i`.
    pub fn pairs(&self, i: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in &self.parts[i] {
            for (x, &a) in b.iter().enumerate() {
                for &c in &b[x + 1..] {
                    out.push((a, c));
                }
            }
        }
        out
    }

    /// Blocks within a part are disjoint, in range and of equal size; no pair
    /// lies in blocks of two different parts.
    pub fn validate(&self) -> Result<(), ConstructionError> {
        let mut seen_pairs = HashSet::new();
        for (i, part) in self.parts.iter().enumerate() {
            let size = part.first().map_or(0, Vec::len);
            let mut used = vec![false; self.v + 1];
            for b in part {
                if b.len() != size {
                    return Err(ConstructionError::Partition(format!(
                        "part {} has unequal blocks",
                        i + 1
                    )));
                }
                for &x in b {
                    if x == 0 || x > self.v || used[x] {
                        return Err(ConstructionError::Partition(format!(
                            "part {} repeats or overflows point {x}",
                            i + 1
                        )));
                    }
                    used[x] = true;
                }
            }
            for pair in self.pairs(i) {
                if !seen_pairs.insert(pair) {
                    return Err(ConstructionError::Partition(format!(
                        "pair {{{},{}}} lies in two parts",
                        pair.0, pair.1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Every 2-subset of `[v]` lies in some block.
    pub fn covers_all_pairs(&self) -> bool {
        let total: usize = (0..self.parts.len()).map(|i| self.pairs(i).len()).sum();
        self.validate().is_ok() && total == self.v * (self.v.saturating_sub(1)) / 2
    }

    /// Each part covers all of `[v]`.
    pub fn is_covering(&self) -> bool {
        self.parts
            .iter()
            .all(|p| p.iter().map(Vec::len).sum::<usize>() == self.v)
    }
}

/// The circle method: `2n - 1` perfect matchings of `[2n]`.
/// `rho` fixes 1, sends 2 to 2n and every other x to x - 1.
pub fn round_robin(n: usize) -> PairPartition {
    let v = 2 * n;
    let rho = |x: usize, k: usize| -> usize {
        if x == 1 {
            return 1;
        }
        // Points 2..=2n rotate on a cycle of length 2n - 1.
        let pos = x - 2;
        let len = v - 1;
        (pos + len - k % len) % len + 2
    };
    let parts = (1..v)
        .map(|i| {
            let mut blocks = vec![vec![1, v - i + 1]];
            for j in 2..=n {
                blocks.push(vec![rho(j, i - 1), rho(v - j + 1, i - 1)]);
            }
            blocks
        })
        .collect();
    PairPartition::new(v, parts)
}

/// `2n + 1` near-perfect matchings of `[2n + 1]`; part i pairs
/// `(i + j) mod (2n+1)` with `(i - j) mod (2n+1)` for `j = 1..n`, with
/// residue 0 read as `2n + 1`.
pub fn odd_partition(n: usize) -> PairPartition {
    let v = 2 * n + 1;
    let rep = |x: usize| if x.is_multiple_of(v) { v } else { x % v };
    let parts = (1..=v)
        .map(|i| (1..=n).map(|j| vec![rep(i + j), rep(i + v - j)]).collect())
        .collect();
    PairPartition::new(v, parts)
}

/// Guard on `p^(ds)` for [`gf_line_partition`].
pub const MAX_POINTS: u64 = 1 << 20;

/// Parallel classes of lines in `F^d`, `F = GF(p^s)`.
///
/// Point `(a_1..a_d)` is numbered `1 + sum a_i q^(i-1)`. Directions are the
/// vectors whose first nonzero coordinate is 1, in lexicographic order; the
/// lines of each class are listed by their smallest point.
pub fn gf_line_partition(p: u64, s: u32, d: u32) -> Result<PairPartition, ConstructionError> {
    if d < 2 {
        return Err(ConstructionError::Parameters("d must be at least 2".into()));
    }
    let field = FiniteField::new(p, s)?;
    let q = field.order();
    let total = (q as u64)
        .checked_pow(d)
        .filter(|&t| t <= MAX_POINTS)
        .ok_or_else(|| ConstructionError::Parameters(format!("{q}^{d} points exceed {MAX_POINTS}")))?
        as usize;
    let d = d as usize;
    let coords = |mut k: usize| -> Vec<u32> {
        (0..d)
            .map(|_| {
                let a = (k % q) as u32;
                k /= q;
                a
            })
            .collect()
    };
    let index = |v: &[u32]| -> usize { v.iter().rev().fold(0, |acc, &a| acc * q + a as usize) };

    // Lexicographic order on (a_1, .., a_d) with a_1 most significant.
    let mut directions = Vec::new();
    for k in 0..total {
        let mut v = coords(k);
        v.reverse();
        if let Some(&first) = v.iter().find(|&&a| a != 0) {
            if first == 1 {
                directions.push(v);
            }
        }
    }
    directions.sort();

    let mut parts = Vec::with_capacity(directions.len());
    for dir in &directions {
        let mut assigned = vec![false; total];
        let mut blocks = Vec::with_capacity(total / q);
        for start in 0..total {
            if assigned[start] {
                continue;
            }
            let base = coords(start);
            let mut line = Vec::with_capacity(q);
            for f in 0..q as u32 {
                let pt: Vec<u32> = base
                    .iter()
                    .zip(dir)
                    .map(|(&b, &y)| field.add(b, field.mul(f, y)))
                    .collect();
                let k = index(&pt);
                assigned[k] = true;
                line.push(k + 1);
            }
            blocks.push(line);
        }
        parts.push(blocks);
    }
    Ok(PairPartition::new(total, parts))
}
