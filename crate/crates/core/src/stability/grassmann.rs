//! Subspaces of GF(p)^n, one reduced row echelon matrix per subspace.

use num_bigint::BigUint;
use num_traits::{One, Pow};

use crate::p1_sheaves::subsets;

/// Number of `w`-dimensional subspaces of an `n`-dimensional space over GF(p).
pub fn gaussian_binomial(n: usize, w: usize, p: u32) -> BigUint {
    if w > n {
        return BigUint::from(0u32);
    }
    let q = BigUint::from(p);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..w {
        num *= Pow::pow(&q, (n - i) as u32) - 1u32;
        den *= Pow::pow(&q, (i + 1) as u32) - 1u32;
    }
    num / den
}

/// Indexable enumeration of RREF matrices of shape `w x n` over GF(p).
///
/// Representatives are grouped by pivot set (lexicographic), and within a
/// group the free entries are read as base-`p` digits of the local index.
#[derive(Clone, Debug)]
pub struct GrassmannEnumerator {
    n: usize,
    w: usize,
    p: u32,
    groups: Vec<PivotGroup>,
    total: u64,
}

#[derive(Clone, Debug)]
struct PivotGroup {
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    start: u64,
}

impl GrassmannEnumerator {
    /// `None` when the count does not fit in a `u64`.
    pub fn new(n: usize, w: usize, p: u32) -> Option<Self> {
        let mut groups = Vec::new();
        let mut total: u64 = 0;
        for pivots in subsets(n, w) {
            let mut free = Vec::new();
            for (row, &pc) in pivots.iter().enumerate() {
                for col in pc + 1..n {
                    if !pivots.contains(&col) {
                        free.push((row, col));
                    }
                }
            }
            let size = (p as u64).checked_pow(free.len() as u32)?;
            groups.push(PivotGroup { pivots, free, start: total });
            total = total.checked_add(size)?;
        }
        Some(GrassmannEnumerator { n, w, p, groups, total })
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn shape(&self) -> (usize, usize, u32) {
        (self.n, self.w, self.p)
    }

    /// The representative with the given index, with its pivot columns.
    pub fn get(&self, index: u64) -> (Vec<Vec<u32>>, Vec<usize>) {
        assert!(index < self.total, "index out of range");
        let g = match self.groups.binary_search_by(|g| g.start.cmp(&index)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let group = &self.groups[g];
        let mut local = index - group.start;
        let mut rows = vec![vec![0u32; self.n]; self.w];
        for (row, &pc) in group.pivots.iter().enumerate() {
            rows[row][pc] = 1;
        }
        for &(row, col) in &group.free {
            rows[row][col] = (local % self.p as u64) as u32;
            local /= self.p as u64;
        }
        (rows, group.pivots.clone())
    }

    /// Splits `0..len` into at most `parts` contiguous, disjoint index ranges.
    pub fn chunks(&self, parts: usize) -> Vec<std::ops::Range<u64>> {
        let parts = parts.max(1) as u64;
        let size = self.total.div_ceil(parts).max(1);
        (0..parts)
            .map(|i| (i * size).min(self.total)..((i + 1) * size).min(self.total))
            .filter(|r| !r.is_empty())
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<Vec<u32>>, Vec<usize>)> + '_ {
        (0..self.total).map(move |i| self.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts() {
        assert_eq!(gaussian_binomial(4, 2, 2), BigUint::from(35u32));
        assert_eq!(gaussian_binomial(4, 1, 5), BigUint::from(156u32));
        assert_eq!(gaussian_binomial(5, 5, 7), BigUint::one());
        assert_eq!(gaussian_binomial(5, 0, 7), BigUint::one());
        let total: u64 = (0..=4).map(|w| GrassmannEnumerator::new(4, w, 5).unwrap().len()).sum();
        assert_eq!(total, 1 + 156 + 806 + 156 + 1);
    }

    #[test]
    fn emits_distinct_echelon_forms() {
        let e = GrassmannEnumerator::new(4, 2, 3).unwrap();
        assert_eq!(BigUint::from(e.len()), gaussian_binomial(4, 2, 3));
        let seen: HashSet<Vec<Vec<u32>>> = e.iter().map(|(m, _)| m).collect();
        assert_eq!(seen.len() as u64, e.len());
    }

    #[test]
    fn chunks_cover_the_range() {
        let e = GrassmannEnumerator::new(4, 2, 2).unwrap();
        let ch = e.chunks(4);
        assert_eq!(ch.first().unwrap().start, 0);
        assert_eq!(ch.last().unwrap().end, 35);
        assert!(ch.windows(2).all(|w| w[0].end == w[1].start));
    }
}
