//! Split bundles on the projective line and polynomial maps between them.

mod bundle_map;
mod kernel;

pub use bundle_map::BundleMap;
pub(crate) use bundle_map::{forms_to_vector, vector_to_forms};
pub use kernel::{
    generic_rank, h0_profile, image_data, kernel_splitting, GenericRank, H0Profile, ImageData, KernelSplitting,
    RankMethod,
};

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields_poly::FieldError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("slope of the zero bundle")]
    ZeroRank,
    #[error("entry ({row},{col}) has degree {got:?}, expected {expected}")]
    EntryDegree { row: usize, col: usize, expected: i64, got: Option<usize> },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("generic rank certification failed: sampled {sampled}, exact {exact:?}, profile {profile}")]
    CertificationMismatch { sampled: usize, exact: Option<usize>, profile: usize },
}

/// `(h0, h1)` of `O(a)` on the projective line.
pub fn cohomology_line(a: i64) -> (u64, u64) {
    ((a + 1).max(0) as u64, (-a - 1).max(0) as u64)
}

/// Number of monomials of degree `a`, i.e. `h0(O(a))`.
pub(crate) fn h0(a: i64) -> usize {
    (a + 1).max(0) as usize
}

/// The multiset of twists of `O(a_1) + ... + O(a_r)`, stored in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplittingType {
    degrees: Vec<i64>,
}

impl SplittingType {
    pub fn new(mut degrees: Vec<i64>) -> Self {
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        SplittingType { degrees }
    }

    pub fn zero_bundle() -> Self {
        SplittingType { degrees: Vec::new() }
    }

    pub fn trivial(rank: usize) -> Self {
        SplittingType { degrees: vec![0; rank] }
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self) -> i64 {
        self.degrees.iter().sum()
    }

    pub fn slope(&self) -> Result<BigRational, SheafError> {
        if self.degrees.is_empty() {
            return Err(SheafError::ZeroRank);
        }
        Ok(BigRational::new(BigInt::from(self.degree()), BigInt::from(self.rank())))
    }

    pub fn dual(&self) -> Self {
        SplittingType::new(self.degrees.iter().map(|a| -a).collect())
    }

    pub fn twist(&self, d: i64) -> Self {
        SplittingType::new(self.degrees.iter().map(|a| a + d).collect())
    }

    pub fn direct_sum(&self, other: &SplittingType) -> Self {
        SplittingType::new(self.degrees.iter().chain(&other.degrees).copied().collect())
    }

    /// `h0(E(d))`.
    pub fn h0_twist(&self, d: i64) -> usize {
        self.degrees.iter().map(|a| h0(a + d)).sum()
    }

    pub fn h0(&self) -> usize {
        self.h0_twist(0)
    }

    pub fn h1(&self) -> u64 {
        self.degrees.iter().map(|&a| cohomology_line(a).1).sum()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.degrees.first().copied()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.degrees.last().copied()
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degrees.is_empty() {
            return write!(f, "0");
        }
        let mut i = 0;
        let mut first = true;
        while i < self.degrees.len() {
            let a = self.degrees[i];
            let run = self.degrees[i..].iter().take_while(|&&b| b == a).count();
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if run == 1 {
                write!(f, "O({a})")?;
            } else {
                write!(f, "O({a})^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
