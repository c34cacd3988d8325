//! Sampled replay of the rank-two counterexample `E = O(e) + O(e+1)` with a
//! four-dimensional `V`.

use rayon::prelude::*;
use serde::Serialize;

use super::{hypothesis_2d4, linstab_exhaustive, slope_stability_p1, SearchConfig, SlopeKind, SlopeVerdict, StabilityError, VerdictKind};
use crate::coherent::{random_generated_system, CoherentSystemP1};
use crate::fields_poly::FieldSpec;
use crate::p1_sheaves::SplittingType;
use crate::seed::sub_seed;

/// `V` dimension in the counterexample.
pub const COUNTEREXAMPLE_DIM: usize = 4;

/// `d_3` of the projective line: `O(3)` is the first line bundle with four sections.
pub const P1_D3: i64 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplaySample {
    pub sample: u64,
    pub seed: u64,
    pub sections: Vec<Vec<String>>,
    pub dsb: SplittingType,
    pub dsb_verdict: SlopeVerdict,
    pub linstab: VerdictKind,
    pub examined: u64,
    pub violations: u64,
    pub equalities: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub e: i64,
    pub prime: u32,
    pub seed: u64,
    pub bundle: SplittingType,
    pub samples: Vec<ReplaySample>,
    /// Samples whose kernel bundle has rank 2 and degree `-(2e+1)` and is unstable.
    pub dsb_unstable: usize,
    /// Index of the first sample certified linearly stable.
    pub witness: Option<u64>,
    pub stable_count: usize,
    /// `d < 2 d3` fails, so the `(2, d, 4)` criterion says nothing here.
    pub hypothesis_2d4: bool,
    pub passed: bool,
}

pub fn replay_sample(
    sys: &CoherentSystemP1,
    sample: u64,
    seed: u64,
    config: &SearchConfig,
) -> Result<ReplaySample, StabilityError> {
    let dsb = sys.dual_span()?.kernel;
    let dsb_verdict = slope_stability_p1(&dsb);
    let v = linstab_exhaustive(sys, config)?;
    Ok(ReplaySample {
        sample,
        seed,
        sections: sys.sections().iter().map(|s| s.iter().map(|f| f.to_string()).collect()).collect(),
        dsb,
        dsb_verdict,
        linstab: v.kind,
        examined: v.examined,
        violations: v.violations,
        equalities: v.equalities,
    })
}

/// Samples `V` for `E = O(e) + O(e+1)` over GF(p) and sweeps each one.
///
/// Sample `i` is drawn from sub-seed `(seed, "counterexample-system", i)`.
pub fn counterexample_replay(
    e: i64,
    p: u32,
    samples: usize,
    seed: u64,
    config: &SearchConfig,
) -> Result<CounterexampleReport, StabilityError> {
    if e < 1 {
        return Err(StabilityError::WrongType { expected: "e >= 1".into(), got: e.to_string() });
    }
    let field = FieldSpec::prime(p).map_err(|_| StabilityError::NotPrimeField)?;
    let bundle = SplittingType::new(vec![e, e + 1]);
    let rows = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = sub_seed(seed, "counterexample-system", i);
            let (sys, _) = random_generated_system(&bundle, COUNTEREXAMPLE_DIM, s, field, 100)?;
            replay_sample(&sys, i, s, config)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let dsb_unstable = rows
        .iter()
        .filter(|r| r.dsb.rank() == 2 && r.dsb.degree() == -(2 * e + 1) && r.dsb_verdict.kind == SlopeKind::Unstable)
        .count();
    let stable: Vec<u64> = rows.iter().filter(|r| r.linstab == VerdictKind::Stable).map(|r| r.sample).collect();
    let hyp = hypothesis_2d4(2 * e + 1, P1_D3);
    Ok(CounterexampleReport {
        e,
        prime: p,
        seed,
        bundle,
        passed: dsb_unstable == rows.len() && !stable.is_empty() && !hyp,
        dsb_unstable,
        witness: stable.first().copied(),
        stable_count: stable.len(),
        hypothesis_2d4: hyp,
        samples: rows,
    })
}
