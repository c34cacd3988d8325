//! Slopes, slope stability of split bundles, and linear stability of systems.

mod grassmann;
mod replay;
mod sweep;

pub use grassmann::{gaussian_binomial, GrassmannEnumerator};
pub use replay::{counterexample_replay, replay_sample, CounterexampleReport, ReplaySample, COUNTEREXAMPLE_DIM, P1_D3};
pub use sweep::{linstab_exhaustive, linstab_sampled, structured_candidates, SearchConfig};

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::coherent::{pullback_numeric, CoherentError, CoherentSystemP1, NumericalSystem, SubsheafReport};
use crate::fields_poly::{serialize_rational, Scalar};
use crate::linalg::Subspace;
use crate::p1_sheaves::SplittingType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error("slope of a rank-zero object")]
    ZeroRank,
    #[error(transparent)]
    Coherent(#[from] CoherentError),
    #[error("linear stability is only defined here for generated systems")]
    NotGenerated,
    #[error("an exhaustive sweep needs a prime field")]
    NotPrimeField,
    #[error("resource guard: {what} is {got}, limit {limit}")]
    ResourceGuard { what: &'static str, got: String, limit: String },
    #[error("expected a system of type {expected}, got {got}")]
    WrongType { expected: String, got: String },
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn slope(r: i64, d: i64) -> Result<BigRational, StabilityError> {
    if r == 0 {
        return Err(StabilityError::ZeroRank);
    }
    Ok(ratio(d, r))
}

/// `(d + alpha * n) / r`.
pub fn mu_alpha(r: i64, d: i64, n: i64, alpha: &BigRational) -> Result<BigRational, StabilityError> {
    if r == 0 {
        return Err(StabilityError::ZeroRank);
    }
    Ok((BigRational::from_integer(d.into()) + alpha * BigRational::from_integer(n.into())) / BigRational::from_integer(r.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Less,
    Equal,
    Greater,
}

impl Relation {
    pub fn of(a: &BigRational, b: &BigRational) -> Self {
        match a.cmp(b) {
            Ordering::Less => Relation::Less,
            Ordering::Equal => Relation::Equal,
            Ordering::Greater => Relation::Greater,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::Equal => "=",
            Relation::Greater => ">",
        }
    }
}

impl Serialize for Relation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeKind {
    Stable,
    StrictlySemistable,
    Unstable,
}

/// Slope stability of a split bundle; unstable bundles carry the summand of
/// largest degree as a destabilizing line subbundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeVerdict {
    pub kind: SlopeKind,
    pub destabilizing_degree: Option<i64>,
}

pub fn slope_stability_p1(bundle: &SplittingType) -> SlopeVerdict {
    let degs = bundle.degrees();
    let (Some(&max), Some(&min)) = (degs.first(), degs.last()) else {
        return SlopeVerdict { kind: SlopeKind::Stable, destabilizing_degree: None };
    };
    if degs.len() == 1 {
        SlopeVerdict { kind: SlopeKind::Stable, destabilizing_degree: None }
    } else if max == min {
        SlopeVerdict { kind: SlopeKind::StrictlySemistable, destabilizing_degree: None }
    } else {
        SlopeVerdict { kind: SlopeKind::Unstable, destabilizing_degree: Some(max) }
    }
}

/// Both sides of the reduced-slope inequality for one subspace `W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinStabCertificate {
    pub dim_w: usize,
    pub report: SubsheafReport,
    #[serde(serialize_with = "serialize_rational")]
    pub lhs: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub rhs: BigRational,
    pub relation: Relation,
}

impl LinStabCertificate {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.relation
            .cmp(&other.relation)
            .then(self.dim_w.cmp(&other.dim_w))
            .then_with(|| {
                for (a, b) in self.report.w_basis.iter().flatten().zip(other.report.w_basis.iter().flatten()) {
                    let o = a.canonical_cmp(b);
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            })
    }
}

pub(crate) fn sort_certificates(certs: &mut [LinStabCertificate]) {
    certs.sort_by(|a, b| a.canonical_cmp(b));
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Trivial(SubsheafReport),
    Certificate(LinStabCertificate),
}

/// `d / (n - r)` for a generated system.
pub fn reduced_slope(sys: &CoherentSystemP1) -> Result<BigRational, StabilityError> {
    let (r, d, n) = sys.type_tuple();
    if n <= r {
        return Err(StabilityError::WrongType { expected: "n > r".into(), got: format!("({r}, {d}, {n})") });
    }
    Ok(ratio(d, (n - r) as i64))
}

pub fn linstab_check_one(sys: &CoherentSystemP1, w: &[Vec<Scalar>]) -> Result<CheckOutcome, StabilityError> {
    if !sys.is_generated() {
        return Err(StabilityError::NotGenerated);
    }
    let rhs = reduced_slope(sys)?;
    let w = sys.subspace(w)?;
    check_subspace(sys, &w, &rhs)
}

pub(crate) fn check_subspace(
    sys: &CoherentSystemP1,
    w: &Subspace,
    rhs: &BigRational,
) -> Result<CheckOutcome, StabilityError> {
    let report = sys.subsheaf_of(w)?;
    if report.trivial {
        return Ok(CheckOutcome::Trivial(report));
    }
    let corank = (w.dim() - report.rank_ew) as i64;
    let lhs = ratio(report.deg_ew, corank);
    // the kernel of W ⊗ O -> E_W has slope -lhs
    let kernel = &report.kernel_splitting;
    assert_eq!(kernel.rank() as i64, corank);
    assert_eq!(-kernel.slope().map_err(|_| StabilityError::ZeroRank)?, lhs, "dual kernel slope differs from lhs");
    let relation = Relation::of(&lhs, rhs);
    Ok(CheckOutcome::Certificate(LinStabCertificate { dim_w: w.dim(), report, lhs, rhs: rhs.clone(), relation }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Stable,
    StrictlySemistable,
    Unstable,
    EvidenceOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Coverage {
    /// Every subspace of dimension `1..n-1` over GF(p).
    Exhaustive { p: u32 },
    /// Structured candidates plus random subspaces.
    Sampled { samples: usize, structured: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityVerdict {
    pub kind: VerdictKind,
    /// Violations first, then equalities, each in canonical order.
    pub certificates: Vec<LinStabCertificate>,
    pub coverage: Coverage,
    pub examined: u64,
    pub skipped_trivial: u64,
    pub violations: u64,
    pub equalities: u64,
    pub note: String,
}

impl StabilityVerdict {
    pub fn has_violation(&self) -> bool {
        self.violations > 0
    }
}

pub(crate) fn decide(exhaustive: bool, violations: u64, equalities: u64) -> VerdictKind {
    if violations > 0 {
        VerdictKind::Unstable
    } else if !exhaustive {
        VerdictKind::EvidenceOnly
    } else if equalities > 0 {
        VerdictKind::StrictlySemistable
    } else {
        VerdictKind::Stable
    }
}

/// A certificate transported along a degree-`k` cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PulledCertificate {
    pub k: i64,
    pub numeric: NumericalSystem,
    #[serde(serialize_with = "serialize_rational")]
    pub lhs: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub rhs: BigRational,
    pub relation: Relation,
}

/// Both sides of the inequality for `numeric` and a subsystem described by
/// its `s`, `e`, `m` fields.
pub fn certificate_sides(numeric: &NumericalSystem) -> Option<(BigRational, BigRational)> {
    let (s, e, m) = (numeric.s?, numeric.e?, numeric.m?);
    if m <= s || numeric.n <= numeric.r {
        return None;
    }
    Some((ratio(e, m - s), ratio(numeric.d, numeric.n - numeric.r)))
}

pub fn certificate_numeric(sys: &CoherentSystemP1, cert: &LinStabCertificate) -> NumericalSystem {
    let (r, d, n) = sys.type_tuple();
    NumericalSystem::new(r as i64, d, n as i64).with_subsystem(
        cert.report.rank_ew as i64,
        cert.report.deg_ew,
        cert.dim_w as i64,
    )
}

pub fn pullback_certificate(numeric: &NumericalSystem, k: i64) -> PulledCertificate {
    let pulled = pullback_numeric(numeric, k);
    let (lhs, rhs) = certificate_sides(&pulled).expect("certificate data");
    let relation = Relation::of(&lhs, &rhs);
    PulledCertificate { k, numeric: pulled, lhs, rhs, relation }
}

/// Outcome of running both sides of the `(2, d, 4)` criterion on one system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Criterion2d4Report {
    pub d: i64,
    pub d3: i64,
    pub hypothesis: bool,
    pub dsb: SplittingType,
    pub dsb_verdict: SlopeVerdict,
    pub linstab: VerdictKind,
    pub violation_found: bool,
    /// False only if the system is linearly stable, `d < 2 d3`, and the
    /// kernel bundle is not stable.
    pub consistent: bool,
}

/// `d < 2 d3`.
pub fn hypothesis_2d4(d: i64, d3: i64) -> bool {
    d < 2 * d3
}

pub fn check_2d4_criterion(
    sys: &CoherentSystemP1,
    d3: i64,
    config: &SearchConfig,
) -> Result<Criterion2d4Report, StabilityError> {
    let (r, d, n) = sys.type_tuple();
    if r != 2 || n != 4 {
        return Err(StabilityError::WrongType { expected: "(2, d, 4)".into(), got: format!("({r}, {d}, {n})") });
    }
    let dsb = sys.dual_span().map_err(|e| match e {
        CoherentError::NotGenerated => StabilityError::NotGenerated,
        other => other.into(),
    })?;
    let dsb_verdict = slope_stability_p1(&dsb.kernel);
    let verdict = if sys.field().is_prime_field() {
        linstab_exhaustive(sys, config)?
    } else {
        linstab_sampled(sys, config.samples, config.seed)?
    };
    let hypothesis = hypothesis_2d4(d, d3);
    let consistent =
        !(hypothesis && verdict.kind == VerdictKind::Stable && dsb_verdict.kind != SlopeKind::Stable);
    Ok(Criterion2d4Report {
        d,
        d3,
        hypothesis,
        dsb: dsb.kernel,
        dsb_verdict,
        linstab: verdict.kind,
        violation_found: verdict.has_violation(),
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields_poly::FieldSpec;
    use num_traits::Zero;

    #[test]
    fn slopes() {
        assert_eq!(slope(2, 7).unwrap(), ratio(7, 2));
        assert_eq!(mu_alpha(2, 7, 4, &BigRational::zero()).unwrap(), slope(2, 7).unwrap());
        assert_eq!(mu_alpha(2, 7, 4, &ratio(1, 2)).unwrap(), ratio(9, 2));
        let n = 3;
        assert_eq!(slope(2, -(4 * n + 2)).unwrap(), ratio(-(2 * n + 1), 1));
        assert_eq!(slope(0, 3), Err(StabilityError::ZeroRank));
    }

    #[test]
    fn split_bundle_verdicts() {
        assert_eq!(slope_stability_p1(&SplittingType::new(vec![-1, -1, -1])).kind, SlopeKind::StrictlySemistable);
        assert_eq!(slope_stability_p1(&SplittingType::new(vec![4])).kind, SlopeKind::Stable);
        let v = slope_stability_p1(&SplittingType::new(vec![-3, -4]));
        assert_eq!((v.kind, v.destabilizing_degree), (SlopeKind::Unstable, Some(-3)));
    }

    #[test]
    fn divisor_subspace_gives_equality() {
        let f = FieldSpec::prime(2).unwrap();
        let sys = CoherentSystemP1::complete(f, vec![3]);
        let e = |i: usize| (0..4).map(|k| f.from_i64((k == i) as i64)).collect::<Vec<_>>();
        // sections divisible by t
        let CheckOutcome::Certificate(c) = linstab_check_one(&sys, &[e(1), e(2), e(3)]).unwrap() else {
            panic!("expected a certificate");
        };
        assert_eq!((c.lhs.clone(), c.rhs.clone(), c.relation), (ratio(1, 1), ratio(1, 1), Relation::Equal));
        assert!(matches!(linstab_check_one(&sys, &[e(0)]).unwrap(), CheckOutcome::Trivial(_)));
        assert_eq!(reduced_slope(&CoherentSystemP1::complete(f, vec![3, 4])).unwrap(), ratio(7, 7));
    }

    #[test]
    fn criterion_hypothesis() {
        assert!(hypothesis_2d4(14, 8));
        assert!(!hypothesis_2d4(7, 3));
        assert!(hypothesis_2d4(5, 3));
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(decide(true, 0, 0), VerdictKind::Stable);
        assert_eq!(decide(true, 0, 2), VerdictKind::StrictlySemistable);
        assert_eq!(decide(true, 1, 2), VerdictKind::Unstable);
        assert_eq!(decide(false, 0, 2), VerdictKind::EvidenceOnly);
        assert_eq!(decide(false, 1, 0), VerdictKind::Unstable);
    }
}
