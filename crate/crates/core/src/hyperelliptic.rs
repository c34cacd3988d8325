//! Line bundles `H^m` pulled back from `O(m)` along the double cover of a
//! hyperelliptic curve, and the counterexample built from `(H^{2n+1}, V)`.
//!
//! For `m <= g - 1` pullback identifies `H0(P1, O(m))` with `H0(C, H^m)`,
//! so every section computation is done on the line.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coherent::{random_generated_system, random_system, CoherentError, CoherentSystemP1};
use crate::fields_poly::{serialize_rational, BinaryForm, FieldSpec};
use crate::p1_sheaves::{vector_to_forms, BundleMap, SplittingType};
use crate::seed::sub_seed;
use crate::stability::{
    certificate_numeric, linstab_exhaustive, pullback_certificate, PulledCertificate, Relation, SearchConfig,
    StabilityError, VerdictKind,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperellipticError {
    #[error("need g >= 7, n >= 2 and 3n + 1 <= g - 1; got g = {g}, n = {n}")]
    Constraint { g: i64, n: i64 },
    #[error("H^{m} on a curve of genus {g}: sections are only identified with the line for 0 <= m <= g - 1")]
    OutOfRange { g: i64, m: i64 },
    #[error("expected 3 independent forms of degree {degree}")]
    BadSubspace { degree: usize },
    #[error("{0} is not a prime field")]
    NotPrime(FieldSpec),
    #[error(transparent)]
    Coherent(#[from] CoherentError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HyperellipticModel {
    pub g: i64,
    pub n: i64,
}

impl HyperellipticModel {
    pub const COVER_DEGREE: i64 = 2;

    pub fn new(g: i64, n: i64) -> Result<Self, HyperellipticError> {
        if g < 7 || n < 2 || 3 * n + 1 > g - 1 {
            return Err(HyperellipticError::Constraint { g, n });
        }
        Ok(HyperellipticModel { g, n })
    }

    /// Degree of the base line bundle `O(2n+1)`.
    pub fn base_degree(&self) -> i64 {
        2 * self.n + 1
    }
}

/// `h0(C, H^m)` for `0 <= m <= g - 1`.
pub fn h0_hm(g: i64, m: i64) -> Result<i64, HyperellipticError> {
    if m < 0 || m > g - 1 {
        return Err(HyperellipticError::OutOfRange { g, m });
    }
    Ok(SplittingType::new(vec![m]).h0() as i64)
}

/// A base system `(O(2n+1), V̄)` and the numerical type of its pullback.
#[derive(Clone, Debug)]
pub struct PullbackSeries {
    pub base_system: CoherentSystemP1,
    pub lifted_type: (i64, i64, i64),
}

impl PullbackSeries {
    pub fn new(model: &HyperellipticModel, base_system: CoherentSystemP1) -> Result<Self, HyperellipticError> {
        let degree = model.base_degree() as usize;
        if base_system.bundle_degrees() != [model.base_degree()] || base_system.dim() != 3 {
            return Err(HyperellipticError::BadSubspace { degree });
        }
        let (r, d, n) = base_system.type_tuple();
        Ok(PullbackSeries { base_system, lifted_type: (r as i64, HyperellipticModel::COVER_DEGREE * d, n as i64) })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultKernel {
    pub domain: usize,
    pub codomain: usize,
    pub dim: usize,
    /// Each kernel vector as three forms of degree `n`.
    pub basis: Vec<Vec<BinaryForm>>,
}

/// Kernel of `V ⊗ H0(H^n) -> H0(H^{3n+1})`, computed on the line.
pub fn mult_map_kernel(model: &HyperellipticModel, vbar: &[BinaryForm]) -> Result<MultKernel, HyperellipticError> {
    let degree = model.base_degree() as usize;
    if vbar.len() != 3 || vbar.iter().any(|f| !f.is_zero() && f.degree() != Some(degree)) {
        return Err(HyperellipticError::BadSubspace { degree });
    }
    let field = vbar[0].field();
    let sections: Vec<Vec<BinaryForm>> = vbar.iter().map(|f| vec![f.clone()]).collect();
    CoherentSystemP1::new(field, vec![model.base_degree()], sections.clone())
        .map_err(|_| HyperellipticError::BadSubspace { degree })?;
    // the multiplication map is the degree-n piece of V ⊗ O -> O(2n+1)
    let eval = BundleMap::from_sections(field, vec![model.base_degree()], &sections).map_err(CoherentError::from)?;
    let piece = eval.graded_piece(model.n);
    let kernel = piece.kernel();
    let basis = kernel.iter().map(|v| vector_to_forms(field, &[0, 0, 0], model.n, v)).collect();
    Ok(MultKernel { domain: piece.ncols(), codomain: piece.nrows(), dim: kernel.len(), basis })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DestabilizerRecord {
    pub n: i64,
    #[serde(serialize_with = "serialize_rational")]
    pub mu_subsheaf: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub mu_dsb: BigRational,
    pub relation: Relation,
    #[serde(serialize_with = "serialize_rational")]
    pub gap: BigRational,
    pub not_semistable: bool,
}

/// `mu(H^{-n}) = -2n` against `mu(M) = -(4n+2)/2`.
pub fn destabilizer_check(model: &HyperellipticModel) -> DestabilizerRecord {
    let n = model.n;
    let mu_subsheaf = BigRational::from_integer(BigInt::from(-2 * n));
    let mu_dsb = BigRational::new(BigInt::from(-(4 * n + 2)), BigInt::from(2));
    let relation = Relation::of(&mu_subsheaf, &mu_dsb);
    let gap = &mu_subsheaf - &mu_dsb;
    DestabilizerRecord { n, mu_subsheaf, mu_dsb, relation, gap, not_semistable: relation == Relation::Greater }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerRow {
    pub name: &'static str,
    pub expected: i64,
    pub computed: i64,
    pub matches: bool,
}

fn ledger_row(name: &'static str, expected: i64, computed: i64) -> LedgerRow {
    LedgerRow { name, expected, computed, matches: expected == computed }
}

/// The dimension counts of the construction.
pub fn dimension_ledger(model: &HyperellipticModel) -> Result<Vec<LedgerRow>, HyperellipticError> {
    let (g, n) = (model.g, model.n);
    let h_base = h0_hm(g, 2 * n + 1)?;
    let h_n = h0_hm(g, n)?;
    let h_top = h0_hm(g, 3 * n + 1)?;
    Ok(vec![
        ledger_row("h0(H^(2n+1)) = 2n+2", 2 * n + 2, h_base),
        ledger_row("dim V * h0(H^n) = 3(n+1)", 3 * (n + 1), 3 * h_n),
        ledger_row("h0(H^(3n+1)) = 3n+2", 3 * n + 2, h_top),
        ledger_row("kernel lower bound 3(n+1) - (3n+2)", 1, 3 * h_n - h_top),
    ])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessRecord {
    pub sample: u64,
    pub seed: u64,
    pub sections: Vec<String>,
    pub base_dsb: SplittingType,
    pub verdict: VerdictKind,
    pub examined: u64,
    /// Certificates of the base sweep transported along the double cover.
    pub lifted: Vec<PulledCertificate>,
    pub lift_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem43Report {
    pub g: i64,
    pub n: i64,
    pub prime: u32,
    pub seed: u64,
    pub samples: usize,
    /// The type label quoted for this construction; kept verbatim.
    pub stated_type: String,
    /// The type of the system actually constructed.
    pub computed_type: String,
    pub type_label_suspect: bool,
    pub ledger: Vec<LedgerRow>,
    pub kernel_dims: Vec<usize>,
    pub kernel_dim_one: usize,
    pub destabilizer: DestabilizerRecord,
    /// Rank and degree of the lifted kernel bundle, by pulling back the witness's.
    pub lifted_dsb: Option<(i64, i64)>,
    /// Degree of the lifted largest summand of the witness's kernel bundle.
    pub lifted_subsheaf_degree: Option<i64>,
    pub witness: Option<WitnessRecord>,
    pub passed: bool,
}

pub fn theorem43_pipeline(
    model: &HyperellipticModel,
    p: u32,
    seed: u64,
    samples: usize,
) -> Result<Theorem43Report, HyperellipticError> {
    let field = FieldSpec::prime(p).map_err(|_| HyperellipticError::NotPrime(FieldSpec::Prime(p)))?;
    let n = model.n;
    let base = SplittingType::new(vec![model.base_degree()]);
    let ledger = dimension_ledger(model)?;

    let mut kernel_dims = Vec::with_capacity(samples);
    for i in 0..samples as u64 {
        let (sys, _) = random_system(&base, 3, sub_seed(seed, "thm43-kernel", i), FieldSpec::Rationals)?;
        let vbar: Vec<BinaryForm> = sys.sections().into_iter().map(|s| s[0].clone()).collect();
        kernel_dims.push(mult_map_kernel(model, &vbar)?.dim);
    }
    let kernel_dim_one = kernel_dims.iter().filter(|&&k| k == 1).count();

    let destabilizer = destabilizer_check(model);

    let config = SearchConfig::default();
    let found = (0..samples as u64)
        .into_par_iter()
        .map(|i| -> Result<Option<WitnessRecord>, HyperellipticError> {
            let s = sub_seed(seed, "thm43-witness", i);
            let (sys, _) = random_generated_system(&base, 3, s, field, 100)?;
            let verdict = linstab_exhaustive(&sys, &config)?;
            if verdict.kind != VerdictKind::Stable {
                return Ok(None);
            }
            let dsb = sys.dual_span()?.kernel;
            let lifted: Vec<PulledCertificate> = verdict
                .certificates
                .iter()
                .map(|c| pullback_certificate(&certificate_numeric(&sys, c), HyperellipticModel::COVER_DEGREE))
                .collect();
            let lift_ok = verdict.certificates.iter().zip(&lifted).all(|(c, l)| {
                let k = BigRational::from_integer(HyperellipticModel::COVER_DEGREE.into());
                l.relation == c.relation && l.lhs == &c.lhs * &k && l.rhs == &c.rhs * &k
            });
            Ok(Some(WitnessRecord {
                sample: i,
                seed: s,
                sections: sys.sections().iter().map(|f| f[0].to_string()).collect(),
                base_dsb: dsb,
                verdict: verdict.kind,
                examined: verdict.examined,
                lifted,
                lift_ok,
            }))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .next();

    let k = HyperellipticModel::COVER_DEGREE;
    let lifted_dsb = found.as_ref().map(|w| (w.base_dsb.rank() as i64, k * w.base_dsb.degree()));
    let lifted_subsheaf_degree = found.as_ref().and_then(|w| w.base_dsb.max_degree()).map(|a| k * a);

    let dsb_ok = lifted_dsb == Some((2, -(4 * n + 2)));
    let sub_ok = lifted_subsheaf_degree.is_some_and(|a| BigRational::from_integer(a.into()) >= destabilizer.mu_subsheaf);
    let passed = ledger.iter().all(|r| r.matches)
        && kernel_dims.iter().all(|&k| k >= 1)
        && 10 * kernel_dim_one >= 9 * samples
        && destabilizer.not_semistable
        && found.as_ref().is_some_and(|w| w.lift_ok)
        && dsb_ok
        && sub_ok;

    Ok(Theorem43Report {
        g: model.g,
        n,
        prime: p,
        seed,
        samples,
        stated_type: format!("(1, {}, 2)", 4 * n + 2),
        computed_type: format!("(1, {}, 3)", 4 * n + 2),
        type_label_suspect: true,
        ledger,
        kernel_dims,
        kernel_dim_one,
        destabilizer,
        lifted_dsb,
        lifted_subsheaf_degree,
        witness: found,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    #[test]
    fn constraints() {
        assert!(HyperellipticModel::new(8, 2).is_ok());
        assert_eq!(HyperellipticModel::new(7, 2), Err(HyperellipticError::Constraint { g: 7, n: 2 }));
        assert!(HyperellipticModel::new(10, 1).is_err());
        assert!(HyperellipticModel::new(6, 1).is_err());
    }

    #[test]
    fn section_counts() {
        assert_eq!(h0_hm(10, 5), Ok(6));
        assert_eq!(h0_hm(10, 0), Ok(1));
        assert_eq!(h0_hm(10, 7), Ok(8));
        assert_eq!(h0_hm(10, 10), Err(HyperellipticError::OutOfRange { g: 10, m: 10 }));
        assert!(h0_hm(10, -1).is_err());
        let rows = dimension_ledger(&HyperellipticModel::new(10, 2).unwrap()).unwrap();
        assert!(rows.iter().all(|r| r.matches));
        assert_eq!(rows.iter().map(|r| r.computed).collect::<Vec<_>>(), vec![6, 9, 8, 1]);
    }

    #[test]
    fn kernel_of_multiplication() {
        let model = HyperellipticModel::new(10, 2).unwrap();
        let vbar = vec![
            BinaryForm::from_i64s(Q, &[1, 0, 0, 0, 0, 0]),
            BinaryForm::from_i64s(Q, &[0, 0, 0, 0, 0, 1]),
            BinaryForm::from_i64s(Q, &[0, 1, 0, 1, 0, 0]),
        ];
        let k = mult_map_kernel(&model, &vbar).unwrap();
        assert_eq!((k.domain, k.codomain), (9, 8));
        assert!(k.dim >= 1);
        for v in &k.basis {
            let sum = vbar.iter().zip(v).fold(BinaryForm::zero(Q), |acc, (a, b)| acc.add(&a.mul(b).unwrap()).unwrap());
            assert!(sum.is_zero());
        }
    }

    #[test]
    fn common_factor_enlarges_the_kernel() {
        let model = HyperellipticModel::new(10, 2).unwrap();
        let h = BinaryForm::from_i64s(Q, &[1, 1, 1]);
        let qs = [BinaryForm::from_i64s(Q, &[1, 0, 0, 0]), BinaryForm::from_i64s(Q, &[0, 0, 0, 1]), BinaryForm::from_i64s(Q, &[0, 1, 2, 0])];
        let vbar: Vec<BinaryForm> = qs.iter().map(|q| q.mul(&h).unwrap()).collect();
        assert!(mult_map_kernel(&model, &vbar).unwrap().dim > 1);
        let dependent = vec![vbar[0].clone(), vbar[0].clone(), vbar[1].clone()];
        assert!(mult_map_kernel(&model, &dependent).is_err());
    }

    #[test]
    fn destabilizer_gap() {
        for n in 2..8 {
            let r = destabilizer_check(&HyperellipticModel::new(3 * n + 2, n).unwrap());
            assert_eq!(r.gap, BigRational::from_integer(1.into()));
            assert!(r.not_semistable);
        }
        let r = destabilizer_check(&HyperellipticModel::new(10, 2).unwrap());
        assert_eq!((r.mu_subsheaf.to_integer(), r.mu_dsb.to_integer()), (BigInt::from(-4), BigInt::from(-5)));
    }

    #[test]
    fn pipeline_small() {
        let model = HyperellipticModel::new(10, 2).unwrap();
        let report = theorem43_pipeline(&model, 7, 0, 10).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.lifted_dsb, Some((2, -10)));
        assert_eq!(report.stated_type, "(1, 10, 2)");
    }
}
