//! Butler diagrams of a generated system by a subbundle of its dual span bundle.
//!
//! For `S ⊂ M = M_{V,E}` the diagram is
//!
//! ```text
//! 0 -> S -> W ⊗ O -> F_S -> 0
//!      |      |        | alpha
//! 0 -> M -> V ⊗ O ->  E  -> 0
//! ```
//!
//! with `W^∨` the image of `V^∨ -> H0(S^∨)` and `F_S^∨ = ker(W^∨ ⊗ O -> S^∨)`.
//! The snake lemma gives `0 -> ker(alpha) -> N -> Q -> T -> 0` with
//! `N = M/S`, `Q = (V/W) ⊗ O` and `T = coker(alpha)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::coherent::{CoherentError, CoherentSystemP1};
use crate::fields_poly::{BinaryForm, Scalar};
use crate::linalg::Subspace;
use crate::p1_sheaves::{
    generic_rank, image_data, kernel_splitting, BundleMap, ImageData, KernelSplitting, SheafError, SplittingType,
};
use crate::stability::{check_subspace, reduced_slope, CheckOutcome, Relation, StabilityError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ButlerError {
    #[error(transparent)]
    Coherent(#[from] CoherentError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error("the map into the dual span bundle has target {got:?}, expected {expected:?}")]
    WrongTarget { expected: Vec<i64>, got: Vec<i64> },
    #[error("S has rank {rank} but its map into M has generic rank {generic}")]
    NotInjective { rank: usize, generic: usize },
    #[error("the image of S is not saturated: the maximal minors share a factor of degree {defect}")]
    NotSaturated { defect: usize },
    #[error("S is zero")]
    ZeroSubbundle,
    #[error("evaluation on W does not factor through F_S")]
    NoFactorization,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RankDegree {
    pub rank: i64,
    pub degree: i64,
}

#[derive(Clone, Debug)]
pub struct ButlerDiagram {
    pub system: CoherentSystemP1,
    pub m: KernelSplitting,
    /// `S -> M`.
    pub s_inclusion: BundleMap,
    /// `S -> V ⊗ O`.
    pub s_composite: BundleMap,
    /// `W ⊆ V`, in the section coordinates of `V`.
    pub w: Subspace,
    /// `S -> W ⊗ O`.
    pub s_in_w: BundleMap,
    pub f_s: SplittingType,
    /// `F_S^∨ -> W^∨ ⊗ O`.
    pub f_dual_basis: BundleMap,
    /// `W ⊗ O -> F_S`; its columns are the sections of `W` in `H0(F_S)`.
    pub q: BundleMap,
    /// `F_S -> E`.
    pub alpha: BundleMap,
    pub image: ImageData,
    pub n_data: RankDegree,
    pub q_data: RankDegree,
    pub t_data: RankDegree,
    pub ker_alpha: RankDegree,
}

/// The inclusion of a set of summands of `M` (columns of its basis).
pub fn summand_inclusion(m: &KernelSplitting, summands: &[usize]) -> BundleMap {
    BundleMap::identity(m.basis.field(), m.basis.src_degrees().to_vec()).select_columns(summands)
}

/// Largest `a` with `Hom(O(a), M) != 0`, read off the `h0` profile of `M`.
pub fn maximal_subbundle_slope(m: &KernelSplitting) -> Option<i64> {
    let profile = &m.profile;
    let top = (profile.start..=profile.end()).find(|&d| profile.h(d) > 0)?;
    let a = -top;
    debug_assert_eq!(Some(a), m.kernel.max_degree());
    Some(a)
}

pub fn butler_from_subbundle(sys: &CoherentSystemP1, s: &BundleMap) -> Result<ButlerDiagram, ButlerError> {
    let field = sys.field();
    let m = sys.dual_span()?;
    if s.tgt_degrees() != m.basis.src_degrees() {
        return Err(ButlerError::WrongTarget { expected: m.basis.src_degrees().to_vec(), got: s.tgt_degrees().to_vec() });
    }
    let rank_s = s.ncols();
    if rank_s == 0 {
        return Err(ButlerError::ZeroSubbundle);
    }
    let generic = generic_rank(s)?.rank;
    if generic < rank_s {
        return Err(ButlerError::NotInjective { rank: rank_s, generic });
    }
    let gcd = s.maximal_minors_gcd().expect("injective maps have a nonzero minor");
    let defect = gcd.degree().expect("nonzero gcd");
    if defect > 0 {
        return Err(ButlerError::NotSaturated { defect });
    }

    let n = sys.dim();
    let s_degs = s.src_degrees().to_vec();
    let composite = m.basis.compose(s)?;

    // coefficient vectors of the composite span W
    let mut coeff_vectors: Vec<(usize, usize, Vec<Scalar>)> = Vec::new();
    for (j, &sj) in s_degs.iter().enumerate() {
        let deg = (-sj) as usize;
        let cols: Vec<Vec<Scalar>> = (0..n).map(|i| composite.entry(i, j).coeff_vector(deg)).collect();
        for l in 0..=deg {
            coeff_vectors.push((j, l, cols.iter().map(|c| c[l].clone()).collect()));
        }
    }
    let w = Subspace::span(field, n, coeff_vectors.iter().map(|(_, _, v)| v.clone()).collect());
    let dim_w = w.dim();

    let blank: Vec<Vec<Scalar>> = s_degs.iter().map(|&sj| vec![field.zero(); (-sj) as usize + 1]).collect();
    let mut coeffs = vec![blank; dim_w];
    for (j, l, v) in &coeff_vectors {
        let c = w.coordinates(v).expect("W contains its spanning vectors");
        for a in 0..dim_w {
            coeffs[a][*j][*l] = c[a].clone();
        }
    }
    let rows: Vec<Vec<BinaryForm>> = coeffs
        .into_iter()
        .map(|row| {
            row.into_iter()
                .zip(&s_degs)
                .map(|(c, &sj)| BinaryForm::from_coeffs(field, (-sj) as usize, c))
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()
        .map_err(SheafError::from)?;
    let s_in_w = BundleMap::new(field, s_degs.clone(), vec![0; dim_w], rows)?;
    let w_incl = BundleMap::identity(field, vec![0; n]).restrict_trivial(w.basis());
    assert_eq!(w_incl.compose(&s_in_w)?, composite, "S -> W ⊗ O does not lift the composite");

    let f_dual = kernel_splitting(&s_in_w.dual())?;
    let f_s = f_dual.kernel.dual();
    let q = f_dual.basis.dual();
    assert!(q.compose(&s_in_w)?.is_zero(), "W ⊗ O -> F_S does not kill S");

    let ev_w = sys.eval_map().restrict_trivial(w.basis());
    let alpha = BundleMap::factor_through(&q, &ev_w)?.ok_or(ButlerError::NoFactorization)?;
    let image = image_data(&alpha)?;

    let (r, d, _) = sys.type_tuple();
    let s_type = s.source_type();
    let n_data = RankDegree {
        rank: m.kernel.rank() as i64 - rank_s as i64,
        degree: m.kernel.degree() - s_type.degree(),
    };
    let q_data = RankDegree { rank: (n - dim_w) as i64, degree: 0 };
    let t_data = RankDegree { rank: r as i64 - image.rank as i64, degree: d - image.degree };
    let ker_alpha = RankDegree { rank: f_s.rank() as i64 - image.rank as i64, degree: f_s.degree() - image.degree };

    Ok(ButlerDiagram {
        system: sys.clone(),
        m,
        s_inclusion: s.clone(),
        s_composite: composite,
        w,
        s_in_w,
        f_s,
        f_dual_basis: f_dual.basis,
        q,
        alpha,
        image,
        n_data,
        q_data,
        t_data,
        ker_alpha,
    })
}

/// Degree of the image of a map whose image has rank one.
///
/// With `alpha = u * (g_1, ..., g_k)` for a primitive column `u`, the image
/// is `O(f_j + deg g_j - deg gcd(g))`, and `deg g_j` is the degree of the gcd
/// of column `j`.
pub fn rank_one_image_degree(alpha: &BundleMap) -> Option<i64> {
    let all: Vec<BinaryForm> = alpha.rows().into_iter().flatten().collect();
    let g_all = BinaryForm::gcd(&all).ok()?;
    let j = (0..alpha.ncols()).find(|&j| alpha.column(j).iter().any(|f| !f.is_zero()))?;
    let g_col = BinaryForm::gcd(&alpha.column(j)).ok()?;
    Some(alpha.src_degrees()[j] + g_col.degree()? as i64 - g_all.degree()? as i64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditItem {
    pub name: &'static str,
    pub applicable: bool,
    pub passed: bool,
    pub detail: String,
}

impl AuditItem {
    fn check(name: &'static str, passed: bool, detail: String) -> Self {
        AuditItem { name, applicable: true, passed, detail }
    }

    fn skipped(name: &'static str, detail: String) -> Self {
        AuditItem { name, applicable: false, passed: true, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ButlerAudit {
    pub s_type: SplittingType,
    pub m_type: SplittingType,
    pub dim_v: usize,
    pub dim_w: usize,
    pub w_basis: Vec<Vec<Scalar>>,
    pub f_s: SplittingType,
    pub image_rank: usize,
    pub image_degree: i64,
    pub maximal_slope: bool,
    pub destabilizing: bool,
    pub n_data: RankDegree,
    pub q_data: RankDegree,
    pub t_data: RankDegree,
    pub ker_alpha: RankDegree,
    pub items: Vec<AuditItem>,
}

impl ButlerAudit {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn audit_properties(diag: &ButlerDiagram) -> Result<ButlerAudit, ButlerError> {
    let sys = &diag.system;
    let s_type = diag.s_inclusion.source_type();
    let m_type = diag.m.kernel.clone();
    let dim_w = diag.w.dim();
    let f = &diag.f_s;
    let mut items = Vec::new();

    let h0_rank = diag.q.graded_piece(0).rank();
    items.push(AuditItem::check("a: W in H0(F_S)", h0_rank == dim_w, format!("W -> H0(F_S) has rank {h0_rank} of {dim_w}")));

    let q_rank = generic_rank(&diag.q)?.rank;
    let q_gcd = diag.q.maximal_minors_gcd().and_then(|g| g.degree());
    let generated = f.rank() == 0 || (q_rank == f.rank() && q_gcd == Some(0));
    let min_f = f.min_degree();
    let no_dual_sections = min_f.is_none_or(|a| a >= 1);
    items.push(AuditItem::check(
        "b: F_S generated by W, h0(F_S^∨) = 0",
        generated && no_dual_sections,
        format!("F_S = {f}, generic rank of W ⊗ O -> F_S {q_rank}, minor gcd degree {q_gcd:?}"),
    ));

    items.push(AuditItem::check("c: alpha nonzero", !diag.alpha.is_zero(), format!("image rank {}", diag.image.rank)));

    let mu_s = ratio(s_type.degree(), s_type.rank() as i64);
    let mu_m = m_type.slope()?;
    let top = maximal_subbundle_slope(&diag.m);
    let maximal = top.is_some_and(|a| mu_s == BigRational::from_integer(a.into()));
    let destabilizing = mu_s > mu_m;
    if maximal {
        let deg_ok = f.degree() <= diag.image.degree;
        let rank_eq = f.rank() == diag.image.rank;
        let deg_eq = f.degree() == diag.image.degree;
        let iff_ok = !destabilizing || rank_eq == deg_eq;
        items.push(AuditItem::check(
            "d: deg F_S <= deg Im(alpha)",
            deg_ok && iff_ok,
            format!(
                "deg F_S = {}, deg I = {}, rk F_S = {}, rk I = {}, destabilizing = {destabilizing}",
                f.degree(),
                diag.image.degree,
                f.rank(),
                diag.image.rank
            ),
        ));
    } else {
        items.push(AuditItem::skipped("d: deg F_S <= deg Im(alpha)", format!("slope of S is {mu_s}, largest summand of M is {top:?}")));
    }
    if diag.image.rank == 1 {
        let by_gcd = rank_one_image_degree(&diag.alpha);
        items.push(AuditItem::check(
            "rank-one image degree by gcd",
            by_gcd == Some(diag.image.degree),
            format!("gcd method {by_gcd:?}, kernel method {}", diag.image.degree),
        ));
    }

    let (r, d, n) = sys.type_tuple();
    let rows_ok = s_type.rank() + f.rank() == dim_w
        && s_type.degree() + f.degree() == 0
        && m_type.rank() + r == n
        && m_type.degree() + d == 0;
    let (k, nn, qq, t) = (diag.ker_alpha, diag.n_data, diag.q_data, diag.t_data);
    let snake_ok =
        k.rank - nn.rank + qq.rank - t.rank == 0 && k.degree - nn.degree + qq.degree - t.degree == 0 && t.rank >= 0 && k.rank >= 0;
    items.push(AuditItem::check(
        "exactness of ranks and degrees",
        rows_ok && snake_ok,
        format!("ker alpha {k:?}, N {nn:?}, Q {qq:?}, T {t:?}"),
    ));

    let rederived = kernel_splitting(&diag.q)?.kernel;
    items.push(AuditItem::check(
        "S recovered as ker(W ⊗ O -> F_S)",
        rederived == s_type,
        format!("recovered {rederived}, S = {s_type}"),
    ));

    // E_W computed directly agrees with the image of alpha
    let ew = sys.subsheaf_of(&diag.w)?;
    items.push(AuditItem::check(
        "E_W equals Im(alpha)",
        ew.rank_ew == diag.image.rank && ew.deg_ew == diag.image.degree,
        format!("E_W rank {} degree {}", ew.rank_ew, ew.deg_ew),
    ));

    // when M_{W,E_W} is S itself, a destabilizing S is a linear-stability violation
    if destabilizing && ew.kernel_splitting == s_type && dim_w < n {
        let rhs = reduced_slope(sys)?;
        let outcome = check_subspace(sys, &diag.w, &rhs)?;
        let (passed, detail) = match outcome {
            CheckOutcome::Certificate(c) => (c.relation == Relation::Less, format!("{} {} {}", c.lhs, c.relation.symbol(), c.rhs)),
            CheckOutcome::Trivial(_) => (false, "E_W is trivial".to_string()),
        };
        items.push(AuditItem::check("destabilizing S gives a violating W", passed, detail));
    }

    Ok(ButlerAudit {
        s_type,
        m_type,
        dim_v: n,
        dim_w,
        w_basis: diag.w.basis().to_vec(),
        f_s: f.clone(),
        image_rank: diag.image.rank,
        image_degree: diag.image.degree,
        maximal_slope: maximal,
        destabilizing,
        n_data: diag.n_data,
        q_data: diag.q_data,
        t_data: diag.t_data,
        ker_alpha: diag.ker_alpha,
        items,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::random_generated_system;
    use crate::fields_poly::FieldSpec;

    #[test]
    fn collapsed_diagram() {
        let q = FieldSpec::Rationals;
        let sys = CoherentSystemP1::complete(q, vec![1]);
        let m = sys.dual_span().unwrap();
        let diag = butler_from_subbundle(&sys, &summand_inclusion(&m, &[0])).unwrap();
        assert_eq!(diag.w.dim(), 2);
        assert_eq!(diag.f_s, SplittingType::new(vec![1]));
        assert_eq!(diag.image.degree, 1);
        let audit = audit_properties(&diag).unwrap();
        assert!(audit.all_passed(), "{:?}", audit.items);
        assert_eq!(audit.t_data, RankDegree { rank: 0, degree: 0 });
    }

    #[test]
    fn twisted_cubic_summand() {
        let q = FieldSpec::Rationals;
        let sys = CoherentSystemP1::complete(q, vec![3]);
        let m = sys.dual_span().unwrap();
        assert_eq!(m.kernel, SplittingType::new(vec![-1, -1, -1]));
        let diag = butler_from_subbundle(&sys, &summand_inclusion(&m, &[0])).unwrap();
        assert_eq!(diag.w.dim(), 2);
        assert_eq!(diag.f_s, SplittingType::new(vec![1]));
        assert!(diag.f_s.degree() <= diag.image.degree);
        let audit = audit_properties(&diag).unwrap();
        assert!(audit.maximal_slope);
        assert!(audit.all_passed(), "{:?}", audit.items);
    }

    #[test]
    fn full_dual_image() {
        let p = FieldSpec::prime(5).unwrap();
        let (sys, _) = random_generated_system(&SplittingType::new(vec![3, 4]), 4, 0, p, 50).unwrap();
        let m = sys.dual_span().unwrap();
        let top = m.kernel.max_degree().unwrap();
        let idx = m.basis.src_degrees().iter().position(|&a| a == top).unwrap();
        let diag = butler_from_subbundle(&sys, &summand_inclusion(&m, &[idx])).unwrap();
        assert_eq!(diag.w.dim(), 4);
        assert_eq!(diag.q_data.rank, 0);
        assert_eq!(diag.t_data, RankDegree { rank: 0, degree: 0 });
        let audit = audit_properties(&diag).unwrap();
        assert!(audit.all_passed(), "{:?}", audit.items);
    }

    #[test]
    fn destabilizing_summand_is_a_violation() {
        let p = FieldSpec::prime(5).unwrap();
        let balanced = (0..20)
            .map(|seed| random_generated_system(&SplittingType::new(vec![2, 3]), 4, seed, p, 50).unwrap().0)
            .find(|sys| sys.dual_span().unwrap().kernel == SplittingType::new(vec![-2, -3]));
        let sys = balanced.expect("a system with balanced dual span bundle");
        let m = sys.dual_span().unwrap();
        let idx = m.basis.src_degrees().iter().position(|&a| a == -2).unwrap();
        let diag = butler_from_subbundle(&sys, &summand_inclusion(&m, &[idx])).unwrap();
        let audit = audit_properties(&diag).unwrap();
        assert!(audit.destabilizing);
        assert!(audit.all_passed(), "{:?}", audit.items);
        let item = audit.items.iter().find(|i| i.name == "destabilizing S gives a violating W").unwrap();
        assert_eq!(item.detail, "2 < 5/2");
    }

    #[test]
    fn non_saturated_subsheaf_is_refused() {
        let q = FieldSpec::Rationals;
        let sys = CoherentSystemP1::complete(q, vec![1]);
        let m = sys.dual_span().unwrap();
        // O(-2) -> O(-1) by multiplication with s
        let s = BundleMap::new(q, vec![-2], m.basis.src_degrees().to_vec(), vec![vec![BinaryForm::s(q)]]).unwrap();
        assert_eq!(butler_from_subbundle(&sys, &s).unwrap_err(), ButlerError::NotSaturated { defect: 1 });
        let zero = BundleMap::zero(q, vec![-2], vec![-1]);
        assert!(matches!(butler_from_subbundle(&sys, &zero), Err(ButlerError::NotInjective { .. })));
    }
}
