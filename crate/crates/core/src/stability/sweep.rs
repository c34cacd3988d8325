use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;

use crate::coherent::CoherentSystemP1;
use crate::fields_poly::{BinaryForm, FieldSpec, Scalar};
use crate::linalg::Subspace;
use crate::p1_sheaves::{forms_to_vector, subsets};
use crate::seed::rng_for;

use super::{
    check_subspace, decide, reduced_slope, sort_certificates, CheckOutcome, Coverage, GrassmannEnumerator,
    LinStabCertificate, Relation, StabilityError, StabilityVerdict,
};

/// Limits and sampling parameters for linear stability searches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest section-space dimension accepted by the exhaustive sweep.
    pub max_n: usize,
    /// Largest prime accepted by the exhaustive sweep.
    pub max_p: u32,
    /// Largest total number of subspaces the exhaustive sweep may visit.
    pub max_subspaces: u64,
    /// Random subspaces drawn by the sampled search.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_n: 6, max_p: 13, max_subspaces: 2_000_000, samples: 200, seed: 0 }
    }
}

#[derive(Default)]
struct Tally {
    examined: u64,
    trivial: u64,
    greater: u64,
    kept: Vec<LinStabCertificate>,
}

impl Tally {
    fn record(&mut self, outcome: CheckOutcome) {
        self.examined += 1;
        match outcome {
            CheckOutcome::Trivial(_) => self.trivial += 1,
            CheckOutcome::Certificate(c) if c.relation == Relation::Greater => self.greater += 1,
            CheckOutcome::Certificate(c) => self.kept.push(c),
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.examined += other.examined;
        self.trivial += other.trivial;
        self.greater += other.greater;
        self.kept.extend(other.kept);
        self
    }
}

fn finish(tally: Tally, exhaustive: bool, coverage: Coverage, note: String) -> StabilityVerdict {
    let mut certificates = tally.kept;
    sort_certificates(&mut certificates);
    let violations = certificates.iter().filter(|c| c.relation == Relation::Less).count() as u64;
    let equalities = certificates.len() as u64 - violations;
    StabilityVerdict {
        kind: decide(exhaustive, violations, equalities),
        certificates,
        coverage,
        examined: tally.examined,
        skipped_trivial: tally.trivial,
        violations,
        equalities,
        note,
    }
}

fn assert_boundary(sys: &CoherentSystemP1, rhs: &num_rational::BigRational) -> Result<(), StabilityError> {
    let whole = Subspace::whole(sys.field(), sys.dim());
    match check_subspace(sys, &whole, rhs)? {
        CheckOutcome::Certificate(c) if c.relation == Relation::Equal => Ok(()),
        other => panic!("W = V must give equality, got {other:?}"),
    }
}

/// Checks every proper nonzero subspace of `V` over GF(p).
///
/// One-dimensional subspaces are visited and must generate trivial subsheaves;
/// `W = V` is checked separately as the equality case and not counted.
pub fn linstab_exhaustive(sys: &CoherentSystemP1, config: &SearchConfig) -> Result<StabilityVerdict, StabilityError> {
    let field = sys.field();
    let p = field.modulus().ok_or(StabilityError::NotPrimeField)?;
    if !sys.is_generated() {
        return Err(StabilityError::NotGenerated);
    }
    let n = sys.dim();
    if n > config.max_n {
        return Err(StabilityError::ResourceGuard {
            what: "section dimension",
            got: n.to_string(),
            limit: config.max_n.to_string(),
        });
    }
    if p > config.max_p {
        return Err(StabilityError::ResourceGuard { what: "prime", got: p.to_string(), limit: config.max_p.to_string() });
    }
    let enumerators: Vec<GrassmannEnumerator> = (1..n)
        .map(|w| GrassmannEnumerator::new(n, w, p))
        .collect::<Option<_>>()
        .ok_or(StabilityError::ResourceGuard {
            what: "subspace count",
            got: "overflow".into(),
            limit: config.max_subspaces.to_string(),
        })?;
    let total: u64 = enumerators.iter().map(|e| e.len()).sum();
    if total > config.max_subspaces {
        return Err(StabilityError::ResourceGuard {
            what: "subspace count",
            got: total.to_string(),
            limit: config.max_subspaces.to_string(),
        });
    }
    let rhs = reduced_slope(sys)?;
    assert_boundary(sys, &rhs)?;

    let parts = rayon::current_num_threads() * 4;
    let mut tally = Tally::default();
    for e in &enumerators {
        let to_scalar = |v: u32| Scalar::Residue { value: v, modulus: p };
        let chunk_tallies: Vec<Result<Tally, StabilityError>> = e
            .chunks(parts)
            .into_par_iter()
            .map(|range| {
                let mut t = Tally::default();
                for idx in range {
                    let (rows, pivots) = e.get(idx);
                    let basis = rows.into_iter().map(|r| r.into_iter().map(to_scalar).collect()).collect();
                    let w = Subspace::from_rref_unchecked(field, n, basis, pivots);
                    let outcome = check_subspace(sys, &w, &rhs)?;
                    if w.dim() == 1 {
                        assert!(matches!(outcome, CheckOutcome::Trivial(_)), "a single section generated a nontrivial subsheaf");
                    }
                    t.record(outcome);
                }
                Ok(t)
            })
            .collect();
        for t in chunk_tallies {
            tally = tally.merge(t?);
        }
    }
    let note = format!(
        "exhaustive over GF({p}); the verdict concerns this system over GF({p}) and makes no claim about any lift to characteristic zero"
    );
    Ok(finish(tally, true, Coverage::Exhaustive { p }, note))
}

/// Expresses `V ∩ U` (with `U` in monomial coordinates of `H0(E)`) in the section basis.
fn meet_in_v_coordinates(sys: &CoherentSystemP1, u: &Subspace) -> Subspace {
    let meet = sys.section_space().intersect(u);
    let coords = meet
        .basis()
        .iter()
        .map(|v| sys.section_space().coordinates(v).expect("vector of V"))
        .collect();
    Subspace::span(sys.field(), sys.dim(), coords)
}

/// `D * H0(E(-deg D))` inside `H0(E)`.
fn divisible_by(sys: &CoherentSystemP1, divisor: &BinaryForm) -> Subspace {
    let field = sys.field();
    let degs = sys.bundle_degrees();
    let k = divisor.degree().expect("nonzero divisor") as i64;
    let mut vectors = Vec::new();
    for (i, &a) in degs.iter().enumerate() {
        if a < k {
            continue;
        }
        let m = (a - k) as usize;
        for u in 0..=m {
            let mono = BinaryForm::monomial(field, m, u, field.one());
            let mut forms = vec![BinaryForm::zero(field); degs.len()];
            forms[i] = divisor.mul(&mono).expect("same field");
            vectors.push(forms_to_vector(field, degs, 0, &forms));
        }
    }
    Subspace::span(field, sys.section_space().ambient(), vectors)
}

fn summand_space(sys: &CoherentSystemP1, i: usize) -> Subspace {
    let field = sys.field();
    let degs = sys.bundle_degrees();
    let a = degs[i];
    let vectors = (0..a + 1)
        .map(|u| {
            let mut forms = vec![BinaryForm::zero(field); degs.len()];
            forms[i] = BinaryForm::monomial(field, a as usize, u as usize, field.one());
            forms_to_vector(field, degs, 0, &forms)
        })
        .collect();
    Subspace::span(field, sys.section_space().ambient(), vectors)
}

/// Linear forms vanishing at `(0:1)`, `(1:0)`, `(1:1)`, `(1:-1)`, `(1:2)`, ...
fn point_forms(field: FieldSpec, count: usize) -> Vec<BinaryForm> {
    let available = field.modulus().map_or(usize::MAX, |p| p as usize + 1);
    let mut out = vec![BinaryForm::s(field), BinaryForm::t(field)];
    let mut c = 1i64;
    while out.len() < count.min(available) {
        // b*s - a*t vanishes at (a:b) = (1:c)
        out.push(BinaryForm::from_coeffs(field, 1, vec![field.from_i64(c), field.from_i64(-1)]).unwrap());
        c = if c > 0 { -c } else { -c + 1 };
    }
    out.truncate(count.min(available));
    out
}

/// Deterministic candidate subspaces of `V` of dimension `2..n-1`, in V coordinates.
///
/// Spans of subsets of the section basis (all of them up to twelve sections,
/// otherwise those of size 2 and `n - 1`), the sections lying in one summand,
/// and the sections vanishing along small divisors supported at a few points.
pub fn structured_candidates(sys: &CoherentSystemP1) -> Vec<Subspace> {
    let field = sys.field();
    let n = sys.dim();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |s: Subspace| {
        if s.dim() >= 2 && s.dim() < n && seen.insert(s.clone()) {
            out.push(s);
        }
    };
    let sizes: Vec<usize> = if n <= 12 { (2..n).collect() } else { vec![2, n - 1] };
    for k in sizes {
        for idx in subsets(n, k) {
            let rows = idx
                .iter()
                .map(|&i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect())
                .collect();
            push(Subspace::span(field, n, rows));
        }
    }
    for i in 0..sys.rank() {
        push(meet_in_v_coordinates(sys, &summand_space(sys, i)));
    }
    let max_deg = sys.bundle_degrees().iter().copied().max().unwrap_or(0).max(0) as usize;
    let points = point_forms(field, 6);
    for l in &points {
        let mut divisor = BinaryForm::constant(field.one());
        for _ in 0..max_deg {
            divisor = divisor.mul(l).unwrap();
            push(meet_in_v_coordinates(sys, &divisible_by(sys, &divisor)));
        }
    }
    for (i, a) in points.iter().enumerate().take(4) {
        for b in points.iter().skip(i + 1).take(3) {
            push(meet_in_v_coordinates(sys, &divisible_by(sys, &a.mul(b).unwrap())));
        }
    }
    out
}

/// Searches structured candidates and `samples` random subspaces.
///
/// A violation is an exact disproof of semistability; otherwise the verdict
/// is evidence only.
pub fn linstab_sampled(sys: &CoherentSystemP1, samples: usize, seed: u64) -> Result<StabilityVerdict, StabilityError> {
    if !sys.is_generated() {
        return Err(StabilityError::NotGenerated);
    }
    let rhs = reduced_slope(sys)?;
    assert_boundary(sys, &rhs)?;
    let field = sys.field();
    let n = sys.dim();
    let structured = structured_candidates(sys);
    let structured_count = structured.len();
    let mut seen: HashSet<Subspace> = structured.iter().cloned().collect();
    let mut candidates = structured;
    if n >= 3 {
        for i in 0..samples as u64 {
            let mut rng = rng_for(seed, "linstab-sample", i);
            let dim = rng.gen_range(2..n);
            let rows = (0..dim).map(|_| (0..n).map(|_| field.random(&mut rng)).collect()).collect();
            let s = Subspace::span(field, n, rows);
            if s.dim() == dim && seen.insert(s.clone()) {
                candidates.push(s);
            }
        }
    }
    let tallies: Vec<Result<Tally, StabilityError>> = candidates
        .par_chunks(16)
        .map(|chunk| {
            let mut t = Tally::default();
            for w in chunk {
                t.record(check_subspace(sys, w, &rhs)?);
            }
            Ok(t)
        })
        .collect();
    let mut tally = Tally::default();
    for t in tallies {
        tally = tally.merge(t?);
    }
    let note = format!(
        "{} structured and {} random candidate subspaces; absence of a violation is evidence only",
        structured_count,
        candidates.len() - structured_count
    );
    Ok(finish(tally, false, Coverage::Sampled { samples, structured: structured_count, seed }, note))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::VerdictKind;

    #[test]
    fn complete_cubic_over_gf2() {
        let f = FieldSpec::prime(2).unwrap();
        let sys = CoherentSystemP1::complete(f, vec![3]);
        let v = linstab_exhaustive(&sys, &SearchConfig::default()).unwrap();
        assert_eq!(v.kind, VerdictKind::StrictlySemistable);
        assert_eq!(v.examined, 15 + 35 + 15);
        assert_eq!(v.skipped_trivial, 15);
        assert_eq!(v.violations, 0);
        assert!(v.equalities > 0);
    }

    #[test]
    fn guards_are_enforced() {
        let f = FieldSpec::prime(17).unwrap();
        let sys = CoherentSystemP1::complete(f, vec![2]);
        assert!(matches!(
            linstab_exhaustive(&sys, &SearchConfig::default()),
            Err(StabilityError::ResourceGuard { what: "prime", .. })
        ));
        let q = CoherentSystemP1::complete(FieldSpec::Rationals, vec![2]);
        assert_eq!(linstab_exhaustive(&q, &SearchConfig::default()), Err(StabilityError::NotPrimeField));
    }

    #[test]
    fn sampled_search_on_complete_series() {
        let sys = CoherentSystemP1::complete(FieldSpec::Rationals, vec![3]);
        let v = linstab_sampled(&sys, 20, 4).unwrap();
        assert_eq!(v.kind, VerdictKind::EvidenceOnly);
        // divisor-vanishing subspaces give equality
        assert!(v.equalities > 0);
        assert_eq!(v.violations, 0);
    }

    #[test]
    fn structured_candidates_include_coordinate_hyperplanes() {
        let sys = CoherentSystemP1::complete(FieldSpec::Rationals, vec![4]);
        let cands = structured_candidates(&sys);
        let f = FieldSpec::Rationals;
        for skip in 0..5 {
            let rows = (0..5)
                .filter(|&i| i != skip)
                .map(|i| (0..5).map(|j| f.from_i64((i == j) as i64)).collect())
                .collect();
            assert!(cands.contains(&Subspace::span(f, 5, rows)));
        }
    }
}
