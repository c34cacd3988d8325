use std::collections::HashSet;

use linstab_core::butler::{audit_properties, butler_from_subbundle, summand_inclusion};
use linstab_core::coherent::{pullback_numeric, random_generated_system, random_system, NumericalSystem};
use linstab_core::fields_poly::{BinaryForm, FieldSpec, Scalar};
use linstab_core::hyperelliptic::{destabilizer_check, mult_map_kernel, HyperellipticModel};
use linstab_core::numerology::{exa_three_audit, Expect};
use linstab_core::p1_sheaves::{generic_rank, kernel_splitting, SplittingType};
use linstab_core::seed::rng_for;
use linstab_core::stability::{
    certificate_sides, gaussian_binomial, linstab_check_one, pullback_certificate, slope_stability_p1, CheckOutcome,
    GrassmannEnumerator, Relation, SlopeKind,
};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

fn gf(p: u32) -> FieldSpec {
    FieldSpec::prime(p).unwrap()
}

fn form(field: FieldSpec, coeffs: &[i64]) -> BinaryForm {
    BinaryForm::from_i64s(field, coeffs)
}

fn small_bundle() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..=4, 1..=3).prop_filter("room for a proper V", |b| {
        let t = SplittingType::new(b.clone());
        t.h0() > t.rank()
    })
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degrees_add_under_multiplication(
        a in prop::collection::vec(-20i64..20, 1..8),
        b in prop::collection::vec(-20i64..20, 1..8),
        p in prop::sample::select(vec![2u32, 5, 101]),
    ) {
        for field in [FieldSpec::Rationals, gf(p)] {
            let (f, g) = (form(field, &a), form(field, &b));
            let h = f.mul(&g).unwrap();
            match (f.degree(), g.degree()) {
                (Some(x), Some(y)) => prop_assert_eq!(h.degree(), Some(x + y)),
                _ => prop_assert!(h.is_zero()),
            }
        }
    }

    #[test]
    fn gcd_divides_inputs(
        common in prop::collection::vec(-5i64..5, 1..4),
        a in prop::collection::vec(-5i64..5, 1..5),
        b in prop::collection::vec(-5i64..5, 1..5),
    ) {
        for field in [FieldSpec::Rationals, gf(7)] {
            let c = form(field, &common);
            let f = c.mul(&form(field, &a)).unwrap();
            let g = c.mul(&form(field, &b)).unwrap();
            if f.is_zero() && g.is_zero() {
                continue;
            }
            let d = BinaryForm::gcd(&[f.clone(), g.clone()]).unwrap();
            prop_assert!(d.divides(&f) && d.divides(&g));
            if !c.is_zero() {
                prop_assert!(c.divides(&d));
            }
        }
    }

    #[test]
    fn rationals_round_trip(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
        let (x, y) = (ratio(a, b), ratio(c, d));
        prop_assert_eq!(&(&x + &y) - &y, x);
    }

    #[test]
    fn grassmann_counts(n in 1usize..=5, p in prop::sample::select(vec![2u32, 3, 5])) {
        for w in 0..=n {
            let e = GrassmannEnumerator::new(n, w, p).unwrap();
            let seen: HashSet<Vec<Vec<u32>>> = e.iter().map(|(rows, _)| rows).collect();
            prop_assert_eq!(BigUint::from(seen.len()), gaussian_binomial(n, w, p));
            prop_assert_eq!(seen.len() as u64, e.len());
        }
    }

    #[test]
    fn slope_verdict_matches_subbundle_search(degrees in prop::collection::vec(-6i64..6, 1..=3)) {
        let t = SplittingType::new(degrees.clone());
        let mu = ratio(t.degree(), t.rank() as i64);
        let r = degrees.len();
        let mut best: Option<BigRational> = None;
        for mask in 1..(1u32 << r) - 1 {
            let sub: Vec<i64> = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| degrees[i]).collect();
            let s = ratio(sub.iter().sum(), sub.len() as i64);
            best = Some(best.map_or(s.clone(), |b| b.max(s)));
        }
        let expected = match best {
            None => SlopeKind::Stable,
            Some(b) if b > mu => SlopeKind::Unstable,
            Some(b) if b == mu => SlopeKind::StrictlySemistable,
            Some(_) => SlopeKind::Stable,
        };
        prop_assert_eq!(slope_stability_p1(&t).kind, expected);
    }

    #[test]
    fn pullback_preserves_relations(
        r in 1i64..5, dn in 1i64..20, extra in 1i64..5, s in 1i64..4, e in 0i64..20, me in 1i64..4, k in 1i64..6,
    ) {
        let numeric = NumericalSystem::new(r, dn, r + extra).with_subsystem(s, e, s + me);
        let base = pullback_certificate(&numeric, 1);
        let pulled = pullback_certificate(&numeric, k);
        let kq = BigRational::from_integer(BigInt::from(k));
        prop_assert_eq!(&pulled.lhs, &(&base.lhs * &kq));
        prop_assert_eq!(&pulled.rhs, &(&base.rhs * &kq));
        prop_assert_eq!(pulled.relation, base.relation);
        let twice = pullback_numeric(&pullback_numeric(&numeric, k), 2);
        prop_assert_eq!(certificate_sides(&twice), certificate_sides(&pullback_numeric(&numeric, 2 * k)));
    }

    #[test]
    fn audit_pass_is_reproducible(r in 1i64..8, d in 1i64..13, extra in 1i64..5, s in 1i64..8, e in 1i64..13, me in 1i64..5) {
        let rows = exa_three_audit(r, d, r + extra, s, e, s + me).unwrap();
        let again = exa_three_audit(r, d, r + extra, s, e, s + me).unwrap();
        prop_assert_eq!(&rows, &again);
        for row in rows {
            prop_assert_eq!(row.pass(), row.expect.holds(Relation::of(&row.lhs, &row.rhs)));
            if row.expect == Expect::Eq {
                prop_assert_eq!(row.pass(), row.lhs == row.rhs);
            }
        }
    }

    #[test]
    fn destabilizer_gap_is_one(n in 2i64..30) {
        let model = HyperellipticModel::new((3 * n + 2).max(7), n).unwrap();
        let rec = destabilizer_check(&model);
        prop_assert_eq!(rec.gap, BigRational::from_integer(1.into()));
        prop_assert!(rec.not_semistable);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kernel_of_evaluation(bundle in small_bundle(), seed in any::<u64>(), p in prop::sample::select(vec![5u32, 7, 101])) {
        let t = SplittingType::new(bundle.clone());
        let mut rng = rng_for(seed, "prop-kernel", 0);
        let n = rng.gen_range(1..=t.h0());
        let (sys, _) = random_system(&t, n, seed, gf(p)).unwrap();
        let map = sys.eval_map();
        let ks = kernel_splitting(map).unwrap();
        let rank = generic_rank(map).unwrap().rank;
        prop_assert_eq!(ks.kernel.rank() + rank, n);
        prop_assert!(map.compose(&ks.basis).unwrap().is_zero());
        for d in ks.profile.start..=ks.profile.end() {
            prop_assert_eq!(ks.kernel.h0_twist(d), ks.profile.h(d));
        }
        // independent constant sections: the kernel has no sections
        prop_assert!(ks.kernel.degrees().iter().all(|&b| b <= -1));
        if sys.is_generated() {
            prop_assert_eq!(ks.kernel.degree(), -t.degree());
        }
    }

    #[test]
    fn dual_span_numerics(bundle in small_bundle(), seed in any::<u64>()) {
        let t = SplittingType::new(bundle);
        let field = gf(7);
        let n = (t.rank() + 1).max(t.h0() - 1).min(t.h0());
        let Ok((sys, _)) = random_generated_system(&t, n, seed, field, 50) else { return Ok(()) };
        let m = sys.dual_span().unwrap();
        prop_assert_eq!(m.kernel.rank(), n - t.rank());
        prop_assert_eq!(m.kernel.degree(), -t.degree());
        let whole: Vec<Vec<Scalar>> = sys.section_space().basis().iter().enumerate()
            .map(|(i, _)| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect();
        let rep = sys.subsheaf_generated(&whole).unwrap();
        prop_assert_eq!((rep.rank_ew, rep.deg_ew), (t.rank(), t.degree()));
        if n > t.rank() {
            match linstab_check_one(&sys, &whole).unwrap() {
                CheckOutcome::Certificate(c) => prop_assert_eq!(c.relation, Relation::Equal),
                CheckOutcome::Trivial(_) => prop_assert!(false, "W = V is never trivial"),
            }
            // V^* -> H0(M^*) is injective exactly when h0(E^*) = 0
            match sys.dual_system() {
                Ok(dual) => {
                    let mm = dual.dual_span().unwrap();
                    prop_assert_eq!((mm.kernel.rank(), mm.kernel.degree()), (t.rank(), -t.degree()));
                }
                Err(_) => prop_assert_eq!(t.min_degree(), Some(0)),
            }
        }
    }

    #[test]
    fn subsheaf_dichotomy(bundle in small_bundle(), seed in any::<u64>(), w in 1usize..4) {
        let t = SplittingType::new(bundle);
        let field = gf(5);
        let n = t.h0().min(5);
        let Ok((sys, _)) = random_generated_system(&t, n, seed, field, 50) else { return Ok(()) };
        let mut rng = rng_for(seed, "prop-subspace", 0);
        let w = w.min(n);
        let basis: Vec<Vec<Scalar>> = (0..w).map(|_| (0..n).map(|_| field.random(&mut rng)).collect()).collect();
        let Ok(rep) = sys.subsheaf_generated(&basis) else { return Ok(()) };
        if rep.trivial {
            prop_assert_eq!((rep.deg_ew, rep.rank_ew), (0, w));
        } else {
            prop_assert!(rep.deg_ew >= 1 && rep.rank_ew < w);
            if n > t.rank() {
                if let CheckOutcome::Certificate(c) = linstab_check_one(&sys, &basis).unwrap() {
                    prop_assert_eq!(c.lhs, ratio(rep.deg_ew, (w - rep.rank_ew) as i64));
                }
            }
        }
    }

    #[test]
    fn butler_numerics(bundle in small_bundle(), seed in any::<u64>()) {
        let t = SplittingType::new(bundle);
        let n = (t.rank() + 1).max(t.h0().min(4)).min(t.h0());
        let Ok((sys, _)) = random_generated_system(&t, n, seed, gf(5), 50) else { return Ok(()) };
        let m = sys.dual_span().unwrap();
        for idx in 0..m.kernel.rank() {
            let diag = butler_from_subbundle(&sys, &summand_inclusion(&m, &[idx])).unwrap();
            prop_assert_eq!(1 + diag.f_s.rank(), diag.w.dim());
            prop_assert_eq!(m.basis.src_degrees()[idx] + diag.f_s.degree(), 0);
            let audit = audit_properties(&diag).unwrap();
            prop_assert!(audit.all_passed(), "{:?}", audit.items);
        }
    }

    #[test]
    fn multiplication_kernel_is_nonzero(seed in any::<u64>(), n in 2i64..4, degenerate in any::<bool>()) {
        let model = HyperellipticModel::new(3 * n + 2 + 1, n).unwrap();
        let q = FieldSpec::Rationals;
        let base = SplittingType::new(vec![model.base_degree()]);
        let (sys, _) = random_system(&base, 3, seed, q).unwrap();
        let mut vbar: Vec<BinaryForm> = sys.sections().into_iter().map(|s| s[0].clone()).collect();
        if degenerate {
            // a common factor makes the kernel larger, never smaller
            let s = BinaryForm::s(q);
            let deg = model.base_degree() as usize - 1;
            vbar = (0..3).map(|i| s.mul(&BinaryForm::monomial(q, deg, i, q.one())).unwrap()).collect();
        }
        prop_assert!(mult_map_kernel(&model, &vbar).unwrap().dim >= 1);
    }
}
