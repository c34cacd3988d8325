use super::{frac, gonality_lookup, int, riemann_roch, AuditRow, Expect, GonalityProfile, NumerologyError, RowKind};
use crate::coherent::{pullback_numeric, NumericalSystem};
use crate::stability::hypothesis_2d4;

fn refuse(msg: String) -> NumerologyError {
    NumerologyError::Precondition(msg)
}

/// Dimension of `{V in Gr(k, N) : dim(V ∩ A) >= j}` for a fixed `a`-dimensional `A`.
///
/// `None` when no `k`-plane can meet `A` in dimension `j`.
pub fn schubert_dim(k: i64, big_n: i64, a: i64, j: i64) -> Option<i64> {
    if j > k.min(a) || k > big_n || a > big_n || j < 0 {
        return None;
    }
    let generic = (k + a - big_n).max(0);
    let full = k * (big_n - k);
    if j <= generic {
        Some(full)
    } else {
        Some(full - j * (big_n - k - a + j))
    }
}

/// Smallest integer strictly greater than `p / q` for `q > 0`.
fn next_integer_above(p: i64, q: i64) -> i64 {
    p.div_euclid(q) + 1
}

pub fn exa_one_audit(r: i64, a: i64, d: i64) -> Result<Vec<AuditRow>, NumerologyError> {
    const A: &str = "exa_one";
    let g = 2;
    if r < 1 || a < 1 {
        return Err(refuse(format!("r = {r} and a = {a} must be positive")));
    }
    if !(3 * r + 2 * a < d && d < 4 * r + 2 * a) {
        return Err(refuse(format!("{} < d < {} fails for d = {d}", 3 * r + 2 * a, 4 * r + 2 * a)));
    }
    let b: &[(&str, i64)] = &[("r", r), ("a", a), ("d", d)];
    let m = d - 2 * r - a;
    let deg_k = 2 * g - 2;
    let canonical = frac(deg_k, g - 1);
    let system = frac(d, m);
    let printed_den = d - 2 * r - 2 * a;
    Ok(vec![
        AuditRow::ints(A, "window lower 3r+2a < d", b, 3 * r + 2 * a, Expect::Lt, d)
            .note("window printed with n; read as 3r + 2a < d < 4r + 2a"),
        AuditRow::ints(A, "window upper d < 4r+2a", b, d, Expect::Lt, 4 * r + 2 * a),
        AuditRow::ints(A, "m = d-2r-a positive", b, m, Expect::Gt, 0),
        AuditRow::new(A, "canonical side deg K/(h0(K)-1)", b, canonical.clone(), Expect::Eq, int(2)),
        AuditRow::new(A, "system side d/m > 2", b, system.clone(), Expect::Gt, int(2)),
        AuditRow::ints(A, "2d-4r-2a < d", b, 2 * d - 4 * r - 2 * a, Expect::Lt, d),
        AuditRow::new(A, "canonical subsystem violates", b, canonical, Expect::Lt, system.clone())
            .note("not linearly semistable"),
        AuditRow::new(A, "dsb slope -d/m < -2", b, -system, Expect::Lt, int(-2)),
        AuditRow::ints(A, "slope line denominator", b, printed_den, Expect::Eq, m)
            .kind(RowKind::Discrepancy)
            .printed("-d/(d - 2r - 2a)")
            .note("printed denominator d-2r-2a against m = d-2r-a"),
        AuditRow::new(A, "dsb slope as printed < -2", b, frac(-d, printed_den), Expect::Lt, int(-2)),
    ])
}

pub fn exa_two_audit(r: i64, d: i64, g: i64, r_sub: i64) -> Result<Vec<AuditRow>, NumerologyError> {
    const A: &str = "exa_two";
    if !(1 <= r_sub && r_sub < r) || g < 0 {
        return Err(refuse(format!("need 1 <= r' < r and g >= 0, got r = {r}, r' = {r_sub}, g = {g}")));
    }
    if d <= 2 * r * g - r {
        return Err(refuse(format!("d = {d} must exceed 2rg - r = {}", 2 * r * g - r)));
    }
    if (d * r_sub) % r != 0 {
        return Err(refuse(format!("d' = {d}*{r_sub}/{r} is not an integer")));
    }
    if d <= r * g {
        return Err(refuse(format!("d = {d} must exceed rg = {}", r * g)));
    }
    let d_sub = d * r_sub / r;
    let b: &[(&str, i64)] = &[("r", r), ("d", d), ("g", g), ("r_sub", r_sub), ("d_sub", d_sub)];
    let h0_sub = riemann_roch(r_sub, d_sub, g);
    let h0 = riemann_roch(r, d, g);
    let mu = frac(d, r);
    let mu_sub = frac(d_sub, r_sub);
    let gq = int(g);
    let step0 = frac(d_sub, h0_sub - r_sub);
    let step1 = frac(d_sub, d_sub - r_sub * (g - 1) - r_sub);
    let step2 = &mu_sub / (&mu_sub - &gq);
    let step3 = &mu / (&mu - &gq);
    let step4 = frac(d, d - r * g);
    let step5 = frac(d, h0 - r);
    Ok(vec![
        AuditRow::ints(A, "d > 2rg - r", b, d, Expect::Gt, 2 * r * g - r),
        AuditRow::new(A, "slope above 2g-2, so h1 = 0", b, mu.clone(), Expect::Gt, int(2 * g - 2)),
        AuditRow::new(A, "slopes agree", b, mu_sub, Expect::Eq, mu),
        AuditRow::new(A, "chain: Riemann-Roch for E'", b, step0.clone(), Expect::Eq, step1.clone()),
        AuditRow::new(A, "chain: divide by r'", b, step1, Expect::Eq, step2.clone()),
        AuditRow::new(A, "chain: d'/r' = d/r", b, step2, Expect::Eq, step3.clone()),
        AuditRow::new(A, "chain: multiply by r", b, step3, Expect::Eq, step4.clone()),
        AuditRow::new(A, "chain: Riemann-Roch for E", b, step4, Expect::Eq, step5.clone()),
        AuditRow::new(A, "reduced slopes equal", b, step0, Expect::Eq, step5).note("at best strictly semistable"),
    ])
}

pub fn exa_three_audit(r: i64, d: i64, n: i64, s: i64, e: i64, m: i64) -> Result<Vec<AuditRow>, NumerologyError> {
    const A: &str = "exa_three";
    if e <= 0 || m <= s || r < 1 || n <= r || s < 1 {
        return Err(refuse(format!("need e > 0, m > s >= 1, n > r >= 1; got ({r},{d},{n},{s},{e},{m})")));
    }
    let b: &[(&str, i64)] = &[("r", r), ("d", d), ("n", n), ("s", s), ("e", e), ("m", m)];
    let one = AuditRow::new(A, "hypothesis s/(r(m-s)) <= 1/(n-r)", b, frac(s, r * (m - s)), Expect::Le, frac(1, n - r))
        .kind(RowKind::Hypothesis);
    let two = AuditRow::new(A, "hypothesis e <= ds/r", b, int(e), Expect::Le, frac(d * s, r)).kind(RowKind::Hypothesis);
    let applicable = one.pass() && two.pass();
    let strict = applicable && (one.relation != super::Relation::Equal || two.relation != super::Relation::Equal);
    let mut rows = vec![one, two];
    if !applicable {
        return Ok(rows);
    }
    let lhs = frac(e, m - s);
    let mid = frac(d * s, r * (m - s));
    let rhs = frac(d, n - r);
    rows.push(AuditRow::new(A, "first inequality, from e <= ds/r", b, lhs.clone(), Expect::Le, mid.clone()));
    rows.push(AuditRow::new(A, "second inequality, from s/(r(m-s)) <= 1/(n-r)", b, mid, Expect::Le, rhs.clone()));
    rows.push(AuditRow::new(A, "conclusion e/(m-s) <= d/(n-r)", b, lhs.clone(), Expect::Le, rhs.clone()));
    if strict {
        rows.push(
            AuditRow::new(A, "strict conclusion", b, lhs, Expect::Lt, rhs).note("kernel bundle not semistable"),
        );
    } else {
        rows.push(AuditRow::new(A, "equality throughout", b, lhs, Expect::Eq, rhs).note("at best strictly semistable"));
    }
    Ok(rows)
}

/// Degrees `(d1, d2)` of nonsplit extensions `0 -> N1 -> F -> N2 -> 0` on an
/// elliptic curve with `deg F <= 3`, `h0(N1) + h0(N2) >= 3` and `d1 <= d2 <= d1 + 1`.
fn elliptic_indecomposable_cases() -> Vec<(i64, i64)> {
    let h0_max = |d: i64| if d > 0 { d } else if d == 0 { 1 } else { 0 };
    let mut out = Vec::new();
    for total in 0..=3 {
        for d1 in -6..=6 {
            let d2 = total - d1;
            // Ext^1(N2, N1) = H0(N2 - N1)^* needs d2 >= d1
            if d2 < d1 || d2 > d1 + 1 {
                continue;
            }
            if h0_max(d1) + h0_max(d2) >= 3 {
                out.push((d1, d2));
            }
        }
    }
    out
}

/// Degrees `(a1, a2)` of split generated bundles on an elliptic curve with
/// `deg <= 3` and at least three sections.
fn elliptic_decomposable_cases() -> Vec<(i64, i64)> {
    let generated = |d: i64| d == 0 || d >= 2;
    let h0 = |d: i64| if d == 0 { 1 } else { d };
    let mut out = Vec::new();
    for a1 in 0..=3 {
        for a2 in a1..=3 - a1 {
            if generated(a1) && generated(a2) && h0(a1) + h0(a2) >= 3 {
                out.push((a1, a2));
            }
        }
    }
    out
}

pub fn elliptic_dims_audit(e: i64) -> Result<Vec<AuditRow>, NumerologyError> {
    const A: &str = "elliptic_dims";
    if !(2..=3).contains(&e) {
        return Err(refuse(format!("e = {e} outside {{2, 3}}")));
    }
    let g = 1;
    let b: &[(&str, i64)] = &[("e", e)];
    let h0_e = riemann_roch(2, 7, g);
    let gr = 4 * (h0_e - 4);
    let quot = riemann_roch(1, (7 - e) - e, g);
    let span = riemann_roch(1, e, g);
    let sigma_i = schubert_dim(4, h0_e, span, 2).expect("2 <= e");
    let sigma_i_param = 2 * (e - 2) + 2 * ((h0_e - 2) - 2);
    let union_i = sigma_i + quot;
    let dec = elliptic_decomposable_cases();
    let indec = elliptic_indecomposable_cases();
    let quot0 = 2 * 4;
    let sigma_j = schubert_dim(4, h0_e, 3, 3).expect("valid");
    Ok(vec![
        AuditRow::ints(A, "h0(Z,E) by Riemann-Roch", b, h0_e, Expect::Eq, 7).printed("7"),
        AuditRow::ints(A, "obstruction degree 2e-7", b, 2 * e - 7, Expect::Lt, 0),
        AuditRow::ints(A, "dim Quot^{1,7-e} = chi", b, quot, Expect::Eq, 7 - 2 * e).printed("7 - 2e"),
        AuditRow::ints(A, "dim i(H0(M))", b, span, Expect::Eq, e),
        AuditRow::ints(A, "dim Sigma_i by Schubert count", b, sigma_i, Expect::Eq, 2 * e + 2).printed("2e + 2"),
        AuditRow::ints(A, "dim Sigma_i by flag parameters", b, sigma_i_param, Expect::Eq, 2 * e + 2),
        AuditRow::ints(A, "union of Sigma_i", b, union_i, Expect::Eq, 9).printed("(2e + 2) + (7 - 2e) = 9"),
        AuditRow::ints(A, "dim Gr(4, H0(Z,E))", b, gr, Expect::Eq, 12).printed("12"),
        AuditRow::ints(A, "union of Sigma_i below Gr", b, union_i, Expect::Lt, gr),
        AuditRow::ints(A, "decomposable cases O + M', deg M' in {2,3}", b, dec.len() as i64, Expect::Eq, 2)
            .note(format!("{dec:?}")),
        AuditRow::ints(A, "h0 of O + M' at least 3", b, 1 + e, Expect::Ge, 3),
        AuditRow::ints(A, "nonsplit cases (1,2)", b, indec.len() as i64, Expect::Eq, 1).note(format!("{indec:?}")),
        AuditRow::ints(A, "h0(F) of nonsplit case by Riemann-Roch", b, riemann_roch(2, 3, g), Expect::Eq, 3),
        AuditRow::ints(A, "dim Quot^{0,4} = rk * 4", b, quot0, Expect::Eq, 8).printed("8"),
        AuditRow::ints(A, "dim Sigma_j", b, sigma_j, Expect::Eq, 3).printed("3"),
        AuditRow::ints(A, "union of Sigma_j", b, sigma_j + quot0, Expect::Eq, 11).printed("3 + 8 = 11"),
        AuditRow::ints(A, "union of Sigma_j below Gr", b, sigma_j + quot0, Expect::Lt, gr),
        AuditRow::ints(A, "degree threshold for dim W = 3", b, next_integer_above(7, 2), Expect::Eq, 4),
    ])
}

pub fn counterex_dims_audit(e: i64, t: i64) -> Result<Vec<AuditRow>, NumerologyError> {
    const A: &str = "counterex_dims";
    if e < 3 || t < 1 || t > e + 1 {
        return Err(refuse(format!("need e >= 3 and 1 <= t <= e + 1, got e = {e}, t = {t}")));
    }
    let b: &[(&str, i64)] = &[("e", e), ("t", t)];
    let h0_e = riemann_roch(1, e, 0) + riemann_roch(1, e + 1, 0);
    let chi = riemann_roch(1, 2 * e + 1 - 2 * t, 0);
    let quot_printed = 2 * (e - t - 1);
    let span = riemann_roch(1, t, 0);
    let sigma_printed = 2 * (2 * e + t - 4);
    let sigma = schubert_dim(4, h0_e, span, 2).expect("t >= 1");
    let sigma_param = 2 * (span - 2) + 2 * ((h0_e - 2) - 2);
    let gr = 4 * (h0_e - 4);
    let splits: Vec<i64> = (0..=e / 2).map(|a1| riemann_roch(1, a1, 0) + riemann_roch(1, e - a1, 0)).collect();
    let h0_f = e + 2;
    let gr3 = 3 * (h0_f - 3);
    let proj = h0_e - 3 - 1;
    let sigma_f = gr3 + proj;
    let quot0 = 2 * (e + 1);
    Ok(vec![
        AuditRow::ints(A, "h0(E)", b, h0_e, Expect::Eq, 2 * e + 3).printed("2e + 3"),
        AuditRow::ints(A, "dim Quot^{1,2e+1-t}", b, quot_printed, Expect::Eq, chi)
            .kind(RowKind::Discrepancy)
            .printed("2(e - t - 1)")
            .note("chi(O(2e+1-2t)) = 2e+2-2t"),
        AuditRow::ints(A, "dim j(H0(O(t)))", b, span, Expect::Eq, t + 1),
        AuditRow::ints(A, "dim Sigma_j", b, sigma_printed, Expect::Eq, sigma)
            .kind(RowKind::Discrepancy)
            .printed("2(2e + t - 4)")
            .note("Schubert count gives 2(2e+t-2)"),
        AuditRow::ints(A, "dim Sigma_j by flag parameters", b, sigma_param, Expect::Eq, sigma),
        AuditRow::ints(A, "union bound from printed terms", b, sigma_printed + quot_printed, Expect::Le, 6 * e - 6)
            .printed("6e - 6"),
        AuditRow::ints(A, "Schubert Sigma_j plus printed Quot", b, sigma + quot_printed, Expect::Eq, 6 * e - 6)
            .note("reproduces the printed bound"),
        AuditRow::ints(A, "dim Gr(4, H0(E))", b, gr, Expect::Eq, 8 * e - 4).printed("8e - 4"),
        AuditRow::ints(A, "printed chain 6e-6 < 8e-4", b, 6 * e - 6, Expect::Lt, gr),
        AuditRow::ints(A, "recomputed chain", b, sigma + chi, Expect::Lt, gr).note("Schubert Sigma_j plus chi"),
        AuditRow::ints(A, "degree threshold for dim W = 3", b, next_integer_above(2 * e + 1, 2), Expect::Eq, e + 1),
        AuditRow::ints(A, "min h0(F) over splittings of degree e", b, *splits.iter().min().expect("e >= 0"), Expect::Eq, h0_f)
            .printed("e + 2"),
        AuditRow::ints(A, "max h0(F) over splittings of degree e", b, *splits.iter().max().expect("e >= 0"), Expect::Eq, h0_f),
        AuditRow::ints(A, "dim P(H0(E)/W)", b, proj, Expect::Eq, 2 * e - 1).printed("2e - 1"),
        AuditRow::ints(A, "dim Sigma_F", b, sigma_f, Expect::Eq, 5 * e - 4).printed("5e - 4"),
        AuditRow::ints(A, "dim Quot^{0,e+1}", b, quot0, Expect::Eq, 2 * (e + 1)).printed("2(e + 1)"),
        AuditRow::ints(A, "union of Sigma_F", b, sigma_f + quot0, Expect::Eq, 7 * e - 2).printed("7e - 2"),
        AuditRow::ints(A, "7e-2 < 8e-4", b, 7 * e - 2, Expect::Lt, gr),
    ])
}

pub fn bielliptic_audit() -> Vec<AuditRow> {
    const A: &str = "bielliptic";
    let g = 1;
    let profile = GonalityProfile::bielliptic();
    let d3 = gonality_lookup(&profile, 3).expect("preset has three entries");
    let base = NumericalSystem::new(2, 7, 4);
    let pulled = pullback_numeric(&base, 2);
    let b: &[(&str, i64)] = &[];
    let hyp = hypothesis_2d4(pulled.d, d3);
    vec![
        AuditRow::ints(A, "h1(M2^v M1) = h0(M1^v M2)", b, riemann_roch(1, 4 - 3, g), Expect::Eq, 1).printed("1"),
        AuditRow::ints(A, "h0(Z,E)", b, riemann_roch(1, 3, g) + riemann_roch(1, 4, g), Expect::Eq, 7).printed("7"),
        AuditRow::ints(A, "h0(Z,E(-z))", b, riemann_roch(2, 5, g), Expect::Eq, 7 - 2).printed("5"),
        AuditRow::ints(A, "d3", b, d3, Expect::Eq, 2 * 3 + 2).printed("2 * 3 + 2 = 8"),
        AuditRow::ints(A, "pullback rank", b, pulled.r, Expect::Eq, 2),
        AuditRow::ints(A, "pullback degree", b, pulled.d, Expect::Eq, 14),
        AuditRow::ints(A, "pullback sections", b, pulled.n, Expect::Eq, 4),
        AuditRow::ints(A, "deg f*E < 2 d3", b, pulled.d, Expect::Lt, 2 * d3).printed("14 < 2 * d3"),
        AuditRow::ints(A, "(2,d,4) hypothesis", b, hyp as i64, Expect::Eq, 1),
        AuditRow::new(A, "degree threshold for dim W = 3", b, int(next_integer_above(7, 2)), Expect::Gt, frac(7, 2)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find<'a>(rows: &'a [AuditRow], name: &str) -> &'a AuditRow {
        rows.iter().find(|r| r.name == name).unwrap_or_else(|| panic!("no row {name}"))
    }

    /// Dimension of the Schubert locus as the largest stratum `dim(V ∩ A) = i`.
    fn schubert_by_strata(k: i64, big_n: i64, a: i64, j: i64) -> Option<i64> {
        (j..=k.min(a)).filter(|&i| k - i <= big_n - a).map(|i| i * (a - i) + (k - i) * (big_n - k)).max()
    }

    #[test]
    fn schubert_matches_strata() {
        for big_n in 1..12 {
            for k in 0..=big_n {
                for a in 0..=big_n {
                    for j in 0..=k.min(a) {
                        assert_eq!(schubert_dim(k, big_n, a, j), schubert_by_strata(k, big_n, a, j), "{k} {big_n} {a} {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn exa_one_example() {
        let rows = exa_one_audit(2, 1, 9).unwrap();
        let sys = find(&rows, "system side d/m > 2");
        assert_eq!(sys.lhs, frac(9, 4));
        assert!(rows.iter().all(|r| !r.unexpected_failure()));
        assert!(!find(&rows, "slope line denominator").pass());
        assert!(exa_one_audit(2, 1, 10).is_err());
        assert_eq!(find(&rows, "canonical side deg K/(h0(K)-1)").lhs, int(2));
    }

    #[test]
    fn exa_two_example() {
        let rows = exa_two_audit(2, 10, 2, 1).unwrap();
        assert_eq!(find(&rows, "reduced slopes equal").lhs, frac(5, 3));
        assert!(rows.iter().all(|r| r.pass()));
        assert!(exa_two_audit(2, 6, 2, 1).is_err());
        assert!(exa_two_audit(2, 9, 2, 1).is_err());
    }

    #[test]
    fn exa_three_example() {
        let rows = exa_three_audit(2, 8, 5, 1, 4, 3).unwrap();
        assert_eq!(find(&rows, "hypothesis s/(r(m-s)) <= 1/(n-r)").lhs, frac(1, 4));
        assert_eq!(find(&rows, "hypothesis e <= ds/r").relation, crate::stability::Relation::Equal);
        let c = find(&rows, "strict conclusion");
        assert_eq!((c.lhs.clone(), c.rhs.clone()), (int(2), frac(8, 3)));
        assert!(c.pass());
        // both hypotheses tight
        let tight = exa_three_audit(2, 4, 4, 1, 2, 2).unwrap();
        assert!(find(&tight, "equality throughout").pass());
        let broken = exa_three_audit(2, 8, 5, 1, 5, 3).unwrap();
        assert_eq!(broken.len(), 2);
        assert!(exa_three_audit(2, 8, 5, 1, 0, 3).is_err());
    }

    #[test]
    fn elliptic_values() {
        for e in [2, 3] {
            let rows = elliptic_dims_audit(e).unwrap();
            assert!(rows.iter().all(AuditRow::pass), "{rows:?}");
            assert_eq!(find(&rows, "union of Sigma_i").lhs, int(9));
            assert_eq!(find(&rows, "union of Sigma_j").lhs, int(11));
            assert_eq!(find(&rows, "dim Gr(4, H0(Z,E))").lhs, int(12));
        }
        assert!(elliptic_dims_audit(4).is_err());
    }

    #[test]
    fn counterexample_values() {
        let rows = counterex_dims_audit(3, 1).unwrap();
        let chi = find(&rows, "dim Quot^{1,2e+1-t}");
        assert_eq!((chi.lhs.clone(), chi.rhs.clone()), (int(2), int(6)));
        assert!(!chi.pass());
        assert_eq!(find(&rows, "printed chain 6e-6 < 8e-4").lhs, int(12));
        assert_eq!(find(&rows, "printed chain 6e-6 < 8e-4").rhs, int(20));
        assert_eq!(find(&rows, "7e-2 < 8e-4").lhs, int(19));
        assert!(rows.iter().all(|r| !r.unexpected_failure()));
        assert!(counterex_dims_audit(3, 5).is_err());
        assert!(counterex_dims_audit(2, 1).is_err());
        for e in 0..20 {
            assert_eq!(7 * e - 2 < 8 * e - 4, e > 2);
        }
    }

    #[test]
    fn bielliptic_values() {
        let rows = bielliptic_audit();
        assert!(rows.iter().all(AuditRow::pass));
        assert_eq!(find(&rows, "d3").lhs, int(8));
        assert_eq!(find(&rows, "deg f*E < 2 d3").rhs, int(16));
    }
}
