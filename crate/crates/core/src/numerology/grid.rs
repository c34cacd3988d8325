use rayon::prelude::*;
use serde::Serialize;

use super::{
    bielliptic_audit, counterex_dims_audit, elliptic_dims_audit, exa_one_audit, exa_three_audit, exa_two_audit,
    AuditRow, RowKind,
};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GridSummary {
    pub audit: &'static str,
    pub cases: usize,
    pub rows: usize,
    pub passed: usize,
    pub check_failures: usize,
    pub hypotheses_false: usize,
    pub discrepancies_flagged: usize,
}

impl GridSummary {
    fn absorb(&mut self, rows: &[AuditRow]) {
        self.cases += 1;
        self.rows += rows.len();
        for r in rows {
            let pass = r.pass();
            self.passed += pass as usize;
            match r.kind {
                RowKind::Check => self.check_failures += !pass as usize,
                RowKind::Hypothesis => self.hypotheses_false += !pass as usize,
                RowKind::Discrepancy => self.discrepancies_flagged += !pass as usize,
            }
        }
    }
}

/// Rows of every audit over the default parameter grid.
///
/// The six-parameter lattice is large, so `rows` keeps only its failing
/// checks; its counts still appear in the summary.
#[derive(Clone, Debug, Serialize)]
pub struct GridReport {
    pub summaries: Vec<GridSummary>,
    pub rows: Vec<AuditRow>,
}

impl GridReport {
    pub fn check_failures(&self) -> usize {
        self.summaries.iter().map(|s| s.check_failures).sum()
    }

    pub fn summary(&self, audit: &str) -> Option<&GridSummary> {
        self.summaries.iter().find(|s| s.audit == audit)
    }
}

fn collect(audit: &'static str, cases: Vec<Vec<AuditRow>>, keep_all: bool, out: &mut Vec<AuditRow>) -> GridSummary {
    let mut summary = GridSummary { audit, ..Default::default() };
    for rows in cases {
        summary.absorb(&rows);
        if keep_all {
            out.extend(rows);
        } else {
            out.extend(rows.into_iter().filter(AuditRow::unexpected_failure));
        }
    }
    summary
}

pub fn exa_one_cases() -> Vec<(i64, i64, i64)> {
    let mut v = Vec::new();
    for r in 1..=4 {
        for a in 1..=3 {
            for d in 3 * r + 2 * a + 1..4 * r + 2 * a {
                v.push((r, a, d));
            }
        }
    }
    v
}

pub fn exa_two_cases() -> Vec<(i64, i64, i64, i64)> {
    let mut v = Vec::new();
    for g in 1..=4 {
        for r in 2..=4 {
            for r_sub in 1..r {
                let lo = 2 * r * g - r + 1;
                for d in lo..=40.max(lo) {
                    if (d * r_sub) % r == 0 {
                        v.push((r, d, g, r_sub));
                    }
                }
            }
        }
    }
    v
}

/// `(r, d, n, s, e, m)` with entries in `1..=12`, `s <= r < n`, `s < m <= n`.
pub fn exa_three_cases() -> Vec<(i64, i64, i64, i64, i64, i64)> {
    let mut v = Vec::new();
    for r in 1..=12 {
        for n in r + 1..=12 {
            for s in 1..=r {
                for m in s + 1..=n {
                    for d in 1..=12 {
                        for e in 1..=12 {
                            v.push((r, d, n, s, e, m));
                        }
                    }
                }
            }
        }
    }
    v
}

pub fn counterex_cases() -> Vec<(i64, i64)> {
    (3..=10).flat_map(|e| (1..=e + 1).map(move |t| (e, t))).collect()
}

pub fn default_grid() -> GridReport {
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let ok = "grid cases satisfy the preconditions";

    let one = exa_one_cases().into_par_iter().map(|(r, a, d)| exa_one_audit(r, a, d).expect(ok)).collect();
    summaries.push(collect("exa_one", one, true, &mut rows));

    let two =
        exa_two_cases().into_par_iter().map(|(r, d, g, rs)| exa_two_audit(r, d, g, rs).expect(ok)).collect();
    summaries.push(collect("exa_two", two, true, &mut rows));

    let three = exa_three_cases()
        .into_par_iter()
        .map(|(r, d, n, s, e, m)| exa_three_audit(r, d, n, s, e, m).expect(ok))
        .collect();
    summaries.push(collect("exa_three", three, false, &mut rows));

    let ell = [2, 3].into_iter().map(|e| elliptic_dims_audit(e).expect(ok)).collect();
    summaries.push(collect("elliptic_dims", ell, true, &mut rows));

    let cx = counterex_cases().into_par_iter().map(|(e, t)| counterex_dims_audit(e, t).expect(ok)).collect();
    summaries.push(collect("counterex_dims", cx, true, &mut rows));

    summaries.push(collect("bielliptic", vec![bielliptic_audit()], true, &mut rows));
    GridReport { summaries, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grids_are_clean() {
        let mut sink = Vec::new();
        let one: Vec<_> = exa_one_cases().into_iter().map(|(r, a, d)| exa_one_audit(r, a, d).unwrap()).collect();
        let s = collect("exa_one", one, true, &mut sink);
        assert_eq!(s.check_failures, 0);
        assert_eq!(s.discrepancies_flagged, s.cases);
        assert!(exa_one_cases().iter().all(|&(r, _, _)| r >= 2));
        let cx: Vec<_> = counterex_cases().into_iter().map(|(e, t)| counterex_dims_audit(e, t).unwrap()).collect();
        let s = collect("counterex_dims", cx, true, &mut sink);
        assert_eq!(s.check_failures, 0);
        assert_eq!(s.discrepancies_flagged, 2 * s.cases);
    }
}
