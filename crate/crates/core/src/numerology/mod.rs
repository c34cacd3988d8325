//! Exact replays of dimension counts and inequality chains that live on
//! curves the line engine cannot model.

mod audits;
mod grid;

pub use audits::{
    bielliptic_audit, counterex_dims_audit, elliptic_dims_audit, exa_one_audit, exa_three_audit, exa_two_audit,
    schubert_dim,
};
pub use grid::{default_grid, GridReport, GridSummary};

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::fields_poly::rational_string;
use crate::stability::Relation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumerologyError {
    #[error("parameters outside the admissible range: {0}")]
    Precondition(String),
    #[error("gonality index {k} outside a profile of length {len}")]
    OutOfRange { k: usize, len: usize },
    #[error("gonality entries must be positive and nondecreasing")]
    BadProfile,
}

/// `chi(E) = d + r(1 - g)` for a bundle of rank `r >= 1` and degree `d`.
pub fn riemann_roch(r: i64, d: i64, g: i64) -> i64 {
    debug_assert!(r >= 1);
    d + r * (1 - g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Expect {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Expect {
    pub fn holds(&self, rel: Relation) -> bool {
        match self {
            Expect::Lt => rel == Relation::Less,
            Expect::Le => rel != Relation::Greater,
            Expect::Eq => rel == Relation::Equal,
            Expect::Ge => rel != Relation::Less,
            Expect::Gt => rel == Relation::Greater,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Expect::Lt => "<",
            Expect::Le => "<=",
            Expect::Eq => "=",
            Expect::Ge => ">=",
            Expect::Gt => ">",
        }
    }
}

/// `Check` rows must pass. `Hypothesis` rows evaluate a condition and may
/// fail without error. `Discrepancy` rows compare a printed value with a
/// recomputed one; a failing discrepancy row is the expected outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowKind {
    Check,
    Hypothesis,
    Discrepancy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditRow {
    pub audit: &'static str,
    pub name: &'static str,
    pub bindings: Vec<(&'static str, i64)>,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub relation: Relation,
    pub expect: Expect,
    pub kind: RowKind,
    /// The printed formula or value, when the row replays one.
    pub printed: Option<String>,
    pub note: Option<String>,
}

impl AuditRow {
    pub fn new(
        audit: &'static str,
        name: &'static str,
        bindings: &[(&'static str, i64)],
        lhs: BigRational,
        expect: Expect,
        rhs: BigRational,
    ) -> Self {
        let relation = Relation::of(&lhs, &rhs);
        AuditRow {
            audit,
            name,
            bindings: bindings.to_vec(),
            lhs,
            rhs,
            relation,
            expect,
            kind: RowKind::Check,
            printed: None,
            note: None,
        }
    }

    pub fn ints(audit: &'static str, name: &'static str, bindings: &[(&'static str, i64)], lhs: i64, expect: Expect, rhs: i64) -> Self {
        Self::new(audit, name, bindings, int(lhs), expect, int(rhs))
    }

    pub fn kind(mut self, kind: RowKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn printed(mut self, printed: impl Into<String>) -> Self {
        self.printed = Some(printed.into());
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn pass(&self) -> bool {
        self.expect.holds(self.relation)
    }

    /// A check that fails: the only rows that signal a problem.
    pub fn unexpected_failure(&self) -> bool {
        self.kind == RowKind::Check && !self.pass()
    }

    pub fn binding(&self, key: &str) -> Option<i64> {
        self.bindings.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
    }
}

struct Bindings<'a>(&'a [(&'static str, i64)]);

impl Serialize for Bindings<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for AuditRow {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("AuditRow", 11)?;
        st.serialize_field("audit", self.audit)?;
        st.serialize_field("name", self.name)?;
        st.serialize_field("bindings", &Bindings(&self.bindings))?;
        st.serialize_field("lhs", &rational_string(&self.lhs))?;
        st.serialize_field("rhs", &rational_string(&self.rhs))?;
        st.serialize_field("relation", &self.relation)?;
        st.serialize_field("expect", &self.expect)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("pass", &self.pass())?;
        st.serialize_field("printed", &self.printed)?;
        st.serialize_field("note", &self.note)?;
        st.end()
    }
}

pub(crate) fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub(crate) fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Fixed-column text rendering of audit rows.
pub fn render_table(rows: &[AuditRow]) -> String {
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            let b = r.bindings.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",");
            [
                format!("{}/{}", r.audit, r.name),
                b,
                format!("{} {} {}", rational_string(&r.lhs), r.relation.symbol(), rational_string(&r.rhs)),
                format!("expect {}", r.expect.symbol()),
                match r.kind {
                    RowKind::Check => "check",
                    RowKind::Hypothesis => "hypothesis",
                    RowKind::Discrepancy => "discrepancy",
                }
                .to_string(),
                if r.pass() { "pass" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    let mut widths = [0usize; 6];
    for c in &cells {
        for (w, s) in widths.iter_mut().zip(c) {
            *w = (*w).max(s.chars().count());
        }
    }
    let mut out = String::new();
    for c in &cells {
        let mut line = String::new();
        for (i, (w, s)) in widths.iter().zip(c).enumerate() {
            if i + 1 == c.len() {
                line.push_str(s);
            } else {
                let _ = write!(line, "{s:<w$}  ");
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GonalityPreset {
    P1,
    Hyperelliptic,
    Bielliptic,
    Custom,
}

/// Entries `d_1, d_2, ...` of a gonality sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GonalityProfile {
    pub preset: GonalityPreset,
    pub entries: Vec<i64>,
}

impl GonalityProfile {
    pub fn custom(entries: Vec<i64>) -> Result<Self, NumerologyError> {
        if entries.iter().any(|&d| d <= 0) || entries.windows(2).any(|w| w[0] > w[1]) {
            return Err(NumerologyError::BadProfile);
        }
        Ok(GonalityProfile { preset: GonalityPreset::Custom, entries })
    }

    /// `d_k = k`, since `O(k)` has `k + 1` sections.
    pub fn p1(len: usize) -> Self {
        GonalityProfile { preset: GonalityPreset::P1, entries: (1..=len as i64).collect() }
    }

    /// `d_k = 2k` up to `k = g - 1`, then `g + k` (non-special range), up to `k = 2g`.
    pub fn hyperelliptic(g: i64) -> Self {
        let entries = (1..=2 * g).map(|k| if k < g { 2 * k } else { g + k }).collect();
        GonalityProfile { preset: GonalityPreset::Hyperelliptic, entries }
    }

    /// The first three entries `2k + 2` of a bielliptic curve of genus at least 6.
    pub fn bielliptic() -> Self {
        GonalityProfile { preset: GonalityPreset::Bielliptic, entries: (1..=3).map(|k| 2 * k + 2).collect() }
    }
}

pub fn gonality_lookup(profile: &GonalityProfile, k: usize) -> Result<i64, NumerologyError> {
    if k == 0 || k > profile.entries.len() {
        return Err(NumerologyError::OutOfRange { k, len: profile.entries.len() });
    }
    Ok(profile.entries[k - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riemann_roch_values() {
        assert_eq!(riemann_roch(1, 5, 0), 6);
        assert_eq!(riemann_roch(2, 7, 1), 7);
        assert_eq!(riemann_roch(1, 2, 2), 1);
    }

    #[test]
    fn gonality_presets() {
        assert_eq!(gonality_lookup(&GonalityProfile::p1(5), 3), Ok(3));
        assert_eq!(gonality_lookup(&GonalityProfile::bielliptic(), 3), Ok(8));
        assert_eq!(gonality_lookup(&GonalityProfile::hyperelliptic(10), 1), Ok(2));
        assert!(gonality_lookup(&GonalityProfile::p1(2), 3).is_err());
        assert!(gonality_lookup(&GonalityProfile::p1(2), 0).is_err());
        let h = GonalityProfile::hyperelliptic(7);
        assert!(h.entries.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(GonalityProfile::custom(vec![3, 2]), Err(NumerologyError::BadProfile));
        assert!(GonalityProfile::custom(vec![2, 4, 4]).is_ok());
    }

    #[test]
    fn pass_is_derived() {
        let row = AuditRow::ints("x", "y", &[("e", 3)], 12, Expect::Lt, 20);
        assert!(row.pass());
        let bad = AuditRow::ints("x", "y", &[], 2, Expect::Eq, 6).kind(RowKind::Discrepancy);
        assert!(!bad.pass() && !bad.unexpected_failure());
        let table = render_table(&[row, bad]);
        assert_eq!(table.lines().count(), 2);
        assert!(table.contains("12 < 20"));
    }
}
