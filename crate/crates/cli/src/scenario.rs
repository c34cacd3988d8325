//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! command = linstab
//! field = gf(5)
//! bundle = 3, 4
//! sections:
//!   - s^3, 0
//!   - t^3, s^4
//! seed = 1
//! ```
//!
//! Every line is `key = value`, a comment, or blank. `sections:` opens a list
//! of `- f_1, ..., f_r` items, one per section, with one form per summand;
//! `sections = random(N)` draws `N` sections from the scenario seed instead.

use std::fmt::{self, Write as _};

use linstab_core::fields_poly::{parse_form, BinaryForm, FieldSpec};
use thiserror::Error;

/// `line` and `column` are 1-based; both are 0 for whole-scenario problems.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{message}", position(*.line, *.column))]
pub struct ScenarioError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn position(line: usize, column: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!("line {line}, column {column}: ")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PaperId {
    CounterexampleRankTwo,
    Hyperelliptic,
}

impl PaperId {
    pub fn label(&self) -> &'static str {
        match self {
            PaperId::CounterexampleRankTwo => "thm-5.18",
            PaperId::Hyperelliptic => "thm-4.3",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "thm-5.18" => Some(PaperId::CounterexampleRankTwo),
            "thm-4.3" => Some(PaperId::Hyperelliptic),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Dsb,
    Linstab,
    ButlerAudit,
    PaperVerify(PaperId),
    AuditAll,
}

impl Command {
    pub fn label(&self) -> String {
        match self {
            Command::Dsb => "dsb".into(),
            Command::Linstab => "linstab".into(),
            Command::ButlerAudit => "butler-audit".into(),
            Command::PaperVerify(id) => format!("paper-verify {}", id.label()),
            Command::AuditAll => "audit-all".into(),
        }
    }

    fn parse(s: &str) -> Option<Self> {
        let mut words = s.split_whitespace();
        let cmd = match (words.next()?, words.next()) {
            ("dsb", None) => Command::Dsb,
            ("linstab", None) => Command::Linstab,
            ("butler-audit", None) => Command::ButlerAudit,
            ("audit-all", None) => Command::AuditAll,
            ("paper-verify", Some(id)) => Command::PaperVerify(PaperId::from_label(id)?),
            _ => return None,
        };
        words.next().is_none().then_some(cmd)
    }

    fn needs_system(&self) -> bool {
        matches!(self, Command::Dsb | Command::Linstab | Command::ButlerAudit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    P1,
    Hyperelliptic { g: i64, n: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sections {
    /// Section strings as written, one list per section.
    Explicit(Vec<Vec<String>>),
    Random(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub command: Command,
    pub field: Option<FieldSpec>,
    pub base: Base,
    pub bundle: Option<Vec<i64>>,
    pub sections: Option<Sections>,
    pub seed: u64,
    pub prime: Option<u32>,
    pub samples: Option<usize>,
    pub exhaustive: Option<bool>,
    pub e: Option<i64>,
    pub n: Option<i64>,
    pub g: Option<i64>,
    pub summand: Option<usize>,
    pub grid: Option<String>,
    pub report: Option<String>,
}

impl Scenario {
    pub fn new(command: Command) -> Self {
        Scenario {
            command,
            field: None,
            base: Base::P1,
            bundle: None,
            sections: None,
            seed: 0,
            prime: None,
            samples: None,
            exhaustive: None,
            e: None,
            n: None,
            g: None,
            summand: None,
            grid: None,
            report: None,
        }
    }

    /// Bundle degrees, defaulting to `O(2n+1)` on a hyperelliptic base.
    pub fn bundle_degrees(&self) -> Option<Vec<i64>> {
        match (&self.bundle, self.base) {
            (Some(b), _) => Some(b.clone()),
            (None, Base::Hyperelliptic { n, .. }) => Some(vec![2 * n + 1]),
            (None, Base::P1) => None,
        }
    }

    /// Parsed explicit sections.
    pub fn explicit_sections(&self) -> Option<Vec<Vec<BinaryForm>>> {
        let Some(Sections::Explicit(rows)) = &self.sections else { return None };
        let field = self.field?;
        let degrees = self.bundle_degrees()?;
        rows.iter()
            .map(|row| row.iter().zip(&degrees).map(|(s, &a)| parse_component(s, a, field).ok()).collect())
            .collect()
    }
}

pub fn field_label(f: FieldSpec) -> String {
    match f {
        FieldSpec::Rationals => "q".into(),
        FieldSpec::Prime(p) => format!("gf({p})"),
    }
}

fn parse_component(s: &str, degree: i64, field: FieldSpec) -> Result<BinaryForm, (usize, String)> {
    if degree < 0 {
        return match s.trim() {
            "0" => Ok(BinaryForm::zero(field)),
            _ => Err((1, format!("a summand of negative degree {degree} has only the zero section"))),
        };
    }
    parse_form(s, degree as usize, field).map_err(|e| (e.column, e.message))
}

const KEYS: &[&str] = &[
    "command", "field", "base", "bundle", "sections", "seed", "prime", "samples", "exhaustive", "e", "n", "g",
    "summand", "grid", "report",
];

struct Line<'a> {
    number: usize,
    /// Byte offset of `text` within the original line.
    offset: usize,
    text: &'a str,
}

fn fail<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError { line, column, message: message.into() })
}

fn strip_comment(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("")
}

fn value_int<T: std::str::FromStr>(l: &Line, what: &str) -> Result<T, ScenarioError> {
    l.text.trim().parse().or_else(|_| fail(l.number, l.offset + 1, format!("expected {what}, got `{}`", l.text.trim())))
}

fn parse_field(l: &Line) -> Result<FieldSpec, ScenarioError> {
    let v = l.text.trim();
    if v == "q" || v == "rationals" {
        return Ok(FieldSpec::Rationals);
    }
    let p = v.strip_prefix("gf(").and_then(|r| r.strip_suffix(')')).and_then(|p| p.trim().parse::<u32>().ok());
    match p {
        Some(p) => FieldSpec::prime(p).or_else(|e| fail(l.number, l.offset + 1, e.to_string())),
        None => fail(l.number, l.offset + 1, format!("expected `q` or `gf(p)`, got `{v}`")),
    }
}

fn parse_base(l: &Line) -> Result<Base, ScenarioError> {
    let v = l.text.trim();
    if v == "p1" {
        return Ok(Base::P1);
    }
    let args = v.strip_prefix("hyperelliptic(").and_then(|r| r.strip_suffix(')'));
    let parsed = args.and_then(|a| {
        let mut it = a.split(',').map(|x| x.trim().parse::<i64>());
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(g)), Some(Ok(n)), None) => Some(Base::Hyperelliptic { g, n }),
            _ => None,
        }
    });
    parsed.map_or_else(|| fail(l.number, l.offset + 1, format!("expected `p1` or `hyperelliptic(g, n)`, got `{v}`")), Ok)
}

fn parse_bundle(l: &Line) -> Result<Vec<i64>, ScenarioError> {
    let mut out = Vec::new();
    let mut col = l.offset;
    for part in l.text.split(',') {
        let t = part.trim();
        match t.parse::<i64>() {
            Ok(a) => out.push(a),
            Err(_) => {
                let lead = part.len() - part.trim_start().len();
                return fail(l.number, col + lead + 1, format!("expected an integer degree, got `{t}`"));
            }
        }
        col += part.len() + 1;
    }
    Ok(out)
}

fn parse_bool(l: &Line) -> Result<bool, ScenarioError> {
    match l.text.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => fail(l.number, l.offset + 1, format!("expected `true` or `false`, got `{other}`")),
    }
}

/// Splits a section item into components, remembering each one's column.
fn split_components(l: &Line) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut col = l.offset;
    for part in l.text.split(',') {
        out.push((col, part.trim().to_string()));
        col += part.len() + 1;
    }
    out
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    parse_scenario_as(text, None)
}

/// Parses a scenario for a fixed command; the file may then omit `command`,
/// and a different one is an error.
pub fn parse_scenario_as(text: &str, expected: Option<Command>) -> Result<Scenario, ScenarioError> {
    let mut seen: Vec<(&str, usize)> = Vec::new();
    let mut values: Vec<(&str, Line)> = Vec::new();
    let mut items: Vec<Line> = Vec::new();
    let mut in_list = false;
    let mut list_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let body = strip_comment(raw);
        if body.trim().is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        let trimmed = body.trim();
        if let Some(rest) = trimmed.strip_prefix('-') {
            if !in_list {
                return fail(number, indent + 1, "list item outside `sections:`");
            }
            let offset = indent + 1 + (rest.len() - rest.trim_start().len());
            items.push(Line { number, offset, text: rest.trim() });
            continue;
        }
        in_list = false;
        if trimmed == "sections:" {
            if let Some(&(_, first)) = seen.iter().find(|(k, _)| *k == "sections") {
                return fail(number, indent + 1, format!("duplicate key `sections` (first on line {first})"));
            }
            seen.push(("sections", number));
            in_list = true;
            list_line = number;
            continue;
        }
        let Some(eq) = body.find('=') else {
            return fail(number, indent + 1, "expected `key = value`");
        };
        let key = body[..eq].trim();
        if !KEYS.contains(&key) {
            return fail(number, indent + 1, format!("unknown key `{key}`"));
        }
        if let Some(&(_, first)) = seen.iter().find(|(k, _)| *k == key) {
            return fail(number, indent + 1, format!("duplicate key `{key}` (first on line {first})"));
        }
        seen.push((key, number));
        let value = &body[eq + 1..];
        let lead = value.len() - value.trim_start().len();
        values.push((key, Line { number, offset: eq + 1 + lead, text: value.trim() }));
    }

    let command = match (values.iter().find(|(k, _)| *k == "command"), expected) {
        (None, Some(c)) => c,
        (None, None) => return fail(1, 1, "missing `command`"),
        (Some((_, l)), expected) => {
            let c = Command::parse(l.text)
                .map_or_else(|| fail(l.number, l.offset + 1, format!("unknown command `{}`", l.text)), Ok)?;
            if expected.is_some_and(|x| x != c) {
                let want = expected.map(|x| x.label()).unwrap_or_default();
                return fail(l.number, l.offset + 1, format!("scenario is for `{}`, not `{want}`", l.text));
            }
            c
        }
    };
    let mut sc = Scenario::new(command);
    let mut random_line = None;
    for (key, l) in &values {
        match *key {
            "command" => {}
            "field" => sc.field = Some(parse_field(l)?),
            "base" => sc.base = parse_base(l)?,
            "bundle" => sc.bundle = Some(parse_bundle(l)?),
            "sections" => {
                let v = l.text.trim();
                let count = v.strip_prefix("random(").and_then(|r| r.strip_suffix(')')).and_then(|c| c.trim().parse().ok());
                match count {
                    Some(c) => sc.sections = Some(Sections::Random(c)),
                    None => return fail(l.number, l.offset + 1, format!("expected `random(N)` or a `sections:` list, got `{v}`")),
                }
                random_line = Some(l.number);
            }
            "seed" => sc.seed = value_int(l, "an unsigned integer")?,
            "prime" => sc.prime = Some(value_int(l, "a prime")?),
            "samples" => sc.samples = Some(value_int(l, "a sample count")?),
            "exhaustive" => sc.exhaustive = Some(parse_bool(l)?),
            "e" => sc.e = Some(value_int(l, "an integer")?),
            "n" => sc.n = Some(value_int(l, "an integer")?),
            "g" => sc.g = Some(value_int(l, "an integer")?),
            "summand" => sc.summand = Some(value_int(l, "a summand index")?),
            "grid" => sc.grid = Some(l.text.to_string()),
            "report" => sc.report = Some(l.text.to_string()),
            _ => unreachable!("key list checked above"),
        }
    }
    if seen.iter().any(|(k, _)| *k == "sections") && random_line.is_none() {
        if items.is_empty() {
            return fail(list_line, 1, "`sections:` has no items");
        }
        let field = sc.field.map_or_else(|| fail(list_line, 1, "`field` must be given to read sections"), Ok)?;
        let degrees = sc.bundle_degrees().map_or_else(|| fail(list_line, 1, "`bundle` must be given to read sections"), Ok)?;
        let mut rows = Vec::new();
        for item in &items {
            let comps = split_components(item);
            if comps.len() != degrees.len() {
                return fail(
                    item.number,
                    item.offset + 1,
                    format!("expected {} components, one per summand, got {}", degrees.len(), comps.len()),
                );
            }
            for ((col, s), &a) in comps.iter().zip(&degrees) {
                let lead = item.text[col - item.offset..].len() - item.text[col - item.offset..].trim_start().len();
                if let Err((c, msg)) = parse_component(s, a, field) {
                    return fail(item.number, col + lead + c, msg);
                }
            }
            rows.push(comps.into_iter().map(|(_, s)| s).collect());
        }
        sc.sections = Some(Sections::Explicit(rows));
    }
    validate(&sc).map_err(|m| ScenarioError { line: 0, column: 0, message: m })?;
    Ok(sc)
}

/// Checks that do not depend on the position of any one line.
pub fn validate(sc: &Scenario) -> Result<(), String> {
    if sc.command.needs_system() {
        if sc.field.is_none() {
            return Err("`field` is required".into());
        }
        let Some(degrees) = sc.bundle_degrees() else { return Err("`bundle` is required".into()) };
        if degrees.is_empty() {
            return Err("`bundle` needs at least one summand".into());
        }
        if sc.sections.is_none() {
            return Err("`sections` is required".into());
        }
        if let Base::Hyperelliptic { n, .. } = sc.base {
            if degrees != [2 * n + 1] {
                return Err(format!("a hyperelliptic base needs bundle = {}", 2 * n + 1));
            }
        }
        if sc.exhaustive == Some(true) && sc.field == Some(FieldSpec::Rationals) {
            return Err("exhaustive sweeps need a prime field".into());
        }
    }
    if let Some(g) = &sc.grid {
        if g != "default" {
            return Err(format!("unknown grid `{g}`"));
        }
    }
    Ok(())
}

struct Echo<'a>(&'a Scenario);

impl fmt::Display for Echo<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sc = self.0;
        writeln!(f, "command = {}", sc.command.label())?;
        if let Some(field) = sc.field {
            writeln!(f, "field = {}", field_label(field))?;
        }
        if let Base::Hyperelliptic { g, n } = sc.base {
            writeln!(f, "base = hyperelliptic({g}, {n})")?;
        }
        if let Some(b) = &sc.bundle {
            writeln!(f, "bundle = {}", b.iter().map(i64::to_string).collect::<Vec<_>>().join(", "))?;
        }
        match &sc.sections {
            Some(Sections::Random(c)) => writeln!(f, "sections = random({c})")?,
            Some(Sections::Explicit(rows)) => {
                writeln!(f, "sections:")?;
                for r in rows {
                    writeln!(f, "  - {}", r.join(", "))?;
                }
            }
            None => {}
        }
        writeln!(f, "seed = {}", sc.seed)?;
        let opt = |f: &mut fmt::Formatter<'_>, k: &str, v: Option<String>| match v {
            Some(v) => writeln!(f, "{k} = {v}"),
            None => Ok(()),
        };
        opt(f, "prime", sc.prime.map(|x| x.to_string()))?;
        opt(f, "samples", sc.samples.map(|x| x.to_string()))?;
        opt(f, "exhaustive", sc.exhaustive.map(|x| x.to_string()))?;
        opt(f, "e", sc.e.map(|x| x.to_string()))?;
        opt(f, "n", sc.n.map(|x| x.to_string()))?;
        opt(f, "g", sc.g.map(|x| x.to_string()))?;
        opt(f, "summand", sc.summand.map(|x| x.to_string()))?;
        opt(f, "grid", sc.grid.clone())?;
        opt(f, "report", sc.report.clone())
    }
}

/// Canonical text of a scenario; parses back to an equal scenario.
pub fn echo(sc: &Scenario) -> String {
    let mut s = String::new();
    let _ = write!(s, "{}", Echo(sc));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# twisted pair
command = linstab
field = gf(5)
bundle = 1, 2
sections:
  - s, 0
  - t, s^2
  - 0, t^2   # trailing comment
  - 0, s*t
seed = 3
";

    #[test]
    fn parses_and_echoes() {
        let sc = parse_scenario(SAMPLE).unwrap();
        assert_eq!(sc.command, Command::Linstab);
        assert_eq!(sc.bundle, Some(vec![1, 2]));
        assert_eq!(sc.seed, 3);
        let Some(Sections::Explicit(rows)) = &sc.sections else { panic!() };
        assert_eq!(rows[2], vec!["0".to_string(), "t^2".to_string()]);
        assert_eq!(sc.explicit_sections().unwrap().len(), 4);
        assert_eq!(parse_scenario(&echo(&sc)).unwrap(), sc);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_scenario("command = dsb\nfeild = q\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 1));
        assert!(e.message.contains("unknown key"));
        let e = parse_scenario("command = dsb\nfield = q\nbundle = 1, x\nsections = random(2)\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 13));
        let e = parse_scenario("command = dsb\nfield = q\nbundle = 2\nsections:\n  - s^2 + t\n").unwrap_err();
        assert_eq!(e.line, 5);
        assert_eq!(e.column, 11);
        let e = parse_scenario("command = dsb\ncommand = dsb\n").unwrap_err();
        assert!(e.message.contains("duplicate"));
        let e = parse_scenario("command = frobnicate\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 11));
        assert!(parse_scenario("command = dsb\nfield = q\nbundle = 2\n").is_err());
        let e = parse_scenario_as("command = dsb\n", Some(Command::Linstab)).unwrap_err();
        assert_eq!((e.line, e.column), (1, 11));
        let sc = parse_scenario_as("field = q\nbundle = 1\nsections = random(2)\n", Some(Command::Dsb)).unwrap();
        assert_eq!(sc.command, Command::Dsb);
    }

    #[test]
    fn paper_ids() {
        let sc = parse_scenario("command = paper-verify thm-5.18\ne = 3\nprime = 5\n").unwrap();
        assert_eq!(sc.command, Command::PaperVerify(PaperId::CounterexampleRankTwo));
        assert_eq!(parse_scenario(&echo(&sc)).unwrap(), sc);
        assert!(parse_scenario("command = paper-verify thm-9.9\n").is_err());
    }

    #[test]
    fn hyperelliptic_default_bundle() {
        let sc = parse_scenario("command = dsb\nfield = gf(7)\nbase = hyperelliptic(10, 2)\nsections = random(3)\n").unwrap();
        assert_eq!(sc.bundle_degrees(), Some(vec![5]));
        assert!(parse_scenario("command = dsb\nfield = gf(7)\nbase = hyperelliptic(10, 2)\nbundle = 4\nsections = random(3)\n").is_err());
    }
}
