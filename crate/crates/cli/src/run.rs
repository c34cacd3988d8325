use linstab_core::butler::{audit_properties, butler_from_subbundle, summand_inclusion};
use linstab_core::coherent::{random_generated_system, CoherentSystemP1};
use linstab_core::fields_poly::FieldSpec;
use linstab_core::hyperelliptic::{theorem43_pipeline, HyperellipticModel, PullbackSeries};
use linstab_core::numerology::{counterex_dims_audit, default_grid};
use linstab_core::p1_sheaves::SplittingType;
use linstab_core::seed::sub_seed;
use linstab_core::stability::{
    certificate_numeric, counterexample_replay, linstab_exhaustive, linstab_sampled, pullback_certificate,
    slope_stability_p1, SearchConfig, VerdictKind,
};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::report::{Outcome, Report, SeedRecord};
use crate::scenario::{echo, field_label, validate, Base, Command, PaperId, Scenario, Sections};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Refused(String),
}

fn refused(e: impl std::fmt::Display) -> RunError {
    RunError::Refused(e.to_string())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

pub const THM518_DEFAULTS: (i64, u32, usize) = (3, 5, 20);
pub const THM43_DEFAULTS: (i64, i64, u32, usize) = (2, 10, 7, 10);

/// Fills every defaulted option so the echoed scenario is complete.
pub fn resolve(mut sc: Scenario) -> Scenario {
    match sc.command {
        Command::PaperVerify(PaperId::CounterexampleRankTwo) => {
            let (e, p, s) = THM518_DEFAULTS;
            sc.e.get_or_insert(e);
            sc.prime.get_or_insert(p);
            sc.samples.get_or_insert(s);
        }
        Command::PaperVerify(PaperId::Hyperelliptic) => {
            let (n, g, p, s) = THM43_DEFAULTS;
            sc.n.get_or_insert(n);
            sc.g.get_or_insert(g);
            sc.prime.get_or_insert(p);
            sc.samples.get_or_insert(s);
        }
        Command::AuditAll => {
            sc.grid.get_or_insert_with(|| "default".into());
        }
        Command::Linstab => {
            let prime = sc.field.is_some_and(|f| f.is_prime_field());
            sc.exhaustive.get_or_insert(prime);
            if sc.exhaustive == Some(false) {
                sc.samples.get_or_insert(SearchConfig::default().samples);
            }
        }
        Command::Dsb | Command::ButlerAudit => {}
    }
    sc
}

fn build_system(sc: &Scenario, seeds: &mut Vec<SeedRecord>) -> Result<CoherentSystemP1, RunError> {
    let field = sc.field.expect("validated");
    let degrees = sc.bundle_degrees().expect("validated");
    let sys = match sc.sections.as_ref().expect("validated") {
        Sections::Explicit(_) => {
            let forms = sc.explicit_sections().expect("parsed during validation");
            CoherentSystemP1::new(field, degrees, forms).map_err(refused)?
        }
        Sections::Random(count) => {
            seeds.push(SeedRecord { purpose: "scenario-sections", master: sc.seed, indices: 1 });
            let s = sub_seed(sc.seed, "scenario-sections", 0);
            random_generated_system(&SplittingType::new(degrees), *count, s, field, 100).map_err(refused)?.0
        }
    };
    if let Base::Hyperelliptic { g, n } = sc.base {
        let model = HyperellipticModel::new(g, n).map_err(refused)?;
        PullbackSeries::new(&model, sys.clone()).map_err(refused)?;
    }
    Ok(sys)
}

fn system_json(sys: &CoherentSystemP1) -> Value {
    let (r, d, n) = sys.type_tuple();
    json!({
        "field": field_label(sys.field()),
        "bundle": sys.bundle_degrees(),
        "type": [r, d, n],
        "generated": sys.is_generated(),
        "sections": sys.sections().iter().map(|s| s.iter().map(|f| f.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

const COVER: i64 = HyperellipticModel::COVER_DEGREE;

fn run_dsb(sc: &Scenario, report: &mut Report) -> Result<(), RunError> {
    let sys = build_system(sc, &mut report.seeds)?;
    let mut result = json!({ "system": system_json(&sys) });
    if !sys.is_generated() {
        report.summary.push("the sections do not generate the bundle; no kernel bundle".into());
        report.set_outcome(Outcome::CheckFailed);
        result["dsb"] = Value::Null;
        report.result = result;
        return Ok(());
    }
    let m = sys.dual_span().map_err(refused)?;
    let verdict = slope_stability_p1(&m.kernel);
    report.summary.push(format!("kernel bundle {} of rank {} and degree {}", m.kernel, m.kernel.rank(), m.kernel.degree()));
    report.summary.push(format!("slope stability: {}", to_value(&verdict.kind).as_str().unwrap_or("?")));
    result["dsb"] = json!({
        "splitting": m.kernel.to_string(),
        "degrees": m.kernel.degrees(),
        "rank": m.kernel.rank(),
        "degree": m.kernel.degree(),
        "slope_verdict": to_value(&verdict),
    });
    if matches!(sc.base, Base::Hyperelliptic { .. }) {
        let lifted = json!({ "cover_degree": COVER, "rank": m.kernel.rank(), "degree": COVER * m.kernel.degree() });
        report.summary.push(format!("pulled back: rank {}, degree {}", m.kernel.rank(), COVER * m.kernel.degree()));
        result["lifted"] = lifted;
    }
    report.result = result;
    Ok(())
}

fn run_linstab(sc: &Scenario, report: &mut Report) -> Result<(), RunError> {
    let sys = build_system(sc, &mut report.seeds)?;
    let mut config = SearchConfig { seed: sc.seed, ..SearchConfig::default() };
    if let Some(s) = sc.samples {
        config.samples = s;
    }
    let verdict = if sc.exhaustive == Some(true) {
        linstab_exhaustive(&sys, &config).map_err(refused)?
    } else {
        report.seeds.push(SeedRecord { purpose: "linstab-sample", master: sc.seed, indices: config.samples as u64 });
        linstab_sampled(&sys, config.samples, config.seed).map_err(refused)?
    };
    let mut v = to_value(&verdict);
    let certs = v.as_object_mut().and_then(|o| o.remove("certificates"));
    report.certificates = match certs {
        Some(Value::Array(a)) => a,
        _ => Vec::new(),
    };
    let mut result = json!({ "system": system_json(&sys), "verdict": v });
    if matches!(sc.base, Base::Hyperelliptic { .. }) {
        let lifted: Vec<Value> = verdict
            .certificates
            .iter()
            .map(|c| to_value(&pullback_certificate(&certificate_numeric(&sys, c), COVER)))
            .collect();
        result["lifted_certificates"] = Value::Array(lifted);
    }
    report.summary.push(format!(
        "{}: examined {}, violations {}, equalities {}",
        to_value(&verdict.kind).as_str().unwrap_or("?"),
        verdict.examined,
        verdict.violations,
        verdict.equalities
    ));
    report.set_outcome(match verdict.kind {
        VerdictKind::Unstable => Outcome::Violation,
        VerdictKind::EvidenceOnly => Outcome::EvidenceOnly,
        VerdictKind::Stable | VerdictKind::StrictlySemistable => Outcome::Ok,
    });
    report.result = result;
    Ok(())
}

fn run_butler(sc: &Scenario, report: &mut Report) -> Result<(), RunError> {
    let sys = build_system(sc, &mut report.seeds)?;
    let m = sys.dual_span().map_err(refused)?;
    let degrees = m.basis.src_degrees();
    let idx = match sc.summand {
        Some(i) if i < degrees.len() => i,
        Some(i) => return Err(refused(format!("summand {i} out of range for {} kernel summands", degrees.len()))),
        None => {
            let top = degrees.iter().max().expect("kernel of positive rank");
            degrees.iter().position(|a| a == top).expect("present")
        }
    };
    let diag = butler_from_subbundle(&sys, &summand_inclusion(&m, &[idx])).map_err(refused)?;
    let audit = audit_properties(&diag).map_err(refused)?;
    report.summary.push(format!("S = O({}) inside {}, W of dimension {}, F_S = {}", degrees[idx], m.kernel, audit.dim_w, audit.f_s));
    for item in &audit.items {
        let mark = if !item.applicable { "skip" } else if item.passed { "pass" } else { "FAIL" };
        report.summary.push(format!("{mark} {}: {}", item.name, item.detail));
    }
    report.set_outcome(if audit.all_passed() { Outcome::Ok } else { Outcome::CheckFailed });
    report.result = json!({ "system": system_json(&sys), "summand": idx, "audit": to_value(&audit) });
    Ok(())
}

fn run_thm518(sc: &Scenario, report: &mut Report) -> Result<(), RunError> {
    let (e, p, samples) = (sc.e.expect("resolved"), sc.prime.expect("resolved"), sc.samples.expect("resolved"));
    FieldSpec::prime(p).map_err(refused)?;
    let rep = counterexample_replay(e, p, samples, sc.seed, &SearchConfig::default()).map_err(refused)?;
    report.seeds.push(SeedRecord { purpose: "counterexample-system", master: sc.seed, indices: samples as u64 });
    report.summary.push(format!(
        "E = {} over GF({p}): kernel bundle rank 2 degree {} and unstable in {}/{} samples",
        rep.bundle,
        -(2 * e + 1),
        rep.dsb_unstable,
        samples
    ));
    report.summary.push(format!(
        "linearly stable by exhaustive sweep: {}/{} (first sample {})",
        rep.stable_count,
        samples,
        rep.witness.map_or("none".into(), |w| w.to_string())
    ));
    if e >= 3 {
        for t in 1..=e + 1 {
            report.audit_rows.extend(counterex_dims_audit(e, t).map_err(refused)?);
        }
    }
    report.set_outcome(if rep.passed { Outcome::Ok } else { Outcome::CheckFailed });
    report.result = to_value(&rep);
    Ok(())
}

fn run_thm43(sc: &Scenario, report: &mut Report) -> Result<(), RunError> {
    let (n, g, p, samples) =
        (sc.n.expect("resolved"), sc.g.expect("resolved"), sc.prime.expect("resolved"), sc.samples.expect("resolved"));
    let model = HyperellipticModel::new(g, n).map_err(refused)?;
    let rep = theorem43_pipeline(&model, p, sc.seed, samples).map_err(refused)?;
    report.seeds.push(SeedRecord { purpose: "thm43-kernel", master: sc.seed, indices: samples as u64 });
    report.seeds.push(SeedRecord { purpose: "thm43-witness", master: sc.seed, indices: samples as u64 });
    for row in &rep.ledger {
        report.summary.push(format!("{}: expected {}, computed {}", row.name, row.expected, row.computed));
    }
    report.summary.push(format!("multiplication kernel dimensions {:?}", rep.kernel_dims));
    let d = &rep.destabilizer;
    report.summary.push(format!("destabilizer slope {} {} {}", d.mu_subsheaf, d.relation.symbol(), d.mu_dsb));
    report.summary.push(match &rep.witness {
        Some(w) => format!("linearly stable base witness at sample {}", w.sample),
        None => "no linearly stable base witness found".into(),
    });
    report.set_outcome(if rep.passed { Outcome::Ok } else { Outcome::CheckFailed });
    report.result = to_value(&rep);
    Ok(())
}

fn run_audit_all(report: &mut Report) {
    let grid = default_grid();
    for s in &grid.summaries {
        report.summary.push(format!(
            "{}: {} cases, {} rows, {} failing checks, {} flagged discrepancies, {} false hypotheses",
            s.audit, s.cases, s.rows, s.check_failures, s.discrepancies_flagged, s.hypotheses_false
        ));
    }
    report.set_outcome(if grid.check_failures() == 0 { Outcome::Ok } else { Outcome::CheckFailed });
    report.result = json!({ "grid": "default", "summaries": to_value(&grid.summaries) });
    report.audit_rows = grid.rows;
}

/// Validates and runs one scenario.
pub fn run(sc: Scenario) -> Result<Report, RunError> {
    validate(&sc).map_err(RunError::Refused)?;
    let sc = resolve(sc);
    let mut echoed = sc.clone();
    echoed.report = None;
    let mut report = Report::new(sc.command.label(), echo(&echoed), Outcome::Ok);
    match sc.command {
        Command::Dsb => run_dsb(&sc, &mut report)?,
        Command::Linstab => run_linstab(&sc, &mut report)?,
        Command::ButlerAudit => run_butler(&sc, &mut report)?,
        Command::PaperVerify(PaperId::CounterexampleRankTwo) => run_thm518(&sc, &mut report)?,
        Command::PaperVerify(PaperId::Hyperelliptic) => run_thm43(&sc, &mut report)?,
        Command::AuditAll => run_audit_all(&mut report),
    }
    Ok(report)
}
