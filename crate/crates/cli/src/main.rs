use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use linstab_cli::report::{emit_report, Report, EXIT_IO, EXIT_REFUSED};
use linstab_cli::run::run;
use linstab_cli::scenario::{parse_scenario_as, Command, PaperId, Scenario};

#[derive(Parser)]
#[command(name = "linstab", version, about = "Exact stability checks for coherent systems on the projective line")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here and a text rendering beside it.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Record wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file, whatever its command.
    Run { scenario: PathBuf },
    /// Kernel bundle of the evaluation map.
    Dsb { scenario: PathBuf },
    /// Linear stability of the system.
    Linstab { scenario: PathBuf },
    /// Butler diagram audit for one kernel summand.
    ButlerAudit { scenario: PathBuf },
    /// Replays a named construction.
    PaperVerify {
        #[command(subcommand)]
        which: Verify,
    },
    /// Numerical audits over the parameter grid.
    AuditAll {
        #[arg(long, default_value = "default")]
        grid: String,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Rank-two kernel bundles that are unstable while the system is linearly stable.
    #[command(name = "thm-5.18")]
    RankTwo {
        #[arg(long)]
        e: Option<i64>,
        #[arg(long)]
        prime: Option<u32>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hyperelliptic construction with a destabilizing line subbundle.
    #[command(name = "thm-4.3")]
    Hyperelliptic {
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        g: Option<i64>,
        #[arg(long)]
        prime: Option<u32>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Refused(String),
    Io(String),
}

fn load(path: &PathBuf, expected: Option<Command>) -> Result<Scenario, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse_scenario_as(&text, expected).map_err(|e| Failure::Refused(format!("{}: {e}", path.display())))
}

fn scenario(cmd: Cmd) -> Result<Scenario, Failure> {
    match cmd {
        Cmd::Run { scenario } => load(&scenario, None),
        Cmd::Dsb { scenario } => load(&scenario, Some(Command::Dsb)),
        Cmd::Linstab { scenario } => load(&scenario, Some(Command::Linstab)),
        Cmd::ButlerAudit { scenario } => load(&scenario, Some(Command::ButlerAudit)),
        Cmd::PaperVerify { which: Verify::RankTwo { e, prime, samples, seed } } => {
            let mut sc = Scenario::new(Command::PaperVerify(PaperId::CounterexampleRankTwo));
            (sc.e, sc.prime, sc.samples, sc.seed) = (e, prime, samples, seed);
            Ok(sc)
        }
        Cmd::PaperVerify { which: Verify::Hyperelliptic { n, g, prime, samples, seed } } => {
            let mut sc = Scenario::new(Command::PaperVerify(PaperId::Hyperelliptic));
            (sc.n, sc.g, sc.prime, sc.samples, sc.seed) = (n, g, prime, samples, seed);
            Ok(sc)
        }
        Cmd::AuditAll { grid } => {
            let mut sc = Scenario::new(Command::AuditAll);
            sc.grid = Some(grid);
            Ok(sc)
        }
    }
}

fn execute(cli: Cli) -> Result<Report, Failure> {
    let start = Instant::now();
    let sc = scenario(cli.command)?;
    let path = cli.out.report.clone().or_else(|| sc.report.as_ref().map(PathBuf::from));
    let mut report = run(sc).map_err(|e| Failure::Refused(e.to_string()))?;
    if cli.out.timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    if let Some(p) = path {
        emit_report(&report, &p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
    }
    let body = if cli.out.json { report.to_json() } else { report.to_text() };
    // A closed pipe (say, into `head`) is not a failure of the run.
    let _ = std::io::stdout().lock().write_all(body.as_bytes());
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_REFUSED } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(r) => ExitCode::from(r.exit_code as u8),
        Err(Failure::Refused(m)) => {
            eprintln!("linstab: refused: {m}");
            ExitCode::from(EXIT_REFUSED as u8)
        }
        Err(Failure::Io(m)) => {
            eprintln!("linstab: {m}");
            ExitCode::from(EXIT_IO as u8)
        }
    }
}
