//! curvlab: batch verification of almost-Hermitian curvature identities on
//! coordinate charts.
//!
//! Exit codes are the machine contract: 0 all selected checks pass, 1 at
//! least one check failed (or the endgame conclusion was violated), 2 a
//! hypothesis precondition failed, 64 configuration errors, 65 point
//! outside the chart domain.

mod config;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use curvlab::chart::builtin_catalog;
use curvlab::jet::JetError;
use curvlab::report::Verdict;
use curvlab::sampling::{sample_planes, PlaneKind};
use curvlab::space::plane_defects;
use curvlab::suite::global::point_invariants;
use curvlab::suite::{run_chart_suite, SuiteError, CATALOG};

use config::{ChartSource, RunConfig};

const EXIT_FAIL: u8 = 1;
const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_CONFIG: u8 = 64;
const EXIT_DOMAIN: u8 = 65;

#[derive(Parser)]
#[command(
    name = "curvlab",
    about = "Verify almost-Hermitian curvature identities on charts and model spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List builtin charts and the identity catalog.
    List {
        /// Print only the identity ids.
        #[arg(long)]
        identities: bool,
        /// Machine-readable catalog.
        #[arg(long)]
        json: bool,
    },
    /// Print curvature invariants at one chart point.
    Eval(EvalArgs),
    /// Run identity evaluators over chart points and write a report.
    Check(CheckArgs),
    /// Sample 2-planes of a given type and print their defects.
    SamplePlanes(SamplePlanesArgs),
}

#[derive(Args)]
struct ChartArgs {
    /// Chart spec: a builtin name, `name(k=v,...)`,
    /// `product(<spec>,<spec>)`, or a path to a chart JSON file.
    #[arg(long)]
    chart: Option<String>,
    /// Complex dimension for bare chart names.
    #[arg(long)]
    n: Option<usize>,
    /// Curvature scale shorthand for fubini_study / complex_hyperbolic.
    #[arg(long)]
    c: Option<f64>,
}

impl ChartArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(chart) = &self.chart {
            if chart.ends_with(".json") {
                cfg.chart = ChartSource {
                    spec: None,
                    path: Some(chart.clone()),
                };
                return;
            }
            let mut spec = chart.clone();
            // convenience flags fold into bare names
            if !spec.contains('(') {
                let mut kv = Vec::new();
                if let Some(n) = self.n {
                    kv.push(format!("n={n}"));
                }
                if let Some(c) = self.c {
                    kv.push(format!("c={c}"));
                }
                if !kv.is_empty() {
                    spec = format!("{spec}({})", kv.join(","));
                }
            }
            cfg.chart = ChartSource {
                spec: Some(spec),
                path: None,
            };
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    chart: ChartArgs,
    /// Point coordinates, comma separated; defaults to the domain center.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Configuration file; flags override its fields.
    #[arg(long)]
    config: Option<String>,
    #[command(flatten)]
    chart: ChartArgs,
    /// Number of sampled interior points.
    #[arg(long)]
    points: Option<usize>,
    /// Explicit point (repeatable), comma separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Vec<f64>,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Identities to include (comma separated ids).
    #[arg(long, value_delimiter = ',')]
    identities: Vec<String>,
    /// Identities to exclude.
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<String>,
    /// Per-identity tolerance override, id=value (repeatable).
    #[arg(long = "tolerance")]
    tolerances: Vec<String>,
    /// Report output path (written atomically).
    #[arg(long)]
    output: Option<String>,
    /// Include a wall-clock timestamp in the report (off by default so
    /// identical runs are byte-identical).
    #[arg(long)]
    stamp: bool,
}

#[derive(Args)]
struct SamplePlanesArgs {
    /// Complex dimension of the standard model space.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value = "antiholomorphic")]
    kind: String,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json: bool,
}

fn env_seed() -> Option<u64> {
    std::env::var("CURVLAB_SEED").ok()?.parse().ok()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List { identities, json } => cmd_list(identities, json),
        Command::Eval(args) => cmd_eval(args),
        Command::Check(args) => cmd_check(args),
        Command::SamplePlanes(args) => cmd_sample_planes(args),
    }
}

fn cmd_list(identities_only: bool, json: bool) -> ExitCode {
    let ids: Vec<&str> = CATALOG.iter().map(|id| id.as_str()).collect();
    if json {
        let charts: BTreeMap<&str, &str> = builtin_catalog().into_iter().collect();
        let doc = serde_json::json!({
            "charts": charts,
            "identities": ids,
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        return ExitCode::SUCCESS;
    }
    if !identities_only {
        println!("builtin charts:");
        for (name, doc) in builtin_catalog() {
            println!("  {name:<20} {doc}");
        }
        println!();
    }
    println!("identity catalog:");
    for id in ids {
        println!("  {id}");
    }
    ExitCode::SUCCESS
}

fn cmd_eval(args: EvalArgs) -> ExitCode {
    let mut cfg = RunConfig::default();
    args.chart.apply(&mut cfg);
    let chart = match cfg.load_chart() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let point = args.point.unwrap_or_else(|| chart.center());
    let seed = args.seed.or_else(env_seed).unwrap_or(0);
    match point_invariants(&chart, &point, args.h, seed) {
        Ok(inv) => {
            if args.json {
                println!("{}", serde_json::to_string_pretty(&inv).unwrap());
            } else {
                println!("chart: {} at {:?} (h = {:.1e})", chart.name(), point, args.h);
                println!("  tau        = {:.9}", inv.tau);
                println!("  tau*       = {:.9}", inv.tau_star);
                println!("  nu         = {:.9}", inv.nu);
                println!(
                    "  p.c.a.s.c. mean = {:.9}, spread = {:.3e}",
                    inv.pcasc_mean, inv.pcasc_spread
                );
                println!(
                    "  einstein defect = {:.3e}, holomorphic spread = {:.3e}",
                    inv.einstein_defect, inv.holo_spread
                );
                println!(
                    "  almost-Kaehler residuals = {:.3e} {:.3e} {:.3e}",
                    inv.ak_residuals[0], inv.ak_residuals[1], inv.ak_residuals[2]
                );
                println!("  |nabla J|  = {:.3e}", inv.nabla_j_norm);
                println!("  bianchi    = {:.3e}", inv.bianchi_residual);
            }
            ExitCode::SUCCESS
        }
        Err(SuiteError::Jet(JetError::OutOfDomain)) => {
            eprintln!("point is outside the chart domain");
            ExitCode::from(EXIT_DOMAIN)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_HYPOTHESIS)
        }
    }
}

fn cmd_check(args: CheckArgs) -> ExitCode {
    // config file first, then flag overrides
    let mut cfg = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match RunConfig::from_json(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            },
            Err(e) => {
                eprintln!("config error: reading {path}: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        None => RunConfig::default(),
    };
    args.chart.apply(&mut cfg);
    if let Some(c) = args.points {
        cfg.points.count = Some(c);
    }
    if !args.point.is_empty() {
        cfg.points.list = vec![args.point.clone()];
    }
    if let Some(m) = args.margin {
        cfg.points.margin = Some(m);
    }
    if let Some(h) = args.h {
        cfg.h = h;
    }
    if let Some(seed) = args.seed.or_else(env_seed) {
        cfg.seed = seed;
    }
    if !args.identities.is_empty() {
        cfg.identities.include = args.identities.clone();
    }
    if !args.exclude.is_empty() {
        cfg.identities.exclude = args.exclude.clone();
    }
    for kv in &args.tolerances {
        match kv.split_once('=') {
            Some((k, v)) => match v.parse::<f64>() {
                Ok(val) => {
                    cfg.tolerances.insert(k.to_string(), val);
                }
                Err(_) => {
                    eprintln!("config error: bad tolerance '{kv}'");
                    return ExitCode::from(EXIT_CONFIG);
                }
            },
            None => {
                eprintln!("config error: tolerance must be id=value, got '{kv}'");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }
    if let Some(out) = &args.output {
        cfg.output = Some(out.clone());
    }
    if let Err(e) = cfg.validate() {
        eprintln!("{e}");
        return ExitCode::from(EXIT_CONFIG);
    }

    let chart = match cfg.load_chart() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let points = cfg.resolve_points(&chart);
    let stamp = args.stamp.then(now_rfc3339);
    let suite_cfg = cfg.suite_config(stamp);

    match run_chart_suite(&chart, &points, &suite_cfg) {
        Ok(report) => {
            let json = report.to_json();
            if let Some(path) = &cfg.output {
                if let Err(e) = write_atomic(path, &json) {
                    eprintln!("writing report: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
                println!("report written to {path}");
            } else {
                println!("{json}");
            }
            let mut failed = 0usize;
            for e in report.failures() {
                failed += 1;
                eprintln!(
                    "FAIL {}: residual {:.3e} > {:.3e} at {:?}",
                    e.identity_id, e.residual, e.tolerance, e.context.point
                );
            }
            let passed = report
                .entries
                .iter()
                .filter(|e| e.verdict == Verdict::Pass)
                .count();
            let exploratory = report
                .entries
                .iter()
                .filter(|e| e.verdict == Verdict::Exploratory)
                .count();
            println!("{passed} passed, {failed} failed, {exploratory} exploratory");
            if failed > 0 {
                ExitCode::from(EXIT_FAIL)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(SuiteError::HypothesisViolated { failures }) => {
            eprintln!("hypothesis violated:");
            for f in failures {
                eprintln!("  {f}");
            }
            ExitCode::from(EXIT_HYPOTHESIS)
        }
        Err(SuiteError::ConclusionViolated(msg)) => {
            eprintln!("CONCLUSION VIOLATED: {msg}");
            eprintln!("this indicates either a computational bug or a counterexample; inspect before trusting");
            ExitCode::from(EXIT_FAIL)
        }
        Err(SuiteError::Jet(JetError::OutOfDomain)) => {
            eprintln!("point is outside the chart domain");
            ExitCode::from(EXIT_DOMAIN)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_HYPOTHESIS)
        }
    }
}

fn cmd_sample_planes(args: SamplePlanesArgs) -> ExitCode {
    let kind = match args.kind.as_str() {
        "antiholomorphic" => PlaneKind::Antiholomorphic,
        "holomorphic" => PlaneKind::Holomorphic,
        "generic" => PlaneKind::Generic,
        other => {
            eprintln!("config error: unknown plane kind '{other}'");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let space = curvlab::HermitianSpace::standard(args.n);
    let seed = args.seed.or_else(env_seed).unwrap_or(0);
    match sample_planes(&space, kind, args.count, seed) {
        Ok(planes) => {
            if args.json {
                let doc: Vec<_> = planes
                    .iter()
                    .map(|p| {
                        let d = plane_defects(&space, p);
                        serde_json::json!({
                            "x": p.x.as_slice(),
                            "y": p.y.as_slice(),
                            "antiholomorphic_defect": d.antiholomorphic,
                            "holomorphic_defect": d.holomorphic,
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            } else {
                for (i, p) in planes.iter().enumerate() {
                    let d = plane_defects(&space, p);
                    println!(
                        "plane {i}: antiholomorphic defect {:.3e}, holomorphic defect {:.3e}",
                        d.antiholomorphic, d.holomorphic
                    );
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn write_atomic(path: &str, content: &str) -> std::io::Result<()> {
    let tmp = format!("{path}.tmp-{}", std::process::id());
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)
}

fn now_rfc3339() -> String {
    // seconds since epoch, formatted without pulling in a time crate
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let days = secs / 86400;
    let rem = secs % 86400;
    // civil-from-days (Howard Hinnant's algorithm)
    let z = days as i64 + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let dd = doy - (153 * mp + 2) / 5 + 1;
    let mm = if mp < 10 { mp + 3 } else { mp - 9 };
    let yy = if mm <= 2 { y + 1 } else { y };
    format!(
        "{yy:04}-{mm:02}-{dd:02}T{:02}:{:02}:{:02}Z",
        rem / 3600,
        (rem % 3600) / 60,
        rem % 60
    )
}
