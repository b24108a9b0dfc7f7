//! Command-line front end.
//!
//! Every output embeds the tool version and the exact run configuration:
//! JSON files carry `version` and `config` fields, CSV files carry them as
//! leading `#` comment lines. Exit code 0 means the computation ran (a
//! refuted certificate is still a successful run), 1 means a computation
//! or I/O failure, and 2 means the arguments did not parse.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use parisi::certify;
use parisi::gamma::{criterion_report, gamma_profile};
use parisi::model::{Atom, AtomicMeasure, Mixture, Temperature};
use parisi::optimize::{
    gap_diagnostics, parisi_value, rs_value, scan_beta, OptimizeConfig, ScanConfig,
};
use parisi::oracle;
use parisi::pde::{solve_phi, PhiStack, QuadratureSpec};
use parisi::{Error, Result};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "parisi",
    version,
    about = "Variational solver and machine-checked certificates for the \
             Sherrington-Kirkpatrick free energy at finite replica symmetry breaking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the free-energy functional for a given measure
    Solve(SolveArgs),
    /// Optimality diagnostics: fixed-point residuals, stability slacks,
    /// gap functions, and an optional Γ profile
    Criterion(CriterionArgs),
    /// Run the exact-arithmetic certificate suite
    Certify(CertifyArgs),
    /// Minimize over a β grid and report the phase picture
    Scan(ScanArgs),
    /// Exhaustive finite-N reference values, averaged over disorder
    Oracle(OracleArgs),
    /// Long-format order-parameter data for plotting
    PlotData(PlotDataArgs),
}

/// How the measure a command operates on is specified. Defaults to the
/// single atom at the origin when neither source is given.
#[derive(Args)]
struct MeasureArgs {
    /// JSON file holding a measure, or any object with a "measure" field
    /// (solver and scan outputs can be fed back in directly)
    #[arg(long, value_name = "FILE", conflicts_with = "atoms")]
    measure: Option<PathBuf>,
    /// Inline atoms as comma-separated location:weight pairs,
    /// e.g. "0:0.5,0.2:0.5"
    #[arg(long, value_name = "Q:W,...")]
    atoms: Option<String>,
}

impl MeasureArgs {
    fn load(&self) -> Result<(AtomicMeasure, String)> {
        if let Some(path) = &self.measure {
            let text = fs::read_to_string(path)?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let node = value.get("measure").unwrap_or(&value).clone();
            let measure: AtomicMeasure = serde_json::from_value(node)?;
            return Ok((measure, path.display().to_string()));
        }
        if let Some(list) = &self.atoms {
            let mut atoms = Vec::new();
            for part in list.split(',') {
                let (q, w) = part.split_once(':').ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "atom '{part}' is not a location:weight pair"
                    ))
                })?;
                let parse = |s: &str| -> Result<f64> {
                    s.trim().parse().map_err(|_| {
                        Error::InvalidParameter(format!("'{s}' is not a number"))
                    })
                };
                atoms.push(Atom {
                    q: parse(q)?,
                    w: parse(w)?,
                });
            }
            return Ok((AtomicMeasure::new(atoms)?, "inline".into()));
        }
        Ok((AtomicMeasure::delta0(), "delta0".into()))
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Inverse temperature β > 0
    #[arg(long)]
    beta: f64,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Gauss-Hermite nodes per recursion layer (odd, at least 11)
    #[arg(long, default_value_t = 61)]
    nodes: usize,
    /// Output JSON file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CriterionArgs {
    /// Inverse temperature β > 0
    #[arg(long)]
    beta: f64,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Gauss-Hermite nodes per recursion layer (odd, at least 11)
    #[arg(long, default_value_t = 41)]
    nodes: usize,
    /// Interior samples per support gap for the gap-function minimum
    #[arg(long, default_value_t = 16)]
    gap_samples: usize,
    /// Also tabulate Γ, Γ′, E[e^W] over a uniform grid into this CSV file
    #[arg(long, value_name = "FILE")]
    profile: Option<PathBuf>,
    /// Points of the uniform profile grid
    #[arg(long, default_value_t = 201)]
    profile_points: usize,
    /// Output JSON file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Output JSON file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Zero the per-certificate timing fields so reruns are byte-identical
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct ScanArgs {
    /// Lower end of the β grid
    #[arg(long, default_value_t = 0.5)]
    beta_min: f64,
    /// Upper end of the β grid
    #[arg(long, default_value_t = 0.9)]
    beta_max: f64,
    /// Number of grid steps (the grid has steps+1 points)
    #[arg(long, default_value_t = 40)]
    steps: usize,
    /// Levels of symmetry breaking in the ansatz (k+1 atoms)
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Nelder-Mead starts per grid point
    #[arg(long, default_value_t = 8)]
    starts: usize,
    /// Objective-evaluation budget per start
    #[arg(long, default_value_t = 500)]
    max_evals: usize,
    /// Quadrature nodes during the search phase
    #[arg(long, default_value_t = 11)]
    search_nodes: usize,
    /// Quadrature nodes for reported values
    #[arg(long, default_value_t = 61)]
    final_nodes: usize,
    /// Quadrature nodes for the per-row optimality summary
    #[arg(long, default_value_t = 41)]
    profile_nodes: usize,
    /// Base seed for the pseudorandom starts
    #[arg(long, default_value_t = 17)]
    seed: u64,
    /// Output CSV file for the phase table
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Directory for the per-β optimized measures
    /// (default: output path with a .measures extension)
    #[arg(long, value_name = "DIR")]
    measures_dir: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// System sizes, comma separated (each at most 14)
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Inverse temperature β ≥ 0
    #[arg(long)]
    beta: f64,
    /// Independent disorder draws per size
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Base randomness seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotDataArgs {
    /// Directory of per-β measure files produced by `scan`
    #[arg(
        long,
        value_name = "DIR",
        conflicts_with_all = ["measure", "atoms", "beta"]
    )]
    measures_dir: Option<PathBuf>,
    #[command(flatten)]
    measure: MeasureArgs,
    /// β recorded in the rows when a single measure is given
    #[arg(long)]
    beta: Option<f64>,
    /// Points of the uniform u grid over [0,1]
    #[arg(long, default_value_t = 1000)]
    points: usize,
    /// Output CSV file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Criterion(a) => run_criterion(a),
        Command::Certify(a) => run_certify(a),
        Command::Scan(a) => run_scan(a),
        Command::Oracle(a) => run_oracle(a),
        Command::PlotData(a) => run_plot_data(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn fmt(x: f64) -> String {
    // x + 0.0 turns a negative zero (e.g. an empty-sum CDF value) into +0.0.
    format!("{:.12e}", x + 0.0)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir)?;
                }
            }
            fs::write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn csv_header(config: &serde_json::Value, columns: &str) -> Result<String> {
    Ok(format!(
        "# version: {VERSION}\n# config: {}\n{columns}\n",
        serde_json::to_string(config)?
    ))
}

fn solve_at(measure: &AtomicMeasure, beta: f64, nodes: usize) -> Result<(PhiStack, Temperature)> {
    let beta = Temperature::new(beta)?;
    let quad = QuadratureSpec::new(nodes, 40.0)?;
    let stack = solve_phi(measure, &Mixture::sk(beta), &quad)?;
    Ok((stack, beta))
}

fn run_solve(args: SolveArgs) -> Result<()> {
    let (measure, source) = args.measure.load()?;
    let (stack, beta) = solve_at(&measure, args.beta, args.nodes)?;
    let value = parisi_value(&stack)?;
    let rs = rs_value(beta);
    let out = json!({
        "version": VERSION,
        "config": {
            "command": "solve",
            "beta": args.beta,
            "nodes": args.nodes,
            "measure_source": source,
        },
        "measure": measure,
        "phi00": stack.value(0.0, 0.0)?,
        "integral_alpha_s": measure.integral_alpha_s(),
        "value": value,
        "rs_value": rs,
        "gain": rs - value,
    });
    write_json(args.out.as_deref(), &out)
}

fn run_criterion(args: CriterionArgs) -> Result<()> {
    let (measure, source) = args.measure.load()?;
    let (stack, _) = solve_at(&measure, args.beta, args.nodes)?;
    let report = criterion_report(&stack)?;
    let gaps = gap_diagnostics(&stack, args.gap_samples.max(2))?;
    let config = json!({
        "command": "criterion",
        "beta": args.beta,
        "nodes": args.nodes,
        "gap_samples": args.gap_samples.max(2),
        "measure_source": source,
    });
    if let Some(profile_path) = &args.profile {
        let profile = gamma_profile(&stack, args.profile_points)?;
        let mut text = csv_header(&config, "u,gamma,gamma_prime,wnorm")?;
        for r in &profile.rows {
            let _ = writeln!(
                text,
                "{},{},{},{}",
                fmt(r.u),
                fmt(r.gamma),
                fmt(r.gamma_prime),
                fmt(r.wnorm)
            );
        }
        write_text(Some(profile_path), &text)?;
    }
    let out = json!({
        "version": VERSION,
        "config": config,
        "measure": measure,
        "report": report,
        "gaps": gaps,
    });
    write_json(args.out.as_deref(), &out)
}

fn run_certify(args: CertifyArgs) -> Result<()> {
    let mut certificates = certify::run_all();
    if args.no_timestamp {
        for c in &mut certificates {
            c.ms = 0;
        }
    }
    let mut proved = 0;
    let mut refuted = 0;
    for c in &certificates {
        let verdict = serde_json::to_value(c.verdict)?;
        eprintln!("{:<24} {}", c.id, verdict.as_str().unwrap_or("?"));
        match c.verdict {
            certify::Verdict::Proved => proved += 1,
            certify::Verdict::Refuted => refuted += 1,
            certify::Verdict::Inconclusive => {}
        }
    }
    eprintln!(
        "{} certificates: {} proved, {} refuted, {} inconclusive",
        certificates.len(),
        proved,
        refuted,
        certificates.len() - proved - refuted
    );
    let out = json!({
        "version": VERSION,
        "config": { "command": "certify", "no_timestamp": args.no_timestamp },
        "certificates": certificates,
    });
    write_json(args.out.as_deref(), &out)
}

fn run_scan(args: ScanArgs) -> Result<()> {
    let cfg = ScanConfig {
        beta_min: args.beta_min,
        beta_max: args.beta_max,
        steps: args.steps,
        profile_nodes: args.profile_nodes,
        optimize: OptimizeConfig {
            levels: args.levels,
            search_nodes: args.search_nodes,
            final_nodes: args.final_nodes,
            starts: args.starts,
            max_evals: args.max_evals,
            seed: args.seed,
            ..OptimizeConfig::default()
        },
    };
    let scan = scan_beta(&cfg)?;
    let config = json!({ "command": "scan", "scan": cfg });
    let mut text = format!(
        "# version: {VERSION}\n# config: {}\n",
        serde_json::to_string(&config)?
    );
    match scan.transition {
        Some(b) => {
            let _ = writeln!(text, "# transition: {}", fmt(b));
        }
        None => text.push_str("# transition: none\n"),
    }
    text.push_str("beta,value,support_end,max_residual,min_slack,rs_collapse\n");
    for r in &scan.rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            fmt(r.beta),
            fmt(r.value),
            fmt(r.support_end),
            fmt(r.max_residual),
            fmt(r.min_slack),
            r.rs_collapse
        );
    }
    write_text(Some(&args.out), &text)?;
    let dir = args
        .measures_dir
        .clone()
        .unwrap_or_else(|| args.out.with_extension("measures"));
    fs::create_dir_all(&dir)?;
    for (i, (row, measure)) in scan.rows.iter().zip(&scan.measures).enumerate() {
        let path = dir.join(format!("step_{i:03}_beta_{:.6}.json", row.beta));
        let entry = json!({
            "version": VERSION,
            "beta": row.beta,
            "value": row.value,
            "rs_collapse": row.rs_collapse,
            "measure": measure,
        });
        write_json(Some(&path), &entry)?;
    }
    match scan.transition {
        Some(b) => eprintln!(
            "{} rows -> {}; measures in {}; first non-collapsed point at beta = {b}",
            scan.rows.len(),
            args.out.display(),
            dir.display()
        ),
        None => eprintln!(
            "{} rows -> {}; measures in {}; every point collapsed",
            scan.rows.len(),
            args.out.display(),
            dir.display()
        ),
    }
    Ok(())
}

fn run_oracle(args: OracleArgs) -> Result<()> {
    let config = json!({
        "command": "oracle",
        "n": args.n,
        "beta": args.beta,
        "samples": args.samples,
        "seed": args.seed,
    });
    let mut text = csv_header(&config, "N,beta,samples,mean,stderr,seed")?;
    for &n in &args.n {
        let est = oracle::free_energy(n, args.beta, args.samples, args.seed)?;
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            est.n,
            fmt(est.beta),
            est.samples,
            fmt(est.mean),
            fmt(est.stderr),
            est.seed
        );
    }
    write_text(args.out.as_deref(), &text)
}

#[derive(Deserialize)]
struct MeasureRecord {
    beta: f64,
    measure: AtomicMeasure,
}

fn run_plot_data(args: PlotDataArgs) -> Result<()> {
    if args.points < 2 {
        return Err(Error::InvalidParameter(
            "the plot grid needs at least 2 points".into(),
        ));
    }
    let mut series: Vec<(f64, AtomicMeasure)> = Vec::new();
    let source;
    if let Some(dir) = &args.measures_dir {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for p in &paths {
            let rec: MeasureRecord = serde_json::from_str(&fs::read_to_string(p)?)?;
            series.push((rec.beta, rec.measure));
        }
        if series.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "no measure files found in {}",
                dir.display()
            )));
        }
        source = dir.display().to_string();
    } else {
        let beta = args.beta.ok_or_else(|| {
            Error::InvalidParameter("--beta is required for a single measure".into())
        })?;
        let (measure, s) = args.measure.load()?;
        series.push((beta, measure));
        source = s;
    }
    let config = json!({
        "command": "plot-data",
        "source": source,
        "points": args.points,
    });
    let mut text = csv_header(&config, "beta,u,alpha")?;
    for (beta, measure) in &series {
        for i in 0..args.points {
            let u = i as f64 / (args.points - 1) as f64;
            let _ = writeln!(text, "{},{},{}", fmt(*beta), fmt(u), fmt(measure.alpha(u)));
        }
    }
    write_text(args.out.as_deref(), &text)
}
