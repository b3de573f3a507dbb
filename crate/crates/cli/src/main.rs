use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use greenosher::dilation::{certify, to_dilation_position, DilationConfig};
use greenosher::greenosher::{verify_certified, ConvexFunctional, VerifyConfig};
use greenosher::io::{load_body, save_body, write_json};
use greenosher::measures::{area, node_count, steiner_data};
use greenosher::plot::{render_svg, PlotOptions};
use greenosher::support_body::{random_body, DEFAULT_EPS_CONVEX};
use greenosher::sweep::{sweep, SweepConfig};
use greenosher::Error;

#[derive(Parser)]
#[command(
    name = "greenosher",
    version,
    about = "Check the Green-Osher inequality on planar convex bodies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random body with zero first harmonics.
    Gen(GenArgs),
    /// Print areas, convexity margin and, given a second body, pair data.
    Info(InfoArgs),
    /// Reposition a pair and verify the inequality chain.
    Verify(VerifyArgs),
    /// Verify a seeded corpus of random pairs.
    Sweep(SweepArgs),
    /// Draw a pair as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 6)]
    degree: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    decay: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long)]
    k: PathBuf,
    #[arg(long)]
    l: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    k: PathBuf,
    #[arg(long)]
    l: PathBuf,
    /// Registry name, comma-separated list, or `all`.
    #[arg(long, default_value = "all")]
    functional: String,
    /// Quadrature nodes (power of two); defaults to the pair's node count.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    degree: usize,
    #[arg(long, default_value_t = 2.0)]
    decay: f64,
    #[arg(long, default_value = "all")]
    functional: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    summary: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    k: PathBuf,
    #[arg(long)]
    l: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Add a polar inset of the relative curvature radius.
    #[arg(long)]
    rho: bool,
}

/// Exit status for a library error: input problems are usage errors, anything
/// else means the computation itself failed.
fn status(err: &Error) -> u8 {
    match err {
        Error::Io { .. }
        | Error::Parse { .. }
        | Error::InvalidBody(_)
        | Error::NotConvex { .. }
        | Error::UnknownFunctional(_)
        | Error::BadNodeCount(_)
        | Error::InsufficientNodes { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => gen(args),
        Command::Info(args) => info(args),
        Command::Verify(args) => verify(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Plot(args) => plot(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(status(&err))
        }
    }
}

fn gen(args: GenArgs) -> Result<u8, Error> {
    let body = random_body(args.seed, args.degree, args.decay)?;
    save_body(&body, &args.out)?;
    Ok(0)
}

fn info(args: InfoArgs) -> Result<u8, Error> {
    let k = load_body(&args.k)?;
    let convexity = k.validate_default(DEFAULT_EPS_CONVEX)?;
    let mut out = json!({
        "degree": k.degree(),
        "area": area(&k),
        "min_curvature_radius": convexity.min,
        "min_at": convexity.theta,
    });
    if let Some(path) = args.l {
        let l = load_body(&path)?;
        let n = node_count(&k, &l);
        let steiner = steiner_data(&k, &l)?;
        let certificate = certify(&k, &l, n, &DilationConfig::default())?;
        out["steiner"] = serde_json::to_value(steiner).expect("serializable");
        out["certificate"] = serde_json::to_value(certificate).expect("serializable");
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("serializable")
    );
    Ok(0)
}

fn verify(args: VerifyArgs) -> Result<u8, Error> {
    let k = load_body(&args.k)?;
    let l = load_body(&args.l)?;
    let functionals = ConvexFunctional::parse_list(&args.functional)?;
    let cfg = VerifyConfig {
        nodes: args.grid,
        tol: args.tol,
        ..VerifyConfig::default()
    };
    let n = args.grid.unwrap_or_else(|| node_count(&k, &l));
    let outcome = to_dilation_position(&k, &l, n)
        .and_then(|(k, l, cert)| verify_certified(&k, &l, &cert, &functionals, &cfg));
    match outcome {
        Ok(report) => {
            write_json(&report, &args.report)?;
            let ok = report.functionals.iter().all(|f| f.slack >= -args.tol);
            for f in &report.functionals {
                eprintln!(
                    "{:>12}  lhs {:.12}  rhs {:.12}  slack {:.3e}",
                    f.name, f.lhs, f.rhs, f.slack
                );
            }
            Ok(if ok { 0 } else { 1 })
        }
        Err(err) => {
            write_json(&json!({ "error": err.to_string() }), &args.report)?;
            Err(err)
        }
    }
}

fn run_sweep(args: SweepArgs) -> Result<u8, Error> {
    let cfg = SweepConfig {
        trials: args.trials,
        seed: args.seed,
        degree: args.degree,
        decay: args.decay,
        functionals: ConvexFunctional::parse_list(&args.functional)?,
        jobs: args.jobs,
        verify: VerifyConfig {
            tol: args.tol,
            ..VerifyConfig::default()
        },
        ..SweepConfig::default()
    };
    if args.trials > 0 {
        // surface bad generator flags as usage errors rather than per-trial failures
        random_body(args.seed, args.degree, args.decay)?;
    }
    let (summary, outcomes) = sweep(&cfg);
    write_json(&summary, &args.summary)?;
    for o in outcomes.iter().filter(|o| o.failed(cfg.verify.tol)) {
        match &o.record {
            Err(e) => eprintln!("trial {} (seed {}): {e}", o.index, o.seed),
            Ok(rec) => eprintln!(
                "trial {} (seed {}): min slack {:e}",
                o.index,
                o.seed,
                rec.report.min_slack()
            ),
        }
    }
    eprintln!("{} trials, {} failures", summary.trials, summary.failures);
    Ok(if summary.failures == 0 { 0 } else { 1 })
}

fn plot(args: PlotArgs) -> Result<u8, Error> {
    let k = load_body(&args.k)?;
    let l = load_body(&args.l)?;
    let opts = PlotOptions {
        rho: args.rho,
        nodes: node_count(&k, &l),
        ..PlotOptions::default()
    };
    let svg = render_svg(&k, &l, &opts)?;
    std::fs::write(&args.out, svg).map_err(|source| Error::Io {
        path: args.out.clone(),
        source,
    })?;
    Ok(0)
}
