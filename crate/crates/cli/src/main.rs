use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use groupsim::csv::format_real;
use groupsim::scenario::{locate_key, Scenario};
use groupsim::solve::{render, solve};
use groupsim::verify::{run_checks, Check};
use groupsim::{catalog, Error};

mod plot;

/// Similarity solutions: lake stratification, free-convection boundary layer, plume dispersion.
#[derive(Parser)]
#[command(name = "groupsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and write one CSV per requested output.
    Run(RunArgs),
    /// Print the bundled scenarios.
    List,
    /// Solve a scenario and print its residual reports as CSV.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file, or the name of a bundled scenario
    #[arg(long)]
    scenario: String,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also run the oracles and write a residual CSV
    #[arg(long)]
    verify: bool,
    /// Also write an SVG line plot per output
    #[arg(long)]
    plot: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    scenario: String,
    /// Directory for the residual CSV (stdout only when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with the exit status it maps to.
struct Failure {
    status: u8,
    message: String,
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure {
            status: 1,
            message: format!("{}: {e}", path.display()),
        }
    }
}

fn status_of(e: &Error) -> u8 {
    match e {
        Error::Convergence { .. } | Error::Divergence { .. } => 2,
        _ => 1,
    }
}

/// A scenario together with the text and origin it was parsed from.
struct Loaded {
    origin: String,
    text: String,
}

fn load(spec: &str) -> Result<Loaded, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        return Ok(Loaded {
            origin: spec.to_string(),
            text,
        });
    }
    let b = catalog::find(spec).map_err(|_| Failure {
        status: 1,
        message: format!("{spec}: no such file or bundled scenario"),
    })?;
    Ok(Loaded {
        origin: format!("{}.scn", b.name),
        text: b.text.to_string(),
    })
}

fn parse(loaded: &Loaded) -> Result<Scenario, Failure> {
    Scenario::from_toml_str(&loaded.text).map_err(|e| {
        let location = match &e {
            Error::InvalidParameter { key, .. } => locate_key(&loaded.text, key)
                .map(|line| format!("{}:{line}: key `{key}`", loaded.origin)),
            _ => None,
        };
        Failure {
            status: status_of(&e),
            message: match location {
                Some(at) => format!("{at}: {e}"),
                None => format!("{}: {e}", loaded.origin),
            },
        }
    })
}

fn core_failure(e: Error) -> Failure {
    Failure {
        status: status_of(&e),
        message: e.to_string(),
    }
}

fn residual_csv(checks: &[Check]) -> String {
    let mut out = String::from("equation,max_norm,l2_norm,samples,threshold,pass\n");
    for c in checks {
        let r = &c.report;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.equation,
            format_real(r.max_norm),
            format_real(r.l2_norm),
            r.samples,
            format_real(c.threshold),
            c.pass
        ));
    }
    out
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::io(path, e))
}

fn run(args: &RunArgs) -> Result<(), Failure> {
    let scenario = parse(&load(&args.scenario)?)?;
    let solved = solve(&scenario).map_err(core_failure)?;
    let outputs = render(&scenario, &solved).map_err(core_failure)?;
    fs::create_dir_all(&args.out).map_err(|e| Failure::io(&args.out, e))?;
    for (name, rendered) in &outputs {
        let csv = rendered.to_csv_string().map_err(core_failure)?;
        write_file(&args.out.join(format!("{name}.csv")), csv.as_bytes())?;
        if args.plot {
            let svg = plot::chart(&format!("{} / {name}", scenario.name), rendered);
            write_file(&args.out.join(format!("{name}.svg")), svg.as_bytes())?;
        }
    }
    if args.verify {
        let checks = run_checks(&scenario, &solved).map_err(core_failure)?;
        let path = args.out.join(format!("{}_residuals.csv", scenario.name));
        write_file(&path, residual_csv(&checks).as_bytes())?;
        if let Some(c) = checks.iter().find(|c| !c.pass) {
            return Err(Failure {
                status: 3,
                message: format!(
                    "verification failed: {} at {:e} (threshold {:e})",
                    c.report.equation, c.value, c.threshold
                ),
            });
        }
    }
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let scenario = parse(&load(&args.scenario)?)?;
    let solved = solve(&scenario).map_err(core_failure)?;
    let checks = run_checks(&scenario, &solved).map_err(core_failure)?;
    let csv = residual_csv(&checks);
    print!("{csv}");
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        write_file(
            &dir.join(format!("{}_residuals.csv", scenario.name)),
            csv.as_bytes(),
        )?;
    }
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(Failure {
            status: 3,
            message: "verification failed".into(),
        })
    }
}

fn list() -> Result<(), Failure> {
    let mut stdout = std::io::stdout().lock();
    for b in catalog::BUNDLED {
        let _ = writeln!(stdout, "{:<12} {}", b.name, b.description());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::List => list(),
        Command::Verify(args) => verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
