use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ser::archive::{write_report, ModelArchive};
use ser::config::Config;
use ser::exec::RayonExecutor;
use ser::run::{build_model, compare, reference_solutions, slug, solve_online, study_model};
use ser::table::{emit_table, render_table};
use ser::{CliError, Result};
use ser_core::benchmark::{MU_MAX, MU_MIN};
use ser_core::Parameter;

/// Reduced basis and empirical interpolation for the exponential-reaction benchmark.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the configured variant; writes model-<variant>.json and report-<variant>.json.
    Build {
        config: PathBuf,
        /// Archive path (default: <output.dir>/model-<variant>.json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error table of a trained model over the test set; writes table-<variant>.csv.
    Study { config: PathBuf, model: PathBuf },
    /// Online output at one parameter.
    Solve {
        model: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        mu1: f64,
        #[arg(long, allow_negative_numbers = true)]
        mu2: f64,
    },
    /// Build and study the four variants; writes their tables, reports and solve counts.
    Compare { config: PathBuf },
}

fn create_dir(dir: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.into(),
        source: e,
    })
}

fn run(cli: Cli) -> Result<()> {
    let exec = RayonExecutor;
    match cli.command {
        Command::Build { config, out } => {
            let cfg = Config::load(&config)?;
            create_dir(&cfg.output_dir)?;
            let truth = cfg.truth_problem()?;
            let built = build_model(&cfg, &truth, &exec)?;
            let name = slug(&built.archive.report.variant);
            let path = out.unwrap_or_else(|| cfg.output_dir.join(format!("model-{name}.json")));
            built.archive.save(&path)?;
            let report = cfg.output_dir.join(format!("report-{name}.json"));
            write_report(&built.archive.report, &report)?;
            println!(
                "{}: N={} M={} fe_solves={} time={:.2}s",
                built.archive.report.variant,
                built.archive.model.n(),
                built.archive.model.m(),
                built.archive.report.fe_solve_count(),
                built.elapsed.as_secs_f64()
            );
            println!("model  {}", path.display());
            println!("report {}", report.display());
        }
        Command::Study { config, model } => {
            let cfg = Config::load(&config)?;
            let archive = ModelArchive::load(&model)?;
            create_dir(&cfg.output_dir)?;
            let truth = cfg.truth_problem()?;
            let refs = reference_solutions(&cfg, &truth, &exec)?;
            for mu in refs.failed() {
                eprintln!("reference solve failed at mu = {mu}");
            }
            let rows = study_model(&cfg, &archive, &truth, &refs, &exec)?;
            for row in &rows {
                for mu in &row.failed {
                    eprintln!("({}, {}): reduced solve failed at mu = {mu}", row.n, row.m);
                }
            }
            let path = cfg.output_dir.join(format!("table-{}.csv", slug(&archive.report.variant)));
            emit_table(&rows, &path)?;
            print!("{}", render_table(&rows)?);
        }
        Command::Solve { model, mu1, mu2 } => {
            let range = MU_MIN..=MU_MAX;
            if !(range.contains(&mu1) && range.contains(&mu2)) {
                return Err(CliError::Config(format!("mu = ({mu1}, {mu2}) lies outside [{MU_MIN}, {MU_MAX}]^2")));
            }
            let archive = ModelArchive::load(&model)?;
            let sol = solve_online(&archive, Parameter::new(mu1, mu2))?;
            println!("s_N = {:.12e}", sol.output);
            println!("newton_iterations = {}", sol.solution.newton_iters);
            println!("time = {:.3e} s", sol.elapsed.as_secs_f64());
        }
        Command::Compare { config } => {
            let cfg = Config::load(&config)?;
            let out = compare(&cfg, &exec)?;
            for v in &out.variants {
                println!("{:<12} fe_solves={:<5} build_time={:.2}s", v.label, v.fe_solve_count, v.build_time.as_secs_f64());
                print!("{}", render_table(&v.rows)?);
            }
            println!("reference solves: {}", out.reference_solves);
            println!("summary {}", out.summary.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
