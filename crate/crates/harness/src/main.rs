use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use apwb_harness::config::{Config, Experiment, Settings};
use apwb_harness::error::HarnessError;
use apwb_harness::experiments::{self as exp, MESH_DOMAIN};
use apwb_harness::output::VERSION;
use clap::Parser;

#[derive(Debug, Parser)]
#[command(name = "apwb", version = VERSION, about = "Gravity-friction Euler experiments")]
struct Cli {
    #[arg(value_enum)]
    experiment: Experiment,

    /// `key=value` settings file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: Settings,
}

fn projections(cfg: &Config) -> Result<Vec<(String, usize)>, HarnessError> {
    let params = cfg.params()?;
    let kind = cfg.potential.kind();
    let mut out = Vec::new();
    match cfg.experiment {
        Experiment::Run | Experiment::Sod | Experiment::Perturb | Experiment::Longtime => {
            let steps = exp::projected_steps(&params, kind, 0.0, 1.0, cfg.cells, cfg.t_final)?;
            out.push((format!("N={}", cfg.cells), steps));
        }
        Experiment::HydroTable => {
            for job in exp::hydro_jobs(cfg) {
                let p = cfg.params_with(job.eps, cfg.beta)?;
                let steps =
                    exp::projected_steps(&p, job.potential, 0.0, 1.0, job.cells, cfg.t_final)?;
                out.push((
                    format!("eps={} {} N={}", job.eps, job.potential.name(), job.cells),
                    steps,
                ));
            }
        }
        Experiment::MeshSweep => {
            for beta in exp::mesh_betas(cfg) {
                let p = cfg.params_with(cfg.eps, beta)?;
                for n in exp::mesh_cells(cfg) {
                    let steps = exp::projected_steps(
                        &p,
                        kind,
                        MESH_DOMAIN.0,
                        MESH_DOMAIN.1,
                        n,
                        cfg.t_final,
                    )?;
                    out.push((format!("beta={beta} N={n}"), steps));
                }
            }
        }
    }
    Ok(out)
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    let settings = match &cli.config {
        Some(path) => Settings::from_file(path)?.overlay(cli.settings),
        None => cli.settings,
    };
    let cfg = Config::resolve(cli.experiment, settings)?;
    eprintln!("apwb {VERSION}: {cfg}");
    for (label, steps) in projections(&cfg)? {
        eprintln!("  projected steps {label}: {steps}");
    }
    let start = Instant::now();
    let paths = match cfg.experiment {
        Experiment::Run => exp::write_single_run(&cfg, &exp::single_run(&cfg)?)?,
        Experiment::Sod => {
            let r = exp::sod(&cfg)?;
            if let Some(reference) = &r.reference {
                eprintln!(
                    "  L1 distance to limit reference: {:e}",
                    reference.l1_distance
                );
            }
            exp::write_sod(&cfg, &r)?
        }
        Experiment::HydroTable => {
            let records = exp::hydro_table(&cfg)?;
            for r in &records {
                eprintln!(
                    "  eps={:<6} {:<10} N={:<5} L1(rho)={:e} L1(q)={:e}",
                    r.epsilon,
                    r.potential.name(),
                    r.n_cells,
                    r.l1_rho,
                    r.l1_q
                );
            }
            exp::write_hydro_table(&cfg, &records, start.elapsed())?
        }
        Experiment::Perturb => exp::write_perturb(&cfg, &exp::perturb(&cfg)?)?,
        Experiment::Longtime => {
            let series = exp::longtime(&cfg)?;
            for s in &series {
                let (t, q, e) = s.last();
                eprintln!(
                    "  eps={} wb={}: t={t} max|q|={q:e} L1={e:e}",
                    s.eps, s.well_balanced
                );
            }
            exp::write_longtime(&cfg, &series)?
        }
        Experiment::MeshSweep => {
            let records = exp::mesh_sweep(&cfg)?;
            for r in &records {
                eprintln!(
                    "  beta={} {:?} N={}: {} after {} steps",
                    r.beta,
                    r.variant,
                    r.grid.n_cells,
                    r.outcome.name(),
                    r.steps
                );
            }
            let paths = exp::write_mesh_sweep(&cfg, &records)?;
            // an AP blow-up is a failure, non-AP blow-ups are the expected result
            if let Some(r) = records.iter().find(|r| {
                r.variant == apwb_core::Variant::UnifiedAp && r.outcome == exp::Outcome::BlowUp
            }) {
                return Err(HarnessError::solver(
                    format!("mesh-sweep beta={} N={}", r.beta, r.grid.n_cells),
                    apwb_core::Error::BlowUp {
                        step: r.steps,
                        time: r.time,
                    },
                ));
            }
            paths
        }
    };
    for p in paths {
        println!("{}", p.display());
    }
    eprintln!("  wall time {:.2}s", start.elapsed().as_secs_f64());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
