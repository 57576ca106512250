use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use viscodamage::config::{parse_fraction, parse_snapshots, Scenario, SimConfig};
use viscodamage::convergence::{ConvergenceStudy, ErrorTime, Sweep};
use viscodamage::output::run_experiment;
use viscodamage::Result;

#[derive(Parser)]
#[command(version, about = "Viscoelastic contact with damage: simulations and refinement studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one of the predefined experiments and write VTK and CSV output.
    Simulate {
        /// 1, 2, 3 or square.
        #[arg(long)]
        experiment: Option<String>,
        /// Mesh size, e.g. 1/32.
        #[arg(long)]
        h: Option<String>,
        /// Time step, e.g. 1/32.
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Constant initial damage.
        #[arg(long)]
        zeta0: Option<f64>,
        /// final, all or every:<m>.
        #[arg(long)]
        snapshots: Option<String>,
        /// `key = value` settings applied before the flags.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Refinement study on the unit-square benchmark; writes report.csv.
    Converge {
        #[arg(long)]
        sweep: String,
        /// Comma-separated resolutions, coarsest first, e.g. 1/2,1/4,1/8.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        /// Resolution of the variable that is not swept.
        #[arg(long)]
        fixed: String,
        /// Reference resolution of the swept variable.
        #[arg(long = "ref")]
        reference: String,
        #[arg(long)]
        out: PathBuf,
        /// Measure the largest error over shared time nodes instead of the final time.
        #[arg(long)]
        max_over_time: bool,
        /// Run the sweep entries one after another.
        #[arg(long)]
        serial: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            experiment,
            h,
            k,
            out,
            zeta0,
            snapshots,
            config,
        } => {
            let mut cfg = SimConfig::default();
            if let Some(path) = config {
                cfg.apply_file(&path)?;
            }
            if let Some(id) = experiment {
                cfg.set_scenario(Scenario::from_id(&id)?);
            }
            if let Some(h) = h {
                cfg.set("h", &h)?;
            }
            if let Some(k) = k {
                cfg.set("k", &k)?;
            }
            if let Some(z) = zeta0 {
                cfg.zeta0 = z;
            }
            if let Some(s) = snapshots {
                cfg.snapshots = parse_snapshots(&s)?;
            }
            if let Some(o) = out {
                cfg.out_dir = Some(o);
            }
            let out = cfg
                .out_dir
                .clone()
                .ok_or_else(|| viscodamage::Error::Config("no output directory given (--out)".into()))?;
            let result = run_experiment(&cfg, &out)?;
            let last = result.run.history.last().expect("history includes the final step");
            println!(
                "experiment {}: {} steps, final damage in [{:.6}, {:.6}], |w|_V = {:.6}",
                cfg.scenario.id(),
                last.step,
                last.min_zeta,
                last.max_zeta,
                last.norm_w_v
            );
            for f in &result.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Converge {
            sweep,
            values,
            fixed,
            reference,
            out,
            max_over_time,
            serial,
            config,
        } => {
            let mut base = SimConfig::scenario(Scenario::Square);
            if let Some(path) = config {
                base.apply_file(&path)?;
            }
            let values = values.iter().map(|v| parse_fraction(v)).collect::<Result<Vec<_>>>()?;
            let mut study = ConvergenceStudy::new(
                base,
                Sweep::parse(&sweep)?,
                values,
                parse_fraction(&fixed)?,
                parse_fraction(&reference)?,
            );
            if max_over_time {
                study.error_time = ErrorTime::MaxOverCommonNodes;
            }
            study.parallel = !serial;
            let report = study.run()?;
            std::fs::create_dir_all(&out)?;
            let path = out.join("report.csv");
            report.write_csv(&path)?;
            print!("{}", report.to_table());
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
