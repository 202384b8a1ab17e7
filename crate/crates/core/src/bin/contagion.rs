use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use contagion_core::io::{emit_metrics, ingest_transcript, parse_scenario, run_ab};
use contagion_core::observation::Lexicon;
use contagion_core::sim::run_scenario;
use contagion_core::Error;

#[derive(Parser)]
#[command(name = "contagion", version, about = "Emotion contagion simulation and mood analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write metrics.csv, trace.jsonl, summary.json and policy.json.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Force orchestration off (pure contagion baseline).
        #[arg(long)]
        no_orchestration: bool,
    },
    /// Sense and group moods in a JSONL transcript; prints a JSON report.
    Analyze {
        transcript: PathBuf,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired orchestration on/off comparison over consecutive seeds.
    Ab {
        scenario: PathBuf,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// Also write ab.csv and ab.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CONTAGION_LOG", "error")).init();
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Configuration { .. } | Error::Parse { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn write(path: PathBuf, body: &str) -> Result<(), Error> {
    std::fs::write(&path, body).map_err(|source| Error::Io { path, source })
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            scenario,
            out,
            seed,
            no_orchestration,
        } => {
            let mut config = parse_scenario(&scenario)?;
            if let Some(s) = seed {
                config.seed = s;
            }
            if no_orchestration {
                config.orchestration.enabled = false;
            }
            log::info!("running {} for {} steps", scenario.display(), config.steps);
            let trace = run_scenario(&config)?;
            let files = emit_metrics(&trace, &out)?;
            print!("{}", std::fs::read_to_string(&files.summary).map_err(|source| Error::Io {
                path: files.summary.clone(),
                source,
            })?);
        }
        Command::Analyze { transcript, lexicon, out } => {
            let lexicon = match lexicon {
                Some(p) => Lexicon::from_file(p)?,
                None => Lexicon::builtin(),
            };
            let report = ingest_transcript(&transcript, &lexicon)?.to_json();
            match out {
                Some(p) => write(p, &report)?,
                None => print!("{report}"),
            }
        }
        Command::Ab { scenario, seeds, out } => {
            let config = parse_scenario(&scenario)?;
            let report = run_ab(&config, seeds)?;
            print!("{}", report.to_csv());
            eprintln!(
                "mean_delta={:.6} improved={}/{} worsened={} ties={} p_value={:.3e}",
                report.mean_delta,
                report.improved,
                report.rows.len(),
                report.worsened,
                report.ties,
                report.p_value
            );
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
                    path: dir.clone(),
                    source,
                })?;
                write(dir.join("ab.csv"), &report.to_csv())?;
                write(
                    dir.join("ab.json"),
                    &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"),
                )?;
            }
        }
    }
    Ok(())
}
