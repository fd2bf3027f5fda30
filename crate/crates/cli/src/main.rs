use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use glasshouse::config::{load_document, EnvDocument, ProfileName};
use glasshouse::controllers::ControllerSpec;
use glasshouse::policy_io::save_policy;
use glasshouse::sweep::{run_sweep, write_aggregates, write_runs, SweepSpec, DEFAULT_DELTAS};
use glasshouse::train::{cem_train_parallel, sibling, write_curve};
use glasshouse::{speed, trajectory, weather_csv};
use glasshouse_core::weather::{synthetic, SyntheticProfile};
use glasshouse_core::CemConfig;

/// Greenhouse crop-production benchmark.
///
/// Episode seeds: a single rollout uses --seed (or the config's `seed`);
/// run i of a sweep uses base seed + i.
#[derive(Debug, Parser)]
#[command(name = "glasshouse", version, about, long_about)]
struct Cli {
    /// Environment YAML document; library defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Episode seed (sweeps: base seed). Defaults to the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file. Standard output when omitted, where the format allows it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one episode and write its JSON-lines trajectory.
    Rollout {
        /// rule_based | policy:<artifact.json> | constant:<u1,...,u6>
        #[arg(long, default_value = "rule_based")]
        controller: String,
    },
    /// Measure environment steps per second with the rule-based controller.
    Speed {
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
    },
    /// Run every controller at every uncertainty level; writes per-run and aggregate CSV.
    Sweep {
        /// Comma-separated δ values.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DELTAS.to_vec())]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 30)]
        runs: usize,
        /// Repeatable; defaults to rule_based.
        #[arg(long = "controller")]
        controllers: Vec<String>,
    },
    /// Train an affine policy with the cross-entropy method.
    Train {
        /// CEM settings YAML; defaults when omitted.
        #[arg(long)]
        cem: Option<PathBuf>,
    },
    /// Weather file utilities.
    Weather {
        #[command(subcommand)]
        command: WeatherCommand,
    },
    /// Print the effective environment document as YAML.
    Config,
}

#[derive(Debug, Subcommand)]
enum WeatherCommand {
    /// Check a weather CSV and report every violation.
    Validate { path: PathBuf },
    /// Write a synthetic series as CSV.
    Synth {
        #[arg(long, default_value_t = 60)]
        days: usize,
        #[arg(long, value_enum, default_value = "spring")]
        profile: Profile,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Profile {
    Spring,
    Winter,
    Mild,
}

impl From<Profile> for ProfileName {
    fn from(p: Profile) -> Self {
        match p {
            Profile::Spring => ProfileName::Spring,
            Profile::Winter => ProfileName::Winter,
            Profile::Mild => ProfileName::Mild,
        }
    }
}

fn threads(cli: &Cli) -> usize {
    cli.threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn required_out(cli: &Cli, what: &str) -> anyhow::Result<PathBuf> {
    match &cli.out {
        Some(p) => Ok(p.clone()),
        None => bail!("{what} needs --out <path>"),
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (doc, base) = load_document(cli.config.as_deref())?;
    let seed = cli.seed.unwrap_or(doc.seed);
    match &cli.command {
        Command::Rollout { controller } => {
            let mut env = doc.build_env(&base)?;
            let spec: ControllerSpec = controller.parse()?;
            let mut ctrl = spec.load(&env.config().observation, Path::new("."))?;
            trajectory::rollout(&mut env, &mut ctrl, controller, seed, output(cli.out.as_deref())?)?;
        }
        Command::Speed { steps } => {
            let cfg = doc.env_config()?;
            let weather = Arc::new(doc.weather(&base)?);
            let report = speed::measure(&cfg, weather, *steps, threads(&cli))?;
            let mut out = output(cli.out.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
            out.flush()?;
        }
        Command::Sweep {
            deltas,
            runs,
            controllers,
        } => {
            let out = required_out(&cli, "sweep")?;
            let cfg = doc.env_config()?;
            let weather = Arc::new(doc.weather(&base)?);
            let names = if controllers.is_empty() {
                vec!["rule_based".to_string()]
            } else {
                controllers.clone()
            };
            let loaded = names
                .iter()
                .map(|n| {
                    let spec: ControllerSpec = n.parse()?;
                    Ok((n.clone(), spec.load(&cfg.observation, Path::new("."))?))
                })
                .collect::<glasshouse::Result<Vec<_>>>()?;
            let spec = SweepSpec {
                deltas: deltas.clone(),
                n_runs: *runs,
                base_seed: seed,
            };
            let result = run_sweep(&cfg, weather, &loaded, &spec, threads(&cli))?;
            write_runs(create(&out)?, &result.runs)?;
            write_aggregates(create(&sibling(&out, "_aggregate.csv"))?, &result.aggregates)?;
        }
        Command::Train { cem } => {
            let out = required_out(&cli, "train")?;
            let mut cem_cfg: CemConfig = match cem {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    serde_yaml::from_str(&text).with_context(|| format!("{}", p.display()))?
                }
                None => CemConfig::default(),
            };
            if let Some(s) = cli.seed {
                cem_cfg.seed = s;
            }
            let env = doc.build_env(&base)?;
            let outcome = cem_train_parallel(&env, &cem_cfg, threads(&cli))?;
            save_policy(&out, &outcome.best, &env.config().observation)?;
            write_curve(create(&sibling(&out, "_curve.csv"))?, &outcome.curve)?;
        }
        Command::Weather { command } => match command {
            WeatherCommand::Validate { path } => {
                let violations = weather_csv::validate_csv(path)?;
                if violations.is_empty() {
                    let s = weather_csv::load_csv(path)?;
                    println!("{}: ok, {} rows at {} s", path.display(), s.len(), s.dt());
                } else {
                    for v in &violations {
                        eprintln!("{}: {v}", path.display());
                    }
                    bail!("{} violation(s) in {}", violations.len(), path.display());
                }
            }
            WeatherCommand::Synth { days, profile } => {
                let profile = SyntheticProfile {
                    dt: doc.dt,
                    ..ProfileName::from(*profile).profile()
                };
                let series = synthetic(seed, *days, &profile)?;
                weather_csv::write_csv(output(cli.out.as_deref())?, &series)?;
            }
        },
        Command::Config => {
            doc.env_config()?;
            let mut out = output(cli.out.as_deref())?;
            out.write_all(EnvDocument::to_yaml(&doc)?.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
