use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use conetree::config::{PipelineConfig, ProductMetric};
use conetree::formats::{self, ProfileFile, SpaceFile};
use conetree::verify::verify_bundle;
use conetree::{run_pipeline, Generator};
use conetree_core::capacity::{capacity_profile, geometric_ladder};
use conetree_core::charseq::Strategy;

#[derive(Parser)]
#[command(name = "conetree", version, about = "Embed the hyperbolic cone over a finite metric space into a product of trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated space as JSON.
    Generate {
        #[command(flatten)]
        space: SpaceArgs,
        /// Include the full distance matrix instead of only the descriptor.
        #[arg(long)]
        matrix: bool,
        /// Output file; standard output when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Best capacities found over a ladder of scales.
    Profile {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        strategy: Option<String>,
        /// Values of m (m + 1 colors), comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        m: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        tau_top: f64,
        #[arg(long, default_value_t = 0.5)]
        tau_ratio: f64,
        #[arg(long, default_value_t = 6)]
        tau_steps: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Covering variants tried per (τ, m).
        #[arg(long, default_value_t = 8)]
        budget: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run the whole construction and write a bundle.
    Pipeline(PipelineArgs),
    /// Re-run the checks on a written bundle.
    Verify {
        dir: PathBuf,
    },
}

#[derive(Args)]
struct SpaceArgs {
    /// circle, interval, cantor, tree_boundary, random_circle, visual_circle or single_point.
    #[arg(long, default_value = "circle")]
    generator: String,
    /// Number of points.
    #[arg(long)]
    n: Option<usize>,
    /// Depth of a cantor or tree_boundary space.
    #[arg(long)]
    gen_depth: Option<u32>,
    #[arg(long)]
    branching: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SpaceArgs {
    fn generator(&self) -> anyhow::Result<Generator> {
        Ok(Generator::from_parts(&self.generator, self.n, self.gen_depth, self.branching)?)
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// TOML file; its keys override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long, default_value_t = 0.125)]
    r: f64,
    /// Number of levels J.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long, default_value_t = 2)]
    colors: usize,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    strategy: Option<String>,
    /// Run directory; `$CONETREE_OUT/<run name>` when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Refuse to run when the recursion's standing assumptions fail.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    write_pairs: bool,
}

fn write_output(out: Option<&PathBuf>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => Ok(std::io::stdout().write_all(bytes)?),
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Generate { space, matrix, out } => {
            let generator = space.generator()?;
            let sp = generator.generate(space.seed)?;
            let file = if matrix {
                SpaceFile::from_matrix(&sp)
            } else {
                SpaceFile::from_generator(&sp, &generator, space.seed)
            };
            write_output(out.as_ref(), &formats::to_json(&file)?)?;
            Ok(true)
        }
        Command::Profile {
            space,
            strategy,
            m,
            tau_top,
            tau_ratio,
            tau_steps,
            delta,
            budget,
            out,
        } => {
            let generator = space.generator()?;
            let sp = generator.generate(space.seed)?;
            let strategy = match strategy {
                Some(name) => Strategy::from_name(&name).with_context(|| format!("unknown strategy {name}"))?,
                None => generator.default_strategy(),
            };
            if !(tau_top > 0.0 && tau_top <= sp.diam().max(f64::MIN_POSITIVE)) && sp.len() > 1 {
                bail!("the ladder must start in (0, diam Z] = (0, {}]", sp.diam());
            }
            let taus = geometric_ladder(tau_top, tau_ratio, tau_steps);
            let profile = capacity_profile(&sp, strategy, &m, &taus, delta, budget);
            write_output(out.as_ref(), &formats::to_json(&ProfileFile::new(&profile))?)?;
            Ok(true)
        }
        Command::Pipeline(args) => {
            let text = match &args.config {
                Some(path) => {
                    Some(std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
                }
                None => None,
            };
            // A config file that names its own generator makes the generator flags optional.
            let file_has_generator =
                text.as_deref().is_some_and(|t| t.parse::<toml::Table>().is_ok_and(|t| t.contains_key("generator")));
            let generator = match args.space.generator() {
                Err(_) if file_has_generator => Generator::SinglePoint,
                g => g?,
            };
            let mut config = PipelineConfig::new(generator, args.r, args.depth, args.colors);
            config.delta = args.delta;
            config.seed = args.space.seed;
            config.strategy = args.strategy;
            config.out_dir = args.out;
            config.product_metric = ProductMetric::L1;
            config.strict = args.strict;
            config.write_pairs = args.write_pairs;
            if let Some(text) = &text {
                config = config.overridden_by(text)?;
            }
            config.validate()?;
            let dir = config.output_dir();
            let run = run_pipeline(&config);
            run.bundle.write_to(&dir)?;
            for line in &run.log {
                eprintln!("{line}");
            }
            eprintln!("bundle written to {}", dir.display());
            Ok(run.passed())
        }
        Command::Verify { dir } => {
            let report = verify_bundle(&dir)?;
            for c in &report.checks {
                println!("{} {}: {}", if c.ok { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
