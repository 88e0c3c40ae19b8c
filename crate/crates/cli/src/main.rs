//! `chromasent`: logo palettes, review emotions, and the reports that join
//! them.

mod config;
mod manifest;
mod report;
mod stages;
mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "chromasent", version, about = "Emotion-based color palettes from brand logos and reviews")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Extract and map the dominant colors of every logo.
    Palette,
    /// Score every review for sentiment and emotion.
    Analyze,
    /// Build company profiles and per-emotion palettes.
    Associate,
    /// Write tables and charts from the associated stages.
    Report,
    /// Run palette, analyze, associate and report, skipping up-to-date steps.
    Pipeline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifyArg {
    Argmax,
    Compound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Equal,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeedingArg {
    Distance,
    Uniform,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Companies file (id,name,category,logo_path).
    #[arg(long, global = true, default_value = "companies.csv")]
    pub companies: PathBuf,
    /// Reviews file (id,company_name,category,score,text,time).
    #[arg(long, global = true, default_value = "reviews.csv")]
    pub reviews: PathBuf,
    /// Directory that relative logo paths are resolved against.
    #[arg(long, global = true, default_value = "logos")]
    pub logos: PathBuf,
    /// Stage store directory.
    #[arg(long, global = true, default_value = "store")]
    pub store: PathBuf,
    /// Report output directory.
    #[arg(long, global = true, default_value = "reports")]
    pub out: PathBuf,
    /// Color model file (id,name,r,g,b); the bundled 43-color model if absent.
    #[arg(long, global = true)]
    pub color_model: Option<PathBuf>,
    /// Sentiment lexicon (token<TAB>valence); the bundled lexicon if absent.
    #[arg(long, global = true)]
    pub sentiment_lexicon: Option<PathBuf>,
    /// Emotion lexicon (token<TAB>emotion); the bundled lexicon if absent.
    #[arg(long, global = true)]
    pub emotion_lexicon: Option<PathBuf>,
    /// Clusters per logo.
    #[arg(long, global = true, default_value_t = 5)]
    pub k: usize,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Colors kept per emotion palette.
    #[arg(long, global = true, default_value_t = 10)]
    pub top_n: usize,
    /// Drop pixels matching the dominant border color.
    #[arg(long, global = true)]
    pub drop_background: bool,
    #[arg(long, global = true, value_enum, default_value_t = ClassifyArg::Argmax)]
    pub classify_mode: ClassifyArg,
    #[arg(long, global = true, value_enum, default_value_t = WeightingArg::Equal)]
    pub weighting: WeightingArg,
    /// Worker threads; defaults to the number of logical CPUs.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Longest logo side after downsampling.
    #[arg(long, global = true, default_value_t = 256)]
    pub max_dimension: u32,
    /// Pixels with lower alpha are treated as transparent.
    #[arg(long, global = true, default_value_t = 8)]
    pub alpha_threshold: u8,
    /// k-means restarts per logo; the lowest-objective run is kept.
    #[arg(long, global = true, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long, global = true, value_enum, default_value_t = SeedingArg::Distance)]
    pub seeding: SeedingArg,
}

/// What a command did; any skip makes the exit status 1.
#[derive(Debug, Default, Clone, Copy)]
pub struct Outcome {
    pub skips: usize,
}

impl Outcome {
    fn merge(self, other: Outcome) -> Outcome {
        Outcome { skips: self.skips + other.skips }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let cfg = config::RunConfig::from_options(&cli.opts)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
    pool.install(|| match cli.command {
        Command::Palette => stages::cmd_palette(&cfg),
        Command::Analyze => stages::cmd_analyze(&cfg),
        Command::Associate => stages::cmd_associate(&cfg),
        Command::Report => report::cmd_report(&cfg),
        Command::Pipeline => cmd_pipeline(&cfg),
    })
}

fn cmd_pipeline(cfg: &config::RunConfig) -> anyhow::Result<Outcome> {
    cfg.preflight_inputs()?;
    let mut manifest = manifest::Manifest::load(&cfg.store_dir)?;
    let mut outcome = Outcome::default();
    type Step = fn(&config::RunConfig) -> anyhow::Result<Outcome>;
    let steps: [(&str, Step); 4] = [
        ("palette", stages::cmd_palette),
        ("analyze", stages::cmd_analyze),
        ("associate", stages::cmd_associate),
        ("report", report::cmd_report),
    ];
    for (name, step) in steps {
        let fingerprint = manifest::fingerprint(cfg, name)?;
        if manifest.is_current(name, &fingerprint) && manifest::outputs_present(cfg, name) {
            println!("{name}: up to date");
            outcome = outcome.merge(Outcome { skips: manifest.skips(name) });
            continue;
        }
        let result = step(cfg)?;
        manifest.record(name, fingerprint, result.skips);
        manifest.save(&cfg.store_dir)?;
        outcome = outcome.merge(result);
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).format_timestamp(None).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) if o.skips == 0 => ExitCode::SUCCESS,
        Ok(o) => {
            log::warn!("finished with {} skipped item(s)", o.skips);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
