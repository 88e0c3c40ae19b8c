use crate::{ClassifyArg, Options, SeedingArg, WeightingArg};
use anyhow::{bail, Context, Result};
use chromasent::associate::Weighting;
use chromasent::ingest::{load_companies, Company};
use chromasent::palette::{KmeansOptions, LoadOptions, Seeding};
use chromasent::sentiment::ClassifyMode;
use chromasent::store::Store;
use chromasent::{ColorModel, EmotionLexicon, SentimentLexicon};
use std::path::{Path, PathBuf};

/// Validated settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub companies: PathBuf,
    pub reviews: PathBuf,
    pub logos_dir: PathBuf,
    pub store_dir: PathBuf,
    pub out_dir: PathBuf,
    pub color_model: Option<PathBuf>,
    pub sentiment_lexicon: Option<PathBuf>,
    pub emotion_lexicon: Option<PathBuf>,
    pub kmeans: KmeansOptions,
    pub load: LoadOptions,
    pub top_n: usize,
    pub classify: ClassifyMode,
    pub weighting: Weighting,
    pub jobs: usize,
}

impl RunConfig {
    pub fn from_options(o: &Options) -> Result<Self> {
        let positive = [
            ("--k", o.k),
            ("--top-n", o.top_n),
            ("--restarts", o.restarts),
            ("--max-dimension", o.max_dimension as usize),
        ];
        for (flag, v) in positive {
            if v == 0 {
                bail!("{flag} must be at least 1");
            }
        }
        let jobs = match o.jobs {
            Some(0) => bail!("--jobs must be at least 1"),
            Some(j) => j,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(RunConfig {
            companies: o.companies.clone(),
            reviews: o.reviews.clone(),
            logos_dir: o.logos.clone(),
            store_dir: o.store.clone(),
            out_dir: o.out.clone(),
            color_model: o.color_model.clone(),
            sentiment_lexicon: o.sentiment_lexicon.clone(),
            emotion_lexicon: o.emotion_lexicon.clone(),
            kmeans: KmeansOptions {
                k: o.k,
                seed: o.seed,
                restarts: o.restarts,
                seeding: match o.seeding {
                    SeedingArg::Distance => Seeding::DistanceWeighted,
                    SeedingArg::Uniform => Seeding::Uniform,
                },
                ..KmeansOptions::default()
            },
            load: LoadOptions {
                alpha_threshold: o.alpha_threshold,
                drop_background: o.drop_background,
                max_dimension: o.max_dimension,
            },
            top_n: o.top_n,
            classify: match o.classify_mode {
                ClassifyArg::Argmax => ClassifyMode::Argmax,
                ClassifyArg::Compound => ClassifyMode::Compound,
            },
            weighting: match o.weighting {
                WeightingArg::Equal => Weighting::Equal,
                WeightingArg::Power => Weighting::Power,
            },
            jobs,
        })
    }

    pub fn color_model(&self) -> Result<ColorModel> {
        match &self.color_model {
            Some(p) => ColorModel::from_path(p).with_context(|| format!("loading color model {}", p.display())),
            None => Ok(ColorModel::default_model()),
        }
    }

    pub fn sentiment_lexicon(&self) -> Result<SentimentLexicon> {
        match &self.sentiment_lexicon {
            Some(p) => {
                SentimentLexicon::from_path(p).with_context(|| format!("loading sentiment lexicon {}", p.display()))
            }
            None => Ok(SentimentLexicon::reference().clone()),
        }
    }

    pub fn emotion_lexicon(&self) -> Result<EmotionLexicon> {
        match &self.emotion_lexicon {
            Some(p) => EmotionLexicon::from_path(p).with_context(|| format!("loading emotion lexicon {}", p.display())),
            None => Ok(EmotionLexicon::reference().clone()),
        }
    }

    pub fn companies(&self) -> Result<Vec<Company>> {
        require_file(&self.companies, "--companies")?;
        load_companies(&self.companies).with_context(|| format!("loading companies {}", self.companies.display()))
    }

    pub fn store(&self) -> Result<Store> {
        Store::open(&self.store_dir).with_context(|| format!("opening store {}", self.store_dir.display()))
    }

    pub fn logo_path(&self, c: &Company) -> PathBuf {
        if c.logo_path.is_absolute() {
            c.logo_path.clone()
        } else {
            self.logos_dir.join(&c.logo_path)
        }
    }

    pub fn preflight_palette(&self) -> Result<()> {
        self.companies()?;
        if !self.logos_dir.is_dir() {
            bail!("logo directory {} does not exist (--logos)", self.logos_dir.display());
        }
        self.color_model()?;
        Ok(())
    }

    pub fn preflight_analyze(&self) -> Result<()> {
        self.companies()?;
        require_file(&self.reviews, "--reviews")?;
        self.sentiment_lexicon()?;
        self.emotion_lexicon()?;
        Ok(())
    }

    /// Checks every input of the full pipeline before any stage runs.
    pub fn preflight_inputs(&self) -> Result<()> {
        self.preflight_palette()?;
        self.preflight_analyze()
    }
}

fn require_file(path: &Path, flag: &str) -> Result<()> {
    if !path.is_file() {
        bail!("{} does not exist ({flag})", path.display());
    }
    Ok(())
}
