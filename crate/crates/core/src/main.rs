use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use socvar::corpus::LanguageFilter;
use socvar::eval::Ranking;
use socvar::features::Representation;
use socvar::models::ModelKind;
use socvar::pipeline::{
    parse_list, parse_orders, run_pipeline, run_stage, ConfigOverrides, PipelineConfig, Stage, WORKDIR_ENV,
};

/// Labels review authors by the price range of the places they review and
/// trains style classifiers on their writing.
#[derive(Debug, Parser)]
#[command(name = "socvar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read reviews and businesses, filter to English, group by author.
    Ingest,
    /// Assign price-range labels, filter and balance authors.
    Label,
    /// Per-class readability means with Kruskal-Wallis tests.
    Readability,
    /// Split authors and build feature files and vocabularies.
    Featurize,
    /// Train the requested models on every requested representation.
    Train,
    /// Score checkpoints on the test split and write report.json.
    Evaluate,
    /// Confusion heatmaps and top LR features.
    Report,
    /// Every stage, in order.
    Run,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FilterArg {
    Detect,
    TrustField,
    Off,
}

#[derive(Debug, Args)]
struct Options {
    /// Working directory for artifacts and manifest.json.
    #[arg(long, global = true, env = WORKDIR_ENV)]
    workdir: Option<PathBuf>,
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    reviews: Option<PathBuf>,
    #[arg(long, global = true)]
    businesses: Option<PathBuf>,
    /// Dependency parses keyed by `# doc_id = <user_id>`.
    #[arg(long, global = true)]
    conllu: Option<PathBuf>,
    /// Replacement easy-word list for Dale-Chall, one word per line.
    #[arg(long, global = true)]
    dale_chall_list: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    min_reviews: Option<usize>,
    #[arg(long, global = true)]
    train_fraction: Option<f64>,
    /// Comma list from lexical,bleach,pos,deptriple.
    #[arg(long, global = true)]
    representations: Option<String>,
    /// Comma list from lr,cnn.
    #[arg(long, global = true)]
    models: Option<String>,
    /// CNN runs averaged per cell.
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Word n-gram orders, e.g. `1,3-6`.
    #[arg(long, global = true)]
    word_ngrams: Option<String>,
    /// Character n-gram orders for the lexical bag, e.g. `3-6`.
    #[arg(long, global = true)]
    char_ngrams: Option<String>,
    /// Bleach frequencies as log10 buckets instead of raw counts.
    #[arg(long, global = true)]
    freq_buckets: bool,
    #[arg(long, global = true)]
    min_df: Option<usize>,
    #[arg(long, global = true, value_enum)]
    language_filter: Option<FilterArg>,
    #[arg(long, global = true)]
    top_k: Option<usize>,
    /// Rank top features by absolute weight.
    #[arg(long, global = true)]
    rank_by_magnitude: bool,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    #[arg(long, global = true)]
    learning_rate: Option<f64>,
    #[arg(long, global = true)]
    batch_size: Option<usize>,
    #[arg(long, global = true)]
    dropout: Option<f64>,
    #[arg(long, global = true)]
    l2: Option<f64>,
    #[arg(long, global = true)]
    d_emb: Option<usize>,
    #[arg(long, global = true)]
    n_filters: Option<usize>,
    #[arg(long, global = true)]
    window: Option<usize>,
    #[arg(long, global = true)]
    d_hidden: Option<usize>,
    #[arg(long, global = true)]
    max_seq_len: Option<usize>,
}

impl Options {
    fn overrides(self) -> socvar::Result<ConfigOverrides> {
        Ok(ConfigOverrides {
            reviews: self.reviews,
            businesses: self.businesses,
            conllu: self.conllu,
            dale_chall_list: self.dale_chall_list,
            workdir: self.workdir,
            seed: self.seed,
            min_reviews: self.min_reviews,
            train_fraction: self.train_fraction,
            language_filter: self.language_filter.map(|f| match f {
                FilterArg::Detect => LanguageFilter::Detect,
                FilterArg::TrustField => LanguageFilter::TrustField,
                FilterArg::Off => LanguageFilter::Off,
            }),
            representations: self
                .representations
                .as_deref()
                .map(parse_list::<Representation>)
                .transpose()?,
            models: self.models.as_deref().map(parse_list::<ModelKind>).transpose()?,
            runs: self.runs,
            top_k: self.top_k,
            ranking: self.rank_by_magnitude.then_some(Ranking::Magnitude),
            word_ngrams: self.word_ngrams.as_deref().map(parse_orders).transpose()?,
            char_ngrams: self.char_ngrams.as_deref().map(parse_orders).transpose()?,
            freq_buckets: self.freq_buckets,
            min_df: self.min_df,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            dropout: self.dropout,
            l2: self.l2,
            d_emb: self.d_emb,
            n_filters: self.n_filters,
            window: self.window,
            d_hidden: self.d_hidden,
            max_seq_len: self.max_seq_len,
        })
    }
}

fn run(cli: Cli) -> socvar::Result<()> {
    let file = cli.opts.config.clone();
    let config = PipelineConfig::load(file.as_deref(), cli.opts.overrides()?)?;
    let stage = match cli.command {
        Command::Run => return run_pipeline(&config),
        Command::Ingest => Stage::Ingest,
        Command::Label => Stage::Label,
        Command::Readability => Stage::Readability,
        Command::Featurize => Stage::Featurize,
        Command::Train => Stage::Train,
        Command::Evaluate => Stage::Evaluate,
        Command::Report => Stage::Report,
    };
    run_stage(&config, stage)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
