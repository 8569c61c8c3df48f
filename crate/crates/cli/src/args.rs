use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Congruence model pipeline: synthetic data, training, evaluation,
/// activity-range recommendations and validation.
#[derive(Debug, Parser)]
#[command(name = "congrec", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic cohort (participants, EMA reports, taxonomy, correlation matrix).
    Simulate(SimulateArgs),
    /// Train a model artifact on one feature set.
    Train(TrainArgs),
    /// Leave-one-out evaluation of the feature sets.
    Evaluate(EvaluateArgs),
    /// Per-user whitelist/blacklist activity ranges.
    Recommend(RecommendArgs),
    /// Check how well users' actual activity falls inside their ranges.
    Validate(ValidateArgs),
    /// Serve the HTTP API for a trained model.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration, or a manifest written by an earlier run. Flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for every random choice (default 42).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default 1). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SvmArgs {
    /// SVM box constraint C (default 1.0).
    #[arg(long)]
    pub regularization: Option<f64>,
    /// Maximum solver passes (default 10000).
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Solver stopping tolerance (default 1e-6).
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Median personality anchor (default cohort_median).
    #[arg(long, value_parser = ["cohort_median", "scale_midpoint"])]
    pub median_anchor: Option<String>,
}

#[derive(Debug, Args)]
pub struct RecommenderArgs {
    /// Number of varied activities (default 8).
    #[arg(long)]
    pub m: Option<usize>,
    /// Joint share of the fixed activities (default 0.1).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Grid step (default 0.1); (1 - lambda) / step must be an integer.
    #[arg(long)]
    pub step: Option<f64>,
    /// Minimum standard deviation for a varied activity (default 0.1); with --m the top m are kept.
    #[arg(long)]
    pub variance_threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Data directory with participants.csv and ema.csv; taxonomy.json and correlation.csv are optional.
    #[arg(long)]
    pub data: PathBuf,
    /// Policy for EMA items missing from the taxonomy (default lenient: skip and warn).
    #[arg(long, value_parser = ["strict", "lenient"])]
    pub unknown_items: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Cohort size (default 150).
    #[arg(long)]
    pub users: Option<usize>,
    /// Days of EMA prompts (default 21).
    #[arg(long)]
    pub days: Option<u32>,
    /// Prompts per day (default 5).
    #[arg(long)]
    pub prompts_per_day: Option<u32>,
    /// Strength of the planted congruence effect; 0 plants none (default 4.0).
    #[arg(long)]
    pub effect_strength: Option<f64>,
    /// Latent noise standard deviation (default 0.3).
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Statistic of the congruence gap that drives wellbeing (default signed_sum).
    #[arg(long, value_parser = ["signed_sum", "norm"])]
    pub statistic: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Output directory for model.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Feature set (default congruence).
    #[arg(long, value_parser = ["personality", "activity", "both", "congruence"])]
    pub features: Option<String>,
    #[command(flatten)]
    pub svm: SvmArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Output directory for evaluation.json and evaluation.txt.
    #[arg(long)]
    pub out: PathBuf,
    /// Feature set, or all four (default all).
    #[arg(long, value_parser = ["personality", "activity", "both", "congruence", "all"])]
    pub features: Option<String>,
    /// Classifier (default svm).
    #[arg(long, value_parser = ["svm", "nb"])]
    pub classifier: Option<String>,
    #[command(flatten)]
    pub svm: SvmArgs,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Model artifact from `train` (congruence features).
    #[arg(long)]
    pub model: PathBuf,
    /// Data directory holding the users, taxonomy and correlation matrix.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Policy for EMA items missing from the taxonomy (default lenient).
    #[arg(long, value_parser = ["strict", "lenient"])]
    pub unknown_items: Option<String>,
    /// User id to recommend for; repeatable. Without --user or --personality every user is covered.
    #[arg(long = "user")]
    pub users: Vec<String>,
    /// Ad hoc personality as five comma-separated scores (E,A,C,N,O).
    #[arg(long, value_delimiter = ',')]
    pub personality: Option<Vec<f64>>,
    /// Output directory for recommendations.json and recommendations.txt.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub recommender: RecommenderArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Model artifact from `train` (congruence features).
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Output directory for validation.json and validation.txt.
    #[arg(long)]
    pub out: PathBuf,
    /// Majority threshold (default ceil(5m/8)).
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub recommender: RecommenderArgs,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Model artifact to serve.
    #[arg(long, env = "CONGREC_MODEL_PATH")]
    pub model: PathBuf,
    /// Directory with taxonomy.json and correlation.csv (built-ins when absent).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Listen address.
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Listen port.
    #[arg(long, default_value_t = congrec_service::DEFAULT_PORT)]
    pub port: u16,
    /// Largest grid one recommendation may evaluate (default 1000000).
    #[arg(long)]
    pub grid_cap: Option<u128>,
    /// Allowed CORS origin; repeatable, `*` for any.
    #[arg(long = "cors-origin")]
    pub cors_origins: Vec<String>,
    #[command(flatten)]
    pub recommender: RecommenderArgs,
}
