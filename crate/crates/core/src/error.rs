use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("all activity counts are zero")]
    AllZeroCounts,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid activity distribution: {0}")]
    InvalidDistribution(String),
    #[error("reported personality outside [10, 50]: {0}")]
    InvalidReportedPersonality(String),
    #[error("invalid correlation matrix: {0}")]
    InvalidCorrelation(String),
    #[error("empty cohort")]
    EmptyCohort,
    #[error("degenerate median split: {0}")]
    DegenerateSplit(String),
    #[error("training set contains a single class")]
    SingleClassTrainingSet,
    #[error("non-finite feature at row {row}, column {column}")]
    NonFiniteFeature { row: usize, column: usize },
    #[error("scores cover a single class")]
    SingleClassInput,
    #[error("m = {m} exceeds the taxonomy size {n}")]
    MTooLarge { m: usize, n: usize },
    #[error("(1 - lambda) / step = {0} is not an integer")]
    NonIntegralGrid(f64),
    #[error("empty grid")]
    EmptyGrid,
    #[error("no grid points carry the requested label")]
    EmptyRanges,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("model was trained on {0} features, expected congruence")]
    WrongFeatureKind(String),
    #[error("{file}:{line}:{column}: {message}")]
    Parse {
        file: String,
        line: u64,
        column: u64,
        message: String,
    },
    #[error("schema mismatch in {file}: {message}")]
    SchemaMismatch { file: String, message: String },
    #[error("{file}, row {row}, field `{field}`: value {value} out of range")]
    RangeViolation {
        file: String,
        row: u64,
        field: String,
        value: String,
    },
    #[error("unknown activity item {0:?}")]
    UnknownActivityItem(String),
    #[error("unknown user {0:?}")]
    UnknownUser(String),
    #[error("user {0:?} has no activity reports")]
    NoActivityReports(String),
    #[error("unsupported model format version {0}")]
    UnsupportedFormat(u32),
    #[error("artifact mismatch: {0}")]
    ArtifactMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable category, used by the CLI and the HTTP service.
    pub fn category(&self) -> &'static str {
        match self {
            Error::AllZeroCounts => "all_zero_counts",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::InvalidDistribution(_) => "invalid_distribution",
            Error::InvalidReportedPersonality(_) => "invalid_reported_personality",
            Error::InvalidCorrelation(_) => "invalid_correlation",
            Error::EmptyCohort => "empty_cohort",
            Error::DegenerateSplit(_) => "degenerate_split",
            Error::SingleClassTrainingSet => "single_class_training_set",
            Error::NonFiniteFeature { .. } => "non_finite_feature",
            Error::SingleClassInput => "single_class_input",
            Error::MTooLarge { .. } => "m_too_large",
            Error::NonIntegralGrid(_) => "non_integral_grid",
            Error::EmptyGrid => "empty_grid",
            Error::EmptyRanges => "empty_ranges",
            Error::InvalidConfig(_) => "invalid_config",
            Error::WrongFeatureKind(_) => "wrong_feature_kind",
            Error::Parse { .. } => "parse_error",
            Error::SchemaMismatch { .. } => "schema_mismatch",
            Error::RangeViolation { .. } => "range_violation",
            Error::UnknownActivityItem(_) => "unknown_activity_item",
            Error::UnknownUser(_) => "unknown_user",
            Error::NoActivityReports(_) => "no_activity_reports",
            Error::UnsupportedFormat(_) => "unsupported_format",
            Error::ArtifactMismatch(_) => "artifact_mismatch",
            Error::Io(_) => "io_error",
            Error::Json(_) => "json_error",
        }
    }
}
