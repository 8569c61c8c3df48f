/// A failure with a fixed machine-readable category.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub category: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(category: &'static str, message: impl Into<String>) -> Self {
        CliError {
            category,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::new(USAGE, message)
    }
}

pub const USAGE: &str = "usage";

/// Category of the first recognised error in the chain.
pub fn category_of(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return e.category;
        }
        if let Some(e) = cause.downcast_ref::<congrec::Error>() {
            return e.category();
        }
        if cause.is::<std::io::Error>() {
            return "io_error";
        }
        if cause.is::<serde_json::Error>() {
            return "json_error";
        }
    }
    "internal"
}
