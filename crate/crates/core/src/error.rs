use thiserror::Error;

/// Errors raised by the dimension pipeline.
///
/// Variants are grouped by the exit-code class they map to in the CLI:
/// configuration problems (1), construction or certification negatives (2)
/// and numeric or oracle failures (3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {what} (measured Re = {measured_re}, threshold {threshold})")]
    Domain {
        what: &'static str,
        measured_re: f64,
        threshold: f64,
    },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("radius search failed: {0}")]
    SearchFailure(String),

    #[error("family contract violated: {0}")]
    Contract(String),

    #[error("construction violated: {0}")]
    Construction(String),

    #[error("containment margin cannot be certified: {0}")]
    Margin(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invariance failure: {0}")]
    Invariance(String),

    #[error("oracle disagreement: {0}")]
    Oracle(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Geometry(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 1,
            Error::SearchFailure(_) | Error::Construction(_) | Error::Margin(_) | Error::Budget(_) => 2,
            Error::Domain { .. }
            | Error::Contract(_)
            | Error::Numeric(_)
            | Error::Invariance(_)
            | Error::Oracle(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
