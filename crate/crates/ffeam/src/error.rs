use thiserror::Error;

/// Errors produced by the imputation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("cannot parse {text:?} as a number at row {row}, column {column}")]
    Parse {
        row: usize,
        column: String,
        text: String,
    },

    #[error("ragged csv: row {row} has {found} fields, expected {expected}")]
    Ragged {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("missing rate {rate} is unsatisfiable for a {rows}x{cols} table under row/column guards")]
    RateUnsatisfiable { rate: f64, rows: usize, cols: usize },

    #[error("all {k} centroids coincide; re-cluster with a smaller k")]
    DegenerateCentroids { k: usize },

    #[error("k-means requires k <= n ({k} > {n})")]
    KmeansTooManyClusters { k: usize, n: usize },

    #[error("knn imputation needs at least {k} complete rows but only {complete} exist; lower k or use another method")]
    TooFewCompleteRows { k: usize, complete: usize },

    #[error("non-finite {what} in tensor {tensor} ({context})")]
    NonFinite {
        what: &'static str,
        tensor: String,
        context: String,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("evaluation mismatch: {0}")]
    Eval(String),
}

pub type Result<T> = std::result::Result<T, Error>;
