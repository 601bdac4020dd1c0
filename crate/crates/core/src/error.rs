use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown firm id: {0}")]
    UnknownFirm(String),
    #[error("duplicate firm id: {0}")]
    DuplicateFirm(String),
    #[error("self-supply rejected: {0}")]
    SelfSupply(String),
    #[error("edge-product mismatch: {supplier} does not make {product}")]
    EdgeProductMismatch { supplier: String, product: String },
    #[error("unknown product: {0}")]
    UnknownProduct(String),
    #[error("duplicate product id: {0}")]
    DuplicateProduct(String),
    #[error("empty scope")]
    EmptyScope,
    #[error("degenerate network: {0}")]
    DegenerateNetwork(String),
    #[error("no paths: largest component has fewer than 2 firms")]
    NoPaths,
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("partition not total: firm {0} has no community")]
    PartitionNotTotal(String),
    #[error("scope overlap: {0} is both risky and acting")]
    ScopeOverlap(String),
    #[error("duplicate cluster: {0}")]
    DuplicateCluster(String),
    #[error("unknown cluster: {0}")]
    UnknownCluster(String),
    #[error("unknown country {name:?} ({context})")]
    UnknownCountry { name: String, context: String },
    #[error("invalid scope: {0}")]
    InvalidScope(String),
    #[error("cannot satisfy generator config: {0}")]
    CannotSatisfy(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("unknown target: {0}")]
    UnknownTarget(String),
    #[error("missing required column {column:?} in {table}")]
    MissingColumn { table: String, column: String },
    #[error("scenario {scenario}: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("config parse error: {0}")]
    TomlDe(#[from] toml::de::Error),
    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}
