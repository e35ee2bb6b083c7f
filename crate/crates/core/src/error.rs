use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coincident particles: zero displacement between interacting pair")]
    CoincidentParticles,

    #[error("operation requires at least one particle")]
    EmptyParticleSet,

    #[error("cannot rescale zero velocities towards target temperature {target}")]
    ZeroTemperature { target: f64 },

    #[error("particle {index} left the domain by more than one domain length (position {position:?})")]
    BlowUp { index: usize, position: [f64; 3] },

    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("cannot parse configuration string `{0}`")]
    ParseConfiguration(String),

    #[error("tuning phase has no candidate configurations")]
    NoCandidates,

    #[error("every trial in the tuning phase failed; last failure: {0}")]
    TrialsFailed(String),

    #[error("every configuration in the search space is blacklisted")]
    AllBlacklisted,

    #[error("cannot predict cost without any historical measurement")]
    NoHistory,

    #[error("rule file line {line}: {message}")]
    RuleParse { line: usize, message: String },

    #[error("no input value supplied for fuzzy variable `{0}`")]
    MissingVariable(String),

    #[error("gini impurity of an empty label set is undefined")]
    EmptyLabels,

    #[error("feature vector has length {got}, expected {expected}")]
    FeatureLength { expected: usize, got: usize },

    #[error("invalid model file at `{path}`: {message}")]
    Model { path: String, message: String },

    #[error("model format version {found} is not supported (expected {expected})")]
    ModelVersion { found: u64, expected: u64 },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("generator would create {count} particles, above the cap of {cap}")]
    ParticleCap { count: usize, cap: usize },

    #[error("configuration {config} exceeded the time budget of {seconds} s")]
    Timeout { config: String, seconds: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Yaml(#[from] serde_yaml::Error),
}
