use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("avoid set and meet set overlap in vertex {0}")]
    Overlap(u32),

    #[error("size error: {0}")]
    Size(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("family is not {t}-resilient (deleting {witness:?} lowers the matching number)")]
    NotResilient { t: usize, witness: Vec<u32> },

    #[error("part {part} is neither a star nor a non-trivial intersecting family")]
    Classification { part: usize },

    #[error("enumeration exceeded cap of {cap} matchings")]
    Explosion { cap: usize },

    #[error("search exceeded work cap of {cap} steps")]
    Scale { cap: u64 },

    #[error("invalid s-partition: {0}")]
    InvalidPartition(String),

    #[error("solver deadline expired")]
    Deadline,

    #[error("invalid edge list: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
