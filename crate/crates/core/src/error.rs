use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("Gram matrix of sector ({i2}/2, {j2}/2) is singular at position {pos}")]
    SingularGram { i2: i32, j2: i32, pos: usize },
    #[error("eigenvalue cluster near 1 not separated: nearest outside value {gap:.3e} from 1, need > {need:.3e}")]
    ClusterNotSeparated { gap: f64, need: f64 },
    #[error("diagonal of bicomplex: d2 is undefined at n = m = {0}")]
    BicomplexDiagonal(usize),
    #[error("boundary r: q^(2r) = 1/2 exactly for r = {0}; perturb q")]
    BoundaryR(u32),
    #[error("sigma orbit did not close within {0} steps")]
    OrbitNotClosed(usize),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
