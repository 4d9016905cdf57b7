use crate::linalg::SolveReport;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid mesh parameter: {0}")]
    MeshParameter(String),
    #[error("degenerate cell {cell} (measure {measure:e})")]
    DegenerateCell { cell: usize, measure: f64 },
    #[error("point ({x}, {y}) lies outside the mesh")]
    PointOutside { x: f64, y: f64 },
    #[error("mesh has no cells inside the correction subdomain")]
    EmptySubdomain,
    #[error("subdomain correction is not defined on one-dimensional meshes")]
    SubdomainIn1d,
    #[error("no pressure value given for Dirichlet boundary {0}")]
    MissingBoundary(u8),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("linear solve did not converge: {0}")]
    Solver(SolveReport),
    #[error("eigenvalue computation: {0}")]
    Eigen(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
