use thiserror::Error;

/// Errors raised across the solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilamentError {
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("curve self-intersects: samples {0} and {1} are closer than twice the spacing")]
    SelfIntersecting(usize, usize),
    #[error("curve is not closed")]
    NotClosed,
    #[error("tube radius {eps} too large for minimum curvature radius {min_radius}")]
    TubeSelfOverlap { eps: f64, min_radius: f64 },
    #[error("point at distance {distance} outside tube neighbourhood of radius {radius}")]
    OutsideTubeNeighborhood { distance: f64, radius: f64 },
    #[error("evaluation point at distance {0} from a source node")]
    SingularEvaluation(f64),
    #[error("invalid radius {0}")]
    InvalidRadius(f64),
    #[error("point is not a panel centroid of the mesh")]
    NotOnSurface,
    #[error("incompatible Neumann data: net flux {flux} exceeds {tol} x total")]
    CompatibilityViolation { flux: f64, tol: f64 },
    #[error("linear solve failed: {0}")]
    SolverFailure(String),
    #[error("vorticity support at distance {distance} is closer than the floor {floor}")]
    SupportTooClose { distance: f64, floor: f64 },
    #[error("invalid time step {0}")]
    InvalidTimestep(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o failure: {0}")]
    IoFailure(String),
}

impl From<std::io::Error> for FilamentError {
    fn from(e: std::io::Error) -> Self {
        FilamentError::IoFailure(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FilamentError>;
