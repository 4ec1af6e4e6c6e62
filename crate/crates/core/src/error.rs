use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {coords:?} lies outside the validity region of chart {chart}")]
    OutsideChart { chart: usize, coords: Vec<f64> },
    #[error("model has no chart {0}")]
    UnknownChart(usize),
    #[error("point has {got} coordinates, model dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("jet order {0} unsupported (maximum 4)")]
    OrderUnsupported(usize),
    #[error("jet order {have} insufficient, need {need}")]
    InsufficientJet { have: usize, need: usize },
    #[error("metric is degenerate at the evaluation point")]
    DegenerateMetric,
    #[error("seed vector is numerically zero")]
    ZeroSeed,
    #[error("complex structure is not compatible with the metric (defect {0:e})")]
    IncompatibleStructure(f64),
    #[error("model carries no almost-complex structure")]
    NoComplexStructure,
    #[error("frame is not adapted to J")]
    FrameNotAdapted,
    #[error("vectors are (numerically) parallel")]
    ParallelVectors,
    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),
    #[error("metric is not Einstein: deviation {deviation:e} at {witness:?}")]
    NotEinstein { deviation: f64, witness: Vec<f64> },
    #[error("ascent did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("model is flat; it cannot be normalized")]
    FlatModel,
    #[error("holomorphic sectional curvature is constant on the fibers (complex space form)")]
    ConstantH,
    #[error("model is not normalized: max |sec| = {0}")]
    NotNormalized(f64),
    #[error("H_max vanishes; ratio undefined")]
    DegenerateRatio,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("model is not homogeneous (fiber values spread {0:e})")]
    NotHomogeneousModel(f64),
    #[error("curvature derivatives of order {0} were not computed")]
    MissingDerivative(usize),
    #[error("operation requires real dimension {expected}, model has {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),
    #[error("model metadata mismatch: {0}")]
    MetadataMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
