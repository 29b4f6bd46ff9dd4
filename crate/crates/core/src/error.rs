use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variants carry enough context to be rendered to a user; [`Error::code`]
/// gives a stable machine-readable identifier used in batch reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,
    #[error("non-finite value at index {index}")]
    NonFiniteInput { index: usize },
    #[error("crop length {crop_len} exceeds spectrum length {len}")]
    CropOutOfRange { crop_len: usize, len: usize },
    #[error("need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("mean magnitude {mean:e} is too small for a coefficient of variation")]
    DegenerateStatistics { mean: f64 },
    #[error("series is constant (range {range:e})")]
    ConstantSeries { range: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("distribution has non-positive support at index {index}")]
    ZeroSupport { index: usize },
    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),
    #[error("index {index} is not a strict local maximum")]
    NotAPeak { index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("series of length {len} is too short: need at least {needed} samples")]
    SeriesTooShort { len: usize, needed: usize },
    #[error("training diverged at epoch {epoch}")]
    DivergedTraining { epoch: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("scale grid is empty")]
    EmptyGrid,
    #[error("window ending at {t} with width {w} does not fit in {len} samples")]
    WindowOutOfRange { t: usize, w: usize, len: usize },
    #[error("curve of length {len} is shorter than scale {scale}")]
    CurveShorterThanScale { len: usize, scale: usize },
    #[error("need at least 2 scales with valid KL values, got {got}")]
    InsufficientScales { got: usize },
    #[error("no scale fits {count} peak prominences")]
    NoUsableScales { count: usize },
    #[error("input series is constant")]
    ConstantInput,

    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed CSV {path}: {reason}")]
    MalformedCsv { path: PathBuf, reason: String },
    #[error("table {path} has no data")]
    EmptyTable { path: PathBuf },
    #[error("unknown label {label:?} (expected HC or AD)")]
    UnknownLabel { label: String },
    #[error("duplicate subject {0}")]
    DuplicateSubject(String),
    #[error("referenced file does not exist: {0}")]
    MissingFile(PathBuf),
    #[error("bad NIfTI magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("bad NIfTI header: {0}")]
    BadHeader(String),
    #[error("unsupported NIfTI datatype code {0}")]
    UnsupportedDatatype(i16),
    #[error("truncated NIfTI data: expected {expected} bytes, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("mask {name} has dims {mask:?}, volume has {volume:?}")]
    DimMismatch { name: String, mask: [usize; 3], volume: [usize; 3] },
    #[error("mask {0} selects no voxels")]
    EmptyMask(String),
    #[error("ROI catalog pairing is not symmetric for {0}")]
    AsymmetricPairing(String),

    #[error("subjects cover different ROI sets: {0}")]
    InconsistentRoiSets(String),
    #[error("missing DS value for subject {subject}, ROI {roi}")]
    MissingDs { subject: String, roi: String },
    #[error("missing value: {0}")]
    MissingValue(String),
    #[error("training data needs at least 2 samples of each class")]
    SingleClassTraining,
    #[error("training loss became non-finite")]
    NonFiniteLoss,
    #[error("nothing to evaluate")]
    EmptyEvaluation,
    #[error("evaluation data must contain both classes")]
    SingleClassEvaluation,
    #[error("class {class} has {count} members, fewer than {k} folds")]
    TooFewPerClass { class: u8, count: usize, k: usize },
    #[error("duplicate feature name {0}")]
    DuplicateFeature(String),

    #[error("covariance is degenerate")]
    DegenerateCovariance,
    #[error("perplexity {perplexity} needs at least {needed} rows, got {rows}")]
    PerplexityTooLarge { perplexity: f64, needed: usize, rows: usize },
    #[error("expected 2 columns, got {0}")]
    WrongColumnCount(usize),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Stable identifier, e.g. `"ConstantInput"`.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            EmptyInput => "EmptyInput",
            NonFiniteInput { .. } => "NonFiniteInput",
            CropOutOfRange { .. } => "CropOutOfRange",
            InsufficientData { .. } => "InsufficientData",
            DegenerateStatistics { .. } => "DegenerateStatistics",
            ConstantSeries { .. } => "ConstantSeries",
            LengthMismatch { .. } => "LengthMismatch",
            ZeroSupport { .. } => "ZeroSupport",
            InvalidDistribution(_) => "InvalidDistribution",
            NotAPeak { .. } => "NotAPeak",
            InvalidConfig(_) => "InvalidConfig",
            SeriesTooShort { .. } => "SeriesTooShort",
            DivergedTraining { .. } => "DivergedTraining",
            DimensionMismatch { .. } => "DimensionMismatch",
            EmptyGrid => "EmptyGrid",
            WindowOutOfRange { .. } => "WindowOutOfRange",
            CurveShorterThanScale { .. } => "CurveShorterThanScale",
            InsufficientScales { .. } => "InsufficientScales",
            NoUsableScales { .. } => "NoUsableScales",
            ConstantInput => "ConstantInput",
            InvalidParameter(_) => "InvalidParameter",
            MalformedCsv { .. } => "MalformedCsv",
            EmptyTable { .. } => "EmptyTable",
            UnknownLabel { .. } => "UnknownLabel",
            DuplicateSubject(_) => "DuplicateSubject",
            MissingFile(_) => "MissingFile",
            BadMagic(_) => "BadMagic",
            BadHeader(_) => "BadHeader",
            UnsupportedDatatype(_) => "UnsupportedDatatype",
            TruncatedData { .. } => "TruncatedData",
            DimMismatch { .. } => "DimMismatch",
            EmptyMask(_) => "EmptyMask",
            AsymmetricPairing(_) => "AsymmetricPairing",
            InconsistentRoiSets(_) => "InconsistentRoiSets",
            MissingDs { .. } => "MissingDs",
            MissingValue(_) => "MissingValue",
            SingleClassTraining => "SingleClassTraining",
            NonFiniteLoss => "NonFiniteLoss",
            EmptyEvaluation => "EmptyEvaluation",
            SingleClassEvaluation => "SingleClassEvaluation",
            TooFewPerClass { .. } => "TooFewPerClass",
            DuplicateFeature(_) => "DuplicateFeature",
            DegenerateCovariance => "DegenerateCovariance",
            PerplexityTooLarge { .. } => "PerplexityTooLarge",
            WrongColumnCount(_) => "WrongColumnCount",
            Io { .. } => "Io",
        }
    }
}
