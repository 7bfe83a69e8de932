use thiserror::Error;

/// Every failure the library can report. Variants carry a human-readable detail.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsError {
    #[error("singular: {0}")]
    Singular(String),
    #[error("degenerate spectral parameter: {0}")]
    DegenerateSpectral(String),
    #[error("degenerate immersion: {0}")]
    DegenerateImmersion(String),
    #[error("dual form not closed: {0}")]
    NotClosed(String),
    #[error("round sphere has no parallel CMC surface: {0}")]
    RoundSphere(String),
    #[error("invalid profile curve: {0}")]
    ProfileInvalid(String),
    #[error("transport step too coarse: {0}")]
    StepTooCoarse(String),
    #[error("monodromy eigen-decomposition failed: {0}")]
    DefectiveMonodromy(String),
    #[error("solution blew up: {0}")]
    Blowup(String),
    #[error("section vanishes everywhere: {0}")]
    SingularEverywhere(String),
    #[error("sections not independent: {0}")]
    NotIndependent(String),
    #[error("splitting degenerate: {0}")]
    SplittingDegenerate(String),
    #[error("sections dependent: {0}")]
    Dependent(String),
    #[error("spectral family not smooth: {0}")]
    NotSmooth(String),
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("i/o error: {0}")]
    IoError(String),
}

impl QsError {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            QsError::ConfigInvalid(_) | QsError::ProfileInvalid(_) => 2,
            QsError::IoError(_) => 1,
            _ => 3,
        }
    }

    /// Stable short name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            QsError::Singular(_) => "Singular",
            QsError::DegenerateSpectral(_) => "DegenerateSpectral",
            QsError::DegenerateImmersion(_) => "DegenerateImmersion",
            QsError::NotClosed(_) => "NotClosed",
            QsError::RoundSphere(_) => "RoundSphere",
            QsError::ProfileInvalid(_) => "ProfileInvalid",
            QsError::StepTooCoarse(_) => "StepTooCoarse",
            QsError::DefectiveMonodromy(_) => "DefectiveMonodromy",
            QsError::Blowup(_) => "Blowup",
            QsError::SingularEverywhere(_) => "SingularEverywhere",
            QsError::NotIndependent(_) => "NotIndependent",
            QsError::SplittingDegenerate(_) => "SplittingDegenerate",
            QsError::Dependent(_) => "Dependent",
            QsError::NotSmooth(_) => "NotSmooth",
            QsError::DegenerateDenominator(_) => "DegenerateDenominator",
            QsError::ConfigInvalid(_) => "ConfigInvalid",
            QsError::IoError(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for QsError {
    fn from(e: std::io::Error) -> Self {
        QsError::IoError(e.to_string())
    }
}

pub type QsResult<T> = Result<T, QsError>;
