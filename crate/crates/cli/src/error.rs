use serde_json::json;

/// Exit code of a run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NEEDS_UNITS: i32 = 3;

/// Failure of a CLI run, reported as JSON on stderr.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    CorruptCheckpoint(String),
    /// `D` below the proven range without an explicit opt-in.
    DTooSmall(String),
    Engine(unilift::Error),
}

impl From<unilift::Error> for CliError {
    fn from(e: unilift::Error) -> Self {
        CliError::Engine(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(unilift::Error::NeedsUnits { .. }) => EXIT_NEEDS_UNITS,
            _ => EXIT_INPUT,
        }
    }

    pub fn kind(&self) -> &'static str {
        use unilift::Error as E;
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Io(_) => "Io",
            CliError::CorruptCheckpoint(_) => "CorruptCheckpoint",
            CliError::DTooSmall(_) => "DTooSmall",
            CliError::Engine(e) => match e {
                E::NotFundamental(_) => "NotFundamental",
                E::NotIntegral => "NotIntegral",
                E::NotTotallyPositive => "NotTotallyPositive",
                E::NoSquareClass => "NoSquareClass",
                E::DegenerateSquare => "DegenerateSquare",
                E::PreconditionFailed(_) => "PreconditionFailed",
                E::UnitTooLarge => "UnitTooLarge",
                E::NotAUnit(_) => "NotAUnit",
                E::RankDeficient => "RankDeficient",
                E::ExponentRecoveryFailed(_) => "ExponentRecoveryFailed",
                E::NotCoprime(..) => "NotCoprime",
                E::NotSquarefree(_) => "NotSquarefree",
                E::ESpecialFive => "ESpecialFive",
                E::DivisibleBy5(_) => "DivisibleBy5",
                E::ClassNumberNotOne(_) => "ClassNumberNotOne",
                E::NeedsUnits { .. } => "NeedsUnits",
                E::Data(_) => "Data",
            },
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::CorruptCheckpoint(m) | CliError::DTooSmall(m) => {
                m.clone()
            }
            CliError::Engine(e) => e.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        json!({"error": {"kind": self.kind(), "message": self.message()}}).to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn io_err(path: &std::path::Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}
