use std::fmt;

use serde::Serialize;

use crate::model::MAX_RATING;

/// What went wrong on one line of an ingested CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    MalformedCsv,
    UnknownSymptom,
    RatingOutOfRange,
    UnknownTimepointLabel,
    DuplicateCell,
    DuplicatePatient,
    UnknownPatient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// `patients.csv` or `ratings.csv`.
    pub file: &'static str,
    /// 1-based line number, header is line 1.
    pub line: Option<u64>,
    pub column: Option<&'static str>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} in {}", self.kind, self.file)?;
        if let Some(line) = self.line {
            write!(f, " line {line}")?;
        }
        if let Some(col) = self.column {
            write!(f, " column {col}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dataset failed validation ({} violation(s)); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
    #[error("dataset is already imputed")]
    AlreadyImputed,
    #[error("operation requires an imputed dataset")]
    NotImputed,
    #[error("association rule mining requires raw (un-imputed) data")]
    ImputedInputRejected,
    #[error("transaction set is empty")]
    EmptyTransactionSet,
    #[error("an itemset has zero support, lift is undefined")]
    ZeroMarginalSupport,
    #[error("antecedent and consequent overlap")]
    OverlappingRule,
    #[error("symptom subset is empty")]
    EmptySymptomSubset,
    #[error("no eligible patients at {0}")]
    NoEligiblePatients(String),
    #[error("need at least {needed} patients, got {got}")]
    TooFewPatients { needed: usize, got: usize },
    #[error("need at least 2 reporting patients, got {0}")]
    TooFewReporters(usize),
    #[error("no patient reported at this timepoint")]
    NoReporters,
    #[error("rating difference {0} outside [-{MAX_RATING}, {MAX_RATING}]")]
    DeltaOutOfRange(f64),
    #[error("timepoints {0} and {1} are not adjacent")]
    NonAdjacentTimepoints(usize, usize),
    #[error("unknown symptom `{0}`")]
    UnknownSymptom(String),
    #[error("unknown patient `{0}`")]
    UnknownPatient(String),
    #[error("rule list is empty")]
    EmptyRuleList,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
