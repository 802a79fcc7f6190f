use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::Serialize;
use symcohort_core::{Error as CoreError, Violation};

/// Violations included in a 400 response body.
pub const MAX_REPORTED_VIOLATIONS: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),
    #[error("unknown symptom `{0}`")]
    UnknownSymptom(String),
    #[error("unknown timepoint `{0}`")]
    UnknownTimepoint(String),
    #[error("missing query parameter `{0}`")]
    MissingParameter(String),
    #[error("invalid value `{value}` for `{name}`")]
    BadParameter { name: String, value: String },
    #[error("malformed request body: {0}")]
    BadBody(String),
    #[error("request body exceeds {0} bytes")]
    TooLarge(usize),
    #[error("storage failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::Core(e) => match e {
                CoreError::Invalid(_) => StatusCode::BAD_REQUEST,
                CoreError::UnknownSymptom(_) | CoreError::UnknownPatient(_) => StatusCode::NOT_FOUND,
                CoreError::AlreadyImputed | CoreError::NotImputed | CoreError::ImputedInputRejected => {
                    StatusCode::INTERNAL_SERVER_ERROR
                }
                _ => StatusCode::UNPROCESSABLE_ENTITY,
            },
            ApiError::UnknownDataset(_) | ApiError::UnknownSymptom(_) => StatusCode::NOT_FOUND,
            ApiError::UnknownTimepoint(_) | ApiError::MissingParameter(_) | ApiError::BadParameter { .. } => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            ApiError::BadBody(_) => StatusCode::BAD_REQUEST,
            ApiError::TooLarge(_) => StatusCode::PAYLOAD_TOO_LARGE,
            ApiError::Io(_) | ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ApiError::Core(e) => match e {
                CoreError::Invalid(v) => match v.first().map(|v| v.kind) {
                    Some(kind) => violation_code(kind),
                    None => "Invalid",
                },
                CoreError::AlreadyImputed => "AlreadyImputed",
                CoreError::NotImputed => "NotImputed",
                CoreError::ImputedInputRejected => "ImputedInputRejected",
                CoreError::EmptyTransactionSet => "EmptyTransactionSet",
                CoreError::ZeroMarginalSupport => "ZeroMarginalSupport",
                CoreError::OverlappingRule => "OverlappingRule",
                CoreError::EmptySymptomSubset => "EmptySymptomSubset",
                CoreError::NoEligiblePatients(_) => "NoEligiblePatients",
                CoreError::TooFewPatients { .. } => "TooFewPatients",
                CoreError::TooFewReporters(_) => "TooFewReporters",
                CoreError::NoReporters => "NoReporters",
                CoreError::DeltaOutOfRange(_) => "DeltaOutOfRange",
                CoreError::NonAdjacentTimepoints(..) => "NonAdjacentTimepoints",
                CoreError::UnknownSymptom(_) => "UnknownSymptom",
                CoreError::UnknownPatient(_) => "UnknownPatient",
                CoreError::EmptyRuleList => "EmptyRuleList",
                CoreError::InvalidParameter(_) => "InvalidParameter",
            },
            ApiError::UnknownDataset(_) => "UnknownDataset",
            ApiError::UnknownSymptom(_) => "UnknownSymptom",
            ApiError::UnknownTimepoint(_) => "UnknownTimepointLabel",
            ApiError::MissingParameter(_) => "MissingParameter",
            ApiError::BadParameter { .. } => "InvalidParameter",
            ApiError::BadBody(_) => "MalformedBody",
            ApiError::TooLarge(_) => "PayloadTooLarge",
            ApiError::Io(_) => "StorageFailure",
            ApiError::Internal(_) => "Internal",
        }
    }

    /// True for errors caused by the caller's input rather than the service.
    pub fn is_validation(&self) -> bool {
        self.status().is_client_error()
    }

    pub fn body(&self) -> ErrorBody<'_> {
        let violations = match self {
            ApiError::Core(CoreError::Invalid(v)) => Some(ViolationReport {
                total: v.len(),
                items: &v[..v.len().min(MAX_REPORTED_VIOLATIONS)],
            }),
            _ => None,
        };
        ErrorBody {
            error: ErrorDetail {
                code: self.code(),
                message: self.to_string(),
                violations,
            },
        }
    }
}

fn violation_code(kind: symcohort_core::ViolationKind) -> &'static str {
    use symcohort_core::ViolationKind::*;
    match kind {
        MalformedCsv => "MalformedCsv",
        UnknownSymptom => "UnknownSymptom",
        RatingOutOfRange => "RatingOutOfRange",
        UnknownTimepointLabel => "UnknownTimepointLabel",
        DuplicateCell => "DuplicateCell",
        DuplicatePatient => "DuplicatePatient",
        UnknownPatient => "UnknownPatient",
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorBody<'a> {
    pub error: ErrorDetail<'a>,
}

#[derive(Debug, Serialize)]
pub struct ErrorDetail<'a> {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violations: Option<ViolationReport<'a>>,
}

#[derive(Debug, Serialize)]
pub struct ViolationReport<'a> {
    pub total: usize,
    pub items: &'a [Violation],
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status().is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (self.status(), axum::Json(self.body())).into_response()
    }
}
