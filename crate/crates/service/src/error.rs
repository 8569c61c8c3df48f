use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::Serialize;

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
}

#[derive(Debug, Serialize)]
struct ErrorDetail<'a> {
    category: &'a str,
    message: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<&'a str>,
}

/// JSON error response with a machine-readable category.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub category: String,
    pub message: String,
    pub field: Option<String>,
}

impl ApiError {
    pub fn new(status: StatusCode, category: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError {
            status,
            category: category.into(),
            message: message.into(),
            field: None,
        }
    }

    pub fn field(status: StatusCode, field: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError {
            status,
            category: "invalid_field".into(),
            message: message.into(),
            field: Some(field.into()),
        }
    }

    pub fn not_ready() -> Self {
        ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "not_ready", "model is still loading")
    }
}

impl From<congrec::Error> for ApiError {
    fn from(e: congrec::Error) -> Self {
        use congrec::Error as E;
        let status = match &e {
            E::InvalidDistribution(_) | E::AllZeroCounts => StatusCode::UNPROCESSABLE_ENTITY,
            E::NonIntegralGrid(_) => StatusCode::CONFLICT,
            E::WrongFeatureKind(_) | E::ArtifactMismatch(_) => StatusCode::CONFLICT,
            E::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.category(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: ErrorDetail {
                category: &self.category,
                message: &self.message,
                field: self.field.as_deref(),
            },
        };
        let bytes = serde_json::to_vec(&body).expect("error body serializes");
        (
            self.status,
            [(axum::http::header::CONTENT_TYPE, "application/json")],
            bytes,
        )
            .into_response()
    }
}
