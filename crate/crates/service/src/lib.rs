//! HTTP/JSON facade over a trained congruence model.
//!
//! Endpoints:
//!
//! - `POST /v1/classify` scores one personality and activity distribution.
//! - `POST /v1/recommend` simulates whitelist/blacklist activity ranges.
//! - `GET /v1/model` describes the loaded artifact.
//! - `GET /healthz` reports readiness.
//!
//! All state is read-only once installed; until then every endpoint answers 503.

mod error;

use std::net::SocketAddr;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use congrec::data::{builtin_correlation, load_correlation, Category, Taxonomy};
use congrec::model::{ActivityDistribution, CorrelationMatrix, PersonalityVector, Trait, REPORTED_MAX, REPORTED_MIN};
use congrec::recommender::{plan_grid, recommend};
use congrec::{ModelArtifact, RecommenderConfig};
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use error::ApiError;

pub const MODEL_PATH_ENV: &str = "CONGREC_MODEL_PATH";
pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_GRID_CAP: u128 = 1_000_000;
/// Sum tolerance for request distributions.
pub const REQUEST_SIMPLEX_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    /// Defaults for `/v1/recommend` fields the request leaves out.
    pub recommender: RecommenderConfig,
    /// Largest grid a single recommendation may evaluate.
    pub grid_cap: u128,
    /// Threads per recommendation request.
    pub workers: usize,
    /// Allowed browser origins; `*` allows any.
    pub cors_origins: Vec<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            recommender: RecommenderConfig::default(),
            grid_cap: DEFAULT_GRID_CAP,
            workers: 1,
            cors_origins: Vec::new(),
        }
    }
}

/// A loaded model with the taxonomy and correlation matrix it was trained on.
#[derive(Debug)]
pub struct ServiceState {
    pub artifact: ModelArtifact,
    pub taxonomy: Taxonomy,
    pub correlation: CorrelationMatrix,
    pub config: ServiceConfig,
    model_hash: String,
}

impl ServiceState {
    pub fn new(
        artifact: ModelArtifact,
        taxonomy: Taxonomy,
        correlation: CorrelationMatrix,
        config: ServiceConfig,
    ) -> congrec::Result<Self> {
        artifact.check_inputs(&taxonomy, &correlation)?;
        Ok(ServiceState {
            model_hash: artifact.hash(),
            artifact,
            taxonomy,
            correlation,
            config,
        })
    }

    /// Loads the artifact plus taxonomy and correlation files, falling back
    /// to the built-in ones when a path is not given.
    pub fn load(
        model: &Path,
        taxonomy: Option<&Path>,
        correlation: Option<&Path>,
        config: ServiceConfig,
    ) -> congrec::Result<Self> {
        let artifact = ModelArtifact::load(model)?;
        let taxonomy = match taxonomy {
            Some(p) => Taxonomy::load(p)?,
            None => Taxonomy::builtin(),
        };
        let correlation = match correlation {
            Some(p) => load_correlation(p, &taxonomy)?,
            None => builtin_correlation(&taxonomy)?,
        };
        ServiceState::new(artifact, taxonomy, correlation, config)
    }

    pub fn model_hash(&self) -> &str {
        &self.model_hash
    }
}

/// Shared handle; empty until a model is installed.
#[derive(Clone, Debug, Default)]
pub struct AppState {
    slot: Arc<OnceLock<Arc<ServiceState>>>,
}

impl AppState {
    pub fn empty() -> Self {
        AppState::default()
    }

    pub fn ready(state: ServiceState) -> Self {
        let app = AppState::empty();
        app.install(state);
        app
    }

    /// Installs the model. Returns `false` if one was already installed.
    pub fn install(&self, state: ServiceState) -> bool {
        self.slot.set(Arc::new(state)).is_ok()
    }

    pub fn get(&self) -> Result<Arc<ServiceState>, ApiError> {
        self.slot.get().cloned().ok_or_else(ApiError::not_ready)
    }
}

pub fn router(app: AppState, cors_origins: &[String]) -> Router {
    let router = Router::new()
        .route("/healthz", get(healthz))
        .route("/v1/model", get(model_info))
        .route("/v1/classify", post(classify))
        .route("/v1/recommend", post(recommend_ranges))
        .with_state(app);
    if cors_origins.is_empty() {
        return router;
    }
    let origins = if cors_origins.iter().any(|o| o == "*") {
        AllowOrigin::any()
    } else {
        AllowOrigin::list(cors_origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
    };
    router.layer(
        CorsLayer::new()
            .allow_origin(origins)
            .allow_methods([Method::GET, Method::POST])
            .allow_headers([header::CONTENT_TYPE]),
    )
}

/// Binds `addr` and serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, app: AppState, cors_origins: Vec<String>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(app, &cors_origins))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    serde_json::to_vec(value).expect("response serializes")
}

fn json_response<T: Serialize>(value: &T) -> Response {
    (
        StatusCode::OK,
        [(header::CONTENT_TYPE, "application/json")],
        json_bytes(value),
    )
        .into_response()
}

async fn healthz(State(app): State<AppState>) -> Result<Response, ApiError> {
    app.get()?;
    Ok(json_response(&serde_json::json!({ "status": "ok" })))
}

#[derive(Debug, Serialize)]
pub struct ModelInfo<'a> {
    pub format_version: u32,
    pub feature_kind: congrec::FeatureSetKind,
    pub model_hash: &'a str,
    pub taxonomy_hash: &'a str,
    pub correlation_hash: &'a str,
    pub p_median: PersonalityVector,
    pub median_anchor: congrec::MedianAnchor,
    pub swb_threshold: f64,
    pub categories: &'a [Category],
    pub config: ModelInfoConfig<'a>,
}

#[derive(Debug, Serialize)]
pub struct ModelInfoConfig<'a> {
    pub recommender: &'a RecommenderConfig,
    pub grid_cap: u128,
    pub hyperparameters: &'a congrec::SvmParams,
    pub simplex_tolerance: f64,
}

impl ServiceState {
    pub fn info(&self) -> ModelInfo<'_> {
        ModelInfo {
            format_version: self.artifact.format_version,
            feature_kind: self.artifact.feature_kind,
            model_hash: &self.model_hash,
            taxonomy_hash: &self.artifact.taxonomy_hash,
            correlation_hash: &self.artifact.correlation_hash,
            p_median: self.artifact.median,
            median_anchor: self.artifact.median_anchor,
            swb_threshold: self.artifact.swb_threshold,
            categories: &self.taxonomy.categories,
            config: ModelInfoConfig {
                recommender: &self.config.recommender,
                grid_cap: self.config.grid_cap,
                hyperparameters: &self.artifact.hyperparameters,
                simplex_tolerance: REQUEST_SIMPLEX_TOLERANCE,
            },
        }
    }
}

async fn model_info(State(app): State<AppState>) -> Result<Response, ApiError> {
    let state = app.get()?;
    Ok(json_response(&state.info()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyRequest {
    personality: Vec<f64>,
    activity_distribution: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecommendRequest {
    personality: Vec<f64>,
    #[serde(default)]
    activity_distribution: Option<Vec<f64>>,
    #[serde(default)]
    step: Option<f64>,
    #[serde(default)]
    lambda: Option<f64>,
    #[serde(default)]
    m: Option<usize>,
}

fn parse_body<'a, T: Deserialize<'a>>(body: &'a [u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", e.to_string()))
}

fn parse_personality(values: &[f64]) -> Result<PersonalityVector, ApiError> {
    let array: [f64; 5] = values.try_into().map_err(|_| {
        ApiError::field(
            StatusCode::BAD_REQUEST,
            "personality",
            format!("expected 5 trait scores, got {}", values.len()),
        )
    })?;
    for t in Trait::ALL {
        let v = array[t.index()];
        if !(REPORTED_MIN..=REPORTED_MAX).contains(&v) {
            return Err(ApiError::field(
                StatusCode::BAD_REQUEST,
                format!("personality[{}]", t.index()),
                format!("{} = {v} outside [{REPORTED_MIN}, {REPORTED_MAX}]", t.name()),
            ));
        }
    }
    Ok(PersonalityVector(array))
}

fn parse_distribution(values: Vec<f64>, n: usize) -> Result<ActivityDistribution, ApiError> {
    if values.len() != n {
        return Err(ApiError::field(
            StatusCode::BAD_REQUEST,
            "activity_distribution",
            format!("expected {n} proportions, got {}", values.len()),
        ));
    }
    ActivityDistribution::with_tolerance(values, REQUEST_SIMPLEX_TOLERANCE).map_err(|e| ApiError {
        field: Some("activity_distribution".into()),
        ..ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.category(), e.to_string())
    })
}

async fn classify(State(app): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let state = app.get()?;
    let req: ClassifyRequest = parse_body(&body)?;
    let personality = parse_personality(&req.personality)?;
    let dist = parse_distribution(req.activity_distribution, state.taxonomy.len())?;
    let result = state.artifact.classify(&personality, &dist, &state.correlation)?;
    Ok(json_response(&result))
}

async fn recommend_ranges(State(app): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let state = app.get()?;
    let req: RecommendRequest = parse_body(&body)?;
    let personality = parse_personality(&req.personality)?;
    let dist = req
        .activity_distribution
        .map(|v| parse_distribution(v, state.taxonomy.len()))
        .transpose()?;
    let mut config = state.config.recommender;
    if let Some(step) = req.step {
        config.step = step;
    }
    if let Some(lambda) = req.lambda {
        config.lambda = lambda;
    }
    if req.m.is_some() {
        config.m = req.m;
    }

    let (selection, grid) = plan_grid(&state.artifact, &config)?;
    let points = grid.point_count(selection.varied.len());
    if points > state.config.grid_cap {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "grid_too_large",
            format!("grid has {points} points, the limit is {}", state.config.grid_cap),
        ));
    }

    let report = tokio::task::spawn_blocking(move || {
        recommend(
            &state.artifact,
            &state.taxonomy,
            &state.correlation,
            &personality,
            dist.as_ref(),
            &config,
            state.config.workers,
        )
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(json_response(&report))
}
