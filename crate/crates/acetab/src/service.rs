//! JSON-over-HTTP planning service.
//!
//! Sessions live in memory; saved plans go to the [`PlanStore`]. All sizing
//! and placement math is delegated to `acetab_core`, so every response can be
//! reproduced by calling the library directly.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use acetab_core::{
    Calibration, ImplantCatalog, ImplantKey, PatientInfo, Placement, PlanError, PointPx, RejectReason,
    RigidTransform, SegmentPx, Session, SessionError, Side, SizingError, SizingResult,
};
use axum::body::Bytes;
use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::Mutex;

use crate::store::{PlanStore, StoreError};

const MAX_IMAGE_BYTES: usize = 64 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    InvalidMeasurement,
    CalibrationMissing,
    SizeOutOfRange,
    NotFound,
    StateError,
    ParseError,
    IoError,
}

impl ErrorCode {
    fn status(self) -> StatusCode {
        match self {
            ErrorCode::InvalidMeasurement | ErrorCode::ParseError => StatusCode::BAD_REQUEST,
            ErrorCode::CalibrationMissing | ErrorCode::StateError => StatusCode::CONFLICT,
            ErrorCode::SizeOutOfRange => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorCode::NotFound => StatusCode::NOT_FOUND,
            ErrorCode::IoError => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
            detail: None,
        }
    }

    fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(rejection: JsonRejection) -> Self {
        ApiError::new(ErrorCode::ParseError, rejection.body_text())
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let message = e.to_string();
        match e {
            SessionError::CalibrationMissing => ApiError::new(ErrorCode::CalibrationMissing, message),
            SessionError::InvalidMeasurement(_)
            | SessionError::Sizing(SizingError::InvalidMeasurement(_) | SizingError::Geometry(_)) => {
                ApiError::new(ErrorCode::InvalidMeasurement, message)
            }
            SessionError::Sizing(SizingError::NotFound { .. }) => ApiError::new(ErrorCode::NotFound, message),
            SessionError::State(_) => ApiError::new(ErrorCode::StateError, message),
            SessionError::Plan(plan) => plan.into(),
        }
    }
}

impl From<PlanError> for ApiError {
    fn from(e: PlanError) -> Self {
        let message = e.to_string();
        match e {
            PlanError::InvalidField { field, .. } => {
                ApiError::new(ErrorCode::ParseError, message).with_detail(json!({ "field": field }))
            }
            PlanError::Sizing(inner) => SessionError::Sizing(inner).into(),
            PlanError::NoPlacement | PlanError::Consistency(_) => {
                ApiError::new(ErrorCode::StateError, message).with_detail(json!({ "kind": "consistency" }))
            }
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::Consistency(plan) => plan.into(),
            StoreError::NotFound(_) | StoreError::InvalidId(_) => ApiError::new(ErrorCode::NotFound, message),
            StoreError::AlreadyExists(_) => ApiError::new(ErrorCode::StateError, message),
            StoreError::Parse { .. } | StoreError::Io(_) => ApiError::new(ErrorCode::IoError, message),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub struct SessionEntry {
    pub session: Session,
    pub image: Bytes,
    pub content_type: &'static str,
}

pub struct AppState {
    pub catalog: ImplantCatalog,
    pub store: PlanStore,
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionEntry>>>>,
}

impl AppState {
    pub fn new(catalog: ImplantCatalog, store: PlanStore) -> Arc<Self> {
        Arc::new(AppState {
            catalog,
            store,
            sessions: RwLock::new(HashMap::new()),
        })
    }

    pub fn session(&self, id: &str) -> Option<Arc<Mutex<SessionEntry>>> {
        self.sessions.read().unwrap_or_else(|e| e.into_inner()).get(id).cloned()
    }

    fn find(&self, id: &str) -> ApiResult<Arc<Mutex<SessionEntry>>> {
        self.session(id)
            .ok_or_else(|| ApiError::new(ErrorCode::NotFound, format!("session {id:?} not found")))
    }
}

/// Writes to one session are serialized; a write that arrives while another
/// is in flight is refused rather than queued.
async fn write_session<T>(
    state: &AppState,
    id: &str,
    f: impl FnOnce(&mut SessionEntry) -> ApiResult<T>,
) -> ApiResult<T> {
    let entry = state.find(id)?;
    let mut guard = entry
        .try_lock()
        .map_err(|_| ApiError::new(ErrorCode::StateError, "session is busy with another write"))?;
    f(&mut guard)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBody {
    pub mm_per_px: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBody {
    pub ax: f64,
    pub ay: f64,
    pub bx: f64,
    pub by: f64,
    /// Which hip's template to place; left when omitted.
    #[serde(default)]
    pub side: Option<Side>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementBody {
    pub implant: ImplantKey,
    pub pose: RigidTransform,
    pub anchor: PointPx,
    /// Template outline in image pixels.
    pub outline: Vec<PointPx>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingBody {
    /// Rounded to 0.01 mm for display.
    pub measured_mm: f64,
    pub measured_mm_exact: f64,
    pub size_mm: Option<u32>,
    pub rejected_reason: Option<RejectReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementResponse {
    #[serde(flatten)]
    pub sizing: SizingBody,
    pub placement: PlacementBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaBody {
    #[serde(default)]
    pub rotation_deg: f64,
    #[serde(default)]
    pub pivot: PointPx,
    #[serde(default)]
    pub dx: f64,
    #[serde(default)]
    pub dy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRequest {
    pub delta: DeltaBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub image_content_type: String,
    pub calibration: Option<CalibrationBody>,
    pub measurement: Option<SegmentPx>,
    pub sizing: Option<SizingBody>,
    pub placement: Option<PlacementBody>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSaved {
    pub plan_id: String,
}

pub fn round_for_display(mm: f64) -> f64 {
    (mm * 100.0).round() / 100.0
}

pub fn sizing_body(result: &SizingResult) -> SizingBody {
    SizingBody {
        measured_mm: round_for_display(result.measured_mm),
        measured_mm_exact: result.measured_mm,
        size_mm: result.snapped_size_mm(),
        rejected_reason: result.rejected_reason(),
    }
}

pub fn placement_body(placement: &Placement, catalog: &ImplantCatalog, calibration: &Calibration) -> ApiResult<PlacementBody> {
    let spec = catalog
        .lookup(placement.implant.side, placement.implant.size_mm)
        .map_err(|e| ApiError::new(ErrorCode::NotFound, e.to_string()))?;
    Ok(PlacementBody {
        implant: placement.implant.clone(),
        pose: placement.pose,
        anchor: placement.anchor,
        outline: placement.outline_px(&spec.outline, calibration),
    })
}

fn current_placement(session: &Session, catalog: &ImplantCatalog) -> ApiResult<Option<PlacementBody>> {
    match (session.placement(), session.calibration()) {
        (Some(p), Some(c)) => placement_body(p, catalog, c).map(Some),
        _ => Ok(None),
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/image", get(get_image))
        .route("/sessions/{id}/calibration", put(put_calibration))
        .route("/sessions/{id}/measurement", put(put_measurement))
        .route("/sessions/{id}/placement", put(put_placement))
        .route("/sessions/{id}/plan", post(post_plan))
        .route("/plans/{id}", get(get_plan))
        .method_not_allowed_fallback(method_not_allowed)
        .fallback(unknown_route)
        .layer(DefaultBodyLimit::max(MAX_IMAGE_BYTES))
        .with_state(state)
}

/// The API router plus static files from `static_dir` for any other path.
pub fn router_with_static(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = router(state);
    match static_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

async fn unknown_route() -> ApiError {
    ApiError::new(ErrorCode::NotFound, "no such route")
}

async fn method_not_allowed() -> ApiError {
    ApiError::new(ErrorCode::NotFound, "method not supported on this route")
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<SessionCreated>)> {
    if body.is_empty() {
        return Err(ApiError::new(ErrorCode::ParseError, "empty image body"));
    }
    let content_type = match image::guess_format(&body) {
        Ok(image::ImageFormat::Jpeg) => "image/jpeg",
        Ok(image::ImageFormat::Png) => "image/png",
        _ => return Err(ApiError::new(ErrorCode::ParseError, "body is not a JPEG or PNG image")),
    };
    if let Some(declared) = headers.get(header::CONTENT_TYPE) {
        let declared = declared.to_str().unwrap_or("");
        if declared != content_type {
            return Err(ApiError::new(
                ErrorCode::ParseError,
                format!("content type {declared:?} does not match {content_type} data"),
            ));
        }
    }
    let id = uuid::Uuid::new_v4().simple().to_string();
    let entry = SessionEntry {
        session: Session::new(id.clone(), format!("{id}/image")),
        image: body,
        content_type,
    };
    state
        .sessions
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .insert(id.clone(), Arc::new(Mutex::new(entry)));
    tracing::info!(session = %id, content_type, "session created");
    Ok((StatusCode::CREATED, Json(SessionCreated { session_id: id })))
}

async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let entry = state.find(&id)?;
    let guard = entry.lock().await;
    let s = &guard.session;
    Ok(Json(SessionView {
        session_id: s.id().to_string(),
        image_content_type: guard.content_type.to_string(),
        calibration: s.calibration().map(|c| CalibrationBody { mm_per_px: c.mm_per_px() }),
        measurement: s.measurement().copied(),
        sizing: s.sizing().map(sizing_body),
        placement: current_placement(s, &state.catalog)?,
    }))
}

async fn get_image(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let entry = state.find(&id)?;
    let guard = entry.lock().await;
    Ok(([(header::CONTENT_TYPE, guard.content_type)], guard.image.clone()).into_response())
}

async fn put_calibration(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<CalibrationBody>, JsonRejection>,
) -> ApiResult<Json<CalibrationBody>> {
    let Json(body) = body?;
    let calibration = Calibration::new(body.mm_per_px).map_err(|e| ApiError::new(ErrorCode::ParseError, e.to_string()))?;
    write_session(&state, &id, |entry| {
        entry.session.set_calibration(calibration);
        Ok(Json(body))
    })
    .await
}

async fn put_measurement(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<MeasurementBody>, JsonRejection>,
) -> ApiResult<Json<MeasurementResponse>> {
    let Json(body) = body?;
    let segment = SegmentPx::new(PointPx::new(body.ax, body.ay), PointPx::new(body.bx, body.by));
    let side = body.side.unwrap_or(Side::Left);
    write_session(&state, &id, |entry| {
        let result = entry.session.set_measurement(segment, side, &state.catalog)?;
        let sizing = sizing_body(&result);
        match current_placement(&entry.session, &state.catalog)? {
            Some(placement) => Ok(Json(MeasurementResponse { sizing, placement })),
            None => {
                let reason = result.rejected_reason().map_or("", |r| r.as_str());
                Err(ApiError::new(
                    ErrorCode::SizeOutOfRange,
                    format!(
                        "measured {:.2} mm is outside the catalog range {}-{} mm",
                        result.measured_mm,
                        state.catalog.min_size(),
                        state.catalog.max_size()
                    ),
                )
                .with_detail(json!({
                    "rejected_reason": reason,
                    "measured_mm": sizing.measured_mm,
                    "measured_mm_exact": sizing.measured_mm_exact,
                })))
            }
        }
    })
    .await
}

async fn put_placement(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<PlacementRequest>, JsonRejection>,
) -> ApiResult<Json<PlacementBody>> {
    let Json(PlacementRequest { delta }) = body?;
    let delta = RigidTransform::new(delta.rotation_deg, delta.pivot, delta.dx, delta.dy);
    write_session(&state, &id, |entry| {
        entry.session.adjust(&delta)?;
        current_placement(&entry.session, &state.catalog)?
            .map(Json)
            .ok_or_else(|| ApiError::new(ErrorCode::StateError, "no placement"))
    })
    .await
}

async fn post_plan(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<PatientInfo>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<PlanSaved>)> {
    let Json(patient) = body?;
    let record = write_session(&state, &id, |entry| Ok(entry.session.plan_record(patient, &state.catalog)?)).await?;
    let plan_id = state.store.save(&record, &state.catalog)?;
    tracing::info!(session = %id, plan = %plan_id, "plan saved");
    Ok((StatusCode::CREATED, Json(PlanSaved { plan_id })))
}

async fn get_plan(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<acetab_core::PlanRecord>> {
    Ok(Json(state.store.load(&id)?))
}
