//! Local HTTP interface for annotating class averages.
//!
//! Reads take a snapshot of the catalog and work on it without holding any
//! lock. Saves go through a single writer: the new catalog is written to a
//! temporary file, renamed over the old one, and only then published.

use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use inkmetrics::detect::{snap_on, CriticalPoint, SnapError};
use inkmetrics::{
    detect, metric_lines, slanted_width, vectorize, AnnotatedModel, Catalog, DetectionReport, DeterminingPointSpec,
    ExtremumKind, InkSymbol, LineType, LocatedPoint, MetricLines, Point,
};

pub const DEFAULT_CURVE_SAMPLES: usize = 256;
pub const MAX_CURVE_SAMPLES: usize = 100_000;
const DEFAULT_PREVIEW_STEPS: usize = 3;

struct Snapshot {
    catalog: Arc<Catalog>,
    revision: u64,
}

pub struct AppState {
    current: RwLock<Snapshot>,
    path: PathBuf,
    writer: tokio::sync::Mutex<()>,
}

impl AppState {
    pub fn new(catalog: Catalog, path: PathBuf) -> Self {
        Self {
            current: RwLock::new(Snapshot {
                catalog: Arc::new(catalog),
                revision: 0,
            }),
            path,
            writer: tokio::sync::Mutex::new(()),
        }
    }

    /// The catalog as currently published, and its revision.
    pub fn snapshot(&self) -> (Arc<Catalog>, u64) {
        let s = self.current.read().expect("catalog lock poisoned");
        (Arc::clone(&s.catalog), s.revision)
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    nearest: Option<NearestView>,
    revision: Option<u64>,
}

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    nearest: Option<NearestView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    revision: Option<u64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct NearestView {
    s: f64,
    kind: ExtremumKind,
    boundary: bool,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            nearest: None,
            revision: None,
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", message)
    }

    fn unknown_class(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_class", format!("unknown class `{id}`"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code,
            message: &self.message,
            nearest: self.nearest,
            revision: self.revision,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<inkmetrics::Error> for ApiError {
    fn from(e: inkmetrics::Error) -> Self {
        if e.is_validation() {
            ApiError::invalid(e.to_string())
        } else {
            ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::invalid(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::invalid(e.body_text())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn find(catalog: &Catalog, id: &str) -> Result<AnnotatedModel, ApiError> {
    catalog.get(id).cloned().ok_or_else(|| ApiError::unknown_class(id))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/", get(index))
        .route("/classes", get(list_classes))
        .route("/classes/{id}/curve", get(curve))
        .route("/classes/{id}/snap", post(snap))
        .route("/classes/{id}/annotations", put(save_annotations))
        .route("/classes/{id}/preview", post(preview))
        .with_state(state)
}

pub async fn serve(state: AppState, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    log::info!("annotation service on http://{}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(state))).await
}

async fn index() -> Html<&'static str> {
    Html(include_str!("index.html"))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class_id: String,
    pub annotations: usize,
    pub sample_count: usize,
    pub slant_deg: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ClassList {
    pub revision: u64,
    pub classes: Vec<ClassSummary>,
}

async fn list_classes(State(state): State<Arc<AppState>>) -> Json<ClassList> {
    let (catalog, revision) = state.snapshot();
    Json(ClassList {
        revision,
        classes: catalog
            .models()
            .iter()
            .map(|m| ClassSummary {
                class_id: m.class_id.clone(),
                annotations: m.annotations.len(),
                sample_count: m.sample_count,
                slant_deg: m.slant_deg,
            })
            .collect(),
    })
}

/// The model's own annotations as located points on its average.
fn annotated_points(model: &AnnotatedModel) -> Vec<LocatedPoint> {
    model
        .annotations
        .iter()
        .map(|a| {
            let (x, y) = model.average.page_point(a.s);
            LocatedPoint {
                s: a.s,
                line_type: a.line_type,
                kind: a.kind,
                x,
                y,
                boundary: a.s == 0.0 || a.s == 1.0,
                failed: false,
            }
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnnotationView {
    pub s: f64,
    #[serde(rename = "type")]
    pub line_type: LineType,
    pub kind: ExtremumKind,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelView {
    pub class_id: String,
    pub revision: u64,
    pub sample_count: usize,
    pub slant_deg: f64,
    /// Width between bounding lines inclined by the slant.
    pub width: f64,
    pub annotations: Vec<AnnotationView>,
    pub lines: MetricLines,
}

fn model_view(model: &AnnotatedModel, revision: u64) -> ModelView {
    let points = annotated_points(model);
    ModelView {
        class_id: model.class_id.clone(),
        revision,
        sample_count: model.sample_count,
        slant_deg: model.slant_deg,
        width: slanted_width(&model.average, model.slant_deg),
        annotations: points
            .iter()
            .map(|p| AnnotationView {
                s: p.s,
                line_type: p.line_type,
                kind: p.kind,
                x: p.x,
                y: p.y,
            })
            .collect(),
        lines: metric_lines(&model.average, &points, model.slant_deg),
    }
}

#[derive(Debug, Deserialize)]
pub struct CurveQuery {
    pub samples: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CurveResponse {
    /// Page-space points at evenly spaced arc-length parameters.
    pub points: Vec<[f64; 2]>,
    #[serde(flatten)]
    pub model: ModelView,
}

async fn curve(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<CurveQuery>, QueryRejection>,
) -> ApiResult<CurveResponse> {
    let Query(q) = query?;
    let (catalog, revision) = state.snapshot();
    let model = find(&catalog, &id)?;
    let n = q.samples.unwrap_or(DEFAULT_CURVE_SAMPLES);
    if !(2..=MAX_CURVE_SAMPLES).contains(&n) {
        return Err(ApiError::invalid(format!("samples must lie in 2..={MAX_CURVE_SAMPLES}")));
    }
    Ok(Json(CurveResponse {
        points: model.average.sample_page(n).into_iter().map(|(x, y)| [x, y]).collect(),
        model: model_view(&model, revision),
    }))
}

#[derive(Debug, Deserialize)]
pub struct SnapRequest {
    /// Starting arc-length parameter.
    pub s_guess: Option<f64>,
    /// Or a clicked page point, mapped to the nearest curve parameter.
    pub point: Option<[f64; 2]>,
    pub kind: ExtremumKind,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SnapResponse {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub boundary: bool,
    /// The parameter the search started from.
    pub s_guess: f64,
}

async fn snap(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<SnapRequest>, JsonRejection>,
) -> ApiResult<SnapResponse> {
    let Json(req) = body?;
    let (catalog, _) = state.snapshot();
    let model = find(&catalog, &id)?;
    let avg = &model.average;
    let guess = match (req.s_guess, req.point) {
        (Some(s), None) if (0.0..=1.0).contains(&s) => s,
        (Some(s), None) => return Err(ApiError::invalid(format!("s_guess {s} outside [0, 1]"))),
        (None, Some([x, y])) => avg.nearest_parameter((x, y)),
        _ => return Err(ApiError::invalid("give exactly one of s_guess and point")),
    };
    match snap_on(&avg.curve().y, guess, req.kind) {
        Ok(found) => {
            let (x, y) = avg.page_point(found.s);
            Ok(Json(SnapResponse {
                s: found.s,
                x,
                y,
                boundary: found.boundary,
                s_guess: guess,
            }))
        }
        Err(e @ SnapError::NotFound { nearest, .. }) => {
            let mut err = ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "no_extremum", e.to_string());
            err.nearest = nearest.map(|c: CriticalPoint| NearestView {
                s: c.s,
                kind: c.kind,
                boundary: c.boundary,
            });
            Err(err)
        }
        Err(e) => Err(ApiError::invalid(e.to_string())),
    }
}

#[derive(Debug, Deserialize)]
pub struct SaveRequest {
    pub annotations: Vec<DeterminingPointSpec>,
    #[serde(default)]
    pub slant_deg: f64,
    /// Reject the save unless the catalog is still at this revision.
    pub if_revision: Option<u64>,
}

async fn save_annotations(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<SaveRequest>, JsonRejection>,
) -> ApiResult<ModelView> {
    let Json(req) = body?;
    let _writer = state.writer.lock().await;
    let (catalog, revision) = state.snapshot();
    if req.if_revision.is_some_and(|r| r != revision) {
        let mut err = ApiError::new(
            StatusCode::CONFLICT,
            "conflict",
            format!("catalog is at revision {revision}; reload and retry"),
        );
        err.revision = Some(revision);
        return Err(err);
    }
    let mut model = find(&catalog, &id)?;
    model.annotations = req.annotations;
    model.slant_deg = req.slant_deg;
    model.validate()?;

    let mut next = (*catalog).clone();
    next.upsert(model.clone())?;
    let path = state.path.clone();
    let next = tokio::task::spawn_blocking(move || next.save(&path).map(|_| next))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;

    let revision = revision + 1;
    *state.current.write().expect("catalog lock poisoned") = Snapshot {
        catalog: Arc::new(next),
        revision,
    };
    log::info!("class {id}: saved {} annotations, revision {revision}", model.annotations.len());
    Ok(Json(model_view(&model, revision)))
}

#[derive(Debug, Deserialize)]
pub struct PreviewRequest {
    pub strokes: Vec<Vec<[f64; 2]>>,
    pub steps: Option<usize>,
}

async fn preview(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<PreviewRequest>, JsonRejection>,
) -> ApiResult<DetectionReport> {
    let Json(req) = body?;
    let (catalog, _) = state.snapshot();
    let model = find(&catalog, &id)?;
    let steps = req.steps.unwrap_or(DEFAULT_PREVIEW_STEPS);
    if steps == 0 {
        return Err(ApiError::invalid("steps must be at least 1"));
    }
    let strokes = req
        .strokes
        .iter()
        .map(|s| s.iter().map(|&[x, y]| Point::new(x, y)).collect())
        .collect();
    let ink = InkSymbol::new(strokes, Some(id))?;
    let v = vectorize(&ink, catalog.basis())?;
    Ok(Json(detect(&model, &v, steps, 0)?))
}
