//! JSON-over-HTTP API.
//!
//! Stateless per request: the position travels in every request body. The
//! only shared state is the transposition table, whose entries are
//! write-once per key.
//!
//! | endpoint              | method     | body / query                          |
//! |-----------------------|------------|---------------------------------------|
//! | `/api/classify`       | POST       | `{"position"}`                        |
//! | `/api/grundy`         | POST       | `{"position"}`                        |
//! | `/api/successors`     | GET        | `?position=`                          |
//! | `/api/move`           | POST       | `{"position", "move": {run, count}}`  |
//! | `/api/engine-move`    | POST       | `{"position", "previous"?, "last_move"?}` |
//!
//! Errors are `{"error": string}` with status 400 (malformed request or
//! position) or 422 (illegal move, terminal position, budget exhausted).

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use strnim_core::{Move, Outcome, Position, Solver, TranspositionTable};
use tower_http::services::ServeDir;

use crate::engine;

pub struct AppState {
    pub table: Arc<TranspositionTable>,
    pub budget: u64,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl ToString) -> ApiError {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.to_string(),
        }
    }

    fn unprocessable(message: impl ToString) -> ApiError {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            message: message.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

#[derive(Debug, Deserialize)]
pub struct PositionRequest {
    pub position: String,
}

#[derive(Debug, Deserialize)]
pub struct MoveRequest {
    pub position: String,
    #[serde(rename = "move")]
    pub mv: Move,
}

#[derive(Debug, Deserialize)]
pub struct EngineMoveRequest {
    pub position: String,
    #[serde(default)]
    pub previous: Option<String>,
    #[serde(default)]
    pub last_move: Option<Move>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ClassifyResponse {
    pub verdict: Outcome,
    pub grundy: u32,
    pub winning_moves: Vec<Move>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GrundyResponse {
    pub grundy: u32,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Successor {
    #[serde(rename = "move")]
    pub mv: Move,
    pub position: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SuccessorsResponse {
    pub position: String,
    pub successors: Vec<Successor>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MoveResponse {
    pub position: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EngineMoveResponse {
    #[serde(rename = "move")]
    pub mv: Move,
    pub position: String,
    pub verdict: Outcome,
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed request: {e}")))
}

fn parse_position(text: &str) -> Result<Position, ApiError> {
    Position::parse(text).map_err(ApiError::bad_request)
}

/// Runs solver work off the async executor.
async fn solve<T, F>(state: &Arc<AppState>, work: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&mut Solver<'_>) -> Result<T, ApiError> + Send + 'static,
{
    let state = Arc::clone(state);
    tokio::task::spawn_blocking(move || {
        let mut solver = Solver::with_budget(&state.table, state.budget);
        work(&mut solver)
    })
    .await
    .map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        message: e.to_string(),
    })?
}

async fn classify(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<ClassifyResponse>, ApiError> {
    let req: PositionRequest = parse_body(&body)?;
    let pos = parse_position(&req.position)?;
    solve(&state, move |solver| {
        let g = solver.grundy(&pos).map_err(ApiError::unprocessable)?;
        let winning_moves = solver.winning_moves(&pos).map_err(ApiError::unprocessable)?;
        Ok(Json(ClassifyResponse {
            verdict: g.outcome(),
            grundy: g.0,
            winning_moves,
        }))
    })
    .await
}

async fn grundy(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<GrundyResponse>, ApiError> {
    let req: PositionRequest = parse_body(&body)?;
    let pos = parse_position(&req.position)?;
    solve(&state, move |solver| {
        let g = solver.grundy(&pos).map_err(ApiError::unprocessable)?;
        Ok(Json(GrundyResponse { grundy: g.0 }))
    })
    .await
}

#[derive(Debug, Deserialize)]
struct SuccessorsQuery {
    position: Option<String>,
}

async fn successors(Query(query): Query<SuccessorsQuery>) -> Result<Json<SuccessorsResponse>, ApiError> {
    let text = query
        .position
        .ok_or_else(|| ApiError::bad_request("missing query parameter 'position'"))?;
    let pos = parse_position(&text)?;
    let successors = pos
        .legal_moves()
        .into_iter()
        .map(|mv| Successor {
            mv,
            position: pos.apply_move(mv).expect("legal").literal(),
        })
        .collect();
    Ok(Json(SuccessorsResponse {
        position: pos.literal(),
        successors,
    }))
}

async fn apply(body: Bytes) -> Result<Json<MoveResponse>, ApiError> {
    let req: MoveRequest = parse_body(&body)?;
    let pos = parse_position(&req.position)?;
    let next = pos.apply_move(req.mv).map_err(ApiError::unprocessable)?;
    Ok(Json(MoveResponse {
        position: next.literal(),
    }))
}

async fn engine_move(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<EngineMoveResponse>, ApiError> {
    let req: EngineMoveRequest = parse_body(&body)?;
    let pos = parse_position(&req.position)?;
    let previous = req.previous.as_deref().map(parse_position).transpose()?;
    solve(&state, move |solver| {
        let last = previous.as_ref().zip(req.last_move);
        let chosen = engine::choose_move(solver, &pos, last)
            .map_err(ApiError::unprocessable)?
            .ok_or_else(|| ApiError::unprocessable("no legal moves: the position is terminal"))?;
        let result = pos.apply_move(chosen.mv).expect("engine moves are legal");
        let verdict = solver.grundy(&result).map_err(ApiError::unprocessable)?.outcome();
        Ok(Json(EngineMoveResponse {
            mv: chosen.mv,
            position: result.literal(),
            verdict,
        }))
    })
    .await
}

pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/classify", post(classify))
        .route("/api/grundy", post(grundy))
        .route("/api/successors", get(successors))
        .route("/api/move", post(apply))
        .route("/api/engine-move", post(engine_move))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(addr: SocketAddr, state: Arc<AppState>, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state, static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
