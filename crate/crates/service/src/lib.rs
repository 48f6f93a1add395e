//! Stateless HTTP/JSON facade over the triaxis engine.
//!
//! Every POST endpoint takes a scenario document (full, or partial when a
//! default scenario is configured) and answers with a canonical JSON
//! envelope: `{"ok": true, "result": ...}` or
//! `{"ok": false, "error": {"category", "message", "field_path"}}`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::header::{self, HeaderMap, HeaderValue};
use axum::http::{Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Serialize;
use serde_json::{json, Value};
use tower_http::catch_panic::CatchPanicLayer;
use tower_http::cors::{AllowOrigin, CorsLayer};

use triaxis_core::commands::{self, Command};
use triaxis_core::household::CooperativeTemplate;
use triaxis_core::scenario::{load_scenario_value, merge_shallow, parse_document, to_canonical_string};
use triaxis_core::{Category, Error, Scenario};

pub const DEFAULT_PORT: u16 = 8787;

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Scenario that partial request bodies are merged over, as loaded JSON.
    pub default_scenario: Option<Value>,
    /// Extra CORS origins besides localhost ones.
    pub allowed_origins: Vec<String>,
}

impl ServiceConfig {
    /// Config whose default scenario is `document`, validated up front.
    pub fn with_default_scenario(document: &str) -> triaxis_core::Result<Self> {
        let value = parse_document(document)?;
        load_scenario_value(value.clone())?;
        Ok(Self {
            default_scenario: Some(value),
            ..Default::default()
        })
    }
}

struct AppState {
    default_scenario: Option<Value>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    category: &'a str,
    message: String,
    field_path: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<&'a Value>,
}

fn canonical_response(status: StatusCode, body: &Value) -> Response {
    match to_canonical_string(body) {
        Ok(text) => (
            status,
            [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))],
            text,
        )
            .into_response(),
        Err(_) => StatusCode::INTERNAL_SERVER_ERROR.into_response(),
    }
}

fn status_for(category: Category) -> StatusCode {
    match category {
        Category::Parse | Category::Validation | Category::Reference => StatusCode::BAD_REQUEST,
        Category::Infeasible => StatusCode::UNPROCESSABLE_ENTITY,
        Category::Internal => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

fn error_response(err: &Error) -> Response {
    let category = err.category();
    let message = match err {
        // internals never reach the client verbatim
        Error::Internal(_) => "internal error".to_string(),
        other => other.to_string(),
    };
    let detail = match err {
        Error::Infeasible { detail, .. } => Some(detail),
        _ => None,
    };
    let body = ErrorBody {
        category: category.as_str(),
        message,
        field_path: err.field_path(),
        detail,
    };
    canonical_response(status_for(category), &json!({"ok": false, "error": body}))
}

fn plain_error(status: StatusCode, category: &str, message: &str) -> Response {
    canonical_response(
        status,
        &json!({"ok": false, "error": {"category": category, "message": message, "field_path": null}}),
    )
}

fn ok_response<T: Serialize>(result: &T) -> Response {
    match serde_json::to_value(result) {
        Ok(value) => canonical_response(StatusCode::OK, &json!({"ok": true, "result": value})),
        Err(e) => error_response(&Error::Internal(e.to_string())),
    }
}

fn is_json(headers: &HeaderMap) -> bool {
    headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.split(';').next())
        .is_some_and(|mime| mime.trim().eq_ignore_ascii_case("application/json"))
}

fn scenario_from_body(state: &AppState, body: &[u8]) -> triaxis_core::Result<Scenario> {
    let text = std::str::from_utf8(body)
        .map_err(|_| Error::validation("", "request body must be UTF-8"))?;
    let value = parse_document(text)?;
    let value = match &state.default_scenario {
        Some(base) => merge_shallow(base, &value)?,
        None => {
            for required in ["preferences", "initial_state"] {
                if value.get(required).is_none() {
                    return Err(Error::validation(
                        required,
                        "partial scenario rejected: no default scenario is loaded",
                    ));
                }
            }
            value
        }
    };
    load_scenario_value(value)
}

fn query_param(query: &HashMap<String, String>, name: &str) -> triaxis_core::Result<String> {
    query
        .get(name)
        .cloned()
        .ok_or_else(|| Error::validation(name, format!("missing query parameter `{name}`")))
}

fn command_for(route: Route, query: &HashMap<String, String>) -> triaxis_core::Result<Command> {
    Ok(match route {
        Route::Score => Command::Score,
        Route::Frontier => Command::Frontier,
        Route::Simulate => Command::Simulate {
            plan: query_param(query, "plan")?,
        },
        Route::Satisfice => Command::Satisfice,
        Route::Strategy => Command::Strategy,
        Route::Options => Command::Options {
            specialized: query_param(query, "specialized")?,
            generalized: query_param(query, "generalized")?,
        },
        Route::Household => Command::Household {
            template: query
                .get("template")
                .map(|t| t.parse::<CooperativeTemplate>())
                .transpose()?,
        },
    })
}

#[derive(Debug, Clone, Copy)]
enum Route {
    Score,
    Frontier,
    Simulate,
    Satisfice,
    Strategy,
    Options,
    Household,
}

fn handle(state: &AppState, route: Route, query: &HashMap<String, String>, headers: &HeaderMap, body: &[u8]) -> Response {
    if !is_json(headers) {
        return plain_error(
            StatusCode::UNSUPPORTED_MEDIA_TYPE,
            Category::Validation.as_str(),
            "Content-Type must be application/json",
        );
    }
    let outcome = command_for(route, query).and_then(|command| {
        let scenario = scenario_from_body(state, body)?;
        commands::run(&command, Some(&scenario))
    });
    match outcome {
        Ok(report) => ok_response(&report),
        Err(e) => error_response(&e),
    }
}

macro_rules! endpoint {
    ($name:ident, $route:expr) => {
        async fn $name(
            State(state): State<Arc<AppState>>,
            Query(query): Query<HashMap<String, String>>,
            headers: HeaderMap,
            body: Bytes,
        ) -> Response {
            handle(&state, $route, &query, &headers, &body)
        }
    };
}

endpoint!(score, Route::Score);
endpoint!(frontier, Route::Frontier);
endpoint!(simulate, Route::Simulate);
endpoint!(satisfice, Route::Satisfice);
endpoint!(strategy, Route::Strategy);
endpoint!(options, Route::Options);
endpoint!(household, Route::Household);

async fn health() -> Response {
    canonical_response(StatusCode::OK, &json!({"ok": true}))
}

async fn archetypes() -> Response {
    ok_response(&commands::archetypes())
}

async fn not_found() -> Response {
    plain_error(StatusCode::NOT_FOUND, "not_found", "unknown route")
}

fn is_local_origin(origin: &str) -> bool {
    let Some(rest) = origin
        .strip_prefix("http://")
        .or_else(|| origin.strip_prefix("https://"))
    else {
        return false;
    };
    let host = if rest.starts_with('[') {
        rest.split_inclusive(']').next().unwrap_or(rest)
    } else {
        rest.split(':').next().unwrap_or(rest)
    };
    matches!(host, "localhost" | "127.0.0.1" | "[::1]")
}

fn cors(allowed: Vec<String>) -> CorsLayer {
    CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(move |origin: &HeaderValue, _| {
            origin
                .to_str()
                .is_ok_and(|o| is_local_origin(o) || allowed.iter().any(|a| a == o))
        }))
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE])
}

fn panic_response(_: Box<dyn std::any::Any + Send + 'static>) -> Response {
    plain_error(StatusCode::INTERNAL_SERVER_ERROR, Category::Internal.as_str(), "internal error")
}

pub fn router(config: ServiceConfig) -> Router {
    let state = Arc::new(AppState {
        default_scenario: config.default_scenario,
    });
    Router::new()
        .route("/health", get(health))
        .route("/v1/archetypes", get(archetypes))
        .route("/v1/score", post(score))
        .route("/v1/frontier", post(frontier))
        .route("/v1/simulate", post(simulate))
        .route("/v1/satisfice", post(satisfice))
        .route("/v1/strategy", post(strategy))
        .route("/v1/options", post(options))
        .route("/v1/household", post(household))
        .fallback(not_found)
        .with_state(state)
        .layer(CatchPanicLayer::custom(panic_response))
        .layer(cors(config.allowed_origins))
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(config)).await
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_origins() {
        assert!(is_local_origin("http://localhost:5173"));
        assert!(is_local_origin("http://127.0.0.1"));
        assert!(is_local_origin("https://[::1]:8080"));
        assert!(!is_local_origin("http://localhost.evil.com"));
        assert!(!is_local_origin("http://example.com"));
        assert!(!is_local_origin("file://localhost"));
    }

    #[test]
    fn statuses() {
        assert_eq!(status_for(Category::Validation), StatusCode::BAD_REQUEST);
        assert_eq!(status_for(Category::Infeasible), StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(status_for(Category::Internal), StatusCode::INTERNAL_SERVER_ERROR);
    }

    #[test]
    fn json_content_type_detection() {
        let mut h = HeaderMap::new();
        assert!(!is_json(&h));
        h.insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json; charset=utf-8"));
        assert!(is_json(&h));
        h.insert(header::CONTENT_TYPE, HeaderValue::from_static("text/plain"));
        assert!(!is_json(&h));
    }
}
