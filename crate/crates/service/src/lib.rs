//! Stateless HTTP validation of event arrays.
//!
//! Schemas are loaded once at startup from a directory and named by file
//! stem. Routes:
//!
//! - `POST /validate?schema=NAME` with a JSON array body: `200` when
//!   valid, `422` with the issue report when not, `400` for a malformed
//!   or non-array body, `404` for an unknown schema, `413` when the body
//!   exceeds the size limit.
//! - `GET /health`: `{"schemas": [...]}` in lexicographic order.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use leisheet_core::schema_model::load_schema;
use leisheet_core::{validate_events, SchemaDocument};
use serde_json::{json, Value};
use thiserror::Error;
use tokio::net::TcpListener;

pub const DEFAULT_MAX_BODY_BYTES: usize = 16 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no loadable schema in {}", dir.display())]
    NoSchemas { dir: PathBuf },
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub port: u16,
    pub schema_dir: PathBuf,
    pub max_body_bytes: usize,
}

/// Immutable set of named schemas shared by all requests.
#[derive(Debug, Default)]
pub struct SchemaRegistry {
    schemas: BTreeMap<String, SchemaDocument>,
    /// Files that did not load, with the reason.
    pub skipped: Vec<(PathBuf, String)>,
}

impl SchemaRegistry {
    /// Loads every `*.json` file directly inside `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, ServiceError> {
        let dir = dir.as_ref();
        let io = |source| ServiceError::Io {
            path: dir.to_owned(),
            source,
        };
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(io)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()
            .map_err(io)?;
        paths.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"));
        paths.sort();

        let mut registry = SchemaRegistry::default();
        for path in paths {
            let Some(name) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            match load_schema(&path) {
                Ok(doc) => {
                    registry.schemas.insert(name.to_owned(), doc);
                }
                Err(e) => registry.skipped.push((path.clone(), e.to_string())),
            }
        }
        if registry.schemas.is_empty() {
            return Err(ServiceError::NoSchemas {
                dir: dir.to_owned(),
            });
        }
        Ok(registry)
    }

    pub fn from_documents(docs: impl IntoIterator<Item = (String, SchemaDocument)>) -> Self {
        SchemaRegistry {
            schemas: docs.into_iter().collect(),
            skipped: Vec::new(),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.schemas.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Option<&SchemaDocument> {
        self.schemas.get(name)
    }
}

pub fn router(registry: Arc<SchemaRegistry>, max_body_bytes: usize) -> Router {
    Router::new()
        .route("/validate", post(handle_validate))
        .route("/health", get(handle_health))
        .layer(DefaultBodyLimit::max(max_body_bytes))
        .with_state(registry)
}

fn error(status: StatusCode, code: &str, message: impl Into<String>) -> Response {
    (status, Json(json!({"code": code, "error": message.into()}))).into_response()
}

async fn handle_health(State(registry): State<Arc<SchemaRegistry>>) -> Json<Value> {
    Json(json!({ "schemas": registry.names().collect::<Vec<_>>() }))
}

async fn handle_validate(
    State(registry): State<Arc<SchemaRegistry>>,
    Query(params): Query<HashMap<String, String>>,
    body: Result<Bytes, BytesRejection>,
) -> Response {
    let Some(name) = params.get("schema") else {
        return error(
            StatusCode::BAD_REQUEST,
            "MISSING_SCHEMA",
            "query parameter `schema` is required",
        );
    };
    let Some(doc) = registry.get(name) else {
        return error(
            StatusCode::NOT_FOUND,
            "UNKNOWN_SCHEMA",
            format!("no schema named {name:?}"),
        );
    };
    let body = match body {
        Ok(b) => b,
        Err(rejection) if rejection.status() == StatusCode::PAYLOAD_TOO_LARGE => {
            return error(
                StatusCode::PAYLOAD_TOO_LARGE,
                "BODY_TOO_LARGE",
                rejection.body_text(),
            );
        }
        Err(rejection) => return error(rejection.status(), "BAD_BODY", rejection.body_text()),
    };
    let events: Value = match serde_json::from_slice(&body) {
        Ok(v) => v,
        Err(e) => return error(StatusCode::BAD_REQUEST, "MALFORMED_JSON", e.to_string()),
    };
    match validate_events(&events, doc) {
        Ok(report) => {
            let status = if report.valid {
                StatusCode::OK
            } else {
                StatusCode::UNPROCESSABLE_ENTITY
            };
            (status, Json(report.to_json())).into_response()
        }
        Err(e) => error(StatusCode::BAD_REQUEST, e.code(), e.to_string()),
    }
}

/// Serves on an already bound listener until the future is dropped.
pub async fn serve_on(
    listener: TcpListener,
    registry: Arc<SchemaRegistry>,
    max_body_bytes: usize,
) -> std::io::Result<()> {
    axum::serve(listener, router(registry, max_body_bytes)).await
}

/// Loads the schema directory, binds `0.0.0.0:port` and serves until
/// interrupted. `on_ready` receives the bound address and registry.
pub async fn serve(
    config: ServiceConfig,
    on_ready: impl FnOnce(SocketAddr, &SchemaRegistry),
) -> Result<(), ServiceError> {
    let registry = Arc::new(SchemaRegistry::load_dir(&config.schema_dir)?);
    let addr = SocketAddr::from(([0, 0, 0, 0], config.port));
    let listener = TcpListener::bind(addr)
        .await
        .map_err(|source| ServiceError::Io {
            path: PathBuf::from(addr.to_string()),
            source,
        })?;
    let local = listener.local_addr().unwrap_or(addr);
    on_ready(local, &registry);
    axum::serve(listener, router(registry, config.max_body_bytes))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|source| ServiceError::Io {
            path: PathBuf::from(local.to_string()),
            source,
        })
}
