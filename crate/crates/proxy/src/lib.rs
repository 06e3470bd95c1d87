//! HTTP forward proxy that adds simulated constellation latency.
//!
//! A client names its entry node and a target node or service in the
//! [`ENTRY_HEADER`] and [`TARGET_HEADER`] request headers. The proxy looks up
//! the route latency `L` in the latest published simulation snapshot, waits
//! `L`, forwards the request to the upstream server, waits `L` again and
//! returns the upstream response with [`LATENCY_HEADER`] set to `L`.

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::body::{to_bytes, Body};
use axum::extract::{Request, State};
use axum::http::{HeaderMap, HeaderName, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Router;
use continuum_core::engine::{latest, QueryError, SharedSnapshot};
use thiserror::Error;
use tokio::net::TcpListener;

pub const ENTRY_HEADER: &str = "x-sim-entry-node";
pub const TARGET_HEADER: &str = "x-sim-target";
pub const LATENCY_HEADER: &str = "x-sim-latency-ms";

/// Request bodies above this size are rejected.
pub const MAX_BODY_BYTES: usize = 64 * 1024 * 1024;

const HOP_BY_HOP: [&str; 9] = [
    "connection",
    "keep-alive",
    "proxy-authenticate",
    "proxy-authorization",
    "te",
    "trailer",
    "transfer-encoding",
    "upgrade",
    "host",
];

#[derive(Debug, Error)]
pub enum ProxyError {
    #[error("missing header {0}")]
    MissingHeader(&'static str),
    #[error("header {0} is not valid text")]
    InvalidHeader(&'static str),
    #[error("{0}")]
    UnknownReference(QueryError),
    #[error("{0}")]
    NoRoute(QueryError),
    #[error("simulation has not published a step yet")]
    NotReady,
    #[error("request body: {0}")]
    Body(String),
    #[error("upstream request failed: {0}")]
    Upstream(#[from] reqwest::Error),
    #[error("invalid upstream url {0:?}")]
    InvalidUpstream(String),
}

impl ProxyError {
    pub fn status(&self) -> StatusCode {
        match self {
            ProxyError::MissingHeader(_) | ProxyError::InvalidHeader(_) | ProxyError::UnknownReference(_) | ProxyError::Body(_) => {
                StatusCode::BAD_REQUEST
            }
            ProxyError::NoRoute(_) | ProxyError::NotReady => StatusCode::SERVICE_UNAVAILABLE,
            ProxyError::Upstream(_) | ProxyError::InvalidUpstream(_) => StatusCode::BAD_GATEWAY,
        }
    }
}

impl IntoResponse for ProxyError {
    fn into_response(self) -> Response {
        (self.status(), format!("{self}\n")).into_response()
    }
}

/// Route latency in milliseconds between `entry` and `target` on the
/// latest snapshot. `target` may name a node or a running service.
pub fn resolve_latency(snapshot: &SharedSnapshot, entry: &str, target: &str) -> Result<f64, ProxyError> {
    let snap = latest(snapshot).ok_or(ProxyError::NotReady)?;
    match snap.view().query_route(entry, target) {
        Ok(route) => Ok(route.total_latency_ms),
        Err(e @ (QueryError::UnknownNode(_) | QueryError::UnknownService(_))) => Err(ProxyError::UnknownReference(e)),
        Err(e) => Err(ProxyError::NoRoute(e)),
    }
}

pub struct ProxyState {
    snapshot: SharedSnapshot,
    upstream: String,
    client: reqwest::Client,
}

impl ProxyState {
    /// `upstream` is the base URL requests are forwarded to, e.g.
    /// `http://127.0.0.1:8000`.
    pub fn new(snapshot: SharedSnapshot, upstream: &str) -> Result<Self, ProxyError> {
        let parsed = reqwest::Url::parse(upstream).map_err(|_| ProxyError::InvalidUpstream(upstream.to_owned()))?;
        if !matches!(parsed.scheme(), "http" | "https") {
            return Err(ProxyError::InvalidUpstream(upstream.to_owned()));
        }
        let client = reqwest::Client::builder().build()?;
        Ok(ProxyState { snapshot, upstream: upstream.trim_end_matches('/').to_owned(), client })
    }
}

fn header_text(headers: &HeaderMap, name: &'static str) -> Result<String, ProxyError> {
    let value = headers.get(name).ok_or(ProxyError::MissingHeader(name))?;
    let text = value.to_str().map_err(|_| ProxyError::InvalidHeader(name))?.trim();
    if text.is_empty() {
        return Err(ProxyError::MissingHeader(name));
    }
    Ok(text.to_owned())
}

fn forwarded(headers: &HeaderMap) -> HeaderMap {
    let mut out = HeaderMap::with_capacity(headers.len());
    for (name, value) in headers {
        let n = name.as_str();
        if HOP_BY_HOP.contains(&n) || n == ENTRY_HEADER || n == TARGET_HEADER || n == "content-length" {
            continue;
        }
        out.append(name.clone(), value.clone());
    }
    out
}

fn delay(latency_ms: f64) -> Duration {
    Duration::from_secs_f64(latency_ms.max(0.0) / 1000.0)
}

async fn handle(State(state): State<Arc<ProxyState>>, request: Request) -> Result<Response, ProxyError> {
    let (parts, body) = request.into_parts();
    let entry = header_text(&parts.headers, ENTRY_HEADER)?;
    let target = header_text(&parts.headers, TARGET_HEADER)?;
    let latency_ms = resolve_latency(&state.snapshot, &entry, &target)?;
    let body = to_bytes(body, MAX_BODY_BYTES).await.map_err(|e| ProxyError::Body(e.to_string()))?;

    tokio::time::sleep(delay(latency_ms)).await;
    let path = parts.uri.path_and_query().map_or("/", |p| p.as_str());
    let upstream = state
        .client
        .request(parts.method, format!("{}{path}", state.upstream))
        .headers(forwarded(&parts.headers))
        .body(body)
        .send()
        .await?;
    let status = upstream.status();
    let headers = forwarded(upstream.headers());
    let bytes = upstream.bytes().await?;
    tokio::time::sleep(delay(latency_ms)).await;

    tracing::debug!(%entry, %target, latency_ms, %status, "proxied request");
    let mut response = Response::new(Body::from(bytes));
    *response.status_mut() = status;
    *response.headers_mut() = headers;
    response.headers_mut().insert(
        HeaderName::from_static(LATENCY_HEADER),
        HeaderValue::from_str(&latency_ms.to_string()).expect("a float formats as a valid header"),
    );
    Ok(response)
}

pub fn router(state: ProxyState) -> Router {
    Router::new().fallback(handle).with_state(Arc::new(state))
}

/// Serves the proxy on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    state: ProxyState,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

/// Binds `addr` and returns the listener with its actual local address.
pub async fn bind(addr: SocketAddr) -> std::io::Result<(TcpListener, SocketAddr)> {
    let listener = TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    Ok((listener, local))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes() {
        assert_eq!(ProxyError::MissingHeader(ENTRY_HEADER).status(), StatusCode::BAD_REQUEST);
        assert_eq!(ProxyError::UnknownReference(QueryError::UnknownNode("x".into())).status(), StatusCode::BAD_REQUEST);
        assert_eq!(ProxyError::NotReady.status(), StatusCode::SERVICE_UNAVAILABLE);
        assert_eq!(ProxyError::InvalidUpstream("x".into()).status(), StatusCode::BAD_GATEWAY);
    }

    #[test]
    fn hop_by_hop_and_simulation_headers_are_dropped() {
        let mut h = HeaderMap::new();
        h.insert("connection", HeaderValue::from_static("close"));
        h.insert(ENTRY_HEADER, HeaderValue::from_static("a"));
        h.insert("x-custom", HeaderValue::from_static("1"));
        let f = forwarded(&h);
        assert_eq!(f.len(), 1);
        assert!(f.contains_key("x-custom"));
    }

    #[test]
    fn empty_snapshot_is_not_ready() {
        let shared = SharedSnapshot::default();
        assert!(matches!(resolve_latency(&shared, "a", "b"), Err(ProxyError::NotReady)));
    }

    #[test]
    fn rejects_non_http_upstream() {
        assert!(ProxyState::new(SharedSnapshot::default(), "ftp://x").is_err());
        assert!(ProxyState::new(SharedSnapshot::default(), "not a url").is_err());
    }
}
