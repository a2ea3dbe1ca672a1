//! Async client for the `/v1` HTTP API.

use reqwest::{Response, StatusCode};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use omt_core::api::{ErrorBody, Health};
use omt_core::classify::ClassificationResult;
use omt_core::omt::tree::TreeDocument;
use omt_core::omt::session::SessionDocument;
use omt_core::omt::{Answer, SessionView};
use omt_core::suite::{SuiteConfig, SuiteReport};

#[derive(Debug, Error)]
pub enum ClientError {
    /// The service answered with an error envelope.
    #[error("{status}: {body}")]
    Api { status: StatusCode, body: ErrorBody },
    #[error("request failed: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("unexpected response: {0}")]
    Decode(String),
}

impl ClientError {
    pub fn body(&self) -> Option<&ErrorBody> {
        match self {
            ClientError::Api { body, .. } => Some(body),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, ClientError>;

#[derive(Debug, Clone)]
pub struct OmtClient {
    base: String,
    http: reqwest::Client,
}

impl OmtClient {
    /// `base` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        OmtClient { base: base.into().trim_end_matches('/').to_string(), http: reqwest::Client::new() }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    fn url(&self, path: &str) -> String {
        format!("{}/v1{path}", self.base)
    }

    async fn check(resp: Response) -> Result<Response> {
        let status = resp.status();
        if status.is_success() {
            return Ok(resp);
        }
        let text = resp.text().await?;
        let body = serde_json::from_str::<ErrorBody>(&text)
            .unwrap_or_else(|_| ErrorBody::new("HTTP_ERROR", if text.is_empty() { status.to_string() } else { text }));
        Err(ClientError::Api { status, body })
    }

    async fn text(resp: Response) -> Result<String> {
        Ok(Self::check(resp).await?.text().await?)
    }

    async fn json<T: DeserializeOwned>(resp: Response) -> Result<T> {
        let text = Self::text(resp).await?;
        serde_json::from_str(&text).map_err(|e| ClientError::Decode(e.to_string()))
    }

    async fn get(&self, path: &str) -> Result<Response> {
        Ok(self.http.get(self.url(path)).send().await?)
    }

    async fn post_json<B: Serialize>(&self, path: &str, body: &B) -> Result<Response> {
        Ok(self.http.post(self.url(path)).json(body).send().await?)
    }

    pub async fn health(&self) -> Result<Health> {
        Self::json(self.get("/health").await?).await
    }

    /// The tree document exactly as served.
    pub async fn omt_text(&self) -> Result<String> {
        Self::text(self.get("/omt").await?).await
    }

    pub async fn omt(&self) -> Result<TreeDocument> {
        Self::json(self.get("/omt").await?).await
    }

    pub async fn create_session(&self) -> Result<SessionView> {
        Self::json(self.http.post(self.url("/sessions")).send().await?).await
    }

    pub async fn import_session(&self, doc: &SessionDocument) -> Result<SessionView> {
        Self::json(self.post_json("/sessions/import", doc).await?).await
    }

    pub async fn session(&self, id: &str) -> Result<SessionView> {
        Self::json(self.get(&format!("/sessions/{id}")).await?).await
    }

    pub async fn delete_session(&self, id: &str) -> Result<()> {
        Self::check(self.http.delete(self.url(&format!("/sessions/{id}"))).send().await?).await?;
        Ok(())
    }

    pub async fn answer(&self, id: &str, answer: &Answer) -> Result<SessionView> {
        Self::json(self.post_json(&format!("/sessions/{id}/answers"), answer).await?).await
    }

    pub async fn back(&self, id: &str) -> Result<SessionView> {
        Self::json(self.http.post(self.url(&format!("/sessions/{id}/back"))).send().await?).await
    }

    pub async fn model_lp(&self, id: &str) -> Result<String> {
        Self::text(self.get(&format!("/sessions/{id}/model.lp")).await?).await
    }

    pub async fn export(&self, id: &str) -> Result<SessionDocument> {
        Self::json(self.get(&format!("/sessions/{id}/export")).await?).await
    }

    /// Classification JSON exactly as served.
    pub async fn classify_text(&self, lp: &str) -> Result<String> {
        let resp = self
            .http
            .post(self.url("/classify"))
            .header(reqwest::header::CONTENT_TYPE, "text/plain; charset=utf-8")
            .body(lp.to_string())
            .send()
            .await?;
        Self::text(resp).await
    }

    pub async fn classify(&self, lp: &str) -> Result<ClassificationResult> {
        let text = self.classify_text(lp).await?;
        serde_json::from_str(&text).map_err(|e| ClientError::Decode(e.to_string()))
    }

    pub async fn ontology(&self) -> Result<String> {
        Self::text(self.get("/ontology.owl").await?).await
    }

    pub async fn verify_encodings(&self, config: &SuiteConfig) -> Result<SuiteReport> {
        Self::json(self.post_json("/verify-encodings", config).await?).await
    }
}
