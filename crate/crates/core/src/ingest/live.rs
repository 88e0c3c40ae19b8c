//! HTTP client for the Places web service.
//!
//! The API key is read from `CHROMASENT_MAPS_KEY`. The details endpoint
//! returns a single page of at most five reviews per place.

use super::source::{PlaceHandle, RemoteReview, ReviewPage, ReviewSource, SourceError};
use crate::{Error, Result};
use serde_json::Value;

pub const KEY_VAR: &str = "CHROMASENT_MAPS_KEY";
const BASE: &str = "https://maps.googleapis.com/maps/api/place";

pub struct PlacesClient {
    http: reqwest::blocking::Client,
    key: String,
    base: String,
}

impl PlacesClient {
    pub fn from_env() -> Result<Self> {
        let key = std::env::var(KEY_VAR).map_err(|_| Error::InvalidParameter(format!("{KEY_VAR} is not set")))?;
        Self::new(key, BASE)
    }

    pub fn new(key: impl Into<String>, base: impl Into<String>) -> Result<Self> {
        let http = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(30))
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(PlacesClient { http, key: key.into(), base: base.into() })
    }

    fn get(&self, endpoint: &str, query: &[(&str, &str)]) -> std::result::Result<Value, SourceError> {
        let resp = self
            .http
            .get(format!("{}/{endpoint}/json", self.base))
            .query(query)
            .query(&[("key", self.key.as_str())])
            .send()
            .map_err(|e| SourceError::Transient(e.to_string()))?;
        let status = resp.status();
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(SourceError::Transient(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(SourceError::Fatal(format!("HTTP {status}")));
        }
        let body: Value = resp.json().map_err(|e| SourceError::Payload(e.to_string()))?;
        match body["status"].as_str() {
            Some("OK" | "ZERO_RESULTS") => Ok(body),
            Some("OVER_QUERY_LIMIT" | "UNKNOWN_ERROR") => Err(SourceError::Transient(body["status"].to_string())),
            Some(other) => Err(SourceError::Fatal(other.to_string())),
            None => Err(SourceError::Payload("missing status".into())),
        }
    }
}

impl ReviewSource for PlacesClient {
    fn search(&self, name: &str) -> std::result::Result<Option<PlaceHandle>, SourceError> {
        let body = self.get("textsearch", &[("query", name)])?;
        Ok(body["results"][0]["place_id"].as_str().map(|id| PlaceHandle(id.to_string())))
    }

    fn reviews(&self, place: &PlaceHandle, _page: Option<&str>) -> std::result::Result<ReviewPage, SourceError> {
        let body = self.get("details", &[("place_id", &place.0), ("fields", "reviews")])?;
        let reviews = match &body["result"]["reviews"] {
            Value::Null => Vec::new(),
            v => serde_json::from_value::<Vec<Value>>(v.clone())
                .map_err(|e| SourceError::Payload(e.to_string()))?
                .into_iter()
                .map(|r| {
                    Ok(RemoteReview {
                        rating: r["rating"]
                            .as_i64()
                            .ok_or_else(|| SourceError::Payload("review without rating".into()))?,
                        text: r["text"].as_str().unwrap_or_default().to_string(),
                        time: r["time"].as_i64().ok_or_else(|| SourceError::Payload("review without time".into()))?,
                    })
                })
                .collect::<std::result::Result<_, SourceError>>()?,
        };
        Ok(ReviewPage { reviews, next: None })
    }
}
