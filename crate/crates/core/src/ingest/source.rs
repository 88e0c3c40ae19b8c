use super::{Company, Review};
use crate::{Error, Result};
use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

/// Opaque place identifier returned by a search.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlaceHandle(pub String);

/// A review as delivered by a remote source, before normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteReview {
    pub rating: i64,
    pub text: String,
    /// Seconds since the Unix epoch, UTC.
    pub time: i64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReviewPage {
    pub reviews: Vec<RemoteReview>,
    pub next: Option<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SourceError {
    /// Worth retrying: rate limiting, timeouts, server errors.
    #[error("transient: {0}")]
    Transient(String),
    #[error("malformed payload: {0}")]
    Payload(String),
    #[error("{0}")]
    Fatal(String),
}

/// A remote review provider: search a company, then page through its
/// reviews.
pub trait ReviewSource {
    fn search(&self, name: &str) -> std::result::Result<Option<PlaceHandle>, SourceError>;
    fn reviews(&self, place: &PlaceHandle, page: Option<&str>) -> std::result::Result<ReviewPage, SourceError>;
}

/// Monotonic time that can be simulated in tests.
pub trait Clock: Send + Sync {
    /// Time elapsed since an arbitrary fixed origin.
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
}

#[derive(Debug)]
pub struct SystemClock(Instant);

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock(Instant::now())
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }
}

/// A clock that only advances when slept on.
#[derive(Debug, Default)]
pub struct SimulatedClock(Mutex<Duration>);

impl Clock for SimulatedClock {
    fn now(&self) -> Duration {
        *self.0.lock().unwrap()
    }

    fn sleep(&self, d: Duration) {
        *self.0.lock().unwrap() += d;
    }
}

/// Spaces requests at least `1 / rate` apart. Share one limiter between
/// every client that draws on the same quota.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    next_slot: Mutex<Option<Duration>>,
}

impl RateLimiter {
    pub fn per_second(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidParameter(format!("rate limit must be positive, got {rate}")));
        }
        Ok(RateLimiter { interval: Duration::from_secs_f64(1.0 / rate), next_slot: Mutex::new(None) })
    }

    /// Blocks until the caller may issue one request.
    pub fn acquire(&self, clock: &dyn Clock) {
        let wait = {
            let mut next = self.next_slot.lock().unwrap();
            let now = clock.now();
            let slot = next.map_or(now, |n| n.max(now));
            *next = Some(slot + self.interval);
            slot - now
        };
        if !wait.is_zero() {
            clock.sleep(wait);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub base: Duration,
    pub factor: f64,
    /// Total attempts, the first included.
    pub max_attempts: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { base: Duration::from_secs(1), factor: 2.0, max_attempts: 5 }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (1-based).
    pub fn backoff(&self, retry: u32) -> Duration {
        self.base.mul_f64(self.factor.powi(retry as i32 - 1))
    }
}

/// Wraps a source with the shared rate limiter and retry policy.
pub struct GuardedSource<S> {
    inner: S,
    limiter: Arc<RateLimiter>,
    clock: Arc<dyn Clock>,
    policy: RetryPolicy,
    requests: AtomicU64,
    retries: AtomicU64,
}

impl<S: ReviewSource> GuardedSource<S> {
    pub fn new(inner: S, limiter: Arc<RateLimiter>, clock: Arc<dyn Clock>, policy: RetryPolicy) -> Self {
        GuardedSource { inner, limiter, clock, policy, requests: AtomicU64::new(0), retries: AtomicU64::new(0) }
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    /// Requests sent, retries included.
    pub fn requests(&self) -> u64 {
        self.requests.load(Ordering::Relaxed)
    }

    pub fn retries(&self) -> u64 {
        self.retries.load(Ordering::Relaxed)
    }

    fn call<T>(
        &self,
        what: &str,
        f: impl Fn(&S) -> std::result::Result<T, SourceError>,
    ) -> std::result::Result<T, SourceError> {
        let mut attempt = 1;
        loop {
            self.limiter.acquire(self.clock.as_ref());
            self.requests.fetch_add(1, Ordering::Relaxed);
            match f(&self.inner) {
                Err(SourceError::Transient(msg)) if attempt < self.policy.max_attempts => {
                    let delay = self.policy.backoff(attempt);
                    log::warn!("{what}: {msg}; retry {attempt} in {delay:?}");
                    self.retries.fetch_add(1, Ordering::Relaxed);
                    self.clock.sleep(delay);
                    attempt += 1;
                }
                Err(SourceError::Transient(msg)) => {
                    return Err(SourceError::Transient(format!("gave up after {attempt} attempts: {msg}")));
                }
                other => return other,
            }
        }
    }
}

impl<S: ReviewSource> ReviewSource for GuardedSource<S> {
    fn search(&self, name: &str) -> std::result::Result<Option<PlaceHandle>, SourceError> {
        self.call("search", |s| s.search(name))
    }

    fn reviews(&self, place: &PlaceHandle, page: Option<&str>) -> std::result::Result<ReviewPage, SourceError> {
        self.call("reviews", |s| s.reviews(place, page))
    }
}

/// A company the source could not find.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skip {
    pub company_id: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FetchOutcome {
    pub reviews: Vec<Review>,
    pub skip: Option<Skip>,
    pub pages: usize,
}

/// Fetches up to `max_pages` pages of reviews for `company`. Review ids are
/// drawn from `next_id`, which is advanced past the ids used.
pub fn fetch_reviews(
    src: &impl ReviewSource,
    company: &Company,
    max_pages: usize,
    next_id: &mut u64,
) -> Result<FetchOutcome> {
    let fail = |e: SourceError| match e {
        SourceError::Payload(m) => Error::Payload(m),
        other => Error::Source { company_id: company.id, message: other.to_string() },
    };
    let Some(place) = src.search(&company.name).map_err(fail)? else {
        log::info!("no place found for company {} ({})", company.id, company.name);
        return Ok(FetchOutcome {
            skip: Some(Skip { company_id: company.id, reason: format!("no search result for `{}`", company.name) }),
            ..FetchOutcome::default()
        });
    };
    let mut out = FetchOutcome::default();
    let mut token: Option<String> = None;
    while out.pages < max_pages {
        let page = src.reviews(&place, token.as_deref()).map_err(fail)?;
        out.pages += 1;
        for r in page.reviews {
            out.reviews.push(normalize(r, company.id, *next_id)?);
            *next_id += 1;
        }
        match page.next {
            Some(t) => token = Some(t),
            None => break,
        }
    }
    Ok(out)
}

fn normalize(r: RemoteReview, company_id: u64, id: u64) -> Result<Review> {
    let score = u8::try_from(r.rating)
        .ok()
        .filter(|s| (1..=5).contains(s))
        .ok_or_else(|| Error::Payload(format!("rating {} outside 1-5", r.rating)))?;
    let time: NaiveDateTime = DateTime::from_timestamp(r.time, 0)
        .ok_or_else(|| Error::Payload(format!("timestamp {} out of range", r.time)))?
        .naive_utc();
    Ok(Review { id, company_id, score, text: r.text, time })
}

/// In-memory source with scripted transient failures.
#[derive(Debug, Default)]
pub struct MockReviewSource {
    places: BTreeMap<String, Vec<Vec<RemoteReview>>>,
    /// Each `true` fails the next call with a transient error.
    script: Mutex<VecDeque<bool>>,
    calls: AtomicU64,
}

impl MockReviewSource {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a place for `name` serving `pages` in order.
    pub fn with_place(mut self, name: &str, pages: Vec<Vec<RemoteReview>>) -> Self {
        self.places.insert(super::normalize_name(name), pages);
        self
    }

    /// Fails the next `n` calls with a transient error.
    pub fn fail_next(&self, n: usize) {
        self.script.lock().unwrap().extend(std::iter::repeat_n(true, n));
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    fn tick(&self) -> std::result::Result<(), SourceError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        match self.script.lock().unwrap().pop_front() {
            Some(true) => Err(SourceError::Transient("429 too many requests".into())),
            _ => Ok(()),
        }
    }
}

impl ReviewSource for MockReviewSource {
    fn search(&self, name: &str) -> std::result::Result<Option<PlaceHandle>, SourceError> {
        self.tick()?;
        let key = super::normalize_name(name);
        Ok(self.places.contains_key(&key).then_some(PlaceHandle(key)))
    }

    fn reviews(&self, place: &PlaceHandle, page: Option<&str>) -> std::result::Result<ReviewPage, SourceError> {
        self.tick()?;
        let pages =
            self.places.get(&place.0).ok_or_else(|| SourceError::Fatal(format!("unknown place {}", place.0)))?;
        let index: usize = match page {
            None => 0,
            Some(t) => t.parse().map_err(|_| SourceError::Payload(format!("bad page token `{t}`")))?,
        };
        let reviews = pages.get(index).cloned().unwrap_or_default();
        let next = (index + 1 < pages.len()).then(|| (index + 1).to_string());
        Ok(ReviewPage { reviews, next })
    }
}
