//! Corpus files and remote review sources.
//!
//! Companies file, one row per brand:
//!
//! ```text
//! id,name,category,logo_path
//! 1,Tang,Food,tang.png
//! ```
//!
//! Reviews file, linked to companies by name:
//!
//! ```text
//! id,company_name,category,score,text,time
//! 15708,Tang,Food,1,"Irresistible!!! ...",2023-06-15 09:36:37
//! ```
//!
//! Timestamps are read as `YYYY-MM-DD HH:MM:SS` or ISO-8601 and kept as
//! naive date-times.

mod source;

#[cfg(feature = "live")]
pub mod live;

use crate::{Error, Result};
use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

pub use self::source::{
    fetch_reviews, Clock, FetchOutcome, GuardedSource, MockReviewSource, PlaceHandle, RateLimiter, RemoteReview,
    RetryPolicy, ReviewPage, ReviewSource, SimulatedClock, Skip, SourceError, SystemClock,
};

pub const COMPANY_HEADER: [&str; 4] = ["id", "name", "category", "logo_path"];
pub const REVIEW_HEADER: [&str; 6] = ["id", "company_name", "category", "score", "text", "time"];

/// Timestamp layout used in corpus files.
const FILE_TIME_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Company {
    pub id: u64,
    pub name: String,
    pub category: String,
    /// As written in the companies file; relative paths are resolved
    /// against the logo directory by the caller.
    pub logo_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub id: u64,
    pub company_id: u64,
    /// Star rating, 1 to 5.
    pub score: u8,
    pub text: String,
    pub time: NaiveDateTime,
}

/// Parses `YYYY-MM-DD HH:MM:SS` or `YYYY-MM-DDTHH:MM:SS[.fff]`.
pub fn parse_time(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    NaiveDateTime::parse_from_str(s, FILE_TIME_FORMAT)
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f"))
        .ok()
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).from_reader(r)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str], path: &Path) -> Result<()> {
    let header = rdr.headers().map_err(|e| Error::Header { path: path.into(), message: e.to_string() })?;
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != expected {
        return Err(Error::Header {
            path: path.into(),
            message: format!("expected columns `{}`, found `{}`", expected.join(","), found.join(",")),
        });
    }
    Ok(())
}

fn row_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    Error::Row { line, message: e.to_string() }
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str, line: u64) -> Result<T> {
    let raw = rec.get(i).unwrap_or_default().trim();
    raw.parse().map_err(|_| Error::Row { line, message: format!("invalid {name} `{raw}`") })
}

pub fn load_companies(path: impl AsRef<Path>) -> Result<Vec<Company>> {
    let path = path.as_ref();
    let companies = read_companies(open(path)?, path)?;
    if companies.is_empty() {
        log::warn!("{}: no companies", path.display());
    }
    Ok(companies)
}

/// Parses a companies file from any reader; `path` is used in messages.
pub fn read_companies(r: impl Read, path: &Path) -> Result<Vec<Company>> {
    let mut rdr = csv_reader(r);
    check_header(&mut rdr, &COMPANY_HEADER, path)?;
    let mut seen: BTreeMap<u64, u64> = BTreeMap::new();
    let mut out = Vec::new();
    let mut rec = csv::StringRecord::new();
    loop {
        let line = rdr.position().line();
        match rdr.read_record(&mut rec) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(row_error(e, line)),
        }
        let line = rec.position().map_or(line, |p| p.line());
        let id: u64 = parse_field(&rec, 0, "company id", line)?;
        let name = rec[1].trim().to_string();
        if name.is_empty() {
            return Err(Error::Row { line, message: "empty company name".into() });
        }
        if seen.insert(id, line).is_some() {
            return Err(Error::DuplicateCompany { id, line });
        }
        out.push(Company { id, name, category: rec[2].trim().to_string(), logo_path: PathBuf::from(rec[3].trim()) });
    }
    Ok(out)
}

pub fn write_companies(w: impl Write, companies: &[Company]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::io("<companies>", e.into());
    wtr.write_record(COMPANY_HEADER).map_err(io)?;
    for c in companies {
        wtr.write_record([c.id.to_string().as_str(), &c.name, &c.category, &c.logo_path.to_string_lossy()])
            .map_err(io)?;
    }
    wtr.flush().map_err(|e| Error::io("<companies>", e))
}

/// Lower-cased, whitespace-collapsed company name used for linkage.
pub fn normalize_name(name: &str) -> String {
    name.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Company lookup by normalized name.
///
/// Several companies may share a name; lookups then resolve to the lowest
/// id and the clash is listed by [`CompanyIndex::collisions`].
#[derive(Debug, Clone, Default)]
pub struct CompanyIndex {
    by_name: BTreeMap<String, Vec<u64>>,
    by_id: BTreeMap<u64, (String, String)>,
}

impl CompanyIndex {
    pub fn new(companies: &[Company]) -> Self {
        let mut index = CompanyIndex::default();
        for c in companies {
            let ids = index.by_name.entry(normalize_name(&c.name)).or_default();
            ids.push(c.id);
            ids.sort_unstable();
            index.by_id.insert(c.id, (c.name.clone(), c.category.clone()));
        }
        index
    }

    pub fn resolve(&self, name: &str) -> Option<u64> {
        self.by_name.get(&normalize_name(name)).map(|ids| ids[0])
    }

    /// Names shared by more than one company, with the ids involved.
    pub fn collisions(&self) -> Vec<(&str, &[u64])> {
        self.by_name.iter().filter(|(_, ids)| ids.len() > 1).map(|(n, ids)| (n.as_str(), ids.as_slice())).collect()
    }

    pub fn name_of(&self, id: u64) -> Option<&str> {
        self.by_id.get(&id).map(|(n, _)| n.as_str())
    }

    pub fn category_of(&self, id: u64) -> Option<&str> {
        self.by_id.get(&id).map(|(_, c)| c.as_str())
    }

    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }
}

/// Streams reviews one row at a time. Memory use is bounded by the longest
/// row, whatever the file size.
pub struct ReviewReader<'a, R: Read> {
    rdr: csv::Reader<R>,
    rec: csv::StringRecord,
    index: &'a CompanyIndex,
    done: bool,
}

impl<'a> ReviewReader<'a, BufReader<File>> {
    pub fn open(path: impl AsRef<Path>, index: &'a CompanyIndex) -> Result<Self> {
        let path = path.as_ref();
        Self::new(open(path)?, path, index)
    }
}

impl<'a, R: Read> ReviewReader<'a, R> {
    pub fn new(r: R, path: &Path, index: &'a CompanyIndex) -> Result<Self> {
        let mut rdr = csv_reader(r);
        check_header(&mut rdr, &REVIEW_HEADER, path)?;
        Ok(ReviewReader { rdr, rec: csv::StringRecord::new(), index, done: false })
    }

    fn next_review(&mut self) -> Result<Option<Review>> {
        let line = self.rdr.position().line();
        if !self.rdr.read_record(&mut self.rec).map_err(|e| row_error(e, line))? {
            return Ok(None);
        }
        let rec = &self.rec;
        let line = rec.position().map_or(line, |p| p.line());
        let id: u64 = parse_field(rec, 0, "review id", line)?;
        let name = &rec[1];
        let company_id =
            self.index.resolve(name).ok_or_else(|| Error::UnknownCompany { name: name.trim().into(), line })?;
        let score: u8 = parse_field(rec, 3, "score", line)?;
        if !(1..=5).contains(&score) {
            return Err(Error::Row { line, message: format!("score {score} outside 1-5") });
        }
        let time =
            parse_time(&rec[5]).ok_or_else(|| Error::Row { line, message: format!("invalid time `{}`", &rec[5]) })?;
        Ok(Some(Review { id, company_id, score, text: rec[4].to_string(), time }))
    }
}

impl<R: Read> Iterator for ReviewReader<'_, R> {
    type Item = Result<Review>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.next_review().transpose();
        if item.is_none() {
            self.done = true;
        }
        item
    }
}

pub fn load_reviews(path: impl AsRef<Path>, index: &CompanyIndex) -> Result<Vec<Review>> {
    let path = path.as_ref();
    let reviews = ReviewReader::open(path, index)?.collect::<Result<Vec<_>>>()?;
    if reviews.is_empty() {
        log::warn!("{}: no reviews", path.display());
    }
    Ok(reviews)
}

/// Writes reviews in the reviews-file layout. Company names and categories
/// come from `index`; a review whose company is unknown is an error.
pub fn write_reviews(w: impl Write, reviews: &[Review], index: &CompanyIndex) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::io("<reviews>", e.into());
    wtr.write_record(REVIEW_HEADER).map_err(io)?;
    for r in reviews {
        let (Some(name), Some(category)) = (index.name_of(r.company_id), index.category_of(r.company_id)) else {
            return Err(Error::Payload(format!("review {} references unknown company {}", r.id, r.company_id)));
        };
        let time = r.time.format(FILE_TIME_FORMAT).to_string();
        wtr.write_record([r.id.to_string().as_str(), name, category, &r.score.to_string(), &r.text, &time])
            .map_err(io)?;
    }
    wtr.flush().map_err(|e| Error::io("<reviews>", e))
}
