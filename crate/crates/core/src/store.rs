//! Line-delimited record store for intermediate pipeline stages.
//!
//! Each stage lives in `<dir>/<stage>.ndjson`, one JSON record per line:
//!
//! ```text
//! {"schema":1,"stage":"palettes","key":"17","payload":{...}}
//! ```
//!
//! [`Store::put_record`] appends; readers keep the last record per key.
//! [`Store::write_stage`] replaces a whole stage by writing a temporary file
//! and renaming it over the old one, so readers never see a partial stage.
//! Writers to one stage serialize on an advisory lock file.

use crate::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub schema: u32,
    pub stage: String,
    pub key: String,
    pub payload: Value,
}

impl Record {
    pub fn decode<T: DeserializeOwned>(&self) -> Result<T> {
        T::deserialize(&self.payload)
            .map_err(|e| Error::Payload(format!("stage `{}` key `{}`: {e}", self.stage, self.key)))
    }
}

#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
}

fn check_stage(stage: &str) -> Result<()> {
    let ok = !stage.is_empty()
        && stage.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'-');
    if ok {
        Ok(())
    } else {
        Err(Error::StageName(stage.into()))
    }
}

fn to_value(payload: &impl Serialize) -> Result<Value> {
    serde_json::to_value(payload).map_err(|e| Error::Payload(e.to_string()))
}

impl Store {
    /// Opens the store at `dir`, creating the directory if needed.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Store { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn stage_path(&self, stage: &str) -> PathBuf {
        self.dir.join(format!("{stage}.ndjson"))
    }

    pub fn has_stage(&self, stage: &str) -> bool {
        self.stage_path(stage).is_file()
    }

    /// Holds the stage's writer lock until dropped.
    fn lock(&self, stage: &str) -> Result<File> {
        let path = self.dir.join(format!(".{stage}.lock"));
        let file =
            OpenOptions::new().create(true).truncate(false).write(true).open(&path).map_err(|e| Error::io(&path, e))?;
        file.lock().map_err(|e| Error::io(&path, e))?;
        Ok(file)
    }

    fn try_lock(&self, stage: &str) -> Result<File> {
        let path = self.dir.join(format!(".{stage}.lock"));
        let file =
            OpenOptions::new().create(true).truncate(false).write(true).open(&path).map_err(|e| Error::io(&path, e))?;
        match file.try_lock() {
            Ok(()) => Ok(file),
            Err(std::fs::TryLockError::WouldBlock) => Err(Error::StageLocked(stage.into())),
            Err(std::fs::TryLockError::Error(e)) => Err(Error::io(&path, e)),
        }
    }

    fn line(stage: &str, key: &str, payload: Value) -> Result<String> {
        let rec = Record { schema: SCHEMA_VERSION, stage: stage.into(), key: key.into(), payload };
        serde_json::to_string(&rec).map_err(|e| Error::Payload(e.to_string()))
    }

    /// Appends one record, waiting for any other writer of the stage.
    pub fn put_record(&self, stage: &str, key: &str, payload: &impl Serialize) -> Result<()> {
        check_stage(stage)?;
        let line = Self::line(stage, key, to_value(payload)?)?;
        let _guard = self.lock(stage)?;
        let path = self.stage_path(stage);
        let mut file = OpenOptions::new().create(true).append(true).open(&path).map_err(|e| Error::io(&path, e))?;
        writeln!(file, "{line}").map_err(|e| Error::io(&path, e))
    }

    /// Replaces the stage with `records`, atomically. Fails with
    /// [`Error::StageLocked`] if another writer holds the stage.
    pub fn write_stage<'a, T: Serialize + 'a>(
        &self,
        stage: &str,
        records: impl IntoIterator<Item = (String, &'a T)>,
    ) -> Result<usize> {
        check_stage(stage)?;
        let _guard = self.try_lock(stage)?;
        let path = self.stage_path(stage);
        let tmp = self.dir.join(format!(".{stage}.ndjson.tmp"));
        let io = |e| Error::io(&tmp, e);
        let mut out = BufWriter::new(File::create(&tmp).map_err(io)?);
        let mut n = 0;
        for (key, payload) in records {
            writeln!(out, "{}", Self::line(stage, &key, to_value(payload)?)?).map_err(io)?;
            n += 1;
        }
        let file = out.into_inner().map_err(|e| io(e.into_error()))?;
        file.sync_all().map_err(io)?;
        drop(file);
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(n)
    }

    /// Every record of the stage in file order; a missing stage is empty.
    pub fn get_records(&self, stage: &str) -> Result<Vec<Record>> {
        check_stage(stage)?;
        let path = self.stage_path(stage);
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(Error::io(&path, e)),
        };
        let mut out = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(&path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| Error::StoreFormat { stage: stage.into(), line: i + 1, message };
            let value: Value = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
            let found = value["schema"].as_u64().ok_or_else(|| bad("missing schema version".into()))?;
            if found != u64::from(SCHEMA_VERSION) {
                return Err(Error::SchemaMismatch {
                    stage: stage.into(),
                    line: i + 1,
                    found: u32::try_from(found).unwrap_or(u32::MAX),
                    expected: SCHEMA_VERSION,
                });
            }
            let rec: Record = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
            if rec.stage != stage {
                return Err(bad(format!("record belongs to stage `{}`", rec.stage)));
            }
            out.push(rec);
        }
        Ok(out)
    }

    /// The last record written for each key.
    pub fn latest(&self, stage: &str) -> Result<BTreeMap<String, Record>> {
        Ok(self.get_records(stage)?.into_iter().map(|r| (r.key.clone(), r)).collect())
    }

    /// Decoded payloads of [`Store::latest`], in key order.
    pub fn load<T: DeserializeOwned>(&self, stage: &str) -> Result<Vec<(String, T)>> {
        self.latest(stage)?.into_iter().map(|(k, r)| Ok((k, r.decode()?))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    struct Payload {
        name: String,
        weights: Vec<f64>,
    }

    fn store() -> (tempfile::TempDir, Store) {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path().join("store")).unwrap();
        (dir, store)
    }

    #[test]
    fn put_then_get() {
        let (_d, s) = store();
        let p = Payload { name: "a".into(), weights: vec![0.1, 0.7, 0.2] };
        s.put_record("palettes", "1", &p).unwrap();
        let recs = s.get_records("palettes").unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].schema, SCHEMA_VERSION);
        assert_eq!(recs[0].decode::<Payload>().unwrap(), p);
    }

    #[test]
    fn last_write_wins() {
        let (_d, s) = store();
        s.put_record("x", "k", &1).unwrap();
        s.put_record("x", "k", &2).unwrap();
        assert_eq!(s.get_records("x").unwrap().len(), 2);
        assert_eq!(s.load::<i32>("x").unwrap(), vec![("k".to_string(), 2)]);
    }

    #[test]
    fn missing_stage_is_empty() {
        let (_d, s) = store();
        assert!(s.get_records("nothing").unwrap().is_empty());
        assert!(!s.has_stage("nothing"));
    }

    #[test]
    fn write_stage_replaces() {
        let (_d, s) = store();
        s.put_record("x", "old", &0).unwrap();
        let vals = [1, 2];
        let n = s.write_stage("x", [("a".to_string(), &vals[0]), ("b".to_string(), &vals[1])]).unwrap();
        assert_eq!(n, 2);
        let keys: Vec<String> = s.get_records("x").unwrap().into_iter().map(|r| r.key).collect();
        assert_eq!(keys, vec!["a", "b"]);
        assert!(!s.dir().join(".x.ndjson.tmp").exists());
    }

    #[test]
    fn schema_mismatch_is_reported() {
        let (_d, s) = store();
        s.put_record("x", "a", &1).unwrap();
        let mut f = OpenOptions::new().append(true).open(s.stage_path("x")).unwrap();
        writeln!(f, r#"{{"schema":99,"stage":"x","key":"b","payload":2}}"#).unwrap();
        let err = s.get_records("x").unwrap_err();
        assert!(matches!(err, Error::SchemaMismatch { line: 2, found: 99, .. }), "{err:?}");
    }

    #[test]
    fn malformed_lines_are_reported() {
        let (_d, s) = store();
        fs::write(s.stage_path("x"), "{\"schema\":1,\"stage\":\"x\",\"key\":\"a\",\"payload\":1}\nnot json\n").unwrap();
        assert!(matches!(s.get_records("x"), Err(Error::StoreFormat { line: 2, .. })));
        fs::write(s.stage_path("y"), "{\"schema\":1,\"stage\":\"x\",\"key\":\"a\",\"payload\":1}\n").unwrap();
        assert!(matches!(s.get_records("y"), Err(Error::StoreFormat { line: 1, .. })));
    }

    #[test]
    fn stage_names_are_checked() {
        let (_d, s) = store();
        assert!(matches!(s.put_record("../evil", "k", &1), Err(Error::StageName(_))));
        assert!(matches!(s.get_records(""), Err(Error::StageName(_))));
    }

    #[test]
    fn concurrent_writer_is_refused() {
        let (_d, s) = store();
        let _held = s.lock("x").unwrap();
        let v = 1;
        assert!(matches!(s.write_stage("x", [("a".to_string(), &v)]), Err(Error::StageLocked(_))));
    }

    #[test]
    fn concurrent_appends_all_land() {
        let (_d, s) = store();
        std::thread::scope(|scope| {
            for t in 0..4 {
                let s = &s;
                scope.spawn(move || {
                    for i in 0..25 {
                        s.put_record("x", &format!("{t}-{i}"), &(t * 100 + i)).unwrap();
                    }
                });
            }
        });
        assert_eq!(s.latest("x").unwrap().len(), 100);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn payload_round_trip(name in "\\PC{0,20}", weights in prop::collection::vec(-1e300f64..1e300, 0..6), key in "\\PC{0,10}") {
            let (_d, s) = store();
            let p = Payload { name, weights };
            s.put_record("rt", &key, &p).unwrap();
            let back = s.load::<Payload>("rt").unwrap();
            prop_assert_eq!(back, vec![(key, p)]);
        }
    }
}
