//! File-backed session store.
//!
//! Each session lives in `<root>/<id>/` as a snapshot (`session.json`, the
//! exported session document) plus an append-only answer log
//! (`answers.log`, one JSON object per line). An answer is appended and
//! synced before it is acknowledged. Every few answers the snapshot is
//! rewritten through a temporary file and a rename, after which the log is
//! reset the same way. Log entries carry their answer index, so entries
//! already folded into the snapshot are skipped on load, and a torn final
//! line (a crash during the append) is dropped.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use pcm_core::elicitation::{AnswerDocument, SessionDocument};
use pcm_core::{PcmError, Session};
use serde::{Deserialize, Serialize};
use tokio::sync::{Mutex as AsyncMutex, OwnedMutexGuard};

const SNAPSHOT: &str = "session.json";
const LOG: &str = "answers.log";
const SNAPSHOT_EVERY: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("unknown session {0:?}")]
    NotFound(String),
    #[error("session {id} is corrupt: {reason}")]
    Corrupt { id: String, reason: String },
    #[error("storage failure: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Domain(#[from] PcmError),
}

#[derive(Debug, Serialize, Deserialize)]
struct LogEntry {
    seq: usize,
    #[serde(flatten)]
    answer: AnswerDocument,
}

type Slot = Arc<AsyncMutex<Option<Session>>>;

/// Sessions are loaded lazily and kept in memory; every mutation goes
/// through the per-session mutex.
pub struct SessionStore {
    root: PathBuf,
    slots: Mutex<HashMap<String, Slot>>,
}

fn valid_id(id: &str) -> bool {
    id.len() == 32 && id.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    if let Some(dir) = path.parent() {
        // persist the rename itself; not every platform can open directories
        if let Ok(d) = File::open(dir) {
            let _ = d.sync_all();
        }
    }
    Ok(())
}

impl SessionStore {
    pub fn open(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self {
            root,
            slots: Mutex::new(HashMap::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn slot(&self, id: &str) -> Slot {
        let mut slots = self.slots.lock().expect("slot map poisoned");
        slots.entry(id.to_owned()).or_default().clone()
    }

    /// Persists a freshly created session.
    pub async fn insert(&self, session: Session) -> Result<(), StoreError> {
        let id = session.id().to_owned();
        let dir = self.root.join(&id);
        fs::create_dir(&dir)?;
        write_snapshot(&dir, &session)?;
        let mut guard = self.slot(&id).lock_owned().await;
        *guard = Some(session);
        Ok(())
    }

    /// Locks a session, loading it from disk on first use.
    pub async fn lock(&self, id: &str) -> Result<SessionGuard, StoreError> {
        if !valid_id(id) {
            return Err(StoreError::NotFound(id.to_owned()));
        }
        let dir = self.root.join(id);
        let mut guard = self.slot(id).lock_owned().await;
        if guard.is_none() {
            if !dir.join(SNAPSHOT).is_file() {
                return Err(StoreError::NotFound(id.to_owned()));
            }
            *guard = Some(load(id, &dir)?);
        }
        Ok(SessionGuard { guard, dir })
    }
}

fn write_snapshot(dir: &Path, session: &Session) -> io::Result<()> {
    let doc = serde_json::to_vec_pretty(&session.to_document()).map_err(io::Error::other)?;
    write_atomic(&dir.join(SNAPSHOT), &doc)?;
    write_atomic(&dir.join(LOG), b"")
}

fn load(id: &str, dir: &Path) -> Result<Session, StoreError> {
    let corrupt = |reason: String| StoreError::Corrupt {
        id: id.to_owned(),
        reason,
    };
    let text = fs::read(dir.join(SNAPSHOT))?;
    let mut doc: SessionDocument =
        serde_json::from_slice(&text).map_err(|e| corrupt(format!("snapshot: {e}")))?;
    if doc.id != id {
        return Err(corrupt(format!("snapshot belongs to {}", doc.id)));
    }
    let log = match File::open(dir.join(LOG)) {
        Ok(f) => Some(f),
        Err(e) if e.kind() == io::ErrorKind::NotFound => None,
        Err(e) => return Err(e.into()),
    };
    if let Some(f) = log {
        let lines: Vec<String> = BufReader::new(f).lines().collect::<io::Result<_>>()?;
        for (k, line) in lines.iter().enumerate() {
            let entry: LogEntry = match serde_json::from_str(line) {
                Ok(e) => e,
                Err(_) if k + 1 == lines.len() => break,
                Err(e) => return Err(corrupt(format!("log line {}: {e}", k + 1))),
            };
            match entry.seq.cmp(&doc.answers.len()) {
                std::cmp::Ordering::Less => {}
                std::cmp::Ordering::Equal => doc.answers.push(entry.answer),
                std::cmp::Ordering::Greater => {
                    return Err(corrupt(format!(
                        "log skips from answer {} to {}",
                        doc.answers.len(),
                        entry.seq
                    )))
                }
            }
        }
    }
    Session::from_document(&doc).map_err(|e| corrupt(e.to_string()))
}

pub struct SessionGuard {
    guard: OwnedMutexGuard<Option<Session>>,
    dir: PathBuf,
}

impl SessionGuard {
    pub fn session(&self) -> &Session {
        self.guard.as_ref().expect("loaded")
    }

    /// Makes `next` the current state. `next` must extend the current
    /// session by exactly one answer; that answer is logged durably first.
    pub fn commit_answer(&mut self, next: Session) -> io::Result<()> {
        let seq = self.session().answers().len();
        debug_assert_eq!(next.answers().len(), seq + 1);
        let answer = next.to_document().answers.pop().expect("new answer");
        let mut line = serde_json::to_vec(&LogEntry { seq, answer }).map_err(io::Error::other)?;
        line.push(b'\n');
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.dir.join(LOG))?;
        f.write_all(&line)?;
        f.sync_data()?;
        if (seq + 1).is_multiple_of(SNAPSHOT_EVERY) || next.next_pair().is_none() {
            write_snapshot(&self.dir, &next)?;
        }
        *self.guard = Some(next);
        Ok(())
    }

    /// Replaces the session after a change that adds no answer (a status
    /// change), rewriting the snapshot.
    pub fn commit_snapshot(&mut self, next: Session) -> io::Result<()> {
        write_snapshot(&self.dir, &next)?;
        *self.guard = Some(next);
        Ok(())
    }
}
