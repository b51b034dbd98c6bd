//! Append-only JSON-lines event log, one file per UTC day.
//!
//! Files are named `events-YYYYMMDD.jsonl`. Sequence numbers increase
//! strictly across all files; replay reads the files in name order.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use vmlab_core::{AttemptRecord, InstrumentKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Event {
    /// Always the first record of a log.
    ServerSeeded { seed: u64 },
    SessionCreated { created_at: DateTime<Utc> },
    ExerciseIssued {
        exercise_id: String,
        kind: InstrumentKind,
        target_ticks: u32,
        seed_index: u64,
        /// Generator state after the draw.
        generator_state: u64,
    },
    /// Show-reading used during a quiz; the exercise closes without an attempt.
    ExerciseRevealed { exercise_id: String },
    AttemptGraded(AttemptRecord),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub session_id: Option<String>,
    #[serde(flatten)]
    pub event: Event,
    pub at: DateTime<Utc>,
}

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("event log I/O on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: unreadable event: {source}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error("{path}:{line}: sequence {seq} does not follow {prev}")]
    OutOfOrder {
        path: PathBuf,
        line: usize,
        seq: u64,
        prev: u64,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> LogError + '_ {
    move |source| LogError::Io {
        path: path.to_owned(),
        source,
    }
}

pub fn file_name_for(at: DateTime<Utc>) -> String {
    format!("events-{}.jsonl", at.format("%Y%m%d"))
}

fn is_log_file(name: &str) -> bool {
    name.len() == "events-YYYYMMDD.jsonl".len()
        && name.starts_with("events-")
        && name.ends_with(".jsonl")
        && name[7..15].bytes().all(|b| b.is_ascii_digit())
}

/// Log files in replay order.
pub fn log_files(dir: &Path) -> Result<Vec<PathBuf>, LogError> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_str().is_some_and(is_log_file))
        .map(|e| e.path())
        .collect();
    files.sort();
    Ok(files)
}

/// Reads every record under `dir`. A torn final line (crash during a
/// write) is dropped; any other unreadable line is an error.
pub fn read_all(dir: &Path) -> Result<Vec<EventRecord>, LogError> {
    let files = log_files(dir)?;
    let mut out: Vec<EventRecord> = Vec::new();
    for (fi, path) in files.iter().enumerate() {
        let file = File::open(path).map_err(io_err(path))?;
        let lines: Vec<String> = BufReader::new(file)
            .lines()
            .collect::<Result<_, _>>()
            .map_err(io_err(path))?;
        let last_file = fi + 1 == files.len();
        for (li, line) in lines.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: EventRecord = match serde_json::from_str(line) {
                Ok(r) => r,
                Err(e) if last_file && li + 1 == lines.len() => {
                    tracing::warn!(path = %path.display(), line = li + 1, "dropping torn final event: {e}");
                    break;
                }
                Err(source) => {
                    return Err(LogError::Corrupt {
                        path: path.clone(),
                        line: li + 1,
                        source,
                    })
                }
            };
            if let Some(prev) = out.last().map(|r| r.seq) {
                if record.seq <= prev {
                    return Err(LogError::OutOfOrder {
                        path: path.clone(),
                        line: li + 1,
                        seq: record.seq,
                        prev,
                    });
                }
            }
            out.push(record);
        }
    }
    Ok(out)
}

/// Cuts an unparseable final line off the newest log file, so the next
/// append starts on a clean line. Replay already ignores such a line.
fn trim_torn_tail(dir: &Path) -> Result<(), LogError> {
    let Some(path) = log_files(dir)?.pop() else {
        return Ok(());
    };
    let bytes = fs::read(&path).map_err(io_err(&path))?;
    let body = bytes.strip_suffix(b"\n").unwrap_or(&bytes);
    let start = body.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    let last = &body[start..];
    let complete = bytes.ends_with(b"\n") || last.is_empty();
    if complete && (last.is_empty() || serde_json::from_slice::<EventRecord>(last).is_ok()) {
        return Ok(());
    }
    tracing::warn!(path = %path.display(), "truncating torn final event");
    let file = OpenOptions::new().write(true).open(&path).map_err(io_err(&path))?;
    file.set_len(start as u64).map_err(io_err(&path))?;
    file.sync_data().map_err(io_err(&path))
}

/// The single writer of a log directory.
#[derive(Debug)]
pub struct EventLog {
    dir: PathBuf,
    current: Option<(String, File)>,
}

impl EventLog {
    /// Creates the directory if needed and checks it is writable.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, LogError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let probe = dir.join(".vmlab-write-probe");
        File::create(&probe).map_err(io_err(&dir))?;
        let _ = fs::remove_file(&probe);
        trim_torn_tail(&dir)?;
        Ok(EventLog { dir, current: None })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes one record as a line and syncs it to disk before returning.
    pub fn append(&mut self, record: &EventRecord) -> Result<(), LogError> {
        let name = file_name_for(record.at);
        if self.current.as_ref().map(|(n, _)| n) != Some(&name) {
            let path = self.dir.join(&name);
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&path)
                .map_err(io_err(&path))?;
            self.current = Some((name.clone(), file));
        }
        let (_, file) = self.current.as_mut().expect("just opened");
        let mut line = serde_json::to_vec(record).expect("events always serialize");
        line.push(b'\n');
        let path = self.dir.join(&name);
        file.write_all(&line).map_err(io_err(&path))?;
        file.sync_data().map_err(io_err(&path))
    }
}
