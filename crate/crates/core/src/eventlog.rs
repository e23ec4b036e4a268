//! Append-only event log and the ledger state rebuilt from it.
//!
//! The log is UTF-8 JSON lines, one [`EventRecord`] per line. Sequence
//! numbers strictly increase. Timestamps are logical, never wall-clock.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identity::{AccountId, CredentialSet, IdentityError, Registry, Roles};
use crate::ratings::{KeyConvention, Rating, RatingError, RatingStore, RatingValue, Scope};

#[derive(Debug, Error)]
pub enum LogError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corrupt log at line {line}: {reason}")]
    CorruptLog { line: usize, reason: String },
    #[error("event log {0} is locked by another writer")]
    Locked(PathBuf),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Rating(#[from] RatingError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Event {
    /// A registration attempt. `account` is `None` when it was refused.
    Register {
        account: Option<AccountId>,
        credentials: CredentialSet,
        roles: Roles,
    },
    Listing {
        seller: AccountId,
        scope: Scope,
        price: f64,
        delivery_days: u32,
        deliverable: bool,
    },
    Deal {
        buyer: AccountId,
        seller: AccountId,
        scope: Scope,
        price: f64,
        delivered: bool,
    },
    Rating {
        rater: AccountId,
        ratee: AccountId,
        scope: Scope,
        value: RatingValue,
        cost: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    pub at: u64,
    #[serde(flatten)]
    pub event: Event,
}

/// A registration refused during replay, with the line it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub line: usize,
    pub seq: u64,
    pub error: IdentityError,
}

/// Registry plus rating store, as rebuilt from a log.
#[derive(Debug, Clone, PartialEq)]
pub struct Ledger {
    pub registry: Registry,
    pub store: RatingStore,
    pub last_seq: u64,
    pub last_at: u64,
    pub listings: u64,
    pub deals: u64,
    pub rejections: Vec<Rejection>,
}

impl Ledger {
    pub fn new(convention: KeyConvention) -> Self {
        Self {
            registry: Registry::new(),
            store: RatingStore::new(convention),
            last_seq: 0,
            last_at: 0,
            listings: 0,
            deals: 0,
            rejections: Vec::new(),
        }
    }

    pub fn next_seq(&self) -> u64 {
        self.last_seq + 1
    }

    /// Next logical timestamp, strictly after every timestamp seen so far.
    pub fn next_at(&self) -> u64 {
        self.last_at.max(self.last_seq) + 1
    }

    /// Apply one record. `line` is only used for error reporting.
    pub fn apply(&mut self, record: &EventRecord, line: usize) -> Result<(), LogError> {
        let corrupt = |reason: String| LogError::CorruptLog { line, reason };
        if record.seq <= self.last_seq {
            return Err(corrupt(format!(
                "sequence {} does not follow {}",
                record.seq, self.last_seq
            )));
        }
        match &record.event {
            Event::Register {
                account,
                credentials,
                roles,
            } => match (self.registry.register(credentials.clone(), *roles, record.at), account) {
                (Ok(acct), Some(expected)) if acct.id == *expected => {}
                (Ok(acct), expected) => {
                    return Err(corrupt(format!(
                        "registration produced account {} but log records {:?}",
                        acct.id, expected
                    )))
                }
                (Err(error), None) => self.rejections.push(Rejection {
                    line,
                    seq: record.seq,
                    error,
                }),
                (Err(error), Some(expected)) => {
                    return Err(corrupt(format!(
                        "log records account {expected} but registration fails: {error}"
                    )))
                }
            },
            Event::Listing { .. } => self.listings += 1,
            Event::Deal { .. } => self.deals += 1,
            Event::Rating {
                rater,
                ratee,
                scope,
                value,
                cost,
            } => {
                let rating = Rating {
                    rater: *rater,
                    ratee: *ratee,
                    scope: scope.clone(),
                    value: *value,
                    cost: *cost,
                    at: record.at,
                };
                self.store
                    .record_rating(rating, &self.registry)
                    .map_err(|e| corrupt(format!("rating rejected: {e}")))?;
            }
        }
        self.last_seq = record.seq;
        self.last_at = self.last_at.max(record.at);
        Ok(())
    }

    /// Records that rebuild this ledger's accounts and latest ratings.
    pub fn to_records(&self) -> Vec<EventRecord> {
        let mut events: Vec<(u64, Event)> = self
            .registry
            .accounts()
            .map(|a| {
                (
                    a.registered_at,
                    Event::Register {
                        account: Some(a.id),
                        credentials: a.credentials.clone(),
                        roles: a.roles,
                    },
                )
            })
            .collect();
        let mut ratings: Vec<&Rating> = self.store.iter().collect();
        ratings.sort_by_key(|r| r.at);
        events.extend(ratings.into_iter().map(|r| {
            (
                r.at,
                Event::Rating {
                    rater: r.rater,
                    ratee: r.ratee,
                    scope: r.scope.clone(),
                    value: r.value,
                    cost: r.cost,
                },
            )
        }));
        events
            .into_iter()
            .enumerate()
            .map(|(i, (at, event))| EventRecord {
                seq: i as u64 + 1,
                at,
                event,
            })
            .collect()
    }

    /// Same accounts and same latest ratings, ignoring revision and counters.
    pub fn same_contents(&self, other: &Ledger) -> bool {
        self.registry == other.registry && self.store.iter().eq(other.store.iter())
    }
}

pub fn encode_record(record: &EventRecord) -> String {
    serde_json::to_string(record).expect("event records always serialize")
}

/// Rebuild a ledger from JSON-lines text.
pub fn replay_str(text: &str, convention: KeyConvention) -> Result<Ledger, LogError> {
    replay_lines(text.lines().map(|l| Ok(l.to_string())), convention)
}

fn replay_lines(
    lines: impl Iterator<Item = io::Result<String>>,
    convention: KeyConvention,
) -> Result<Ledger, LogError> {
    let mut ledger = Ledger::new(convention);
    for (i, line) in lines.enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| LogError::CorruptLog {
            line: lineno,
            reason: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: EventRecord =
            serde_json::from_str(&line).map_err(|e| LogError::CorruptLog {
                line: lineno,
                reason: e.to_string(),
            })?;
        ledger.apply(&record, lineno)?;
    }
    Ok(ledger)
}

/// Rebuild a ledger from a log file. A missing file is an empty log.
pub fn replay(path: &Path, convention: KeyConvention) -> Result<Ledger, LogError> {
    match File::open(path) {
        Ok(f) => replay_lines(BufReader::new(f).lines(), convention),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Ledger::new(convention)),
        Err(source) => Err(LogError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

pub fn write_records(path: &Path, records: &[EventRecord]) -> Result<(), LogError> {
    let io_err = |source| LogError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = String::new();
    for r in records {
        out.push_str(&encode_record(r));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(io_err)
}

/// Exclusive writer over an event log file.
///
/// Holds an advisory lock for its lifetime. Events are validated against the
/// replayed ledger before anything is written, so a refused event leaves the
/// file untouched.
#[derive(Debug)]
pub struct EventLog {
    path: PathBuf,
    file: File,
    ledger: Ledger,
}

impl EventLog {
    pub fn open(path: &Path, convention: KeyConvention) -> Result<Self, LogError> {
        let io_err = |source| LogError::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err)?;
        match file.try_lock() {
            Ok(()) => {}
            Err(std::fs::TryLockError::WouldBlock) => return Err(LogError::Locked(path.to_path_buf())),
            Err(std::fs::TryLockError::Error(e)) => return Err(io_err(e)),
        }
        let ledger = replay(path, convention)?;
        Ok(Self {
            path: path.to_path_buf(),
            file,
            ledger,
        })
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    fn append(&mut self, event: Event, at: u64) -> Result<EventRecord, LogError> {
        let record = EventRecord {
            seq: self.ledger.next_seq(),
            at,
            event,
        };
        let mut next = self.ledger.clone();
        next.apply(&record, 0)?;
        let mut line = encode_record(&record);
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.flush())
            .map_err(|source| LogError::Io {
                path: self.path.clone(),
                source,
            })?;
        self.ledger = next;
        Ok(record)
    }

    /// Register an account. Refused registrations are not written.
    pub fn register(&mut self, credentials: CredentialSet, roles: Roles) -> Result<AccountId, LogError> {
        self.ledger.registry.check(&credentials)?;
        let at = self.ledger.next_at();
        let record = self.append(
            Event::Register {
                account: Some(AccountId(self.ledger.registry.len() as u64)),
                credentials,
                roles,
            },
            at,
        )?;
        match record.event {
            Event::Register { account: Some(id), .. } => Ok(id),
            _ => unreachable!("register appends a register event"),
        }
    }

    pub fn rate(
        &mut self,
        rater: AccountId,
        ratee: AccountId,
        scope: Scope,
        value: RatingValue,
        cost: f64,
    ) -> Result<EventRecord, LogError> {
        let at = self.ledger.next_at();
        let rating = Rating {
            rater,
            ratee,
            scope: scope.clone(),
            value,
            cost,
            at,
        };
        self.ledger.store.check(&rating, &self.ledger.registry)?;
        self.append(
            Event::Rating {
                rater,
                ratee,
                scope,
                value,
                cost,
            },
            at,
        )
    }
}
