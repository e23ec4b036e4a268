mod common;

use common::credentials;
use tradetrust::eventlog::{replay, EventLog, LogError};
use tradetrust::identity::{IdentityError, ProfileTier, Roles};
use tradetrust::ratings::{KeyConvention, RatingError, RatingValue, Scope};

fn open(path: &std::path::Path) -> EventLog {
    EventLog::open(path, KeyConvention::PerScope).unwrap()
}

#[test]
fn appends_survive_reopening() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("events.jsonl");
    {
        let mut log = open(&path);
        let a = log.register(credentials("Ada", "N-1", "B-1", ProfileTier::High), Roles::BOTH).unwrap();
        let b = log.register(credentials("Bo", "", "", ProfileTier::Low), Roles::BOTH).unwrap();
        log.rate(b, a, Scope::new("cars").unwrap(), RatingValue::Positive, 120.0).unwrap();
        log.rate(b, a, Scope::new("cars").unwrap(), RatingValue::Negative, 80.0).unwrap();
    }
    let ledger = replay(&path, KeyConvention::PerScope).unwrap();
    assert_eq!(ledger.registry.len(), 2);
    assert_eq!(ledger.store.len(), 1);
    assert_eq!(ledger.store.iter().next().unwrap().value, RatingValue::Negative);
    assert_eq!(open(&path).ledger(), &ledger);
}

#[test]
fn refused_events_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("events.jsonl");
    let mut log = open(&path);
    let a = log.register(credentials("Ada", "N-1", "B-1", ProfileTier::Medium), Roles::BOTH).unwrap();
    let before = std::fs::read(&path).unwrap();

    let dup = log.register(credentials("Eve", "n 1", "B-2", ProfileTier::Medium), Roles::BOTH);
    assert!(matches!(dup, Err(LogError::Identity(IdentityError::DuplicateIdentity { .. }))));
    let own = log.rate(a, a, Scope::new("cars").unwrap(), RatingValue::Positive, 1.0);
    assert!(matches!(own, Err(LogError::Rating(RatingError::SelfRating(_)))));
    assert_eq!(std::fs::read(&path).unwrap(), before);
}

#[test]
fn second_writer_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("events.jsonl");
    let _held = open(&path);
    assert!(matches!(
        EventLog::open(&path, KeyConvention::PerScope),
        Err(LogError::Locked(_))
    ));
}

#[test]
fn corrupt_line_is_located() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("events.jsonl");
    {
        let mut log = open(&path);
        log.register(credentials("Ada", "", "", ProfileTier::Low), Roles::BOTH).unwrap();
    }
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("{\"seq\":2,\"at\":2,\"kind\":\"teleport\"}\n");
    std::fs::write(&path, text).unwrap();
    match replay(&path, KeyConvention::PerScope) {
        Err(LogError::CorruptLog { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected corrupt log, got {other:?}"),
    }
}
