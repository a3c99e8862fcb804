//! Resumable classification.
//!
//! A checkpoint is a JSON-lines file: a header naming the code version, `D`,
//! the parameters and the unit records in use, then one record per finished
//! step (`S₁`, each m-test, each survivor's verification). Records are
//! appended as steps finish, in any order; the final report is assembled from
//! them canonically, so a resumed run and an uninterrupted one agree byte for
//! byte.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unilift::classify::{
    assemble, enumerate_s1, m_test, process_survivor, Candidate, ClassificationReport, Elimination, FieldOutcome,
    Params, S1,
};
use unilift::indecomp::UnitRecord;
use unilift::{make_order, Int, Quad, QuadField};

use crate::error::{io_err, CliError, CliResult};

pub const CHECKPOINT_VERSION: &str = concat!("unilift-checkpoint/1+", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Record {
    Header {
        version: String,
        #[serde(rename = "D")]
        d: Int,
        params: Params,
        units: Vec<UnitRecord>,
    },
    S1 {
        s1: S1,
    },
    MTest {
        delta: Quad,
        m: Option<Quad>,
    },
    Outcome {
        outcome: FieldOutcome,
    },
}

/// Progress recovered from a checkpoint file.
#[derive(Default)]
struct State {
    s1: Option<S1>,
    m_tests: BTreeMap<Quad, Option<Quad>>,
    outcomes: BTreeMap<Quad, FieldOutcome>,
}

struct Log {
    file: Option<Mutex<File>>,
}

impl Log {
    fn append(&self, r: &Record) -> CliResult<()> {
        let Some(f) = &self.file else { return Ok(()) };
        let mut line = serde_json::to_string(r).expect("records serialize");
        line.push('\n');
        let mut f = f.lock().expect("checkpoint lock");
        f.write_all(line.as_bytes())
            .and_then(|_| f.flush())
            .map_err(|e| CliError::Io(format!("checkpoint write: {e}")))
    }
}

fn corrupt(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::CorruptCheckpoint(format!("{}: {msg}", path.display()))
}

/// Reads an existing checkpoint. A final line without a newline is a write
/// cut short by an interruption and is dropped; anything else malformed is
/// rejected.
fn read_state(path: &Path, header: &Record) -> CliResult<(State, usize)> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let complete = match text.rfind('\n') {
        Some(i) => i + 1,
        None => 0,
    };
    let mut lines = text[..complete].lines();
    let first = lines.next().ok_or_else(|| corrupt(path, "missing header"))?;
    let found: Record = serde_json::from_str(first).map_err(|e| corrupt(path, format!("header: {e}")))?;
    match (&found, header) {
        (Record::Header { version, .. }, _) if version != CHECKPOINT_VERSION => {
            return Err(corrupt(path, format!("version {version}, expected {CHECKPOINT_VERSION}")));
        }
        (Record::Header { .. }, _) if &found != header => {
            return Err(corrupt(path, "written for a different D, parameter set or unit data"));
        }
        (Record::Header { .. }, _) => {}
        _ => return Err(corrupt(path, "first record is not a header")),
    }
    let mut st = State::default();
    for (i, line) in lines.enumerate() {
        let r: Record = serde_json::from_str(line).map_err(|e| corrupt(path, format!("line {}: {e}", i + 2)))?;
        match r {
            Record::Header { .. } => return Err(corrupt(path, format!("line {}: repeated header", i + 2))),
            Record::S1 { s1 } => st.s1 = Some(s1),
            Record::MTest { delta, m } => {
                st.m_tests.insert(delta, m);
            }
            Record::Outcome { outcome } => {
                st.outcomes.insert(outcome.delta.clone(), outcome);
            }
        }
    }
    Ok((st, complete))
}

fn open_log(path: Option<&Path>, header: &Record) -> CliResult<(State, Log)> {
    let Some(path) = path else {
        return Ok((State::default(), Log { file: None }));
    };
    if path.exists() {
        let (st, complete) = read_state(path, header)?;
        let f = OpenOptions::new().write(true).open(path).map_err(|e| io_err(path, e))?;
        f.set_len(complete as u64).map_err(|e| io_err(path, e))?;
        let mut f = OpenOptions::new().append(true).open(path).map_err(|e| io_err(path, e))?;
        f.flush().map_err(|e| io_err(path, e))?;
        Ok((st, Log { file: Some(Mutex::new(f)) }))
    } else {
        let f = File::create(path).map_err(|e| io_err(path, e))?;
        let log = Log { file: Some(Mutex::new(f)) };
        log.append(header)?;
        Ok((State::default(), log))
    }
}

/// Units relevant to `d`, in a canonical order.
fn units_for(d: Int, units: &[UnitRecord]) -> Vec<UnitRecord> {
    let mut v: Vec<UnitRecord> = units.iter().filter(|r| r.d == d).cloned().collect();
    v.sort_by(|a, b| a.delta.cmp(&b.delta));
    v
}

/// The full pipeline for one base field, checkpointing each finished step
/// when `path` is given.
pub fn classify_resumable(
    d: Int,
    params: &Params,
    units: &[UnitRecord],
    path: Option<&Path>,
) -> CliResult<ClassificationReport> {
    if params.m_count == 0 {
        return Err(CliError::Usage("--m-count must be at least 1".into()));
    }
    let f = QuadField::new(d)?;
    let units = units_for(d, units);
    let header = Record::Header {
        version: CHECKPOINT_VERSION.into(),
        d,
        params: params.clone(),
        units: units.clone(),
    };
    let (mut st, log) = open_log(path, &header)?;

    let s1 = match st.s1.take() {
        Some(s1) => s1,
        None => {
            let s1 = enumerate_s1(&f)?;
            log.append(&Record::S1 { s1: s1.clone() })?;
            s1
        }
    };
    check_keys(path, st.m_tests.keys(), s1.candidates.iter().map(|c| &c.delta))?;

    let todo: Vec<&Candidate> = s1
        .candidates
        .iter()
        .filter(|c| !st.m_tests.contains_key(&c.delta))
        .collect();
    let fresh = todo
        .par_iter()
        .map(|c| {
            let m = m_test(&make_order(&f, c.delta.clone())?, params.m_count)?;
            log.append(&Record::MTest {
                delta: c.delta.clone(),
                m: m.clone(),
            })?;
            Ok((c.delta.clone(), m))
        })
        .collect::<CliResult<Vec<_>>>()?;
    st.m_tests.extend(fresh);

    let mut s2 = Vec::new();
    let mut elim = Vec::new();
    for c in &s1.candidates {
        match &st.m_tests[&c.delta] {
            Some(m) => elim.push(Elimination::MTest {
                delta: c.delta.clone(),
                m: m.clone(),
            }),
            None => s2.push(c.clone()),
        }
    }
    check_keys(path, st.outcomes.keys(), s2.iter().map(|c| &c.delta))?;

    let todo: Vec<&Candidate> = s2.iter().filter(|c| !st.outcomes.contains_key(&c.delta)).collect();
    let fresh = todo
        .par_iter()
        .map(|c| {
            let o = process_survivor(&f, &c.delta, &units)?;
            log.append(&Record::Outcome { outcome: o.clone() })?;
            Ok(o)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let outcomes: Vec<FieldOutcome> = st.outcomes.into_values().chain(fresh).collect();
    Ok(assemble(&f, s1, elim, s2, outcomes, params.clone()))
}

/// Every recorded key must belong to the stage it claims to come from.
fn check_keys<'a>(
    path: Option<&Path>,
    recorded: impl Iterator<Item = &'a Quad>,
    allowed: impl Iterator<Item = &'a Quad>,
) -> CliResult<()> {
    let allowed: std::collections::BTreeSet<&Quad> = allowed.collect();
    for k in recorded {
        if !allowed.contains(k) {
            let p = path.map(|p| p.display().to_string()).unwrap_or_default();
            return Err(CliError::CorruptCheckpoint(format!("{p}: record for unexpected delta {k}")));
        }
    }
    Ok(())
}
