//! The creating subject at desk scale: evidence schedules, the knowledge
//! trace they induce and the stage predicate `box(n, j)`.
//!
//! Stages run `1..=H`; stage 0 is the empty knowledge state. Knowledge is
//! never closed under deduction: a judgment is known at stage `n` exactly
//! when the schedule lists it at some stage `<= n`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod session;

pub use session::{Command, Query, QueryAnswer, Report, SequenceName, Session};

/// Proposition identifier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Atom(pub String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Self {
        Atom(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom(s.to_owned())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JudgmentKind {
    /// Evidence of `A`.
    Affirm,
    /// Evidence of `~A`.
    Refute,
    /// Evidence of `~~A`.
    #[serde(alias = "double_neg", alias = "doublenegation")]
    DoubleNeg,
}

impl JudgmentKind {
    pub const ALL: [JudgmentKind; 3] = [JudgmentKind::Affirm, JudgmentKind::Refute, JudgmentKind::DoubleNeg];
}

impl std::str::FromStr for JudgmentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "affirm" => Ok(JudgmentKind::Affirm),
            "refute" => Ok(JudgmentKind::Refute),
            "doubleneg" | "double_neg" => Ok(JudgmentKind::DoubleNeg),
            other => Err(format!("unknown judgment kind `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Judgment {
    pub atom: Atom,
    pub kind: JudgmentKind,
}

impl Judgment {
    pub fn new(atom: impl Into<Atom>, kind: JudgmentKind) -> Self {
        Judgment { atom: atom.into(), kind }
    }

    pub fn affirm(atom: impl Into<Atom>) -> Self {
        Self::new(atom, JudgmentKind::Affirm)
    }

    pub fn refute(atom: impl Into<Atom>) -> Self {
        Self::new(atom, JudgmentKind::Refute)
    }

    pub fn double_neg(atom: impl Into<Atom>) -> Self {
        Self::new(atom, JudgmentKind::DoubleNeg)
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            JudgmentKind::Affirm => write!(f, "{}", self.atom),
            JudgmentKind::Refute => write!(f, "~{}", self.atom),
            JudgmentKind::DoubleNeg => write!(f, "~~{}", self.atom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Event {
    pub stage: usize,
    #[serde(flatten)]
    pub judgment: Judgment,
}

impl Event {
    pub fn new(stage: usize, judgment: Judgment) -> Self {
        Event { stage, judgment }
    }
}

/// Unvalidated schedule as read from a scenario file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSchedule {
    pub horizon: usize,
    #[serde(default)]
    pub events: Vec<Event>,
}

impl RawSchedule {
    pub fn new(horizon: usize) -> Self {
        RawSchedule { horizon, events: Vec::new() }
    }

    pub fn with(mut self, stage: usize, judgment: Judgment) -> Self {
        self.events.push(Event::new(stage, judgment));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("duplicate event {judgment} (stages {first} and {second})")]
    DuplicateEvent { judgment: Judgment, first: usize, second: usize },
    #[error("contradictory evidence on `{atom}`: {first:?} and {second:?}")]
    ContradictoryEvidence { atom: Atom, first: JudgmentKind, second: JudgmentKind },
    #[error("event {judgment} at stage {stage} lies outside 1..={horizon}")]
    StageOutOfRange { judgment: Judgment, stage: usize, horizon: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("stage {stage} lies beyond horizon {horizon}")]
    StageBeyondHorizon { stage: usize, horizon: usize },
}

/// Validated finite-horizon script of evidence events.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EvidenceSchedule {
    horizon: usize,
    events: BTreeSet<Event>,
}

impl EvidenceSchedule {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.events.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Stage at which `judgment` is scheduled, if at all.
    pub fn stage_of(&self, judgment: &Judgment) -> Option<usize> {
        self.events.iter().find(|e| &e.judgment == judgment).map(|e| e.stage)
    }

    pub fn to_raw(&self) -> RawSchedule {
        RawSchedule { horizon: self.horizon, events: self.events.iter().cloned().collect() }
    }
}

fn contradictory(a: JudgmentKind, b: JudgmentKind) -> bool {
    use JudgmentKind::*;
    matches!((a, b), (Affirm, Refute) | (Refute, Affirm) | (Refute, DoubleNeg) | (DoubleNeg, Refute))
}

/// Checks every schedule invariant and reports all violations at once.
pub fn validate_schedule(raw: &RawSchedule) -> Result<EvidenceSchedule, Vec<ScheduleError>> {
    let mut errors = Vec::new();
    if raw.horizon == 0 {
        errors.push(ScheduleError::EmptyHorizon);
    }
    for e in &raw.events {
        if e.stage == 0 || e.stage > raw.horizon {
            errors.push(ScheduleError::StageOutOfRange {
                judgment: e.judgment.clone(),
                stage: e.stage,
                horizon: raw.horizon,
            });
        }
    }
    for (i, a) in raw.events.iter().enumerate() {
        for b in &raw.events[i + 1..] {
            if a.judgment == b.judgment {
                errors.push(ScheduleError::DuplicateEvent {
                    judgment: a.judgment.clone(),
                    first: a.stage,
                    second: b.stage,
                });
            } else if a.judgment.atom == b.judgment.atom && contradictory(a.judgment.kind, b.judgment.kind) {
                errors.push(ScheduleError::ContradictoryEvidence {
                    atom: a.judgment.atom.clone(),
                    first: a.judgment.kind,
                    second: b.judgment.kind,
                });
            }
        }
    }
    if errors.is_empty() {
        Ok(EvidenceSchedule { horizon: raw.horizon, events: raw.events.iter().cloned().collect() })
    } else {
        Err(errors)
    }
}

/// How an atom was decided, if it was.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Affirmed,
    Refuted,
}

/// Cumulative knowledge per stage `0..=H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubjectTrace {
    schedule: EvidenceSchedule,
    knowledge: Vec<BTreeSet<Judgment>>,
}

pub fn build_trace(schedule: EvidenceSchedule) -> SubjectTrace {
    let mut knowledge = Vec::with_capacity(schedule.horizon + 1);
    let mut acc = BTreeSet::new();
    for stage in 0..=schedule.horizon {
        acc.extend(schedule.events.iter().filter(|e| e.stage == stage).map(|e| e.judgment.clone()));
        knowledge.push(acc.clone());
    }
    SubjectTrace { schedule, knowledge }
}

impl SubjectTrace {
    /// Validates and builds in one step.
    pub fn from_raw(raw: &RawSchedule) -> Result<Self, Vec<ScheduleError>> {
        validate_schedule(raw).map(build_trace)
    }

    /// Trace of the empty schedule.
    pub fn empty(horizon: usize) -> Self {
        Self::from_raw(&RawSchedule::new(horizon.max(1))).expect("empty schedule is valid")
    }

    pub fn horizon(&self) -> usize {
        self.schedule.horizon
    }

    pub fn schedule(&self) -> &EvidenceSchedule {
        &self.schedule
    }

    pub fn knowledge(&self, stage: usize) -> Result<&BTreeSet<Judgment>, TraceError> {
        self.knowledge
            .get(stage)
            .ok_or(TraceError::StageBeyondHorizon { stage, horizon: self.horizon() })
    }

    /// `box_n j`: has `j` been made evident by stage `n`?
    pub fn boxed(&self, stage: usize, judgment: &Judgment) -> Result<bool, TraceError> {
        Ok(self.knowledge(stage)?.contains(judgment))
    }

    /// Has `atom` been tested (refuted or doubly negated) by stage `n`?
    pub fn tested_by(&self, stage: usize, atom: &Atom) -> Result<bool, TraceError> {
        let k = self.knowledge(stage)?;
        Ok(k.contains(&Judgment::refute(atom.clone())) || k.contains(&Judgment::double_neg(atom.clone())))
    }

    /// First stage at which `judgment` is known.
    pub fn first_stage(&self, judgment: &Judgment) -> Option<usize> {
        self.schedule.stage_of(judgment)
    }

    /// First stage at which `atom` was tested.
    pub fn test_stage(&self, atom: &Atom) -> Option<usize> {
        [JudgmentKind::Refute, JudgmentKind::DoubleNeg]
            .iter()
            .filter_map(|&k| self.first_stage(&Judgment::new(atom.clone(), k)))
            .min()
    }

    /// Stage and polarity of the first Affirm or Refute event on `atom`.
    pub fn decision(&self, atom: &Atom) -> Option<(usize, Polarity)> {
        let a = self.first_stage(&Judgment::affirm(atom.clone())).map(|s| (s, Polarity::Affirmed));
        let r = self.first_stage(&Judgment::refute(atom.clone())).map(|s| (s, Polarity::Refuted));
        match (a, r) {
            (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
            (x, y) => x.or(y),
        }
    }
}

/// Every valid schedule on one atom with the given horizon: the empty one,
/// every single event and every Affirm+DoubleNeg pair.
pub fn one_atom_schedules(atom: &Atom, horizon: usize) -> Vec<EvidenceSchedule> {
    let mut out = vec![validate_schedule(&RawSchedule::new(horizon)).expect("empty")];
    for stage in 1..=horizon {
        for kind in JudgmentKind::ALL {
            out.push(
                validate_schedule(&RawSchedule::new(horizon).with(stage, Judgment::new(atom.clone(), kind)))
                    .expect("single event"),
            );
        }
    }
    for s1 in 1..=horizon {
        for s2 in 1..=horizon {
            let raw = RawSchedule::new(horizon)
                .with(s1, Judgment::affirm(atom.clone()))
                .with(s2, Judgment::double_neg(atom.clone()));
            out.push(validate_schedule(&raw).expect("affirm and doubleneg coexist"));
        }
    }
    out
}

/// Cartesian product of [`one_atom_schedules`] over several atoms.
pub fn multi_atom_schedules(atoms: &[Atom], horizon: usize) -> Vec<EvidenceSchedule> {
    let mut acc = vec![RawSchedule::new(horizon)];
    for atom in atoms {
        let per_atom = one_atom_schedules(atom, horizon);
        acc = acc
            .iter()
            .flat_map(|base| {
                per_atom.iter().map(move |s| {
                    let mut raw = base.clone();
                    raw.events.extend(s.events().cloned());
                    raw
                })
            })
            .collect();
    }
    acc.iter().map(|r| validate_schedule(r).expect("atoms are independent")).collect()
}
