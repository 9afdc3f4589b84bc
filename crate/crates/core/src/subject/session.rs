//! Interactive stage stepper: a growing schedule queried against the
//! partial trace up to the current stage.

use std::fmt;
use std::str::FromStr;

use super::{Atom, Judgment, RawSchedule, ScheduleError, SubjectTrace};
use crate::constructions::{brouwer1948_positive, brouwer1948_r, heyting_pair};
use crate::creal::{apart, Apartness, CReal, Verdict};
use crate::numeric::Rational;

/// Stage ceiling of a fresh session.
pub const DEFAULT_SESSION_HORIZON: usize = 64;

/// Sequences a session can show or compare.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceName {
    Zero,
    R1948,
    R1948Positive,
    HeytingR,
    HeytingS,
}

impl FromStr for SequenceName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "0" | "zero" => SequenceName::Zero,
            "r1948" => SequenceName::R1948,
            "r1948pos" | "r1948_positive" => SequenceName::R1948Positive,
            "heyting_r" => SequenceName::HeytingR,
            "heyting_s" => SequenceName::HeytingS,
            other => return Err(format!("unknown sequence `{other}`")),
        })
    }
}

impl fmt::Display for SequenceName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SequenceName::Zero => "0",
            SequenceName::R1948 => "r1948",
            SequenceName::R1948Positive => "r1948pos",
            SequenceName::HeytingR => "heyting_r",
            SequenceName::HeytingS => "heyting_s",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Box { stage: usize, judgment: Judgment },
    TestedBy { stage: usize, atom: Atom },
    Prefix { sequence: SequenceName, atom: Atom, len: usize },
    Apart { left: SequenceName, right: SequenceName, atom: Atom },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Advance,
    /// Records the judgment at the next stage and moves there.
    Inject(Judgment),
    Query(Query),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryAnswer {
    Bool(bool),
    /// The question concerns a stage the session has not reached.
    Unknown { asked: usize, current: usize },
    /// Known approximants; `continues` when the sequence is determined past them.
    Prefix { values: Vec<Rational>, continues: bool },
    Apart(Verdict<Apartness>),
}

impl fmt::Display for QueryAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryAnswer::Bool(b) => write!(f, "{b}"),
            QueryAnswer::Unknown { asked, current } => {
                write!(f, "Unknown (stage {asked} not reached, current stage {current})")
            }
            QueryAnswer::Prefix { values, continues } => {
                let mut parts: Vec<String> = values.iter().map(ToString::to_string).collect();
                if *continues {
                    parts.push("...".into());
                }
                write!(f, "({})", parts.join(", "))
            }
            QueryAnswer::Apart(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub stage: usize,
    pub message: String,
    pub answer: Option<QueryAnswer>,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.answer {
            Some(a) => write!(f, "[stage {}] {}: {a}", self.stage, self.message),
            None => write!(f, "[stage {}] {}", self.stage, self.message),
        }
    }
}

/// Single-owner mutable session.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Session {
    stage: usize,
    schedule: RawSchedule,
}

impl Default for Session {
    fn default() -> Self {
        Self::new(DEFAULT_SESSION_HORIZON)
    }
}

impl Session {
    pub fn new(horizon: usize) -> Self {
        Session { stage: 0, schedule: RawSchedule::new(horizon) }
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn schedule(&self) -> &RawSchedule {
        &self.schedule
    }

    /// Trace of the events so far, cut at the current stage.
    pub fn trace(&self) -> Option<SubjectTrace> {
        if self.stage == 0 {
            return None;
        }
        let mut raw = self.schedule.clone();
        raw.horizon = self.stage;
        Some(SubjectTrace::from_raw(&raw).expect("session keeps its schedule valid"))
    }

    /// Applies one command. A rejected command leaves the session unchanged.
    pub fn step(&mut self, command: Command) -> Result<Report, Vec<ScheduleError>> {
        match command {
            Command::Advance => {
                if self.stage >= self.schedule.horizon {
                    return Err(vec![ScheduleError::StageOutOfRange {
                        judgment: Judgment::affirm("-"),
                        stage: self.stage + 1,
                        horizon: self.schedule.horizon,
                    }]);
                }
                self.stage += 1;
                Ok(self.report("advanced", None))
            }
            Command::Inject(judgment) => {
                let candidate = self.schedule.clone().with(self.stage + 1, judgment.clone());
                super::validate_schedule(&candidate)?;
                self.schedule = candidate;
                self.stage += 1;
                Ok(self.report(format!("recorded {judgment}"), None))
            }
            Command::Query(q) => {
                let message = format!("{q:?}");
                let answer = self.answer(&q);
                Ok(self.report(message, Some(answer)))
            }
        }
    }

    fn report(&self, message: impl Into<String>, answer: Option<QueryAnswer>) -> Report {
        Report { stage: self.stage, message: message.into(), answer }
    }

    fn sequence(&self, name: SequenceName, atom: &Atom) -> Option<CReal> {
        let trace = self.trace()?;
        Some(match name {
            SequenceName::Zero => CReal::zero(),
            SequenceName::R1948 => brouwer1948_r(&trace, atom),
            SequenceName::R1948Positive => brouwer1948_positive(&trace, atom),
            SequenceName::HeytingR => heyting_pair(&trace, atom).0,
            SequenceName::HeytingS => heyting_pair(&trace, atom).1,
        })
    }

    fn answer(&self, q: &Query) -> QueryAnswer {
        let unknown = |asked| QueryAnswer::Unknown { asked, current: self.stage };
        match q {
            Query::Box { stage, judgment } => match self.trace() {
                _ if *stage > self.stage => unknown(*stage),
                None => QueryAnswer::Bool(false),
                Some(t) => QueryAnswer::Bool(t.boxed(*stage, judgment).expect("stage checked")),
            },
            Query::TestedBy { stage, atom } => match self.trace() {
                _ if *stage > self.stage => unknown(*stage),
                None => QueryAnswer::Bool(false),
                Some(t) => QueryAnswer::Bool(t.tested_by(*stage, atom).expect("stage checked")),
            },
            Query::Prefix { sequence, atom, len } => match self.sequence(*sequence, atom) {
                None if *sequence == SequenceName::Zero => {
                    QueryAnswer::Prefix { values: CReal::zero().known_prefix(*len), continues: true }
                }
                None => QueryAnswer::Prefix { values: Vec::new(), continues: false },
                Some(x) => {
                    let values = x.known_prefix(*len);
                    let continues = x.try_term(values.len()).is_some();
                    QueryAnswer::Prefix { values, continues }
                }
            },
            Query::Apart { left, right, atom } => match (self.sequence(*left, atom), self.sequence(*right, atom)) {
                (Some(x), Some(y)) => {
                    QueryAnswer::Apart(apart(&x, &y, self.stage).expect("depth within the current stage"))
                }
                _ => QueryAnswer::Apart(Verdict::Unknown { depth: 0 }),
            },
        }
    }
}
