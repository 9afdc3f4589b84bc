//! Exact-arithmetic laboratory for creating-subject constructions:
//! evidence schedules, stage-indexed choice sequences with certified order
//! verdicts, Brouwer-Kripke schema witnesses and a stage-logic model checker.

pub mod bks;
pub mod constructions;
pub mod creal;
pub mod logic;
pub mod numeric;
pub mod subject;

pub use creal::{ApartCertificate, Apartness, CReal, CRealError, RealKind, Side, Verdict};
pub use numeric::{dyadic, pair, unpair, Bounds, Rational};
pub use subject::{Atom, EvidenceSchedule, Judgment, JudgmentKind, RawSchedule, SubjectTrace};
