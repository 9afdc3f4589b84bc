//! Brouwer-Kripke schema witnesses built from subject traces: the basic
//! binary sequence, the at-most-one-1 transform, zigzag coding of a family,
//! species enumerators, and the Wednesday, random and strong variants.
//!
//! Index `n` of a witness sequence corresponds to stage `n + 1`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use crate::creal::Verdict;
use crate::numeric::{pair, unpair, Rational};
use crate::subject::{Atom, Judgment, SubjectTrace};

/// Range of the value chosen by [`random_witness`].
pub const RANDOM_WITNESS_MAX: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BksError {
    #[error("value {value} at index {index} is not 0 or 1")]
    NotBinary { index: usize, value: u8 },
    #[error("code {code} decodes to x = {x}, outside a family of {family}")]
    IndexBeyondFamily { code: usize, x: u64, family: usize },
    #[error("code {code} decodes to k = {k}, beyond sequence {x} of length {len}")]
    IndexBeyondSequence { code: usize, x: u64, k: u64, len: usize },
    #[error("species `{0}` has no member")]
    UninhabitedFixture(String),
    #[error("species `{0}` is not normalized: 0 must be a member from stage 0")]
    NotNormalized(String),
    #[error("kernel approximants {index} and {} coincide", index + 1)]
    RepeatingKernel { index: usize },
}

/// Finite prefix of a 0/1-valued sequence with its origin.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinarySeq {
    values: Vec<u8>,
    provenance: String,
}

impl BinarySeq {
    pub fn new(values: Vec<u8>, provenance: impl Into<String>) -> Result<Self, BksError> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| **v > 1) {
            return Err(BksError::NotBinary { index, value });
        }
        Ok(BinarySeq { values, provenance: provenance.into() })
    }

    fn from_bools(bits: impl IntoIterator<Item = bool>, provenance: impl Into<String>) -> Self {
        BinarySeq { values: bits.into_iter().map(u8::from).collect(), provenance: provenance.into() }
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.values.get(i).copied()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.values.iter().position(|&v| v == 1)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.iter().enumerate().filter(|(_, v)| **v == 1).map(|(i, _)| i)
    }
}

impl fmt::Display for BinarySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `alpha(n) = 1` iff `target` is known at stage `n + 1`; length `H`.
pub fn alpha_from_trace(trace: &SubjectTrace, target: &Judgment) -> BinarySeq {
    let bits = (1..=trace.horizon()).map(|s| trace.boxed(s, target).expect("stage within horizon"));
    BinarySeq::from_bools(bits, format!("alpha({target})"))
}

/// Keeps only the first 1.
pub fn dedup(alpha: &BinarySeq) -> BinarySeq {
    let first = alpha.first_one();
    BinarySeq::from_bools((0..alpha.len()).map(|i| Some(i) == first), format!("dedup {}", alpha.provenance))
}

/// `beta` with `beta(pair(x, k)) = alpha_x(k)` on codes `0..len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Zigzag {
    pub beta: BinarySeq,
    /// Codes that fall outside the family; their value defaults to 0.
    pub flagged: Vec<BksError>,
}

pub fn zigzag_merge(family: &[BinarySeq], len: usize) -> Zigzag {
    let mut flagged = Vec::new();
    let mut values = Vec::with_capacity(len);
    for code in 0..len {
        let (x, k) = unpair(code as u128);
        let v = match family.get(x as usize) {
            None => {
                flagged.push(BksError::IndexBeyondFamily { code, x, family: family.len() });
                0
            }
            Some(a) => a.get(k as usize).unwrap_or_else(|| {
                flagged.push(BksError::IndexBeyondSequence { code, x, k, len: a.len() });
                0
            }),
        };
        values.push(v);
    }
    Zigzag { beta: BinarySeq { values, provenance: format!("zigzag of {} sequences", family.len()) }, flagged }
}

/// Finite species fixture whose membership `x in X` is the atom
/// `{name}_{x}`; an assumed inhabitant is a member from stage 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesFixture {
    pub name: String,
    pub assumed_inhabitant: Option<u64>,
}

impl SpeciesFixture {
    pub fn new(name: impl Into<String>, assumed_inhabitant: Option<u64>) -> Self {
        SpeciesFixture { name: name.into(), assumed_inhabitant }
    }

    pub fn member_atom(&self, x: u64) -> Atom {
        Atom::new(format!("{}_{x}", self.name))
    }

    /// Stage at which `x in X` is first known; 0 for the assumed inhabitant.
    pub fn membership_stage(&self, trace: &SubjectTrace, x: u64) -> Option<usize> {
        if self.assumed_inhabitant == Some(x) {
            return Some(0);
        }
        trace.first_stage(&Judgment::affirm(self.member_atom(x)))
    }

    /// Members known within the horizon among `0..=bound`.
    pub fn members(&self, trace: &SubjectTrace, bound: u64) -> Vec<u64> {
        (0..=bound).filter(|&x| self.membership_stage(trace, x).is_some()).collect()
    }

    /// Every member named by the trace or the assumption, ascending.
    pub fn all_members(&self, trace: &SubjectTrace) -> Vec<u64> {
        let prefix = format!("{}_", self.name);
        let mut out: Vec<u64> = trace
            .schedule()
            .events()
            .filter(|e| e.judgment.kind == crate::subject::JudgmentKind::Affirm)
            .filter_map(|e| e.judgment.atom.as_str().strip_prefix(&prefix)?.parse().ok())
            .chain(self.assumed_inhabitant)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Enumerating map `f(pair(x, k)) = x` if `x in X` is known at stage `k`,
/// else the inhabitant `a`.
#[derive(Clone, Debug)]
pub struct Enumerator {
    trace: SubjectTrace,
    fixture: SpeciesFixture,
    inhabitant: u64,
}

impl Enumerator {
    pub fn inhabitant(&self) -> u64 {
        self.inhabitant
    }

    /// `None` when the code asks about a stage beyond the horizon.
    pub fn eval(&self, code: u128) -> Option<u64> {
        let (x, k) = unpair(code);
        if k as usize > self.trace.horizon() {
            return None;
        }
        let known = self.fixture.membership_stage(&self.trace, x).is_some_and(|s| s <= k as usize);
        Some(if known { x } else { self.inhabitant })
    }

    /// `exists k <= H. f(pair(n, k)) = n`.
    pub fn enumerates(&self, n: u64) -> bool {
        (0..=self.trace.horizon() as u64).any(|k| self.eval(pair(n, k)) == Some(n))
    }

    /// The biconditional `n in X <-> exists k <= H. f(pair(n, k)) = n` for
    /// every `n <= bound`; returns the counterexamples.
    pub fn biconditional_failures(&self, bound: u64) -> Vec<u64> {
        (0..=bound)
            .filter(|&n| self.fixture.membership_stage(&self.trace, n).is_some() != self.enumerates(n))
            .collect()
    }
}

/// Enumerator for an inhabited species; the inhabitant is the assumed one or
/// else the member proved first.
pub fn species_enumerator(trace: &SubjectTrace, fixture: &SpeciesFixture) -> Result<Enumerator, BksError> {
    let inhabitant = fixture
        .all_members(trace)
        .into_iter()
        .min_by_key(|&x| (fixture.membership_stage(trace, x), x))
        .ok_or_else(|| BksError::UninhabitedFixture(fixture.name.clone()))?;
    Ok(Enumerator { trace: trace.clone(), fixture: fixture.clone(), inhabitant })
}

/// Enumerator normalized so that `f(0) = a = 0`, which requires 0 to be a
/// member from stage 0.
pub fn cs_enumerate(trace: &SubjectTrace, fixture: &SpeciesFixture) -> Result<Enumerator, BksError> {
    if fixture.assumed_inhabitant != Some(0) {
        return Err(BksError::NotNormalized(fixture.name.clone()));
    }
    Ok(Enumerator { trace: trace.clone(), fixture: fixture.clone(), inhabitant: 0 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WednesdayOutcome {
    pub position: usize,
    /// `Some(x)` when `position = t(x)`.
    pub term_preimage: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WednesdayViolation {
    NotDeduped { ones: Vec<usize> },
    /// A 1 with no supporting event by its stage.
    Unsupported { position: usize },
    /// A 1 at `t(x)` although the scenario asserts none sits on the range of `t`.
    OnTermRange { position: usize, x: u64 },
}

/// Finite-horizon reading of the Wednesday clause for a deduped `alpha`.
///
/// `t` must satisfy `t(x) >= x` so that range membership of a position `j`
/// is decided by scanning `x <= j`.
pub fn wednesday_check(
    alpha: &BinarySeq,
    t: impl Fn(u64) -> u64,
    trace: &SubjectTrace,
    target: &Judgment,
    assert_avoids_range: bool,
) -> Verdict<WednesdayOutcome, WednesdayViolation> {
    let ones: Vec<usize> = alpha.ones().collect();
    if ones.len() > 1 {
        return Verdict::Refuted(WednesdayViolation::NotDeduped { ones });
    }
    let Some(&position) = ones.first() else {
        return Verdict::Unknown { depth: alpha.len() };
    };
    if trace.first_stage(target).is_none_or(|s| s > position + 1) {
        return Verdict::Refuted(WednesdayViolation::Unsupported { position });
    }
    let term_preimage = (0..=position as u64).find(|&x| t(x) == position as u64);
    match term_preimage {
        Some(x) if assert_avoids_range => Verdict::Refuted(WednesdayViolation::OnTermRange { position, x }),
        _ => Verdict::Established(WednesdayOutcome { position, term_preimage }),
    }
}

/// 0 until `A` is affirmed, then a seeded random `k` in
/// `1..=RANDOM_WITNESS_MAX` held forever. The generator is SplitMix64.
pub fn random_witness(trace: &SubjectTrace, atom: &Atom, seed: u64) -> Vec<u64> {
    let k = SplitMix64::seed_from_u64(seed).random_range(1..=RANDOM_WITNESS_MAX);
    let from = trace.first_stage(&Judgment::affirm(atom.clone()));
    (1..=trace.horizon()).map(|s| if from.is_some_and(|m| m <= s) { k } else { 0 }).collect()
}

/// `alpha(n) = 1` iff `C(k) = C(k + 1)` for some `k < n`, read off a prefix
/// of the conditional checking number `C`. The kernel prefix must never
/// repeat consecutively, or the trigger would fire without evidence.
pub fn bks_plus_from_conditional(c_prefix: &[Rational], kernel_prefix: &[Rational]) -> Result<BinarySeq, BksError> {
    if let Some(index) = kernel_prefix.windows(2).position(|w| w[0] == w[1]) {
        return Err(BksError::RepeatingKernel { index });
    }
    let mut seen = false;
    let bits: Vec<bool> = (0..c_prefix.len())
        .map(|n| {
            if n >= 1 && c_prefix[n - 1] == c_prefix[n] {
                seen = true;
            }
            seen
        })
        .collect();
    Ok(BinarySeq::from_bools(bits, "bks_plus_from_conditional"))
}

/// Finite-horizon verdicts on the schema clauses. Clause 2's universal
/// quantifier is read as "within the horizon", never as a proof of `~A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseReport {
    pub clause1: bool,
    /// No event within H implies alpha is all zeros.
    pub clause2_forward: bool,
    /// alpha all zeros implies no event within H.
    pub clause2_backward: bool,
    /// A 1 at index n implies the event by stage n + 1.
    pub clause3: bool,
    /// Strong form: some 1 iff an event within H.
    pub plus: Option<bool>,
    pub notes: Vec<String>,
}

impl ClauseReport {
    pub fn all_pass(&self) -> bool {
        self.clause1 && self.clause2_forward && self.clause2_backward && self.clause3 && self.plus != Some(false)
    }

    /// Comparable part of the report (clause outcomes only).
    pub fn outcomes(&self) -> (bool, bool, bool, bool, Option<bool>) {
        (self.clause1, self.clause2_forward, self.clause2_backward, self.clause3, self.plus)
    }
}

pub fn verify_bks_clauses(
    alpha: &BinarySeq,
    trace: &SubjectTrace,
    target: &Judgment,
    horizon: usize,
    strong: bool,
) -> ClauseReport {
    let event = trace.first_stage(target).filter(|&s| s <= horizon);
    let all_zero = alpha.first_one().is_none();
    let clause3 = alpha.ones().all(|n| event.is_some_and(|s| s <= n + 1));
    ClauseReport {
        clause1: alpha.values().iter().all(|&v| v <= 1),
        clause2_forward: event.is_some() || all_zero,
        clause2_backward: !all_zero || event.is_none(),
        clause3,
        plus: strong.then_some(!all_zero == event.is_some()),
        notes: vec![format!("clause 2 is read up to horizon {horizon}")],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use crate::subject::{JudgmentKind, RawSchedule};

    fn seq(v: &[u8]) -> BinarySeq {
        BinarySeq::new(v.to_vec(), "test").unwrap()
    }

    fn trace(h: usize, events: &[(usize, &str, JudgmentKind)]) -> SubjectTrace {
        let mut raw = RawSchedule::new(h);
        for &(s, a, k) in events {
            raw = raw.with(s, Judgment::new(a, k));
        }
        SubjectTrace::from_raw(&raw).unwrap()
    }

    use JudgmentKind::*;

    #[test]
    fn alpha_examples() {
        let t = trace(6, &[(3, "A", Affirm)]);
        assert_eq!(alpha_from_trace(&t, &Judgment::affirm("A")).values(), [0, 0, 1, 1, 1, 1]);
        assert_eq!(alpha_from_trace(&trace(4, &[]), &Judgment::affirm("A")).values(), [0, 0, 0, 0]);
        let t = trace(4, &[(2, "A", Refute)]);
        assert_eq!(alpha_from_trace(&t, &Judgment::refute("A")).values(), [0, 1, 1, 1]);
    }

    #[test]
    fn dedup_examples() {
        assert_eq!(dedup(&seq(&[0, 1, 1, 0])).values(), [0, 1, 0, 0]);
        assert_eq!(dedup(&seq(&[0, 0, 0])).values(), [0, 0, 0]);
        assert_eq!(dedup(&seq(&[1, 1, 1])).values(), [1, 0, 0]);
        assert!(BinarySeq::new(vec![0, 2], "bad").is_err());
    }

    #[test]
    fn zigzag_examples() {
        let z = zigzag_merge(&[seq(&[1, 0, 0])], 3);
        assert_eq!(z.beta.get(0), Some(1));
        assert_eq!(z.beta.get(2), Some(0));
        // code 1 is pair(1, 0), outside a one-member family
        assert_eq!(z.flagged, vec![BksError::IndexBeyondFamily { code: 1, x: 1, family: 1 }]);
    }

    #[test]
    fn species_enumerator_example() {
        let t = trace(6, &[(2, "X_5", Affirm)]);
        let f = species_enumerator(&t, &SpeciesFixture::new("X", Some(0))).unwrap();
        assert_eq!(f.eval(pair(5, 2)), Some(5));
        assert_eq!(f.eval(pair(5, 1)), Some(0));
        assert!(f.biconditional_failures(20).is_empty());
        let only = species_enumerator(&trace(4, &[]), &SpeciesFixture::new("X", Some(0))).unwrap();
        assert!((0..200).all(|c| only.eval(c).is_none_or(|v| v == 0)));
        assert_eq!(
            species_enumerator(&trace(4, &[]), &SpeciesFixture::new("X", None)).unwrap_err(),
            BksError::UninhabitedFixture("X".into())
        );
        // without an assumption the earliest proved member serves
        let f = species_enumerator(&trace(6, &[(4, "Y_2", Affirm), (3, "Y_7", Affirm)]), &SpeciesFixture::new("Y", None))
            .unwrap();
        assert_eq!(f.inhabitant(), 7);
    }

    #[test]
    fn cs_enumerate_example() {
        let t = trace(8, &[(4, "X_3", Affirm)]);
        let f = cs_enumerate(&t, &SpeciesFixture::new("X", Some(0))).unwrap();
        assert_eq!(f.eval(pair(3, 4)), Some(3));
        assert!((0..4).all(|m| f.eval(pair(3, m)) == Some(0)));
        assert_eq!(f.eval(0), Some(0));
        assert!(f.biconditional_failures(20).is_empty());
        assert_eq!(
            cs_enumerate(&t, &SpeciesFixture::new("X", Some(1))).unwrap_err(),
            BksError::NotNormalized("X".into())
        );
    }

    #[test]
    fn wednesday_examples() {
        let t = trace(8, &[(2, "A", Affirm)]);
        let target = Judgment::affirm("A");
        let v = wednesday_check(&seq(&[0, 0, 0, 1, 0]), |x| 2 * x, &t, &target, true);
        assert_eq!(v, Verdict::Established(WednesdayOutcome { position: 3, term_preimage: None }));
        let v = wednesday_check(&seq(&[0, 0, 0, 0]), |x| 2 * x, &trace(4, &[]), &target, true);
        assert_eq!(v, Verdict::Unknown { depth: 4 });
        let v = wednesday_check(&seq(&[0, 0, 0, 0, 1]), |x| 2 * x, &t, &target, true);
        assert_eq!(v, Verdict::Refuted(WednesdayViolation::OnTermRange { position: 4, x: 2 }));
        let v = wednesday_check(&seq(&[1, 0]), |x| 2 * x, &t, &target, false);
        assert_eq!(v, Verdict::Refuted(WednesdayViolation::Unsupported { position: 0 }));
    }

    #[test]
    fn random_witness_examples() {
        let a = Atom::from("A");
        assert_eq!(random_witness(&trace(5, &[]), &a, 42), vec![0; 5]);
        let w = random_witness(&trace(6, &[(3, "A", Affirm)]), &a, 42);
        let k = w[2];
        assert!(k > 0);
        assert_eq!(w, [0, 0, k, k, k, k]);
        assert_eq!(w, random_witness(&trace(6, &[(3, "A", Affirm)]), &a, 42));
    }

    #[test]
    fn bks_plus_examples() {
        let kernel: Vec<Rational> = (0..6).map(crate::constructions::sqrt2_convergent).collect();
        let mut c = kernel.clone();
        for v in c.iter_mut().skip(2) {
            *v = rat(7, 5);
        }
        assert_eq!(bks_plus_from_conditional(&c, &kernel).unwrap().values(), [0, 0, 0, 1, 1, 1]);
        assert_eq!(bks_plus_from_conditional(&kernel, &kernel).unwrap().values(), [0; 6]);
        let flat = vec![rat(0, 1); 3];
        assert_eq!(bks_plus_from_conditional(&flat, &flat).unwrap_err(), BksError::RepeatingKernel { index: 0 });
    }

    #[test]
    fn clause_reports() {
        let t = trace(6, &[(3, "A", Affirm)]);
        let target = Judgment::affirm("A");
        let alpha = alpha_from_trace(&t, &target);
        let r = verify_bks_clauses(&alpha, &t, &target, 6, true);
        assert!(r.all_pass());
        assert_eq!(r.outcomes(), verify_bks_clauses(&dedup(&alpha), &t, &target, 6, true).outcomes());
        let spurious = seq(&[0, 1, 0, 0, 0, 0]);
        let r = verify_bks_clauses(&spurious, &t, &target, 6, false);
        assert!(!r.clause3);
        assert!(!r.all_pass());
    }
}
