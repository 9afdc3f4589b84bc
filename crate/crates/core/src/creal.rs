//! Constructive reals as modulus-carrying rational sequences, and
//! certificate-carrying verdicts for their order relations.
//!
//! A [`CReal`] is a map from index to rational together with a modulus
//! `N(p)`: every pair of approximants at indices `>= N(p)` differ by at most
//! `2^-p`. Schedule-driven reals only know their approximants up to the
//! trace horizon unless the governing event has already happened, in which
//! case the clauses fix every later value and the sequence is total.
//!
//! Only positive relations (measurably smaller, apart, positive convergence)
//! are ever `Established`. A search that runs out of data reports
//! `Unknown(depth)`; nothing here upgrades the absence of evidence into a
//! refutation.

use std::collections::HashMap;
use std::convert::Infallible;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::numeric::{dyadic, Rational};

/// Largest precision exponent a certificate search will try.
const PRECISION_CAP: u32 = 256;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CRealError {
    #[error("approximant {index} of `{real}` lies beyond the known horizon ({known} approximants available)")]
    HorizonExhausted { real: String, index: usize, known: usize },
    #[error("term {position} of the stream is {value}; terms must lie in 1..={max}")]
    InvalidTerm { position: usize, value: u64, max: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealKind {
    Lawlike { tag: String },
    ScheduleDriven { construction: String, horizon: usize },
}

type TermFn = dyn Fn(usize) -> Option<Rational> + Send + Sync;
type ModulusFn = dyn Fn(u32) -> usize + Send + Sync;

struct Inner {
    terms: Box<TermFn>,
    modulus: Box<ModulusFn>,
    kind: RealKind,
    memo: Mutex<HashMap<usize, Option<Rational>>>,
}

/// Stage-indexed rational sequence with an explicit convergence modulus.
#[derive(Clone)]
pub struct CReal(Arc<Inner>);

impl fmt::Debug for CReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CReal").field("kind", &self.0.kind).finish_non_exhaustive()
    }
}

/// Modulus shared by every evidence-driven construction: approximants from
/// index `i` on stay within `2^-i+1` of each other, so `N(p) = p + 1`.
pub fn standard_modulus(p: u32) -> usize {
    p as usize + 1
}

/// [`standard_modulus`], cut off at the index from which the sequence is
/// known to be constant.
pub fn frozen_modulus(constant_from: Option<usize>) -> impl Fn(u32) -> usize + Send + Sync + Clone {
    move |p| match constant_from {
        Some(i) => standard_modulus(p).min(i),
        None => standard_modulus(p),
    }
}

impl CReal {
    pub fn lawlike(
        tag: impl Into<String>,
        terms: impl Fn(usize) -> Rational + Send + Sync + 'static,
        modulus: impl Fn(u32) -> usize + Send + Sync + 'static,
    ) -> Self {
        Self::build(RealKind::Lawlike { tag: tag.into() }, move |i| Some(terms(i)), modulus)
    }

    /// `terms` returns `None` for indices the trace cannot yet determine.
    pub fn schedule_driven(
        construction: impl Into<String>,
        horizon: usize,
        terms: impl Fn(usize) -> Option<Rational> + Send + Sync + 'static,
        modulus: impl Fn(u32) -> usize + Send + Sync + 'static,
    ) -> Self {
        Self::build(RealKind::ScheduleDriven { construction: construction.into(), horizon }, terms, modulus)
    }

    fn build(
        kind: RealKind,
        terms: impl Fn(usize) -> Option<Rational> + Send + Sync + 'static,
        modulus: impl Fn(u32) -> usize + Send + Sync + 'static,
    ) -> Self {
        CReal(Arc::new(Inner {
            terms: Box::new(terms),
            modulus: Box::new(modulus),
            kind,
            memo: Mutex::new(HashMap::new()),
        }))
    }

    pub fn constant(q: Rational) -> Self {
        let tag = format!("constant {q}");
        Self::lawlike(tag, move |_| q.clone(), |_| 0)
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn kind(&self) -> &RealKind {
        &self.0.kind
    }

    pub fn name(&self) -> String {
        match &self.0.kind {
            RealKind::Lawlike { tag } => tag.clone(),
            RealKind::ScheduleDriven { construction, .. } => construction.clone(),
        }
    }

    pub fn modulus(&self, p: u32) -> usize {
        (self.0.modulus)(p)
    }

    /// Approximant at `index`, or `None` when the trace does not reach it.
    pub fn try_term(&self, index: usize) -> Option<Rational> {
        let mut memo = self.0.memo.lock().expect("memo lock poisoned");
        memo.entry(index).or_insert_with(|| (self.0.terms)(index)).clone()
    }

    pub fn term(&self, index: usize) -> Result<Rational, CRealError> {
        self.try_term(index).ok_or_else(|| CRealError::HorizonExhausted {
            real: self.name(),
            index,
            known: self.known_len(index),
        })
    }

    fn known_len(&self, upto: usize) -> usize {
        (0..upto).take_while(|&i| self.try_term(i).is_some()).count()
    }

    /// The first `len` approximants; unknown ones are `None`.
    pub fn prefix(&self, len: usize) -> Vec<Option<Rational>> {
        (0..len).map(|i| self.try_term(i)).collect()
    }

    /// Known approximants among the first `len`, stopping at the first gap.
    pub fn known_prefix(&self, len: usize) -> Vec<Rational> {
        (0..len).map_while(|i| self.try_term(i)).collect()
    }

    /// A rational within `2^-p` of the limit.
    pub fn approx(&self, p: u32) -> Result<Rational, CRealError> {
        self.term(self.modulus(p))
    }

    /// Largest `p <= cap` whose modulus index is at most `index`.
    pub fn stable_precision(&self, index: usize, cap: u32) -> Option<u32> {
        if self.modulus(0) > index {
            return None;
        }
        let (mut lo, mut hi) = (0u32, cap);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if self.modulus(mid) <= index {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Some(lo)
    }
}

/// Three-valued answer of a finite-depth search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<E, R = Infallible> {
    Established(E),
    Refuted(R),
    Unknown { depth: usize },
}

impl<E, R> Verdict<E, R> {
    pub fn is_established(&self) -> bool {
        matches!(self, Verdict::Established(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    pub fn established(&self) -> Option<&E> {
        match self {
            Verdict::Established(e) => Some(e),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Established(_) => "established",
            Verdict::Refuted(_) => "refuted",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

impl<E: fmt::Display, R: fmt::Debug> fmt::Display for Verdict<E, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Established(e) => write!(f, "Established({e})"),
            Verdict::Refuted(r) => write!(f, "Refuted({r:?})"),
            Verdict::Unknown { depth } => write!(f, "Unknown({depth})"),
        }
    }
}

/// Witness for `x` measurably smaller than `y`: at `index` the approximant
/// gap exceeds `2^-gap_exponent + 2 * 2^-precision`, and both moduli
/// guarantee `2^-precision` stability from `index` on. Every later pair of
/// approximants therefore differs by more than `2^-gap_exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApartCertificate {
    pub index: usize,
    pub gap_exponent: u32,
    pub precision: u32,
    pub gap: Rational,
}

impl ApartCertificate {
    /// Re-checks the certificate against the two reals.
    pub fn replay(&self, x: &CReal, y: &CReal) -> bool {
        let (Some(xi), Some(yi)) = (x.try_term(self.index), y.try_term(self.index)) else {
            return false;
        };
        let stable = x.modulus(self.precision) <= self.index && y.modulus(self.precision) <= self.index;
        let margin = dyadic(self.gap_exponent) + dyadic(self.precision) * Rational::from_integer(2.into());
        stable && yi - xi == self.gap && self.gap > margin
    }

    /// `2^-gap_exponent`, the certified lower bound on the gap.
    pub fn lower_bound(&self) -> Rational {
        dyadic(self.gap_exponent)
    }
}

impl fmt::Display for ApartCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gap {} at index {} (> 2^-{} + 2*2^-{})", self.gap, self.index, self.gap_exponent, self.precision)
    }
}

/// Side on which `y` lies relative to `x` in an apartness certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `x` measurably smaller than `y`.
    Right,
    /// `y` measurably smaller than `x`.
    Left,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Right => "right",
            Side::Left => "left",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Apartness {
    pub side: Side,
    pub certificate: ApartCertificate,
}

impl fmt::Display for Apartness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}", self.side, self.certificate)
    }
}

/// Searches indices `0..depth` for a margin certificate of `x` measurably
/// smaller than `y`.
pub fn measurably_less(x: &CReal, y: &CReal, depth: usize) -> Result<Verdict<ApartCertificate>, CRealError> {
    for index in 0..depth {
        let gap = y.term(index)? - x.term(index)?;
        if !gap.is_positive() {
            continue;
        }
        let cap = PRECISION_CAP.min(index as u32 + 128);
        let (Some(px), Some(py)) = (x.stable_precision(index, cap), y.stable_precision(index, cap)) else {
            continue;
        };
        let precision = px.min(py);
        let slack = &gap - dyadic(precision) * Rational::from_integer(2.into());
        if !slack.is_positive() {
            continue;
        }
        // smallest n with 2^-n < slack
        let mut gap_exponent = 0u32;
        while dyadic(gap_exponent) >= slack {
            gap_exponent += 1;
        }
        return Ok(Verdict::Established(ApartCertificate { index, gap_exponent, precision, gap }));
    }
    Ok(Verdict::Unknown { depth })
}

/// `x # y`: either side measurably smaller than the other.
pub fn apart(x: &CReal, y: &CReal, depth: usize) -> Result<Verdict<Apartness>, CRealError> {
    if let Verdict::Established(certificate) = measurably_less(x, y, depth)? {
        return Ok(Verdict::Established(Apartness { side: Side::Right, certificate }));
    }
    if let Verdict::Established(certificate) = measurably_less(y, x, depth)? {
        return Ok(Verdict::Established(Apartness { side: Side::Left, certificate }));
    }
    Ok(Verdict::Unknown { depth })
}

/// Precision surrogate for coincidence: the `2^-(p+2)` approximants differ
/// by at most `2^-p`. True implies the limits differ by at most
/// `2^-p + 2^-(p+1)`; it never proves the limits equal.
pub fn coincide_up_to(x: &CReal, y: &CReal, p: u32) -> Result<bool, CRealError> {
    let d = x.approx(p + 2)? - y.approx(p + 2)?;
    Ok(d.abs() <= dyadic(p))
}

/// Finite, eventually periodic stream of positive naturals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatStream {
    prefix: Vec<u64>,
    cycle: Vec<u64>,
}

/// Terms larger than this would produce denominators with more bits than
/// any desk-scale check needs.
pub const MAX_STREAM_TERM: u64 = 1 << 12;

impl NatStream {
    /// `prefix` followed by `cycle` repeated forever. Terms are numbered from 1.
    pub fn new(prefix: Vec<u64>, cycle: Vec<u64>) -> Result<Self, CRealError> {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        for (i, &v) in prefix.iter().chain(cycle.iter()).enumerate() {
            if v == 0 || v > MAX_STREAM_TERM {
                let position = if i < prefix.len() { i + 1 } else { prefix.len() + 1 + (i - prefix.len()) };
                return Err(CRealError::InvalidTerm { position, value: v, max: MAX_STREAM_TERM });
            }
        }
        Ok(NatStream { prefix, cycle })
    }

    pub fn constant(v: u64) -> Result<Self, CRealError> {
        Self::new(vec![], vec![v])
    }

    /// Term `a_i` for `i >= 1`.
    pub fn get(&self, i: usize) -> u64 {
        assert!(i >= 1, "terms are numbered from 1");
        let j = i - 1;
        if j < self.prefix.len() {
            self.prefix[j]
        } else {
            self.cycle[(j - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Copy with term `i` replaced.
    pub fn with_term(&self, i: usize, value: u64) -> Result<Self, CRealError> {
        let mut prefix: Vec<u64> = (1..=i.max(self.prefix.len())).map(|k| self.get(k)).collect();
        prefix[i - 1] = value;
        // realign the cycle after the extended prefix
        let start = prefix.len() - self.prefix.len();
        let cycle: Vec<u64> = (0..self.cycle.len()).map(|k| self.cycle[(start + k) % self.cycle.len()]).collect();
        Self::new(prefix, cycle)
    }
}

impl fmt::Display for NatStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.prefix.iter().map(u64::to_string).collect();
        let c: Vec<String> = self.cycle.iter().map(u64::to_string).collect();
        write!(f, "({}{}({})*)", p.join(","), if p.is_empty() { "" } else { "," }, c.join(","))
    }
}

/// Embeds a choice sequence of positive naturals into the dyadically
/// expandable reals of `(0, 1)`:
/// `f(a) = sum_{i=1}^{a1-1} 2^-i + sum_{m>=2} 2^-(a1+...+am)`.
///
/// Approximant `i` is the partial sum over the first `i` terms; the
/// remainder after `i` terms is at most `2^-(a1+...+ai) <= 2^-i`, so
/// `N(p) = p`.
pub fn dyadic_embed(a: &NatStream) -> CReal {
    let a = a.clone();
    let tag = format!("dyadic_embed{a}");
    CReal::lawlike(
        tag,
        move |i| {
            let mut sum = Rational::zero();
            let mut exp = 0u64;
            for m in 1..=i {
                let am = a.get(m);
                exp += am;
                if m == 1 {
                    sum += Rational::from_integer(1.into()) - dyadic((am - 1) as u32);
                } else {
                    sum += dyadic(exp as u32);
                }
            }
            sum
        },
        |p| p as usize,
    )
}

/// Outcome of a positive-convergence search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    /// `Established(n)`: every inspected `m >= n` is certified within `2^-p`
    /// of the limit, and that tail covers at least half the window.
    pub verdict: Verdict<usize>,
    /// Two tail indices certified more than `2^-p` apart for every candidate
    /// `n`: the inspected window shows no sign of settling.
    pub non_cauchy: Option<(usize, usize)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Cmp {
    Below,
    Above,
    Undecided,
}

/// Compares `|x - y|` against `2^-p` with certified precision.
fn compare_distance(x: &CReal, y: &CReal, p: u32) -> Result<Cmp, CRealError> {
    let bound = dyadic(p);
    for q in (p + 2..=p + 66).step_by(8) {
        let d = (x.approx(q)? - y.approx(q)?).abs();
        let err = dyadic(q) * Rational::from_integer(2.into());
        if &d + &err < bound {
            return Ok(Cmp::Below);
        }
        if &d - &err > bound {
            return Ok(Cmp::Above);
        }
    }
    Ok(Cmp::Undecided)
}

/// `r_m` converges positively to `limit`: searches for `n` such that every
/// inspected `m >= n` satisfies `|limit - r_m| < 2^-p`.
pub fn converges_positively(
    seq: &[CReal],
    limit: &CReal,
    p: u32,
    depth: usize,
) -> Result<ConvergenceReport, CRealError> {
    let window = depth.min(seq.len());
    let below: Vec<bool> =
        seq[..window].iter().map(|r| compare_distance(limit, r, p).map(|c| c == Cmp::Below)).collect::<Result<_, _>>()?;
    let tail_start = below.iter().rposition(|b| !b).map_or(0, |i| i + 1);
    if window > 0 && tail_start < window && tail_start <= window / 2 {
        return Ok(ConvergenceReport { verdict: Verdict::Established(tail_start), non_cauchy: None });
    }
    let non_cauchy = non_cauchy_witness(&seq[..window], p)?;
    Ok(ConvergenceReport { verdict: Verdict::Unknown { depth: window }, non_cauchy })
}

fn non_cauchy_witness(seq: &[CReal], p: u32) -> Result<Option<(usize, usize)>, CRealError> {
    if seq.len() < 2 {
        return Ok(None);
    }
    let mut last = None;
    for n in 0..(seq.len() / 2).max(1) {
        let mut found = None;
        'search: for i in n..seq.len() {
            for j in i + 1..seq.len() {
                if compare_distance(&seq[i], &seq[j], p)? == Cmp::Above {
                    found = Some((i, j));
                    break 'search;
                }
            }
        }
        match found {
            Some(w) => last = last.or(Some(w)),
            None => return Ok(None),
        }
    }
    Ok(last)
}

/// Finite surrogate for negative convergence: `Refuted` with the violating
/// indices when at least half of the inspected terms (rounded up) are
/// certified more than `2^-p` away from the limit.
pub fn negative_convergence_check(
    seq: &[CReal],
    limit: &CReal,
    p: u32,
    depth: usize,
) -> Result<Verdict<Infallible, Vec<usize>>, CRealError> {
    let window = depth.min(seq.len());
    let mut violating = Vec::new();
    for (m, r) in seq[..window].iter().enumerate() {
        if compare_distance(limit, r, p)? == Cmp::Above {
            violating.push(m);
        }
    }
    if window > 0 && violating.len() >= window.div_ceil(2) {
        Ok(Verdict::Refuted(violating))
    } else {
        Ok(Verdict::Unknown { depth: window })
    }
}
