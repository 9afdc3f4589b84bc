//! Evidence-driven sequences generated from a [`SubjectTrace`], the `omega`
//! bump family with its tangent geometry, and the realignment sequence used
//! for negative continuity.
//!
//! Timing: an event at stage `m` first changes the value at 0-based index
//! `m - 1`, i.e. the `m`-th choice. Approximant `i` therefore reads the
//! knowledge state of stage `i + 1`.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::creal::{frozen_modulus, CReal, CRealError};
use crate::numeric::{dyadic, int, neg_half_pow, rat, sqrt_bounds, Bounds, Rational};
use crate::subject::{Atom, Judgment, Polarity, SubjectTrace};

/// Bits of precision for irrational `omega` values.
pub const OMEGA_BITS: u32 = 40;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("two-sided checking needs a two-winged drift")]
    WingMismatch,
    #[error("at most one alignment decision is allowed, got {0}")]
    MultipleAlignments(usize),
    #[error("alignment target r_{0} is not in the family")]
    UnknownMember(usize),
    #[error("alignment stage {stage} lies outside 1..={horizon}")]
    AlignmentOutOfRange { stage: usize, horizon: usize },
    #[error("omega index must be positive")]
    InvalidNu,
    #[error("difference quotient over a degenerate interval")]
    DegenerateInterval,
    #[error("value at x = {x} depends on omega_{nu}, beyond inspected depth {depth}")]
    BeyondDepth { x: Rational, nu: u32, depth: usize },
    #[error("depth {depth} exceeds trace horizon {horizon}")]
    DepthBeyondHorizon { depth: usize, horizon: usize },
    #[error("counting number c_{index} is not certified apart from {other}")]
    NotApart { index: usize, other: String },
    #[error("counting number c_{index} lies on the wrong side of the kernel")]
    WrongSide { index: usize },
    #[error("fleeing property declares critical number {declared} but its predicate disagrees at {at}")]
    CriticalMismatch { declared: u64, at: u64 },
    #[error(transparent)]
    Real(#[from] CRealError),
}

fn signed_dyadic(m: usize, polarity: Polarity) -> Rational {
    let v = dyadic(m as u32);
    match polarity {
        Polarity::Affirmed => v,
        Polarity::Refuted => -v,
    }
}

/// Sequence that is 0 while neither `A` nor `~A` is known and freezes at
/// `2^-m` (evidence of `A` at stage `m`) or `-2^-m` (evidence of `~A`).
/// DoubleNeg events are ignored.
pub fn brouwer1948_r(trace: &SubjectTrace, atom: &Atom) -> CReal {
    sign_frozen_sequence("brouwer1948_r", trace, atom, false)
}

/// Variant where evidence of `~A` also freezes at `+2^-m`.
pub fn brouwer1948_positive(trace: &SubjectTrace, atom: &Atom) -> CReal {
    sign_frozen_sequence("brouwer1948_positive", trace, atom, true)
}

fn sign_frozen_sequence(name: &str, trace: &SubjectTrace, atom: &Atom, always_positive: bool) -> CReal {
    let horizon = trace.horizon();
    let decision = trace.decision(atom).map(|(m, pol)| if always_positive { (m, Polarity::Affirmed) } else { (m, pol) });
    CReal::schedule_driven(
        format!("{name}({atom})"),
        horizon,
        move |i| {
            let stage = i + 1;
            match decision {
                Some((m, pol)) if m <= stage => Some(signed_dyadic(m, pol)),
                _ if stage <= horizon => Some(Rational::zero()),
                _ => None,
            }
        },
        frozen_modulus(decision.map(|(m, _)| m - 1)),
    )
}

/// The pair `(r, s)` keyed on the first stage `m` at which `A` was tested.
///
/// `r` follows `2^-n` and freezes at `2^-m`. `s` follows `2^-n` as well; it
/// freezes at `2^-m` when `m` is even and keeps following `2^-n` when `m` is
/// odd, so `s` is apart from 0 exactly in the even case.
pub fn heyting_pair(trace: &SubjectTrace, atom: &Atom) -> (CReal, CReal) {
    let horizon = trace.horizon();
    let tested = trace.test_stage(atom);
    let r = CReal::schedule_driven(
        format!("heyting_r({atom})"),
        horizon,
        move |i| {
            let n = i + 1;
            match tested {
                Some(m) if m <= n => Some(dyadic(m as u32)),
                _ if n <= horizon => Some(dyadic(n as u32)),
                _ => None,
            }
        },
        frozen_modulus(tested.map(|m| m - 1)),
    );
    let s_frozen = tested.filter(|m| m % 2 == 0).map(|m| m - 1);
    let s = CReal::schedule_driven(
        format!("heyting_s({atom})"),
        horizon,
        move |i| {
            let n = i + 1;
            match tested {
                Some(m) if m <= n && m % 2 == 0 => Some(dyadic(m as u32)),
                Some(m) if m <= n => Some(dyadic(n as u32)),
                _ if n <= horizon => Some(dyadic(n as u32)),
                _ => None,
            }
        },
        frozen_modulus(s_frozen),
    );
    (r, s)
}

type CountingFn = Arc<dyn Fn(usize) -> Rational + Send + Sync>;
type IndexFn = Arc<dyn Fn(u32) -> usize + Send + Sync>;

/// Side(s) of the kernel on which the counting numbers lie.
#[derive(Clone)]
pub enum Wings {
    Left,
    Right,
    Two { left: CountingFn, right: CountingFn },
}

impl fmt::Debug for Wings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Wings::Left => "Left",
            Wings::Right => "Right",
            Wings::Two { .. } => "Two",
        })
    }
}

/// A kernel real together with rational counting numbers `c_n` (numbered
/// from 1) that are apart from it and converge to it.
#[derive(Clone)]
pub struct Drift {
    name: String,
    kernel: CReal,
    counting: CountingFn,
    wings: Wings,
    convergence: IndexFn,
}

impl fmt::Debug for Drift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Drift").field("name", &self.name).field("wings", &self.wings).finish_non_exhaustive()
    }
}

/// Number of counting numbers certified when a drift is built.
pub const DRIFT_CHECKED_TERMS: usize = 8;
const DRIFT_CHECK_DEPTH: usize = 160;

impl Drift {
    /// `convergence(p)` is an index `n0` with `|c_n - kernel| <= 2^-p` for
    /// all `n >= n0`. For a two-winged drift, `counting` should be the
    /// right wing; the wings are certified separately.
    pub fn new(
        name: impl Into<String>,
        kernel: CReal,
        counting: impl Fn(usize) -> Rational + Send + Sync + 'static,
        wings: Wings,
        convergence: impl Fn(u32) -> usize + Send + Sync + 'static,
    ) -> Result<Self, ConstructionError> {
        let drift = Drift {
            name: name.into(),
            kernel,
            counting: Arc::new(counting),
            wings,
            convergence: Arc::new(convergence),
        };
        drift.certify()?;
        Ok(drift)
    }

    fn certify(&self) -> Result<(), ConstructionError> {
        let check = |c: &CountingFn, side: Option<crate::creal::Side>| -> Result<(), ConstructionError> {
            let mut seen: Vec<Rational> = Vec::new();
            for n in 1..=DRIFT_CHECKED_TERMS {
                let v = c(n);
                let verdict = crate::creal::apart(&self.kernel, &CReal::constant(v.clone()), DRIFT_CHECK_DEPTH)?;
                match verdict.established() {
                    None => return Err(ConstructionError::NotApart { index: n, other: "the kernel".into() }),
                    Some(a) if side.is_some_and(|s| s != a.side) => {
                        return Err(ConstructionError::WrongSide { index: n })
                    }
                    _ => {}
                }
                if let Some(k) = seen.iter().position(|w| *w == v) {
                    return Err(ConstructionError::NotApart { index: n, other: format!("c_{}", k + 1) });
                }
                seen.push(v);
            }
            Ok(())
        };
        use crate::creal::Side;
        match &self.wings {
            Wings::Left => check(&self.counting, Some(Side::Left)),
            Wings::Right => check(&self.counting, Some(Side::Right)),
            Wings::Two { left, right } => {
                check(left, Some(Side::Left))?;
                check(right, Some(Side::Right))
            }
        }
    }

    /// Kernel 0 with counting numbers `2^-n`.
    pub fn dyadic_right() -> Self {
        Self::new("dyadic_right", CReal::zero(), |n| dyadic(n as u32), Wings::Right, |p| p as usize)
            .expect("2^-n is apart from 0")
    }

    /// Kernel 0 with wings `l_n = -2^-n`, `d_n = 2^-n`.
    pub fn dyadic_two_winged() -> Self {
        let left: CountingFn = Arc::new(|n| -dyadic(n as u32));
        let right: CountingFn = Arc::new(|n| dyadic(n as u32));
        Self::new("dyadic_two_winged", CReal::zero(), |n| dyadic(n as u32), Wings::Two { left, right }, |p| p as usize)
            .expect("+-2^-n are apart from 0")
    }

    /// Irrational kernel `sqrt 2` (continued-fraction convergents). The
    /// convergents alternate around the kernel: even ones form the left
    /// wing, odd ones the right wing and the counting numbers.
    pub fn sqrt2_convergents() -> Self {
        let left: CountingFn = Arc::new(|n| sqrt2_convergent(2 * n));
        let right: CountingFn = Arc::new(|n| sqrt2_convergent(2 * n - 1));
        Self::new("sqrt2", sqrt2(), |n| sqrt2_convergent(2 * n - 1), Wings::Two { left, right }, |p| {
            (p as usize).div_ceil(4) + 1
        })
        .expect("convergents are apart from sqrt 2")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kernel(&self) -> &CReal {
        &self.kernel
    }

    pub fn wings(&self) -> &Wings {
        &self.wings
    }

    /// Counting number `c_n`, `n >= 1`.
    pub fn counting(&self, n: usize) -> Rational {
        (self.counting)(n)
    }

    fn undecided_modulus(&self) -> impl Fn(u32) -> usize + Send + Sync + Clone {
        let kernel = self.kernel.clone();
        let convergence = self.convergence.clone();
        move |p| kernel.modulus(p + 1).max(convergence(p + 1).saturating_sub(1))
    }
}

/// `k`-th continued-fraction convergent of `sqrt 2`: 1, 3/2, 7/5, 17/12, ...
pub fn sqrt2_convergent(k: usize) -> Rational {
    let (mut p, mut q) = (num_bigint::BigInt::one(), num_bigint::BigInt::one());
    for _ in 0..k {
        let np = &p + &q * 2;
        let nq = &p + &q;
        p = np;
        q = nq;
    }
    Rational::new(p, q)
}

/// `sqrt 2` as a lawlike real. Convergent `k` is within `1/(q_k q_(k+1))`
/// of the limit and `q_k >= 2^(k-1)`, so `N(p) = p`.
pub fn sqrt2() -> CReal {
    CReal::lawlike("sqrt2", sqrt2_convergent, |p| p as usize)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Trigger {
    Either,
    AffirmOnly,
}

fn checking_number(
    name: &str,
    drift: &Drift,
    trace: &SubjectTrace,
    atom: &Atom,
    trigger: Trigger,
    pick: impl Fn(usize, Polarity) -> Rational + Send + Sync + 'static,
) -> CReal {
    let horizon = trace.horizon();
    let decision = match trigger {
        Trigger::Either => trace.decision(atom),
        Trigger::AffirmOnly => trace.first_stage(&Judgment::affirm(atom.clone())).map(|m| (m, Polarity::Affirmed)),
    };
    let kernel = drift.kernel.clone();
    let frozen = decision.map(|(m, pol)| (m, pick(m, pol)));
    let undecided = drift.undecided_modulus();
    let freeze_at = decision.map(|(m, _)| m - 1);
    CReal::schedule_driven(
        format!("{name}({}, {atom})", drift.name),
        horizon,
        move |i| {
            let stage = i + 1;
            match &frozen {
                Some((m, v)) if *m <= stage => Some(v.clone()),
                _ if stage <= horizon => kernel.try_term(i),
                _ => None,
            }
        },
        move |p| match freeze_at {
            Some(f) => undecided(p).min(f),
            None => undecided(p),
        },
    )
}

/// Follows the kernel until `A` or `~A` becomes evident at stage `m`, then
/// freezes at `c_m`.
pub fn direct_checking(drift: &Drift, trace: &SubjectTrace, atom: &Atom) -> CReal {
    let counting = drift.counting.clone();
    checking_number("direct_checking", drift, trace, atom, Trigger::Either, move |m, _| counting(m))
}

/// As [`direct_checking`] but only evidence of `A` triggers the freeze.
pub fn conditional_checking(drift: &Drift, trace: &SubjectTrace, atom: &Atom) -> CReal {
    let counting = drift.counting.clone();
    checking_number("conditional_checking", drift, trace, atom, Trigger::AffirmOnly, move |m, _| counting(m))
}

/// Freezes at the right wing `d_m` on evidence of `A` and at the left wing
/// `l_m` on evidence of `~A`.
pub fn two_sided_checking(drift: &Drift, trace: &SubjectTrace, atom: &Atom) -> Result<CReal, ConstructionError> {
    let Wings::Two { left, right } = drift.wings.clone() else {
        return Err(ConstructionError::WingMismatch);
    };
    Ok(checking_number("two_sided_checking", drift, trace, atom, Trigger::Either, move |m, pol| match pol {
        Polarity::Affirmed => right(m),
        Polarity::Refuted => left(m),
    }))
}

/// Decidable predicate on the naturals whose first witness (if any) is the
/// critical number.
#[derive(Clone)]
pub struct FleeingProperty {
    name: String,
    predicate: Arc<dyn Fn(u64) -> bool + Send + Sync>,
    declared_critical: Option<u64>,
}

impl fmt::Debug for FleeingProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FleeingProperty")
            .field("name", &self.name)
            .field("declared_critical", &self.declared_critical)
            .finish_non_exhaustive()
    }
}

impl FleeingProperty {
    pub fn new(
        name: impl Into<String>,
        predicate: impl Fn(u64) -> bool + Send + Sync + 'static,
        declared_critical: Option<u64>,
    ) -> Result<Self, ConstructionError> {
        let fp = FleeingProperty { name: name.into(), predicate: Arc::new(predicate), declared_critical };
        if let Some(k) = declared_critical {
            if let Some(at) = (0..=k).find(|&i| fp.holds(i) != (i == k)) {
                return Err(ConstructionError::CriticalMismatch { declared: k, at });
            }
        }
        Ok(fp)
    }

    /// Holds from `k` on; critical number `k`.
    pub fn with_critical(k: u64) -> Self {
        Self::new(format!("critical@{k}"), move |i| i >= k, Some(k)).expect("consistent by construction")
    }

    /// Never holds.
    pub fn never() -> Self {
        Self::new("never", |_| false, None).expect("no declaration")
    }

    pub fn holds(&self, i: u64) -> bool {
        (self.predicate)(i)
    }

    pub fn declared_critical(&self) -> Option<u64> {
        self.declared_critical
    }

    /// First witness `<= bound`, found by scanning.
    pub fn first_witness(&self, bound: u64) -> Option<u64> {
        (0..=bound).find(|&i| self.holds(i))
    }
}

/// `c_v = (-1/2)^k1` once the first witness `k1 <= v` exists, otherwise
/// `(-1/2)^v`. Index `v` holds `c_v` (so index 0 holds 1 unless `k1 = 0`).
///
/// For the property of the first `0123456789` block in the decimal digits of
/// pi the critical number is 17,387,594,880; here the property is a
/// parameter and only its values up to `horizon` are consulted.
pub fn fleeing_sequence_1924(fp: &FleeingProperty, horizon: usize) -> CReal {
    let witness = fp.first_witness(horizon as u64);
    let fp = fp.clone();
    CReal::schedule_driven(
        format!("fleeing_1924({})", fp.name),
        horizon,
        move |v| match witness {
            Some(k1) if (k1 as usize) <= v => Some(neg_half_pow(k1 as u32)),
            _ if v <= horizon => Some(neg_half_pow(v as u32)),
            _ => None,
        },
        frozen_modulus(witness.map(|k| k as usize)),
    )
}

fn omega_radicand(nu: u32, s: &Rational) -> Rational {
    Rational::from_integer(3.into()) * dyadic(nu) * s - s * s - dyadic(2 * nu - 1)
}

fn omega_support(nu: u32, s: &Rational) -> bool {
    &dyadic(nu) <= s && s <= &dyadic(nu - 1)
}

/// `omega_nu(x)`: zero outside `+-[2^-nu, 2^(1-nu)]`, and
/// `sqrt(3 2^-nu |x| - x^2 - 2^(1-2nu))` inside. Exact when the radicand is a
/// rational square, otherwise bracketed to `2^-40`.
pub fn omega(nu: u32, x: &Rational) -> Result<Bounds, ConstructionError> {
    if nu == 0 {
        return Err(ConstructionError::InvalidNu);
    }
    let s = x.abs();
    if !omega_support(nu, &s) {
        return Ok(Bounds::zero());
    }
    let radicand = omega_radicand(nu, &s);
    assert!(!radicand.is_negative(), "negative radicand inside the support of omega_{nu}");
    Ok(sqrt_bounds(&radicand, OMEGA_BITS))
}

/// Indices `nu` whose support contains `|x|` (at most two, and two only at a
/// shared endpoint where both vanish).
fn omega_candidates(x: &Rational) -> Vec<u32> {
    let s = x.abs();
    if s.is_zero() || s > int(1) {
        return Vec::new();
    }
    let mut nu = 1u32;
    while dyadic(nu) > s {
        nu += 1;
    }
    // 2^-nu <= s <= 2^(1-nu)
    let mut out = vec![nu];
    if s == dyadic(nu) {
        out.push(nu + 1);
    }
    out
}

/// `sum_nu omega_nu(x)` over every `nu`, or only `nu <= nu_max`.
pub fn omega_sum(x: &Rational, nu_max: Option<u32>) -> Bounds {
    omega_candidates(x)
        .into_iter()
        .filter(|&nu| nu_max.is_none_or(|m| nu <= m))
        .map(|nu| omega(nu, x).expect("nu >= 1"))
        .fold(Bounds::zero(), |acc, b| &acc + &b)
}

/// `Z(x) = sum_nu zeta(nu)(x)` where `zeta(nu) = omega_nu` until `A` or `~A`
/// becomes evident at stage `m`, and the zero function for `nu >= m`.
pub fn z_eval(trace: &SubjectTrace, atom: &Atom, x: &Rational, depth: usize) -> Result<Bounds, ConstructionError> {
    if depth > trace.horizon() {
        return Err(ConstructionError::DepthBeyondHorizon { depth, horizon: trace.horizon() });
    }
    let decided = trace.decision(atom).map(|(m, _)| m).filter(|&m| m <= depth);
    let mut total = Bounds::zero();
    for nu in omega_candidates(x) {
        let zeroed = decided.is_some_and(|m| nu as usize >= m);
        if zeroed {
            continue;
        }
        if nu as usize > depth {
            return Err(ConstructionError::BeyondDepth { x: x.clone(), nu, depth });
        }
        total = &total + &omega(nu, x)?;
    }
    Ok(total)
}

/// Touch point and slope of the tangent from the origin to `omega_nu`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tangency {
    pub abscissa: Rational,
    pub slope: Bounds,
}

/// Maximises `omega_nu(x) / x` over the positive support by ternary search
/// on the exactly evaluated squared ratio `radicand(x) / x^2`.
pub fn tangency_search(nu: u32, resolution: &Rational) -> Result<Tangency, ConstructionError> {
    if nu == 0 {
        return Err(ConstructionError::InvalidNu);
    }
    let floor = dyadic(40);
    let resolution = if resolution < &floor { floor } else { resolution.clone() };
    let ratio = |x: &Rational| omega_radicand(nu, x) / (x * x);
    let (mut lo, mut hi) = (dyadic(nu), dyadic(nu - 1));
    let (three_eighths, five_eighths) = (rat(3, 8), rat(5, 8));
    while &hi - &lo > resolution {
        let w = &hi - &lo;
        let m1 = &lo + &w * &three_eighths;
        let m2 = &lo + &w * &five_eighths;
        if ratio(&m1) < ratio(&m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let abscissa = (&lo + &hi) / int(2);
    let slope = sqrt_bounds(&ratio(&abscissa), OMEGA_BITS);
    Ok(Tangency { abscissa, slope })
}

/// `(f(b) - f(a)) / (b - a)` in interval arithmetic.
pub fn difference_quotient<F>(f: F, a: &Rational, b: &Rational) -> Result<Bounds, ConstructionError>
where
    F: Fn(&Rational) -> Result<Bounds, ConstructionError>,
{
    if a == b {
        return Err(ConstructionError::DegenerateInterval);
    }
    let rise = &f(b)? - &f(a)?;
    Ok(rise.scale(&(Rational::one() / (b - a))))
}

/// Target of the single free alignment decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlignTarget {
    Base,
    Member(usize),
}

/// The decision made at the choice of `r_omega(stage)`: indices `>= stage`
/// copy the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alignment {
    pub stage: usize,
    pub target: AlignTarget,
}

/// `r_omega`: copies `base` until the (at most one) alignment decision, then
/// copies the chosen sequence. Without a decision the approximants are only
/// known through `horizon`.
pub fn negcont_r_omega(
    base: &CReal,
    family: &[CReal],
    decisions: &[Alignment],
    horizon: usize,
) -> Result<CReal, ConstructionError> {
    if decisions.len() > 1 {
        return Err(ConstructionError::MultipleAlignments(decisions.len()));
    }
    let decision = decisions.first().copied();
    let target = match decision {
        None => None,
        Some(Alignment { stage, .. }) if stage == 0 || stage > horizon => {
            return Err(ConstructionError::AlignmentOutOfRange { stage, horizon })
        }
        Some(Alignment { stage, target: AlignTarget::Base }) => Some((stage, base.clone())),
        Some(Alignment { stage, target: AlignTarget::Member(k) }) => {
            let r = family.get(k).ok_or(ConstructionError::UnknownMember(k))?;
            Some((stage, r.clone()))
        }
    };
    let base = base.clone();
    let modulus_target = target.clone();
    let modulus_base = base.clone();
    Ok(CReal::schedule_driven(
        "negcont_r_omega",
        horizon,
        move |i| match &target {
            Some((k, t)) if i >= *k => t.try_term(i),
            _ if i < horizon => base.try_term(i),
            _ => None,
        },
        move |p| match &modulus_target {
            Some((k, t)) => t.modulus(p).max(*k),
            None => modulus_base.modulus(p),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::creal::{apart, coincide_up_to, measurably_less, Side, Verdict};
    use crate::subject::{JudgmentKind, RawSchedule};

    fn a() -> Atom {
        Atom::from("A")
    }

    fn trace(h: usize, events: &[(usize, JudgmentKind)]) -> SubjectTrace {
        let mut raw = RawSchedule::new(h);
        for &(s, k) in events {
            raw = raw.with(s, Judgment::new("A", k));
        }
        SubjectTrace::from_raw(&raw).unwrap()
    }

    fn known(x: &CReal, n: usize) -> Vec<Rational> {
        x.known_prefix(n)
    }

    use JudgmentKind::*;

    #[test]
    fn r1948_examples() {
        assert_eq!(known(&brouwer1948_r(&trace(8, &[]), &a()), 20), vec![int(0); 8]);
        let r = brouwer1948_r(&trace(8, &[(3, Affirm)]), &a());
        assert_eq!(known(&r, 5), [int(0), int(0), rat(1, 8), rat(1, 8), rat(1, 8)]);
        let r = brouwer1948_r(&trace(8, &[(2, Refute)]), &a());
        assert_eq!(known(&r, 4), [int(0), rat(-1, 4), rat(-1, 4), rat(-1, 4)]);
        // DoubleNeg is ignored
        let r = brouwer1948_r(&trace(8, &[(2, DoubleNeg)]), &a());
        assert_eq!(known(&r, 20), vec![int(0); 8]);
    }

    #[test]
    fn r1948_verdicts() {
        let zero = CReal::zero();
        let r = brouwer1948_r(&trace(10, &[(3, Affirm)]), &a());
        let cert = measurably_less(&zero, &r, 10).unwrap();
        let c = cert.established().unwrap();
        assert!(c.replay(&zero, &r));
        assert_eq!(c.gap, rat(1, 8));
        assert!(matches!(apart(&zero, &r, 10).unwrap(), Verdict::Established(ref x) if x.side == Side::Right));
        assert_eq!(r.approx(5).unwrap(), rat(1, 8));
        assert!(coincide_up_to(&r, &CReal::constant(rat(1, 8)), 20).unwrap());

        let r = brouwer1948_r(&trace(10, &[(2, Refute)]), &a());
        match apart(&zero, &r, 10).unwrap() {
            Verdict::Established(x) => {
                assert_eq!(x.side, Side::Left);
                assert_eq!(x.certificate.gap, rat(1, 4));
            }
            v => panic!("{v:?}"),
        }

        let r = brouwer1948_r(&trace(10, &[]), &a());
        assert_eq!(measurably_less(&zero, &r, 10).unwrap(), Verdict::Unknown { depth: 10 });
        assert!(matches!(measurably_less(&zero, &r, 11), Err(CRealError::HorizonExhausted { index: 10, .. })));
    }

    #[test]
    fn positive_variant() {
        let r = brouwer1948_positive(&trace(6, &[(2, Refute)]), &a());
        assert_eq!(known(&r, 3), [int(0), rat(1, 4), rat(1, 4)]);
        let t = trace(6, &[(3, Affirm)]);
        assert_eq!(known(&brouwer1948_positive(&t, &a()), 10), known(&brouwer1948_r(&t, &a()), 10));
        assert_eq!(known(&brouwer1948_positive(&trace(6, &[]), &a()), 10), vec![int(0); 6]);
    }

    #[test]
    fn heyting_examples() {
        let (r, s) = heyting_pair(&trace(8, &[]), &a());
        let expected: Vec<Rational> = (1..=8).map(dyadic).collect();
        assert_eq!(known(&r, 20), expected);
        assert_eq!(known(&s, 20), expected);

        let (r, s) = heyting_pair(&trace(8, &[(4, DoubleNeg)]), &a());
        assert_eq!(r.term(3).unwrap(), rat(1, 16));
        assert_eq!(s.term(3).unwrap(), rat(1, 16));
        assert_eq!(s.term(30).unwrap(), rat(1, 16));
        assert!(apart(&CReal::zero(), &s, 8).unwrap().is_established());

        let (r, s) = heyting_pair(&trace(8, &[(3, Refute)]), &a());
        assert_eq!(r.term(2).unwrap(), rat(1, 8));
        assert_eq!(r.term(7).unwrap(), rat(1, 8));
        assert_eq!(s.term(7).unwrap(), dyadic(8));
        assert!(apart(&CReal::zero(), &s, 8).unwrap().is_unknown());
        assert!(coincide_up_to(&s, &CReal::zero(), 6).unwrap());
    }

    #[test]
    fn direct_checking_examples() {
        let drift = Drift::dyadic_right();
        let d = direct_checking(&drift, &trace(6, &[]), &a());
        assert_eq!(known(&d, 10), vec![int(0); 6]);
        let d = direct_checking(&drift, &trace(6, &[(2, Affirm)]), &a());
        assert_eq!(known(&d, 4), [int(0), rat(1, 4), rat(1, 4), rat(1, 4)]);
        let d = direct_checking(&drift, &trace(6, &[(1, Refute)]), &a());
        assert_eq!(known(&d, 3), vec![rat(1, 2); 3]);
    }

    #[test]
    fn conditional_checking_examples() {
        let drift = Drift::dyadic_right();
        let c = conditional_checking(&drift, &trace(6, &[(2, Refute)]), &a());
        assert_eq!(known(&c, 10), vec![int(0); 6]);
        let c = conditional_checking(&drift, &trace(6, &[(3, Affirm)]), &a());
        assert_eq!(known(&c, 4), [int(0), int(0), rat(1, 8), rat(1, 8)]);
        assert_eq!(known(&conditional_checking(&drift, &trace(6, &[]), &a()), 10), vec![int(0); 6]);
    }

    #[test]
    fn two_sided_examples() {
        let drift = Drift::dyadic_two_winged();
        let e = two_sided_checking(&drift, &trace(6, &[(3, Affirm)]), &a()).unwrap();
        assert_eq!(e.term(5).unwrap(), rat(1, 8));
        let e = two_sided_checking(&drift, &trace(6, &[(2, Refute)]), &a()).unwrap();
        assert_eq!(e.term(1).unwrap(), rat(-1, 4));
        let e = two_sided_checking(&drift, &trace(6, &[]), &a()).unwrap();
        assert_eq!(known(&e, 10), vec![int(0); 6]);
        assert_eq!(
            two_sided_checking(&Drift::dyadic_right(), &trace(6, &[]), &a()).unwrap_err(),
            ConstructionError::WingMismatch
        );
    }

    #[test]
    fn drift_rejects_counting_number_on_kernel() {
        let err = Drift::new("bad", CReal::zero(), |n| if n == 3 { int(0) } else { dyadic(n as u32) }, Wings::Right, |p| {
            p as usize
        })
        .unwrap_err();
        assert_eq!(err, ConstructionError::NotApart { index: 3, other: "the kernel".into() });
        let err = Drift::new("bad", CReal::zero(), |n| -dyadic(n as u32), Wings::Right, |p| p as usize).unwrap_err();
        assert_eq!(err, ConstructionError::WrongSide { index: 1 });
    }

    #[test]
    fn sqrt2_drift_is_two_winged() {
        let d = Drift::sqrt2_convergents();
        assert!(matches!(d.wings(), Wings::Two { .. }));
        assert_eq!(sqrt2_convergent(3), rat(17, 12));
        // convergents never repeat consecutively
        assert!((0..30).all(|k| sqrt2_convergent(k) != sqrt2_convergent(k + 1)));
    }

    #[test]
    fn fleeing_examples() {
        let c = fleeing_sequence_1924(&FleeingProperty::with_critical(5), 12);
        assert_eq!(c.term(4).unwrap(), rat(1, 16));
        assert_eq!(c.term(5).unwrap(), rat(-1, 32));
        assert_eq!(c.term(9).unwrap(), rat(-1, 32));
        assert_eq!(c.term(100).unwrap(), rat(-1, 32));
        let c = fleeing_sequence_1924(&FleeingProperty::never(), 12);
        for v in 0..=12 {
            assert_eq!(c.term(v).unwrap(), neg_half_pow(v as u32));
        }
        assert!(c.try_term(13).is_none());
        assert!(FleeingProperty::new("odd", |i| i % 2 == 1, Some(3)).is_err());
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(1, &rat(1, 2)).unwrap(), Bounds::zero());
        assert_eq!(omega(1, &rat(3, 4)).unwrap(), Bounds::exact(rat(1, 4)));
        assert_eq!(omega(1, &rat(-3, 4)).unwrap(), Bounds::exact(rat(1, 4)));
        let v = omega(1, &rat(2, 3)).unwrap();
        assert!(!v.is_exact());
        assert!(v.width() <= dyadic(40));
        // sqrt 2 / 6 squared is 1/18
        assert!(&v.lo * &v.lo <= rat(1, 18) && rat(1, 18) <= &v.hi * &v.hi);
        assert_eq!(omega(0, &rat(1, 2)), Err(ConstructionError::InvalidNu));
        assert_eq!(omega(3, &int(0)).unwrap(), Bounds::zero());
    }

    #[test]
    fn z_examples() {
        assert_eq!(z_eval(&trace(6, &[]), &a(), &rat(3, 4), 6).unwrap(), Bounds::exact(rat(1, 4)));
        let early = trace(6, &[(1, Affirm)]);
        for x in [rat(3, 4), rat(3, 8), rat(-1, 3), rat(1, 1000)] {
            assert_eq!(z_eval(&early, &a(), &x, 6).unwrap(), Bounds::zero());
        }
        let mid = trace(6, &[(3, Refute)]);
        assert_eq!(z_eval(&mid, &a(), &rat(3, 8), 6).unwrap(), Bounds::exact(rat(1, 8)));
        assert_eq!(z_eval(&mid, &a(), &rat(3, 16), 6).unwrap(), Bounds::zero());
        // omega_7 is beyond the inspected depth on an undecided trace
        assert!(matches!(
            z_eval(&trace(6, &[]), &a(), &rat(3, 256), 6),
            Err(ConstructionError::BeyondDepth { nu: 7, .. })
        ));
    }

    #[test]
    fn omega_sum_shared_endpoints_vanish() {
        for nu in 1..8 {
            assert_eq!(omega_sum(&dyadic(nu), None), Bounds::zero());
        }
        assert_eq!(omega_sum(&rat(3, 8), Some(1)), Bounds::zero());
        assert_eq!(omega_sum(&rat(3, 8), Some(2)), Bounds::exact(rat(1, 8)));
    }

    #[test]
    fn difference_quotients() {
        let f = |x: &Rational| Ok(omega_sum(x, None));
        let q = difference_quotient(f, &int(0), &rat(2, 3)).unwrap();
        let target = 2f64.sqrt() / 4.0;
        assert!((q.to_f64() - target).abs() < 1e-6);
        let c = |_: &Rational| Ok(Bounds::exact(rat(5, 7)));
        assert_eq!(difference_quotient(c, &int(1), &int(3)).unwrap(), Bounds::zero());
        assert_eq!(difference_quotient(c, &int(1), &int(1)), Err(ConstructionError::DegenerateInterval));
    }

    #[test]
    fn tangency_oracle() {
        // analytic oracle: stationary point of radicand / x^2 at x = 2^(2-nu)/3
        for nu in 1..=10u32 {
            let t = tangency_search(nu, &dyadic(40)).unwrap();
            let x_star = 2f64.powi(2 - nu as i32) / 3.0;
            let got = num_traits::ToPrimitive::to_f64(&t.abscissa).unwrap();
            assert!((got - x_star).abs() < 1e-6, "nu {nu}");
            assert!((t.slope.to_f64() - 2f64.sqrt() / 4.0).abs() < 1e-6, "nu {nu}");
        }
    }

    #[test]
    fn r_omega_examples() {
        let base = CReal::zero();
        let family: Vec<CReal> = (0..4).map(|k| CReal::constant(dyadic(k + 1))).collect();
        let r = negcont_r_omega(&base, &family, &[], 8).unwrap();
        assert_eq!(known(&r, 20), vec![int(0); 8]);
        let r = negcont_r_omega(&base, &family, &[Alignment { stage: 4, target: AlignTarget::Member(2) }], 8).unwrap();
        assert_eq!(known(&r, 6), [int(0), int(0), int(0), int(0), rat(1, 8), rat(1, 8)]);
        let r = negcont_r_omega(&base, &family, &[Alignment { stage: 1, target: AlignTarget::Base }], 8).unwrap();
        assert_eq!(known(&r, 30), vec![int(0); 30]);
        let two = [Alignment { stage: 1, target: AlignTarget::Base }, Alignment { stage: 2, target: AlignTarget::Base }];
        assert_eq!(negcont_r_omega(&base, &family, &two, 8).unwrap_err(), ConstructionError::MultipleAlignments(2));
        assert_eq!(
            negcont_r_omega(&base, &family, &[Alignment { stage: 2, target: AlignTarget::Member(9) }], 8).unwrap_err(),
            ConstructionError::UnknownMember(9)
        );
    }
}
