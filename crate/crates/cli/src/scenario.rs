//! Scenario files: schema, construction registry and assertion runner.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use serde_json::{Map, Value};
use thiserror::Error;

use cslab::bks::{
    alpha_from_trace, bks_plus_from_conditional, cs_enumerate, dedup, random_witness, species_enumerator,
    verify_bks_clauses, wednesday_check, zigzag_merge, BinarySeq, Enumerator, SpeciesFixture,
};
use cslab::constructions::{
    brouwer1948_positive, brouwer1948_r, conditional_checking, difference_quotient, direct_checking,
    fleeing_sequence_1924, heyting_pair, negcont_r_omega, omega, omega_sum, sqrt2, tangency_search,
    two_sided_checking, z_eval, AlignTarget, Alignment, ConstructionError, Drift, FleeingProperty, Tangency,
};
use cslab::creal::{
    apart, coincide_up_to, converges_positively, dyadic_embed, measurably_less, negative_convergence_check, NatStream,
};
use cslab::logic::{countermodel_search, eval_trace, parse, BranchModel, GMode};
use cslab::numeric::{format_decimal, pair, parse_rational, signum, Bounds};
use cslab::subject::{multi_atom_schedules, build_trace};
use cslab::{Atom, CReal, Judgment, JudgmentKind, RawSchedule, Rational, Side, SubjectTrace, Verdict};

/// Only schema version understood by this runner.
pub const SCHEMA_VERSION: u32 = 1;
/// Default inspection depth for order verdicts (the horizon when absent).
const COUNTERMODEL_WORLDS: usize = 31;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scenario: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema error: {0}")]
    Schema(String),
}

fn schema<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Schema(msg.into()))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default)]
    pub paper_ref: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub atoms: Vec<String>,
    pub horizon: usize,
    #[serde(default)]
    pub events: Vec<EventSpec>,
    #[serde(default)]
    pub constructions: Vec<ConstructionSpec>,
    #[serde(default)]
    pub assertions: Vec<AssertionSpec>,
    #[serde(default)]
    pub logic: Vec<LogicSpec>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSpec {
    pub stage: usize,
    pub atom: String,
    pub kind: JudgmentKind,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionSpec {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertionSpec {
    pub target: String,
    pub kind: String,
    pub expected: Value,
    #[serde(default)]
    pub args: Map<String, Value>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicSpec {
    pub formula: String,
    pub mode: String,
    pub expect: String,
    #[serde(default)]
    pub g_mode: Option<String>,
    #[serde(default)]
    pub max_worlds: Option<usize>,
}

/// Evaluable real-variable function.
#[derive(Clone, Debug)]
enum Func {
    Omega(u32),
    OmegaSum,
    Z { atom: Atom, depth: usize },
}

#[derive(Clone, Debug)]
enum Object {
    Real(CReal),
    Binary(BinarySeq),
    Naturals(Vec<u64>),
    Enumerator(Box<Enumerator>),
    Function(Func),
    Tangency(Tangency),
}

impl Object {
    fn kind(&self) -> &'static str {
        match self {
            Object::Real(_) => "real",
            Object::Binary(_) => "binary sequence",
            Object::Naturals(_) => "natural sequence",
            Object::Enumerator(_) => "enumerator",
            Object::Function(_) => "function",
            Object::Tangency(_) => "tangency",
        }
    }
}

/// One checked assertion or logic expectation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.label, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioReport {
    pub paper_ref: Option<String>,
    pub outcomes: Vec<Outcome>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = &self.paper_ref {
            writeln!(f, "reenacts: {r}")?;
        }
        for o in &self.outcomes {
            writeln!(f, "{o}")?;
        }
        let failed = self.outcomes.iter().filter(|o| !o.passed).count();
        write!(f, "{} checks, {failed} failed", self.outcomes.len())
    }
}

pub fn run_scenario(path: &Path) -> Result<ScenarioReport, ScenarioError> {
    run_scenario_str(&std::fs::read_to_string(path)?)
}

pub fn run_scenario_str(text: &str) -> Result<ScenarioReport, ScenarioError> {
    let scenario: Scenario = serde_json::from_str(text)?;
    Runner::new(&scenario)?.run(&scenario)
}

struct Runner {
    trace: SubjectTrace,
    horizon: usize,
    seed: u64,
    objects: BTreeMap<String, Object>,
}

// ------------------------------------------------------------ param access

fn get<'a>(params: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value, ScenarioError> {
    params.get(key).ok_or_else(|| ScenarioError::Schema(format!("{ctx}: missing `{key}`")))
}

fn str_param<'a>(params: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a str, ScenarioError> {
    get(params, key, ctx)?.as_str().ok_or_else(|| ScenarioError::Schema(format!("{ctx}: `{key}` must be a string")))
}

fn u64_param(params: &Map<String, Value>, key: &str, ctx: &str) -> Result<u64, ScenarioError> {
    get(params, key, ctx)?.as_u64().ok_or_else(|| ScenarioError::Schema(format!("{ctx}: `{key}` must be a natural")))
}

fn opt_u64(params: &Map<String, Value>, key: &str, ctx: &str) -> Result<Option<u64>, ScenarioError> {
    match params.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v.as_u64().map(Some).ok_or_else(|| ScenarioError::Schema(format!("{ctx}: `{key}` must be a natural"))),
    }
}

fn rational_value(v: &Value, ctx: &str) -> Result<Rational, ScenarioError> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n.as_i64().map(|i| Rational::from_integer(i.into())),
        _ => None,
    }
    .ok_or_else(|| ScenarioError::Schema(format!("{ctx}: `{v}` is not a rational")))
}

fn rational_param(params: &Map<String, Value>, key: &str, ctx: &str) -> Result<Rational, ScenarioError> {
    rational_value(get(params, key, ctx)?, &format!("{ctx}: `{key}`"))
}

fn u64_list(v: &Value, ctx: &str) -> Result<Vec<u64>, ScenarioError> {
    v.as_array()
        .and_then(|a| a.iter().map(Value::as_u64).collect::<Option<Vec<_>>>())
        .ok_or_else(|| ScenarioError::Schema(format!("{ctx}: expected a list of naturals")))
}

fn str_list<'a>(v: &'a Value, ctx: &str) -> Result<Vec<&'a str>, ScenarioError> {
    v.as_array()
        .and_then(|a| a.iter().map(Value::as_str).collect::<Option<Vec<_>>>())
        .ok_or_else(|| ScenarioError::Schema(format!("{ctx}: expected a list of strings")))
}

fn judgment_param(params: &Map<String, Value>, key: &str, ctx: &str) -> Result<Judgment, ScenarioError> {
    let v = get(params, key, ctx)?;
    let atom = v.get("atom").and_then(Value::as_str);
    let kind = v.get("kind").and_then(Value::as_str).map(str::parse::<JudgmentKind>);
    match (atom, kind) {
        (Some(a), Some(Ok(k))) => Ok(Judgment::new(a, k)),
        _ => schema(format!("{ctx}: `{key}` must be {{atom, kind}}")),
    }
}

/// Expected value with optional tolerance: `"1/8"` or `{"value": "0.3535", "tol": "0.000001"}`.
fn approx_expectation(v: &Value, ctx: &str) -> Result<(Rational, Rational), ScenarioError> {
    match v {
        Value::Object(m) => {
            let tol = match m.get("tol") {
                Some(t) => rational_value(t, ctx)?,
                None => Rational::from_integer(0.into()),
            };
            Ok((rational_param(m, "value", ctx)?, tol))
        }
        other => Ok((rational_value(other, ctx)?, Rational::from_integer(0.into()))),
    }
}

fn abs(q: Rational) -> Rational {
    if signum(&q) < 0 {
        -q
    } else {
        q
    }
}

fn within(b: &Bounds, value: &Rational, tol: &Rational) -> bool {
    (&b.lo - value) >= -tol.clone() && &(&b.hi - value) <= tol
}

fn show_prefix(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn check(label: String, passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { label, passed, detail: detail.into() }
}

impl Runner {
    fn new(s: &Scenario) -> Result<Self, ScenarioError> {
        if s.version != SCHEMA_VERSION {
            return schema(format!("unsupported version {} (expected {SCHEMA_VERSION})", s.version));
        }
        let mut raw = RawSchedule::new(s.horizon);
        for e in &s.events {
            if !s.atoms.contains(&e.atom) {
                return schema(format!("event atom `{}` is not declared", e.atom));
            }
            raw = raw.with(e.stage, Judgment::new(e.atom.as_str(), e.kind));
        }
        let trace = SubjectTrace::from_raw(&raw).or_else(|errs| {
            let msgs: Vec<String> = errs.iter().map(ToString::to_string).collect();
            schema(format!("invalid schedule: {}", msgs.join("; ")))
        })?;
        let mut runner = Runner { trace, horizon: s.horizon, seed: s.seed, objects: BTreeMap::new() };
        for c in &s.constructions {
            if runner.objects.contains_key(&c.id) {
                return schema(format!("duplicate construction id `{}`", c.id));
            }
            let obj = runner.build(c, &s.atoms)?;
            runner.objects.insert(c.id.clone(), obj);
        }
        Ok(runner)
    }

    fn atom_param(&self, params: &Map<String, Value>, ctx: &str, atoms: &[String]) -> Result<Atom, ScenarioError> {
        let a = str_param(params, "atom", ctx)?;
        if !atoms.iter().any(|x| x == a) {
            return schema(format!("{ctx}: atom `{a}` is not declared"));
        }
        Ok(Atom::from(a))
    }

    fn real(&self, id: &str, ctx: &str) -> Result<CReal, ScenarioError> {
        match self.objects.get(id) {
            Some(Object::Real(x)) => Ok(x.clone()),
            Some(o) => schema(format!("{ctx}: `{id}` is a {}, not a real", o.kind())),
            None if id == "0" => Ok(CReal::zero()),
            None => schema(format!("{ctx}: unknown construction `{id}`")),
        }
    }

    fn drift(&self, params: &Map<String, Value>, ctx: &str) -> Result<Drift, ScenarioError> {
        match params.get("drift").and_then(Value::as_str).unwrap_or("dyadic_right") {
            "dyadic_right" => Ok(Drift::dyadic_right()),
            "dyadic_two_winged" => Ok(Drift::dyadic_two_winged()),
            "sqrt2" => Ok(Drift::sqrt2_convergents()),
            other => schema(format!("{ctx}: unknown drift `{other}`")),
        }
    }

    fn build(&self, c: &ConstructionSpec, atoms: &[String]) -> Result<Object, ScenarioError> {
        let ctx = format!("construction `{}`", c.id);
        let p = &c.params;
        let t = &self.trace;
        let real = |x: CReal| Ok(Object::Real(x));
        match c.kind.as_str() {
            "constant" => real(CReal::constant(rational_param(p, "value", &ctx)?)),
            "sqrt2" => real(sqrt2()),
            "brouwer1948_r" => real(brouwer1948_r(t, &self.atom_param(p, &ctx, atoms)?)),
            "brouwer1948_positive" => real(brouwer1948_positive(t, &self.atom_param(p, &ctx, atoms)?)),
            "heyting_r" => real(heyting_pair(t, &self.atom_param(p, &ctx, atoms)?).0),
            "heyting_s" => real(heyting_pair(t, &self.atom_param(p, &ctx, atoms)?).1),
            "direct_checking" => real(direct_checking(&self.drift(p, &ctx)?, t, &self.atom_param(p, &ctx, atoms)?)),
            "conditional_checking" => {
                real(conditional_checking(&self.drift(p, &ctx)?, t, &self.atom_param(p, &ctx, atoms)?))
            }
            "two_sided_checking" => {
                let d = self.drift(p, &ctx)?;
                two_sided_checking(&d, t, &self.atom_param(p, &ctx, atoms)?)
                    .map(Object::Real)
                    .or_else(|e| schema(format!("{ctx}: {e}")))
            }
            "fleeing_1924" => {
                let fp = match opt_u64(p, "critical", &ctx)? {
                    Some(k) => FleeingProperty::with_critical(k),
                    None => FleeingProperty::never(),
                };
                real(fleeing_sequence_1924(&fp, self.horizon))
            }
            "dyadic_embed" => {
                let prefix = p.get("prefix").map(|v| u64_list(v, &ctx)).transpose()?.unwrap_or_default();
                let cycle = u64_list(get(p, "cycle", &ctx)?, &ctx)?;
                let stream = NatStream::new(prefix, cycle).or_else(|e| schema(format!("{ctx}: {e}")))?;
                real(dyadic_embed(&stream))
            }
            "negcont_r_omega" => {
                let base = self.real(str_param(p, "base", &ctx)?, &ctx)?;
                let family = str_list(get(p, "family", &ctx)?, &ctx)?
                    .into_iter()
                    .map(|id| self.real(id, &ctx))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut decisions = Vec::new();
                for d in p.get("decisions").and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]) {
                    let m = d.as_object().ok_or_else(|| ScenarioError::Schema(format!("{ctx}: bad decision")))?;
                    let stage = u64_param(m, "stage", &ctx)? as usize;
                    let target = match m.get("target") {
                        Some(Value::String(s)) if s == "base" => AlignTarget::Base,
                        Some(v) if v.is_u64() => AlignTarget::Member(v.as_u64().unwrap_or_default() as usize),
                        _ => return schema(format!("{ctx}: decision target must be \"base\" or an index")),
                    };
                    decisions.push(Alignment { stage, target });
                }
                negcont_r_omega(&base, &family, &decisions, self.horizon)
                    .map(Object::Real)
                    .or_else(|e| schema(format!("{ctx}: {e}")))
            }
            "alpha" => Ok(Object::Binary(alpha_from_trace(t, &judgment_param(p, "judgment", &ctx)?))),
            "dedup" => match self.objects.get(str_param(p, "of", &ctx)?) {
                Some(Object::Binary(b)) => Ok(Object::Binary(dedup(b))),
                _ => schema(format!("{ctx}: `of` must name a binary sequence")),
            },
            "binary" => {
                let values = u64_list(get(p, "values", &ctx)?, &ctx)?.into_iter().map(|v| v.min(255) as u8).collect();
                BinarySeq::new(values, c.id.clone()).map(Object::Binary).or_else(|e| schema(format!("{ctx}: {e}")))
            }
            "zigzag" => {
                let family = str_list(get(p, "family", &ctx)?, &ctx)?
                    .into_iter()
                    .map(|id| match self.objects.get(id) {
                        Some(Object::Binary(b)) => Ok(b.clone()),
                        _ => schema(format!("{ctx}: `{id}` is not a binary sequence")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let len = u64_param(p, "len", &ctx)? as usize;
                Ok(Object::Binary(zigzag_merge(&family, len).beta))
            }
            "bks_plus" => {
                let drift = self.drift(p, &ctx)?;
                let atom = self.atom_param(p, &ctx, atoms)?;
                let c = conditional_checking(&drift, t, &atom);
                let c_prefix = c.known_prefix(self.horizon + 1);
                let kernel_prefix = drift.kernel().known_prefix(c_prefix.len());
                bks_plus_from_conditional(&c_prefix, &kernel_prefix)
                    .map(Object::Binary)
                    .or_else(|e| schema(format!("{ctx}: {e}")))
            }
            "random_witness" => Ok(Object::Naturals(random_witness(t, &self.atom_param(p, &ctx, atoms)?, self.seed))),
            "species_enumerator" | "cs_enumerate" => {
                let fixture = SpeciesFixture::new(str_param(p, "species", &ctx)?, opt_u64(p, "assumed_inhabitant", &ctx)?);
                let f = if c.kind == "cs_enumerate" { cs_enumerate(t, &fixture) } else { species_enumerator(t, &fixture) };
                f.map(|e| Object::Enumerator(Box::new(e))).or_else(|e| schema(format!("{ctx}: {e}")))
            }
            "omega" => {
                let nu = u64_param(p, "nu", &ctx)? as u32;
                if nu == 0 {
                    return schema(format!("{ctx}: {}", ConstructionError::InvalidNu));
                }
                Ok(Object::Function(Func::Omega(nu)))
            }
            "omega_sum" => Ok(Object::Function(Func::OmegaSum)),
            "z" => {
                let atom = self.atom_param(p, &ctx, atoms)?;
                let depth = opt_u64(p, "depth", &ctx)?.map_or(self.horizon, |d| d as usize);
                Ok(Object::Function(Func::Z { atom, depth }))
            }
            "tangency" => {
                let nu = u64_param(p, "nu", &ctx)? as u32;
                let resolution = p.get("resolution").map(|v| rational_value(v, &ctx)).transpose()?;
                tangency_search(nu, &resolution.unwrap_or_else(|| cslab::dyadic(40)))
                    .map(Object::Tangency)
                    .or_else(|e| schema(format!("{ctx}: {e}")))
            }
            other => schema(format!("{ctx}: unknown type `{other}`")),
        }
    }

    fn eval_func(&self, f: &Func, x: &Rational) -> Result<Bounds, ConstructionError> {
        match f {
            Func::Omega(nu) => omega(*nu, x),
            Func::OmegaSum => Ok(omega_sum(x, None)),
            Func::Z { atom, depth } => z_eval(&self.trace, atom, x, *depth),
        }
    }

    fn run(&self, s: &Scenario) -> Result<ScenarioReport, ScenarioError> {
        let mut outcomes = Vec::new();
        for (i, a) in s.assertions.iter().enumerate() {
            outcomes.push(self.assert(i, a)?);
        }
        for (i, l) in s.logic.iter().enumerate() {
            outcomes.push(self.logic(i, l, &s.atoms)?);
        }
        Ok(ScenarioReport { paper_ref: s.paper_ref.clone(), outcomes })
    }

    fn depth(&self, args: &Map<String, Value>, ctx: &str) -> Result<usize, ScenarioError> {
        Ok(opt_u64(args, "depth", ctx)?.map_or(self.horizon, |d| d as usize))
    }

    fn assert(&self, i: usize, a: &AssertionSpec) -> Result<Outcome, ScenarioError> {
        let label = format!("#{i} {} {}", a.kind, a.target);
        let ctx = format!("assertion #{i}");
        let args = &a.args;
        let zero = Object::Real(CReal::zero());
        let obj = self.objects.get(&a.target).or((a.target == "0").then_some(&zero));
        let out = |passed: bool, detail: String| Ok(check(label.clone(), passed, detail));
        match (a.kind.as_str(), obj) {
            ("prefix", Some(Object::Real(x))) => {
                let expected = a
                    .expected
                    .as_array()
                    .ok_or_else(|| ScenarioError::Schema(format!("{ctx}: expected a list")))?
                    .iter()
                    .map(|v| rational_value(v, &ctx))
                    .collect::<Result<Vec<_>, _>>()?;
                let got = x.known_prefix(expected.len());
                if got.len() < expected.len() {
                    let err = x.term(got.len()).err().map(|e| e.to_string()).unwrap_or_default();
                    return out(false, format!("got {} then {err}", show_prefix(&got)));
                }
                out(got == expected, format!("got {}", show_prefix(&got)))
            }
            ("prefix", Some(Object::Binary(b))) | ("binary", Some(Object::Binary(b))) => {
                let expected = u64_list(&a.expected, &ctx)?;
                let got: Vec<u64> = b.values().iter().take(expected.len()).map(|&v| v as u64).collect();
                out(got == expected, format!("got {b}"))
            }
            ("prefix", Some(Object::Naturals(v))) => {
                let expected = u64_list(&a.expected, &ctx)?;
                out(v.get(..expected.len()) == Some(&expected[..]), format!("got {v:?}"))
            }
            ("term", Some(Object::Real(x))) => {
                let index = u64_param(args, "index", &ctx)? as usize;
                let expected = rational_value(&a.expected, &ctx)?;
                match x.term(index) {
                    Ok(v) => out(v == expected, format!("term {index} = {v}")),
                    Err(e) => out(false, e.to_string()),
                }
            }
            ("approx", Some(Object::Real(x))) => {
                let p = u64_param(args, "p", &ctx)? as u32;
                let (value, tol) = approx_expectation(&a.expected, &ctx)?;
                match x.approx(p) {
                    Ok(v) => out(abs(&v - &value) <= tol, format!("approx(p={p}) = {v}")),
                    Err(e) => out(false, e.to_string()),
                }
            }
            ("apart" | "measurably_less", Some(Object::Real(x))) => {
                let y = self.real(str_param(args, "other", &ctx)?, &ctx)?;
                let depth = self.depth(args, &ctx)?;
                let want = a.expected.as_str().unwrap_or_default();
                let gap = args.get("gap").map(|g| rational_value(g, &ctx)).transpose()?;
                let verdict = if a.kind == "apart" {
                    apart(x, &y, depth).map(|v| match v {
                        Verdict::Established(ap) => (format!("established-{}", ap.side), Some(ap)),
                        Verdict::Unknown { depth } => (format!("unknown({depth})"), None),
                        Verdict::Refuted(never) => match never {},
                    })
                } else {
                    measurably_less(x, &y, depth).map(|v| match v {
                        Verdict::Established(c) => {
                            ("established".to_string(), Some(cslab::Apartness { side: Side::Right, certificate: c }))
                        }
                        Verdict::Unknown { depth } => (format!("unknown({depth})"), None),
                        Verdict::Refuted(never) => match never {},
                    })
                };
                match verdict {
                    Err(e) => out(false, format!("{e}")),
                    Ok((status, cert)) => {
                        let status_ok = status == want || (want == "unknown" && status.starts_with("unknown"));
                        let (replays, gap_ok, detail) = match &cert {
                            Some(ap) => {
                                let (l, r) = if ap.side == Side::Right { (x, &y) } else { (&y, x) };
                                let replays = ap.certificate.replay(l, r);
                                let gap_ok = gap.as_ref().is_none_or(|g| *g == abs(ap.certificate.gap.clone()));
                                (replays, gap_ok, format!("{status}: {}", ap.certificate))
                            }
                            None => (true, gap.is_none(), status.clone()),
                        };
                        out(status_ok && replays && gap_ok, detail)
                    }
                }
            }
            ("coincide", Some(Object::Real(x))) => {
                let y = self.real(str_param(args, "other", &ctx)?, &ctx)?;
                let p = u64_param(args, "p", &ctx)? as u32;
                let want = a.expected.as_bool().ok_or_else(|| ScenarioError::Schema(format!("{ctx}: expected bool")))?;
                match coincide_up_to(x, &y, p) {
                    Ok(v) => out(v == want, format!("coincide_up_to(p={p}) = {v}")),
                    Err(e) => out(false, e.to_string()),
                }
            }
            ("converges_positively" | "negative_convergence", Some(Object::Real(limit))) => {
                let seq = str_list(get(args, "seq", &ctx)?, &ctx)?
                    .into_iter()
                    .map(|id| self.real(id, &ctx))
                    .collect::<Result<Vec<_>, _>>()?;
                let p = u64_param(args, "p", &ctx)? as u32;
                let depth = self.depth(args, &ctx)?;
                let status = if a.kind == "converges_positively" {
                    converges_positively(&seq, limit, p, depth).map(|r| match r.verdict {
                        Verdict::Established(n) => format!("established({n})"),
                        _ if r.non_cauchy.is_some() => "unknown-noncauchy".to_string(),
                        _ => "unknown".to_string(),
                    })
                } else {
                    negative_convergence_check(&seq, limit, p, depth).map(|v| match v {
                        Verdict::Refuted(ix) => format!("refuted({})", ix.len()),
                        _ => "unknown".to_string(),
                    })
                };
                let want = a.expected.as_str().unwrap_or_default();
                match status {
                    Ok(s) => out(s == want || s.starts_with(&format!("{want}-")) || s.starts_with(&format!("{want}(")), s),
                    Err(e) => out(false, e.to_string()),
                }
            }
            ("value_at", Some(Object::Function(f))) => {
                let x = rational_param(args, "x", &ctx)?;
                let (value, tol) = approx_expectation(&a.expected, &ctx)?;
                match self.eval_func(f, &x) {
                    Ok(b) => out(within(&b, &value, &tol), format!("f({x}) = {b}")),
                    Err(e) => out(false, e.to_string()),
                }
            }
            ("difference_quotient", Some(Object::Function(f))) => {
                let lo = rational_param(args, "a", &ctx)?;
                let hi = rational_param(args, "b", &ctx)?;
                let (value, tol) = approx_expectation(&a.expected, &ctx)?;
                match difference_quotient(|x| self.eval_func(f, x), &lo, &hi) {
                    Ok(b) => out(within(&b, &value, &tol), format!("quotient = {b}")),
                    Err(e) => out(false, e.to_string()),
                }
            }
            ("slope" | "abscissa", Some(Object::Tangency(t))) => {
                let (value, tol) = approx_expectation(&a.expected, &ctx)?;
                let got = if a.kind == "slope" { t.slope.clone() } else { Bounds::exact(t.abscissa.clone()) };
                out(within(&got, &value, &tol), format!("{} = {}", a.kind, format_decimal(&got.midpoint(), 12)))
            }
            ("clauses", Some(Object::Binary(b))) => {
                let j = judgment_param(args, "judgment", &ctx)?;
                let strong = args.get("strong").and_then(Value::as_bool).unwrap_or(false);
                let r = verify_bks_clauses(b, &self.trace, &j, self.horizon, strong);
                let want = a.expected.as_str() == Some("pass");
                out(r.all_pass() == want, format!("{:?}", r.outcomes()))
            }
            ("wednesday", Some(Object::Binary(b))) => {
                let j = judgment_param(args, "judgment", &ctx)?;
                let mult = u64_param(args, "multiplier", &ctx)?.max(1);
                let offset = opt_u64(args, "offset", &ctx)?.unwrap_or(0);
                let avoid = args.get("assert_avoids").and_then(Value::as_bool).unwrap_or(false);
                let v = wednesday_check(b, |x| mult * x + offset, &self.trace, &j, avoid);
                out(v.status() == a.expected.as_str().unwrap_or_default().to_lowercase(), format!("{v:?}"))
            }
            ("persistent", Some(Object::Naturals(v))) => {
                let first = v.iter().position(|&k| k > 0);
                let persistent = first.is_none_or(|i| v[i..].iter().all(|&k| k == v[i]));
                let want = opt_u64(&Map::from_iter([("first".to_string(), a.expected.clone())]), "first", &ctx)?;
                out(persistent && first.map(|i| i as u64) == want, format!("first nonzero {first:?} in {v:?}"))
            }
            ("enumerates", Some(Object::Enumerator(f))) => {
                let n = u64_param(args, "n", &ctx)?;
                let k = u64_param(args, "k", &ctx)?;
                let want = a.expected.as_u64();
                let got = f.eval(pair(n, k));
                out(got == want, format!("f(pair({n},{k})) = {got:?}"))
            }
            ("biconditional", Some(Object::Enumerator(f))) => {
                let bound = u64_param(args, "bound", &ctx)?;
                let fails = f.biconditional_failures(bound);
                let want = a.expected.as_bool().unwrap_or(true);
                out(fails.is_empty() == want, format!("failures {fails:?}"))
            }
            ("box" | "tested_by", None) if a.target == "trace" => {
                let stage = u64_param(args, "stage", &ctx)? as usize;
                let got = if a.kind == "box" {
                    self.trace.boxed(stage, &judgment_param(args, "judgment", &ctx)?)
                } else {
                    self.trace.tested_by(stage, &Atom::from(str_param(args, "atom", &ctx)?))
                };
                let want = a.expected.as_bool();
                match got {
                    Ok(v) => out(Some(v) == want, format!("{v}")),
                    Err(e) => out(false, e.to_string()),
                }
            }
            (_, None) => schema(format!("{ctx}: unknown target `{}`", a.target)),
            (kind, Some(o)) => schema(format!("{ctx}: `{kind}` does not apply to a {}", o.kind())),
        }
    }

    fn logic(&self, i: usize, l: &LogicSpec, atoms: &[String]) -> Result<Outcome, ScenarioError> {
        let ctx = format!("logic #{i}");
        let phi = parse(&l.formula).or_else(|e| schema(format!("{ctx}: {e}")))?;
        if let Some(a) = phi.atoms().into_iter().find(|a| !atoms.contains(a)) {
            return schema(format!("{ctx}: atom `{a}` is not declared"));
        }
        let g_mode = match &l.g_mode {
            None => GMode::AllBranches,
            Some(m) => m.parse().or_else(|e: String| schema(format!("{ctx}: {e}")))?,
        };
        let label = format!("logic #{i} {} {} [{}]", l.mode, phi, l.expect);
        let (passed, detail) = match (l.mode.as_str(), l.expect.as_str()) {
            ("trace", "true" | "false") => match eval_trace(&self.trace, &phi) {
                Ok(v) => (v.to_string() == l.expect, format!("{v} on the scenario trace")),
                Err(e) => (false, e.to_string()),
            },
            ("trace", "valid" | "invalid") => {
                let outcome = trace_validity(&phi, self.horizon);
                let valid = matches!(outcome, Ok(None));
                let detail = match &outcome {
                    Ok(None) => "true on every schedule".to_string(),
                    Ok(Some(t)) => format!("false on {:?}", t.schedule().to_raw().events),
                    Err(e) => e.to_string(),
                };
                (outcome.is_ok() && valid == (l.expect == "valid"), detail)
            }
            ("branching", "countermodel" | "valid") => {
                let max = l.max_worlds.unwrap_or(COUNTERMODEL_WORLDS);
                match countermodel_search(&phi, max, g_mode) {
                    Ok(cm) => (
                        l.expect == "countermodel",
                        format!("countermodel with {} worlds at world {} ({g_mode})", cm.model.len(), cm.world),
                    ),
                    Err(e @ cslab::logic::LogicError::Exhausted { .. }) => (l.expect == "valid", e.to_string()),
                    Err(e) => (false, e.to_string()),
                }
            }
            ("branching", "true" | "false") => {
                let model = BranchModel::evidence_tree(&phi.atoms().into_iter().collect::<Vec<_>>(), self.horizon);
                match model.forces(0, &phi, g_mode) {
                    Ok(v) => (v.to_string() == l.expect, format!("{v} at the root ({g_mode})")),
                    Err(e) => (false, e.to_string()),
                }
            }
            (m, e) => return schema(format!("{ctx}: unsupported mode/expect `{m}`/`{e}`")),
        };
        Ok(check(label, passed, detail))
    }
}

/// First schedule (over the formula's atoms, horizon `h`) on which `phi`
/// is false, or `None` if it holds on all of them.
pub fn trace_validity(phi: &cslab::logic::Formula, h: usize) -> Result<Option<SubjectTrace>, cslab::logic::LogicError> {
    let atoms: Vec<Atom> = phi.atoms().iter().map(|a| Atom::new(a.as_str())).collect();
    for schedule in multi_atom_schedules(&atoms, h) {
        let trace = build_trace(schedule);
        if !eval_trace(&trace, phi)? {
            return Ok(Some(trace));
        }
    }
    Ok(None)
}
