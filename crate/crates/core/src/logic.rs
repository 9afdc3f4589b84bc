//! Intuitionistic propositional logic with the stage operators `box[n]` and
//! `G[n]`: a parser, a trace evaluator, forcing over branching evidence
//! trees, countermodel search and the axiom suite.
//!
//! Grammar:
//!
//! ```text
//! formula := imp
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "box" "[" nat "]" "(" formula ")"
//!          | "G" "[" nat "]" "(" formula ")" | "(" formula ")" | "false" | atom
//! atom    := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! `box` and `G` are keywords only when followed by `[`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::subject::{multi_atom_schedules, Atom, Judgment, JudgmentKind, SubjectTrace};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Box(u32, Box<Formula>),
    G(u32, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn boxed(n: u32, f: Formula) -> Self {
        Formula::Box(n, Box::new(f))
    }

    pub fn g(n: u32, f: Formula) -> Self {
        Formula::G(n, Box::new(f))
    }

    /// Disjunction of `f(n)` for `n` in `range` (the harness expansion of `exists n`).
    pub fn any_of(range: impl IntoIterator<Item = u32>, f: impl Fn(u32) -> Formula) -> Self {
        range.into_iter().map(f).reduce(Formula::or).unwrap_or(Formula::Bottom)
    }

    /// Conjunction of `f(n)` (the harness expansion of `forall n`).
    pub fn all_of(range: impl IntoIterator<Item = u32>, f: impl Fn(u32) -> Formula) -> Self {
        range.into_iter().map(f).reduce(Formula::and).unwrap_or_else(|| Formula::imp(Formula::Bottom, Formula::Bottom))
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Bottom => {}
            Formula::Not(f) | Formula::Box(_, f) | Formula::G(_, f) => f.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Largest stage index of any `box` or `G` node.
    pub fn max_index(&self) -> u32 {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::Not(f) => f.max_index(),
            Formula::Box(n, f) | Formula::G(n, f) => (*n).max(f.max_index()),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.max_index().max(b.max_index()),
        }
    }

    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = vec![self];
        match self {
            Formula::Atom(_) | Formula::Bottom => {}
            Formula::Not(f) | Formula::Box(_, f) | Formula::G(_, f) => out.extend(f.subformulas()),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                out.extend(a.subformulas());
                out.extend(b.subformulas());
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("stage {stage} lies beyond horizon {horizon}")]
    StageBeyondHorizon { stage: u32, horizon: usize },
    #[error("stage index {index} exceeds model depth {depth}")]
    DepthExceeded { index: u32, depth: usize },
    #[error("box[{0}] applied to `{1}`, which is not a judgment form")]
    NotAJudgment(u32, String),
    #[error("no countermodel with at most {max_worlds} worlds (searched trees up to depth {depth})")]
    Exhausted { max_worlds: usize, depth: usize },
}

// ---------------------------------------------------------------- parsing

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u32),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Tilde,
    Amp,
    Bar,
    Arrow,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LogicError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '~' => Tok::Tilde,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            c if c.is_ascii_digit() => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..=i].parse().map_err(|_| LogicError::Syntax {
                    position: start,
                    message: "stage literal too large".into(),
                })?;
                Tok::Nat(n)
            }
            c if c.is_ascii_alphabetic() => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            other => {
                return Err(LogicError::Syntax { position: start, message: format!("unexpected character `{other}`") })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::Syntax { position: self.position(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), LogicError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn imp(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.imp()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        match self.peek().cloned() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.imp()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) if (name == "box" || name == "G") && self.peek_at(1) == Some(&Tok::LBracket) => {
                self.pos += 2;
                let Some(Tok::Nat(n)) = self.peek().cloned() else {
                    return self.error("expected a stage literal");
                };
                self.pos += 1;
                self.expect(Tok::RBracket, "`]`")?;
                self.expect(Tok::LParen, "`(`")?;
                let f = self.imp()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(if name == "box" { Formula::boxed(n, f) } else { Formula::g(n, f) })
            }
            Some(Tok::Ident(name)) if name == "false" => {
                self.pos += 1;
                Ok(Formula::Bottom)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Formula::Atom(name))
            }
            Some(_) => self.error("expected a formula"),
            None => self.error("unexpected end of input"),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, LogicError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len() };
    let f = p.imp()?;
    if p.pos < p.toks.len() {
        return p.error("trailing input");
    }
    Ok(f)
}

impl FromStr for Formula {
    type Err = LogicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// binding strength: imp 0, or 1, and 2, unary 3
fn write_prec(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = match f {
        Formula::Imp(..) => 0,
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        _ => 3,
    };
    if prec < min {
        out.write_str("(")?;
    }
    match f {
        Formula::Atom(a) => out.write_str(a)?,
        Formula::Bottom => out.write_str("false")?,
        Formula::Not(g) => {
            out.write_str("~")?;
            write_prec(g, 3, out)?;
        }
        Formula::And(a, b) => {
            write_prec(a, 2, out)?;
            out.write_str(" & ")?;
            write_prec(b, 3, out)?;
        }
        Formula::Or(a, b) => {
            write_prec(a, 1, out)?;
            out.write_str(" | ")?;
            write_prec(b, 2, out)?;
        }
        Formula::Imp(a, b) => {
            write_prec(a, 1, out)?;
            out.write_str(" -> ")?;
            write_prec(b, 0, out)?;
        }
        Formula::Box(n, g) => write!(out, "box[{n}]({g})")?,
        Formula::G(n, g) => write!(out, "G[{n}]({g})")?,
    }
    if prec < min {
        out.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(self, 0, f)
    }
}

// ---------------------------------------------------------- trace semantics

/// Truth of the judgment form `psi` at stage `n`: `A`, `~A`, `~~A` look up
/// Affirm, Refute and DoubleNeg; `&`, `|` and `false` act componentwise.
fn judged(psi: &Formula, n: u32, known: &dyn Fn(&Judgment) -> bool) -> Result<bool, LogicError> {
    Ok(match psi {
        Formula::Atom(a) => known(&Judgment::affirm(a.as_str())),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(a) => known(&Judgment::refute(a.as_str())),
            Formula::Not(x) if matches!(x.as_ref(), Formula::Atom(_)) => {
                let Formula::Atom(a) = x.as_ref() else { unreachable!() };
                known(&Judgment::double_neg(a.as_str()))
            }
            _ => return Err(LogicError::NotAJudgment(n, psi.to_string())),
        },
        Formula::Bottom => false,
        Formula::And(a, b) => judged(a, n, known)? && judged(b, n, known)?,
        Formula::Or(a, b) => judged(a, n, known)? || judged(b, n, known)?,
        _ => return Err(LogicError::NotAJudgment(n, psi.to_string())),
    })
}

/// Evaluates `phi` on a complete trace: an atom holds iff it is affirmed
/// within the horizon, connectives are classical, `box[n](psi)` and
/// `G[n](psi)` look up the judgment table at stage `n`.
pub fn eval_trace(trace: &SubjectTrace, phi: &Formula) -> Result<bool, LogicError> {
    let h = trace.horizon();
    Ok(match phi {
        Formula::Atom(a) => trace.boxed(h, &Judgment::affirm(a.as_str())).expect("horizon stage"),
        Formula::Bottom => false,
        Formula::Not(f) => !eval_trace(trace, f)?,
        Formula::And(a, b) => eval_trace(trace, a)? && eval_trace(trace, b)?,
        Formula::Or(a, b) => eval_trace(trace, a)? || eval_trace(trace, b)?,
        Formula::Imp(a, b) => !eval_trace(trace, a)? || eval_trace(trace, b)?,
        Formula::Box(n, psi) | Formula::G(n, psi) => {
            if *n as usize > h {
                return Err(LogicError::StageBeyondHorizon { stage: *n, horizon: h });
            }
            judged(psi, *n, &|j| trace.boxed(*n as usize, j).expect("stage checked"))?
        }
    })
}

// ------------------------------------------------------ branching semantics

/// Reading of `G[n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GMode {
    /// Forced at every descendant `n` stages ahead.
    AllBranches,
    /// Forced at the designated continuation `n` stages ahead.
    ActualPath,
}

impl FromStr for GMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" | "all-branches" | "beth" => Ok(GMode::AllBranches),
            "actual" | "actual-path" => Ok(GMode::ActualPath),
            other => Err(format!("unknown G mode `{other}`")),
        }
    }
}

impl fmt::Display for GMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GMode::AllBranches => "all-branches",
            GMode::ActualPath => "actual-path",
        })
    }
}

/// A world: a schedule prefix of length `depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    pub depth: usize,
    pub parent: Option<usize>,
    /// The first child is the designated continuation.
    pub children: Vec<usize>,
    /// Affirm stage of each atom affirmed so far.
    pub affirmed: BTreeMap<String, usize>,
}

/// Finite tree of evidence states rooted at world 0. Leaves persist
/// unchanged beyond their depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchModel {
    worlds: Vec<World>,
    depth: usize,
}

impl BranchModel {
    /// Every way the atoms can be affirmed over `depth` stages: an
    /// undecided atom may be affirmed at each stage. The child adding no
    /// evidence comes first.
    pub fn evidence_tree(atoms: &[String], depth: usize) -> Self {
        let root = World { depth: 0, parent: None, children: Vec::new(), affirmed: BTreeMap::new() };
        let mut worlds = vec![root];
        let mut frontier = vec![0];
        for stage in 1..=depth {
            let mut next = Vec::new();
            for w in frontier {
                let open: Vec<&String> = atoms.iter().filter(|a| !worlds[w].affirmed.contains_key(*a)).collect();
                for mask in 0..(1usize << open.len()) {
                    let mut affirmed = worlds[w].affirmed.clone();
                    for (bit, a) in open.iter().enumerate() {
                        if mask >> bit & 1 == 1 {
                            affirmed.insert((*a).clone(), stage);
                        }
                    }
                    let id = worlds.len();
                    worlds.push(World { depth: stage, parent: Some(w), children: Vec::new(), affirmed });
                    worlds[w].children.push(id);
                    next.push(id);
                }
            }
            frontier = next;
        }
        BranchModel { worlds, depth }
    }

    /// Number of worlds [`BranchModel::evidence_tree`] would build.
    pub fn evidence_tree_size(atoms: usize, depth: usize) -> usize {
        // count worlds by number of still-open atoms
        let mut by_open = vec![0usize; atoms + 1];
        by_open[atoms] = 1;
        let mut total = 1;
        for _ in 0..depth {
            let mut next = vec![0usize; atoms + 1];
            for (open, &count) in by_open.iter().enumerate() {
                for (still_open, slot) in next.iter_mut().enumerate().take(open + 1) {
                    *slot = slot.saturating_add(count.saturating_mul(binomial(open, still_open)));
                }
            }
            by_open = next;
            total = by_open.iter().fold(total, |acc: usize, &c| acc.saturating_add(c));
        }
        total
    }

    /// Single-branch model following `trace` stage by stage (Affirm events only).
    pub fn linear(trace: &SubjectTrace) -> Self {
        let mut worlds = vec![World { depth: 0, parent: None, children: Vec::new(), affirmed: BTreeMap::new() }];
        for stage in 1..=trace.horizon() {
            let mut affirmed = worlds[stage - 1].affirmed.clone();
            for e in trace.schedule().events().filter(|e| e.stage == stage && e.judgment.kind == JudgmentKind::Affirm) {
                affirmed.insert(e.judgment.atom.as_str().to_string(), stage);
            }
            worlds.push(World { depth: stage, parent: Some(stage - 1), children: Vec::new(), affirmed });
            worlds[stage - 1].children.push(stage);
        }
        BranchModel { worlds, depth: trace.horizon() }
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    /// Generation depth; formulas may not mention stages beyond it.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `w` and every world below it.
    pub fn descendants(&self, w: usize) -> Vec<usize> {
        let mut out = vec![w];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.worlds[out[i]].children.iter().copied());
            i += 1;
        }
        out
    }

    /// Descendants of `w` at depth `d`, with shallower leaves standing in.
    fn descendants_at(&self, w: usize, d: usize) -> Vec<usize> {
        self.descendants(w)
            .into_iter()
            .filter(|&v| self.worlds[v].depth == d || (self.worlds[v].depth < d && self.worlds[v].children.is_empty()))
            .collect()
    }

    fn continuation(&self, w: usize, steps: usize) -> usize {
        (0..steps).fold(w, |v, _| self.worlds[v].children.first().copied().unwrap_or(v))
    }

    /// Is `v` at or below `w`?
    pub fn reaches(&self, w: usize, v: usize) -> bool {
        let mut cur = Some(v);
        while let Some(c) = cur {
            if c == w {
                return true;
            }
            cur = self.worlds[c].parent;
        }
        false
    }

    fn known_at(&self, v: usize, stage: usize, j: &Judgment) -> bool {
        j.kind == JudgmentKind::Affirm && self.worlds[v].affirmed.get(j.atom.as_str()).is_some_and(|&s| s <= stage)
    }

    fn check_depth(&self, phi: &Formula) -> Result<(), LogicError> {
        let index = phi.max_index();
        if index as usize > self.depth {
            return Err(LogicError::DepthExceeded { index, depth: self.depth });
        }
        Ok(())
    }

    /// Forcing of `phi` at world `w`.
    pub fn forces(&self, w: usize, phi: &Formula, mode: GMode) -> Result<bool, LogicError> {
        self.check_depth(phi)?;
        self.force(w, phi, mode)
    }

    fn force(&self, w: usize, phi: &Formula, mode: GMode) -> Result<bool, LogicError> {
        Ok(match phi {
            Formula::Atom(a) => self.worlds[w].affirmed.contains_key(a),
            Formula::Bottom => false,
            Formula::And(a, b) => self.force(w, a, mode)? && self.force(w, b, mode)?,
            Formula::Or(a, b) => self.force(w, a, mode)? || self.force(w, b, mode)?,
            Formula::Not(a) => {
                for v in self.descendants(w) {
                    if self.force(v, a, mode)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Imp(a, b) => {
                for v in self.descendants(w) {
                    if self.force(v, a, mode)? && !self.force(v, b, mode)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Box(n, psi) => {
                let n = *n as usize;
                let settled = if self.worlds[w].depth >= n { vec![w] } else { self.descendants_at(w, n) };
                for v in settled {
                    if !judged(psi, n as u32, &|j| self.known_at(v, n, j))? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::G(n, psi) => {
                let target = self.worlds[w].depth + *n as usize;
                let ahead = match mode {
                    GMode::AllBranches => self.descendants_at(w, target),
                    GMode::ActualPath => vec![self.continuation(w, *n as usize)],
                };
                for v in ahead {
                    if !self.force(v, psi, mode)? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }

    /// Worlds pairs `w <= v` with a subformula forced at `w` but not at `v`.
    pub fn monotonicity_violations(&self, phi: &Formula, mode: GMode) -> Result<Vec<(usize, usize, Formula)>, LogicError> {
        self.check_depth(phi)?;
        let mut out = Vec::new();
        for psi in phi.subformulas() {
            for w in 0..self.len() {
                if !self.force(w, psi, mode)? {
                    continue;
                }
                for v in self.descendants(w) {
                    if !self.force(v, psi, mode)? {
                        out.push((w, v, psi.clone()));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The model with the subtree at `root` removed (`root != 0`).
    fn without_subtree(&self, root: usize) -> (BranchModel, Vec<Option<usize>>) {
        let gone: BTreeSet<usize> = self.descendants(root).into_iter().collect();
        let mut map = vec![None; self.len()];
        let mut next = 0;
        for (i, slot) in map.iter_mut().enumerate() {
            if !gone.contains(&i) {
                *slot = Some(next);
                next += 1;
            }
        }
        let worlds = self
            .worlds
            .iter()
            .enumerate()
            .filter(|(i, _)| !gone.contains(i))
            .map(|(_, w)| World {
                depth: w.depth,
                parent: w.parent.and_then(|p| map[p]),
                children: w.children.iter().filter_map(|&c| map[c]).collect(),
                affirmed: w.affirmed.clone(),
            })
            .collect();
        (BranchModel { worlds, depth: self.depth }, map)
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// A model and a world at which the formula is not forced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub model: BranchModel,
    pub world: usize,
    pub mode: GMode,
}

/// Searches evidence trees of increasing depth for a world that does not
/// force `phi`, then prunes subtrees the failure does not depend on.
pub fn countermodel_search(phi: &Formula, max_worlds: usize, mode: GMode) -> Result<Countermodel, LogicError> {
    let atoms: Vec<String> = phi.atoms().into_iter().collect();
    let mut depth = phi.max_index() as usize;
    let mut searched = None;
    while BranchModel::evidence_tree_size(atoms.len(), depth) <= max_worlds {
        let model = BranchModel::evidence_tree(&atoms, depth);
        for w in 0..model.len() {
            if !model.forces(w, phi, mode)? {
                return Ok(prune(Countermodel { model, world: w, mode }, phi));
            }
        }
        searched = Some(depth);
        depth += 1;
        if atoms.is_empty() && depth > phi.max_index() as usize + 1 {
            break;
        }
    }
    Err(LogicError::Exhausted { max_worlds, depth: searched.unwrap_or(0) })
}

fn prune(mut cm: Countermodel, phi: &Formula) -> Countermodel {
    loop {
        let candidates: Vec<usize> = (1..cm.model.len()).filter(|&r| !cm.model.reaches(r, cm.world)).collect();
        let mut improved = false;
        for r in candidates {
            let (smaller, map) = cm.model.without_subtree(r);
            let Some(w) = map[cm.world] else { continue };
            if smaller.forces(w, phi, cm.mode) == Ok(false) {
                cm = Countermodel { model: smaller, world: w, mode: cm.mode };
                improved = true;
                break;
            }
        }
        if !improved {
            return cm;
        }
    }
}

/// `box[1](A) | ~box[1](A)`: whether `A` was affirmed by stage 1 is settled.
pub fn settled_formula(atom: &str) -> Formula {
    let b = Formula::boxed(1, Formula::atom(atom));
    Formula::or(b.clone(), Formula::not(b))
}

/// `(exists n <= bound. G[n](B)) -> B` with `B` = [`settled_formula`].
pub fn niekus_future_to_present(atom: &str, bound: u32) -> Formula {
    let b = settled_formula(atom);
    Formula::imp(Formula::any_of(0..=bound, |n| Formula::g(n, b.clone())), b)
}

/// `forall n <= bound. G[n](A) | ~G[n](A)`.
pub fn niekus_future_excluded_middle(atom: &str, bound: u32) -> Formula {
    let a = Formula::atom(atom);
    Formula::all_of(0..=bound, |n| Formula::or(Formula::g(n, a.clone()), Formula::not(Formula::g(n, a.clone()))))
}

/// `A -> exists n <= bound. G[n](A)`.
pub fn niekus_present_to_future(atom: &str, bound: u32) -> Formula {
    let a = Formula::atom(atom);
    Formula::imp(a.clone(), Formula::any_of(0..=bound, |n| Formula::g(n, a.clone())))
}

// ------------------------------------------------------------ axiom suite

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchingResult {
    pub name: String,
    pub formula: Formula,
    pub mode: GMode,
    pub expect_countermodel: bool,
    /// Worlds in the pruned countermodel, or `None` if none was found.
    pub countermodel_worlds: Option<usize>,
}

impl BranchingResult {
    pub fn as_expected(&self) -> bool {
        self.countermodel_worlds.is_some() == self.expect_countermodel
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub schedules: usize,
    pub checks: usize,
    pub failures: Vec<String>,
    pub branching: Vec<BranchingResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.branching.iter().all(BranchingResult::as_expected)
    }
}

/// Largest world count for branching checks in the suite.
pub const SUITE_MAX_WORLDS: usize = 31;

fn judgment_forms(atom: &str) -> [(JudgmentKind, Formula); 3] {
    let a = Formula::atom(atom);
    [
        (JudgmentKind::Affirm, a.clone()),
        (JudgmentKind::Refute, Formula::not(a.clone())),
        (JudgmentKind::DoubleNeg, Formula::not(Formula::not(a))),
    ]
}

/// Trace-semantics sweep over every schedule on `atom_count` atoms up to
/// `horizon`, plus the branching checks on one atom.
pub fn check_axiom_suite(horizon: usize, atom_count: usize) -> AxiomReport {
    let names: Vec<String> = ["A", "B"].iter().take(atom_count.clamp(1, 2)).map(|s| s.to_string()).collect();
    let atoms: Vec<Atom> = names.iter().map(|n| Atom::new(n.as_str())).collect();
    let mut report = AxiomReport::default();
    let fail = |report: &mut AxiomReport, ok: Result<bool, LogicError>, what: String| {
        report.checks += 1;
        match ok {
            Ok(true) => {}
            Ok(false) => report.failures.push(what),
            Err(e) => report.failures.push(format!("{what}: {e}")),
        }
    };
    for schedule in multi_atom_schedules(&atoms, horizon) {
        report.schedules += 1;
        let trace = crate::subject::build_trace(schedule);
        for name in &names {
            for (kind, form) in judgment_forms(name) {
                let j = Judgment::new(name.as_str(), kind);
                for n in 0..=horizon as u32 {
                    let bx = Formula::boxed(n, form.clone());
                    // decidable at each stage
                    let total = Formula::or(bx.clone(), Formula::not(bx.clone()));
                    fail(&mut report, eval_trace(&trace, &total), format!("decidability {total} on {trace:?}"));
                    for m in n..=horizon as u32 {
                        let mono = Formula::imp(bx.clone(), Formula::boxed(m, form.clone()));
                        fail(&mut report, eval_trace(&trace, &mono), format!("memory {mono}"));
                    }
                }
                // established within H iff some stage made it evident
                let established = trace.first_stage(&j).is_some();
                let some_stage = (0..=horizon).any(|n| trace.boxed(n, &j).expect("in range"));
                fail(&mut report, Ok(established == some_stage), format!("charity for {j}"));
            }
            let a = Formula::atom(name);
            let charity = Formula::imp(a.clone(), Formula::any_of(0..=horizon as u32, |n| Formula::boxed(n, a.clone())));
            let converse = Formula::imp(Formula::any_of(0..=horizon as u32, |n| Formula::boxed(n, a.clone())), a);
            fail(&mut report, eval_trace(&trace, &charity), format!("charity {charity}"));
            fail(&mut report, eval_trace(&trace, &converse), format!("converse {converse}"));
        }
    }
    for mode in [GMode::AllBranches, GMode::ActualPath] {
        let cases = [
            ("future-to-present", niekus_future_to_present("A", 2), true),
            ("future-excluded-middle", niekus_future_excluded_middle("A", 2), true),
            ("present-to-future", niekus_present_to_future("A", 2), false),
        ];
        for (name, formula, expect_countermodel) in cases {
            let found = countermodel_search(&formula, SUITE_MAX_WORLDS, mode).ok().map(|c| c.model.len());
            report.branching.push(BranchingResult {
                name: name.to_string(),
                formula,
                mode,
                expect_countermodel,
                countermodel_worlds: found,
            });
        }
    }
    report
}
