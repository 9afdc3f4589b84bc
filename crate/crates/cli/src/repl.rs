//! Line-oriented front end over a stage-stepping [`Session`].

use std::io::{self, BufRead, Write};

use cslab::numeric::signum;
use cslab::subject::session::{Command, Query, QueryAnswer, SequenceName, Session};
use cslab::{Rational, Verdict};
use cslab::{Atom, Judgment, JudgmentKind};

const DEFAULT_ATOM: &str = "A";

const HELP: &str = "\
commands:
  advance                              move to the next stage
  inject <atom> <affirm|refute|doubleneg>
                                       record evidence at the next stage
  show <seq> [atom] [len]              seq: 0 r1948 r1948pos heyting_r heyting_s
  verdict apart <seq> <seq> [atom]     apartness at the current depth
  box <stage> <atom> <kind>            is the judgment known by the stage
  tested <stage> <atom>                has the atom been tested by the stage
  help | quit";

fn abs(q: Rational) -> Rational {
    if signum(&q) < 0 {
        -q
    } else {
        q
    }
}

enum Parsed {
    Step(Command),
    Help,
    Quit,
}

fn parse_line(line: &str, stage: usize) -> Result<Parsed, String> {
    let words: Vec<&str> = line.split_whitespace().collect();
    let atom = |i: usize| Atom::from(words.get(i).copied().unwrap_or(DEFAULT_ATOM));
    let nat = |i: usize, what: &str| -> Result<usize, String> {
        words.get(i).ok_or(format!("missing {what}"))?.parse().map_err(|_| format!("`{}` is not a {what}", words[i]))
    };
    let kind = |i: usize| -> Result<JudgmentKind, String> { words.get(i).ok_or("missing kind")?.parse() };
    let seq = |i: usize| -> Result<SequenceName, String> { words.get(i).ok_or("missing sequence")?.parse() };
    Ok(match words.as_slice() {
        [] => return Err("empty command".into()),
        ["advance"] => Parsed::Step(Command::Advance),
        ["inject", a, _] => Parsed::Step(Command::Inject(Judgment::new(*a, kind(2)?))),
        ["show", _, ..] if words.len() <= 4 => {
            let len = if words.len() == 4 { nat(3, "length")? } else { stage + 2 };
            Parsed::Step(Command::Query(Query::Prefix { sequence: seq(1)?, atom: atom(2), len }))
        }
        ["verdict", "apart", _, _, ..] if words.len() <= 5 => {
            Parsed::Step(Command::Query(Query::Apart { left: seq(2)?, right: seq(3)?, atom: atom(4) }))
        }
        ["box", _, a, _] => {
            Parsed::Step(Command::Query(Query::Box { stage: nat(1, "stage")?, judgment: Judgment::new(*a, kind(3)?) }))
        }
        ["tested", _, _] => Parsed::Step(Command::Query(Query::TestedBy { stage: nat(1, "stage")?, atom: atom(2) })),
        ["help"] => Parsed::Help,
        ["quit"] | ["exit"] => Parsed::Quit,
        _ => return Err(format!("cannot parse `{line}` (try `help`)")),
    })
}

/// Runs the loop until `quit` or end of input. Every command is answered
/// on one line; rejected commands leave the session untouched.
pub fn run_repl(input: impl BufRead, mut out: impl Write, session: &mut Session) -> io::Result<()> {
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_line(line, session.stage()) {
            Ok(Parsed::Quit) => break,
            Ok(Parsed::Help) => writeln!(out, "{HELP}")?,
            Ok(Parsed::Step(cmd)) => match session.step(cmd) {
                Ok(report) => match report.answer {
                    Some(QueryAnswer::Apart(Verdict::Established(ap))) => writeln!(
                        out,
                        "[stage {}] Established({}, {}) [{}]",
                        report.stage,
                        ap.side,
                        abs(ap.certificate.gap.clone()),
                        ap.certificate
                    )?,
                    Some(answer) => writeln!(out, "[stage {}] {answer}", report.stage)?,
                    None => writeln!(out, "{report}")?,
                },
                Err(errs) => {
                    let msgs: Vec<String> = errs.iter().map(ToString::to_string).collect();
                    writeln!(out, "rejected: {} (session unchanged at stage {})", msgs.join("; "), session.stage())?;
                }
            },
            Err(e) => writeln!(out, "error: {e}")?,
        }
    }
    Ok(())
}
