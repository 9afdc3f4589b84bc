//! Acceptance criteria 1-9. Prints one line per criterion and exits
//! nonzero if any criterion fails outside its recorded analysis.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cslab::bks::{
    alpha_from_trace, bks_plus_from_conditional, cs_enumerate, dedup, species_enumerator, verify_bks_clauses,
    zigzag_merge, BinarySeq, SpeciesFixture,
};
use cslab::constructions::{
    brouwer1948_r, conditional_checking, difference_quotient, direct_checking, heyting_pair, omega, omega_sum,
    tangency_search, two_sided_checking, Drift,
};
use cslab::creal::{apart, dyadic_embed, NatStream};
use cslab::logic::{
    check_axiom_suite, countermodel_search, eval_trace, niekus_future_excluded_middle, niekus_future_to_present,
    parse, BranchModel, Formula, GMode, LogicError,
};
use cslab::numeric::{dyadic, int, rat};
use cslab::subject::{build_trace, one_atom_schedules};
use cslab::{pair, unpair, Atom, Bounds, CReal, Judgment, JudgmentKind, RawSchedule, Rational, Side, SubjectTrace, Verdict};

const SWEEP_H: usize = 10;

type Criterion = (&'static str, fn() -> Line, Option<Duration>);

struct Line {
    passed: bool,
    /// A failure whose cause is analysed and matched exactly.
    documented: bool,
    detail: String,
}

fn ok(passed: bool, detail: impl Into<String>) -> Line {
    Line { passed, documented: false, detail: detail.into() }
}

fn f64_of(q: &Rational) -> f64 {
    Bounds::exact(q.clone()).to_f64()
}

fn within_f64(b: &Bounds, target: f64, tol: f64) -> bool {
    (b.to_f64() - target).abs() <= tol && b.width() < rat(1, 1_000_000_000)
}

fn sweep() -> Vec<SubjectTrace> {
    one_atom_schedules(&Atom::from("A"), SWEEP_H).into_iter().map(build_trace).collect()
}

/// Stage and kind of each event on atom A, read straight from the schedule.
fn events(t: &SubjectTrace) -> BTreeMap<JudgmentKind, usize> {
    t.schedule().events().filter(|e| e.judgment.atom.as_str() == "A").map(|e| (e.judgment.kind, e.stage)).collect()
}

fn criterion_1() -> Line {
    let mut bad = Vec::new();
    for p in 0u128..65_536 {
        let (n, k) = unpair(p);
        if pair(n, k) != p {
            bad.push(p);
        }
    }
    let mut seen = HashSet::new();
    for n in 0u64..256 {
        for k in 0u64..256 {
            let code = pair(n, k);
            let s = (n + k) as u128;
            if code != s * (s + 1) / 2 + k as u128 || !seen.insert(code) {
                bad.push(code);
            }
        }
    }
    ok(bad.is_empty(), format!("round-trip on 65536 codes, 65536 distinct pairs, {} exceptions", bad.len()))
}

fn criterion_2() -> Line {
    let mut bad = Vec::new();
    let traces = sweep();
    for t in &traces {
        let ev = events(t);
        let r = brouwer1948_r(t, &Atom::from("A"));
        let decisive = ev
            .get(&JudgmentKind::Affirm)
            .map(|&m| (m, Side::Right))
            .or_else(|| ev.get(&JudgmentKind::Refute).map(|&m| (m, Side::Left)));
        // undecided sequences are only known up to the horizon
        let terms = r.known_prefix(SWEEP_H + 4);
        let len = terms.len();
        if len < SWEEP_H {
            bad.push(format!("{ev:?}: only {len} terms"));
        }
        // independent reconstruction of the sequence
        for (i, v) in terms.iter().enumerate() {
            let want = match decisive {
                Some((m, side)) if i + 1 >= m => {
                    if side == Side::Right {
                        dyadic(m as u32)
                    } else {
                        -dyadic(m as u32)
                    }
                }
                _ => int(0),
            };
            if *v != want {
                bad.push(format!("{ev:?}: term {i}"));
            }
        }
        for p in 0..len as u32 {
            let n = r.modulus(p);
            for i in n..len {
                for j in n..len {
                    if (&terms[i] - &terms[j]) > dyadic(p) || (&terms[j] - &terms[i]) > dyadic(p) {
                        bad.push(format!("{ev:?}: modulus at p={p} ({i},{j})"));
                    }
                }
            }
        }
        match (apart(&CReal::zero(), &r, SWEEP_H), decisive) {
            (Ok(Verdict::Established(a)), Some((_, side))) if a.side == side => {}
            (Ok(Verdict::Unknown { depth: SWEEP_H }), None) => {}
            (v, d) => bad.push(format!("{ev:?}: verdict {v:?} for {d:?}")),
        }
    }
    ok(bad.is_empty(), format!("{} schedules at H={SWEEP_H}, exceptions {:?}", traces.len(), bad))
}

fn criterion_3() -> Line {
    let h = SWEEP_H;
    let near = dyadic(h as u32 - 2);
    let mut exceptions = BTreeSet::new();
    let mut other = Vec::new();
    for t in sweep() {
        let ev = events(&t);
        let tested = [JudgmentKind::Refute, JudgmentKind::DoubleNeg].iter().filter_map(|k| ev.get(k)).min().copied();
        let (_, s) = heyting_pair(&t, &Atom::from("A"));
        let established = matches!(apart(&CReal::zero(), &s, h), Ok(Verdict::Established(_)));
        // the ideal value of s: 2^-m after an even test, 0 otherwise
        let ideal = match tested {
            Some(m) if m % 2 == 0 => dyadic(m as u32),
            _ => int(0),
        };
        let even = tested.is_some_and(|m| m % 2 == 0);
        if established != even {
            other.push(format!("{ev:?}: apart {established}"));
        }
        let close = ideal <= near;
        if close != !even {
            exceptions.insert(tested.unwrap_or(0));
        }
    }
    // an even test at m >= H - 2 leaves s = 2^-m, itself within 2^-(H-2) of 0
    let analysed: BTreeSet<usize> = (h - 2..=h).filter(|m| m % 2 == 0).collect();
    if !other.is_empty() {
        return ok(false, format!("apart dichotomy broken: {other:?}"));
    }
    if exceptions.is_empty() {
        return ok(true, "apart(0,s) and closeness both follow test parity");
    }
    Line {
        passed: false,
        documented: exceptions == analysed,
        detail: format!(
            "apart(0,s) follows parity with zero exceptions; closeness within 2^-{} fails for even test stages {:?} \
             (s = 2^-m there is itself that close to 0), analysed set {:?}",
            h - 2,
            exceptions,
            analysed
        ),
    }
}

fn criterion_4() -> Line {
    let two = Drift::dyadic_two_winged();
    let right = Drift::dyadic_right();
    let a = Atom::from("A");
    let mut bad = Vec::new();
    let traces = sweep();
    for t in &traces {
        let ev = events(t);
        let r = brouwer1948_r(t, &a);
        let c = two_sided_checking(&two, t, &a).expect("two-winged drift");
        if r.known_prefix(SWEEP_H + 6) != c.known_prefix(SWEEP_H + 6) {
            bad.push(format!("{ev:?}: two-sided differs"));
        }
        let decisive = ev.contains_key(&JudgmentKind::Affirm) || ev.contains_key(&JudgmentKind::Refute);
        let d = direct_checking(&right, t, &a);
        let verdict = apart(&d, right.kernel(), SWEEP_H + 2);
        if decisive && !matches!(verdict, Ok(Verdict::Established(_))) {
            bad.push(format!("{ev:?}: direct {verdict:?}"));
        }
    }
    ok(bad.is_empty(), format!("{} schedules, exceptions {bad:?}", traces.len()))
}

fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> BinarySeq {
    BinarySeq::new((0..len).map(|_| rng.random_range(0..=1u8)).collect(), "random").expect("binary")
}

fn criterion_5() -> Line {
    let mut bad = Vec::new();
    let a = Atom::from("A");
    // clause suite and dedup invariance
    for t in sweep() {
        for kind in JudgmentKind::ALL {
            let j = Judgment::new(a.clone(), kind);
            let alpha = alpha_from_trace(&t, &j);
            let before = verify_bks_clauses(&alpha, &t, &j, SWEEP_H, false);
            let after = verify_bks_clauses(&dedup(&alpha), &t, &j, SWEEP_H, false);
            if !before.all_pass() || before.outcomes() != after.outcomes() {
                bad.push(format!("clauses {j} on {:?}", events(&t)));
            }
        }
    }
    // zigzag round trip
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let family: Vec<BinarySeq> = (0..64).map(|_| random_bits(&mut rng, 64)).collect();
    let len = pair(63, 63) as usize + 1;
    let z = zigzag_merge(&family, len);
    for x in 0..64u64 {
        for k in 0..64u64 {
            if z.beta.get(pair(x, k) as usize) != family[x as usize].get(k as usize) {
                bad.push(format!("zigzag ({x},{k})"));
            }
        }
    }
    // enumerators on random fixtures
    for i in 0..200 {
        let h = rng.random_range(1..=12usize);
        let size = rng.random_range(0..=6usize);
        let normalized = i % 2 == 0;
        let mut stages = BTreeMap::new();
        while stages.len() < size {
            let x = rng.random_range(1..=30u64);
            // stages past H model members not yet proved
            stages.insert(x, rng.random_range(1..=h + 3));
        }
        let assumed = if normalized { Some(0) } else if rng.random_bool(0.5) { Some(rng.random_range(31..40)) } else { None };
        let fixture = SpeciesFixture::new("X", assumed);
        let mut raw = RawSchedule::new(h);
        for (&x, &s) in stages.iter().filter(|(_, &s)| s <= h) {
            raw = raw.with(s, Judgment::affirm(fixture.member_atom(x)));
        }
        let t = SubjectTrace::from_raw(&raw).expect("valid fixture");
        let proved = |x: u64| if Some(x) == assumed { Some(0) } else { stages.get(&x).copied().filter(|&s| s <= h) };
        let inhabitant = (0..40).filter_map(|x| proved(x).map(|s| (s, x))).min().map(|(_, x)| x);
        let mut enumerators = vec![("species", species_enumerator(&t, &fixture), inhabitant)];
        if normalized {
            enumerators.push(("cs", cs_enumerate(&t, &fixture), Some(0)));
        }
        for (name, f, a0) in enumerators {
            match (f, a0) {
                (Err(_), None) => {}
                (Ok(f), Some(a0)) => {
                    for n in 0..40u64 {
                        let member = proved(n).is_some();
                        if f.enumerates(n) != member {
                            bad.push(format!("{name} fixture {i}: n={n}"));
                        }
                        for k in 0..=h as u64 {
                            let want = if proved(n).is_some_and(|s| s <= k as usize) { n } else { a0 };
                            if f.eval(pair(n, k)) != Some(want) {
                                bad.push(format!("{name} fixture {i}: f({n},{k})"));
                            }
                        }
                    }
                }
                (f, a0) => bad.push(format!("{name} fixture {i}: {:?} vs {a0:?}", f.map(|e| e.inhabitant()))),
            }
        }
    }
    // strong witness from the conditional checking number
    let drift = Drift::sqrt2_convergents();
    for t in one_atom_schedules(&a, SWEEP_H).into_iter().filter(|s| s.events().count() <= 1).map(build_trace) {
        let affirm = events(&t).get(&JudgmentKind::Affirm).copied();
        let c = conditional_checking(&drift, &t, &a).known_prefix(SWEEP_H + 1);
        let kernel = drift.kernel().known_prefix(SWEEP_H + 1);
        match bks_plus_from_conditional(&c, &kernel) {
            Ok(alpha) => {
                let positions_ok = (0..alpha.len()).all(|n| (alpha.get(n) == Some(1)) == affirm.is_some_and(|m| n >= m));
                if (alpha.first_one().is_some() != affirm.is_some()) || !positions_ok {
                    bad.push(format!("bks+ {:?}: {alpha}", events(&t)));
                }
            }
            Err(e) => bad.push(format!("bks+ {e}")),
        }
    }
    ok(bad.is_empty(), format!("exceptions {bad:?}"))
}

fn criterion_6() -> Line {
    let mut bad = Vec::new();
    let root2_4 = 2f64.sqrt() / 4.0;
    let mut discrepancy = Vec::new();
    for nu in 1..=10u32 {
        let zero = Bounds::exact(int(0));
        for x in [dyadic(nu), dyadic(nu - 1)] {
            for sx in [x.clone(), -x] {
                if omega(nu, &sx).ok() != Some(zero.clone()) {
                    bad.push(format!("nu={nu}: omega({sx}) not 0"));
                }
            }
        }
        let vertex = rat(3, 1) * dyadic(nu + 1);
        let peak = dyadic(nu + 1);
        if omega(nu, &vertex).ok() != Some(Bounds::exact(peak.clone())) {
            bad.push(format!("nu={nu}: vertex"));
        }
        // no sampled point of the support exceeds the vertex value
        let (lo, hi) = (dyadic(nu), dyadic(nu - 1));
        for i in 0..=64 {
            let x = &lo + (&hi - &lo) * rat(i, 64);
            if omega(nu, &x).map(|b| b.hi > peak).unwrap_or(true) {
                bad.push(format!("nu={nu}: exceeds peak at {x}"));
            }
        }
        let t = tangency_search(nu, &dyadic(40)).expect("nu >= 1");
        let x_star = 4.0 * 2f64.powi(-(nu as i32)) / 3.0;
        if !within_f64(&t.slope, root2_4, 1e-6) || (f64_of(&t.abscissa) - x_star).abs() > 1e-6 {
            bad.push(format!("nu={nu}: tangency {} at {}", t.slope, f64_of(&t.abscissa)));
        }
        // the printed touch-point expression matches the ordinate instead
        let printed = 2f64.powf((1.0 - 2.0 * nu as f64) / 2.0) / 3.0;
        let ordinate = omega(nu, &t.abscissa).map(|b| b.to_f64()).unwrap_or(f64::NAN);
        if (printed - ordinate).abs() > 1e-6 {
            discrepancy.push(nu);
        }
    }
    let q = difference_quotient(|x| Ok(omega_sum(x, None)), &int(0), &rat(2, 3));
    if !q.as_ref().is_ok_and(|b| within_f64(b, root2_4, 1e-6)) {
        bad.push(format!("difference quotient {q:?}"));
    }
    if !discrepancy.is_empty() {
        bad.push(format!("printed touch-point expression is not the ordinate for nu {discrepancy:?}"));
    }
    ok(
        bad.is_empty(),
        format!("nu 1..=10: zeros, vertex, slope sqrt(2)/4, abscissa 2^(2-nu)/3, chord on [0,2/3]; exceptions {bad:?}"),
    )
}

fn criterion_7() -> Line {
    let mut bad = Vec::new();
    let cases = [(vec![], vec![1], rat(1, 2)), (vec![2], vec![1], rat(3, 4)), (vec![1], vec![2], rat(1, 6))];
    for (prefix, cycle, value) in cases {
        let x = dyadic_embed(&NatStream::new(prefix.clone(), cycle.clone()).expect("positive"));
        let v = x.term(42).expect("lawlike");
        let d = &v - &value;
        if d > dyadic(40) || -d > dyadic(40) {
            bad.push(format!("{prefix:?}{cycle:?}*: {v}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let prefix: Vec<u64> = (0..rng.random_range(0..6)).map(|_| rng.random_range(1..=3)).collect();
        let cycle: Vec<u64> = (0..rng.random_range(1..4)).map(|_| rng.random_range(1..=3)).collect();
        let a = NatStream::new(prefix, cycle).expect("positive");
        let i = rng.random_range(1..=8usize);
        let b = a.with_term(i, a.get(i) + 1).expect("positive");
        let want = if i == 1 { Side::Right } else { Side::Left };
        match apart(&dyadic_embed(&a), &dyadic_embed(&b), 64) {
            Ok(Verdict::Established(ap)) if ap.side == want => {}
            v => bad.push(format!("{a} vs raise a_{i}: {v:?}")),
        }
    }
    ok(bad.is_empty(), format!("3 values within 2^-40 at depth 42, 100 neighbour pairs; exceptions {bad:?}"))
}

fn criterion_8() -> Line {
    let mut bad = Vec::new();
    let mut schedules = 0;
    for (h, atoms) in [(1, 1), (2, 1), (3, 1), (4, 1), (5, 1), (6, 1), (3, 2), (6, 2)] {
        let r = check_axiom_suite(h, atoms);
        schedules += r.schedules;
        bad.extend(r.failures.into_iter().take(3));
        bad.extend(r.branching.iter().filter(|b| !b.as_expected()).map(|b| format!("{} {}", b.name, b.mode)));
    }
    // box table read directly off the schedule
    for t in one_atom_schedules(&Atom::from("A"), 6).into_iter().map(build_trace) {
        let affirm = events(&t).get(&JudgmentKind::Affirm).copied();
        for n in 0..=6u32 {
            let got = eval_trace(&t, &Formula::boxed(n, Formula::atom("A")));
            if got != Ok(affirm.is_some_and(|m| m <= n as usize)) {
                bad.push(format!("box[{n}] on {:?}", events(&t)));
            }
        }
    }
    let mut models = Vec::new();
    let targets = [niekus_future_to_present("B", 2), niekus_future_excluded_middle("A", 2)];
    for mode in [GMode::AllBranches, GMode::ActualPath] {
        for phi in &targets {
            match countermodel_search(phi, 31, mode) {
                Ok(cm) if cm.model.len() <= 31 && cm.model.forces(cm.world, phi, mode) == Ok(false) => {
                    models.push((cm.model, phi.clone()))
                }
                other => bad.push(format!("{phi} ({mode}): {:?}", other.map(|c| c.model.len()))),
            }
        }
    }
    let dne = parse("~~(A | ~A)").expect("formula");
    if !matches!(countermodel_search(&dne, 31, GMode::AllBranches), Err(LogicError::Exhausted { .. })) {
        bad.push("~~(A | ~A) refuted".into());
    }
    let probes: Vec<Formula> = ["A | ~A", "~~A -> A", "G[1](A) | ~G[1](A)", "box[1](A) -> G[1](A)", "~A -> G[2](~A)"]
        .iter()
        .map(|s| parse(s).expect("formula"))
        .chain(targets.iter().cloned())
        .collect();
    let atoms = vec!["A".to_string(), "B".to_string()];
    for depth in 2..=4 {
        models.push((BranchModel::evidence_tree(&atoms[..1], depth), Formula::Bottom));
    }
    models.push((BranchModel::evidence_tree(&atoms, 2), Formula::Bottom));
    let mut checked = 0;
    for (model, own) in &models {
        for phi in probes.iter().chain([own]) {
            if phi.max_index() as usize > model.depth() {
                continue;
            }
            checked += 1;
            match model.monotonicity_violations(phi, GMode::AllBranches) {
                Ok(v) if v.is_empty() => {}
                other => bad.push(format!("monotonicity {phi}: {other:?}")),
            }
        }
    }
    ok(
        bad.is_empty(),
        format!("{schedules} schedules swept, 4 countermodels within 31 worlds, {checked} monotonicity checks; exceptions {bad:?}"),
    )
}

fn criterion_9() -> Line {
    let bin = env!("CARGO_BIN_EXE_cslab");
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map(|d| d.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect())
        .unwrap_or_default();
    files.sort();
    let mut bad = Vec::new();
    for f in &files {
        let status = Command::new(bin).arg("run").arg(f).output().map(|o| o.status.code());
        if status.as_ref().ok() != Some(&Some(0)) {
            bad.push(format!("{}: {status:?}", f.display()));
        }
    }
    let tmp = tempfile::tempdir().expect("tempdir");
    let outs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let out = tmp.path().join(format!("omega{i}.csv"));
            let _ = Command::new(bin)
                .args(["omega-csv", "--nu-max", "4", "--samples", "2000", "--out"])
                .arg(&out)
                .status();
            std::fs::read(out).unwrap_or_default()
        })
        .collect();
    if outs[0].is_empty() || outs[0] != outs[1] {
        bad.push("omega-csv output differs between runs".into());
    }
    ok(files.len() >= 12 && bad.is_empty(), format!("{} scenario files, csv {} bytes; exceptions {bad:?}", files.len(), outs[0].len()))
}

fn main() {
    // time budgets where the criterion states one; criterion 3 reuses the sweep of 2
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: [Criterion; 9] = [
        ("pairing bijectivity", criterion_1, secs(1)),
        ("schedule sweep soundness", criterion_2, secs(10)),
        ("heyting parity dichotomy", criterion_3, secs(10)),
        ("checking-number equivalence", criterion_4, None),
        ("bks clause suite", criterion_5, secs(30)),
        ("omega geometry", criterion_6, secs(5)),
        ("dyadic embedding", criterion_7, None),
        ("stage logic", criterion_8, secs(60)),
        ("end to end", criterion_9, None),
    ];
    let mut failed = false;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let line = run();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = line.passed && in_time;
        let status = match (pass, line.documented) {
            (true, _) => "PASS",
            (false, true) if in_time => "FAIL (documented)",
            _ => "FAIL",
        };
        println!(
            "criterion {}: {status} {name} [{:.2}s{}]: {}",
            i + 1,
            elapsed.as_secs_f64(),
            budget.map(|b| format!(" of {}s", b.as_secs())).unwrap_or_default(),
            line.detail
        );
        failed |= !pass && !(line.documented && in_time);
    }
    if failed {
        std::process::exit(1);
    }
}
