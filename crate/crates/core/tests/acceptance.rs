//! One line per acceptance criterion, each with its own time limit.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{laws, soundness, taint};
use guidecheck::check::{analyze, find_counterexample, Inputs, Options, Verdict};
use guidecheck::effect::{BuchiDomain, EffExpr, FinAbs, GuidelineAutomaton, ProfileDomain, ToyDomain, ToyFin, ToyInf};
use guidecheck::fj::parse_program;
use guidecheck::region::{infer, Intrinsics, Region, Sig};
use guidecheck::solver::{fixed_point_violations, solve, solve_in_order, EquationSystem};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LIST: &str = include_str!("../fixtures/linked_list.fj");
const LET: &str = include_str!("../fixtures/dispatch_let.fj");
const NARROWING: &str = include_str!("../fixtures/narrowing.fj");
const SERVE: &str = include_str!("../fixtures/serve.fj");
const SERVE_CFG: &str = include_str!("../fixtures/serve.cfg");
const SAFETY: &str = include_str!("../fixtures/safety.gdl");
const LIVENESS: &str = include_str!("../fixtures/liveness.gdl");

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

type Check = Result<(), String>;
type Criterion = (&'static str, u64, fn() -> Check);

fn at(l: &str) -> Region {
    Region::CreatedAt(l.to_string())
}

fn sig(c: &str, r: Region, m: &str) -> Sig {
    Sig::new(c, r, m, vec![])
}

fn parity() -> GuidelineAutomaton {
    GuidelineAutomaton::parse("alphabet: a\nstates: even odd\ninitial: even\naccepting: odd\ntrans: even a odd\ntrans: odd a even\n")
        .unwrap()
}

/// Members and non-members of one finite effect.
fn memberships(d: &ProfileDomain, x: &FinAbs, yes: &[&[usize]], no: &[&[usize]]) -> Check {
    for w in yes {
        ensure!(d.member_fin(w, x), "{w:?} missing from {}", d.describe_fin(x));
    }
    for w in no {
        ensure!(!d.member_fin(w, x), "{w:?} wrongly in {}", d.describe_fin(x));
    }
    Ok(())
}

fn entry_t<'a>(t: &'a EffExpr<Region, FinAbs>, r: &Region) -> Result<&'a FinAbs, String> {
    t.get(r).ok_or_else(|| format!("no entry for {r}"))
}

fn linked_list() -> Check {
    let p = parse_program(LIST).map_err(|e| e.to_string())?;
    let d = ProfileDomain::new(parity()).map_err(|e| e.to_string())?;
    let t = infer(&p, &d, &Intrinsics::none());
    let last = |l: &str| &t.methods[&sig("Node", at(l), "last")].t;

    let l1 = last("l1");
    ensure!(l1.keys().collect::<Vec<_>>() == [&at("l1")], "last@l1 result regions {:?}", l1.keys().collect::<Vec<_>>());
    memberships(&d, entry_t(l1, &at("l1"))?, &[&[0]], &[&[0, 0], &[]])?;

    let l2 = last("l2");
    ensure!(l2.len() == 2, "last@l2 has {} result regions", l2.len());
    memberships(&d, entry_t(l2, &at("l1"))?, &[&[0, 0]], &[&[0]])?;
    memberships(&d, entry_t(l2, &at("l2"))?, &[&[0]], &[&[0, 0]])?;

    memberships(&d, entry_t(last("l3"), &at("l3"))?, &[&[0], &[0, 0], &[0, 0, 0]], &[&[]])?;

    let eta = solve(&EquationSystem::from_table(&t), &d).map_err(|e| e.to_string())?;
    let cyclic = &eta[&sig("Test", Region::Unknown, "cyclic")];
    ensure!(d.member_up_word(&[], &[0], cyclic), "a^ω missing from η(cyclic)");
    ensure!(cyclic.fin.0.is_empty(), "η(cyclic) has finite words");
    ensure!(d.inf_is_bottom(&eta[&sig("Test", Region::Unknown, "linear")]), "η(linear) is not empty");
    Ok(())
}

fn let_precision() -> Check {
    // Accepts exactly aa and bb.
    let g = GuidelineAutomaton::parse(
        "alphabet: a b\nstates: s A B ok\ninitial: s\naccepting: ok\n\
         trans: s a A\ntrans: s b B\ntrans: A a ok\ntrans: B b ok\n",
    )
    .unwrap();
    let p = parse_program(LET).map_err(|e| e.to_string())?;
    let d = ProfileDomain::new(g).map_err(|e| e.to_string())?;
    let t = infer(&p, &d, &Intrinsics::none());
    let twice = &t.methods[&Sig::new("Main", Region::Unknown, "twice", vec![Region::Unknown])].t;
    ensure!(twice.keys().collect::<Vec<_>>() == [&Region::Null], "twice returns {:?}", twice.keys().collect::<Vec<_>>());
    memberships(&d, entry_t(twice, &Region::Null)?, &[&[0, 0], &[1, 1]], &[&[0, 1], &[1, 0]])
}

fn narrowing() -> Check {
    // Accepts exactly the word a.
    let g = GuidelineAutomaton::parse("alphabet: a b\nstates: s ok\ninitial: s\naccepting: ok\ntrans: s a ok\n").unwrap();
    let p = parse_program(NARROWING).map_err(|e| e.to_string())?;
    let d = ProfileDomain::new(g).map_err(|e| e.to_string())?;
    let t = infer(&p, &d, &Intrinsics::none());
    let f = |c: &str, r: Region| &t.methods[&sig(c, r, "f")];
    memberships(&d, entry_t(&f("A", at("l2")).t, &Region::Null)?, &[&[1]], &[&[0]])?;
    memberships(&d, entry_t(&f("A", Region::Unknown).t, &Region::Null)?, &[&[0], &[1]], &[])?;
    ensure!(f("B", at("l1")).is_empty(), "(B, CreatedAt(l1)) entry is not empty");
    Ok(())
}

fn serve_end_to_end() -> Check {
    let opts = Options { entry: Some("Server.serve".into()), ..Options::default() };
    let load = |gdl: &str| {
        Inputs::from_sources(&[("serve.fj", SERVE)], GuidelineAutomaton::parse(gdl).unwrap(), Some(("serve.cfg", SERVE_CFG)))
            .map_err(|e| e.to_string())
    };
    let safe = analyze(&load(SAFETY)?, &opts).map_err(|e| e.to_string())?;
    ensure!(safe.verdict == Verdict::Pass, "safety:\n{}", safe.to_text());
    ensure!(safe.signatures.iter().all(|s| s.passed()), "a safety verdict failed");

    let inputs = load(LIVENESS)?;
    let live = analyze(&inputs, &opts).map_err(|e| e.to_string())?;
    ensure!(live.verdict == Verdict::Fail, "liveness passed");
    let s = live.signatures.iter().find(|s| s.region == "Unknown").ok_or("no Unknown signature")?;
    ensure!(s.infinite == Verdict::Fail && s.terminating == Verdict::Pass, "wrong liveness verdicts");
    let cx = live.counterexamples.first().ok_or("no counterexample")?;
    let g = &inputs.guideline;
    let word = |w: &[String]| g.word(&w.iter().map(String::as_str).collect::<Vec<_>>()).ok_or("bad letter");
    let u = word(&cx.trace)?;
    let v = word(cx.cycle.as_deref().ok_or("counterexample is not a lasso")?)?;
    ensure!(!v.is_empty() && !g.accepts_lasso(&u, &v), "counterexample is accepted");
    let again = find_counterexample(&inputs.program, g, &s.sig(), opts.fuel, &inputs.intrinsics, opts.max_runs)
        .map_err(|e| e.to_string())?;
    ensure!(again.as_ref() == Some(cx), "search is not reproducible");
    Ok(())
}

fn law_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..1000 {
        let g = laws::random_automaton(&mut rng);
        let tag = |e: String| format!("case {case}: {e}\n{g}");
        laws::check_profile_laws(&g, &mut rng).map_err(tag)?;
        laws::check_profiles(&g, &mut rng).map_err(tag)?;
        laws::check_effexpr_order(&g, &mut rng).map_err(tag)?;
        laws::check_faithful(&g, 8, 5).map_err(tag)?;
        if case % 10 == 0 {
            laws::check_oracle_laws(1 + case % 20 / 10, &mut rng).map_err(tag)?;
        }
    }
    laws::check_toy_laws()
}

fn self_loop_precision() -> Check {
    let d = ProfileDomain::new(parity()).map_err(|e| e.to_string())?;
    let f = sig("F", Region::Unknown, "f");
    let sys = EquationSystem { eqs: BTreeMap::from([(f.clone(), EffExpr::single(&d, f.clone(), d.event(0)))]) };
    let eta = solve(&sys, &d).map_err(|e| e.to_string())?;
    ensure!(d.member_up_word(&[], &[0], &eta[&f]), "a^ω missing");
    ensure!(eta[&f].fin.0.is_empty(), "finite words present");
    let naive = ToyDomain.naive_gfp(&ToyFin::Plus);
    ensure!(naive == ToyInf { fin: ToyFin::Plus, omega: true }, "naive fixed point is {naive:?}");
    Ok(())
}

fn soundness_corpus() -> Check {
    let (corpus, stats) = soundness::check_corpus(8);
    ensure!(corpus.len() >= 20, "only {} programs", corpus.len());
    let exc = corpus.iter().filter(|c| soundness::uses_exceptions(c)).count();
    let div = corpus.iter().filter(|c| soundness::diverges(c, 30)).count();
    ensure!(exc >= 5 && div >= 5, "{exc} with exceptions, {div} divergent");
    ensure!(stats.terminated > 0 && stats.thrown > 0 && stats.cut > 0, "{stats:?}");
    ensure!(stats.violations.is_empty(), "{:#?}", stats.violations);
    Ok(())
}

fn golden_systems() -> Vec<(&'static str, EquationSystem<FinAbs>, ProfileDomain)> {
    let mut out = Vec::new();
    let serve_g = GuidelineAutomaton::parse(SAFETY).unwrap();
    let alphabet = serve_g.alphabet().to_vec();
    let programs: [(&str, &str, GuidelineAutomaton, Intrinsics); 3] = [
        ("linked list", LIST, parity(), Intrinsics::none()),
        ("self loop", "class F { Object f() { emit a; return this.f(); } }", parity(), Intrinsics::none()),
        ("serve", SERVE, serve_g, Intrinsics::parse(SERVE_CFG, &alphabet).unwrap()),
    ];
    for (name, src, g, intr) in programs {
        let p = guidecheck::fj::parse_sources(&[(name, src)], Some(g.alphabet())).unwrap();
        let d = ProfileDomain::new(g).unwrap();
        let t = infer(&p, &d, &intr);
        out.push((name, EquationSystem::from_table(&t), d));
    }
    // Four mutually dependent unknowns, one of them closed.
    let d = ProfileDomain::new(parity()).unwrap();
    let (a, e) = (d.event(0), d.epsilon());
    let aa = d.concat(&a, &a);
    let v = |i: usize| sig("X", Region::Unknown, &format!("v{i}"));
    let rows = [vec![(1, a.clone()), (2, aa.clone())], vec![(0, a.clone()), (1, e.clone())], vec![(2, d.fin_join(&a, &aa)), (3, e)], vec![]];
    let mut eqs = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        let mut rhs = EffExpr::new();
        for (j, u) in row {
            rhs.join_entry(&d, v(*j), u);
        }
        eqs.insert(v(i), rhs);
    }
    out.push(("mesh", EquationSystem { eqs }, d));
    out
}

fn solver_invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, sys, d) in golden_systems() {
        let base = solve(&sys, &d).map_err(|e| e.to_string())?;
        let bad = fixed_point_violations(&sys, &d, &base);
        ensure!(bad.is_empty(), "{name}: η ≠ S(η) at {bad:?}");
        let mut order: Vec<Sig> = sys.eqs.keys().cloned().collect();
        for _ in 0..10 {
            order.shuffle(&mut rng);
            let other = solve_in_order(&sys, &d, &order).map_err(|e| e.to_string())?;
            for (k, x) in &base {
                ensure!(d.inf_eq(x, &other[k]), "{name}: {k} depends on the order");
            }
        }
    }
    Ok(())
}

fn taint_corpus() -> Check {
    let results = taint::run_corpus();
    ensure!(results.len() == 12, "{} programs", results.len());
    for r in &results {
        ensure!(r.actual == r.expected, "{}: expected {:?}, got {:?}", r.name, r.expected, r.actual);
        ensure!(r.actual == Verdict::Pass || r.counterexample, "{}: no witness", r.name);
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("linked-list effects and infinite effects", 1, linked_list),
        ("let composition keeps per-region precision", 1, let_precision),
        ("allocation sites narrow dispatch", 1, narrowing),
        ("serve: safety passes, liveness fails with a validated witness", 2, serve_end_to_end),
        ("algebra laws on 1000 random automata, faithful abstraction", 60, law_suite),
        ("self-loop solves to a^ω; naive in-lattice fixed point keeps a+", 1, self_loop_precision),
        ("soundness corpus: observed traces inside inferred effects", 60, soundness_corpus),
        ("solver order invariance and fixed-point law", 10, solver_invariance),
        ("taint mini-corpus matches hand verdicts", 60, taint_corpus),
    ];
    println!();
    let mut failed = Vec::new();
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let result = result.and_then(|()| {
            if took <= Duration::from_secs(limit) {
                Ok(())
            } else {
                Err(format!("took {took:.2?}, limit {limit} s"))
            }
        });
        let status = if result.is_ok() { "PASS" } else { "FAIL" };
        println!("criterion {}: {status} ({:.2?}) {name}", i + 1, took);
        if let Err(e) = result {
            println!("    {}", e.replace('\n', "\n    "));
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
