use super::*;

const SERVE: &str = include_str!("../../fixtures/serve.fj");
const SERVE_CFG: &str = include_str!("../../fixtures/serve.cfg");
const SAFETY: &str = include_str!("../../fixtures/safety.gdl");
const LIVENESS: &str = include_str!("../../fixtures/liveness.gdl");

fn serve_with(guideline: &str) -> Inputs {
    let g = GuidelineAutomaton::parse(guideline).unwrap();
    Inputs::from_sources(&[("serve.fj", SERVE)], g, Some(("serve.cfg", SERVE_CFG))).unwrap()
}

fn serve_opts() -> Options {
    Options { entry: Some("Server.serve".into()), ..Options::default() }
}

#[test]
fn serve_meets_the_safety_guideline() {
    let r = analyze(&serve_with(SAFETY), &serve_opts()).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{}", r.to_text());
    assert!(r.counterexamples.is_empty());
    let s = r.signatures.iter().find(|s| s.region == "Unknown").unwrap();
    assert!(s.passed());
    // {authcheck, authcheck·access}^ω lives in the infinite effect.
    let pd = ProfileDomain::new(GuidelineAutomaton::parse(SAFETY).unwrap()).unwrap();
    let inputs = serve_with(SAFETY);
    let table = infer_full(&inputs.program, &pd, &inputs.intrinsics).table;
    let eta = solve(&EquationSystem::from_table(&table), &pd).unwrap();
    let x = &eta[&s.sig()];
    assert!(pd.member_up_word(&[], &[0, 1], x));
    assert!(pd.member_up_word(&[0], &[0, 0, 1], x));
    assert!(!pd.member_up_word(&[], &[1], x));
}

#[test]
fn serve_breaks_the_liveness_guideline_forever() {
    let inputs = serve_with(LIVENESS);
    let r = analyze(&inputs, &serve_opts()).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    let s = r.signatures.iter().find(|s| s.region == "Unknown").unwrap();
    assert_eq!((s.terminating, s.throws, s.infinite), (Verdict::Pass, Verdict::Pass, Verdict::Fail));
    let cx = &r.counterexamples[0];
    let g = &inputs.guideline;
    let u = g.word(&cx.trace.iter().map(String::as_str).collect::<Vec<_>>()).unwrap();
    let v = g.word(&cx.cycle.as_ref().unwrap().iter().map(String::as_str).collect::<Vec<_>>()).unwrap();
    assert!(!g.accepts_lasso(&u, &v));
    assert!(v.contains(&g.letter("access").unwrap()));
}

#[test]
fn straight_line_access_is_caught_at_its_first_event() {
    let g = GuidelineAutomaton::parse(SAFETY).unwrap();
    let src = "class Main { Object run() { emit access; emit log; return null; } }";
    let inputs = Inputs::from_sources(&[("main.fj", src)], g, None).unwrap();
    let r = analyze(&inputs, &Options::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    let cx = &r.counterexamples[0];
    assert_eq!(cx.trace, ["access", "log"]);
    assert_eq!(cx.violated_at, Some(1));
    assert!(cx.cycle.is_none());
}

#[test]
fn universal_guideline_accepts_everything() {
    let g = GuidelineAutomaton::universal(["authcheck", "access", "log"].map(String::from).to_vec());
    let inputs = Inputs::from_sources(&[("serve.fj", SERVE)], g, Some(("serve.cfg", SERVE_CFG))).unwrap();
    for mode in [Mode::Abstract, Mode::Concrete] {
        let r = analyze(&inputs, &Options { mode, ..Options::default() }).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }
}

#[test]
fn passing_programs_have_no_counterexample() {
    let inputs = serve_with(SAFETY);
    let sig = Sig::new("Server", Region::Unknown, "serve", vec![]);
    let found = find_counterexample(&inputs.program, &inputs.guideline, &sig, 10, &inputs.intrinsics, MAX_RUNS).unwrap();
    assert_eq!(found, None);
}

#[test]
fn concrete_mode_agrees_on_serve() {
    for (gdl, expect) in [(SAFETY, Verdict::Pass), (LIVENESS, Verdict::Fail)] {
        let r = analyze(&serve_with(gdl), &Options { mode: Mode::Concrete, ..serve_opts() }).unwrap();
        assert_eq!(r.verdict, expect);
        let eff = r.signatures[0].effects.as_ref().unwrap();
        assert!(eff.infinite.contains('ω'), "{}", eff.infinite);
    }
}

#[test]
fn demand_mode_matches_full_mode_on_the_entry() {
    for gdl in [SAFETY, LIVENESS] {
        let inputs = serve_with(gdl);
        let full = analyze(&inputs, &serve_opts()).unwrap();
        let demand = analyze(&inputs, &Options { demand: true, ..serve_opts() }).unwrap();
        let pick = |r: &Report| r.signatures.iter().find(|s| s.region == "Unknown").cloned().unwrap();
        assert_eq!(pick(&full), pick(&demand));
    }
}

#[test]
fn input_errors() {
    let g = GuidelineAutomaton::parse(SAFETY).unwrap();
    let err = Inputs::from_sources(&[("m.fj", "class M { Object m() { emit launch; return null; } }")], g.clone(), None);
    assert!(matches!(err, Err(CheckError::Parse(_))));
    let inputs = serve_with(SAFETY);
    let bad = Options { entry: Some("Server.nothing".into()), ..Options::default() };
    assert!(matches!(analyze(&inputs, &bad), Err(CheckError::UnknownEntry(_))));
    let cfg = Inputs::from_sources(&[("serve.fj", SERVE)], g, Some(("c.cfg", "Server.nope() -> Null emits eps\n")));
    assert!(matches!(cfg, Err(CheckError::Config { .. })));
}

#[test]
fn reports_are_deterministic() {
    let inputs = serve_with(LIVENESS);
    let a = analyze(&inputs, &serve_opts()).unwrap();
    let b = analyze(&serve_with(LIVENESS), &serve_opts()).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_text(), b.to_text());
}

