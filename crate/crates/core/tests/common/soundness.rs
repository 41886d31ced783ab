//! Runs every corpus program in the interpreter and checks each observed
//! trace against the inferred effects of its entry signature.

use std::fs;
use std::path::{Path, PathBuf};

use guidecheck::effect::bitset::BitSet;
use guidecheck::effect::{FinAbs, GuidelineAutomaton, MixAbs, ProfileDomain};
use guidecheck::fj::{parse_sources, Program};
use guidecheck::interp::{entry_state, enumerate_traces, satisfies, Entry, Outcome, Value};
use guidecheck::region::{infer, region_meta, Intrinsics};
use guidecheck::solver::{solve, EquationSystem};

pub const ALPHABET: [&str; 3] = ["a", "b", "c"];

pub struct CorpusProgram {
    pub name: String,
    pub source: String,
    pub program: Program,
    pub intrinsics: Intrinsics,
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus")
}

pub fn load_corpus() -> Vec<CorpusProgram> {
    let alphabet: Vec<String> = ALPHABET.map(String::from).to_vec();
    let mut files: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "fj"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|path| {
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            let source = fs::read_to_string(&path).unwrap();
            let program = parse_sources(&[(name.as_str(), source.as_str())], Some(&alphabet))
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            guidecheck::fj::fj_typecheck(&program).unwrap_or_else(|e| panic!("{name}: {e:?}"));
            let cfg = path.with_extension("cfg");
            let intrinsics = if cfg.exists() {
                let i = Intrinsics::parse(&fs::read_to_string(&cfg).unwrap(), &alphabet).unwrap();
                i.validate(&program).unwrap();
                i
            } else {
                Intrinsics::none()
            };
            CorpusProgram { name, source, program, intrinsics }
        })
        .collect()
}

fn automaton(text: &str) -> GuidelineAutomaton {
    GuidelineAutomaton::parse(text).unwrap()
}

/// Automata whose profiles separate the corpus traces in different ways.
pub fn guidelines() -> Vec<GuidelineAutomaton> {
    vec![
        automaton(
            "alphabet: a b c\nstates: q0 q1 q2\ninitial: q0\naccepting: q0\n\
             trans: q0 a q1\ntrans: q1 a q2\ntrans: q2 a q0\n\
             trans: q0 b q0\ntrans: q1 b q1\ntrans: q2 b q2\ntrans: q0 c q0\ntrans: q1 c q1\ntrans: q2 c q2\n",
        ),
        automaton(
            "alphabet: a b c\nstates: s A B C\ninitial: s\naccepting: A C\n\
             trans: s a A\ntrans: s b B\ntrans: s c C\ntrans: A a A\ntrans: A b B\ntrans: A c C\n\
             trans: B a A\ntrans: B b B\ntrans: B c C\ntrans: C a A\ntrans: C b B\ntrans: C c C\n",
        ),
        automaton(
            "alphabet: a b c\nstates: n0 n1 n2\ninitial: n0\naccepting: n2\n\
             trans: n0 a n0\ntrans: n0 b n0\ntrans: n0 c n0\ntrans: n0 b n1\ntrans: n1 c n2\n\
             trans: n2 a n2\ntrans: n2 b n2\ntrans: n2 c n2\n",
        ),
    ]
}

#[derive(Debug, Default)]
pub struct Stats {
    pub entries: usize,
    pub terminated: usize,
    pub thrown: usize,
    pub cut: usize,
    pub violations: Vec<String>,
}

impl Stats {
    fn absorb(&mut self, other: Stats) {
        self.entries += other.entries;
        self.terminated += other.terminated;
        self.thrown += other.thrown;
        self.cut += other.cut;
        self.violations.extend(other.violations);
    }
}

/// Whether some word of a target class extends `w`: the profile of `w`
/// reaches a target by right multiplication with letters.
fn extensible(d: &ProfileDomain, w: &[usize], targets: &BitSet) -> bool {
    let m = d.monoid();
    let k = d.automaton().num_letters();
    let start = m.of_word(w);
    let mut seen = BitSet::singleton(start);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        if targets.contains(x) {
            return true;
        }
        for a in 0..k {
            let y = m.right_letter(x, a);
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    false
}

fn targets(fins: impl IntoIterator<Item = FinAbs>, eta: &MixAbs) -> BitSet {
    let mut t = eta.fin.0.clone();
    for f in fins {
        t.union_with(&f.0);
    }
    for &(s, _) in &eta.inf {
        t.insert(s);
    }
    t
}

/// Checks every typed, analyzed signature of `c` under guideline `g`.
pub fn check_program(c: &CorpusProgram, g: &GuidelineAutomaton, fuel: usize) -> Stats {
    let d = ProfileDomain::new(g.clone()).unwrap();
    let p = &c.program;
    let meta = region_meta(p);
    let table = infer(p, &d, &c.intrinsics);
    let eta = solve(&EquationSystem::from_table(&table), &d).unwrap();
    let mut stats = Stats::default();
    for (sig, e) in &table.methods {
        if !meta.contains(&sig.recv, &sig.class) || c.intrinsics.covers(p, sig) || entry_state(p, &meta, sig).is_none() {
            continue;
        }
        stats.entries += 1;
        let reach = targets(e.t.iter().chain(e.h.iter()).map(|(_, x)| x.clone()), &eta[sig]);
        for (script, o) in enumerate_traces(p, &meta, &Entry::Sig(sig.clone()), fuel, &c.intrinsics) {
            let bad = |what: &str, trace: &[usize]| {
                format!("{} {sig} script {script:?}: {what} trace {}", c.name, g.render_word(trace))
            };
            match &o {
                Outcome::Terminated { value, heap, trace } => {
                    stats.terminated += 1;
                    let ok = e.t.iter().any(|(r, x)| satisfies(&meta, heap, *value, r) && d.member_fin(trace, x));
                    if !ok {
                        stats.violations.push(bad("terminating", trace));
                    }
                }
                Outcome::Thrown { loc, heap, trace } => {
                    stats.thrown += 1;
                    let ok =
                        e.h.iter().any(|(r, x)| satisfies(&meta, heap, Value::Loc(*loc), r) && d.member_fin(trace, x));
                    if !ok {
                        stats.violations.push(bad("exceptional", trace));
                    }
                }
                Outcome::OutOfFuel { trace } | Outcome::ScriptExhausted { trace, .. } => {
                    stats.cut += 1;
                    if !extensible(&d, trace, &reach) {
                        stats.violations.push(bad("cut", trace));
                    }
                }
                _ => {}
            }
        }
    }
    stats
}

/// Whether `Main.run` has a run that is still going after `fuel` calls.
pub fn diverges(c: &CorpusProgram, fuel: usize) -> bool {
    let meta = region_meta(&c.program);
    let Some((decl, _)) = c.program.method_lookup("Main", "run") else { return false };
    let sig = guidecheck::region::Sig::new(
        "Main",
        guidecheck::region::Region::Unknown,
        "run",
        vec![guidecheck::region::Region::Unknown; decl.params.len()],
    );
    enumerate_traces(&c.program, &meta, &Entry::Sig(sig), fuel, &c.intrinsics)
        .iter()
        .any(|(_, o)| matches!(o, Outcome::OutOfFuel { .. }))
}

pub fn uses_exceptions(c: &CorpusProgram) -> bool {
    c.source.contains("throw") || c.intrinsics.entries().iter().any(|e| e.throws.is_some())
}

/// The whole corpus under every guideline.
pub fn check_corpus(fuel: usize) -> (Vec<CorpusProgram>, Stats) {
    let corpus = load_corpus();
    let mut total = Stats::default();
    for g in guidelines() {
        for c in &corpus {
            total.absorb(check_program(c, &g, fuel));
        }
    }
    (corpus, total)
}
