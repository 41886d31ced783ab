//! The analysis pipeline behind the command line: load inputs, infer the
//! class table, solve for infinitary effects, and test every effect against
//! the guideline.

mod search;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::effect::{BuchiDomain, Dfa, EffExpr, GuidelineAutomaton, GuidelineError, OracleDomain, OracleLang, ProfileDomain};
use crate::fj::{fj_typecheck, parse_sources, ParseError, Program, TypeError};
use crate::region::{infer_demand, infer_full, ConfigError, Inferred, Intrinsics, Region, Sig};
use crate::solver::{solve, EquationSystem, SolveError};

pub use search::{find_counterexample, Counterexample, MAX_RUNS};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{}", join_lines(.0))]
    Type(Vec<TypeError>),
    #[error("{path}: {source}")]
    Guideline { path: String, source: GuidelineError },
    #[error("{path}: {source}")]
    Config { path: String, source: ConfigError },
    #[error("guideline: {0}")]
    Domain(#[from] crate::effect::profile::ProfileError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("unknown entry `{0}`")]
    UnknownEntry(String),
}

fn join_lines(errs: &[TypeError]) -> String {
    errs.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

fn read(path: &Path) -> Result<String, CheckError> {
    fs::read_to_string(path).map_err(|source| CheckError::Io { path: path.display().to_string(), source })
}

pub fn load_guideline(path: &Path) -> Result<GuidelineAutomaton, CheckError> {
    GuidelineAutomaton::parse(&read(path)?)
        .map_err(|source| CheckError::Guideline { path: path.display().to_string(), source })
}

pub fn load_config(path: &Path, alphabet: &[String]) -> Result<Intrinsics, CheckError> {
    Intrinsics::parse(&read(path)?, alphabet)
        .map_err(|source| CheckError::Config { path: path.display().to_string(), source })
}

/// A checked program with its guideline and intrinsic configuration.
#[derive(Clone, Debug)]
pub struct Inputs {
    pub program: Program,
    pub guideline: GuidelineAutomaton,
    pub intrinsics: Intrinsics,
}

impl Inputs {
    /// Parses and type-checks in-memory sources. Programs may only emit
    /// events of the guideline's alphabet.
    pub fn from_sources(
        programs: &[(&str, &str)],
        guideline: GuidelineAutomaton,
        config: Option<(&str, &str)>,
    ) -> Result<Inputs, CheckError> {
        let program = parse_sources(programs, Some(guideline.alphabet()))?;
        fj_typecheck(&program).map_err(CheckError::Type)?;
        let intrinsics = match config {
            None => Intrinsics::none(),
            Some((path, text)) => {
                let cfg = |source| CheckError::Config { path: path.to_string(), source };
                let intr = Intrinsics::parse(text, guideline.alphabet()).map_err(cfg)?;
                intr.validate(&program).map_err(cfg)?;
                intr
            }
        };
        Ok(Inputs { program, guideline, intrinsics })
    }

    pub fn load(programs: &[PathBuf], guideline: &Path, config: Option<&Path>) -> Result<Inputs, CheckError> {
        let g = load_guideline(guideline)?;
        let texts: Vec<(String, String)> =
            programs.iter().map(|p| Ok((p.display().to_string(), read(p)?))).collect::<Result<_, CheckError>>()?;
        let srcs: Vec<(&str, &str)> = texts.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let cfg = match config {
            Some(path) => Some((path.display().to_string(), read(path)?)),
            None => None,
        };
        Inputs::from_sources(&srcs, g, cfg.as_ref().map(|(a, b)| (a.as_str(), b.as_str())))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Verdicts over the guideline's profile abstraction.
    #[default]
    Abstract,
    /// Inference over explicit languages, abstracted only for the verdict.
    Concrete,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub mode: Mode,
    /// Call budget for each counterexample run.
    pub fuel: usize,
    /// `Class.method` to check; every non-intrinsic method when absent.
    pub entry: Option<String>,
    /// Infer only the signatures reachable from the entry.
    pub demand: bool,
    pub max_runs: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { mode: Mode::Abstract, fuel: 12, entry: None, demand: false, max_runs: MAX_RUNS }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn of(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

/// Effects as languages, keyed by result region for the finite parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Effects {
    pub terminating: BTreeMap<String, String>,
    pub throws: BTreeMap<String, String>,
    pub infinite: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigReport {
    pub class: String,
    pub region: String,
    pub method: String,
    pub args: Vec<String>,
    pub terminating: Verdict,
    pub throws: Verdict,
    pub infinite: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effects: Option<Effects>,
}

impl SigReport {
    pub fn passed(&self) -> bool {
        self.terminating.passed() && self.throws.passed() && self.infinite.passed()
    }

    pub fn sig(&self) -> Sig {
        let region = |s: &str| Region::parse(s).unwrap_or(Region::Unknown);
        Sig::new(&self.class, region(&self.region), &self.method, self.args.iter().map(|a| region(a)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub verdict: Verdict,
    pub mode: Mode,
    pub signatures: Vec<SigReport>,
    pub counterexamples: Vec<Counterexample>,
    pub notes: Vec<String>,
}

/// Abstract effects are rendered as languages only below this monoid size.
const RENDER_LIMIT: usize = 64;

fn parse_entry(p: &Program, entry: &str) -> Result<(String, String), CheckError> {
    let unknown = || CheckError::UnknownEntry(entry.to_string());
    let (c, m) = entry.split_once('.').ok_or_else(unknown)?;
    p.method_lookup(c, m).ok_or_else(unknown)?;
    Ok((c.to_string(), m.to_string()))
}

/// Runs the full check and, for each failing signature, a bounded search
/// for a witnessing execution.
pub fn analyze(inputs: &Inputs, opts: &Options) -> Result<Report, CheckError> {
    let p = &inputs.program;
    let pd = ProfileDomain::new(inputs.guideline.clone())?;
    let entry = opts.entry.as_deref().map(|e| parse_entry(p, e)).transpose()?;
    let seeds: Vec<Sig> = match &entry {
        Some((c, m)) if opts.demand => {
            let arity = p.method_lookup(c, m).map_or(0, |(d, _)| d.params.len());
            vec![Sig::new(c, Region::Unknown, m, vec![Region::Unknown; arity])]
        }
        _ => Vec::new(),
    };
    let wanted = |s: &Sig, intr: &Intrinsics, meta: &crate::region::RegionMeta| {
        meta.contains(&s.recv, &s.class)
            && !intr.covers(p, s)
            && entry.as_ref().is_none_or(|(c, m)| *c == s.class && *m == s.method)
    };

    let mut notes = Vec::new();
    let signatures = match opts.mode {
        Mode::Abstract => {
            let table = run_inference(p, &pd, &inputs.intrinsics, &seeds, opts.demand && entry.is_some());
            let eta = solve(&EquationSystem::from_table(&table.table), &pd)?;
            let render = pd.monoid().len() <= RENDER_LIMIT;
            if !render {
                notes.push(format!("effects not rendered: the guideline has more than {RENDER_LIMIT} profiles"));
            }
            let alphabet = inputs.guideline.alphabet();
            let mut out = Vec::new();
            for (sig, e) in &table.table.methods {
                if !wanted(sig, &inputs.intrinsics, &table.table.meta) {
                    continue;
                }
                let eff = render.then(|| Effects {
                    terminating: render_fin(&e.t, |x| Dfa::gamma(&pd, x).to_regex().render(alphabet)),
                    throws: render_fin(&e.h, |x| Dfa::gamma(&pd, x).to_regex().render(alphabet)),
                    infinite: OracleLang::gamma(&pd, &eta[sig]).render(alphabet),
                });
                out.push(sig_report(sig, &e.t, &e.h, |x| pd.accepts_fin(x), pd.accepts_mix(&eta[sig]), eff));
            }
            out
        }
        Mode::Concrete => {
            let od = OracleDomain::new(inputs.guideline.num_letters());
            let table = run_inference(p, &od, &inputs.intrinsics, &seeds, opts.demand && entry.is_some());
            if table.capped {
                notes.push(format!(
                    "concrete inference stopped at its iteration cap after {} rounds; effects may be incomplete",
                    table.iterations
                ));
            }
            notes.push("concrete mode is advisory; abstract mode gives the authoritative verdict".into());
            let eta = solve(&EquationSystem::from_table(&table.table), &od)?;
            let alphabet = inputs.guideline.alphabet();
            let mut out = Vec::new();
            for (sig, e) in &table.table.methods {
                if !wanted(sig, &inputs.intrinsics, &table.table.meta) {
                    continue;
                }
                let eff = Effects {
                    terminating: render_fin(&e.t, |x: &Dfa| x.to_regex().render(alphabet)),
                    throws: render_fin(&e.h, |x: &Dfa| x.to_regex().render(alphabet)),
                    infinite: eta[sig].render(alphabet),
                };
                let inf_ok = pd.accepts_mix(&eta[sig].alpha(&pd));
                out.push(sig_report(sig, &e.t, &e.h, |x| pd.accepts_fin(&x.alpha(&pd)), inf_ok, Some(eff)));
            }
            out
        }
    };
    if signatures.is_empty() {
        notes.push("no signature matched the selection".into());
    }

    let mut counterexamples = Vec::new();
    let failing: Vec<&SigReport> = signatures.iter().filter(|s| !s.passed()).collect();
    if !failing.is_empty() {
        notes.push(format!(
            "counterexample search is bounded and best effort (fuel {}, at most {} runs per signature); \
             a failing signature without one may still be a real violation",
            opts.fuel, opts.max_runs
        ));
    }
    for s in failing {
        if let Some(cx) = find_counterexample(p, &inputs.guideline, &s.sig(), opts.fuel, &inputs.intrinsics, opts.max_runs)? {
            counterexamples.push(cx);
        }
    }
    let verdict = Verdict::of(signatures.iter().all(SigReport::passed));
    Ok(Report { verdict, mode: opts.mode, signatures, counterexamples, notes })
}

fn run_inference<D: BuchiDomain>(p: &Program, d: &D, intr: &Intrinsics, seeds: &[Sig], demand: bool) -> Inferred<D::Fin> {
    if demand {
        infer_demand(p, d, intr, seeds)
    } else {
        infer_full(p, d, intr)
    }
}

fn render_fin<E: Clone + Eq>(x: &EffExpr<Region, E>, show: impl Fn(&E) -> String) -> BTreeMap<String, String> {
    x.iter().map(|(r, e)| (r.to_string(), show(e))).collect()
}

fn sig_report<E: Clone + Eq>(
    sig: &Sig,
    t: &EffExpr<Region, E>,
    h: &EffExpr<Region, E>,
    fin_ok: impl Fn(&E) -> bool,
    inf_ok: bool,
    effects: Option<Effects>,
) -> SigReport {
    SigReport {
        class: sig.class.clone(),
        region: sig.recv.to_string(),
        method: sig.method.clone(),
        args: sig.args.iter().map(Region::to_string).collect(),
        terminating: Verdict::of(t.iter().all(|(_, e)| fin_ok(e))),
        throws: Verdict::of(h.iter().all(|(_, e)| fin_ok(e))),
        infinite: Verdict::of(inf_ok),
        effects,
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mode = match self.mode {
            Mode::Abstract => "abstract",
            Mode::Concrete => "concrete",
        };
        let _ = writeln!(out, "verdict: {} ({mode} mode)", self.verdict.as_str());
        let rows: Vec<[String; 4]> = self
            .signatures
            .iter()
            .map(|s| {
                let name = format!("({}, {}, {}, ({}))", s.class, s.region, s.method, s.args.join(", "));
                [name, s.terminating.as_str().into(), s.throws.as_str().into(), s.infinite.as_str().into()]
            })
            .collect();
        let head = ["signature".to_string(), "terminating".into(), "throws".into(), "infinite".into()];
        let widths: Vec<usize> =
            (0..4).map(|i| rows.iter().chain([&head]).map(|r| r[i].chars().count()).max().unwrap_or(0)).collect();
        for r in [&head].into_iter().chain(&rows) {
            let cells: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "  {}", cells.join("  ").trim_end());
        }
        for s in self.signatures.iter().filter(|s| s.effects.is_some()) {
            let e = s.effects.as_ref().unwrap();
            let _ = writeln!(out, "effects of ({}, {}, {}, ({})):", s.class, s.region, s.method, s.args.join(", "));
            for (r, l) in &e.terminating {
                let _ = writeln!(out, "  returns {r}: {l}");
            }
            for (r, l) in &e.throws {
                let _ = writeln!(out, "  throws {r}: {l}");
            }
            let _ = writeln!(out, "  infinite: {}", e.infinite);
        }
        for c in &self.counterexamples {
            let word = |w: &[String]| if w.is_empty() { "ε".to_string() } else { w.join(" ") };
            let _ = writeln!(out, "counterexample for {}:", c.entry);
            let _ = writeln!(out, "  script: {:?}", c.script);
            match &c.cycle {
                Some(v) => {
                    let _ = writeln!(out, "  trace: {} ({})^ω", word(&c.trace), word(v));
                }
                None => {
                    let _ = writeln!(out, "  trace: {}", word(&c.trace));
                }
            }
            if let Some(at) = c.violated_at {
                let _ = writeln!(out, "  violated at: {at}");
            }
            let _ = writeln!(out, "  {}", c.explanation);
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

#[cfg(test)]
mod tests;
