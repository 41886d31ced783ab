//! The taint-style mini-corpus and its verdicts, fixed by hand beforehand.

use std::fs;
use std::path::{Path, PathBuf};

use guidecheck::check::{analyze, Inputs, Options, Verdict};
use guidecheck::effect::GuidelineAutomaton;

fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/taint")
}

pub struct Outcome {
    pub name: String,
    pub expected: Verdict,
    pub actual: Verdict,
    pub counterexample: bool,
}

pub fn expectations() -> Vec<(String, Verdict)> {
    fs::read_to_string(dir().join("expected.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (name, v) = l.split_once(' ').unwrap();
            let v = match v.trim() {
                "pass" => Verdict::Pass,
                "fail" => Verdict::Fail,
                other => panic!("bad verdict {other}"),
            };
            (name.to_string(), v)
        })
        .collect()
}

pub fn run_corpus() -> Vec<Outcome> {
    let g = GuidelineAutomaton::parse(&fs::read_to_string(dir().join("taint.gdl")).unwrap()).unwrap();
    let opts = Options { entry: Some("Main.run".into()), ..Options::default() };
    expectations()
        .into_iter()
        .map(|(name, expected)| {
            let src = fs::read_to_string(dir().join(format!("{name}.fj"))).unwrap();
            let inputs = Inputs::from_sources(&[(name.as_str(), src.as_str())], g.clone(), None)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            let report = analyze(&inputs, &opts).unwrap();
            Outcome { name, expected, actual: report.verdict, counterexample: !report.counterexamples.is_empty() }
        })
        .collect()
}
