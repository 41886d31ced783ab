use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// An automaton read both as an NFA over finite words and as a Büchi
/// automaton over infinite words, with the same accepting set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuidelineAutomaton {
    alphabet: Vec<String>,
    states: Vec<String>,
    /// `delta[q][a]` lists successors of `q` on letter `a`.
    delta: Vec<Vec<Vec<usize>>>,
    initial: Vec<bool>,
    accepting: Vec<bool>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GuidelineError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("guideline has no initial state")]
    NoInitial,
    #[error("guideline declares no states")]
    NoStates,
}

impl GuidelineAutomaton {
    pub fn new(
        alphabet: Vec<String>,
        states: Vec<String>,
        transitions: &[(usize, usize, usize)],
        initial: &[usize],
        accepting: &[usize],
    ) -> Self {
        let n = states.len();
        let k = alphabet.len();
        let mut delta = vec![vec![Vec::new(); k]; n];
        for &(q, a, p) in transitions {
            assert!(q < n && p < n && a < k, "transition out of range");
            if !delta[q][a].contains(&p) {
                delta[q][a].push(p);
            }
        }
        for row in &mut delta {
            for succ in row.iter_mut() {
                succ.sort_unstable();
            }
        }
        let mut init = vec![false; n];
        for &q in initial {
            init[q] = true;
        }
        let mut acc = vec![false; n];
        for &q in accepting {
            acc[q] = true;
        }
        GuidelineAutomaton { alphabet, states, delta, initial: init, accepting: acc }
    }

    /// Builds an automaton from numeric parts, naming letters `a`, `b`, ... and
    /// states `q0`, `q1`, ... Handy for generated test automata.
    pub fn from_indices(
        letters: usize,
        states: usize,
        transitions: &[(usize, usize, usize)],
        initial: &[usize],
        accepting: &[usize],
    ) -> Self {
        let alphabet = (0..letters).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        let names = (0..states).map(|i| format!("q{i}")).collect();
        Self::new(alphabet, names, transitions, initial, accepting)
    }

    /// The universal guideline: one accepting state looping on every letter.
    pub fn universal(alphabet: Vec<String>) -> Self {
        let t: Vec<_> = (0..alphabet.len()).map(|a| (0, a, 0)).collect();
        Self::new(alphabet, vec!["ok".into()], &t, &[0], &[0])
    }

    pub fn parse(text: &str) -> Result<Self, GuidelineError> {
        let mut alphabet: Vec<String> = Vec::new();
        let mut states: Vec<String> = Vec::new();
        let mut initial = Vec::new();
        let mut accepting = Vec::new();
        let mut trans = Vec::new();
        let err = |line: usize, msg: String| GuidelineError::Line { line, msg };
        // Transitions and state lists may precede the declarations they refer to,
        // so collect raw lines first and resolve afterwards.
        let mut pending: Vec<(usize, &str, Vec<&str>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, rest) = content
                .split_once(':')
                .ok_or_else(|| err(line, format!("expected `key: values`, found `{content}`")))?;
            let words: Vec<&str> = rest.split_whitespace().collect();
            match key.trim() {
                "alphabet" => {
                    for w in words {
                        if alphabet.iter().any(|a| a == w) {
                            return Err(err(line, format!("letter `{w}` declared twice")));
                        }
                        alphabet.push(w.to_string());
                    }
                }
                "states" => {
                    for w in words {
                        if states.iter().any(|s| s == w) {
                            return Err(err(line, format!("state `{w}` declared twice")));
                        }
                        states.push(w.to_string());
                    }
                }
                k @ ("initial" | "accepting" | "trans") => pending.push((line, k, words)),
                other => return Err(err(line, format!("unknown key `{other}`"))),
            }
        }
        if states.is_empty() {
            return Err(GuidelineError::NoStates);
        }
        let state = |line: usize, s: &str| {
            states
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| err(line, format!("undeclared state `{s}`")))
        };
        for (line, key, words) in pending {
            match key {
                "initial" => {
                    for w in words {
                        initial.push(state(line, w)?);
                    }
                }
                "accepting" => {
                    for w in words {
                        accepting.push(state(line, w)?);
                    }
                }
                _ => {
                    if words.len() != 3 {
                        return Err(err(line, "expected `trans: <from> <letter> <to>`".into()));
                    }
                    let q = state(line, words[0])?;
                    let a = alphabet
                        .iter()
                        .position(|x| x == words[1])
                        .ok_or_else(|| err(line, format!("undeclared letter `{}`", words[1])))?;
                    let p = state(line, words[2])?;
                    trans.push((q, a, p));
                }
            }
        }
        if initial.is_empty() {
            return Err(GuidelineError::NoInitial);
        }
        Ok(Self::new(alphabet, states, &trans, &initial, &accepting))
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn letter(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|a| a == name)
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn succ(&self, q: usize, a: usize) -> &[usize] {
        &self.delta[q][a]
    }

    pub fn is_initial(&self, q: usize) -> bool {
        self.initial[q]
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn initial_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states()).filter(|&q| self.initial[q])
    }

    /// States reachable from the initial states by reading `w`.
    pub fn run(&self, w: &[usize]) -> BTreeSet<usize> {
        let mut cur: BTreeSet<usize> = self.initial_states().collect();
        for &a in w {
            cur = self.step(&cur, a);
        }
        cur
    }

    pub fn step(&self, from: &BTreeSet<usize>, a: usize) -> BTreeSet<usize> {
        from.iter().flat_map(|&q| self.delta[q][a].iter().copied()).collect()
    }

    /// NFA reading of a finite word.
    pub fn accepts_finite(&self, w: &[usize]) -> bool {
        self.run(w).iter().any(|&q| self.accepting[q])
    }

    /// Büchi reading of the ultimately periodic word `u v^ω`.
    pub fn accepts_lasso(&self, u: &[usize], v: &[usize]) -> bool {
        assert!(!v.is_empty(), "lasso cycle must be nonempty");
        // Product of the automaton with the positions of `v`: node (q, i) means
        // "in state q, about to read v[i]". An accepting run exists iff some node
        // reachable after `u` lies on a cycle that visits an accepting state.
        let n = self.num_states();
        let m = v.len();
        let id = |q: usize, i: usize| q * m + i;
        let mut edges = vec![Vec::new(); n * m];
        for q in 0..n {
            for i in 0..m {
                for &p in self.succ(q, v[i]) {
                    edges[id(q, i)].push(id(p, (i + 1) % m));
                }
            }
        }
        let start: Vec<usize> = self.run(u).into_iter().map(|q| id(q, 0)).collect();
        let reach = reachable(&edges, &start);
        // A reachable accepting node that can return to itself gives an accepting lasso.
        (0..n * m).any(|node| {
            reach[node] && self.accepting[node / m] && {
                let back = reachable(&edges, &edges[node]);
                back[node]
            }
        })
    }

    /// States from which some accepting state is reachable. A finite prefix whose
    /// run set avoids these states cannot be extended to any accepted word.
    pub fn live_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev = vec![Vec::new(); n];
        for q in 0..n {
            for a in 0..self.num_letters() {
                for &p in self.succ(q, a) {
                    rev[p].push(q);
                }
            }
        }
        let acc: Vec<usize> = (0..n).filter(|&q| self.accepting[q]).collect();
        reachable(&rev, &acc)
    }

    /// True iff some accepted word (finite or infinite) extends `prefix`.
    pub fn prefix_salvageable(&self, prefix: &[usize]) -> bool {
        let live = self.live_states();
        self.run(prefix).iter().any(|&q| live[q])
    }

    pub fn word(&self, names: &[&str]) -> Option<Vec<usize>> {
        names.iter().map(|n| self.letter(n)).collect()
    }

    pub fn render_word(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        w.iter().map(|&a| self.alphabet[a].as_str()).collect::<Vec<_>>().join(" ")
    }
}

pub(crate) fn reachable(edges: &[Vec<usize>], start: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; edges.len()];
    let mut stack: Vec<usize> = start.to_vec();
    while let Some(x) = stack.pop() {
        if seen[x] {
            continue;
        }
        seen[x] = true;
        stack.extend(edges[x].iter().copied().filter(|&y| !seen[y]));
    }
    seen
}

impl fmt::Display for GuidelineAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alphabet: {}", self.alphabet.join(" "))?;
        writeln!(f, "states: {}", self.states.join(" "))?;
        let names = |flags: &[bool]| {
            (0..flags.len()).filter(|&q| flags[q]).map(|q| self.states[q].clone()).collect::<Vec<_>>().join(" ")
        };
        writeln!(f, "initial: {}", names(&self.initial))?;
        writeln!(f, "accepting: {}", names(&self.accepting))?;
        for q in 0..self.num_states() {
            for a in 0..self.num_letters() {
                for &p in self.succ(q, a) {
                    writeln!(f, "trans: {} {} {}", self.states[q], self.alphabet[a], self.states[p])?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const AUTH: &str = "\
# access must directly follow authcheck
alphabet: authcheck access log
states: idle checked
initial: idle
accepting: idle checked
trans: idle authcheck checked
trans: idle log idle
trans: checked authcheck checked
trans: checked access idle
trans: checked log idle
";

    #[test]
    fn parses_fixture() {
        let g = GuidelineAutomaton::parse(AUTH).unwrap();
        assert_eq!(g.num_states(), 2);
        assert_eq!(g.num_letters(), 3);
        let w = g.word(&["authcheck", "access"]).unwrap();
        assert!(g.accepts_finite(&w));
        assert!(!g.accepts_finite(&g.word(&["access"]).unwrap()));
        assert!(g.accepts_lasso(&[], &w));
        assert!(!g.prefix_salvageable(&g.word(&["access"]).unwrap()));
    }

    #[test]
    fn undeclared_letter_reports_line() {
        let text = "alphabet: a\nstates: p\ninitial: p\ntrans: p b p\n";
        assert_eq!(
            GuidelineAutomaton::parse(text),
            Err(GuidelineError::Line { line: 4, msg: "undeclared letter `b`".into() })
        );
    }

    #[test]
    fn undeclared_state_and_missing_initial() {
        let text = "alphabet: a\nstates: p\ninitial: r\n";
        assert!(matches!(GuidelineAutomaton::parse(text), Err(GuidelineError::Line { line: 3, .. })));
        let text = "alphabet: a\nstates: p\naccepting: p\n";
        assert_eq!(GuidelineAutomaton::parse(text), Err(GuidelineError::NoInitial));
        assert!(matches!(GuidelineAutomaton::parse("bogus line\n"), Err(GuidelineError::Line { line: 1, .. })));
    }

    #[test]
    fn empty_accepting_line_is_valid() {
        let text = "alphabet: a\nstates: p\ninitial: p\naccepting:\ntrans: p a p\n";
        let g = GuidelineAutomaton::parse(text).unwrap();
        assert!(!g.accepts_finite(&[]));
        assert!(!g.accepts_lasso(&[], &[0]));
    }

    #[test]
    fn display_reparses() {
        let g = GuidelineAutomaton::parse(AUTH).unwrap();
        assert_eq!(GuidelineAutomaton::parse(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn lasso_needs_accepting_cycle() {
        // q0 -a-> q1 -a-> q0, only q1 accepting: a^ω visits q1 infinitely often.
        let g = GuidelineAutomaton::from_indices(2, 2, &[(0, 0, 1), (1, 0, 0), (0, 1, 0)], &[0], &[1]);
        assert!(g.accepts_lasso(&[], &[0]));
        assert!(!g.accepts_lasso(&[], &[1]));
        assert!(g.accepts_lasso(&[1, 1], &[0, 0]));
        assert!(!g.accepts_lasso(&[1, 1], &[0, 1, 0]));
    }
}
