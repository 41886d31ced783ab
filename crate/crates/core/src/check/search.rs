//! Bounded search for executions that break a guideline.
//!
//! Scripts are explored breadth first, so shorter witnesses come first. A
//! run is a counterexample when its finished trace is rejected, when a cut
//! trace already has no accepted extension, or when a method re-enters
//! itself on an identical heap shape after emitting a cycle whose infinite
//! repetition is rejected.

use std::collections::VecDeque;

use serde::Serialize;

use super::CheckError;
use crate::effect::GuidelineAutomaton;
use crate::fj::Program;
use crate::interp::{entry_state, eval, eval_monitored, CallEntry, Monitor, Outcome, Shape};
use crate::region::{region_meta, Intrinsics, Sig};

/// Default cap on interpreter runs per search.
pub const MAX_RUNS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub entry: String,
    pub script: Vec<usize>,
    /// The finite trace, or the stem of an infinite one.
    pub trace: Vec<String>,
    /// Repeated part of an infinite trace.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<String>>,
    /// Length of the shortest prefix with no accepted extension, when one exists.
    pub violated_at: Option<usize>,
    pub explanation: String,
}

struct Frame {
    owner: String,
    method: String,
    depth: usize,
    trace_len: usize,
    cursor: usize,
    shape: Shape,
}

/// A loop found by the monitor: the trace up to the first entry, the events
/// between the two entries, and the script positions of both entries.
struct Lasso {
    stem: Vec<usize>,
    cycle: Vec<usize>,
    cursors: (usize, usize),
}

struct LoopWatch<'a> {
    g: &'a GuidelineAutomaton,
    intr: &'a Intrinsics,
    frames: Vec<Frame>,
    found: Option<Lasso>,
}

impl Monitor for LoopWatch<'_> {
    fn on_call(&mut self, c: CallEntry<'_>) -> bool {
        while self.frames.last().is_some_and(|f| f.depth >= c.depth) {
            self.frames.pop();
        }
        let hit = self.frames.iter().find(|f| f.owner == c.owner && f.method == c.method && f.shape == c.shape);
        if let Some(f) = hit {
            let (stem, cycle) = c.trace.split_at(f.trace_len);
            if !cycle.is_empty() && !self.g.accepts_lasso(stem, cycle) {
                self.found = Some(Lasso { stem: stem.to_vec(), cycle: cycle.to_vec(), cursors: (f.cursor, c.cursor) });
                return false;
            }
        }
        if !self.intr.is_intrinsic(c.owner, c.method) {
            self.frames.push(Frame {
                owner: c.owner.to_string(),
                method: c.method.to_string(),
                depth: c.depth,
                trace_len: c.trace.len(),
                cursor: c.cursor,
                shape: c.shape,
            });
        }
        true
    }
}

/// Length of the shortest prefix of `w` with no accepted extension.
fn first_dead_prefix(g: &GuidelineAutomaton, w: &[usize]) -> Option<usize> {
    let live = g.live_states();
    let mut states = g.run(&[]);
    for (i, &a) in w.iter().enumerate() {
        if !states.iter().any(|&q| live[q]) {
            return Some(i);
        }
        states = g.step(&states, a);
    }
    (!states.iter().any(|&q| live[q])).then_some(w.len())
}

/// Searches executions of `entry` for a trace that breaks `g`. Every
/// candidate is replayed and re-checked before it is returned.
pub fn find_counterexample(
    p: &Program,
    g: &GuidelineAutomaton,
    entry: &Sig,
    fuel: usize,
    intr: &Intrinsics,
    max_runs: usize,
) -> Result<Option<Counterexample>, CheckError> {
    let meta = region_meta(p);
    let Some((store, heap, expr)) = entry_state(p, &meta, entry) else {
        return Err(CheckError::UnknownEntry(entry.to_string()));
    };
    let render = |w: &[usize]| w.iter().map(|&a| g.alphabet()[a].clone()).collect::<Vec<_>>();
    let mut queue: VecDeque<Vec<usize>> = VecDeque::from([Vec::new()]);
    let mut runs = 0;
    while let Some(script) = queue.pop_front() {
        if runs == max_runs {
            break;
        }
        runs += 1;
        let mut watch = LoopWatch { g, intr, frames: Vec::new(), found: None };
        let outcome = eval_monitored(p, &store, &heap, &expr, fuel, &script, intr, &mut watch);
        let candidate = match outcome {
            Outcome::Interrupted { .. } => {
                let Some(lasso) = watch.found else { continue };
                let (c1, c2) = lasso.cursors;
                let body = &script[c1..c2];
                let mut replay = script[..c1].to_vec();
                for _ in 0..3 {
                    replay.extend_from_slice(body);
                }
                let long = eval(p, &store, &heap, &expr, fuel * 4 + 16, &replay, intr);
                let mut expect = lasso.stem.clone();
                for _ in 0..3 {
                    expect.extend_from_slice(&lasso.cycle);
                }
                if !long.trace().starts_with(&expect) || g.accepts_lasso(&lasso.stem, &lasso.cycle) {
                    continue;
                }
                let mut shown = script[..c1].to_vec();
                shown.extend_from_slice(body);
                Counterexample {
                    entry: entry.to_string(),
                    script: shown,
                    trace: render(&lasso.stem),
                    cycle: Some(render(&lasso.cycle)),
                    violated_at: None,
                    explanation: format!(
                        "{} re-enters itself on the same heap shape after emitting the cycle; \
                         repeating the cycle forever is rejected",
                        entry.method
                    ),
                }
            }
            Outcome::Terminated { ref trace, .. } | Outcome::Thrown { ref trace, .. } if !g.accepts_finite(trace) => {
                let kind = if matches!(outcome, Outcome::Terminated { .. }) { "terminates" } else { "throws" };
                Counterexample {
                    entry: entry.to_string(),
                    script: script.clone(),
                    trace: render(trace),
                    cycle: None,
                    violated_at: Some(first_dead_prefix(g, trace).unwrap_or(trace.len())),
                    explanation: format!("the run {kind} with a trace the guideline rejects"),
                }
            }
            Outcome::ScriptExhausted { options, .. } if script.len() < fuel => {
                for i in 0..options {
                    let mut next = script.clone();
                    next.push(i);
                    queue.push_back(next);
                }
                continue;
            }
            Outcome::OutOfFuel { ref trace } | Outcome::ScriptExhausted { ref trace, .. } => {
                let Some(at) = first_dead_prefix(g, trace) else { continue };
                Counterexample {
                    entry: entry.to_string(),
                    script: script.clone(),
                    trace: render(trace),
                    cycle: None,
                    violated_at: Some(at),
                    explanation: "the run was cut off after a prefix that no accepted trace extends".into(),
                }
            }
            _ => continue,
        };
        if validate(p, g, &store, &heap, &expr, fuel, intr, &candidate) {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// Replays a finite candidate and re-checks the guideline on its trace.
#[allow(clippy::too_many_arguments)]
fn validate(
    p: &Program,
    g: &GuidelineAutomaton,
    store: &crate::interp::Store,
    heap: &crate::interp::Heap,
    expr: &crate::fj::Expr,
    fuel: usize,
    intr: &Intrinsics,
    cx: &Counterexample,
) -> bool {
    let word = |names: &[String]| -> Option<Vec<usize>> { names.iter().map(|n| g.letter(n)).collect() };
    let Some(trace) = word(&cx.trace) else { return false };
    match &cx.cycle {
        Some(cycle) => word(cycle).is_some_and(|v| !v.is_empty() && !g.accepts_lasso(&trace, &v)),
        None => {
            let o = eval(p, store, heap, expr, fuel, &cx.script, intr);
            if o.trace() != trace.as_slice() {
                return false;
            }
            match o {
                Outcome::Terminated { .. } | Outcome::Thrown { .. } => !g.accepts_finite(&trace),
                _ => !g.prefix_salvageable(&trace),
            }
        }
    }
}
