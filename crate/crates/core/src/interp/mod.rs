//! Big-step reference semantics with event traces, exceptions, a call-count
//! fuel bound, and script-driven stubs for intrinsic methods.

mod shape;

use std::collections::BTreeMap;

use crate::fj::{Expr, ExprKind, MethodDecl, Pos, Program};
use crate::region::{ArgPat, ClassTableB, Intrinsics, Region, RegionMeta, RetRegion, Sig};

pub use shape::Shape;

/// Maximum length of a word sampled from an intrinsic's effect.
pub const STUB_WORD_LEN: usize = 3;
/// Maximum number of words sampled per intrinsic effect.
pub const STUB_WORD_LIMIT: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Null,
    Loc(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obj {
    pub class: String,
    pub fields: BTreeMap<String, Value>,
    pub label: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Heap {
    pub objs: Vec<Obj>,
}

impl Heap {
    pub fn alloc(&mut self, p: &Program, class: &str, label: &str) -> usize {
        let fields = p.fields_of(class).into_iter().map(|(f, _)| (f, Value::Null)).collect();
        self.objs.push(Obj { class: class.to_string(), fields, label: label.to_string() });
        self.objs.len() - 1
    }

    pub fn get(&self, l: usize) -> Option<&Obj> {
        self.objs.get(l)
    }
}

pub type Store = Vec<(String, Value)>;

pub type ChoiceScript = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StuckReason {
    UnboundVariable(String),
    NullFieldAccess(String),
    NullCall(String),
    ThrowNull,
    NoSuchMethod(String),
    NoSuchField(String),
    UnknownEvent(String),
    /// No configured entry accepts the actual arguments.
    NoIntrinsicMatch(String),
    /// A script entry names an option that does not exist.
    BadChoice { index: usize, options: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Terminated { value: Value, heap: Heap, trace: Vec<usize> },
    Thrown { loc: usize, heap: Heap, trace: Vec<usize> },
    OutOfFuel { trace: Vec<usize> },
    /// The script ran out at a decision with `options` alternatives.
    ScriptExhausted { trace: Vec<usize>, options: usize },
    CastStuck { trace: Vec<usize>, pos: Pos },
    Stuck { trace: Vec<usize>, pos: Pos, reason: StuckReason },
    /// Stopped on request of a monitor.
    Interrupted { trace: Vec<usize> },
}

impl Outcome {
    pub fn trace(&self) -> &[usize] {
        match self {
            Outcome::Terminated { trace, .. }
            | Outcome::Thrown { trace, .. }
            | Outcome::OutOfFuel { trace }
            | Outcome::ScriptExhausted { trace, .. }
            | Outcome::CastStuck { trace, .. }
            | Outcome::Stuck { trace, .. }
            | Outcome::Interrupted { trace } => trace,
        }
    }

    pub fn is_final(&self) -> bool {
        matches!(self, Outcome::Terminated { .. } | Outcome::Thrown { .. })
    }
}

/// A method-call rule instance about to run its body.
pub struct CallEntry<'a> {
    pub owner: &'a str,
    pub method: &'a str,
    pub depth: usize,
    pub trace: &'a [usize],
    pub cursor: usize,
    pub shape: Shape,
}

/// Observer of call entries; returning `false` stops evaluation.
pub trait Monitor {
    fn on_call(&mut self, entry: CallEntry<'_>) -> bool;
}

enum Flow {
    Val(Value),
    Throw(usize),
}

enum Halt {
    OutOfFuel,
    Script(usize),
    Cast(Pos),
    Stuck(Pos, StuckReason),
    Interrupted,
}

struct Machine<'a> {
    p: &'a Program,
    intr: &'a Intrinsics,
    fuel: usize,
    script: &'a [usize],
    cursor: usize,
    heap: Heap,
    trace: Vec<usize>,
    depth: usize,
    monitor: Option<&'a mut dyn Monitor>,
}

/// Evaluates `e` under store `s` and heap `h`.
pub fn eval(
    p: &Program,
    s: &Store,
    h: &Heap,
    e: &Expr,
    fuel: usize,
    script: &[usize],
    intr: &Intrinsics,
) -> Outcome {
    run(p, s, h, e, fuel, script, intr, None)
}

#[allow(clippy::too_many_arguments)]
pub fn eval_monitored(
    p: &Program,
    s: &Store,
    h: &Heap,
    e: &Expr,
    fuel: usize,
    script: &[usize],
    intr: &Intrinsics,
    monitor: &mut dyn Monitor,
) -> Outcome {
    run(p, s, h, e, fuel, script, intr, Some(monitor))
}

#[allow(clippy::too_many_arguments)]
fn run<'a>(
    p: &'a Program,
    s: &Store,
    h: &Heap,
    e: &Expr,
    fuel: usize,
    script: &'a [usize],
    intr: &'a Intrinsics,
    monitor: Option<&'a mut dyn Monitor>,
) -> Outcome {
    let mut m = Machine { p, intr, fuel, script, cursor: 0, heap: h.clone(), trace: Vec::new(), depth: 0, monitor };
    let mut env = s.clone();
    let r = m.eval(&mut env, e);
    let trace = std::mem::take(&mut m.trace);
    match r {
        Ok(Flow::Val(value)) => Outcome::Terminated { value, heap: m.heap, trace },
        Ok(Flow::Throw(loc)) => Outcome::Thrown { loc, heap: m.heap, trace },
        Err(Halt::OutOfFuel) => Outcome::OutOfFuel { trace },
        Err(Halt::Script(options)) => Outcome::ScriptExhausted { trace, options },
        Err(Halt::Cast(pos)) => Outcome::CastStuck { trace, pos },
        Err(Halt::Stuck(pos, reason)) => Outcome::Stuck { trace, pos, reason },
        Err(Halt::Interrupted) => Outcome::Interrupted { trace },
    }
}

impl Machine<'_> {
    fn lookup(&self, env: &Store, x: &str, pos: Pos) -> Result<Value, Halt> {
        env.iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, v)| *v)
            .ok_or_else(|| Halt::Stuck(pos, StuckReason::UnboundVariable(x.to_string())))
    }

    fn eval(&mut self, env: &mut Store, e: &Expr) -> Result<Flow, Halt> {
        stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || self.eval_inner(env, e))
    }

    fn eval_inner(&mut self, env: &mut Store, e: &Expr) -> Result<Flow, Halt> {
        let pos = e.pos;
        match &e.kind {
            ExprKind::Var(x) => Ok(Flow::Val(self.lookup(env, x, pos)?)),
            ExprKind::Let { var, bound, body, .. } => {
                let v = match self.eval(env, bound)? {
                    Flow::Val(v) => v,
                    t => return Ok(t),
                };
                env.push((var.clone(), v));
                let r = self.eval(env, body);
                env.pop();
                r
            }
            ExprKind::If { x, y, then_branch, else_branch } => {
                let (a, b) = (self.lookup(env, x, pos)?, self.lookup(env, y, pos)?);
                self.eval(env, if a == b { then_branch } else { else_branch })
            }
            ExprKind::Null => Ok(Flow::Val(Value::Null)),
            ExprKind::New { label, class } => Ok(Flow::Val(Value::Loc(self.heap.alloc(self.p, class, label)))),
            ExprKind::Cast { class, expr } => match self.eval(env, expr)? {
                Flow::Val(Value::Loc(l)) if !self.p.preceq(&self.heap.objs[l].class, class) => Err(Halt::Cast(pos)),
                f => Ok(f),
            },
            ExprKind::Emit(a) => {
                let i = self
                    .p
                    .event_index(a)
                    .ok_or_else(|| Halt::Stuck(pos, StuckReason::UnknownEvent(a.clone())))?;
                self.trace.push(i);
                Ok(Flow::Val(Value::Null))
            }
            ExprKind::Get { recv, field, .. } => {
                let Value::Loc(l) = self.lookup(env, recv, pos)? else {
                    return Err(Halt::Stuck(pos, StuckReason::NullFieldAccess(field.clone())));
                };
                let v = self.heap.objs[l].fields.get(field).copied();
                v.map(Flow::Val).ok_or_else(|| Halt::Stuck(pos, StuckReason::NoSuchField(field.clone())))
            }
            ExprKind::Set { recv, field, value, .. } => {
                let v = self.lookup(env, value, pos)?;
                let Value::Loc(l) = self.lookup(env, recv, pos)? else {
                    return Err(Halt::Stuck(pos, StuckReason::NullFieldAccess(field.clone())));
                };
                match self.heap.objs[l].fields.get_mut(field) {
                    Some(slot) => *slot = v,
                    None => return Err(Halt::Stuck(pos, StuckReason::NoSuchField(field.clone()))),
                }
                Ok(Flow::Val(v))
            }
            ExprKind::Call { recv, method, args, .. } => {
                let target = self.lookup(env, recv, pos)?;
                let argv = args.iter().map(|a| self.lookup(env, a, pos)).collect::<Result<Vec<_>, _>>()?;
                self.call(target, method, &argv, pos)
            }
            ExprKind::Throw(x) => match self.eval(env, x)? {
                Flow::Val(Value::Null) => Err(Halt::Stuck(pos, StuckReason::ThrowNull)),
                Flow::Val(Value::Loc(l)) | Flow::Throw(l) => Ok(Flow::Throw(l)),
            },
            ExprKind::Try { body, class, var, handler } => match self.eval(env, body)? {
                Flow::Throw(l) if self.p.preceq(&self.heap.objs[l].class, class) => {
                    env.push((var.clone(), Value::Loc(l)));
                    let r = self.eval(env, handler);
                    env.pop();
                    r
                }
                f => Ok(f),
            },
        }
    }

    fn call(&mut self, target: Value, method: &str, args: &[Value], pos: Pos) -> Result<Flow, Halt> {
        let Value::Loc(l) = target else {
            return Err(Halt::Stuck(pos, StuckReason::NullCall(method.to_string())));
        };
        let p = self.p;
        let class = self.heap.objs[l].class.clone();
        let Some((decl, owner)) = p.method_lookup(&class, method) else {
            return Err(Halt::Stuck(pos, StuckReason::NoSuchMethod(method.to_string())));
        };
        if let Some(mon) = self.monitor.as_deref_mut() {
            let mut roots = vec![target];
            roots.extend_from_slice(args);
            let entry = CallEntry {
                owner,
                method,
                depth: self.depth,
                trace: &self.trace,
                cursor: self.cursor,
                shape: Shape::of(&self.heap, &roots),
            };
            if !mon.on_call(entry) {
                return Err(Halt::Interrupted);
            }
        }
        if self.fuel == 0 {
            return Err(Halt::OutOfFuel);
        }
        self.fuel -= 1;
        if self.intr.is_intrinsic(owner, method) {
            return self.stub(owner, decl, args, pos);
        }
        let mut env: Store = vec![("this".to_string(), target)];
        env.extend(decl.params.iter().map(|(_, x)| x.clone()).zip(args.iter().copied()));
        self.depth += 1;
        let r = self.eval(&mut env, &decl.body);
        self.depth -= 1;
        r
    }

    fn stub(&mut self, owner: &str, decl: &MethodDecl, args: &[Value], pos: Pos) -> Result<Flow, Halt> {
        let opts = stub_options(self.p, self.intr, &self.heap, owner, decl, args);
        if opts.is_empty() {
            return Err(Halt::Stuck(pos, StuckReason::NoIntrinsicMatch(format!("{owner}.{}", decl.name))));
        }
        let pick = if opts.len() == 1 {
            0
        } else {
            let Some(&i) = self.script.get(self.cursor) else {
                return Err(Halt::Script(opts.len()));
            };
            if i >= opts.len() {
                return Err(Halt::Stuck(pos, StuckReason::BadChoice { index: i, options: opts.len() }));
            }
            self.cursor += 1;
            i
        };
        let opt = &opts[pick];
        self.trace.extend_from_slice(&opt.word);
        let label = format!("intrinsic:{owner}.{}", decl.name);
        Ok(match &opt.result {
            StubResult::Null => Flow::Val(Value::Null),
            StubResult::Fresh(c) => Flow::Val(Value::Loc(self.heap.alloc(self.p, c, &label))),
            StubResult::Throw(c) => Flow::Throw(self.heap.alloc(self.p, c, &label)),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum StubResult {
    Null,
    Fresh(String),
    Throw(String),
}

#[derive(Clone, Debug)]
struct StubOption {
    word: Vec<usize>,
    result: StubResult,
}

/// All behaviours an intrinsic call may pick from, in a fixed order.
fn stub_options(
    p: &Program,
    intr: &Intrinsics,
    heap: &Heap,
    owner: &str,
    decl: &MethodDecl,
    args: &[Value],
) -> Vec<StubOption> {
    let k = p.alphabet().len();
    let mut out: Vec<StubOption> = Vec::new();
    for entry in intr.for_method(owner, &decl.name) {
        let applies = entry.args.len() == args.len()
            && entry.args.iter().zip(args).all(|(pat, v)| match pat {
                ArgPat::Any => true,
                ArgPat::Null => *v == Value::Null,
                ArgPat::CreatedAt(l) => matches!(v, Value::Loc(i) if heap.objs[*i].label == *l),
            });
        if !applies {
            continue;
        }
        let mut results = vec![StubResult::Null];
        if entry.ret == RetRegion::Unknown && p.is_declared(&decl.ret) {
            results.push(StubResult::Fresh(decl.ret.clone()));
        }
        for w in entry.emits.words(k, STUB_WORD_LEN, STUB_WORD_LIMIT) {
            for r in &results {
                out.push(StubOption { word: w.clone(), result: r.clone() });
            }
        }
        if let Some((exc, re)) = &entry.throws {
            for w in re.words(k, STUB_WORD_LEN, STUB_WORD_LIMIT) {
                out.push(StubOption { word: w, result: StubResult::Throw(exc.clone()) });
            }
        }
    }
    out
}

/// `(v, h) ⊨ r`.
pub fn satisfies(meta: &RegionMeta, h: &Heap, v: Value, r: &Region) -> bool {
    match (r, v) {
        (Region::Unknown, _) => true,
        (Region::Null, Value::Null) => true,
        (Region::CreatedAt(l), Value::Loc(i)) => {
            h.objs.get(i).is_some_and(|o| o.label == *l && meta.contains(r, &o.class))
        }
        _ => false,
    }
}

/// `(s, h) ⊨ Γ`.
pub fn satisfies_env(meta: &RegionMeta, s: &Store, h: &Heap, gamma: &[(String, Region)]) -> bool {
    gamma.iter().all(|(x, r)| {
        s.iter().rev().find(|(y, _)| y == x).is_some_and(|(_, v)| satisfies(meta, h, *v, r))
    })
}

/// `h ⊨ F`: every field of every object satisfies some region allowed for it
/// at each region the object itself satisfies.
pub fn satisfies_heap<E: Clone + Eq>(meta: &RegionMeta, h: &Heap, table: &ClassTableB<E>) -> bool {
    h.objs.iter().enumerate().all(|(l, o)| {
        meta.regions().iter().filter(|r| satisfies(meta, h, Value::Loc(l), r)).all(|r| {
            o.fields.iter().all(|(f, v)| match table.field(&o.class, r, f) {
                Some(allowed) => allowed.iter().any(|s| satisfies(meta, h, *v, s)),
                None => true,
            })
        })
    })
}

/// Where an enumeration starts.
#[derive(Clone, Debug)]
pub enum Entry {
    Sig(Sig),
    Expr { store: Store, heap: Heap, expr: Expr },
}

/// Builds a store and heap matching a signature: a fresh receiver of the
/// signature's class and one argument per region (objects of the declared
/// parameter class for `Unknown`, `null` when that class is `Object`).
pub fn entry_state(p: &Program, meta: &RegionMeta, sig: &Sig) -> Option<(Store, Heap, Expr)> {
    let (decl, _) = p.method_lookup(&sig.class, &sig.method)?;
    if decl.params.len() != sig.args.len() {
        return None;
    }
    let mut heap = Heap::default();
    let mut store: Store = Vec::new();
    let recv = match &sig.recv {
        Region::Null => return None,
        Region::Unknown => heap.alloc(p, &sig.class, "entry:this"),
        Region::CreatedAt(l) if meta.contains(&sig.recv, &sig.class) => heap.alloc(p, &sig.class, l),
        Region::CreatedAt(_) => return None,
    };
    store.push(("this".into(), Value::Loc(recv)));
    let mut names = Vec::new();
    for (i, ((ty, _), r)) in decl.params.iter().zip(&sig.args).enumerate() {
        let v = match r {
            Region::Null => Value::Null,
            Region::Unknown if p.is_declared(ty) => Value::Loc(heap.alloc(p, ty, &format!("entry:arg{i}"))),
            Region::Unknown => Value::Null,
            Region::CreatedAt(l) => {
                let c = meta.cls(r).iter().next()?.clone();
                Value::Loc(heap.alloc(p, &c, l))
            }
        };
        let name = format!("$arg{i}");
        store.push((name.clone(), v));
        names.push(name);
    }
    let call = Expr::mk(ExprKind::Call {
        recv: "this".into(),
        class: sig.class.clone(),
        method: sig.method.clone(),
        args: names,
    });
    Some((store, heap, call))
}

/// Runs every choice script up to `fuel` decisions, depth first in
/// lexicographic order, returning each explored script with its outcome.
pub fn enumerate_traces(
    p: &Program,
    meta: &RegionMeta,
    entry: &Entry,
    fuel: usize,
    intr: &Intrinsics,
) -> Vec<(ChoiceScript, Outcome)> {
    let (store, heap, expr) = match entry {
        Entry::Sig(sig) => match entry_state(p, meta, sig) {
            Some(s) => s,
            None => return Vec::new(),
        },
        Entry::Expr { store, heap, expr } => (store.clone(), heap.clone(), expr.clone()),
    };
    let mut out = Vec::new();
    let mut script = Vec::new();
    explore(p, &store, &heap, &expr, fuel, intr, &mut script, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn explore(
    p: &Program,
    s: &Store,
    h: &Heap,
    e: &Expr,
    fuel: usize,
    intr: &Intrinsics,
    script: &mut Vec<usize>,
    out: &mut Vec<(ChoiceScript, Outcome)>,
) {
    let o = eval(p, s, h, e, fuel, script, intr);
    match o {
        Outcome::ScriptExhausted { options, .. } if script.len() < fuel => {
            for i in 0..options {
                script.push(i);
                explore(p, s, h, e, fuel, intr, script, out);
                script.pop();
            }
        }
        o => out.push((script.clone(), o)),
    }
}
