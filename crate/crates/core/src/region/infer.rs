use std::collections::BTreeSet;

use thiserror::Error;

use super::intrinsics::Intrinsics;
use super::table::{check_class_table, init, init_demand, ClassTableB, MEntry};
use super::typeff::{Cx, Env, Violation};
use super::{Region, Sig};
use crate::effect::BuchiDomain;
use crate::fj::{Program, THIS};

/// Result of a fixed-point run.
#[derive(Clone, Debug)]
pub struct Inferred<E> {
    pub table: ClassTableB<E>,
    pub iterations: usize,
    /// The loop stopped at the iteration cap rather than at a fixed point.
    pub capped: bool,
}

/// Fallback cap for domains without one of their own: the table only grows,
/// so a run this long means something is wrong.
const HARD_CAP_PER_ENTRY: usize = 64;

/// Full-enumeration inference.
pub fn infer<D: BuchiDomain>(p: &Program, d: &D, intr: &Intrinsics) -> ClassTableB<D::Fin> {
    infer_full(p, d, intr).table
}

pub fn infer_full<D: BuchiDomain>(p: &Program, d: &D, intr: &Intrinsics) -> Inferred<D::Fin> {
    let mut table = init(p);
    let sigs: Vec<Sig> = table.methods.keys().cloned().collect();
    for s in &sigs {
        seed_intrinsic(p, d, intr, &mut table, s);
    }
    run(p, d, intr, table, false)
}

/// Inference over the signatures reachable from `seeds`.
pub fn infer_demand<D: BuchiDomain>(p: &Program, d: &D, intr: &Intrinsics, seeds: &[Sig]) -> Inferred<D::Fin> {
    let mut table = init_demand(p, &[]);
    for s in seeds {
        add_sig(p, d, intr, &mut table, s);
    }
    run(p, d, intr, table, true)
}

/// Adds `sig` and every dispatch target below it in its receiver region.
fn add_sig<D: BuchiDomain>(p: &Program, d: &D, intr: &Intrinsics, table: &mut ClassTableB<D::Fin>, sig: &Sig) {
    let mut targets = vec![sig.clone()];
    for c in p.class_names() {
        if c != sig.class
            && p.preceq(c, &sig.class)
            && table.meta.contains(&sig.recv, c)
            && p.methods_of(c).contains(&sig.method)
        {
            targets.push(Sig { class: c.to_string(), ..sig.clone() });
        }
    }
    for t in targets {
        if !table.methods.contains_key(&t) {
            table.methods.insert(t.clone(), MEntry::default());
            seed_intrinsic(p, d, intr, table, &t);
        }
    }
}

fn seed_intrinsic<D: BuchiDomain>(
    p: &Program,
    d: &D,
    intr: &Intrinsics,
    table: &mut ClassTableB<D::Fin>,
    sig: &Sig,
) {
    let Some((_, owner)) = p.method_lookup(&sig.class, &sig.method) else { return };
    if !intr.is_intrinsic(owner, &sig.method) {
        return;
    }
    table.intrinsic.insert(sig.clone());
    let mut seed = MEntry::default();
    for e in intr.matching(owner, &sig.method, &sig.args) {
        seed.t.join_entry(d, e.ret.region(), &e.emits.to_domain(d));
        if let Some((_, rx)) = &e.throws {
            seed.h.join_entry(d, Region::Unknown, &rx.to_domain(d));
        }
    }
    table.methods.entry(sig.clone()).or_default().join_in(d, &seed);
}

/// Signatures whose bodies the loop types: receiver region compatible with
/// the class, and not configured.
fn typed_sigs<E: Clone + Eq>(p: &Program, table: &ClassTableB<E>) -> Vec<Sig> {
    table
        .methods
        .keys()
        .filter(|s| !table.intrinsic.contains(s) && table.meta.contains(&s.recv, &s.class))
        .filter(|s| p.method_lookup(&s.class, &s.method).is_some())
        .cloned()
        .collect()
}

fn body_env<'p>(p: &'p Program, sig: &Sig) -> (Env, &'p crate::fj::Expr) {
    let (decl, _) = p.method_lookup(&sig.class, &sig.method).expect("method body");
    let mut env = vec![(THIS.to_string(), sig.recv.clone())];
    for ((_, x), r) in decl.params.iter().zip(&sig.args) {
        env.push((x.clone(), r.clone()));
    }
    (env, &decl.body)
}

fn run<D: BuchiDomain>(
    p: &Program,
    d: &D,
    intr: &Intrinsics,
    mut table: ClassTableB<D::Fin>,
    demand: bool,
) -> Inferred<D::Fin> {
    check_class_table(p, d, &mut table);
    let mut iterations = 0;
    loop {
        iterations += 1;
        let before = table.clone();
        let mut discovered = BTreeSet::new();
        for sig in typed_sigs(p, &table) {
            let (mut env, body) = body_env(p, &sig);
            let mut cx = Cx { p, d, table: &mut table, frozen: false, violations: Vec::new(), discovered: BTreeSet::new() };
            let typed = cx.typeff(&mut env, body);
            discovered.append(&mut cx.discovered);
            let entry = MEntry { t: typed.t, h: typed.h, s: typed.s };
            table.methods.entry(sig).or_default().join_in(d, &entry);
        }
        if demand {
            for s in &discovered {
                add_sig(p, d, intr, &mut table, s);
            }
        }
        check_class_table(p, d, &mut table);
        if tables_eq(d, &before, &table) {
            return Inferred { table, iterations, capped: false };
        }
        let cap = d
            .iteration_cap()
            .unwrap_or(HARD_CAP_PER_ENTRY * (table.methods.len() + table.fields.len() + 1));
        if iterations >= cap {
            return Inferred { table, iterations, capped: true };
        }
    }
}

fn tables_eq<D: BuchiDomain>(d: &D, a: &ClassTableB<D::Fin>, b: &ClassTableB<D::Fin>) -> bool {
    a.fields == b.fields
        && a.methods.len() == b.methods.len()
        && a.methods.iter().zip(&b.methods).all(|((s, x), (t, y))| {
            s == t && x.t.eq_in(d, &y.t) && x.h.eq_in(d, &y.h) && x.s.eq_in(d, &y.s)
        })
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum WellTypedError {
    #[error("{sig}: body needs {violation:?}")]
    Violation { sig: Sig, violation: Box<Violation> },
    #[error("{sig}: inferred {component} exceeds the stored entry")]
    NotBelow { sig: Sig, component: &'static str },
    #[error("table is not closed under the well-formedness conditions")]
    NotClosed,
}

/// Checks that every typed body fits its stored entry without growing `F`,
/// and that the table is closed.
pub fn check_well_typed<D: BuchiDomain>(
    p: &Program,
    d: &D,
    table: &ClassTableB<D::Fin>,
) -> Result<(), WellTypedError> {
    let mut closed = table.clone();
    check_class_table(p, d, &mut closed);
    if !tables_eq(d, table, &closed) {
        return Err(WellTypedError::NotClosed);
    }
    let mut frozen = table.clone();
    for sig in typed_sigs(p, table) {
        let (mut env, body) = body_env(p, &sig);
        let mut cx = Cx { p, d, table: &mut frozen, frozen: true, violations: Vec::new(), discovered: BTreeSet::new() };
        let typed = cx.typeff(&mut env, body);
        if let Some(v) = cx.violations.into_iter().next() {
            return Err(WellTypedError::Violation { sig, violation: Box::new(v) });
        }
        let stored = &table.methods[&sig];
        let parts: [(&'static str, bool); 3] = [
            ("terminating effect", typed.t.leq_in(d, &stored.t)),
            ("exceptional effect", typed.h.leq_in(d, &stored.h)),
            ("call effect", typed.s.leq_in(d, &stored.s)),
        ];
        if let Some((component, _)) = parts.into_iter().find(|(_, ok)| !ok) {
            return Err(WellTypedError::NotBelow { sig, component });
        }
    }
    Ok(())
}

/// Signatures whose receiver region cannot hold the class; their entries
/// only ever receive what the closure pushes into them.
pub fn untyped_sigs<E: Clone + Eq>(table: &ClassTableB<E>) -> Vec<Sig> {
    table.methods.keys().filter(|s| !table.meta.contains(&s.recv, &s.class)).cloned().collect()
}
