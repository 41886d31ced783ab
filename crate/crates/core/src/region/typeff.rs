//! Syntax-directed computation of `(T, H, S)` for an expression against a
//! class table, joining field regions into `F` on assignment.

use std::collections::BTreeSet;

use super::table::ClassTableB;
use super::{Region, RegionMeta, Sig};
use crate::effect::{BuchiDomain, EffExpr};
use crate::fj::{Expr, ExprKind, Program};

pub type Env = Vec<(String, Region)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Typed<E> {
    pub t: EffExpr<Region, E>,
    pub h: EffExpr<Region, E>,
    pub s: EffExpr<Sig, E>,
}

impl<E> Default for Typed<E> {
    fn default() -> Self {
        Typed { t: EffExpr::default(), h: EffExpr::default(), s: EffExpr::default() }
    }
}

impl<E: Clone + Eq> Typed<E> {
    fn join_in<D: BuchiDomain<Fin = E>>(&mut self, d: &D, o: &Typed<E>) {
        self.t.join_in(d, &o.t);
        self.h.join_in(d, &o.h);
        self.s.join_in(d, &o.s);
    }
}

/// Drops the entries of `h` whose classes all lie below `exc`.
pub fn except_filter<E: Clone + Eq>(
    p: &Program,
    meta: &RegionMeta,
    h: &EffExpr<Region, E>,
    exc: &str,
) -> EffExpr<Region, E> {
    h.filter_keys(|r| !meta.cls(r).iter().all(|c| p.preceq(c, exc)))
}

/// Why a frozen-table typing failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    FieldUpdate { class: String, region: Region, field: String, value: Region },
    MissingSig(Sig),
    Unbound(String),
    UnknownEvent(String),
}

pub(crate) struct Cx<'a, D: BuchiDomain> {
    pub p: &'a Program,
    pub d: &'a D,
    pub table: &'a mut ClassTableB<D::Fin>,
    /// With a frozen table, field updates and unseen signatures are
    /// recorded as violations instead of being applied.
    pub frozen: bool,
    pub violations: Vec<Violation>,
    /// Signatures referenced but absent from the method domain.
    pub discovered: BTreeSet<Sig>,
}

impl<D: BuchiDomain> Cx<'_, D> {
    fn region(&mut self, env: &Env, x: &str) -> Region {
        match env.iter().rev().find(|(y, _)| y == x) {
            Some((_, r)) => r.clone(),
            None => {
                self.violations.push(Violation::Unbound(x.to_string()));
                Region::Unknown
            }
        }
    }

    fn single(&self, r: Region, u: D::Fin) -> EffExpr<Region, D::Fin> {
        EffExpr::single(self.d, r, u)
    }

    pub fn typeff(&mut self, env: &mut Env, e: &Expr) -> Typed<D::Fin> {
        let d = self.d;
        let eps = || d.epsilon();
        match &e.kind {
            ExprKind::Var(x) => {
                let r = self.region(env, x);
                Typed { t: self.single(r, eps()), ..Default::default() }
            }
            ExprKind::Null => Typed { t: self.single(Region::Null, eps()), ..Default::default() },
            ExprKind::New { label, .. } => {
                Typed { t: self.single(Region::CreatedAt(label.clone()), eps()), ..Default::default() }
            }
            ExprKind::Emit(a) => {
                let Some(i) = self.p.event_index(a) else {
                    self.violations.push(Violation::UnknownEvent(a.clone()));
                    return Typed::default();
                };
                Typed { t: self.single(Region::Null, d.event(i)), ..Default::default() }
            }
            ExprKind::Cast { expr, .. } => self.typeff(env, expr),
            ExprKind::If { x, y, then_branch, else_branch } => {
                let (rx, ry) = (self.region(env, x), self.region(env, y));
                let mut out = self.typeff(env, else_branch);
                if !rx.disjoint(&ry) {
                    let t = self.typeff(env, then_branch);
                    out.join_in(d, &t);
                }
                out
            }
            ExprKind::Let { var, bound, body, .. } => {
                let first = self.typeff(env, bound);
                let mut out = Typed { t: EffExpr::new(), h: first.h.clone(), s: first.s.clone() };
                for (r, u) in first.t.iter() {
                    env.push((var.clone(), r.clone()));
                    let rest = self.typeff(env, body);
                    env.pop();
                    out.t.join_in(d, &rest.t.scale(d, u));
                    out.h.join_in(d, &rest.h.scale(d, u));
                    out.s.join_in(d, &rest.s.scale(d, u));
                }
                out
            }
            ExprKind::Get { recv, class, field } => {
                let r = self.region(env, recv);
                let mut t = EffExpr::new();
                if let Some(regions) = self.table.field(class, &r, field) {
                    for s in regions.clone() {
                        t.join_entry(d, s, &eps());
                    }
                }
                Typed { t, ..Default::default() }
            }
            ExprKind::Set { recv, class, field, value } => {
                let r = self.region(env, recv);
                let v = self.region(env, value);
                let key = (class.clone(), r.clone(), field.clone());
                let present = self.table.fields.get(&key).is_some_and(|s| s.contains(&v));
                if !present {
                    if self.frozen {
                        self.violations.push(Violation::FieldUpdate {
                            class: class.clone(),
                            region: r,
                            field: field.clone(),
                            value: v.clone(),
                        });
                    } else {
                        self.table.fields.entry(key).or_default().insert(v.clone());
                    }
                }
                Typed { t: self.single(v, eps()), ..Default::default() }
            }
            ExprKind::Call { recv, class, method, args } => {
                let r = self.region(env, recv);
                let argr: Vec<Region> = args.iter().map(|a| self.region(env, a)).collect();
                let sig = Sig { class: class.clone(), recv: r, method: method.clone(), args: argr };
                let (t, h) = match self.table.method(&sig) {
                    Some(m) => (m.t.clone(), m.h.clone()),
                    None => {
                        if self.frozen {
                            self.violations.push(Violation::MissingSig(sig.clone()));
                        }
                        self.discovered.insert(sig.clone());
                        (EffExpr::new(), EffExpr::new())
                    }
                };
                Typed { t, h, s: EffExpr::single(d, sig, eps()) }
            }
            ExprKind::Throw(x) => {
                let inner = self.typeff(env, x);
                Typed { t: EffExpr::new(), h: inner.t.join(d, &inner.h), s: inner.s }
            }
            ExprKind::Try { body, class, var, handler } => {
                let first = self.typeff(env, body);
                let mut out = Typed {
                    t: first.t.clone(),
                    h: except_filter(self.p, &self.table.meta, &first.h, class),
                    s: first.s.clone(),
                };
                for (r, u) in first.h.iter() {
                    let catchable = self.table.meta.cls(r).iter().any(|c| self.p.preceq(c, class));
                    if !catchable {
                        continue;
                    }
                    env.push((var.clone(), r.clone()));
                    let rest = self.typeff(env, handler);
                    env.pop();
                    out.t.join_in(d, &rest.t.scale(d, u));
                    out.h.join_in(d, &rest.h.scale(d, u));
                    out.s.join_in(d, &rest.s.scale(d, u));
                }
                out
            }
        }
    }
}

/// Types `e` under `env`, applying field updates to `table`.
pub fn typeff<D: BuchiDomain>(
    p: &Program,
    d: &D,
    table: &mut ClassTableB<D::Fin>,
    env: &Env,
    e: &Expr,
) -> Typed<D::Fin> {
    let mut cx = Cx { p, d, table, frozen: false, violations: Vec::new(), discovered: BTreeSet::new() };
    let mut env = env.clone();
    cx.typeff(&mut env, e)
}
