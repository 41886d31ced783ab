//! Infinitary effects: the greatest solution of the call-equation system
//! `δ = S_δ`, computed by eliminating one signature at a time with
//! `δ = A*·F ⊔ A^ω`, plus a descending-chain approximation over concrete
//! languages used to test it.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::effect::{BuchiDomain, EffExpr, OracleDomain, OracleLang};
use crate::region::{ClassTableB, Sig};

/// Right-hand sides `S_δ`, one per signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem<E> {
    pub eqs: BTreeMap<Sig, EffExpr<Sig, E>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("{0} occurs in a right-hand side but has no equation")]
    Unclosed(Sig),
    #[error("elimination order must list every signature exactly once")]
    BadOrder,
}

pub type InfTyping<I> = BTreeMap<Sig, I>;

impl<E: Clone + Eq> EquationSystem<E> {
    pub fn from_table(table: &ClassTableB<E>) -> Self {
        EquationSystem { eqs: table.call_equations() }
    }

    pub fn check_closed(&self) -> Result<(), SolveError> {
        for rhs in self.eqs.values() {
            if let Some(k) = rhs.keys().find(|k| !self.eqs.contains_key(k)) {
                return Err(SolveError::Unclosed(k.clone()));
            }
        }
        Ok(())
    }
}

/// `const ⊔ ⊔ coef(δ')·δ'`, the working form of an equation.
struct Linear<D: BuchiDomain> {
    coef: BTreeMap<Sig, D::Fin>,
    konst: D::Inf,
}

impl<D: BuchiDomain> Clone for Linear<D> {
    fn clone(&self) -> Self {
        Linear { coef: self.coef.clone(), konst: self.konst.clone() }
    }
}

impl<D: BuchiDomain> Linear<D> {
    fn join_coef(&mut self, d: &D, k: &Sig, u: D::Fin) {
        if d.fin_is_bottom(&u) {
            return;
        }
        match self.coef.get_mut(k) {
            Some(c) => *c = d.fin_join(c, &u),
            None => {
                self.coef.insert(k.clone(), u);
            }
        }
    }

    /// `u · self`.
    fn scaled(&self, d: &D, u: &D::Fin) -> Linear<D> {
        let mut out = Linear { coef: BTreeMap::new(), konst: d.concat_inf(u, &self.konst) };
        for (k, c) in &self.coef {
            out.join_coef(d, k, d.concat(u, c));
        }
        out
    }

    fn join_in(&mut self, d: &D, other: &Linear<D>) {
        self.konst = d.inf_join(&self.konst, &other.konst);
        for (k, c) in &other.coef {
            self.join_coef(d, k, c.clone());
        }
    }
}

/// Solves with the lexicographic elimination order.
pub fn solve<D: BuchiDomain>(sys: &EquationSystem<D::Fin>, d: &D) -> Result<InfTyping<D::Inf>, SolveError> {
    let order: Vec<Sig> = sys.eqs.keys().cloned().collect();
    solve_in_order(sys, d, &order)
}

pub fn solve_in_order<D: BuchiDomain>(
    sys: &EquationSystem<D::Fin>,
    d: &D,
    order: &[Sig],
) -> Result<InfTyping<D::Inf>, SolveError> {
    sys.check_closed()?;
    if order.len() != sys.eqs.len() || !order.iter().all(|s| sys.eqs.contains_key(s)) {
        return Err(SolveError::BadOrder);
    }
    let mut live: BTreeMap<Sig, Linear<D>> = sys
        .eqs
        .iter()
        .map(|(k, rhs)| {
            let mut l = Linear { coef: BTreeMap::new(), konst: d.inf_bottom() };
            for (s, u) in rhs.iter() {
                l.join_coef(d, s, u.clone());
            }
            (k.clone(), l)
        })
        .collect();
    if live.len() != order.len() {
        return Err(SolveError::BadOrder);
    }

    let mut solved: Vec<(Sig, Linear<D>)> = Vec::with_capacity(order.len());
    for x in order {
        let mut form = live.remove(x).ok_or(SolveError::BadOrder)?;
        // x = A·x ⊔ F  ⟹  x = A*·F ⊔ A^ω
        let a = form.coef.remove(x).unwrap_or_else(|| d.fin_bottom());
        let mut closed = form.scaled(d, &d.star(&a));
        if !d.fin_is_bottom(&a) {
            closed.konst = d.inf_join(&closed.konst, &d.omega(&a));
        }
        for other in live.values_mut() {
            if let Some(b) = other.coef.remove(x) {
                other.join_in(d, &closed.scaled(d, &b));
            }
        }
        solved.push((x.clone(), closed));
    }

    // Each form mentions only signatures eliminated after it.
    let mut eta: InfTyping<D::Inf> = BTreeMap::new();
    for (x, form) in solved.into_iter().rev() {
        let mut v = form.konst.clone();
        for (k, c) in &form.coef {
            v = d.inf_join(&v, &d.concat_inf(c, &eta[k]));
        }
        eta.insert(x, v);
    }
    Ok(eta)
}

/// `S_δ(η)` for one right-hand side.
pub fn substitute<D: BuchiDomain>(d: &D, rhs: &EffExpr<Sig, D::Fin>, eta: &InfTyping<D::Inf>) -> D::Inf {
    rhs.iter().fold(d.inf_bottom(), |acc, (k, u)| d.inf_join(&acc, &d.concat_inf(u, &eta[k])))
}

/// Signatures where `η(δ) ≠ S_δ(η)` under the domain's equality.
pub fn fixed_point_violations<D: BuchiDomain>(
    sys: &EquationSystem<D::Fin>,
    d: &D,
    eta: &InfTyping<D::Inf>,
) -> Vec<Sig> {
    sys.eqs
        .iter()
        .filter(|(k, rhs)| !d.inf_eq(&eta[*k], &substitute(d, rhs, eta)))
        .map(|(k, _)| k.clone())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Approx {
    /// `η_n = η_{n+1}` under bounded equality at step `n`.
    Stable { eta: InfTyping<OracleLang>, steps: usize },
    /// The chain was still moving after the cap; `eta` is the last element.
    NotStable { eta: InfTyping<OracleLang> },
}

/// The descending chain `η₀ = Σ^{≤ω}`, `η_{k+1}(δ) = S_δ(η_k)`, run for at
/// most `cap` steps.
pub fn approx_eta(sys: &EquationSystem<crate::effect::Dfa>, d: &OracleDomain, cap: usize) -> Result<Approx, SolveError> {
    sys.check_closed()?;
    let mut eta: InfTyping<OracleLang> =
        sys.eqs.keys().map(|k| (k.clone(), OracleLang::universal(d.letters()))).collect();
    for step in 0..cap {
        let next: InfTyping<OracleLang> =
            sys.eqs.iter().map(|(k, rhs)| (k.clone(), substitute(d, rhs, &eta))).collect();
        let same = next.iter().all(|(k, v)| d.inf_eq(v, &eta[k]));
        eta = next;
        if same {
            return Ok(Approx::Stable { eta, steps: step });
        }
    }
    Ok(Approx::NotStable { eta })
}

/// `η_n` exactly, without stabilization checks.
pub fn approx_step(sys: &EquationSystem<crate::effect::Dfa>, d: &OracleDomain, n: usize) -> InfTyping<OracleLang> {
    let mut eta: InfTyping<OracleLang> =
        sys.eqs.keys().map(|k| (k.clone(), OracleLang::universal(d.letters()))).collect();
    for _ in 0..n {
        eta = sys.eqs.iter().map(|(k, rhs)| (k.clone(), substitute(d, rhs, &eta))).collect();
    }
    eta
}
