//! Effect domains: guideline automata, the domain contract used by the
//! inference engine and solver, and its three instances.
//!
//! A domain provides two join-semilattices: `Fin` abstracts sets of finite
//! traces and `Inf` abstracts sets of finite-or-infinite traces. Finite
//! elements concatenate with each other and act on the left of infinite
//! elements; `omega` turns a finite element into an infinite one.

pub mod automaton;
pub mod bitset;
pub mod effexpr;
pub mod oracle;
pub mod profile;
pub mod regex;
pub mod toy;

use std::fmt::Debug;
use std::hash::Hash;

pub use automaton::{GuidelineAutomaton, GuidelineError};
pub use effexpr::EffExpr;
pub use oracle::{Dfa, OracleDomain, OracleLang};
pub use profile::{FinAbs, MixAbs, Profile, ProfileDomain, ProfileMonoid};
pub use toy::{ToyDomain, ToyFin, ToyInf};

pub trait BuchiDomain {
    type Fin: Clone + Eq + Ord + Hash + Debug;
    type Inf: Clone + Eq + Debug;

    fn fin_bottom(&self) -> Self::Fin;
    fn fin_join(&self, x: &Self::Fin, y: &Self::Fin) -> Self::Fin;
    fn fin_leq(&self, x: &Self::Fin, y: &Self::Fin) -> bool;
    /// Abstraction of `{ε}`.
    fn epsilon(&self) -> Self::Fin;
    /// Abstraction of the single one-letter word `a` (a letter index).
    fn event(&self, a: usize) -> Self::Fin;
    fn concat(&self, x: &Self::Fin, y: &Self::Fin) -> Self::Fin;
    fn star(&self, x: &Self::Fin) -> Self::Fin;

    fn inf_bottom(&self) -> Self::Inf;
    fn inf_join(&self, x: &Self::Inf, y: &Self::Inf) -> Self::Inf;
    fn inf_leq(&self, x: &Self::Inf, y: &Self::Inf) -> bool;
    fn concat_inf(&self, x: &Self::Fin, v: &Self::Inf) -> Self::Inf;
    fn omega(&self, x: &Self::Fin) -> Self::Inf;

    fn fin_is_bottom(&self, x: &Self::Fin) -> bool {
        *x == self.fin_bottom()
    }

    /// Equality used to detect fixed points. Exact for finite domains.
    fn fin_eq(&self, x: &Self::Fin, y: &Self::Fin) -> bool {
        x == y
    }

    fn inf_eq(&self, x: &Self::Inf, y: &Self::Inf) -> bool {
        x == y
    }

    fn inf_is_bottom(&self, x: &Self::Inf) -> bool {
        self.inf_eq(x, &self.inf_bottom())
    }

    fn describe_fin(&self, x: &Self::Fin) -> String {
        format!("{x:?}")
    }

    fn describe_inf(&self, x: &Self::Inf) -> String {
        format!("{x:?}")
    }

    /// Upper bound on outer inference iterations; `None` for finite domains,
    /// where termination follows from finite height.
    fn iteration_cap(&self) -> Option<usize> {
        None
    }
}
