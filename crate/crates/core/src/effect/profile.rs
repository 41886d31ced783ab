//! Transition-profile abstraction of a guideline automaton.
//!
//! The profile of a finite word records, for every pair of states, whether some
//! run connects them and whether such a run can visit an accepting state
//! (both endpoints counted). Profiles of nonempty words form a finite
//! semigroup; the empty word gets its own adjoined identity element, so that
//! `ε` is never confused with a nonempty word that happens to act like it.
//! Finite effects are sets of monoid elements; infinite effects add linked
//! pairs `(p, e)` with `e` idempotent and `p·e = p`, each standing for the
//! infinite words `u v1 v2 …` with `profile(u) = p` and `profile(vi) = e`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::automaton::GuidelineAutomaton;
use super::bitset::BitSet;
use super::BuchiDomain;

const NO_EDGE: u8 = 0;
const EDGE_PLAIN: u8 = 1;
const EDGE_ACC: u8 = 2;

/// Set of triples `(q, b, q')`, stored as an `n × n` matrix of two-bit cells.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    n: usize,
    cells: Vec<u8>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProfileError {
    #[error("letter index {0} is outside the alphabet")]
    UnknownLetter(usize),
    #[error("transition monoid exceeds {0} elements")]
    TooLarge(usize),
}

impl Profile {
    pub fn identity(g: &GuidelineAutomaton) -> Self {
        let n = g.num_states();
        let mut cells = vec![NO_EDGE; n * n];
        for q in 0..n {
            cells[q * n + q] = if g.is_accepting(q) { EDGE_ACC } else { EDGE_PLAIN };
        }
        Profile { n, cells }
    }

    pub fn letter(g: &GuidelineAutomaton, a: usize) -> Self {
        let n = g.num_states();
        let mut cells = vec![NO_EDGE; n * n];
        for q in 0..n {
            for &p in g.succ(q, a) {
                let bit = if g.is_accepting(q) || g.is_accepting(p) { EDGE_ACC } else { EDGE_PLAIN };
                cells[q * n + p] |= bit;
            }
        }
        Profile { n, cells }
    }

    pub fn compose(&self, other: &Profile) -> Profile {
        assert_eq!(self.n, other.n, "profiles over different automata");
        let n = self.n;
        let mut cells = vec![NO_EDGE; n * n];
        for q in 0..n {
            for m in 0..n {
                let x = self.cells[q * n + m];
                if x == NO_EDGE {
                    continue;
                }
                for p in 0..n {
                    let y = other.cells[m * n + p];
                    if y == NO_EDGE {
                        continue;
                    }
                    // (b1 ∨ b2) for every combination of witnessed bits.
                    let mut out = 0;
                    if x & EDGE_PLAIN != 0 && y & EDGE_PLAIN != 0 {
                        out |= EDGE_PLAIN;
                    }
                    if x & EDGE_ACC != 0 || y & EDGE_ACC != 0 {
                        out |= EDGE_ACC;
                    }
                    cells[q * n + p] |= out;
                }
            }
        }
        Profile { n, cells }
    }

    pub fn contains(&self, q: usize, acc: bool, p: usize) -> bool {
        let bit = if acc { EDGE_ACC } else { EDGE_PLAIN };
        self.cells[q * self.n + p] & bit != 0
    }

    /// Some run from `q` to `p`, regardless of the accepting bit.
    pub fn connects(&self, q: usize, p: usize) -> bool {
        self.cells[q * self.n + p] != NO_EDGE
    }

    pub fn triples(&self) -> Vec<(usize, bool, usize)> {
        let mut out = Vec::new();
        for q in 0..self.n {
            for p in 0..self.n {
                if self.contains(q, false, p) {
                    out.push((q, false, p));
                }
                if self.contains(q, true, p) {
                    out.push((q, true, p));
                }
            }
        }
        out
    }

    pub fn from_triples(n: usize, triples: &[(usize, bool, usize)]) -> Self {
        let mut cells = vec![NO_EDGE; n * n];
        for &(q, b, p) in triples {
            cells[q * n + p] |= if b { EDGE_ACC } else { EDGE_PLAIN };
        }
        Profile { n, cells }
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.triples().into_iter().map(|(q, b, p)| (q, b as u8, p)))
            .finish()
    }
}

pub fn profile_of_word(g: &GuidelineAutomaton, w: &[usize]) -> Result<Profile, ProfileError> {
    let mut p = Profile::identity(g);
    for &a in w {
        if a >= g.num_letters() {
            return Err(ProfileError::UnknownLetter(a));
        }
        p = p.compose(&Profile::letter(g, a));
    }
    Ok(p)
}

/// Element index of the adjoined identity (the empty word).
pub const EPS: usize = 0;

const DEFAULT_LIMIT: usize = 4096;

/// The transition monoid of an automaton, with the empty word adjoined as a
/// separate identity. Elements are numbered in breadth-first order of their
/// shortest witness word, so numbering is deterministic.
pub struct ProfileMonoid {
    g: GuidelineAutomaton,
    profiles: Vec<Profile>,
    witness: Vec<Vec<usize>>,
    /// `right[x * k + a]` is `x · profile(a)`.
    right: Vec<usize>,
    table: Vec<u32>,
    fin_ok: Vec<bool>,
    /// For each idempotent `e`, every `(x, y·x)` with `x·y = e` and `y·x` idempotent.
    conj: Vec<Vec<(usize, usize)>>,
}

impl ProfileMonoid {
    pub fn new(g: GuidelineAutomaton) -> Result<Self, ProfileError> {
        Self::with_limit(g, DEFAULT_LIMIT)
    }

    pub fn with_limit(g: GuidelineAutomaton, limit: usize) -> Result<Self, ProfileError> {
        let k = g.num_letters();
        let mut profiles = vec![Profile::identity(&g)];
        let mut witness = vec![Vec::new()];
        let mut index: HashMap<Profile, usize> = HashMap::new();
        let letters: Vec<Profile> = (0..k).map(|a| Profile::letter(&g, a)).collect();
        let mut right = vec![usize::MAX; k];
        for a in 0..k {
            let id = *index.entry(letters[a].clone()).or_insert_with(|| {
                profiles.push(letters[a].clone());
                witness.push(vec![a]);
                profiles.len() - 1
            });
            right[a] = id;
        }
        let mut next = 1;
        while next < profiles.len() {
            if profiles.len() > limit {
                return Err(ProfileError::TooLarge(limit));
            }
            right.resize((next + 1) * k, usize::MAX);
            for a in 0..k {
                let p = profiles[next].compose(&letters[a]);
                let id = match index.get(&p) {
                    Some(&id) => id,
                    None => {
                        let mut w = witness[next].clone();
                        w.push(a);
                        profiles.push(p.clone());
                        witness.push(w);
                        index.insert(p, profiles.len() - 1);
                        profiles.len() - 1
                    }
                };
                right[next * k + a] = id;
            }
            next += 1;
        }
        right.resize(profiles.len() * k, usize::MAX);
        let fin_ok = profiles
            .iter()
            .map(|p| {
                g.initial_states()
                    .any(|q| (0..g.num_states()).any(|f| g.is_accepting(f) && p.connects(q, f)))
            })
            .collect();
        let mut m = ProfileMonoid { g, profiles, witness, right, table: Vec::new(), fin_ok, conj: Vec::new() };
        let n = m.len();
        m.table = (0..n * n).map(|i| m.mul_slow(i / n, i % n) as u32).collect();
        m.conj = vec![Vec::new(); n];
        for x in 0..n {
            for y in 0..n {
                let (e, f) = (m.mul(x, y), m.mul(y, x));
                if m.is_idempotent(e) && m.is_idempotent(f) {
                    m.conj[e].push((x, f));
                }
            }
        }
        Ok(m)
    }

    pub fn automaton(&self) -> &GuidelineAutomaton {
        &self.g
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn profile(&self, x: usize) -> &Profile {
        &self.profiles[x]
    }

    /// A shortest word whose element is `x`.
    pub fn witness(&self, x: usize) -> &[usize] {
        &self.witness[x]
    }

    pub fn right_letter(&self, x: usize, a: usize) -> usize {
        self.right[x * self.g.num_letters() + a]
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.len() + y] as usize
    }

    fn mul_slow(&self, x: usize, y: usize) -> usize {
        self.witness[y].iter().fold(x, |acc, &a| self.right_letter(acc, a))
    }

    pub fn of_word(&self, w: &[usize]) -> usize {
        w.iter().fold(EPS, |acc, &a| self.right_letter(acc, a))
    }

    /// Pairs `(x, f)` such that `(s, e)` and `(s·x, f)` are conjugate linked pairs.
    pub fn conjugates(&self, e: usize) -> &[(usize, usize)] {
        &self.conj[e]
    }

    pub fn is_idempotent(&self, e: usize) -> bool {
        self.mul(e, e) == e
    }

    /// Finite reading: some run from an initial to an accepting state.
    pub fn fin_accepted(&self, x: usize) -> bool {
        self.fin_ok[x]
    }

    /// Büchi reading of the linked pair `(p, e)`.
    pub fn lasso_accepted(&self, p: usize, e: usize) -> bool {
        let (pp, ep) = (&self.profiles[p], &self.profiles[e]);
        let n = self.g.num_states();
        self.g
            .initial_states()
            .any(|q0| (0..n).any(|q| pp.connects(q0, q) && ep.contains(q, true, q)))
    }

    /// The sequence `x, x·y, x·y², …` up to its first repetition, as
    /// (distinct prefix elements, index where the cycle starts).
    fn orbit(&self, x: usize, y: usize) -> (Vec<usize>, usize) {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut seq = Vec::new();
        let mut cur = x;
        loop {
            if let Some(&i) = seen.get(&cur) {
                return (seq, i);
            }
            seen.insert(cur, seq.len());
            seq.push(cur);
            cur = self.mul(cur, y);
        }
    }
}

impl fmt::Debug for ProfileMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfileMonoid").field("elements", &self.len()).finish()
    }
}

/// Finite-trace abstraction: a set of monoid elements.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinAbs(pub BitSet);

/// Finite-or-infinite abstraction: a finite part plus a conjugacy-closed set
/// of linked pairs.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MixAbs {
    pub fin: FinAbs,
    pub inf: BTreeSet<(usize, usize)>,
}

impl fmt::Debug for FinAbs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Debug for MixAbs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} ∪ ω{:?}", self.fin, self.inf)
    }
}

impl FinAbs {
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter()
    }
}

#[derive(Clone, Debug)]
pub struct ProfileDomain {
    m: Arc<ProfileMonoid>,
}

impl ProfileDomain {
    pub fn new(g: GuidelineAutomaton) -> Result<Self, ProfileError> {
        Ok(ProfileDomain { m: Arc::new(ProfileMonoid::new(g)?) })
    }

    pub fn monoid(&self) -> &ProfileMonoid {
        &self.m
    }

    pub fn automaton(&self) -> &GuidelineAutomaton {
        self.m.automaton()
    }

    pub fn alpha_words<'a>(&self, words: impl IntoIterator<Item = &'a [usize]>) -> FinAbs {
        FinAbs(words.into_iter().map(|w| self.m.of_word(w)).collect())
    }

    pub fn alpha_word(&self, w: &[usize]) -> FinAbs {
        FinAbs(BitSet::singleton(self.m.of_word(w)))
    }

    pub fn member_fin(&self, w: &[usize], x: &FinAbs) -> bool {
        x.0.contains(self.m.of_word(w))
    }

    /// Membership of `u v^ω` in the infinite part. Stored pairs are closed
    /// under conjugacy, and all factorizations of one ω-word give conjugate
    /// pairs, so factorizations aligned with `v` suffice.
    pub fn member_up_word(&self, u: &[usize], v: &[usize], x: &MixAbs) -> bool {
        assert!(!v.is_empty(), "lasso cycle must be nonempty");
        if x.inf.is_empty() {
            return false;
        }
        let pv = self.m.of_word(v);
        let (stems, _) = self.m.orbit(self.m.of_word(u), pv);
        let (cycles, _) = self.m.orbit(pv, pv);
        stems.iter().any(|&s| cycles.iter().any(|&e| x.inf.contains(&(s, e))))
    }

    /// Adds every pair conjugate to a stored one.
    pub fn close(&self, mut inf: BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
        let mut todo: Vec<(usize, usize)> = inf.iter().copied().collect();
        while let Some((s, e)) = todo.pop() {
            for &(x, f) in self.m.conjugates(e) {
                let p = (self.m.mul(s, x), f);
                if inf.insert(p) {
                    todo.push(p);
                }
            }
        }
        inf
    }

    /// Every word in the concretization is accepted by the guideline.
    pub fn accepts_fin(&self, x: &FinAbs) -> bool {
        x.0.iter().all(|p| self.m.fin_accepted(p))
    }

    pub fn accepts_mix(&self, x: &MixAbs) -> bool {
        self.accepts_fin(&x.fin) && x.inf.iter().all(|&(p, e)| self.m.lasso_accepted(p, e))
    }

    /// Subsemigroup generated by the non-identity elements of `x`.
    pub fn plus_closure(&self, x: &FinAbs) -> BitSet {
        let gens: Vec<usize> = x.0.iter().filter(|&g| g != EPS).collect();
        let mut out: BitSet = gens.iter().copied().collect();
        let mut stack = gens.clone();
        while let Some(s) = stack.pop() {
            for &g in &gens {
                let t = self.m.mul(s, g);
                if out.insert(t) {
                    stack.push(t);
                }
            }
        }
        out
    }

    pub fn normalize(&self, x: MixAbs) -> MixAbs {
        let inf = x
            .inf
            .into_iter()
            .filter(|&(p, e)| self.m.is_idempotent(e) && self.m.mul(p, e) == p)
            .collect();
        MixAbs { fin: x.fin, inf: self.close(inf) }
    }

    /// The guideline's own language: accepted elements and accepting linked pairs.
    pub fn alpha_guideline(&self) -> MixAbs {
        let fin = FinAbs((0..self.m.len()).filter(|&p| self.m.fin_accepted(p)).collect());
        let mut inf = BTreeSet::new();
        for e in (1..self.m.len()).filter(|&e| self.m.is_idempotent(e)) {
            for s in (0..self.m.len()).filter(|&s| self.m.mul(s, e) == s) {
                if self.m.lasso_accepted(s, e) {
                    inf.insert((s, e));
                }
            }
        }
        MixAbs { fin, inf: self.close(inf) }
    }

    pub fn fin_of(&self, ids: impl IntoIterator<Item = usize>) -> FinAbs {
        FinAbs(ids.into_iter().collect())
    }
}

impl BuchiDomain for ProfileDomain {
    type Fin = FinAbs;
    type Inf = MixAbs;

    fn fin_bottom(&self) -> FinAbs {
        FinAbs::default()
    }

    fn fin_join(&self, x: &FinAbs, y: &FinAbs) -> FinAbs {
        FinAbs(x.0.union(&y.0))
    }

    fn fin_leq(&self, x: &FinAbs, y: &FinAbs) -> bool {
        x.0.is_subset(&y.0)
    }

    fn epsilon(&self) -> FinAbs {
        FinAbs(BitSet::singleton(EPS))
    }

    fn event(&self, a: usize) -> FinAbs {
        FinAbs(BitSet::singleton(self.m.right_letter(EPS, a)))
    }

    fn concat(&self, x: &FinAbs, y: &FinAbs) -> FinAbs {
        let ys: Vec<usize> = y.0.iter().collect();
        let mut out = BitSet::new();
        for p in x.0.iter() {
            for &q in &ys {
                out.insert(self.m.mul(p, q));
            }
        }
        FinAbs(out)
    }

    fn star(&self, x: &FinAbs) -> FinAbs {
        // Kleene iteration of X ↦ {ε} ⊔ x·X.
        let mut cur = self.epsilon();
        loop {
            let next = self.fin_join(&self.epsilon(), &self.concat(x, &cur));
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    fn inf_bottom(&self) -> MixAbs {
        MixAbs::default()
    }

    fn inf_join(&self, x: &MixAbs, y: &MixAbs) -> MixAbs {
        MixAbs { fin: self.fin_join(&x.fin, &y.fin), inf: x.inf.union(&y.inf).copied().collect() }
    }

    fn inf_leq(&self, x: &MixAbs, y: &MixAbs) -> bool {
        self.fin_leq(&x.fin, &y.fin) && x.inf.is_subset(&y.inf)
    }

    fn concat_inf(&self, x: &FinAbs, v: &MixAbs) -> MixAbs {
        let fin = self.concat(x, &v.fin);
        let mut inf = BTreeSet::new();
        for a in x.0.iter() {
            for &(p, e) in &v.inf {
                inf.insert((self.m.mul(a, p), e));
            }
        }
        MixAbs { fin, inf }
    }

    fn omega(&self, x: &FinAbs) -> MixAbs {
        let fin = if x.0.contains(EPS) { self.star(x) } else { FinAbs::default() };
        let plus = self.plus_closure(x);
        let idem: Vec<usize> = plus.iter().filter(|&e| self.m.is_idempotent(e)).collect();
        let mut inf = BTreeSet::new();
        for s in std::iter::once(EPS).chain(plus.iter()) {
            for &e in &idem {
                if self.m.mul(s, e) == s {
                    inf.insert((s, e));
                }
            }
        }
        MixAbs { fin, inf: self.close(inf) }
    }

    fn describe_fin(&self, x: &FinAbs) -> String {
        let g = self.automaton();
        let parts: Vec<String> = x.0.iter().map(|p| format!("[{}]", g.render_word(self.m.witness(p)))).collect();
        if parts.is_empty() {
            "∅".into()
        } else {
            parts.join(" ∪ ")
        }
    }

    fn describe_inf(&self, x: &MixAbs) -> String {
        let g = self.automaton();
        let mut parts: Vec<String> = Vec::new();
        if !x.fin.0.is_empty() {
            parts.push(self.describe_fin(&x.fin));
        }
        for &(p, e) in &x.inf {
            parts.push(format!(
                "[{}]·[{}]^ω",
                g.render_word(self.m.witness(p)),
                g.render_word(self.m.witness(e))
            ));
        }
        if parts.is_empty() {
            "∅".into()
        } else {
            parts.join(" ∪ ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flip() -> GuidelineAutomaton {
        // Q = {0,1}, a swaps the states, only 1 accepting.
        GuidelineAutomaton::from_indices(1, 2, &[(0, 0, 1), (1, 0, 0)], &[0], &[1])
    }

    #[test]
    fn empty_word_profile_is_diagonal() {
        let g = flip();
        let p = profile_of_word(&g, &[]).unwrap();
        assert_eq!(p.triples(), vec![(0, false, 0), (1, true, 1)]);
    }

    #[test]
    fn two_letter_flip_profile() {
        let g = flip();
        let p = profile_of_word(&g, &[0, 0]).unwrap();
        assert_eq!(p.triples(), vec![(0, true, 0), (1, true, 1)]);
    }

    #[test]
    fn foreign_letter_rejected() {
        assert_eq!(profile_of_word(&flip(), &[3]), Err(ProfileError::UnknownLetter(3)));
    }

    #[test]
    fn identity_is_adjoined() {
        // A single non-accepting state looping on `a`: profile(a) equals the
        // diagonal, but the monoid keeps ε apart.
        let g = GuidelineAutomaton::from_indices(1, 1, &[(0, 0, 0)], &[0], &[]);
        let m = ProfileMonoid::new(g.clone()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.profile(1), &profile_of_word(&g, &[]).unwrap());
        assert_ne!(m.of_word(&[0]), EPS);
    }

    #[test]
    fn omega_of_epsilon_is_epsilon() {
        let d = ProfileDomain::new(flip()).unwrap();
        let w = d.omega(&d.epsilon());
        assert_eq!(w.fin, d.epsilon());
        assert!(w.inf.is_empty());
    }

    #[test]
    fn omega_of_letter_contains_a_omega() {
        let d = ProfileDomain::new(flip()).unwrap();
        let w = d.omega(&d.event(0));
        assert!(w.fin.0.is_empty());
        assert!(d.member_up_word(&[], &[0], &w));
        assert!(d.member_up_word(&[0], &[0, 0], &w));
    }

    #[test]
    fn membership_ignores_where_the_cycle_is_cut() {
        let d = ProfileDomain::new(flip()).unwrap();
        let aa = d.concat(&d.event(0), &d.event(0));
        let w = d.omega(&aa);
        assert!(d.member_up_word(&[0], &[0, 0], &w));
        assert!(d.member_up_word(&[], &[0], &w));
        let shifted = d.concat_inf(&d.event(0), &w);
        assert!(d.inf_eq(&w, &shifted));
    }

    #[test]
    fn star_of_bottom_is_epsilon() {
        let d = ProfileDomain::new(flip()).unwrap();
        assert_eq!(d.star(&d.fin_bottom()), d.epsilon());
    }

    #[test]
    fn member_fin_of_bottom_is_false() {
        let d = ProfileDomain::new(flip()).unwrap();
        assert!(!d.member_fin(&[], &d.fin_bottom()));
    }
}
