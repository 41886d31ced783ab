//! Concrete languages: regular sets of finite words as canonical minimal
//! DFAs, and ω-regular sets as a regular finite part plus a union of
//! `U·V^ω` products. Used as the reference instance when checking the
//! abstract domains and as an advisory analysis mode.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::automaton::reachable;
use super::bitset::BitSet;
use super::profile::{FinAbs, MixAbs, ProfileDomain, EPS};
use super::regex::Regex;
use super::BuchiDomain;

/// Complete, minimal DFA with states numbered in breadth-first order from the
/// start state (letters visited in index order). Two DFAs are equal iff their
/// languages are equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dfa {
    k: usize,
    trans: Vec<usize>,
    accept: Vec<bool>,
}

/// ε-NFA used for constructions; states are plain indices.
struct Nfa {
    k: usize,
    start: Vec<usize>,
    trans: Vec<Vec<Vec<usize>>>,
    eps: Vec<Vec<usize>>,
    accept: Vec<bool>,
}

impl Nfa {
    fn with_states(k: usize, n: usize) -> Self {
        Nfa { k, start: Vec::new(), trans: vec![vec![Vec::new(); k]; n], eps: vec![Vec::new(); n], accept: vec![false; n] }
    }

    /// Copies `d` into this NFA, returning the offset of its states.
    fn embed(&mut self, d: &Dfa) -> usize {
        let off = self.trans.len();
        for q in 0..d.len() {
            self.trans.push((0..self.k).map(|a| vec![off + d.next(q, a)]).collect());
            self.eps.push(Vec::new());
            self.accept.push(false);
        }
        off
    }

    fn closure(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &p in &self.eps[q] {
                if set.insert(p) {
                    stack.push(p);
                }
            }
        }
    }

    fn determinize(&self) -> Dfa {
        let mut start: BTreeSet<usize> = self.start.iter().copied().collect();
        self.closure(&mut start);
        let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut sets = vec![start.clone()];
        ids.insert(start, 0);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            for a in 0..self.k {
                let mut next: BTreeSet<usize> =
                    sets[i].iter().flat_map(|&q| self.trans[q][a].iter().copied()).collect();
                self.closure(&mut next);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        sets.push(next.clone());
                        ids.insert(next, sets.len() - 1);
                        sets.len() - 1
                    }
                };
                trans.push(id);
            }
            i += 1;
        }
        let accept = sets.iter().map(|s| s.iter().any(|&q| self.accept[q])).collect();
        Dfa::canonical(self.k, trans, accept)
    }
}

impl Dfa {
    fn canonical(k: usize, trans: Vec<usize>, accept: Vec<bool>) -> Dfa {
        // Moore partition refinement, then renumber reachable classes in BFS order.
        let n = accept.len();
        let mut class: Vec<usize> = accept.iter().map(|&b| b as usize).collect();
        loop {
            let mut sig: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = vec![0; n];
            for q in 0..n {
                let key = (class[q], (0..k).map(|a| class[trans[q * k + a]]).collect::<Vec<_>>());
                let len = sig.len();
                next[q] = *sig.entry(key).or_insert(len);
            }
            let stable = sig.len() == class.iter().collect::<BTreeSet<_>>().len();
            class = next;
            if stable {
                break;
            }
        }
        let mut order: HashMap<usize, usize> = HashMap::new();
        let mut rep: Vec<usize> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        order.insert(class[0], 0);
        rep.push(0);
        while let Some(q) = queue.pop_front() {
            for a in 0..k {
                let p = trans[q * k + a];
                if let Entry::Vacant(slot) = order.entry(class[p]) {
                    slot.insert(rep.len());
                    rep.push(p);
                    queue.push_back(p);
                }
            }
        }
        let mut t = Vec::with_capacity(rep.len() * k);
        for &q in &rep {
            for a in 0..k {
                t.push(order[&class[trans[q * k + a]]]);
            }
        }
        let acc = rep.iter().map(|&q| accept[q]).collect();
        Dfa { k, trans: t, accept: acc }
    }

    pub fn empty(k: usize) -> Dfa {
        Dfa { k, trans: vec![0; k], accept: vec![false] }
    }

    pub fn epsilon(k: usize) -> Dfa {
        Dfa::canonical(k, [vec![1; k], vec![1; k]].concat(), vec![true, false])
    }

    pub fn universal(k: usize) -> Dfa {
        Dfa { k, trans: vec![0; k], accept: vec![true] }
    }

    pub fn letter(k: usize, a: usize) -> Dfa {
        let mut t = vec![2; 3 * k];
        t[a] = 1;
        Dfa::canonical(k, t, vec![false, true, false])
    }

    pub fn from_words<'a>(k: usize, words: impl IntoIterator<Item = &'a [usize]>) -> Dfa {
        let mut nfa = Nfa::with_states(k, 1);
        nfa.start.push(0);
        for w in words {
            let mut cur = 0;
            for &a in w {
                nfa.trans.push(vec![Vec::new(); k]);
                nfa.eps.push(Vec::new());
                nfa.accept.push(false);
                let p = nfa.trans.len() - 1;
                nfa.trans[cur][a].push(p);
                cur = p;
            }
            nfa.accept[cur] = true;
        }
        nfa.determinize()
    }

    pub fn from_regex(k: usize, r: &Regex) -> Dfa {
        r.to_domain(&OracleDomain::new(k))
    }

    pub fn letters(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.accept.len()
    }

    pub fn is_empty(&self) -> bool {
        !self.accept.iter().any(|&b| b)
    }

    fn next(&self, q: usize, a: usize) -> usize {
        self.trans[q * self.k + a]
    }

    pub fn contains(&self, w: &[usize]) -> bool {
        self.accept[w.iter().fold(0, |q, &a| self.next(q, a))]
    }

    pub fn contains_eps(&self) -> bool {
        self.accept[0]
    }

    fn product(&self, other: &Dfa, f: impl Fn(bool, bool) -> bool) -> Dfa {
        assert_eq!(self.k, other.k, "languages over different alphabets");
        let k = self.k;
        let (n, m) = (self.len(), other.len());
        let mut trans = Vec::with_capacity(n * m * k);
        let mut accept = Vec::with_capacity(n * m);
        for q in 0..n {
            for p in 0..m {
                for a in 0..k {
                    trans.push(self.next(q, a) * m + other.next(p, a));
                }
                accept.push(f(self.accept[q], other.accept[p]));
            }
        }
        Dfa::canonical(k, trans, accept)
    }

    pub fn union(&self, other: &Dfa) -> Dfa {
        self.product(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Dfa) -> Dfa {
        self.product(other, |a, b| a && b)
    }

    pub fn minus(&self, other: &Dfa) -> Dfa {
        self.product(other, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &Dfa) -> bool {
        self.minus(other).is_empty()
    }

    pub fn without_eps(&self) -> Dfa {
        self.minus(&Dfa::epsilon(self.k))
    }

    pub fn concat(&self, other: &Dfa) -> Dfa {
        let mut nfa = Nfa::with_states(self.k, 0);
        let a = nfa.embed(self);
        let b = nfa.embed(other);
        nfa.start.push(a);
        for q in 0..self.len() {
            if self.accept[q] {
                nfa.eps[a + q].push(b);
            }
        }
        for q in 0..other.len() {
            nfa.accept[b + q] = other.accept[q];
        }
        nfa.determinize()
    }

    pub fn star(&self) -> Dfa {
        let mut nfa = Nfa::with_states(self.k, 1);
        let off = nfa.embed(self);
        nfa.start.push(0);
        nfa.accept[0] = true;
        nfa.eps[0].push(off);
        for q in 0..self.len() {
            if self.accept[q] {
                nfa.eps[off + q].push(0);
            }
        }
        nfa.determinize()
    }

    /// Words of length at most `bound`, as a DFA.
    pub fn upto(k: usize, bound: usize) -> Dfa {
        // States 0..=bound count letters read; bound+1 is the sink.
        let mut trans = Vec::new();
        for q in 0..=bound + 1 {
            for _ in 0..k {
                trans.push((q + 1).min(bound + 1));
            }
        }
        let accept = (0..=bound + 1).map(|q| q <= bound).collect();
        Dfa::canonical(k, trans, accept)
    }

    pub fn truncate(&self, bound: usize) -> Dfa {
        self.intersect(&Dfa::upto(self.k, bound))
    }

    /// A regular expression for the language, by state elimination.
    pub fn to_regex(&self) -> Regex {
        let n = self.len();
        // Generalized automaton with fresh start n and final n+1.
        let (s, f) = (n, n + 1);
        let mut edge: BTreeMap<(usize, usize), Regex> = BTreeMap::new();
        let add = |edge: &mut BTreeMap<(usize, usize), Regex>, i: usize, j: usize, r: Regex| {
            let cur = edge.remove(&(i, j)).unwrap_or(Regex::Empty);
            let joined = Regex::alt([cur, r]);
            if joined != Regex::Empty {
                edge.insert((i, j), joined);
            }
        };
        add(&mut edge, s, 0, Regex::Eps);
        for q in 0..n {
            for a in 0..self.k {
                add(&mut edge, q, self.next(q, a), Regex::Sym(a));
            }
            if self.accept[q] {
                add(&mut edge, q, f, Regex::Eps);
            }
        }
        // Eliminate dead states first: they only contribute ∅.
        let mut rev = vec![Vec::new(); n];
        for q in 0..n {
            for a in 0..self.k {
                rev[self.next(q, a)].push(q);
            }
        }
        let finals: Vec<usize> = (0..n).filter(|&q| self.accept[q]).collect();
        let live = reachable(&rev, &finals);
        for (q, &alive) in live.iter().enumerate() {
            if !alive {
                edge.retain(|&(i, j), _| i != q && j != q);
            }
        }
        for (q, &alive) in live.iter().enumerate() {
            if !alive {
                continue;
            }
            let loop_r = edge.remove(&(q, q)).map(Regex::star).unwrap_or(Regex::Eps);
            let ins: Vec<(usize, Regex)> =
                edge.iter().filter(|((_, j), _)| *j == q).map(|((i, _), r)| (*i, r.clone())).collect();
            let outs: Vec<(usize, Regex)> =
                edge.iter().filter(|((i, _), _)| *i == q).map(|((_, j), r)| (*j, r.clone())).collect();
            edge.retain(|&(i, j), _| i != q && j != q);
            for (i, rin) in &ins {
                for (j, rout) in &outs {
                    add(&mut edge, *i, *j, Regex::cat([rin.clone(), loop_r.clone(), rout.clone()]));
                }
            }
        }
        edge.remove(&(s, f)).unwrap_or(Regex::Empty)
    }

    /// Concretization of a set of profile-domain elements: the words whose
    /// element lies in `x`, read off the monoid's right action.
    pub fn gamma(d: &ProfileDomain, x: &FinAbs) -> Dfa {
        let m = d.monoid();
        let k = m.automaton().num_letters();
        let trans = (0..m.len()).flat_map(|q| (0..k).map(move |a| m.right_letter(q, a))).collect();
        let accept = (0..m.len()).map(|q| x.0.contains(q)).collect();
        Dfa::canonical(k, trans, accept)
    }

    /// Abstraction into the profile domain: the set of elements of all words.
    pub fn alpha(&self, d: &ProfileDomain) -> FinAbs {
        let m = d.monoid();
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut stack = vec![(0usize, EPS)];
        let mut out = BitSet::new();
        while let Some((q, x)) = stack.pop() {
            if !seen.insert((q, x)) {
                continue;
            }
            if self.accept[q] {
                out.insert(x);
            }
            for a in 0..self.k {
                stack.push((self.next(q, a), m.right_letter(x, a)));
            }
        }
        FinAbs(out)
    }
}

/// A set of finite and infinite words: `fin ∪ ⋃ U·(V∖{ε})^ω`, where each
/// product contributes only infinite words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleLang {
    pub fin: Dfa,
    pub pairs: BTreeSet<(Dfa, Dfa)>,
}

impl OracleLang {
    pub fn empty(k: usize) -> Self {
        OracleLang { fin: Dfa::empty(k), pairs: BTreeSet::new() }
    }

    pub fn finite(fin: Dfa) -> Self {
        OracleLang { fin, pairs: BTreeSet::new() }
    }

    /// All of Σ^{≤ω}.
    pub fn universal(k: usize) -> Self {
        Self::empty(k).with_pair(Dfa::epsilon(k), Dfa::universal(k)).with_fin(Dfa::universal(k))
    }

    pub fn with_fin(mut self, fin: Dfa) -> Self {
        self.fin = self.fin.union(&fin);
        self
    }

    pub fn with_pair(mut self, u: Dfa, v: Dfa) -> Self {
        let v = v.without_eps();
        if !u.is_empty() && !v.is_empty() {
            self.pairs.insert((u, v));
        }
        self
    }

    pub fn contains_finite(&self, w: &[usize]) -> bool {
        self.fin.contains(w)
    }

    pub fn contains_lasso(&self, u: &[usize], v: &[usize]) -> bool {
        self.pairs.iter().any(|(a, b)| lasso_in_product(a, b, u, v))
    }

    /// Agreement on finite words up to length `bound` and on lassos `u v^ω`
    /// with `|u| ≤ bound` and `1 ≤ |v| ≤ bound`.
    pub fn bounded_equiv(&self, other: &OracleLang, bound: usize) -> bool {
        if self == other {
            return true;
        }
        let k = self.fin.letters();
        if self.fin.truncate(bound) != other.fin.truncate(bound) {
            return false;
        }
        if self.pairs == other.pairs {
            return true;
        }
        let words = all_words(k, bound);
        let cycles: Vec<&Vec<usize>> = words.iter().filter(|v| is_primitive(v)).collect();
        for u in &words {
            for v in &cycles {
                // `u·a (v'·a)^ω` is the same word as `u (a·v')^ω`, which is also enumerated.
                if u.last().is_some_and(|a| v.last() == Some(a)) {
                    continue;
                }
                if self.contains_lasso(u, v) != other.contains_lasso(u, v) {
                    return false;
                }
            }
        }
        true
    }

    /// Finite part plus `[s]·[e]^ω` for every stored pair.
    pub fn gamma(d: &ProfileDomain, x: &MixAbs) -> OracleLang {
        let one = |p: usize| Dfa::gamma(d, &d.fin_of([p]));
        x.inf.iter().fold(OracleLang::finite(Dfa::gamma(d, &x.fin)), |acc, &(s, e)| acc.with_pair(one(s), one(e)))
    }

    pub fn alpha(&self, d: &ProfileDomain) -> MixAbs {
        let mut out = MixAbs { fin: self.fin.alpha(d), inf: BTreeSet::new() };
        for (u, v) in &self.pairs {
            let part = d.concat_inf(&u.alpha(d), &d.omega(&v.alpha(d)));
            out.inf.extend(part.inf);
        }
        out
    }

    pub fn render(&self, alphabet: &[String]) -> String {
        let mut parts = Vec::new();
        if !self.fin.is_empty() {
            parts.push(self.fin.to_regex().render(alphabet));
        }
        for (u, v) in &self.pairs {
            let u = u.to_regex();
            let head = if u == Regex::Eps { String::new() } else { format!("{}·", paren(&u.render(alphabet))) };
            parts.push(format!("{head}{}^ω", paren(&v.to_regex().render(alphabet))));
        }
        if parts.is_empty() {
            "∅".into()
        } else {
            parts.join(" ∪ ")
        }
    }
}

fn paren(s: &str) -> String {
    if s.chars().count() == 1 || (s.starts_with('(') && s.ends_with(')')) {
        s.to_string()
    } else {
        format!("({s})")
    }
}

/// All words of length at most `bound` in shortlex order.
pub fn all_words(k: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut start = 0;
    for _ in 0..bound {
        let end = out.len();
        for i in start..end {
            for a in 0..k {
                let mut w = out[i].clone();
                w.push(a);
                out.push(w);
            }
        }
        start = end;
    }
    out
}

/// Nonempty and not a power of a shorter word.
fn is_primitive(v: &[usize]) -> bool {
    let n = v.len();
    n > 0 && (1..n).filter(|&p| n.is_multiple_of(p)).all(|p| v[p..] != v[..n - p])
}

/// Whether `x y^ω ∈ U·(V∖{ε})^ω`.
fn lasso_in_product(u_lang: &Dfa, v_lang: &Dfa, x: &[usize], y: &[usize]) -> bool {
    assert!(!y.is_empty(), "lasso cycle must be nonempty");
    let len = x.len() + y.len();
    let letter = |pos: usize| if pos < x.len() { x[pos] } else { y[pos - x.len()] };
    let step = |pos: usize| if pos + 1 < len { pos + 1 } else { x.len() };
    // Node layout: phase 0 (reading U) then phase 1 (reading V), each |states| × len.
    let nu = u_lang.len();
    let nv = v_lang.len();
    let id_u = |q: usize, pos: usize| q * len + pos;
    let id_v = |q: usize, pos: usize| (nu + q) * len + pos;
    let total = (nu + nv) * len;
    let mut edges = vec![Vec::new(); total];
    let mut acc_edges = Vec::new();
    for pos in 0..len {
        let a = letter(pos);
        for q in 0..nu {
            edges[id_u(q, pos)].push(id_u(u_lang.next(q, a), step(pos)));
            if u_lang.accept[q] {
                edges[id_u(q, pos)].push(id_v(0, pos));
            }
        }
        for q in 0..nv {
            edges[id_v(q, pos)].push(id_v(v_lang.next(q, a), step(pos)));
            if v_lang.accept[q] {
                // V excludes ε here, so reaching acceptance consumed a letter.
                edges[id_v(q, pos)].push(id_v(0, pos));
                acc_edges.push(id_v(q, pos));
            }
        }
    }
    let reach = reachable(&edges, &[id_u(0, 0)]);
    acc_edges.into_iter().any(|n| {
        reach[n] && {
            let back = reachable(&edges, &[id_v(0, n % len)]);
            back[n]
        }
    })
}

/// The concrete-language instance. `bound` sets the word length used by the
/// bounded equality that detects fixed points, and `cap` limits iterations.
#[derive(Clone, Debug)]
pub struct OracleDomain {
    k: usize,
    pub bound: usize,
    pub cap: usize,
}

impl OracleDomain {
    pub fn new(k: usize) -> Self {
        OracleDomain { k, bound: 6, cap: 24 }
    }

    pub fn letters(&self) -> usize {
        self.k
    }
}

impl BuchiDomain for OracleDomain {
    type Fin = Dfa;
    type Inf = OracleLang;

    fn fin_bottom(&self) -> Dfa {
        Dfa::empty(self.k)
    }

    fn fin_join(&self, x: &Dfa, y: &Dfa) -> Dfa {
        x.union(y)
    }

    fn fin_leq(&self, x: &Dfa, y: &Dfa) -> bool {
        x.is_subset(y)
    }

    fn fin_eq(&self, x: &Dfa, y: &Dfa) -> bool {
        x.truncate(self.bound) == y.truncate(self.bound)
    }

    fn epsilon(&self) -> Dfa {
        Dfa::epsilon(self.k)
    }

    fn event(&self, a: usize) -> Dfa {
        Dfa::letter(self.k, a)
    }

    fn concat(&self, x: &Dfa, y: &Dfa) -> Dfa {
        x.concat(y)
    }

    fn star(&self, x: &Dfa) -> Dfa {
        x.star()
    }

    fn inf_bottom(&self) -> OracleLang {
        OracleLang::empty(self.k)
    }

    fn inf_join(&self, x: &OracleLang, y: &OracleLang) -> OracleLang {
        OracleLang { fin: x.fin.union(&y.fin), pairs: x.pairs.union(&y.pairs).cloned().collect() }
    }

    /// Structural inclusion of the product lists; sufficient, not necessary.
    fn inf_leq(&self, x: &OracleLang, y: &OracleLang) -> bool {
        x.fin.is_subset(&y.fin) && x.pairs.is_subset(&y.pairs)
    }

    fn inf_eq(&self, x: &OracleLang, y: &OracleLang) -> bool {
        x.bounded_equiv(y, self.bound)
    }

    fn concat_inf(&self, x: &Dfa, v: &OracleLang) -> OracleLang {
        let mut out = OracleLang::finite(x.concat(&v.fin));
        for (u, w) in &v.pairs {
            out = out.with_pair(x.concat(u), w.clone());
        }
        out
    }

    fn omega(&self, x: &Dfa) -> OracleLang {
        let fin = if x.contains_eps() { x.star() } else { Dfa::empty(self.k) };
        OracleLang::finite(fin).with_pair(Dfa::epsilon(self.k), x.clone())
    }

    fn describe_fin(&self, x: &Dfa) -> String {
        x.to_regex().render(&default_names(self.k))
    }

    fn describe_inf(&self, x: &OracleLang) -> String {
        x.render(&default_names(self.k))
    }

    fn iteration_cap(&self) -> Option<usize> {
        Some(self.cap)
    }
}

fn default_names(k: usize) -> Vec<String> {
    (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}
