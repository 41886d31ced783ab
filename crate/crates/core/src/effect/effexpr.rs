//! Formal effect expressions: finite maps from keys (regions or signatures)
//! to finite-trace abstractions. A missing key reads as the least element,
//! and entries equal to it are never stored.

use std::collections::BTreeMap;

use super::BuchiDomain;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EffExpr<K: Ord, E> {
    map: BTreeMap<K, E>,
}

impl<K: Ord, E> Default for EffExpr<K, E> {
    fn default() -> Self {
        EffExpr { map: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, E: Clone + Eq> EffExpr<K, E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single<D: BuchiDomain<Fin = E>>(d: &D, k: K, e: E) -> Self {
        let mut out = Self::new();
        out.join_entry(d, k, &e);
        out
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn get(&self, k: &K) -> Option<&E> {
        self.map.get(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &E)> {
        self.map.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.map.keys()
    }

    /// Keeps only the entries whose key satisfies `keep`.
    pub fn filter_keys(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        EffExpr { map: self.map.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }

    /// Joins `e` into the entry for `k`; returns whether the entry grew.
    pub fn join_entry<D: BuchiDomain<Fin = E>>(&mut self, d: &D, k: K, e: &E) -> bool {
        if d.fin_is_bottom(e) {
            return false;
        }
        match self.map.get_mut(&k) {
            Some(cur) => {
                let next = d.fin_join(cur, e);
                let changed = next != *cur;
                *cur = next;
                changed
            }
            None => {
                self.map.insert(k, e.clone());
                true
            }
        }
    }

    pub fn join<D: BuchiDomain<Fin = E>>(&self, d: &D, other: &Self) -> Self {
        let mut out = self.clone();
        out.join_in(d, other);
        out
    }

    pub fn join_in<D: BuchiDomain<Fin = E>>(&mut self, d: &D, other: &Self) -> bool {
        let mut changed = false;
        for (k, e) in &other.map {
            changed |= self.join_entry(d, k.clone(), e);
        }
        changed
    }

    /// `(U·T)(k) = U·T(k)`.
    pub fn scale<D: BuchiDomain<Fin = E>>(&self, d: &D, u: &E) -> Self {
        let mut out = Self::new();
        for (k, e) in &self.map {
            out.join_entry(d, k.clone(), &d.concat(u, e));
        }
        out
    }

    pub fn leq<D: BuchiDomain<Fin = E>>(&self, d: &D, other: &Self) -> bool {
        self.map.iter().all(|(k, e)| match other.map.get(k) {
            Some(f) => d.fin_leq(e, f),
            None => d.fin_is_bottom(e),
        })
    }

    /// Equality under the domain's fixed-point equality.
    pub fn eq_in<D: BuchiDomain<Fin = E>>(&self, d: &D, other: &Self) -> bool {
        let keys: std::collections::BTreeSet<&K> = self.map.keys().chain(other.map.keys()).collect();
        let bottom = d.fin_bottom();
        keys.into_iter().all(|k| {
            let a = self.map.get(k).unwrap_or(&bottom);
            let b = other.map.get(k).unwrap_or(&bottom);
            d.fin_eq(a, b)
        })
    }

    /// Inclusion under the domain's fixed-point equality: `self ⊔ other`
    /// equals `other`.
    pub fn leq_in<D: BuchiDomain<Fin = E>>(&self, d: &D, other: &Self) -> bool {
        self.join(d, other).eq_in(d, other)
    }

    /// Join of all values, forgetting keys.
    pub fn flatten<D: BuchiDomain<Fin = E>>(&self, d: &D) -> E {
        self.map.values().fold(d.fin_bottom(), |acc, e| d.fin_join(&acc, e))
    }
}
