use std::collections::{BTreeMap, BTreeSet};

use super::{region_meta, Region, RegionMeta, Sig};
use crate::effect::{BuchiDomain, EffExpr};
use crate::fj::Program;

/// Method typing entry: terminating effect `t`, exceptional effect `h`,
/// and the calls `s` a method makes, each prefixed by the events before it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MEntry<E> {
    pub t: EffExpr<Region, E>,
    pub h: EffExpr<Region, E>,
    pub s: EffExpr<Sig, E>,
}

impl<E> Default for MEntry<E> {
    fn default() -> Self {
        MEntry { t: EffExpr::default(), h: EffExpr::default(), s: EffExpr::default() }
    }
}

impl<E: Clone + Eq> MEntry<E> {
    pub fn join_in<D: BuchiDomain<Fin = E>>(&mut self, d: &D, other: &MEntry<E>) -> bool {
        let a = self.t.join_in(d, &other.t);
        let b = self.h.join_in(d, &other.h);
        let c = self.s.join_in(d, &other.s);
        a || b || c
    }

    pub fn leq<D: BuchiDomain<Fin = E>>(&self, d: &D, other: &MEntry<E>) -> bool {
        self.t.leq(d, &other.t) && self.h.leq(d, &other.h) && self.s.leq(d, &other.s)
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty() && self.h.is_empty() && self.s.is_empty()
    }
}

/// Field typing `F` and method typing `M` over regions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassTableB<E> {
    pub fields: BTreeMap<(String, Region, String), BTreeSet<Region>>,
    pub methods: BTreeMap<Sig, MEntry<E>>,
    /// Signatures whose entries come from configuration.
    pub intrinsic: BTreeSet<Sig>,
    pub meta: RegionMeta,
}

impl<E: Clone + Eq> ClassTableB<E> {
    pub fn field(&self, class: &str, r: &Region, f: &str) -> Option<&BTreeSet<Region>> {
        self.fields.get(&(class.to_string(), r.clone(), f.to_string()))
    }

    pub fn method(&self, sig: &Sig) -> Option<&MEntry<E>> {
        self.methods.get(sig)
    }

    /// Call equations `δ = S_δ` for every signature in the table.
    pub fn call_equations(&self) -> BTreeMap<Sig, EffExpr<Sig, E>> {
        self.methods.iter().map(|(k, v)| (k.clone(), v.s.clone())).collect()
    }
}

fn empty_fields(p: &Program, meta: &RegionMeta) -> BTreeMap<(String, Region, String), BTreeSet<Region>> {
    let mut fields = BTreeMap::new();
    for c in p.class_names() {
        for r in meta.regions() {
            for (f, _) in p.fields_of(c) {
                fields.insert((c.to_string(), r.clone(), f), BTreeSet::from([Region::Null]));
            }
        }
    }
    fields
}

/// All argument-region tuples of length `n`.
pub(crate) fn region_tuples(regions: &[Region], n: usize) -> Vec<Vec<Region>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                regions.iter().map(move |r| {
                    let mut u = t.clone();
                    u.push(r.clone());
                    u
                })
            })
            .collect();
    }
    out
}

/// Every field entry `{Null}`, every method signature `(∅, ∅, ∅)`.
pub fn init<E: Clone + Eq>(p: &Program) -> ClassTableB<E> {
    let meta = region_meta(p);
    let mut methods = BTreeMap::new();
    for c in p.class_names() {
        for r in meta.regions() {
            for m in p.methods_of(c) {
                let arity = p.method_lookup(c, &m).map_or(0, |(d, _)| d.params.len());
                for args in region_tuples(meta.regions(), arity) {
                    methods.insert(Sig::new(c, r.clone(), &m, args), MEntry::default());
                }
            }
        }
    }
    ClassTableB { fields: empty_fields(p, &meta), methods, intrinsic: BTreeSet::new(), meta }
}

/// Like `init`, but with only the given signatures in the method domain.
pub fn init_demand<E: Clone + Eq>(p: &Program, seeds: &[Sig]) -> ClassTableB<E> {
    let meta = region_meta(p);
    let methods = seeds.iter().map(|s| (s.clone(), MEntry::default())).collect();
    ClassTableB { fields: empty_fields(p, &meta), methods, intrinsic: BTreeSet::new(), meta }
}

/// Closes the table under the well-formedness conditions: `Null` in every
/// field entry, each entry below the `Unknown` one, equal entries across a
/// field's subclass group, and method entries joined upward along `⪯`.
/// Returns whether anything changed.
pub fn check_class_table<D: BuchiDomain>(p: &Program, d: &D, table: &mut ClassTableB<D::Fin>) -> bool {
    let mut changed = false;
    loop {
        let mut round = false;
        for set in table.fields.values_mut() {
            round |= set.insert(Region::Null);
        }
        let keys: Vec<(String, Region, String)> = table.fields.keys().cloned().collect();
        for (c, r, f) in &keys {
            if *r == Region::Unknown {
                continue;
            }
            let here = table.fields[&(c.clone(), r.clone(), f.clone())].clone();
            let top = table.fields.get_mut(&(c.clone(), Region::Unknown, f.clone())).expect("field entry");
            for s in here {
                round |= top.insert(s);
            }
        }
        for (c, r, f) in &keys {
            let Some(owner) = p.field_owner(c, f) else { continue };
            if owner == c {
                continue;
            }
            // Equalize the entries of `c` and its declaring ancestor.
            let a = table.fields[&(c.clone(), r.clone(), f.clone())].clone();
            let okey = (owner.to_string(), r.clone(), f.clone());
            let b = table.fields[&okey].clone();
            if a != b {
                let u: BTreeSet<Region> = a.union(&b).cloned().collect();
                table.fields.insert(okey, u.clone());
                table.fields.insert((c.clone(), r.clone(), f.clone()), u);
                round = true;
            }
        }
        // Propagate the equalized owner entries back down to every
        // subclass; the loop above only lifts.
        for (c, r, f) in &keys {
            let Some(owner) = p.field_owner(c, f) else { continue };
            let okey = (owner.to_string(), r.clone(), f.clone());
            let b = table.fields[&okey].clone();
            let slot = table.fields.get_mut(&(c.clone(), r.clone(), f.clone())).unwrap();
            if *slot != b {
                *slot = b;
                round = true;
            }
        }
        changed |= round;
        if !round {
            break;
        }
    }
    let snapshot: Vec<(Sig, MEntry<D::Fin>)> =
        table.methods.iter().filter(|(_, e)| !e.is_empty()).map(|(s, e)| (s.clone(), e.clone())).collect();
    for (sig, entry) in snapshot {
        for anc in p.ancestors(&sig.class).into_iter().skip(1) {
            if !p.methods_of(anc).contains(&sig.method) {
                continue;
            }
            let up = Sig { class: anc.to_string(), ..sig.clone() };
            changed |= table.methods.entry(up).or_default().join_in(d, &entry);
        }
    }
    changed
}
