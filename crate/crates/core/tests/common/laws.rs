//! Algebraic law checks for the effect domains, shared by the law-suite and
//! acceptance targets. Concrete languages come from the oracle instance.

use std::collections::BTreeSet;

use guidecheck::effect::oracle::all_words;
use guidecheck::effect::profile::profile_of_word;
use guidecheck::effect::regex::Regex;
use guidecheck::effect::{
    BuchiDomain, Dfa, EffExpr, FinAbs, GuidelineAutomaton, OracleDomain, OracleLang, ProfileDomain, ToyDomain, ToyFin,
    ToyInf,
};
use rand::Rng;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

/// An automaton with 1..=3 states over 1..=2 letters.
pub fn random_automaton(rng: &mut impl Rng) -> GuidelineAutomaton {
    let n = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=2);
    let mut trans = Vec::new();
    for q in 0..n {
        for a in 0..k {
            for p in 0..n {
                if rng.gen_bool(0.45) {
                    trans.push((q, a, p));
                }
            }
        }
    }
    let mut init: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
    if init.is_empty() {
        init.push(0);
    }
    let acc: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    GuidelineAutomaton::from_indices(k, n, &trans, &init, &acc)
}

pub fn random_regex(rng: &mut impl Rng, k: usize, depth: usize) -> Regex {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return match rng.gen_range(0..10) {
            0 => Regex::Eps,
            1 if depth > 1 => Regex::Empty,
            _ => Regex::Sym(rng.gen_range(0..k)),
        };
    }
    match rng.gen_range(0..3) {
        0 => Regex::cat([random_regex(rng, k, depth - 1), random_regex(rng, k, depth - 1)]),
        1 => Regex::alt([random_regex(rng, k, depth - 1), random_regex(rng, k, depth - 1)]),
        _ => Regex::star(random_regex(rng, k, depth - 1)),
    }
}

pub fn random_dfa(rng: &mut impl Rng, k: usize) -> Dfa {
    Dfa::from_regex(k, &random_regex(rng, k, 3))
}

pub fn random_olang(rng: &mut impl Rng, k: usize) -> OracleLang {
    let mut out = OracleLang::finite(random_dfa(rng, k));
    for _ in 0..rng.gen_range(0..=2) {
        out = out.with_pair(random_dfa(rng, k), random_dfa(rng, k));
    }
    out
}

/// Lassos `u v^ω` with `|u|,|v| ≤ bound`, one per ω-word: `v` primitive and
/// `u` not ending in the last letter of `v`.
pub fn canonical_lassos(k: usize, bound: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let words = all_words(k, bound);
    let primitive = |v: &[usize]| {
        let n = v.len();
        n > 0 && (1..n).filter(|&p| n.is_multiple_of(p)).all(|p| v[p..] != v[..n - p])
    };
    let mut out = Vec::new();
    for v in words.iter().filter(|v| primitive(v)) {
        for u in &words {
            if u.last().is_none() || u.last() != v.last() {
                out.push((u.clone(), v.clone()));
            }
        }
    }
    out
}

/// Every law of the profile instance that relates it to concrete languages,
/// on languages drawn from `rng`.
pub fn check_profile_laws(g: &GuidelineAutomaton, rng: &mut impl Rng) -> Result<(), String> {
    let d = ProfileDomain::new(g.clone()).map_err(|e| e.to_string())?;
    let k = g.num_letters();
    let od = OracleDomain::new(k);
    let (ca, cb, cc) = (random_dfa(rng, k), random_dfa(rng, k), random_dfa(rng, k));
    let (cu, cv) = (random_olang(rng, k), random_olang(rng, k));
    let (a, b, c) = (ca.alpha(&d), cb.alpha(&d), cc.alpha(&d));
    let (u, v) = (cu.alpha(&d), cv.alpha(&d));
    let ab = d.fin_join(&a, &b);
    let uv = d.inf_join(&u, &v);

    // Join-semilattices.
    ensure!(d.fin_join(&a, &a) == a, "fin join not idempotent");
    ensure!(d.fin_join(&a, &b) == d.fin_join(&b, &a), "fin join not commutative");
    ensure!(d.fin_join(&ab, &c) == d.fin_join(&a, &d.fin_join(&b, &c)), "fin join not associative");
    ensure!(d.fin_leq(&d.fin_bottom(), &a) && d.fin_leq(&a, &ab), "fin order");
    ensure!(d.inf_eq(&d.inf_join(&u, &u), &u), "inf join not idempotent");
    ensure!(d.inf_eq(&uv, &d.inf_join(&v, &u)), "inf join not commutative");
    ensure!(d.inf_leq(&d.inf_bottom(), &u) && d.inf_leq(&u, &uv), "inf order");

    // Associativity and monotonicity.
    ensure!(d.concat(&a, &d.concat(&b, &c)) == d.concat(&d.concat(&a, &b), &c), "concat not associative");
    ensure!(
        d.inf_eq(&d.concat_inf(&a, &d.concat_inf(&b, &u)), &d.concat_inf(&d.concat(&a, &b), &u)),
        "mixed concat not associative"
    );
    ensure!(d.fin_leq(&d.concat(&a, &c), &d.concat(&ab, &c)), "concat not monotone on the left");
    ensure!(d.fin_leq(&d.concat(&c, &a), &d.concat(&c, &ab)), "concat not monotone on the right");
    ensure!(d.inf_leq(&d.concat_inf(&a, &u), &d.concat_inf(&ab, &u)), "mixed concat not monotone on the left");
    ensure!(d.inf_leq(&d.concat_inf(&a, &u), &d.concat_inf(&a, &uv)), "mixed concat not monotone on the right");
    ensure!(d.inf_leq(&d.omega(&a), &d.omega(&ab)), "omega not monotone");
    ensure!(d.fin_leq(&d.star(&a), &d.star(&ab)), "star not monotone");

    // Homomorphism.
    ensure!(ca.concat(&cb).alpha(&d) == d.concat(&a, &b), "alpha(A·B) = alpha(A)·alpha(B) fails");
    ensure!(d.inf_eq(&od.concat_inf(&ca, &cu).alpha(&d), &d.concat_inf(&a, &u)), "alpha(A·V) fails");
    ensure!(d.inf_eq(&od.omega(&ca).alpha(&d), &d.omega(&a)), "alpha(A^ω) fails");
    ensure!(ca.star().alpha(&d) == d.star(&a), "alpha(A*) fails");

    // Galois insertion.
    ensure!(Dfa::gamma(&d, &a).alpha(&d) == a, "alpha(gamma(a)) != a");
    ensure!(d.inf_eq(&OracleLang::gamma(&d, &u).alpha(&d), &u), "alpha(gamma(u)) != u");
    ensure!(ca.is_subset(&Dfa::gamma(&d, &a)), "gamma(alpha(A)) misses a word of A");
    ensure!(Dfa::gamma(&d, &a).is_subset(&Dfa::gamma(&d, &ab)), "gamma not monotone");
    ensure!(cu.fin.is_subset(&Dfa::gamma(&d, &u.fin)), "gamma(alpha(V)) misses a finite word");
    for (x, y) in canonical_lassos(k, 3) {
        if cu.contains_lasso(&x, &y) {
            ensure!(d.member_up_word(&x, &y, &u), "gamma(alpha(V)) misses {x:?}({y:?})^ω");
        }
        ensure!(
            d.member_up_word(&x, &y, &u) == OracleLang::gamma(&d, &u).contains_lasso(&x, &y),
            "member_up_word disagrees with the concretization on {x:?}({y:?})^ω"
        );
    }

    // Joins are preserved.
    ensure!(ca.union(&cb).alpha(&d) == ab, "alpha(A ∪ B) fails");
    ensure!(d.inf_eq(&od.inf_join(&cu, &cv).alpha(&d), &uv), "alpha(U ∪ V) fails");
    // γ only grows under joins and products.
    ensure!(Dfa::gamma(&d, &a).union(&Dfa::gamma(&d, &b)).is_subset(&Dfa::gamma(&d, &ab)), "gamma(a ⊔ b) too small");
    ensure!(
        Dfa::gamma(&d, &a).concat(&Dfa::gamma(&d, &b)).is_subset(&Dfa::gamma(&d, &d.concat(&a, &b))),
        "gamma(a · b) too small"
    );

    // Distributivity.
    ensure!(d.concat(&ab, &c) == d.fin_join(&d.concat(&a, &c), &d.concat(&b, &c)), "(a ⊔ b)·c");
    ensure!(d.concat(&c, &ab) == d.fin_join(&d.concat(&c, &a), &d.concat(&c, &b)), "c·(a ⊔ b)");
    ensure!(
        d.inf_eq(&d.concat_inf(&ab, &u), &d.inf_join(&d.concat_inf(&a, &u), &d.concat_inf(&b, &u))),
        "(a ⊔ b)·u"
    );
    ensure!(
        d.inf_eq(&d.concat_inf(&a, &uv), &d.inf_join(&d.concat_inf(&a, &u), &d.concat_inf(&a, &v))),
        "a·(u ⊔ v)"
    );

    // ω-iteration.
    let aw = d.omega(&a);
    ensure!(d.inf_eq(&od.omega(&Dfa::gamma(&d, &a)).alpha(&d), &aw), "alpha(gamma(a)^ω) != a^ω");
    ensure!(d.inf_eq(&aw, &d.concat_inf(&a, &aw)), "a^ω != a·a^ω");
    ensure!(
        d.inf_eq(&d.concat_inf(&a, &d.omega(&d.concat(&b, &a))), &d.omega(&d.concat(&a, &b))),
        "a·(b·a)^ω != (a·b)^ω"
    );
    let mut pow = a.clone();
    for n in 1..=4 {
        ensure!(d.inf_eq(&d.omega(&pow), &aw), "(a^{n})^ω != a^ω");
        pow = d.concat(&pow, &a);
    }
    Ok(())
}

/// The guideline's own language survives abstraction: words up to
/// `fin_bound` and lassos up to `lasso_bound` are classified alike.
pub fn check_faithful(g: &GuidelineAutomaton, fin_bound: usize, lasso_bound: usize) -> Result<(), String> {
    let d = ProfileDomain::new(g.clone()).map_err(|e| e.to_string())?;
    let top = d.alpha_guideline();
    ensure!(d.accepts_mix(&top), "alpha of the guideline is not accepted");
    let k = g.num_letters();
    for w in all_words(k, fin_bound) {
        ensure!(d.member_fin(&w, &top.fin) == g.accepts_finite(&w), "finite word {w:?}");
    }
    for (u, v) in canonical_lassos(k, lasso_bound) {
        ensure!(d.member_up_word(&u, &v, &top) == g.accepts_lasso(&u, &v), "lasso {u:?}({v:?})^ω");
    }
    Ok(())
}

/// Laws of the oracle instance itself, compared with bounded equality.
pub fn check_oracle_laws(k: usize, rng: &mut impl Rng) -> Result<(), String> {
    let od = OracleDomain::new(k);
    let eq = |x: &OracleLang, y: &OracleLang| x.bounded_equiv(y, 3);
    let (a, b, c) = (random_dfa(rng, k), random_dfa(rng, k), random_dfa(rng, k));
    let (u, v) = (random_olang(rng, k), random_olang(rng, k));
    let ab = a.union(&b);
    ensure!(a.concat(&b.concat(&c)) == a.concat(&b).concat(&c), "oracle concat not associative");
    ensure!(eq(&od.concat_inf(&a, &od.concat_inf(&b, &u)), &od.concat_inf(&a.concat(&b), &u)), "oracle mixed assoc");
    ensure!(a.concat(&c).is_subset(&ab.concat(&c)), "oracle concat not monotone");
    ensure!(od.inf_leq(&u, &od.inf_join(&u, &v)), "oracle join not an upper bound");
    let (aw, abw) = (od.omega(&a), od.omega(&ab));
    for (x, y) in canonical_lassos(k, 3) {
        ensure!(!aw.contains_lasso(&x, &y) || abw.contains_lasso(&x, &y), "oracle omega not monotone");
    }
    ensure!(eq(&aw, &od.concat_inf(&a, &aw)), "oracle A^ω != A·A^ω");
    Ok(())
}

/// Exhaustive laws of the four-element toy instance.
pub fn check_toy_laws() -> Result<(), String> {
    let d = ToyDomain;
    for a in ToyFin::ALL {
        for b in ToyFin::ALL {
            let ab = d.fin_join(&a, &b);
            for c in ToyFin::ALL {
                ensure!(d.concat(&a, &d.concat(&b, &c)) == d.concat(&d.concat(&a, &b), &c), "toy assoc");
                ensure!(d.fin_leq(&d.concat(&a, &c), &d.concat(&ab, &c)), "toy monotone");
                ensure!(d.concat(&ab, &c) == d.fin_join(&d.concat(&a, &c), &d.concat(&b, &c)), "toy distributive");
            }
            for u in ToyInf::ALL {
                ensure!(
                    d.concat_inf(&a, &d.concat_inf(&b, &u)) == d.concat_inf(&d.concat(&a, &b), &u),
                    "toy mixed assoc"
                );
                ensure!(d.inf_leq(&d.concat_inf(&a, &u), &d.concat_inf(&ab, &u)), "toy mixed monotone");
            }
            ensure!(d.inf_leq(&d.omega(&a), &d.omega(&ab)), "toy omega monotone");
            ensure!(d.concat_inf(&a, &d.omega(&d.concat(&b, &a))) == d.omega(&d.concat(&a, &b)), "toy Wilke");
        }
        ensure!(d.omega(&a) == d.concat_inf(&a, &d.omega(&a)), "toy a^ω != a·a^ω");
        ensure!(d.omega(&d.concat(&a, &a)) == d.omega(&a), "toy (aa)^ω");
    }
    ensure!(d.fin_join(&ToyFin::Plus, &ToyFin::Eps) == ToyFin::Star, "a⁺ ⊔ ε");
    ensure!(d.concat(&ToyFin::Plus, &ToyFin::Plus) == ToyFin::Plus, "a⁺·a⁺");
    ensure!(d.star(&ToyFin::Plus) == ToyFin::Star, "(a⁺)*");
    ensure!(d.omega(&ToyFin::Plus) == ToyInf { fin: ToyFin::Empty, omega: true }, "(a⁺)^ω");
    Ok(())
}

/// `leq` on effect expressions is a partial order.
pub fn check_effexpr_order(g: &GuidelineAutomaton, rng: &mut impl Rng) -> Result<(), String> {
    let d = ProfileDomain::new(g.clone()).map_err(|e| e.to_string())?;
    let (x, y, z) = (random_expr(&d, rng), random_expr(&d, rng), random_expr(&d, rng));
    ensure!(x.leq(&d, &x), "leq not reflexive");
    ensure!(!(x.leq(&d, &y) && y.leq(&d, &x)) || x == y, "leq not antisymmetric");
    let (xy, xyz) = (x.join(&d, &y), x.join(&d, &y).join(&d, &z));
    ensure!(x.leq(&d, &xy) && xy.leq(&d, &xyz) && x.leq(&d, &xyz), "leq not transitive along joins");
    ensure!(!(x.leq(&d, &y) && y.leq(&d, &z)) || x.leq(&d, &z), "leq not transitive");
    Ok(())
}

fn random_expr(d: &ProfileDomain, rng: &mut impl Rng) -> EffExpr<u8, FinAbs> {
    let k = d.automaton().num_letters();
    let mut t = EffExpr::new();
    for _ in 0..rng.gen_range(0..=3) {
        let key = rng.gen_range(0..3u8);
        t.join_entry(d, key, &random_dfa(rng, k).alpha(d));
    }
    t
}

/// Profile of a word by enumerating every path of the automaton.
pub fn brute_profile(g: &GuidelineAutomaton, w: &[usize]) -> BTreeSet<(usize, bool, usize)> {
    let mut out = BTreeSet::new();
    for q in 0..g.num_states() {
        let mut paths = vec![(q, g.is_accepting(q))];
        for &a in w {
            paths = paths.iter().flat_map(|&(p, acc)| g.succ(p, a).iter().map(move |&r| (r, acc || g.is_accepting(r)))).collect();
        }
        out.extend(paths.into_iter().map(|(p, acc)| (q, acc, p)));
    }
    out
}

/// `profile_of_word` matches path enumeration and composes along concatenation.
pub fn check_profiles(g: &GuidelineAutomaton, rng: &mut impl Rng) -> Result<(), String> {
    let k = g.num_letters();
    let word = |rng: &mut dyn rand::RngCore| -> Vec<usize> { (0..rng.gen_range(0..5)).map(|_| rng.gen_range(0..k)).collect() };
    let (u, v) = (word(rng), word(rng));
    let pu = profile_of_word(g, &u).map_err(|e| e.to_string())?;
    let pv = profile_of_word(g, &v).map_err(|e| e.to_string())?;
    let uv: Vec<usize> = u.iter().chain(&v).copied().collect();
    let puv = profile_of_word(g, &uv).map_err(|e| e.to_string())?;
    ensure!(pu.compose(&pv) == puv, "profile({u:?}·{v:?}) != composition");
    ensure!(puv.triples().into_iter().collect::<BTreeSet<_>>() == brute_profile(g, &uv), "profile({uv:?}) != paths");
    Ok(())
}
