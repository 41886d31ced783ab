//! The four-element abstraction of languages over the one-letter alphabet
//! `{a}`: a language is classified only by whether it is empty, contains ε,
//! and contains a nonempty word. Infinite elements add a flag for `a^ω`.

use super::BuchiDomain;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ToyFin {
    Empty,
    Eps,
    Plus,
    Star,
}

/// A finite part plus whether `a^ω` is included: eight elements in total.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ToyInf {
    pub fin: ToyFin,
    pub omega: bool,
}

impl ToyFin {
    pub const ALL: [ToyFin; 4] = [ToyFin::Empty, ToyFin::Eps, ToyFin::Plus, ToyFin::Star];

    fn bits(self) -> (bool, bool) {
        match self {
            ToyFin::Empty => (false, false),
            ToyFin::Eps => (true, false),
            ToyFin::Plus => (false, true),
            ToyFin::Star => (true, true),
        }
    }

    fn from_bits(eps: bool, plus: bool) -> Self {
        match (eps, plus) {
            (false, false) => ToyFin::Empty,
            (true, false) => ToyFin::Eps,
            (false, true) => ToyFin::Plus,
            (true, true) => ToyFin::Star,
        }
    }

    /// Abstraction of a set of finite words given by their lengths.
    pub fn alpha(lengths: impl IntoIterator<Item = usize>) -> Self {
        let (mut eps, mut plus) = (false, false);
        for n in lengths {
            if n == 0 {
                eps = true;
            } else {
                plus = true;
            }
        }
        Self::from_bits(eps, plus)
    }

    pub fn contains_len(self, n: usize) -> bool {
        let (eps, plus) = self.bits();
        if n == 0 {
            eps
        } else {
            plus
        }
    }
}

impl ToyInf {
    pub const ALL: [ToyInf; 8] = [
        ToyInf { fin: ToyFin::Empty, omega: false },
        ToyInf { fin: ToyFin::Eps, omega: false },
        ToyInf { fin: ToyFin::Plus, omega: false },
        ToyInf { fin: ToyFin::Star, omega: false },
        ToyInf { fin: ToyFin::Empty, omega: true },
        ToyInf { fin: ToyFin::Eps, omega: true },
        ToyInf { fin: ToyFin::Plus, omega: true },
        ToyInf { fin: ToyFin::Star, omega: true },
    ];

    pub const TOP: ToyInf = ToyInf { fin: ToyFin::Star, omega: true };
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ToyDomain;

impl ToyDomain {
    /// Greatest fixed point of `X ↦ x·X` computed inside the eight-element
    /// lattice, by descending from the top element.
    pub fn naive_gfp(&self, x: &ToyFin) -> ToyInf {
        let mut cur = ToyInf::TOP;
        loop {
            let next = self.concat_inf(x, &cur);
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }
}

impl BuchiDomain for ToyDomain {
    type Fin = ToyFin;
    type Inf = ToyInf;

    fn fin_bottom(&self) -> ToyFin {
        ToyFin::Empty
    }

    fn fin_join(&self, x: &ToyFin, y: &ToyFin) -> ToyFin {
        let (a, b) = (x.bits(), y.bits());
        ToyFin::from_bits(a.0 || b.0, a.1 || b.1)
    }

    fn fin_leq(&self, x: &ToyFin, y: &ToyFin) -> bool {
        self.fin_join(x, y) == *y
    }

    fn epsilon(&self) -> ToyFin {
        ToyFin::Eps
    }

    fn event(&self, a: usize) -> ToyFin {
        assert_eq!(a, 0, "the toy alphabet has one letter");
        ToyFin::Plus
    }

    fn concat(&self, x: &ToyFin, y: &ToyFin) -> ToyFin {
        let (a, b) = (x.bits(), y.bits());
        if *x == ToyFin::Empty || *y == ToyFin::Empty {
            return ToyFin::Empty;
        }
        // ε results only from ε·ε; a nonempty word needs a nonempty factor.
        ToyFin::from_bits(a.0 && b.0, a.1 || b.1)
    }

    fn star(&self, x: &ToyFin) -> ToyFin {
        ToyFin::from_bits(true, x.bits().1)
    }

    fn inf_bottom(&self) -> ToyInf {
        ToyInf { fin: ToyFin::Empty, omega: false }
    }

    fn inf_join(&self, x: &ToyInf, y: &ToyInf) -> ToyInf {
        ToyInf { fin: self.fin_join(&x.fin, &y.fin), omega: x.omega || y.omega }
    }

    fn inf_leq(&self, x: &ToyInf, y: &ToyInf) -> bool {
        self.fin_leq(&x.fin, &y.fin) && (!x.omega || y.omega)
    }

    fn concat_inf(&self, x: &ToyFin, v: &ToyInf) -> ToyInf {
        ToyInf { fin: self.concat(x, &v.fin), omega: v.omega && *x != ToyFin::Empty }
    }

    fn omega(&self, x: &ToyFin) -> ToyInf {
        let (eps, plus) = x.bits();
        ToyInf { fin: if eps { self.star(x) } else { ToyFin::Empty }, omega: plus }
    }

    fn describe_fin(&self, x: &ToyFin) -> String {
        match x {
            ToyFin::Empty => "∅",
            ToyFin::Eps => "{ε}",
            ToyFin::Plus => "a⁺",
            ToyFin::Star => "a*",
        }
        .to_string()
    }

    fn describe_inf(&self, x: &ToyInf) -> String {
        match (x.fin, x.omega) {
            (f, false) => self.describe_fin(&f),
            (ToyFin::Empty, true) => "a^ω".into(),
            (f, true) => format!("{} ∪ a^ω", self.describe_fin(&f)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carrier_operations() {
        let d = ToyDomain;
        assert_eq!(d.fin_join(&ToyFin::Plus, &ToyFin::Eps), ToyFin::Star);
        assert_eq!(d.concat(&ToyFin::Plus, &ToyFin::Plus), ToyFin::Plus);
        assert_eq!(d.star(&ToyFin::Plus), ToyFin::Star);
        assert_eq!(d.omega(&ToyFin::Plus), ToyInf { fin: ToyFin::Empty, omega: true });
        assert_eq!(d.omega(&ToyFin::Eps), ToyInf { fin: ToyFin::Eps, omega: false });
    }

    #[test]
    fn naive_gfp_keeps_finite_words() {
        let got = ToyDomain.naive_gfp(&ToyFin::Plus);
        assert_eq!(got, ToyInf { fin: ToyFin::Plus, omega: true });
    }
}
