//! Regular expressions over a fixed alphabet (union, concatenation, star),
//! used for intrinsic effects in configuration files and for rendering
//! languages in reports.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use super::BuchiDomain;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regex {
    Empty,
    Eps,
    Sym(usize),
    Cat(Vec<Regex>),
    Alt(BTreeSet<Regex>),
    Star(Box<Regex>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegexError {
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("unexpected `{0}`")]
    Unexpected(String),
    #[error("unexpected end of expression")]
    Eof,
}

impl Regex {
    pub fn cat(parts: impl IntoIterator<Item = Regex>) -> Regex {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Regex::Empty => return Regex::Empty,
                Regex::Eps => {}
                Regex::Cat(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Regex::Eps,
            1 => out.pop().unwrap(),
            _ => Regex::Cat(out),
        }
    }

    pub fn alt(parts: impl IntoIterator<Item = Regex>) -> Regex {
        let mut out = BTreeSet::new();
        for p in parts {
            match p {
                Regex::Empty => {}
                Regex::Alt(xs) => out.extend(xs),
                other => {
                    out.insert(other);
                }
            }
        }
        // ε | r* = r*
        if out.contains(&Regex::Eps) && out.iter().any(|r| matches!(r, Regex::Star(_))) {
            out.remove(&Regex::Eps);
        }
        match out.len() {
            0 => Regex::Empty,
            1 => out.into_iter().next().unwrap(),
            _ => Regex::Alt(out),
        }
    }

    pub fn star(r: Regex) -> Regex {
        match r {
            Regex::Empty | Regex::Eps => Regex::Eps,
            s @ Regex::Star(_) => s,
            other => Regex::Star(Box::new(other)),
        }
    }

    /// Parses `a b | c*` style expressions: juxtaposition concatenates,
    /// `|` separates alternatives, `*` is postfix; `eps` is the empty word.
    pub fn parse(text: &str, alphabet: &[String]) -> Result<Regex, RegexError> {
        let toks = tokenize(text);
        let mut p = RegexParser { toks, pos: 0, alphabet };
        let r = p.alt()?;
        match p.toks.get(p.pos) {
            None => Ok(r),
            Some(t) => Err(RegexError::Unexpected(t.clone())),
        }
    }

    pub fn to_domain<D: BuchiDomain>(&self, d: &D) -> D::Fin {
        match self {
            Regex::Empty => d.fin_bottom(),
            Regex::Eps => d.epsilon(),
            Regex::Sym(a) => d.event(*a),
            Regex::Cat(xs) => xs.iter().fold(d.epsilon(), |acc, x| d.concat(&acc, &x.to_domain(d))),
            Regex::Alt(xs) => xs.iter().fold(d.fin_bottom(), |acc, x| d.fin_join(&acc, &x.to_domain(d))),
            Regex::Star(x) => d.star(&x.to_domain(d)),
        }
    }

    pub fn nullable(&self) -> bool {
        match self {
            Regex::Empty | Regex::Sym(_) => false,
            Regex::Eps | Regex::Star(_) => true,
            Regex::Cat(xs) => xs.iter().all(Regex::nullable),
            Regex::Alt(xs) => xs.iter().any(Regex::nullable),
        }
    }

    /// Words of the language in shortlex order, at most `limit` of them and
    /// none longer than `max_len`.
    pub fn words(&self, letters: usize, max_len: usize, limit: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
        for len in 0..=max_len {
            for w in &layer {
                if out.len() >= limit {
                    return out;
                }
                if self.matches(w) {
                    out.push(w.clone());
                }
            }
            if len == max_len {
                break;
            }
            layer = layer
                .iter()
                .flat_map(|w| {
                    (0..letters).map(move |a| {
                        let mut v = w.clone();
                        v.push(a);
                        v
                    })
                })
                .collect();
        }
        out
    }

    pub fn matches(&self, w: &[usize]) -> bool {
        w.iter().fold(self.clone(), |r, &a| r.derive(a)).nullable()
    }

    /// Brzozowski derivative with respect to letter `a`.
    pub fn derive(&self, a: usize) -> Regex {
        match self {
            Regex::Empty | Regex::Eps => Regex::Empty,
            Regex::Sym(b) => {
                if *b == a {
                    Regex::Eps
                } else {
                    Regex::Empty
                }
            }
            Regex::Alt(xs) => Regex::alt(xs.iter().map(|x| x.derive(a))),
            Regex::Star(x) => Regex::cat([x.derive(a), self.clone()]),
            Regex::Cat(xs) => {
                let mut alts = Vec::new();
                for i in 0..xs.len() {
                    let rest = xs[i + 1..].iter().cloned();
                    alts.push(Regex::cat(std::iter::once(xs[i].derive(a)).chain(rest)));
                    if !xs[i].nullable() {
                        break;
                    }
                }
                Regex::alt(alts)
            }
        }
    }

    pub fn render(&self, alphabet: &[String]) -> String {
        let mut s = String::new();
        self.write(alphabet, 0, &mut s);
        s
    }

    // Precedence: 0 = alternation, 1 = concatenation, 2 = atom.
    fn write(&self, alphabet: &[String], ctx: u8, out: &mut String) {
        match self {
            Regex::Empty => out.push('∅'),
            Regex::Eps => out.push('ε'),
            Regex::Sym(a) => out.push_str(&alphabet[*a]),
            Regex::Star(x) => {
                x.write(alphabet, 2, out);
                out.push('*');
            }
            Regex::Cat(xs) => {
                if ctx > 1 {
                    out.push('(');
                }
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    x.write(alphabet, 2, out);
                }
                if ctx > 1 {
                    out.push(')');
                }
            }
            Regex::Alt(xs) => {
                if ctx > 0 {
                    out.push('(');
                }
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        let _ = write!(out, " | ");
                    }
                    x.write(alphabet, 1, out);
                }
                if ctx > 0 {
                    out.push(')');
                }
            }
        }
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut toks = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() || c == '_' {
            cur.push(c);
            continue;
        }
        if !cur.is_empty() {
            toks.push(std::mem::take(&mut cur));
        }
        if !c.is_whitespace() {
            toks.push(c.to_string());
        }
    }
    if !cur.is_empty() {
        toks.push(cur);
    }
    toks
}

struct RegexParser<'a> {
    toks: Vec<String>,
    pos: usize,
    alphabet: &'a [String],
}

impl RegexParser<'_> {
    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(String::as_str)
    }

    fn alt(&mut self) -> Result<Regex, RegexError> {
        let mut parts = vec![self.cat()?];
        while self.peek() == Some("|") {
            self.pos += 1;
            parts.push(self.cat()?);
        }
        Ok(Regex::alt(parts))
    }

    fn cat(&mut self) -> Result<Regex, RegexError> {
        let mut parts = Vec::new();
        while let Some(t) = self.peek() {
            if t == "|" || t == ")" {
                break;
            }
            parts.push(self.postfix()?);
        }
        if parts.is_empty() {
            return match self.peek() {
                Some(t) => Err(RegexError::Unexpected(t.to_string())),
                None => Err(RegexError::Eof),
            };
        }
        Ok(Regex::cat(parts))
    }

    fn postfix(&mut self) -> Result<Regex, RegexError> {
        let mut r = self.atom()?;
        while self.peek() == Some("*") {
            self.pos += 1;
            r = Regex::star(r);
        }
        Ok(r)
    }

    fn atom(&mut self) -> Result<Regex, RegexError> {
        let t = self.peek().ok_or(RegexError::Eof)?.to_string();
        self.pos += 1;
        match t.as_str() {
            "(" => {
                let r = self.alt()?;
                if self.peek() != Some(")") {
                    return Err(self.peek().map_or(RegexError::Eof, |t| RegexError::Unexpected(t.into())));
                }
                self.pos += 1;
                Ok(r)
            }
            "eps" | "ε" => Ok(Regex::Eps),
            name if name.chars().all(|c| c.is_alphanumeric() || c == '_') => self
                .alphabet
                .iter()
                .position(|a| a == name)
                .map(Regex::Sym)
                .ok_or_else(|| RegexError::UnknownEvent(name.to_string())),
            other => Err(RegexError::Unexpected(other.to_string())),
        }
    }
}
