//! Configured effects for methods whose bodies are not analyzed. One entry
//! per line:
//!
//! ```text
//! Server.verifyAuthorization() -> Unknown emits authcheck
//! Channel.send(_, Null) -> Null emits (send | eps) throws Unknown(IOError) fail
//! ```
//!
//! Argument patterns are `_`, `Null`, `Unknown` or `CreatedAt(l)`. The
//! return region is `Null` or `Unknown`; an optional `throws` clause names
//! the class of the exception object and the events emitted before it.

use thiserror::Error;

use super::{Region, Sig};
use crate::effect::regex::{Regex, RegexError};
use crate::fj::Program;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArgPat {
    Any,
    Null,
    CreatedAt(String),
}

impl ArgPat {
    /// Whether some value in region `r` can match the pattern.
    pub fn overlaps(&self, r: &Region) -> bool {
        match self {
            ArgPat::Any => true,
            ArgPat::Null => matches!(r, Region::Null | Region::Unknown),
            ArgPat::CreatedAt(l) => match r {
                Region::CreatedAt(k) => k == l,
                Region::Unknown => true,
                Region::Null => false,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RetRegion {
    Null,
    Unknown,
}

impl RetRegion {
    pub fn region(self) -> Region {
        match self {
            RetRegion::Null => Region::Null,
            RetRegion::Unknown => Region::Unknown,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntrinsicEntry {
    pub class: String,
    pub method: String,
    pub args: Vec<ArgPat>,
    pub ret: RetRegion,
    pub emits: Regex,
    /// Exception class and the events emitted before throwing.
    pub throws: Option<(String, Regex)>,
    pub line: usize,
}

impl IntrinsicEntry {
    pub fn matches_regions(&self, args: &[Region]) -> bool {
        self.args.len() == args.len() && self.args.iter().zip(args).all(|(p, r)| p.overlaps(r))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Regex { line: usize, source: RegexError },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Intrinsics {
    entries: Vec<IntrinsicEntry>,
}

impl Intrinsics {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[IntrinsicEntry] {
        &self.entries
    }

    pub fn parse(text: &str, alphabet: &[String]) -> Result<Self, ConfigError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            entries.push(parse_entry(body, line, alphabet)?);
        }
        Ok(Intrinsics { entries })
    }

    /// Checks entries against the program: the method must be declared in
    /// the named class with matching arity, and exception classes declared.
    pub fn validate(&self, p: &Program) -> Result<(), ConfigError> {
        for e in &self.entries {
            let err = |msg: String| Err(ConfigError::Line { line: e.line, msg });
            let Some(decl) = p.class(&e.class).and_then(|c| c.method(&e.method)) else {
                return err(format!("`{}` declares no method `{}`", e.class, e.method));
            };
            if decl.params.len() != e.args.len() {
                return err(format!("`{}.{}` takes {} arguments", e.class, e.method, decl.params.len()));
            }
            if let Some((exc, _)) = &e.throws {
                if !p.is_declared(exc) {
                    return err(format!("undeclared exception class `{exc}`"));
                }
            }
        }
        Ok(())
    }

    /// Whether `(class, method)` (a declaring class) is configured.
    pub fn is_intrinsic(&self, class: &str, method: &str) -> bool {
        self.entries.iter().any(|e| e.class == class && e.method == method)
    }

    /// Whether a signature dispatches to a configured method.
    pub fn covers(&self, p: &Program, sig: &Sig) -> bool {
        p.method_lookup(&sig.class, &sig.method).is_some_and(|(_, owner)| self.is_intrinsic(owner, &sig.method))
    }

    /// Entries of the declaring class `owner` that apply to `args`.
    pub fn matching(&self, owner: &str, method: &str, args: &[Region]) -> Vec<&IntrinsicEntry> {
        self.entries.iter().filter(|e| e.class == owner && e.method == method && e.matches_regions(args)).collect()
    }

    pub fn for_method(&self, owner: &str, method: &str) -> Vec<&IntrinsicEntry> {
        self.entries.iter().filter(|e| e.class == owner && e.method == method).collect()
    }
}

fn parse_entry(body: &str, line: usize, alphabet: &[String]) -> Result<IntrinsicEntry, ConfigError> {
    let err = |msg: &str| ConfigError::Line { line, msg: msg.to_string() };
    let (head, rest) = body.split_once("->").ok_or_else(|| err("expected `->`"))?;
    let head = head.trim();
    let open = head.find('(').ok_or_else(|| err("expected `(`"))?;
    let close = head.rfind(')').filter(|&c| c == head.len() - 1).ok_or_else(|| err("expected `)`"))?;
    let (class, method) = head[..open].split_once('.').ok_or_else(|| err("expected `Class.method`"))?;
    let ident = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '$');
    if !ident(class) || !ident(method) {
        return Err(err("malformed method name"));
    }
    let inner = head[open + 1..close].trim();
    let args = if inner.is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|a| match a.trim() {
                "_" | "Unknown" => Ok(ArgPat::Any),
                "Null" => Ok(ArgPat::Null),
                other => match Region::parse(other) {
                    Some(Region::CreatedAt(l)) => Ok(ArgPat::CreatedAt(l)),
                    _ => Err(err(&format!("bad argument pattern `{other}`"))),
                },
            })
            .collect::<Result<_, _>>()?
    };
    let rest = rest.trim();
    let (ret, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    let ret = match ret {
        "Null" => RetRegion::Null,
        "Unknown" => RetRegion::Unknown,
        other => return Err(err(&format!("return region must be Null or Unknown, found `{other}`"))),
    };
    let rest = rest.trim();
    let rest = rest.strip_prefix("emits").ok_or_else(|| err("expected `emits`"))?;
    let (emits_src, throws_src) = match find_word(rest, "throws") {
        Some(i) => (&rest[..i], Some(&rest[i + "throws".len()..])),
        None => (rest, None),
    };
    let regex = |s: &str| Regex::parse(s.trim(), alphabet).map_err(|source| ConfigError::Regex { line, source });
    let emits = regex(emits_src)?;
    let throws = match throws_src {
        None => None,
        Some(t) => {
            let t = t.trim();
            let t = t.strip_prefix("Unknown(").ok_or_else(|| err("expected `throws Unknown(Class)`"))?;
            let (exc, r) = t.split_once(')').ok_or_else(|| err("expected `)`"))?;
            if !ident(exc.trim()) {
                return Err(err("malformed exception class"));
            }
            Some((exc.trim().to_string(), regex(r)?))
        }
    };
    Ok(IntrinsicEntry { class: class.into(), method: method.into(), args, ret, emits, throws, line })
}

fn find_word(s: &str, w: &str) -> Option<usize> {
    s.match_indices(w).map(|(i, _)| i).find(|&i| {
        let before = s[..i].chars().next_back().is_none_or(char::is_whitespace);
        let after = s[i + w.len()..].chars().next().is_none_or(|c| c.is_whitespace());
        before && after
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma() -> Vec<String> {
        ["a", "b", "log"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_entries() {
        let cfg = "# stubs\nS.m() -> Unknown emits a b*\nS.n(_, Null, CreatedAt(f:1:2)) -> Null emits eps throws Unknown(E) log\n";
        let i = Intrinsics::parse(cfg, &sigma()).unwrap();
        assert_eq!(i.entries().len(), 2);
        let n = &i.entries()[1];
        assert_eq!(n.args, vec![ArgPat::Any, ArgPat::Null, ArgPat::CreatedAt("f:1:2".into())]);
        assert_eq!(n.ret, RetRegion::Null);
        assert_eq!(n.throws.as_ref().unwrap().0, "E");
        assert!(n.matches_regions(&[Region::Null, Region::Unknown, Region::CreatedAt("f:1:2".into())]));
        assert!(!n.matches_regions(&[Region::Null, Region::CreatedAt("x".into()), Region::Unknown]));
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "S.m() emits a",
            "S.m() -> Maybe emits a",
            "S.m() -> Null emits c",
            "S.m(Weird) -> Null emits a",
            "S.m() -> Null emits a throws E a",
        ] {
            assert!(Intrinsics::parse(bad, &sigma()).is_err(), "{bad}");
        }
    }
}
