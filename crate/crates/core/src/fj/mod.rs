//! The object language: a Featherweight Java core with labelled `new`,
//! `emit`, and exceptions, plus a Java-like surface syntax.

pub mod ast;
mod desugar;
mod lexer;
mod parser;
mod printer;
mod typeck;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

pub use ast::{ClassDecl, Expr, ExprKind, MethodDecl, Pos, Program, NULL_TYPE, OBJECT, THIS};
pub use printer::{print_expr, print_program};
pub use typeck::{fj_typecheck, TypeError};

use parser::{SClass, Parser};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{file}:{pos}: syntax error: {msg}")]
    Syntax { file: String, pos: Pos, msg: String },
    #[error("{file}:{pos}: {msg}")]
    Semantic { file: String, pos: Pos, msg: String },
}

/// Parses a single source with an inferred alphabet (events in order of
/// first occurrence).
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parse_sources(&[("<input>", text)], None)
}

/// Parses several source files into one program. With `alphabet` given,
/// emitting any other event is an error; otherwise the alphabet is inferred.
pub fn parse_sources(sources: &[(&str, &str)], alphabet: Option<&[String]>) -> Result<Program, ParseError> {
    let mut parsed: Vec<(String, SClass)> = Vec::new();
    for (file, text) in sources {
        let toks = lexer::lex(file, text)?;
        for c in Parser::new(file, toks).program()? {
            parsed.push((file.to_string(), c));
        }
    }
    let skeleton = build_hierarchy(&parsed)?;

    let strict = alphabet.is_some();
    let mut sigma: Vec<String> = alphabet.map(<[String]>::to_vec).unwrap_or_default();
    let mut labels = BTreeSet::new();
    let mut classes = skeleton.classes().to_vec();
    for (ci, (file, sc)) in parsed.iter().enumerate() {
        for (mi, sm) in sc.methods.iter().enumerate() {
            let mut lower = desugar::Lower::new(&skeleton, file, &sc.name, &mut sigma, strict, &mut labels);
            classes[ci].methods[mi].body = lower.method_body(&sm.params, &sm.body)?;
        }
    }
    Ok(Program::from_parts(classes, sigma))
}

/// Validates names and the class hierarchy, producing a program whose
/// method bodies are still placeholders.
fn build_hierarchy(parsed: &[(String, SClass)]) -> Result<Program, ParseError> {
    let sem = |file: &str, pos: Pos, msg: String| ParseError::Semantic { file: file.to_string(), pos, msg };
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, (file, c)) in parsed.iter().enumerate() {
        if c.name == OBJECT || c.name == NULL_TYPE {
            return Err(sem(file, c.pos, format!("`{}` cannot be declared", c.name)));
        }
        if seen.insert(&c.name, i).is_some() {
            return Err(sem(file, c.pos, format!("duplicate class `{}`", c.name)));
        }
    }
    for (file, c) in parsed {
        if let Some(s) = &c.superclass {
            if s != OBJECT && !seen.contains_key(s.as_str()) {
                return Err(sem(file, c.pos, format!("undeclared superclass `{s}`")));
            }
        }
        // Acyclicity: the chain from `c` must reach Object within |classes| steps.
        let mut cur = c.superclass.as_deref();
        let mut steps = 0;
        while let Some(s) = cur.filter(|s| *s != OBJECT) {
            steps += 1;
            if steps > parsed.len() {
                return Err(sem(file, c.pos, format!("cyclic inheritance involving `{}`", c.name)));
            }
            cur = parsed[seen[s]].1.superclass.as_deref();
        }
    }
    let known = |t: &str| t == OBJECT || seen.contains_key(t);
    let mut classes = Vec::new();
    for (file, c) in parsed {
        let mut fields = Vec::new();
        for (f, t, pos) in &c.fields {
            if !known(t) {
                return Err(sem(file, *pos, format!("undeclared class `{t}`")));
            }
            if fields.iter().any(|(g, _)| g == f) {
                return Err(sem(file, *pos, format!("duplicate field `{f}`")));
            }
            fields.push((f.clone(), t.clone()));
        }
        let mut methods: Vec<MethodDecl> = Vec::new();
        for m in &c.methods {
            if methods.iter().any(|d| d.name == m.name) {
                return Err(sem(file, m.pos, format!("duplicate method `{}`", m.name)));
            }
            for t in std::iter::once(&m.ret).chain(m.params.iter().map(|(t, _)| t)) {
                if !known(t) {
                    return Err(sem(file, m.pos, format!("undeclared class `{t}`")));
                }
            }
            let mut names = BTreeSet::new();
            for (_, x) in &m.params {
                if x == THIS || !names.insert(x) {
                    return Err(sem(file, m.pos, format!("bad parameter name `{x}`")));
                }
            }
            methods.push(MethodDecl {
                name: m.name.clone(),
                ret: m.ret.clone(),
                params: m.params.clone(),
                body: Expr::new(ExprKind::Null, m.pos),
                pos: m.pos,
            });
        }
        classes.push(ClassDecl {
            name: c.name.clone(),
            superclass: c.superclass.clone().unwrap_or_else(|| OBJECT.to_string()),
            fields,
            methods,
            file: file.clone(),
            pos: c.pos,
        });
    }
    let prog = Program::from_parts(classes, Vec::new());
    // Fields may not shadow inherited ones.
    for (file, c) in parsed {
        if let Some(s) = &c.superclass {
            for (f, _, pos) in &c.fields {
                if prog.field_type(s, f).is_some() {
                    return Err(sem(file, *pos, format!("field `{f}` redeclared")));
                }
            }
        }
    }
    Ok(prog)
}
