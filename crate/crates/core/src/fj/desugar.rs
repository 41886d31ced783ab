//! Lowering of surface statements to the expression core: statement
//! sequences and locals become lets, compound operands are bound to fresh
//! `$n` variables, and every receiver gets its static class attached.

use std::collections::BTreeSet;

use super::ast::{Expr, ExprKind, Pos, Program, NULL_TYPE, OBJECT, THIS};
use super::parser::{IfStmt, Init, SExpr, Stmt};
use super::ParseError;

pub(crate) struct Lower<'a> {
    pub prog: &'a Program,
    pub file: String,
    pub class: String,
    pub alphabet: &'a mut Vec<String>,
    pub strict_alphabet: bool,
    pub labels: &'a mut BTreeSet<String>,
    env: Vec<(String, String)>,
    fresh: usize,
}

type Bindings = Vec<(String, String, Expr)>;

impl<'a> Lower<'a> {
    pub fn new(
        prog: &'a Program,
        file: &str,
        class: &str,
        alphabet: &'a mut Vec<String>,
        strict_alphabet: bool,
        labels: &'a mut BTreeSet<String>,
    ) -> Self {
        Lower {
            prog,
            file: file.to_string(),
            class: class.to_string(),
            alphabet,
            strict_alphabet,
            labels,
            env: Vec::new(),
            fresh: 0,
        }
    }

    fn err<T>(&self, pos: Pos, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Semantic { file: self.file.clone(), pos, msg: msg.into() })
    }

    fn lookup(&self, x: &str) -> Option<&str> {
        self.env.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t.as_str())
    }

    fn fresh_var(&mut self) -> String {
        // `$$` keeps lowering-time names apart from printed `$n` binders.
        self.fresh += 1;
        format!("$${}", self.fresh - 1)
    }

    fn check_class(&self, c: &str, pos: Pos, allow_object: bool) -> Result<(), ParseError> {
        if self.prog.is_declared(c) || (allow_object && c == OBJECT) {
            Ok(())
        } else if c == NULL_TYPE || c == OBJECT {
            self.err(pos, format!("`{c}` cannot be used here"))
        } else {
            self.err(pos, format!("undeclared class `{c}`"))
        }
    }

    pub fn method_body(&mut self, params: &[(String, String)], body: &[Stmt]) -> Result<Expr, ParseError> {
        self.env = vec![(THIS.to_string(), self.class.clone())];
        self.env.extend(params.iter().map(|(t, x)| (x.clone(), t.clone())));
        let (e, _) = self.stmts(body, Pos::default())?;
        Ok(canonical_fresh(&e))
    }

    fn stmts(&mut self, stmts: &[Stmt], pos: Pos) -> Result<(Expr, String), ParseError> {
        let Some((first, rest)) = stmts.split_first() else {
            return Ok((Expr::new(ExprKind::Null, pos), NULL_TYPE.into()));
        };
        match first {
            Stmt::Decl { ty, var, init, pos } => {
                self.check_class(ty, *pos, true)?;
                if var == THIS {
                    return self.err(*pos, "cannot declare `this`");
                }
                let (binds, bound, _) = match init {
                    Init::Expr(e) => self.expr(e)?,
                    Init::If(s) => self.if_stmt(s)?,
                };
                self.env.push((var.clone(), ty.clone()));
                let body = if rest.is_empty() {
                    Ok((Expr::new(ExprKind::Var(var.clone()), *pos), ty.clone()))
                } else {
                    self.stmts(rest, *pos)
                };
                self.env.pop();
                let (body, bty) = body?;
                let kind =
                    ExprKind::Let { var: var.clone(), ty: Some(ty.clone()), bound: Box::new(bound), body: Box::new(body) };
                Ok((wrap(binds, Expr::new(kind, *pos)), bty))
            }
            Stmt::Return(e, pos) => {
                if !rest.is_empty() {
                    return self.err(*pos, "statements after `return`");
                }
                let (binds, e, ty) = self.expr(e)?;
                Ok((wrap(binds, e), ty))
            }
            other => {
                let (binds, e, ty) = self.simple(other)?;
                if rest.is_empty() {
                    return Ok((wrap(binds, e), ty));
                }
                let var = self.fresh_var();
                let pos = e.pos;
                let (body, bty) = self.stmts(rest, pos)?;
                let kind = ExprKind::Let { var, ty: None, bound: Box::new(e), body: Box::new(body) };
                Ok((wrap(binds, Expr::new(kind, pos)), bty))
            }
        }
    }

    /// Lowers a statement other than a declaration or `return`. Operand
    /// bindings are returned separately so they end up at statement level.
    fn simple(&mut self, s: &Stmt) -> Result<(Bindings, Expr, String), ParseError> {
        match s {
            Stmt::Emit(a, pos) => {
                if !self.alphabet.contains(a) {
                    if self.strict_alphabet {
                        return self.err(*pos, format!("event `{a}` is not in the alphabet"));
                    }
                    self.alphabet.push(a.clone());
                }
                Ok((Vec::new(), Expr::new(ExprKind::Emit(a.clone()), *pos), NULL_TYPE.into()))
            }
            Stmt::If(s) => self.if_stmt(s),
            Stmt::Throw(e, pos) => {
                let (binds, e, _) = self.expr(e)?;
                Ok((binds, Expr::new(ExprKind::Throw(Box::new(e)), *pos), NULL_TYPE.into()))
            }
            Stmt::Try { body, class, var, handler, pos } => {
                self.check_class(class, *pos, false)?;
                let (b, bty) = self.stmts(body, *pos)?;
                self.env.push((var.clone(), class.clone()));
                let h = self.stmts(handler, *pos);
                self.env.pop();
                let (h, hty) = h?;
                let kind =
                    ExprKind::Try { body: Box::new(b), class: class.clone(), var: var.clone(), handler: Box::new(h) };
                Ok((Vec::new(), Expr::new(kind, *pos), self.prog.join_class(&bty, &hty)))
            }
            Stmt::Expr(e) => self.expr(e),
            Stmt::Decl { .. } | Stmt::Return(..) => unreachable!("handled by stmts"),
        }
    }

    fn if_stmt(&mut self, s: &IfStmt) -> Result<(Bindings, Expr, String), ParseError> {
        let mut binds = Bindings::new();
        let (x, _) = self.atom(&s.lhs, &mut binds)?;
        let (y, _) = self.atom(&s.rhs, &mut binds)?;
        let (t, tty) = self.stmts(&s.then_branch, s.pos)?;
        let (e, ety) = self.stmts(&s.else_branch, s.pos)?;
        let kind = ExprKind::If { x, y, then_branch: Box::new(t), else_branch: Box::new(e) };
        Ok((binds, Expr::new(kind, s.pos), self.prog.join_class(&tty, &ety)))
    }

    /// Reduces `e` to a variable, binding it to a fresh one when needed.
    fn atom(&mut self, e: &SExpr, binds: &mut Bindings) -> Result<(String, String), ParseError> {
        if let SExpr::Name(x, _) = e {
            if let Some(t) = self.lookup(x) {
                return Ok((x.clone(), t.to_string()));
            }
        }
        let (core, ty) = self.expr_with(e, binds)?;
        let ty = if ty == NULL_TYPE { OBJECT.to_string() } else { ty };
        let var = self.fresh_var();
        binds.push((var.clone(), ty.clone(), core));
        Ok((var, ty))
    }

    fn expr(&mut self, e: &SExpr) -> Result<(Bindings, Expr, String), ParseError> {
        let mut binds = Bindings::new();
        let (core, ty) = self.expr_with(e, &mut binds)?;
        Ok((binds, core, ty))
    }

    fn expr_with(&mut self, e: &SExpr, binds: &mut Bindings) -> Result<(Expr, String), ParseError> {
        let pos = e.pos();
        let mk = |k| Expr::new(k, pos);
        match e {
            SExpr::Name(x, _) => {
                if let Some(t) = self.lookup(x) {
                    return Ok((mk(ExprKind::Var(x.clone())), t.to_string()));
                }
                match self.prog.field_type(&self.class, x) {
                    Some(ft) => {
                        let k = ExprKind::Get { recv: THIS.into(), class: self.class.clone(), field: x.clone() };
                        Ok((mk(k), ft))
                    }
                    None => self.err(pos, format!("undeclared variable `{x}`")),
                }
            }
            SExpr::Null(_) => Ok((mk(ExprKind::Null), NULL_TYPE.into())),
            SExpr::New { label, class, .. } => {
                self.check_class(class, pos, false)?;
                let label = match label {
                    Some(l) => l.clone(),
                    None => format!("{}:{}:{}", self.file, pos.line, pos.col),
                };
                if !self.labels.insert(label.clone()) {
                    return self.err(pos, format!("duplicate label `{label}`"));
                }
                Ok((mk(ExprKind::New { label, class: class.clone() }), class.clone()))
            }
            SExpr::Cast { class, expr, .. } => {
                self.check_class(class, pos, true)?;
                let (inner, _) = self.expr_with(expr, binds)?;
                Ok((mk(ExprKind::Cast { class: class.clone(), expr: Box::new(inner) }), class.clone()))
            }
            SExpr::Field { recv, field, .. } => {
                let (r, rty) = self.atom(recv, binds)?;
                let ft = self.field_of(&rty, field, pos)?;
                Ok((mk(ExprKind::Get { recv: r, class: rty, field: field.clone() }), ft))
            }
            SExpr::Assign { recv, field, value, .. } => {
                let (r, rty) = self.atom(recv, binds)?;
                self.field_of(&rty, field, pos)?;
                let (v, vty) = self.atom(value, binds)?;
                Ok((mk(ExprKind::Set { recv: r, class: rty, field: field.clone(), value: v }), vty))
            }
            SExpr::Call { recv, method, args, .. } => {
                let (r, rty) = self.atom(recv, binds)?;
                let ret = match self.prog.method_lookup(&rty, method) {
                    Some((d, _)) => d.ret.clone(),
                    None => return self.err(pos, format!("class `{rty}` has no method `{method}`")),
                };
                let mut vars = Vec::new();
                for a in args {
                    vars.push(self.atom(a, binds)?.0);
                }
                let k = ExprKind::Call { recv: r, class: rty, method: method.clone(), args: vars };
                Ok((mk(k), ret))
            }
        }
    }

    fn field_of(&self, class: &str, field: &str, pos: Pos) -> Result<String, ParseError> {
        match self.prog.field_type(class, field) {
            Some(t) => Ok(t),
            None => self.err(pos, format!("class `{class}` has no field `{field}`")),
        }
    }
}

fn wrap(binds: Bindings, body: Expr) -> Expr {
    binds.into_iter().rev().fold(body, |acc, (var, ty, bound)| {
        let pos = bound.pos;
        Expr::new(ExprKind::Let { var, ty: Some(ty), bound: Box::new(bound), body: Box::new(acc) }, pos)
    })
}

/// Renumbers every `$`-binder in pre-order so that equal programs lower to
/// equal trees regardless of which binders were written out in the source.
pub fn canonical_fresh(e: &Expr) -> Expr {
    let mut next = 0;
    rename(e, &mut Vec::new(), &mut next)
}

fn rename(e: &Expr, scope: &mut Vec<(String, String)>, next: &mut usize) -> Expr {
    let sub = |x: &String, scope: &Vec<(String, String)>| {
        scope.iter().rev().find(|(o, _)| o == x).map_or_else(|| x.clone(), |(_, n)| n.clone())
    };
    let bind = |x: &String, next: &mut usize| {
        if x.starts_with('$') {
            *next += 1;
            format!("${}", *next - 1)
        } else {
            x.clone()
        }
    };
    let kind = match &e.kind {
        ExprKind::Var(x) => ExprKind::Var(sub(x, scope)),
        ExprKind::Let { var, ty, bound, body } => {
            let nv = bind(var, next);
            let b = rename(bound, scope, next);
            scope.push((var.clone(), nv.clone()));
            let body = rename(body, scope, next);
            scope.pop();
            ExprKind::Let { var: nv, ty: ty.clone(), bound: Box::new(b), body: Box::new(body) }
        }
        ExprKind::If { x, y, then_branch, else_branch } => ExprKind::If {
            x: sub(x, scope),
            y: sub(y, scope),
            then_branch: Box::new(rename(then_branch, scope, next)),
            else_branch: Box::new(rename(else_branch, scope, next)),
        },
        ExprKind::Cast { class, expr } => {
            ExprKind::Cast { class: class.clone(), expr: Box::new(rename(expr, scope, next)) }
        }
        ExprKind::Call { recv, class, method, args } => ExprKind::Call {
            recv: sub(recv, scope),
            class: class.clone(),
            method: method.clone(),
            args: args.iter().map(|a| sub(a, scope)).collect(),
        },
        ExprKind::Get { recv, class, field } => {
            ExprKind::Get { recv: sub(recv, scope), class: class.clone(), field: field.clone() }
        }
        ExprKind::Set { recv, class, field, value } => ExprKind::Set {
            recv: sub(recv, scope),
            class: class.clone(),
            field: field.clone(),
            value: sub(value, scope),
        },
        ExprKind::Throw(x) => ExprKind::Throw(Box::new(rename(x, scope, next))),
        ExprKind::Try { body, class, var, handler } => {
            let b = rename(body, scope, next);
            let nv = bind(var, next);
            scope.push((var.clone(), nv.clone()));
            let h = rename(handler, scope, next);
            scope.pop();
            ExprKind::Try { body: Box::new(b), class: class.clone(), var: nv, handler: Box::new(h) }
        }
        k @ (ExprKind::Null | ExprKind::New { .. } | ExprKind::Emit(_)) => k.clone(),
    };
    Expr::new(kind, e.pos)
}
