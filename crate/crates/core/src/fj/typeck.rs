//! Standard FJ well-typedness: nominal subtyping, `null` at `NullType`,
//! invariant overriding. `throw` is typed at `NullType` so it fits anywhere.

use std::fmt;

use super::ast::{ClassDecl, Expr, ExprKind, MethodDecl, Pos, Program, NULL_TYPE, OBJECT, THIS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub file: String,
    pub class: String,
    pub method: Option<String>,
    pub pos: Pos,
    pub msg: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.method {
            Some(m) => write!(f, "{}:{}: in {}.{}: {}", self.file, self.pos, self.class, m, self.msg),
            None => write!(f, "{}:{}: in {}: {}", self.file, self.pos, self.class, self.msg),
        }
    }
}

impl std::error::Error for TypeError {}

pub fn fj_typecheck(p: &Program) -> Result<(), Vec<TypeError>> {
    let mut errors = Vec::new();
    for c in p.classes() {
        check_override(p, c, &mut errors);
        for m in &c.methods {
            let mut cx = Checker { p, class: c, method: m, env: Vec::new(), errors: &mut errors };
            cx.env.push((THIS.to_string(), c.name.clone()));
            cx.env.extend(m.params.iter().map(|(t, x)| (x.clone(), t.clone())));
            if let Some(t) = cx.ty(&m.body) {
                if !p.preceq(&t, &m.ret) {
                    cx.error(m.body.pos, format!("body has type `{t}`, expected `{}`", m.ret));
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn check_override(p: &Program, c: &ClassDecl, errors: &mut Vec<TypeError>) {
    if c.superclass == OBJECT {
        return;
    }
    for m in &c.methods {
        if let Some((sup, owner)) = p.method_lookup(&c.superclass, &m.name) {
            let ps: Vec<&String> = m.params.iter().map(|(t, _)| t).collect();
            let qs: Vec<&String> = sup.params.iter().map(|(t, _)| t).collect();
            if ps != qs || m.ret != sup.ret {
                errors.push(TypeError {
                    file: c.file.clone(),
                    class: c.name.clone(),
                    method: Some(m.name.clone()),
                    pos: m.pos,
                    msg: format!("override of `{owner}.{}` changes its signature", m.name),
                });
            }
        }
    }
}

struct Checker<'a> {
    p: &'a Program,
    class: &'a ClassDecl,
    method: &'a MethodDecl,
    env: Vec<(String, String)>,
    errors: &'a mut Vec<TypeError>,
}

impl Checker<'_> {
    fn error(&mut self, pos: Pos, msg: String) {
        self.errors.push(TypeError {
            file: self.class.file.clone(),
            class: self.class.name.clone(),
            method: Some(self.method.name.clone()),
            pos,
            msg,
        });
    }

    fn var(&mut self, x: &str, pos: Pos) -> Option<String> {
        let t = self.env.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t.clone());
        if t.is_none() {
            self.error(pos, format!("unbound variable `{x}`"));
        }
        t
    }

    fn class_ok(&mut self, c: &str, pos: Pos, allow_object: bool) -> bool {
        let ok = self.p.is_declared(c) || (allow_object && c == OBJECT);
        if !ok {
            self.error(pos, format!("class `{c}` is not allowed here"));
        }
        ok
    }

    /// Receiver annotation must agree with the receiver's static class.
    fn receiver(&mut self, x: &str, annot: &str, pos: Pos) -> bool {
        match self.var(x, pos) {
            Some(t) if t == annot && self.p.is_declared(annot) => true,
            Some(t) => {
                self.error(pos, format!("receiver `{x}` has type `{t}` but is annotated `{annot}`"));
                false
            }
            None => false,
        }
    }

    fn bind<T>(&mut self, x: &str, t: String, f: impl FnOnce(&mut Self) -> T) -> T {
        self.env.push((x.to_string(), t));
        let r = f(self);
        self.env.pop();
        r
    }

    fn ty(&mut self, e: &Expr) -> Option<String> {
        let pos = e.pos;
        match &e.kind {
            ExprKind::Var(x) => self.var(x, pos),
            ExprKind::Let { var, ty, bound, body } => {
                let t1 = self.ty(bound);
                let decl = match ty {
                    Some(d) => {
                        if !self.class_ok(d, pos, true) {
                            return None;
                        }
                        if let Some(t1) = &t1 {
                            if !self.p.preceq(t1, d) {
                                self.error(pos, format!("`{var}` declared `{d}` but bound to `{t1}`"));
                            }
                        }
                        d.clone()
                    }
                    None => t1.unwrap_or_else(|| OBJECT.to_string()),
                };
                self.bind(var, decl, |cx| cx.ty(body))
            }
            ExprKind::If { x, y, then_branch, else_branch } => {
                self.var(x, pos);
                self.var(y, pos);
                let t = self.ty(then_branch);
                let u = self.ty(else_branch);
                Some(self.p.join_class(&t?, &u?))
            }
            ExprKind::Null | ExprKind::Emit(_) => {
                if let ExprKind::Emit(a) = &e.kind {
                    if self.p.event_index(a).is_none() {
                        self.error(pos, format!("event `{a}` is not in the alphabet"));
                    }
                }
                Some(NULL_TYPE.into())
            }
            ExprKind::New { class, .. } => self.class_ok(class, pos, false).then(|| class.clone()),
            ExprKind::Cast { class, expr } => {
                self.ty(expr);
                self.class_ok(class, pos, true).then(|| class.clone())
            }
            ExprKind::Call { recv, class, method, args } => {
                let arg_tys: Vec<Option<String>> = args.iter().map(|a| self.var(a, pos)).collect();
                if !self.receiver(recv, class, pos) {
                    return None;
                }
                let Some((decl, _)) = self.p.method_lookup(class, method) else {
                    self.error(pos, format!("class `{class}` has no method `{method}`"));
                    return None;
                };
                if decl.params.len() != args.len() {
                    self.error(pos, format!("`{method}` expects {} arguments, got {}", decl.params.len(), args.len()));
                } else {
                    for ((pt, _), at) in decl.params.iter().zip(arg_tys) {
                        if let Some(at) = at {
                            if !self.p.preceq(&at, pt) {
                                self.error(pos, format!("argument of type `{at}` where `{pt}` expected"));
                            }
                        }
                    }
                }
                Some(decl.ret.clone())
            }
            ExprKind::Get { recv, class, field } => {
                if !self.receiver(recv, class, pos) {
                    return None;
                }
                let ft = self.p.field_type(class, field);
                if ft.is_none() {
                    self.error(pos, format!("class `{class}` has no field `{field}`"));
                }
                ft
            }
            ExprKind::Set { recv, class, field, value } => {
                let vt = self.var(value, pos);
                if !self.receiver(recv, class, pos) {
                    return None;
                }
                match (self.p.field_type(class, field), &vt) {
                    (None, _) => self.error(pos, format!("class `{class}` has no field `{field}`")),
                    (Some(ft), Some(v)) if !self.p.preceq(v, &ft) => {
                        self.error(pos, format!("assigning `{v}` to field `{field}` of type `{ft}`"))
                    }
                    _ => {}
                }
                vt
            }
            ExprKind::Throw(x) => {
                self.ty(x);
                Some(NULL_TYPE.into())
            }
            ExprKind::Try { body, class, var, handler } => {
                let t = self.ty(body);
                if !self.class_ok(class, pos, false) {
                    return None;
                }
                let u = self.bind(var, class.clone(), |cx| cx.ty(handler));
                Some(self.p.join_class(&t?, &u?))
            }
        }
    }
}
