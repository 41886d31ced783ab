//! Pretty-printer back to the surface syntax. Labels are always written
//! explicitly so that a printed program reparses to the same tree.

use std::fmt::Write as _;

use super::ast::{Expr, ExprKind, Program, OBJECT};

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for (i, c) in p.classes().iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = write!(out, "class {}", c.name);
        if c.superclass != OBJECT {
            let _ = write!(out, " extends {}", c.superclass);
        }
        out.push_str(" {\n");
        for (f, t) in &c.fields {
            let _ = writeln!(out, "    {t} {f};");
        }
        for m in &c.methods {
            let params: Vec<String> = m.params.iter().map(|(t, x)| format!("{t} {x}")).collect();
            let _ = writeln!(out, "    {} {}({}) {{", m.ret, m.name, params.join(", "));
            block(&m.body, 2, &mut out);
            out.push_str("    }\n");
        }
        out.push_str("}\n");
    }
    out
}

/// Renders a core expression. Expressions produced by the parser come out
/// in surface form; other shapes fall back to `let … in …` notation.
pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    expr(e, &mut s);
    s
}

fn indent(n: usize, out: &mut String) {
    for _ in 0..n {
        out.push_str("    ");
    }
}

fn block(e: &Expr, depth: usize, out: &mut String) {
    let mut cur = e;
    loop {
        match &cur.kind {
            ExprKind::Let { var, ty: Some(ty), bound, body } => {
                indent(depth, out);
                let _ = write!(out, "{ty} {var} = ");
                if let ExprKind::If { .. } = bound.kind {
                    if_stmt(bound, depth, out);
                    out.push_str(";\n");
                } else {
                    expr(bound, out);
                    out.push_str(";\n");
                }
                if matches!(&body.kind, ExprKind::Var(x) if x == var) {
                    return;
                }
                cur = body;
            }
            ExprKind::Let { ty: None, bound, body, .. } => {
                stmt(bound, depth, false, out);
                cur = body;
            }
            _ => {
                stmt(cur, depth, true, out);
                return;
            }
        }
    }
}

fn stmt(e: &Expr, depth: usize, last: bool, out: &mut String) {
    indent(depth, out);
    match &e.kind {
        ExprKind::Emit(a) => {
            let _ = writeln!(out, "emit {a};");
        }
        ExprKind::If { .. } => {
            if_stmt(e, depth, out);
            out.push('\n');
        }
        ExprKind::Throw(x) => {
            out.push_str("throw ");
            expr(x, out);
            out.push_str(";\n");
        }
        ExprKind::Try { body, class, var, handler } => {
            out.push_str("try {\n");
            block(body, depth + 1, out);
            indent(depth, out);
            let _ = writeln!(out, "}} catch ({class} {var}) {{");
            block(handler, depth + 1, out);
            indent(depth, out);
            out.push_str("}\n");
        }
        _ => {
            if last {
                out.push_str("return ");
            }
            expr(e, out);
            out.push_str(";\n");
        }
    }
}

fn if_stmt(e: &Expr, depth: usize, out: &mut String) {
    let ExprKind::If { x, y, then_branch, else_branch } = &e.kind else { unreachable!() };
    let _ = writeln!(out, "if ({x} == {y}) {{");
    block(then_branch, depth + 1, out);
    indent(depth, out);
    out.push_str("} else {\n");
    block(else_branch, depth + 1, out);
    indent(depth, out);
    out.push('}');
}

fn expr(e: &Expr, out: &mut String) {
    match &e.kind {
        ExprKind::Var(x) => out.push_str(x),
        ExprKind::Null => out.push_str("null"),
        ExprKind::New { label, class } => {
            let _ = write!(out, "new[{label}] {class}()");
        }
        ExprKind::Cast { class, expr: inner } => {
            let _ = write!(out, "({class}) ");
            expr(inner, out);
        }
        ExprKind::Get { recv, field, .. } => {
            let _ = write!(out, "{recv}.{field}");
        }
        ExprKind::Set { recv, field, value, .. } => {
            let _ = write!(out, "{recv}.{field} = {value}");
        }
        ExprKind::Call { recv, method, args, .. } => {
            let _ = write!(out, "{recv}.{method}({})", args.join(", "));
        }
        ExprKind::Emit(a) => {
            let _ = write!(out, "emit({a})");
        }
        ExprKind::Let { var, bound, body, .. } => {
            let _ = write!(out, "let {var} = ");
            expr(bound, out);
            out.push_str(" in ");
            expr(body, out);
        }
        ExprKind::If { x, y, then_branch, else_branch } => {
            let _ = write!(out, "if {x} == {y} then ");
            expr(then_branch, out);
            out.push_str(" else ");
            expr(else_branch, out);
        }
        ExprKind::Throw(x) => {
            out.push_str("throw ");
            expr(x, out);
        }
        ExprKind::Try { body, class, var, handler } => {
            out.push_str("try ");
            expr(body, out);
            let _ = write!(out, " catch ({class} {var}) ");
            expr(handler, out);
        }
    }
}
