//! Recursive-descent parser for the Java-like surface syntax. Produces a
//! surface tree that `desugar` lowers to the expression core.

use super::ast::Pos;
use super::lexer::{Tok, Token};
use super::ParseError;

#[derive(Clone, Debug)]
pub enum SExpr {
    Name(String, Pos),
    Null(Pos),
    New { label: Option<String>, class: String, pos: Pos },
    Cast { class: String, expr: Box<SExpr>, pos: Pos },
    Field { recv: Box<SExpr>, field: String, pos: Pos },
    Assign { recv: Box<SExpr>, field: String, value: Box<SExpr>, pos: Pos },
    Call { recv: Box<SExpr>, method: String, args: Vec<SExpr>, pos: Pos },
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Name(_, p) | SExpr::Null(p) => *p,
            SExpr::New { pos, .. }
            | SExpr::Cast { pos, .. }
            | SExpr::Field { pos, .. }
            | SExpr::Assign { pos, .. }
            | SExpr::Call { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Init {
    Expr(SExpr),
    If(Box<IfStmt>),
}

#[derive(Clone, Debug)]
pub struct IfStmt {
    pub lhs: SExpr,
    pub rhs: SExpr,
    pub then_branch: Vec<Stmt>,
    pub else_branch: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum Stmt {
    Decl { ty: String, var: String, init: Init, pos: Pos },
    Emit(String, Pos),
    Return(SExpr, Pos),
    If(IfStmt),
    Throw(SExpr, Pos),
    Try { body: Vec<Stmt>, class: String, var: String, handler: Vec<Stmt>, pos: Pos },
    Expr(SExpr),
}

#[derive(Clone, Debug)]
pub struct SMethod {
    pub ret: String,
    pub name: String,
    pub params: Vec<(String, String)>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct SClass {
    pub name: String,
    pub superclass: Option<String>,
    pub fields: Vec<(String, String, Pos)>,
    pub methods: Vec<SMethod>,
    pub pos: Pos,
}

const KEYWORDS: [&str; 11] =
    ["class", "extends", "emit", "return", "if", "else", "new", "null", "throw", "try", "catch"];

pub struct Parser<'a> {
    toks: Vec<Token>,
    at: usize,
    file: &'a str,
}

impl<'a> Parser<'a> {
    pub fn new(file: &'a str, toks: Vec<Token>) -> Self {
        Parser { toks, at: 0, file }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { file: self.file.to_string(), pos: self.pos(), msg: msg.into() })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Label(s) => format!("label `[{s}]`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn expect(&mut self, p: &str) -> Result<(), ParseError> {
        if self.is_punct(p) {
            self.advance();
            Ok(())
        } else {
            self.error(format!("expected `{p}`, found {}", self.describe()))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), ParseError> {
        if self.is_kw(k) {
            self.advance();
            Ok(())
        } else {
            self.error(format!("expected `{k}`, found {}", self.describe()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.error(format!("expected identifier, found {}", self.describe())),
        }
    }

    fn peek_ident(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
    }

    pub fn program(&mut self) -> Result<Vec<SClass>, ParseError> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            out.push(self.class()?);
        }
        Ok(out)
    }

    fn class(&mut self) -> Result<SClass, ParseError> {
        let pos = self.pos();
        self.expect_kw("class")?;
        let name = self.ident()?;
        let superclass = if self.is_kw("extends") {
            self.advance();
            Some(self.ident()?)
        } else {
            None
        };
        self.expect("{")?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        while !self.is_punct("}") {
            let mpos = self.pos();
            let ty = self.ident()?;
            let name = self.ident()?;
            if self.is_punct(";") {
                self.advance();
                fields.push((name, ty, mpos));
                continue;
            }
            self.expect("(")?;
            let mut params = Vec::new();
            if !self.is_punct(")") {
                loop {
                    let pty = self.ident()?;
                    let pname = self.ident()?;
                    params.push((pty, pname));
                    if !self.is_punct(",") {
                        break;
                    }
                    self.advance();
                }
            }
            self.expect(")")?;
            let body = self.block()?;
            methods.push(SMethod { ret: ty, name, params, body, pos: mpos });
        }
        self.expect("}")?;
        Ok(SClass { name, superclass, fields, methods, pos })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect("{")?;
        let mut out = Vec::new();
        while !self.is_punct("}") {
            out.push(self.stmt()?);
        }
        self.expect("}")?;
        Ok(out)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let pos = self.pos();
        if self.is_kw("emit") {
            self.advance();
            let parens = self.is_punct("(");
            if parens {
                self.advance();
            }
            let a = self.ident()?;
            if parens {
                self.expect(")")?;
            }
            self.expect(";")?;
            return Ok(Stmt::Emit(a, pos));
        }
        if self.is_kw("return") {
            self.advance();
            let e = self.expr()?;
            self.expect(";")?;
            return Ok(Stmt::Return(e, pos));
        }
        if self.is_kw("if") {
            return Ok(Stmt::If(self.if_stmt()?));
        }
        if self.is_kw("throw") {
            self.advance();
            let e = self.expr()?;
            self.expect(";")?;
            return Ok(Stmt::Throw(e, pos));
        }
        if self.is_kw("try") {
            self.advance();
            let body = self.block()?;
            self.expect_kw("catch")?;
            self.expect("(")?;
            let class = self.ident()?;
            let var = self.ident()?;
            self.expect(")")?;
            let handler = self.block()?;
            return Ok(Stmt::Try { body, class, var, handler, pos });
        }
        if self.peek_ident(0) && self.peek_ident(1) && matches!(self.peek_at(2), Tok::Punct("=")) {
            let ty = self.ident()?;
            let var = self.ident()?;
            self.expect("=")?;
            let init = if self.is_kw("if") {
                let s = self.if_stmt()?;
                Init::If(Box::new(s))
            } else {
                Init::Expr(self.expr()?)
            };
            self.expect(";")?;
            return Ok(Stmt::Decl { ty, var, init, pos });
        }
        let e = self.expr()?;
        self.expect(";")?;
        Ok(Stmt::Expr(e))
    }

    fn if_stmt(&mut self) -> Result<IfStmt, ParseError> {
        let pos = self.pos();
        self.expect_kw("if")?;
        self.expect("(")?;
        let lhs = self.expr()?;
        self.expect("==")?;
        let rhs = self.expr()?;
        self.expect(")")?;
        let then_branch = self.block()?;
        self.expect_kw("else")?;
        let else_branch = if self.is_kw("if") { vec![Stmt::If(self.if_stmt()?)] } else { self.block()? };
        Ok(IfStmt { lhs, rhs, then_branch, else_branch, pos })
    }

    fn expr(&mut self) -> Result<SExpr, ParseError> {
        let pos = self.pos();
        // `(C) e` is a cast when the parenthesis holds a single identifier.
        if self.is_punct("(") && self.peek_ident(1) && matches!(self.peek_at(2), Tok::Punct(")")) {
            self.advance();
            let class = self.ident()?;
            self.expect(")")?;
            let e = self.expr()?;
            return Ok(SExpr::Cast { class, expr: Box::new(e), pos });
        }
        let mut e = self.primary()?;
        while self.is_punct(".") {
            self.advance();
            let mpos = self.pos();
            let name = self.ident()?;
            if self.is_punct("(") {
                self.advance();
                let mut args = Vec::new();
                if !self.is_punct(")") {
                    loop {
                        args.push(self.expr()?);
                        if !self.is_punct(",") {
                            break;
                        }
                        self.advance();
                    }
                }
                self.expect(")")?;
                e = SExpr::Call { recv: Box::new(e), method: name, args, pos: mpos };
            } else if self.is_punct("=") {
                self.advance();
                let v = self.expr()?;
                return Ok(SExpr::Assign { recv: Box::new(e), field: name, value: Box::new(v), pos: mpos });
            } else {
                e = SExpr::Field { recv: Box::new(e), field: name, pos: mpos };
            }
        }
        if self.is_punct("=") {
            // `f = e` on an implicit `this` field.
            if let SExpr::Name(f, p) = e {
                self.advance();
                let v = self.expr()?;
                let this = SExpr::Name(super::ast::THIS.into(), p);
                return Ok(SExpr::Assign { recv: Box::new(this), field: f, value: Box::new(v), pos: p });
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<SExpr, ParseError> {
        let pos = self.pos();
        if self.is_kw("null") {
            self.advance();
            return Ok(SExpr::Null(pos));
        }
        if self.is_kw("new") {
            self.advance();
            let label = match self.peek() {
                Tok::Label(l) => {
                    let l = l.clone();
                    self.advance();
                    Some(l)
                }
                _ => None,
            };
            let class = self.ident()?;
            self.expect("(")?;
            self.expect(")")?;
            return Ok(SExpr::New { label, class, pos });
        }
        if self.is_punct("(") {
            self.advance();
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        let name = self.ident()?;
        Ok(SExpr::Name(name, pos))
    }
}
