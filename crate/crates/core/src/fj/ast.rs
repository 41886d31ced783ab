use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub const OBJECT: &str = "Object";
pub const NULL_TYPE: &str = "NullType";
pub const THIS: &str = "this";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Core expression. Positions are carried for diagnostics only and do not
/// take part in equality.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Var(String),
    /// `let x = bound in body`; `ty` is the declared class of a source-level
    /// local, `None` for the unused variable of statement sequencing.
    Let { var: String, ty: Option<String>, bound: Box<Expr>, body: Box<Expr> },
    If { x: String, y: String, then_branch: Box<Expr>, else_branch: Box<Expr> },
    Null,
    New { label: String, class: String },
    Cast { class: String, expr: Box<Expr> },
    Emit(String),
    /// `recv^class.method(args)`
    Call { recv: String, class: String, method: String, args: Vec<String> },
    Get { recv: String, class: String, field: String },
    Set { recv: String, class: String, field: String, value: String },
    Throw(Box<Expr>),
    Try { body: Box<Expr>, class: String, var: String, handler: Box<Expr> },
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    /// Expression with a default position, for programmatic construction.
    pub fn mk(kind: ExprKind) -> Self {
        Expr { kind, pos: Pos::default() }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Let { bound, body, .. } => vec![bound, body],
            ExprKind::If { then_branch, else_branch, .. } => vec![then_branch, else_branch],
            ExprKind::Cast { expr, .. } | ExprKind::Throw(expr) => vec![expr],
            ExprKind::Try { body, handler, .. } => vec![body, handler],
            _ => Vec::new(),
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut use_var = |x: &String, bound: &Vec<String>| {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        };
        match &self.kind {
            ExprKind::Var(x) => use_var(x, bound),
            ExprKind::Let { var, bound: b, body, .. } => {
                b.collect_free(bound, out);
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            ExprKind::If { x, y, then_branch, else_branch } => {
                use_var(x, bound);
                use_var(y, bound);
                then_branch.collect_free(bound, out);
                else_branch.collect_free(bound, out);
            }
            ExprKind::Null | ExprKind::New { .. } | ExprKind::Emit(_) => {}
            ExprKind::Cast { expr, .. } | ExprKind::Throw(expr) => expr.collect_free(bound, out),
            ExprKind::Call { recv, args, .. } => {
                use_var(recv, bound);
                for a in args {
                    use_var(a, bound);
                }
            }
            ExprKind::Get { recv, .. } => use_var(recv, bound),
            ExprKind::Set { recv, value, .. } => {
                use_var(recv, bound);
                use_var(value, bound);
            }
            ExprKind::Try { body, var, handler, .. } => {
                body.collect_free(bound, out);
                bound.push(var.clone());
                handler.collect_free(bound, out);
                bound.pop();
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct MethodDecl {
    pub name: String,
    pub ret: String,
    /// (declared class, parameter name)
    pub params: Vec<(String, String)>,
    pub body: Expr,
    pub pos: Pos,
}

impl PartialEq for MethodDecl {
    fn eq(&self, o: &Self) -> bool {
        (&self.name, &self.ret, &self.params, &self.body) == (&o.name, &o.ret, &o.params, &o.body)
    }
}

impl Eq for MethodDecl {}

impl MethodDecl {
    pub fn param_names(&self) -> Vec<String> {
        self.params.iter().map(|(_, x)| x.clone()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ClassDecl {
    pub name: String,
    pub superclass: String,
    /// (field name, declared class), own fields only.
    pub fields: Vec<(String, String)>,
    pub methods: Vec<MethodDecl>,
    pub file: String,
    pub pos: Pos,
}

impl PartialEq for ClassDecl {
    fn eq(&self, o: &Self) -> bool {
        (&self.name, &self.superclass, &self.fields, &self.methods, &self.file)
            == (&o.name, &o.superclass, &o.fields, &o.methods, &o.file)
    }
}

impl Eq for ClassDecl {}

impl ClassDecl {
    pub fn method(&self, m: &str) -> Option<&MethodDecl> {
        self.methods.iter().find(|d| d.name == m)
    }
}

/// A parsed program. Construct through `parse_program` or `Program::new`,
/// which validate the class hierarchy.
#[derive(Clone, Debug)]
pub struct Program {
    classes: Vec<ClassDecl>,
    alphabet: Vec<String>,
    index: HashMap<String, usize>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.classes == other.classes && self.alphabet == other.alphabet
    }
}

impl Eq for Program {}

impl Program {
    /// Assumes the hierarchy was validated by the caller.
    pub(crate) fn from_parts(classes: Vec<ClassDecl>, alphabet: Vec<String>) -> Self {
        let index = classes.iter().enumerate().map(|(i, c)| (c.name.clone(), i)).collect();
        Program { classes, alphabet, index }
    }

    pub fn classes(&self) -> &[ClassDecl] {
        &self.classes
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn event_index(&self, e: &str) -> Option<usize> {
        self.alphabet.iter().position(|a| a == e)
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.index.get(name).map(|&i| &self.classes[i])
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn is_known(&self, name: &str) -> bool {
        name == OBJECT || name == NULL_TYPE || self.is_declared(name)
    }

    pub fn class_names(&self) -> impl Iterator<Item = &str> {
        self.classes.iter().map(|c| c.name.as_str())
    }

    pub fn superclass(&self, name: &str) -> Option<&str> {
        self.class(name).map(|c| c.superclass.as_str())
    }

    /// `c ⪯ d`. Unknown names are never related except by reflexivity.
    pub fn preceq(&self, c: &str, d: &str) -> bool {
        if c == d || d == OBJECT || c == NULL_TYPE {
            return true;
        }
        let mut cur = c;
        while let Some(s) = self.superclass(cur) {
            if s == d {
                return true;
            }
            cur = s;
        }
        false
    }

    /// Checked variant of `preceq` that rejects names outside the program.
    pub fn try_preceq(&self, c: &str, d: &str) -> Result<bool, String> {
        for n in [c, d] {
            if !self.is_known(n) {
                return Err(format!("unknown class `{n}`"));
            }
        }
        Ok(self.preceq(c, d))
    }

    /// `c` and its superclasses up to (excluding) `Object`, nearest first.
    pub fn ancestors(&self, c: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut cur = self.class(c).map(|d| d.name.as_str());
        while let Some(n) = cur {
            out.push(n);
            cur = self.superclass(n).filter(|s| *s != OBJECT);
        }
        out
    }

    /// Least common superclass, with `NullType` as the bottom.
    pub fn join_class(&self, c: &str, d: &str) -> String {
        if self.preceq(c, d) {
            return d.to_string();
        }
        if self.preceq(d, c) {
            return c.to_string();
        }
        for a in self.ancestors(c) {
            if self.preceq(d, a) {
                return a.to_string();
            }
        }
        OBJECT.to_string()
    }

    /// All fields of `c`, inherited first, with their declared classes.
    pub fn fields_of(&self, c: &str) -> Vec<(String, String)> {
        let mut chain = self.ancestors(c);
        chain.reverse();
        chain.iter().flat_map(|n| self.class(n).unwrap().fields.iter().cloned()).collect()
    }

    pub fn field_type(&self, c: &str, f: &str) -> Option<String> {
        self.ancestors(c)
            .into_iter()
            .find_map(|n| self.class(n).unwrap().fields.iter().find(|(g, _)| g == f).map(|(_, t)| t.clone()))
    }

    /// The class that declares field `f` as seen from `c`.
    pub fn field_owner(&self, c: &str, f: &str) -> Option<&str> {
        self.ancestors(c).into_iter().find(|n| self.class(n).unwrap().fields.iter().any(|(g, _)| g == f))
    }

    /// Method names visible in `c` (declared or inherited), sorted.
    pub fn methods_of(&self, c: &str) -> Vec<String> {
        let set: BTreeSet<String> = self
            .ancestors(c)
            .into_iter()
            .flat_map(|n| self.class(n).unwrap().methods.iter().map(|m| m.name.clone()))
            .collect();
        set.into_iter().collect()
    }

    /// The declaration of `m` found by walking up from `c`, with the name of
    /// the class that declares it.
    pub fn method_lookup(&self, c: &str, m: &str) -> Option<(&MethodDecl, &str)> {
        self.ancestors(c).into_iter().find_map(|n| {
            let cd = self.class(n).unwrap();
            cd.method(m).map(|d| (d, cd.name.as_str()))
        })
    }

    /// Every `new` label with the class it instantiates, in program order.
    pub fn labels(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for c in &self.classes {
            for m in &c.methods {
                m.body.walk(&mut |e| {
                    if let ExprKind::New { label, class } = &e.kind {
                        out.insert(label.clone(), class.clone());
                    }
                });
            }
        }
        out
    }

    /// Direct subclasses of every class, including `Object`.
    pub fn subclasses(&self) -> BTreeMap<String, Vec<String>> {
        let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for c in &self.classes {
            out.entry(c.superclass.clone()).or_default().push(c.name.clone());
        }
        out
    }
}
