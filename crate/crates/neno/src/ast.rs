//! AST for the Neno-style surface language.

use quadstore::Term;

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone)]
pub struct NenoUnit {
    pub prefixes: Vec<PrefixDecl>,
    pub classes: Vec<NenoClass>,
}

#[derive(Debug, Clone)]
pub struct PrefixDecl {
    pub prefix: String,
    pub iri: String,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub struct NenoClass {
    pub super_class: String,
    pub uri: String,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub pos: Pos,
}

/// Cardinality bounds; `max = None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Card {
    pub min: u32,
    pub max: Option<u32>,
}

impl Default for Card {
    fn default() -> Card {
        Card { min: 0, max: None }
    }
}

#[derive(Debug, Clone)]
pub struct FieldDecl {
    pub predicate: String,
    pub range: String,
    pub card: Card,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub struct MethodDecl {
    pub name: String,
    pub return_type: Option<String>,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub struct Param {
    pub ty: String,
    pub name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Set,
    SetPlus,
    SetMinus,
    SetClear,
}

impl SetOp {
    pub fn symbol(self) -> &'static str {
        match self {
            SetOp::Set => "=",
            SetOp::SetPlus => "=+",
            SetOp::SetMinus => "=-",
            SetOp::SetClear => "=/",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathBase {
    This,
    Var(String),
    Uri(String),
}

#[derive(Debug, Clone)]
pub struct PathStep {
    /// `..predicate` (inverse referencing) when true, `.predicate` otherwise.
    pub inverse: bool,
    pub predicate: String,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub struct PathExpr {
    pub id: NodeId,
    pub base: PathBase,
    pub steps: Vec<PathStep>,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Subtract,
    Multiply,
    Divide,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Subtract => "-",
            ArithOp::Multiply => "*",
            ArithOp::Divide => "/",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Expr {
    Path(PathExpr),
    Var {
        id: NodeId,
        name: String,
        pos: Pos,
    },
    Const {
        id: NodeId,
        value: Term,
        pos: Pos,
    },
    SetQuery {
        id: NodeId,
        path: PathExpr,
        value: Box<Expr>,
        pos: Pos,
    },
    Arith {
        id: NodeId,
        op: ArithOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        pos: Pos,
    },
    Call {
        id: NodeId,
        path: PathExpr,
        method: String,
        args: Vec<Expr>,
        /// Set when the receiver path contains an inverse step
        /// (inverse method invocation).
        inverse: bool,
        pos: Pos,
    },
}

impl Expr {
    pub fn id(&self) -> NodeId {
        match self {
            Expr::Path(p) => p.id,
            Expr::Var { id, .. }
            | Expr::Const { id, .. }
            | Expr::SetQuery { id, .. }
            | Expr::Arith { id, .. }
            | Expr::Call { id, .. } => *id,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            Expr::Path(p) => p.pos,
            Expr::Var { pos, .. }
            | Expr::Const { pos, .. }
            | Expr::SetQuery { pos, .. }
            | Expr::Arith { pos, .. }
            | Expr::Call { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Stmt {
    Set {
        target: PathExpr,
        op: SetOp,
        value: Option<Expr>,
        pos: Pos,
    },
    VarDecl {
        ty: String,
        name: String,
        init: Expr,
        pos: Pos,
    },
    If {
        cond: Expr,
        then: Vec<Stmt>,
        els: Vec<Stmt>,
        pos: Pos,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
        pos: Pos,
    },
    Return {
        expr: Option<Expr>,
        pos: Pos,
    },
    Call {
        call: Expr,
        pos: Pos,
    },
}
