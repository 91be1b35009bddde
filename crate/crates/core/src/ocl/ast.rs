use std::fmt;

use crate::model::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Mul,
    Div,
    Add,
    Sub,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Implies,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
            BinaryOp::Implies => "implies",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollectionOpKind {
    Size,
    IsEmpty,
    NotEmpty,
    Includes,
    ForAll,
    Exists,
    Select,
    Collect,
}

impl CollectionOpKind {
    pub const ALL: [CollectionOpKind; 8] = [
        CollectionOpKind::Size,
        CollectionOpKind::IsEmpty,
        CollectionOpKind::NotEmpty,
        CollectionOpKind::Includes,
        CollectionOpKind::ForAll,
        CollectionOpKind::Exists,
        CollectionOpKind::Select,
        CollectionOpKind::Collect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CollectionOpKind::Size => "size",
            CollectionOpKind::IsEmpty => "isEmpty",
            CollectionOpKind::NotEmpty => "notEmpty",
            CollectionOpKind::Includes => "includes",
            CollectionOpKind::ForAll => "forAll",
            CollectionOpKind::Exists => "exists",
            CollectionOpKind::Select => "select",
            CollectionOpKind::Collect => "collect",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Iterator operations take a body evaluated once per element.
    pub fn is_iterator(self) -> bool {
        matches!(
            self,
            CollectionOpKind::ForAll
                | CollectionOpKind::Exists
                | CollectionOpKind::Select
                | CollectionOpKind::Collect
        )
    }

    pub fn takes_argument(self) -> bool {
        self == CollectionOpKind::Includes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OclExpr {
    Literal(Value),
    SelfRef,
    VarRef(String),
    /// `src.name`. Resolved at evaluation time: a property of the object's
    /// class if there is one, otherwise an association end.
    AttrNav(Box<OclExpr>, String),
    /// `src.name` where `name` must be an association end (role, or target
    /// class name when the end has no role).
    AssocNav(Box<OclExpr>, String),
    Unary(UnaryOp, Box<OclExpr>),
    Binary(BinaryOp, Box<OclExpr>, Box<OclExpr>),
    If(Box<OclExpr>, Box<OclExpr>, Box<OclExpr>),
    /// `src->op(...)`. For `includes`, `body` holds the argument and
    /// `iterator` is `None`.
    CollectionOp {
        source: Box<OclExpr>,
        op: CollectionOpKind,
        iterator: Option<String>,
        body: Option<Box<OclExpr>>,
    },
}

impl OclExpr {
    pub fn lit(v: Value) -> Self {
        OclExpr::Literal(v)
    }

    pub fn var(name: &str) -> Self {
        OclExpr::VarRef(name.to_string())
    }

    pub fn nav(self, name: &str) -> Self {
        OclExpr::AttrNav(Box::new(self), name.to_string())
    }

    pub fn binary(op: BinaryOp, lhs: OclExpr, rhs: OclExpr) -> Self {
        OclExpr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn unary(op: UnaryOp, e: OclExpr) -> Self {
        OclExpr::Unary(op, Box::new(e))
    }

    pub fn if_then_else(c: OclExpr, t: OclExpr, e: OclExpr) -> Self {
        OclExpr::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn coll(self, op: CollectionOpKind, iterator: Option<&str>, body: Option<OclExpr>) -> Self {
        OclExpr::CollectionOp {
            source: Box::new(self),
            op,
            iterator: iterator.map(str::to_string),
            body: body.map(Box::new),
        }
    }

    /// Nesting depth; a leaf has depth 1.
    pub fn depth(&self) -> usize {
        1 + match self {
            OclExpr::Literal(_) | OclExpr::SelfRef | OclExpr::VarRef(_) => 0,
            OclExpr::AttrNav(e, _) | OclExpr::AssocNav(e, _) | OclExpr::Unary(_, e) => e.depth(),
            OclExpr::Binary(_, l, r) => l.depth().max(r.depth()),
            OclExpr::If(c, t, e) => c.depth().max(t.depth()).max(e.depth()),
            OclExpr::CollectionOp { source, body, .. } => {
                source.depth().max(body.as_ref().map_or(0, |b| b.depth()))
            }
        }
    }
}

fn write_literal(f: &mut fmt::Formatter<'_>, v: &Value) -> fmt::Result {
    match v {
        Value::Str(s) => {
            f.write_str("'")?;
            for c in s.chars() {
                match c {
                    '\'' => f.write_str("\\'")?,
                    '\\' => f.write_str("\\\\")?,
                    '\n' => f.write_str("\\n")?,
                    '\t' => f.write_str("\\t")?,
                    c => write!(f, "{c}")?,
                }
            }
            f.write_str("'")
        }
        Value::Int(i) if *i < 0 => write!(f, "({i})"),
        Value::Float(x) if x.is_sign_negative() => write!(f, "({x:?})"),
        other => write!(f, "{other}"),
    }
}

/// Concrete OCL syntax, parenthesizing every compound operand so the text
/// re-parses to the same tree.
impl fmt::Display for OclExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(f: &mut fmt::Formatter<'_>, e: &OclExpr) -> fmt::Result {
            match e {
                OclExpr::Binary(..) | OclExpr::Unary(..) => write!(f, "({e})"),
                _ => write!(f, "{e}"),
            }
        }
        match self {
            OclExpr::Literal(v) => write_literal(f, v),
            OclExpr::SelfRef => f.write_str("self"),
            OclExpr::VarRef(n) => f.write_str(n),
            OclExpr::AttrNav(e, n) | OclExpr::AssocNav(e, n) => {
                operand(f, e)?;
                write!(f, ".{n}")
            }
            OclExpr::Unary(UnaryOp::Not, e) => {
                f.write_str("not ")?;
                operand(f, e)
            }
            // Always parenthesized: `-3` lexes as a negative literal.
            OclExpr::Unary(UnaryOp::Neg, e) => write!(f, "-({e})"),
            OclExpr::Binary(op, l, r) => {
                operand(f, l)?;
                write!(f, " {} ", op.symbol())?;
                operand(f, r)
            }
            OclExpr::If(c, t, e) => write!(f, "if {c} then {t} else {e} endif"),
            OclExpr::CollectionOp {
                source,
                op,
                iterator,
                body,
            } => {
                operand(f, source)?;
                write!(f, "->{}(", op.name())?;
                if let Some(it) = iterator {
                    write!(f, "{it} | ")?;
                }
                if let Some(b) = body {
                    write!(f, "{b}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OclConstraint {
    pub context_class: String,
    pub name: String,
    pub body: OclExpr,
}

impl fmt::Display for OclConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "context {} inv {}: {}",
            self.context_class, self.name, self.body
        )
    }
}
