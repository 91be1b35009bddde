use std::collections::HashMap;
use std::fmt;

use crate::diagnostic::{Code, Diagnostic};
use crate::exec::Execution;
use crate::model::{ClassModel, ObjectModel, Value};

use super::ast::{BinaryOp, CollectionOpKind, OclConstraint, OclExpr, UnaryOp};

/// Runtime value. Objects are referenced by index into the object model.
#[derive(Debug, Clone, PartialEq)]
pub enum OclValue {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    Enum {
        enumeration: String,
        literal: String,
    },
    Null,
    Object(usize),
    Collection(Vec<OclValue>),
}

impl OclValue {
    pub fn from_value(v: &Value) -> Self {
        match v {
            Value::Int(i) => OclValue::Int(*i),
            Value::Float(x) => OclValue::Float(*x),
            Value::Str(s) => OclValue::Str(s.clone()),
            Value::Bool(b) => OclValue::Bool(*b),
            Value::Enum {
                enumeration,
                literal,
            } => OclValue::Enum {
                enumeration: enumeration.clone(),
                literal: literal.clone(),
            },
            Value::Null => OclValue::Null,
        }
    }

    /// Back to a slot value; objects and collections have no slot form.
    pub fn to_value(&self) -> Option<Value> {
        Some(match self {
            OclValue::Int(i) => Value::Int(*i),
            OclValue::Float(x) => Value::Float(*x),
            OclValue::Str(s) => Value::Str(s.clone()),
            OclValue::Bool(b) => Value::Bool(*b),
            OclValue::Enum {
                enumeration,
                literal,
            } => Value::Enum {
                enumeration: enumeration.clone(),
                literal: literal.clone(),
            },
            OclValue::Null => Value::Null,
            OclValue::Object(_) | OclValue::Collection(_) => return None,
        })
    }

    fn type_name(&self) -> &'static str {
        match self {
            OclValue::Int(_) => "Integer",
            OclValue::Float(_) => "Real",
            OclValue::Str(_) => "String",
            OclValue::Bool(_) => "Boolean",
            OclValue::Enum { .. } => "enumeration literal",
            OclValue::Null => "null",
            OclValue::Object(_) => "object",
            OclValue::Collection(_) => "collection",
        }
    }
}

/// Structural equality used by `=`, `<>` and `includes`. Integers and reals
/// compare numerically; values of different kinds are unequal.
pub fn values_equal(a: &OclValue, b: &OclValue) -> bool {
    use OclValue::*;
    match (a, b) {
        (Int(x), Float(y)) | (Float(y), Int(x)) => (*x as f64) == *y,
        (Collection(xs), Collection(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| values_equal(x, y))
        }
        _ => a == b,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalError {
    pub message: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for EvalError {}

fn fail<T>(message: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError {
        message: message.into(),
    })
}

/// Variable scope. Iterator frames without a name are implicit iterators:
/// an unbound identifier is resolved as a navigation from the innermost one.
#[derive(Debug, Clone, Default)]
pub struct Binding {
    frames: Vec<(Option<String>, OclValue)>,
}

impl Binding {
    pub fn new() -> Self {
        Binding::default()
    }

    pub fn with_var(mut self, name: &str, value: OclValue) -> Self {
        self.push(Some(name.to_string()), value);
        self
    }

    pub fn push(&mut self, name: Option<String>, value: OclValue) {
        self.frames.push((name, value));
    }

    pub fn pop(&mut self) {
        self.frames.pop();
    }

    pub fn lookup(&self, name: &str) -> Option<&OclValue> {
        self.frames
            .iter()
            .rev()
            .find(|(n, _)| n.as_deref() == Some(name))
            .map(|(_, v)| v)
    }

    fn implicit(&self) -> Option<&OclValue> {
        self.frames
            .iter()
            .rev()
            .find(|(n, _)| n.is_none())
            .map(|(_, v)| v)
    }
}

/// Evaluates expressions against one object model.
pub struct Evaluator<'a> {
    model: &'a ClassModel,
    objects: &'a ObjectModel,
    index: HashMap<&'a str, usize>,
    /// (association, end, object id) to the ids at the opposite end of
    /// the object's links, in link order.
    linked: HashMap<(&'a str, usize, &'a str), Vec<&'a str>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(model: &'a ClassModel, objects: &'a ObjectModel) -> Self {
        let mut index = HashMap::new();
        for (i, o) in objects.objects.iter().enumerate() {
            index.entry(o.id.as_str()).or_insert(i);
        }
        let mut linked: HashMap<_, Vec<&str>> = HashMap::new();
        for l in &objects.links {
            for from in 0..2 {
                linked
                    .entry((l.association_name.as_str(), from, l.end(from)))
                    .or_default()
                    .push(l.end(1 - from));
            }
        }
        Evaluator {
            model,
            objects,
            index,
            linked,
        }
    }

    pub fn object_id(&self, idx: usize) -> &str {
        &self.objects.objects[idx].id
    }

    /// Evaluates `expr` with `self` bound to the object at `self_idx`.
    pub fn eval_on(&self, expr: &OclExpr, self_idx: usize) -> Result<OclValue, EvalError> {
        let mut env = Binding::new().with_var("self", OclValue::Object(self_idx));
        self.eval(expr, &mut env)
    }

    pub fn eval(&self, expr: &OclExpr, env: &mut Binding) -> Result<OclValue, EvalError> {
        match expr {
            OclExpr::Literal(v) => Ok(OclValue::from_value(v)),
            OclExpr::SelfRef => match env.lookup("self") {
                Some(v) => Ok(v.clone()),
                None => fail("`self` is not bound here"),
            },
            OclExpr::VarRef(name) => {
                if let Some(v) = env.lookup(name) {
                    return Ok(v.clone());
                }
                match env.implicit().cloned() {
                    Some(it) => self.navigate(&it, name, false),
                    None => fail(format!("unbound variable `{name}`")),
                }
            }
            OclExpr::AttrNav(src, name) => {
                let v = self.eval(src, env)?;
                self.navigate(&v, name, false)
            }
            OclExpr::AssocNav(src, name) => {
                let v = self.eval(src, env)?;
                self.navigate(&v, name, true)
            }
            OclExpr::Unary(op, e) => {
                let v = self.eval(e, env)?;
                match (op, v) {
                    (UnaryOp::Not, OclValue::Bool(b)) => Ok(OclValue::Bool(!b)),
                    (UnaryOp::Neg, OclValue::Int(i)) => match i.checked_neg() {
                        Some(n) => Ok(OclValue::Int(n)),
                        None => fail("integer overflow in negation"),
                    },
                    (UnaryOp::Neg, OclValue::Float(x)) => Ok(OclValue::Float(-x)),
                    (UnaryOp::Not, v) => {
                        fail(format!("`not` expects Boolean, got {}", v.type_name()))
                    }
                    (UnaryOp::Neg, v) => {
                        fail(format!("`-` expects a number, got {}", v.type_name()))
                    }
                }
            }
            OclExpr::Binary(op, l, r) => self.binary(*op, l, r, env),
            OclExpr::If(c, t, e) => match self.eval(c, env)? {
                OclValue::Bool(true) => self.eval(t, env),
                OclValue::Bool(false) => self.eval(e, env),
                v => fail(format!(
                    "`if` condition must be Boolean, got {}",
                    v.type_name()
                )),
            },
            OclExpr::CollectionOp {
                source,
                op,
                iterator,
                body,
            } => {
                let items = match self.eval(source, env)? {
                    OclValue::Collection(xs) => xs,
                    OclValue::Null => Vec::new(),
                    v => vec![v],
                };
                self.collection_op(*op, items, iterator.as_deref(), body.as_deref(), env)
            }
        }
    }

    fn binary(
        &self,
        op: BinaryOp,
        l: &OclExpr,
        r: &OclExpr,
        env: &mut Binding,
    ) -> Result<OclValue, EvalError> {
        let boolean = |v: OclValue, side: &str| match v {
            OclValue::Bool(b) => Ok(b),
            v => fail(format!(
                "`{}` expects Boolean {side} operand, got {}",
                op.symbol(),
                v.type_name()
            )),
        };
        match op {
            BinaryOp::And | BinaryOp::Or | BinaryOp::Implies => {
                let a = boolean(self.eval(l, env)?, "left")?;
                let short = match op {
                    BinaryOp::And => (!a).then_some(false),
                    BinaryOp::Or => a.then_some(true),
                    _ => (!a).then_some(true),
                };
                if let Some(v) = short {
                    return Ok(OclValue::Bool(v));
                }
                Ok(OclValue::Bool(boolean(self.eval(r, env)?, "right")?))
            }
            _ => {
                let a = self.eval(l, env)?;
                let b = self.eval(r, env)?;
                apply_strict(op, &a, &b)
            }
        }
    }

    fn collection_op(
        &self,
        op: CollectionOpKind,
        items: Vec<OclValue>,
        iterator: Option<&str>,
        body: Option<&OclExpr>,
        env: &mut Binding,
    ) -> Result<OclValue, EvalError> {
        let need_body = || match body {
            Some(b) => Ok(b),
            None => fail(format!("`{}` requires an argument", op.name())),
        };
        match op {
            CollectionOpKind::Size => Ok(OclValue::Int(items.len() as i64)),
            CollectionOpKind::IsEmpty => Ok(OclValue::Bool(items.is_empty())),
            CollectionOpKind::NotEmpty => Ok(OclValue::Bool(!items.is_empty())),
            CollectionOpKind::Includes => {
                let needle = self.eval(need_body()?, env)?;
                Ok(OclValue::Bool(
                    items.iter().any(|x| values_equal(x, &needle)),
                ))
            }
            CollectionOpKind::ForAll | CollectionOpKind::Exists | CollectionOpKind::Select => {
                let body = need_body()?;
                let mut kept = Vec::new();
                for item in items {
                    env.push(iterator.map(str::to_string), item.clone());
                    let v = self.eval(body, env);
                    env.pop();
                    let b = match v? {
                        OclValue::Bool(b) => b,
                        v => {
                            return fail(format!(
                                "`{}` body must be Boolean, got {}",
                                op.name(),
                                v.type_name()
                            ))
                        }
                    };
                    match op {
                        CollectionOpKind::ForAll if !b => return Ok(OclValue::Bool(false)),
                        CollectionOpKind::Exists if b => return Ok(OclValue::Bool(true)),
                        CollectionOpKind::Select if b => kept.push(item),
                        _ => {}
                    }
                }
                Ok(match op {
                    CollectionOpKind::ForAll => OclValue::Bool(true),
                    CollectionOpKind::Exists => OclValue::Bool(false),
                    _ => OclValue::Collection(kept),
                })
            }
            CollectionOpKind::Collect => {
                let body = need_body()?;
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    env.push(iterator.map(str::to_string), item);
                    let v = self.eval(body, env);
                    env.pop();
                    match v? {
                        OclValue::Collection(_) => {
                            return fail(
                                "`collect` body yields a collection; nesting is not supported",
                            )
                        }
                        v => out.push(v),
                    }
                }
                Ok(OclValue::Collection(out))
            }
        }
    }

    /// `v.name`: a property of the object's class, else (or when
    /// `ends_only`) an association end named by role or target class.
    fn navigate(&self, v: &OclValue, name: &str, ends_only: bool) -> Result<OclValue, EvalError> {
        let idx = match v {
            OclValue::Object(i) => *i,
            OclValue::Null => return fail(format!("navigation `.{name}` on null")),
            v => return fail(format!("navigation `.{name}` on {}", v.type_name())),
        };
        let obj = &self.objects.objects[idx];
        let Some(class) = self.model.class(&obj.classifier) else {
            return fail(format!(
                "object `{}` has unknown class `{}`",
                obj.id, obj.classifier
            ));
        };
        if !ends_only {
            let props = self
                .model
                .all_properties(&class.name)
                .map_err(|e| EvalError {
                    message: e.to_string(),
                })?;
            if props.iter().any(|p| p.name == name) {
                return match obj.slot(name) {
                    Some(value) => Ok(OclValue::from_value(value)),
                    None => fail(format!("object `{}` has no value for `{name}`", obj.id)),
                };
            }
        }
        let Some((assoc, to)) = self
            .model
            .navigable_ends(&class.name)
            .find(|(a, to)| a.ends[*to].navigation_name() == name)
        else {
            return fail(format!(
                "class `{}` has no property or association end `{name}`",
                class.name
            ));
        };
        let from = 1 - to;
        let targets: Vec<OclValue> = self
            .linked
            .get(&(assoc.name.as_str(), from, obj.id.as_str()))
            .into_iter()
            .flatten()
            .filter_map(|id| self.index.get(id))
            .map(|&i| OclValue::Object(i))
            .collect();
        if assoc.ends[to].multiplicity.is_single() {
            match targets.len() {
                0 => Ok(OclValue::Null),
                1 => Ok(targets.into_iter().next().unwrap()),
                n => fail(format!(
                    "`{}.{name}` has upper bound 1 but {n} linked objects",
                    obj.id
                )),
            }
        } else {
            Ok(OclValue::Collection(targets))
        }
    }
}

/// Evaluates `expr` under `env`. Free variables must be bound in `env`.
pub fn evaluate_expression(
    expr: &OclExpr,
    env: &Binding,
    objects: &ObjectModel,
    model: &ClassModel,
) -> Result<OclValue, EvalError> {
    let mut env = env.clone();
    Evaluator::new(model, objects).eval(expr, &mut env)
}

/// Arithmetic, comparison and equality on already evaluated operands.
pub fn apply_strict(op: BinaryOp, a: &OclValue, b: &OclValue) -> Result<OclValue, EvalError> {
    use OclValue::*;
    let mismatch = || {
        fail(format!(
            "`{}` not defined for {} and {}",
            op.symbol(),
            a.type_name(),
            b.type_name()
        ))
    };
    let as_f64 = |v: &OclValue| match v {
        Int(i) => Some(*i as f64),
        Float(x) => Some(*x),
        _ => None,
    };
    match op {
        BinaryOp::Eq => Ok(Bool(values_equal(a, b))),
        BinaryOp::Ne => Ok(Bool(!values_equal(a, b))),
        BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div => {
            if let (Int(x), Int(y)) = (a, b) {
                let r = match op {
                    BinaryOp::Add => x.checked_add(*y),
                    BinaryOp::Sub => x.checked_sub(*y),
                    BinaryOp::Mul => x.checked_mul(*y),
                    _ if *y == 0 => return fail("division by zero"),
                    _ => x.checked_div(*y),
                };
                return match r {
                    Some(v) => Ok(Int(v)),
                    None => fail(format!("integer overflow in `{}`", op.symbol())),
                };
            }
            let (Some(x), Some(y)) = (as_f64(a), as_f64(b)) else {
                return mismatch();
            };
            Ok(Float(match op {
                BinaryOp::Add => x + y,
                BinaryOp::Sub => x - y,
                BinaryOp::Mul => x * y,
                _ if y == 0.0 => return fail("division by zero"),
                _ => x / y,
            }))
        }
        BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
            let ord = match (a, b) {
                (Int(x), Int(y)) => x.partial_cmp(y),
                (Str(x), Str(y)) => x.partial_cmp(y),
                _ => match (as_f64(a), as_f64(b)) {
                    (Some(x), Some(y)) => x.partial_cmp(&y),
                    _ => return mismatch(),
                },
            };
            let Some(ord) = ord else {
                return fail("comparison with NaN");
            };
            Ok(Bool(match op {
                BinaryOp::Lt => ord.is_lt(),
                BinaryOp::Le => ord.is_le(),
                BinaryOp::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            }))
        }
        BinaryOp::And | BinaryOp::Or | BinaryOp::Implies => match (a, b) {
            (Bool(x), Bool(y)) => Ok(Bool(match op {
                BinaryOp::And => *x && *y,
                BinaryOp::Or => *x || *y,
                _ => !*x || *y,
            })),
            _ => mismatch(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceResult {
    pub object_id: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalResult {
    pub constraint: String,
    pub context_class: String,
    /// One entry per instance of the context class (subclasses included),
    /// in object declaration order.
    pub per_instance: Vec<InstanceResult>,
    /// Set when the constraint could not be evaluated at all.
    pub error: Option<Diagnostic>,
}

impl EvalResult {
    pub fn holds(&self) -> bool {
        self.error.is_none() && self.per_instance.iter().all(|r| r.verdict == Verdict::True)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InstanceResult> {
        self.per_instance
            .iter()
            .filter(|r| r.verdict != Verdict::True)
    }
}

pub fn evaluate_constraint(
    constraint: &OclConstraint,
    objects: &ObjectModel,
    model: &ClassModel,
) -> EvalResult {
    evaluate_constraint_with(constraint, objects, model, Execution::default())
}

pub fn evaluate_constraint_with(
    constraint: &OclConstraint,
    objects: &ObjectModel,
    model: &ClassModel,
    exec: Execution,
) -> EvalResult {
    let mut result = EvalResult {
        constraint: constraint.name.clone(),
        context_class: constraint.context_class.clone(),
        per_instance: Vec::new(),
        error: None,
    };
    if model.class(&constraint.context_class).is_none() {
        result.error = Some(Diagnostic::error(
            Code::UnknownContext,
            format!(
                "invariant `{}`: context class `{}` is not declared",
                constraint.name, constraint.context_class
            ),
        ));
        return result;
    }
    let ev = Evaluator::new(model, objects);
    let instances: Vec<usize> = objects
        .objects
        .iter()
        .enumerate()
        .filter(|(_, o)| model.conforms_to(&o.classifier, &constraint.context_class))
        .map(|(i, _)| i)
        .collect();
    result.per_instance = exec.map(&instances, |&i| {
        let verdict = match ev.eval_on(&constraint.body, i) {
            Ok(OclValue::Bool(true)) => Verdict::True,
            Ok(OclValue::Bool(false)) => Verdict::False,
            Ok(v) => Verdict::Error(format!(
                "invariant body evaluated to {}, not Boolean",
                v.type_name()
            )),
            Err(e) => Verdict::Error(e.message),
        };
        InstanceResult {
            object_id: ev.object_id(i).to_string(),
            verdict,
        }
    });
    result
}

pub fn check_all(
    constraints: &[OclConstraint],
    objects: &ObjectModel,
    model: &ClassModel,
) -> Vec<EvalResult> {
    check_all_with(constraints, objects, model, Execution::default())
}

pub fn check_all_with(
    constraints: &[OclConstraint],
    objects: &ObjectModel,
    model: &ClassModel,
    exec: Execution,
) -> Vec<EvalResult> {
    constraints
        .iter()
        .map(|c| evaluate_constraint_with(c, objects, model, exec))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        Association, AssociationEnd, ClassDef, Link, Multiplicity, ObjectDef, PrimitiveType,
    };
    use crate::ocl::parse_expression;

    fn model() -> ClassModel {
        ClassModel::new("m")
            .with_class(ClassDef::new("P").id_attr("code", PrimitiveType::Str))
            .with_class(ClassDef::new("S").attr("n", PrimitiveType::Int))
            .with_association(Association::new(
                "has",
                AssociationEnd::new("P", Multiplicity::ONE).role("owner"),
                AssociationEnd::new("S", Multiplicity::MANY).role("items"),
            ))
    }

    fn objects() -> ObjectModel {
        ObjectModel::new("o")
            .with_object(ObjectDef::new("p", "P").with_slot("code", Value::Str("c".into())))
            .with_object(ObjectDef::new("s1", "S").with_slot("n", Value::Int(1)))
            .with_object(ObjectDef::new("s2", "S").with_slot("n", Value::Int(5)))
            .with_link(Link::new("has", "p", "s1"))
            .with_link(Link::new("has", "p", "s2"))
    }

    fn eval(src: &str, self_idx: usize) -> Result<OclValue, EvalError> {
        let (m, o) = (model(), objects());
        Evaluator::new(&m, &o).eval_on(&parse_expression(src).unwrap(), self_idx)
    }

    #[test]
    fn arithmetic_and_conditionals() {
        assert_eq!(eval("1 + 2 * 3", 0), Ok(OclValue::Int(7)));
        assert_eq!(
            eval("if false then 1 else 2 endif", 0),
            Ok(OclValue::Int(2))
        );
        assert_eq!(eval("7 / 2", 0), Ok(OclValue::Int(3)));
        assert_eq!(eval("1 + 0.5", 0), Ok(OclValue::Float(1.5)));
        assert_eq!(eval("2 = 2.0", 0), Ok(OclValue::Bool(true)));
        assert_eq!(eval("'a' < 'b'", 0), Ok(OclValue::Bool(true)));
        assert_eq!(eval("1 = 'a'", 0), Ok(OclValue::Bool(false)));
        assert!(eval("1 / 0", 0).is_err());
        assert!(eval("1 < 'a'", 0).is_err());
    }

    #[test]
    fn short_circuit() {
        // Right operands would fail if evaluated.
        assert_eq!(eval("false and 1 / 0 = 1", 0), Ok(OclValue::Bool(false)));
        assert_eq!(eval("true or 1 / 0 = 1", 0), Ok(OclValue::Bool(true)));
        assert_eq!(eval("false implies 1 / 0 = 1", 0), Ok(OclValue::Bool(true)));
        assert!(eval("true and 1 / 0 = 1", 0).is_err());
    }

    #[test]
    fn navigation() {
        assert_eq!(eval("self.code", 0), Ok(OclValue::Str("c".into())));
        assert_eq!(eval("self.items->size()", 0), Ok(OclValue::Int(2)));
        assert_eq!(eval("self.owner", 1), Ok(OclValue::Object(0)));
        assert_eq!(
            eval("self.owner.items->collect(s | s.n)", 1),
            Ok(OclValue::Collection(vec![
                OclValue::Int(1),
                OclValue::Int(5)
            ]))
        );
        assert_eq!(
            eval("self.items->select(n > 2)->size()", 0),
            Ok(OclValue::Int(1))
        );
        assert_eq!(
            eval("self.items->forAll(s | s.owner = self)", 0),
            Ok(OclValue::Bool(true))
        );
        assert!(eval("self.nothing", 0).is_err());
        assert!(eval("self.owner.code.x", 1).is_err());
    }

    #[test]
    fn empty_collections() {
        let m = model();
        let o = ObjectModel::new("o")
            .with_object(ObjectDef::new("p", "P").with_slot("code", Value::Str("c".into())));
        let ev = Evaluator::new(&m, &o);
        let run = |s: &str| ev.eval_on(&parse_expression(s).unwrap(), 0);
        assert_eq!(
            run("self.items->forAll(s | 1 / 0 = 1)"),
            Ok(OclValue::Bool(true))
        );
        assert_eq!(
            run("self.items->exists(s | true)"),
            Ok(OclValue::Bool(false))
        );
        assert_eq!(run("self.items->isEmpty()"), Ok(OclValue::Bool(true)));
    }

    #[test]
    fn verdicts() {
        let (m, o) = (model(), objects());
        let c = OclConstraint {
            context_class: "S".into(),
            name: "small".into(),
            body: parse_expression("self.n < 3").unwrap(),
        };
        let r = evaluate_constraint(&c, &o, &m);
        let v: Vec<_> = r
            .per_instance
            .iter()
            .map(|r| (r.object_id.as_str(), r.verdict.clone()))
            .collect();
        assert_eq!(v, vec![("s1", Verdict::True), ("s2", Verdict::False)]);
        assert!(!r.holds());
        let bad = OclConstraint {
            context_class: "Q".into(),
            ..c
        };
        assert_eq!(
            evaluate_constraint(&bad, &o, &m).error.unwrap().code,
            Code::UnknownContext
        );
    }
}
