//! A naive reference interpreter for OCL invariants.
//!
//! Written without the library evaluator's data structures: objects are
//! referred to by id, the inheritance closure is recomputed on every query,
//! and scopes are plain association lists. Only the outcome kind (true,
//! false or error) is meant to be compared.

use buml::model::{ClassModel, ObjectDef, ObjectModel, Value};
use buml::ocl::{BinaryOp, CollectionOpKind, OclExpr, UnaryOp};

#[derive(Debug, Clone)]
enum V {
    I(i64),
    F(f64),
    S(String),
    B(bool),
    E(String, String),
    Nil,
    Obj(String),
    Many(Vec<V>),
}

type R = Result<V, ()>;

/// Outcome kind of an invariant on one object.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    True,
    False,
    Error,
}

fn lift(v: &Value) -> V {
    match v {
        Value::Int(i) => V::I(*i),
        Value::Float(x) => V::F(*x),
        Value::Str(s) => V::S(s.clone()),
        Value::Bool(b) => V::B(*b),
        Value::Enum {
            enumeration,
            literal,
        } => V::E(enumeration.clone(), literal.clone()),
        Value::Null => V::Nil,
    }
}

fn num(v: &V) -> Option<f64> {
    match v {
        V::I(i) => Some(*i as f64),
        V::F(x) => Some(*x),
        _ => None,
    }
}

fn same(a: &V, b: &V) -> bool {
    match (a, b) {
        (V::I(x), V::I(y)) => x == y,
        (V::I(_) | V::F(_), V::I(_) | V::F(_)) => num(a) == num(b),
        (V::S(x), V::S(y)) => x == y,
        (V::B(x), V::B(y)) => x == y,
        (V::E(a1, b1), V::E(a2, b2)) => a1 == a2 && b1 == b2,
        (V::Nil, V::Nil) => true,
        (V::Obj(x), V::Obj(y)) => x == y,
        (V::Many(xs), V::Many(ys)) => {
            xs.len() == ys.len() && (0..xs.len()).all(|i| same(&xs[i], &ys[i]))
        }
        _ => false,
    }
}

struct Oracle<'a> {
    cm: &'a ClassModel,
    om: &'a ObjectModel,
}

impl Oracle<'_> {
    fn obj(&self, id: &str) -> Option<&ObjectDef> {
        self.om.objects.iter().find(|o| o.id == id)
    }

    fn ancestors(&self, class: &str) -> Vec<String> {
        let mut out = vec![class.to_string()];
        let mut i = 0;
        while i < out.len() {
            for g in &self.cm.generalizations {
                if g.specific == out[i] && !out.contains(&g.general) {
                    out.push(g.general.clone());
                }
            }
            i += 1;
        }
        out
    }

    fn is_a(&self, class: &str, sup: &str) -> bool {
        self.cm.classes.iter().any(|c| c.name == class)
            && self.cm.classes.iter().any(|c| c.name == sup)
            && self.ancestors(class).iter().any(|a| a == sup)
    }

    fn has_property(&self, class: &str, name: &str) -> bool {
        self.ancestors(class)
            .iter()
            .filter_map(|a| self.cm.classes.iter().find(|c| c.name == *a))
            .any(|c| c.properties.iter().any(|p| p.name == name))
    }

    fn nav(&self, v: &V, name: &str, ends_only: bool) -> R {
        let V::Obj(id) = v else { return Err(()) };
        let o = self.obj(id).ok_or(())?;
        if !self.cm.classes.iter().any(|c| c.name == o.classifier) {
            return Err(());
        }
        if !ends_only && self.has_property(&o.classifier, name) {
            return o.slot(name).map(lift).ok_or(());
        }
        for a in &self.cm.associations {
            for from in 0..2 {
                let to = 1 - from;
                if !self.is_a(&o.classifier, &a.ends[from].target_class)
                    || a.ends[to].navigation_name() != name
                {
                    continue;
                }
                let mut hits = Vec::new();
                for l in &self.om.links {
                    if l.association_name == a.name
                        && l.end(from) == id
                        && self.obj(l.end(to)).is_some()
                    {
                        hits.push(V::Obj(l.end(to).to_string()));
                    }
                }
                let m = a.ends[to].multiplicity;
                if m.upper == Some(1) || (m.upper == Some(0)) {
                    return match hits.len() {
                        0 => Ok(V::Nil),
                        1 => Ok(hits.pop().unwrap()),
                        _ => Err(()),
                    };
                }
                return Ok(V::Many(hits));
            }
        }
        Err(())
    }

    fn run(&self, e: &OclExpr, scope: &mut Vec<(Option<String>, V)>) -> R {
        match e {
            OclExpr::Literal(v) => Ok(lift(v)),
            OclExpr::SelfRef => self.run(&OclExpr::var("self"), scope),
            OclExpr::VarRef(n) => {
                for (k, v) in scope.iter().rev() {
                    if k.as_deref() == Some(n.as_str()) {
                        return Ok(v.clone());
                    }
                }
                let implicit = scope
                    .iter()
                    .rev()
                    .find(|(k, _)| k.is_none())
                    .map(|(_, v)| v.clone());
                match implicit {
                    Some(it) => self.nav(&it, n, false),
                    None => Err(()),
                }
            }
            OclExpr::AttrNav(s, n) => {
                let v = self.run(s, scope)?;
                self.nav(&v, n, false)
            }
            OclExpr::AssocNav(s, n) => {
                let v = self.run(s, scope)?;
                self.nav(&v, n, true)
            }
            OclExpr::Unary(UnaryOp::Not, x) => match self.run(x, scope)? {
                V::B(b) => Ok(V::B(!b)),
                _ => Err(()),
            },
            OclExpr::Unary(UnaryOp::Neg, x) => match self.run(x, scope)? {
                V::I(i) => i.checked_neg().map(V::I).ok_or(()),
                V::F(f) => Ok(V::F(-f)),
                _ => Err(()),
            },
            OclExpr::If(c, t, f) => match self.run(c, scope)? {
                V::B(true) => self.run(t, scope),
                V::B(false) => self.run(f, scope),
                _ => Err(()),
            },
            OclExpr::Binary(op, l, r) => self.binary(*op, l, r, scope),
            OclExpr::CollectionOp {
                source,
                op,
                iterator,
                body,
            } => {
                let items = match self.run(source, scope)? {
                    V::Many(xs) => xs,
                    V::Nil => vec![],
                    v => vec![v],
                };
                self.coll(*op, items, iterator, body.as_deref(), scope)
            }
        }
    }

    fn binary(
        &self,
        op: BinaryOp,
        l: &OclExpr,
        r: &OclExpr,
        scope: &mut Vec<(Option<String>, V)>,
    ) -> R {
        if matches!(op, BinaryOp::And | BinaryOp::Or | BinaryOp::Implies) {
            let V::B(a) = self.run(l, scope)? else {
                return Err(());
            };
            match (op, a) {
                (BinaryOp::And, false) => return Ok(V::B(false)),
                (BinaryOp::Or, true) => return Ok(V::B(true)),
                (BinaryOp::Implies, false) => return Ok(V::B(true)),
                _ => {}
            }
            return match self.run(r, scope)? {
                V::B(b) => Ok(V::B(b)),
                _ => Err(()),
            };
        }
        let a = self.run(l, scope)?;
        let b = self.run(r, scope)?;
        match op {
            BinaryOp::Eq => Ok(V::B(same(&a, &b))),
            BinaryOp::Ne => Ok(V::B(!same(&a, &b))),
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div => match (&a, &b) {
                (V::I(x), V::I(y)) => {
                    let out = match op {
                        BinaryOp::Add => x.checked_add(*y),
                        BinaryOp::Sub => x.checked_sub(*y),
                        BinaryOp::Mul => x.checked_mul(*y),
                        _ => x.checked_div(*y),
                    };
                    out.map(V::I).ok_or(())
                }
                _ => {
                    let (x, y) = (num(&a).ok_or(())?, num(&b).ok_or(())?);
                    Ok(V::F(match op {
                        BinaryOp::Add => x + y,
                        BinaryOp::Sub => x - y,
                        BinaryOp::Mul => x * y,
                        _ if y == 0.0 => return Err(()),
                        _ => x / y,
                    }))
                }
            },
            _ => {
                let ord = match (&a, &b) {
                    (V::I(x), V::I(y)) => Some(x.cmp(y)),
                    (V::S(x), V::S(y)) => Some(x.cmp(y)),
                    _ => num(&a).ok_or(())?.partial_cmp(&num(&b).ok_or(())?),
                };
                let ord = ord.ok_or(())?;
                Ok(V::B(match op {
                    BinaryOp::Lt => ord.is_lt(),
                    BinaryOp::Le => ord.is_le(),
                    BinaryOp::Gt => ord.is_gt(),
                    _ => ord.is_ge(),
                }))
            }
        }
    }

    fn coll(
        &self,
        op: CollectionOpKind,
        items: Vec<V>,
        iterator: &Option<String>,
        body: Option<&OclExpr>,
        scope: &mut Vec<(Option<String>, V)>,
    ) -> R {
        match op {
            CollectionOpKind::Size => Ok(V::I(items.len() as i64)),
            CollectionOpKind::IsEmpty => Ok(V::B(items.is_empty())),
            CollectionOpKind::NotEmpty => Ok(V::B(!items.is_empty())),
            CollectionOpKind::Includes => {
                let needle = self.run(body.ok_or(())?, scope)?;
                Ok(V::B(items.iter().any(|x| same(x, &needle))))
            }
            _ => {
                let body = body.ok_or(())?;
                let mut results = Vec::new();
                for item in &items {
                    scope.push((iterator.clone(), item.clone()));
                    let v = self.run(body, scope);
                    scope.pop();
                    let v = v?;
                    match op {
                        CollectionOpKind::Collect => {
                            if matches!(v, V::Many(_)) {
                                return Err(());
                            }
                            results.push(v);
                        }
                        _ => {
                            let V::B(b) = v else { return Err(()) };
                            if op == CollectionOpKind::ForAll && !b {
                                return Ok(V::B(false));
                            }
                            if op == CollectionOpKind::Exists && b {
                                return Ok(V::B(true));
                            }
                            if b {
                                results.push(item.clone());
                            }
                        }
                    }
                }
                Ok(match op {
                    CollectionOpKind::ForAll => V::B(true),
                    CollectionOpKind::Exists => V::B(false),
                    _ => V::Many(results),
                })
            }
        }
    }
}

/// Outcome of `body` with `self` bound to the object `self_id`.
pub fn ocl_outcome(
    model: &ClassModel,
    objects: &ObjectModel,
    body: &OclExpr,
    self_id: &str,
) -> Outcome {
    let oracle = Oracle {
        cm: model,
        om: objects,
    };
    let mut scope = vec![(Some("self".to_string()), V::Obj(self_id.to_string()))];
    match oracle.run(body, &mut scope) {
        Ok(V::B(true)) => Outcome::True,
        Ok(V::B(false)) => Outcome::False,
        _ => Outcome::Error,
    }
}
