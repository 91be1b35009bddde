//! Random generators for class models, object models and OCL expressions.

use rand::seq::IndexedRandom;
use rand::Rng;

use buml::model::{
    Association, AssociationEnd, ClassDef, ClassModel, EnumDef, Link, Multiplicity, ObjectDef,
    ObjectModel, PrimitiveType, Property, TypeRef, Value,
};
use buml::ocl::{BinaryOp, CollectionOpKind, OclExpr, UnaryOp};

const PRIMS: [PrimitiveType; 4] = [
    PrimitiveType::Int,
    PrimitiveType::Float,
    PrimitiveType::Str,
    PrimitiveType::Bool,
];

fn multiplicity<R: Rng>(rng: &mut R) -> Multiplicity {
    let lower = rng.random_range(0..=2);
    let upper = match rng.random_range(0..3) {
        0 => None,
        _ => Some(rng.random_range(lower.max(1)..=3)),
    };
    Multiplicity { lower, upper }
}

/// A valid class model with at most 8 classes, 5 properties per class,
/// 2 enumerations and 6 associations. Generalizations only point from
/// earlier to later classes, so there are no cycles; property names are
/// unique model-wide, so inheritance never clashes.
pub fn class_model<R: Rng>(rng: &mut R) -> ClassModel {
    let name = if rng.random_bool(0.2) {
        String::new()
    } else {
        format!("m{}", rng.random_range(0..1000))
    };
    let mut m = ClassModel::new(name);
    let n_enums = rng.random_range(0..=2);
    for e in 0..n_enums {
        let n_lits = rng.random_range(1..=4);
        m = m.with_enum(EnumDef::new(
            format!("E{e}"),
            (0..n_lits).map(|l| format!("L{l}")),
        ));
    }
    let n_classes = rng.random_range(0..=8);
    for c in 0..n_classes {
        let mut class = ClassDef::new(format!("C{c}"));
        class.is_abstract = rng.random_bool(0.2);
        for p in 0..rng.random_range(0..=5) {
            let name = format!("p{c}_{p}");
            let ty: TypeRef = match rng.random_range(0..10) {
                0 if n_enums > 0 => TypeRef::named(format!("E{}", rng.random_range(0..n_enums))),
                1 => TypeRef::named(format!("C{}", rng.random_range(0..n_classes))),
                _ => (*PRIMS.choose(rng).unwrap()).into(),
            };
            let is_id = matches!(ty, TypeRef::Primitive(_)) && rng.random_bool(0.2);
            let mut prop = Property::new(name, ty);
            prop.is_id = is_id;
            class = class.with_property(prop);
        }
        m = m.with_class(class);
    }
    if n_classes >= 2 {
        for _ in 0..rng.random_range(0..n_classes) {
            let g = rng.random_range(0..n_classes - 1);
            let s = rng.random_range(g + 1..n_classes);
            let (g, s) = (format!("C{g}"), format!("C{s}"));
            if !m
                .generalizations
                .iter()
                .any(|x| x.general == g && x.specific == s)
            {
                m = m.with_generalization(&g, &s);
            }
        }
    }
    if n_classes > 0 {
        for a in 0..rng.random_range(0..=6) {
            let mut ends = [0, 1].map(|_| {
                AssociationEnd::new(
                    format!("C{}", rng.random_range(0..n_classes)),
                    multiplicity(rng),
                )
            });
            for (i, end) in ends.iter_mut().enumerate() {
                if rng.random_bool(0.5) {
                    end.role = Some(format!("r{a}{}", ["a", "b"][i]));
                }
            }
            ends[0].is_composite = rng.random_bool(0.2);
            let [e0, e1] = ends;
            m = m.with_association(Association::new(format!("A{a}"), e0, e1));
        }
    }
    m
}

/// Like [`class_model`] but without the shapes the SQL generator rejects by
/// design: class-typed attributes become strings, association ends point at
/// concrete leaf classes and self associations get distinct roles.
pub fn relational_class_model<R: Rng>(rng: &mut R) -> ClassModel {
    let mut m = class_model(rng);
    let classes: Vec<String> = m.classes.iter().map(|c| c.name.clone()).collect();
    for c in &mut m.classes {
        for p in &mut c.properties {
            if matches!(&p.declared_type, TypeRef::Named(n) if classes.contains(n)) {
                p.declared_type = PrimitiveType::Str.into();
            }
        }
    }
    // Foreign keys can only point at concrete classes without subclasses.
    let leaves: Vec<String> = m
        .classes
        .iter()
        .filter(|c| !c.is_abstract && !m.generalizations.iter().any(|g| g.general == c.name))
        .map(|c| c.name.clone())
        .collect();
    if leaves.is_empty() {
        m.associations.clear();
    }
    for a in &mut m.associations {
        for end in &mut a.ends {
            if !leaves.contains(&end.target_class) {
                end.target_class = leaves.choose(rng).unwrap().clone();
            }
        }
        if a.ends[0].navigation_name() == a.ends[1].navigation_name() {
            a.ends[0].role = Some(format!("{}_from", a.name.to_lowercase()));
            a.ends[1].role = Some(format!("{}_to", a.name.to_lowercase()));
        }
    }
    m
}

fn primitive_value<R: Rng>(rng: &mut R, kind: u8) -> Value {
    match kind {
        0 => Value::Int(rng.random_range(-5..=5)),
        1 => Value::Float(rng.random_range(-8..=8) as f64 / 4.0),
        2 => Value::str(["", "a", "b", "ab", "x y"][rng.random_range(0..5)]),
        3 => Value::Bool(rng.random_bool(0.5)),
        _ => Value::enum_literal("Level", ["LOW", "MID", "HIGH"][rng.random_range(0..3)]),
    }
}

/// Knobs for [`object_model`].
#[derive(Debug, Clone, Copy)]
pub struct ObjectShape {
    pub max_objects: usize,
    pub max_links: usize,
    /// Allow mixed value kinds per slot, partial slots and mixed end
    /// classes. Without it every population is representable by a flat
    /// inferred class model.
    pub heterogeneous: bool,
}

impl Default for ObjectShape {
    fn default() -> Self {
        ObjectShape {
            max_objects: 10,
            max_links: 12,
            heterogeneous: false,
        }
    }
}

/// A syntactically valid object model with no class model behind it:
/// unique ids, distinct links between declared objects.
pub fn object_model<R: Rng>(rng: &mut R, shape: ObjectShape) -> ObjectModel {
    let n_classes = rng.random_range(1..=4);
    // Per class: slot names with a fixed kind (0..=4, see primitive_value).
    let schema: Vec<Vec<(String, u8)>> = (0..n_classes)
        .map(|c| {
            (0..rng.random_range(0..=4))
                .map(|p| (format!("a{c}{p}"), rng.random_range(0..=4u8)))
                .collect()
        })
        .collect();
    let mut om = ObjectModel::new(format!("pop{}", rng.random_range(0..100)));
    let n_objects = rng.random_range(0..=shape.max_objects);
    for i in 0..n_objects {
        let c = rng.random_range(0..n_classes);
        let mut o = ObjectDef::new(format!("o{i}"), format!("K{c}"));
        for (name, kind) in &schema[c] {
            if shape.heterogeneous && rng.random_bool(0.15) {
                continue;
            }
            let value = if rng.random_bool(0.1) {
                Value::Null
            } else if shape.heterogeneous && rng.random_bool(0.2) {
                let k = rng.random_range(0..=4);
                primitive_value(rng, k)
            } else if *kind == 0 && rng.random_bool(0.3) {
                // int and float share a column: widened, not lossy.
                primitive_value(rng, 1)
            } else {
                primitive_value(rng, *kind)
            };
            o = o.with_slot(name.clone(), value);
        }
        om = om.with_object(o);
    }
    if n_objects == 0 {
        return om;
    }
    // Associations with fixed end classes.
    let assocs: Vec<(String, usize, usize)> = (0..rng.random_range(0..=3))
        .map(|a| {
            (
                format!("rel{a}"),
                rng.random_range(0..n_classes),
                rng.random_range(0..n_classes),
            )
        })
        .collect();
    for _ in 0..rng.random_range(0..=shape.max_links) {
        let Some((name, c0, c1)) = assocs.choose(rng) else {
            break;
        };
        let pick = |rng: &mut R, c: usize| -> Option<String> {
            let candidates: Vec<&ObjectDef> = om
                .objects
                .iter()
                .filter(|o| shape.heterogeneous || o.classifier == format!("K{c}"))
                .collect();
            candidates.choose(rng).map(|o| o.id.clone())
        };
        let (Some(a), Some(b)) = (pick(rng, *c0), pick(rng, *c1)) else {
            continue;
        };
        let dup = om
            .links
            .iter()
            .any(|l| l.association_name == *name && l.end(0) == a && l.end(1) == b);
        if !dup {
            om = om.with_link(Link::new(name.clone(), a, b));
        }
    }
    om
}

/// The fixed class model random OCL expressions are evaluated against.
///
/// `Node` (concrete) with subclass `Leaf`, and `Tag`. Navigation ends:
/// `Node.kids` / `Node.parent` (self association), `Node.tags` / `Tag.owner`,
/// and the role-less `Node.Tag` / `Tag.Node`.
pub fn ocl_class_model() -> ClassModel {
    ClassModel::new("ocl")
        .with_enum(EnumDef::new("Level", ["LOW", "MID", "HIGH"]))
        .with_class(
            ClassDef::new("Node")
                .attr("n", PrimitiveType::Int)
                .attr("x", PrimitiveType::Float)
                .attr("s", PrimitiveType::Str)
                .attr("b", PrimitiveType::Bool)
                .attr("lvl", TypeRef::named("Level")),
        )
        .with_class(ClassDef::new("Leaf").attr("d", PrimitiveType::Int))
        .with_class(
            ClassDef::new("Tag")
                .attr("label", PrimitiveType::Str)
                .attr("w", PrimitiveType::Int),
        )
        .with_generalization("Node", "Leaf")
        .with_association(Association::new(
            "tree",
            AssociationEnd::new("Node", Multiplicity::OPTIONAL).role("parent"),
            AssociationEnd::new("Node", Multiplicity::MANY).role("kids"),
        ))
        .with_association(Association::new(
            "tagging",
            AssociationEnd::new("Node", Multiplicity::ONE).role("owner"),
            AssociationEnd::new("Tag", Multiplicity::MANY).role("tags"),
        ))
        .with_association(Association::new(
            "fav",
            AssociationEnd::new("Node", Multiplicity::MANY),
            AssociationEnd::new("Tag", Multiplicity::OPTIONAL),
        ))
}

/// A population for [`ocl_class_model`] with at most 8 objects and 12
/// links. Link ends respect the association end classes; slots are
/// occasionally null, missing or of the wrong kind so that runtime errors
/// are exercised too.
pub fn ocl_object_model<R: Rng>(rng: &mut R) -> ObjectModel {
    let mut om = ObjectModel::new("pop");
    let n = rng.random_range(1..=8);
    for i in 0..n {
        let class = ["Node", "Leaf", "Tag"][rng.random_range(0..3)];
        let mut o = ObjectDef::new(format!("o{i}"), class);
        let props: &[(&str, u8)] = match class {
            "Tag" => &[("label", 2), ("w", 0)],
            "Leaf" => &[("n", 0), ("x", 1), ("s", 2), ("b", 3), ("lvl", 4), ("d", 0)],
            _ => &[("n", 0), ("x", 1), ("s", 2), ("b", 3), ("lvl", 4)],
        };
        for (name, kind) in props {
            match rng.random_range(0..20) {
                0 => continue,
                1 => o = o.with_slot(*name, Value::Null),
                2 => {
                    let k = rng.random_range(0..=4);
                    o = o.with_slot(*name, primitive_value(rng, k));
                }
                _ => o = o.with_slot(*name, primitive_value(rng, *kind)),
            }
        }
        om = om.with_object(o);
    }
    let nodes: Vec<String> = om
        .objects
        .iter()
        .filter(|o| o.classifier != "Tag")
        .map(|o| o.id.clone())
        .collect();
    let tags: Vec<String> = om
        .objects
        .iter()
        .filter(|o| o.classifier == "Tag")
        .map(|o| o.id.clone())
        .collect();
    for _ in 0..rng.random_range(0..=12) {
        let (assoc, a, b) = match rng.random_range(0..3) {
            0 => ("tree", nodes.choose(rng), nodes.choose(rng)),
            1 => ("tagging", nodes.choose(rng), tags.choose(rng)),
            _ => ("fav", nodes.choose(rng), tags.choose(rng)),
        };
        let (Some(a), Some(b)) = (a, b) else { continue };
        if !om
            .links
            .iter()
            .any(|l| l.association_name == assoc && l.end(0) == a && l.end(1) == b)
        {
            om = om.with_link(Link::new(assoc, a.clone(), b.clone()));
        }
    }
    om
}

/// Static type used to steer expression generation; ill-typed
/// expressions are still produced on purpose now and then.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Bool,
    Num,
    Str,
    Node,
    Tag,
    Nodes,
    Tags,
}

struct ExprGen<'r, R: Rng> {
    rng: &'r mut R,
    /// Named iterator variables in scope.
    scope: Vec<(String, Ty)>,
    fresh: usize,
}

impl<R: Rng> ExprGen<'_, R> {
    fn leaf_object(&mut self, want: Ty) -> OclExpr {
        let vars: Vec<String> = self
            .scope
            .iter()
            .filter(|(_, t)| *t == want)
            .map(|(n, _)| n.clone())
            .collect();
        if let Some(v) = vars.choose(self.rng) {
            if self.rng.random_bool(0.7) {
                return OclExpr::var(v);
            }
        }
        match want {
            Ty::Tag => OclExpr::SelfRef.nav("Tag"),
            _ => OclExpr::SelfRef,
        }
    }

    fn object(&mut self, want: Ty, depth: usize) -> OclExpr {
        if depth <= 1 || self.rng.random_bool(0.5) {
            return self.leaf_object(want);
        }
        match want {
            Ty::Tag => self.object(Ty::Node, depth - 1).nav("Tag"),
            _ => {
                if self.rng.random_bool(0.5) {
                    self.object(Ty::Node, depth - 1).nav("parent")
                } else {
                    self.object(Ty::Tag, depth - 1).nav("owner")
                }
            }
        }
    }

    fn collection(&mut self, want: Ty, depth: usize) -> OclExpr {
        let base = |g: &mut Self, d: usize| match want {
            Ty::Tags => {
                if g.rng.random_bool(0.5) {
                    g.object(Ty::Node, d).nav("tags")
                } else {
                    g.object(Ty::Tag, d).nav("Node")
                }
            }
            _ => g.object(Ty::Node, d).nav("kids"),
        };
        if depth <= 2 || self.rng.random_bool(0.6) {
            return base(self, depth.saturating_sub(1).max(1));
        }
        let elem = if want == Ty::Tags { Ty::Tag } else { Ty::Node };
        let src = base(self, depth - 1);
        self.iterate(src, elem, CollectionOpKind::Select, Ty::Bool, depth - 1)
    }

    fn iterate(
        &mut self,
        src: OclExpr,
        elem: Ty,
        op: CollectionOpKind,
        body_ty: Ty,
        depth: usize,
    ) -> OclExpr {
        let named = self.rng.random_bool(0.8);
        if named {
            let name = format!("v{}", self.fresh);
            self.fresh += 1;
            self.scope.push((name.clone(), elem));
            let body = self.expr(body_ty, depth);
            self.scope.pop();
            src.coll(op, Some(&name), Some(body))
        } else {
            // Implicit iterator: a bare attribute name of the element.
            let attr = match (elem, body_ty) {
                (Ty::Tag, Ty::Num) => "w",
                (Ty::Tag, _) => "label",
                (_, Ty::Num) => ["n", "x"][self.rng.random_range(0..2)],
                (_, Ty::Str) => "s",
                _ => "b",
            };
            let body = match body_ty {
                Ty::Bool if elem == Ty::Tag => OclExpr::binary(
                    BinaryOp::Ne,
                    OclExpr::var(attr),
                    OclExpr::lit(Value::str("")),
                ),
                _ => OclExpr::var(attr),
            };
            src.coll(op, None, Some(body))
        }
    }

    fn attr(&mut self, want: Ty, depth: usize) -> OclExpr {
        let on_tag = self.rng.random_bool(0.3);
        let obj = self.object(
            if on_tag { Ty::Tag } else { Ty::Node },
            depth.saturating_sub(1).max(1),
        );
        let name = match (on_tag, want) {
            (true, Ty::Num) => "w",
            (true, _) => "label",
            (false, Ty::Num) => ["n", "x", "d"][self.rng.random_range(0..3)],
            (false, Ty::Str) => "s",
            (false, Ty::Bool) => "b",
            _ => "lvl",
        };
        obj.nav(name)
    }

    fn literal(&mut self, want: Ty) -> OclExpr {
        let v = match want {
            Ty::Bool => Value::Bool(self.rng.random_bool(0.5)),
            Ty::Num => {
                if self.rng.random_bool(0.7) {
                    Value::Int(self.rng.random_range(-3..=6))
                } else {
                    Value::Float(self.rng.random_range(-6..=6) as f64 / 2.0)
                }
            }
            _ => Value::str(["", "a", "b", "ab"][self.rng.random_range(0..4)]),
        };
        OclExpr::lit(v)
    }

    fn expr(&mut self, want: Ty, depth: usize) -> OclExpr {
        // Occasionally ask for the wrong type to exercise runtime errors.
        let want = if self.rng.random_bool(0.05) {
            [Ty::Bool, Ty::Num, Ty::Str][self.rng.random_range(0..3)]
        } else {
            want
        };
        if depth <= 1 {
            return match self.rng.random_range(0..3) {
                0 if want == Ty::Bool => OclExpr::binary(
                    BinaryOp::Eq,
                    self.object(Ty::Node, 1),
                    OclExpr::lit(Value::Null),
                ),
                0 | 1 => self.literal(want),
                _ => self.attr(want, 1),
            };
        }
        let d = depth - 1;
        match want {
            Ty::Bool => match self.rng.random_range(0..12) {
                0 => OclExpr::unary(UnaryOp::Not, self.expr(Ty::Bool, d)),
                1 => OclExpr::binary(
                    BinaryOp::And,
                    self.expr(Ty::Bool, d),
                    self.expr(Ty::Bool, d),
                ),
                2 => OclExpr::binary(BinaryOp::Or, self.expr(Ty::Bool, d), self.expr(Ty::Bool, d)),
                3 => OclExpr::binary(
                    BinaryOp::Implies,
                    self.expr(Ty::Bool, d),
                    self.expr(Ty::Bool, d),
                ),
                4 => {
                    let op = [BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge]
                        [self.rng.random_range(0..4)];
                    let t = if self.rng.random_bool(0.8) {
                        Ty::Num
                    } else {
                        Ty::Str
                    };
                    OclExpr::binary(op, self.expr(t, d), self.expr(t, d))
                }
                5 => {
                    let op = if self.rng.random_bool(0.5) {
                        BinaryOp::Eq
                    } else {
                        BinaryOp::Ne
                    };
                    let t = [Ty::Num, Ty::Str, Ty::Bool, Ty::Node][self.rng.random_range(0..4)];
                    let (l, r) = if t == Ty::Node {
                        (self.object(Ty::Node, d), self.object(Ty::Node, d))
                    } else {
                        (self.expr(t, d), self.expr(t, d))
                    };
                    OclExpr::binary(op, l, r)
                }
                6 => {
                    let op = [CollectionOpKind::IsEmpty, CollectionOpKind::NotEmpty]
                        [self.rng.random_range(0..2)];
                    let t = if self.rng.random_bool(0.5) {
                        Ty::Nodes
                    } else {
                        Ty::Tags
                    };
                    self.collection(t, d).coll(op, None, None)
                }
                7 | 8 => {
                    let op = [CollectionOpKind::ForAll, CollectionOpKind::Exists]
                        [self.rng.random_range(0..2)];
                    let (t, e) = if self.rng.random_bool(0.5) {
                        (Ty::Nodes, Ty::Node)
                    } else {
                        (Ty::Tags, Ty::Tag)
                    };
                    let src = self.collection(t, d);
                    self.iterate(src, e, op, Ty::Bool, d)
                }
                9 => {
                    let src = self.collection(Ty::Nodes, d);
                    let arg = self.object(Ty::Node, d);
                    src.coll(CollectionOpKind::Includes, None, Some(arg))
                }
                10 => {
                    let src = self.collection(Ty::Tags, d);
                    let inner = self.iterate(src, Ty::Tag, CollectionOpKind::Collect, Ty::Num, d);
                    let arg = self.literal(Ty::Num);
                    inner.coll(CollectionOpKind::Includes, None, Some(arg))
                }
                _ => OclExpr::if_then_else(
                    self.expr(Ty::Bool, d),
                    self.expr(Ty::Bool, d),
                    self.expr(Ty::Bool, d),
                ),
            },
            Ty::Num => match self.rng.random_range(0..6) {
                0..=2 => {
                    let op = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div]
                        [self.rng.random_range(0..4)];
                    OclExpr::binary(op, self.expr(Ty::Num, d), self.expr(Ty::Num, d))
                }
                3 => OclExpr::unary(UnaryOp::Neg, self.expr(Ty::Num, d)),
                4 => {
                    let t = if self.rng.random_bool(0.5) {
                        Ty::Nodes
                    } else {
                        Ty::Tags
                    };
                    self.collection(t, d)
                        .coll(CollectionOpKind::Size, None, None)
                }
                _ => self.attr(Ty::Num, d),
            },
            _ => {
                if self.rng.random_bool(0.3) {
                    OclExpr::if_then_else(
                        self.expr(Ty::Bool, d),
                        self.expr(Ty::Str, d),
                        self.expr(Ty::Str, d),
                    )
                } else {
                    self.attr(Ty::Str, d)
                }
            }
        }
    }
}

/// A random Boolean-intended invariant body over [`ocl_class_model`] with
/// `self` a `Node` and [`OclExpr::depth`] at most `max_depth`.
pub fn ocl_expression<R: Rng>(rng: &mut R, max_depth: usize) -> OclExpr {
    loop {
        let budget = rng.random_range(1..=max_depth);
        let mut g = ExprGen {
            rng: &mut *rng,
            scope: Vec::new(),
            fresh: 0,
        };
        let e = g.expr(Ty::Bool, budget);
        if e.depth() <= max_depth {
            return e;
        }
    }
}

fn conforming_value<R: Rng>(
    rng: &mut R,
    model: &ClassModel,
    ty: &TypeRef,
    ids: &[(String, String)],
) -> Value {
    if rng.random_bool(0.1) {
        return Value::Null;
    }
    match ty {
        TypeRef::Primitive(PrimitiveType::Int) => primitive_value(rng, 0),
        TypeRef::Primitive(PrimitiveType::Float) => {
            let k = rng.random_range(0..=1);
            primitive_value(rng, k)
        }
        TypeRef::Primitive(PrimitiveType::Str) => primitive_value(rng, 2),
        TypeRef::Primitive(PrimitiveType::Bool) => primitive_value(rng, 3),
        TypeRef::Named(n) => {
            if let Some(e) = model.enumeration(n) {
                Value::enum_literal(n.clone(), e.literals.choose(rng).unwrap().clone())
            } else {
                let fitting: Vec<&String> = ids
                    .iter()
                    .filter(|(_, c)| model.conforms_to(c, n))
                    .map(|(id, _)| id)
                    .collect();
                fitting
                    .choose(rng)
                    .map_or(Value::Null, |id| Value::str(id.as_str()))
            }
        }
    }
}

/// A population for `model` that mostly conforms, with a sprinkling of
/// every kind of violation: bad slot kinds, missing, duplicate and unknown
/// slots, unknown or abstract classifiers, duplicate ids, unknown
/// associations and objects, wrongly typed link ends and duplicate links.
pub fn instance_of<R: Rng>(rng: &mut R, model: &ClassModel, max_objects: usize) -> ObjectModel {
    let mut om = ObjectModel::new("inst");
    if model.classes.is_empty() {
        return om;
    }
    let n = rng.random_range(0..=max_objects);
    let ids: Vec<(String, String)> = (0..n)
        .map(|i| {
            let class = if rng.random_bool(0.03) {
                "Nowhere".to_string()
            } else {
                let concrete: Vec<&ClassDef> =
                    model.classes.iter().filter(|c| !c.is_abstract).collect();
                match concrete.choose(rng) {
                    Some(c) if !rng.random_bool(0.05) => c.name.clone(),
                    _ => model.classes.choose(rng).unwrap().name.clone(),
                }
            };
            let id = if i > 0 && rng.random_bool(0.03) {
                format!("x{}", i - 1)
            } else {
                format!("x{i}")
            };
            (id, class)
        })
        .collect();
    for (id, class) in &ids {
        let mut o = ObjectDef::new(id.clone(), class.clone());
        for p in model.all_properties(class).unwrap_or_default() {
            match rng.random_range(0..40) {
                0 => continue,
                1 => {
                    let k = rng.random_range(0..=4);
                    o = o.with_slot(p.name.clone(), primitive_value(rng, k));
                }
                2 => {
                    let v = conforming_value(rng, model, &p.declared_type, &ids);
                    o = o
                        .with_slot(p.name.clone(), v.clone())
                        .with_slot(p.name.clone(), v);
                }
                _ => {
                    o = o.with_slot(
                        p.name.clone(),
                        conforming_value(rng, model, &p.declared_type, &ids),
                    )
                }
            }
        }
        if rng.random_bool(0.03) {
            o = o.with_slot("stray", Value::Int(1));
        }
        om = om.with_object(o);
    }
    if n == 0 {
        return om;
    }
    for _ in 0..rng.random_range(0..=2 * n) {
        let Some(a) = model.associations.choose(rng) else {
            break;
        };
        let pick = |rng: &mut R, end: usize| -> String {
            if rng.random_bool(0.03) {
                return "ghost".to_string();
            }
            let fitting: Vec<&(String, String)> = ids
                .iter()
                .filter(|(_, c)| model.conforms_to(c, &a.ends[end].target_class))
                .collect();
            match fitting.choose(rng) {
                Some((id, _)) if !rng.random_bool(0.05) => id.clone(),
                _ => ids.choose(rng).unwrap().0.clone(),
            }
        };
        let (x, y) = (pick(rng, 0), pick(rng, 1));
        let name = if rng.random_bool(0.03) {
            "NoSuchAssoc".to_string()
        } else {
            a.name.clone()
        };
        let dup = om
            .links
            .iter()
            .any(|l| l.association_name == name && l.end(0) == x && l.end(1) == y);
        if !dup || rng.random_bool(0.2) {
            om = om.with_link(Link::new(name, x, y));
        }
    }
    om
}
