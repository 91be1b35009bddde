use std::fmt;

/// Kind tag of a [`Value`], used for type checks and inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKind {
    Int,
    Float,
    Str,
    Bool,
    Enum,
    Null,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    Enum {
        enumeration: String,
        literal: String,
    },
    Null,
}

impl Value {
    pub fn str(s: impl Into<String>) -> Self {
        Value::Str(s.into())
    }

    pub fn enum_literal(enumeration: impl Into<String>, literal: impl Into<String>) -> Self {
        Value::Enum {
            enumeration: enumeration.into(),
            literal: literal.into(),
        }
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Int(_) => ValueKind::Int,
            Value::Float(_) => ValueKind::Float,
            Value::Str(_) => ValueKind::Str,
            Value::Bool(_) => ValueKind::Bool,
            Value::Enum { .. } => ValueKind::Enum,
            Value::Null => ValueKind::Null,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }
}

/// Literal text as accepted by the object-model and scenario syntaxes.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            // Debug keeps a `.0` or exponent so the text re-reads as a float.
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Value::Bool(b) => write!(f, "{b}"),
            Value::Enum {
                enumeration,
                literal,
            } => write!(f, "{enumeration}::{literal}"),
            Value::Null => f.write_str("null"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeLink {
    pub property_name: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectDef {
    pub id: String,
    pub classifier: String,
    pub slots: Vec<AttributeLink>,
}

impl ObjectDef {
    pub fn new(id: impl Into<String>, classifier: impl Into<String>) -> Self {
        ObjectDef {
            id: id.into(),
            classifier: classifier.into(),
            slots: Vec::new(),
        }
    }

    pub fn with_slot(mut self, property_name: impl Into<String>, value: Value) -> Self {
        self.slots.push(AttributeLink {
            property_name: property_name.into(),
            value,
        });
        self
    }

    pub fn slot(&self, property_name: &str) -> Option<&Value> {
        self.slots
            .iter()
            .find(|s| s.property_name == property_name)
            .map(|s| &s.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinkEnd {
    pub object_id: String,
}

/// An instance of an association. `ends[i]` instantiates the association's
/// end `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Link {
    pub association_name: String,
    pub ends: [LinkEnd; 2],
}

impl Link {
    pub fn new(
        association: impl Into<String>,
        first: impl Into<String>,
        second: impl Into<String>,
    ) -> Self {
        Link {
            association_name: association.into(),
            ends: [
                LinkEnd {
                    object_id: first.into(),
                },
                LinkEnd {
                    object_id: second.into(),
                },
            ],
        }
    }

    pub fn end(&self, i: usize) -> &str {
        &self.ends[i].object_id
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObjectModel {
    pub name: String,
    pub objects: Vec<ObjectDef>,
    pub links: Vec<Link>,
}

impl ObjectModel {
    pub fn new(name: impl Into<String>) -> Self {
        ObjectModel {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn with_object(mut self, object: ObjectDef) -> Self {
        self.objects.push(object);
        self
    }

    pub fn with_link(mut self, link: Link) -> Self {
        self.links.push(link);
        self
    }

    pub fn object(&self, id: &str) -> Option<&ObjectDef> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.id == id)
    }
}
