use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown class `{0}`")]
    UnknownClass(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimitiveType {
    Int,
    Float,
    Str,
    Bool,
}

impl PrimitiveType {
    pub const ALL: [PrimitiveType; 4] = [
        PrimitiveType::Int,
        PrimitiveType::Float,
        PrimitiveType::Str,
        PrimitiveType::Bool,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PrimitiveType::Int => "int",
            PrimitiveType::Float => "float",
            PrimitiveType::Str => "str",
            PrimitiveType::Bool => "bool",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "int" => Some(PrimitiveType::Int),
            "float" => Some(PrimitiveType::Float),
            "str" => Some(PrimitiveType::Str),
            "bool" => Some(PrimitiveType::Bool),
            _ => None,
        }
    }
}

/// The declared type of a property: a primitive, or the name of a class or
/// enumeration in the same model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeRef {
    Primitive(PrimitiveType),
    Named(String),
}

impl TypeRef {
    pub fn named(name: impl Into<String>) -> Self {
        TypeRef::Named(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            TypeRef::Primitive(p) => p.as_str(),
            TypeRef::Named(n) => n,
        }
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<PrimitiveType> for TypeRef {
    fn from(p: PrimitiveType) -> Self {
        TypeRef::Primitive(p)
    }
}

/// What a [`TypeRef`] points at once looked up in a model.
#[derive(Debug, Clone, Copy)]
pub enum ResolvedType<'m> {
    Primitive(PrimitiveType),
    Class(&'m ClassDef),
    Enum(&'m EnumDef),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Property {
    pub name: String,
    pub declared_type: TypeRef,
    pub is_id: bool,
}

impl Property {
    pub fn new(name: impl Into<String>, declared_type: impl Into<TypeRef>) -> Self {
        Property {
            name: name.into(),
            declared_type: declared_type.into(),
            is_id: false,
        }
    }

    pub fn id(mut self) -> Self {
        self.is_id = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassDef {
    pub name: String,
    pub is_abstract: bool,
    pub properties: Vec<Property>,
}

impl ClassDef {
    pub fn new(name: impl Into<String>) -> Self {
        ClassDef {
            name: name.into(),
            is_abstract: false,
            properties: Vec::new(),
        }
    }

    pub fn abstract_class(mut self) -> Self {
        self.is_abstract = true;
        self
    }

    pub fn with_property(mut self, property: Property) -> Self {
        self.properties.push(property);
        self
    }

    pub fn attr(self, name: &str, ty: impl Into<TypeRef>) -> Self {
        self.with_property(Property::new(name, ty))
    }

    pub fn id_attr(self, name: &str, ty: impl Into<TypeRef>) -> Self {
        self.with_property(Property::new(name, ty).id())
    }

    pub fn property(&self, name: &str) -> Option<&Property> {
        self.properties.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnumDef {
    pub name: String,
    pub literals: Vec<String>,
}

impl EnumDef {
    pub fn new<I, S>(name: impl Into<String>, literals: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        EnumDef {
            name: name.into(),
            literals: literals.into_iter().map(Into::into).collect(),
        }
    }

    pub fn has_literal(&self, literal: &str) -> bool {
        self.literals.iter().any(|l| l == literal)
    }
}

/// `[lower, upper]`; `upper == None` is unbounded (`*`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Multiplicity {
    pub lower: u32,
    pub upper: Option<u32>,
}

impl Multiplicity {
    pub const ONE: Multiplicity = Multiplicity::new(1, Some(1));
    pub const OPTIONAL: Multiplicity = Multiplicity::new(0, Some(1));
    pub const MANY: Multiplicity = Multiplicity::new(0, None);
    pub const ONE_OR_MORE: Multiplicity = Multiplicity::new(1, None);

    pub const fn new(lower: u32, upper: Option<u32>) -> Self {
        Multiplicity { lower, upper }
    }

    pub fn is_valid(&self) -> bool {
        match self.upper {
            Some(u) => u >= 1 && self.lower <= u,
            None => true,
        }
    }

    /// Upper bound of at most one.
    pub fn is_single(&self) -> bool {
        matches!(self.upper, Some(u) if u <= 1)
    }

    pub fn admits(&self, count: usize) -> bool {
        count as u64 >= self.lower as u64 && self.upper.is_none_or(|u| count as u64 <= u as u64)
    }
}

impl Default for Multiplicity {
    fn default() -> Self {
        Multiplicity::MANY
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.lower, self.upper) {
            (0, None) => f.write_str("*"),
            (l, None) => write!(f, "{l}..*"),
            (l, Some(u)) if l == u => write!(f, "{l}"),
            (l, Some(u)) => write!(f, "{l}..{u}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed multiplicity `{0}`")]
pub struct MultiplicityParseError(pub String);

impl FromStr for Multiplicity {
    type Err = MultiplicityParseError;

    /// Accepts `n`, `*`, `n..m` and `n..*`. Bounds are not checked for
    /// ordering here; see [`Multiplicity::is_valid`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || MultiplicityParseError(s.to_string());
        let bound = |b: &str| b.parse::<u32>().map_err(|_| err());
        let s = s.trim();
        if s == "*" {
            return Ok(Multiplicity::MANY);
        }
        match s.split_once("..") {
            None => {
                let n = bound(s)?;
                Ok(Multiplicity::new(n, Some(n)))
            }
            Some((lo, "*")) => Ok(Multiplicity::new(bound(lo)?, None)),
            Some((lo, hi)) => Ok(Multiplicity::new(bound(lo)?, Some(bound(hi)?))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssociationEnd {
    pub target_class: String,
    pub role: Option<String>,
    pub multiplicity: Multiplicity,
    pub is_composite: bool,
}

impl AssociationEnd {
    pub fn new(target_class: impl Into<String>, multiplicity: Multiplicity) -> Self {
        AssociationEnd {
            target_class: target_class.into(),
            role: None,
            multiplicity,
            is_composite: false,
        }
    }

    pub fn role(mut self, role: impl Into<String>) -> Self {
        self.role = Some(role.into());
        self
    }

    pub fn composite(mut self) -> Self {
        self.is_composite = true;
        self
    }

    /// Name used to navigate to this end: the role, or the target class
    /// name when no role is given.
    pub fn navigation_name(&self) -> &str {
        self.role.as_deref().unwrap_or(&self.target_class)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Association {
    pub name: String,
    pub ends: [AssociationEnd; 2],
}

impl Association {
    pub fn new(name: impl Into<String>, first: AssociationEnd, second: AssociationEnd) -> Self {
        Association {
            name: name.into(),
            ends: [first, second],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generalization {
    pub general: String,
    pub specific: String,
}

impl Generalization {
    pub fn new(general: impl Into<String>, specific: impl Into<String>) -> Self {
        Generalization {
            general: general.into(),
            specific: specific.into(),
        }
    }
}

/// A structural model: classes, enumerations, associations and
/// generalizations, each kept in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ClassModel {
    pub name: String,
    pub classes: Vec<ClassDef>,
    pub enumerations: Vec<EnumDef>,
    pub associations: Vec<Association>,
    pub generalizations: Vec<Generalization>,
}

impl ClassModel {
    pub fn new(name: impl Into<String>) -> Self {
        ClassModel {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn with_class(mut self, class: ClassDef) -> Self {
        self.classes.push(class);
        self
    }

    pub fn with_enum(mut self, enumeration: EnumDef) -> Self {
        self.enumerations.push(enumeration);
        self
    }

    pub fn with_association(mut self, association: Association) -> Self {
        self.associations.push(association);
        self
    }

    /// Adds `specific` as a subclass of `general`.
    pub fn with_generalization(mut self, general: &str, specific: &str) -> Self {
        self.generalizations
            .push(Generalization::new(general, specific));
        self
    }

    pub fn class(&self, name: &str) -> Option<&ClassDef> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn enumeration(&self, name: &str) -> Option<&EnumDef> {
        self.enumerations.iter().find(|e| e.name == name)
    }

    pub fn association(&self, name: &str) -> Option<&Association> {
        self.associations.iter().find(|a| a.name == name)
    }

    pub fn resolve_type<'m>(&'m self, ty: &TypeRef) -> Option<ResolvedType<'m>> {
        match ty {
            TypeRef::Primitive(p) => Some(ResolvedType::Primitive(*p)),
            TypeRef::Named(n) => self
                .class(n)
                .map(ResolvedType::Class)
                .or_else(|| self.enumeration(n).map(ResolvedType::Enum)),
        }
    }

    /// Direct superclasses of `class`, in generalization declaration order.
    pub fn generals_of<'m>(&'m self, class: &'m str) -> impl Iterator<Item = &'m str> + 'm {
        self.generalizations
            .iter()
            .filter(move |g| g.specific == class)
            .map(|g| g.general.as_str())
    }

    fn require_class(&self, name: &str) -> Result<&ClassDef, ModelError> {
        self.class(name)
            .ok_or_else(|| ModelError::UnknownClass(name.to_string()))
    }

    /// `class` and all its ancestors, general-most first. Each class appears
    /// once even under multiple inheritance; cycles terminate.
    pub fn linearize(&self, class: &str) -> Result<Vec<&ClassDef>, ModelError> {
        let root = self.require_class(class)?;
        let mut visited = HashSet::new();
        let mut out = Vec::new();
        self.linearize_into(root, &mut visited, &mut out);
        Ok(out)
    }

    fn linearize_into<'m>(
        &'m self,
        class: &'m ClassDef,
        visited: &mut HashSet<&'m str>,
        out: &mut Vec<&'m ClassDef>,
    ) {
        if !visited.insert(class.name.as_str()) {
            return;
        }
        for general in self.generals_of(&class.name) {
            if let Some(g) = self.class(general) {
                self.linearize_into(g, visited, out);
            }
        }
        out.push(class);
    }

    /// Inherited properties (general-most first) followed by the class's own.
    pub fn all_properties(&self, class: &str) -> Result<Vec<&Property>, ModelError> {
        Ok(self
            .linearize(class)?
            .into_iter()
            .flat_map(|c| c.properties.iter())
            .collect())
    }

    /// Reflexive-transitive closure of the generalization relation.
    pub fn is_subclass_of(&self, sub: &str, sup: &str) -> Result<bool, ModelError> {
        self.require_class(sub)?;
        self.require_class(sup)?;
        Ok(self.reaches(sub, sup))
    }

    /// Like [`ClassModel::is_subclass_of`] but treats unknown names as
    /// unrelated instead of failing.
    pub fn conforms_to(&self, sub: &str, sup: &str) -> bool {
        self.class(sub).is_some() && self.class(sup).is_some() && self.reaches(sub, sup)
    }

    fn reaches(&self, from: &str, to: &str) -> bool {
        if from == to {
            return true;
        }
        let mut stack = vec![from];
        let mut seen = HashSet::new();
        while let Some(c) = stack.pop() {
            if c == to {
                return true;
            }
            if seen.insert(c) {
                stack.extend(self.generals_of(c));
            }
        }
        false
    }

    /// Non-abstract classes that are `class` or one of its descendants, in
    /// declaration order.
    pub fn concrete_descendants(&self, class: &str) -> Vec<&ClassDef> {
        self.classes
            .iter()
            .filter(|c| !c.is_abstract && self.reaches(&c.name, class))
            .collect()
    }

    /// Association ends reachable from an instance of `class`: for every end
    /// whose target accepts `class`, yields the association and the index of
    /// the opposite end. Associations in declaration order; within one
    /// association, navigation out of end 0 comes first.
    pub fn navigable_ends<'m>(
        &'m self,
        class: &'m str,
    ) -> impl Iterator<Item = (&'m Association, usize)> + 'm {
        self.associations.iter().flat_map(move |a| {
            [(0usize, 1usize), (1, 0)]
                .into_iter()
                .filter(move |&(from, _)| self.conforms_to(class, &a.ends[from].target_class))
                .map(move |(_, to)| (a, to))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> ClassModel {
        ClassModel::new("chain")
            .with_class(ClassDef::new("A").attr("a1", PrimitiveType::Int))
            .with_class(ClassDef::new("B").attr("b1", PrimitiveType::Str))
            .with_class(ClassDef::new("C").attr("c1", PrimitiveType::Bool))
            .with_generalization("A", "B")
            .with_generalization("B", "C")
    }

    fn names(props: Vec<&Property>) -> Vec<&str> {
        props.into_iter().map(|p| p.name.as_str()).collect()
    }

    #[test]
    fn all_properties_without_generalization_is_declaration_order() {
        let m = ClassModel::new("m").with_class(
            ClassDef::new("P")
                .attr("x", PrimitiveType::Int)
                .attr("y", PrimitiveType::Int)
                .attr("z", PrimitiveType::Int),
        );
        assert_eq!(names(m.all_properties("P").unwrap()), ["x", "y", "z"]);
    }

    #[test]
    fn all_properties_puts_general_most_first() {
        let m = chain();
        assert_eq!(names(m.all_properties("B").unwrap()), ["a1", "b1"]);
        assert_eq!(names(m.all_properties("C").unwrap()), ["a1", "b1", "c1"]);
        assert_eq!(
            m.all_properties("Nope"),
            Err(ModelError::UnknownClass("Nope".into()))
        );
    }

    #[test]
    fn diamond_inherits_shared_ancestor_once() {
        let m = ClassModel::new("d")
            .with_class(ClassDef::new("Top").attr("t", PrimitiveType::Int))
            .with_class(ClassDef::new("L").attr("l", PrimitiveType::Int))
            .with_class(ClassDef::new("R").attr("r", PrimitiveType::Int))
            .with_class(ClassDef::new("Bottom").attr("b", PrimitiveType::Int))
            .with_generalization("Top", "L")
            .with_generalization("Top", "R")
            .with_generalization("L", "Bottom")
            .with_generalization("R", "Bottom");
        assert_eq!(
            names(m.all_properties("Bottom").unwrap()),
            ["t", "l", "r", "b"]
        );
    }

    #[test]
    fn subclass_relation() {
        let m = chain();
        assert_eq!(m.is_subclass_of("A", "A"), Ok(true));
        assert_eq!(m.is_subclass_of("B", "A"), Ok(true));
        assert_eq!(m.is_subclass_of("C", "A"), Ok(true));
        assert_eq!(m.is_subclass_of("A", "B"), Ok(false));
        assert!(m.is_subclass_of("A", "Z").is_err());
    }

    #[test]
    fn multiplicity_text_forms() {
        for (text, m) in [
            ("1", Multiplicity::ONE),
            ("*", Multiplicity::MANY),
            ("0..1", Multiplicity::OPTIONAL),
            ("1..*", Multiplicity::ONE_OR_MORE),
            ("2..5", Multiplicity::new(2, Some(5))),
            ("3", Multiplicity::new(3, Some(3))),
        ] {
            assert_eq!(text.parse::<Multiplicity>().unwrap(), m);
            assert_eq!(m.to_string(), text);
        }
        assert_eq!("0..*".parse::<Multiplicity>().unwrap().to_string(), "*");
        assert!("x".parse::<Multiplicity>().is_err());
        assert!("1..".parse::<Multiplicity>().is_err());
        assert!(!Multiplicity::new(3, Some(2)).is_valid());
        assert!(!Multiplicity::new(0, Some(0)).is_valid());
        assert!(Multiplicity::ONE_OR_MORE.admits(7));
        assert!(!Multiplicity::ONE_OR_MORE.admits(0));
    }
}
