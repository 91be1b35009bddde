//! Structural (class) models, object models, well-formedness and
//! conformance checking.

mod class;
mod conformance;
mod object;
mod validate;

pub use class::{
    Association, AssociationEnd, ClassDef, ClassModel, EnumDef, Generalization, ModelError,
    Multiplicity, MultiplicityParseError, PrimitiveType, Property, ResolvedType, TypeRef,
};
pub use conformance::{check_conformance, check_conformance_with, value_conforms};
pub use object::{AttributeLink, Link, LinkEnd, ObjectDef, ObjectModel, Value, ValueKind};
pub use validate::{is_identifier, validate_class_model};
pub(crate) use validate::{validate_located, Section};
