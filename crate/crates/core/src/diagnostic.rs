//! Diagnostics shared by every checker, parser and generator in the crate.
//!
//! Checks never abort on the first problem: they accumulate [`Diagnostic`]s
//! and hand the whole list back. Every diagnostic carries a [`Code`] from a
//! closed catalog so tools can match on it without parsing messages.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! codes {
    ($($(#[$doc:meta])* $variant:ident => $text:literal,)*) => {
        /// The diagnostic catalog.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Code {
            $($(#[$doc])* $variant,)*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$(Code::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => $text,)*
                }
            }
        }
    };
}

codes! {
    // class model well-formedness
    /// Identifier does not match `[A-Za-z_][A-Za-z0-9_]*`.
    InvalidIdentifier => "invalid-identifier",
    /// Two classes/enumerations share a name.
    DupName => "dup-name",
    DupAssociation => "dup-association",
    /// A property name repeats within a class or redeclares an inherited one.
    DupProperty => "dup-property",
    UnknownType => "unknown-type",
    /// `{id}` on a property whose type is not primitive.
    IdNonPrimitive => "id-non-primitive",
    EnumEmpty => "enum-empty",
    EnumDupLiteral => "enum-dup-literal",
    AssocUnknownClass => "assoc-unknown-class",
    AssocDupRole => "assoc-dup-role",
    AssocMultiComposite => "assoc-multi-composite",
    MultInvalid => "mult-invalid",
    GenUnknownClass => "gen-unknown-class",
    GenSelf => "gen-self",
    GenCycle => "gen-cycle",
    UnknownClass => "unknown-class",

    // conformance
    UnknownClassifier => "unknown-classifier",
    AbstractInstance => "abstract-instance",
    DupObject => "dup-object",
    DupSlot => "dup-slot",
    UnknownProperty => "unknown-property",
    SlotType => "slot-type",
    SlotMissing => "slot-missing",
    UnknownAssociation => "unknown-association",
    UnknownObject => "unknown-object",
    LinkEndType => "link-end-type",
    DupLink => "dup-link",
    MultLower => "mult-lower",
    MultUpper => "mult-upper",

    // parsing
    Syntax => "syntax",
    UnsupportedConstruct => "unsupported-construct",
    DupConstraint => "dup-constraint",

    // ocl evaluation
    UnknownContext => "unknown-context",
    OclRuntime => "ocl-runtime",

    // code generation
    DupGenerator => "dup-generator",
    NoSuchGenerator => "no-such-generator",
    GenUnsupported => "gen-unsupported",
    SyntheticKey => "synthetic-key",
    NameCollision => "name-collision",
    FkCycle => "fk-cycle",

    // state machines
    DupState => "dup-state",
    DupEvent => "dup-event",
    NoInitial => "no-initial",
    UnknownState => "unknown-state",
    UnknownEvent => "unknown-event",
    Nondeterministic => "nondeterministic",
    UnreachableTransition => "unreachable-transition",
    GuardError => "guard-error",

    // flexible modeling
    InferAllNull => "infer-all-null",
    InferLossyType => "infer-lossy-type",
    InferHeterogeneousEnd => "infer-heterogeneous-end",
    InferPartialSlot => "infer-partial-slot",
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A 1-based position in a named input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub fn new(file: impl Into<String>, line: usize, column: usize) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        SourceSpan {
            file: file.into(),
            line,
            column,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub location: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn error(code: Code, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            location: None,
        }
    }

    pub fn warning(code: Code, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            location: None,
        }
    }

    pub fn at(mut self, span: SourceSpan) -> Self {
        self.location = Some(span);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Renders as `severity code file:line:col message`.
    ///
    /// Diagnostics without a location use `fallback_file:0:0`.
    pub fn render(&self, fallback_file: &str) -> String {
        let loc = match &self.location {
            Some(span) => span.to_string(),
            None => format!("{fallback_file}:0:0"),
        };
        format!("{} {} {} {}", self.severity, self.code, loc, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Some(span) => write!(
                f,
                "{} {} {} {}",
                self.severity, self.code, span, self.message
            ),
            None => write!(f, "{} {} {}", self.severity, self.code, self.message),
        }
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
