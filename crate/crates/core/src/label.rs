//! Labels: the alphabet graphs are built from.
//!
//! A label is either a constant or a variable. Constants carry a small value
//! universe (symbols, numbers, strings, booleans and the error constant);
//! variables are named and rendered with a leading `?`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

/// Prefix (after the `?` sigil) reserved for engine-minted variables.
pub const RESERVED_VAR_PREFIX: &str = "_";

/// A constant value.
#[derive(Clone, Debug)]
pub enum ConstValue {
    Symbol(String),
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    /// The error constant. It has no source syntax.
    Err,
}

impl ConstValue {
    pub fn symbol(name: impl Into<String>) -> Self {
        ConstValue::Symbol(name.into())
    }

    pub fn str(s: impl Into<String>) -> Self {
        ConstValue::Str(s.into())
    }

    pub fn is_err(&self) -> bool {
        matches!(self, ConstValue::Err)
    }

    /// Numeric view used by arithmetic and numeric aggregates.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ConstValue::Int(i) => Some(*i as f64),
            ConstValue::Float(f) => Some(*f),
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ConstValue::Int(_) | ConstValue::Float(_))
    }

    fn rank(&self) -> u8 {
        match self {
            ConstValue::Symbol(_) => 0,
            ConstValue::Int(_) => 1,
            ConstValue::Float(_) => 2,
            ConstValue::Str(_) => 3,
            ConstValue::Bool(_) => 4,
            ConstValue::Err => 5,
        }
    }
}

// Floats compare by bit pattern so that labels form a proper set.
impl PartialEq for ConstValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ConstValue {}

impl Ord for ConstValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use ConstValue::*;
        match (self, other) {
            (Symbol(a), Symbol(b)) | (Str(a), Str(b)) => a.cmp(b),
            (Int(a), Int(b)) => a.cmp(b),
            (Float(a), Float(b)) => a.total_cmp(b),
            (Bool(a), Bool(b)) => a.cmp(b),
            (Err, Err) => Ordering::Equal,
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for ConstValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for ConstValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            ConstValue::Symbol(s) | ConstValue::Str(s) => s.hash(state),
            ConstValue::Int(i) => i.hash(state),
            ConstValue::Float(f) => f.to_bits().hash(state),
            ConstValue::Bool(b) => b.hash(state),
            ConstValue::Err => {}
        }
    }
}

impl fmt::Display for ConstValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstValue::Symbol(s) => f.write_str(s),
            ConstValue::Int(i) => write!(f, "{i}"),
            // Debug keeps a '.' or an exponent, so the text reads back as a float.
            ConstValue::Float(x) => write!(f, "{x:?}"),
            ConstValue::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            ConstValue::Bool(b) => write!(f, "{b}"),
            ConstValue::Err => f.write_str("err"),
        }
    }
}

/// A graph label: a constant or a variable.
///
/// Variable names are stored without the `?` sigil.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Const(ConstValue),
    Var(String),
}

impl Label {
    pub fn var(name: impl Into<String>) -> Self {
        Label::Var(name.into())
    }

    pub fn sym(name: impl Into<String>) -> Self {
        Label::Const(ConstValue::Symbol(name.into()))
    }

    pub fn int(i: i64) -> Self {
        Label::Const(ConstValue::Int(i))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Label::Var(_))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Label::Var(v) => Some(v),
            Label::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&ConstValue> {
        match self {
            Label::Const(c) => Some(c),
            Label::Var(_) => None,
        }
    }

    /// Order used for tables and serialized output: by rendered text, with
    /// the structural order breaking ties between labels that render alike.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.to_string()
            .cmp(&other.to_string())
            .then_with(|| self.cmp(other))
    }
}

impl From<ConstValue> for Label {
    fn from(c: ConstValue) -> Self {
        Label::Const(c)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Const(c) => c.fmt(f),
            Label::Var(v) => write!(f, "?{v}"),
        }
    }
}

/// Whether `name` is a variable name only the engine may mint.
pub fn is_reserved_var(name: &str) -> bool {
    name.starts_with(RESERVED_VAR_PREFIX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        assert_eq!(Label::var("a1").to_string(), "?a1");
        assert_eq!(Label::sym("auth1").to_string(), "auth1");
        assert_eq!(Label::int(-5).to_string(), "-5");
        assert_eq!(Label::Const(ConstValue::Float(5.0)).to_string(), "5.0");
        assert_eq!(
            Label::Const(ConstValue::str("a\"b\\c")).to_string(),
            r#""a\"b\\c""#
        );
    }

    #[test]
    fn int_and_float_are_distinct_labels() {
        assert_ne!(
            Label::Const(ConstValue::Int(1)),
            Label::Const(ConstValue::Float(1.0))
        );
    }

    #[test]
    fn canonical_order_is_textual() {
        let mut v = vec![Label::sym("mes2"), Label::var("x"), Label::sym("auth3")];
        v.sort_by(Label::canonical_cmp);
        assert_eq!(
            v,
            vec![Label::var("x"), Label::sym("auth3"), Label::sym("mes2")]
        );
    }
}
