//! Uniform data carrier for objects, morphisms and presheaf elements.
//!
//! Every category in this crate (built-in C-systems, patched ambients, image
//! C-systems, comma categories, generated C-systems) speaks [`Value`]. The
//! derived total order is what makes enumeration order, colimit
//! representatives and report output deterministic.

use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Value {
    Unit,
    Nat(usize),
    Sym(String),
    Seq(Vec<Value>),
    Node(&'static str, Vec<Value>),
}

impl Value {
    pub fn sym(s: impl Into<String>) -> Self {
        Value::Sym(s.into())
    }

    pub fn node(tag: &'static str, args: Vec<Value>) -> Self {
        Value::Node(tag, args)
    }

    pub fn pair(a: Value, b: Value) -> Self {
        Value::Node("pair", vec![a, b])
    }

    pub fn nats(xs: impl IntoIterator<Item = usize>) -> Self {
        Value::Seq(xs.into_iter().map(Value::Nat).collect())
    }

    pub fn as_nat(&self) -> Option<usize> {
        match self {
            Value::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&[Value]> {
        match self {
            Value::Seq(xs) => Some(xs),
            _ => None,
        }
    }

    /// Arguments of a node carrying `tag`.
    pub fn args_of(&self, tag: &str) -> Option<&[Value]> {
        match self {
            Value::Node(t, args) if *t == tag => Some(args),
            _ => None,
        }
    }

    /// Components of an ordered pair.
    pub fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self.args_of("pair") {
            Some([a, b]) => Some((a, b)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, xs: &[Value]) -> fmt::Result {
            for (k, x) in xs.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            Value::Unit => f.write_str("()"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Sym(s) => f.write_str(s),
            Value::Seq(xs) => {
                f.write_str("[")?;
                list(f, xs)?;
                f.write_str("]")
            }
            Value::Node(tag, args) => {
                if *tag == "pair" {
                    f.write_str("<")?;
                    list(f, args)?;
                    f.write_str(">")
                } else {
                    write!(f, "{tag}(")?;
                    list(f, args)?;
                    f.write_str(")")
                }
            }
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Sym(s.to_string())
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Nat(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_compact() {
        let v = Value::node("th1", vec![Value::Nat(2), Value::Nat(3), Value::nats([0, 1, 1])]);
        assert_eq!(v.to_string(), "th1(2,3,[0,1,1])");
        assert_eq!(Value::pair(Value::Unit, Value::sym("a")).to_string(), "<(),a>");
    }

    #[test]
    fn order_is_total_and_structural() {
        let mut xs = vec![Value::sym("b"), Value::Nat(3), Value::Unit, Value::sym("a")];
        xs.sort();
        assert_eq!(xs, vec![Value::Unit, Value::Nat(3), Value::sym("a"), Value::sym("b")]);
    }
}
