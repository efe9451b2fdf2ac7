use std::rc::Rc;

use super::{CSystem, OneType, UnitSystem};
use crate::error::{Error, Result};
use crate::kernel::Category;
use crate::value::Value;

/// Single-field corruptions of the built-ins: `(name, base, change)`.
pub const MUTATION_SUITE: &[(&str, &str, &str)] = &[
    ("ft-loop", "unit", "ft(2) = 2"),
    ("length-pt", "unit", "l(pt) = 1"),
    ("pt-moved", "unit", "pt = 1"),
    ("ft-pt", "unit", "ft(pt) = 1"),
    ("section-typing", "unit", "s_f : Y -> Y+2"),
    ("length-double", "onetype", "l(n) = 2n"),
    ("proj-constant", "onetype", "p_2 = (0 -> 1)"),
    ("star-offset", "onetype", "f*X = Y+2 when Y = 1"),
    ("q-last", "onetype", "q(f,X) sends the last variable to 0"),
    ("q-prefix", "onetype", "q(f,X) sends every earlier variable to the new one"),
    ("section-nonsection", "onetype", "s_f constant 0 when Y >= 2"),
    ("section-last", "onetype", "s_f sends the new variable to 0"),
    ("compose-constant", "onetype", "f;g constant 0 for non-identity f, g"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    FtLoop,
    LengthPt,
    PtMoved,
    FtPt,
    SectionTyping,
    LengthDouble,
    ProjConstant,
    StarOffset,
    QLast,
    QPrefix,
    SectionNonsection,
    SectionLast,
    ComposeConstant,
}

/// A built-in with exactly one structure map corrupted.
pub struct Mutant {
    name: &'static str,
    inner: Rc<dyn CSystem>,
    kind: Kind,
}

pub fn mutant(name: &str) -> Result<Rc<dyn CSystem>> {
    let kind = match name {
        "ft-loop" => Kind::FtLoop,
        "length-pt" => Kind::LengthPt,
        "pt-moved" => Kind::PtMoved,
        "ft-pt" => Kind::FtPt,
        "section-typing" => Kind::SectionTyping,
        "length-double" => Kind::LengthDouble,
        "proj-constant" => Kind::ProjConstant,
        "star-offset" => Kind::StarOffset,
        "q-last" => Kind::QLast,
        "q-prefix" => Kind::QPrefix,
        "section-nonsection" => Kind::SectionNonsection,
        "section-last" => Kind::SectionLast,
        "compose-constant" => Kind::ComposeConstant,
        _ => return Err(Error::Malformed(format!("unknown mutant `{name}`"))),
    };
    let &(name, base, _) = MUTATION_SUITE
        .iter()
        .find(|(n, _, _)| *n == name)
        .expect("every kind is listed");
    let inner: Rc<dyn CSystem> = match base {
        "unit" => Rc::new(UnitSystem),
        _ => Rc::new(OneType),
    };
    Ok(Rc::new(Mutant { name, inner, kind }))
}

fn nat(x: &Value) -> usize {
    x.as_nat().expect("natural-number object")
}

fn unit_arrow(m: usize, n: usize) -> Value {
    Value::node("unit", vec![Value::Nat(m), Value::Nat(n)])
}

impl Category for Mutant {
    fn label(&self) -> String {
        format!("{}~{}", self.inner.label(), self.name)
    }

    fn grade(&self, x: &Value) -> usize {
        self.inner.grade(x)
    }

    fn objects_up_to(&self, bound: usize) -> Vec<Value> {
        self.inner.objects_up_to(bound)
    }

    fn hom(&self, a: &Value, b: &Value) -> Vec<Value> {
        self.inner.hom(a, b)
    }

    fn dom(&self, f: &Value) -> Value {
        self.inner.dom(f)
    }

    fn cod(&self, f: &Value) -> Value {
        self.inner.cod(f)
    }

    fn id(&self, x: &Value) -> Value {
        self.inner.id(x)
    }

    fn compose(&self, f: &Value, g: &Value) -> Value {
        let fg = self.inner.compose(f, g);
        if self.kind == Kind::ComposeConstant {
            let (a, c) = (self.inner.dom(f), self.inner.cod(g));
            let identity = |h: &Value| *h == self.inner.id(&self.inner.dom(h));
            if !identity(f) && !identity(g) && nat(&a) > 0 {
                return OneType::arrow(nat(&a), nat(&c), vec![0; nat(&c)]);
            }
        }
        fg
    }
}

impl CSystem for Mutant {
    fn length(&self, x: &Value) -> usize {
        let l = self.inner.length(x);
        match self.kind {
            Kind::LengthPt if l == 0 => 1,
            Kind::LengthDouble => 2 * l,
            _ => l,
        }
    }

    fn pt(&self) -> Value {
        match self.kind {
            Kind::PtMoved => Value::Nat(1),
            _ => self.inner.pt(),
        }
    }

    fn ft(&self, x: &Value) -> Value {
        match (self.kind, nat(x)) {
            (Kind::FtLoop, 2) => Value::Nat(2),
            (Kind::FtPt, 0) => Value::Nat(1),
            _ => self.inner.ft(x),
        }
    }

    fn proj(&self, x: &Value) -> Value {
        match (self.kind, nat(x)) {
            (Kind::ProjConstant, 2) => OneType::arrow(2, 1, vec![1]),
            _ => self.inner.proj(x),
        }
    }

    fn star(&self, f: &Value, x: &Value) -> Value {
        let y = nat(&self.inner.dom(f));
        match self.kind {
            Kind::StarOffset if y == 1 => Value::Nat(y + 2),
            _ => self.inner.star(f, x),
        }
    }

    fn q(&self, f: &Value, x: &Value) -> Value {
        let q = self.inner.q(f, x);
        match self.kind {
            Kind::QLast | Kind::QPrefix => {
                let (m, n, mut vs) = OneType::parts(&q);
                if self.kind == Kind::QLast {
                    *vs.last_mut().expect("positive length") = 0;
                } else {
                    let fresh = m - 1;
                    let last = vs.len() - 1;
                    vs[..last].fill(fresh);
                }
                OneType::arrow(m, n, vs)
            }
            _ => q,
        }
    }

    fn section(&self, f: &Value) -> Value {
        let s = self.inner.section(f);
        match self.kind {
            Kind::SectionTyping => {
                let y = nat(&self.inner.dom(f));
                unit_arrow(y, y + 2)
            }
            Kind::SectionNonsection | Kind::SectionLast => {
                let (m, n, mut vs) = OneType::parts(&s);
                if self.kind == Kind::SectionLast {
                    *vs.last_mut().expect("positive length") = 0;
                } else if m >= 2 {
                    vs.fill(0);
                }
                OneType::arrow(m, n, vs)
            }
            _ => s,
        }
    }
}
