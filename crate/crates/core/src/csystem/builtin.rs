use std::rc::Rc;

use super::CSystem;
use crate::error::{Error, Result};
use crate::kernel::Category;
use crate::value::Value;

pub const BUILTIN_NAMES: &[&str] = &["unit", "onetype", "point"];

pub fn builtin_csystem(name: &str) -> Result<Rc<dyn CSystem>> {
    match name {
        "unit" => Ok(Rc::new(UnitSystem)),
        "onetype" => Ok(Rc::new(OneType)),
        "point" => Ok(Rc::new(PointSystem)),
        _ => Err(Error::UnknownCSystem(name.to_string())),
    }
}

fn nat(x: &Value) -> usize {
    x.as_nat().unwrap_or_else(|| panic!("{x} is not a natural-number object"))
}

/// Objects are the naturals and every hom-set is a singleton.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitSystem;

impl UnitSystem {
    fn arrow(m: usize, n: usize) -> Value {
        Value::node("unit", vec![Value::Nat(m), Value::Nat(n)])
    }

    fn ends(f: &Value) -> (usize, usize) {
        match f.args_of("unit") {
            Some([m, n]) => (nat(m), nat(n)),
            _ => panic!("{f} is not a unit morphism"),
        }
    }
}

impl Category for UnitSystem {
    fn label(&self) -> String {
        "unit".into()
    }

    fn grade(&self, x: &Value) -> usize {
        nat(x)
    }

    fn objects_up_to(&self, bound: usize) -> Vec<Value> {
        (0..=bound).map(Value::Nat).collect()
    }

    fn hom(&self, a: &Value, b: &Value) -> Vec<Value> {
        vec![Self::arrow(nat(a), nat(b))]
    }

    fn dom(&self, f: &Value) -> Value {
        Value::Nat(Self::ends(f).0)
    }

    fn cod(&self, f: &Value) -> Value {
        Value::Nat(Self::ends(f).1)
    }

    fn id(&self, x: &Value) -> Value {
        Self::arrow(nat(x), nat(x))
    }

    fn compose(&self, f: &Value, g: &Value) -> Value {
        Self::arrow(Self::ends(f).0, Self::ends(g).1)
    }
}

impl CSystem for UnitSystem {
    fn pt(&self) -> Value {
        Value::Nat(0)
    }

    fn ft(&self, x: &Value) -> Value {
        Value::Nat(nat(x).saturating_sub(1))
    }

    fn proj(&self, x: &Value) -> Value {
        Self::arrow(nat(x), nat(x).saturating_sub(1))
    }

    fn star(&self, f: &Value, _x: &Value) -> Value {
        Value::Nat(Self::ends(f).0 + 1)
    }

    fn q(&self, f: &Value, x: &Value) -> Value {
        Self::arrow(Self::ends(f).0 + 1, nat(x))
    }

    fn section(&self, f: &Value) -> Value {
        let y = Self::ends(f).0;
        Self::arrow(y, y + 1)
    }
}

/// The C-system of a theory with one closed type: objects are the naturals,
/// and a morphism `m -> n` is a function `[n] -> [m]`, i.e. an `n`-tuple of
/// variables of the context `m`.
#[derive(Clone, Copy, Debug, Default)]
pub struct OneType;

impl OneType {
    pub fn arrow(m: usize, n: usize, values: Vec<usize>) -> Value {
        debug_assert!(values.len() == n && values.iter().all(|&v| v < m));
        Value::node("th1", vec![Value::Nat(m), Value::Nat(n), Value::nats(values)])
    }

    pub fn parts(f: &Value) -> (usize, usize, Vec<usize>) {
        match f.args_of("th1") {
            Some([m, n, vs]) => (
                nat(m),
                nat(n),
                vs.as_seq()
                    .expect("th1 values")
                    .iter()
                    .map(nat)
                    .collect(),
            ),
            _ => panic!("{f} is not a onetype morphism"),
        }
    }
}

impl Category for OneType {
    fn label(&self) -> String {
        "onetype".into()
    }

    fn grade(&self, x: &Value) -> usize {
        nat(x)
    }

    fn objects_up_to(&self, bound: usize) -> Vec<Value> {
        (0..=bound).map(Value::Nat).collect()
    }

    fn hom(&self, a: &Value, b: &Value) -> Vec<Value> {
        let (m, n) = (nat(a), nat(b));
        if m == 0 && n > 0 {
            return Vec::new();
        }
        let total = m.pow(n as u32);
        (0..total)
            .map(|mut code| {
                let mut vs = vec![0; n];
                for slot in vs.iter_mut().rev() {
                    *slot = code % m;
                    code /= m;
                }
                Self::arrow(m, n, vs)
            })
            .collect()
    }

    fn dom(&self, f: &Value) -> Value {
        Value::Nat(Self::parts(f).0)
    }

    fn cod(&self, f: &Value) -> Value {
        Value::Nat(Self::parts(f).1)
    }

    fn id(&self, x: &Value) -> Value {
        let n = nat(x);
        Self::arrow(n, n, (0..n).collect())
    }

    fn compose(&self, f: &Value, g: &Value) -> Value {
        let (a, _, fv) = Self::parts(f);
        let (_, c, gv) = Self::parts(g);
        Self::arrow(a, c, gv.iter().map(|&j| fv[j]).collect())
    }
}

impl CSystem for OneType {
    fn pt(&self) -> Value {
        Value::Nat(0)
    }

    fn ft(&self, x: &Value) -> Value {
        Value::Nat(nat(x).saturating_sub(1))
    }

    fn proj(&self, x: &Value) -> Value {
        let n = nat(x);
        let m = n.saturating_sub(1);
        Self::arrow(n, m, (0..m).collect())
    }

    fn star(&self, f: &Value, _x: &Value) -> Value {
        Value::Nat(Self::parts(f).0 + 1)
    }

    fn q(&self, f: &Value, x: &Value) -> Value {
        let (y, _, mut vs) = Self::parts(f);
        vs.push(y);
        Self::arrow(y + 1, nat(x), vs)
    }

    fn section(&self, f: &Value) -> Value {
        let (y, _, vs) = Self::parts(f);
        let mut out: Vec<usize> = (0..y).collect();
        out.push(*vs.last().expect("section of a morphism into a positive-length object"));
        Self::arrow(y, y + 1, out)
    }
}

/// The C-system with the single object `pt`.
#[derive(Clone, Copy, Debug, Default)]
pub struct PointSystem;

impl Category for PointSystem {
    fn label(&self) -> String {
        "point".into()
    }

    fn grade(&self, _x: &Value) -> usize {
        0
    }

    fn objects_up_to(&self, _bound: usize) -> Vec<Value> {
        vec![Value::Nat(0)]
    }

    fn hom(&self, _a: &Value, _b: &Value) -> Vec<Value> {
        vec![Value::sym("id")]
    }

    fn dom(&self, _f: &Value) -> Value {
        Value::Nat(0)
    }

    fn cod(&self, _f: &Value) -> Value {
        Value::Nat(0)
    }

    fn id(&self, _x: &Value) -> Value {
        Value::sym("id")
    }

    fn compose(&self, _f: &Value, _g: &Value) -> Value {
        Value::sym("id")
    }
}

impl CSystem for PointSystem {
    fn pt(&self) -> Value {
        Value::Nat(0)
    }

    fn ft(&self, _x: &Value) -> Value {
        Value::Nat(0)
    }

    fn proj(&self, _x: &Value) -> Value {
        Value::sym("id")
    }

    fn star(&self, _f: &Value, _x: &Value) -> Value {
        unreachable!("no object of positive length")
    }

    fn q(&self, _f: &Value, _x: &Value) -> Value {
        unreachable!("no object of positive length")
    }

    fn section(&self, _f: &Value) -> Value {
        unreachable!("no object of positive length")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::probe_fragment;

    #[test]
    fn unit_homs_are_singletons() {
        assert_eq!(UnitSystem.hom(&3.into(), &5.into()).len(), 1);
        let frag = probe_fragment(&UnitSystem, 2);
        assert_eq!(frag.object_count(), 3);
        assert!((0..3).all(|a| (0..3).all(|b| frag.hom_indices(a, b).len() == 1)));
    }

    #[test]
    fn onetype_hom_counts() {
        assert_eq!(OneType.hom(&2.into(), &3.into()).len(), 8);
        assert_eq!(OneType.hom(&2.into(), &1.into()).len(), 2);
        assert_eq!(OneType.hom(&0.into(), &0.into()).len(), 1);
        assert_eq!(OneType.hom(&0.into(), &1.into()).len(), 0);
    }

    #[test]
    fn onetype_sections_of_p3_over_2() {
        let p3 = OneType.proj(&3.into());
        let sections: Vec<_> = OneType
            .hom(&2.into(), &3.into())
            .into_iter()
            .filter(|s| OneType.compose(s, &p3) == OneType.id(&2.into()))
            .collect();
        assert_eq!(sections.len(), 2);
    }

    #[test]
    fn onetype_section_factors() {
        for f in OneType.hom(&2.into(), &3.into()) {
            let s = OneType.section(&f);
            let q = OneType.q(&OneType.ft_morphism(&f), &3.into());
            assert_eq!(OneType.compose(&s, &q), f);
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(builtin_csystem("nope"), Err(Error::UnknownCSystem(_))));
    }
}
