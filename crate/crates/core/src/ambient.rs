//! Ambient categories of the form "a C-system plus a finite patch", and the
//! functors out of the C-system into them.

use std::collections::BTreeMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::csystem::CSystem;
use crate::error::{Error, Result};
use crate::kernel::{validate_finite_category, Category, FiniteCategory, FiniteCategorySpec, FunctorData};
use crate::value::Value;

/// JSON form of a patch.
///
/// A copy `{"object": "c", "copy_of": n}` adds an object isomorphic to the
/// C-system object `n`. The `isolated` category is added with no morphisms
/// to or from anything else.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    #[serde(default)]
    pub copies: Vec<CopySpec>,
    #[serde(default)]
    pub isolated: Option<FiniteCategorySpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CopySpec {
    pub object: String,
    pub copy_of: usize,
}

pub struct Ambient {
    pub base: Rc<dyn CSystem>,
    copies: BTreeMap<Value, Value>,
    isolated: Option<FiniteCategory>,
}

impl std::fmt::Debug for Ambient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Ambient({})", self.label())
    }
}

fn base(x: &Value) -> Value {
    Value::node("base", vec![x.clone()])
}

impl Ambient {
    pub fn new(cs: Rc<dyn CSystem>, patch: &PatchSpec) -> Result<Ambient> {
        let mut copies = BTreeMap::new();
        for c in &patch.copies {
            let under = Value::Nat(c.copy_of);
            if !cs.objects_up_to(c.copy_of).contains(&under) {
                return Err(Error::Malformed(format!(
                    "copy {} of {under}, which is not an object of {}",
                    c.object,
                    cs.label()
                )));
            }
            if copies.insert(Value::sym(&c.object), under).is_some() {
                return Err(Error::Malformed(format!("patch object {} listed twice", c.object)));
            }
        }
        let isolated = match &patch.isolated {
            None => None,
            Some(spec) => {
                let cat = FiniteCategory::from_spec(spec)?;
                if let Some(w) = validate_finite_category(&cat).first_failure().and_then(|r| r.witness.clone()) {
                    return Err(Error::Gate {
                        gate: "isolated_patch".into(),
                        witness: Some(w),
                    });
                }
                if let Some(x) = cat.objects().iter().find(|x| copies.contains_key(*x)) {
                    return Err(Error::Malformed(format!("patch object {x} listed twice")));
                }
                Some(cat)
            }
        };
        Ok(Ambient {
            base: cs,
            copies,
            isolated,
        })
    }

    /// The C-system object a base object or copy stands for.
    fn under(&self, a: &Value) -> Option<Value> {
        match a.args_of("base") {
            Some([x]) => Some(x.clone()),
            _ => self.copies.get(a).cloned(),
        }
    }

    fn isolated(&self) -> &FiniteCategory {
        self.isolated.as_ref().expect("isolated patch object")
    }

    fn lift(&self, a: &Value, b: &Value, f: Value) -> Value {
        if a.args_of("base").is_some() && b.args_of("base").is_some() {
            Value::node("base", vec![f])
        } else {
            Value::node("via", vec![a.clone(), b.clone(), f])
        }
    }

    /// The underlying C-system morphism of a base or copy morphism.
    fn underlying<'a>(&self, f: &'a Value) -> Option<&'a Value> {
        match f {
            Value::Node("base", args) => args.first(),
            Value::Node("via", args) => args.get(2),
            _ => None,
        }
    }

    fn patch_index(&self, f: &Value) -> usize {
        match f.args_of("patch") {
            Some([m]) => self.isolated().morphism_index(m).expect("patch morphism"),
            _ => panic!("{f} is not an ambient morphism"),
        }
    }
}

impl Category for Ambient {
    fn label(&self) -> String {
        if self.copies.is_empty() && self.isolated.is_none() {
            self.base.label()
        } else {
            format!("{}+patch", self.base.label())
        }
    }

    fn grade(&self, a: &Value) -> usize {
        match self.under(a) {
            Some(x) => self.base.length(&x),
            None => {
                let iso = self.isolated();
                iso.grade_of(iso.object_index(a).expect("ambient object"))
            }
        }
    }

    fn objects_up_to(&self, bound: usize) -> Vec<Value> {
        let mut out: Vec<Value> = self.base.objects_up_to(bound).iter().map(base).collect();
        out.extend(
            self.copies
                .iter()
                .filter(|(_, x)| self.base.length(x) <= bound)
                .map(|(c, _)| c.clone()),
        );
        if let Some(iso) = &self.isolated {
            out.extend(
                (0..iso.object_count())
                    .filter(|&k| iso.grade_of(k) <= bound)
                    .map(|k| iso.object(k).clone()),
            );
        }
        out
    }

    fn hom(&self, a: &Value, b: &Value) -> Vec<Value> {
        match (self.under(a), self.under(b)) {
            (Some(x), Some(y)) => self
                .base
                .hom(&x, &y)
                .into_iter()
                .map(|f| self.lift(a, b, f))
                .collect(),
            (None, None) => {
                let iso = self.isolated();
                let (i, j) = (iso.object_index(a).unwrap(), iso.object_index(b).unwrap());
                iso.hom_indices(i, j)
                    .iter()
                    .map(|&k| Value::node("patch", vec![iso.morphism(k).clone()]))
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    fn dom(&self, f: &Value) -> Value {
        match f {
            Value::Node("base", args) => base(&self.base.dom(&args[0])),
            Value::Node("via", args) => args[0].clone(),
            _ => {
                let iso = self.isolated();
                iso.object(iso.dom_of(self.patch_index(f))).clone()
            }
        }
    }

    fn cod(&self, f: &Value) -> Value {
        match f {
            Value::Node("base", args) => base(&self.base.cod(&args[0])),
            Value::Node("via", args) => args[1].clone(),
            _ => {
                let iso = self.isolated();
                iso.object(iso.cod_of(self.patch_index(f))).clone()
            }
        }
    }

    fn id(&self, a: &Value) -> Value {
        match self.under(a) {
            Some(x) => self.lift(a, a, self.base.id(&x)),
            None => {
                let iso = self.isolated();
                let k = iso.identity_of(iso.object_index(a).expect("ambient object"));
                Value::node("patch", vec![iso.morphism(k).clone()])
            }
        }
    }

    fn compose(&self, f: &Value, g: &Value) -> Value {
        match (self.underlying(f), self.underlying(g)) {
            (Some(u), Some(v)) => self.lift(&self.dom(f), &self.cod(g), self.base.compose(u, v)),
            _ => {
                let (u, v) = (&f.args_of("patch").unwrap()[0], &g.args_of("patch").unwrap()[0]);
                Value::node("patch", vec![self.isolated().compose(u, v)])
            }
        }
    }
}

/// The functor kinds a job may name.
pub const FUNCTOR_KINDS: &[&str] = &["inclusion", "collapse"];

/// `inclusion` sends `x` to its base copy; `collapse` sends everything to
/// the base copy of `pt`.
pub fn ambient_functor(kind: &str, cs: &Rc<dyn CSystem>, ambient: &Rc<Ambient>) -> Result<FunctorData> {
    match kind {
        "inclusion" => Ok(FunctorData::new(
            cs.clone(),
            ambient.clone(),
            base,
            |f| Value::node("base", vec![f.clone()]),
        )),
        "collapse" => {
            let pt = cs.pt();
            let id = cs.id(&pt);
            Ok(FunctorData::new(
                cs.clone(),
                ambient.clone(),
                move |_| base(&pt),
                move |_| Value::node("base", vec![id.clone()]),
            ))
        }
        _ => Err(Error::Malformed(format!("unknown functor `{kind}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csystem::{OneType, UnitSystem};
    use crate::kernel::{probe_fragment, validate_functor};

    fn patch(json: &str) -> PatchSpec {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn copy_is_a_duplicate() {
        let cs: Rc<dyn CSystem> = Rc::new(OneType);
        let amb = Ambient::new(cs, &patch(r#"{"copies":[{"object":"c","copy_of":2}]}"#)).unwrap();
        let c = Value::sym("c");
        assert_eq!(amb.grade(&c), 2);
        assert_eq!(amb.hom(&c, &base(&1.into())).len(), 2);
        assert_eq!(amb.hom(&base(&2.into()), &c).len(), 4);
        let frag = probe_fragment(&amb, 2);
        assert_eq!(frag.object_count(), 4);
        assert!(validate_finite_category(&frag).passed());
        assert_eq!(frag.external_pairs(), 0);
    }

    #[test]
    fn isolated_object_has_no_arrows_out() {
        let cs: Rc<dyn CSystem> = Rc::new(UnitSystem);
        let amb = Ambient::new(
            cs,
            &patch(
                r#"{"isolated":{"objects":["d"],"morphisms":[{"id":"idd","dom":"d","cod":"d"}],
                    "identities":{"d":"idd"},"composition":[["idd","idd","idd"]]}}"#,
            ),
        )
        .unwrap();
        let d = Value::sym("d");
        assert!(amb.hom(&d, &base(&0.into())).is_empty());
        assert_eq!(amb.hom(&d, &d).len(), 1);
        assert!(validate_finite_category(&probe_fragment(&amb, 3)).passed());
    }

    #[test]
    fn functors_into_the_ambient() {
        let cs: Rc<dyn CSystem> = Rc::new(UnitSystem);
        let amb = Rc::new(Ambient::new(cs.clone(), &PatchSpec::default()).unwrap());
        for kind in FUNCTOR_KINDS {
            assert!(validate_functor(&ambient_functor(kind, &cs, &amb).unwrap(), 3).passed());
        }
        assert!(ambient_functor("nope", &cs, &amb).is_err());
    }

    #[test]
    fn copy_of_a_missing_object_is_malformed() {
        let cs: Rc<dyn CSystem> = Rc::new(crate::csystem::PointSystem);
        let r = Ambient::new(cs, &patch(r#"{"copies":[{"object":"c","copy_of":1}]}"#));
        assert!(matches!(r, Err(Error::Malformed(_))));
    }
}
