use std::fmt;
use std::rc::Rc;

use super::{probe_fragment, Category, Composite};
use crate::report::{witness, Check, Report};
use crate::value::Value;

type Map = Rc<dyn Fn(&Value) -> Value>;

/// A functor given by its object and morphism maps.
#[derive(Clone)]
pub struct FunctorData {
    pub source: Rc<dyn Category>,
    pub target: Rc<dyn Category>,
    on_objects: Map,
    on_morphisms: Map,
}

impl fmt::Debug for FunctorData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctorData")
            .field("source", &self.source.label())
            .field("target", &self.target.label())
            .finish_non_exhaustive()
    }
}

impl FunctorData {
    pub fn new(
        source: Rc<dyn Category>,
        target: Rc<dyn Category>,
        on_objects: impl Fn(&Value) -> Value + 'static,
        on_morphisms: impl Fn(&Value) -> Value + 'static,
    ) -> Self {
        FunctorData {
            source,
            target,
            on_objects: Rc::new(on_objects),
            on_morphisms: Rc::new(on_morphisms),
        }
    }

    pub fn identity(cat: Rc<dyn Category>) -> Self {
        FunctorData::new(cat.clone(), cat, Value::clone, Value::clone)
    }

    pub fn object(&self, x: &Value) -> Value {
        (self.on_objects)(x)
    }

    pub fn morphism(&self, f: &Value) -> Value {
        (self.on_morphisms)(f)
    }

    /// `self ; other` (apply `self` first).
    pub fn then(&self, other: &FunctorData) -> FunctorData {
        let (a, b) = (self.clone(), other.clone());
        let (c, d) = (self.clone(), other.clone());
        FunctorData::new(
            self.source.clone(),
            other.target.clone(),
            move |x| b.object(&a.object(x)),
            move |f| d.morphism(&c.morphism(f)),
        )
    }
}

/// Check preservation of typing, identities and composites on the
/// grade-`bound` fragment of the source.
pub fn validate_functor(functor: &FunctorData, bound: usize) -> Report {
    let frag = probe_fragment(functor.source.as_ref(), bound);
    let tgt = functor.target.as_ref();

    let mut typing = Check::new("dom_cod");
    let mut identities = Check::new("identities");
    let is_identity: Vec<bool> = {
        let mut v = vec![false; frag.morphism_count()];
        for x in 0..frag.object_count() {
            v[frag.identity_of(x)] = true;
        }
        v
    };
    let images: Vec<Value> = (0..frag.morphism_count())
        .map(|k| functor.morphism(frag.morphism(k)))
        .collect();
    let object_images: Vec<Value> = frag.objects().iter().map(|x| functor.object(x)).collect();

    for k in 0..frag.morphism_count() {
        if is_identity[k] {
            continue;
        }
        let img = &images[k];
        let (d, c) = (&object_images[frag.dom_of(k)], &object_images[frag.cod_of(k)]);
        typing.expect(&tgt.dom(img) == d && &tgt.cod(img) == c, || {
            witness([
                ("morphism", frag.morphism(k).to_string()),
                ("image", img.to_string()),
                ("expected", format!("{d}->{c}")),
            ])
        });
    }
    for x in 0..frag.object_count() {
        let k = frag.identity_of(x);
        let expected = tgt.id(&object_images[x]);
        identities.expect(images[k] == expected, || {
            witness([
                ("object", frag.object(x).to_string()),
                ("image_of_identity", images[k].to_string()),
                ("expected", expected.to_string()),
            ])
        });
    }

    let mut composites = Check::new("composites");
    if !typing.failed() && !identities.failed() {
        for f in 0..frag.morphism_count() {
            for &g in frag.arrows_from(frag.cod_of(f)) {
                let Some(Composite::Defined(fg)) = frag.composite(f, g) else {
                    continue;
                };
                let rhs = tgt.compose(&images[f], &images[g]);
                composites.expect(images[fg] == rhs, || {
                    witness([
                        ("f", frag.morphism(f).to_string()),
                        ("g", frag.morphism(g).to_string()),
                    ])
                });
            }
        }
    }

    Report::group(
        format!("functor:{}->{}", functor.source.label(), tgt.label()),
        vec![typing.finish(), identities.finish(), composites.finish()],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{FiniteCategory, FiniteCategorySpec};

    fn interval() -> Rc<dyn Category> {
        let spec: FiniteCategorySpec = serde_json::from_str(
            r#"{"objects":["0","1"],
                "morphisms":[{"id":"id0","dom":"0","cod":"0"},{"id":"id1","dom":"1","cod":"1"},{"id":"a","dom":"0","cod":"1"}],
                "identities":{"0":"id0","1":"id1"},
                "composition":[["id0","id0","id0"],["id1","id1","id1"],["id0","a","a"],["a","id1","a"]]}"#,
        )
        .unwrap();
        Rc::new(FiniteCategory::from_spec(&spec).unwrap())
    }

    #[test]
    fn identity_functor_passes() {
        let i = interval();
        assert!(validate_functor(&FunctorData::identity(i), 1).passed());
    }

    #[test]
    fn constant_functor_passes() {
        let i = interval();
        let f = FunctorData::new(i.clone(), i, |_| Value::sym("1"), |_| Value::sym("id1"));
        assert!(validate_functor(&f, 1).passed());
    }

    #[test]
    fn swapped_objects_fail_on_the_arrow() {
        let i = interval();
        let f = FunctorData::new(
            i.clone(),
            i,
            |x| match x {
                Value::Sym(s) if s == "0" => Value::sym("1"),
                _ => Value::sym("0"),
            },
            Value::clone,
        );
        let r = validate_functor(&f, 1);
        let fail = r.first_failure().unwrap();
        assert_eq!(fail.name, "dom_cod");
        assert_eq!(fail.witness.as_ref().unwrap()["morphism"], "a");
    }
}
