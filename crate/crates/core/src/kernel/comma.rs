use std::collections::HashMap;

use super::{Category, FiniteCategory, FunctorData};
use crate::value::Value;

/// An object `(y, f : c -> i(y))` of the comma category `c ↓ i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CommaObject {
    pub source: Value,
    pub arrow: Value,
}

impl CommaObject {
    pub fn to_value(&self) -> Value {
        Value::node("comma", vec![self.source.clone(), self.arrow.clone()])
    }
}

/// `h : y -> y'` with `f ; i(h) = f'`, between objects indexed into
/// [`CommaCategory::objects`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommaMorphism {
    pub from: usize,
    pub to: usize,
    pub arrow: Value,
}

/// The fragment of `c ↓ i` whose first components have grade at most
/// `truncation`.
#[derive(Clone, Debug)]
pub struct CommaCategory {
    pub base: Value,
    pub truncation: usize,
    pub objects: Vec<CommaObject>,
    pub morphisms: Vec<CommaMorphism>,
}

/// Enumerate `c ↓ i` up to `truncation`.
///
/// Objects are pairs `(y, f : c -> i(y))`, which is the orientation under
/// which pointwise left Kan extension of presheaves along `i` is left
/// adjoint to restriction.
pub fn comma_category(i: &FunctorData, c: &Value, truncation: usize) -> CommaCategory {
    let src = i.source.as_ref();
    let tgt = i.target.as_ref();
    let ys = src.objects_up_to(truncation);
    let images: Vec<Value> = ys.iter().map(|y| i.object(y)).collect();

    let mut objects = Vec::new();
    for (y, iy) in ys.iter().zip(&images) {
        for f in tgt.hom(c, iy) {
            objects.push(CommaObject {
                source: y.clone(),
                arrow: f,
            });
        }
    }
    objects.sort();
    let index: HashMap<&CommaObject, usize> =
        objects.iter().enumerate().map(|(k, o)| (o, k)).collect();

    let mut morphisms = Vec::new();
    for (from, obj) in objects.iter().enumerate() {
        for y2 in &ys {
            for h in src.hom(&obj.source, y2) {
                let f2 = tgt.compose(&obj.arrow, &i.morphism(&h));
                let key = CommaObject {
                    source: y2.clone(),
                    arrow: f2,
                };
                let to = *index
                    .get(&key)
                    .expect("comma category is closed under reindexing");
                morphisms.push(CommaMorphism { from, to, arrow: h });
            }
        }
    }

    CommaCategory {
        base: c.clone(),
        truncation,
        objects,
        morphisms,
    }
}

impl CommaCategory {
    pub fn index_of(&self, obj: &CommaObject) -> Option<usize> {
        self.objects.binary_search(obj).ok()
    }

    /// Materialize with composition inherited from the source category.
    pub fn to_finite_category(&self, source: &dyn Category) -> FiniteCategory {
        let mor_value = |m: &CommaMorphism| {
            Value::node(
                "cm",
                vec![
                    self.objects[m.from].to_value(),
                    self.objects[m.to].to_value(),
                    m.arrow.clone(),
                ],
            )
        };
        let values: Vec<Value> = self.morphisms.iter().map(mor_value).collect();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.objects.len()];
        for (k, m) in self.morphisms.iter().enumerate() {
            out[m.from].push(k);
        }
        let mut composition = Vec::new();
        for (k, m) in self.morphisms.iter().enumerate() {
            for &l in &out[m.to] {
                let n = &self.morphisms[l];
                let h = source.compose(&m.arrow, &n.arrow);
                let v = Value::node(
                    "cm",
                    vec![
                        self.objects[m.from].to_value(),
                        self.objects[n.to].to_value(),
                        h,
                    ],
                );
                composition.push((values[k].clone(), values[l].clone(), Some(v)));
            }
        }
        let identities = self
            .objects
            .iter()
            .map(|o| {
                let id = source.id(&o.source);
                (
                    o.to_value(),
                    Value::node("cm", vec![o.to_value(), o.to_value(), id]),
                )
            })
            .collect();
        FiniteCategory::build(
            format!("{}↓i|{}", self.base, self.truncation),
            self.objects
                .iter()
                .map(|o| (o.to_value(), source.grade(&o.source)))
                .collect(),
            self.morphisms
                .iter()
                .zip(values)
                .map(|(m, v)| {
                    (
                        v,
                        self.objects[m.from].to_value(),
                        self.objects[m.to].to_value(),
                    )
                })
                .collect(),
            identities,
            composition,
        )
        .expect("comma category is well-formed")
    }
}
