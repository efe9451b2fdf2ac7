use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::Category;
use crate::error::{Error, Result};
use crate::report::{witness, Check, Report};
use crate::value::Value;

/// JSON form of a finite category. A `composition` entry `[f, g, fg]` reads
/// `f ; g = fg`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteCategorySpec {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismSpec>,
    pub identities: BTreeMap<String, String>,
    pub composition: Vec<[String; 3]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub grades: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub id: String,
    pub dom: String,
    pub cod: String,
}

/// Status of a composable pair inside a materialized category.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Composite {
    Defined(usize),
    /// The composite exists in the ambient category but lies outside this
    /// fragment.
    External,
}

#[derive(Clone, Debug)]
struct Arrow {
    id: Value,
    dom: usize,
    cod: usize,
}

/// A finite pre-category with an index-based composition table.
#[derive(Clone, Debug)]
pub struct FiniteCategory {
    label: String,
    objects: Vec<Value>,
    grades: Vec<usize>,
    object_index: HashMap<Value, usize>,
    arrows: Vec<Arrow>,
    arrow_index: HashMap<Value, usize>,
    identities: Vec<usize>,
    composition: HashMap<(usize, usize), Composite>,
    homs: HashMap<(usize, usize), Vec<usize>>,
    into: Vec<Vec<usize>>,
    out: Vec<Vec<usize>>,
}

impl FiniteCategory {
    /// Index a finite category. Only referential integrity is checked here;
    /// the category laws are the business of [`validate_finite_category`].
    ///
    /// A `None` composite marks the pair as external.
    pub fn build(
        label: impl Into<String>,
        objects: Vec<(Value, usize)>,
        morphisms: Vec<(Value, Value, Value)>,
        identities: Vec<(Value, Value)>,
        composition: Vec<(Value, Value, Option<Value>)>,
    ) -> Result<Self> {
        let mut object_index = HashMap::new();
        let mut obs = Vec::with_capacity(objects.len());
        let mut grades = Vec::with_capacity(objects.len());
        for (x, g) in objects {
            if object_index.insert(x.clone(), obs.len()).is_some() {
                return Err(Error::Malformed(format!("duplicate object {x}")));
            }
            obs.push(x);
            grades.push(g);
        }
        let lookup_ob = |x: &Value, ctx: &str| {
            object_index
                .get(x)
                .copied()
                .ok_or_else(|| Error::Malformed(format!("{ctx} refers to unknown object {x}")))
        };

        let mut arrow_index = HashMap::new();
        let mut arrows = Vec::with_capacity(morphisms.len());
        let mut homs: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut into = vec![Vec::new(); obs.len()];
        let mut out = vec![Vec::new(); obs.len()];
        for (id, dom, cod) in morphisms {
            let ctx = format!("morphism {id}");
            let (d, c) = (lookup_ob(&dom, &ctx)?, lookup_ob(&cod, &ctx)?);
            if arrow_index.insert(id.clone(), arrows.len()).is_some() {
                return Err(Error::Malformed(format!("duplicate morphism {id}")));
            }
            homs.entry((d, c)).or_default().push(arrows.len());
            into[c].push(arrows.len());
            out[d].push(arrows.len());
            arrows.push(Arrow { id, dom: d, cod: c });
        }
        let lookup_mor = |f: &Value, ctx: &str| {
            arrow_index
                .get(f)
                .copied()
                .ok_or_else(|| Error::Malformed(format!("{ctx} refers to unknown morphism {f}")))
        };

        let mut ids = vec![None; obs.len()];
        for (x, f) in identities {
            let ctx = format!("identity of {x}");
            let (xi, fi) = (lookup_ob(&x, &ctx)?, lookup_mor(&f, &ctx)?);
            if ids[xi].replace(fi).is_some_and(|old| old != fi) {
                return Err(Error::Malformed(format!("conflicting identities for {x}")));
            }
        }
        let identities = ids
            .into_iter()
            .enumerate()
            .map(|(k, id)| {
                id.ok_or_else(|| Error::Malformed(format!("object {} has no identity", obs[k])))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut table = HashMap::new();
        for (f, g, fg) in composition {
            let ctx = format!("composite {f};{g}");
            let key = (lookup_mor(&f, &ctx)?, lookup_mor(&g, &ctx)?);
            let entry = match fg {
                Some(h) => Composite::Defined(lookup_mor(&h, &ctx)?),
                None => Composite::External,
            };
            if table.insert(key, entry).is_some_and(|old| old != entry) {
                return Err(Error::Malformed(format!("conflicting entries for {ctx}")));
            }
        }

        Ok(FiniteCategory {
            label: label.into(),
            objects: obs,
            grades,
            object_index,
            arrows,
            arrow_index,
            identities,
            composition: table,
            homs,
            into,
            out,
        })
    }

    pub fn from_spec(spec: &FiniteCategorySpec) -> Result<Self> {
        for key in spec.grades.keys() {
            if !spec.objects.contains(key) {
                return Err(Error::Malformed(format!("grade given for unknown object {key}")));
            }
        }
        FiniteCategory::build(
            "finite",
            spec.objects
                .iter()
                .map(|x| (Value::sym(x), spec.grades.get(x).copied().unwrap_or(0)))
                .collect(),
            spec.morphisms
                .iter()
                .map(|m| (Value::sym(&m.id), Value::sym(&m.dom), Value::sym(&m.cod)))
                .collect(),
            spec.identities
                .iter()
                .map(|(x, f)| (Value::sym(x), Value::sym(f)))
                .collect(),
            spec.composition
                .iter()
                .map(|[f, g, h]| (Value::sym(f), Value::sym(g), Some(Value::sym(h))))
                .collect(),
        )
    }

    pub fn to_spec(&self) -> FiniteCategorySpec {
        let mut composition: Vec<[String; 3]> = self
            .composition
            .iter()
            .filter_map(|(&(f, g), c)| match c {
                Composite::Defined(h) => Some([
                    self.arrows[f].id.to_string(),
                    self.arrows[g].id.to_string(),
                    self.arrows[*h].id.to_string(),
                ]),
                Composite::External => None,
            })
            .collect();
        composition.sort();
        FiniteCategorySpec {
            objects: self.objects.iter().map(Value::to_string).collect(),
            morphisms: self
                .arrows
                .iter()
                .map(|a| MorphismSpec {
                    id: a.id.to_string(),
                    dom: self.objects[a.dom].to_string(),
                    cod: self.objects[a.cod].to_string(),
                })
                .collect(),
            identities: self
                .identities
                .iter()
                .enumerate()
                .map(|(x, &f)| (self.objects[x].to_string(), self.arrows[f].id.to_string()))
                .collect(),
            composition,
            grades: self
                .objects
                .iter()
                .zip(&self.grades)
                .filter(|(_, &g)| g > 0)
                .map(|(x, &g)| (x.to_string(), g))
                .collect(),
        }
    }

    /// Same objects and morphism ids, arrows reversed.
    pub fn opposite(&self) -> FiniteCategory {
        let mut op = self.clone();
        op.label = format!("{}^op", self.label);
        op.homs.clear();
        op.into = vec![Vec::new(); op.objects.len()];
        op.out = vec![Vec::new(); op.objects.len()];
        for (k, a) in op.arrows.iter_mut().enumerate() {
            std::mem::swap(&mut a.dom, &mut a.cod);
            op.homs.entry((a.dom, a.cod)).or_default().push(k);
            op.into[a.cod].push(k);
            op.out[a.dom].push(k);
        }
        op.composition = self
            .composition
            .iter()
            .map(|(&(f, g), &c)| ((g, f), c))
            .collect();
        op
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn object(&self, k: usize) -> &Value {
        &self.objects[k]
    }

    pub fn objects(&self) -> &[Value] {
        &self.objects
    }

    pub fn grade_of(&self, k: usize) -> usize {
        self.grades[k]
    }

    pub fn object_index(&self, x: &Value) -> Option<usize> {
        self.object_index.get(x).copied()
    }

    pub fn morphism(&self, k: usize) -> &Value {
        &self.arrows[k].id
    }

    pub fn morphism_index(&self, f: &Value) -> Option<usize> {
        self.arrow_index.get(f).copied()
    }

    pub fn dom_of(&self, k: usize) -> usize {
        self.arrows[k].dom
    }

    pub fn cod_of(&self, k: usize) -> usize {
        self.arrows[k].cod
    }

    pub fn identity_of(&self, x: usize) -> usize {
        self.identities[x]
    }

    pub fn composite(&self, f: usize, g: usize) -> Option<Composite> {
        self.composition.get(&(f, g)).copied()
    }

    pub fn hom_indices(&self, a: usize, b: usize) -> &[usize] {
        self.homs.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Morphisms whose codomain is object `c`.
    pub fn arrows_into(&self, c: usize) -> &[usize] {
        &self.into[c]
    }

    /// Morphisms whose domain is object `a`.
    pub fn arrows_from(&self, a: usize) -> &[usize] {
        &self.out[a]
    }

    /// The least external pair, by morphism index.
    pub fn first_external(&self) -> Option<(&Value, &Value)> {
        self.composition
            .iter()
            .filter(|(_, c)| matches!(c, Composite::External))
            .map(|(&k, _)| k)
            .min()
            .map(|(f, g)| (&self.arrows[f].id, &self.arrows[g].id))
    }

    pub fn external_pairs(&self) -> usize {
        self.composition
            .values()
            .filter(|c| matches!(c, Composite::External))
            .count()
    }

    fn arrow_label(&self, k: usize) -> String {
        let a = &self.arrows[k];
        format!("{}:{}->{}", a.id, self.objects[a.dom], self.objects[a.cod])
    }
}

impl Category for FiniteCategory {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn grade(&self, x: &Value) -> usize {
        self.object_index(x).map_or(0, |k| self.grades[k])
    }

    fn objects_up_to(&self, bound: usize) -> Vec<Value> {
        self.objects
            .iter()
            .zip(&self.grades)
            .filter(|(_, &g)| g <= bound)
            .map(|(x, _)| x.clone())
            .collect()
    }

    fn hom(&self, a: &Value, b: &Value) -> Vec<Value> {
        match (self.object_index(a), self.object_index(b)) {
            (Some(a), Some(b)) => self
                .hom_indices(a, b)
                .iter()
                .map(|&k| self.arrows[k].id.clone())
                .collect(),
            _ => Vec::new(),
        }
    }

    fn dom(&self, f: &Value) -> Value {
        let k = self.morphism_index(f).expect("unknown morphism");
        self.objects[self.arrows[k].dom].clone()
    }

    fn cod(&self, f: &Value) -> Value {
        let k = self.morphism_index(f).expect("unknown morphism");
        self.objects[self.arrows[k].cod].clone()
    }

    fn id(&self, x: &Value) -> Value {
        let k = self.object_index(x).expect("unknown object");
        self.arrows[self.identities[k]].id.clone()
    }

    fn compose(&self, f: &Value, g: &Value) -> Value {
        let (fi, gi) = (
            self.morphism_index(f).expect("unknown morphism"),
            self.morphism_index(g).expect("unknown morphism"),
        );
        match self.composite(fi, gi) {
            Some(Composite::Defined(h)) => self.arrows[h].id.clone(),
            _ => panic!("composite {f};{g} is not defined in {}", self.label),
        }
    }
}

/// Check identity, composability and associativity laws exhaustively.
/// External composites are treated as absent.
pub fn validate_finite_category(cat: &FiniteCategory) -> Report {
    let mut identity_typing = Check::new("identity_typing");
    for (x, &i) in cat.identities.iter().enumerate() {
        let a = &cat.arrows[i];
        identity_typing.expect(a.dom == x && a.cod == x, || {
            witness([("object", cat.objects[x].to_string()), ("identity", cat.arrow_label(i))])
        });
    }

    let mut composability = Check::new("composability");
    for (&(f, g), c) in sorted_entries(&cat.composition) {
        let (af, ag) = (&cat.arrows[f], &cat.arrows[g]);
        let typed = match c {
            Composite::Defined(h) => {
                let ah = &cat.arrows[*h];
                af.cod == ag.dom && ah.dom == af.dom && ah.cod == ag.cod
            }
            Composite::External => af.cod == ag.dom,
        };
        composability.expect(typed, || {
            let mut w = witness([("f", af.id.to_string()), ("g", ag.id.to_string())]);
            if let Composite::Defined(h) = c {
                w.insert("fg".into(), cat.arrow_label(*h));
            }
            w
        });
    }
    for f in 0..cat.arrows.len() {
        for &g in cat.arrows_from(cat.arrows[f].cod) {
            composability.expect(cat.composition.contains_key(&(f, g)), || {
                witness([
                    ("f", cat.arrows[f].id.to_string()),
                    ("g", cat.arrows[g].id.to_string()),
                    ("missing", "composite".to_string()),
                ])
            });
        }
    }

    let defined = |f: usize, g: usize| match cat.composite(f, g) {
        Some(Composite::Defined(h)) => Some(h),
        _ => None,
    };

    let mut identity_laws = Check::new("identity_laws");
    for f in 0..cat.arrows.len() {
        let a = &cat.arrows[f];
        let (idd, idc) = (cat.identities[a.dom], cat.identities[a.cod]);
        if let Some(h) = defined(idd, f) {
            identity_laws.expect(h == f, || {
                witness([("f", cat.arrows[idd].id.to_string()), ("g", a.id.to_string())])
            });
        }
        if let Some(h) = defined(f, idc) {
            identity_laws.expect(h == f, || {
                witness([("f", a.id.to_string()), ("g", cat.arrows[idc].id.to_string())])
            });
        }
    }

    let mut associativity = Check::new("associativity");
    for f in 0..cat.arrows.len() {
        for &g in cat.arrows_from(cat.arrows[f].cod) {
            let Some(fg) = defined(f, g) else { continue };
            for &h in cat.arrows_from(cat.arrows[g].cod) {
                let Some(gh) = defined(g, h) else { continue };
                let (Some(l), Some(r)) = (defined(fg, h), defined(f, gh)) else {
                    continue;
                };
                associativity.expect(l == r, || {
                    witness([
                        ("f", cat.arrows[f].id.to_string()),
                        ("g", cat.arrows[g].id.to_string()),
                        ("h", cat.arrows[h].id.to_string()),
                    ])
                });
            }
        }
    }

    let mut report = Report::group(
        format!("category:{}", cat.label),
        vec![
            identity_typing.finish(),
            composability.finish(),
            identity_laws.finish(),
            associativity.finish(),
        ],
    );
    let ext = cat.external_pairs();
    if ext > 0 {
        report.notes.push(format!("{ext} external composites skipped"));
    }
    report
}

fn sorted_entries<K: Ord, V>(map: &HashMap<K, V>) -> Vec<(&K, &V)> {
    let mut v: Vec<_> = map.iter().collect();
    v.sort_by(|a, b| a.0.cmp(b.0));
    v
}

/// Materialize the full sub-pre-category on objects of grade at most `bound`.
/// Composites that the ambient computes but that are not listed among the
/// fragment's morphisms are marked [`Composite::External`].
pub fn probe_fragment(cat: &dyn Category, bound: usize) -> FiniteCategory {
    let objects = cat.objects_up_to(bound);
    let mut morphisms = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for a in &objects {
        for b in &objects {
            for f in cat.hom(a, b) {
                if seen.insert(f.clone()) {
                    morphisms.push((f, a.clone(), b.clone()));
                }
            }
        }
    }
    let identities: Vec<_> = objects.iter().map(|x| (x.clone(), cat.id(x))).collect();

    let mut by_dom: HashMap<&Value, Vec<usize>> = HashMap::new();
    for (k, (_, d, _)) in morphisms.iter().enumerate() {
        by_dom.entry(d).or_default().push(k);
    }
    let listed: HashMap<&Value, usize> =
        morphisms.iter().enumerate().map(|(k, (f, _, _))| (f, k)).collect();
    let mut composition = Vec::new();
    for (f, _, c) in &morphisms {
        for &g in by_dom.get(c).map(Vec::as_slice).unwrap_or(&[]) {
            let g = &morphisms[g].0;
            let fg = cat.compose(f, g);
            let fg = listed.contains_key(&fg).then_some(fg);
            composition.push((f.clone(), g.clone(), fg));
        }
    }

    // An identity the hom listing forgot is still recorded, so that the law
    // checks report it rather than the indexer rejecting the fragment.
    let forgotten: Vec<_> = identities
        .iter()
        .filter(|(_, i)| !listed.contains_key(i))
        .map(|(x, i)| (i.clone(), x.clone(), x.clone()))
        .collect();
    morphisms.extend(forgotten);
    let with_grades = objects.iter().map(|x| (x.clone(), cat.grade(x))).collect();
    FiniteCategory::build(
        format!("{}|{bound}", cat.label()),
        with_grades,
        morphisms,
        identities,
        composition,
    )
    .expect("fragment of a computable category is well-formed")
}

/// Filteredness: nonempty, every pair of objects has a cocone, every
/// parallel pair is coequalized by some arrow out of its codomain.
pub fn is_filtered(cat: &FiniteCategory) -> Report {
    let name = format!("filtered:{}", cat.label);
    if cat.objects.is_empty() {
        return Report::fail(name, witness([("reason", "empty category")]));
    }
    let n = cat.objects.len();
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|a| (0..n).map(|c| !cat.hom_indices(a, c).is_empty()).collect())
        .collect();

    let mut cocones = Check::new("cocones");
    for a in 0..n {
        for b in a..n {
            cocones.expect((0..n).any(|c| reach[a][c] && reach[b][c]), || {
                witness([("a", &cat.objects[a]), ("b", &cat.objects[b])])
            });
        }
    }

    let mut coequalizers = Check::new("coequalizers");
    for a in 0..n {
        for b in 0..n {
            let par = cat.hom_indices(a, b);
            for (k, &f) in par.iter().enumerate() {
                for &g in &par[k + 1..] {
                    let ok = cat.arrows_from(b).iter().any(|&h| {
                        match (cat.composite(f, h), cat.composite(g, h)) {
                            (Some(Composite::Defined(x)), Some(Composite::Defined(y))) => x == y,
                            _ => false,
                        }
                    });
                    coequalizers.expect(ok, || {
                        witness([
                            ("f", cat.arrow_label(f)),
                            ("g", cat.arrow_label(g)),
                        ])
                    });
                }
            }
        }
    }
    Report::group(name, vec![cocones.finish(), coequalizers.finish()])
}
