//! Colimits of finite set diagrams and left Kan extension of presheaves
//! along a functor, computed pointwise over truncated comma categories.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    comma_category, is_filtered, validate_finite_category, validate_functor, CommaCategory,
    CommaObject, FiniteCategory, FiniteCategorySpec, FunctorData,
};
use crate::presheaf::{
    canonical_pullback, pointwise_iso_check, validate_naturality, validate_presheaf, NaturalIso, Presheaf,
    PresheafMorphism, Pullback, Site,
};
use crate::report::{witness, Check, Report, Verdict};
use crate::value::Value;

/// A functor from the free category on a finite graph into finite sets.
/// Sets are `{0, .., n-1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SetDiagram {
    pub sizes: Vec<usize>,
    pub arrows: Vec<Transition>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub map: Vec<usize>,
}

impl SetDiagram {
    pub fn validate(&self) -> Result<()> {
        for (k, t) in self.arrows.iter().enumerate() {
            let (Some(&n), Some(&m)) = (self.sizes.get(t.from), self.sizes.get(t.to)) else {
                return Err(Error::Malformed(format!("transition {k} has a dangling endpoint")));
            };
            if t.map.len() != n || t.map.iter().any(|&v| v >= m) {
                return Err(Error::Malformed(format!("transition {k} is not a function")));
            }
        }
        Ok(())
    }
}

/// The quotient of the disjoint union by the generated equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColimitPresentation {
    /// Class of each element of each shape object.
    pub class_of: Vec<Vec<usize>>,
    /// Least `(object, element)` of every class; classes are numbered in
    /// the order of their representatives.
    pub representatives: Vec<(usize, usize)>,
}

impl ColimitPresentation {
    pub fn class_count(&self) -> usize {
        self.representatives.len()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// The smaller root wins, so every root is the least member of its class.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

pub fn set_colimit(d: &SetDiagram) -> ColimitPresentation {
    let mut offsets = Vec::with_capacity(d.sizes.len());
    let mut total = 0;
    for &n in &d.sizes {
        offsets.push(total);
        total += n;
    }
    let mut uf = UnionFind::new(total);
    for t in &d.arrows {
        for (x, &y) in t.map.iter().enumerate() {
            uf.union(offsets[t.from] + x, offsets[t.to] + y);
        }
    }
    let mut class_of_root = HashMap::new();
    let mut representatives = Vec::new();
    let class_of = d
        .sizes
        .iter()
        .enumerate()
        .map(|(o, &n)| {
            (0..n)
                .map(|x| {
                    let root = uf.find(offsets[o] + x);
                    *class_of_root.entry(root).or_insert_with(|| {
                        representatives.push((o, x));
                        representatives.len() - 1
                    })
                })
                .collect()
        })
        .collect();
    ColimitPresentation {
        class_of,
        representatives,
    }
}

struct CommaData {
    comma: CommaCategory,
    /// Site index of each comma object's first component.
    sources: Vec<usize>,
    /// `(from, to, site morphism)` for each comma morphism.
    arrows: Vec<(usize, usize, usize)>,
}

/// Everything about `Lan_i` that does not depend on the presheaf: the
/// truncated comma categories at each target object and the reindexing maps
/// between them.
pub struct KanSetup {
    pub functor: FunctorData,
    pub source: Rc<Site>,
    pub target: Rc<Site>,
    pub truncation: usize,
    commas: Vec<CommaData>,
    reindex: Vec<Vec<usize>>,
    cache: RefCell<Vec<(Rc<Presheaf>, Rc<LanValue>)>>,
}

impl std::fmt::Debug for KanSetup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "KanSetup(T={}, {:?} -> {:?})", self.truncation, self.source, self.target)
    }
}

/// `Lan_i P`, with the colimit presentation at every target object.
#[derive(Debug)]
pub struct LanValue {
    pub presheaf: Rc<Presheaf>,
    pub colimits: Vec<ColimitPresentation>,
}

impl LanValue {
    /// Class of the element `e` of `P(y)` sitting over comma object `j` at
    /// target object `c`.
    pub fn class(&self, c: usize, j: usize, e: usize) -> usize {
        self.colimits[c].class_of[j][e]
    }
}

impl KanSetup {
    pub fn new(
        functor: FunctorData,
        source: Rc<Site>,
        target: Rc<Site>,
        truncation: usize,
    ) -> Result<KanSetup> {
        if source.bound() < truncation {
            return Err(Error::Malformed(format!(
                "source site bound {} is below truncation {truncation}",
                source.bound()
            )));
        }
        let src_frag = source.fragment();
        let commas: Vec<CommaData> = (0..target.object_count())
            .map(|c| {
                let comma = comma_category(&functor, target.object(c), truncation);
                let sources = comma
                    .objects
                    .iter()
                    .map(|o| source.index_of(&o.source).expect("comma source lies in the site"))
                    .collect();
                let arrows = comma
                    .morphisms
                    .iter()
                    .map(|m| {
                        let h = src_frag
                            .morphism_index(&m.arrow)
                            .expect("comma arrow lies in the site");
                        (m.from, m.to, h)
                    })
                    .collect();
                CommaData {
                    comma,
                    sources,
                    arrows,
                }
            })
            .collect();

        let tgt_frag = target.fragment();
        let tgt_cat = target.category();
        let reindex = (0..tgt_frag.morphism_count())
            .map(|g| {
                let (c2, c) = (tgt_frag.dom_of(g), tgt_frag.cod_of(g));
                let gv = tgt_frag.morphism(g);
                commas[c]
                    .comma
                    .objects
                    .iter()
                    .map(|o| {
                        let moved = CommaObject {
                            source: o.source.clone(),
                            arrow: tgt_cat.compose(gv, &o.arrow),
                        };
                        commas[c2]
                            .comma
                            .index_of(&moved)
                            .expect("reindexing stays in the truncated comma")
                    })
                    .collect()
            })
            .collect();

        Ok(KanSetup {
            functor,
            source,
            target,
            truncation,
            commas,
            reindex,
            cache: RefCell::new(Vec::new()),
        })
    }

    pub fn comma(&self, c: usize) -> &CommaCategory {
        &self.commas[c].comma
    }

    /// `Lan_i P`, memoized per presheaf.
    pub fn lan(&self, p: &Rc<Presheaf>) -> Rc<LanValue> {
        if let Some((_, v)) = self.cache.borrow().iter().find(|(q, _)| Rc::ptr_eq(q, p)) {
            return v.clone();
        }
        let value = Rc::new(self.compute_lan(p));
        self.cache.borrow_mut().push((p.clone(), value.clone()));
        value
    }

    /// Every presheaf extended so far, in order of first use.
    pub fn extended(&self) -> Vec<Rc<Presheaf>> {
        self.cache.borrow().iter().map(|(p, _)| p.clone()).collect()
    }

    fn compute_lan(&self, p: &Presheaf) -> LanValue {
        let colimits: Vec<ColimitPresentation> = self
            .commas
            .iter()
            .map(|cd| {
                let diagram = SetDiagram {
                    sizes: cd.sources.iter().map(|&y| p.size(y)).collect(),
                    arrows: cd
                        .arrows
                        .iter()
                        .map(|&(from, to, h)| Transition {
                            from: to,
                            to: from,
                            map: p.restriction_table(h).to_vec(),
                        })
                        .collect(),
                };
                set_colimit(&diagram)
            })
            .collect();

        let values: Vec<Vec<Value>> = colimits
            .iter()
            .zip(&self.commas)
            .map(|(col, cd)| {
                col.representatives
                    .iter()
                    .map(|&(j, e)| {
                        let o = &cd.comma.objects[j];
                        Value::node(
                            "class",
                            vec![o.source.clone(), o.arrow.clone(), p.at(cd.sources[j])[e].clone()],
                        )
                    })
                    .collect()
            })
            .collect();

        let tgt_frag = self.target.fragment();
        let restrictions = (0..tgt_frag.morphism_count())
            .map(|g| {
                let (c2, c) = (tgt_frag.dom_of(g), tgt_frag.cod_of(g));
                colimits[c]
                    .representatives
                    .iter()
                    .map(|&(j, e)| colimits[c2].class_of[self.reindex[g][j]][e])
                    .collect()
            })
            .collect();

        let presheaf = Rc::new(Presheaf::from_tables(
            &self.target,
            format!("Lan({})", p.name()),
            values,
            restrictions,
        ));
        LanValue { presheaf, colimits }
    }

    /// `Lan_i m : Lan P -> Lan Q`.
    pub fn lan_morphism(&self, m: &PresheafMorphism) -> PresheafMorphism {
        let (lp, lq) = (self.lan(m.source()), self.lan(m.target()));
        let components = (0..self.target.object_count())
            .map(|c| {
                let cd = &self.commas[c];
                lp.colimits[c]
                    .representatives
                    .iter()
                    .map(|&(j, e)| lq.class(c, j, m.apply(cd.sources[j], e)))
                    .collect()
            })
            .collect();
        PresheafMorphism::from_components(&lp.presheaf, &lq.presheaf, components)
    }

    /// Filteredness of the indexing category of each colimit, `(c ↓ i)^op`.
    pub fn filteredness(&self) -> Report {
        let src = self.source.category();
        let children = self
            .commas
            .iter()
            .enumerate()
            .map(|(c, cd)| {
                let mut r = is_filtered(&cd.comma.to_finite_category(src).opposite());
                r.name = format!("filtered:{}", self.target.object(c));
                r
            })
            .collect();
        Report::group("filteredness", children)
    }

    /// The canonical comparison of `Lan P(c)` at truncation `T` with the value
    /// at `upper.truncation` over the same source site; passes iff bijective
    /// at every target object.
    pub fn stabilization_probe(&self, upper: &KanSetup, p: &Rc<Presheaf>) -> Report {
        assert!(Rc::ptr_eq(&self.source, &upper.source), "probes share the source site");
        let name = format!("stable:{}", p.name());
        let (low, high) = (self.lan(p), upper.lan(p));
        let mut check = Check::new(name);
        for c in 0..self.target.object_count() {
            let cd = &self.commas[c];
            let ucd = &upper.commas[c];
            let mut hit = vec![false; high.colimits[c].class_count()];
            let mut injective = true;
            for &(j, e) in &low.colimits[c].representatives {
                let uj = ucd
                    .comma
                    .index_of(&cd.comma.objects[j])
                    .expect("truncations are nested");
                let k = high.class(c, uj, e);
                injective &= !std::mem::replace(&mut hit[k], true);
            }
            let ok = injective && hit.iter().all(|&h| h);
            check.expect(ok, || {
                witness([
                    ("object", self.target.object(c).to_string()),
                    ("classes_at_T", low.colimits[c].class_count().to_string()),
                    ("classes_at_T+1", high.colimits[c].class_count().to_string()),
                ])
            });
        }
        check
            .finish()
            .with_note(format!("T={} vs T+1={}", self.truncation, upper.truncation))
    }
}

/// The comparison `Lan(A ×_U Ũ) -> Lan A ×_{Lan U} Lan Ũ` for a chosen
/// pullback `pb` on the source and the chosen pullback `target` of
/// `Lan f` along `Lan p`.
pub fn pullback_comparison(kan: &KanSetup, pb: &Pullback, target: &Pullback) -> PresheafMorphism {
    let lan_pb = kan.lan(&pb.object);
    let lan_a = kan.lan(pb.first.target());
    let lan_ut = kan.lan(pb.second.target());
    let components = (0..kan.target.object_count())
        .map(|c| {
            let cd = &kan.commas[c];
            lan_pb.colimits[c]
                .representatives
                .iter()
                .map(|&(j, e)| {
                    let y = cd.sources[j];
                    let a = lan_a.class(c, j, pb.first.apply(y, e));
                    let b = lan_ut.class(c, j, pb.second.apply(y, e));
                    let v = Value::pair(
                        lan_a.presheaf.at(c)[a].clone(),
                        lan_ut.presheaf.at(c)[b].clone(),
                    );
                    target
                        .object
                        .element_index(c, &v)
                        .expect("the comparison cone commutes")
                })
                .collect()
        })
        .collect();
    PresheafMorphism::from_components(&lan_pb.presheaf, &target.object, components)
}

/// Check that `Lan` sends the chosen pullback of `p` along `f` to a
/// pullback, by certifying the comparison map bijective.
pub fn pullback_preserved(
    kan: &KanSetup,
    f: &PresheafMorphism,
    p: &PresheafMorphism,
    pb: &Pullback,
) -> Report {
    let lan_f = kan.lan_morphism(f);
    let lan_p = kan.lan_morphism(p);
    let target = canonical_pullback(&lan_f, &lan_p, format!("{}'", pb.object.name()));
    let kappa = pullback_comparison(kan, pb, &target);
    let name = format!("pullback:{}", pb.object.name());
    match pointwise_iso_check(&kappa) {
        Ok(iso) => iso.report(name),
        Err(mut r) => {
            r.name = name;
            r
        }
    }
}

/// `Lan` of the terminal presheaf is terminal: a singleton at every object.
pub fn terminal_preserved(kan: &KanSetup, terminal: &Rc<Presheaf>) -> Report {
    let lan = kan.lan(terminal);
    let mut check = Check::new("terminal");
    for c in 0..kan.target.object_count() {
        let n = lan.presheaf.size(c);
        check.expect(n == 1, || {
            witness([
                ("object", kan.target.object(c).to_string()),
                ("size", n.to_string()),
            ])
        });
    }
    check.finish()
}

/// `ρ_x : Y(i x) -> Lan Y(x)`, with its candidate inverse.
pub struct Rho {
    pub x: Value,
    pub representable: Rc<Presheaf>,
    pub source_representable: Rc<Presheaf>,
    pub iso: NaturalIso,
    pub report: Report,
}

/// Build `ρ_x` by `g ↦ [(x, g), id_x]` and certify it against the inverse
/// `[(y, f), h] ↦ f ; i(h)`.
pub fn rho_representable(kan: &KanSetup, x: &Value) -> Result<Rho> {
    rho_on(kan, x, Rc::new(Presheaf::yoneda(&kan.source, x)))
}

/// As [`rho_representable`], extending the caller's copy of `Y(x)`.
pub fn rho_on(kan: &KanSetup, x: &Value, source_rep: Rc<Presheaf>) -> Result<Rho> {
    let i = &kan.functor;
    let src = kan.source.category_rc();
    let tgt = kan.target.category_rc();
    let rep = Rc::new(Presheaf::yoneda(&kan.target, &i.object(x)));
    let lan = kan.lan(&source_rep);
    let kx = kan
        .source
        .index_of(x)
        .ok_or_else(|| Error::Malformed(format!("{x} is outside the source site")))?;
    let id_index = source_rep
        .element_index(kx, &src.id(x))
        .expect("identity is an element of Y(x)(x)");

    let mut components = Vec::with_capacity(kan.target.object_count());
    for c in 0..kan.target.object_count() {
        let comma = &kan.commas[c].comma;
        let comp = rep
            .at(c)
            .iter()
            .map(|g| {
                let j = comma
                    .index_of(&CommaObject {
                        source: x.clone(),
                        arrow: g.clone(),
                    })
                    .ok_or_else(|| Error::ComparisonFailed {
                        stage: format!("rho at truncation {}", kan.truncation),
                        object: kan.target.object(c).to_string(),
                    })?;
                Ok(lan.class(c, j, id_index))
            })
            .collect::<Result<Vec<_>>>()?;
        components.push(comp);
    }
    let forward = PresheafMorphism::from_components(&rep, &lan.presheaf, components);

    let candidate = PresheafMorphism::new(&lan.presheaf, &rep, |_, class| match class
        .args_of("class")
    {
        Some([_, f, h]) => tgt.compose(f, &i.morphism(h)),
        _ => unreachable!("Lan elements are classes"),
    })?;

    let name = format!("rho:{x}");
    let iso = pointwise_iso_check(&forward).map_err(|r| Error::Gate {
        gate: name.clone(),
        witness: r.witness,
    })?;
    let mut inverse_check = Check::new("inverse_formula");
    inverse_check.expect(iso.inverse == candidate, || {
        let (object, element, got, want) =
            crate::presheaf::first_difference(&iso.inverse, &candidate).expect("they differ");
        witness([
            ("object", object.to_string()),
            ("element", element.to_string()),
            ("inverse", got.to_string()),
            ("formula", want.to_string()),
        ])
    });
    let report = Report::group(
        name.clone(),
        vec![
            iso.report("bijective"),
            inverse_check.finish(),
            validate_naturality(&forward),
        ],
    );
    Ok(Rho {
        x: x.clone(),
        representable: rep,
        source_representable: source_rep,
        iso,
        report,
    })
}

/// The square `Y(i f) ; ρ_z = ρ_x ; Lan Y(f)` for `f : x -> z`.
pub fn rho_square(kan: &KanSetup, rx: &Rho, rz: &Rho, f: &Value) -> Report {
    let tgt = kan.target.category_rc();
    let src = kan.source.category_rc();
    let i_f = kan.functor.morphism(f);
    let yf_c = PresheafMorphism::new(&rx.representable, &rz.representable, |_, g| {
        tgt.compose(g, &i_f)
    })
    .expect("postcomposition stays in the representable");
    let yf = PresheafMorphism::new(&rx.source_representable, &rz.source_representable, |_, g| {
        src.compose(g, f)
    })
    .expect("postcomposition stays in the representable");
    let lhs = yf_c.then(&rz.iso.forward);
    let rhs = rx.iso.forward.then(&kan.lan_morphism(&yf));
    let mut check = Check::new(format!("rho_square:{f}"));
    check.expect(lhs == rhs, || {
        let (object, element, a, b) =
            crate::presheaf::first_difference(&lhs, &rhs).expect("they differ");
        witness([
            ("f", f.to_string()),
            ("object", object.to_string()),
            ("element", element.to_string()),
            ("left", a.to_string()),
            ("right", b.to_string()),
        ])
    });
    check.finish()
}

/// JSON form of a single extension problem: a functor between finite
/// categories and a presheaf on its source. Restrictions default to the
/// identity on identity morphisms.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KanProblemSpec {
    pub source: FiniteCategorySpec,
    pub target: FiniteCategorySpec,
    pub functor: FunctorSpec,
    pub presheaf: PresheafSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorSpec {
    pub objects: BTreeMap<String, String>,
    pub morphisms: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresheafSpec {
    pub values: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub restrictions: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KanOutcome {
    pub verdict: Verdict,
    pub checks: Vec<Report>,
    pub values: BTreeMap<String, Vec<String>>,
    pub diagnostics: Vec<Report>,
}

fn lookup(map: &BTreeMap<String, String>, key: &Value, what: &str) -> Result<Value> {
    map.get(&key.to_string())
        .map(Value::sym)
        .ok_or_else(|| Error::Malformed(format!("{what} has no entry for {key}")))
}

/// Validate the inputs, extend at truncation `T`, and compare with `T + 1`.
pub fn run_kan_problem(spec: &KanProblemSpec, truncation: usize) -> Result<KanOutcome> {
    let src: Rc<FiniteCategory> = Rc::new(FiniteCategory::from_spec(&spec.source)?);
    let tgt: Rc<FiniteCategory> = Rc::new(FiniteCategory::from_spec(&spec.target)?);
    for x in src.objects() {
        let y = lookup(&spec.functor.objects, x, "functor")?;
        tgt.object_index(&y)
            .ok_or_else(|| Error::Malformed(format!("{x} maps to unknown object {y}")))?;
    }
    for k in 0..src.morphism_count() {
        let f = src.morphism(k);
        let g = lookup(&spec.functor.morphisms, f, "functor")?;
        tgt.morphism_index(&g)
            .ok_or_else(|| Error::Malformed(format!("{f} maps to unknown morphism {g}")))?;
    }
    let (objects, morphisms) = (spec.functor.objects.clone(), spec.functor.morphisms.clone());
    let i = FunctorData::new(
        src.clone(),
        tgt.clone(),
        move |x| Value::sym(&objects[&x.to_string()]),
        move |f| Value::sym(&morphisms[&f.to_string()]),
    );

    let top = (0..src.object_count()).map(|k| src.grade_of(k)).max().unwrap_or(0);
    let source = Site::new(src.clone(), top.max(truncation + 1));
    let target = Site::new(tgt.clone(), (0..tgt.object_count()).map(|k| tgt.grade_of(k)).max().unwrap_or(0));
    let values = spec.presheaf.values.clone();
    let restrictions = spec.presheaf.restrictions.clone();
    let identities: Vec<Value> = (0..src.object_count())
        .map(|k| src.morphism(src.identity_of(k)).clone())
        .collect();
    let p = Presheaf::tabulate(
        &source,
        "P",
        |x| {
            values
                .get(&x.to_string())
                .map(|vs| vs.iter().map(Value::sym).collect())
                .unwrap_or_default()
        },
        |g, e| match restrictions.get(&g.to_string()).and_then(|m| m.get(&e.to_string())) {
            Some(v) => Value::sym(v),
            None if identities.contains(g) => e.clone(),
            None => Value::sym(format!("<no restriction of {e} along {g}>")),
        },
    )?;
    let p = Rc::new(p);

    let checks = vec![
        rename(validate_finite_category(&src), "source"),
        rename(validate_finite_category(&tgt), "target"),
        validate_functor(&i, top),
        validate_presheaf(&p),
    ];
    let lower = KanSetup::new(i.clone(), source.clone(), target.clone(), truncation)?;
    let upper = KanSetup::new(i, source, target.clone(), truncation + 1)?;
    let lan = lower.lan(&p);
    let values = (0..target.object_count())
        .map(|c| {
            let elems = lan.presheaf.at(c).iter().map(Value::to_string).collect();
            (target.object(c).to_string(), elems)
        })
        .collect();
    let diagnostics = vec![
        lower.stabilization_probe(&upper, &p),
        lower.filteredness().with_note("informational"),
    ];
    let ok = checks.iter().all(Report::passed) && diagnostics[0].passed();
    Ok(KanOutcome {
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        checks,
        values,
        diagnostics,
    })
}

fn rename(mut r: Report, name: &str) -> Report {
    r.name = name.into();
    r
}
