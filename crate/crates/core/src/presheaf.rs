//! Finite-set-valued presheaves tabulated on a probe fragment.
//!
//! A [`Site`] pairs a computable category with the grade bound at which it is
//! probed. Presheaves store their values and restriction maps as index
//! tables over the site's fragment, so every equality or isomorphism claim
//! made about them is a claim about that fragment.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::kernel::{probe_fragment, Category, Composite, FiniteCategory};
use crate::report::{witness, Check, Report};
use crate::value::Value;

pub struct Site {
    category: Rc<dyn Category>,
    bound: usize,
    fragment: FiniteCategory,
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Site({}|{})", self.category.label(), self.bound)
    }
}

impl Site {
    pub fn new(category: Rc<dyn Category>, bound: usize) -> Rc<Site> {
        let fragment = probe_fragment(category.as_ref(), bound);
        Rc::new(Site {
            category,
            bound,
            fragment,
        })
    }

    pub fn category(&self) -> &dyn Category {
        self.category.as_ref()
    }

    pub fn category_rc(&self) -> Rc<dyn Category> {
        self.category.clone()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn fragment(&self) -> &FiniteCategory {
        &self.fragment
    }

    pub fn object_count(&self) -> usize {
        self.fragment.object_count()
    }

    pub fn object(&self, k: usize) -> &Value {
        self.fragment.object(k)
    }

    pub fn index_of(&self, x: &Value) -> Option<usize> {
        self.fragment.object_index(x)
    }
}

/// A presheaf on a site: `at(c)` for every fragment object and a restriction
/// table `at(b) -> at(a)` for every fragment morphism `a -> b`.
pub struct Presheaf {
    name: String,
    site: Rc<Site>,
    values: Vec<Vec<Value>>,
    lookup: Vec<HashMap<Value, usize>>,
    restrictions: Vec<Vec<usize>>,
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<usize> = self.values.iter().map(Vec::len).collect();
        write!(f, "Presheaf({}, sizes {:?})", self.name, sizes)
    }
}

impl Presheaf {
    /// Tabulate from an object function and a restriction function
    /// `(g : a -> b, e in at(b)) -> at(a)`.
    pub fn tabulate(
        site: &Rc<Site>,
        name: impl Into<String>,
        at: impl Fn(&Value) -> Vec<Value>,
        restrict: impl Fn(&Value, &Value) -> Value,
    ) -> Result<Presheaf> {
        let name = name.into();
        let frag = site.fragment();
        let values: Vec<Vec<Value>> = frag.objects().iter().map(&at).collect();
        let lookup = index_values(&name, frag, &values)?;
        let mut restrictions = Vec::with_capacity(frag.morphism_count());
        for g in 0..frag.morphism_count() {
            let (a, b) = (frag.dom_of(g), frag.cod_of(g));
            let table = values[b]
                .iter()
                .map(|e| {
                    let r = restrict(frag.morphism(g), e);
                    lookup[a].get(&r).copied().ok_or_else(|| Error::IllDefinedPresheaf {
                        presheaf: name.clone(),
                        detail: format!(
                            "restricting {e} along {} gives {r}, not an element at {}",
                            frag.morphism(g),
                            frag.object(a)
                        ),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            restrictions.push(table);
        }
        Ok(Presheaf {
            name,
            site: site.clone(),
            values,
            lookup,
            restrictions,
        })
    }

    /// Assemble from index tables the caller guarantees to be consistent.
    pub(crate) fn from_tables(
        site: &Rc<Site>,
        name: impl Into<String>,
        values: Vec<Vec<Value>>,
        restrictions: Vec<Vec<usize>>,
    ) -> Presheaf {
        let name = name.into();
        let lookup = index_values(&name, site.fragment(), &values)
            .expect("tabulated values are distinct");
        Presheaf {
            name,
            site: site.clone(),
            values,
            lookup,
            restrictions,
        }
    }

    pub fn terminal(site: &Rc<Site>) -> Presheaf {
        Presheaf::tabulate(site, "pt", |_| vec![Value::Unit], |_, _| Value::Unit)
            .expect("terminal presheaf is well-defined")
    }

    /// `Hom(-, x)`, restricting by precomposition.
    pub fn yoneda(site: &Rc<Site>, x: &Value) -> Presheaf {
        let cat = site.category_rc();
        let cat2 = cat.clone();
        Presheaf::tabulate(
            site,
            format!("Y({x})"),
            move |c| cat.hom(c, x),
            move |g, e| cat2.compose(g, e),
        )
        .expect("representable presheaf is well-defined")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn site(&self) -> &Rc<Site> {
        &self.site
    }

    pub fn at(&self, k: usize) -> &[Value] {
        &self.values[k]
    }

    pub fn size(&self, k: usize) -> usize {
        self.values[k].len()
    }

    pub fn total_size(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }

    pub fn element_index(&self, k: usize, e: &Value) -> Option<usize> {
        self.lookup[k].get(e).copied()
    }

    /// Index in `at(dom g)` of the restriction of element `e` of `at(cod g)`.
    pub fn restrict(&self, g: usize, e: usize) -> usize {
        self.restrictions[g][e]
    }

    pub fn restriction_table(&self, g: usize) -> &[usize] {
        &self.restrictions[g]
    }

    pub fn values_at(&self, x: &Value) -> Option<&[Value]> {
        self.site.index_of(x).map(|k| self.at(k))
    }
}

fn index_values(
    name: &str,
    frag: &FiniteCategory,
    values: &[Vec<Value>],
) -> Result<Vec<HashMap<Value, usize>>> {
    values
        .iter()
        .enumerate()
        .map(|(k, vs)| {
            let mut m = HashMap::with_capacity(vs.len());
            for (n, v) in vs.iter().enumerate() {
                if m.insert(v.clone(), n).is_some() {
                    return Err(Error::IllDefinedPresheaf {
                        presheaf: name.to_string(),
                        detail: format!("duplicate element {v} at {}", frag.object(k)),
                    });
                }
            }
            Ok(m)
        })
        .collect()
}

/// Identity and composition laws of the restriction maps on the fragment.
pub fn validate_presheaf(p: &Presheaf) -> Report {
    let frag = p.site.fragment();
    let mut identity = Check::new("restrict_identity");
    for x in 0..frag.object_count() {
        let id = frag.identity_of(x);
        for e in 0..p.size(x) {
            identity.expect(p.restrict(id, e) == e, || {
                witness([("object", frag.object(x)), ("element", &p.values[x][e])])
            });
        }
    }
    let mut composition = Check::new("restrict_composite");
    for f in 0..frag.morphism_count() {
        for &g in frag.arrows_from(frag.cod_of(f)) {
            let Some(Composite::Defined(fg)) = frag.composite(f, g) else {
                continue;
            };
            for e in 0..p.size(frag.cod_of(g)) {
                let lhs = p.restrict(fg, e);
                let rhs = p.restrict(f, p.restrict(g, e));
                composition.expect(lhs == rhs, || {
                    witness([
                        ("f", frag.morphism(f).to_string()),
                        ("g", frag.morphism(g).to_string()),
                        ("element", p.values[frag.cod_of(g)][e].to_string()),
                    ])
                });
            }
        }
    }
    Report::group(
        format!("presheaf:{}", p.name),
        vec![identity.finish(), composition.finish()],
    )
}

/// A natural transformation given by per-object index tables.
#[derive(Clone)]
pub struct PresheafMorphism {
    source: Rc<Presheaf>,
    target: Rc<Presheaf>,
    components: Vec<Vec<usize>>,
}

impl fmt::Debug for PresheafMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PresheafMorphism({} -> {}, {:?})",
            self.source.name, self.target.name, self.components
        )
    }
}

impl PartialEq for PresheafMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
            && self.source.name == other.source.name
            && self.target.name == other.target.name
    }
}

impl PresheafMorphism {
    pub fn new(
        source: &Rc<Presheaf>,
        target: &Rc<Presheaf>,
        component: impl Fn(&Value, &Value) -> Value,
    ) -> Result<PresheafMorphism> {
        let site = source.site.clone();
        let components = (0..site.object_count())
            .map(|k| {
                let x = site.object(k);
                source.values[k]
                    .iter()
                    .map(|e| {
                        let v = component(x, e);
                        target.element_index(k, &v).ok_or_else(|| Error::IllDefinedMorphism {
                            object: x.to_string(),
                            detail: format!(
                                "{e} maps to {v}, which is not in {}",
                                target.name
                            ),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PresheafMorphism {
            source: source.clone(),
            target: target.clone(),
            components,
        })
    }

    pub fn from_components(
        source: &Rc<Presheaf>,
        target: &Rc<Presheaf>,
        components: Vec<Vec<usize>>,
    ) -> PresheafMorphism {
        debug_assert_eq!(components.len(), source.values.len());
        PresheafMorphism {
            source: source.clone(),
            target: target.clone(),
            components,
        }
    }

    pub fn identity(p: &Rc<Presheaf>) -> PresheafMorphism {
        let components = p.values.iter().map(|vs| (0..vs.len()).collect()).collect();
        PresheafMorphism::from_components(p, p, components)
    }

    /// The unique morphism into a presheaf whose values are singletons.
    pub fn to_terminal(p: &Rc<Presheaf>, terminal: &Rc<Presheaf>) -> PresheafMorphism {
        let components = p.values.iter().map(|vs| vec![0; vs.len()]).collect();
        PresheafMorphism::from_components(p, terminal, components)
    }

    pub fn source(&self) -> &Rc<Presheaf> {
        &self.source
    }

    pub fn target(&self) -> &Rc<Presheaf> {
        &self.target
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn apply(&self, k: usize, e: usize) -> usize {
        self.components[k][e]
    }

    pub fn apply_value(&self, k: usize, e: &Value) -> Option<&Value> {
        let i = self.source.element_index(k, e)?;
        Some(&self.target.values[k][self.components[k][i]])
    }

    /// `self ; other`.
    pub fn then(&self, other: &PresheafMorphism) -> PresheafMorphism {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(f, g)| f.iter().map(|&e| g[e]).collect())
            .collect();
        PresheafMorphism::from_components(&self.source, &other.target, components)
    }

    /// Same tables with re-labelled endpoints (which must have the same
    /// element lists).
    pub fn retarget(&self, source: &Rc<Presheaf>, target: &Rc<Presheaf>) -> PresheafMorphism {
        PresheafMorphism::from_components(source, target, self.components.clone())
    }

    /// The component tables as a [`Value`], for use as a morphism id.
    pub fn table_value(&self) -> Value {
        Value::Seq(
            self.components
                .iter()
                .map(|c| Value::nats(c.iter().copied()))
                .collect(),
        )
    }

    pub fn from_table_value(
        source: &Rc<Presheaf>,
        target: &Rc<Presheaf>,
        table: &Value,
    ) -> PresheafMorphism {
        let components = table
            .as_seq()
            .expect("component table")
            .iter()
            .map(|c| {
                c.as_seq()
                    .expect("component")
                    .iter()
                    .map(|n| n.as_nat().expect("index"))
                    .collect()
            })
            .collect();
        PresheafMorphism::from_components(source, target, components)
    }

    pub fn is_identity(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.iter().enumerate().all(|(k, &e)| k == e))
    }
}

/// Compare two morphisms with the same endpoints; on mismatch return the
/// first object and source element where they differ.
pub fn first_difference(
    m: &PresheafMorphism,
    n: &PresheafMorphism,
) -> Option<(Value, Value, Value, Value)> {
    let site = &m.source.site;
    for k in 0..site.object_count() {
        for (e, (&a, &b)) in m.components[k].iter().zip(&n.components[k]).enumerate() {
            if a != b {
                return Some((
                    site.object(k).clone(),
                    m.source.values[k][e].clone(),
                    m.target.values[k][a].clone(),
                    n.target.values[k][b].clone(),
                ));
            }
        }
    }
    None
}

/// Check every naturality square over the fragment.
pub fn validate_naturality(m: &PresheafMorphism) -> Report {
    let frag = m.source.site.fragment();
    let mut squares = Check::new("naturality");
    for g in 0..frag.morphism_count() {
        let (a, b) = (frag.dom_of(g), frag.cod_of(g));
        for e in 0..m.source.size(b) {
            let lhs = m.apply(a, m.source.restrict(g, e));
            let rhs = m.target.restrict(g, m.apply(b, e));
            squares.expect(lhs == rhs, || {
                witness([
                    ("morphism", frag.morphism(g).to_string()),
                    ("element", m.source.values[b][e].to_string()),
                    ("restrict_then_map", m.target.values[a][lhs].to_string()),
                    ("map_then_restrict", m.target.values[a][rhs].to_string()),
                ])
            });
        }
    }
    Report::group(
        format!("natural:{}->{}", m.source.name, m.target.name),
        vec![squares.finish()],
    )
}

/// A morphism together with a verified inverse on the site's fragment.
#[derive(Clone, Debug)]
pub struct NaturalIso {
    pub forward: PresheafMorphism,
    pub inverse: PresheafMorphism,
    pub bound: usize,
}

/// Certify every component bijective; return the inverse tables.
pub fn pointwise_iso_check(m: &PresheafMorphism) -> std::result::Result<NaturalIso, Report> {
    let site = m.source.site.clone();
    let name = format!("iso:{}->{}", m.source.name, m.target.name);
    let mut inverse = Vec::with_capacity(site.object_count());
    for k in 0..site.object_count() {
        let comp = &m.components[k];
        let mut inv = vec![usize::MAX; m.target.size(k)];
        for (e, &t) in comp.iter().enumerate() {
            if inv[t] != usize::MAX {
                return Err(Report::fail(
                    name,
                    witness([
                        ("object", site.object(k).to_string()),
                        ("reason", "not injective".to_string()),
                        ("first", m.source.values[k][inv[t]].to_string()),
                        ("second", m.source.values[k][e].to_string()),
                    ]),
                ));
            }
            inv[t] = e;
        }
        if let Some(missed) = inv.iter().position(|&e| e == usize::MAX) {
            return Err(Report::fail(
                name,
                witness([
                    ("object", site.object(k).to_string()),
                    ("reason", "not surjective".to_string()),
                    ("missed", m.target.values[k][missed].to_string()),
                ]),
            ));
        }
        inverse.push(inv);
    }
    Ok(NaturalIso {
        inverse: PresheafMorphism::from_components(&m.target, &m.source, inverse),
        forward: m.clone(),
        bound: site.bound(),
    })
}

impl NaturalIso {
    pub fn report(&self, name: impl Into<String>) -> Report {
        let checked = self.forward.source.total_size();
        Report::pass(name)
            .with_checked(checked)
            .with_note(format!("bijective on every object of grade <= {}", self.bound))
    }
}

/// The chosen pullback of `p` along `f`, with elements `pair(a, b)`.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub object: Rc<Presheaf>,
    pub first: PresheafMorphism,
    pub second: PresheafMorphism,
    along: PresheafMorphism,
    over: PresheafMorphism,
}

pub fn canonical_pullback(
    f: &PresheafMorphism,
    p: &PresheafMorphism,
    name: impl Into<String>,
) -> Pullback {
    let (a, ut) = (&f.source, &p.source);
    let site = a.site.clone();
    let frag = site.fragment();
    let mut values = Vec::with_capacity(frag.object_count());
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(frag.object_count());
    let mut lookup: Vec<HashMap<(usize, usize), usize>> = Vec::new();
    for k in 0..frag.object_count() {
        let mut by_base: HashMap<usize, Vec<usize>> = HashMap::new();
        for b in 0..ut.size(k) {
            by_base.entry(p.apply(k, b)).or_default().push(b);
        }
        let mut vs = Vec::new();
        let mut ps = Vec::new();
        for x in 0..a.size(k) {
            for &b in by_base.get(&f.apply(k, x)).map(Vec::as_slice).unwrap_or(&[]) {
                vs.push(Value::pair(a.values[k][x].clone(), ut.values[k][b].clone()));
                ps.push((x, b));
            }
        }
        lookup.push(ps.iter().enumerate().map(|(n, &xy)| (xy, n)).collect());
        values.push(vs);
        pairs.push(ps);
    }
    let restrictions = (0..frag.morphism_count())
        .map(|g| {
            let (d, c) = (frag.dom_of(g), frag.cod_of(g));
            pairs[c]
                .iter()
                .map(|&(x, b)| lookup[d][&(a.restrict(g, x), ut.restrict(g, b))])
                .collect()
        })
        .collect();
    let object = Rc::new(Presheaf::from_tables(&site, name, values, restrictions));
    let first = pairs.iter().map(|ps| ps.iter().map(|&(x, _)| x).collect()).collect();
    let second = pairs.iter().map(|ps| ps.iter().map(|&(_, b)| b).collect()).collect();
    Pullback {
        first: PresheafMorphism::from_components(&object, a, first),
        second: PresheafMorphism::from_components(&object, ut, second),
        object,
        along: f.clone(),
        over: p.clone(),
    }
}

impl Pullback {
    /// The map into the pullback induced by a commuting cone.
    pub fn induced(&self, x: &PresheafMorphism, y: &PresheafMorphism) -> Result<PresheafMorphism> {
        let site = self.object.site.clone();
        let (a, ut) = (self.first.target.clone(), self.second.target.clone());
        let components = (0..site.object_count())
            .map(|k| {
                x.components[k]
                    .iter()
                    .zip(&y.components[k])
                    .map(|(&i, &j)| {
                        let v = Value::pair(a.values[k][i].clone(), ut.values[k][j].clone());
                        self.object.element_index(k, &v).ok_or_else(|| {
                            Error::IllDefinedMorphism {
                                object: site.object(k).to_string(),
                                detail: format!("cone component {v} does not commute"),
                            }
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PresheafMorphism::from_components(
            &x.source,
            &self.object,
            components,
        ))
    }

    /// Exhaustive universal-property check against every cone from `x`.
    pub fn is_universal_for(&self, x: &Rc<Presheaf>) -> bool {
        let into_object = natural_transformations(x, &self.object);
        for u in natural_transformations(x, &self.first.target) {
            for v in natural_transformations(x, &self.second.target) {
                if u.then(&self.along) != v.then(&self.over) {
                    continue;
                }
                let Ok(m) = self.induced(&u, &v) else {
                    return false;
                };
                let mut factoring = into_object
                    .iter()
                    .filter(|n| n.then(&self.first) == u && n.then(&self.second) == v);
                if factoring.next() != Some(&m) || factoring.next().is_some() {
                    return false;
                }
            }
        }
        true
    }
}

/// `Hom(Y(x), P) -> P(x)`: evaluate at the identity of `x`.
pub fn yoneda_to_element(m: &PresheafMorphism, x: &Value) -> Value {
    let site = &m.source.site;
    let k = site.index_of(x).expect("x lies in the site");
    let id = site.category().id(x);
    m.apply_value(k, &id).expect("identity is an element").clone()
}

/// `P(x) -> Hom(Y(x), P)`: `g ↦ P(g)(element)`.
pub fn yoneda_from_element(
    yx: &Rc<Presheaf>,
    p: &Rc<Presheaf>,
    x: &Value,
    element: &Value,
) -> PresheafMorphism {
    let site = p.site.clone();
    let kx = site.index_of(x).expect("x lies in the site");
    let e = p.element_index(kx, element).expect("element of P(x)");
    let frag = site.fragment();
    let components = (0..site.object_count())
        .map(|c| {
            yx.values[c]
                .iter()
                .map(|g| {
                    let gi = frag.morphism_index(g).expect("g lies in the fragment");
                    p.restrict(gi, e)
                })
                .collect()
        })
        .collect();
    PresheafMorphism::from_components(yx, p, components)
}

/// Enumerate every natural transformation `source -> target` on the
/// fragment, in a deterministic order.
///
/// Assigning a value to `(b, e)` forces `(a, source(g)(e))` for every
/// `g : a -> b`, so variables are tried in decreasing order of the number of
/// variables they force.
pub fn natural_transformations(
    source: &Rc<Presheaf>,
    target: &Rc<Presheaf>,
) -> Vec<PresheafMorphism> {
    let mut out = Vec::new();
    NatSearch::new(source, target).run(&mut |components| {
        out.push(PresheafMorphism::from_components(source, target, components));
        true
    });
    out
}

/// The first natural transformation found, if any.
pub fn some_natural_transformation(
    source: &Rc<Presheaf>,
    target: &Rc<Presheaf>,
) -> Option<PresheafMorphism> {
    let mut found = None;
    NatSearch::new(source, target).run(&mut |components| {
        found = Some(PresheafMorphism::from_components(source, target, components));
        false
    });
    found
}

struct NatSearch<'a> {
    source: &'a Presheaf,
    target: &'a Presheaf,
    offsets: Vec<usize>,
    vars: Vec<(usize, usize)>,
    order: Vec<usize>,
}

impl<'a> NatSearch<'a> {
    fn new(source: &'a Presheaf, target: &'a Presheaf) -> Self {
        let mut offsets = Vec::with_capacity(source.values.len());
        let mut vars = Vec::new();
        for (k, vs) in source.values.iter().enumerate() {
            offsets.push(vars.len());
            vars.extend((0..vs.len()).map(|e| (k, e)));
        }
        let mut search = NatSearch {
            source,
            target,
            offsets,
            vars,
            order: Vec::new(),
        };
        let reach: Vec<usize> = (0..search.vars.len()).map(|v| search.closure_size(v)).collect();
        let mut order: Vec<usize> = (0..search.vars.len()).collect();
        order.sort_by(|&u, &v| reach[v].cmp(&reach[u]).then(u.cmp(&v)));
        search.order = order;
        search
    }

    fn var(&self, k: usize, e: usize) -> usize {
        self.offsets[k] + e
    }

    fn forced(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (b, e) = self.vars[v];
        let frag = self.source.site.fragment();
        frag.arrows_into(b)
            .iter()
            .map(move |&g| (g, self.var(frag.dom_of(g), self.source.restrict(g, e))))
    }

    fn closure_size(&self, start: usize) -> usize {
        let mut seen = vec![false; self.vars.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut count = 0;
        while let Some(v) = queue.pop_front() {
            count += 1;
            for (_, w) in self.forced(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        count
    }

    /// Assign and propagate; on conflict undo and report failure.
    fn assign(&self, v: usize, value: usize, state: &mut [usize], trail: &mut Vec<usize>) -> bool {
        let mark = trail.len();
        let mut queue = VecDeque::from([(v, value)]);
        while let Some((v, value)) = queue.pop_front() {
            if state[v] != usize::MAX {
                if state[v] != value {
                    for &u in &trail[mark..] {
                        state[u] = usize::MAX;
                    }
                    trail.truncate(mark);
                    return false;
                }
                continue;
            }
            state[v] = value;
            trail.push(v);
            for (g, w) in self.forced(v) {
                queue.push_back((w, self.target.restrict(g, value)));
            }
        }
        true
    }

    fn run(&self, emit: &mut dyn FnMut(Vec<Vec<usize>>) -> bool) {
        if self
            .source
            .values
            .iter()
            .zip(&self.target.values)
            .any(|(s, t)| !s.is_empty() && t.is_empty())
        {
            return;
        }
        let mut state = vec![usize::MAX; self.vars.len()];
        let mut trail = Vec::new();
        self.descend(0, &mut state, &mut trail, emit);
    }

    fn descend(
        &self,
        mut pos: usize,
        state: &mut [usize],
        trail: &mut Vec<usize>,
        emit: &mut dyn FnMut(Vec<Vec<usize>>) -> bool,
    ) -> bool {
        while pos < self.order.len() && state[self.order[pos]] != usize::MAX {
            pos += 1;
        }
        if pos == self.order.len() {
            let components = self
                .source
                .values
                .iter()
                .enumerate()
                .map(|(k, vs)| (0..vs.len()).map(|e| state[self.var(k, e)]).collect())
                .collect();
            return emit(components);
        }
        let v = self.order[pos];
        let k = self.vars[v].0;
        for value in 0..self.target.size(k) {
            let mark = trail.len();
            if self.assign(v, value, state, trail) {
                let go_on = self.descend(pos + 1, state, trail, emit);
                for &u in &trail[mark..] {
                    state[u] = usize::MAX;
                }
                trail.truncate(mark);
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::FiniteCategorySpec;

    pub(crate) fn interval_site() -> Rc<Site> {
        let spec: FiniteCategorySpec = serde_json::from_str(
            r#"{"objects":["0","1"],
                "morphisms":[{"id":"id0","dom":"0","cod":"0"},{"id":"id1","dom":"1","cod":"1"},{"id":"a","dom":"0","cod":"1"}],
                "identities":{"0":"id0","1":"id1"},
                "composition":[["id0","id0","id0"],["id1","id1","id1"],["id0","a","a"],["a","id1","a"]]}"#,
        )
        .unwrap();
        Site::new(Rc::new(FiniteCategory::from_spec(&spec).unwrap()), 0)
    }

    /// `P(1) = {u, v}`, `P(0) = {w}`.
    fn two_over_one(site: &Rc<Site>) -> Rc<Presheaf> {
        Rc::new(
            Presheaf::tabulate(
                site,
                "P",
                |x| match x.to_string().as_str() {
                    "1" => vec!["u".into(), "v".into()],
                    _ => vec!["w".into()],
                },
                |g, e| if g.to_string() == "a" { "w".into() } else { e.clone() },
            )
            .unwrap(),
        )
    }

    #[test]
    fn terminal_and_yoneda_on_interval() {
        let site = interval_site();
        let t = Presheaf::terminal(&site);
        assert_eq!((t.size(0), t.size(1)), (1, 1));
        let y1 = Presheaf::yoneda(&site, &"1".into());
        assert_eq!((y1.size(0), y1.size(1)), (1, 1));
        assert!(validate_presheaf(&y1).passed());
        let y0 = Presheaf::yoneda(&site, &"0".into());
        assert_eq!((y0.size(0), y0.size(1)), (1, 0));
    }

    #[test]
    fn unique_map_to_terminal() {
        let site = interval_site();
        let t = Rc::new(Presheaf::terminal(&site));
        let p = two_over_one(&site);
        let maps = natural_transformations(&p, &t);
        assert_eq!(maps.len(), 1);
        assert_eq!(maps[0], PresheafMorphism::to_terminal(&p, &t));
    }

    #[test]
    fn ill_defined_restriction_is_an_error() {
        let site = interval_site();
        let r = Presheaf::tabulate(&site, "Q", |_| vec![Value::Unit], |_, _| "x".into());
        assert!(matches!(r, Err(Error::IllDefinedPresheaf { .. })));
    }

    #[test]
    fn corrupted_component_breaks_naturality() {
        let site = interval_site();
        let p = two_over_one(&site);
        let id = PresheafMorphism::identity(&p);
        assert!(validate_naturality(&id).passed());
        let q = Rc::new(
            Presheaf::tabulate(
                &site,
                "Q",
                |x| match x.to_string().as_str() {
                    "1" => vec!["u".into()],
                    _ => vec!["w".into(), "z".into()],
                },
                |g, e| if g.to_string() == "a" { "w".into() } else { e.clone() },
            )
            .unwrap(),
        );
        let bad = PresheafMorphism::from_components(&p, &q, vec![vec![1], vec![0, 0]]);
        let r = validate_naturality(&bad);
        assert!(!r.passed());
        assert_eq!(r.first_failure().unwrap().witness.as_ref().unwrap()["morphism"], "a");
    }

    #[test]
    fn iso_check_finds_non_injective_object() {
        let site = interval_site();
        let p = two_over_one(&site);
        let t = Rc::new(Presheaf::terminal(&site));
        let r = pointwise_iso_check(&PresheafMorphism::to_terminal(&p, &t)).unwrap_err();
        assert_eq!(r.witness.as_ref().unwrap()["object"], "1");
        assert!(pointwise_iso_check(&PresheafMorphism::identity(&p)).is_ok());
    }

    #[test]
    fn pullback_over_a_point_is_a_product() {
        let site = interval_site();
        let t = Rc::new(Presheaf::terminal(&site));
        let p = two_over_one(&site);
        let f = PresheafMorphism::to_terminal(&p, &t);
        let pb = canonical_pullback(&f, &f, "PxP");
        assert_eq!((pb.object.size(0), pb.object.size(1)), (1, 4));
        assert!(validate_presheaf(&pb.object).passed());
        assert!(pb.is_universal_for(&p));
    }

    #[test]
    fn diagonal_pullback_has_base_cardinality() {
        let site = interval_site();
        let p = two_over_one(&site);
        let id = PresheafMorphism::identity(&p);
        let pb = canonical_pullback(&id, &id, "diag");
        assert_eq!((pb.object.size(0), pb.object.size(1)), (1, 2));
    }

    #[test]
    fn yoneda_round_trip() {
        let site = interval_site();
        let p = two_over_one(&site);
        let y1 = Rc::new(Presheaf::yoneda(&site, &"1".into()));
        let maps = natural_transformations(&y1, &p);
        assert_eq!(maps.len(), 2);
        for m in &maps {
            let e = yoneda_to_element(m, &"1".into());
            assert_eq!(&yoneda_from_element(&y1, &p, &"1".into(), &e), m);
        }
    }
}
