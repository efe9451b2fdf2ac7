//! Universe categories in presheaf worlds, the C-systems they generate, the
//! comparison `H'` out of a C-system into the one generated by its standard
//! universe, and the homomorphism induced by left Kan extension.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::csystem::{CSystem, CSystemHom};
use crate::error::{Error, Result};
use crate::kan::{pullback_preserved, terminal_preserved, KanSetup};
use crate::kernel::Category;
use crate::presheaf::{
    canonical_pullback, natural_transformations, pointwise_iso_check, validate_naturality,
    validate_presheaf, NaturalIso, Presheaf, PresheafMorphism, Pullback, Site,
};
use crate::report::{witness, Check, Report};
use crate::value::Value;

/// A presheaf world with a distinguished `p : Ũ -> U` and chosen terminal.
/// Chosen pullbacks are [`canonical_pullback`].
#[derive(Debug)]
pub struct UniverseCategory {
    pub site: Rc<Site>,
    pub u: Rc<Presheaf>,
    pub ut: Rc<Presheaf>,
    pub p: PresheafMorphism,
    pub terminal: Rc<Presheaf>,
}

/// `∂ : Õb₁ -> Ob₁` over a C-system, on the given site of it.
pub fn standard_universe(ccp: &Rc<dyn CSystem>, site: &Rc<Site>) -> Result<UniverseCategory> {
    let ob1 = {
        let cs = ccp.clone();
        move |x: &Value| -> Vec<Value> {
            let l = cs.length(x) + 1;
            cs.objects_up_to(l)
                .into_iter()
                .filter(|y| cs.length(y) == l && cs.ft(y) == *x)
                .collect()
        }
    };
    let u = {
        let cs = ccp.clone();
        Presheaf::tabulate(site, "Ob1", &ob1, move |f, y| cs.star(f, y))?
    };
    let ut = {
        let (cs, cs2) = (ccp.clone(), ccp.clone());
        Presheaf::tabulate(
            site,
            "~Ob1",
            move |x| {
                ob1(x)
                    .iter()
                    .flat_map(|y| {
                        let py = cs.proj(y);
                        cs.hom(x, y)
                            .into_iter()
                            .filter(|s| cs.compose(s, &py) == cs.id(x))
                            .collect::<Vec<_>>()
                    })
                    .collect()
            },
            move |f, s| cs2.section(&cs2.compose(f, s)),
        )?
    };
    let (u, ut) = (Rc::new(u), Rc::new(ut));
    let cs = ccp.clone();
    let p = PresheafMorphism::new(&ut, &u, move |_, s| cs.cod(s))?;
    Ok(UniverseCategory {
        site: site.clone(),
        u,
        ut,
        p,
        terminal: Rc::new(Presheaf::terminal(site)),
    })
}

/// Well-definedness of `U`, `Ũ` and naturality of `p`.
pub fn validate_universe(u: &UniverseCategory) -> Report {
    Report::group(
        "universe",
        vec![
            validate_presheaf(&u.u),
            validate_presheaf(&u.ut),
            validate_naturality(&u.p),
        ],
    )
}

/// `int` of a generated object, with its defining pullback when the length
/// is positive.
#[derive(Debug)]
pub struct IntData {
    pub object: Rc<Presheaf>,
    pub pullback: Option<Pullback>,
}

/// The C-system `CC(world, p)`: objects `ctx[F₁, .., Fₙ]` with
/// `F_k : int(F₁..F_{k-1}) -> U`, morphisms `nat[A, B, table]` for natural
/// transformations `int A -> int B`.
pub struct Generated {
    label: String,
    pub universe: Rc<UniverseCategory>,
    ints: RefCell<HashMap<Value, Rc<IntData>>>,
}

impl std::fmt::Debug for Generated {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Generated({})", self.label)
    }
}

fn entries(a: &Value) -> &[Value] {
    a.args_of("ctx").unwrap_or_else(|| panic!("{a} is not a generated object"))
}

fn nat_parts(f: &Value) -> (&Value, &Value, &Value) {
    match f.args_of("nat") {
        Some([a, b, t]) => (a, b, t),
        _ => panic!("{f} is not a generated morphism"),
    }
}

fn index_table(t: &Value) -> Vec<Vec<usize>> {
    t.as_seq()
        .expect("component table")
        .iter()
        .map(|c| c.as_seq().expect("component").iter().map(|n| n.as_nat().expect("index")).collect())
        .collect()
}

/// `f ; g` on component tables.
fn compose_tables(f: &Value, g: &Value) -> Value {
    let (f, g) = (index_table(f), index_table(g));
    Value::Seq(
        f.iter()
            .zip(&g)
            .map(|(fk, gk)| Value::nats(fk.iter().map(|&e| gk[e])))
            .collect(),
    )
}

impl Generated {
    pub fn new(label: impl Into<String>, universe: Rc<UniverseCategory>) -> Rc<Generated> {
        Rc::new(Generated {
            label: label.into(),
            universe,
            ints: RefCell::new(HashMap::new()),
        })
    }

    pub fn context(classifiers: Vec<Value>) -> Value {
        Value::node("ctx", classifiers)
    }

    pub fn int_data(&self, a: &Value) -> Rc<IntData> {
        if let Some(d) = self.ints.borrow().get(a) {
            return d.clone();
        }
        let fs = entries(a);
        let data = match fs.split_last() {
            None => IntData {
                object: self.universe.terminal.clone(),
                pullback: None,
            },
            Some((last, prefix)) => {
                let base = self.int(&Self::context(prefix.to_vec()));
                let f = PresheafMorphism::from_table_value(&base, &self.universe.u, last);
                let serial = self.ints.borrow().len();
                let name = format!("{}{}#{serial}", self.label, fs.len());
                let pb = canonical_pullback(&f, &self.universe.p, name);
                IntData {
                    object: pb.object.clone(),
                    pullback: Some(pb),
                }
            }
        };
        let data = Rc::new(data);
        self.ints.borrow_mut().insert(a.clone(), data.clone());
        data
    }

    pub fn int(&self, a: &Value) -> Rc<Presheaf> {
        self.int_data(a).object.clone()
    }

    /// The last classifier of a positive-length object.
    pub fn classifier(&self, a: &Value) -> PresheafMorphism {
        let fs = entries(a);
        let base = self.int(&Self::context(fs[..fs.len() - 1].to_vec()));
        PresheafMorphism::from_table_value(&base, &self.universe.u, fs.last().expect("positive length"))
    }

    /// `(A, F)` for `F : int A -> U`.
    pub fn extend(&self, a: &Value, f: &PresheafMorphism) -> Value {
        let mut fs = entries(a).to_vec();
        fs.push(f.table_value());
        Self::context(fs)
    }

    pub fn arrow(a: &Value, b: &Value, m: &PresheafMorphism) -> Value {
        Value::node("nat", vec![a.clone(), b.clone(), m.table_value()])
    }

    /// `int(f) : int A -> int B`.
    pub fn morphism(&self, f: &Value) -> PresheafMorphism {
        let (a, b, t) = nat_parts(f);
        PresheafMorphism::from_table_value(&self.int(a), &self.int(b), t)
    }

    fn pullback(&self, a: &Value) -> Pullback {
        self.int_data(a)
            .pullback
            .clone()
            .expect("object of positive length")
    }
}

impl Category for Generated {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn grade(&self, a: &Value) -> usize {
        entries(a).len()
    }

    fn objects_up_to(&self, bound: usize) -> Vec<Value> {
        let mut out = vec![Self::context(Vec::new())];
        let mut level = out.clone();
        for _ in 0..bound {
            level = level
                .iter()
                .flat_map(|a| {
                    natural_transformations(&self.int(a), &self.universe.u)
                        .iter()
                        .map(|f| self.extend(a, f))
                        .collect::<Vec<_>>()
                })
                .collect();
            out.extend(level.iter().cloned());
        }
        out
    }

    fn hom(&self, a: &Value, b: &Value) -> Vec<Value> {
        natural_transformations(&self.int(a), &self.int(b))
            .iter()
            .map(|m| Self::arrow(a, b, m))
            .collect()
    }

    fn dom(&self, f: &Value) -> Value {
        nat_parts(f).0.clone()
    }

    fn cod(&self, f: &Value) -> Value {
        nat_parts(f).1.clone()
    }

    fn id(&self, a: &Value) -> Value {
        Self::arrow(a, a, &PresheafMorphism::identity(&self.int(a)))
    }

    fn compose(&self, f: &Value, g: &Value) -> Value {
        let (a, _, ft) = nat_parts(f);
        let (_, c, gt) = nat_parts(g);
        Value::node("nat", vec![a.clone(), c.clone(), compose_tables(ft, gt)])
    }
}

impl CSystem for Generated {
    fn pt(&self) -> Value {
        Self::context(Vec::new())
    }

    fn ft(&self, a: &Value) -> Value {
        let fs = entries(a);
        Self::context(fs[..fs.len().saturating_sub(1)].to_vec())
    }

    fn proj(&self, a: &Value) -> Value {
        match &self.int_data(a).pullback {
            None => self.id(a),
            Some(pb) => Self::arrow(a, &self.ft(a), &pb.first),
        }
    }

    fn star(&self, f: &Value, a: &Value) -> Value {
        let (b, _, t) = nat_parts(f);
        let fs = entries(a);
        let mut out = entries(b).to_vec();
        out.push(compose_tables(t, fs.last().expect("positive length")));
        Self::context(out)
    }

    fn q(&self, f: &Value, a: &Value) -> Value {
        let fa = self.star(f, a);
        let upper = self.pullback(&fa);
        let lower = self.pullback(a);
        let m = lower
            .induced(&upper.first.then(&self.morphism(f)), &upper.second)
            .expect("the canonical square commutes");
        Self::arrow(&fa, a, &m)
    }

    fn section(&self, f: &Value) -> Value {
        let (b, a, _) = nat_parts(f);
        let base = self.star(&self.ft_morphism(f), a);
        let m = self
            .pullback(&base)
            .induced(
                &PresheafMorphism::identity(&self.int(b)),
                &self.morphism(f).then(&self.pullback(a).second),
            )
            .expect("the section cone commutes");
        Self::arrow(b, &base, &m)
    }
}

struct PsiEntry {
    image: Value,
    representable: Rc<Presheaf>,
    /// `χ_x : Y(x) -> int(H' x)`; its inverse is `ψ_x`.
    chi: NaturalIso,
}

/// The isomorphisms `ψ_x : int(H' x) -> Y(x)` and the objects `H' x`,
/// built by induction on length and memoized.
pub struct PsiFamily {
    pub ccp: Rc<dyn CSystem>,
    pub generated: Rc<Generated>,
    cache: RefCell<HashMap<Value, Rc<PsiEntry>>>,
}

impl PsiFamily {
    pub fn new(ccp: Rc<dyn CSystem>, generated: Rc<Generated>) -> Rc<PsiFamily> {
        Rc::new(PsiFamily {
            ccp,
            generated,
            cache: RefCell::new(HashMap::new()),
        })
    }

    fn site(&self) -> &Rc<Site> {
        &self.generated.universe.site
    }

    fn entry(&self, x: &Value) -> Result<Rc<PsiEntry>> {
        if let Some(e) = self.cache.borrow().get(x) {
            return Ok(e.clone());
        }
        let cs = self.ccp.clone();
        let g = &self.generated;
        let rep = Rc::new(Presheaf::yoneda(self.site(), x));
        let (image, chi) = if cs.length(x) == 0 {
            let m = PresheafMorphism::to_terminal(&rep, &g.universe.terminal);
            (g.pt(), m)
        } else {
            let fx = cs.ft(x);
            let below = self.entry(&fx)?;
            let classify = {
                let (cs, x) = (cs.clone(), x.clone());
                PresheafMorphism::new(&below.representable, &g.universe.u, move |_, h| cs.star(h, &x))?
            };
            let f = below.chi.inverse.then(&classify);
            let image = g.extend(&below.image, &f);
            let down = {
                let (cs, px) = (cs.clone(), cs.proj(x));
                PresheafMorphism::new(&rep, &below.representable, move |_, h| cs.compose(h, &px))?
            };
            let sections = {
                let cs = cs.clone();
                PresheafMorphism::new(&rep, &g.universe.ut, move |_, h| cs.section(h))?
            };
            let m = g
                .pullback(&image)
                .induced(&down.then(&below.chi.forward), &sections)?;
            (image, m)
        };
        let chi = pointwise_iso_check(&chi).map_err(|r| Error::Gate {
            gate: format!("psi:{x}"),
            witness: r.witness,
        })?;
        let e = Rc::new(PsiEntry {
            image,
            representable: rep,
            chi,
        });
        self.cache.borrow_mut().insert(x.clone(), e.clone());
        Ok(e)
    }

    pub fn object(&self, x: &Value) -> Result<Value> {
        Ok(self.entry(x)?.image.clone())
    }

    /// `ψ_x : int(H' x) -> Y(x)` with its inverse.
    pub fn psi(&self, x: &Value) -> Result<NaturalIso> {
        let e = self.entry(x)?;
        Ok(NaturalIso {
            forward: e.chi.inverse.clone(),
            inverse: e.chi.forward.clone(),
            bound: e.chi.bound,
        })
    }

    pub fn representable(&self, x: &Value) -> Result<Rc<Presheaf>> {
        Ok(self.entry(x)?.representable.clone())
    }

    /// `H'(f) = ψ_x ; Y(f) ; χ_z`.
    pub fn morphism(&self, f: &Value) -> Result<Value> {
        let cs = &self.ccp;
        let (x, z) = (cs.dom(f), cs.cod(f));
        let (ex, ez) = (self.entry(&x)?, self.entry(&z)?);
        let yf = {
            let (cs, f) = (cs.clone(), f.clone());
            PresheafMorphism::new(&ex.representable, &ez.representable, move |_, g| cs.compose(g, &f))?
        };
        let m = ex.chi.inverse.then(&yf).then(&ez.chi.forward);
        Ok(Generated::arrow(&ex.image, &ez.image, &m))
    }

    /// `H'` as a candidate homomorphism.
    pub fn hom(self: &Rc<Self>) -> CSystemHom {
        let (a, b) = (self.clone(), self.clone());
        CSystemHom::new(
            self.ccp.clone(),
            self.generated.clone(),
            move |x| a.object(x).unwrap_or_else(|e| panic!("{e}")),
            move |f| b.morphism(f).unwrap_or_else(|e| panic!("{e}")),
        )
    }
}

/// Build `H'` and certify it on objects of length at most `bound`: every
/// `ψ_x` invertible and natural, the two descriptions of `ψ_x` agree, `H'` is
/// a homomorphism, and `H'` is bijective on hom-sets.
pub fn psi_chain(family: &Rc<PsiFamily>, bound: usize) -> Report {
    let cs = family.ccp.clone();
    let g = family.generated.clone();
    let objects = cs.objects_up_to(bound);
    let mut isos = Vec::new();
    let mut routes = Check::new("dual_route");
    for x in &objects {
        let psi = match family.psi(x) {
            Ok(p) => p,
            Err(Error::Gate { gate, witness }) => {
                return Report::group(
                    "psi_chain",
                    vec![Report::fail(gate, witness.unwrap_or_default())],
                )
            }
            Err(e) => return Report::fail("psi_chain", witness([("error", e)])),
        };
        isos.push(Report::group(
            format!("psi:{x}"),
            vec![psi.report("bijective"), validate_naturality(&psi.forward)],
        ));
        if cs.length(x) == 0 {
            continue;
        }
        let below = family.psi(&cs.ft(x)).expect("built before x");
        let int = psi.forward.source().clone();
        let site = family.site();
        for k in 0..site.object_count() {
            for (e, v) in int.at(k).iter().enumerate() {
                let (a, s) = v.as_pair().expect("pullback element");
                let a_img = below.forward.apply_value(k, a).expect("element of the base");
                let via = cs.compose(s, &cs.q(a_img, x));
                let direct = &psi.forward.target().at(k)[psi.forward.apply(k, e)];
                routes.expect(via == *direct, || {
                    witness([
                        ("X", x.to_string()),
                        ("element", v.to_string()),
                        ("psi", direct.to_string()),
                        ("s;q", via.to_string()),
                    ])
                });
            }
        }
    }

    let mut full = Check::new("fully_faithful");
    for x in &objects {
        for z in &objects {
            let (hx, hz) = (family.object(x).unwrap(), family.object(z).unwrap());
            let mut images: Vec<Value> = cs
                .hom(x, z)
                .iter()
                .map(|f| family.morphism(f).unwrap())
                .collect();
            images.sort();
            let before = images.len();
            images.dedup();
            let mut all = g.hom(&hx, &hz);
            all.sort();
            full.expect(images.len() == before && images == all, || {
                witness([
                    ("X", x.to_string()),
                    ("Z", z.to_string()),
                    ("hom", before.to_string()),
                    ("image_hom", all.len().to_string()),
                ])
            });
        }
    }

    let hom = crate::csystem::validate_homomorphism(&family.hom(), bound);
    Report::group(
        "psi_chain",
        vec![Report::group("psi", isos), routes.finish(), full.finish(), hom],
    )
}

/// The presheaves whose Kan extension must be pullback-preserving: the
/// classifiers of the given generated objects of positive length.
pub fn validate_universe_morphism(
    kan: &KanSetup,
    source: &Generated,
    tests: &[Value],
) -> Report {
    let mut children = vec![terminal_preserved(kan, &source.universe.terminal)];
    let squares = tests
        .iter()
        .filter(|a| source.grade(a) > 0)
        .map(|a| {
            pullback_preserved(
                kan,
                &source.classifier(a),
                &source.universe.p,
                &source.pullback(a),
            )
        })
        .collect();
    children.push(Report::group("pullbacks", squares));
    children.push(Report::pass("boundary").with_note("the target universe map is Lan of the source one"));
    Report::group("universe_morphism", children)
}

/// The universe `(Lan U, Lan Ũ, Lan p)` on the target site of `kan`.
pub fn lan_universe(kan: &KanSetup, u: &UniverseCategory) -> UniverseCategory {
    let p = kan.lan_morphism(&u.p);
    UniverseCategory {
        site: kan.target.clone(),
        u: p.target().clone(),
        ut: p.source().clone(),
        p,
        terminal: Rc::new(Presheaf::terminal(&kan.target)),
    }
}

struct HatEntry {
    image: Value,
    /// `ψ̂_A : int'(H A) -> Lan(int A)`.
    iso: NaturalIso,
}

/// The homomorphism `H` induced by `Lan`, with the comparisons `ψ̂`.
pub struct LanHom {
    pub kan: Rc<KanSetup>,
    pub source: Rc<Generated>,
    pub target: Rc<Generated>,
    cache: RefCell<HashMap<Value, Rc<HatEntry>>>,
}

impl LanHom {
    pub fn new(kan: Rc<KanSetup>, source: Rc<Generated>, target: Rc<Generated>) -> Rc<LanHom> {
        Rc::new(LanHom {
            kan,
            source,
            target,
            cache: RefCell::new(HashMap::new()),
        })
    }

    fn entry(&self, a: &Value) -> Result<Rc<HatEntry>> {
        if let Some(e) = self.cache.borrow().get(a) {
            return Ok(e.clone());
        }
        let kan = &self.kan;
        let (src, tgt) = (&self.source, &self.target);
        let (image, forward) = match src.grade(a) {
            0 => {
                let lan_pt = kan.lan(&src.universe.terminal).presheaf.clone();
                let back = PresheafMorphism::to_terminal(&lan_pt, &tgt.universe.terminal);
                let iso = pointwise_iso_check(&back).map_err(|r| Error::Gate {
                    gate: "terminal".into(),
                    witness: r.witness,
                })?;
                (tgt.pt(), iso.inverse)
            }
            _ => {
                let a0 = src.ft(a);
                let below = self.entry(&a0)?;
                let f = src.classifier(a);
                let lan_f = kan.lan_morphism(&f);
                let g = below.iso.forward.then(&lan_f);
                let image = tgt.extend(&below.image, &g);
                let outer = tgt.pullback(&image);
                let lan_p = kan.lan_morphism(&src.universe.p);
                let square = canonical_pullback(&lan_f, &lan_p, format!("Lan-square{}", src.grade(a)));
                let cone = square.induced(&outer.first.then(&below.iso.forward), &outer.second)?;
                let kappa = crate::kan::pullback_comparison(kan, &src.pullback(a), &square);
                let kappa = pointwise_iso_check(&kappa).map_err(|r| Error::Gate {
                    gate: format!("pullback:{a}"),
                    witness: r.witness,
                })?;
                (image, cone.then(&kappa.inverse))
            }
        };
        let iso = pointwise_iso_check(&forward).map_err(|r| Error::Gate {
            gate: format!("psi_hat:{a}"),
            witness: r.witness,
        })?;
        let e = Rc::new(HatEntry { image, iso });
        self.cache.borrow_mut().insert(a.clone(), e.clone());
        Ok(e)
    }

    pub fn object(&self, a: &Value) -> Result<Value> {
        Ok(self.entry(a)?.image.clone())
    }

    pub fn psi_hat(&self, a: &Value) -> Result<NaturalIso> {
        Ok(self.entry(a)?.iso.clone())
    }

    /// `H(r) = ψ̂_A ; Lan(r) ; ψ̂_B⁻¹`.
    pub fn morphism(&self, r: &Value) -> Result<Value> {
        let (a, b) = (self.source.dom(r), self.source.cod(r));
        let (ea, eb) = (self.entry(&a)?, self.entry(&b)?);
        let lan_r = self.kan.lan_morphism(&self.source.morphism(r));
        let m = ea.iso.forward.then(&lan_r).then(&eb.iso.inverse);
        Ok(Generated::arrow(&ea.image, &eb.image, &m))
    }

    pub fn hom(self: &Rc<Self>) -> CSystemHom {
        let (a, b) = (self.clone(), self.clone());
        CSystemHom::new(
            self.source.clone(),
            self.target.clone(),
            move |x| a.object(x).unwrap_or_else(|e| panic!("{e}")),
            move |f| b.morphism(f).unwrap_or_else(|e| panic!("{e}")),
        )
    }
}

/// Certify `ψ̂_A` for the given objects, then the homomorphism laws of `H`
/// on the source fragment of length at most `bound`.
pub fn hom_from_universe_morphism(h: &Rc<LanHom>, objects: &[Value], bound: usize) -> Report {
    let mut isos = Vec::new();
    for a in objects {
        match h.psi_hat(a) {
            Ok(iso) => isos.push(Report::group(
                format!("psi_hat:{a}"),
                vec![iso.report("bijective"), validate_naturality(&iso.forward)],
            )),
            Err(Error::Gate { gate, witness }) => {
                isos.push(Report::fail(gate, witness.unwrap_or_default()));
                return Report::group("lan_hom", isos);
            }
            Err(e) => return Report::fail("lan_hom", witness([("error", e)])),
        }
    }
    let laws = crate::csystem::validate_homomorphism(&h.hom(), bound);
    Report::group("lan_hom", vec![Report::group("psi_hat", isos), laws])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csystem::{validate_csystem, OneType, UnitSystem};

    fn world(cs: Rc<dyn CSystem>, bound: usize) -> (Rc<UniverseCategory>, Rc<Generated>) {
        let site = Site::new(cs.clone(), bound);
        let u = Rc::new(standard_universe(&cs, &site).unwrap());
        let g = Generated::new("int", u.clone());
        (u, g)
    }

    #[test]
    fn unit_universe_is_singletons() {
        let (u, g) = world(Rc::new(UnitSystem), 3);
        assert!(validate_universe(&u).passed());
        for k in 0..u.site.object_count() {
            assert_eq!(u.u.size(k), 1);
            assert_eq!(u.ut.size(k), 1);
        }
        let objects = g.objects_up_to(3);
        assert_eq!(objects.len(), 4);
        for a in &objects {
            assert!((0..u.site.object_count()).all(|k| g.int(a).size(k) == 1));
        }
    }

    #[test]
    fn onetype_sections_and_boundary() {
        let (u, _) = world(Rc::new(OneType), 3);
        assert!(validate_universe(&u).passed());
        let two = u.site.index_of(&2.into()).unwrap();
        assert_eq!(u.ut.size(two), 2);
        let s = &u.ut.at(two)[0];
        assert_eq!(u.p.apply_value(two, s).unwrap(), &Value::Nat(3));
    }

    #[test]
    fn generated_over_unit_is_a_csystem() {
        let (_, g) = world(Rc::new(UnitSystem), 3);
        assert!(validate_csystem(g.as_ref(), 3).passed());
    }

    #[test]
    fn generated_over_onetype_is_a_csystem() {
        let (_, g) = world(Rc::new(OneType), 3);
        let r = validate_csystem(g.as_ref(), 2);
        assert!(r.passed(), "{:?}", r.first_failure());
    }

    #[test]
    fn psi_chain_over_unit_and_onetype() {
        for cs in [Rc::new(UnitSystem) as Rc<dyn CSystem>, Rc::new(OneType)] {
            let (_, g) = world(cs.clone(), 3);
            let family = PsiFamily::new(cs, g.clone());
            let r = psi_chain(&family, 2);
            assert!(r.passed(), "{:?}", r.first_failure());
        }
    }

    #[test]
    fn onetype_int_of_one_matches_yoneda() {
        let cs: Rc<dyn CSystem> = Rc::new(OneType);
        let (u, g) = world(cs.clone(), 3);
        let family = PsiFamily::new(cs, g.clone());
        let int = g.int(&family.object(&1.into()).unwrap());
        for m in 0..=3 {
            assert_eq!(int.size(u.site.index_of(&m.into()).unwrap()), m);
        }
    }

    #[test]
    fn pt_goes_to_the_empty_context() {
        let cs: Rc<dyn CSystem> = Rc::new(UnitSystem);
        let (_, g) = world(cs.clone(), 2);
        let family = PsiFamily::new(cs, g.clone());
        assert_eq!(family.object(&0.into()).unwrap(), g.pt());
        assert!(family.psi(&0.into()).unwrap().forward.is_identity());
    }
}
