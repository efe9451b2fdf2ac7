//! The image of a C-system under a functor that is injective on morphisms,
//! with its structure transported along the functor.

use std::collections::HashMap;
use std::rc::Rc;

use crate::csystem::{CSystem, CSystemHom};
use crate::error::{Error, Result};
use crate::kernel::{Category, FunctorData};
use crate::report::{witness, Check, Report};
use crate::value::Value;

fn tag(x: &Value) -> Value {
    Value::node("image", vec![x.clone()])
}

fn untag(x: &Value) -> &Value {
    match x.args_of("image") {
        Some([v]) => v,
        _ => panic!("{x} is not an image value"),
    }
}

/// Pass iff `M` is injective on the objects and morphisms of the source
/// fragment of grade at most `bound`.
pub fn check_injective_on_morphisms(m: &FunctorData, bound: usize) -> Report {
    let src = m.source.as_ref();
    let objects = src.objects_up_to(bound);
    let mut check = Check::new("injective");
    let mut seen: HashMap<Value, Value> = HashMap::new();
    let mut record = |check: &mut Check, x: &Value, image: Value| {
        let first = seen.entry(image.clone()).or_insert_with(|| x.clone()).clone();
        check.expect(first == *x, || {
            witness([
                ("first", first.to_string()),
                ("second", x.to_string()),
                ("image", image.to_string()),
            ])
        })
    };
    for x in &objects {
        record(&mut check, x, m.object(x));
    }
    for a in &objects {
        for b in &objects {
            for f in src.hom(a, b) {
                let image = m.morphism(&f);
                record(&mut check, &f, image);
            }
        }
    }
    check.finish()
}

/// Pass iff every object of grade at most `bound` has exactly one morphism
/// into `object`.
pub fn check_final(cat: &dyn Category, object: &Value, bound: usize) -> Report {
    let mut check = Check::new("final_pt");
    for c in cat.objects_up_to(bound) {
        let n = cat.hom(&c, object).len();
        check.expect(n == 1, || {
            witness([
                ("image", object.to_string()),
                ("object", c.to_string()),
                ("morphisms", n.to_string()),
            ])
        });
    }
    check.finish()
}

/// `CC'`: objects and morphisms are `image[x]` for their unique preimages,
/// and every structure map is `M` applied to the source structure.
pub struct ImageSystem {
    pub source: Rc<dyn CSystem>,
    pub functor: FunctorData,
}

impl std::fmt::Debug for ImageSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ImageSystem({})", self.label())
    }
}

impl Category for ImageSystem {
    fn label(&self) -> String {
        format!("image({})", self.source.label())
    }

    fn grade(&self, x: &Value) -> usize {
        self.source.length(untag(x))
    }

    fn objects_up_to(&self, bound: usize) -> Vec<Value> {
        self.source.objects_up_to(bound).iter().map(tag).collect()
    }

    fn hom(&self, a: &Value, b: &Value) -> Vec<Value> {
        self.source.hom(untag(a), untag(b)).iter().map(tag).collect()
    }

    fn dom(&self, f: &Value) -> Value {
        tag(&self.source.dom(untag(f)))
    }

    fn cod(&self, f: &Value) -> Value {
        tag(&self.source.cod(untag(f)))
    }

    fn id(&self, x: &Value) -> Value {
        tag(&self.source.id(untag(x)))
    }

    fn compose(&self, f: &Value, g: &Value) -> Value {
        tag(&self.source.compose(untag(f), untag(g)))
    }
}

impl CSystem for ImageSystem {
    fn pt(&self) -> Value {
        tag(&self.source.pt())
    }

    fn ft(&self, x: &Value) -> Value {
        tag(&self.source.ft(untag(x)))
    }

    fn proj(&self, x: &Value) -> Value {
        tag(&self.source.proj(untag(x)))
    }

    fn star(&self, f: &Value, x: &Value) -> Value {
        tag(&self.source.star(untag(f), untag(x)))
    }

    fn q(&self, f: &Value, x: &Value) -> Value {
        tag(&self.source.q(untag(f), untag(x)))
    }

    fn section(&self, f: &Value) -> Value {
        tag(&self.source.section(untag(f)))
    }
}

impl ImageSystem {
    /// The inclusion `i : CC' -> C`.
    pub fn inclusion(self: &Rc<Self>) -> FunctorData {
        let (a, b) = (self.clone(), self.clone());
        FunctorData::new(
            self.clone(),
            self.functor.target.clone(),
            move |x| a.functor.object(untag(x)),
            move |f| b.functor.morphism(untag(f)),
        )
    }
}

/// Build `CC'` after checking injectivity on the source fragment of grade at
/// most `bound` and finality of `M(pt)` among objects of `C` of grade at most
/// `probe_bound`.
pub fn image_csystem(
    cs: Rc<dyn CSystem>,
    m: FunctorData,
    bound: usize,
    probe_bound: usize,
) -> Result<Rc<ImageSystem>> {
    let inj = check_injective_on_morphisms(&m, bound);
    if let Some(w) = inj.witness {
        return Err(Error::InjectivityViolation {
            first: w["first"].clone(),
            second: w["second"].clone(),
            image: w["image"].clone(),
        });
    }
    let fin = check_final(m.target.as_ref(), &m.object(&cs.pt()), probe_bound);
    if let Some(w) = fin.witness {
        return Err(Error::NotFinal {
            image: w["image"].clone(),
            object: w["object"].clone(),
            count: w["morphisms"].parse().expect("count"),
        });
    }
    Ok(Rc::new(ImageSystem { source: cs, functor: m }))
}

/// The transported equations, checked against `C`: `i` is a faithful
/// functor onto its image, lengths are grades in `C`, and every structure
/// map of `CC'` is sent by `i` to `M` of the source structure map.
pub fn construction_equations(ccp: &Rc<ImageSystem>, bound: usize) -> Report {
    let cs = ccp.source.clone();
    let m = &ccp.functor;
    let c = m.target.clone();
    let i = ccp.inclusion();
    let objects = cs.objects_up_to(bound);

    let mut length = Check::new("length");
    let mut ft = Check::new("ft");
    let mut proj = Check::new("p");
    let mut ident = Check::new("identity");
    let mut comp = Check::new("composition");
    let mut star = Check::new("star");
    let mut q = Check::new("q");
    let mut s = Check::new("s");
    let mut pt = Check::new("pt");
    pt.expect(i.object(&ccp.pt()) == m.object(&cs.pt()), || witness([("pt", ccp.pt())]));

    for x in &objects {
        let (xp, mx) = (tag(x), m.object(x));
        length.expect(c.grade(&mx) == cs.length(x) && ccp.length(&xp) == cs.length(x), || {
            witness([("X", x.to_string()), ("M(X)", mx.to_string())])
        });
        ft.expect(i.object(&ccp.ft(&xp)) == m.object(&cs.ft(x)), || witness([("X", x)]));
        proj.expect(i.morphism(&ccp.proj(&xp)) == m.morphism(&cs.proj(x)), || witness([("X", x)]));
        ident.expect(i.morphism(&ccp.id(&xp)) == c.id(&mx), || witness([("X", x)]));
    }
    for a in &objects {
        for b in &objects {
            for f in cs.hom(a, b) {
                for d in &objects {
                    for g in cs.hom(b, d) {
                        let lhs = i.morphism(&ccp.compose(&tag(&f), &tag(&g)));
                        let rhs = c.compose(&m.morphism(&f), &m.morphism(&g));
                        comp.expect(lhs == rhs, || {
                            witness([("f", f.to_string()), ("g", g.to_string())])
                        });
                    }
                }
                if cs.length(b) > 0 {
                    let ms = m.morphism(&cs.section(&f));
                    s.expect(i.morphism(&ccp.section(&tag(&f))) == ms, || witness([("f", &f)]));
                }
            }
        }
    }
    for x in objects.iter().filter(|x| cs.length(x) > 0) {
        let fx = cs.ft(x);
        for y in &objects {
            for f in cs.hom(y, &fx) {
                let (fp, xp) = (tag(&f), tag(x));
                let w = || witness([("f", f.to_string()), ("X", x.to_string())]);
                star.expect(i.object(&ccp.star(&fp, &xp)) == m.object(&cs.star(&f, x)), w);
                q.expect(i.morphism(&ccp.q(&fp, &xp)) == m.morphism(&cs.q(&f, x)), w);
            }
        }
    }
    Report::group(
        "construction",
        vec![
            length.finish(),
            pt.finish(),
            ft.finish(),
            proj.finish(),
            ident.finish(),
            comp.finish(),
            star.finish(),
            q.finish(),
            s.finish(),
        ],
    )
}

/// `M^| : CC -> CC'`, the corestriction.
pub fn restricted_hom(ccp: &Rc<ImageSystem>) -> CSystemHom {
    CSystemHom::new(ccp.source.clone(), ccp.clone(), tag, tag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{ambient_functor, Ambient, PatchSpec};
    use crate::csystem::{validate_csystem, validate_homomorphism, OneType, UnitSystem};

    fn pipeline(cs: Rc<dyn CSystem>, patch: &str, kind: &str) -> Result<Rc<ImageSystem>> {
        let patch: PatchSpec = serde_json::from_str(patch).unwrap();
        let amb = Rc::new(Ambient::new(cs.clone(), &patch)?);
        let m = ambient_functor(kind, &cs, &amb)?;
        image_csystem(cs, m, 4, 3)
    }

    #[test]
    fn unit_image_in_a_patched_ambient() {
        let ccp = pipeline(
            Rc::new(UnitSystem),
            r#"{"copies":[{"object":"c1","copy_of":1}]}"#,
            "inclusion",
        )
        .unwrap();
        assert!(validate_csystem(ccp.as_ref(), 3).passed());
        assert!(construction_equations(&ccp, 3).passed());
        assert!(validate_homomorphism(&restricted_hom(&ccp), 3).passed());
        let i = ccp.inclusion();
        for x in ccp.source.objects_up_to(3) {
            assert_eq!(i.object(&tag(&x)), ccp.functor.object(&x));
        }
    }

    #[test]
    fn length_is_transported() {
        let ccp = pipeline(Rc::new(OneType), "{}", "inclusion").unwrap();
        let two = ccp.functor.object(&2.into());
        assert_eq!(ccp.functor.target.grade(&two), 2);
        assert_eq!(ccp.length(&tag(&2.into())), 2);
        assert!(construction_equations(&ccp, 2).passed());
    }

    #[test]
    fn collapse_is_rejected() {
        let r = pipeline(Rc::new(UnitSystem), "{}", "collapse");
        assert!(matches!(r, Err(Error::InjectivityViolation { .. })));
        let cs: Rc<dyn CSystem> = Rc::new(UnitSystem);
        let amb = Rc::new(Ambient::new(cs.clone(), &PatchSpec::default()).unwrap());
        let r = check_injective_on_morphisms(&ambient_functor("collapse", &cs, &amb).unwrap(), 2);
        let w = r.witness.unwrap();
        assert_eq!((w["first"].as_str(), w["second"].as_str()), ("0", "1"));
    }

    #[test]
    fn isolated_object_breaks_finality() {
        let r = pipeline(
            Rc::new(UnitSystem),
            r#"{"isolated":{"objects":["d"],"morphisms":[{"id":"idd","dom":"d","cod":"d"}],
                "identities":{"d":"idd"},"composition":[["idd","idd","idd"]]}}"#,
            "inclusion",
        );
        match r {
            Err(Error::NotFinal { object, count, .. }) => assert_eq!((object.as_str(), count), ("d", 0)),
            other => panic!("{other:?}"),
        }
    }
}
