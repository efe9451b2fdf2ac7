mod common;

use std::rc::Rc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use strictify::ambient::{ambient_functor, Ambient, PatchSpec};
use strictify::csystem::{builtin_csystem, CSystem, BUILTIN_NAMES};
use strictify::image::{image_csystem, ImageSystem};
use strictify::kan::{set_colimit, KanSetup};
use strictify::kernel::{comma_category, Category};
use strictify::presheaf::{canonical_pullback, natural_transformations, Presheaf, PresheafMorphism, Site};
use strictify::universe::{standard_universe, Generated};
use strictify::Value;

fn image(name: &str, patch: &str) -> (Rc<ImageSystem>, Rc<Ambient>) {
    let cs = builtin_csystem(name).unwrap();
    let patch: PatchSpec = serde_json::from_str(patch).unwrap();
    let ambient = Rc::new(Ambient::new(cs.clone(), &patch).unwrap());
    let m = ambient_functor("inclusion", &cs, &ambient).unwrap();
    (image_csystem(cs, m, 3, 3).unwrap(), ambient)
}

fn kan(name: &str, truncation: usize) -> (Rc<dyn CSystem>, KanSetup) {
    let (ccp, ambient) = image(name, r#"{"copies":[{"object":"c","copy_of":1}]}"#);
    let ccp_dyn: Rc<dyn CSystem> = ccp.clone();
    let setup = KanSetup::new(
        ccp.inclusion(),
        Site::new(ccp_dyn.clone(), truncation + 1),
        Site::new(ambient, truncation),
        truncation,
    )
    .unwrap();
    (ccp_dyn, setup)
}

fn postcompose(site: &Rc<Site>, a: &Rc<Presheaf>, b: &Rc<Presheaf>, f: &Value) -> PresheafMorphism {
    let cat = site.category_rc();
    let f = f.clone();
    PresheafMorphism::new(a, b, move |_, g| cat.compose(g, &f)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn colimit_matches_zigzag_closure(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_diagram(&mut rng, 6, 12);
        let c = set_colimit(&d);
        prop_assert_eq!(common::presented_classes(&c), common::zigzag_classes(&d));
        for (k, &(o, e)) in c.representatives.iter().enumerate() {
            prop_assert_eq!(c.class_of[o][e], k);
        }
    }

    #[test]
    fn length_of_ft_drops_by_one(name in prop::sample::select(BUILTIN_NAMES), bound in 0usize..4) {
        let cs = builtin_csystem(name).unwrap();
        for x in cs.objects_up_to(bound) {
            prop_assert_eq!(cs.length(&cs.ft(&x)), cs.length(&x).saturating_sub(1));
        }
    }

    #[test]
    fn truncated_comma_embeds_in_the_next(name in prop::sample::select(&["unit", "onetype"][..]), t in 1usize..3) {
        let (_, setup) = kan(name, t);
        for c in setup.target.fragment().objects() {
            let lower = comma_category(&setup.functor, c, t);
            let upper = comma_category(&setup.functor, c, t + 1);
            for o in &lower.objects {
                prop_assert!(upper.objects.contains(o));
            }
            prop_assert!(lower.morphisms.len() <= upper.morphisms.len());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lan_is_functorial(a in 0usize..3, b in 0usize..3, c in 0usize..3, i in 0usize..64, j in 0usize..64) {
        let (ccp, setup) = kan("onetype", 2);
        let objs = ccp.objects_up_to(2);
        let (x, y, z) = (&objs[a], &objs[b], &objs[c]);
        let (fs, gs) = (ccp.hom(x, y), ccp.hom(y, z));
        prop_assume!(!fs.is_empty() && !gs.is_empty());
        let (f, g) = (&fs[i % fs.len()], &gs[j % gs.len()]);
        let rep = |v: &Value| Rc::new(Presheaf::yoneda(&setup.source, v));
        let (yx, yy, yz) = (rep(x), rep(y), rep(z));
        let yf = postcompose(&setup.source, &yx, &yy, f);
        let yg = postcompose(&setup.source, &yy, &yz, g);

        prop_assert!(setup.lan_morphism(&PresheafMorphism::identity(&yx)).is_identity());
        let together = setup.lan_morphism(&yf.then(&yg));
        let apart = setup.lan_morphism(&yf).then(&setup.lan_morphism(&yg));
        prop_assert!(together == apart);
    }

    #[test]
    fn pullback_size_is_the_sum_of_fibres(a in 0usize..3, pick in 0usize..64) {
        let (ccp, _) = image("onetype", "{}");
        let ccp: Rc<dyn CSystem> = ccp;
        let site = Site::new(ccp.clone(), 2);
        let u = standard_universe(&ccp, &site).unwrap();
        let x = &ccp.objects_up_to(2)[a];
        let yx = Rc::new(Presheaf::yoneda(&site, x));
        let maps = natural_transformations(&yx, &u.u);
        prop_assume!(!maps.is_empty());
        let f = &maps[pick % maps.len()];
        let pb = canonical_pullback(f, &u.p, "pb");
        for k in 0..site.object_count() {
            let fibres: usize = (0..yx.size(k))
                .map(|e| (0..u.ut.size(k)).filter(|&t| u.p.apply(k, t) == f.apply(k, e)).count())
                .sum();
            prop_assert_eq!(pb.object.size(k), fibres);
        }
    }

    #[test]
    fn generated_ft_drops_length(bound in 0usize..3) {
        let (ccp, _) = image("unit", "{}");
        let ccp: Rc<dyn CSystem> = ccp;
        let site = Site::new(ccp.clone(), 3);
        let generated = Generated::new("int", Rc::new(standard_universe(&ccp, &site).unwrap()));
        for x in generated.objects_up_to(bound) {
            prop_assert_eq!(generated.length(&generated.ft(&x)), generated.length(&x).saturating_sub(1));
        }
    }
}
