use super::{seq, CSystem, CSystemHom};
use crate::kernel::{probe_fragment, validate_finite_category, validate_functor, Category};
use crate::report::{witness, Check, Report};
use crate::value::Value;

struct Fragment {
    objects: Vec<Value>,
}

impl Fragment {
    fn new(cs: &dyn CSystem, bound: usize) -> Self {
        Fragment {
            objects: cs.objects_up_to(bound),
        }
    }

    fn positive<'a>(&'a self, cs: &'a dyn CSystem) -> impl Iterator<Item = &'a Value> + 'a {
        self.objects.iter().filter(move |x| cs.length(x) > 0)
    }

    /// Every `f : Y -> target` with `Y` in the fragment.
    fn arrows_to<'a>(&'a self, cs: &'a dyn CSystem, target: &'a Value) -> Vec<Value> {
        self.objects
            .iter()
            .flat_map(|y| cs.hom(y, target))
            .collect()
    }
}

fn typed(cs: &dyn Category, f: &Value, dom: &Value, cod: &Value) -> bool {
    cs.dom(f) == *dom && cs.cod(f) == *cod
}

fn carrier_report(cs: &dyn CSystem, bound: usize) -> Report {
    let frag = probe_fragment(cs, bound);
    let laws = validate_finite_category(&frag);
    let closed = match frag.first_external() {
        None => Report::pass("closed").with_checked(frag.morphism_count()),
        Some((f, g)) => Report::fail(
            "closed",
            witness([
                ("f", f.to_string()),
                ("g", g.to_string()),
                ("composite", cs.compose(f, g).to_string()),
            ]),
        ),
    };
    Report::group("carrier", vec![laws, closed])
}

/// The seven conditions on `(l, pt, ft, p, *, q)`, exhaustively over objects
/// of length at most `bound` and the morphisms between them.
pub fn validate_c0(cs: &dyn CSystem, bound: usize) -> Report {
    Report::group(format!("c0:{}|{bound}", cs.label()), c0_children(cs, bound))
}

fn c0_children(cs: &dyn CSystem, bound: usize) -> Vec<Report> {
    let frag = Fragment::new(cs, bound);
    let pt = cs.pt();

    let mut c1 = Check::new("c0_1_length_zero_is_pt");
    c1.expect(cs.length(&pt) == 0, || witness([("X", &pt)]));
    for x in &frag.objects {
        c1.expect((cs.length(x) == 0) == (*x == pt), || {
            witness([("X", x.to_string()), ("length", cs.length(x).to_string())])
        });
    }

    let mut c2 = Check::new("c0_2_ft_length");
    for x in frag.positive(cs) {
        let fx = cs.ft(x);
        c2.expect(cs.length(&fx) + 1 == cs.length(x), || {
            witness([("X", x.to_string()), ("ft", fx.to_string())])
        });
    }

    let mut c3 = Check::new("c0_3_ft_pt");
    c3.expect(cs.ft(&pt) == pt, || witness([("ft(pt)", cs.ft(&pt))]));

    let mut c4 = Check::new("c0_4_pt_final");
    for x in &frag.objects {
        let n = cs.hom(x, &pt).len();
        c4.expect(n == 1, || {
            witness([("X", x.to_string()), ("morphisms_to_pt", n.to_string())])
        });
    }

    let mut typing = Check::new("p_typing");
    for x in &frag.objects {
        let p = cs.proj(x);
        typing.expect(typed(cs, &p, x, &cs.ft(x)), || {
            witness([("X", x.to_string()), ("p", p.to_string())])
        });
    }

    let mut c5 = Check::new("c0_5_canonical_square");
    let mut c6 = Check::new("c0_6_identity_substitution");
    let mut c7 = Check::new("c0_7_composite_substitution");
    for x in frag.positive(cs) {
        let fx = cs.ft(x);
        let px = cs.proj(x);
        for f in frag.arrows_to(cs, &fx) {
            let y = cs.dom(&f);
            let fx_star = cs.star(&f, x);
            let q = cs.q(&f, x);
            let p_star = cs.proj(&fx_star);
            let ok = cs.length(&fx_star) > 0
                && cs.ft(&fx_star) == y
                && typed(cs, &q, &fx_star, x)
                && match (seq(cs, &p_star, &f), seq(cs, &q, &px)) {
                    (Some(a), Some(b)) => a == b,
                    _ => false,
                };
            c5.expect(ok, || {
                witness([
                    ("X", x.to_string()),
                    ("f", f.to_string()),
                    ("f*X", fx_star.to_string()),
                    ("q", q.to_string()),
                ])
            });
            if !ok {
                continue;
            }
            for g in frag.arrows_to(cs, &y) {
                let gf = cs.compose(&g, &f);
                let lhs = cs.star(&gf, x);
                let rhs = cs.star(&g, &fx_star);
                let q_lhs = cs.q(&gf, x);
                let q_rhs = seq(cs, &cs.q(&g, &fx_star), &q);
                c7.expect(lhs == rhs && Some(&q_lhs) == q_rhs.as_ref(), || {
                    witness([
                        ("X", x.to_string()),
                        ("f", f.to_string()),
                        ("g", g.to_string()),
                    ])
                });
            }
        }
        let id = cs.id(&fx);
        let id_star = cs.star(&id, x);
        let id_q = cs.q(&id, x);
        c6.expect(id_star == *x && id_q == cs.id(x), || {
            witness([
                ("X", x.to_string()),
                ("id*X", id_star.to_string()),
                ("q(id,X)", id_q.to_string()),
            ])
        });
    }

    vec![
        carrier_report(cs, bound),
        c1.finish(),
        c2.finish(),
        c3.finish(),
        c4.finish(),
        typing.finish(),
        c5.finish(),
        c6.finish(),
        c7.finish(),
    ]
}

/// The C0 conditions plus the four conditions on `f ↦ s_f`.
pub fn validate_csystem(cs: &dyn CSystem, bound: usize) -> Report {
    let mut children = c0_children(cs, bound);
    let frag = Fragment::new(cs, bound);

    let mut s1 = Check::new("s_1_typing");
    let mut s2 = Check::new("s_2_section");
    let mut s3 = Check::new("s_3_factorization");
    let mut s4 = Check::new("s_4_stability");
    let mut presentations = 0;
    for x in frag.positive(cs) {
        let fx = cs.ft(x);
        let px = cs.proj(x);
        let views: Vec<(Value, Value)> = frag
            .positive(cs)
            .flat_map(|u| {
                cs.hom(&fx, &cs.ft(u))
                    .into_iter()
                    .filter(|g| cs.star(g, u) == *x)
                    .map(|g| (g, u.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        presentations += views.len();
        for f in frag.arrows_to(cs, x) {
            let y = cs.dom(&f);
            let ft_f = cs.compose(&f, &px);
            let base = cs.star(&ft_f, x);
            let s = cs.section(&f);
            let w = || witness([("f", f.to_string()), ("s_f", s.to_string())]);
            if !s1.expect(typed(cs, &s, &y, &base), w) {
                continue;
            }
            s2.expect(seq(cs, &s, &cs.proj(&base)) == Some(cs.id(&y)), w);
            s3.expect(seq(cs, &s, &cs.q(&ft_f, x)) == Some(f.clone()), w);
            for (g, u) in &views {
                let moved = cs.compose(&f, &cs.q(g, u));
                let s_moved = cs.section(&moved);
                s4.expect(s_moved == s, || {
                    witness([
                        ("f", f.to_string()),
                        ("g", g.to_string()),
                        ("U", u.to_string()),
                        ("s_f", s.to_string()),
                        ("s_{f;q(g,U)}", s_moved.to_string()),
                    ])
                });
            }
        }
    }
    children.extend([
        s1.finish(),
        s2.finish(),
        s3.finish(),
        s4.finish()
            .with_note(format!("checked over {presentations} fragment presentations X = g*U")),
    ]);
    Report::group(format!("csystem:{}|{bound}", cs.label()), children)
}

/// Functoriality plus preservation of `l, ft, pt, p, *, q, s` on the
/// source fragment.
pub fn validate_homomorphism(h: &CSystemHom, bound: usize) -> Report {
    let (src, tgt) = (h.source.as_ref(), h.target.as_ref());
    let frag = Fragment::new(src, bound);

    let mut length = Check::new("length");
    let mut ft = Check::new("ft");
    let mut proj = Check::new("p");
    for x in &frag.objects {
        let hx = h.object(x);
        length.expect(tgt.length(&hx) == src.length(x), || {
            witness([("X", x.to_string()), ("h(X)", hx.to_string())])
        });
        ft.expect(h.object(&src.ft(x)) == tgt.ft(&hx), || witness([("X", x)]));
        proj.expect(h.morphism(&src.proj(x)) == tgt.proj(&hx), || witness([("X", x)]));
    }

    let mut pt = Check::new("pt");
    let hpt = h.object(&src.pt());
    pt.expect(hpt == tgt.pt(), || witness([("h(pt)", hpt)]));

    let mut star = Check::new("star");
    let mut q = Check::new("q");
    let mut s = Check::new("s");
    for x in frag.positive(src) {
        let hx = h.object(x);
        for f in frag.arrows_to(src, &src.ft(x)) {
            let hf = h.morphism(&f);
            let w = || witness([("X", x.to_string()), ("f", f.to_string())]);
            star.expect(h.object(&src.star(&f, x)) == tgt.star(&hf, &hx), w);
            q.expect(h.morphism(&src.q(&f, x)) == tgt.q(&hf, &hx), w);
        }
        for f in frag.arrows_to(src, x) {
            let hf = h.morphism(&f);
            s.expect(h.morphism(&src.section(&f)) == tgt.section(&hf), || {
                witness([("f", f.to_string())])
            });
        }
    }

    Report::group(
        format!("homomorphism:{}->{}|{bound}", src.label(), tgt.label()),
        vec![
            length.finish(),
            validate_functor(&h.functor, bound),
            ft.finish(),
            pt.finish(),
            proj.finish(),
            star.finish(),
            q.finish(),
            s.finish(),
        ],
    )
}

#[cfg(test)]
mod tests {
    use std::rc::Rc;

    use super::*;
    use crate::csystem::{builtin_csystem, mutant, OneType, UnitSystem, MUTATION_SUITE};

    #[test]
    fn builtins_pass() {
        assert!(validate_csystem(&UnitSystem, 4).passed());
        assert!(validate_csystem(&OneType, 3).passed());
        let point = builtin_csystem("point").unwrap();
        assert!(validate_csystem(point.as_ref(), 4).passed());
    }

    #[test]
    fn ft_loop_fails_condition_two_at_two() {
        let m = mutant("ft-loop").unwrap();
        let r = validate_c0(m.as_ref(), 4);
        let fail = r.first_failure().unwrap();
        assert_eq!(fail.name, "c0_2_ft_length");
        assert_eq!(fail.witness.as_ref().unwrap()["X"], "2");
    }

    #[test]
    fn nonsection_fails_condition_two() {
        let m = mutant("section-nonsection").unwrap();
        let r = validate_csystem(m.as_ref(), 3);
        assert_eq!(r.first_failure().unwrap().name, "s_2_section");
    }

    #[test]
    fn every_mutant_fails_with_a_witness() {
        for (name, _, _) in MUTATION_SUITE {
            let m = mutant(name).unwrap();
            let r = validate_csystem(m.as_ref(), 3);
            let fail = r.first_failure().unwrap_or_else(|| panic!("{name} passed"));
            assert!(fail.witness.is_some(), "{name}: {}", fail.name);
        }
    }

    #[test]
    fn identity_homomorphism_passes() {
        let cs: Rc<dyn CSystem> = Rc::new(OneType);
        assert!(validate_homomorphism(&CSystemHom::identity(cs), 3).passed());
    }

    #[test]
    fn shifting_functor_fails_length() {
        let cs: Rc<dyn CSystem> = Rc::new(UnitSystem);
        let shift = |x: &Value| Value::Nat(x.as_nat().unwrap() + 1);
        let h = CSystemHom::new(cs.clone(), cs, shift, move |f| {
            let (a, b) = (UnitSystem.dom(f), UnitSystem.cod(f));
            UnitSystem.hom(&shift(&a), &shift(&b))[0].clone()
        });
        let r = validate_homomorphism(&h, 3);
        let fail = r.first_failure().unwrap();
        assert_eq!(fail.name, "length");
        assert_eq!(fail.witness.as_ref().unwrap()["X"], "0");
    }
}
