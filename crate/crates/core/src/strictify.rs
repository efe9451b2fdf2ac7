//! The end-to-end pipeline: gates, the lift `M' = M^| ; H' ; H`, and the
//! natural isomorphism `σ : Y_C ∘ M -> int ∘ M'` checked on fragments.

use std::collections::BTreeMap;
use std::path::Path;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::ambient::{ambient_functor, Ambient, PatchSpec};
use crate::csystem::{builtin_csystem, validate_csystem, validate_homomorphism, CSystem, CSystemHom};
use crate::error::{Error, Result};
use crate::image::{
    check_final, check_injective_on_morphisms, construction_equations, restricted_hom,
    ImageSystem,
};
use crate::kan::{rho_on, rho_square, KanSetup, Rho};
use crate::kernel::{validate_functor, Category, FunctorData};
use crate::presheaf::{first_difference, pointwise_iso_check, validate_naturality, PresheafMorphism, Site};
use crate::report::{witness, Check, Report, Verdict};
use crate::universe::{
    hom_from_universe_morphism, lan_universe, psi_chain, standard_universe, validate_universe,
    validate_universe_morphism, Generated, LanHom, PsiFamily,
};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub csystem: String,
    pub bound: usize,
    #[serde(default)]
    pub ambient_patch: PatchSpec,
    pub probe_bound: usize,
    pub truncation: usize,
    #[serde(default = "inclusion")]
    pub functor: String,
}

fn inclusion() -> String {
    "inclusion".into()
}

impl Job {
    pub fn from_json(text: &str) -> Result<Job> {
        let job: Job = serde_json::from_str(text)?;
        if job.bound == 0 || job.probe_bound == 0 || job.truncation == 0 {
            return Err(Error::Malformed("bounds must be positive".into()));
        }
        Ok(job)
    }

    pub fn load(path: &Path) -> Result<Job> {
        Job::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub filteredness: Report,
    pub stabilization: Report,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremVerdict {
    pub objects_checked: usize,
    pub squares_checked: usize,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<crate::report::Witness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub verdict: Verdict,
    pub gates: Vec<Report>,
    pub stages: Vec<Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    pub theorem: TheoremVerdict,
    pub bounds: BTreeMap<String, usize>,
}

impl TheoremReport {
    pub fn gate(&self, name: &str) -> Option<&Report> {
        self.gates.iter().find(|g| g.name == name)
    }

    pub fn stage(&self, name: &str) -> Option<&Report> {
        self.stages.iter().find(|g| g.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Everything built from a job before any verification.
pub struct Pipeline {
    pub job: Job,
    pub cs: Rc<dyn CSystem>,
    pub ambient: Rc<Ambient>,
    pub functor: FunctorData,
    pub c_site: Rc<Site>,
}

impl Pipeline {
    pub fn new(job: Job) -> Result<Pipeline> {
        let cs = builtin_csystem(&job.csystem)?;
        let ambient = Rc::new(Ambient::new(cs.clone(), &job.ambient_patch)?);
        let functor = ambient_functor(&job.functor, &cs, &ambient)?;
        let c_site = Site::new(ambient.clone(), job.probe_bound);
        Ok(Pipeline {
            job,
            cs,
            ambient,
            functor,
            c_site,
        })
    }

    /// Grade bound of the site of `CC'`: one above the truncation, so that
    /// every extension can be compared with the next truncation.
    pub fn site_bound(&self) -> usize {
        self.job.truncation + 1
    }

    fn bounds(&self) -> BTreeMap<String, usize> {
        BTreeMap::from([
            ("bound".to_string(), self.job.bound),
            ("probe_bound".to_string(), self.job.probe_bound),
            ("truncation".to_string(), self.job.truncation),
            ("site_bound".to_string(), self.site_bound()),
        ])
    }
}

/// The lift and the families entering the final isomorphism.
pub struct Strictified {
    pub ccp: Rc<ImageSystem>,
    pub restricted: CSystemHom,
    pub psi: Rc<PsiFamily>,
    pub lan: Rc<LanHom>,
    pub kan: Rc<KanSetup>,
    pub lifted: CSystemHom,
}

/// Assemble `M' = M^| ; H' ; H` into `CC(PreShv(C), Lan ∂)`.
pub fn strictify(pipe: &Pipeline, ccp: &Rc<ImageSystem>) -> Result<Strictified> {
    let ccp_dyn: Rc<dyn CSystem> = ccp.clone();
    let ccp_site = Site::new(ccp_dyn.clone(), pipe.site_bound());
    let universe = Rc::new(standard_universe(&ccp_dyn, &ccp_site)?);
    let generated = Generated::new("int", universe.clone());
    let psi = PsiFamily::new(ccp_dyn, generated.clone());
    let kan = Rc::new(KanSetup::new(
        ccp.inclusion(),
        ccp_site,
        pipe.c_site.clone(),
        pipe.job.truncation,
    )?);
    let target = Generated::new("int'", Rc::new(lan_universe(&kan, &universe)));
    let lan = LanHom::new(kan.clone(), generated, target);
    let restricted = restricted_hom(ccp);
    let lifted = restricted.then(&psi.hom()).then(&lan.hom());
    Ok(Strictified {
        ccp: ccp.clone(),
        restricted,
        psi,
        lan,
        kan,
        lifted,
    })
}

fn error_report(name: &str, e: &Error) -> Report {
    match e {
        Error::Gate { gate, witness: Some(w) } => {
            let mut w = w.clone();
            w.insert("gate".into(), gate.clone());
            Report::fail(name, w)
        }
        _ => Report::fail(name, witness([("error", e)])),
    }
}

/// `σ_x = ρ_{Mx} ; τ''_x⁻¹` where `τ''_x = ψ̂_{H'x} ; Lan(ψ_x)`.
struct Sigma {
    rho: Rho,
    sigma: PresheafMorphism,
}

fn sigma(st: &Strictified, x: &Value) -> Result<(Sigma, Report)> {
    let xp = st.restricted.object(x);
    let h1 = st.psi.object(&xp)?;
    let tau_prime = st.psi.psi(&xp)?;
    let tau = st.lan.psi_hat(&h1)?;
    let tau2 = tau.forward.then(&st.kan.lan_morphism(&tau_prime.forward));
    let tau2_iso = pointwise_iso_check(&tau2).map_err(|r| Error::Gate {
        gate: format!("tau2:{x}"),
        witness: r.witness,
    })?;
    let rho = rho_on(&st.kan, &xp, st.psi.representable(&xp)?)?;
    let sigma = rho.iso.forward.then(&tau2_iso.inverse);
    let report = Report::group(
        format!("x={x}"),
        vec![
            tau2_iso.report("tau2_bijective"),
            validate_naturality(&tau2),
            rho.report.clone(),
            match pointwise_iso_check(&sigma) {
                Ok(iso) => iso.report("sigma_bijective"),
                Err(mut r) => {
                    r.name = "sigma_bijective".into();
                    r
                }
            },
            validate_naturality(&sigma),
        ],
    );
    Ok((Sigma { rho, sigma }, report))
}

fn theorem(st: &Strictified, pipe: &Pipeline) -> (Vec<Report>, TheoremVerdict) {
    let cs = &pipe.cs;
    let c = pipe.ambient.clone();
    let objects = cs.objects_up_to(pipe.job.bound);
    let mut components = Vec::new();
    let mut sigmas = BTreeMap::new();
    for x in &objects {
        match sigma(st, x) {
            Ok((s, r)) => {
                components.push(r);
                sigmas.insert(x.clone(), s);
            }
            Err(e) => components.push(error_report(&format!("x={x}"), &e)),
        }
    }

    let mut rho_squares = Vec::new();
    let mut squares = Check::new("sigma_naturality");
    for x in &objects {
        for z in &objects {
            let (Some(sx), Some(sz)) = (sigmas.get(x), sigmas.get(z)) else {
                continue;
            };
            for f in cs.hom(x, z) {
                let fp = st.restricted.morphism(&f);
                rho_squares.push(rho_square(&st.kan, &sx.rho, &sz.rho, &fp));
                let mf = pipe.functor.morphism(&f);
                let cc = c.clone();
                let yf = PresheafMorphism::new(
                    &sx.rho.representable,
                    &sz.rho.representable,
                    move |_, g| cc.compose(g, &mf),
                )
                .expect("postcomposition stays in the representable");
                let lhs = yf.then(&sz.sigma);
                let rhs = sx.sigma.then(&st.lan.target.morphism(&st.lifted.morphism(&f)));
                squares.expect(lhs == rhs, || {
                    let (object, element, a, b) = first_difference(&lhs, &rhs).expect("they differ");
                    witness([
                        ("f", f.to_string()),
                        ("object", object.to_string()),
                        ("element", element.to_string()),
                        ("left", a.to_string()),
                        ("right", b.to_string()),
                    ])
                });
            }
        }
    }
    let squares = squares.finish();
    let squares_checked = squares.checked;
    let sigma_report = Report::group("sigma", components);
    let verdict = TheoremVerdict {
        objects_checked: objects.len(),
        squares_checked,
        verdict: if sigma_report.passed() && squares.passed() && sigmas.len() == objects.len() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        witness: sigma_report
            .first_failure()
            .or(squares.first_failure())
            .and_then(|r| r.witness.clone()),
    };
    let stages = vec![
        Report::group("rho_naturality", rho_squares),
        sigma_report,
        squares,
    ];
    (stages, verdict)
}

/// Run every gate and, when they all pass, the whole chain. Failures are
/// verdicts: this never errors once the job has been built.
pub fn verify_theorem(job: Job) -> Result<TheoremReport> {
    let pipe = Pipeline::new(job)?;
    let (l, t) = (pipe.job.bound, pipe.job.truncation);
    let cs = pipe.cs.clone();
    let mut gates = Vec::new();

    let injective = check_injective_on_morphisms(&pipe.functor, l.max(pipe.site_bound()));
    let injective_ok = injective.passed();
    gates.push(injective);
    gates.push(check_final(
        pipe.ambient.as_ref(),
        &pipe.functor.object(&cs.pt()),
        pipe.job.probe_bound,
    ));
    gates.push(rename(validate_functor(&pipe.functor, l), "functor"));
    gates.push(rename(validate_csystem(cs.as_ref(), l), "csystem"));

    let mut stages = Vec::new();
    let mut diagnostics = None;
    let mut theorem_verdict = TheoremVerdict {
        objects_checked: 0,
        squares_checked: 0,
        verdict: Verdict::Skipped,
        witness: None,
    };

    if injective_ok {
        let ccp = Rc::new(ImageSystem {
            source: cs.clone(),
            functor: pipe.functor.clone(),
        });
        gates.push(Report::group(
            "image_csystem",
            vec![validate_csystem(ccp.as_ref(), l), construction_equations(&ccp, l)],
        ));
        let st = strictify(&pipe, &ccp)?;
        gates.push(rename(validate_homomorphism(&st.restricted, l), "restricted_hom"));

        let tests: Vec<Value> = cs
            .objects_up_to(l)
            .iter()
            .map(|x| st.psi.object(&st.restricted.object(x)))
            .collect::<Result<_>>()?;
        gates.push(validate_universe_morphism(&st.kan, &st.lan.source, &tests));

        if gates.iter().all(Report::passed) {
            stages.push(validate_universe(&st.psi.generated.universe));
            stages.push(psi_chain(&st.psi, l));
            stages.push(hom_from_universe_morphism(&st.lan, &tests, l));
            stages.push(rename(validate_homomorphism(&st.lifted, l), "lifted_hom"));
            let (theorem_stages, verdict) = theorem(&st, &pipe);
            stages.extend(theorem_stages);
            theorem_verdict = verdict;
        }

        let upper = KanSetup::new(
            st.kan.functor.clone(),
            st.kan.source.clone(),
            st.kan.target.clone(),
            t + 1,
        )?;
        let certificates = st
            .kan
            .extended()
            .iter()
            .map(|p| st.kan.stabilization_probe(&upper, p))
            .collect();
        diagnostics = Some(Diagnostics {
            filteredness: st.kan.filteredness().with_note("informational"),
            stabilization: Report::group("stabilization", certificates),
        });
    }

    if theorem_verdict.verdict == Verdict::Skipped {
        theorem_verdict.witness = gates
            .iter()
            .find_map(Report::first_failure)
            .and_then(|r| r.witness.clone());
    }

    let stable = diagnostics.as_ref().map_or(true, |d| d.stabilization.passed());
    let verdict = if gates.iter().all(Report::passed)
        && stages.iter().all(Report::passed)
        && theorem_verdict.verdict == Verdict::Pass
        && stable
    {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(TheoremReport {
        verdict,
        gates,
        stages,
        diagnostics,
        theorem: theorem_verdict,
        bounds: pipe.bounds(),
    })
}

fn rename(mut r: Report, name: &str) -> Report {
    r.name = name.into();
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(json: &str) -> Job {
        Job::from_json(json).unwrap()
    }

    #[test]
    fn unit_job_passes() {
        let r = verify_theorem(job(
            r#"{"csystem":"unit","bound":2,"probe_bound":2,"truncation":2,
                "ambient_patch":{"copies":[{"object":"c1","copy_of":1}]}}"#,
        ))
        .unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.to_json());
        assert_eq!(r.theorem.objects_checked, 3);
        assert_eq!(r.theorem.squares_checked, 9);
    }

    #[test]
    fn point_job_passes_vacuously() {
        let r = verify_theorem(job(r#"{"csystem":"point","bound":2,"probe_bound":2,"truncation":1}"#)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.to_json());
        assert_eq!(r.theorem.objects_checked, 1);
    }

    #[test]
    fn collapse_fails_the_first_gate() {
        let r = verify_theorem(job(
            r#"{"csystem":"unit","bound":2,"probe_bound":2,"truncation":1,"functor":"collapse"}"#,
        ))
        .unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(!r.gates[0].passed());
        assert_eq!(r.theorem.verdict, Verdict::Skipped);
    }

    #[test]
    fn corrupted_sigma_breaks_naturality() {
        let pipe = Pipeline::new(job(
            r#"{"csystem":"onetype","bound":2,"probe_bound":2,"truncation":2}"#,
        ))
        .unwrap();
        let ccp = Rc::new(ImageSystem {
            source: pipe.cs.clone(),
            functor: pipe.functor.clone(),
        });
        let st = strictify(&pipe, &ccp).unwrap();
        let (one, two) = (Value::Nat(1), Value::Nat(2));
        let (s1, _) = sigma(&st, &one).unwrap();
        let (s2, _) = sigma(&st, &two).unwrap();
        let c2 = pipe.c_site.index_of(&Value::node("base", vec![two.clone()])).unwrap();
        let mut tables = s1.sigma.components().to_vec();
        tables[c2].swap(0, 1);
        let bad = PresheafMorphism::from_components(s1.sigma.source(), s1.sigma.target(), tables);
        let failing = pipe.cs.hom(&two, &one).iter().any(|f| {
            let mf = pipe.functor.morphism(f);
            let c = pipe.ambient.clone();
            let yf = PresheafMorphism::new(&s2.rho.representable, &s1.rho.representable, move |_, g| {
                c.compose(g, &mf)
            })
            .unwrap();
            let int_f = st.lan.target.morphism(&st.lifted.morphism(f));
            yf.then(&bad) != s2.sigma.then(&int_f)
        });
        assert!(failing);
        assert!(validate_naturality(&bad).first_failure().unwrap().witness.is_some());
    }

    #[test]
    fn zero_bound_is_malformed() {
        assert!(matches!(
            Job::from_json(r#"{"csystem":"unit","bound":0,"probe_bound":1,"truncation":1}"#),
            Err(Error::Malformed(_))
        ));
    }
}
