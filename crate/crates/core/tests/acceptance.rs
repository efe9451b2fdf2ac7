//! One line per acceptance criterion. Exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::rc::Rc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use strictify::ambient::{ambient_functor, Ambient, PatchSpec};
use strictify::csystem::{
    builtin_csystem, mutant, validate_csystem, validate_homomorphism, CSystem, MUTATION_SUITE,
};
use strictify::image::{construction_equations, image_csystem, restricted_hom};
use strictify::kan::{rho_representable, rho_square, run_kan_problem, set_colimit, KanProblemSpec, KanSetup};
use strictify::presheaf::Site;
use strictify::strictify::{verify_theorem, Job, TheoremReport};
use strictify::Verdict;

const AXIOM_BOUND: usize = 4;
const AXIOM_TIME_LIMIT: Duration = Duration::from_secs(30);
const MUTANT_BOUND: usize = 3;
const MIN_MUTANTS: usize = 10;
const IMAGE_BOUND: usize = 3;
const COLIMIT_DIAGRAMS: u64 = 100;
const COLIMIT_MAX_OBJECTS: usize = 6;
const COLIMIT_MAX_TRANSITIONS: usize = 12;
const RHO_LENGTH: usize = 3;
const RHO_PROBE: usize = 3;
const RHO_TRUNCATION: usize = 3;
const THEOREM_TIME_LIMIT: Duration = Duration::from_secs(120);

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn job(name: &str) -> Job {
    Job::load(&common::fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn patch(name: &str) -> PatchSpec {
    let text = std::fs::read_to_string(common::fixture(name)).expect("fixture");
    serde_json::from_str(&text).expect("patch fixture")
}

fn theorem(name: &str) -> Result<TheoremReport, String> {
    verify_theorem(job(name)).map_err(|e| format!("{name}: {e}"))
}

fn axiom_suites() -> Outcome {
    let mut timings = Vec::new();
    for name in ["unit", "onetype"] {
        let cs = builtin_csystem(name).unwrap();
        let start = Instant::now();
        let r = validate_csystem(cs.as_ref(), AXIOM_BOUND);
        let elapsed = start.elapsed();
        ensure(r.passed(), || format!("{name} fails: {:?}", r.first_failure()))?;
        ensure(elapsed < AXIOM_TIME_LIMIT, || format!("{name} took {elapsed:?}"))?;
        timings.push(format!("{name} {:.2}s", elapsed.as_secs_f64()));
    }
    ensure(MUTATION_SUITE.len() >= MIN_MUTANTS, || "mutation suite too small".into())?;
    for (name, _, _) in MUTATION_SUITE {
        let m = mutant(name).unwrap();
        let r = validate_csystem(m.as_ref(), MUTANT_BOUND);
        let failing = r.first_failure().cloned();
        ensure(!r.passed() && failing.as_ref().is_some_and(|f| f.witness.is_some()), || {
            format!("mutant {name} not caught with a witness")
        })?;
    }
    Ok(format!(
        "{} at L={AXIOM_BOUND}; {} mutants caught at L={MUTANT_BOUND}",
        timings.join(", "),
        MUTATION_SUITE.len()
    ))
}

fn construction_fidelity() -> Outcome {
    for (name, file) in [("unit", "unit_patch.json"), ("onetype", "onetype_patch.json")] {
        let cs = builtin_csystem(name).unwrap();
        let ambient = Rc::new(Ambient::new(cs.clone(), &patch(file)).unwrap());
        let m = ambient_functor("inclusion", &cs, &ambient).unwrap();
        let ccp = image_csystem(cs, m, IMAGE_BOUND, IMAGE_BOUND).map_err(|e| format!("{name}: {e}"))?;
        for r in [
            validate_csystem(ccp.as_ref(), IMAGE_BOUND),
            construction_equations(&ccp, IMAGE_BOUND),
            validate_homomorphism(&restricted_hom(&ccp), IMAGE_BOUND),
        ] {
            ensure(r.passed(), || format!("{name}: {} fails: {:?}", r.name, r.first_failure()))?;
        }
    }
    Ok(format!("unit and onetype images at L={IMAGE_BOUND}"))
}

fn colimit_oracle() -> Outcome {
    let mut classes = 0;
    for seed in 0..COLIMIT_DIAGRAMS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_diagram(&mut rng, COLIMIT_MAX_OBJECTS, COLIMIT_MAX_TRANSITIONS);
        d.validate().map_err(|e| format!("seed {seed}: {e}"))?;
        let got = set_colimit(&d);
        let want = common::zigzag_classes(&d);
        ensure(common::presented_classes(&got) == want, || format!("seed {seed}: partitions differ"))?;
        for (k, &(o, e)) in got.representatives.iter().enumerate() {
            let class = want.iter().find(|c| c.contains(&(o, e))).expect("representative in a class");
            ensure(class[0] == (o, e) && got.class_of[o][e] == k, || {
                format!("seed {seed}: representative {k} is not the least member")
            })?;
        }
        classes += want.len();
    }
    Ok(format!("{COLIMIT_DIAGRAMS} diagrams, {classes} classes"))
}

fn rho_at_desk_scale() -> Outcome {
    let mut squares = 0;
    for (name, file) in [("unit", "unit_patch.json"), ("onetype", "onetype_patch.json")] {
        let cs = builtin_csystem(name).unwrap();
        let ambient = Rc::new(Ambient::new(cs.clone(), &patch(file)).unwrap());
        let m = ambient_functor("inclusion", &cs, &ambient).unwrap();
        let ccp = image_csystem(cs, m, RHO_TRUNCATION + 1, RHO_PROBE).map_err(|e| e.to_string())?;
        let ccp_dyn: Rc<dyn CSystem> = ccp.clone();
        let kan = KanSetup::new(
            ccp.inclusion(),
            Site::new(ccp_dyn.clone(), RHO_TRUNCATION + 1),
            Site::new(ambient.clone(), RHO_PROBE),
            RHO_TRUNCATION,
        )
        .map_err(|e| e.to_string())?;
        let objects = ccp_dyn.objects_up_to(RHO_LENGTH);
        let mut rhos = Vec::new();
        for x in &objects {
            let rho = rho_representable(&kan, x).map_err(|e| format!("{name} rho {x}: {e}"))?;
            ensure(rho.report.passed(), || format!("{name}: {:?}", rho.report.first_failure()))?;
            rhos.push(rho);
        }
        for (a, rx) in objects.iter().zip(&rhos) {
            for (b, rz) in objects.iter().zip(&rhos) {
                for f in ccp_dyn.hom(a, b) {
                    let r = rho_square(&kan, rx, rz, &f);
                    ensure(r.passed(), || format!("{name}: {:?}", r.witness))?;
                    squares += 1;
                }
            }
        }
    }

    let text = std::fs::read_to_string(common::fixture("kan_toy.json")).unwrap();
    let spec: KanProblemSpec = serde_json::from_str(&text).unwrap();
    let toy = run_kan_problem(&spec, 1).map_err(|e| e.to_string())?;
    let size = |o: &str| toy.values.get(o).map(Vec::len);
    ensure(toy.verdict == Verdict::Pass && size("0") == Some(3) && size("1") == Some(0), || {
        format!("toy extension gave {:?}", toy.values)
    })?;
    Ok(format!("rho natural iso for l(x) <= {RHO_LENGTH}, {squares} squares; toy Lan(0) = 3, Lan(1) = 0"))
}

fn universe_morphism_conditions() -> Outcome {
    for name in ["unit_job.json", "onetype_job.json", "point_job.json"] {
        let report = theorem(name)?;
        let gate = report.gate("universe_morphism").ok_or(format!("{name}: no universe_morphism gate"))?;
        ensure(gate.passed(), || format!("{name}: {:?}", gate.first_failure()))?;
    }
    let report = theorem("disconnected_job.json")?;
    let gate = report
        .gate("universe_morphism")
        .ok_or("disconnected: no universe_morphism gate".to_string())?;
    let object = gate
        .find("terminal")
        .and_then(|t| t.witness.as_ref())
        .and_then(|w| w.get("object").cloned());
    ensure(!gate.passed() && object.as_deref() == Some("d"), || {
        format!("disconnected job: terminal witness {object:?}")
    })?;
    Ok("three passing jobs; disconnected job fails at terminal, witness object d".into())
}

fn theorem_end_to_end() -> Outcome {
    let start = Instant::now();
    let first = theorem("unit_job.json")?;
    let elapsed = start.elapsed();
    let second = theorem("unit_job.json")?;
    ensure(first.verdict == Verdict::Pass, || format!("verdict {:?}", first.verdict))?;
    for g in &first.gates {
        ensure(g.passed(), || format!("gate {} fails: {:?}", g.name, g.first_failure()))?;
    }
    for stage in ["sigma", "sigma_naturality"] {
        let s = first.stage(stage).ok_or(format!("no {stage} stage"))?;
        ensure(s.passed(), || format!("{stage} fails: {:?}", s.first_failure()))?;
    }
    ensure(first.theorem.squares_checked > 0, || "no squares checked".into())?;
    ensure(elapsed < THEOREM_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    ensure(first.to_json() == second.to_json(), || "reports differ between runs".into())?;
    Ok(format!(
        "{} objects, {} squares, {:.2}s, report byte-identical",
        first.theorem.objects_checked,
        first.theorem.squares_checked,
        elapsed.as_secs_f64()
    ))
}

fn stabilization() -> Outcome {
    let report = theorem("unit_job.json")?;
    let diag = report.diagnostics.as_ref().ok_or("no diagnostics".to_string())?;
    let stab = &diag.stabilization;
    ensure(!stab.children.is_empty(), || "no stabilization certificates".into())?;
    for c in &stab.children {
        ensure(c.passed(), || format!("{} fails: {:?}", c.name, c.witness))?;
    }
    ensure(stab.passed(), || "stabilization fails".into())?;
    Ok(format!("{} Lan values stable from T to T+1", stab.children.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("axiom suites and mutants", axiom_suites),
        ("image construction fidelity", construction_fidelity),
        ("colimit oracle equivalence", colimit_oracle),
        ("rho at desk scale", rho_at_desk_scale),
        ("universe morphism conditions", universe_morphism_conditions),
        ("theorem end to end", theorem_end_to_end),
        ("stabilization certificates", stabilization),
    ];
    let mut failed = 0;
    for (k, (label, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {label}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {label}: {why}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
