use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::rc::Rc;

use clap::{Parser, Subcommand};
use serde::Serialize;

use strictify::ambient::{ambient_functor, Ambient, PatchSpec};
use strictify::csystem::{builtin_csystem, mutant, validate_csystem, validate_homomorphism, CSystem};
use strictify::image::{
    check_final, check_injective_on_morphisms, construction_equations, restricted_hom,
    ImageSystem,
};
use strictify::kan::{run_kan_problem, KanProblemSpec};
use strictify::kernel::{validate_finite_category, FiniteCategory, FiniteCategorySpec};
use strictify::strictify::{verify_theorem, Job};
use strictify::{Error, Report, Result, Verdict};

/// Bounded verification of C-systems, their images, Kan extensions and the
/// strictification of injective functors.
#[derive(Parser)]
#[command(name = "strictify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the category laws of a finite category given as JSON.
    CheckCategory { file: PathBuf },
    /// Check the C-system axioms of a built-in on objects of length <= L.
    CheckCsystem {
        name: String,
        #[arg(long)]
        bound: usize,
        /// Replace the built-in by a named structure mutant.
        #[arg(long)]
        mutant: Option<String>,
    },
    /// Build the image of a built-in inside a patched ambient and check it.
    Image {
        name: String,
        #[arg(long)]
        ambient: PathBuf,
        #[arg(long)]
        bound: usize,
    },
    /// Left Kan extension of a presheaf along a functor of finite categories.
    Kan {
        file: PathBuf,
        #[arg(long)]
        truncation: usize,
    },
    /// Run every gate and the full isomorphism check for a job file.
    VerifyTheorem { jobfile: PathBuf },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, verdict: Verdict) -> ExitCode {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
    match verdict {
        Verdict::Pass | Verdict::Skipped => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(1),
        Verdict::Malformed => ExitCode::from(2),
    }
}

fn image_report(name: &str, patch: &PatchSpec, bound: usize) -> Result<Report> {
    let cs = builtin_csystem(name)?;
    let ambient = Rc::new(Ambient::new(cs.clone(), patch)?);
    let m = ambient_functor("inclusion", &cs, &ambient)?;
    let injective = check_injective_on_morphisms(&m, bound);
    let fin = check_final(ambient.as_ref(), &m.object(&cs.pt()), bound);
    if !injective.passed() || !fin.passed() {
        return Ok(Report::group(format!("image:{name}"), vec![injective, fin]));
    }
    let ccp = Rc::new(ImageSystem {
        source: cs,
        functor: m,
    });
    Ok(Report::group(
        format!("image:{name}"),
        vec![
            injective,
            fin,
            validate_csystem(ccp.as_ref(), bound),
            construction_equations(&ccp, bound),
            validate_homomorphism(&restricted_hom(&ccp), bound),
        ],
    ))
}

fn run(cli: Cli) -> Result<ExitCode> {
    Ok(match cli.command {
        Command::CheckCategory { file } => {
            let spec: FiniteCategorySpec = read_json(&file)?;
            let r = validate_finite_category(&FiniteCategory::from_spec(&spec)?);
            emit(&r, r.verdict)
        }
        Command::CheckCsystem { name, bound, mutant: m } => {
            let cs: Rc<dyn CSystem> = match m {
                Some(m) => mutant(&m)?,
                None => builtin_csystem(&name)?,
            };
            let r = validate_csystem(cs.as_ref(), bound);
            emit(&r, r.verdict)
        }
        Command::Image { name, ambient, bound } => {
            let patch: PatchSpec = read_json(&ambient)?;
            let r = image_report(&name, &patch, bound)?;
            emit(&r, r.verdict)
        }
        Command::Kan { file, truncation } => {
            let spec: KanProblemSpec = read_json(&file)?;
            let r = run_kan_problem(&spec, truncation)?;
            emit(&r, r.verdict)
        }
        Command::VerifyTheorem { jobfile } => {
            let r = verify_theorem(Job::load(&jobfile)?)?;
            emit(&r, r.verdict)
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            let r = Report::malformed("input", strictify::report::witness([("error", &e)]));
            println!("{}", serde_json::to_string_pretty(&r).expect("reports serialize"));
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
