//! C0-systems and C-systems presented lazily, with exhaustive axiom checks
//! on bounded fragments.

mod builtin;
mod mutant;
mod validate;

use std::rc::Rc;

use crate::kernel::{Category, FunctorData};
use crate::value::Value;

pub use builtin::{builtin_csystem, OneType, PointSystem, UnitSystem, BUILTIN_NAMES};
pub use mutant::{mutant, Mutant, MUTATION_SUITE};
pub use validate::{validate_c0, validate_csystem, validate_homomorphism};

/// The structure `(l, pt, ft, p, *, q, s)` on a pre-category.
///
/// `star`, `q` and `section` are only called where they are defined: for
/// `star(f, x)` and `q(f, x)` that is `l(x) > 0` and `f : y -> ft(x)`; for
/// `section(f)` it is `l(cod f) > 0`.
pub trait CSystem: Category {
    fn length(&self, x: &Value) -> usize {
        self.grade(x)
    }

    fn pt(&self) -> Value;

    fn ft(&self, x: &Value) -> Value;

    /// `p_X : X -> ft(X)`.
    fn proj(&self, x: &Value) -> Value;

    /// `f*X`.
    fn star(&self, f: &Value, x: &Value) -> Value;

    /// `q(f, X) : f*X -> X`.
    fn q(&self, f: &Value, x: &Value) -> Value;

    /// `s_f : Y -> ft(f)*X` for `f : Y -> X`.
    fn section(&self, f: &Value) -> Value;

    /// `ft(f) = f ; p_X` for `f : Y -> X`.
    fn ft_morphism(&self, f: &Value) -> Value {
        self.compose(f, &self.proj(&self.cod(f)))
    }
}

/// A functor between C-systems, candidate for being a homomorphism.
#[derive(Clone)]
pub struct CSystemHom {
    pub source: Rc<dyn CSystem>,
    pub target: Rc<dyn CSystem>,
    pub functor: FunctorData,
}

impl std::fmt::Debug for CSystemHom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CSystemHom({} -> {})", self.source.label(), self.target.label())
    }
}

impl CSystemHom {
    pub fn new(
        source: Rc<dyn CSystem>,
        target: Rc<dyn CSystem>,
        on_objects: impl Fn(&Value) -> Value + 'static,
        on_morphisms: impl Fn(&Value) -> Value + 'static,
    ) -> Self {
        let functor = FunctorData::new(
            source.clone(),
            target.clone(),
            on_objects,
            on_morphisms,
        );
        CSystemHom {
            source,
            target,
            functor,
        }
    }

    pub fn identity(cs: Rc<dyn CSystem>) -> Self {
        CSystemHom::new(cs.clone(), cs, Value::clone, Value::clone)
    }

    pub fn object(&self, x: &Value) -> Value {
        self.functor.object(x)
    }

    pub fn morphism(&self, f: &Value) -> Value {
        self.functor.morphism(f)
    }

    /// `self ; other`.
    pub fn then(&self, other: &CSystemHom) -> CSystemHom {
        CSystemHom {
            source: self.source.clone(),
            target: other.target.clone(),
            functor: self.functor.then(&other.functor),
        }
    }
}

/// `f ; g` when the endpoints match.
pub(crate) fn seq(cs: &dyn Category, f: &Value, g: &Value) -> Option<Value> {
    (cs.cod(f) == cs.dom(g)).then(|| cs.compose(f, g))
}
