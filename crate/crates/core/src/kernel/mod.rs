//! Pre-categories, functors and comma categories.
//!
//! All composition is diagrammatic: `compose(f, g)` is "f then g" and is
//! defined when `cod(f) == dom(g)`.

mod comma;
mod finite;
mod functor;

use crate::value::Value;

pub use comma::{comma_category, CommaCategory, CommaMorphism, CommaObject};
pub use finite::{
    is_filtered, probe_fragment, validate_finite_category, Composite, FiniteCategory,
    FiniteCategorySpec, MorphismSpec,
};
pub use functor::{validate_functor, FunctorData};

/// A pre-category presented by computable functions.
///
/// Objects are graded and enumerable grade by grade; hom-sets are finite.
/// Objects and morphisms are compared by [`Value`] equality.
pub trait Category {
    fn label(&self) -> String;

    fn grade(&self, x: &Value) -> usize;

    /// Every object of grade at most `bound`, in a fixed order. Must grow
    /// monotonically with `bound`.
    fn objects_up_to(&self, bound: usize) -> Vec<Value>;

    fn hom(&self, a: &Value, b: &Value) -> Vec<Value>;

    fn dom(&self, f: &Value) -> Value;

    fn cod(&self, f: &Value) -> Value;

    fn id(&self, x: &Value) -> Value;

    /// `f ; g`. Callers guarantee `cod(f) == dom(g)`.
    fn compose(&self, f: &Value, g: &Value) -> Value;
}
