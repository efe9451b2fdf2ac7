//! C-systems, presheaf universes and left Kan extensions, with a bounded
//! verifier that lifts an injective functor out of a C-system to a
//! homomorphism into the C-system generated by `Lan_i ∂`.

pub mod ambient;
pub mod csystem;
pub mod error;
pub mod image;
pub mod kan;
pub mod kernel;
pub mod presheaf;
pub mod report;
pub mod strictify;
pub mod universe;
pub mod value;

pub use error::{Error, Result};
pub use report::{Report, Verdict};
pub use value::Value;
