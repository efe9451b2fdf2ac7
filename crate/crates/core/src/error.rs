use thiserror::Error;

use crate::report::Witness;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("unknown built-in C-system `{0}`")]
    UnknownCSystem(String),

    #[error("presheaf `{presheaf}` is ill-defined: {detail}")]
    IllDefinedPresheaf { presheaf: String, detail: String },

    #[error("presheaf morphism component leaves its target at {object}: {detail}")]
    IllDefinedMorphism { object: String, detail: String },

    #[error("component at {object} is not a bijection")]
    NotInvertible { object: String },

    #[error("functor is not injective: {first} and {second} both map to {image}")]
    InjectivityViolation {
        first: String,
        second: String,
        image: String,
    },

    #[error("{image} is not final: {object} has {count} morphisms into it")]
    NotFinal {
        image: String,
        object: String,
        count: usize,
    },

    #[error("comparison map not invertible ({stage}) at {object}")]
    ComparisonFailed { stage: String, object: String },

    #[error("gate `{gate}` failed")]
    Gate { gate: String, witness: Option<Witness> },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
