//! Classifier errors.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("symbol forms admit only {0} independent relation(s); at least 2 are needed")]
    TooFewRelations(usize),
    #[error("relation {0} does not annihilate the symbol forms")]
    NotRelation(usize),
    #[error("symbol coefficient {0} depends on jet coordinates other than x")]
    NotXOnly(String),
    #[error("symbol classification needs three independent variables, got {0}")]
    NeedsThree(u8),
    #[error("no valid sample point found for the symbol coefficients")]
    NoSamplePoint,
    #[error("invalid input: {0}")]
    Input(String),
}
