use thiserror::Error;
use vbx_forms::FormError;
use vbx_jet::JetError;
use vbx_laplace::LaplaceError;

#[derive(Debug, Error)]
pub enum ConslawError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Laplace(#[from] LaplaceError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("{0} requires three independent variables")]
    NeedsThree(&'static str),
    #[error("the system carries no realized contact form (build it with linearize)")]
    NoContact,
    #[error("a ({r}, {s}) form is not a conservation law candidate for n = {n}")]
    Bidegree { r: u8, s: u8, n: u8 },
    #[error("rho_{i}{j} has type ({r}, {s}); expected (0, {expected})")]
    RhoType {
        i: u8,
        j: u8,
        r: u8,
        s: u8,
        expected: u8,
    },
    #[error("hypothesis {what} fails ({verdict})")]
    Hypothesis { what: String, verdict: &'static str },
    #[error("{0}")]
    Input(String),
}
