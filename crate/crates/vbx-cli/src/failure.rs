//! Errors of a run, split into input errors (exit 2) and computations that could not be certified (exit 1).

use vbx_classify::ClassifyError;
use vbx_coframe::CoframeError;
use vbx_conslaw::ConslawError;
use vbx_expr::ParseError;
use vbx_forms::FormError;
use vbx_jet::{JetError, SpecError};
use vbx_laplace::LaplaceError;

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Computation { kind: &'static str, message: String },
}

impl Failure {
    fn computation(kind: &'static str, e: impl ToString) -> Self {
        Failure::Computation {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<FormError> for Failure {
    fn from(e: FormError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<JetError> for Failure {
    fn from(e: JetError) -> Self {
        match e {
            JetError::BadIndex { .. } => Failure::Input(e.to_string()),
            JetError::Budget { .. } => Failure::computation("BudgetExceeded", e),
            JetError::SampleCapExceeded { .. } => Failure::computation("SampleCapExceeded", e),
            JetError::Zero(_) => Failure::computation("Indeterminate", e),
        }
    }
}

impl From<LaplaceError> for Failure {
    fn from(e: LaplaceError) -> Self {
        match e {
            LaplaceError::Jet(j) => j.into(),
            LaplaceError::Zero(_) => Failure::computation("Indeterminate", e),
            LaplaceError::MuZero(_)
            | LaplaceError::NeedsThree(_)
            | LaplaceError::BadDirection(..) => Failure::Input(e.to_string()),
            LaplaceError::InvariantVanishes { .. } => Failure::computation("InvariantVanishes", e),
            LaplaceError::Inconsistent(_) => Failure::computation("Inconsistent", e),
        }
    }
}

impl From<CoframeError> for Failure {
    fn from(e: CoframeError) -> Self {
        match e {
            CoframeError::Laplace(l) => l.into(),
            CoframeError::Jet(j) => j.into(),
            CoframeError::OrderTooHigh { .. } | CoframeError::BadChoice { .. } => {
                Failure::Input(e.to_string())
            }
            CoframeError::NoContact => Failure::computation("NoContact", e),
            CoframeError::NotTriangular(_) => Failure::computation("NotTriangular", e),
            CoframeError::Blocked { .. } => Failure::computation("Blocked", e),
        }
    }
}

impl From<ConslawError> for Failure {
    fn from(e: ConslawError) -> Self {
        match e {
            ConslawError::Jet(j) => j.into(),
            ConslawError::Laplace(l) => l.into(),
            ConslawError::Form(f) => f.into(),
            ConslawError::NoContact => Failure::computation("NoContact", e),
            ConslawError::Hypothesis { .. } => Failure::computation("Hypothesis", e),
            ConslawError::NeedsThree(_)
            | ConslawError::Bidegree { .. }
            | ConslawError::RhoType { .. }
            | ConslawError::Input(_) => Failure::Input(e.to_string()),
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::TooFewRelations(_) => Failure::computation("TooFewRelations", e),
            ClassifyError::NotRelation(_) => Failure::computation("NotRelation", e),
            ClassifyError::NoSamplePoint => Failure::computation("NoSamplePoint", e),
            ClassifyError::NotXOnly(_) | ClassifyError::NeedsThree(_) | ClassifyError::Input(_) => {
                Failure::Input(e.to_string())
            }
        }
    }
}
