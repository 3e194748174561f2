//! Numerical workbench for regularized Poisson-summation operators, their
//! symmetrizations, Mellin transforms and continuations of the completed
//! zeta function.

pub mod cli;
pub mod error;
pub mod funcspace;
pub mod jet;
pub mod mellin;
pub mod operators;
pub mod quad;
pub mod special;
pub mod verify;
pub mod zeta_xi;

pub type C64 = num_complex::Complex64;

pub use error::{Result, ZError};
pub use funcspace::{AnalyticFunction, Decay, GridFunction, LogGrid};
pub use jet::Jet;
pub use mellin::MellinLine;
pub use operators::{OperatorExpr, SymKind, SymmetrizedOp};
pub use special::ExpPolySeries;
pub use verify::CheckReport;
pub use zeta_xi::ZeroList;

/// Plus/minus selector used by projections and closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
