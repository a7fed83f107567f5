//! Point counting over finite fields, Frobenius eigenvalues, local zeta
//! functions, pure motives as weight-graded eigenvalue data, and Riemann's
//! explicit formula for the prime counting function.

pub mod explicit_formula;
pub mod finite_field;
pub mod motive;
pub mod roots;
pub mod variety;
pub mod weil;
pub mod zeta;

pub mod cli;
pub use finite_field::{make_field, FFElement, FieldSpec};

pub use explicit_formula::{li, riemann_approx, PrimeCounter, ZeroTable};
pub use motive::Motive;
pub use variety::{CountOptions, CountSequence, PolySystem};
pub use weil::{FrobeniusAlpha, WeilNumbers};
pub use zeta::{PowerSeries, RationalZeta};
