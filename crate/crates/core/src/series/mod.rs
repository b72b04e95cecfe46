//! Exact arithmetic tower: rationals, ħ-Laurent polynomials, p-truncated
//! classes and logarithmic q-series.

pub mod laurent;
pub mod logq;
pub mod pclass;
pub mod rat;

pub use laurent::HbarLaurent;
pub use logq::LogQSeries;
pub use pclass::PClass;
pub use rat::Rat;
