//! Exact genus-zero one- and two-point invariants of split concavex bundles
//! over projective space.
//!
//! The pipeline builds hypergeometric series from bundle data, normalizes them
//! with mirror transformations, re-expands in the flat coordinate and reads
//! invariants off fixed coefficients. Everything is exact rational arithmetic.

pub mod bundle;
pub mod checks;
pub mod closed_forms;
pub mod error;
pub mod golden;
pub mod localization;
pub mod mirror;
pub mod par;
pub mod recovery;
pub mod series;

pub use bundle::{BundleSpec, Insertion, InsertionSpec, PipelineClass};
pub use error::{Error, Result};
pub use mirror::{DescendentReading, MirrorPipeline};
pub use recovery::InvariantTable;
pub use series::{HbarLaurent, LogQSeries, PClass, Rat};
