//! Metrics, measures and test-function algebras on boundedly finite measure
//! spaces, with Lévy, random-measure, excursion and fragmentation models.

pub mod algebra;
pub mod error;
pub mod excursion;
pub mod fragmentation;
pub mod measure;
pub mod levy;
pub mod mc;
pub mod metric;
pub mod random_measure;

pub use error::{Error, Result};
pub use measure::AtomicMeasure;
pub use metric::MetricStructure;
