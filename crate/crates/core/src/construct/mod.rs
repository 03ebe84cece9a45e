//! The construction: theorem ledger, pigeonhole units and lattice windows.

pub mod ledger;
pub mod pigeonhole;
pub mod window;

pub use ledger::{exponent, exponent_from_log_u, interval_sci, theorem_parameters, Delta, TheoremLedger};
pub use pigeonhole::{class_grouping, conjugate_free_primes, denominator_bound, pigeonhole_units, ClassGrouping, SearchParams, UnitSet};
pub use window::{build_pointset, enumerate_window, halton_translates, roots_of_unity, select_translate, skewness_bound, ConstructionReport, PointSet, WindowConfig};
