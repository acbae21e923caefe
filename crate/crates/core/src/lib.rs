//! Exact r-removed perimeters, greedy orderings and maximum-perimeter
//! greedoids over ultra triples, with a p-adic instantiation.
//!
//! All arithmetic is exact: distances, weights and perimeters are [`Rat`]
//! values. Points are identified by their index in the triple, and every
//! tie is broken towards the lowest index unless stated otherwise.

pub mod error;
pub mod generate;
pub mod greedoid;
pub mod greedy;
pub mod io;
pub mod oracle;
pub mod padic;
pub mod perimeter;
pub mod point;
pub mod property_s;
pub mod rat;
pub mod triple;

pub use error::{Error, Result};
pub use greedoid::{
    check_greedoid_axioms, check_prefix_theorem, max_perimeter_sets, AxiomReport, MaxPerFamily,
    SetFamily,
};
pub use greedy::{greedy_order, greedy_orders, increment_signature, GreedyTrace, TiePolicy};
pub use padic::{padic_triple, PadicSpec};
pub use perimeter::{dist_f, dist_r, per_r_ordered, per_r_set, DistanceProfile, MonotoneFamily};
pub use point::{Point, PointSet};
pub use rat::Rat;
pub use triple::{check_ultrametric, DistanceTable, MonotoneTable, UltraTriple, Violation};
