//! Exact desk-scale machinery for two-prime signed power-sum equations:
//! joint-solution enumeration with subsum constraints, slow-decreasing weight
//! tables and restricted norms, and character-theoretic duality certificates
//! on products of p-power torsion groups.

pub mod arith;
pub mod duality;
pub mod error;
pub mod powersum;
pub mod sunit;
pub mod topology;
pub mod weights;

pub use arith::{Prime, PrimeSupport, TorusElement};
pub use duality::ProductCharacter;
pub use error::{Error, Result};
pub use powersum::{Sign, SignedPowerSum, Term};
pub use sunit::{JointSolution, PowerSet, SearchLimits, SubsumMode};
pub use weights::WeightTable;
