//! Markoff triples modulo a prime: finite field arithmetic, the surface and its
//! conic slices, orbit enumeration under `Γ`, incidence structure, subgroup
//! point counts, Stepanov auxiliary polynomials, and cyclotomic bounds.

pub mod counting;
pub mod cyclo;
pub mod error;
pub mod ff;
pub mod incidence;
pub mod linalg;
pub mod orbits;
pub mod poly;
pub mod stepanov;
pub mod surface;

pub use error::{Error, Result};
pub use poly::Poly;
pub use ff::{Ambient, FactorCache, Factorization, Fp, PrimeContext, QuadExt, SubgroupSpec};
pub use orbits::{CageReport, OrbitPartition, OrbitReport, SolutionSet};
pub use surface::{Axis, ConicClass, ConicSection, MarkoffTriple, RowParam};
pub use stepanov::{AuxPoly, AuxPolyParams, Mobius, RationalFunctionSpec, StepanovInstance};
pub use cyclo::{Interval, RootTriple, SmoothnessReport};
