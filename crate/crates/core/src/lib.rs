pub mod algebra;
pub mod coherent;
pub mod diagonalizer;
pub mod displacement;
pub mod error;
pub mod linalg;
pub mod lr;
pub mod oracle;
pub mod protocol;
pub mod quad;
pub mod tc;

pub use algebra::{Algebra, GeneratorSet, RepKind, RepSpec};
pub use diagonalizer::{DiagResult, LinearHamiltonian};
pub use displacement::CoherentParams;
pub use error::{Error, Result};
pub use lr::{AuxiliaryState, PhaseBreakdown, StateLabel};
pub use protocol::{DrivingProtocol, Schedule};
