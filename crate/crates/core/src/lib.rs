//! Character varieties of surface groups in SU(2), their trace coordinates,
//! twist flows along simple closed curves, and Monte Carlo tests of
//! ergodicity for the mapping class group action.

pub mod error;
pub mod rng;
pub mod su2;
pub mod word;
pub mod trace;
pub mod repvar;
pub mod twist;
pub mod ergolab;

pub use error::{Error, Result};
pub use su2::{GroupElement, TangentElement};
pub use word::{IndexSet, SurfacePresentation, Word};
pub use trace::{TracePolynomial, TraceReducer};
pub use repvar::{BoundaryCondition, CharacterPoint, FiberSampler, Representation};
pub use twist::{CurveCatalogEntry, CurveRole, SplittingDatum};
