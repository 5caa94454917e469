//! Filter engines over an [`InnovationsModel`](crate::InnovationsModel).
//!
//! * [`plain_filter`]: innovations recursions with a known initial state.
//! * [`tobit_filter`]: the same recursions corrected for censoring from above.
//! * [`akf_filter`]: augmented filter that estimates a diffuse initial state.

mod akf;
mod innovations;

pub use akf::{akf_filter, AkfRun};
pub use innovations::{plain_filter, tobit_filter, FilterRun};

pub(crate) use akf::akf_objective;
pub(crate) use innovations::tobit_objective;
