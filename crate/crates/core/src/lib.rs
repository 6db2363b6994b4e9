#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod harmonic;
pub mod model;
pub mod polynomial;
pub mod random;
pub mod special;
pub mod spectral;
pub mod stats;
pub mod tags;
pub mod tensor;
pub mod textio;

pub use error::{Error, Result};
pub use tensor::{Field, Tensor, UnitVectorTuple, C64};
