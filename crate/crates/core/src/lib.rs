pub mod adiasim;
pub mod arrayembed;
pub mod coeffora;
pub mod error;
pub mod gatelog;
pub mod holocheck;
pub mod loopsynth;
pub mod matcore;

pub use error::{Error, Result};
pub use matcore::ComplexMatrix;
