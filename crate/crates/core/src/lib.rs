pub mod error;
pub mod greens;
pub mod post;
pub mod quad;
pub mod sie;
pub mod specfun;

pub use error::{Error, Result};
