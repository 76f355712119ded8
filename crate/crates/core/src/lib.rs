pub mod channel;
pub mod error;
pub mod gmi;
pub mod isi;
pub mod linalg;
pub mod methods;
pub mod rx;

pub use error::{Error, Result};
