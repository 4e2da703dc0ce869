pub mod assembly;
pub mod basis1d;
pub mod error;
pub mod legendre;
pub mod patchgeom;
pub mod quadrature;
pub mod satcoeff;
pub mod sweep;
pub mod table;

pub use error::{Error, Result};
