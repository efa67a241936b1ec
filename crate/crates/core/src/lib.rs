pub mod direct;
pub mod error;
pub mod field;
pub mod fracops;
pub mod functions;
pub mod grid;
pub mod inverse;
pub mod orders;
pub mod spectral;
pub mod specfun;

pub use error::{Error, Result};
pub use grid::{SpaceGrid, TimeGrid};
pub use orders::FractionalOrders;
