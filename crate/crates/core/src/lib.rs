//! Backward orbits of `phi_p(x) = (x^p - x)/p`: exact integral models,
//! p-adic total splitting, complex fiber trees, Green's functions, averaged
//! Weil heights and the Arakelov-Zhang pairing with the squaring map.

pub mod arithmetic;
pub mod complexdyn;
pub mod error;
pub mod heights;
pub mod mp;
pub mod padic;
pub mod pairing;
pub mod par;
pub mod roots;

pub use error::{Error, Result};
