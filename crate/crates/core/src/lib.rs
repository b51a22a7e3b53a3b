//! Multigroup multicast precoding for multibeam satellite downlinks, with a
//! Monte-Carlo system simulator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub mod channel;
pub mod error;
pub mod modcod;
pub mod partition;
pub mod precoding;
pub mod scheduler;
pub mod sim;

pub use error::{Error, Result};
pub use partition::GroupPartition;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
