//! Space-time coding and ML detection for a rate-2 4x2 MIMO code built from
//! two Golden codewords in an Alamouti arrangement.

pub mod channel;
pub mod decoders;
pub mod error;
pub mod harness;
pub mod mathcore;
pub mod modem;
pub mod stbc;

pub use error::{Error, Result};
