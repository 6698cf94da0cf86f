pub mod atoms;
pub mod cli;
pub mod error;
pub mod eval;
pub mod logic;
pub mod nominal;
pub mod oracle;
pub mod partition;
pub mod replay;
pub mod transporter;

pub use error::{Error, Result};
