pub mod error;
pub mod linear;
pub mod metrics;
pub mod rule;
pub mod word;

pub use error::{Error, Result};
pub use linear::LinearCode;
pub use metrics::{Code, Density};
pub use rule::GoodnessRule;
pub use word::Word;
pub mod construct;
pub mod ensembles;
pub mod io;
pub mod verify;
