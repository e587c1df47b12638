pub mod cli;
pub mod context;
pub mod error;
pub mod fixtures;
pub mod gibbs;
pub mod hypothesis;
pub mod linalg;
pub mod optim;
pub mod quasimult;
pub mod spannability;
pub mod system;
pub mod thermo;
pub mod wordspace;

pub use context::Context;
pub use error::{Error, Result};
pub use system::GeneratorSystem;
pub use wordspace::Word;
