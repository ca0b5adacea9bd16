//! Detection service and command-line interface.

pub mod api;
pub mod cli;
pub mod error;
pub mod store;

pub use api::{router, AppState, Shared};
pub use error::ServiceError;
pub use store::Store;
