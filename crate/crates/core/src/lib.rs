//! Exact derivation and certification of birationality bounds for the
//! anti-pluricanonical maps of smooth 5-folds with nef and big `−K`.

pub mod bounds;
pub mod bundle;
pub mod derive;
pub mod error;
pub mod exact;
pub mod hrr;
pub mod report;

pub use error::ExactError;
pub use report::{AuditEntry, Status};
