//! Construction, verification, lower bounds and delivery simulation for
//! placement delivery arrays (PDAs) in centralized coded caching.

pub mod bitset;
pub mod bound;
pub mod closed_forms;
pub mod construct;
pub mod error;
pub mod filler;
pub mod pda;
pub mod report;
pub mod self_check;
pub mod sim;

pub use bitset::{RowSet, MAX_ROWS};
pub use bound::{BoundCertificate, Method, UserOrdering};
pub use error::{Error, Result};
pub use pda::{Cell, PdaGrid, PdaParams, StarPattern};
