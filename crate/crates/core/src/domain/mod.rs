//! Abstract values and the translation between concrete and abstract data.

pub mod alloc;
pub mod codec;
pub mod prefix;
pub mod store;

pub use alloc::{AllocError, Bounds};
pub use codec::{decode, encode, CodecError};
pub use prefix::{numeric, numeric_inverse, prefix_code, PrefixCode};
pub use store::{AvId, AvNode, AvStore};
