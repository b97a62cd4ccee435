// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod association;
pub mod channel;
pub mod clustering;
pub mod error;
pub mod harness;
pub mod precoding;
pub mod rates;
pub mod scenario;
