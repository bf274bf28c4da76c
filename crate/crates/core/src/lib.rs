// `!(x > 0.0)` style guards are deliberate: they reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod cli;
pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod extension;
pub mod norms;
pub mod profile;
pub mod quadrature;
pub mod special;
