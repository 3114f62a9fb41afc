// `!(x > 0.0)` guards are deliberate: they reject NaN along with the bound.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod gateway;
pub mod control;
pub mod harness;
pub mod helm;
pub mod hydromath;
pub mod measurement;
pub mod navigation;
pub mod par;
pub mod plant;
