#![no_std]

extern crate alloc;

pub mod bounds;
pub mod convexity;
pub mod dual;
pub mod expr;
pub mod means;
pub mod quad;
