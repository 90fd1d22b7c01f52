#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channel;
pub mod iw;
pub mod link;
pub mod numerics;
pub mod selector;
pub mod slot;

pub use numerics::{C64, ComplexMatrix, HermitianMatrix, CholeskyFactor, OpCounter, NumericsError};
