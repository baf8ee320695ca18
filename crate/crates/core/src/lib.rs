//! PIR array codes over GF(2): constructions, exact rate verification,
//! bounds, and a deterministic recovery simulator.
//!
//! A code is `m` columns of `t` cells, each cell a nonzero GF(2)
//! combination of `p` database parts. Its k-PIR property says every part
//! can be recovered from `k` mutually disjoint sets of columns.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod bounds;
pub mod constructions;
pub mod error;
pub mod fixtures;
pub mod gf2;
pub mod matching;
pub mod model;
pub mod simulate;
pub mod verify;

pub use error::{Error, Result};
pub use gf2::{Basis, PartVector};
pub use model::{ArrayCode, Column, ColumnSet, RecoveryPlan};
