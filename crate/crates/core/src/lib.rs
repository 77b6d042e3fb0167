#![allow(clippy::needless_range_loop)]

pub mod allocation;
pub mod appmodel;
pub mod cli;
pub mod error;
pub mod ilp;
pub mod platform;
pub mod scenario;
pub mod simulator;
pub mod solver;
pub mod theorems;
