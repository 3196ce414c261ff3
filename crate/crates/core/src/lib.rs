#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod cns;
pub mod compalg;
pub mod jordan;
pub mod linalg;
pub mod multiforms;
pub mod picmod;
pub mod poly;
pub mod rat;
pub mod report;
pub mod scalars;
pub mod tits;
