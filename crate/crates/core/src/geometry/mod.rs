//! Shearlet index set geometry: sheared cubes, tilings and the measures
//! `nu_beta`. All geometric predicates are exact.

pub mod cube;
pub mod index;
pub mod partition;
pub mod textfmt;

pub use cube::{cube_of, Cube};
pub use index::{measure_nu, shears, IndexSet, MeasureSpec, ShearIndex};
pub use partition::{check_cover, extreme_cube_at, partition_check, tiling_cover, BoxWindow, Extreme, PartitionReport};
pub use textfmt::{format_index, parse_index, read_index_set, write_index_set};
