//! The two-dimensional edge array of an orbit and its local structure:
//! symbols, rectangular windows, admissible tiles, and deduction shapes.

mod shape;
mod slab;
mod symbol;
mod tiles;

pub use shape::{determinism_check, Determinism, Shape};
pub use slab::{active_depth, encode_row, orbit_slab, path_symbol, tail_symbol, Slab};
pub use symbol::{format_symbol, parse_symbol, Symbol};
pub use tiles::{check_patch, harvest_tiles, Tile, TileSet};
