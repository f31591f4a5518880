//! Local admissibility: the finite set of 2x2 blocks the edge array uses.
//!
//! The array of a minimal system shows every block it will ever show within
//! a bounded window of one orbit, so harvesting doubles the window until the
//! block set stops growing and records that as a saturation certificate.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::path::PathRep;
use crate::spacetime::slab::{active_depth, orbit_slab, Slab};
use crate::spacetime::symbol::{format_symbol, Symbol};
use crate::validated::ValidatedDiagram;

/// A 2x2 block: `cells[r][c]` is the symbol at row m+r, column j+c for some
/// placement (m, j). Row index grows with time, column with level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Tile {
    pub cells: [[Symbol; 2]; 2],
}

/// All blocks seen in a saturated window of the orbit of the minimal path.
#[derive(Debug, Clone)]
pub struct TileSet {
    tiles: BTreeSet<Tile>,
    /// Half-height of the final harvest window.
    pub rows_used: i64,
    /// Whether doubling the window stopped producing new tiles.
    pub saturated: bool,
}

impl TileSet {
    pub fn contains(&self, tile: &Tile) -> bool {
        self.tiles.contains(tile)
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tile> {
        self.tiles.iter()
    }

    /// Text form for serialization: each tile as a 2x2 matrix of symbol
    /// names, the whole set sorted.
    pub fn to_named(&self, d: &ValidatedDiagram) -> Vec<[[String; 2]; 2]> {
        self.tiles
            .iter()
            .map(|t| {
                [
                    [
                        format_symbol(d, t.cells[0][0]),
                        format_symbol(d, t.cells[0][1]),
                    ],
                    [
                        format_symbol(d, t.cells[1][0]),
                        format_symbol(d, t.cells[1][1]),
                    ],
                ]
            })
            .collect()
    }
}

fn blocks_of(slab: &Slab) -> BTreeSet<Tile> {
    let mut tiles = BTreeSet::new();
    for m in slab.m0..slab.m1() {
        for j in slab.j0..slab.j1() {
            tiles.insert(Tile {
                cells: [
                    [slab.get(m, j).unwrap(), slab.get(m, j + 1).unwrap()],
                    [slab.get(m + 1, j).unwrap(), slab.get(m + 1, j + 1).unwrap()],
                ],
            });
        }
    }
    tiles
}

fn harvest_window(d: &ValidatedDiagram, rows: i64) -> Result<BTreeSet<Tile>> {
    // Columns must pass the deepest explicitly-labelled level so that the
    // window also sees the eventual tail-periodic column regime.
    let depth = active_depth(d, &PathRep::minimal(), (-rows, rows))?;
    let j1 = depth as i64 + 2 * d.schedule_cycle_len() as i64 + 2;
    let slab = orbit_slab(d, &PathRep::minimal(), (-rows, rows), (-1, j1))?;
    Ok(blocks_of(&slab))
}

/// Harvests the tile set, doubling the window until it saturates (or the cap
/// is reached, in which case `saturated` is false).
pub fn harvest_tiles(d: &ValidatedDiagram, initial_rows: i64, max_rows: i64) -> Result<TileSet> {
    let mut rows = initial_rows.max(2);
    let mut tiles = harvest_window(d, rows)?;
    loop {
        let doubled = rows * 2;
        if doubled > max_rows {
            return Ok(TileSet {
                tiles,
                rows_used: rows,
                saturated: false,
            });
        }
        let bigger = harvest_window(d, doubled)?;
        if bigger == tiles {
            return Ok(TileSet {
                tiles,
                rows_used: doubled,
                saturated: true,
            });
        }
        tiles = bigger;
        rows = doubled;
    }
}

/// Checks a window against the tile set, plus the column conventions: clock
/// symbols exactly at columns <= 0, a clock edge exactly at column 1, and
/// template edges above. A violation reports its position.
pub fn check_patch(tiles: &TileSet, slab: &Slab) -> Result<()> {
    for m in slab.m0..=slab.m1() {
        for j in slab.j0..=slab.j1() {
            let sym = slab.get(m, j).unwrap();
            let fits = match sym {
                Symbol::Clock => j <= 0,
                Symbol::ClockEdge { .. } => j == 1,
                Symbol::Edge { .. } => j >= 2,
            };
            if !fits {
                return Err(Error::InadmissiblePatch {
                    m,
                    j,
                    detail: "symbol kind does not match its column".into(),
                });
            }
        }
    }
    for m in slab.m0..slab.m1() {
        for j in slab.j0..slab.j1() {
            let tile = Tile {
                cells: [
                    [slab.get(m, j).unwrap(), slab.get(m, j + 1).unwrap()],
                    [slab.get(m + 1, j).unwrap(), slab.get(m + 1, j + 1).unwrap()],
                ],
            };
            if !tiles.contains(&tile) {
                return Err(Error::InadmissiblePatch {
                    m,
                    j,
                    detail: "2x2 block is not an admissible tile".into(),
                });
            }
        }
    }
    Ok(())
}
