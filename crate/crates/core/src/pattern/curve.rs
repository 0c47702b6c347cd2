use super::voronoi::{voronoi_assign, CellMap, SiteSet};
use super::{BlockKind, NoiseBlock};
use crate::error::{invalid_arg, Result};
use crate::rng::Rng;

/// Source quadrant for every `(quadrant, cell)` pair, indexed
/// `[quadrant][cell]`. Quadrants are numbered top-left, top-right,
/// bottom-left, bottom-right.
pub type SwapChoices = [Vec<u8>; 4];

/// Independent uniform draws (with replacement) of a source quadrant for
/// each cell, quadrant-major.
pub fn draw_swap_choices(cell_count: usize, rng: &mut Rng) -> SwapChoices {
    std::array::from_fn(|_| (0..cell_count).map(|_| rng.below(4) as u8).collect())
}

#[inline]
fn quadrant_origin(quadrant: usize, half: usize) -> (usize, usize) {
    ((quadrant % 2) * half, (quadrant / 2) * half)
}

/// Rebuilds a block by filling each cell of each quadrant with the content
/// of the congruent cell in the chosen source quadrant.
pub fn apply_cell_swap(block: &NoiseBlock, cells: &CellMap, choices: &SwapChoices) -> Result<NoiseBlock> {
    let side = block.side();
    if side % 2 != 0 {
        return Err(invalid_arg(format!("block side {side} must be even")));
    }
    let half = side / 2;
    if cells.side() != half {
        return Err(invalid_arg(format!("cell map side {} does not match quadrant side {half}", cells.side())));
    }
    if choices.iter().any(|c| c.len() != cells.cell_count() || c.iter().any(|&q| q > 3)) {
        return Err(invalid_arg("swap choices do not match the cell map"));
    }
    let src = block.values();
    let mut out = vec![0.0f32; side * side];
    for quadrant in 0..4 {
        let (ox, oy) = quadrant_origin(quadrant, half);
        for y in 0..half {
            for x in 0..half {
                let from = choices[quadrant][cells.cell(x, y)] as usize;
                let (sx, sy) = quadrant_origin(from, half);
                out[(oy + y) * side + ox + x] = src[(sy + y) * side + sx + x];
            }
        }
    }
    Ok(NoiseBlock::new(side, out, BlockKind::Curved, block.p(), block.seed()))
}

/// Converts circular noise into curved noise. One Voronoi tessellation of
/// the quadrant is shared by all four quadrants, so co-located cells are
/// congruent; each cell then takes its content from a uniformly chosen
/// co-located cell.
pub fn curve_block(circular: &NoiseBlock, sites: &SiteSet, seed: u64) -> Result<NoiseBlock> {
    if circular.side() % 2 != 0 {
        return Err(invalid_arg(format!("block side {} must be even", circular.side())));
    }
    let cells = voronoi_assign(circular.side() / 2, sites)?;
    let mut rng = Rng::new(seed);
    let choices = draw_swap_choices(cells.cell_count(), &mut rng);
    apply_cell_swap(circular, &cells, &choices)
}
