use std::collections::HashSet;

use crate::error::{invalid_arg, Result};
use crate::rng::Rng;

/// Voronoi sites inside one quadrant, as distinct `(x, y)` pixel positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteSet {
    quadrant_side: usize,
    sites: Vec<(u16, u16)>,
}

impl SiteSet {
    pub fn new(quadrant_side: usize, sites: Vec<(u16, u16)>) -> Result<Self> {
        if quadrant_side == 0 || quadrant_side > u16::MAX as usize {
            return Err(invalid_arg(format!("quadrant side {quadrant_side} out of range")));
        }
        let mut seen = HashSet::with_capacity(sites.len());
        for &(x, y) in &sites {
            if x as usize >= quadrant_side || y as usize >= quadrant_side {
                return Err(invalid_arg(format!("site ({x}, {y}) outside {quadrant_side}x{quadrant_side} quadrant")));
            }
            if !seen.insert((x, y)) {
                return Err(invalid_arg(format!("duplicate site ({x}, {y})")));
            }
        }
        Ok(Self { quadrant_side, sites })
    }

    /// `count` distinct pixel positions drawn uniformly without replacement
    /// (Floyd's algorithm over row-major pixel indices).
    pub fn random(quadrant_side: usize, count: usize, rng: &mut Rng) -> Result<Self> {
        let total = quadrant_side * quadrant_side;
        if count == 0 || count > total {
            return Err(invalid_arg(format!(
                "site count {count} must be in 1..={total} for a {quadrant_side}-pixel quadrant"
            )));
        }
        let mut chosen = HashSet::with_capacity(count);
        let mut order = Vec::with_capacity(count);
        for j in (total - count)..total {
            let t = rng.below(j as u64 + 1) as usize;
            let pick = if chosen.contains(&t) { j } else { t };
            chosen.insert(pick);
            order.push(pick);
        }
        let sites = order
            .into_iter()
            .map(|i| ((i % quadrant_side) as u16, (i / quadrant_side) as u16))
            .collect();
        Self::new(quadrant_side, sites)
    }

    pub fn quadrant_side(&self) -> usize {
        self.quadrant_side
    }

    pub fn sites(&self) -> &[(u16, u16)] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Nearest-site index for every pixel of a square quadrant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellMap {
    side: usize,
    cell_count: usize,
    cells: Vec<u32>,
}

impl CellMap {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    #[inline]
    pub fn cell(&self, x: usize, y: usize) -> usize {
        self.cells[y * self.side + x] as usize
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }
}

/// Assigns each pixel to its nearest site (squared Euclidean distance on
/// integer coordinates, ties to the lowest site index).
///
/// Sites are bucketed on a coarse grid and each pixel searches rings of
/// buckets outward until no unvisited bucket can hold a closer site.
pub fn voronoi_assign(quadrant_side: usize, sites: &SiteSet) -> Result<CellMap> {
    if sites.is_empty() {
        return Err(invalid_arg("Voronoi assignment needs at least one site"));
    }
    if sites.quadrant_side() != quadrant_side {
        return Err(invalid_arg(format!(
            "site set built for side {}, asked for {quadrant_side}",
            sites.quadrant_side()
        )));
    }
    let side = quadrant_side;
    let n = sites.len();
    // roughly one site per bucket
    let bucket = ((side as f64 / (n as f64).sqrt()).ceil() as usize).max(1);
    let grid = side.div_ceil(bucket);
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); grid * grid];
    for (i, &(x, y)) in sites.sites().iter().enumerate() {
        buckets[(y as usize / bucket) * grid + x as usize / bucket].push(i as u32);
    }

    let pts = sites.sites();
    let mut cells = vec![0u32; side * side];
    let g = grid as isize;
    for py in 0..side {
        for px in 0..side {
            let (bx, by) = ((px / bucket) as isize, (py / bucket) as isize);
            let mut best = (i64::MAX, u32::MAX);
            let mut ring = 0isize;
            loop {
                if ring > 0 && best.0 != i64::MAX {
                    let reach = ((ring - 1) as i64) * bucket as i64 + 1;
                    if reach * reach > best.0 {
                        break;
                    }
                }
                if ring > g {
                    break;
                }
                for cy in (by - ring)..=(by + ring) {
                    if cy < 0 || cy >= g {
                        continue;
                    }
                    let edge_row = (cy - by).abs() == ring;
                    let mut cx = bx - ring;
                    while cx <= bx + ring {
                        if cx >= 0 && cx < g {
                            for &si in &buckets[(cy * g + cx) as usize] {
                                let (sx, sy) = pts[si as usize];
                                let dx = sx as i64 - px as i64;
                                let dy = sy as i64 - py as i64;
                                let cand = (dx * dx + dy * dy, si);
                                if cand < best {
                                    best = cand;
                                }
                            }
                        }
                        cx += if edge_row || ring == 0 { 1 } else { 2 * ring };
                    }
                }
                ring += 1;
            }
            cells[py * side + px] = best.1;
        }
    }
    Ok(CellMap {
        side,
        cell_count: n,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(side: usize, sites: &SiteSet) -> Vec<u32> {
        let mut out = Vec::with_capacity(side * side);
        for y in 0..side as i64 {
            for x in 0..side as i64 {
                let mut best = (i64::MAX, 0u32);
                for (i, &(sx, sy)) in sites.sites().iter().enumerate() {
                    let d = (sx as i64 - x).pow(2) + (sy as i64 - y).pow(2);
                    if d < best.0 {
                        best = (d, i as u32);
                    }
                }
                out.push(best.1);
            }
        }
        out
    }

    #[test]
    fn single_site_owns_everything() {
        let s = SiteSet::new(10, vec![(3, 4)]).unwrap();
        let m = voronoi_assign(10, &s).unwrap();
        assert!(m.cells().iter().all(|&c| c == 0));
    }

    #[test]
    fn two_sites_split_on_midline() {
        let q = 9;
        let s = SiteSet::new(q, vec![(0, 0), (0, q as u16 - 1)]).unwrap();
        let m = voronoi_assign(q, &s).unwrap();
        assert_eq!(m.cells(), brute(q, &s).as_slice());
        for y in 0..q {
            for x in 0..q {
                let expect = if y <= (q - 1) / 2 { 0 } else { 1 };
                assert_eq!(m.cell(x, y), expect, "({x},{y})");
            }
        }
    }

    #[test]
    fn matches_brute_force_on_random_sets() {
        let mut rng = Rng::new(2024);
        for (side, n) in [(37, 1), (37, 5), (50, 300), (64, 64), (13, 169)] {
            let s = SiteSet::random(side, n, &mut rng).unwrap();
            assert_eq!(voronoi_assign(side, &s).unwrap().cells(), brute(side, &s).as_slice());
        }
    }

    #[test]
    fn every_site_owns_its_pixel() {
        let mut rng = Rng::new(8);
        let s = SiteSet::random(40, 120, &mut rng).unwrap();
        let m = voronoi_assign(40, &s).unwrap();
        for (i, &(x, y)) in s.sites().iter().enumerate() {
            assert_eq!(m.cell(x as usize, y as usize), i);
        }
    }

    #[test]
    fn rejects_bad_sites() {
        assert!(SiteSet::new(4, vec![(4, 0)]).is_err());
        assert!(SiteSet::new(4, vec![(1, 1), (1, 1)]).is_err());
        let empty = SiteSet::new(4, vec![]).unwrap();
        assert!(voronoi_assign(4, &empty).is_err());
        let mut rng = Rng::new(1);
        assert!(SiteSet::random(3, 10, &mut rng).is_err());
        assert!(SiteSet::random(3, 0, &mut rng).is_err());
        assert_eq!(SiteSet::random(3, 9, &mut rng).unwrap().len(), 9);
    }
}
