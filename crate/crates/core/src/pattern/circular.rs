use std::f64::consts::{PI, SQRT_2};

use super::{BlockKind, NoiseBlock};
use crate::error::{invalid_arg, Result};
use crate::markov::{MarkovChain, MarkovParams};

/// One concentric circle of the circular pattern.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleSpec {
    pub radius: f64,
    /// Samples laid on this circle, `max(1, round(2 pi r))`.
    pub samples: usize,
}

/// `R = ceil(A / sqrt2)`: circles from the half-diagonal down to a radius
/// in `(0, 1]`, so the innermost circle still covers the center.
fn radius_count(block_side: usize) -> usize {
    (block_side as f64 / SQRT_2).ceil() as usize
}

fn check_side(block_side: usize) -> Result<()> {
    if block_side < 2 {
        Err(invalid_arg(format!("block side {block_side} must be at least 2")))
    } else {
        Ok(())
    }
}

/// Total arc length `2 pi sum_{v=0}^{R-1} (A/sqrt2 - v)`, i.e. the sequence
/// length needed to cover every circle of an `A x A` block.
pub fn required_length(block_side: usize) -> Result<f64> {
    check_side(block_side)?;
    let a = block_side as f64 / SQRT_2;
    let sum: f64 = (0..radius_count(block_side)).map(|v| a - v as f64).sum();
    Ok(2.0 * PI * sum)
}

/// Circles from the outermost (radius = half-diagonal) inward in unit steps.
pub fn circle_layout(block_side: usize) -> Result<Vec<CircleSpec>> {
    check_side(block_side)?;
    let a = block_side as f64 / SQRT_2;
    Ok((0..radius_count(block_side))
        .map(|v| {
            let radius = a - v as f64;
            let samples = ((2.0 * PI * radius).round() as usize).max(1);
            CircleSpec { radius, samples }
        })
        .collect())
}

/// Writes one continuous chain along the circles of an `A x A` block.
///
/// Circle `v` gets its samples at equal angular steps starting from angle 0
/// and running counter-clockwise (upward on screen), centered on the block
/// center. A sample lands on the pixel nearest its position; later samples
/// overwrite earlier ones. Pixels no sample reached take the value of the
/// nearest reached pixel, ties going to the first in row-major order.
pub fn rasterize_circular(block_side: usize, params: &MarkovParams, seed: u64) -> Result<NoiseBlock> {
    check_side(block_side)?;
    if block_side % 2 != 0 {
        return Err(invalid_arg(format!("block side {block_side} must be even")));
    }
    let mut chain = MarkovChain::new(*params, seed)?;
    let side = block_side;
    let center = (side as f64 - 1.0) / 2.0;
    let mut values = vec![0.0f32; side * side];
    let mut assigned = vec![false; side * side];

    for circle in circle_layout(side)? {
        let step = 2.0 * PI / circle.samples as f64;
        for i in 0..circle.samples {
            let value = chain.step().1;
            let theta = step * i as f64;
            let x = (center + circle.radius * theta.cos()).round();
            let y = (center - circle.radius * theta.sin()).round();
            if x < 0.0 || y < 0.0 || x >= side as f64 || y >= side as f64 {
                continue;
            }
            let idx = y as usize * side + x as usize;
            values[idx] = value as f32;
            assigned[idx] = true;
        }
    }

    fill_holes(side, &mut values, &assigned);
    Ok(NoiseBlock::new(side, values, BlockKind::Circular, params.p, seed))
}

/// Nearest-assigned fill by expanding square rings. A ring at Chebyshev
/// distance `d` cannot hold anything closer than `d`, so the search stops
/// once `d^2` exceeds the best squared distance found.
fn fill_holes(side: usize, values: &mut [f32], assigned: &[bool]) {
    let holes: Vec<usize> = (0..side * side).filter(|&i| !assigned[i]).collect();
    if holes.is_empty() || holes.len() == side * side {
        return;
    }
    let source = values.to_vec();
    let s = side as isize;
    for idx in holes {
        let (hx, hy) = ((idx % side) as isize, (idx / side) as isize);
        let mut best: Option<(isize, usize)> = None;
        let mut d = 1isize;
        loop {
            if let Some((bd, _)) = best {
                if d * d > bd {
                    break;
                }
            }
            if d > s {
                break;
            }
            for dy in -d..=d {
                let y = hy + dy;
                if y < 0 || y >= s {
                    continue;
                }
                let on_edge_row = dy.abs() == d;
                let xs: Box<dyn Iterator<Item = isize>> = if on_edge_row {
                    Box::new(-d..=d)
                } else {
                    Box::new([-d, d].into_iter())
                };
                for dx in xs {
                    let x = hx + dx;
                    if x < 0 || x >= s {
                        continue;
                    }
                    let j = (y * s + x) as usize;
                    if !assigned[j] {
                        continue;
                    }
                    let dist = dx * dx + dy * dy;
                    let better = match best {
                        None => true,
                        Some((bd, bj)) => dist < bd || (dist == bd && j < bj),
                    };
                    if better {
                        best = Some((dist, j));
                    }
                }
            }
            d += 1;
        }
        if let Some((_, j)) = best {
            values[idx] = source[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn direct_sum(block_side: usize, terms: usize) -> f64 {
        let mut acc = 0.0;
        for v in 0..terms {
            acc += block_side as f64 / SQRT_2 - v as f64;
        }
        2.0 * PI * acc
    }

    #[test]
    fn required_length_examples() {
        assert_eq!(radius_count(200), 142);
        assert_relative_eq!(required_length(200).unwrap(), direct_sum(200, 142), max_relative = 1e-14);
        assert_eq!(radius_count(2), 2);
        assert_relative_eq!(required_length(2).unwrap(), direct_sum(2, 2), max_relative = 1e-15);
        assert_relative_eq!(required_length(2).unwrap(), 2.0 * PI * (2.0 * SQRT_2 - 1.0), max_relative = 1e-15);
        assert!(required_length(1).is_err());
        let mut prev = 0.0;
        for side in 2..400 {
            let l = required_length(side).unwrap();
            assert!(l > prev, "side {side}");
            prev = l;
        }
    }

    #[test]
    fn layout_covers_required_length() {
        let layout = circle_layout(200).unwrap();
        assert_eq!(layout.len(), 142);
        assert_relative_eq!(layout[0].radius, 200.0 / SQRT_2);
        let total: usize = layout.iter().map(|c| c.samples).sum();
        let l = required_length(200).unwrap();
        assert!((total as f64 - l).abs() < layout.len() as f64);
    }

    #[test]
    fn fills_every_pixel_and_is_deterministic() {
        let params = MarkovParams::default();
        let a = rasterize_circular(200, &params, 5).unwrap();
        assert!(a.values().iter().all(|v| v.is_finite()));
        let b = rasterize_circular(200, &params, 5).unwrap();
        assert!(a.bit_eq(&b));
        assert_eq!(a.kind(), BlockKind::Circular);
        assert!(rasterize_circular(201, &params, 5).is_err());
    }

    #[test]
    fn hole_fill_prefers_nearest_then_scan_order() {
        // 4x4 with two sources equidistant from (1,1): (0,1) and (1,0).
        let side = 4;
        let mut values = vec![0.0f32; 16];
        let mut assigned = vec![false; 16];
        values[1] = 7.0; // (1,0)
        assigned[1] = true;
        values[4] = 9.0; // (0,1)
        assigned[4] = true;
        fill_holes(side, &mut values, &assigned);
        assert_eq!(values[5], 7.0); // tie -> lower scan index (1)
        assert_eq!(values[15], 7.0); // (3,3): d2 to (1,0) = 4+9 = 13, to (0,1) = 9+4 = 13 -> tie
        assert_eq!(values[12], 9.0); // (0,3): (0,1) is 4 away vs 10
    }

    #[test]
    fn hole_fill_matches_brute_force() {
        use crate::rng::Rng;
        let side = 24;
        let mut rng = Rng::new(77);
        let assigned: Vec<bool> = (0..side * side).map(|_| rng.below(5) == 0).collect();
        let values: Vec<f32> = (0..side * side).map(|i| i as f32).collect();
        let mut filled = values.clone();
        fill_holes(side, &mut filled, &assigned);
        for i in 0..side * side {
            if assigned[i] {
                continue;
            }
            let (x, y) = ((i % side) as i64, (i / side) as i64);
            let best = (0..side * side)
                .filter(|&j| assigned[j])
                .min_by_key(|&j| {
                    let (jx, jy) = ((j % side) as i64, (j / side) as i64);
                    ((jx - x).pow(2) + (jy - y).pow(2), j)
                })
                .unwrap();
            assert_eq!(filled[i], values[best], "pixel {i}");
        }
    }
}
