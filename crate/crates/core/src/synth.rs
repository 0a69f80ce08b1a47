//! Deterministic synthetic operands: uniform-random sparsity at an exact
//! nonzero count, seeded so identical inputs reproduce identical instances
//! byte for byte.
//!
//! The nonzero count is `round(density * cells)` distinct cells drawn
//! without replacement; values are uniform in [0.5, 1.5) so they are never
//! zero and products never cancel.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::formats::{CooMatrix, CooTensor3};

fn target_nnz(cells: u64, density: f64) -> Result<u64> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Generator(format!(
            "density must lie in [0, 1], got {density}"
        )));
    }
    Ok(((density * cells as f64).round() as u64).min(cells))
}

/// Draw `count` distinct cell positions from `0..cells`, ascending. When
/// more than half the cells are occupied, the holes are drawn instead so
/// the rejection loop never degenerates.
fn sample_positions(rng: &mut ChaCha8Rng, cells: u64, count: u64) -> Vec<u64> {
    let mut positions: Vec<u64>;
    if count.saturating_mul(2) <= cells {
        let mut seen = HashSet::with_capacity(count as usize);
        while seen.len() < count as usize {
            seen.insert(rng.random_range(0..cells));
        }
        positions = seen.into_iter().collect();
    } else {
        let holes = cells - count;
        let mut seen = HashSet::with_capacity(holes as usize);
        while seen.len() < holes as usize {
            seen.insert(rng.random_range(0..cells));
        }
        positions = (0..cells).filter(|p| !seen.contains(p)).collect();
    }
    positions.sort_unstable();
    positions
}

fn draw_value(rng: &mut ChaCha8Rng) -> f64 {
    (0.5 + rng.random::<f32>()) as f64
}

/// Generate a `rows x cols` matrix with `round(density * rows * cols)`
/// uniformly placed nonzeros.
pub fn gen_matrix(rows: usize, cols: usize, density: f64, seed: u64) -> Result<CooMatrix> {
    let cells = (rows as u64)
        .checked_mul(cols as u64)
        .ok_or_else(|| Error::Generator("matrix cell count overflows".into()))?;
    let nnz = target_nnz(cells, density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = sample_positions(&mut rng, cells, nnz);
    let entries = positions
        .into_iter()
        .map(|p| {
            let v = draw_value(&mut rng);
            ((p / cols as u64) as usize, (p % cols as u64) as usize, v)
        })
        .collect();
    Ok(CooMatrix::from_sorted_entries(rows, cols, entries))
}

/// Generate a rank-3 tensor with `round(density * cells)` uniformly placed
/// nonzeros.
pub fn gen_tensor3(dims: [usize; 3], density: f64, seed: u64) -> Result<CooTensor3> {
    let cells = dims
        .iter()
        .try_fold(1u64, |acc, &d| acc.checked_mul(d as u64))
        .ok_or_else(|| Error::Generator("tensor cell count overflows".into()))?;
    let nnz = target_nnz(cells, density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = sample_positions(&mut rng, cells, nnz);
    let (d1, d2) = (dims[1] as u64, dims[2] as u64);
    let entries = positions
        .into_iter()
        .map(|p| {
            let v = draw_value(&mut rng);
            (
                [(p / (d1 * d2)) as usize, ((p / d2) % d1) as usize, (p % d2) as usize],
                v,
            )
        })
        .collect();
    Ok(CooTensor3::from_sorted_entries(dims, entries))
}
