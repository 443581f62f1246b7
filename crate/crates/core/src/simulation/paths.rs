use rayon::prelude::*;

use super::{Kernel, State, TimeGrid};
use crate::distributions::RngStream;
use crate::error::Result;

const BLOCK: usize = 2048;

/// Simulated trajectories, stored column-major by time step so that each
/// date's cross-section is one contiguous slice.
#[derive(Clone, Debug)]
pub struct PathSet {
    grid: TimeGrid,
    n_paths: usize,
    stored: Vec<usize>,
    slot: Vec<Option<usize>>,
    asset: Vec<f64>,
    variance_1: Vec<f64>,
    variance_2: Option<Vec<f64>>,
}

impl PathSet {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn factors(&self) -> usize {
        if self.variance_2.is_some() {
            2
        } else {
            1
        }
    }

    /// Grid indices held in memory, ascending.
    pub fn stored_steps(&self) -> &[usize] {
        &self.stored
    }

    pub fn has_step(&self, step: usize) -> bool {
        self.slot.get(step).is_some_and(|s| s.is_some())
    }

    fn column<'a>(&self, data: &'a [f64], step: usize) -> &'a [f64] {
        let slot = self.slot[step].unwrap_or_else(|| panic!("grid step {step} was not stored"));
        &data[slot * self.n_paths..(slot + 1) * self.n_paths]
    }

    /// Asset prices of every path at grid index `step`.
    pub fn asset(&self, step: usize) -> &[f64] {
        self.column(&self.asset, step)
    }

    pub fn variance_1(&self, step: usize) -> &[f64] {
        self.column(&self.variance_1, step)
    }

    pub fn variance_2(&self, step: usize) -> Option<&[f64]> {
        self.variance_2.as_ref().map(|d| self.column(d, step))
    }

    /// Bytes held by the path matrices: `N * stored_columns * 8` per field.
    pub fn memory_bytes(&self) -> u64 {
        let fields = 1 + self.factors() as u64;
        fields * (self.n_paths * self.stored.len() * std::mem::size_of::<f64>()) as u64
    }

    /// Closed-form allocation model for a fully stored path set.
    pub fn memory_model(n_paths: usize, steps: usize, factors: usize) -> u64 {
        ((1 + factors) * n_paths * (steps + 1) * std::mem::size_of::<f64>()) as u64
    }
}

struct Block {
    asset: Vec<f64>,
    v1: Vec<f64>,
    v2: Vec<f64>,
}

pub(crate) fn drive<K: Kernel>(
    kernel: &K,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
    s0: f64,
    v0: [f64; 2],
    observe: &[usize],
) -> Result<PathSet> {
    let m = grid.steps();
    let mut slot = vec![None; m + 1];
    slot[0] = Some(0);
    slot[m] = Some(0);
    for &k in observe {
        if k <= m {
            slot[k] = Some(0);
        }
    }
    let stored: Vec<usize> = (0..=m).filter(|&k| slot[k].is_some()).collect();
    for (i, &k) in stored.iter().enumerate() {
        slot[k] = Some(i);
    }
    let n_cols = stored.len();
    let two = kernel.factors() == 2;
    let x0 = s0.ln();

    let n_blocks = n_paths.div_ceil(BLOCK);
    let blocks: Vec<Block> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let len = BLOCK.min(n_paths - start);
            let mut blk = Block {
                asset: vec![0.0; len * n_cols],
                v1: vec![0.0; len * n_cols],
                v2: if two { vec![0.0; len * n_cols] } else { Vec::new() },
            };
            for local in 0..len {
                let mut stream = RngStream::new(seed, (start + local) as u64);
                let mut state = State { x: x0, v: v0 };
                blk.asset[local] = s0;
                blk.v1[local] = v0[0];
                if two {
                    blk.v2[local] = v0[1];
                }
                for &column in &slot[1..=m] {
                    kernel.advance(&mut stream, &mut state)?;
                    if let Some(c) = column {
                        let at = c * len + local;
                        blk.asset[at] = state.x.exp();
                        blk.v1[at] = state.v[0];
                        if two {
                            blk.v2[at] = state.v[1];
                        }
                    }
                }
            }
            Ok(blk)
        })
        .collect::<Result<_>>()?;

    let mut asset = vec![0.0; n_paths * n_cols];
    let mut variance_1 = vec![0.0; n_paths * n_cols];
    let mut variance_2 = two.then(|| vec![0.0; n_paths * n_cols]);
    for (b, blk) in blocks.into_iter().enumerate() {
        let start = b * BLOCK;
        let len = blk.asset.len() / n_cols;
        for c in 0..n_cols {
            let dst = c * n_paths + start..c * n_paths + start + len;
            let src = c * len..(c + 1) * len;
            asset[dst.clone()].copy_from_slice(&blk.asset[src.clone()]);
            variance_1[dst.clone()].copy_from_slice(&blk.v1[src.clone()]);
            if let Some(v2) = variance_2.as_mut() {
                v2[dst].copy_from_slice(&blk.v2[src]);
            }
        }
    }

    Ok(PathSet {
        grid: *grid,
        n_paths,
        stored,
        slot,
        asset,
        variance_1,
        variance_2,
    })
}
