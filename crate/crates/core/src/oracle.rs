//! Exhaustive computations on a discretized extension.
//!
//! Ground truth for small instances: every axis (one per main player plus
//! one for `f`) is replaced by a uniform grid including both endpoints, all
//! payoffs are tabulated, and max-min / min-max / Nash conditions are
//! evaluated by enumeration. Ties go to the smallest index.

use crate::embedding::ZeroSumExtension;
use crate::error::{Error, Result};

/// Largest product grid accepted by [`discretize`].
pub const GRID_LIMIT: u64 = 10_000_000;

/// Payoff tables of an extension on a product grid.
///
/// Tables are flattened row-major over `(x_1, ..., x_n, f)`, `f` fastest.
#[derive(Debug, Clone)]
pub struct GridGame {
    axes: Vec<Vec<f64>>,
    pi_tables: Vec<Vec<f64>>,
    phi_tables: Vec<Vec<f64>>,
}

fn checked_size(resolution: usize, axes: usize) -> Result<usize> {
    let points = (resolution as u128).checked_pow(axes as u32).unwrap_or(u128::MAX);
    if points > GRID_LIMIT as u128 {
        return Err(Error::GridTooLarge {
            points,
            limit: GRID_LIMIT,
        });
    }
    Ok(points as usize)
}

pub fn discretize(ext: &ZeroSumExtension, resolution: usize) -> Result<GridGame> {
    if resolution < 2 {
        return Err(Error::BadResolution(resolution));
    }
    let n = ext.n_players();
    let size = checked_size(resolution, n + 1)?;
    let mut axes: Vec<Vec<f64>> = ext.game().spaces().iter().map(|s| s.grid(resolution)).collect();
    axes.push(ext.subsidy().domain().grid(resolution));

    let x_size = size / resolution;
    let mut phi_tables = vec![Vec::with_capacity(x_size); n];
    let mut pi_tables = vec![Vec::with_capacity(size); n + 1];
    let psi: Vec<f64> = axes[n].iter().map(|&f| ext.subsidy().eval(f)).collect();

    let mut idx = vec![0usize; n];
    let mut x: Vec<f64> = axes[..n].iter().map(|g| g[0]).collect();
    for _ in 0..x_size {
        let phi: Vec<f64> = (0..n).map(|i| ext.game().payoff(i, &x)).collect();
        let phi_sum: f64 = phi.iter().sum();
        for (table, &p) in phi_tables.iter_mut().zip(&phi) {
            table.push(p);
        }
        for &s in &psi {
            for (i, &p) in phi.iter().enumerate() {
                pi_tables[i].push(p + s);
            }
            pi_tables[n].push(-phi_sum - n as f64 * s);
        }
        for axis in (0..n).rev() {
            idx[axis] += 1;
            if idx[axis] < resolution {
                x[axis] = axes[axis][idx[axis]];
                break;
            }
            idx[axis] = 0;
            x[axis] = axes[axis][0];
        }
    }
    for (i, table) in pi_tables.iter().enumerate() {
        if let Some(pos) = table.iter().position(|v| !v.is_finite()) {
            let profile = unflatten(pos / resolution, n, resolution)
                .iter()
                .enumerate()
                .map(|(axis, &k)| axes[axis][k])
                .collect();
            return Err(Error::NonFinitePayoff { player: i, profile });
        }
    }
    Ok(GridGame {
        axes,
        pi_tables,
        phi_tables,
    })
}

fn unflatten(mut flat: usize, n: usize, resolution: usize) -> Vec<usize> {
    let mut idx = vec![0; n];
    for axis in (0..n).rev() {
        idx[axis] = flat % resolution;
        flat /= resolution;
    }
    idx
}

impl GridGame {
    pub fn n_players(&self) -> usize {
        self.axes.len() - 1
    }

    pub fn resolution(&self) -> usize {
        self.axes[0].len()
    }

    /// Grid of main player `i`, or of `f` for `i = n`.
    pub fn axis(&self, i: usize) -> &[f64] {
        &self.axes[i]
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    /// Table of `pi_i`, `i = 0..=n` (the last belongs to the subsidy player).
    pub fn pi_table(&self, i: usize) -> &[f64] {
        &self.pi_tables[i]
    }

    pub fn phi_table(&self, i: usize) -> &[f64] {
        &self.phi_tables[i]
    }

    pub fn table_len(&self) -> usize {
        self.pi_tables[0].len()
    }

    /// Flat index of the main-player profile `x_idx`.
    pub fn x_offset(&self, x_idx: &[usize]) -> usize {
        x_idx.iter().fold(0, |acc, &k| acc * self.resolution() + k)
    }

    pub fn pi_at(&self, i: usize, x_idx: &[usize], f_idx: usize) -> f64 {
        self.pi_tables[i][self.x_offset(x_idx) * self.resolution() + f_idx]
    }

    fn profile(&self, player: usize, others_idx: &[usize]) -> Result<Vec<usize>> {
        let n = self.n_players();
        if player >= n {
            return Err(Error::BadPlayer { player, n });
        }
        if others_idx.len() + 1 != n {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                got: others_idx.len(),
            });
        }
        if let Some(&bad) = others_idx.iter().find(|&&k| k >= self.resolution()) {
            return Err(Error::InvalidArgument(format!(
                "grid index {bad} out of range for resolution {}",
                self.resolution()
            )));
        }
        let mut idx = Vec::with_capacity(n);
        idx.extend_from_slice(&others_idx[..player]);
        idx.push(0);
        idx.extend_from_slice(&others_idx[player..]);
        Ok(idx)
    }
}

/// Exact `max_{x_i} min_f pi_i` on the grid, others at `others_idx`.
/// Returns the `x_i` grid index and the value.
pub fn brute_maximin(gg: &GridGame, player: usize, others_idx: &[usize]) -> Result<(usize, f64)> {
    let mut idx = gg.profile(player, others_idx)?;
    let r = gg.resolution();
    let mut best = (0, f64::NEG_INFINITY);
    for k in 0..r {
        idx[player] = k;
        let base = gg.x_offset(&idx) * r;
        let inner = gg.pi_tables[player][base..base + r]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if inner > best.1 {
            best = (k, inner);
        }
    }
    Ok(best)
}

/// Exact `min_f max_{x_i} pi_i` on the grid. Returns the `f` grid index and the value.
pub fn brute_minimax(gg: &GridGame, player: usize, others_idx: &[usize]) -> Result<(usize, f64)> {
    let mut idx = gg.profile(player, others_idx)?;
    let r = gg.resolution();
    let mut upper = vec![f64::NEG_INFINITY; r];
    for k in 0..r {
        idx[player] = k;
        let base = gg.x_offset(&idx) * r;
        for (u, &v) in upper.iter_mut().zip(&gg.pi_tables[player][base..base + r]) {
            *u = u.max(v);
        }
    }
    let mut best = (0, f64::INFINITY);
    for (j, &u) in upper.iter().enumerate() {
        if u < best.1 {
            best = (j, u);
        }
    }
    Ok(best)
}

/// All pure grid profiles where no main player has a strictly better grid
/// deviation in `phi_i`.
pub fn brute_nash(gg: &GridGame) -> Result<Vec<Vec<usize>>> {
    let n = gg.n_players();
    let r = gg.resolution();
    checked_size(r, n)?;
    let total = gg.phi_tables[0].len();
    let mut equilibria = Vec::new();
    'profiles: for flat in 0..total {
        let idx = unflatten(flat, n, r);
        for (player, &own) in idx.iter().enumerate() {
            let table = &gg.phi_tables[player];
            let stride = r.pow((n - 1 - player) as u32);
            let base = flat - own * stride;
            let current = table[flat];
            if (0..r).any(|k| table[base + k * stride] > current) {
                continue 'profiles;
            }
        }
        equilibria.push(idx);
    }
    Ok(equilibria)
}
