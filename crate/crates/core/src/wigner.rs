//! Wigner quasi-probability W(x, p) = (1/π)∫ ψ*(x+y) ψ(x−y) e^{2ipy} dy.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::WaveFunction;
use crate::C64;

/// W on a rectangular (x, p) lattice; `values[i * ps.len() + j]` is W(xs[i], ps[j]).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerMap {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    pub values: Vec<f64>,
}

impl WignerMap {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ps.len() + j]
    }

    fn dx(&self) -> f64 {
        spacing(&self.xs)
    }

    fn dp(&self) -> f64 {
        spacing(&self.ps)
    }

    /// ∫ W(x_i, p) dp by the trapezoid rule.
    pub fn position_marginal(&self, i: usize) -> f64 {
        let row = &self.values[i * self.ps.len()..(i + 1) * self.ps.len()];
        trapezoid(row) * self.dp()
    }

    /// ∬ W dx dp.
    pub fn integral(&self) -> f64 {
        (0..self.xs.len()).map(|i| self.position_marginal(i)).sum::<f64>() * self.dx()
    }

    /// ∬ W² dx dp; 1/(2π) for a pure state.
    pub fn purity(&self) -> f64 {
        let np = self.ps.len();
        (0..self.xs.len())
            .map(|i| trapezoid(&self.values[i * np..(i + 1) * np].iter().map(|w| w * w).collect::<Vec<_>>()))
            .sum::<f64>()
            * self.dx()
            * self.dp()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, w| m.max(w.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn spacing(v: &[f64]) -> f64 {
    if v.len() < 2 {
        1.0
    } else {
        v[1] - v[0]
    }
}

fn trapezoid(row: &[f64]) -> f64 {
    match row.len() {
        0 => 0.0,
        1 => row[0],
        n => row.iter().sum::<f64>() - 0.5 * (row[0] + row[n - 1]),
    }
}

/// W on every grid point in x and `p_points` values in [−p_extent, p_extent].
pub fn wigner(psi: &WaveFunction, p_extent: f64, p_points: usize) -> Result<WignerMap> {
    wigner_strided(psi, p_extent, p_points, 1)
}

/// As [`wigner`], keeping every `x_stride`-th grid point in x.
///
/// y runs over grid offsets so x ± y stay on the grid; e^{2ipy} sampled at
/// spacing dx needs |p| < π/(2dx).
pub fn wigner_strided(psi: &WaveFunction, p_extent: f64, p_points: usize, x_stride: usize) -> Result<WignerMap> {
    let grid = *psi.grid();
    let dx = grid.spacing();
    let limit = PI / (2.0 * dx);
    if !(p_extent > 0.0) || p_extent >= limit {
        return Err(Error::Aliasing(format!("p_extent {p_extent} must lie in (0, {limit:.4})")));
    }
    if p_points < 2 || x_stride == 0 {
        return Err(Error::param("need at least 2 momentum points and a positive x stride"));
    }
    let psi = psi.normalized()?;
    let a = psi.amplitudes();
    let n = a.len();
    let rows: Vec<usize> = (0..n).step_by(x_stride).collect();
    let xs: Vec<f64> = rows.iter().map(|&i| grid.point(i)).collect();
    let ps: Vec<f64> = (0..p_points)
        .map(|j| -p_extent + 2.0 * p_extent * j as f64 / (p_points - 1) as f64)
        .collect();
    let values: Vec<f64> = rows
        .par_iter()
        .flat_map_iter(|&i| {
            let reach = i.min(n - 1 - i);
            // c_j = ψ*(x+y_j) ψ(x−y_j); W = (1/π) dx [c_0 + 2 Re Σ_{j>0} c_j e^{2ipy_j}]
            let c: Vec<C64> = (0..=reach).map(|j| a[i + j].conj() * a[i - j]).collect();
            let ps = &ps;
            ps.iter().map(move |&p| {
                let step = C64::from_polar(1.0, 2.0 * p * dx);
                let mut phase = step;
                let mut acc = 0.0;
                for cj in &c[1..] {
                    acc += (cj * phase).re;
                    phase *= step;
                }
                (c[0].re + 2.0 * acc) * dx / PI
            })
        })
        .collect();
    Ok(WignerMap { xs, ps, values })
}
