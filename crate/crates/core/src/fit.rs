//! Fidelity-maximizing fits: squeezed cats, four-component cats, displacement
//! corrections, and extrema of |ψ|.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{displace, fidelity, inner_product, WaveFunction};
use crate::states::{cat_unchecked, four_cat_unchecked, Parity};

/// Spread of F across the simplex below which the refinement stops.
pub const STALL_TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 2000;
/// Simplex extent, relative to the initial step, below which the refinement may stop.
const SIMPLEX_SIZE_TOLERANCE: f64 = 1e-6;
/// Minimum |⟨ψ|Π|ψ⟩| for a state to count as having definite parity.
pub const PARITY_THRESHOLD: f64 = 0.99;
/// Smallest odd-cat amplitude the refinement may reach.
pub const MIN_ODD_ALPHA: f64 = 1e-6;

const XI_RANGE: (f64, f64) = (-1.5, 1.5);
const ALPHA_MAX: f64 = 4.0;
const CAT_STEP: f64 = 0.05;
const SHIFT_RANGE: f64 = 2.0;
const SHIFT_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FitParams {
    SqueezedCat { xi: f64, alpha: f64, parity: Parity },
    FourCat { beta: f64, m: u8 },
    Displacement { dx: f64, dp: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: FitParams,
    pub fidelity: f64,
    /// The simplex stalled within [`STALL_TOLERANCE`].
    pub converged: bool,
    /// Best fidelity on the coarse scan.
    pub scan_fidelity: f64,
}

/// Outcome of a bounded Nelder–Mead maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

/// Maximizes `f` from `start` with initial steps `step`, clamping to `bounds`.
///
/// The start point is a vertex and vertices only get replaced by better ones,
/// so the result is never worse than `f(start)`.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    step: &[f64],
    bounds: &[(f64, f64)],
    tolerance: f64,
) -> SimplexResult {
    let n = start.len();
    let clamp = |p: &mut Vec<f64>| {
        for (v, &(lo, hi)) in p.iter_mut().zip(bounds) {
            *v = v.clamp(lo, hi);
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step[i];
        if p[i] > bounds[i].1 {
            p[i] = start[i] - step[i];
        }
        clamp(&mut p);
        let v = f(&p);
        simplex.push((p, v));
    }
    let scale = step.iter().fold(0.0, |m: f64, s| m.max(s.abs()));
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        // best first; stable sort keeps earlier vertices ahead on ties
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let size = simplex[1..]
            .iter()
            .map(|v| v.0.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        // equal values alone can mean two vertices straddling the peak
        if simplex[0].1 - simplex[n].1 < tolerance && size < SIMPLEX_SIZE_TOLERANCE * scale {
            converged = true;
            break;
        }
        let centroid: Vec<f64> =
            (0..n).map(|d| simplex[..n].iter().map(|v| v.0[d]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        let along = |t: f64| {
            let mut p: Vec<f64> = (0..n).map(|d| centroid[d] + t * (centroid[d] - worst.0[d])).collect();
            clamp(&mut p);
            p
        };
        let xr = along(1.0);
        let fr = f(&xr);
        if fr > simplex[0].1 {
            let xe = along(2.0);
            let fe = f(&xe);
            simplex[n] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = along(-0.5);
            let fc = f(&xc);
            if fc > worst.1 {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let p: Vec<f64> = (0..n).map(|d| best[d] + 0.5 * (v.0[d] - best[d])).collect();
                    *v = (p.clone(), f(&p));
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (point, value) = simplex.swap_remove(0);
    SimplexResult { point, value, converged }
}

/// Index of the first maximum; earlier entries win ties.
fn first_argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// F(ψ, t) for a normalized ψ and an unnormalized candidate t; 0 for a vanishing t.
fn overlap_fidelity(psi: &WaveFunction, candidate: &WaveFunction) -> f64 {
    let w = candidate.norm_sq();
    if !(w > 1e-300) {
        return 0.0;
    }
    inner_product(candidate, psi).map(|c| c.norm_sqr() / w).unwrap_or(0.0)
}

/// ⟨ψ|Π|ψ⟩ for the reflection x → −x; ±1 for definite parity.
pub fn parity_expectation(psi: &WaveFunction) -> Result<f64> {
    let psi = psi.normalized()?;
    Ok(inner_product(&psi, &psi.reflected()?)?.re)
}

fn definite_parity(psi: &WaveFunction) -> Result<Option<Parity>> {
    let p = parity_expectation(psi)?;
    Ok(if p >= PARITY_THRESHOLD {
        Some(Parity::Plus)
    } else if p <= -PARITY_THRESHOLD {
        Some(Parity::Minus)
    } else {
        None
    })
}

fn lattice(lo: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + i as f64 * step).collect()
}

/// Best Ŝ(ξ)|CAT, α, ±⟩, the sign fixed by the parity of ψ.
pub fn fit_squeezed_cat(psi: &WaveFunction) -> Result<FitResult> {
    let psi = psi.normalized()?;
    let parity = definite_parity(&psi)?
        .ok_or_else(|| Error::Unsupported("cat fit needs a state of definite parity".into()))?;
    let grid = *psi.grid();
    let steps_xi = ((XI_RANGE.1 - XI_RANGE.0) / CAT_STEP).round() as usize;
    let steps_alpha = (ALPHA_MAX / CAT_STEP).round() as usize;
    // integer offsets keep ξ = 0 exactly on the lattice
    let xis: Vec<f64> = (0..=steps_xi).map(|i| (i as f64 - steps_xi as f64 / 2.0) * CAT_STEP).collect();
    let alpha_min = if parity == Parity::Minus { MIN_ODD_ALPHA } else { 0.0 };
    let alphas: Vec<f64> = (0..=steps_alpha).map(|i| (i as f64 * CAT_STEP).max(alpha_min)).collect();
    let eval = |xi: f64, alpha: f64| overlap_fidelity(&psi, &cat_unchecked(alpha, parity, xi, grid));
    let scan: Vec<f64> = xis
        .par_iter()
        .flat_map_iter(|&xi| alphas.iter().map(move |&a| (xi, a)).collect::<Vec<_>>())
        .map(|(xi, a)| eval(xi, a))
        .collect();
    let best = first_argmax(&scan);
    let start = [xis[best / alphas.len()], alphas[best % alphas.len()]];
    let refined = nelder_mead(
        |p| eval(p[0], p[1]),
        &start,
        &[CAT_STEP, CAT_STEP],
        &[XI_RANGE, (alpha_min, ALPHA_MAX)],
        STALL_TOLERANCE,
    );
    Ok(FitResult {
        params: FitParams::SqueezedCat { xi: refined.point[0], alpha: refined.point[1], parity },
        fidelity: refined.value.min(1.0),
        converged: refined.converged,
        scan_fidelity: scan[best].min(1.0),
    })
}

/// Best four-component cat over |β| and the type m; a state of definite parity
/// is matched only against types of the same parity, (−1)^m.
pub fn fit_four_cat(psi: &WaveFunction) -> Result<FitResult> {
    let psi = psi.normalized()?;
    let grid = *psi.grid();
    let types: Vec<u8> = match definite_parity(&psi)? {
        Some(Parity::Plus) => vec![0, 2],
        Some(Parity::Minus) => vec![1, 3],
        None => vec![0, 1, 2, 3],
    };
    let steps = (ALPHA_MAX / CAT_STEP).round() as usize;
    let betas = lattice(0.0, CAT_STEP, steps + 1);
    let eval = |beta: f64, m: u8| overlap_fidelity(&psi, &four_cat_unchecked(beta, m, grid));
    let pairs: Vec<(u8, f64)> = types.iter().flat_map(|&m| betas.iter().map(move |&b| (m, b))).collect();
    let scan: Vec<f64> = pairs.par_iter().map(|&(m, b)| eval(b, m)).collect();
    let best = first_argmax(&scan);
    let (m, start) = pairs[best];
    let refined = nelder_mead(|p| eval(p[0], m), &[start], &[CAT_STEP], &[(0.0, ALPHA_MAX)], STALL_TOLERANCE);
    Ok(FitResult {
        params: FitParams::FourCat { beta: refined.point[0], m },
        fidelity: refined.value.min(1.0),
        converged: refined.converged,
        scan_fidelity: scan[best].min(1.0),
    })
}

/// Best (dx, dp) maximizing F(D(dx, dp)ψ, target).
pub fn fit_displacement(psi: &WaveFunction, target: &WaveFunction) -> Result<FitResult> {
    let psi = psi.normalized()?;
    let target = target.normalized()?;
    psi.check_grid(&target)?;
    let half = (SHIFT_RANGE / SHIFT_STEP).round() as i64;
    let offsets: Vec<f64> = (-half..=half).map(|i| i as f64 * SHIFT_STEP).collect();
    let eval = |dx: f64, dp: f64| fidelity(&displace(&psi, dx, dp), &target).unwrap_or(0.0);
    let pairs: Vec<(f64, f64)> = offsets.iter().flat_map(|&dx| offsets.iter().map(move |&dp| (dx, dp))).collect();
    let scan: Vec<f64> = pairs.par_iter().map(|&(dx, dp)| eval(dx, dp)).collect();
    let best = first_argmax(&scan);
    let bound = (-2.0 * SHIFT_RANGE, 2.0 * SHIFT_RANGE);
    let refined = nelder_mead(
        |p| eval(p[0], p[1]),
        &[pairs[best].0, pairs[best].1],
        &[SHIFT_STEP / 2.0, SHIFT_STEP / 2.0],
        &[bound, bound],
        STALL_TOLERANCE,
    );
    Ok(FitResult {
        params: FitParams::Displacement { dx: refined.point[0], dp: refined.point[1] },
        fidelity: refined.value.min(1.0),
        converged: refined.converged,
        scan_fidelity: scan[best].min(1.0),
    })
}

/// A local maximum of |ψ|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub x: f64,
    pub magnitude: f64,
}

/// Maxima of |ψ| below this fraction of the global maximum are dropped as noise.
pub const EXTREMUM_FLOOR: f64 = 1e-3;

/// Local maxima of |ψ|, refined by a parabola through each peak and its neighbors.
pub fn extrema_report(psi: &WaveFunction) -> Result<Vec<Extremum>> {
    let psi = psi.normalized()?;
    let grid = *psi.grid();
    let mag: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm()).collect();
    let peak = mag.iter().copied().fold(0.0, f64::max);
    let dx = grid.spacing();
    let mut out = Vec::new();
    for i in 1..mag.len() - 1 {
        let (l, c, r) = (mag[i - 1], mag[i], mag[i + 1]);
        if c > l && c >= r && c >= EXTREMUM_FLOOR * peak {
            let curv = l - 2.0 * c + r;
            let (shift, value) = if curv < 0.0 {
                let s = 0.5 * (l - r) / curv;
                (s, c - 0.25 * (l - r) * s)
            } else {
                (0.0, c)
            };
            out.push(Extremum { x: grid.point(i) + shift * dx, magnitude: value });
        }
    }
    Ok(out)
}
