//! Brute-force reference path: the resource state built explicitly on a
//! two-dimensional grid, teleportation by direct projection, and a truncated
//! Fock-space check of the subtraction identity.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{apply_annihilation, displace, interpolate, QuadratureGrid, WaveFunction, NULL_WEIGHT};
use crate::nges::SubtractionSpec;
use crate::states::{squeezed_vacuum, SqueezeParam};
use crate::teleport::BellOutcome;
use crate::C64;

/// Default oracle grid size.
pub const ORACLE_POINTS: usize = 256;
/// Default oracle grid half-width.
pub const ORACLE_EXTENT: f64 = 10.0;

/// A two-mode wave function Ψ(x₁, x₂) on a square grid, row index x₁.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeWave {
    grid: QuadratureGrid,
    amplitudes: Vec<C64>,
}

impl TwoModeWave {
    pub fn from_fn(grid: QuadratureGrid, f: impl Fn(f64, f64) -> C64 + Sync) -> Self {
        let xs = grid.to_vec();
        let amplitudes = (0..xs.len() * xs.len())
            .into_par_iter()
            .map(|idx| f(xs[idx / xs.len()], xs[idx % xs.len()]))
            .collect();
        Self { grid, amplitudes }
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn at(&self, i1: usize, i2: usize) -> C64 {
        self.amplitudes[i1 * self.grid.len() + i2]
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        let dx = self.grid.spacing();
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx * dx
    }

    pub fn normalized(&self) -> Result<Self> {
        let w = self.norm_sq();
        if w < NULL_WEIGHT {
            return Err(Error::NullState { weight: w });
        }
        let s = 1.0 / w.sqrt();
        Ok(Self { grid: self.grid, amplitudes: self.amplitudes.iter().map(|a| a * s).collect() })
    }

    /// ⟨self|other⟩ by the rectangle rule.
    pub fn inner_product(&self, other: &TwoModeWave) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let dx = self.grid.spacing();
        let s: C64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum();
        Ok(s * dx * dx)
    }

    pub fn fidelity(&self, other: &TwoModeWave) -> Result<f64> {
        let ov = self.inner_product(other)?;
        Ok(ov.norm_sqr() / (self.norm_sq() * other.norm_sq()))
    }

    /// Applies a one-mode operator to every slice along `axis` (0 acts on x₁, 1 on x₂).
    pub fn map_axis(&self, axis: usize, op: impl Fn(&WaveFunction) -> Result<WaveFunction> + Sync) -> Result<Self> {
        let n = self.grid.len();
        let slices: Vec<Vec<C64>> = (0..n)
            .into_par_iter()
            .map(|s| {
                let line: Vec<C64> = (0..n)
                    .map(|t| if axis == 0 { self.at(t, s) } else { self.at(s, t) })
                    .collect();
                Ok(op(&WaveFunction::raw(self.grid, line))?.into_amplitudes())
            })
            .collect::<Result<_>>()?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); n * n];
        for (s, line) in slices.iter().enumerate() {
            for (t, v) in line.iter().enumerate() {
                let idx = if axis == 0 { t * n + s } else { s * n + t };
                amplitudes[idx] = *v;
            }
        }
        Ok(Self { grid: self.grid, amplitudes })
    }

    /// Ψ(x₁ − d, x₂ − d), by band-limited shifts along both axes.
    pub fn shifted(&self, d: f64) -> Result<Self> {
        self.map_axis(0, |w| Ok(displace(w, d, 0.0)))?.map_axis(1, |w| Ok(displace(w, d, 0.0)))
    }
}

/// Grid of half-width √2·extent, no coarser than `grid`, holding every (x₁ ± x₂)/√2.
fn rotation_grid(grid: QuadratureGrid) -> Result<QuadratureGrid> {
    let ext = grid.extent() * 2f64.sqrt();
    let n = (2.0 * ext / grid.spacing()).ceil() as usize + 1;
    QuadratureGrid::new(n + n % 2, ext)
}

/// ψ sampled at (x₁ + x₂)/√2 (`sum`) or (x₂ − x₁)/√2 for every pair of `grid` points.
///
/// On a uniform grid x₁ + x₂ and x₂ − x₁ take only 2N − 1 values each, so the
/// interpolation is done once per distinct value; entry s is the pair with
/// i + j = s (sum) or j − i = s − (N − 1).
fn rotated_samples(psi: &WaveFunction, grid: QuadratureGrid, sum: bool) -> Vec<C64> {
    let n = grid.len();
    let dx = grid.spacing();
    let pts: Vec<f64> = (0..2 * n - 1)
        .map(|s| {
            if sum {
                (2.0 * grid.x_min() + s as f64 * dx) / 2f64.sqrt()
            } else {
                (s as f64 - (n - 1) as f64) * dx / 2f64.sqrt()
            }
        })
        .collect();
    interpolate(psi, &pts)
}

/// Mode factors â₁ᵏŜ(−r)|0⟩ and â₂ˡŜ(r)|0⟩ on the rotation grid.
fn mode_factors(spec: SubtractionSpec, r_tele: f64, grid: QuadratureGrid) -> Result<(WaveFunction, WaveFunction)> {
    let aux = rotation_grid(grid)?;
    let r = SqueezeParam::new(r_tele)?;
    let mut m1 = squeezed_vacuum(SqueezeParam::new(-r.r())?, aux)?;
    let mut m2 = squeezed_vacuum(r, aux)?;
    for _ in 0..spec.k {
        m1 = apply_annihilation(&m1);
    }
    for _ in 0..spec.l {
        m2 = apply_annihilation(&m2);
    }
    Ok((m1, m2))
}

/// B̂ â₁ᵏ â₂ˡ Ŝ₁(−r) Ŝ₂(r) |0⟩|0⟩ on a two-mode grid, normalized.
///
/// The beamsplitter maps Ψ(x₁, x₂) to Ψ((x₁+x₂)/√2, (x₂−x₁)/√2); with this
/// labeling the k = l = 0 state is exp(−a(x₁−x₂)² − b(x₁+x₂)²).
pub fn build_nges_2d(spec: SubtractionSpec, r_tele: f64, grid: QuadratureGrid) -> Result<TwoModeWave> {
    if !grid.is_symmetric() {
        return Err(Error::InvalidGrid("the oracle needs a grid symmetric about 0".into()));
    }
    let (m1, m2) = mode_factors(spec, r_tele, grid)?;
    let n = grid.len();
    let u = rotated_samples(&m1, grid, true);
    let v = rotated_samples(&m2, grid, false);
    let amplitudes = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            u[i + j] * v[j + n - 1 - i]
        })
        .collect();
    TwoModeWave { grid, amplitudes }.normalized()
}

/// Teleports ψ_in by projecting (in, 1) onto D̂_x(m_x)D̂_p(m_p)|EPR⟩ and
/// applying the output displacements D̂_p(m_p)D̂_x(m_x).
///
/// The EPR bra sets x_in = x₁ + m_x, which leaves the single sum
/// ψ_out(x′) = e^{i m_p x′} Σ_u w_u e^{−i m_p (u − m_x)} ψ_in(u) Ψ(u − m_x, x′ − m_x).
pub fn teleport_brute(psi: &WaveFunction, nges: &TwoModeWave, outcome: BellOutcome) -> Result<WaveFunction> {
    if *psi.grid() != nges.grid {
        return Err(Error::GridMismatch);
    }
    let BellOutcome { m_x, m_p } = outcome;
    let shifted = nges.shifted(m_x)?;
    let grid = nges.grid;
    let n = grid.len();
    let dx = grid.spacing();
    let xs = grid.to_vec();
    let src: Vec<C64> = psi
        .amplitudes()
        .iter()
        .zip(&xs)
        .map(|(a, &u)| a * C64::from_polar(dx, -m_p * (u - m_x)))
        .collect();
    let out: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let acc: C64 = (0..n).map(|i| src[i] * shifted.at(i, j)).sum();
            acc * C64::from_polar(1.0, m_p * xs[j])
        })
        .collect();
    WaveFunction::from_amplitudes(grid, out)
}

/// A two-mode state truncated to n, n′ ≤ n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector2 {
    n_max: usize,
    coeffs: Vec<C64>,
}

impl FockVector2 {
    pub fn zeros(n_max: usize) -> Self {
        Self { n_max, coeffs: vec![C64::new(0.0, 0.0); (n_max + 1) * (n_max + 1)] }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, n1: usize, n2: usize) -> C64 {
        self.coeffs[n1 * (self.n_max + 1) + n2]
    }

    fn set(&mut self, n1: usize, n2: usize, v: C64) {
        self.coeffs[n1 * (self.n_max + 1) + n2] = v;
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// â on mode 1.
    pub fn annihilate_first(&self) -> Self {
        let mut out = Self::zeros(self.n_max);
        for n1 in 1..=self.n_max {
            for n2 in 0..=self.n_max {
                out.set(n1 - 1, n2, self.get(n1, n2) * (n1 as f64).sqrt());
            }
        }
        out
    }

    /// â† on mode 2; amplitude pushed past n_max is dropped.
    pub fn create_second(&self) -> Self {
        let mut out = Self::zeros(self.n_max);
        for n1 in 0..=self.n_max {
            for n2 in 0..self.n_max {
                out.set(n1, n2 + 1, self.get(n1, n2) * ((n2 + 1) as f64).sqrt());
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { n_max: self.n_max, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Largest tolerated η^{n_max}.
pub const FOCK_TAIL_LIMIT: f64 = 1e-6;

/// √(1−η²) Σ_{n ≤ n_max} ηⁿ |n⟩|n⟩.
pub fn tmss_fock(eta: f64, n_max: usize) -> Result<FockVector2> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::param(format!("eta must lie in [0, 1), got {eta}")));
    }
    let tail = eta.powi(n_max as i32);
    if tail >= FOCK_TAIL_LIMIT {
        return Err(Error::Truncation(format!("eta^n_max = {tail:.3e} at n_max = {n_max}")));
    }
    let mut v = FockVector2::zeros(n_max);
    let norm = (1.0 - eta * eta).sqrt();
    let mut amp = norm;
    for n in 0..=n_max {
        v.set(n, n, C64::new(amp, 0.0));
        amp *= eta;
    }
    Ok(v)
}

/// ‖â₁ᵏ|TMSS⟩ − (ηâ₂†)ᵏ|TMSS⟩‖ / ‖â₁ᵏ|TMSS⟩‖ in the truncated space; 0 when both sides are null.
pub fn subtraction_identity_check(eta: f64, n_max: usize, k: u32) -> Result<f64> {
    let t = tmss_fock(eta, n_max)?;
    let (mut lhs, mut rhs) = (t.clone(), t);
    for _ in 0..k {
        lhs = lhs.annihilate_first();
        rhs = rhs.create_second().scaled(eta);
    }
    let (ln, rn) = (lhs.norm(), rhs.norm());
    if ln * ln < NULL_WEIGHT {
        return Ok(if rn * rn < NULL_WEIGHT { 0.0 } else { f64::INFINITY });
    }
    Ok(lhs.distance(&rhs) / ln)
}
