//! Discretized single-mode Hilbert space.
//!
//! A [`WaveFunction`] is a set of complex samples of ψ(x) on a uniform
//! [`QuadratureGrid`]. Quadrature and ladder operators act on the samples
//! directly; the momentum operator is applied spectrally.

use std::cell::RefCell;
use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Squared norm below which a state is treated as null.
pub const NULL_WEIGHT: f64 = 1e-12;

/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 1024;
/// Default half-width of the grid in quadrature units.
pub const DEFAULT_EXTENT: f64 = 12.0;

/// Uniform sampling of one quadrature axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    n_points: usize,
    x_min: f64,
    x_max: f64,
}

impl QuadratureGrid {
    /// Symmetric grid on `[-extent, extent]`.
    pub fn new(n_points: usize, extent: f64) -> Result<Self> {
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        Self::with_bounds(n_points, -extent, extent)
    }

    pub fn with_bounds(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n_points}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!("empty interval [{x_min}, {x_max}]")));
        }
        Ok(Self { n_points, x_min, x_max })
    }

    /// Like [`QuadratureGrid::new`], additionally requiring the Nyquist momentum
    /// `π / spacing` to exceed `p_extent`.
    pub fn with_momentum_extent(n_points: usize, extent: f64, p_extent: f64) -> Result<Self> {
        let grid = Self::new(n_points, extent)?;
        grid.check_momentum_extent(p_extent)?;
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Half-width of the sampled interval.
    pub fn extent(&self) -> f64 {
        0.5 * (self.x_max - self.x_min)
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * self.x_max.abs()
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.points().collect()
    }

    /// Largest momentum representable without aliasing.
    pub fn nyquist_momentum(&self) -> f64 {
        PI / self.spacing()
    }

    pub fn check_momentum_extent(&self, p_extent: f64) -> Result<()> {
        if p_extent >= self.nyquist_momentum() {
            return Err(Error::Aliasing(format!(
                "requested momentum extent {p_extent} exceeds Nyquist momentum {:.4}",
                self.nyquist_momentum()
            )));
        }
        Ok(())
    }

    /// Angular wavenumbers in FFT order for a period of `n_points * spacing`.
    pub(crate) fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / (n as f64 * self.spacing());
        (0..n)
            .map(|m| {
                let m = m as isize;
                let signed = if m <= (n as isize - 1) / 2 { m } else { m - n as isize };
                signed as f64 * dk
            })
            .collect()
    }

    /// Wavenumbers for odd-order derivatives: the unpaired Nyquist mode is dropped.
    fn derivative_wavenumbers(&self) -> Vec<f64> {
        let mut k = self.wavenumbers();
        if self.n_points % 2 == 0 {
            k[self.n_points / 2] = 0.0;
        }
        k
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Multiplies the discrete spectrum of `data` by `filter(k)` in place.
pub(crate) fn spectral_filter(data: &mut [C64], k: &[f64], filter: impl Fn(f64) -> C64) {
    let n = data.len();
    fft_plan(n, false).process(data);
    let scale = 1.0 / n as f64;
    for (d, &km) in data.iter_mut().zip(k) {
        *d *= filter(km) * scale;
    }
    fft_plan(n, true).process(data);
}

/// Complex amplitudes ψ(x_i) on a grid, possibly unnormalized.
///
/// `weight` is the squared norm of the raw amplitudes. It equals the current
/// squared norm until [`WaveFunction::normalized`] is called, after which it
/// keeps the pre-normalization value (the heralding weight).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: QuadratureGrid,
    amplitudes: Vec<C64>,
    weight: f64,
}

impl WaveFunction {
    pub fn from_amplitudes(grid: QuadratureGrid, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: amplitudes.len() });
        }
        Ok(Self::raw(grid, amplitudes))
    }

    pub fn from_fn(grid: QuadratureGrid, f: impl Fn(f64) -> C64) -> Self {
        let amplitudes = grid.points().map(f).collect();
        Self::raw(grid, amplitudes)
    }

    pub fn from_real_fn(grid: QuadratureGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub(crate) fn raw(grid: QuadratureGrid, amplitudes: Vec<C64>) -> Self {
        let weight = norm_sq_of(&amplitudes, grid.spacing());
        Self { grid, amplitudes, weight }
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Σ|ψ_i|² · spacing.
    pub fn norm_sq(&self) -> f64 {
        norm_sq_of(&self.amplitudes, self.grid.spacing())
    }

    pub fn is_null(&self) -> bool {
        self.norm_sq() < NULL_WEIGHT
    }

    /// Unit-norm copy; `weight` keeps the squared norm before rescaling.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sq();
        if !(n2 >= NULL_WEIGHT) {
            return Err(Error::NullState { weight: n2 });
        }
        let s = 1.0 / n2.sqrt();
        Ok(Self {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().map(|a| a * s).collect(),
            weight: n2,
        })
    }

    pub fn normalize(self) -> Result<Self> {
        self.normalized()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::raw(self.grid, self.amplitudes.iter().map(|a| a * factor).collect())
    }

    /// Pointwise `self + factor * other`.
    pub fn add_scaled(&self, other: &WaveFunction, factor: C64) -> Result<Self> {
        self.check_grid(other)?;
        let amps = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a + factor * b)
            .collect();
        Ok(Self::raw(self.grid, amps))
    }

    pub fn map_pointwise(&self, f: impl Fn(f64, C64) -> C64) -> Self {
        let amps = self
            .grid
            .points()
            .zip(&self.amplitudes)
            .map(|(x, &a)| f(x, a))
            .collect();
        Self::raw(self.grid, amps)
    }

    /// Mirror image ψ(−x); requires a symmetric grid.
    pub fn reflected(&self) -> Result<Self> {
        if !self.grid.is_symmetric() {
            return Err(Error::InvalidGrid("reflection needs a symmetric grid".into()));
        }
        let mut amps = self.amplitudes.clone();
        amps.reverse();
        Ok(Self::raw(self.grid, amps))
    }

    pub(crate) fn check_grid(&self, other: &WaveFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// ⟨ψ| x̂ⁿ |ψ⟩ / ⟨ψ|ψ⟩.
    pub fn position_moment(&self, power: i32) -> f64 {
        let dx = self.grid.spacing();
        let num: f64 = self
            .grid
            .points()
            .zip(&self.amplitudes)
            .map(|(x, a)| a.norm_sqr() * x.powi(power))
            .sum::<f64>()
            * dx;
        num / self.norm_sq()
    }
}

fn norm_sq_of(amps: &[C64], dx: f64) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx
}

/// L² inner product Σ conj(a_i) b_i · spacing.
pub fn inner_product(a: &WaveFunction, b: &WaveFunction) -> Result<C64> {
    a.check_grid(b)?;
    let s: C64 = a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum();
    Ok(s * a.grid.spacing())
}

/// Squared overlap of the normalized states, in [0, 1].
pub fn fidelity(a: &WaveFunction, b: &WaveFunction) -> Result<f64> {
    a.check_grid(b)?;
    let (na, nb) = (a.norm_sq(), b.norm_sq());
    if !(na >= NULL_WEIGHT) {
        return Err(Error::NullState { weight: na });
    }
    if !(nb >= NULL_WEIGHT) {
        return Err(Error::NullState { weight: nb });
    }
    let ov = inner_product(a, b)?;
    Ok((ov.norm_sqr() / (na * nb)).min(1.0))
}

/// x̂ψ: pointwise multiplication by x.
pub fn apply_position(psi: &WaveFunction) -> WaveFunction {
    psi.map_pointwise(|x, a| a * x)
}

/// p̂ψ = −i dψ/dx, by spectral differentiation.
pub fn apply_momentum(psi: &WaveFunction) -> WaveFunction {
    let k = psi.grid.derivative_wavenumbers();
    let mut data = psi.amplitudes.clone();
    spectral_filter(&mut data, &k, |km| C64::new(km, 0.0));
    WaveFunction::raw(psi.grid, data)
}

/// â ψ = (x̂ + i p̂)ψ / √2.
pub fn apply_annihilation(psi: &WaveFunction) -> WaveFunction {
    ladder(psi, 1.0, C64::new(0.0, 0.0))
}

/// â† ψ = (x̂ − i p̂)ψ / √2.
pub fn apply_creation(psi: &WaveFunction) -> WaveFunction {
    ladder(psi, -1.0, C64::new(0.0, 0.0))
}

/// (x̂ + i·sign·p̂)/√2 − shift, applied to ψ.
pub(crate) fn ladder(psi: &WaveFunction, sign: f64, shift: C64) -> WaveFunction {
    let p = apply_momentum(psi);
    let amps = psi
        .grid
        .points()
        .zip(psi.amplitudes.iter().zip(&p.amplitudes))
        .map(|(x, (&a, &pa))| (a * x + C64::new(0.0, sign) * pa) / SQRT_2 - shift * a)
        .collect();
    WaveFunction::raw(psi.grid, amps)
}

/// Relative norm change above which a Fourier rotation is considered aliased.
const ROTATION_NORM_TOLERANCE: f64 = 1e-6;

/// Quarter turn in phase space: ψ̃(p) = (2π)^{-1/2} ∫ ψ(x) e^{−ipx} dx, sampled
/// on the same grid read as the p axis. Equals e^{−iπn̂/2}.
pub fn fourier_rotate(psi: &WaveFunction) -> Result<WaveFunction> {
    quarter_turn(psi, -1.0)
}

/// Inverse quarter turn, e^{+iπn̂/2}; kernel e^{+ipx}.
pub fn inverse_fourier_rotate(psi: &WaveFunction) -> Result<WaveFunction> {
    quarter_turn(psi, 1.0)
}

fn quarter_turn(psi: &WaveFunction, sign: f64) -> Result<WaveFunction> {
    let grid = psi.grid;
    let n = grid.len();
    let dx = grid.spacing();
    let xs = grid.to_vec();
    // trapezoidal weights
    let weighted: Vec<C64> = psi
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| if i == 0 || i + 1 == n { a * 0.5 } else { *a })
        .collect();
    let pref = dx / (2.0 * PI).sqrt();
    let out: Vec<C64> = xs
        .iter()
        .map(|&p| {
            let step = C64::from_polar(1.0, sign * p * dx);
            let mut phase = C64::from_polar(1.0, sign * p * xs[0]);
            let mut acc = C64::new(0.0, 0.0);
            for (i, w) in weighted.iter().enumerate() {
                if i % 64 == 0 {
                    // re-anchor the phase recurrence
                    phase = C64::from_polar(1.0, sign * p * xs[i]);
                }
                acc += w * phase;
                phase *= step;
            }
            acc * pref
        })
        .collect();
    let rotated = WaveFunction::raw(grid, out);
    let (before, after) = (psi.norm_sq(), rotated.norm_sq());
    if before > 0.0 && ((after - before) / before).abs() > ROTATION_NORM_TOLERANCE {
        return Err(Error::Aliasing(format!(
            "momentum support exceeds the grid: norm {before:.6e} became {after:.6e}"
        )));
    }
    Ok(WaveFunction { grid, amplitudes: rotated.amplitudes, weight: psi.weight })
}

/// Phase-space displacement: (Dψ)(x) = e^{i·dp·x} ψ(x − dx), with the shift
/// done by band-limited interpolation.
pub fn displace(psi: &WaveFunction, dx: f64, dp: f64) -> WaveFunction {
    let mut data = psi.amplitudes.clone();
    if dx != 0.0 {
        let k = psi.grid.wavenumbers();
        let nyq = psi.grid.len() % 2 == 0;
        let n = psi.grid.len();
        // the unpaired Nyquist mode is shifted as a cosine
        let k_nyq = if nyq { Some(k[n / 2]) } else { None };
        spectral_filter(&mut data, &k, |km| {
            if Some(km) == k_nyq {
                C64::new((km * dx).cos(), 0.0)
            } else {
                C64::from_polar(1.0, -km * dx)
            }
        });
    }
    let shifted = WaveFunction::raw(psi.grid, data);
    if dp == 0.0 {
        shifted
    } else {
        shifted.map_pointwise(|x, a| a * C64::from_polar(1.0, dp * x))
    }
}

/// Band-limited (trigonometric) interpolation of ψ at arbitrary points.
///
/// Points outside the grid are evaluated on the periodic extension, so callers
/// must keep the sampled function negligible near the grid ends.
pub fn interpolate(psi: &WaveFunction, points: &[f64]) -> Vec<C64> {
    let grid = psi.grid;
    let n = grid.len();
    let mut spec = psi.amplitudes.clone();
    fft_plan(n, false).process(&mut spec);
    let k = grid.wavenumbers();
    let x0 = grid.x_min();
    let inv_n = 1.0 / n as f64;
    let nyq = if n % 2 == 0 { Some(n / 2) } else { None };
    points
        .iter()
        .map(|&x| {
            let t = x - x0;
            let mut acc = C64::new(0.0, 0.0);
            for (m, (c, &km)) in spec.iter().zip(&k).enumerate() {
                if Some(m) == nyq {
                    acc += c * (km * t).cos();
                } else {
                    acc += c * C64::from_polar(1.0, km * t);
                }
            }
            acc * inv_n
        })
        .collect()
}

/// Fraction of the discrete spectral power above `cutoff`·(Nyquist momentum).
pub fn spectral_tail_fraction(psi: &WaveFunction, cutoff: f64) -> f64 {
    let grid = psi.grid;
    let mut spec = psi.amplitudes.clone();
    fft_plan(grid.len(), false).process(&mut spec);
    let k_lim = cutoff * grid.nyquist_momentum();
    let (mut tail, mut total) = (0.0, 0.0);
    for (c, km) in spec.iter().zip(grid.wavenumbers()) {
        let w = c.norm_sqr();
        total += w;
        if km.abs() > k_lim {
            tail += w;
        }
    }
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}

/// Largest edge intensity |ψ(x_min)|², |ψ(x_max)|² relative to max |ψ|².
pub fn edge_fraction(psi: &WaveFunction) -> f64 {
    let a = &psi.amplitudes;
    let peak = a.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    a[0].norm_sqr().max(a[a.len() - 1].norm_sqr()) / peak
}

/// Ŝ(r)ψ: (Ŝψ)(x) = e^{r/2} ψ(x e^{r}), evaluated by band-limited interpolation.
pub fn squeeze(psi: &WaveFunction, r: f64) -> WaveFunction {
    let scale = r.exp();
    let pts: Vec<f64> = psi.grid.points().map(|x| x * scale).collect();
    let (lo, hi) = (psi.grid.x_min(), psi.grid.x_max());
    let vals = interpolate(psi, &pts);
    let amps = pts
        .iter()
        .zip(vals)
        .map(|(&x, v)| if x < lo || x > hi { C64::new(0.0, 0.0) } else { v * (0.5 * r).exp() })
        .collect();
    WaveFunction::raw(psi.grid, amps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vacuum(grid: QuadratureGrid) -> WaveFunction {
        WaveFunction::from_real_fn(grid, |x| PI.powf(-0.25) * (-x * x / 2.0).exp())
    }

    fn fock1(grid: QuadratureGrid) -> WaveFunction {
        WaveFunction::from_real_fn(grid, |x| PI.powf(-0.25) * SQRT_2 * x * (-x * x / 2.0).exp())
    }

    #[test]
    fn grid_spacing_and_points() {
        let g = QuadratureGrid::new(1024, 12.0).unwrap();
        assert!((g.spacing() - 24.0 / 1023.0).abs() < 1e-15);
        assert!((g.spacing() - 0.02346).abs() < 1e-5);

        let g = QuadratureGrid::new(2, 1.0).unwrap();
        assert_eq!(g.to_vec(), vec![-1.0, 1.0]);

        let g = QuadratureGrid::new(1025, 10.0).unwrap();
        assert_eq!(g.point(512), 0.0);
        assert!(g.is_symmetric());
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(QuadratureGrid::new(1, 1.0).is_err());
        assert!(QuadratureGrid::new(16, 0.0).is_err());
        assert!(QuadratureGrid::new(16, -3.0).is_err());
        assert!(QuadratureGrid::with_bounds(16, 1.0, 1.0).is_err());
        assert!(QuadratureGrid::with_momentum_extent(64, 12.0, 20.0).is_err());
        assert!(QuadratureGrid::with_momentum_extent(1024, 12.0, 20.0).is_ok());
    }

    #[test]
    fn inner_products() {
        let g = QuadratureGrid::new(1024, 12.0).unwrap();
        let v = vacuum(g);
        let f1 = fock1(g);
        assert!((inner_product(&v, &v).unwrap().re - 1.0).abs() < 1e-12);
        assert!(inner_product(&v, &f1).unwrap().norm() < 1e-10);
        let other = vacuum(QuadratureGrid::new(512, 12.0).unwrap());
        assert_eq!(inner_product(&v, &other), Err(Error::GridMismatch));
    }

    #[test]
    fn fidelity_basics() {
        let g = QuadratureGrid::new(512, 10.0).unwrap();
        let v = vacuum(g);
        let f1 = fock1(g);
        assert!((fidelity(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        let phased = v.scaled(C64::from_polar(3.0, 1.234));
        assert!((fidelity(&v, &phased).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&v, &f1).unwrap() < 1e-20);
        let zero = v.scaled(C64::new(0.0, 0.0));
        assert!(matches!(fidelity(&v, &zero), Err(Error::NullState { .. })));
    }

    #[test]
    fn position_and_momentum_on_vacuum() {
        let g = QuadratureGrid::new(1024, 12.0).unwrap();
        let v = vacuum(g);
        let xv = apply_position(&v);
        assert!((fidelity(&xv, &fock1(g)).unwrap() - 1.0).abs() < 1e-12);
        // −i d/dx e^{−x²/2} = i x e^{−x²/2}
        let pv = apply_momentum(&v);
        for (x, a) in g.points().zip(pv.amplitudes()) {
            let expect = C64::new(0.0, x * PI.powf(-0.25) * (-x * x / 2.0).exp());
            assert!((a - expect).norm() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn ladder_weights() {
        let g = QuadratureGrid::new(1024, 12.0).unwrap();
        let v = vacuum(g);
        assert!(apply_annihilation(&v).weight() < 1e-10);
        assert!(apply_annihilation(&v).is_null());
        let up = apply_creation(&fock1(g));
        assert!((up.weight() - 2.0).abs() < 1e-9);
        let back = apply_annihilation(&apply_creation(&v));
        assert!((back.weight() - 1.0).abs() < 1e-9);
        assert!((fidelity(&back, &v).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_keeps_raw_weight() {
        let g = QuadratureGrid::new(256, 8.0).unwrap();
        let v = vacuum(g).scaled(C64::new(2.0, 0.0));
        let n = v.normalized().unwrap();
        assert!((n.norm_sq() - 1.0).abs() < 1e-10);
        assert!((n.weight() - 4.0).abs() < 1e-9);
        let zero = v.scaled(C64::new(0.0, 0.0));
        assert!(matches!(zero.normalized(), Err(Error::NullState { .. })));
    }

    #[test]
    fn fourier_rotation_of_hermite_functions() {
        let g = QuadratureGrid::new(1024, 12.0).unwrap();
        let v = vacuum(g);
        assert!((fidelity(&fourier_rotate(&v).unwrap(), &v).unwrap() - 1.0).abs() < 1e-10);
        let f1 = fock1(g);
        let r = fourier_rotate(&f1).unwrap();
        let ov = inner_product(&f1, &r).unwrap();
        assert!((ov - C64::new(0.0, -1.0)).norm() < 1e-9, "{ov}");

        let mut s = f1.add_scaled(&v, C64::new(0.3, 0.7)).unwrap();
        let orig = s.clone();
        for _ in 0..4 {
            s = fourier_rotate(&s).unwrap();
        }
        for (a, b) in s.amplitudes().iter().zip(orig.amplitudes()) {
            assert!((a - b).norm() < 1e-8);
        }
        let back = inverse_fourier_rotate(&fourier_rotate(&orig).unwrap()).unwrap();
        for (a, b) in back.amplitudes().iter().zip(orig.amplitudes()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn rotation_detects_aliasing() {
        let g = QuadratureGrid::new(1024, 12.0).unwrap();
        // momentum 15 lies outside the p range [-12, 12] of the rotated grid
        let boosted = displace(&vacuum(g), 0.0, 15.0);
        assert!(matches!(fourier_rotate(&boosted), Err(Error::Aliasing(_))));
    }

    #[test]
    fn displacement_and_interpolation() {
        let g = QuadratureGrid::new(512, 12.0).unwrap();
        let v = vacuum(g);
        let shifted = displace(&v, 0.4, 0.0);
        for (x, a) in g.points().zip(shifted.amplitudes()) {
            let expect = PI.powf(-0.25) * (-(x - 0.4) * (x - 0.4) / 2.0).exp();
            assert!((a.re - expect).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
        let pts = [0.01234, -2.5, 3.3333];
        let vals = interpolate(&v, &pts);
        for (x, val) in pts.iter().zip(vals) {
            let expect = PI.powf(-0.25) * (-x * x / 2.0).exp();
            assert!((val.re - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn squeeze_matches_analytic() {
        let g = QuadratureGrid::new(1024, 12.0).unwrap();
        let v = vacuum(g);
        let s = squeeze(&v, 0.5);
        let expect = WaveFunction::from_real_fn(g, |x| (-x * x * (1.0f64).exp() / 2.0).exp());
        assert!((fidelity(&s, &expect).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.norm_sq() - 1.0).abs() < 1e-10);
    }
}
