//! Analytic input and target states evaluated on a grid.
//!
//! Conventions: x̂ = (â+â†)/√2, squeezing (Ŝ(r)ψ)(x) = e^{r/2}ψ(x e^{r}), so
//! r > 0 squeezes x̂, and ⟨x|β⟩ = π^{-1/4} exp(−(x−√2 Reβ)²/2 + i√2 Imβ x − i Reβ Imβ).

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{edge_fraction, spectral_tail_fraction, QuadratureGrid, WaveFunction};
use crate::special::{airy_ai, hermite, hermite_function, MAX_HERMITE_ORDER};

/// Largest accepted |r|.
pub const MAX_SQUEEZE: f64 = 5.0;

const EDGE_TOLERANCE: f64 = 1e-6;
const SPECTRAL_TOLERANCE: f64 = 1e-8;
/// Portion of the Nyquist band that must hold all but `SPECTRAL_TOLERANCE` of the power.
const SPECTRAL_CUTOFF: f64 = 0.8;

/// Squeezing parameter r; r > 0 squeezes x̂, r < 0 squeezes p̂.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SqueezeParam(f64);

impl SqueezeParam {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r.abs() > MAX_SQUEEZE {
            return Err(Error::param(format!("squeezing |r| must be at most {MAX_SQUEEZE}, got {r}")));
        }
        Ok(Self(r))
    }

    pub fn r(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SqueezeParam {
    type Error = Error;
    fn try_from(r: f64) -> Result<Self> {
        Self::new(r)
    }
}

impl From<SqueezeParam> for f64 {
    fn from(s: SqueezeParam) -> f64 {
        s.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Plus,
    Minus,
}

/// Ŝ(ξ)·N(|α⟩ ± |−α⟩) with real α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatSpec {
    pub alpha: f64,
    pub parity: Parity,
    #[serde(default)]
    pub squeeze: SqueezeParam,
}

/// Cubic-phase-state approximations, given as momentum wave functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum CpsVariant {
    /// [1 + γ′H₃(p′/√2) + γ′²/2 H₆(p′/√2)] e^{−p′²/2} truncated at `order`.
    HermiteSeries { order: u32, xi: f64 },
    /// exp(−p²/(2e^{2ξ})) Ai(−(p+p₀)/∛(3γ)).
    Airy { p0: f64, xi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpsSpec {
    pub gamma: f64,
    #[serde(flatten)]
    pub variant: CpsVariant,
}

/// Rejects states that touch the grid ends or fill the top of the momentum band.
pub fn check_support(psi: &WaveFunction, what: &str) -> Result<()> {
    let edge = edge_fraction(psi);
    if edge > EDGE_TOLERANCE {
        return Err(Error::Support(format!(
            "{what} reaches the grid boundary (edge intensity ratio {edge:.2e})"
        )));
    }
    let tail = spectral_tail_fraction(psi, SPECTRAL_CUTOFF);
    if tail > SPECTRAL_TOLERANCE {
        return Err(Error::Aliasing(format!(
            "{what} is under-resolved (spectral power {tail:.2e} near the Nyquist momentum)"
        )));
    }
    Ok(())
}

fn finish(psi: WaveFunction, what: &str) -> Result<WaveFunction> {
    let psi = psi.normalize()?;
    check_support(&psi, what)?;
    Ok(psi)
}

/// Normalized Ŝ(r)|0⟩ ∝ exp(−x² e^{2r}/2).
pub fn squeezed_vacuum(r: SqueezeParam, grid: QuadratureGrid) -> Result<WaveFunction> {
    let s = r.r().exp();
    finish(
        WaveFunction::from_real_fn(grid, |x| (-0.5 * (x * s) * (x * s)).exp()),
        "squeezed vacuum",
    )
}

pub fn vacuum(grid: QuadratureGrid) -> Result<WaveFunction> {
    squeezed_vacuum(SqueezeParam::default(), grid)
}

/// Normalized Fock state |n⟩.
pub fn fock_state(n: usize, grid: QuadratureGrid) -> Result<WaveFunction> {
    squeezed_fock(n, SqueezeParam::default(), grid)
}

/// Normalized Ŝ(r)|n⟩.
pub fn squeezed_fock(n: usize, r: SqueezeParam, grid: QuadratureGrid) -> Result<WaveFunction> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::param(format!("Fock index {n} exceeds {MAX_HERMITE_ORDER}")));
    }
    let s = r.r().exp();
    let turning = (2.0 * n as f64 + 1.0).sqrt() / s;
    if turning >= grid.x_max().min(-grid.x_min()) {
        return Err(Error::Support(format!(
            "Fock state {n} has turning point {turning:.3} outside the grid"
        )));
    }
    finish(
        WaveFunction::from_real_fn(grid, |x| hermite_function(n, x * s)),
        &format!("Fock state {n}"),
    )
}

/// Coherent-state wave function ⟨x|β⟩ (already normalized analytically).
pub fn coherent_amplitude(beta: C64, x: f64) -> C64 {
    let d = x - SQRT_2 * beta.re;
    let phase = SQRT_2 * beta.im * x - beta.re * beta.im;
    C64::from_polar(PI.powf(-0.25) * (-0.5 * d * d).exp(), phase)
}

/// Normalized coherent state |β⟩.
pub fn coherent(beta: C64, grid: QuadratureGrid) -> Result<WaveFunction> {
    finish(WaveFunction::from_fn(grid, |x| coherent_amplitude(beta, x)), "coherent state")
}

/// Unnormalized cat amplitudes without support checks.
///
/// The components are combined as e^{−(u²+2α²)/2}·cosh(√2αu) for plus cats and
/// e^{−(u²+2α²)/2}·sinh(√2αu)/(√2α) for minus cats, u = x e^{ξ}, so the α → 0
/// limit of the odd family stays finite (Ŝ(ξ)|1⟩).
pub(crate) fn cat_unchecked(alpha: f64, parity: Parity, xi: f64, grid: QuadratureGrid) -> WaveFunction {
    let s = xi.exp();
    let c = SQRT_2 * alpha;
    WaveFunction::from_real_fn(grid, |x| {
        let u = x * s;
        // e^{−(u−c)²/2} ± e^{−(u+c)²/2} written without cancellation
        let env_plus = (-0.5 * (u - c) * (u - c)).exp();
        let env_minus = (-0.5 * (u + c) * (u + c)).exp();
        match parity {
            Parity::Plus => 0.5 * (env_plus + env_minus),
            Parity::Minus => {
                if c * u.abs() < 1e-3 {
                    // sinh(cu)/c ≈ u(1 + (cu)²/6)
                    (-0.5 * (u * u + c * c)).exp() * u * (1.0 + (c * u) * (c * u) / 6.0)
                } else {
                    0.5 * (env_plus - env_minus) / c
                }
            }
        }
    })
}

/// Normalized Ŝ(ξ)·N(|α⟩ ± |−α⟩).
pub fn cat_state(spec: CatSpec, grid: QuadratureGrid) -> Result<WaveFunction> {
    if !(spec.alpha >= 0.0) || !spec.alpha.is_finite() {
        return Err(Error::param(format!("cat amplitude must be a finite α ≥ 0, got {}", spec.alpha)));
    }
    if spec.alpha == 0.0 && spec.parity == Parity::Minus {
        return Err(Error::NullState { weight: 0.0 });
    }
    finish(cat_unchecked(spec.alpha, spec.parity, spec.squeeze.r(), grid), "cat state")
}

pub(crate) fn four_cat_unchecked(beta_mag: f64, m: u8, grid: QuadratureGrid) -> WaveFunction {
    let beta = C64::from_polar(beta_mag, FRAC_PI_4);
    let i = C64::i();
    let m = m as i32;
    let terms = [
        (beta, C64::new(1.0, 0.0)),
        (-beta, C64::new(-1.0, 0.0).powi(m)),
        (i * beta, i.powi(m)),
        (-i * beta, (-i).powi(m)),
    ];
    WaveFunction::from_fn(grid, |x| terms.iter().map(|(b, w)| w * coherent_amplitude(*b, x)).sum())
}

/// Normalized |β⟩ + (−1)^m|−β⟩ + i^m|iβ⟩ + (−i)^m|−iβ⟩ with β = |β|e^{iπ/4}.
pub fn four_cat_state(beta_mag: f64, m: u8, grid: QuadratureGrid) -> Result<WaveFunction> {
    if m > 3 {
        return Err(Error::param(format!("four-cat type m must be 0..=3, got {m}")));
    }
    if !(beta_mag >= 0.0) || !beta_mag.is_finite() {
        return Err(Error::param(format!("|β| must be finite and nonnegative, got {beta_mag}")));
    }
    finish(four_cat_unchecked(beta_mag, m, grid), "four-component cat")
}

/// Normalized Σ cₙ|n⟩.
pub fn fock_superposition(coeffs: &[f64], grid: QuadratureGrid) -> Result<WaveFunction> {
    if coeffs.iter().all(|c| *c == 0.0) {
        return Err(Error::param("Fock superposition needs a nonzero coefficient"));
    }
    let mut acc = WaveFunction::from_real_fn(grid, |_| 0.0);
    for (n, &c) in coeffs.iter().enumerate() {
        if c != 0.0 {
            acc = acc.add_scaled(&fock_state(n, grid)?, C64::new(c, 0.0))?;
        }
    }
    finish(acc, "Fock superposition")
}

/// Momentum profile of a cubic-phase-state approximation, sampled on the grid
/// read as the p axis.
pub fn cps_target(spec: CpsSpec, grid: QuadratureGrid) -> Result<WaveFunction> {
    finish(cps_profile(spec, grid)?, "cubic phase target")
}

/// As [`cps_target`] but without the support check, for envelopes wider than the grid.
pub fn cps_profile(spec: CpsSpec, grid: QuadratureGrid) -> Result<WaveFunction> {
    let g = spec.gamma;
    if !g.is_finite() {
        return Err(Error::param("cubicity γ must be finite"));
    }
    let psi = match spec.variant {
        CpsVariant::HermiteSeries { order, xi } => {
            if order > 2 {
                return Err(Error::param(format!("Hermite-series order must be 0, 1 or 2, got {order}")));
            }
            let gp = g / (SQRT_2 * (-2.0 * xi).exp()).powi(3);
            let stretch = xi.exp();
            WaveFunction::from_real_fn(grid, |p| {
                let q = p * stretch;
                let h = q / SQRT_2;
                let mut s = 1.0;
                if order >= 1 {
                    s += gp * hermite(3, h);
                }
                if order >= 2 {
                    s += 0.5 * gp * gp * hermite(6, h);
                }
                s * (-0.5 * q * q).exp()
            })
        }
        CpsVariant::Airy { p0, xi } => {
            if g == 0.0 {
                return Err(Error::param("Airy target needs γ ≠ 0"));
            }
            let scale = (3.0 * g).cbrt();
            let env = (2.0 * xi).exp();
            WaveFunction::from_real_fn(grid, |p| {
                (-p * p / (2.0 * env)).exp() * airy_ai(-(p + p0) / scale)
            })
        }
    };
    psi.normalize()
}

/// Serializable description of any state in this module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StateSpec {
    Vacuum,
    Squeezed { r: f64 },
    Fock {
        n: usize,
        #[serde(default)]
        r: f64,
    },
    Coherent {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Cat(CatSpec),
    FourCat { beta: f64, m: u8 },
    FockSuperposition { coeffs: Vec<f64> },
    Cps(CpsSpec),
}

impl StateSpec {
    pub fn build(&self, grid: QuadratureGrid) -> Result<WaveFunction> {
        match self {
            StateSpec::Vacuum => vacuum(grid),
            StateSpec::Squeezed { r } => squeezed_vacuum(SqueezeParam::new(*r)?, grid),
            StateSpec::Fock { n, r } => squeezed_fock(*n, SqueezeParam::new(*r)?, grid),
            StateSpec::Coherent { re, im } => coherent(C64::new(*re, *im), grid),
            StateSpec::Cat(spec) => cat_state(*spec, grid),
            StateSpec::FourCat { beta, m } => four_cat_state(*beta, *m, grid),
            StateSpec::FockSuperposition { coeffs } => fock_superposition(coeffs, grid),
            StateSpec::Cps(spec) => cps_target(*spec, grid),
        }
    }
}
