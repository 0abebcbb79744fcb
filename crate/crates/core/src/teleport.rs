//! Conditional teleportation with a non-Gaussian entangled resource.
//!
//! One step maps ψ_in to ψ_out = h_{k,l}(η, m_x, m_p) ψ_cond with
//!
//! ψ_cond(x′) = ∫dx e^{−i m_p (x − x′)} ψ_in(x) Ψ_TMSS(x − m_x, x′ − m_x),
//! Ψ_TMSS(x₁, x₂) = exp(−e^{2r}(x₁−x₂)²/4 − e^{−2r}(x₁+x₂)²/4).
//!
//! The squared norm of the raw ψ_out is the Bell-outcome density up to a
//! constant: ∬ ‖ψ_out(m)‖² dm_x dm_p = 2π ‖ψ_in‖² ‖f_{k,l}Ψ_TMSS‖².

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{fidelity, fourier_rotate, QuadratureGrid, WaveFunction};
use crate::nges::{apply_h, resource_norm_sq, OperatorPoly, SubtractionSpec};

/// Largest accepted resource squeezing.
pub const MAX_R_TELE: f64 = 3.0;

/// Above this |exponent| the factorized kernel could overflow; evaluate directly.
const FACTORIZED_EXPONENT_LIMIT: f64 = 300.0;

/// Kernel terms with tmss(x − m_x, x′ − m_x) below e^{−KERNEL_CUTOFF} are skipped.
const KERNEL_CUTOFF: f64 = 45.0;

/// Resource squeezing, subtraction pattern and grid of a teleporter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportConfig {
    pub r_tele: f64,
    pub spec: SubtractionSpec,
    pub grid: QuadratureGrid,
}

impl TeleportConfig {
    pub fn new(r_tele: f64, spec: SubtractionSpec, grid: QuadratureGrid) -> Result<Self> {
        let c = Self { r_tele, spec, grid };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_tele > 0.0 && self.r_tele <= MAX_R_TELE) {
            return Err(Error::param(format!("r_tele must lie in (0, {MAX_R_TELE}], got {}", self.r_tele)));
        }
        SubtractionSpec::new(self.spec.k, self.spec.l)?;
        Ok(())
    }

    /// η = tanh r_tele.
    pub fn eta(&self) -> f64 {
        self.r_tele.tanh()
    }

    pub fn poly(&self) -> Result<OperatorPoly> {
        OperatorPoly::new(self.spec, self.eta())
    }

    /// Width √2·e^{−r} of the kernel along x − x′.
    pub fn kernel_width(&self) -> f64 {
        2f64.sqrt() * (-self.r_tele).exp()
    }
}

/// Projector parameters of one Bell measurement.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BellOutcome {
    pub m_x: f64,
    pub m_p: f64,
}

impl BellOutcome {
    pub fn new(m_x: f64, m_p: f64) -> Self {
        Self { m_x, m_p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanStep {
    pub outcome: BellOutcome,
    #[serde(default)]
    pub rotate_after: bool,
}

/// Ordered teleportation steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationPlan {
    steps: Vec<PlanStep>,
}

impl IterationPlan {
    pub fn new(steps: Vec<PlanStep>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::param("iteration plan must have at least one step"));
        }
        if steps.iter().any(|s| !s.outcome.m_x.is_finite() || !s.outcome.m_p.is_finite()) {
            return Err(Error::param("Bell outcomes must be finite"));
        }
        Ok(Self { steps })
    }

    /// Builds a plan from per-step vectors; `m_p` and `rotate` may be empty (all zero / false).
    pub fn from_vectors(m_x: &[f64], m_p: &[f64], rotate: &[bool]) -> Result<Self> {
        let n = m_x.len();
        if !m_p.is_empty() && m_p.len() != n {
            return Err(Error::param(format!("m_p has {} entries but m_x has {n}", m_p.len())));
        }
        if !rotate.is_empty() && rotate.len() != n {
            return Err(Error::param(format!("rotate-after has {} entries but m_x has {n}", rotate.len())));
        }
        Self::new(
            (0..n)
                .map(|i| PlanStep {
                    outcome: BellOutcome::new(m_x[i], m_p.get(i).copied().unwrap_or(0.0)),
                    rotate_after: rotate.get(i).copied().unwrap_or(false),
                })
                .collect(),
        )
    }

    /// `n` identical steps at `outcome`.
    pub fn repeated(n: usize, outcome: BellOutcome) -> Result<Self> {
        Self::new(vec![PlanStep { outcome, rotate_after: false }; n])
    }

    pub fn steps(&self) -> &[PlanStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn m_x(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.outcome.m_x).collect()
    }

    pub fn m_p(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.outcome.m_p).collect()
    }

    /// Same plan with every m_x shifted by `dx`.
    pub fn shifted(&self, dx: f64) -> Self {
        let steps = self
            .steps
            .iter()
            .map(|s| PlanStep { outcome: BellOutcome::new(s.outcome.m_x + dx, s.outcome.m_p), ..*s })
            .collect();
        Self { steps }
    }
}

/// Unnormalized two-mode squeezed state kernel Ψ_TMSS(x₁, x₂).
pub fn tmss_wave(r_tele: f64, x1: f64, x2: f64) -> f64 {
    let d = (x1 - x2) / 2f64.sqrt();
    let s = (x1 + x2) / 2f64.sqrt();
    (-(2.0 * r_tele).exp() / 2.0 * d * d).exp() * (-(-2.0 * r_tele).exp() / 2.0 * s * s).exp()
}

/// Result of running an [`IterationPlan`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    /// Normalized output state.
    pub state: WaveFunction,
    /// Raw output weight of each step for its normalized input.
    pub step_weights: Vec<f64>,
}

/// A teleporter with its position kernel precomputed.
///
/// The kernel factorizes as exp(−a(x−x′)² − b(x+x′)²)·e^{4bm_x(x+x′) − 4bm_x²},
/// a = e^{2r}/4, b = e^{−2r}/4, so only the m-independent symmetric part is stored.
#[derive(Debug, Clone)]
pub struct Teleporter {
    config: TeleportConfig,
    poly: OperatorPoly,
    xs: Vec<f64>,
    quad_weights: Vec<f64>,
    kernel: Vec<f64>,
}

impl Teleporter {
    pub fn new(config: TeleportConfig) -> Result<Self> {
        config.validate()?;
        let poly = config.poly()?;
        let grid = config.grid;
        let n = grid.len();
        let xs = grid.to_vec();
        let dx = grid.spacing();
        let quad_weights = (0..n).map(|i| if i == 0 || i + 1 == n { 0.5 * dx } else { dx }).collect();
        let (a, b) = kernel_coefficients(config.r_tele);
        let mut kernel = vec![0.0; n * n];
        kernel.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let xi = xs[i];
            for (j, v) in row.iter_mut().enumerate() {
                let (d, s) = (xi - xs[j], xi + xs[j]);
                *v = (-a * d * d - b * s * s).exp();
            }
        });
        Ok(Self { config, poly, xs, quad_weights, kernel })
    }

    pub fn config(&self) -> &TeleportConfig {
        &self.config
    }

    pub fn poly(&self) -> &OperatorPoly {
        &self.poly
    }

    /// ψ_cond for one Bell outcome, unnormalized.
    pub fn conditional_wave(&self, psi: &WaveFunction, outcome: BellOutcome) -> Result<WaveFunction> {
        if *psi.grid() != self.config.grid {
            return Err(Error::GridMismatch);
        }
        let (a, b) = kernel_coefficients(self.config.r_tele);
        let BellOutcome { m_x, m_p } = outcome;
        let lin = 4.0 * b * m_x;
        let x_edge = self.xs[0].abs().max(self.xs[self.xs.len() - 1].abs());
        if (lin * x_edge).abs() > FACTORIZED_EXPONENT_LIMIT {
            return Ok(self.conditional_direct(psi, outcome));
        }
        let amps = psi.amplitudes();
        let u: Vec<C64> = amps
            .iter()
            .zip(&self.xs)
            .zip(&self.quad_weights)
            .map(|((a, &x), &w)| a * C64::from_polar(w * (lin * x).exp(), -m_p * x))
            .collect();
        let n = self.xs.len();
        let (x0, dx) = (self.xs[0], self.config.grid.spacing());
        let out: Vec<C64> = self
            .kernel
            .par_chunks(n)
            .zip(self.xs.par_iter())
            .map(|(row, &xj)| {
                // −(a+b)(s² + v²) + 2(a−b)sv ≥ −T with s = x − m_x, v = x′ − m_x
                let v = xj - m_x;
                let disc = (a + b) * KERNEL_CUTOFF - 4.0 * a * b * v * v;
                if disc < 0.0 {
                    return C64::new(0.0, 0.0);
                }
                let centre = (a - b) * v / (a + b) + m_x;
                let half = disc.sqrt() / (a + b);
                let lo = (((centre - half - x0) / dx).floor().max(0.0) as usize).min(n);
                let hi = (((centre + half - x0) / dx).ceil() as usize + 1).min(n).max(lo);
                let mut acc = C64::new(0.0, 0.0);
                for (ui, &k) in u[lo..hi].iter().zip(&row[lo..hi]) {
                    acc += ui * k;
                }
                acc * C64::from_polar((lin * xj - lin * m_x).exp(), m_p * xj)
            })
            .collect();
        WaveFunction::from_amplitudes(self.config.grid, out)
    }

    fn conditional_direct(&self, psi: &WaveFunction, outcome: BellOutcome) -> WaveFunction {
        let r = self.config.r_tele;
        let BellOutcome { m_x, m_p } = outcome;
        let amps = psi.amplitudes();
        let out: Vec<C64> = self
            .xs
            .par_iter()
            .map(|&xp| {
                let mut acc = C64::new(0.0, 0.0);
                for ((a, &x), &w) in amps.iter().zip(&self.xs).zip(&self.quad_weights) {
                    let k = tmss_wave(r, x - m_x, xp - m_x);
                    acc += a * C64::from_polar(w * k, -m_p * (x - xp));
                }
                acc
            })
            .collect();
        WaveFunction::raw(self.config.grid, out)
    }

    /// ψ_out = h_{k,l}(η, m_x, m_p) ψ_cond, unnormalized; its weight is the heralding weight.
    pub fn step(&self, psi: &WaveFunction, outcome: BellOutcome) -> Result<WaveFunction> {
        let cond = self.conditional_wave(psi, outcome)?;
        apply_h(&self.poly, outcome.m_x, outcome.m_p, &cond)
    }

    /// Folds [`Teleporter::step`] over the plan, normalizing between steps.
    pub fn run_plan(&self, psi: &WaveFunction, plan: &IterationPlan) -> Result<PlanResult> {
        let mut state = psi.normalized()?;
        let mut step_weights = Vec::with_capacity(plan.len());
        for (i, s) in plan.steps().iter().enumerate() {
            let raw = self.step(&state, s.outcome).map_err(|e| match e {
                Error::NullState { weight } => Error::NullStep { step: i, weight },
                other => other,
            })?;
            let w = raw.norm_sq();
            if raw.is_null() {
                return Err(Error::NullStep { step: i, weight: w });
            }
            step_weights.push(w);
            state = raw.normalized()?;
            if s.rotate_after {
                state = fourier_rotate(&state)?;
            }
        }
        Ok(PlanResult { state, step_weights })
    }

    /// Exact ∬ d(m) dm_x dm_p for a normalized input: 2π‖f_{k,l}Ψ_TMSS‖².
    pub fn total_outcome_weight(&self) -> f64 {
        2.0 * PI * resource_norm_sq(&self.poly)
    }

    /// Unnormalized outcome density d(m): the raw output weight for the normalized input.
    pub fn outcome_density(&self, psi: &WaveFunction, outcome: BellOutcome) -> Result<f64> {
        let psi = psi.normalized()?;
        match self.step(&psi, outcome) {
            Ok(out) => Ok(out.norm_sq()),
            Err(Error::NullState { weight }) => Ok(weight),
            Err(e) => Err(e),
        }
    }

    /// Probability density p(m) = d(m)/Z with the exact normalization Z.
    pub fn outcome_probability_density(&self, psi: &WaveFunction, outcome: BellOutcome) -> Result<f64> {
        Ok(self.outcome_density(psi, outcome)? / self.total_outcome_weight())
    }
}

fn kernel_coefficients(r: f64) -> (f64, f64) {
    ((2.0 * r).exp() / 4.0, (-2.0 * r).exp() / 4.0)
}

/// ψ_cond with a fresh [`Teleporter`].
pub fn conditional_wave(psi: &WaveFunction, config: &TeleportConfig, outcome: BellOutcome) -> Result<WaveFunction> {
    Teleporter::new(*config)?.conditional_wave(psi, outcome)
}

/// One teleportation step with a fresh [`Teleporter`].
pub fn teleport_step(psi: &WaveFunction, config: &TeleportConfig, outcome: BellOutcome) -> Result<WaveFunction> {
    Teleporter::new(*config)?.step(psi, outcome)
}

/// Runs a plan with a fresh [`Teleporter`].
pub fn run_plan(psi: &WaveFunction, config: &TeleportConfig, plan: &IterationPlan) -> Result<PlanResult> {
    Teleporter::new(*config)?.run_plan(psi, plan)
}

/// Outcome density with a fresh [`Teleporter`].
pub fn outcome_density(psi: &WaveFunction, config: &TeleportConfig, outcome: BellOutcome) -> Result<f64> {
    Teleporter::new(*config)?.outcome_density(psi, outcome)
}

/// Settings of a success-probability sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    /// Half-width of the square calibration region in m_x and m_p.
    pub region: f64,
    /// Points per axis of the calibration lattice.
    pub resolution: usize,
    /// Points per axis of each nested refinement lattice.
    pub window_resolution: usize,
    /// Fidelity level whose acceptance set sets the innermost window.
    pub window_fidelity: f64,
    /// Largest tolerated |Z_lattice/Z_exact − 1|.
    pub coverage_tolerance: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self { region: 16.0, resolution: 81, window_resolution: 81, window_fidelity: 0.9, coverage_tolerance: 1e-3 }
    }
}

/// Success probability as a function of the fidelity threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub thresholds: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// Lattice estimate of the total outcome weight divided by its exact value.
    pub captured_fraction: f64,
    /// |captured_fraction − 1|.
    pub normalization_residual: f64,
    /// Half-widths (m_x, m_p) of the innermost window.
    pub window: (f64, f64),
    /// Number of nested windows, the full region included.
    pub levels: usize,
    pub evaluated_outcomes: usize,
}

struct Sample {
    weight: f64,
    density: f64,
    fidelity: f64,
}

fn lattice(half: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.0];
    }
    (0..points).map(|i| -half + 2.0 * half * i as f64 / (points - 1) as f64).collect()
}

/// C∞ step: 1 for u ≤ 1/2, 0 for u ≥ 1.
fn smooth_step(u: f64) -> f64 {
    let u = u.abs();
    if u <= 0.5 {
        return 1.0;
    }
    if u >= 1.0 {
        return 0.0;
    }
    let g = |t: f64| if t <= 0.0 { 0.0 } else { (-1.0 / t).exp() };
    let t = 2.0 * (u - 0.5);
    g(1.0 - t) / (g(1.0 - t) + g(t))
}

/// Trapezoid-rule cell weights along one lattice axis.
fn lattice_weights(half: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![1.0];
    }
    let h = 2.0 * half / (points - 1) as f64;
    (0..points).map(|i| if i == 0 || i + 1 == points { 0.5 * h } else { h }).collect()
}

impl Teleporter {
    fn evaluate(&self, psi: &WaveFunction, target: &WaveFunction, m: BellOutcome) -> Result<(f64, f64)> {
        match self.step(psi, m) {
            Ok(out) => Ok((out.norm_sq(), fidelity(&out, target)?)),
            Err(Error::NullState { weight }) => Ok((weight, 0.0)),
            Err(e) => Err(e),
        }
    }

    /// Half-width along one axis of the set where F ≥ `level`, scanning outward from m = 0.
    fn axis_extent(&self, psi: &WaveFunction, target: &WaveFunction, level: f64, along_x: bool, limit: f64) -> Result<f64> {
        let mut step = 1e-3;
        let mut s = 0.0;
        while s < limit {
            let next = (s + step).min(limit);
            let m = if along_x { BellOutcome::new(next, 0.0) } else { BellOutcome::new(0.0, next) };
            let mneg = if along_x { BellOutcome::new(-next, 0.0) } else { BellOutcome::new(0.0, -next) };
            let f = self.evaluate(psi, target, m)?.1.max(self.evaluate(psi, target, mneg)?.1);
            if f < level {
                return Ok(next);
            }
            s = next;
            step *= 1.25;
        }
        Ok(limit)
    }

    /// P(F ≥ F_th) = ∬_{F(out(m), target) ≥ F_th} p(m) dm for each threshold.
    ///
    /// The outcome plane is covered by nested windows W₀ ⊃ W₁ ⊃ … that halve
    /// per level down to twice the half-width of the set F ≥ `window_fidelity`.
    /// Smooth bumps φ_ℓ (φ₀ = 1) give a partition of unity Σ(φ_ℓ − φ_{ℓ+1}) = 1,
    /// and level ℓ integrates p·(φ_ℓ − φ_{ℓ+1}) with the trapezoid rule on its own
    /// lattice. Every piece is smooth and vanishes at its lattice edge, so Z is
    /// accurate to round-off once the region holds the density; all weights are
    /// nonnegative and shared by every threshold, so P is nonincreasing.
    pub fn success_sweep(
        &self,
        psi: &WaveFunction,
        target: &WaveFunction,
        thresholds: &[f64],
        settings: &SweepSettings,
    ) -> Result<SweepCurve> {
        if settings.resolution < 2 || settings.window_resolution < 2 || !(settings.region > 0.0) {
            return Err(Error::param("sweep lattices need at least 2 points per axis and a positive region"));
        }
        let psi = psi.normalized()?;
        let target = target.normalized()?;
        let region = settings.region;
        let level = settings.window_fidelity;

        let floor_x = (2.0 * self.axis_extent(&psi, &target, level, true, region)?).min(region);
        let floor_p = (2.0 * self.axis_extent(&psi, &target, level, false, region)?).min(region);
        let mut windows = vec![(region, region)];
        loop {
            let &(wx, wp) = windows.last().unwrap();
            if wx <= floor_x && wp <= floor_p {
                break;
            }
            windows.push(((wx / 2.0).max(floor_x), (wp / 2.0).max(floor_p)));
        }
        let bump = |l: usize, m: BellOutcome| -> f64 {
            match windows.get(l) {
                None => 0.0,
                Some(_) if l == 0 => 1.0,
                Some(&(wx, wp)) => smooth_step(m.m_x / wx) * smooth_step(m.m_p / wp),
            }
        };

        let mut points = Vec::new();
        for (l, &(wx, wp)) in windows.iter().enumerate() {
            let n = if l == 0 { settings.resolution } else { settings.window_resolution };
            let (xs, cx) = (lattice(wx, n), lattice_weights(wx, n));
            let (ps, cp) = (lattice(wp, n), lattice_weights(wp, n));
            for (&mx, &wxi) in xs.iter().zip(&cx) {
                for (&mp, &wpi) in ps.iter().zip(&cp) {
                    let m = BellOutcome::new(mx, mp);
                    let w = wxi * wpi * (bump(l, m) - bump(l + 1, m));
                    if w > 0.0 {
                        points.push((m, w));
                    }
                }
            }
        }
        let samples = self.sample_all(&psi, &target, &points)?;

        let z: f64 = samples.iter().map(|s| s.weight * s.density).sum();
        let exact = self.total_outcome_weight();
        let captured = z / exact;
        let residual = (captured - 1.0).abs();
        if captured < 1.0 - settings.coverage_tolerance {
            return Err(Error::RegionTooSmall { captured });
        }
        let probabilities = thresholds
            .iter()
            .map(|&t| {
                samples.iter().filter(|s| s.fidelity >= t).map(|s| s.weight * s.density).sum::<f64>() / z
            })
            .collect();
        Ok(SweepCurve {
            thresholds: thresholds.to_vec(),
            probabilities,
            captured_fraction: captured,
            normalization_residual: residual,
            window: *windows.last().unwrap(),
            levels: windows.len(),
            evaluated_outcomes: samples.len(),
        })
    }

    fn sample_all(&self, psi: &WaveFunction, target: &WaveFunction, points: &[(BellOutcome, f64)]) -> Result<Vec<Sample>> {
        points
            .par_iter()
            .map(|&(m, w)| {
                let (density, fidelity) = self.evaluate(psi, target, m)?;
                Ok(Sample { weight: w, density, fidelity })
            })
            .collect()
    }

    /// Two steps with correlated outcomes m″ = −m′ on a lattice of m′.
    ///
    /// Returns, per threshold, ∬_{F ≥ F_th} p₁(m′) p₂(−m′) dm′ with each step's
    /// density normalized exactly; this is a slice of the four-dimensional
    /// joint density, so its values carry units of inverse area.
    pub fn two_step_correlated_sweep(
        &self,
        psi: &WaveFunction,
        target: &WaveFunction,
        thresholds: &[f64],
        region: f64,
        resolution: usize,
    ) -> Result<Vec<f64>> {
        let psi = psi.normalized()?;
        let target = target.normalized()?;
        let z = self.total_outcome_weight();
        let (xs, cx) = (lattice(region, resolution), lattice_weights(region, resolution));
        let points: Vec<(BellOutcome, f64)> = xs
            .iter()
            .zip(&cx)
            .flat_map(|(&mx, &wxi)| xs.iter().zip(&cx).map(move |(&mp, &wpi)| (BellOutcome::new(mx, mp), wxi * wpi)))
            .collect();
        let samples: Vec<(f64, f64)> = points
            .par_iter()
            .map(|&(m, w)| {
                let first = self.step(&psi, m);
                let first = match first {
                    Ok(s) => s,
                    Err(Error::NullState { .. }) => return Ok((0.0, 0.0)),
                    Err(e) => return Err(e),
                };
                let d1 = first.norm_sq();
                let second = match self.step(&first.normalized()?, BellOutcome::new(-m.m_x, -m.m_p)) {
                    Ok(s) => s,
                    Err(Error::NullState { .. }) => return Ok((0.0, 0.0)),
                    Err(e) => return Err(e),
                };
                let d2 = second.norm_sq();
                Ok((w * d1 * d2 / (z * z), fidelity(&second, &target)?))
            })
            .collect::<Result<_>>()?;
        Ok(thresholds
            .iter()
            .map(|&t| samples.iter().filter(|s| s.1 >= t).map(|s| s.0).sum())
            .collect())
    }
}
