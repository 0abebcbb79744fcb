//! Resource operators of the photon-subtracted two-mode squeezed state.
//!
//! Subtracting k photons from the first and l from the second squeezed mode
//! before the beamsplitter equals acting with
//!
//! f_{k,l}(η) = 2^{−(k+l)/2} Σ_j c_j η^j â^{k+l−j} (â†)^j
//!
//! on one mode of the two-mode squeezed state, where c_j are the coefficients
//! of (a+b)^k (a−b)^l = Σ_j c_j a^j b^{k+l−j}.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{apply_momentum, apply_position, ladder, WaveFunction};
use crate::special::hermite_coefficients;

/// Largest supported total subtraction k + l.
pub const MAX_ORDER: u32 = 8;

/// Photons subtracted from each squeezed mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubtractionSpec {
    pub k: u32,
    pub l: u32,
}

impl SubtractionSpec {
    pub fn new(k: u32, l: u32) -> Result<Self> {
        if k + l > MAX_ORDER {
            return Err(Error::param(format!("k + l must be at most {MAX_ORDER}, got {}", k + l)));
        }
        Ok(Self { k, l })
    }

    pub fn order(self) -> usize {
        (self.k + self.l) as usize
    }
}

/// Coefficients c_j of a^j in (a+b)^k (a−b)^l, j = 0..=k+l.
pub fn expand_coeffs(spec: SubtractionSpec) -> Vec<i64> {
    let mut c = vec![1i64];
    for factor in std::iter::repeat(1i64).take(spec.k as usize).chain(std::iter::repeat(-1).take(spec.l as usize)) {
        // multiply by (a + factor·b)
        let mut next = vec![0i64; c.len() + 1];
        for (j, &cj) in c.iter().enumerate() {
            next[j + 1] += cj;
            next[j] += factor * cj;
        }
        c = next;
    }
    c
}

/// f_{k,l}(η) in expanded form.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPoly {
    spec: SubtractionSpec,
    eta: f64,
    coeffs: Vec<i64>,
}

impl OperatorPoly {
    pub fn new(spec: SubtractionSpec, eta: f64) -> Result<Self> {
        SubtractionSpec::new(spec.k, spec.l)?;
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::param(format!("η must lie in [0, 1), got {eta}")));
        }
        Ok(Self { spec, eta, coeffs: expand_coeffs(spec) })
    }

    pub fn spec(&self) -> SubtractionSpec {
        self.spec
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Real weights c_j η^j / 2^{(k+l)/2} of â^{k+l−j}(â†)^j.
    fn term_weights(&self) -> Vec<f64> {
        let n = self.spec.order();
        let norm = 2f64.powf(-(n as f64) / 2.0);
        self.coeffs.iter().enumerate().map(|(j, &c)| c as f64 * self.eta.powi(j as i32) * norm).collect()
    }
}

fn null_check(psi: WaveFunction) -> Result<WaveFunction> {
    if psi.is_null() {
        Err(Error::NullState { weight: psi.weight() })
    } else {
        Ok(psi)
    }
}

/// Σ_j w_j (â − s)^{n−j} (â† − s*)^j ψ, creations acting first.
fn apply_displaced(poly: &OperatorPoly, s: C64, psi: &WaveFunction) -> Result<WaveFunction> {
    let n = poly.spec.order();
    let weights = poly.term_weights();
    let mut acc = psi.scaled(C64::new(0.0, 0.0));
    let mut created = psi.clone();
    for (j, &w) in weights.iter().enumerate() {
        if j > 0 {
            created = ladder(&created, -1.0, s.conj());
        }
        if w == 0.0 {
            continue;
        }
        let mut term = created.clone();
        for _ in 0..n - j {
            term = ladder(&term, 1.0, s);
        }
        acc = acc.add_scaled(&term, C64::new(w, 0.0))?;
    }
    null_check(acc)
}

/// f_{k,l}(η)ψ, unnormalized.
pub fn apply_f(poly: &OperatorPoly, psi: &WaveFunction) -> Result<WaveFunction> {
    apply_displaced(poly, C64::new(0.0, 0.0), psi)
}

/// h_{k,l}(η, m_x, m_p)ψ: f with â → â − (m_x + i m_p)/√2, i.e. x̂ → x̂ − m_x, p̂ → p̂ − m_p.
pub fn apply_h(poly: &OperatorPoly, m_x: f64, m_p: f64, psi: &WaveFunction) -> Result<WaveFunction> {
    apply_displaced(poly, C64::new(m_x, m_p) / SQRT_2, psi)
}

/// f_{k,l}(η)ψ by the recursions
/// f_{k,l} = (â f_{k−1,l} + η f_{k−1,l} â†)/√2 and f_{k,l} = (−â f_{k,l−1} + η f_{k,l−1} â†)/√2.
pub fn apply_f_recursive(spec: SubtractionSpec, eta: f64, psi: &WaveFunction) -> Result<WaveFunction> {
    OperatorPoly::new(spec, eta)?;
    null_check(recurse(spec.k, spec.l, eta, psi)?)
}

fn recurse(k: u32, l: u32, eta: f64, psi: &WaveFunction) -> Result<WaveFunction> {
    let zero = C64::new(0.0, 0.0);
    let (sign, k1, l1) = match (k, l) {
        (0, 0) => return Ok(psi.clone()),
        (0, _) => (-1.0, 0, l - 1),
        _ => (1.0, k - 1, l),
    };
    let left = ladder(&recurse(k1, l1, eta, psi)?, 1.0, zero);
    let right = recurse(k1, l1, eta, &ladder(psi, -1.0, zero))?;
    left.scaled(C64::new(sign / SQRT_2, 0.0)).add_scaled(&right, C64::new(eta / SQRT_2, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    Position,
    Momentum,
}

/// Polynomial Σ c_m Q^m in a single quadrature, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitPoly {
    pub quadrature: Quadrature,
    pub coeffs: Vec<C64>,
}

impl LimitPoly {
    pub fn apply(&self, psi: &WaveFunction) -> WaveFunction {
        let op = |w: &WaveFunction| match self.quadrature {
            Quadrature::Position => apply_position(w),
            Quadrature::Momentum => apply_momentum(w),
        };
        // Horner: (((c_n Q + c_{n−1}) Q + …) Q + c_0)ψ
        let mut iter = self.coeffs.iter().rev();
        let top = iter.next().copied().unwrap_or_default();
        let mut acc = psi.scaled(top);
        for &c in iter {
            acc = op(&acc).add_scaled(psi, c).expect("same grid");
        }
        acc
    }
}

/// η → 1 limits g_{k,0} = H_k(ix̂)/(2i)^k and g_{0,l} = H_l(ip̂)/(−2)^l.
pub fn g_limit_poly(spec: SubtractionSpec) -> Result<LimitPoly> {
    let (n, quadrature, denom) = match (spec.k, spec.l) {
        (k, 0) => (k as usize, Quadrature::Position, C64::new(0.0, 2.0)),
        (0, l) => (l as usize, Quadrature::Momentum, C64::new(-2.0, 0.0)),
        _ => return Err(Error::Unsupported("the η → 1 limit is only defined for k = 0 or l = 0".into())),
    };
    let scale = denom.powi(n as i32).inv();
    let coeffs = hermite_coefficients(n)
        .iter()
        .enumerate()
        .map(|(m, &h)| C64::i().powi(m as i32) * h * scale)
        .collect();
    Ok(LimitPoly { quadrature, coeffs })
}

/// Squared norm of f_{k,l}|n⟩ in the number basis.
pub fn number_state_image_norm_sq(poly: &OperatorPoly, n: usize) -> f64 {
    let order = poly.spec.order();
    poly.term_weights()
        .iter()
        .enumerate()
        .map(|(j, &w)| {
            // (â†)^j|n⟩ then â^{order−j}; output index n + 2j − order
            if n + 2 * j < order {
                return 0.0;
            }
            let up: f64 = (n + 1..=n + j).map(|m| m as f64).product();
            let down: f64 = (n + 2 * j - order + 1..=n + j).map(|m| m as f64).product();
            w * w * up * down
        })
        .sum()
}

/// ‖f_{k,l}(η)Ψ_TMSS‖² for the unnormalized two-mode kernel exp(−e^{2r}(x₁−x₂)²/4 − e^{−2r}(x₁+x₂)²/4),
/// whose own squared norm is π: π(1−η²) Σ_n η^{2n} ‖f|n⟩‖².
pub fn resource_norm_sq(poly: &OperatorPoly) -> f64 {
    let eta2 = poly.eta * poly.eta;
    let mut sum = 0.0;
    let mut geo = 1.0;
    for n in 0..1_000_000 {
        let term = geo * number_state_image_norm_sq(poly, n);
        sum += term;
        geo *= eta2;
        let bound = geo * ((n + 1 + poly.spec.order()) as f64).powi(poly.spec.order() as i32 + 1);
        if n > poly.spec.order() && bound < 1e-17 * sum {
            break;
        }
    }
    PI * (1.0 - eta2) * sum
}
