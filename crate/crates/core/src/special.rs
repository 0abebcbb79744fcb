//! Hermite polynomials, Hermite functions and the Airy function Ai.

use std::f64::consts::PI;

/// Highest Hermite order supported by the recurrences.
pub const MAX_HERMITE_ORDER: usize = 64;

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    match n {
        0 => h0,
        1 => h1,
        _ => {
            for k in 1..n {
                let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
    }
}

/// Monomial coefficients of H_n, lowest degree first.
pub fn hermite_coefficients(n: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 2.0];
    for k in 1..n {
        let mut next = vec![0.0; k + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= 2.0 * k as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized Hermite function π^{-1/4}(2ⁿn!)^{-1/2} H_n(x) e^{−x²/2}.
///
/// Uses the recurrence on the normalized functions, which stays finite where
/// H_n(x) and e^{−x²/2} separately over- or underflow.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut f0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return f0;
    }
    let mut f1 = 2f64.sqrt() * x * f0;
    for k in 1..n {
        let kf = k as f64;
        let f2 = (2.0 / (kf + 1.0)).sqrt() * x * f1 - (kf / (kf + 1.0)).sqrt() * f0;
        f0 = f1;
        f1 = f2;
    }
    f1
}

const AI0: f64 = 0.355_028_053_887_817_239_26;
const AIP0: f64 = -0.258_819_403_792_806_798_41;

/// Boundary between the power series and the outer expansions.
const SERIES_LIMIT: f64 = 5.0;
/// Beyond this, the oscillatory asymptotic expansion is accurate to round-off.
const OSCILLATORY_ASYMPTOTIC: f64 = 9.0;

/// Airy function Ai(z) for real z.
///
/// Power series for |z| ≤ 5, asymptotic expansion for z > 5 and z ≤ −9, and
/// Taylor continuation of the Airy equation from z = −5 in between.
pub fn airy_ai(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z.abs() <= SERIES_LIMIT {
        maclaurin(z).0
    } else if z > 0.0 {
        asymptotic_decaying(z)
    } else if z <= -OSCILLATORY_ASYMPTOTIC {
        asymptotic_oscillating(-z)
    } else {
        let (a, ap) = maclaurin(-SERIES_LIMIT);
        continue_airy(-SERIES_LIMIT, a, ap, z)
    }
}

/// (Ai(z), Ai'(z)) from the Maclaurin series.
fn maclaurin(z: f64) -> (f64, f64) {
    let z3 = z * z * z;
    let (mut f, mut g) = (1.0, z);
    let (mut tf, mut tg) = (1.0, z);
    let (mut fp, mut gp) = (0.0, 1.0);
    let (mut uf, mut ug) = (0.5 * z * z, 1.0);
    fp += uf;
    for k in 1..200 {
        let kf = k as f64;
        tf *= z3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= z3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        f += tf;
        g += tg;
        if k >= 2 {
            uf *= z3 / ((3.0 * kf - 1.0) * (3.0 * kf - 3.0));
            fp += uf;
        }
        ug *= z3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        gp += ug;
        if tf.abs() + tg.abs() + uf.abs() + ug.abs() < 1e-18 * (f.abs() + g.abs() + 1.0) {
            break;
        }
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

/// Steps y'' = z·y from (z0, y, y') to `target` with local Taylor series.
fn continue_airy(z0: f64, mut y: f64, mut yp: f64, target: f64) -> f64 {
    let mut z = z0;
    let max_step = 0.5;
    while (target - z).abs() > 0.0 {
        let h = (target - z).clamp(-max_step, max_step);
        // a_{n+2} = (z a_n + a_{n-1}) / ((n+2)(n+1))
        let (mut am1, mut a0, mut a1) = (0.0, y, yp);
        let (mut val, mut der) = (a0 + a1 * h, a1);
        let mut hp = h; // h^(n+1) for the value series, h^n for the derivative
        for n in 0..80 {
            let nf = n as f64;
            let a2 = (z * a0 + am1) / ((nf + 2.0) * (nf + 1.0));
            let dv = a2 * hp * h;
            let dd = (nf + 2.0) * a2 * hp;
            val += dv;
            der += dd;
            am1 = a0;
            a0 = a1;
            a1 = a2;
            hp *= h;
            if dv.abs() < 1e-20 && dd.abs() < 1e-20 && n > 4 {
                break;
            }
        }
        y = val;
        yp = der;
        z += h;
        if (target - z).abs() < 1e-15 {
            break;
        }
    }
    y
}

fn asymptotic_coefficients(count: usize) -> Vec<f64> {
    let mut u = Vec::with_capacity(count);
    u.push(1.0);
    for k in 1..count {
        let kf = k as f64;
        let prev = u[k - 1];
        u.push(
            prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf),
        );
    }
    u
}

fn asymptotic_decaying(z: f64) -> f64 {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let u = asymptotic_coefficients(40);
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for (k, uk) in u.iter().enumerate() {
        let term = uk / zeta.powi(k as i32);
        if term > last {
            break;
        }
        sum += if k % 2 == 0 { term } else { -term };
        last = term;
        if term < 1e-17 {
            break;
        }
    }
    (-zeta).exp() / (2.0 * PI.sqrt() * z.powf(0.25)) * sum
}

/// Ai(−z) for z > 0.
fn asymptotic_oscillating(z: f64) -> f64 {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let u = asymptotic_coefficients(60);
    let (mut p, mut q) = (0.0, 0.0);
    let mut last = f64::INFINITY;
    for (k, uk) in u.iter().enumerate() {
        let term = uk / zeta.powi(k as i32);
        if term > last {
            break;
        }
        last = term;
        // even k feed P with sign (−1)^{k/2}; odd k feed Q with sign (−1)^{(k−1)/2}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term < 1e-17 {
            break;
        }
    }
    let phase = zeta + PI / 4.0;
    (phase.sin() * p - phase.cos() * q) / (PI.sqrt() * z.powf(0.25))
}
