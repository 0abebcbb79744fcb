use proptest::prelude::*;
use wavecraft::fit::{fit_displacement, fit_four_cat, fit_squeezed_cat, FitParams};
use wavecraft::grid::{
    apply_annihilation, apply_creation, apply_momentum, apply_position, displace, fidelity, fourier_rotate,
    inner_product, QuadratureGrid, WaveFunction,
};
use wavecraft::nges::{apply_f, apply_f_recursive, OperatorPoly, SubtractionSpec};
use wavecraft::states::{
    cat_state, coherent, fock_state, fock_superposition, four_cat_state, squeezed_fock, squeezed_vacuum, CatSpec,
    Parity, SqueezeParam,
};
use wavecraft::teleport::{BellOutcome, IterationPlan, TeleportConfig, Teleporter};
use wavecraft::C64;

fn grid() -> QuadratureGrid {
    QuadratureGrid::new(1024, 12.0).unwrap()
}

fn superposition(re: &[f64], im: &[f64]) -> WaveFunction {
    let g = grid();
    let mut acc = fock_state(0, g).unwrap().scaled(C64::new(1.0, 0.0));
    for (n, (a, b)) in re.iter().zip(im).enumerate() {
        acc = acc.add_scaled(&fock_state(n + 1, g).unwrap(), C64::new(*a, *b)).unwrap();
    }
    acc.normalized().unwrap()
}

fn rel_err(a: &WaveFunction, b: &WaveFunction) -> f64 {
    let diff = a.add_scaled(b, C64::new(-1.0, 0.0)).unwrap();
    (diff.norm_sq() / b.norm_sq()).sqrt()
}

/// ±1 for states of definite parity, 0 otherwise; residuals are measured against `scale`.
/// Spectral p̂ leaves ~1e−10 asymmetry per application.
fn parity_of(psi: &WaveFunction, scale: f64) -> i32 {
    let mirror = psi.reflected().unwrap();
    let even = mirror.add_scaled(psi, C64::new(-1.0, 0.0)).unwrap().norm_sq().sqrt() / scale;
    let odd = mirror.add_scaled(psi, C64::new(1.0, 0.0)).unwrap().norm_sq().sqrt() / scale;
    if even < 1e-7 {
        1
    } else if odd < 1e-7 {
        -1
    } else {
        0
    }
}

fn spec(k: u32, l: u32) -> SubtractionSpec {
    SubtractionSpec::new(k, l).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn parseval_and_commutator(re in prop::collection::vec(-1.0f64..1.0, 5), im in prop::collection::vec(-1.0f64..1.0, 5)) {
        let psi = superposition(&re, &im);
        let rotated = fourier_rotate(&psi).unwrap();
        prop_assert!((rotated.norm_sq() - psi.norm_sq()).abs() < 1e-9);
        let xp = apply_position(&apply_momentum(&psi));
        let px = apply_momentum(&apply_position(&psi));
        let c = inner_product(&psi, &xp).unwrap() - inner_product(&psi, &px).unwrap();
        prop_assert!((c - C64::i()).norm() < 1e-6, "{}", c);
    }

    #[test]
    fn ladder_weights(n in 0usize..8) {
        let psi = fock_state(n, grid()).unwrap();
        let up_down = apply_creation(&apply_annihilation(&psi)).norm_sq();
        let down_up = apply_annihilation(&apply_creation(&psi)).norm_sq();
        prop_assert!((apply_creation(&psi).norm_sq() - (n as f64 + 1.0)).abs() < 1e-8);
        prop_assert!((apply_annihilation(&psi).norm_sq() - n as f64).abs() < 1e-8);
        // ‖â†â|n⟩‖² = n², ‖ââ†|n⟩‖² = (n+1)²
        prop_assert!((up_down - (n * n) as f64).abs() < 1e-6 * (1.0 + (n * n) as f64));
        prop_assert!((down_up - ((n + 1) * (n + 1)) as f64).abs() < 1e-6 * ((n + 1) * (n + 1)) as f64);
    }

    #[test]
    fn fidelity_symmetric_bounded_phase_invariant(
        a in prop::collection::vec(-1.0f64..1.0, 4),
        b in prop::collection::vec(-1.0f64..1.0, 4),
        theta in 0.0f64..6.3,
        phi in 0.0f64..6.3,
    ) {
        let (u, v) = (superposition(&a, &b), superposition(&b, &a));
        let f = fidelity(&u, &v).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - fidelity(&v, &u).unwrap()).abs() < 1e-14);
        let g = fidelity(&u.scaled(C64::from_polar(2.0, theta)), &v.scaled(C64::from_polar(0.5, phi))).unwrap();
        prop_assert!((f - g).abs() < 1e-12);
    }

    #[test]
    fn constructors_are_normalized(r in -0.5f64..1.0, n in 0usize..5, alpha in 0.2f64..2.0, beta in 0.5f64..2.0, m in 0u8..4, x0 in -3.0f64..3.0, p0 in -3.0f64..3.0) {
        let g = grid();
        let sq = SqueezeParam::new(r).unwrap();
        let states = [
            squeezed_vacuum(sq, g).unwrap(),
            squeezed_fock(n, sq, g).unwrap(),
            coherent(C64::new(x0, p0), g).unwrap(),
            cat_state(CatSpec { alpha, parity: Parity::Plus, squeeze: sq }, g).unwrap(),
            cat_state(CatSpec { alpha, parity: Parity::Minus, squeeze: sq }, g).unwrap(),
            four_cat_state(beta, m, g).unwrap(),
        ];
        for psi in &states {
            prop_assert!((psi.norm_sq() - 1.0).abs() < 1e-9);
        }
        prop_assert_eq!(parity_of(&states[3], 1.0), 1);
        prop_assert_eq!(parity_of(&states[4], 1.0), -1);
    }

    #[test]
    fn unit_superposition_is_a_fock_state(n in 0usize..7) {
        let mut e = vec![0.0; n + 1];
        e[n] = 1.0;
        let g = grid();
        prop_assert!(fidelity(&fock_superposition(&e, g).unwrap(), &fock_state(n, g).unwrap()).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn expansion_matches_recursion(
        k in 0u32..=4, l in 0u32..=4,
        eta in 0.05f64..0.98,
        re in prop::collection::vec(-1.0f64..1.0, 4),
        im in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        prop_assume!(k + l <= 4);
        let psi = superposition(&re, &im);
        let a = apply_f(&OperatorPoly::new(spec(k, l), eta).unwrap(), &psi).unwrap();
        let b = apply_f_recursive(spec(k, l), eta, &psi).unwrap();
        prop_assert!(rel_err(&a, &b) < 1e-8);
    }

    #[test]
    fn parity_flips_iff_order_is_odd(k in 0u32..=3, l in 0u32..=3, eta in 0.1f64..0.95, n in 0usize..4, r in -0.8f64..0.8) {
        prop_assume!(k + l <= 4);
        let psi = squeezed_fock(n, SqueezeParam::new(r).unwrap(), grid()).unwrap();
        let out = apply_f(&OperatorPoly::new(spec(k, l), eta).unwrap(), &psi).unwrap();
        // the residual scale is the unit input; outputs of norm > 1e−3 leave a clear margin
        prop_assume!(out.norm_sq() > 1e-6);
        let before = parity_of(&psi, 1.0);
        let expect = if (k + l) % 2 == 1 { -before } else { before };
        prop_assert_eq!(parity_of(&out, 1.0), expect);
    }

    #[test]
    fn heralding_weights_ignore_global_phase(theta in 0.0f64..6.3, mx in -1.5f64..1.5, mp in -1.5f64..1.5) {
        let g = grid();
        let t = Teleporter::new(TeleportConfig::new(1.0, spec(1, 0), g).unwrap()).unwrap();
        let psi = squeezed_fock(1, SqueezeParam::new(0.4).unwrap(), g).unwrap();
        let m = BellOutcome::new(mx, mp);
        let a = t.step(&psi, m).unwrap().norm_sq();
        let b = t.step(&psi.scaled(C64::from_polar(1.0, theta)), m).unwrap().norm_sq();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn near_ideal_output_changes_sign_at_each_outcome(
        m in prop::collection::vec(-2.5f64..2.5, 1..=3),
    ) {
        let mut m = m;
        m.sort_by(f64::total_cmp);
        // kernel blurring at finite η moves zeros closer than ~0.5 apart by about dx
        prop_assume!(m.windows(2).all(|w| w[1] - w[0] > 0.8));
        let g = grid();
        // r_tele = 3 is the largest allowed; η = 0.995 moves zeros by far less than dx
        let t = Teleporter::new(TeleportConfig::new(3.0, spec(1, 0), g).unwrap()).unwrap();
        let psi = squeezed_vacuum(SqueezeParam::new(-1.0).unwrap(), g).unwrap();
        let plan = IterationPlan::from_vectors(&m, &[], &[]).unwrap();
        let out = t.run_plan(&psi, &plan).unwrap().state;
        // ∏(x − m_i)·ψ_in up to a global phase
        let amps = out.amplitudes();
        let peak = amps.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        let phase = peak.conj() / peak.norm();
        let xs = g.to_vec();
        let real: Vec<(f64, f64)> = xs.iter().zip(amps).filter(|(x, _)| x.abs() < 5.0).map(|(x, a)| (*x, (a * phase).re)).collect();
        let crossings: Vec<f64> = real
            .windows(2)
            .filter(|w| w[0].1 * w[1].1 < 0.0)
            .map(|w| w[0].0 - w[0].1 * (w[1].0 - w[0].0) / (w[1].1 - w[0].1))
            .collect();
        prop_assert_eq!(crossings.len(), m.len(), "{:?} vs {:?}", crossings, m);
        for (c, mi) in crossings.iter().zip(&m) {
            prop_assert!((c - mi).abs() <= g.spacing(), "{} vs {}", c, mi);
        }
    }

    #[test]
    fn cat_sequence_peaks_at_root_n_times_input_width(r in 0.3f64..0.8, n in 1usize..=4) {
        // each r_tele = 3 step adds ≈ e^{−6}x² to the Gaussian exponent, which pulls the peak
        // inward by more than 10% of e^r once r ≳ 0.85 at n = 4
        let g = grid();
        let t = Teleporter::new(TeleportConfig::new(3.0, spec(1, 0), g).unwrap()).unwrap();
        let psi = squeezed_vacuum(SqueezeParam::new(-r).unwrap(), g).unwrap();
        let out = t.run_plan(&psi, &IterationPlan::repeated(n, BellOutcome::default()).unwrap()).unwrap().state;
        let xs = g.to_vec();
        let (x_peak, _) = xs.iter().zip(out.amplitudes()).filter(|(x, _)| **x > 0.0)
            .map(|(x, a)| (*x, a.norm())).max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        let expect = (n as f64).sqrt() * r.exp();
        prop_assert!((x_peak - expect).abs() < 0.1 * r.exp(), "{} vs {}", x_peak, expect);
    }

    #[test]
    fn fits_never_lose_to_their_scan(alpha in 0.5f64..2.0, xi in -0.5f64..0.8, beta in 0.8f64..2.0, m in 0u8..4, noise in 0.0f64..0.3) {
        let g = grid();
        let base = cat_state(CatSpec { alpha, parity: Parity::Plus, squeeze: SqueezeParam::new(xi).unwrap() }, g).unwrap();
        // perturb within the even sector so the parity stays definite
        let psi = base.add_scaled(&fock_state(2, g).unwrap(), C64::new(noise, 0.0)).unwrap().normalized().unwrap();
        let fit = fit_squeezed_cat(&psi).unwrap();
        prop_assert!(fit.fidelity >= fit.scan_fidelity);
        let four = fit_four_cat(&four_cat_state(beta, m, g).unwrap()).unwrap();
        prop_assert!(four.fidelity >= four.scan_fidelity);
        prop_assert!(four.fidelity > 1.0 - 1e-6);
    }

    #[test]
    fn displacement_fit_inverts_the_shift(a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let g = grid();
        let psi = squeezed_fock(1, SqueezeParam::new(0.3).unwrap(), g).unwrap();
        let fit = fit_displacement(&displace(&psi, a, b), &psi).unwrap();
        let FitParams::Displacement { dx, dp } = fit.params else { panic!("unexpected family") };
        prop_assert!((dx + a).abs() < 0.005 && (dp + b).abs() < 0.005, "({}, {}) for ({}, {})", dx, dp, a, b);
        prop_assert!(fit.fidelity >= fit.scan_fidelity);
    }
}
