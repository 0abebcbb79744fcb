use std::ffi::{c_char, CStr, CString};
use std::ptr;

use wavecraft_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe { wc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn grid(n: usize, extent: f64) -> *mut WcGrid {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { wc_grid_new(n, extent, &mut g) }, WcStatus::Ok);
    g
}

fn state(g: *const WcGrid, json: &str) -> *mut WcWave {
    let json = CString::new(json).unwrap();
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { wc_state_from_json(g, json.as_ptr(), &mut w) }, WcStatus::Ok, "{}", last_error());
    w
}

#[test]
fn vacuum_passes_plain_teleportation_unchanged() {
    let g = grid(512, 12.0);
    let mut len = 0;
    assert_eq!(unsafe { wc_grid_len(g, &mut len) }, WcStatus::Ok);
    assert_eq!(len, 512);
    let vac = state(g, r#"{"kind":"vacuum"}"#);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { wc_teleporter_new(g, 1.0, 0, 0, &mut t) }, WcStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { wc_teleport_step(t, vac, 0.0, 0.0, &mut out) }, WcStatus::Ok);
    let mut f = 0.0;
    assert_eq!(unsafe { wc_fidelity(out, vac, &mut f) }, WcStatus::Ok);
    assert!((f - 1.0).abs() < 1e-10, "{f}");
    let mut w = 0.0;
    assert_eq!(unsafe { wc_wave_norm_sq(out, &mut w) }, WcStatus::Ok);
    assert!(w > 0.0);
    unsafe {
        wc_wave_free(out);
        wc_teleporter_free(t);
        wc_wave_free(vac);
        wc_grid_free(g);
    }
}

#[test]
fn amplitudes_round_trip() {
    let g = grid(64, 6.0);
    let w = state(g, r#"{"kind":"fock","n":1}"#);
    let (mut re, mut im) = (vec![0.0; 64], vec![0.0; 64]);
    assert_eq!(unsafe { wc_wave_amplitudes(w, re.as_mut_ptr(), im.as_mut_ptr(), 63) }, WcStatus::BufferTooSmall);
    assert_eq!(unsafe { wc_wave_amplitudes(w, re.as_mut_ptr(), im.as_mut_ptr(), 64) }, WcStatus::Ok);
    let mut copy = ptr::null_mut();
    assert_eq!(unsafe { wc_wave_from_amplitudes(g, re.as_ptr(), im.as_ptr(), 64, &mut copy) }, WcStatus::Ok);
    let mut f = 0.0;
    assert_eq!(unsafe { wc_fidelity(w, copy, &mut f) }, WcStatus::Ok);
    assert!((f - 1.0).abs() < 1e-14);
    assert_eq!(unsafe { wc_wave_from_amplitudes(g, re.as_ptr(), im.as_ptr(), 10, &mut copy) }, WcStatus::InvalidArgument);
    unsafe {
        wc_wave_free(copy);
        wc_wave_free(w);
        wc_grid_free(g);
    }
}

#[test]
fn errors_map_to_codes_and_messages() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { wc_grid_new(1, 1.0, &mut g) }, WcStatus::InvalidArgument);
    assert!(g.is_null());
    assert!(last_error().contains("grid"), "{}", last_error());
    assert_eq!(unsafe { wc_grid_new(16, 1.0, ptr::null_mut()) }, WcStatus::NullPointer);
    let mut f = 0.0;
    assert_eq!(unsafe { wc_fidelity(ptr::null(), ptr::null(), &mut f) }, WcStatus::NullPointer);

    let g = grid(256, 10.0);
    let bad = CString::new(r#"{"kind":"unicorn"}"#).unwrap();
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { wc_state_from_json(g, bad.as_ptr(), &mut w) }, WcStatus::InvalidArgument);

    // f_{1,1} at tiny η is nearly −â²/2, which kills the vacuum
    let vac = state(g, r#"{"kind":"vacuum"}"#);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { wc_teleporter_new(g, 1e-9, 1, 1, &mut t) }, WcStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { wc_teleport_step(t, vac, 0.0, 0.0, &mut out) }, WcStatus::NullState);
    assert!(out.is_null());

    // truncation reports the full length
    let n = unsafe { wc_last_error_message(ptr::null_mut(), 0) };
    let mut tiny = [0 as c_char; 4];
    assert_eq!(unsafe { wc_last_error_message(tiny.as_mut_ptr(), 4) }, n);
    assert_eq!(unsafe { CStr::from_ptr(tiny.as_ptr()) }.to_bytes().len(), 3);
    unsafe {
        wc_teleporter_free(t);
        wc_wave_free(vac);
        wc_grid_free(g);
        wc_grid_free(ptr::null_mut());
    }
}

#[test]
fn experiment_summary_as_json() {
    let cfg = CString::new(
        "kind = \"fock\"\n[grid]\nn_points = 512\nextent = 12.0\n[plan]\nm_x = [-0.63]\n[target]\nkind = \"fock-superposition\"\ncoeffs = [1.0, 1.0]\n[wigner]\nenabled = false\n",
    )
    .unwrap();
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { wc_run_experiment(cfg.as_ptr(), &mut json) }, WcStatus::Ok, "{}", last_error());
    let summary: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(json) }.to_str().unwrap()).unwrap();
    unsafe { wc_string_free(json) };
    let f = summary["fidelity"].as_f64().unwrap();
    assert!((f - 0.99).abs() < 0.01, "{f}");

    let broken = CString::new("kind = 3").unwrap();
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { wc_run_experiment(broken.as_ptr(), &mut json) }, WcStatus::InvalidArgument);
    assert!(json.is_null());
}
