//! C ABI over the wavecraft engine.
//!
//! Every function returns a [`WcStatus`]; results come back through out
//! pointers. On failure the message is kept per thread and read with
//! [`wc_last_error_message`]. Handles are opaque and freed by their `_free`
//! function; freeing null is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wavecraft::experiment::{run, ExperimentConfig, RunError};
use wavecraft::nges::SubtractionSpec;
use wavecraft::states::StateSpec;
use wavecraft::teleport::{BellOutcome, TeleportConfig, Teleporter};
use wavecraft::{Error, QuadratureGrid, WaveFunction};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    NullState = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Uniform quadrature grid.
pub struct WcGrid(QuadratureGrid);

/// Wave function on a grid, possibly unnormalized.
pub struct WcWave(WaveFunction);

/// Teleportation step with a fixed resource and grid.
pub struct WcTeleporter(Teleporter);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn engine_status(e: &Error) -> WcStatus {
    match e {
        Error::NullState { .. } | Error::NullStep { .. } => WcStatus::NullState,
        e if e.is_numerical() => WcStatus::Numerical,
        _ => WcStatus::InvalidArgument,
    }
}

struct Failure(WcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(engine_status(&e), e.to_string())
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        let status = match &e {
            RunError::Engine(inner) => engine_status(inner),
            RunError::Config(_) | RunError::Io(_) => WcStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(WcStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> WcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => WcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside wavecraft");
            WcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn need<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    Ok(())
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    need(out)?;
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(WcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated).
/// Returns the message length without the terminator, or 0 when there is none;
/// a result ≥ `len` means the message was truncated.
#[no_mangle]
pub unsafe extern "C" fn wc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn wc_grid_new(n_points: usize, extent: f64, out: *mut *mut WcGrid) -> WcStatus {
    guard(|| {
        need(out)?;
        put(out, WcGrid(QuadratureGrid::new(n_points, extent)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn wc_grid_free(grid: *mut WcGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

#[no_mangle]
pub unsafe extern "C" fn wc_grid_len(grid: *const WcGrid, out: *mut usize) -> WcStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = g.0.len();
        Ok(())
    })
}

/// Builds a state from a JSON descriptor such as `{"kind":"squeezed","r":-1.0}`.
#[no_mangle]
pub unsafe extern "C" fn wc_state_from_json(grid: *const WcGrid, json: *const c_char, out: *mut *mut WcWave) -> WcStatus {
    guard(|| {
        need(out)?;
        let g = deref(grid, "grid")?;
        let spec: StateSpec = serde_json::from_str(text(json, "descriptor")?)
            .map_err(|e| Failure(WcStatus::InvalidArgument, format!("bad state descriptor: {e}")))?;
        put(out, WcWave(spec.build(g.0)?))
    })
}

/// Wraps caller-supplied amplitudes (separate real and imaginary arrays of the grid length).
#[no_mangle]
pub unsafe extern "C" fn wc_wave_from_amplitudes(
    grid: *const WcGrid,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut WcWave,
) -> WcStatus {
    guard(|| {
        need(out)?;
        let g = deref(grid, "grid")?;
        if re.is_null() || im.is_null() {
            return Err(null("amplitude array"));
        }
        let re = std::slice::from_raw_parts(re, len);
        let im = std::slice::from_raw_parts(im, len);
        let amps = re.iter().zip(im).map(|(&a, &b)| wavecraft::C64::new(a, b)).collect();
        put(out, WcWave(WaveFunction::from_amplitudes(g.0, amps)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn wc_wave_free(wave: *mut WcWave) {
    if !wave.is_null() {
        drop(Box::from_raw(wave));
    }
}

/// Squared norm Σ|ψ_i|²·dx.
#[no_mangle]
pub unsafe extern "C" fn wc_wave_norm_sq(wave: *const WcWave, out: *mut f64) -> WcStatus {
    guard(|| {
        let w = deref(wave, "wave")?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = w.0.norm_sq();
        Ok(())
    })
}

/// Copies amplitudes into `re`/`im`, each of capacity `len` ≥ grid length.
#[no_mangle]
pub unsafe extern "C" fn wc_wave_amplitudes(wave: *const WcWave, re: *mut f64, im: *mut f64, len: usize) -> WcStatus {
    guard(|| {
        let w = deref(wave, "wave")?;
        let amps = w.0.amplitudes();
        if len < amps.len() {
            return Err(Failure(WcStatus::BufferTooSmall, format!("need {} slots, got {len}", amps.len())));
        }
        if re.is_null() || im.is_null() {
            return Err(null("amplitude buffer"));
        }
        for (i, a) in amps.iter().enumerate() {
            *re.add(i) = a.re;
            *im.add(i) = a.im;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn wc_fidelity(a: *const WcWave, b: *const WcWave, out: *mut f64) -> WcStatus {
    guard(|| {
        let f = wavecraft::grid::fidelity(&deref(a, "wave a")?.0, &deref(b, "wave b")?.0)?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = f;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn wc_teleporter_new(
    grid: *const WcGrid,
    r_tele: f64,
    k: u32,
    l: u32,
    out: *mut *mut WcTeleporter,
) -> WcStatus {
    guard(|| {
        need(out)?;
        let g = deref(grid, "grid")?;
        let config = TeleportConfig::new(r_tele, SubtractionSpec::new(k, l)?, g.0)?;
        put(out, WcTeleporter(Teleporter::new(config)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn wc_teleporter_free(t: *mut WcTeleporter) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// One conditional step at outcome (m_x, m_p). The output is unnormalized; its
/// squared norm is the heralding weight.
#[no_mangle]
pub unsafe extern "C" fn wc_teleport_step(
    t: *const WcTeleporter,
    input: *const WcWave,
    m_x: f64,
    m_p: f64,
    out: *mut *mut WcWave,
) -> WcStatus {
    guard(|| {
        need(out)?;
        let t = deref(t, "teleporter")?;
        let psi = deref(input, "input wave")?;
        put(out, WcWave(t.0.step(&psi.0, BellOutcome::new(m_x, m_p))?))
    })
}

/// Runs a TOML experiment config without writing files and returns the run
/// summary as a JSON string, released with [`wc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn wc_run_experiment(config_toml: *const c_char, summary_json: *mut *mut c_char) -> WcStatus {
    guard(|| {
        if summary_json.is_null() {
            return Err(null("output pointer"));
        }
        let config = ExperimentConfig::from_toml(text(config_toml, "config")?)?;
        let output = run(&config)?;
        let json = serde_json::to_string(&output.summary).expect("summary serializes");
        *summary_json = CString::new(json).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn wc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
