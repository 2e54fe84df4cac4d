//! C interface to `nnvqe`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_load`
//! style functions and released with the matching `*_free`. Every fallible
//! call returns an [`NnvqeStatus`]; on failure the message is kept per thread
//! and can be copied out with [`nnvqe_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use nnvqe::ansatz::{build_hea, build_mera, Circuit};
use nnvqe::encoder::{Encoder, EncoderSpec};
use nnvqe::gradients::{adjoint_gradient, energy};
use nnvqe::hamiltonian::{build_xxz, phase_boundary_hc, phase_boundary_hs, PauliSum};
use nnvqe::{experiment, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NnvqeStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Structural = 3,
    Usage = 4,
    Domain = 5,
    Resource = 6,
    Numerical = 7,
    Consistency = 8,
    Parse = 9,
    Io = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NnvqeEncoderKind {
    Mlp = 0,
    Affine = 1,
    Direct = 2,
}

/// XXZ Hamiltonian (or any Pauli sum) on a fixed register.
pub struct NnvqeHamiltonian(PauliSum);

pub struct NnvqeCircuit(Circuit);

pub struct NnvqeEncoder(Encoder);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

fn status_of(err: &Error) -> NnvqeStatus {
    match err {
        Error::Config(_) => NnvqeStatus::Config,
        Error::Structural(_) => NnvqeStatus::Structural,
        Error::Usage(_) => NnvqeStatus::Usage,
        Error::Domain(_) => NnvqeStatus::Domain,
        Error::Resource(_) => NnvqeStatus::Resource,
        Error::Numerical { .. } => NnvqeStatus::Numerical,
        Error::Consistency(_) => NnvqeStatus::Consistency,
        Error::Parse(_) => NnvqeStatus::Parse,
        Error::Io(_) | Error::Csv(_) => NnvqeStatus::Io,
    }
}

struct Failure(NnvqeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(NnvqeStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NnvqeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NnvqeStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside nnvqe".to_string());
            NnvqeStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn to_path(p: *const c_char, what: &str) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(NnvqeStatus::Usage, format!("{what} is not UTF-8")))?;
    Ok(PathBuf::from(s))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn copy_into(src: &[f64], dst: &mut [f64]) -> Result<(), Failure> {
    if dst.len() < src.len() {
        return Err(Failure(
            NnvqeStatus::BufferTooSmall,
            format!("output buffer holds {} values, {} needed", dst.len(), src.len()),
        ));
    }
    dst[..src.len()].copy_from_slice(src);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nnvqe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message (NUL-terminated,
/// truncated to `len`) into `buf` and returns its full length in bytes,
/// excluding the terminator. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Periodic XXZ chain `Σ XX + YY + Δ ZZ + λ Σ Z` on `n_qubits` sites.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_hamiltonian_xxz(n_qubits: usize, delta: f64, lambda: f64, out: *mut *mut NnvqeHamiltonian) -> NnvqeStatus {
    guard(|| store(out, NnvqeHamiltonian(build_xxz(n_qubits, delta, lambda)?)))
}

/// # Safety
/// `h` must be null or a handle from `nnvqe_hamiltonian_xxz` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_hamiltonian_free(h: *mut NnvqeHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Lowest eigenvalue by exact diagonalization.
///
/// # Safety
/// `h` must be a live handle and `energy_out` writable.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_exact_ground_energy(h: *const NnvqeHamiltonian, energy_out: *mut f64) -> NnvqeStatus {
    guard(|| {
        let h = get(h, "hamiltonian")?;
        let out = energy_out.as_mut().ok_or_else(|| null("energy_out"))?;
        *out = h.0.exact_ground_state()?.energy;
        Ok(())
    })
}

/// Ladder hardware-efficient ansatz with `3n + 5n·depth` parameters.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_circuit_hea(n_qubits: usize, depth: usize, out: *mut *mut NnvqeCircuit) -> NnvqeStatus {
    guard(|| store(out, NnvqeCircuit(build_hea(n_qubits, depth)?)))
}

/// MERA-style circuit; `n_qubits` must be a power of two.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_circuit_mera(n_qubits: usize, depth: usize, out: *mut *mut NnvqeCircuit) -> NnvqeStatus {
    guard(|| store(out, NnvqeCircuit(build_mera(n_qubits, depth)?)))
}

/// # Safety
/// `c` must be null or a live circuit handle.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_circuit_free(c: *mut NnvqeCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of rotation angles; 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live circuit handle.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_circuit_n_params(c: *const NnvqeCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.0.n_params())
}

/// `⟨ψ(θ)|H|ψ(θ)⟩`.
///
/// # Safety
/// Handles must be live, `theta` must hold `theta_len` values and
/// `energy_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_energy(
    c: *const NnvqeCircuit,
    h: *const NnvqeHamiltonian,
    theta: *const f64,
    theta_len: usize,
    energy_out: *mut f64,
) -> NnvqeStatus {
    guard(|| {
        let (c, h) = (get(c, "circuit")?, get(h, "hamiltonian")?);
        let theta = slice(theta, theta_len, "theta")?;
        let out = energy_out.as_mut().ok_or_else(|| null("energy_out"))?;
        *out = energy(&c.0, theta, &h.0)?;
        Ok(())
    })
}

/// Energy and its gradient with respect to every angle.
///
/// # Safety
/// Handles must be live, `theta` must hold `theta_len` values, `grad_out`
/// must have room for `grad_len` values and `energy_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_gradient(
    c: *const NnvqeCircuit,
    h: *const NnvqeHamiltonian,
    theta: *const f64,
    theta_len: usize,
    energy_out: *mut f64,
    grad_out: *mut f64,
    grad_len: usize,
) -> NnvqeStatus {
    guard(|| {
        let (c, h) = (get(c, "circuit")?, get(h, "hamiltonian")?);
        let theta = slice(theta, theta_len, "theta")?;
        let out = energy_out.as_mut().ok_or_else(|| null("energy_out"))?;
        let g = adjoint_gradient(&c.0, theta, &h.0)?;
        copy_into(&g.d_theta, slice_mut(grad_out, grad_len, "grad_out")?)?;
        *out = g.energy;
        Ok(())
    })
}

/// Freshly initialized encoder. `hidden_dim` and `dropout` are ignored
/// for the affine and direct kinds.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_encoder_new(
    kind: NnvqeEncoderKind,
    input_dim: usize,
    hidden_dim: usize,
    output_dim: usize,
    dropout: f64,
    seed: u64,
    out: *mut *mut NnvqeEncoder,
) -> NnvqeStatus {
    guard(|| {
        let spec = match kind {
            NnvqeEncoderKind::Mlp => EncoderSpec::mlp(input_dim, hidden_dim, output_dim, dropout, seed),
            NnvqeEncoderKind::Affine => EncoderSpec::affine(input_dim, output_dim, seed),
            NnvqeEncoderKind::Direct => EncoderSpec::direct(input_dim, output_dim, seed),
        };
        store(out, NnvqeEncoder(Encoder::init(spec)?))
    })
}

/// Reads a checkpoint written by `nnvqe_encoder_save` or the CLI.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_encoder_load(path: *const c_char, out: *mut *mut NnvqeEncoder) -> NnvqeStatus {
    guard(|| store(out, NnvqeEncoder(Encoder::load(to_path(path, "path")?)?)))
}

/// # Safety
/// `e` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_encoder_save(e: *const NnvqeEncoder, path: *const c_char) -> NnvqeStatus {
    guard(|| Ok(get(e, "encoder")?.0.save(to_path(path, "path")?)?))
}

/// # Safety
/// `e` must be null or a live encoder handle.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_encoder_free(e: *mut NnvqeEncoder) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Length of the encoder's output; 0 for a null handle.
///
/// # Safety
/// `e` must be null or a live encoder handle.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_encoder_output_dim(e: *const NnvqeEncoder) -> usize {
    e.as_ref().map_or(0, |e| e.0.spec().output_dim)
}

/// Eval-mode circuit angles for the Hamiltonian parameters `lambda`.
///
/// # Safety
/// `e` must be a live handle, `lambda` must hold `lambda_len` values and
/// `theta_out` must have room for `theta_len` values.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_encoder_predict(
    e: *const NnvqeEncoder,
    lambda: *const f64,
    lambda_len: usize,
    theta_out: *mut f64,
    theta_len: usize,
) -> NnvqeStatus {
    guard(|| {
        let theta = get(e, "encoder")?.0.predict(slice(lambda, lambda_len, "lambda")?)?;
        copy_into(&theta, slice_mut(theta_out, theta_len, "theta_out")?)
    })
}

/// Saturation-field boundary `1 + Δ`.
#[no_mangle]
pub extern "C" fn nnvqe_phase_boundary_hs(delta: f64) -> f64 {
    phase_boundary_hs(delta)
}

/// Lower critical field for `Δ ≥ 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_phase_boundary_hc(delta: f64, out: *mut f64) -> NnvqeStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = phase_boundary_hc(delta)?;
        Ok(())
    })
}

/// Runs an experiment config file. `out_dir` may be null to use the
/// config's own output location.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out_dir` must be null or
/// NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn nnvqe_run_config(config_path: *const c_char, out_dir: *const c_char) -> NnvqeStatus {
    guard(|| {
        let config = experiment::load_config(to_path(config_path, "config_path")?)?;
        let cli = if out_dir.is_null() { None } else { Some(to_path(out_dir, "out_dir")?) };
        let dir = experiment::resolve_out_dir(&config, cli.as_deref());
        experiment::run_experiment(&config, &dir)?;
        Ok(())
    })
}

/// Exit-status convention of the command-line tool for a status code.
#[no_mangle]
pub extern "C" fn nnvqe_exit_code(status: NnvqeStatus) -> i32 {
    match status {
        NnvqeStatus::Ok => 0,
        NnvqeStatus::Config | NnvqeStatus::Parse => 2,
        NnvqeStatus::Numerical => 3,
        _ => 1,
    }
}
