//! C ABI over `hubbard-scatter`.
//!
//! Every fallible call returns an [`HsStatus`] and writes results through
//! out-pointers. On failure the message is kept per thread and can be read
//! with [`hs_last_error_message`]. Handles are opaque and must be released
//! with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use hubbard_scatter::bethe::{collision_angle, reflection_phase};
use hubbard_scatter::hamiltonian::{build_hubbard, HubbardParams};
use hubbard_scatter::metrics::{build_target_state, concurrence, fidelity, spin_reduced_dm, SiteCut};
use hubbard_scatter::propagator::{Propagator, DEFAULT_TOL};
use hubbard_scatter::spin::{cascade, equal_spacing_schedule, gate_time, purity, resonance_interaction, SpinTrainState};
use hubbard_scatter::wavepacket::{product_state, relative_velocity, WavepacketSpec};
use hubbard_scatter::{enumerate_sector, Error, ManyBodyState, SectorBasis, SparseOperator, Spin};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericContract = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HsSpin {
    Up = 0,
    Down = 1,
}

impl From<HsSpin> for Spin {
    fn from(s: HsSpin) -> Spin {
        match s {
            HsSpin::Up => Spin::Up,
            HsSpin::Down => Spin::Down,
        }
    }
}

/// Gaussian packet `exp(-α²(j-center)² + i·momentum·j)` carrying one spin.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HsPacket {
    pub center: f64,
    pub alpha: f64,
    pub momentum: f64,
    pub spin: HsSpin,
}

impl From<HsPacket> for WavepacketSpec {
    fn from(p: HsPacket) -> WavepacketSpec {
        WavepacketSpec::new(p.center, p.alpha, p.momentum, p.spin.into())
    }
}

/// Two packets on a Hubbard ring, evolved in place.
pub struct HsCollision {
    basis: Arc<SectorBasis>,
    hamiltonian: SparseOperator,
    state: ManyBodyState,
    left: WavepacketSpec,
    right: WavepacketSpec,
    theta: f64,
    time: f64,
}

/// Spin content of a left and a right train of spin-1/2 carriers.
pub struct HsSpinTrain {
    state: SpinTrainState,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(HsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidSector(_)
            | Error::InvalidParameter { .. }
            | Error::EmptySector(_)
            | Error::Schedule(_)
            | Error::BasisMismatch { .. } => HsStatus::InvalidArgument,
            _ => HsStatus::NumericContract,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            HsStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside hubbard-scatter".into());
            HsStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(HsStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn out<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// Copy the calling thread's last error message, NUL-terminated, into `buf`.
///
/// Returns the number of bytes needed including the terminator; nothing is
/// written when `buf` is null or `len` is smaller than that.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let needed = msg.len() + 1;
        if !buf.is_null() && len >= needed {
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), msg.len());
            *buf.add(msg.len()) = 0;
        }
        needed
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hs_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}

/// Collision angle `θ = 2·atan(U / v_rel)`.
///
/// # Safety
/// `theta` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_collision_angle(interaction: f64, relative_velocity: f64, theta: *mut f64) -> HsStatus {
    guard(|| {
        *out(theta, "theta")? = collision_angle(interaction, relative_velocity)?;
        Ok(())
    })
}

/// Two-body reflection phase for interaction `U` and spectral parameter `λ`.
///
/// # Safety
/// `delta` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_reflection_phase(interaction: f64, lambda: f64, delta: *mut f64) -> HsStatus {
    guard(|| {
        *out(delta, "delta")? = reflection_phase(interaction, lambda)?;
        Ok(())
    })
}

/// Heisenberg pulse area equivalent to one collision.
///
/// # Safety
/// `t` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_gate_time(interaction: f64, relative_velocity: f64, t: *mut f64) -> HsStatus {
    guard(|| {
        *out(t, "t")? = gate_time(interaction, relative_velocity)?;
        Ok(())
    })
}

/// Interaction that fully flips a single spin crossing a train of `n`.
///
/// # Safety
/// `exact` and `approximate` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_resonance_interaction(
    n: usize,
    relative_velocity: f64,
    exact: *mut f64,
    approximate: *mut f64,
) -> HsStatus {
    guard(|| {
        let r = resonance_interaction(n, relative_velocity)?;
        *out(exact, "exact")? = r.exact;
        *out(approximate, "approximate")? = r.approximate;
        Ok(())
    })
}

/// Build two packets of opposite spin on a ring of `sites` sites.
///
/// # Safety
/// `left` and `right` must point to valid packets; `collision` must be valid
/// for writes. The handle written there must be released with
/// [`hs_collision_free`].
#[no_mangle]
pub unsafe extern "C" fn hs_collision_new(
    sites: usize,
    hopping: f64,
    interaction: f64,
    left: *const HsPacket,
    right: *const HsPacket,
    collision: *mut *mut HsCollision,
) -> HsStatus {
    guard(|| {
        let slot = out(collision, "collision")?;
        *slot = std::ptr::null_mut();
        let left: WavepacketSpec = (*left.as_ref().ok_or_else(|| null("left"))?).into();
        let right: WavepacketSpec = (*right.as_ref().ok_or_else(|| null("right"))?).into();
        if left.spin == right.spin {
            return Err(Failure(HsStatus::InvalidArgument, "packets must carry opposite spins".into()));
        }
        let basis = enumerate_sector(sites, 1, 1)?;
        let hamiltonian = build_hubbard(&basis, &HubbardParams::ring(hopping, interaction))?;
        let state = product_state(&[left, right], &basis)?;
        let theta = collision_angle(interaction, relative_velocity(left.momentum, right.momentum, hopping))?;
        *slot = Box::into_raw(Box::new(HsCollision { basis, hamiltonian, state, left, right, theta, time: 0.0 }));
        Ok(())
    })
}

/// # Safety
/// `collision` must be null or a handle from [`hs_collision_new`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn hs_collision_free(collision: *mut HsCollision) {
    if !collision.is_null() {
        drop(Box::from_raw(collision));
    }
}

unsafe fn collision_ref<'a>(c: *const HsCollision) -> Result<&'a HsCollision, Failure> {
    c.as_ref().ok_or_else(|| null("collision"))
}

/// Advance the state by `dt`.
///
/// # Safety
/// `collision` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_collision_evolve(collision: *mut HsCollision, dt: f64) -> HsStatus {
    guard(|| {
        let c = out(collision, "collision")?;
        let next = Propagator::new(&c.hamiltonian, DEFAULT_TOL)?.evolve(&c.state, dt)?;
        c.state = next;
        c.time += dt;
        Ok(())
    })
}

/// Elapsed time, state norm and collision angle of the handle.
///
/// # Safety
/// `collision` must be a live handle; each output must be null or valid for
/// writes. Null outputs are skipped.
#[no_mangle]
pub unsafe extern "C" fn hs_collision_info(
    collision: *const HsCollision,
    time: *mut f64,
    norm: *mut f64,
    theta: *mut f64,
) -> HsStatus {
    guard(|| {
        let c = collision_ref(collision)?;
        if let Some(t) = time.as_mut() {
            *t = c.time;
        }
        if let Some(n) = norm.as_mut() {
            *n = c.state.norm();
        }
        if let Some(th) = theta.as_mut() {
            *th = c.theta;
        }
        Ok(())
    })
}

/// Overlap modulus with the factorized outgoing state whose packets sit at
/// `left_center` (the packet now on the left) and `right_center`.
///
/// # Safety
/// `collision` must be a live handle; `value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_collision_fidelity(
    collision: *const HsCollision,
    left_center: f64,
    right_center: f64,
    value: *mut f64,
) -> HsStatus {
    guard(|| {
        let c = collision_ref(collision)?;
        let target = build_target_state(&c.left, &c.right, c.theta, (left_center, right_center), &c.basis)?;
        *out(value, "value")? = fidelity(&c.state, &target)?;
        Ok(())
    })
}

/// Spin concurrence of the two particles, cut midway between the expected
/// centers `first` and `second`.
///
/// # Safety
/// `collision` must be a live handle; `value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_collision_concurrence(
    collision: *const HsCollision,
    first: f64,
    second: f64,
    value: *mut f64,
) -> HsStatus {
    guard(|| {
        let c = collision_ref(collision)?;
        let pair = spin_reduced_dm(&c.state, SiteCut::around(first, second, c.basis.sites()))?;
        *out(value, "value")? = concurrence(&pair.rho)?;
        Ok(())
    })
}

/// Product state of two spin trains.
///
/// # Safety
/// `left` and `right` must point to `left_len` and `right_len` spins;
/// `train` must be valid for writes. Release with [`hs_spin_train_free`].
#[no_mangle]
pub unsafe extern "C" fn hs_spin_train_new(
    left: *const HsSpin,
    left_len: usize,
    right: *const HsSpin,
    right_len: usize,
    train: *mut *mut HsSpinTrain,
) -> HsStatus {
    guard(|| {
        let slot = out(train, "train")?;
        *slot = std::ptr::null_mut();
        let l: Vec<Spin> = slice(left, left_len, "left")?.iter().map(|&s| s.into()).collect();
        let r: Vec<Spin> = slice(right, right_len, "right")?.iter().map(|&s| s.into()).collect();
        let state = SpinTrainState::product(&l, &r)?;
        *slot = Box::into_raw(Box::new(HsSpinTrain { state }));
        Ok(())
    })
}

/// # Safety
/// `train` must be null or a handle from [`hs_spin_train_new`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn hs_spin_train_free(train: *mut HsSpinTrain) {
    if !train.is_null() {
        drop(Box::from_raw(train));
    }
}

/// Let the trains pass through each other with equal spacing, every
/// collision having angle `theta`.
///
/// # Safety
/// `train` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hs_spin_train_cascade(train: *mut HsSpinTrain, theta: f64) -> HsStatus {
    guard(|| {
        let t = out(train, "train")?;
        let schedule = equal_spacing_schedule(t.state.left_len(), t.state.right_len())?;
        t.state = cascade(&t.state, &schedule, theta)?;
        Ok(())
    })
}

/// Number of slots and amplitudes (`2^slots`).
///
/// # Safety
/// `train` must be a live handle; outputs must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_spin_train_shape(
    train: *const HsSpinTrain,
    slots: *mut usize,
    amplitudes: *mut usize,
) -> HsStatus {
    guard(|| {
        let t = train.as_ref().ok_or_else(|| null("train"))?;
        if let Some(s) = slots.as_mut() {
            *s = t.state.slots();
        }
        if let Some(a) = amplitudes.as_mut() {
            *a = t.state.amplitudes().len();
        }
        Ok(())
    })
}

/// Copy the amplitudes into `re` and `im`, each of length `len`. Index `i`
/// has slot `s` down when bit `slots-1-s` of `i` is set.
///
/// # Safety
/// `train` must be a live handle; `re` and `im` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn hs_spin_train_amplitudes(
    train: *const HsSpinTrain,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> HsStatus {
    guard(|| {
        let t = train.as_ref().ok_or_else(|| null("train"))?;
        let amps = t.state.amplitudes();
        if len < amps.len() {
            return Err(Failure(HsStatus::BufferTooSmall, format!("need {} entries, got {len}", amps.len())));
        }
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        for (i, a) in amps.iter().enumerate() {
            *re.add(i) = a.re;
            *im.add(i) = a.im;
        }
        Ok(())
    })
}

/// Purity of the reduced spin state in `slot`.
///
/// # Safety
/// `train` must be a live handle; `value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_spin_train_purity(train: *const HsSpinTrain, slot: usize, value: *mut f64) -> HsStatus {
    guard(|| {
        let t = train.as_ref().ok_or_else(|| null("train"))?;
        *out(value, "value")? = purity(&t.state.reduced_slot(slot)?)?;
        Ok(())
    })
}
