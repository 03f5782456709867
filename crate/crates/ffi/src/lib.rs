//! C ABI over `kacbath`.
//!
//! Every fallible function returns a [`KacStatus`]; on failure the message is
//! kept per thread and can be read with [`kac_last_error_message`]. Objects
//! are opaque handles released with their `_free` function. Panics are caught
//! at the boundary and reported as `KAC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::slice;

use kacbath::fourier::{evolve, marginal_shape, moments_from_grid, solve_steady_state, CharFunGrid, Lattice, SolverConfig};
use kacbath::harness::{parse_config, run_experiment};
use kacbath::kinetic::{KacParams, Law1d, ThermostatKind, ThermostatSpec};
use kacbath::metrics::{gtw_distance, t1_distance, wasserstein2_1d, CharFunSource, ClosedForm, ProbeSet};
use kacbath::particle::{run_coupled, run_ensemble, EnsembleConfig, IndependentPair, ProductLaw};
use kacbath::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KacStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    OutOfDomain = 4,
    MeanMismatch = 5,
    Unstable = 6,
    NonConvergence = 7,
    Config = 8,
    Assertion = 9,
    Io = 10,
    Panic = 11,
}

/// Family of a one-dimensional law.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KacLawKind {
    /// `a` = standard deviation.
    Gaussian = 0,
    /// `a` = half width.
    Uniform = 1,
    /// `±a` with equal weights.
    Rademacher = 2,
    /// Atoms at `a > 0` and `b < 0`, weighted to have mean zero.
    TwoPoint = 3,
    DiracZero = 4,
}

/// A centred law translated by `shift`. Reservoir laws must have `shift = 0`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KacLawSpec {
    pub kind: KacLawKind,
    pub a: f64,
    pub b: f64,
    pub shift: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KacSolverOptions {
    pub nodes_per_axis: usize,
    pub n_theta: usize,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub dt: f64,
    /// Ball radius; `<= 0` selects `6 / sqrt(K_g)`.
    pub radius: f64,
}

/// Analytic rates and contraction factors of a model.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KacRates {
    pub energy: f64,
    pub first_moment: f64,
    pub mixed_moment: f64,
    pub coupling: f64,
    pub gtw_factor: f64,
    pub t1_factor: f64,
}

/// Ensemble averages at one record time.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KacMomentRow {
    pub time: f64,
    pub energy: f64,
    pub energy_stderr: f64,
    pub mean_first: f64,
    pub mean_first_stderr: f64,
    pub mean_mixed: f64,
    pub mean_mixed_stderr: f64,
}

/// Model parameters together with the reservoir law.
pub struct KacModel {
    params: KacParams,
    reservoir: ThermostatSpec,
}

/// Characteristic function sampled on a lattice ball.
pub struct KacGrid {
    grid: CharFunGrid,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> KacStatus {
    match e {
        Error::InvalidParameter { .. } | Error::UnsupportedDimension { .. } | Error::IndexOutOfRange { .. } | Error::Empty => {
            KacStatus::InvalidArgument
        }
        Error::DimensionMismatch { .. } => KacStatus::DimensionMismatch,
        Error::OutOfDomain { .. } => KacStatus::OutOfDomain,
        Error::MeanMismatch { .. } => KacStatus::MeanMismatch,
        Error::Unstable { .. } => KacStatus::Unstable,
        Error::NonConvergence { .. } => KacStatus::NonConvergence,
        Error::Config(_) => KacStatus::Config,
        Error::Assertion(_) => KacStatus::Assertion,
        Error::Snapshot(_) | Error::Io(_) => KacStatus::Io,
    }
}

struct Failure(KacStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(KacStatus::NullPointer, format!("`{what}` is null"))
}

fn guard<F>(f: F) -> KacStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            KacStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            KacStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice_of<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

fn base_law(spec: &KacLawSpec) -> Result<ThermostatSpec, Error> {
    let kind = match spec.kind {
        KacLawKind::Gaussian => ThermostatKind::Gaussian { sigma: spec.a },
        KacLawKind::Uniform => ThermostatKind::Uniform { half_width: spec.a },
        KacLawKind::Rademacher => ThermostatKind::Rademacher { scale: spec.a },
        KacLawKind::TwoPoint => ThermostatKind::TwoPoint { a: spec.a, b: spec.b },
        KacLawKind::DiracZero => ThermostatKind::DiracZero,
    };
    ThermostatSpec::new(kind)
}

fn law(spec: &KacLawSpec) -> Result<Law1d, Error> {
    if !spec.shift.is_finite() {
        return Err(Error::invalid("law.shift", "must be finite"));
    }
    Ok(Law1d::shifted(base_law(spec)?, spec.shift))
}

fn solver(opts: &KacSolverOptions) -> Result<SolverConfig, Error> {
    let cfg = SolverConfig {
        nodes_per_axis: opts.nodes_per_axis,
        n_theta: opts.n_theta,
        picard_tol: opts.picard_tol,
        picard_max_iter: opts.picard_max_iter,
        dt: opts.dt,
        radius: (opts.radius > 0.0).then_some(opts.radius),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn put<T>(out: *mut *mut T, value: T) {
    // callers check `out` before doing any work
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kac_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of the calling thread into `buf` (always
/// NUL-terminated when `len > 0`) and returns its full length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn kac_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Default solver options (65 nodes per axis, 128 angles, automatic radius).
#[no_mangle]
pub extern "C" fn kac_solver_options_default() -> KacSolverOptions {
    let d = SolverConfig::default();
    KacSolverOptions {
        nodes_per_axis: d.nodes_per_axis,
        n_theta: d.n_theta,
        picard_tol: d.picard_tol,
        picard_max_iter: d.picard_max_iter,
        dt: d.dt,
        radius: 0.0,
    }
}

/// # Safety
/// `out` must be a valid pointer; on success it receives a handle that must
/// be released with [`kac_model_free`].
#[no_mangle]
pub unsafe extern "C" fn kac_model_new(
    lambda: f64,
    mu: f64,
    n_particles: usize,
    reservoir: KacLawSpec,
    out: *mut *mut KacModel,
) -> KacStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if reservoir.shift != 0.0 {
            return Err(Error::invalid("reservoir.shift", "the reservoir law is centred").into());
        }
        let params = KacParams::new(lambda, mu, n_particles)?;
        put(
            out,
            KacModel {
                params,
                reservoir: base_law(&reservoir)?,
            },
        );
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from [`kac_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kac_model_free(model: *mut KacModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn kac_model_rates(model: *const KacModel, out: *mut KacRates) -> KacStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = &m.params;
        *out = KacRates {
            energy: p.energy_rate(),
            first_moment: p.first_moment_rate(),
            mixed_moment: p.mixed_moment_rate(),
            coupling: p.coupling_rate(),
            gtw_factor: p.gtw_contraction_factor(),
            t1_factor: p.t1_contraction_factor(),
        };
        Ok(())
    })
}

/// Runs `replicas` independent copies from `initial^{⊗N}` and writes one
/// row per entry of `times` (increasing, starting at or after 0) to `out`.
///
/// # Safety
/// `times` and `out` must point to `n_times` elements.
#[no_mangle]
pub unsafe extern "C" fn kac_model_ensemble(
    model: *const KacModel,
    initial: KacLawSpec,
    replicas: usize,
    seed: u64,
    times: *const f64,
    n_times: usize,
    out: *mut KacMomentRow,
) -> KacStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        let times = slice_of(times, n_times, "times")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let init = ProductLaw::tensor(law(&initial)?, m.params.n_particles())?;
        let s = run_ensemble(
            &m.params,
            &m.reservoir,
            &init,
            &EnsembleConfig::new(replicas, seed, times.to_vec()),
        )?;
        let rows = slice::from_raw_parts_mut(out, n_times);
        for (row, r) in rows.iter_mut().zip(&s.records) {
            *row = KacMomentRow {
                time: r.time,
                energy: r.energy,
                energy_stderr: r.energy_stderr,
                mean_first: r.mean_first,
                mean_first_stderr: r.mean_first_stderr,
                mean_mixed: r.mean_mixed,
                mean_mixed_stderr: r.mean_mixed_stderr,
            };
        }
        Ok(())
    })
}

/// Synchronously coupled copies from `first^{⊗N}` and `second^{⊗N}`; writes
/// the replica mean of `Σ_i (v_i - w_i)²` at each record time.
///
/// # Safety
/// `times` and `delta_sq` must point to `n_times` elements.
#[no_mangle]
pub unsafe extern "C" fn kac_model_coupling(
    model: *const KacModel,
    first: KacLawSpec,
    second: KacLawSpec,
    replicas: usize,
    seed: u64,
    times: *const f64,
    n_times: usize,
    delta_sq: *mut f64,
) -> KacStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        let times = slice_of(times, n_times, "times")?;
        if delta_sq.is_null() {
            return Err(null("delta_sq"));
        }
        let n = m.params.n_particles();
        let init = IndependentPair::new(ProductLaw::tensor(law(&first)?, n)?, ProductLaw::tensor(law(&second)?, n)?)?;
        let c = run_coupled(
            &m.params,
            &m.reservoir,
            &init,
            &EnsembleConfig::new(replicas, seed, times.to_vec()),
        )?;
        slice::from_raw_parts_mut(delta_sq, n_times).copy_from_slice(&c.delta_sq_mean);
        Ok(())
    })
}

/// Picard iteration to the steady state, started from the Gaussian with the
/// reservoir energy. `iterations` may be null.
///
/// # Safety
/// `model` and `out` must be valid; `*out` must be released with
/// [`kac_grid_free`].
#[no_mangle]
pub unsafe extern "C" fn kac_model_steady_state(
    model: *const KacModel,
    options: KacSolverOptions,
    out: *mut *mut KacGrid,
    iterations: *mut usize,
) -> KacStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = solver(&options)?;
        let n = m.params.n_particles();
        let k = m.reservoir.second_moment().max(f64::MIN_POSITIVE);
        let lat = Lattice::new(n, cfg.radius_for(&m.reservoir), cfg.nodes_per_axis)?;
        let start = CharFunGrid::sample_on(lat, |xi| {
            let r2: f64 = xi.iter().map(|x| x * x).sum();
            (-0.5 * k * r2).exp().into()
        })?;
        let (grid, report) = solve_steady_state(&m.params, &m.reservoir, &cfg, &start)?;
        if !iterations.is_null() {
            *iterations = report.iterations;
        }
        put(out, KacGrid { grid });
        Ok(())
    })
}

/// Grid of the tensor power `law^{⊗dim}`.
///
/// # Safety
/// `out` must be valid; `*out` must be released with [`kac_grid_free`].
#[no_mangle]
pub unsafe extern "C" fn kac_grid_from_law(
    dim: usize,
    radius: f64,
    nodes_per_axis: usize,
    law_spec: KacLawSpec,
    out: *mut *mut KacGrid,
) -> KacStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f = ClosedForm::tensor(law(&law_spec)?, dim);
        let grid = CharFunGrid::from_fn(dim, radius, nodes_per_axis, |xi| f.charfun(xi))?;
        put(out, KacGrid { grid });
        Ok(())
    })
}

/// Integrates the master equation from `initial` up to `t_end`.
///
/// # Safety
/// All pointers must be valid; `*out` must be released with [`kac_grid_free`].
#[no_mangle]
pub unsafe extern "C" fn kac_grid_evolve(
    initial: *const KacGrid,
    model: *const KacModel,
    options: KacSolverOptions,
    t_end: f64,
    out: *mut *mut KacGrid,
) -> KacStatus {
    guard(|| {
        let g = borrow(initial, "initial")?;
        let m = borrow(model, "model")?;
        if out.is_null() {
            return Err(null("out"));
        }
        if g.grid.dim() != m.params.n_particles() {
            return Err(Error::DimensionMismatch {
                left: g.grid.dim(),
                right: m.params.n_particles(),
            }
            .into());
        }
        let cfg = solver(&options)?;
        let grid = evolve(&g.grid, &m.params, &m.reservoir, &cfg, t_end, |_, _| Ok(()))?;
        put(out, KacGrid { grid });
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kac_grid_free(grid: *mut KacGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Dimension of the grid, 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kac_grid_dim(grid: *const KacGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.grid.dim())
}

/// Interpolated value at `xi` (length `dim`).
///
/// # Safety
/// `xi` must point to `dim` values; `re` and `im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kac_grid_eval(
    grid: *const KacGrid,
    xi: *const f64,
    dim: usize,
    re: *mut f64,
    im: *mut f64,
) -> KacStatus {
    guard(|| {
        let g = borrow(grid, "grid")?;
        let xi = slice_of(xi, dim, "xi")?;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let z = g.grid.eval(xi)?;
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// Mean vector (`dim` entries) and total energy from stencils at the origin.
///
/// # Safety
/// `mean` must point to `kac_grid_dim(grid)` writable values; `energy` must
/// be valid.
#[no_mangle]
pub unsafe extern "C" fn kac_grid_moments(grid: *const KacGrid, mean: *mut f64, energy: *mut f64) -> KacStatus {
    guard(|| {
        let g = borrow(grid, "grid")?;
        if mean.is_null() || energy.is_null() {
            return Err(null("mean/energy"));
        }
        let m = moments_from_grid(&g.grid)?;
        slice::from_raw_parts_mut(mean, g.grid.dim()).copy_from_slice(&m.mean);
        *energy = m.energy();
        Ok(())
    })
}

/// Excess kurtosis of the one-dimensional marginal along `axis`.
///
/// # Safety
/// `grid` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kac_grid_excess_kurtosis(grid: *const KacGrid, axis: usize, out: *mut f64) -> KacStatus {
    guard(|| {
        let g = borrow(grid, "grid")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = marginal_shape(&g.grid, axis)?.excess_kurtosis();
        Ok(())
    })
}

fn grid_distance(f: &KacGrid, h: &KacGrid, gtw: bool) -> Result<f64, Error> {
    let probes = ProbeSet::for_grid(&f.grid);
    let (a, b) = (CharFunSource::Grid(f.grid.clone()), CharFunSource::Grid(h.grid.clone()));
    Ok(if gtw {
        gtw_distance(&a, &b, &probes)?
    } else {
        t1_distance(&a, &b, &probes)?
    }
    .value)
}

/// GTW distance between two grids on the first grid's probes.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kac_grid_gtw(f: *const KacGrid, h: *const KacGrid, out: *mut f64) -> KacStatus {
    guard(|| {
        let (f, h) = (borrow(f, "f")?, borrow(h, "h")?);
        if out.is_null() {
            return Err(null("out"));
        }
        *out = grid_distance(f, h, true)?;
        Ok(())
    })
}

/// T1 distance between two grids on the first grid's probes.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn kac_grid_t1(f: *const KacGrid, h: *const KacGrid, out: *mut f64) -> KacStatus {
    guard(|| {
        let (f, h) = (borrow(f, "f")?, borrow(h, "h")?);
        if out.is_null() {
            return Err(null("out"));
        }
        *out = grid_distance(f, h, false)?;
        Ok(())
    })
}

/// Exact W2 distance between two empirical measures on the line.
///
/// # Safety
/// `a` and `b` must point to `na` and `nb` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kac_wasserstein2_1d(a: *const f64, na: usize, b: *const f64, nb: usize, out: *mut f64) -> KacStatus {
    guard(|| {
        let (a, b) = (slice_of(a, na, "a")?, slice_of(b, nb, "b")?);
        if out.is_null() {
            return Err(null("out"));
        }
        *out = wasserstein2_1d(a, b)?;
        Ok(())
    })
}

/// Parses a TOML experiment document and runs it. `output_dir` may be null
/// to keep the configured directory. `exit_code` receives the CLI exit code
/// (0 ok, 3 failed assertions); it is left untouched when an error status
/// is returned.
///
/// # Safety
/// `config` must be a NUL-terminated UTF-8 string; `output_dir` null or
/// NUL-terminated; `exit_code` valid.
#[no_mangle]
pub unsafe extern "C" fn kac_run_config(config: *const c_char, output_dir: *const c_char, exit_code: *mut c_int) -> KacStatus {
    guard(|| {
        if config.is_null() || exit_code.is_null() {
            return Err(null("config/exit_code"));
        }
        let text = CStr::from_ptr(config)
            .to_str()
            .map_err(|e| Failure(KacStatus::InvalidArgument, format!("config is not UTF-8: {e}")))?;
        let mut cfg = parse_config(text)?;
        if !output_dir.is_null() {
            let dir = CStr::from_ptr(output_dir)
                .to_str()
                .map_err(|e| Failure(KacStatus::InvalidArgument, format!("output_dir is not UTF-8: {e}")))?;
            cfg.output_dir = PathBuf::from(dir);
        }
        *exit_code = run_experiment(&cfg)?.exit_code();
        Ok(())
    })
}
