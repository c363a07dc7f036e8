//! Spin-1/2 in a magnetic field of fixed strength whose direction precesses
//! about `z` at the drive frequency `omega`, tilted by `alpha`.
//!
//! The Hamiltonian is `H(t) = (hbar omega0 / 2) n(t) . sigma` with
//! `n(t) = (sin a cos wt, sin a sin wt, cos a)`, so the instantaneous levels
//! sit at `+-hbar omega0 / 2`. In the frame co-rotating with the field the
//! generator is constant and the evolution is a rotation at the Rabi
//! frequency `lambda`; the closed forms below are that rotation carried back
//! to the lab frame. The RK4 oracle integrates `H(t)` directly.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numerics::{ode_evolve, ode_trajectory, uniform_grid, OdeSolution, OdeSpec, Spinor};
use crate::scalar::Real;

/// `2 x 2` complex matrix, row major.
pub type Matrix2<T> = [[Complex<T>; 2]; 2];

/// Below this value of `lambda * t` the factor `sin(lambda t / 2) / lambda`
/// is replaced by its series.
const SERIES_GUARD: f64 = 1e-8;

/// Field, particle and drive parameters. Defaults: `B0 = 1 T`,
/// `|e| = 1.6e-19 C`, `m = 9.3e-31 kg`, `h = 6.626e-34 J s`, `alpha = pi/4`
/// and `omega = omega0`.
///
/// The charge is stored as a magnitude; the sign of the electron charge only
/// flips the sense of precession, which the tilt convention already fixes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorConfig<T> {
    field: T,
    charge: T,
    mass: T,
    planck: T,
    tilt: T,
    drive: T,
}

impl<T: Real> RotorConfig<T> {
    pub fn new(field: T, charge: T, mass: T, planck: T, tilt: T, drive: T) -> Result<Self> {
        let cfg = Self { field, charge, mass, planck, tilt: T::zero(), drive: T::one() };
        for (name, v) in [("field", field), ("charge", charge), ("mass", mass), ("planck", planck)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::invalid(name, format!("{v:e} must be finite and > 0")));
            }
        }
        cfg.with_tilt(tilt)?.with_drive(drive)
    }

    pub fn with_tilt(self, tilt: T) -> Result<Self> {
        if !(tilt >= T::zero() && tilt <= T::PI()) {
            return Err(Error::invalid("tilt", format!("{tilt:e} must lie in [0, pi]")));
        }
        Ok(Self { tilt, ..self })
    }

    pub fn with_drive(self, drive: T) -> Result<Self> {
        if !(drive > T::zero()) || !drive.is_finite() {
            return Err(Error::invalid("drive", format!("{drive:e} must be finite and > 0")));
        }
        Ok(Self { drive, ..self })
    }

    /// Sets `omega = ratio * omega0`.
    pub fn with_drive_ratio(self, ratio: T) -> Result<Self> {
        self.with_drive(ratio * self.larmor())
    }

    pub fn field(&self) -> T {
        self.field
    }

    pub fn charge(&self) -> T {
        self.charge
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn hbar(&self) -> T {
        self.planck / T::TAU()
    }

    pub fn tilt(&self) -> T {
        self.tilt
    }

    pub fn drive(&self) -> T {
        self.drive
    }

    /// `omega0 = |e| B0 / m` in rad/s.
    pub fn larmor(&self) -> T {
        self.charge * self.field / self.mass
    }

    /// `omega / omega0`
    pub fn drive_ratio(&self) -> T {
        self.drive / self.larmor()
    }

    /// One revolution of the field, `2 pi / omega`.
    pub fn drive_period(&self) -> T {
        T::TAU() / self.drive
    }

    pub fn rabi(&self) -> RabiParameters<T> {
        RabiParameters::new(self.drive, self.larmor(), self.tilt)
    }
}

impl<T: Real> Default for RotorConfig<T> {
    fn default() -> Self {
        let cfg = Self {
            field: T::one(),
            charge: T::lit(1.6e-19),
            mass: T::lit(9.3e-31),
            planck: T::lit(6.626e-34),
            tilt: T::FRAC_PI_4(),
            drive: T::one(),
        };
        Self { drive: cfg.larmor(), ..cfg }
    }
}

/// Generalized precession frequency in the co-rotating frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParameters<T> {
    pub lambda: T,
}

impl<T: Real> RabiParameters<T> {
    /// `lambda = sqrt(omega^2 + omega0^2 - 2 omega omega0 cos alpha)`, evaluated
    /// as `sqrt((omega - omega0)^2 + 4 omega omega0 sin^2(alpha/2))` so it never
    /// goes negative through cancellation.
    pub fn new(drive: T, larmor: T, tilt: T) -> Self {
        let half = (tilt / T::lit(2.0)).sin();
        let detuning = drive - larmor;
        Self { lambda: (detuning * detuning + T::lit(4.0) * drive * larmor * half * half).sqrt() }
    }
}

/// Normalized two-component amplitude `(up, down)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState<T> {
    pub up: Complex<T>,
    pub down: Complex<T>,
}

impl<T: Real> SpinState<T> {
    pub fn new(up: Complex<T>, down: Complex<T>) -> Result<Self> {
        let state = Self { up, down };
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(8.0));
        if !((state.norm() - T::one()).abs() <= tol) {
            return Err(Error::invalid("spin state", format!("norm {:e} is not 1", state.norm())));
        }
        Ok(state)
    }

    pub fn from_spinor(y: Spinor<T>) -> Result<Self> {
        Self::new(y[0], y[1])
    }

    pub fn spinor(&self) -> Spinor<T> {
        [self.up, self.down]
    }

    pub fn norm(&self) -> T {
        (self.up.norm_sqr() + self.down.norm_sqr()).sqrt()
    }

    /// `<self | other>`
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    /// Largest componentwise distance to `other`.
    pub fn max_deviation(&self, other: &Self) -> T {
        (self.up - other.up).norm().max((self.down - other.down).norm())
    }
}

/// Which instantaneous eigenstate the evolution starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `psi1`, energy `+hbar omega0 / 2`.
    Upper,
    /// `psi2`, energy `-hbar omega0 / 2`.
    Lower,
}

fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

fn phase<T: Real>(angle: T) -> Complex<T> {
    Complex::new(angle.cos(), angle.sin())
}

/// `(omega0 / 2) n(t) . sigma` in rad/s.
fn precession_matrix<T: Real>(t: T, cfg: &RotorConfig<T>) -> Matrix2<T> {
    let half = cfg.larmor() / T::lit(2.0);
    let (sa, ca) = cfg.tilt.sin_cos();
    let wt = cfg.drive * t;
    [
        [real(half * ca), phase(-wt) * (half * sa)],
        [phase(wt) * (half * sa), real(-half * ca)],
    ]
}

fn apply<T: Real>(m: &Matrix2<T>, y: &Spinor<T>) -> Spinor<T> {
    [m[0][0] * y[0] + m[0][1] * y[1], m[1][0] * y[0] + m[1][1] * y[1]]
}

/// `H(t) = (hbar omega0 / 2) n(t) . sigma` in joules.
pub fn hamiltonian<T: Real>(t: T, cfg: &RotorConfig<T>) -> Matrix2<T> {
    let hbar = cfg.hbar();
    let m = precession_matrix(t, cfg);
    [[m[0][0] * hbar, m[0][1] * hbar], [m[1][0] * hbar, m[1][1] * hbar]]
}

/// Right-hand side of `dpsi/dt = -i H(t) psi / hbar`.
pub fn schrodinger_rhs<T: Real>(cfg: &RotorConfig<T>) -> impl Fn(T, &Spinor<T>) -> Spinor<T> + '_ {
    let minus_i = Complex::new(T::zero(), -T::one());
    move |t, y| {
        let hy = apply(&precession_matrix(t, cfg), y);
        [minus_i * hy[0], minus_i * hy[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenbasis<T> {
    pub upper: SpinState<T>,
    pub lower: SpinState<T>,
    /// `+hbar omega0 / 2`
    pub upper_energy: T,
    /// `-hbar omega0 / 2`
    pub lower_energy: T,
}

/// Eigenstates of `H(t)` at frozen `t`:
/// `psi1 = (cos a/2, e^{i w t} sin a/2)` and `psi2 = (e^{-i w t} sin a/2, -cos a/2)`.
pub fn instantaneous_eigenstates<T: Real>(t: T, cfg: &RotorConfig<T>) -> Eigenbasis<T> {
    let (s, c) = (cfg.tilt / T::lit(2.0)).sin_cos();
    let wt = cfg.drive * t;
    let level = cfg.hbar() * cfg.larmor() / T::lit(2.0);
    Eigenbasis {
        upper: SpinState { up: real(c), down: phase(wt) * s },
        lower: SpinState { up: phase(-wt) * s, down: real(-c) },
        upper_energy: level,
        lower_energy: -level,
    }
}

/// `sin(lambda t / 2) / lambda` with the removable singularity at `lambda = 0`.
fn half_sinc<T: Real>(lambda: T, t: T) -> T {
    let x = lambda * t / T::lit(2.0);
    if (lambda * t).abs() < T::lit(SERIES_GUARD) {
        t / T::lit(2.0) * (T::one() - x * x / T::lit(6.0))
    } else {
        x.sin() / lambda
    }
}

/// Exact state at time `t` for a start in the chosen instantaneous
/// eigenstate at `t = 0`.
pub fn evolve_closed_form<T: Real>(t: T, branch: Branch, cfg: &RotorConfig<T>) -> SpinState<T> {
    let lambda = cfg.rabi().lambda;
    let (w0, w) = (cfg.larmor(), cfg.drive);
    let (s, c) = (cfg.tilt / T::lit(2.0)).sin_cos();
    let cos_x = (lambda * t / T::lit(2.0)).cos();
    let sinc = half_sinc(lambda, t);
    let lag = phase(-w * t / T::lit(2.0));
    let lead = phase(w * t / T::lit(2.0));
    // cos(lambda t/2) -+ i (w0 -+ w)/lambda sin(lambda t/2)
    let slow = |sign: T, rate: T| Complex::new(cos_x, sign * rate * sinc);

    match branch {
        Branch::Upper => SpinState {
            up: slow(-T::one(), w0 - w) * lag * c,
            down: slow(-T::one(), w0 + w) * lead * s,
        },
        Branch::Lower => SpinState {
            up: slow(T::one(), w0 + w) * lag * s,
            down: -(slow(T::one(), w0 - w) * lead * c),
        },
    }
}

fn initial_state<T: Real>(branch: Branch, cfg: &RotorConfig<T>) -> SpinState<T> {
    let basis = instantaneous_eigenstates(T::zero(), cfg);
    match branch {
        Branch::Upper => basis.upper,
        Branch::Lower => basis.lower,
    }
}

fn clamp_probability<T: Real>(p: T) -> T {
    p.max(T::zero()).min(T::one())
}

/// `|<psi(t) | psi_b(0)>|^2` from the closed-form state.
pub fn return_probability<T: Real>(t: T, branch: Branch, cfg: &RotorConfig<T>) -> T {
    let start = initial_state(branch, cfg);
    clamp_probability(evolve_closed_form(t, branch, cfg).inner(&start).norm_sqr())
}

/// The same probability written out as a sum of two real squares; identical
/// for both branches.
pub fn return_probability_compact<T: Real>(t: T, cfg: &RotorConfig<T>) -> T {
    let lambda = cfg.rabi().lambda;
    let (w0, w) = (cfg.larmor(), cfg.drive);
    let ca = cfg.tilt.cos();
    let two = T::lit(2.0);
    let cl = (lambda * t / two).cos();
    let sinc = half_sinc(lambda, t);
    let (sw, cw) = (w * t / two).sin_cos();
    let first = cl * sw * ca + (w0 - w * ca) * sinc * cw;
    let second = cl * cw + (w - w0 * ca) * sinc * sw;
    clamp_probability(first * first + second * second)
}

/// Return probability after one full revolution, `t = 2 pi / omega`:
/// `cos^2(lambda pi / omega) + ((omega0 - omega cos a) / lambda)^2 sin^2(lambda pi / omega)`.
pub fn return_probability_cycle<T: Real>(omega: T, cfg: &RotorConfig<T>) -> Result<T> {
    let cfg = cfg.with_drive(omega)?;
    let lambda = cfg.rabi().lambda;
    if lambda == T::zero() {
        return Ok(T::one());
    }
    let x = lambda * T::PI() / omega;
    let k = (cfg.larmor() - omega * cfg.tilt.cos()) / lambda;
    let (s, c) = x.sin_cos();
    Ok(clamp_probability(c * c + k * k * s * s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSymmetry<T> {
    pub upper: T,
    pub lower: T,
    pub difference: T,
}

/// Compares the return probabilities of the two branches at time `t`.
pub fn branch_symmetry_check<T: Real>(t: T, cfg: &RotorConfig<T>) -> BranchSymmetry<T> {
    let upper = return_probability(t, Branch::Upper, cfg);
    let lower = return_probability(t, Branch::Lower, cfg);
    BranchSymmetry { upper, lower, difference: (upper - lower).abs() }
}

fn resolved_spec<T: Real>(t: T, cfg: &RotorConfig<T>, spec: &OdeSpec) -> Result<OdeSpec> {
    let periods = t / cfg.drive_period();
    let steps = (T::of_usize(spec.steps_per_period()) * periods).ceil().to_usize().unwrap_or(usize::MAX);
    let steps = steps.max(OdeSpec::MIN_STEPS);
    let fastest = cfg.drive.max(cfg.larmor()).max(cfg.rabi().lambda);
    let points_per_period = T::of_usize(steps) * T::TAU() / (fastest * t);
    if points_per_period < T::lit(20.0) {
        return Err(Error::Underresolved { steps, points_per_period: points_per_period.as_f64() });
    }
    OdeSpec::new(steps)
}

/// Integrates `H(t)` numerically from the chosen eigenstate to time `t`.
/// `spec` gives the resolution per drive period; at least 20 steps must fall
/// in the period of the fastest of `omega`, `omega0` and `lambda`.
pub fn evolve_numeric<T: Real>(t: T, branch: Branch, cfg: &RotorConfig<T>, spec: &OdeSpec) -> Result<OdeSolution<T>> {
    let start = initial_state(branch, cfg).spinor();
    if t == T::zero() {
        return Ok(OdeSolution { state: start, norm_drift: T::zero() });
    }
    ode_evolve(schrodinger_rhs(cfg), start, t, &resolved_spec(t, cfg, spec)?)
}

/// Agreement between the closed form and the RK4 oracle over one revolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleDeviation<T> {
    /// Largest componentwise `|psi_closed - psi_ode|` over the step grid.
    pub max_component_error: T,
    pub norm_drift: T,
}

pub fn oracle_deviation<T: Real>(branch: Branch, cfg: &RotorConfig<T>, spec: &OdeSpec) -> Result<OracleDeviation<T>> {
    let period = cfg.drive_period();
    let start = initial_state(branch, cfg).spinor();
    let trajectory = ode_trajectory(schrodinger_rhs(cfg), start, period, &resolved_spec(period, cfg, spec)?)?;
    let mut max_component_error = T::zero();
    for (t, y) in &trajectory {
        let exact = evolve_closed_form(*t, branch, cfg);
        let err = (exact.up - y[0]).norm().max((exact.down - y[1]).norm());
        max_component_error = max_component_error.max(err);
    }
    let last = trajectory.last().expect("trajectory holds the start point").1;
    let norm_drift = (crate::numerics::spinor_norm(&last) - T::one()).abs();
    Ok(OracleDeviation { max_component_error, norm_drift })
}

/// `rho1` after one revolution as a function of `omega / omega0` for one tilt.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnCurve<T> {
    pub tilt: T,
    /// `(omega / omega0, rho1)`, increasing in the ratio.
    pub rows: Vec<(T, T)>,
}

pub fn omega_scan<T: Real>(
    ratio_min: T,
    ratio_max: T,
    points: usize,
    tilts: &[T],
    cfg: &RotorConfig<T>,
) -> Result<Vec<ReturnCurve<T>>> {
    if !(ratio_min > T::zero()) {
        return Err(Error::invalid("ratio range", format!("lower bound {ratio_min:e} must be > 0")));
    }
    let grid = uniform_grid(ratio_min, ratio_max, points)?;
    let w0 = cfg.larmor();
    tilts
        .iter()
        .map(|&tilt| {
            let cfg = cfg.with_tilt(tilt)?;
            let rows = grid
                .iter()
                .map(|&r| Ok((r, return_probability_cycle(r * w0, &cfg)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(ReturnCurve { tilt, rows })
        })
        .collect()
}

/// Grid over `omega / omega0` used to locate the anti-adiabatic threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec<T> {
    pub ratio_min: T,
    pub ratio_max: T,
    pub points: usize,
}

impl<T: Real> Default for ScanSpec<T> {
    fn default() -> Self {
        Self { ratio_min: T::lit(0.05), ratio_max: T::lit(20.0), points: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold<T> {
    /// Smallest grid ratio from which `rho1` never decreases again.
    pub monotone_onset: T,
    /// Smallest grid ratio from which `rho1 >= 1 - epsilon` everywhere after.
    pub frozen_onset: T,
}

/// Locates, on the scan grid and for the tilt in `cfg`, where the
/// one-revolution return probability stops oscillating and where it stays
/// within `epsilon` of one.
pub fn anti_adiabatic_threshold<T: Real>(epsilon: T, cfg: &RotorConfig<T>, scan: &ScanSpec<T>) -> Result<Threshold<T>> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::invalid("epsilon", format!("{epsilon:e} must lie in (0, 1)")));
    }
    let curve = omega_scan(scan.ratio_min, scan.ratio_max, scan.points, &[cfg.tilt], cfg)?
        .pop()
        .expect("one tilt requested");
    let rows = curve.rows;
    // rounding-level dips on a flat curve are not a decrease
    let slack = T::epsilon() * T::lit(64.0);

    let mut monotone = rows.len() - 1;
    while monotone > 0 && rows[monotone - 1].1 <= rows[monotone].1 + slack {
        monotone -= 1;
    }

    let floor = T::one() - epsilon;
    let mut frozen = rows.len();
    while frozen > 0 && rows[frozen - 1].1 >= floor {
        frozen -= 1;
    }
    if frozen == rows.len() {
        let max = rows.iter().fold(T::zero(), |m, r| m.max(r.1));
        return Err(Error::NotFound { max: max.as_f64() });
    }

    Ok(Threshold { monotone_onset: rows[monotone].0, frozen_onset: rows[frozen].0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn cfg(tilt: f64, ratio: f64) -> RotorConfig<f64> {
        RotorConfig::default().with_tilt(tilt).unwrap().with_drive_ratio(ratio).unwrap()
    }

    fn residual(m: &Matrix2<f64>, v: &SpinState<f64>, e: f64) -> f64 {
        let mv = apply(m, &v.spinor());
        (mv[0] - v.up * e).norm().max((mv[1] - v.down * e).norm())
    }

    #[test]
    fn default_constants() {
        let c = RotorConfig::<f64>::default();
        assert!((c.larmor() - 1.6e-19 / 9.3e-31).abs() < 1e-3);
        assert!((c.drive_ratio() - 1.0).abs() < 1e-15);
        assert_eq!(c.tilt(), FRAC_PI_4);
    }

    #[test]
    fn config_validation() {
        let c = RotorConfig::<f64>::default();
        assert!(c.with_tilt(-0.1).is_err());
        assert!(c.with_tilt(PI + 1e-9).is_err());
        assert!(c.with_tilt(PI).is_ok());
        assert!(c.with_drive(0.0).is_err());
        assert!(RotorConfig::new(0.0, 1.6e-19, 9.3e-31, 6.626e-34, 0.1, 1.0).is_err());
        assert!(RotorConfig::new(1.0, 1.6e-19, 9.3e-31, 6.626e-34, 0.1, 1.0).is_ok());
    }

    #[test]
    fn aligned_field_gives_diagonal_hamiltonian() {
        let c = cfg(0.0, 1.3);
        let h = hamiltonian(0.37 * c.drive_period(), &c);
        let level = c.hbar() * c.larmor() / 2.0;
        assert_eq!(h[0][1], Complex::new(0.0, 0.0));
        assert_eq!(h[1][0], Complex::new(0.0, 0.0));
        assert_eq!(h[0][0].re, level);
        assert_eq!(h[1][1].re, -level);
    }

    #[test]
    fn hamiltonian_is_traceless_hermitian() {
        let c = cfg(1.1, 0.7);
        for k in 0..7 {
            let h = hamiltonian(k as f64 * 1e-12, &c);
            assert!((h[0][0] + h[1][1]).norm() == 0.0);
            assert!((h[0][1] - h[1][0].conj()).norm() <= 1e-15 * h[0][1].norm());
            assert_eq!(h[0][0].im, 0.0);
        }
    }

    #[test]
    fn eigenstates_solve_instantaneous_problem() {
        let c = cfg(0.9, 2.3);
        let m = precession_matrix(4.2e-12, &c);
        let basis = instantaneous_eigenstates(4.2e-12, &c);
        let half = c.larmor() / 2.0;
        assert!(residual(&m, &basis.upper, half) <= 1e-12 * half);
        assert!(residual(&m, &basis.lower, -half) <= 1e-12 * half);
        assert!(basis.upper.inner(&basis.lower).norm() <= 1e-14);
        assert!((basis.upper_energy + basis.lower_energy).abs() == 0.0);
    }

    #[test]
    fn eigenstate_special_cases() {
        let aligned = instantaneous_eigenstates(1e-11, &cfg(0.0, 1.0));
        assert_eq!(aligned.upper.up, Complex::new(1.0, 0.0));
        assert_eq!(aligned.upper.down.norm(), 0.0);
        let perpendicular = instantaneous_eigenstates(0.0, &cfg(FRAC_PI_2, 1.0));
        let r = 0.5f64.sqrt();
        assert!((perpendicular.upper.up.re - r).abs() < 1e-15);
        assert!((perpendicular.upper.down.re - r).abs() < 1e-15);
    }

    #[test]
    fn evolution_starts_at_eigenstate() {
        let c = cfg(FRAC_PI_4, 0.8);
        let s = evolve_closed_form(0.0, Branch::Upper, &c);
        assert_eq!(s.up, Complex::new((FRAC_PI_4 / 2.0).cos(), 0.0));
        assert_eq!(s.down, Complex::new((FRAC_PI_4 / 2.0).sin(), 0.0));
        let l = evolve_closed_form(0.0, Branch::Lower, &c);
        assert_eq!(l, instantaneous_eigenstates(0.0, &c).lower);
    }

    #[test]
    fn degenerate_rabi_frequency_is_finite() {
        let c = cfg(0.0, 1.0);
        assert!(c.rabi().lambda <= 1e-4 * c.larmor());
        let exact = c.with_drive(c.larmor()).unwrap();
        assert_eq!(exact.rabi().lambda, 0.0);
        let t = 0.3 * exact.drive_period();
        let s = evolve_closed_form(t, Branch::Upper, &exact);
        assert!((s.norm() - 1.0).abs() < 1e-14);
        assert!((return_probability(t, Branch::Upper, &exact) - 1.0).abs() < 1e-14);
        assert_eq!(return_probability_cycle(exact.drive(), &exact).unwrap(), 1.0);
        assert!((return_probability_compact(t, &exact) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn return_probability_at_start_and_aligned() {
        let c = cfg(0.6, 1.7);
        assert!((return_probability(0.0, Branch::Upper, &c) - 1.0).abs() < 1e-15);
        let aligned = cfg(0.0, 0.37);
        for k in 1..20 {
            let t = k as f64 * 0.13 * aligned.drive_period();
            assert!((return_probability(t, Branch::Upper, &aligned) - 1.0).abs() < 1e-13);
        }
        assert!((return_probability_cycle(aligned.drive(), &aligned).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn compact_form_matches_overlap() {
        let c = cfg(1.2, 0.45);
        for k in 0..50 {
            let t = k as f64 * 0.071 * c.drive_period();
            let d = return_probability(t, Branch::Upper, &c) - return_probability_compact(t, &c);
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn symmetry_at_half_cycle() {
        let c = cfg(FRAC_PI_4, 1.0);
        let s = branch_symmetry_check(PI / c.drive(), &c);
        assert!(s.difference <= 1e-12);
        let s0 = branch_symmetry_check(0.0, &c);
        assert!((s0.upper - 1.0).abs() < 1e-15 && (s0.lower - 1.0).abs() < 1e-15);
    }

    #[test]
    fn numeric_evolution_guards() {
        let c = cfg(FRAC_PI_4, 0.05);
        // drive period holds 20 Larmor periods; 100 steps cannot resolve them
        let spec = OdeSpec::new(100).unwrap();
        assert!(matches!(
            evolve_numeric(c.drive_period(), Branch::Upper, &c, &spec),
            Err(Error::Underresolved { .. })
        ));
        let sol = evolve_numeric(0.0, Branch::Lower, &c, &spec).unwrap();
        assert_eq!(sol.state, instantaneous_eigenstates(0.0, &c).lower.spinor());
    }

    #[test]
    fn threshold_errors() {
        let c = cfg(FRAC_PI_4, 1.0);
        assert!(anti_adiabatic_threshold(0.0, &c, &ScanSpec::default()).is_err());
        assert!(anti_adiabatic_threshold(1.0, &c, &ScanSpec::default()).is_err());
        let short = ScanSpec { ratio_min: 0.5, ratio_max: 2.0, points: 200 };
        assert!(matches!(anti_adiabatic_threshold(1e-4, &c, &short), Err(Error::NotFound { .. })));
        assert!(omega_scan(0.0, 1.0, 10, &[0.1], &c).is_err());
    }

    #[test]
    fn aligned_threshold_is_scan_start() {
        let c = cfg(0.0, 1.0);
        let scan = ScanSpec { ratio_min: 0.05, ratio_max: 20.0, points: 2_000 };
        let th = anti_adiabatic_threshold(0.02, &c, &scan).unwrap();
        assert_eq!(th.frozen_onset, 0.05);
        assert_eq!(th.monotone_onset, 0.05);
    }
}
