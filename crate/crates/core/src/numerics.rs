//! Numerical kernels: adaptive Simpson quadrature, a fixed-step RK4 integrator
//! for two-component complex states, and finite-difference derivatives.
//!
//! The quadrature and ODE routines back the oracles that check the closed
//! forms in [`crate::well`] and [`crate::spin`]; the finite differences turn
//! the post-quench energy curve into a wall force.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Two-component complex amplitude vector.
pub type Spinor<T> = [Complex<T>; 2];

/// Panels the integration interval is split into before adaptive refinement.
/// Keeps symmetric oscillatory integrands from passing the first error test
/// on coincident zeros.
const INITIAL_PANELS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    tolerance: T,
    max_subdivisions: usize,
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(tolerance: T, max_subdivisions: usize) -> Result<Self> {
        if !(tolerance > T::zero()) || !tolerance.is_finite() {
            return Err(Error::invalid("tolerance", format!("{tolerance} must be finite and > 0")));
        }
        if max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions", "must be at least 1"));
        }
        Ok(Self { tolerance, max_subdivisions })
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    pub fn max_subdivisions(&self) -> usize {
        self.max_subdivisions
    }
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self { tolerance: T::lit(1e-12), max_subdivisions: 200_000 }
    }
}

struct Panel<T> {
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

fn sample<T: Real, F: Fn(T) -> T>(f: &F, x: T) -> Result<T> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::invalid("integrand", format!("non-finite value at x = {x:e}")))
    }
}

/// Integrates `f` over `[a, b]` by adaptive Simpson bisection.
///
/// Each accepted panel carries a share of the tolerance proportional to its
/// width, so the summed error estimate stays below `spec.tolerance()`. When the
/// subdivision budget runs out the remaining panels are accepted as they are
/// and the sum is returned inside [`Error::NonConvergence`].
pub fn integrate<T, F>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::invalid("interval", format!("[{a:e}, {b:e}] must be finite with a <= b")));
    }
    if a == b {
        return Ok(T::zero());
    }

    let width = b - a;
    let two = T::lit(2.0);
    let fifteen = T::lit(15.0);
    let rounding = T::epsilon() * T::lit(64.0);

    let mut stack = Vec::with_capacity(64);
    let panels = T::of_usize(INITIAL_PANELS);
    let mut left = a;
    let mut f_left = sample(&f, a)?;
    for i in 1..=INITIAL_PANELS {
        let right = if i == INITIAL_PANELS { b } else { a + width * T::of_usize(i) / panels };
        let f_right = sample(&f, right)?;
        let mid = (left + right) / two;
        let f_mid = sample(&f, mid)?;
        stack.push(Panel {
            a: left,
            b: right,
            fa: f_left,
            fm: f_mid,
            fb: f_right,
            whole: simpson(left, right, f_left, f_mid, f_right),
            tol: spec.tolerance * (right - left) / width,
        });
        left = right;
        f_left = f_right;
    }

    let mut total = T::zero();
    let mut subdivisions = 0usize;
    let mut exhausted = false;

    while let Some(p) = stack.pop() {
        let m = (p.a + p.b) / two;
        let lm = (p.a + m) / two;
        let rm = (m + p.b) / two;
        let f_lm = sample(&f, lm)?;
        let f_rm = sample(&f, rm)?;
        let s_left = simpson(p.a, m, p.fa, f_lm, p.fm);
        let s_right = simpson(m, p.b, p.fm, f_rm, p.fb);
        let refined = s_left + s_right;
        let delta = refined - p.whole;

        let floor = rounding * refined.abs();
        let converged = delta.abs() <= fifteen * p.tol.max(floor);
        // interval no longer splittable in this precision
        let degenerate = lm <= p.a || rm >= p.b;

        if converged || degenerate || subdivisions >= spec.max_subdivisions {
            if !(converged || degenerate) {
                exhausted = true;
            }
            total = total + refined + delta / fifteen;
            continue;
        }

        subdivisions += 1;
        let half_tol = p.tol / two;
        stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: f_lm, fb: p.fm, whole: s_left, tol: half_tol });
        stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: f_rm, fb: p.fb, whole: s_right, tol: half_tol });
    }

    if exhausted {
        return Err(Error::NonConvergence { estimate: total.as_f64(), subdivisions });
    }
    Ok(total)
}

/// Resolution of the fixed-step integrator: the number of RK4 steps taken
/// across one drive period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OdeSpec {
    steps_per_period: usize,
}

impl OdeSpec {
    pub const MIN_STEPS: usize = 100;

    pub fn new(steps_per_period: usize) -> Result<Self> {
        if steps_per_period < Self::MIN_STEPS {
            return Err(Error::invalid(
                "steps_per_period",
                format!("{steps_per_period} is below the floor of {}", Self::MIN_STEPS),
            ));
        }
        Ok(Self { steps_per_period })
    }

    pub fn steps_per_period(&self) -> usize {
        self.steps_per_period
    }
}

impl Default for OdeSpec {
    fn default() -> Self {
        Self { steps_per_period: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSolution<T> {
    pub state: Spinor<T>,
    /// `| |y(t_end)| - |y(0)| |`
    pub norm_drift: T,
}

pub fn spinor_norm<T: Real>(y: &Spinor<T>) -> T {
    (y[0].norm_sqr() + y[1].norm_sqr()).sqrt()
}

fn axpy<T: Real>(y: &Spinor<T>, k: &Spinor<T>, scale: T) -> Spinor<T> {
    [y[0] + k[0] * scale, y[1] + k[1] * scale]
}

fn check_start<T: Real>(y0: &Spinor<T>, t_end: T) -> Result<()> {
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(8.0));
    let n2 = y0[0].norm_sqr() + y0[1].norm_sqr();
    if !((n2 - T::one()).abs() <= tol) {
        return Err(Error::invalid("initial state", format!("squared norm {n2:e} is not 1")));
    }
    if !t_end.is_finite() || t_end < T::zero() {
        return Err(Error::invalid("t_end", format!("{t_end:e} must be finite and >= 0")));
    }
    Ok(())
}

/// Classical fourth-order Runge-Kutta over `[0, t_end]` with
/// `spec.steps_per_period()` equal steps, calling `observe` after every step.
fn rk4<T, F, O>(rhs: &F, y0: Spinor<T>, t_end: T, spec: &OdeSpec, mut observe: O) -> Result<Spinor<T>>
where
    T: Real,
    F: Fn(T, &Spinor<T>) -> Spinor<T>,
    O: FnMut(T, &Spinor<T>),
{
    check_start(&y0, t_end)?;
    let steps = spec.steps_per_period;
    let dt = t_end / T::of_usize(steps);
    let half = dt / T::lit(2.0);
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);

    let mut y = y0;
    for i in 0..steps {
        let t = dt * T::of_usize(i);
        let k1 = rhs(t, &y);
        let k2 = rhs(t + half, &axpy(&y, &k1, half));
        let k3 = rhs(t + half, &axpy(&y, &k2, half));
        let k4 = rhs(t + dt, &axpy(&y, &k3, dt));
        for c in 0..2 {
            y[c] = y[c] + (k1[c] + k2[c] * two + k3[c] * two + k4[c]) * sixth;
        }
        let t_next = if i + 1 == steps { t_end } else { dt * T::of_usize(i + 1) };
        if !(y[0].re.is_finite() && y[0].im.is_finite() && y[1].re.is_finite() && y[1].im.is_finite()) {
            return Err(Error::Divergence { time: t_next.as_f64() });
        }
        observe(t_next, &y);
    }
    Ok(y)
}

/// Integrates `dy/dt = rhs(t, y)` from the normalized `y0` to `t_end`.
pub fn ode_evolve<T, F>(rhs: F, y0: Spinor<T>, t_end: T, spec: &OdeSpec) -> Result<OdeSolution<T>>
where
    T: Real,
    F: Fn(T, &Spinor<T>) -> Spinor<T>,
{
    let state = rk4(&rhs, y0, t_end, spec, |_, _| {})?;
    Ok(OdeSolution { state, norm_drift: (spinor_norm(&state) - spinor_norm(&y0)).abs() })
}

/// Same integration as [`ode_evolve`], returning `(t, y)` at every grid point
/// including `t = 0`.
pub fn ode_trajectory<T, F>(rhs: F, y0: Spinor<T>, t_end: T, spec: &OdeSpec) -> Result<Vec<(T, Spinor<T>)>>
where
    T: Real,
    F: Fn(T, &Spinor<T>) -> Spinor<T>,
{
    let mut out = Vec::with_capacity(spec.steps_per_period + 1);
    out.push((T::zero(), y0));
    rk4(&rhs, y0, t_end, spec, |t, y| out.push((t, *y)))?;
    Ok(out)
}

/// `points` equally spaced values from `min` to `max` inclusive.
pub fn uniform_grid<T: Real>(min: T, max: T, points: usize) -> Result<Vec<T>> {
    if points < 2 {
        return Err(Error::invalid("points", format!("{points} given, need at least 2")));
    }
    if !min.is_finite() || !max.is_finite() || !(min < max) {
        return Err(Error::invalid("range", format!("{min:e}:{max:e} is empty")));
    }
    let last = points - 1;
    let span = max - min;
    Ok((0..points)
        .map(|i| if i == last { max } else { min + span * T::of_usize(i) / T::of_usize(last) })
        .collect())
}

/// Finite-difference stencil used by [`try_derivative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// `(f(x+h) - f(x-h)) / 2h`
    Central,
    /// Second-order stencil on `x, x+h, x+2h`.
    Forward,
    /// Second-order stencil on `x, x-h, x-2h`.
    Backward,
}

/// Returns `(f(x+h) - f(x-h)) / (2h)`.
pub fn central_difference<T: Real, F: Fn(T) -> T>(f: F, x: T, h: T) -> T {
    assert!(h > T::zero(), "finite-difference step must be positive");
    (f(x + h) - f(x - h)) / (h + h)
}

/// Derivative of a fallible function with the chosen stencil; evaluation
/// errors propagate unchanged.
pub fn try_derivative<T, E, F>(f: F, x: T, h: T, stencil: Stencil) -> Result<T, E>
where
    T: Real,
    F: Fn(T) -> Result<T, E>,
{
    assert!(h > T::zero(), "finite-difference step must be positive");
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    Ok(match stencil {
        Stencil::Central => (f(x + h)? - f(x - h)?) / (two * h),
        Stencil::Forward => (-three * f(x)? + four * f(x + h)? - f(x + two * h)?) / (two * h),
        Stencil::Backward => (three * f(x)? - four * f(x - h)? + f(x - two * h)?) / (two * h),
    })
}
