//! Particle in an infinitely deep well whose right wall jumps from `Q0` to
//! `Q = gamma * Q0` faster than the particle can respond.
//!
//! The particle starts in the ground state of the old well and stays frozen
//! there; everything below follows from re-expanding that frozen state in the
//! eigenbasis of the new well. Energies are reported in units of the initial
//! ground energy `E1` and forces in units of `E1 / Q0`, which makes every
//! reduced quantity a function of `gamma` and the truncation alone.

use crate::error::{Error, Result};
use crate::numerics::{integrate, try_derivative, uniform_grid, QuadratureSpec, Stencil};
use crate::scalar::Real;

/// Number of post-quench levels kept in the re-normalized energy sum.
pub const DEFAULT_LEVELS: usize = 10;
/// Finite-difference step in `gamma` used for the wall force.
pub const DEFAULT_FORCE_STEP: f64 = 1e-4;
/// Relative window for recognising an integer width ratio.
pub const DEFAULT_RESONANCE_TOLERANCE: f64 = 1e-9;

/// Physical constants of the well. Defaults: `m = 1e-27 kg`,
/// `h = 6.626e-34 J s`, `Q0 = 1 nm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellConfig<T> {
    mass: T,
    planck: T,
    initial_width: T,
}

impl<T: Real> WellConfig<T> {
    pub fn new(mass: T, planck: T, initial_width: T) -> Result<Self> {
        for (name, v) in [("mass", mass), ("planck", planck), ("initial_width", initial_width)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::invalid(name, format!("{v:e} must be finite and > 0")));
            }
        }
        Ok(Self { mass, planck, initial_width })
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn planck(&self) -> T {
        self.planck
    }

    pub fn initial_width(&self) -> T {
        self.initial_width
    }

    pub fn hbar(&self) -> T {
        self.planck / T::TAU()
    }

    /// `E1 = h^2 / (8 m Q0^2)`, the ground energy of the initial well in joules.
    pub fn ground_energy(&self) -> T {
        self.planck * self.planck / (T::lit(8.0) * self.mass * self.initial_width * self.initial_width)
    }

    /// `E1 / Q0` in newtons; multiply a reduced force by this to get SI.
    pub fn force_unit(&self) -> T {
        self.ground_energy() / self.initial_width
    }
}

impl<T: Real> Default for WellConfig<T> {
    fn default() -> Self {
        Self { mass: T::lit(1e-27), planck: T::lit(6.626e-34), initial_width: T::lit(1e-9) }
    }
}

/// Which branch of the piecewise closed form a width ratio falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuenchClass {
    /// `gamma < 1`: the wall moved inward.
    Shrink,
    /// `gamma == 1` within tolerance: nothing changed.
    Identity,
    /// `gamma > 1` and equal to the integer `level` within tolerance.
    ExpandResonant { level: usize },
    ExpandGeneric,
}

/// Width ratio `gamma = Q / Q0` together with the window used to detect
/// integer ratios.
///
/// A negative tolerance switches resonance detection off entirely; the closed
/// form then reports [`Error::DegenerateDenominator`] at exact integers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchRatio<T> {
    gamma: T,
    tolerance: T,
}

impl<T: Real> QuenchRatio<T> {
    pub fn new(gamma: T) -> Result<Self> {
        Self::with_tolerance(gamma, T::lit(DEFAULT_RESONANCE_TOLERANCE))
    }

    pub fn with_tolerance(gamma: T, tolerance: T) -> Result<Self> {
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(Error::invalid("gamma", format!("{gamma:e} must be finite and > 0")));
        }
        if !tolerance.is_finite() {
            return Err(Error::invalid("resonance tolerance", "must be finite"));
        }
        Ok(Self { gamma, tolerance })
    }

    pub fn from_widths(width: T, initial_width: T) -> Result<Self> {
        if !(initial_width > T::zero()) {
            return Err(Error::invalid("initial_width", format!("{initial_width:e} must be > 0")));
        }
        Self::new(width / initial_width)
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    /// New wall position `Q = gamma * Q0` in metres.
    pub fn width(&self, cfg: &WellConfig<T>) -> T {
        self.gamma * cfg.initial_width()
    }

    pub fn class(&self) -> QuenchClass {
        let g = self.gamma;
        if (g - T::one()).abs() <= self.tolerance {
            return QuenchClass::Identity;
        }
        if g < T::one() {
            return QuenchClass::Shrink;
        }
        let nearest = g.round();
        if (g - nearest).abs() <= self.tolerance * nearest {
            let level = nearest.to_usize().expect("rounded gamma fits in usize");
            return QuenchClass::ExpandResonant { level };
        }
        QuenchClass::ExpandGeneric
    }

    fn with_gamma(&self, gamma: T) -> Result<Self> {
        Self::with_tolerance(gamma, self.tolerance)
    }
}

fn check_level(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("level", "levels are numbered from 1"));
    }
    Ok(())
}

/// `E_n(Q) = hbar^2 pi^2 n^2 / (2 m Q^2)` in joules.
pub fn eigen_energy<T: Real>(n: usize, width: T, cfg: &WellConfig<T>) -> Result<T> {
    check_level(n)?;
    if !(width > T::zero()) || !width.is_finite() {
        return Err(Error::invalid("width", format!("{width:e} must be finite and > 0")));
    }
    let hbar = cfg.hbar();
    let k = T::PI() * T::of_usize(n) / width;
    Ok(hbar * hbar * k * k / (T::lit(2.0) * cfg.mass()))
}

/// `sqrt(2/Q) sin(n pi q / Q)` inside the well, zero outside it.
pub fn eigen_wavefunction<T: Real>(n: usize, width: T, q: T) -> T {
    if !(width > T::zero()) || q < T::zero() || q > width {
        return T::zero();
    }
    (T::lit(2.0) / width).sqrt() * (T::of_usize(n) * T::PI() * q / width).sin()
}

/// Overlap `b_n = <Psi_n(Q) | Psi_1(Q0)>` from its closed form.
pub fn expansion_coefficient<T: Real>(n: usize, ratio: &QuenchRatio<T>) -> Result<T> {
    check_level(n)?;
    let g = ratio.gamma();
    let nf = T::of_usize(n);
    let pi = T::PI();
    let two = T::lit(2.0);
    let degenerate = || Error::DegenerateDenominator { n, gamma: g.as_f64() };

    match ratio.class() {
        QuenchClass::Identity => Ok(if n == 1 { T::one() } else { T::zero() }),
        QuenchClass::Shrink => {
            let denom = g * g - nf * nf;
            if denom == T::zero() {
                return Err(degenerate());
            }
            let sign = if n.is_multiple_of(2) { T::one() } else { -T::one() };
            Ok(sign * two * nf * g.sqrt() * (g * pi).sin() / (pi * denom))
        }
        QuenchClass::ExpandResonant { level } if level == n => Ok(g.sqrt().recip()),
        QuenchClass::ExpandResonant { .. } | QuenchClass::ExpandGeneric => {
            let denom = g * g - nf * nf;
            if denom == T::zero() {
                return Err(degenerate());
            }
            Ok(two * g.powf(T::lit(1.5)) * (nf * pi / g).sin() / (pi * denom))
        }
    }
}

/// `rho_n = b_n^2`, the probability of finding the frozen state in level `n`
/// of the new well.
pub fn population<T: Real>(n: usize, ratio: &QuenchRatio<T>) -> Result<T> {
    let b = expansion_coefficient(n, ratio)?;
    Ok(b * b)
}

/// Overlap integral `int_0^min(Q, Q0) Psi_n(Q) Psi_1(Q0) dq` evaluated by
/// quadrature in SI units. Independent of the closed form.
pub fn overlap_oracle<T: Real>(
    n: usize,
    ratio: &QuenchRatio<T>,
    cfg: &WellConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    check_level(n)?;
    let q0 = cfg.initial_width();
    let q = ratio.width(cfg);
    let support = q.min(q0);
    // integrate in the reduced coordinate x = q / support so the absolute
    // tolerance refers to the dimensionless overlap
    integrate(
        |x| {
            let pos = x * support;
            support * eigen_wavefunction(n, q, pos) * eigen_wavefunction(1, q0, pos)
        },
        T::zero(),
        T::one(),
        spec,
    )
}

/// Squared norm of the frozen state that fits inside the new well:
/// `gamma - sin(2 pi gamma) / (2 pi)` for `gamma < 1`, otherwise 1.
pub fn projection_norm<T: Real>(ratio: &QuenchRatio<T>) -> T {
    let g = ratio.gamma();
    if g < T::one() {
        g - (T::TAU() * g).sin() / T::TAU()
    } else {
        T::one()
    }
}

/// Coefficients and populations of the frozen state over levels `1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition<T> {
    ratio: QuenchRatio<T>,
    coefficients: Vec<T>,
    populations: Vec<T>,
    captured: T,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn ratio(&self) -> &QuenchRatio<T> {
        &self.ratio
    }

    pub fn levels(&self) -> usize {
        self.coefficients.len()
    }

    /// `b_1 ..= b_N`, index 0 holding `b_1`.
    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn populations(&self) -> &[T] {
        &self.populations
    }

    /// `sum_{n <= N} rho_n`.
    pub fn captured(&self) -> T {
        self.captured
    }

    /// Level with the largest population (lowest level on ties).
    pub fn peak_level(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.populations.iter().enumerate() {
            if *p > self.populations[best] {
                best = i;
            }
        }
        best + 1
    }
}

pub fn decompose<T: Real>(ratio: &QuenchRatio<T>, levels: usize) -> Result<SpectralDecomposition<T>> {
    if levels == 0 {
        return Err(Error::invalid("levels", "truncation must keep at least one level"));
    }
    let coefficients = (1..=levels).map(|n| expansion_coefficient(n, ratio)).collect::<Result<Vec<_>>>()?;
    let populations: Vec<T> = coefficients.iter().map(|b| *b * *b).collect();
    let captured = populations.iter().fold(T::zero(), |acc, p| acc + *p);
    Ok(SpectralDecomposition { ratio: *ratio, coefficients, populations, captured })
}

/// Post-quench energy in units of `E1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport<T> {
    pub gamma: T,
    pub levels: usize,
    /// `sum rho_n / captured * n^2 / gamma^2`
    pub renormalized: T,
    /// `sum rho_n * n^2 / gamma^2`, without re-normalization. Diverges with
    /// the truncation for `gamma < 1`.
    pub raw: T,
    pub captured: T,
    /// `E1` in joules for the configuration the report was made for.
    pub ground_energy: T,
}

impl<T: Real> EnergyReport<T> {
    pub fn renormalized_joules(&self) -> T {
        self.renormalized * self.ground_energy
    }
}

fn reduced_energy<T: Real>(ratio: &QuenchRatio<T>, levels: usize) -> Result<(T, T, T)> {
    if levels == 0 {
        return Err(Error::invalid("levels", "truncation must keep at least one level"));
    }
    if ratio.class() == QuenchClass::Identity {
        return Ok((T::one(), T::one(), T::one()));
    }
    let g2 = ratio.gamma() * ratio.gamma();
    let mut captured = T::zero();
    let mut raw = T::zero();
    for n in 1..=levels {
        let rho = population(n, ratio)?;
        let nf = T::of_usize(n);
        captured = captured + rho;
        raw = raw + rho * nf * nf / g2;
    }
    assert!(captured > T::zero(), "frozen ground state has no weight on the kept levels");
    Ok((raw / captured, raw, captured))
}

pub fn quench_energy<T: Real>(ratio: &QuenchRatio<T>, levels: usize, cfg: &WellConfig<T>) -> Result<EnergyReport<T>> {
    let (renormalized, raw, captured) = reduced_energy(ratio, levels)?;
    Ok(EnergyReport {
        gamma: ratio.gamma(),
        levels,
        renormalized,
        raw,
        captured,
        ground_energy: cfg.ground_energy(),
    })
}

fn force_stencil<T: Real>(gamma: T, step: T) -> Stencil {
    let nearest = gamma.round();
    if nearest >= T::one() && (gamma - nearest).abs() < T::lit(2.0) * step {
        if gamma >= nearest {
            Stencil::Forward
        } else {
            Stencil::Backward
        }
    } else {
        Stencil::Central
    }
}

/// Wall force `F = -dE'/dgamma` in units of `E1 / Q0`; positive pushes the
/// wall outward.
///
/// Within `2 * step` of an integer ratio the derivative is taken one-sided on
/// the side `gamma` lies on, and at an exact integer from the right.
pub fn matter_wave_force<T: Real>(ratio: &QuenchRatio<T>, levels: usize, step: T) -> Result<T> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::invalid("step", format!("{step:e} must be finite and > 0")));
    }
    let gamma = ratio.gamma();
    let stencil = force_stencil(gamma, step);
    let reach = match stencil {
        Stencil::Central => step,
        Stencil::Backward => T::lit(2.0) * step,
        Stencil::Forward => T::zero(),
    };
    if !(gamma - reach > T::zero()) {
        return Err(Error::invalid("gamma", format!("{gamma:e} leaves the domain with step {step:e}")));
    }
    let energy = |g: T| -> Result<T> { Ok(reduced_energy(&ratio.with_gamma(g)?, levels)?.0) };
    Ok(-try_derivative(energy, gamma, step, stencil)?)
}

/// `(n, rho_n)` for `n = 1..=N`.
pub fn population_scan<T: Real>(ratio: &QuenchRatio<T>, levels: usize) -> Result<Vec<(usize, T)>> {
    let d = decompose(ratio, levels)?;
    Ok(d.populations().iter().enumerate().map(|(i, p)| (i + 1, *p)).collect())
}

/// `(gamma, captured, projection norm)` on a uniform grid.
pub fn captured_scan<T: Real>(gamma_min: T, gamma_max: T, points: usize, levels: usize) -> Result<Vec<(T, T, T)>> {
    uniform_grid(gamma_min, gamma_max, points)?
        .into_iter()
        .map(|g| {
            let ratio = QuenchRatio::new(g)?;
            Ok((g, decompose(&ratio, levels)?.captured(), projection_norm(&ratio)))
        })
        .collect()
}

/// `(gamma, E')` on a uniform grid, `E'` in units of `E1`.
pub fn energy_scan<T: Real>(gamma_min: T, gamma_max: T, points: usize, levels: usize) -> Result<Vec<(T, T)>> {
    check_positive_range(gamma_min, gamma_max)?;
    uniform_grid(gamma_min, gamma_max, points)?
        .into_iter()
        .map(|g| Ok((g, reduced_energy(&QuenchRatio::new(g)?, levels)?.0)))
        .collect()
}

fn check_positive_range<T: Real>(min: T, max: T) -> Result<()> {
    if !(min > T::zero()) {
        return Err(Error::invalid("gamma range", format!("lower bound {min:e} must be > 0")));
    }
    if !(min < max) {
        return Err(Error::invalid("gamma range", format!("{min:e}:{max:e} is empty")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceRow<T> {
    pub gamma: T,
    /// `E'` in units of `E1`.
    pub energy: T,
    /// `F` in units of `E1 / Q0`.
    pub force: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceProfile<T> {
    pub rows: Vec<ForceRow<T>>,
    /// Grid points sitting exactly on an integer ratio; not differentiated.
    pub skipped: Vec<T>,
    pub step: T,
    pub levels: usize,
}

pub fn force_scan<T: Real>(gamma_min: T, gamma_max: T, points: usize, levels: usize, step: T) -> Result<ForceProfile<T>> {
    check_positive_range(gamma_min, gamma_max)?;
    let mut rows = Vec::with_capacity(points);
    let mut skipped = Vec::new();
    for g in uniform_grid(gamma_min, gamma_max, points)? {
        let ratio = QuenchRatio::new(g)?;
        if matches!(ratio.class(), QuenchClass::Identity | QuenchClass::ExpandResonant { .. }) {
            skipped.push(g);
            continue;
        }
        let energy = reduced_energy(&ratio, levels)?.0;
        let force = matter_wave_force(&ratio, levels, step)?;
        rows.push(ForceRow { gamma: g, energy, force });
    }
    Ok(ForceProfile { rows, skipped, step, levels })
}
