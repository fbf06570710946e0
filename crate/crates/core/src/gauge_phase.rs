//! Lagrangians, actions along sampled paths, the gauge parameter linking the
//! gravitational and accelerated frames, and U(1) phase composition.
//!
//! Region A carries a uniform field `g` with
//! `L_g = m λ̇²/2 - m g λ`; region B is a gravity-free frame accelerated at
//! rate `a` with `L_a = m (λ̇ + a t)²/2`. When `a = g` the two differ by the
//! total time derivative of
//!
//! ```text
//! G(λ, t) = -m g λ t - m g² t³ / 6
//! ```
//!
//! so the actions along any path differ by the endpoint difference of `G`.

use std::ops::Mul;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::scalar::{lit, tol, tolerance, wide, Real};

/// Physical constants. Natural units (`hbar = 1`) by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<F: Real> {
    hbar: F,
}

impl<F: Real> PhysicalConstants<F> {
    pub fn new(hbar: F) -> Result<Self> {
        ensure_finite("hbar", wide(hbar))?;
        if hbar <= F::zero() {
            return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { hbar })
    }

    pub fn hbar(&self) -> F {
        self.hbar
    }
}

impl<F: Real> Default for PhysicalConstants<F> {
    fn default() -> Self {
        Self { hbar: F::one() }
    }
}

/// A path `λ(t)` sampled on a uniform time grid from `t_start` to `t_end`
/// inclusive, carried by a particle of the given mass.
///
/// The grid is implied by the endpoints and the sample count, so it is
/// uniform by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "TrajectoryRecord<F>",
    into = "TrajectoryRecord<F>",
    bound(
        serialize = "F: Real + Serialize",
        deserialize = "F: Real + Deserialize<'de>"
    )
)]
pub struct Trajectory<F: Real> {
    t_start: F,
    t_end: F,
    mass: F,
    positions: Vec<F>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryRecord<F> {
    t_start: F,
    t_end: F,
    mass: F,
    positions: Vec<F>,
}

impl<F: Real> TryFrom<TrajectoryRecord<F>> for Trajectory<F> {
    type Error = Error;

    fn try_from(r: TrajectoryRecord<F>) -> Result<Self> {
        Trajectory::new(r.t_start, r.t_end, r.mass, r.positions)
    }
}

impl<F: Real> From<Trajectory<F>> for TrajectoryRecord<F> {
    fn from(t: Trajectory<F>) -> Self {
        TrajectoryRecord {
            t_start: t.t_start,
            t_end: t.t_end,
            mass: t.mass,
            positions: t.positions,
        }
    }
}

impl<F: Real> Trajectory<F> {
    pub fn new(t_start: F, t_end: F, mass: F, positions: Vec<F>) -> Result<Self> {
        ensure_finite("t_start", wide(t_start))?;
        ensure_finite("t_end", wide(t_end))?;
        ensure_finite("mass", wide(mass))?;
        if t_end <= t_start {
            return Err(Error::Domain(format!(
                "t_end ({t_end}) must exceed t_start ({t_start})"
            )));
        }
        if mass <= F::zero() {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        if positions.len() < 3 {
            return Err(Error::Domain(format!(
                "at least 3 samples required, got {}",
                positions.len()
            )));
        }
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("positions[{i}] is not finite")));
        }
        let traj = Self {
            t_start,
            t_end,
            mass,
            positions,
        };
        // A step that underflows against the endpoints cannot represent a
        // uniform grid.
        let h = traj.step();
        let last = t_start + h * lit((traj.len() - 1) as f64);
        if h <= F::zero()
            || h.is_nan()
            || (last - t_end).abs()
                > tol::<F>(tolerance::GRID_UNIFORMITY) * t_end.abs().max(F::one())
        {
            return Err(Error::Domain(
                "time grid is not uniform to working precision".into(),
            ));
        }
        Ok(traj)
    }

    /// Samples `path` at `samples` evenly spaced times.
    pub fn sample(
        t_start: F,
        t_end: F,
        mass: F,
        samples: usize,
        path: impl Fn(F) -> F,
    ) -> Result<Self> {
        if samples < 3 {
            return Err(Error::Domain(format!(
                "at least 3 samples required, got {samples}"
            )));
        }
        let span = t_end - t_start;
        let last = lit::<F>((samples - 1) as f64);
        let positions = (0..samples)
            .map(|i| path(t_start + span * lit::<F>(i as f64) / last))
            .collect();
        Self::new(t_start, t_end, mass, positions)
    }

    pub fn t_start(&self) -> F {
        self.t_start
    }

    pub fn t_end(&self) -> F {
        self.t_end
    }

    pub fn mass(&self) -> F {
        self.mass
    }

    pub fn positions(&self) -> &[F] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn duration(&self) -> F {
        self.t_end - self.t_start
    }

    /// Grid spacing.
    pub fn step(&self) -> F {
        self.duration() / lit((self.len() - 1) as f64)
    }

    pub fn time(&self, i: usize) -> F {
        self.t_start + self.duration() * lit::<F>(i as f64) / lit((self.len() - 1) as f64)
    }

    pub fn times(&self) -> impl Iterator<Item = F> + '_ {
        (0..self.len()).map(move |i| self.time(i))
    }

    pub fn start_position(&self) -> F {
        self.positions[0]
    }

    pub fn end_position(&self) -> F {
        self.positions[self.len() - 1]
    }
}

/// Field strengths of the two regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig<F: Real> {
    g: F,
    a: F,
}

impl<F: Real> FieldConfig<F> {
    pub fn new(g: F, a: F) -> Result<Self> {
        ensure_finite("g", wide(g))?;
        ensure_finite("a", wide(a))?;
        Ok(Self { g, a })
    }

    /// Region B accelerates at the same rate `g` that acts in region A.
    pub fn equivalent(g: F) -> Result<Self> {
        Self::new(g, g)
    }

    pub fn g(&self) -> F {
        self.g
    }

    pub fn a(&self) -> F {
        self.a
    }

    pub fn is_equivalent(&self) -> bool {
        self.g.abs() == self.a.abs()
    }
}

/// Which Lagrangian an action is integrated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionKind {
    /// Region A: `m λ̇²/2 - m g λ`.
    Gravity,
    /// Region B: `m (λ̇ + a t)²/2`.
    Accelerated,
}

fn check_mass<F: Real>(m: F) -> Result<()> {
    ensure_finite("mass", wide(m))?;
    if m <= F::zero() {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    Ok(())
}

pub fn lagrangian_gravity<F: Real>(m: F, g: F, lambda: F, lambda_dot: F) -> Result<F> {
    check_mass(m)?;
    ensure_finite("g", wide(g))?;
    ensure_finite("lambda", wide(lambda))?;
    ensure_finite("lambda_dot", wide(lambda_dot))?;
    let half = lit::<F>(0.5);
    Ok(half * m * lambda_dot * lambda_dot - m * g * lambda)
}

pub fn lagrangian_accelerated<F: Real>(m: F, a: F, lambda_dot: F, t: F) -> Result<F> {
    check_mass(m)?;
    ensure_finite("a", wide(a))?;
    ensure_finite("lambda_dot", wide(lambda_dot))?;
    ensure_finite("t", wide(t))?;
    let v = lambda_dot + a * t;
    Ok(lit::<F>(0.5) * m * v * v)
}

/// Second-order finite differences on a uniform grid: central differences
/// inside, one-sided three-point stencils at both ends.
pub fn differentiate<F: Real>(samples: &[F], h: F) -> Result<Vec<F>> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::Domain(format!(
            "differencing needs at least 3 samples, got {n}"
        )));
    }
    if h <= F::zero() || !h.is_finite() {
        return Err(Error::Domain(format!(
            "grid spacing must be positive, got {h}"
        )));
    }
    let two_h = h + h;
    let three = lit::<F>(3.0);
    let four = lit::<F>(4.0);
    let mut out = Vec::with_capacity(n);
    out.push((-three * samples[0] + four * samples[1] - samples[2]) / two_h);
    out.extend(samples.windows(3).map(|w| (w[2] - w[0]) / two_h));
    out.push((three * samples[n - 1] - four * samples[n - 2] + samples[n - 3]) / two_h);
    Ok(out)
}

/// Velocity `λ̇` at every sample of the trajectory.
pub fn velocity_profile<F: Real>(traj: &Trajectory<F>) -> Result<Vec<F>> {
    differentiate(traj.positions(), traj.step())
}

/// Integrates uniformly spaced samples: composite Simpson when the sample
/// count is odd, composite trapezoid otherwise.
pub fn integrate_samples<F: Real>(values: &[F], h: F) -> Result<F> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Domain(format!(
            "quadrature needs at least 2 samples, got {n}"
        )));
    }
    if n % 2 == 1 {
        let interior: F = values[1..n - 1]
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if i % 2 == 0 {
                    lit::<F>(4.0) * v
                } else {
                    lit::<F>(2.0) * v
                }
            })
            .sum();
        Ok(h / lit(3.0) * (values[0] + interior + values[n - 1]))
    } else {
        let interior: F = values[1..n - 1].iter().copied().sum();
        Ok(h * (lit::<F>(0.5) * (values[0] + values[n - 1]) + interior))
    }
}

/// Action `∫ L dt` over the trajectory with the Lagrangian chosen by `kind`.
pub fn action<F: Real>(
    traj: &Trajectory<F>,
    field: &FieldConfig<F>,
    kind: ActionKind,
) -> Result<F> {
    let velocity = velocity_profile(traj)?;
    let m = traj.mass();
    let integrand = traj
        .positions()
        .iter()
        .zip(&velocity)
        .enumerate()
        .map(|(i, (&lambda, &lambda_dot))| match kind {
            ActionKind::Gravity => lagrangian_gravity(m, field.g(), lambda, lambda_dot),
            ActionKind::Accelerated => {
                lagrangian_accelerated(m, field.a(), lambda_dot, traj.time(i))
            }
        })
        .collect::<Result<Vec<F>>>()?;
    integrate_samples(&integrand, traj.step())
}

/// `G(λ, t) = -m g λ t - m g² t³ / 6`.
pub fn gauge_parameter<F: Real>(m: F, g: F, lambda: F, t: F) -> Result<F> {
    check_mass(m)?;
    ensure_finite("g", wide(g))?;
    ensure_finite("lambda", wide(lambda))?;
    ensure_finite("t", wide(t))?;
    Ok(-m * g * lambda * t - m * g * g * t * t * t / lit(6.0))
}

/// Total time derivative of `G` along a path: `∂G/∂t + λ̇ ∂G/∂λ`.
fn gauge_parameter_rate<F: Real>(m: F, g: F, lambda: F, lambda_dot: F, t: F) -> F {
    let d_dt = -m * g * lambda - lit::<F>(0.5) * m * g * g * t * t;
    let d_dlambda = -m * g * t;
    d_dt + lambda_dot * d_dlambda
}

/// `G(λ_end, t_end) - G(λ_start, t_start)` for the trajectory.
pub fn gauge_parameter_difference<F: Real>(traj: &Trajectory<F>, g: F) -> Result<F> {
    let m = traj.mass();
    Ok(gauge_parameter(m, g, traj.end_position(), traj.t_end())?
        - gauge_parameter(m, g, traj.start_position(), traj.t_start())?)
}

/// Largest pointwise violation of `L_g = L_a + dG/dt` along the trajectory,
/// with the accelerated frame at `a = g` and `λ̇` taken from
/// [`velocity_profile`].
pub fn gauge_identity_residual<F: Real>(traj: &Trajectory<F>, g: F) -> Result<F> {
    let field = FieldConfig::equivalent(g)?;
    let velocity = velocity_profile(traj)?;
    let m = traj.mass();
    let mut worst = F::zero();
    for (i, (&lambda, &lambda_dot)) in traj.positions().iter().zip(&velocity).enumerate() {
        let t = traj.time(i);
        let lg = lagrangian_gravity(m, field.g(), lambda, lambda_dot)?;
        let la = lagrangian_accelerated(m, field.a(), lambda_dot, t)?;
        let rate = gauge_parameter_rate(m, g, lambda, lambda_dot, t);
        worst = worst.max((lg - (la + rate)).abs());
    }
    Ok(worst)
}

/// A U(1) element `e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFactor<F: Real> {
    value: Complex<F>,
    non_unitary: bool,
}

impl<F: Real> PhaseFactor<F> {
    /// Strict constructor: rejects values whose modulus is not 1.
    pub fn new(value: Complex<F>) -> Result<Self> {
        ensure_finite("phase re", wide(value.re))?;
        ensure_finite("phase im", wide(value.im))?;
        let modulus = value.norm();
        if (modulus - F::one()).abs() > tol::<F>(tolerance::UNIT_MODULUS) {
            return Err(Error::NonUnitary {
                modulus: wide(modulus),
            });
        }
        Ok(Self {
            value,
            non_unitary: false,
        })
    }

    /// Admits any complex value. Only for experiments that model a broken
    /// (non-unitary) loop; the result is tagged as such.
    pub fn unchecked(value: Complex<F>) -> Self {
        Self {
            value,
            non_unitary: true,
        }
    }

    pub fn from_angle(phi: F) -> Result<Self> {
        ensure_finite("phase angle", wide(phi))?;
        Ok(Self {
            value: Complex::from_polar(F::one(), phi),
            non_unitary: false,
        })
    }

    pub fn identity() -> Self {
        Self {
            value: Complex::new(F::one(), F::zero()),
            non_unitary: false,
        }
    }

    pub fn value(&self) -> Complex<F> {
        self.value
    }

    /// Principal angle in `(-π, π]`.
    pub fn angle(&self) -> F {
        self.value.arg()
    }

    pub fn modulus(&self) -> F {
        self.value.norm()
    }

    /// Whether this factor came from [`PhaseFactor::unchecked`].
    pub fn is_tagged_non_unitary(&self) -> bool {
        self.non_unitary
    }

    pub fn is_unit_modulus(&self) -> bool {
        (self.modulus() - F::one()).abs() <= tol::<F>(tolerance::UNIT_MODULUS)
    }
}

impl<F: Real> Mul for PhaseFactor<F> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self {
            value: self.value * rhs.value,
            non_unitary: self.non_unitary || rhs.non_unitary,
        }
    }
}

/// `e^{iS/ħ}`.
pub fn phase_from_action<F: Real>(
    action: F,
    constants: &PhysicalConstants<F>,
) -> Result<PhaseFactor<F>> {
    ensure_finite("action", wide(action))?;
    PhaseFactor::from_angle(action / constants.hbar())
}

/// Ordered product `U_n ⋯ U_2 U_1` of gauge factors, `factors[0]` acting
/// first. The product is projected back onto the unit circle.
pub fn compose_phases<F: Real>(factors: &[PhaseFactor<F>]) -> Result<PhaseFactor<F>> {
    if let Some(bad) = factors.iter().find(|f| !f.is_unit_modulus()) {
        return Err(Error::NonUnitary {
            modulus: wide(bad.modulus()),
        });
    }
    let product = factors
        .iter()
        .fold(Complex::new(F::one(), F::zero()), |acc, f| f.value * acc);
    Ok(PhaseFactor {
        value: product / product.norm(),
        non_unitary: false,
    })
}
