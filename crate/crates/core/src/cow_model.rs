//! Mass particle in the looped interferometer, COW style: arm A sits in the
//! field `g`, arm B is accelerated at the same rate. Each arm contributes a
//! phase `φ = S/ħ` and the loop factor is `U = e^{iφ_a} e^{iφ_g}`.
//!
//! With the input `(|0⟩ + |1⟩)/√2` and only `|1⟩` entering the loop, the
//! `|0⟩` coefficient in the infinite-loop limit is `1 / sqrt(2 - U²)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::gauge_phase::{
    action, compose_phases, gauge_identity_residual, gauge_parameter, gauge_parameter_difference,
    ActionKind, FieldConfig, PhaseFactor, PhysicalConstants, Trajectory,
};
use crate::loop_interferometer::{principal_sqrt, LoopFactor};
use crate::scalar::{lit, tol, tolerance, wide, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "CowRecord<F>",
    into = "CowRecord<F>",
    bound(
        serialize = "F: Real + Serialize",
        deserialize = "F: Real + Deserialize<'de>"
    )
)]
pub struct CowConfig<F: Real> {
    mass: F,
    g: F,
    traj_a: Trajectory<F>,
    traj_b: Trajectory<F>,
    constants: PhysicalConstants<F>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CowRecord<F: Real> {
    mass: F,
    g: F,
    hbar: F,
    #[serde(rename = "traj_A")]
    traj_a: Trajectory<F>,
    #[serde(rename = "traj_B")]
    traj_b: Trajectory<F>,
}

impl<F: Real> TryFrom<CowRecord<F>> for CowConfig<F> {
    type Error = Error;

    fn try_from(r: CowRecord<F>) -> Result<Self> {
        let constants = PhysicalConstants::new(r.hbar)?;
        CowConfig::new(r.mass, r.g, r.traj_a, r.traj_b, constants)
    }
}

impl<F: Real> From<CowConfig<F>> for CowRecord<F> {
    fn from(c: CowConfig<F>) -> Self {
        CowRecord {
            mass: c.mass,
            g: c.g,
            hbar: c.constants.hbar(),
            traj_a: c.traj_a,
            traj_b: c.traj_b,
        }
    }
}

impl<F: Real> CowConfig<F> {
    pub fn new(
        mass: F,
        g: F,
        traj_a: Trajectory<F>,
        traj_b: Trajectory<F>,
        constants: PhysicalConstants<F>,
    ) -> Result<Self> {
        ensure_finite("mass", wide(mass))?;
        ensure_finite("g", wide(g))?;
        if mass <= F::zero() {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        for (name, traj) in [("traj_A", &traj_a), ("traj_B", &traj_b)] {
            if traj.mass() != mass {
                return Err(Error::Domain(format!(
                    "{name}.mass ({}) differs from mass ({mass})",
                    traj.mass()
                )));
            }
        }
        Ok(Self {
            mass,
            g,
            traj_a,
            traj_b,
            constants,
        })
    }

    pub fn mass(&self) -> F {
        self.mass
    }

    pub fn g(&self) -> F {
        self.g
    }

    pub fn traj_a(&self) -> &Trajectory<F> {
        &self.traj_a
    }

    pub fn traj_b(&self) -> &Trajectory<F> {
        &self.traj_b
    }

    pub fn constants(&self) -> &PhysicalConstants<F> {
        &self.constants
    }

    /// Region B accelerates with `a = g`.
    pub fn field(&self) -> FieldConfig<F> {
        FieldConfig::equivalent(self.g).expect("g validated at construction")
    }

    /// Both arms follow the same sampled path over the same window.
    pub fn arms_matched(&self) -> bool {
        self.traj_a == self.traj_b
    }
}

/// Arm phases as real angles, before exponentiation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmPhases<F: Real> {
    pub phi_g: F,
    pub phi_a: F,
}

pub fn arm_phases<F: Real>(cfg: &CowConfig<F>) -> Result<ArmPhases<F>> {
    let field = cfg.field();
    let hbar = cfg.constants.hbar();
    Ok(ArmPhases {
        phi_g: action(&cfg.traj_a, &field, ActionKind::Gravity)? / hbar,
        phi_a: action(&cfg.traj_b, &field, ActionKind::Accelerated)? / hbar,
    })
}

/// `U = e^{iφ_a} e^{iφ_g}`, arm A traversed first.
pub fn loop_factor<F: Real>(cfg: &CowConfig<F>) -> Result<LoopFactor<F>> {
    let phases = arm_phases(cfg)?;
    loop_factor_from_phases(&phases)
}

pub fn loop_factor_from_phases<F: Real>(phases: &ArmPhases<F>) -> Result<LoopFactor<F>> {
    let u = compose_phases(&[
        PhaseFactor::from_angle(phases.phi_g)?,
        PhaseFactor::from_angle(phases.phi_a)?,
    ])?;
    LoopFactor::from_phase(u)
}

/// `1 / sqrt(2 - U²)`, the `|0⟩` coefficient once the loop has emptied.
pub fn reflective_amplitude<F: Real>(u: &LoopFactor<F>) -> Result<Complex<F>> {
    let denom = Complex::new(lit::<F>(2.0), F::zero()) - u.value() * u.value();
    let modulus = denom.norm();
    if modulus < tol::<F>(tolerance::POLE) {
        return Err(Error::Pole {
            what: "2 - U^2",
            modulus: wide(modulus),
        });
    }
    Ok(Complex::new(F::one(), F::zero()) / principal_sqrt(denom))
}

pub fn output_amplitude_limit<F: Real>(cfg: &CowConfig<F>) -> Result<Complex<F>> {
    reflective_amplitude(&loop_factor(cfg)?)
}

/// Phase shift `G(λ, t)/ħ` between the regions. Only defined when both arms
/// take the same time to traverse.
pub fn gauge_phase_shift<F: Real>(cfg: &CowConfig<F>, lambda: F, t: F) -> Result<F> {
    let (da, db) = (cfg.traj_a.duration(), cfg.traj_b.duration());
    if (da - db).abs() > tol::<F>(tolerance::EQUAL_DURATION) * da.abs().max(F::one()) {
        return Err(Error::Precondition(format!(
            "arm durations differ: traj_A spans {da}, traj_B spans {db}"
        )));
    }
    Ok(gauge_parameter(cfg.mass, cfg.g, lambda, t)? / cfg.constants.hbar())
}

/// Pointwise gauge-identity residual along arm A.
pub fn gauge_residual<F: Real>(cfg: &CowConfig<F>) -> Result<F> {
    gauge_identity_residual(&cfg.traj_a, cfg.g)
}

/// `|(S_g - S_a) - ΔG| / ħ` with both actions taken along arm A. When the
/// arms are matched this equals `|(φ_g - φ_a) - ΔG/ħ|`.
pub fn integrated_gauge_error<F: Real>(cfg: &CowConfig<F>) -> Result<F> {
    let field = cfg.field();
    let s_g = action(&cfg.traj_a, &field, ActionKind::Gravity)?;
    let s_a = action(&cfg.traj_a, &field, ActionKind::Accelerated)?;
    let dg = gauge_parameter_difference(&cfg.traj_a, cfg.g)?;
    Ok(((s_g - s_a) - dg).abs() / cfg.constants.hbar())
}
