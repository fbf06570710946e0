//! The looped interferometer: a beam splitter sends amplitude `alpha` out of
//! the device and `beta` around a closed loop whose round trip multiplies the
//! state by the scalar loop factor `U`.
//!
//! After `n` passes the output is
//!
//! ```text
//! out  = alpha * sqrt((1 - beta^(2n)) / (1 - beta² U²))
//! loop = beta^n U^n
//! ```
//!
//! and for `beta |U| < 1` the loop branch dies out, leaving
//! `out = alpha / sqrt(1 - beta² U²)`. For `beta |U| > 1` the in-loop
//! amplitude grows without bound.
//!
//! All square roots use the principal branch, see [`principal_sqrt`].

use num_complex::Complex;

use crate::error::{ensure_finite, Error, Result};
use crate::gauge_phase::PhaseFactor;
use crate::scalar::{tol, tolerance, wide, Real};

/// Human-readable description of the square-root branch used throughout.
pub const BRANCH_CONVENTION: &str =
    "principal: arg(z) in (-pi, pi], Re sqrt(z) >= 0, sqrt(-x) = +i sqrt(x) for x > 0";

/// Principal complex square root. A signed zero imaginary part is treated as
/// `+0` so negative reals always map onto the positive imaginary axis.
pub fn principal_sqrt<F: Real>(z: Complex<F>) -> Complex<F> {
    let z = if z.im == F::zero() {
        Complex::new(z.re, F::zero())
    } else {
        z
    };
    z.sqrt()
}

/// Real, non-negative split amplitudes with `alpha² + beta² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterConfig<F: Real> {
    alpha: F,
    beta: F,
}

impl<F: Real> BeamSplitterConfig<F> {
    pub fn new(alpha: F, beta: F) -> Result<Self> {
        ensure_finite("alpha", wide(alpha))?;
        ensure_finite("beta", wide(beta))?;
        if alpha < F::zero() || alpha > F::one() || beta < F::zero() || beta > F::one() {
            return Err(Error::Domain(format!(
                "alpha and beta must lie in [0, 1], got alpha = {alpha}, beta = {beta}"
            )));
        }
        let defect = (alpha * alpha + beta * beta - F::one()).abs();
        if defect > tol::<F>(tolerance::SPLIT_NORMALIZATION) {
            return Err(Error::Domain(format!(
                "alpha^2 + beta^2 must equal 1 (off by {:e})",
                wide(defect)
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Derives `beta = sqrt(1 - alpha²)`.
    pub fn from_alpha(alpha: F) -> Result<Self> {
        ensure_finite("alpha", wide(alpha))?;
        if alpha < F::zero() || alpha > F::one() {
            return Err(Error::Domain(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        Self::new(alpha, (F::one() - alpha * alpha).sqrt())
    }

    /// The balanced 50:50 splitter.
    pub fn balanced() -> Self {
        let r = F::FRAC_1_SQRT_2();
        Self { alpha: r, beta: r }
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn beta(&self) -> F {
        self.beta
    }
}

/// Round-trip factor `U` of the loop. Non-unitary values are admitted so the
/// broken-loop case can be studied; `is_unitary` reports which case applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopFactor<F: Real> {
    value: Complex<F>,
    is_unitary: bool,
}

impl<F: Real> LoopFactor<F> {
    pub fn new(value: Complex<F>) -> Result<Self> {
        ensure_finite("U re", wide(value.re))?;
        ensure_finite("U im", wide(value.im))?;
        let is_unitary = (value.norm() - F::one()).abs() <= tol::<F>(tolerance::UNIT_MODULUS);
        Ok(Self { value, is_unitary })
    }

    pub fn from_angle(phi: F) -> Result<Self> {
        ensure_finite("U angle", wide(phi))?;
        Self::new(Complex::from_polar(F::one(), phi))
    }

    pub fn from_phase(phase: PhaseFactor<F>) -> Result<Self> {
        Self::new(phase.value())
    }

    pub fn value(&self) -> Complex<F> {
        self.value
    }

    pub fn modulus(&self) -> F {
        self.value.norm()
    }

    pub fn is_unitary(&self) -> bool {
        self.is_unitary
    }
}

/// Amplitudes on the outgoing port `|Ψ₀⟩` and inside the loop `|Ψ₁⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopOutputState<F: Real> {
    pub out_amp: Complex<F>,
    pub loop_amp: Complex<F>,
}

impl<F: Real> LoopOutputState<F> {
    pub fn norm_sqr(&self) -> F {
        self.out_amp.norm_sqr() + self.loop_amp.norm_sqr()
    }
}

fn pow_exponent(n: u32) -> Result<i32> {
    i32::try_from(2 * u64::from(n)).map_err(|_| Error::Domain(format!("loop count {n} too large")))
}

/// `U^n`, the amplitude of the history that circulates `n` times.
/// `n = 0` is the bare reflection and yields 1.
pub fn amplitude_n_loop<F: Real>(u: &LoopFactor<F>, n: u32) -> Complex<F> {
    u.value.powu(n)
}

/// `1 - beta² U²`, rejecting values within the pole tolerance of zero.
fn series_denominator<F: Real>(
    bs: &BeamSplitterConfig<F>,
    u: &LoopFactor<F>,
) -> Result<Complex<F>> {
    let b2 = bs.beta * bs.beta;
    let denom = Complex::new(F::one(), F::zero()) - u.value * u.value * b2;
    let modulus = denom.norm();
    if modulus < tol::<F>(tolerance::POLE) {
        return Err(Error::Pole {
            what: "1 - beta^2 U^2",
            modulus: wide(modulus),
        });
    }
    Ok(denom)
}

/// Output state after `n` passes. For `n = 0` nothing has been split yet:
/// the whole amplitude `U^0 = 1` sits on the input branch and the outgoing
/// port is empty.
pub fn output_state_n<F: Real>(
    bs: &BeamSplitterConfig<F>,
    u: &LoopFactor<F>,
    n: u32,
) -> Result<LoopOutputState<F>> {
    if n == 0 {
        return Ok(LoopOutputState {
            out_amp: Complex::new(F::zero(), F::zero()),
            loop_amp: amplitude_n_loop(u, 0),
        });
    }
    let denom = series_denominator(bs, u)?;
    let two_n = pow_exponent(n)?;
    let numer = F::one() - bs.beta.powi(two_n);
    let out_amp = principal_sqrt(Complex::new(numer, F::zero()) / denom) * bs.alpha;
    let loop_amp = amplitude_n_loop(u, n) * bs.beta.powi(two_n / 2);
    Ok(LoopOutputState { out_amp, loop_amp })
}

/// Infinite-loop limit; the loop branch is empty.
pub fn output_state_limit<F: Real>(
    bs: &BeamSplitterConfig<F>,
    u: &LoopFactor<F>,
) -> Result<LoopOutputState<F>> {
    let class = classify_series(bs, u);
    if class.kind != SeriesKind::Convergent {
        return Err(Error::Divergent {
            ratio: wide(class.ratio),
        });
    }
    if bs.alpha <= F::zero() {
        return Err(Error::Domain(
            "alpha must be positive for the infinite-loop limit".into(),
        ));
    }
    let denom = series_denominator(bs, u)?;
    Ok(LoopOutputState {
        out_amp: Complex::new(bs.alpha, F::zero()) / principal_sqrt(denom),
        loop_amp: Complex::new(F::zero(), F::zero()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    Convergent,
    Marginal,
    Divergent,
}

impl SeriesKind {
    pub fn label(&self) -> &'static str {
        match self {
            SeriesKind::Convergent => "CONVERGENT",
            SeriesKind::Marginal => "MARGINAL",
            SeriesKind::Divergent => "DIVERGENT",
        }
    }
}

/// Convergence verdict of the loop series together with the independent
/// unitarity signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesClassification<F: Real> {
    pub kind: SeriesKind,
    pub unitary: bool,
    /// `beta * |U|`, the modulus of the per-pass ratio.
    pub ratio: F,
}

pub fn classify_series<F: Real>(
    bs: &BeamSplitterConfig<F>,
    u: &LoopFactor<F>,
) -> SeriesClassification<F> {
    let ratio = bs.beta * u.modulus();
    let band = tol::<F>(tolerance::MARGINAL);
    let kind = if ratio < F::one() - band {
        SeriesKind::Convergent
    } else if (ratio - F::one()).abs() <= band {
        SeriesKind::Marginal
    } else {
        SeriesKind::Divergent
    };
    SeriesClassification {
        kind,
        unitary: u.is_unitary,
        ratio,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow<F: Real> {
    pub n: u32,
    pub state: LoopOutputState<F>,
    /// `|out_amp(n) - out_amp(∞)|`; present only for convergent series.
    pub distance: Option<F>,
}

/// Partial-sum states for `n = 1..=n_max` with their distance to the limit.
pub fn convergence_trace<F: Real>(
    bs: &BeamSplitterConfig<F>,
    u: &LoopFactor<F>,
    n_max: u32,
) -> Result<Vec<TraceRow<F>>> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let limit = match classify_series(bs, u).kind {
        SeriesKind::Convergent if bs.alpha > F::zero() => Some(output_state_limit(bs, u)?),
        _ => None,
    };
    (1..=n_max)
        .map(|n| {
            let state = output_state_n(bs, u, n)?;
            let distance = limit.map(|l| (state.out_amp - l.out_amp).norm());
            Ok(TraceRow { n, state, distance })
        })
        .collect()
}

/// Loop-factor modulus `|U| = 1 / beta` at which the series stops converging.
pub fn divergence_threshold<F: Real>(bs: &BeamSplitterConfig<F>) -> F {
    if bs.beta > F::zero() {
        F::one() / bs.beta
    } else {
        F::infinity()
    }
}
