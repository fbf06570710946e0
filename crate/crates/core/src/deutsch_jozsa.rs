//! Deutsch-Jozsa on a state vector, with a gravitational phase `e^{iφ_g}`
//! imprinted on every `|1⟩` branch between the oracle and the final
//! Hadamard layer.
//!
//! Basis index `x` is the big-endian reading of the qubit string: qubit 0 is
//! the most significant bit. The perturbation is diagonal,
//! `|x⟩ ↦ e^{iφ_g w(x)} |x⟩` with `w` the Hamming weight, so it commutes with
//! the oracle. For a constant function the probability of reading `|0…0⟩`
//! falls as `cos^{2n}(φ_g/2)` and reaches zero at `φ_g = π`.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::scalar::{lit, tol, tolerance, wide, Real};

/// Largest register simulated.
pub const MAX_REGISTER_QUBITS: usize = 20;
/// Largest tree enumerated path by path.
pub const MAX_PATH_SUM_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionClass {
    Constant,
    Balanced,
    /// Neither constant nor balanced; outside the Deutsch-Jozsa promise.
    Other,
}

/// The two answers Deutsch-Jozsa can give.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Constant,
    Balanced,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Constant => "Constant",
            Verdict::Balanced => "Balanced",
        })
    }
}

/// Truth table of `f: {0,1}^n → {0,1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FunctionRecord", into = "FunctionRecord")]
pub struct BooleanFunction {
    n: usize,
    table: Vec<bool>,
}

/// On-disk form: `{"n": 3, "table": "3c"}` with the `2^n` bits packed as a
/// hex integer, basis index 0 in the most significant bit.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionRecord {
    n: usize,
    table: String,
}

impl TryFrom<FunctionRecord> for BooleanFunction {
    type Error = Error;

    fn try_from(r: FunctionRecord) -> Result<Self> {
        BooleanFunction::from_hex(r.n, &r.table)
    }
}

impl From<BooleanFunction> for FunctionRecord {
    fn from(f: BooleanFunction) -> Self {
        FunctionRecord {
            n: f.n,
            table: f.to_hex(),
        }
    }
}

fn check_qubits(n: usize, cap: usize) -> Result<()> {
    if n == 0 || n > cap {
        return Err(Error::Domain(format!(
            "qubit count must be in 1..={cap}, got {n}"
        )));
    }
    Ok(())
}

impl BooleanFunction {
    pub fn new(n: usize, table: Vec<bool>) -> Result<Self> {
        check_qubits(n, MAX_REGISTER_QUBITS)?;
        if table.len() != 1 << n {
            return Err(Error::Domain(format!(
                "truth table for n = {n} needs {} entries, got {}",
                1usize << n,
                table.len()
            )));
        }
        Ok(Self { n, table })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        check_qubits(n, MAX_REGISTER_QUBITS)?;
        Self::new(n, (0..1usize << n).map(f).collect())
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        check_qubits(n, MAX_REGISTER_QUBITS)?;
        let len = 1usize << n;
        let digits = len.div_ceil(4);
        let hex = hex.trim();
        if hex.len() != digits {
            return Err(Error::Domain(format!(
                "table for n = {n} needs {digits} hex digits, got {}",
                hex.len()
            )));
        }
        let mut bits = Vec::with_capacity(digits * 4);
        for ch in hex.chars() {
            let d = ch
                .to_digit(16)
                .ok_or_else(|| Error::Domain(format!("invalid hex digit {ch:?} in table")))?;
            bits.extend((0..4).rev().map(|k| (d >> k) & 1 == 1));
        }
        let pad = digits * 4 - len;
        if bits[..pad].iter().any(|&b| b) {
            return Err(Error::Domain(
                "padding bits of the table must be zero".into(),
            ));
        }
        Self::new(n, bits.split_off(pad))
    }

    pub fn to_hex(&self) -> String {
        let len = self.table.len();
        let pad = len.div_ceil(4) * 4 - len;
        let bits: Vec<bool> = std::iter::repeat_n(false, pad)
            .chain(self.table.iter().copied())
            .collect();
        bits.chunks(4)
            .map(|c| {
                let d = c.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
                char::from_digit(d, 16).expect("nibble")
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn eval(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn ones(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    pub fn class(&self) -> FunctionClass {
        let ones = self.ones();
        if ones == 0 || ones == self.table.len() {
            FunctionClass::Constant
        } else if ones == self.table.len() / 2 {
            FunctionClass::Balanced
        } else {
            FunctionClass::Other
        }
    }

    /// The class, provided the function satisfies the constant-or-balanced
    /// promise.
    pub fn promised_class(&self) -> Result<Verdict> {
        match self.class() {
            FunctionClass::Constant => Ok(Verdict::Constant),
            FunctionClass::Balanced => Ok(Verdict::Balanced),
            FunctionClass::Other => Err(Error::Domain(format!(
                "function is neither constant nor balanced ({} ones of {})",
                self.ones(),
                self.table.len()
            ))),
        }
    }

    /// `1 - f`.
    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            table: self.table.iter().map(|b| !b).collect(),
        }
    }
}

/// `2^n` complex amplitudes of unit total norm.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRegister<F: Real> {
    n: usize,
    amps: Vec<Complex<F>>,
}

impl<F: Real> QuantumRegister<F> {
    pub fn new(n: usize, amps: Vec<Complex<F>>) -> Result<Self> {
        check_qubits(n, MAX_REGISTER_QUBITS)?;
        if amps.len() != 1 << n {
            return Err(Error::Domain(format!(
                "register of {n} qubits needs {} amplitudes, got {}",
                1usize << n,
                amps.len()
            )));
        }
        let norm: F = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - F::one()).abs() > tol::<F>(tolerance::REGISTER_NORM) {
            return Err(Error::Domain(format!(
                "register norm is {norm}, expected 1"
            )));
        }
        Ok(Self { n, amps })
    }

    /// Computational basis state `|x⟩`.
    pub fn basis(n: usize, x: usize) -> Result<Self> {
        check_qubits(n, MAX_REGISTER_QUBITS)?;
        if x >= 1 << n {
            return Err(Error::Domain(format!(
                "basis index {x} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![Complex::new(F::zero(), F::zero()); 1 << n];
        amps[x] = Complex::new(F::one(), F::zero());
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Complex<F>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> F {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Phase `φ_g` imprinted on every `|1⟩` branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationConfig<F: Real> {
    phi_g: F,
}

impl<F: Real> PerturbationConfig<F> {
    pub fn new(phi_g: F) -> Result<Self> {
        ensure_finite("phi_g", wide(phi_g))?;
        Ok(Self { phi_g })
    }

    pub fn none() -> Self {
        Self { phi_g: F::zero() }
    }

    pub fn phi_g(&self) -> F {
        self.phi_g
    }
}

/// `H^{⊗n} |0…0⟩`: every amplitude equal to `2^{-n/2}`.
pub fn uniform_superposition<F: Real>(n: usize) -> Result<QuantumRegister<F>> {
    check_qubits(n, MAX_REGISTER_QUBITS)?;
    let amp = lit::<F>(2f64.powf(-(n as f64) / 2.0));
    Ok(QuantumRegister {
        n,
        amps: vec![Complex::new(amp, F::zero()); 1 << n],
    })
}

/// `|x⟩ ↦ (-1)^{f(x)} |x⟩`.
pub fn apply_oracle<F: Real>(
    reg: &QuantumRegister<F>,
    f: &BooleanFunction,
) -> Result<QuantumRegister<F>> {
    if reg.n != f.n {
        return Err(Error::Domain(format!(
            "register has {} qubits but the function takes {}",
            reg.n, f.n
        )));
    }
    let amps = reg
        .amps
        .iter()
        .zip(&f.table)
        .map(|(&a, &bit)| if bit { -a } else { a })
        .collect();
    Ok(QuantumRegister { n: reg.n, amps })
}

/// `|x⟩ ↦ e^{iφ_g w(x)} |x⟩`.
pub fn apply_perturbation<F: Real>(
    reg: &QuantumRegister<F>,
    p: &PerturbationConfig<F>,
) -> QuantumRegister<F> {
    // One phase per possible Hamming weight.
    let phases: Vec<Complex<F>> = (0..=reg.n)
        .map(|w| Complex::from_polar(F::one(), p.phi_g * lit(w as f64)))
        .collect();
    let amps = reg
        .amps
        .iter()
        .enumerate()
        .map(|(x, &a)| a * phases[x.count_ones() as usize])
        .collect();
    QuantumRegister { n: reg.n, amps }
}

/// Normalized Walsh-Hadamard transform on all qubits.
pub fn hadamard_all<F: Real>(reg: &QuantumRegister<F>) -> QuantumRegister<F> {
    let mut amps = reg.amps.clone();
    let s = F::FRAC_1_SQRT_2();
    let mut half = 1;
    while half < amps.len() {
        for block in amps.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = (x + y) * s;
                *b = (x - y) * s;
            }
        }
        half *= 2;
    }
    QuantumRegister { n: reg.n, amps }
}

pub fn prob_all_zero<F: Real>(reg: &QuantumRegister<F>) -> F {
    reg.amps[0].norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DjOutcome<F: Real> {
    pub prob_zero: F,
    pub verdict: Verdict,
}

/// Probability above which a run reports `Constant`.
pub fn verdict_threshold<F: Real>() -> F {
    lit(0.5)
}

pub fn verdict_for<F: Real>(prob_zero: F) -> Verdict {
    if prob_zero > verdict_threshold() {
        Verdict::Constant
    } else {
        Verdict::Balanced
    }
}

/// Hadamards, oracle, perturbation, Hadamards, then read `P(|0…0⟩)`.
pub fn run_dj<F: Real>(f: &BooleanFunction, p: &PerturbationConfig<F>) -> Result<DjOutcome<F>> {
    f.promised_class()?;
    let reg = uniform_superposition::<F>(f.n)?;
    let reg = apply_oracle(&reg, f)?;
    let reg = apply_perturbation(&reg, p);
    let reg = hadamard_all(&reg);
    let prob_zero = prob_all_zero(&reg);
    Ok(DjOutcome {
        prob_zero,
        verdict: verdict_for(prob_zero),
    })
}

/// `P(|0…0⟩)` summed path by path over the binary tree: each level splits
/// into a 0-branch and a phased 1-branch, each leaf carries the oracle sign.
pub fn path_sum_prob_zero<F: Real>(f: &BooleanFunction, p: &PerturbationConfig<F>) -> Result<F> {
    if f.n > MAX_PATH_SUM_QUBITS {
        return Err(Error::Resource(format!(
            "path enumeration limited to {MAX_PATH_SUM_QUBITS} qubits, got {}",
            f.n
        )));
    }
    let one_branch = Complex::from_polar(F::one(), p.phi_g);
    let amplitude = descend(f, 0, 0, Complex::new(F::one(), F::zero()), one_branch);
    let scale = lit::<F>(2f64.powi(-(f.n as i32)));
    Ok((amplitude * scale).norm_sqr())
}

fn descend<F: Real>(
    f: &BooleanFunction,
    depth: usize,
    prefix: usize,
    phase: Complex<F>,
    one_branch: Complex<F>,
) -> Complex<F> {
    if depth == f.n {
        return if f.eval(prefix) { -phase } else { phase };
    }
    let zero = descend(f, depth + 1, prefix << 1, phase, one_branch);
    let one = descend(
        f,
        depth + 1,
        (prefix << 1) | 1,
        phase * one_branch,
        one_branch,
    );
    zero + one
}
