//! Real m-Arf functions represented by their values on a symmetric
//! generating set, and the Arf invariant rules for closed and holed
//! surfaces.
//!
//! A value set stores `sigma(a_i)`, `sigma(b_i)` for the `g~` handles of one
//! half, `sigma(c_1..c_{n-1})` and `sigma(d_1..d_{n-1})`. The primed handle
//! values equal the unprimed ones and are never stored; `sigma(c_n)` is
//! derived from the boundary sum.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::topology::{Decomposition, TopologicalType};

/// The spin order `m >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinModulus(u32);

impl SpinModulus {
    pub fn new(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain(format!("spin modulus must be >= 2, got {m}")));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn is_even(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// Canonical representative of `x` in `[0, m)`.
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    /// Residues `r` with `2r = 0 (mod m)`: `{0}` for odd `m`, `{0, m/2}` for even.
    pub fn two_torsion(self) -> Vec<u32> {
        if self.is_even() {
            vec![0, self.0 / 2]
        } else {
            vec![0]
        }
    }
}

impl fmt::Display for SpinModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Whether a surface of genus `g` carries any real m-Arf function:
/// `g = 1 (mod m)` for odd `m`, `g = 1 (mod m/2)` for even `m`.
///
/// Necessary for every type; non-separating surfaces without ovals need
/// the stronger `g = 1 (mod m)`, which validation enforces through the
/// boundary sum.
pub fn spin_admissible(g: u32, m: SpinModulus) -> bool {
    let period = if m.is_even() { m.get() / 2 } else { m.get() };
    (g as i64 - 1).rem_euclid(period as i64) == 0
}

/// Why a value set fails to define a real m-Arf function.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("genus {g} admits no real {m}-Arf function")]
    GenusInadmissible { g: u32, m: u32 },
    /// `index` is 1-based, matching `c_index`.
    #[error("value {value} on oval c_{index} is not 0 or m/2 (m={m})")]
    OvalValueNotHalfPeriod { index: u32, value: u32, m: u32 },
    #[error("value {value} on twist c_{index} is not 0")]
    TwistValueNonzero { index: u32, value: u32 },
    #[error("oval values sum to {found}, expected 1-g = {expected} (mod m)")]
    SumConstraintViolated { expected: u32, found: u32 },
}

impl ValidationError {
    /// Stable short code for reports.
    pub fn code(&self) -> &'static str {
        match self {
            Self::GenusInadmissible { .. } => "GenusInadmissible",
            Self::OvalValueNotHalfPeriod { .. } => "OvalValueNotHalfPeriod",
            Self::TwistValueNonzero { .. } => "TwistValueNonzero",
            Self::SumConstraintViolated { .. } => "SumConstraintViolated",
        }
    }
}

/// Realness constraints on the stored boundary values `gamma`.
///
/// Shared by [`validate_real_value_set`] and the enumeration hot loop.
pub(crate) fn check_gamma(
    decomp: &Decomposition,
    m: SpinModulus,
    gamma: &[u32],
) -> Result<(), ValidationError> {
    let t = decomp.ttype();
    let mm = m.get();
    if !spin_admissible(t.g(), m) {
        return Err(ValidationError::GenusInadmissible { g: t.g(), m: mm });
    }
    for (i, &value) in gamma.iter().enumerate() {
        let index = i as u32 + 1;
        if index <= t.k() {
            if !(2 * value as u64).is_multiple_of(mm as u64) {
                return Err(ValidationError::OvalValueNotHalfPeriod {
                    index,
                    value,
                    m: mm,
                });
            }
        } else if value != 0 {
            return Err(ValidationError::TwistValueNonzero { index, value });
        }
    }
    let one_minus_g = m.reduce(1 - t.g() as i64);
    if t.is_separating() {
        // sigma(c_n) = (1-g) - sum must again be 0 or m/2.
        let gamma_n = derived_gamma_n(t.g(), m, gamma);
        if !(2 * gamma_n as u64).is_multiple_of(mm as u64) {
            return Err(ValidationError::OvalValueNotHalfPeriod {
                index: decomp.n(),
                value: gamma_n,
                m: mm,
            });
        }
    } else {
        // The ovals c_1..c_k carry the whole boundary sum; for k = 0 the
        // sum is empty and 1-g itself must vanish.
        let found = m.reduce(gamma[..t.k() as usize].iter().map(|&x| x as i64).sum());
        if found != one_minus_g {
            return Err(ValidationError::SumConstraintViolated {
                expected: one_minus_g,
                found,
            });
        }
    }
    Ok(())
}

/// `sigma(c_n) = (1-g) - (gamma_1 + ... + gamma_{n-1}) mod m`.
pub(crate) fn derived_gamma_n(g: u32, m: SpinModulus, gamma: &[u32]) -> u32 {
    let sum: i64 = gamma.iter().map(|&x| x as i64).sum();
    m.reduce(1 - g as i64 - sum)
}

/// Parity of `sum (1 - gamma_i)(1 - delta_i)` on representatives in `[0, m)`,
/// forced to 0 for odd `m`.
pub(crate) fn symmetric_parity(m: SpinModulus, gamma: &[u32], delta: &[u32]) -> u8 {
    if !m.is_even() {
        return 0;
    }
    // (1-x)(1-y) is odd iff x and y are both even.
    let odd_terms = gamma
        .iter()
        .zip(delta)
        .filter(|(&c, &d)| c % 2 == 0 && d % 2 == 0)
        .count();
    (odd_terms % 2) as u8
}

/// Values of an m-Arf function on a symmetric generating set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArfValueSet {
    decomp: Decomposition,
    m: SpinModulus,
    alpha: Vec<u32>,
    beta: Vec<u32>,
    gamma: Vec<u32>,
    delta: Vec<u32>,
}

impl ArfValueSet {
    /// Builds a value set, reducing every entry into `[0, m)`.
    ///
    /// Fails when list lengths do not match `g~` and `n - 1`.
    pub fn new(
        decomp: Decomposition,
        m: SpinModulus,
        alpha: Vec<i64>,
        beta: Vec<i64>,
        gamma: Vec<i64>,
        delta: Vec<i64>,
    ) -> Result<Self> {
        let h = decomp.half_genus() as usize;
        let c = decomp.n() as usize - 1;
        let check = |name: &str, len: usize, want: usize| {
            if len == want {
                Ok(())
            } else {
                Err(Error::Structure(format!(
                    "{name} has {len} entries, decomposition needs {want}"
                )))
            }
        };
        check("alpha", alpha.len(), h)?;
        check("beta", beta.len(), h)?;
        check("gamma", gamma.len(), c)?;
        check("delta", delta.len(), c)?;
        let red = |v: Vec<i64>| v.into_iter().map(|x| m.reduce(x)).collect();
        Ok(Self {
            alpha: red(alpha),
            beta: red(beta),
            gamma: red(gamma),
            delta: red(delta),
            decomp,
            m,
        })
    }

    /// Builds from residues already in `[0, m)`; lengths are trusted.
    pub(crate) fn from_raw(
        decomp: Decomposition,
        m: SpinModulus,
        alpha: Vec<u32>,
        beta: Vec<u32>,
        gamma: Vec<u32>,
        delta: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(alpha.len(), decomp.half_genus() as usize);
        debug_assert_eq!(gamma.len(), decomp.n() as usize - 1);
        Self {
            decomp,
            m,
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomp
    }

    pub fn ttype(&self) -> &TopologicalType {
        self.decomp.ttype()
    }

    pub fn modulus(&self) -> SpinModulus {
        self.m
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn beta(&self) -> &[u32] {
        &self.beta
    }

    pub fn gamma(&self) -> &[u32] {
        &self.gamma
    }

    pub fn delta(&self) -> &[u32] {
        &self.delta
    }

    /// Negates every handle value `alpha_i`, `beta_i` modulo `m`.
    pub fn negate_handles(&self) -> Self {
        let neg = |v: &[u32]| v.iter().map(|&x| self.m.reduce(-(x as i64))).collect();
        Self {
            alpha: neg(&self.alpha),
            beta: neg(&self.beta),
            ..self.clone()
        }
    }
}

/// Checks every realness constraint on `v`.
///
/// For non-separating surfaces the stored `gamma_k` is cross-checked
/// against `(1-g) - (gamma_1 + ... + gamma_{k-1})`; a mismatch is reported
/// as [`ValidationError::SumConstraintViolated`].
pub fn validate_real_value_set(v: &ArfValueSet) -> Result<(), ValidationError> {
    check_gamma(&v.decomp, v.m, &v.gamma)
}

/// Arf invariant of the function with values `v`: `0` for odd `m`,
/// otherwise `sum_{i<n} (1 - gamma_i)(1 - delta_i) mod 2`.
pub fn arf_invariant_symmetric(v: &ArfValueSet) -> u8 {
    symmetric_parity(v.m, &v.gamma, &v.delta)
}

/// A validated value set together with its derived data.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RealArfFunction {
    values: ArfValueSet,
    gamma_n: u32,
    arf_invariant: u8,
}

impl RealArfFunction {
    pub fn values(&self) -> &ArfValueSet {
        &self.values
    }

    /// `sigma(c_n)`.
    pub fn gamma_n(&self) -> u32 {
        self.gamma_n
    }

    pub fn arf_invariant(&self) -> u8 {
        self.arf_invariant
    }
}

/// Completes a valid value set with `sigma(c_n)` and the Arf invariant.
pub fn complete(v: ArfValueSet) -> Result<RealArfFunction, ValidationError> {
    validate_real_value_set(&v)?;
    Ok(RealArfFunction {
        gamma_n: derived_gamma_n(v.ttype().g(), v.m, &v.gamma),
        arf_invariant: arf_invariant_symmetric(&v),
        values: v,
    })
}

/// Boundary-sum condition for an m-Arf function on a genus `g` surface
/// with `n = gamma.len()` holes: `gamma_1 + ... + gamma_n = (2-2g) - n (mod m)`.
///
/// Also requires `alpha` and `beta` to have `g` entries.
pub fn validate_hole_values(
    g: u32,
    m: SpinModulus,
    alpha: &[u32],
    beta: &[u32],
    gamma: &[u32],
) -> bool {
    if alpha.len() != g as usize || beta.len() != g as usize {
        return false;
    }
    let sum: i64 = gamma.iter().map(|&x| x as i64).sum();
    let target = 2 - 2 * g as i64 - gamma.len() as i64;
    (sum - target).rem_euclid(m.get() as i64) == 0
}

/// Arf invariant on a surface with holes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArfInvariantOutcome {
    Zero,
    One,
    /// Genus one: the invariant is a divisor of `m`.
    Divisor(u32),
}

impl ArfInvariantOutcome {
    fn from_parity(p: u64) -> Self {
        if p.is_multiple_of(2) {
            Self::Zero
        } else {
            Self::One
        }
    }
}

/// Arf invariant of the m-Arf function with handle values `alpha`, `beta`
/// and boundary values `gamma` on a genus `g` surface with holes.
///
/// * `g >= 2`, odd `m`: zero.
/// * `g >= 2`, even `m`, some `gamma_i` even: zero.
/// * `g >= 2`, even `m`, all `gamma_i` odd (including no holes): parity of
///   `sum (1 - alpha_i)(1 - beta_i)`.
/// * `g = 1`: `gcd(m, alpha_1, beta_1, gamma_1 + 1, ..., gamma_n + 1)`.
///
/// The boundary sum is the caller's precondition and is not rechecked here;
/// see [`validate_hole_values`].
pub fn arf_invariant_with_holes(
    g: u32,
    m: SpinModulus,
    alpha: &[u32],
    beta: &[u32],
    gamma: &[u32],
) -> Result<ArfInvariantOutcome> {
    if g == 0 {
        return Err(Error::OutOfScope("genus 0 surfaces".into()));
    }
    if alpha.len() != g as usize || beta.len() != g as usize {
        return Err(Error::Structure(format!(
            "need {g} handle values, got {} and {}",
            alpha.len(),
            beta.len()
        )));
    }
    let mm = m.get() as u64;
    if g == 1 {
        let d = gamma
            .iter()
            .map(|&c| c as u64 + 1)
            .chain([alpha[0] as u64, beta[0] as u64])
            .fold(mm, |acc, x| acc.gcd(&x));
        return Ok(ArfInvariantOutcome::Divisor(d as u32));
    }
    if !m.is_even() || gamma.iter().any(|&c| c % 2 == 0) {
        return Ok(ArfInvariantOutcome::Zero);
    }
    let odd_terms = alpha
        .iter()
        .zip(beta)
        .filter(|(&a, &b)| a % 2 == 0 && b % 2 == 0)
        .count() as u64;
    Ok(ArfInvariantOutcome::from_parity(odd_terms))
}

/// Flat wire form of a value set.
#[derive(Serialize, Deserialize)]
struct FlatValueSet {
    m: u32,
    g: u32,
    k: u32,
    eps: u8,
    n: u32,
    alpha: Vec<i64>,
    beta: Vec<i64>,
    gamma: Vec<i64>,
    delta: Vec<i64>,
}

/// Flat wire form of a completed function.
#[derive(Serialize)]
struct FlatFunction<'a> {
    m: u32,
    g: u32,
    k: u32,
    eps: u8,
    n: u32,
    alpha: &'a [u32],
    beta: &'a [u32],
    gamma: &'a [u32],
    delta: &'a [u32],
    gamma_n: u32,
    arf_invariant: u8,
}

impl Serialize for ArfValueSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let t = self.ttype();
        let wide = |v: &[u32]| v.iter().map(|&x| x as i64).collect();
        FlatValueSet {
            m: self.m.get(),
            g: t.g(),
            k: t.k(),
            eps: t.eps(),
            n: self.decomp.n(),
            alpha: wide(&self.alpha),
            beta: wide(&self.beta),
            gamma: wide(&self.gamma),
            delta: wide(&self.delta),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArfValueSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = FlatValueSet::deserialize(d)?;
        let build = || -> Result<Self> {
            let t = TopologicalType::new(f.g, f.k, f.eps)?;
            let decomp = Decomposition::new(t, f.n)?;
            ArfValueSet::new(
                decomp,
                SpinModulus::new(f.m)?,
                f.alpha,
                f.beta,
                f.gamma,
                f.delta,
            )
        };
        build().map_err(D::Error::custom)
    }
}

impl Serialize for RealArfFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = &self.values;
        let t = v.ttype();
        FlatFunction {
            m: v.m.get(),
            g: t.g(),
            k: t.k(),
            eps: t.eps(),
            n: v.decomp.n(),
            alpha: &v.alpha,
            beta: &v.beta,
            gamma: &v.gamma,
            delta: &v.delta,
            gamma_n: self.gamma_n,
            arf_invariant: self.arf_invariant,
        }
        .serialize(s)
    }
}
