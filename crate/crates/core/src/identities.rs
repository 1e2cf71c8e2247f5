//! Randomized numerical checks of the covering-group identities.
//!
//! Each identity compares two elements of `G_m` built from random
//! samples; the residual is their [`CoverElement::distance`]. Samples draw
//! from a ChaCha stream keyed by `(seed, identity, m, sample)`, so reports
//! do not depend on thread count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cover::{
    make_hyperbolic, make_parabolic, twist_companion, CoverElement, CoverGroup, Ideal, Isometry,
};
use crate::error::{Error, Result};

/// Outcome of one identity at one cover degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub m: u32,
    pub samples: u64,
    /// `null` in JSON when some sample failed outright.
    pub max_residual: f64,
    pub pass: bool,
}

type Check = fn(&CoverGroup, &mut ChaCha8Rng) -> Result<f64>;

/// Every checked identity, in report order.
pub const IDENTITIES: &[(&str, Check)] = &[
    ("J*J = e", j_squared),
    ("J T(0,inf;l) J^-1 = T(0,inf;l)", j_fixes_scaling),
    ("J P(0;l) J^-1 = P(0;-l)", j_flips_parabolic),
    ("J U J^-1 = U^-1", j_inverts_centre),
    ("lev(B C B^-1) = lev(C)", level_conjugation_invariant),
    ("lev(J C J) = -lev(C)", level_j_flip),
    ("lev(F C F^-1) = -lev(C)", level_reversing_flip),
    (
        "(J T(0,inf;sqrt l) U^q)^2 = T(0,inf;l)",
        twisted_square_root,
    ),
    ("(a b) c = a (b c)", associativity),
    ("a a^-1 = e", inverse),
    ("lev(lift(g)) = 0", canonical_level_zero),
    ("lev(a U^k) = lev(a) + k", level_central_shift),
    ("lev(a^-1) = -lev(a)", level_inverse),
    ("c~ c~ = c", companion_square),
];

/// Runs every identity for each degree in `ms`.
pub fn run_identity_checks(
    ms: &[u32],
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<Vec<IdentityReport>> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let mut out = Vec::new();
    for &m in ms {
        let group = CoverGroup::new(m, tol)?;
        for (idx, (name, check)) in IDENTITIES.iter().enumerate() {
            let max_residual = max_over_samples(samples, |s| {
                let mut rng = sample_rng(seed, idx as u64, m, s);
                check(&group, &mut rng).unwrap_or(f64::INFINITY)
            });
            out.push(IdentityReport {
                identity: (*name).to_string(),
                m,
                samples,
                max_residual,
                pass: max_residual <= tol,
            });
        }
    }
    Ok(out)
}

fn max_over_samples(samples: u64, residual: impl Fn(u64) -> f64 + Sync + Send) -> f64 {
    // NaN counts as a failure.
    let clean = |r: f64| if r.is_nan() { f64::INFINITY } else { r };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..samples)
            .into_par_iter()
            .map(|s| clean(residual(s)))
            .reduce(|| 0.0, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..samples).map(|s| clean(residual(s))).fold(0.0, f64::max)
    }
}

fn sample_rng(seed: u64, identity: u64, m: u32, sample: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(identity << 40 | (m as u64 & 0xff) << 32 | (sample & 0xffff_ffff));
    rng
}

fn multiplier(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.25f64.ln()..4f64.ln()).exp()
}

fn non_unit_multiplier(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let l = multiplier(rng);
        if (l.ln()).abs() > 1e-3 {
            return l;
        }
    }
}

fn ideal(rng: &mut ChaCha8Rng) -> Ideal {
    if rng.gen_bool(0.1) {
        Ideal::Infinity
    } else {
        Ideal::Real(rng.gen_range(-2.0..2.0))
    }
}

fn axis(rng: &mut ChaCha8Rng) -> (Ideal, Ideal) {
    loop {
        let (a, b) = (ideal(rng), ideal(rng));
        match (a, b) {
            (Ideal::Real(x), Ideal::Real(y)) if (x - y).abs() >= 0.25 => return (a, b),
            (Ideal::Real(_), Ideal::Infinity) | (Ideal::Infinity, Ideal::Real(_)) => return (a, b),
            _ => {}
        }
    }
}

fn root(group: &CoverGroup, rng: &mut ChaCha8Rng) -> i64 {
    rng.gen_range(0..group.m() as i64)
}

/// A random lift of a random element of `SL(2, R)`.
fn random_preserving(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<CoverElement> {
    let a: f64 = rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let b: f64 = rng.gen_range(-1.5..1.5);
    let c: f64 = rng.gen_range(-1.5..1.5);
    let d = (1.0 + b * c) / a;
    let base = Isometry::from_matrix([[a, b], [c, d]])?;
    Ok(group.lift(&base, root(group, rng)))
}

fn random_j(group: &CoverGroup, rng: &mut ChaCha8Rng) -> CoverElement {
    group.make_j(rng.gen_range(0..group.m()))
}

/// A hyperbolic element at a random level.
fn random_hyperbolic(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<(CoverElement, u32)> {
    let (a, b) = axis(rng);
    let t = make_hyperbolic(a, b, non_unit_multiplier(rng))?;
    let k = root(group, rng);
    let c = group.multiply(&group.canonical_lift(&t)?, &group.central(k))?;
    Ok((c, k as u32))
}

fn scaling(group: &CoverGroup, lambda: f64) -> Result<CoverElement> {
    group.canonical_lift(&make_hyperbolic(0.0.into(), Ideal::Infinity, lambda)?)
}

fn conj(group: &CoverGroup, f: &CoverElement, c: &CoverElement) -> Result<CoverElement> {
    group.multiply(&group.multiply(f, c)?, &group.invert(f)?)
}

/// Gap between `a` and the level-`k` lift of its base.
fn level_gap(group: &CoverGroup, a: &CoverElement, k: i64) -> Result<f64> {
    let expected = group.multiply(&group.canonical_lift(a.base())?, &group.central(k))?;
    let (_, snap) = group.level_with_residual(a)?;
    Ok(a.distance(&expected).max(snap))
}

fn j_squared(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let j = random_j(group, rng);
    Ok(group.multiply(&j, &j)?.distance(&group.identity()))
}

fn j_fixes_scaling(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let j = random_j(group, rng);
    let t = scaling(group, multiplier(rng))?;
    Ok(conj(group, &j, &t)?.distance(&t))
}

fn j_flips_parabolic(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let j = random_j(group, rng);
    let l = rng.gen_range(-3.0..3.0);
    let p = group.canonical_lift(&make_parabolic(0.0, l))?;
    let q = group.canonical_lift(&make_parabolic(0.0, -l))?;
    Ok(conj(group, &j, &p)?.distance(&q))
}

fn j_inverts_centre(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let j = random_j(group, rng);
    let u = group.central(1);
    Ok(conj(group, &j, &u)?.distance(&group.central(-1)))
}

fn level_conjugation_invariant(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let b = random_preserving(group, rng)?;
    let (c, k) = random_hyperbolic(group, rng)?;
    level_gap(group, &conj(group, &b, &c)?, k as i64)
}

fn level_j_flip(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let j = random_j(group, rng);
    let (c, k) = random_hyperbolic(group, rng)?;
    let jcj = group.multiply(&group.multiply(&j, &c)?, &j)?;
    level_gap(group, &jcj, -(k as i64))
}

fn level_reversing_flip(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let f = group.multiply(&random_preserving(group, rng)?, &random_j(group, rng))?;
    let (c, k) = random_hyperbolic(group, rng)?;
    level_gap(group, &conj(group, &f, &c)?, -(k as i64))
}

fn twisted_square_root(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let j = random_j(group, rng);
    let l = multiplier(rng);
    let target = scaling(group, l)?;
    let half = group.multiply(&j, &scaling(group, l.sqrt())?)?;
    let mut worst: f64 = 0.0;
    for q in 0..group.m() as i64 {
        let x = group.multiply(&half, &group.central(q))?;
        worst = worst.max(group.multiply(&x, &x)?.distance(&target));
    }
    Ok(worst)
}

fn random_element(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<CoverElement> {
    let a = random_preserving(group, rng)?;
    if rng.gen_bool(0.5) {
        group.multiply(&a, &random_j(group, rng))
    } else {
        Ok(a)
    }
}

fn associativity(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let a = random_element(group, rng)?;
    let b = random_element(group, rng)?;
    let c = random_element(group, rng)?;
    let left = group.multiply(&group.multiply(&a, &b)?, &c)?;
    let right = group.multiply(&a, &group.multiply(&b, &c)?)?;
    Ok(left.distance(&right))
}

fn inverse(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let a = random_element(group, rng)?;
    let inv = group.invert(&a)?;
    let left = group.multiply(&a, &inv)?.distance(&group.identity());
    let right = group.multiply(&inv, &a)?.distance(&group.identity());
    Ok(left.max(right))
}

fn canonical_level_zero(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let base = if rng.gen_bool(0.5) {
        let (a, b) = axis(rng);
        make_hyperbolic(a, b, non_unit_multiplier(rng))?
    } else {
        let l: f64 = rng.gen_range(0.1..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        make_parabolic(rng.gen_range(-2.0..2.0), l)
    };
    let lift = group.canonical_lift(&base)?;
    let (k, snap) = group.level_with_residual(&lift)?;
    Ok(if k == 0 { snap } else { f64::INFINITY })
}

fn level_central_shift(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (a, k) = random_hyperbolic(group, rng)?;
    let shift = root(group, rng);
    let shifted = group.multiply(&a, &group.central(shift))?;
    level_gap(group, &shifted, k as i64 + shift)
}

fn level_inverse(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (a, k) = random_hyperbolic(group, rng)?;
    level_gap(group, &group.invert(&a)?, -(k as i64))
}

fn companion_square(group: &CoverGroup, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (a, b) = axis(rng);
    let c = make_hyperbolic(a, b, non_unit_multiplier(rng))?;
    let t = twist_companion(&c, group.tol())?;
    Ok(t.compose(&t).projective_distance(&c))
}
