//! Exhaustive enumeration and counting of real m-Arf functions.
//!
//! The candidate space ranges over every handle value `alpha_i, beta_i`,
//! every bridge value `delta_i`, the 2-torsion residues on the stored ovals
//! and zero on the stored twists. Each candidate is filtered through the
//! same validation used for user input, so counts are an independent check
//! on the closed forms.

use std::io::Write;
use std::ops::{Add, AddAssign, Range};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arf::{
    check_gamma, derived_gamma_n, spin_admissible, symmetric_parity, ArfValueSet, RealArfFunction,
    SpinModulus,
};
use crate::error::{Error, Result};
use crate::topology::{
    admissible_n_values, canonical_decomposition, Decomposition, TopologicalType,
};

/// Mixed-radix description of all candidate value sets for one
/// decomposition, in lexicographic order `(alpha, beta, gamma, delta)`.
#[derive(Debug, Clone)]
pub struct CandidateSpace {
    decomp: Decomposition,
    m: SpinModulus,
    choices: Vec<Vec<u32>>,
    size: u64,
}

impl CandidateSpace {
    pub fn new(decomp: Decomposition, m: SpinModulus) -> Result<Self> {
        let h = decomp.half_genus() as usize;
        let c = decomp.n() as usize - 1;
        let k = decomp.ttype().k() as usize;
        let full: Vec<u32> = (0..m.get()).collect();
        let mut choices = vec![full.clone(); 2 * h];
        choices.extend((0..c).map(|i| if i < k { m.two_torsion() } else { vec![0] }));
        choices.extend(std::iter::repeat_n(full, c));
        let size = choices
            .iter()
            .try_fold(1u64, |acc, ch| acc.checked_mul(ch.len() as u64))
            .ok_or_else(|| Error::TooLarge(format!("{} with m={m}", decomp.ttype())))?;
        Ok(Self {
            decomp,
            m,
            choices,
            size,
        })
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomp
    }

    pub fn modulus(&self) -> SpinModulus {
        self.m
    }

    /// Number of candidates.
    pub fn size(&self) -> u64 {
        self.size
    }

    fn half(&self) -> usize {
        self.decomp.half_genus() as usize
    }

    fn gamma_range(&self) -> Range<usize> {
        let h = self.half();
        let c = self.decomp.n() as usize - 1;
        2 * h..2 * h + c
    }

    fn delta_range(&self) -> Range<usize> {
        let r = self.gamma_range();
        r.end..self.choices.len()
    }

    /// Digit vector of candidate `index`, last coordinate fastest.
    fn digits_of(&self, mut index: u64) -> Vec<usize> {
        let mut digits = vec![0; self.choices.len()];
        for (d, ch) in digits.iter_mut().zip(&self.choices).rev() {
            let r = ch.len() as u64;
            *d = (index % r) as usize;
            index /= r;
        }
        digits
    }

    fn values_of(&self, digits: &[usize]) -> Vec<u32> {
        digits
            .iter()
            .zip(&self.choices)
            .map(|(&d, ch)| ch[d])
            .collect()
    }

    /// Advances the odometer; returns the lowest coordinate changed.
    fn step(&self, digits: &mut [usize], values: &mut [u32]) -> usize {
        for pos in (0..digits.len()).rev() {
            let ch = &self.choices[pos];
            digits[pos] += 1;
            if digits[pos] < ch.len() {
                values[pos] = ch[digits[pos]];
                return pos;
            }
            digits[pos] = 0;
            values[pos] = ch[0];
        }
        0
    }

    fn build(&self, values: &[u32]) -> ArfValueSet {
        let h = self.half();
        ArfValueSet::from_raw(
            self.decomp.clone(),
            self.m,
            values[..h].to_vec(),
            values[h..2 * h].to_vec(),
            values[self.gamma_range()].to_vec(),
            values[self.delta_range()].to_vec(),
        )
    }

    /// Tallies valid candidates in `range` by Arf invariant.
    pub fn tally_range(&self, range: Range<u64>) -> Tally {
        let mut tally = Tally::default();
        if range.start >= range.end {
            return tally;
        }
        let gamma = self.gamma_range();
        let delta = self.delta_range();
        let mut digits = self.digits_of(range.start);
        let mut values = self.values_of(&digits);
        let mut gamma_ok = check_gamma(&self.decomp, self.m, &values[gamma.clone()]).is_ok();
        for _ in range {
            if gamma_ok {
                match symmetric_parity(self.m, &values[gamma.clone()], &values[delta.clone()]) {
                    0 => tally.even += 1,
                    _ => tally.odd += 1,
                }
            }
            let changed = self.step(&mut digits, &mut values);
            if changed < gamma.end {
                gamma_ok = check_gamma(&self.decomp, self.m, &values[gamma.clone()]).is_ok();
            }
        }
        tally
    }

    pub fn tally_sequential(&self) -> Tally {
        self.tally_range(0..self.size)
    }

    /// Tallies disjoint index blocks on the rayon pool and merges them.
    #[cfg(feature = "parallel")]
    pub fn tally_parallel(&self) -> Tally {
        use rayon::prelude::*;
        const MIN_BLOCK: u64 = 1 << 12;
        let blocks = (rayon::current_num_threads() as u64 * 8).max(1);
        let block = (self.size / blocks).max(MIN_BLOCK);
        let count = self.size.div_ceil(block);
        (0..count)
            .into_par_iter()
            .map(|b| self.tally_range(b * block..((b + 1) * block).min(self.size)))
            .reduce(Tally::default, Add::add)
    }

    /// Parallel when the `parallel` feature is on, sequential otherwise.
    pub fn tally(&self) -> Tally {
        #[cfg(feature = "parallel")]
        {
            self.tally_parallel()
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.tally_sequential()
        }
    }

    /// Streams the valid candidates as completed functions.
    pub fn into_functions(self) -> RealArfIter {
        let digits = vec![0; self.choices.len()];
        let values = self.values_of(&digits);
        RealArfIter {
            remaining: self.size,
            space: self,
            digits,
            values,
        }
    }
}

/// Per-parity counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Tally {
    pub even: u64,
    pub odd: u64,
}

impl Tally {
    pub fn total(&self) -> u64 {
        self.even + self.odd
    }
}

impl Add for Tally {
    type Output = Tally;

    fn add(self, rhs: Tally) -> Tally {
        Tally {
            even: self.even + rhs.even,
            odd: self.odd + rhs.odd,
        }
    }
}

impl AddAssign for Tally {
    fn add_assign(&mut self, rhs: Tally) {
        *self = *self + rhs;
    }
}

/// Lexicographic stream of real m-Arf functions.
pub struct RealArfIter {
    space: CandidateSpace,
    digits: Vec<usize>,
    values: Vec<u32>,
    remaining: u64,
}

impl Iterator for RealArfIter {
    type Item = RealArfFunction;

    fn next(&mut self) -> Option<RealArfFunction> {
        let space = &self.space;
        while self.remaining > 0 {
            self.remaining -= 1;
            let candidate = space.build(&self.values);
            if self.remaining > 0 {
                space.step(&mut self.digits, &mut self.values);
            }
            if let Ok(f) = crate::arf::complete(candidate) {
                return Some(f);
            }
        }
        None
    }
}

fn resolve_decomposition(ttype: &TopologicalType, n: Option<u32>) -> Result<Decomposition> {
    match n {
        Some(n) => Decomposition::new(*ttype, n),
        None => canonical_decomposition(ttype),
    }
}

/// Candidate space for `ttype` at modulus `m`; `n` defaults to the
/// canonical decomposition.
pub fn candidate_space(
    ttype: &TopologicalType,
    m: SpinModulus,
    n: Option<u32>,
) -> Result<CandidateSpace> {
    CandidateSpace::new(resolve_decomposition(ttype, n)?, m)
}

/// Every real m-Arf function on a surface of type `ttype`, as value sets
/// on the decomposition with `n` invariant curves.
///
/// Yields nothing when the genus admits none.
pub fn enumerate_real_arf_functions(
    ttype: &TopologicalType,
    m: SpinModulus,
    n: Option<u32>,
) -> Result<RealArfIter> {
    Ok(candidate_space(ttype, m, n)?.into_functions())
}

/// Brute-force tallies next to the closed forms for one cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub g: u32,
    pub k: u32,
    pub eps: u8,
    pub m: u32,
    pub n: u32,
    #[serde(with = "big")]
    pub total: BigUint,
    #[serde(with = "big")]
    pub even: BigUint,
    #[serde(with = "big")]
    pub odd: BigUint,
    #[serde(with = "big")]
    pub cf_even: BigUint,
    #[serde(with = "big")]
    pub cf_odd: BigUint,
    #[serde(rename = "match")]
    pub matches: bool,
}

impl CountReport {
    pub fn new(ttype: &TopologicalType, m: SpinModulus, n: u32, tally: Tally) -> Self {
        let even = BigUint::from(tally.even);
        let odd = BigUint::from(tally.odd);
        let cf_even = closed_form_count(ttype, m, 0);
        let cf_odd = closed_form_count(ttype, m, 1);
        Self {
            g: ttype.g(),
            k: ttype.k(),
            eps: ttype.eps(),
            m: m.get(),
            n,
            total: &even + &odd,
            matches: even == cf_even && odd == cf_odd,
            even,
            odd,
            cf_even,
            cf_odd,
        }
    }

    pub fn ttype(&self) -> TopologicalType {
        TopologicalType::new(self.g, self.k, self.eps).expect("report built from a valid type")
    }

    /// Sort key `(g, k, eps, m, n)`.
    pub fn key(&self) -> (u32, u32, u8, u32, u32) {
        (self.g, self.k, self.eps, self.m, self.n)
    }
}

/// Exhaustive tallies by Arf invariant, with closed forms and match flag.
pub fn brute_force_counts(
    ttype: &TopologicalType,
    m: SpinModulus,
    n: Option<u32>,
) -> Result<CountReport> {
    let space = candidate_space(ttype, m, n)?;
    let tally = space.tally();
    Ok(CountReport::new(ttype, m, space.decomposition().n(), tally))
}

/// Whether real m-Arf functions exist on a surface of type `ttype`.
///
/// Even `m` needs `g = 1 (mod m/2)`, odd `m` needs `g = 1 (mod m)`. A
/// non-separating surface without ovals has only twists as invariant
/// curves, all with value zero, so their sum `1 - g` must vanish mod `m`.
pub fn real_arf_functions_exist(ttype: &TopologicalType, m: SpinModulus) -> bool {
    if !spin_admissible(ttype.g(), m) {
        return false;
    }
    if !ttype.is_separating() && ttype.k() == 0 {
        return (ttype.g() as i64 - 1).rem_euclid(m.get() as i64) == 0;
    }
    true
}

/// Number of real m-Spin structures with Arf invariant `delta` on a
/// surface of type `ttype`, zero when none exist.
pub fn closed_form_count(ttype: &TopologicalType, m: SpinModulus, delta: u8) -> BigUint {
    if delta > 1 || !real_arf_functions_exist(ttype, m) {
        return BigUint::zero();
    }
    let m_pow_g = BigUint::from(m.get()).pow(ttype.g());
    if !m.is_even() {
        return if delta == 0 { m_pow_g } else { BigUint::zero() };
    }
    let k = ttype.k();
    let two_pow = |e: u32| BigUint::one() << e;
    if !ttype.is_separating() {
        if k == 0 {
            m_pow_g / 2u32
        } else {
            // m^g * 2^(k-2), exact since m^g is even.
            m_pow_g * two_pow(k) / 4u32
        }
    } else if m.get().is_multiple_of(4) {
        m_pow_g * two_pow(k) / 4u32
    } else {
        let half_classes = two_pow(k - 1);
        let classes = if delta == 0 {
            half_classes + 1u32
        } else {
            half_classes - 1u32
        };
        m_pow_g * classes / 2u32
    }
}

/// Decompositions swept for a type: `n = k` when separating, every
/// admissible `n >= 2` otherwise.
pub fn swept_n_values(ttype: &TopologicalType) -> Vec<u32> {
    admissible_n_values(ttype)
        .into_iter()
        .filter(|&n| ttype.is_separating() || n >= 2)
        .collect()
}

/// Every cell `(type, m, n)` with `2 <= g <= g_max`, `2 <= m <= m_max`,
/// sorted by `(g, k, eps, m, n)`.
pub fn sweep_cells(g_max: u32, m_max: u32) -> Vec<(TopologicalType, SpinModulus, u32)> {
    let mut cells = Vec::new();
    for t in TopologicalType::all_up_to(g_max) {
        for m in 2..=m_max {
            let m = SpinModulus::new(m).expect("m >= 2");
            for n in swept_n_values(&t) {
                cells.push((t, m, n));
            }
        }
    }
    cells
}

/// Brute-force reports for every swept cell, in cell order. Mismatches are
/// recorded in the reports, never raised.
pub fn verify_range(g_max: u32, m_max: u32) -> Result<Vec<CountReport>> {
    if g_max < 2 {
        return Err(Error::OutOfScope(format!("g_max={g_max} < 2")));
    }
    if m_max < 2 {
        return Err(Error::Domain(format!("m_max={m_max} < 2")));
    }
    let cells = sweep_cells(g_max, m_max);
    let run = |(t, m, n): &(TopologicalType, SpinModulus, u32)| brute_force_counts(t, *m, Some(*n));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cells.par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cells.iter().map(run).collect()
    }
}

/// `sigma(c_n)` for a value set, without validation.
pub fn boundary_completion(v: &ArfValueSet) -> u32 {
    derived_gamma_n(v.ttype().g(), v.modulus(), v.gamma())
}

/// Writes reports as CSV with header
/// `g,k,eps,m,n,total,even,odd,cf_even,cf_odd,match`.
pub fn write_csv<W: Write>(reports: &[CountReport], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "g", "k", "eps", "m", "n", "total", "even", "odd", "cf_even", "cf_odd", "match",
    ])?;
    for r in reports {
        w.write_record([
            r.g.to_string(),
            r.k.to_string(),
            r.eps.to_string(),
            r.m.to_string(),
            r.n.to_string(),
            r.total.to_string(),
            r.even.to_string(),
            r.odd.to_string(),
            r.cf_even.to_string(),
            r.cf_odd.to_string(),
            r.matches.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Unbounded integers as bare JSON numbers.
mod big {
    use std::str::FromStr;

    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Number;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        Number::from_str(&v.to_string())
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let n = Number::deserialize(d)?;
        BigUint::from_str(&n.to_string()).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(g: u32, k: u32, eps: u8) -> TopologicalType {
        TopologicalType::new(g, k, eps).unwrap()
    }

    fn m(x: u32) -> SpinModulus {
        SpinModulus::new(x).unwrap()
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_count(&t(4, 1, 1), m(3), 0), big(81));
        assert_eq!(closed_form_count(&t(4, 1, 1), m(3), 1), big(0));
        assert_eq!(closed_form_count(&t(3, 2, 1), m(2), 0), big(12));
        assert_eq!(closed_form_count(&t(3, 2, 1), m(2), 1), big(4));
        assert_eq!(closed_form_count(&t(4, 2, 0), m(4), 0), big(0));
        assert_eq!(closed_form_count(&t(7, 3, 0), m(6), 1), big(559_872));
        assert_eq!(closed_form_count(&t(5, 0, 0), m(4), 0), big(512));
        assert_eq!(closed_form_count(&t(5, 0, 0), m(4), 2), big(0));
    }

    #[test]
    fn closed_form_is_unbounded() {
        let c = closed_form_count(&t(25, 2, 0), m(8), 0);
        assert_eq!(c, BigUint::from(8u32).pow(25));
        assert!(c > BigUint::from(u64::MAX));
    }

    #[test]
    fn no_oval_surfaces_need_full_period() {
        assert!(!real_arf_functions_exist(&t(2, 0, 0), m(2)));
        assert!(real_arf_functions_exist(&t(3, 0, 0), m(2)));
        assert!(!real_arf_functions_exist(&t(3, 0, 0), m(4)));
        assert!(real_arf_functions_exist(&t(3, 1, 0), m(4)));
        assert!(!real_arf_functions_exist(&t(4, 0, 0), m(6)));
        assert!(real_arf_functions_exist(&t(4, 1, 0), m(6)));
    }

    #[test]
    fn brute_force_examples() {
        let r = brute_force_counts(&t(3, 2, 1), m(2), None).unwrap();
        assert_eq!(
            (r.total.clone(), r.even.clone(), r.odd.clone()),
            (big(16), big(12), big(4))
        );
        assert!(r.matches);

        let r = brute_force_counts(&t(5, 0, 0), m(4), None).unwrap();
        assert_eq!(r.n, 2);
        assert_eq!(
            (r.total.clone(), r.even.clone(), r.odd.clone()),
            (big(1024), big(512), big(512))
        );

        let r = brute_force_counts(&t(4, 2, 0), m(3), None).unwrap();
        assert_eq!(
            (r.total.clone(), r.even.clone(), r.odd.clone()),
            (big(81), big(81), big(0))
        );
    }

    #[test]
    fn enumeration_examples() {
        let fs = enumerate_real_arf_functions(&t(3, 2, 1), m(2), None).unwrap();
        assert_eq!(fs.count(), 16);
        let fs: Vec<_> = enumerate_real_arf_functions(&t(4, 1, 1), m(3), None)
            .unwrap()
            .collect();
        assert_eq!(fs.len(), 81);
        assert!(fs
            .iter()
            .all(|f| f.arf_invariant() == 0 && f.gamma_n() == 0));
        assert_eq!(
            enumerate_real_arf_functions(&t(2, 0, 0), m(2), None)
                .unwrap()
                .count(),
            0
        );
    }

    #[test]
    fn inadmissible_n_is_error() {
        assert!(matches!(
            enumerate_real_arf_functions(&t(5, 2, 0), m(2), Some(3)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn stream_is_lexicographic() {
        let fs: Vec<_> = enumerate_real_arf_functions(&t(3, 1, 0), m(2), None)
            .unwrap()
            .collect();
        let keys: Vec<_> = fs
            .iter()
            .map(|f| {
                let v = f.values();
                [v.alpha(), v.beta(), v.gamma(), v.delta()].concat()
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn odometer_matches_indexing() {
        let space = candidate_space(&t(5, 2, 0), m(4), Some(4)).unwrap();
        let mut digits = space.digits_of(0);
        let mut values = space.values_of(&digits);
        for i in 1..space.size() {
            space.step(&mut digits, &mut values);
            assert_eq!(digits, space.digits_of(i));
            assert_eq!(values, space.values_of(&digits));
        }
    }

    #[test]
    fn split_ranges_merge() {
        let space = candidate_space(&t(5, 2, 1), m(4), None).unwrap();
        let whole = space.tally_sequential();
        let mid = space.size() / 3;
        let parts = space.tally_range(0..mid) + space.tally_range(mid..space.size());
        assert_eq!(whole, parts);
        assert_eq!(space.tally_range(5..5), Tally::default());
        assert_eq!(whole.total(), space.clone().into_functions().count() as u64);
    }

    #[test]
    fn verify_small_range() {
        let reports = verify_range(3, 2).unwrap();
        assert!(reports.iter().all(|r| r.matches), "{reports:?}");
        let keys: Vec<_> = reports.iter().map(CountReport::key).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);

        let reports = verify_range(2, 3).unwrap();
        for r in reports.iter().filter(|r| r.m == 3) {
            assert_eq!(r.total, big(0));
        }
        let r = reports.iter().find(|r| r.key() == (2, 0, 0, 2, 3)).unwrap();
        assert_eq!(r.total, big(0));
        assert!(r.matches);
    }

    #[test]
    fn verify_range_errors() {
        assert!(matches!(verify_range(1, 4), Err(Error::OutOfScope(_))));
        assert!(matches!(verify_range(3, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn json_and_csv_shapes() {
        let r = brute_force_counts(&t(3, 2, 1), m(2), None).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"g":3,"k":2,"eps":1,"m":2,"n":2,"total":16,"even":12,"odd":4,"cf_even":12,"cf_odd":4,"match":true}"#
        );
        let back: CountReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);

        let mut buf = Vec::new();
        write_csv(&[r], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "g,k,eps,m,n,total,even,odd,cf_even,cf_odd,match\n3,2,1,2,2,16,12,4,12,4,true\n"
        );
    }

    #[test]
    fn big_counts_serialize_as_numbers() {
        let mut r = brute_force_counts(&t(3, 2, 1), m(2), None).unwrap();
        r.cf_even = BigUint::from(10u32).pow(30);
        let s = serde_json::to_string(&r).unwrap();
        assert!(
            s.contains(r#""cf_even":1000000000000000000000000000000,"#),
            "{s}"
        );
        let back: CountReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back.cf_even, r.cf_even);
    }
}
