//! Arithmetic in the m-fold cover `G_m` of the isometry group of the upper
//! half-plane, and the level function on its orientation-preserving part.
//!
//! An element is an isometry together with the value at `i` of its branch
//! function, an m-th root of the (anti-)holomorphic derivative. The branch
//! at other points is obtained by continuation along the half-plane swept
//! out by `c z + d`, which never meets zero.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

type Matrix = [[f64; 2]; 2];

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Whether an isometry is holomorphic or anti-holomorphic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Preserving,
    Reversing,
}

impl Orientation {
    fn compose(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }
}

/// A point of the real projective line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ideal {
    Real(f64),
    Infinity,
}

impl From<f64> for Ideal {
    fn from(x: f64) -> Self {
        Ideal::Real(x)
    }
}

/// Conjugacy type of an orientation-preserving isometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsometryKind {
    Identity,
    Parabolic,
    Hyperbolic,
    Elliptic,
}

/// An isometry of the upper half-plane as a real 2x2 matrix with
/// determinant `+1` (acting by `z -> (az+b)/(cz+d)`) or `-1` (acting by
/// `z -> (a conj(z) + b)/(c conj(z) + d)`). Matrices are projective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    matrix: Matrix,
    orientation: Orientation,
}

fn det(m: &Matrix) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn scale(m: &Matrix, s: f64) -> Matrix {
    [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
}

fn frobenius(a: &Matrix, b: &Matrix, sign: f64) -> f64 {
    let mut sum = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let d = a[r][c] - sign * b[r][c];
            sum += d * d;
        }
    }
    sum.sqrt()
}

impl Isometry {
    /// Normalizes `matrix` to `|det| = 1`. The sign of the determinant
    /// fixes the orientation.
    pub fn from_matrix(matrix: Matrix) -> Result<Self> {
        let d = det(&matrix);
        if !d.is_finite() || d.abs() < 1e-300 || matrix.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("singular matrix {matrix:?}")));
        }
        let orientation = if d > 0.0 {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        };
        Ok(Self {
            matrix: scale(&matrix, 1.0 / d.abs().sqrt()),
            orientation,
        })
    }

    pub fn identity() -> Self {
        Self {
            matrix: [[1.0, 0.0], [0.0, 1.0]],
            orientation: Orientation::Preserving,
        }
    }

    /// The reflection `z -> -conj(z)` in the imaginary axis.
    pub fn reflection_j() -> Self {
        Self {
            matrix: [[-1.0, 0.0], [0.0, 1.0]],
            orientation: Orientation::Reversing,
        }
    }

    pub fn matrix(&self) -> Matrix {
        self.matrix
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn is_preserving(&self) -> bool {
        self.orientation == Orientation::Preserving
    }

    pub fn trace(&self) -> f64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    /// Matrix with the sign fixed so the first nonzero entry is positive.
    pub fn normalized_matrix(&self) -> Matrix {
        let first = self
            .matrix
            .iter()
            .flatten()
            .copied()
            .find(|x| *x != 0.0)
            .unwrap_or(1.0);
        if first < 0.0 {
            scale(&self.matrix, -1.0)
        } else {
            self.matrix
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            matrix: mat_mul(&self.matrix, &other.matrix),
            orientation: self.orientation.compose(other.orientation),
        }
    }

    pub fn inverse(&self) -> Isometry {
        let [[a, b], [c, d]] = self.matrix;
        let s = det(&self.matrix).signum();
        Isometry {
            matrix: [[d * s, -b * s], [-c * s, a * s]],
            orientation: self.orientation,
        }
    }

    /// Action on a point of the upper half-plane.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        let [[a, b], [c, d]] = self.matrix;
        let w = self.source(z);
        (w * a + b) / (w * c + d)
    }

    /// `z`, or `conj(z)` for reversing isometries.
    fn source(&self, z: Complex64) -> Complex64 {
        match self.orientation {
            Orientation::Preserving => z,
            Orientation::Reversing => z.conj(),
        }
    }

    fn denominator(&self, z: Complex64) -> Complex64 {
        let [_, [c, d]] = self.matrix;
        self.source(z) * c + d
    }

    /// Derivative in `z` (preserving) or `conj(z)` (reversing) at `z`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let q = self.denominator(z);
        Complex64::from(det(&self.matrix)) / (q * q)
    }

    /// Distance between matrices up to global sign, or infinity when the
    /// orientations differ.
    pub fn projective_distance(&self, other: &Isometry) -> f64 {
        if self.orientation != other.orientation {
            return f64::INFINITY;
        }
        frobenius(&self.matrix, &other.matrix, 1.0).min(frobenius(
            &self.matrix,
            &other.matrix,
            -1.0,
        ))
    }

    /// Classification of an orientation-preserving isometry; `None` for
    /// reversing ones.
    pub fn kind(&self, tol: f64) -> Option<IsometryKind> {
        if !self.is_preserving() {
            return None;
        }
        let t = self.trace().abs();
        Some(if self.projective_distance(&Isometry::identity()) <= tol {
            IsometryKind::Identity
        } else if t - 2.0 > tol {
            IsometryKind::Hyperbolic
        } else if 2.0 - t > tol {
            IsometryKind::Elliptic
        } else {
            IsometryKind::Parabolic
        })
    }

    /// Splits a hyperbolic isometry as `h ∘ (z -> s z) ∘ h^-1` with `s > 1`
    /// and `h` orientation-preserving.
    fn standard_position(&self, tol: f64) -> Result<(Isometry, f64)> {
        if self.kind(tol) != Some(IsometryKind::Hyperbolic) {
            return Err(Error::Domain(format!("not hyperbolic: {self}")));
        }
        let m = if self.trace() < 0.0 {
            scale(&self.matrix, -1.0)
        } else {
            self.matrix
        };
        let [[a, b], [c, d]] = m;
        let t = a + d;
        let root = ((t * t - 4.0).max(0.0)).sqrt();
        let big = (t + root) / 2.0;
        let small = (t - root) / 2.0;
        let eigvec = |mu: f64| -> [f64; 2] {
            let u = [b, mu - a];
            let v = [mu - d, c];
            if u[0].hypot(u[1]) >= v[0].hypot(v[1]) {
                u
            } else {
                v
            }
        };
        let up = eigvec(big);
        let mut down = eigvec(small);
        if up[0] * down[1] - up[1] * down[0] < 0.0 {
            down = [-down[0], -down[1]];
        }
        let h = Isometry::from_matrix([[up[0], down[0]], [up[1], down[1]]])?;
        Ok((h, big * big))
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.matrix;
        let o = match self.orientation {
            Orientation::Preserving => '+',
            Orientation::Reversing => '-',
        };
        write!(f, "[[{a}, {b}], [{c}, {d}]]{o}")
    }
}

/// The hyperbolic isometry with fixed points `alpha`, `beta` and
/// multiplier `lambda`:
/// `z -> ((λα-β) z - (λ-1)αβ) / ((λ-1) z + (α-λβ))`.
pub fn make_hyperbolic(alpha: Ideal, beta: Ideal, lambda: f64) -> Result<Isometry> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!(
            "multiplier must be positive, got {lambda}"
        )));
    }
    let l = lambda;
    let matrix = match (alpha, beta) {
        (Ideal::Real(a), Ideal::Real(b)) if a != b => {
            [[l * a - b, -(l - 1.0) * a * b], [l - 1.0, a - l * b]]
        }
        (Ideal::Real(a), Ideal::Infinity) => [[1.0, (l - 1.0) * a], [0.0, l]],
        (Ideal::Infinity, Ideal::Real(b)) => [[l, -(l - 1.0) * b], [0.0, 1.0]],
        _ => {
            return Err(Error::Domain(format!(
                "degenerate axis: fixed points {alpha:?} and {beta:?} coincide"
            )))
        }
    };
    Isometry::from_matrix(matrix)
}

/// The parabolic isometry fixing `alpha`:
/// `z -> ((1-λα) z + λα²) / (-λ z + (1+λα))`.
pub fn make_parabolic(alpha: f64, lambda: f64) -> Isometry {
    let (a, l) = (alpha, lambda);
    Isometry {
        matrix: [[1.0 - l * a, l * a * a], [-l, 1.0 + l * a]],
        orientation: Orientation::Preserving,
    }
}

/// Reflection in the axis of a hyperbolic `c` composed with the square
/// root of `c`; it squares to `c`.
pub fn twist_companion(c: &Isometry, tol: f64) -> Result<Isometry> {
    let (h, s) = c.standard_position(tol)?;
    let half = Isometry::from_matrix([[s.sqrt(), 0.0], [0.0, 1.0]])?;
    Ok(h.compose(&Isometry::reflection_j())
        .compose(&half)
        .compose(&h.inverse()))
}

/// An element of `G_m`: an isometry and its branch value at `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverElement {
    base: Isometry,
    branch: Complex64,
}

impl CoverElement {
    pub fn base(&self) -> &Isometry {
        &self.base
    }

    /// Value of the branch function at `i`.
    pub fn branch_value(&self) -> Complex64 {
        self.branch
    }

    /// Branch function continued to `z`.
    pub fn branch_at(&self, z: Complex64, m: u32) -> Complex64 {
        let [_, [c, _]] = self.base.matrix;
        if c == 0.0 {
            return self.branch;
        }
        let shift = self.base.denominator(z).ln() - self.base.denominator(I).ln();
        self.branch * (shift * (-2.0 / m as f64)).exp()
    }

    /// Relative gap between `branch^m` and the derivative at `i`.
    pub fn residual(&self, m: u32) -> f64 {
        let target = self.base.derivative(I);
        (self.branch.powu(m) - target).norm() / target.norm()
    }

    /// Largest of the projective matrix distance and the branch gap.
    pub fn distance(&self, other: &CoverElement) -> f64 {
        self.base
            .projective_distance(&other.base)
            .max((self.branch - other.branch).norm())
    }
}

impl fmt::Display for CoverElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.base, self.branch)
    }
}

/// `G_m` with a numerical tolerance for branch and classification checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverGroup {
    m: u32,
    tol: f64,
}

impl CoverGroup {
    pub const DEFAULT_TOL: f64 = 1e-9;

    pub fn new(m: u32, tol: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("cover degree must be positive".into()));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Domain(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        Ok(Self { m, tol })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn root_of_unity(&self, k: i64) -> Complex64 {
        let k = k.rem_euclid(self.m as i64) as f64;
        Complex64::from_polar(1.0, 2.0 * PI * k / self.m as f64)
    }

    pub fn identity(&self) -> CoverElement {
        self.central(0)
    }

    /// `U^k`, with `U` the generator of the centre.
    pub fn central(&self, k: i64) -> CoverElement {
        CoverElement {
            base: Isometry::identity(),
            branch: self.root_of_unity(k),
        }
    }

    /// A lift of the reflection `z -> -conj(z)`, with branch value the
    /// m-th root of `-1` with index `choice` counted from `exp(iπ/m)`.
    pub fn make_j(&self, choice: u32) -> CoverElement {
        let m = self.m as f64;
        let k = (choice % self.m) as f64;
        CoverElement {
            base: Isometry::reflection_j(),
            branch: Complex64::from_polar(1.0, PI * (1.0 + 2.0 * k) / m),
        }
    }

    /// The lift of `base` with branch `exp(-(2/m) Log(c i + d)) * U^root`
    /// (times `exp(iπ/m)` for reversing `base`). Defined for every
    /// isometry, elliptic ones included.
    pub fn lift(&self, base: &Isometry, root: i64) -> CoverElement {
        let m = self.m as f64;
        let mut branch = (base.denominator(I).ln() * (-2.0 / m)).exp() * self.root_of_unity(root);
        if !base.is_preserving() {
            branch *= Complex64::from_polar(1.0, PI / m);
        }
        CoverElement {
            base: *base,
            branch,
        }
    }

    /// The lift of a non-elliptic orientation-preserving isometry lying on
    /// the lifted one-parameter subgroup through it; level zero.
    pub fn canonical_lift(&self, base: &Isometry) -> Result<CoverElement> {
        match base.kind(self.tol) {
            None => Err(Error::Domain(format!(
                "canonical lift needs an orientation-preserving isometry, got {base}"
            ))),
            Some(IsometryKind::Elliptic) => Err(Error::OutOfScope(format!(
                "canonical lift of elliptic {base}"
            ))),
            Some(IsometryKind::Identity) => Ok(CoverElement {
                base: *base,
                branch: Complex64::new(1.0, 0.0),
            }),
            Some(IsometryKind::Parabolic) => {
                // On the path I + sN the value c i + d stays in one closed
                // half-plane away from the negative axis.
                let flip = if base.trace() < 0.0 { -1.0 } else { 1.0 };
                let [_, [c, d]] = scale(&base.matrix, flip);
                let branch = (Complex64::new(d, c).ln() * (-2.0 / self.m as f64)).exp();
                Ok(CoverElement {
                    base: *base,
                    branch,
                })
            }
            Some(IsometryKind::Hyperbolic) => {
                let (h, s) = base.standard_position(self.tol)?;
                let scaling = CoverElement {
                    base: Isometry::from_matrix([[s.sqrt(), 0.0], [0.0, 1.0 / s.sqrt()]])?,
                    branch: Complex64::from(s.powf(1.0 / self.m as f64)),
                };
                let h = self.lift(&h, 0);
                let conj = self.multiply(&self.multiply(&h, &scaling)?, &self.invert(&h)?)?;
                Ok(CoverElement {
                    base: *base,
                    branch: conj.branch,
                })
            }
        }
    }

    /// Product `a·b` (apply `b` first). The branch value is
    /// `δ_a(b(i)) · δ_b(i)`, with `δ_b(i)` conjugated when `a` reverses
    /// orientation.
    pub fn multiply(&self, a: &CoverElement, b: &CoverElement) -> Result<CoverElement> {
        let outer = a.branch_at(b.base.apply(I), self.m);
        let inner = match a.base.orientation {
            Orientation::Preserving => b.branch,
            Orientation::Reversing => b.branch.conj(),
        };
        self.checked(CoverElement {
            base: a.base.compose(&b.base),
            branch: outer * inner,
        })
    }

    pub fn invert(&self, a: &CoverElement) -> Result<CoverElement> {
        let base = a.base.inverse();
        let mut branch = a.branch_at(base.apply(I), self.m).inv();
        if !a.base.is_preserving() {
            branch = branch.conj();
        }
        self.checked(CoverElement { base, branch })
    }

    fn checked(&self, e: CoverElement) -> Result<CoverElement> {
        let r = e.residual(self.m);
        if r.is_finite() && r <= self.tol {
            Ok(e)
        } else {
            Err(Error::Branch(format!(
                "branch value of {e} misses the derivative by {r:e}"
            )))
        }
    }

    /// The level `k` with `a = canonical_lift(base) · U^k`, plus the gap
    /// between `a` and that snapped representative.
    pub fn level_with_residual(&self, a: &CoverElement) -> Result<(u32, f64)> {
        let canon = self.canonical_lift(&a.base)?;
        let ratio = a.branch / canon.branch;
        let m = self.m as f64;
        let steps = ratio.arg() * m / (2.0 * PI);
        let k = (steps.round() as i64).rem_euclid(self.m as i64);
        let residual = (a.branch - canon.branch * self.root_of_unity(k)).norm();
        if residual > self.tol {
            return Err(Error::Branch(format!(
                "branch of {a} is {residual:e} away from every level"
            )));
        }
        Ok((k as u32, residual))
    }

    pub fn level(&self, a: &CoverElement) -> Result<u32> {
        self.level_with_residual(a).map(|(k, _)| k)
    }

    /// Whether `lev(F C F^-1) = -lev(C)` for reversing `f`.
    pub fn conjugation_sign_check(&self, f: &CoverElement, c: &CoverElement) -> Result<bool> {
        if f.base.is_preserving() {
            return Err(Error::Domain(format!("{f} preserves orientation")));
        }
        let conj = self.multiply(&self.multiply(f, c)?, &self.invert(f)?)?;
        let (before, after) = (self.level(c)?, self.level(&conj)?);
        Ok((before + after) % self.m == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12 * (1.0 + b.abs())
    }

    fn group(m: u32) -> CoverGroup {
        CoverGroup::new(m, TOL).unwrap()
    }

    /// Continues `arg g_t'(i)` along a path `t -> g_t` from the identity,
    /// returning the m-th root with that argument.
    fn path_lift(path: impl Fn(f64) -> Isometry, m: u32, steps: usize) -> Complex64 {
        let mut arg = 0.0;
        let mut prev = Complex64::new(1.0, 0.0);
        let mut last = prev;
        for s in 1..=steps {
            let d = path(s as f64 / steps as f64).derivative(I);
            let step = (d / prev).arg();
            assert!(step.abs() < 0.5, "path step too coarse");
            arg += step;
            prev = d;
            last = d;
        }
        Complex64::from_polar(last.norm().powf(1.0 / m as f64), arg / m as f64)
    }

    #[test]
    fn hyperbolic_examples() {
        let t = make_hyperbolic(0.0.into(), Ideal::Infinity, 2.0).unwrap();
        let z = Complex64::new(0.3, 1.7);
        assert!((t.apply(z) - z / 2.0).norm() < 1e-14);
        let id = make_hyperbolic(0.5.into(), (-1.0).into(), 1.0).unwrap();
        assert!(id.projective_distance(&Isometry::identity()) < 1e-14);
        for (a, b) in [
            (Ideal::Real(0.3), Ideal::Real(-1.2)),
            (Ideal::Infinity, Ideal::Real(0.7)),
        ] {
            let fwd = make_hyperbolic(a, b, 3.0).unwrap();
            let back = make_hyperbolic(b, a, 3.0).unwrap();
            let inv = make_hyperbolic(a, b, 1.0 / 3.0).unwrap();
            assert!(fwd.inverse().projective_distance(&back) < 1e-12);
            assert!(fwd.inverse().projective_distance(&inv) < 1e-12);
        }
        assert!(make_hyperbolic(1.0.into(), 1.0.into(), 2.0).is_err());
        assert!(make_hyperbolic(Ideal::Infinity, Ideal::Infinity, 2.0).is_err());
        assert!(make_hyperbolic(0.0.into(), 1.0.into(), 0.0).is_err());
    }

    #[test]
    fn hyperbolic_fixed_points_and_multipliers() {
        let (a, b, l) = (0.4, -1.1, 2.5);
        let t = make_hyperbolic(a.into(), b.into(), l).unwrap();
        for p in [a, b] {
            let w = t.apply(Complex64::new(p, 1e-9));
            assert!((w.re - p).abs() < 1e-6);
        }
        let [[_, _], [c, d]] = t.matrix();
        let deriv = |x: f64| 1.0 / (c * x + d).powi(2);
        assert!(close(deriv(a), 1.0 / l));
        assert!(close(deriv(b), l));
    }

    #[test]
    fn parabolic_examples() {
        assert!(make_parabolic(0.7, 0.0).projective_distance(&Isometry::identity()) < 1e-15);
        let p = make_parabolic(0.0, 1.5);
        let z = Complex64::new(-0.2, 0.9);
        assert!((p.apply(z) - z / (z * -1.5 + 1.0)).norm() < 1e-14);
        let prod = make_parabolic(0.3, 0.8).compose(&make_parabolic(0.3, -1.9));
        assert!(prod.projective_distance(&make_parabolic(0.3, -1.1)) < 1e-12);
        assert_eq!(p.kind(TOL), Some(IsometryKind::Parabolic));
    }

    #[test]
    fn classification() {
        let r = Isometry::from_matrix([[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(r.kind(TOL), Some(IsometryKind::Elliptic));
        assert_eq!(Isometry::reflection_j().kind(TOL), None);
        let near = make_hyperbolic(0.0.into(), Ideal::Infinity, 1.0 + 1e-12).unwrap();
        assert_ne!(near.kind(TOL), Some(IsometryKind::Hyperbolic));
        let h = make_hyperbolic(0.0.into(), 1.0.into(), 1.5).unwrap();
        assert_eq!(h.kind(TOL), Some(IsometryKind::Hyperbolic));
    }

    #[test]
    fn central_elements() {
        for m in 1..=6 {
            let g = group(m);
            assert_eq!(g.central(0), g.identity());
            assert!(g.central(m as i64).distance(&g.identity()) < 1e-15);
            let u = g.central(1).branch_value();
            assert!((u - Complex64::from_polar(1.0, 2.0 * PI / m as f64)).norm() < 1e-15);
            for a in 0..m as i64 {
                for b in 0..m as i64 {
                    let p = g.multiply(&g.central(a), &g.central(b)).unwrap();
                    assert!(p.distance(&g.central(a + b)) < 1e-14);
                }
                let inv = g.invert(&g.central(a)).unwrap();
                assert!(inv.distance(&g.central(m as i64 - a)) < 1e-14);
                assert_eq!(g.level(&g.central(a)).unwrap(), a as u32);
            }
        }
    }

    #[test]
    fn j_examples() {
        for m in 1..=6 {
            let g = group(m);
            for r in 0..m {
                let j = g.make_j(r);
                assert_eq!(*j.base(), Isometry::reflection_j());
                assert!((j.branch_value().powu(m) + 1.0).norm() < 1e-13);
                let jj = g.multiply(&j, &j).unwrap();
                assert!(jj.distance(&g.identity()) < 1e-14);
                assert!(g.invert(&j).unwrap().distance(&j) < 1e-14);
                let juj = g
                    .multiply(&j, &g.multiply(&g.central(1), &j).unwrap())
                    .unwrap();
                assert!(juj.distance(&g.central(-1)) < 1e-14);
            }
        }
    }

    #[test]
    fn standard_scaling_lift() {
        let g = group(3);
        let t = make_hyperbolic(0.0.into(), Ideal::Infinity, 2.0).unwrap();
        let lift = g.canonical_lift(&t).unwrap();
        assert!((lift.branch_value() - Complex64::from(2f64.powf(-1.0 / 3.0))).norm() < 1e-13);
        assert!(lift.residual(3) < 1e-13);
        assert_eq!(g.level(&lift).unwrap(), 0);
        let z = Complex64::new(2.0, 0.1);
        assert_eq!(lift.branch_at(z, 3), lift.branch_value());
    }

    #[test]
    fn canonical_lift_follows_the_path() {
        for m in 2..=6 {
            let g = group(m);
            for (a, b, l) in [
                (Ideal::Real(0.3), Ideal::Real(-1.7), 3.5),
                (Ideal::Real(-0.4), Ideal::Real(1.9), 0.3),
                (Ideal::Infinity, Ideal::Real(0.5), 2.2),
                (Ideal::Real(1.5), Ideal::Infinity, 0.6),
                (Ideal::Real(-2.0), Ideal::Real(-1.5), 4.0),
            ] {
                let t = make_hyperbolic(a, b, l).unwrap();
                let lift = g.canonical_lift(&t).unwrap();
                let path = |s: f64| make_hyperbolic(a, b, l.powf(s)).unwrap();
                let oracle = path_lift(path, m, 4000);
                assert!(
                    (lift.branch_value() - oracle).norm() < 1e-9,
                    "{a:?} {b:?} {l}"
                );
            }
            for (a, l) in [(0.0, 1.3), (0.7, -2.1), (-1.8, 0.4)] {
                let p = make_parabolic(a, l);
                let lift = g.canonical_lift(&p).unwrap();
                let oracle = path_lift(|s| make_parabolic(a, s * l), m, 4000);
                assert!((lift.branch_value() - oracle).norm() < 1e-9, "{a} {l}");
                assert_eq!(g.level(&lift).unwrap(), 0);
            }
        }
    }

    #[test]
    fn canonical_lift_errors() {
        let g = group(4);
        let r = Isometry::from_matrix([[0.6, -0.8], [0.8, 0.6]]).unwrap();
        assert!(matches!(g.canonical_lift(&r), Err(Error::OutOfScope(_))));
        assert!(matches!(g.level(&g.lift(&r, 1)), Err(Error::OutOfScope(_))));
        assert!(matches!(
            g.canonical_lift(&Isometry::reflection_j()),
            Err(Error::Domain(_))
        ));
        let t = make_hyperbolic(0.0.into(), 1.0.into(), 2.0).unwrap();
        let mut bad = g.canonical_lift(&t).unwrap();
        bad.branch *= Complex64::from_polar(1.0, 0.3);
        assert!(matches!(g.level(&bad), Err(Error::Branch(_))));
        assert!(matches!(g.multiply(&bad, &bad), Err(Error::Branch(_))));
    }

    #[test]
    fn level_shifts_with_centre_and_inverts() {
        let g = group(5);
        let t = make_hyperbolic(0.2.into(), (-0.9).into(), 2.7).unwrap();
        let lift = g.canonical_lift(&t).unwrap();
        for k in 0..5 {
            let a = g.multiply(&lift, &g.central(k)).unwrap();
            assert_eq!(g.level(&a).unwrap(), k as u32);
            let inv = g.invert(&a).unwrap();
            assert_eq!(g.level(&inv).unwrap(), ((5 - k) % 5) as u32);
            assert!(g.multiply(&a, &inv).unwrap().distance(&g.identity()) < 1e-12);
        }
    }

    #[test]
    fn j_reverses_level() {
        let g = group(6);
        let t = make_hyperbolic(0.0.into(), Ideal::Infinity, 1.7).unwrap();
        let j = g.make_j(2);
        for k in 0..6 {
            let c = g
                .multiply(&g.canonical_lift(&t).unwrap(), &g.central(k))
                .unwrap();
            assert!(g.conjugation_sign_check(&j, &c).unwrap());
            assert!(g.conjugation_sign_check(&j, &g.central(k)).unwrap());
        }
        assert!(g
            .conjugation_sign_check(&g.central(1), &g.central(1))
            .is_err());
    }

    #[test]
    fn companion_squares_to_original() {
        let t = make_hyperbolic(0.0.into(), Ideal::Infinity, 3.0).unwrap();
        let c = twist_companion(&t, TOL).unwrap();
        assert_eq!(c.orientation(), Orientation::Reversing);
        let expected = Isometry::reflection_j()
            .compose(&make_hyperbolic(0.0.into(), Ideal::Infinity, 3f64.sqrt()).unwrap());
        assert!(c.projective_distance(&expected) < 1e-12);
        for (a, b, l) in [(0.5, -1.0, 2.0), (1.2, 1.9, 0.2), (-1.5, 0.0, 5.0)] {
            let t = make_hyperbolic(a.into(), b.into(), l).unwrap();
            let c = twist_companion(&t, TOL).unwrap();
            assert!(c.compose(&c).projective_distance(&t) < 1e-10);
        }
        let j = Isometry::reflection_j();
        assert!(j.compose(&j).projective_distance(&Isometry::identity()) < 1e-15);
        assert!(twist_companion(&make_parabolic(0.0, 1.0), TOL).is_err());
    }

    #[test]
    fn reversing_action() {
        let j = Isometry::reflection_j();
        let z = Complex64::new(0.4, 1.1);
        assert!((j.apply(z) - Complex64::new(-0.4, 1.1)).norm() < 1e-15);
        assert!((j.derivative(z) + 1.0).norm() < 1e-15);
        let f = make_hyperbolic(0.3.into(), 1.0.into(), 2.0)
            .unwrap()
            .compose(&j);
        assert!(f.apply(z).im > 0.0);
        assert!((f.inverse().apply(f.apply(z)) - z).norm() < 1e-12);
    }

    #[test]
    fn constructor_errors() {
        assert!(CoverGroup::new(0, TOL).is_err());
        assert!(CoverGroup::new(3, 0.0).is_err());
        assert!(CoverGroup::new(3, f64::NAN).is_err());
        assert!(Isometry::from_matrix([[1.0, 2.0], [2.0, 4.0]]).is_err());
    }
}
