//! Topological types of Klein surfaces and their decompositions into two
//! halves glued along invariant curves.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The triple `(g, k, eps)`: genus of the double, number of ovals, and
/// whether the real part separates the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TopologicalType {
    g: u32,
    k: u32,
    eps: u8,
}

/// Returns whether `(g, k, eps)` is the type of some Klein surface.
///
/// Separating surfaces need `1 <= k <= g + 1` with `k = g + 1 (mod 2)`,
/// non-separating ones `0 <= k <= g`. Genus below two is rejected.
pub fn is_valid_topological_type(g: u32, k: u32, eps: u8) -> Result<bool> {
    if g < 2 {
        return Err(Error::OutOfScope(format!(
            "genus {g} < 2; only hyperbolic surfaces are handled"
        )));
    }
    Ok(match eps {
        1 => (1..=g + 1).contains(&k) && k % 2 == (g + 1) % 2,
        0 => k <= g,
        _ => false,
    })
}

impl TopologicalType {
    pub fn new(g: u32, k: u32, eps: u8) -> Result<Self> {
        if eps > 1 {
            return Err(Error::Domain(format!("eps must be 0 or 1, got {eps}")));
        }
        if !is_valid_topological_type(g, k, eps)? {
            return Err(Error::Domain(clause_violation(g, k, eps)));
        }
        Ok(Self { g, k, eps })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn eps(&self) -> u8 {
        self.eps
    }

    pub fn is_separating(&self) -> bool {
        self.eps == 1
    }

    /// Every valid type with `2 <= g <= g_max`, ordered by `(g, k, eps)`.
    pub fn all_up_to(g_max: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for g in 2..=g_max {
            for k in 0..=g + 1 {
                for eps in 0..=1 {
                    if let Ok(t) = Self::new(g, k, eps) {
                        out.push(t);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for TopologicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(g={}, k={}, eps={})", self.g, self.k, self.eps)
    }
}

/// Names the admissibility clause violated by `(g, k, eps)`.
fn clause_violation(g: u32, k: u32, eps: u8) -> String {
    if eps == 1 {
        if k == 0 {
            format!("separating type needs k >= 1 (got k=0, g={g})")
        } else if k > g + 1 {
            format!("separating type needs k <= g+1 (got k={k}, g={g})")
        } else {
            format!("separating type needs k = g+1 (mod 2) (got k={k}, g={g})")
        }
    } else {
        format!("non-separating type needs k <= g (got k={k}, g={g})")
    }
}

/// Kind of an invariant curve `c_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryKind {
    /// Pointwise fixed by the involution.
    Oval,
    /// Invariant but without fixed points.
    Twist,
}

impl BoundaryKind {
    /// `|c|` in the bridge relation: 0 for ovals, 1 for twists.
    pub fn weight(self) -> u32 {
        match self {
            BoundaryKind::Oval => 0,
            BoundaryKind::Twist => 1,
        }
    }
}

/// Values of `n` for which the surface splits into two halves of genus
/// `(g + 1 - n) / 2` with `n` holes each, ascending.
pub fn admissible_n_values(ttype: &TopologicalType) -> Vec<u32> {
    if ttype.is_separating() {
        vec![ttype.k]
    } else {
        (ttype.k + 1..=ttype.g + 1)
            .filter(|n| n % 2 == (ttype.g + 1) % 2)
            .collect()
    }
}

/// A choice of invariant curves `c_1..c_n` cutting the surface into two
/// halves swapped by the involution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decomposition {
    ttype: TopologicalType,
    n: u32,
    half_genus: u32,
    boundary_kinds: Vec<BoundaryKind>,
}

impl Decomposition {
    pub fn new(ttype: TopologicalType, n: u32) -> Result<Self> {
        if !admissible_n_values(&ttype).contains(&n) {
            return Err(Error::Domain(format!(
                "n={n} is not admissible for {ttype}; admissible: {:?}",
                admissible_n_values(&ttype)
            )));
        }
        let boundary_kinds = (1..=n)
            .map(|i| {
                if i <= ttype.k {
                    BoundaryKind::Oval
                } else {
                    BoundaryKind::Twist
                }
            })
            .collect();
        Ok(Self {
            ttype,
            n,
            half_genus: (ttype.g + 1 - n) / 2,
            boundary_kinds,
        })
    }

    pub fn ttype(&self) -> &TopologicalType {
        &self.ttype
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn half_genus(&self) -> u32 {
        self.half_genus
    }

    pub fn boundary_kinds(&self) -> &[BoundaryKind] {
        &self.boundary_kinds
    }

    /// Number of ovals among the stored curves `c_1..c_{n-1}`.
    pub fn stored_ovals(&self) -> u32 {
        self.ttype.k.min(self.n.saturating_sub(1))
    }
}

/// The decomposition used when none is requested: `n = k` for separating
/// surfaces, otherwise the smallest admissible `n >= 2`.
pub fn canonical_decomposition(ttype: &TopologicalType) -> Result<Decomposition> {
    let n = if ttype.is_separating() {
        ttype.k
    } else {
        admissible_n_values(ttype)
            .into_iter()
            .find(|&n| n >= 2)
            .ok_or_else(|| Error::Domain(format!("no admissible n >= 2 for {ttype}")))?
    };
    Decomposition::new(*ttype, n)
}
