//! Finitely generated abelian groups in invariant-factor form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::int::Int;

/// `Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with `2 <= d_1 | d_2 | … | d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct AbelianInvariants {
    pub divisors: Vec<Int>,
    pub free_rank: usize,
}

impl AbelianInvariants {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn cyclic(n: i64) -> Self {
        Self::from_diagonal([Int::from(n)])
    }

    /// Builds the invariants of `⊕ Z/d_i` (with `Z/0 = Z`), normalizing to a divisor chain.
    pub fn from_diagonal<I: IntoIterator<Item = Int>>(diag: I) -> Self {
        let mut free_rank = 0;
        let mut torsion = Vec::new();
        for d in diag {
            let d = d.abs();
            if d.is_zero() {
                free_rank += 1;
            } else if !d.is_one() {
                torsion.push(d);
            }
        }
        Self {
            divisors: normalize_chain(torsion),
            free_rank,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.divisors.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<Int> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.divisors.iter().fold(Int::ONE, |acc, d| &acc * d))
    }

    /// Exponent of the torsion part (1 for the trivial group).
    pub fn exponent(&self) -> Int {
        self.divisors.last().cloned().unwrap_or(Int::ONE)
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut torsion = self.divisors.clone();
        torsion.extend(other.divisors.iter().cloned());
        Self {
            divisors: normalize_chain(torsion),
            free_rank: self.free_rank + other.free_rank,
        }
    }
}

fn normalize_chain(mut v: Vec<Int>) -> Vec<Int> {
    v.sort();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i].divides(&v[j]) {
                continue;
            }
            let g = v[i].gcd(&v[j]);
            let l = v[i].lcm(&v[j]);
            v[i] = g;
            v[j] = l;
        }
    }
    v.retain(|d| !d.is_one());
    v
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.divisors.iter().map(|d| format!("Z/{d}")));
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn chain_normalization() {
        let a = AbelianInvariants::from_diagonal(ints(&[2, 3, 1, 4]));
        assert_eq!(a.divisors, ints(&[2, 12]));
        assert_eq!(a.order(), Some(Int::from(24)));
        let b = AbelianInvariants::from_diagonal(ints(&[6, 0, 10]));
        assert_eq!(b.divisors, ints(&[2, 30]));
        assert_eq!(b.free_rank, 1);
        assert_eq!(b.to_string(), "Z + Z/2 + Z/30");
    }

    #[test]
    fn direct_sum_matches_cyclic_decomposition() {
        // Z/2 ⊕ Z/3 ≅ Z/6
        let s = AbelianInvariants::cyclic(2).direct_sum(&AbelianInvariants::cyclic(3));
        assert_eq!(s, AbelianInvariants::cyclic(6));
        assert_eq!(AbelianInvariants::trivial().to_string(), "0");
    }
}
