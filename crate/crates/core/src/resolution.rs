//! Coflabby and flabby resolutions of lattices.
//!
//! `0 → Q → P → M → 0` takes `P = ⊕_U Z[G/U]^{r_U}` over subgroup classes,
//! one block per basis vector of `M^U`; the coset `gU` goes to `g·v`. The
//! kernel is coflabby. Dualizing the resolution of `M°` gives a flabby
//! resolution `0 → M → P° → Q° → 0`.

use serde::{Deserialize, Serialize};

use crate::cohomology::{self, Degree, TableRow};
use crate::error::{Error, Result};
use crate::glattice::{self, GLattice, LatticeJson, LatticeMap};
use crate::groups::Subgroup;
use crate::intmat::{self, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleKind {
    FlabbyResolution,
    CoflabbyResolution,
    General,
}

/// `0 → left → mid → right → 0`.
#[derive(Clone, Debug)]
pub struct ExactTriple {
    pub left: GLattice,
    pub mid: GLattice,
    pub right: GLattice,
    pub inj: LatticeMap,
    pub surj: LatticeMap,
    pub kind: TripleKind,
}

impl ExactTriple {
    pub fn to_json(&self) -> TripleJson {
        TripleJson {
            schema: 1,
            kind: self.kind,
            left: self.left.to_json(),
            mid: self.mid.to_json(),
            right: self.right.to_json(),
            inj: self.inj.matrix.clone(),
            surj: self.surj.matrix.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TripleJson {
    pub schema: u32,
    pub kind: TripleKind,
    pub left: LatticeJson,
    pub mid: LatticeJson,
    pub right: LatticeJson,
    pub inj: IntMatrix,
    pub surj: IntMatrix,
}

/// A coflabby resolution together with the subgroup of each `Z[G/U]` block of `P`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub triple: ExactTriple,
    pub blocks: Vec<Subgroup>,
}

fn build_coflabby(m: &GLattice, max_order: usize) -> Result<Resolution> {
    let group = m.group_arc().clone();
    let classes = group.subgroup_classes(max_order)?;
    let mut blocks = Vec::new();
    let mut columns: Vec<Vec<crate::Int>> = Vec::new();
    for u in classes {
        let fixed = m.fixed_sublattice(u);
        let cos = group.cosets(u);
        for v in fixed.columns() {
            blocks.push(u.clone());
            for &rep in &cos.reps {
                columns.push(m.action(rep).mul_vec(&v));
            }
        }
    }
    let p = glattice::permutation_lattice(&group, &blocks)?;
    let pi = IntMatrix::from_columns(&columns, m.rank());
    let coker = intmat::cokernel_invariants(&pi);
    if !coker.is_trivial() {
        return Err(Error::Internal(format!("resolution map has cokernel {coker}")));
    }
    let k = intmat::kernel_basis(&pi);
    let q = p.sublattice(&k, format!("Q({})", m.label()))?;
    let inj = LatticeMap::new(&q, &p, k)?;
    let surj = LatticeMap::new(&p, m, pi)?;
    Ok(Resolution {
        triple: ExactTriple {
            left: q,
            mid: p,
            right: m.clone(),
            inj,
            surj,
            kind: TripleKind::CoflabbyResolution,
        },
        blocks,
    })
}

/// `0 → Q → P → M → 0` with `P` permutation; checks that `Q` is coflabby.
pub fn coflabby_resolution(m: &GLattice, max_order: usize) -> Result<Resolution> {
    let r = build_coflabby(m, max_order)?;
    let rep = cohomology::is_coflabby(&r.triple.left, max_order)?;
    if !rep.holds {
        return Err(Error::Internal(format!(
            "kernel of the coflabby resolution is not coflabby: {:?}",
            rep.witness
        )));
    }
    Ok(r)
}

/// `0 → M → P° → Q° → 0` from the coflabby resolution of `M°`; checks that `Q°` is flabby.
pub fn flabby_resolution(m: &GLattice, max_order: usize) -> Result<Resolution> {
    let res = build_coflabby(&glattice::dual(m), max_order)?;
    let t = res.triple;
    let p = glattice::dual(&t.mid).with_label(t.mid.label().to_string());
    let f = glattice::dual(&t.left).with_label(format!("F({})", m.label()));
    let inj = LatticeMap::new(m, &p, t.surj.matrix.transpose())?;
    let surj = LatticeMap::new(&p, &f, t.inj.matrix.transpose())?;
    let rep = cohomology::is_flabby(&f, max_order)?;
    if !rep.holds {
        return Err(Error::Internal(format!(
            "right term of the flabby resolution is not flabby: {:?}",
            rep.witness
        )));
    }
    Ok(Resolution {
        triple: ExactTriple {
            left: m.clone(),
            mid: p,
            right: f,
            inj,
            surj,
            kind: TripleKind::FlabbyResolution,
        },
        blocks: res.blocks,
    })
}

/// Cohomology of the flabby-resolution representative `F` of `[M]^fl`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FlabbyFingerprint {
    pub rank_f: usize,
    pub table: Vec<TableRow>,
}

impl FlabbyFingerprint {
    /// The `H^1` column: unchanged by adding permutation summands.
    pub fn h1(&self) -> Vec<(String, crate::AbelianInvariants)> {
        self.table
            .iter()
            .map(|row| {
                let v = row
                    .values
                    .iter()
                    .find(|(d, _)| *d == Degree::One)
                    .map(|(_, v)| v.clone())
                    .unwrap_or_default();
                (row.subgroup.clone(), v)
            })
            .collect()
    }
}

pub fn fingerprint_of(f: &GLattice, max_order: usize) -> Result<FlabbyFingerprint> {
    let classes = f.group().subgroup_classes(max_order)?;
    Ok(FlabbyFingerprint {
        rank_f: f.rank(),
        table: cohomology::cohomology_table(f, classes, &Degree::ALL)?,
    })
}

pub fn flabby_class_invariants(m: &GLattice, max_order: usize) -> Result<FlabbyFingerprint> {
    let res = flabby_resolution(m, max_order)?;
    fingerprint_of(&res.triple.right, max_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glattice::*;
    use crate::groups::*;
    use std::sync::Arc;

    #[test]
    fn trivial_lattice_resolution() {
        let g = Arc::new(dihedral_on_cosets(3).unwrap());
        let z = trivial(&g, 1);
        let r = coflabby_resolution(&z, 400).unwrap();
        let t = &r.triple;
        assert_eq!(t.mid.rank(), t.left.rank() + t.right.rank());
    }

    #[test]
    fn chevalley_d6_flabby_resolution() {
        let g = Arc::new(dihedral_on_cosets(6).unwrap());
        let h = g.parse_subgroup("<x*y>").unwrap();
        let j = chevalley_module(&g, &h).unwrap();
        let r = flabby_resolution(&j, 400).unwrap();
        let t = &r.triple;
        assert_eq!(t.mid.rank(), j.rank() + t.right.rank());
        assert!(t.surj.matrix.mul(&t.inj.matrix).is_zero());
        let fp = fingerprint_of(&t.right, 400).unwrap();
        assert_eq!(fp.table.len(), 10);
        assert!(fp.h1().iter().all(|(_, v)| v.is_trivial()));
    }

    #[test]
    fn klein_four_flabby_class_has_h1() {
        let v4 = Arc::new(GroupSpec::parse("perms:a=(1 2)(3 4);b=(1 3)(2 4)").unwrap().build().unwrap());
        let j = chevalley_module(&v4, &v4.trivial_subgroup()).unwrap();
        let fp = flabby_class_invariants(&j, 400).unwrap();
        let h1 = fp.h1();
        assert_eq!(h1.last().unwrap().1, crate::AbelianInvariants::cyclic(2));
    }
}
