//! Tate cohomology in degrees -1, 0 and first cohomology of subgroups acting on lattices.
//!
//! `H^1` is computed from a presentation of the subgroup: a 1-cocycle is
//! determined by its values on the generators, subject to the Fox-derivative
//! constraints of each relator. Cyclic and dihedral subgroups get explicit
//! presentations; anything else goes through the bar resolution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::AbelianInvariants;
use crate::error::{Error, Result};
use crate::glattice::GLattice;
use crate::groups::{FiniteGroup, Shape, Subgroup};
use crate::int::Int;
use crate::intmat::{self, IntMatrix};

/// Largest `|U| * rank` handled by the bar-resolution computation.
pub const BAR_MAX_UNKNOWNS: usize = 4096;

/// Degree of a cohomology group: -1 and 0 are Tate groups, 1 is ordinary `H^1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Degree {
    #[serde(rename = "-1")]
    Minus1,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
}

impl Degree {
    pub const ALL: [Degree; 3] = [Degree::Minus1, Degree::Zero, Degree::One];

    pub fn from_int(i: i32) -> Result<Self> {
        match i {
            -1 => Ok(Degree::Minus1),
            0 => Ok(Degree::Zero),
            1 => Ok(Degree::One),
            _ => Err(Error::Parameter(format!("cohomology degree {i} not in {{-1,0,1}}"))),
        }
    }

    pub fn as_int(self) -> i32 {
        match self {
            Degree::Minus1 => -1,
            Degree::Zero => 0,
            Degree::One => 1,
        }
    }
}

pub fn tate(i: Degree, u: &Subgroup, m: &GLattice) -> Result<AbelianInvariants> {
    m.group().check_subgroup(u)?;
    Ok(match i {
        Degree::Minus1 => h_minus1_unchecked(u, m),
        Degree::Zero => h0_unchecked(u, m),
        Degree::One => h1_unchecked(u, m)?,
    })
}

/// `Ĥ^0(U, M) = M^U / N_U M`.
pub fn h0(u: &Subgroup, m: &GLattice) -> Result<AbelianInvariants> {
    tate(Degree::Zero, u, m)
}

/// `Ĥ^{-1}(U, M) = ker N_U / I_U M`.
pub fn h_minus1(u: &Subgroup, m: &GLattice) -> Result<AbelianInvariants> {
    tate(Degree::Minus1, u, m)
}

/// `H^1(U, M)` by the presentation path (bar resolution for other shapes).
pub fn h1(u: &Subgroup, m: &GLattice) -> Result<AbelianInvariants> {
    tate(Degree::One, u, m)
}

/// Coordinates of the columns of `v` in the saturated basis `basis`.
fn coordinates(basis: &IntMatrix, v: &IntMatrix) -> IntMatrix {
    if basis.cols() == 0 {
        return IntMatrix::zeros(0, v.cols());
    }
    let l = intmat::left_inverse(basis).expect("kernel bases are saturated");
    let c = l.mul(v);
    debug_assert_eq!(&basis.mul(&c), v);
    c
}

fn quotient(sub_basis: &IntMatrix, gens: &IntMatrix) -> AbelianInvariants {
    if sub_basis.cols() == 0 {
        return AbelianInvariants::trivial();
    }
    intmat::cokernel_invariants(&coordinates(sub_basis, gens))
}

fn h0_unchecked(u: &Subgroup, m: &GLattice) -> AbelianInvariants {
    let fixed = m.fixed_sublattice(u);
    quotient(&fixed, &m.norm_matrix(u))
}

fn augmentation_image(u: &Subgroup, m: &GLattice) -> IntMatrix {
    let r = m.rank();
    let id = IntMatrix::identity(r);
    let blocks: Vec<IntMatrix> = u.gens().iter().map(|&g| m.action(g).sub(&id)).collect();
    if blocks.is_empty() {
        return IntMatrix::zeros(r, 0);
    }
    IntMatrix::hstack_all(&blocks, r)
}

fn h_minus1_unchecked(u: &Subgroup, m: &GLattice) -> AbelianInvariants {
    if u.is_trivial() || m.rank() == 0 {
        return AbelianInvariants::trivial();
    }
    let kernel = intmat::kernel_basis(&m.norm_matrix(u));
    quotient(&kernel, &augmentation_image(u, m))
}

/// A presentation of a subgroup: generator elements and relator words
/// (indices into `gens`, with exponents).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub gens: Vec<usize>,
    pub relators: Vec<Vec<(usize, i64)>>,
}

/// `<a | a^k>` or `<a, b | a^k, b^2, (ab)^2>`; `None` for other shapes.
pub fn presentation(g: &FiniteGroup, u: &Subgroup) -> Option<Presentation> {
    match g.shape(u) {
        Shape::Cyclic { a, k } => Some(Presentation {
            gens: vec![a],
            relators: vec![vec![(0, k as i64)]],
        }),
        Shape::Dihedral { a, b, k } => Some(Presentation {
            gens: vec![a, b],
            relators: vec![
                vec![(0, k as i64)],
                vec![(1, 2)],
                vec![(0, 1), (1, 1), (0, 1), (1, 1)],
            ],
        }),
        Shape::Other => None,
    }
}

/// Fox derivatives `∂R/∂g_i` as group-ring elements (coefficient per element index).
pub fn fox_derivatives(g: &FiniteGroup, p: &Presentation, relator: &[(usize, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0i64; g.order()]; p.gens.len()];
    let mut prefix = g.identity();
    for &(i, e) in relator {
        let x = p.gens[i];
        if e > 0 {
            let mut t = prefix;
            for _ in 0..e {
                out[i][t] += 1;
                t = g.mul(t, x);
            }
        } else {
            let xi = g.inv(x);
            let mut t = g.mul(prefix, xi);
            for _ in 0..(-e) {
                out[i][t] -= 1;
                t = g.mul(t, xi);
            }
        }
        prefix = g.mul(prefix, g.pow(x, e));
    }
    out
}

fn group_ring_action(m: &GLattice, coeffs: &[i64]) -> IntMatrix {
    let r = m.rank();
    let mut acc = IntMatrix::zeros(r, r);
    for (elem, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let a = m.action(elem);
        if c == 1 {
            acc.add_assign(a);
        } else {
            acc.add_assign(&a.scale(&Int::from(c)));
        }
    }
    acc
}

/// `H^1` through a presentation; `None` when the subgroup is neither cyclic nor dihedral.
pub fn h1_presentation(u: &Subgroup, m: &GLattice) -> Option<AbelianInvariants> {
    let g = m.group();
    let p = presentation(g, u)?;
    Some(h1_with_presentation(&p, m))
}

pub fn h1_with_presentation(p: &Presentation, m: &GLattice) -> AbelianInvariants {
    let g = m.group();
    let r = m.rank();
    let t = p.gens.len();
    if r == 0 {
        return AbelianInvariants::trivial();
    }
    let mut rows = Vec::new();
    for rel in &p.relators {
        let fox = fox_derivatives(g, p, rel);
        let blocks: Vec<IntMatrix> = fox.iter().map(|c| group_ring_action(m, c)).collect();
        rows.push(IntMatrix::hstack_all(&blocks, r));
    }
    let constraints = IntMatrix::vstack_all(&rows, t * r);
    let z1 = intmat::kernel_basis(&constraints);
    let id = IntMatrix::identity(r);
    let b1: Vec<IntMatrix> = p.gens.iter().map(|&x| m.action(x).sub(&id)).collect();
    let b1 = IntMatrix::vstack_all(&b1, r);
    quotient(&z1, &b1)
}

/// `H^1` from inhomogeneous cochains `f: U → M` with `f(gh) = f(g) + g f(h)`
/// for all pairs. Independent of the presentation code; meant as an oracle.
pub fn h1_bar(u: &Subgroup, m: &GLattice) -> Result<AbelianInvariants> {
    let g = m.group();
    g.check_subgroup(u)?;
    let r = m.rank();
    let members = u.members();
    let n = members.len();
    if n * r > BAR_MAX_UNKNOWNS {
        return Err(Error::ResourceBound {
            what: format!("bar resolution with {} unknowns", n * r),
            bound: BAR_MAX_UNKNOWNS,
        });
    }
    if r == 0 {
        return Ok(AbelianInvariants::trivial());
    }
    let pos = |e: usize| members.binary_search(&e).expect("closed");
    let ncols = n * r;
    let rows = members.iter().enumerate().flat_map(|(gi, &ge)| {
        let act = m.action(ge);
        members.iter().enumerate().flat_map(move |(hi, &he)| {
            let ghi = pos(g.mul(ge, he));
            (0..r).map(move |c| {
                let mut row = vec![Int::ZERO; ncols];
                row[ghi * r + c].add_assign_ref(&Int::ONE);
                row[gi * r + c].sub_mul_assign(&Int::ONE, &Int::ONE);
                for k in 0..r {
                    let v = &act[(c, k)];
                    if !v.is_zero() {
                        row[hi * r + k].sub_mul_assign(&Int::ONE, v);
                    }
                }
                row
            })
        })
    });
    let z1 = intmat::kernel_basis_streaming(ncols, rows);
    let id = IntMatrix::identity(r);
    let b1: Vec<IntMatrix> = members.iter().map(|&e| m.action(e).sub(&id)).collect();
    let b1 = IntMatrix::vstack_all(&b1, r);
    Ok(quotient(&z1, &b1))
}

fn h1_unchecked(u: &Subgroup, m: &GLattice) -> Result<AbelianInvariants> {
    match h1_presentation(u, m) {
        Some(v) => Ok(v),
        None => h1_bar(u, m),
    }
}

/// Outcome of a flabby or coflabby test: the first failing subgroup class, if any.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PredicateReport {
    pub holds: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Witness {
    pub subgroup: Subgroup,
    pub subgroup_name: String,
    pub invariants: AbelianInvariants,
}

fn predicate(m: &GLattice, degree: Degree, max_order: usize) -> Result<PredicateReport> {
    let g = m.group();
    let classes = g.subgroup_classes(max_order)?;
    let values: Vec<Result<AbelianInvariants>> =
        classes.par_iter().map(|u| tate(degree, u, m)).collect();
    for (u, v) in classes.iter().zip(values) {
        let v = v?;
        if !v.is_trivial() {
            return Ok(PredicateReport {
                holds: false,
                witness: Some(Witness {
                    subgroup: u.clone(),
                    subgroup_name: crate::glattice::subgroup_name(g, u),
                    invariants: v,
                }),
            });
        }
    }
    Ok(PredicateReport {
        holds: true,
        witness: None,
    })
}

/// `Ĥ^{-1}(U, M) = 0` for one subgroup per conjugacy class.
pub fn is_flabby(m: &GLattice, max_order: usize) -> Result<PredicateReport> {
    predicate(m, Degree::Minus1, max_order)
}

/// `H^1(U, M) = 0` for one subgroup per conjugacy class.
pub fn is_coflabby(m: &GLattice, max_order: usize) -> Result<PredicateReport> {
    predicate(m, Degree::One, max_order)
}

/// One row of a cohomology table.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TableRow {
    pub subgroup: String,
    pub order: usize,
    pub members: Vec<usize>,
    pub values: Vec<(Degree, AbelianInvariants)>,
}

/// Cohomology of `M` over the given subgroups in the given degrees, computed in parallel.
pub fn cohomology_table(m: &GLattice, subgroups: &[Subgroup], degrees: &[Degree]) -> Result<Vec<TableRow>> {
    let g = m.group();
    subgroups
        .par_iter()
        .map(|u| {
            let values = degrees
                .iter()
                .map(|&d| Ok((d, tate(d, u, m)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(TableRow {
                subgroup: crate::glattice::subgroup_name(g, u),
                order: u.order(),
                members: u.members().to_vec(),
                values,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glattice::*;
    use crate::groups::*;
    use std::sync::Arc;

    fn d(n: usize) -> Arc<FiniteGroup> {
        Arc::new(dihedral_on_cosets(n).unwrap())
    }

    #[test]
    fn shapiro_on_d3() {
        let g = d(3);
        for u in g.subgroup_classes(400).unwrap() {
            let p = coset_lattice(&g, u).unwrap();
            let v = h0(&g.whole(), &p).unwrap();
            assert_eq!(v, AbelianInvariants::cyclic(u.order() as i64), "{u:?}");
        }
    }

    #[test]
    fn trivial_lattice() {
        let g = d(4);
        let z = trivial(&g, 1);
        assert_eq!(h0(&g.whole(), &z).unwrap(), AbelianInvariants::cyclic(8));
        assert!(h_minus1(&g.whole(), &z).unwrap().is_trivial());
        assert!(h1(&g.whole(), &z).unwrap().is_trivial());
        let c = Arc::new(cyclic(5).unwrap());
        assert!(h1(&c.whole(), &trivial(&c, 1)).unwrap().is_trivial());
    }

    #[test]
    fn sign_lattice() {
        let c2 = Arc::new(cyclic(2).unwrap());
        let s = augmentation_ideal(&c2, &c2.trivial_subgroup()).unwrap();
        assert_eq!(h_minus1(&c2.whole(), &s).unwrap(), AbelianInvariants::cyclic(2));
        assert!(h0(&c2.whole(), &s).unwrap().is_trivial());
        assert_eq!(h1(&c2.whole(), &s).unwrap(), AbelianInvariants::cyclic(2));
        assert_eq!(h1_bar(&c2.whole(), &s).unwrap(), AbelianInvariants::cyclic(2));
        assert!(!is_flabby(&s, 400).unwrap().holds);
    }

    #[test]
    fn klein_four_chevalley_is_not_coflabby() {
        let v4 = Arc::new(GroupSpec::parse("perms:a=(1 2)(3 4);b=(1 3)(2 4)").unwrap().build().unwrap());
        let j = chevalley_module(&v4, &v4.trivial_subgroup()).unwrap();
        let rep = is_coflabby(&j, 400).unwrap();
        assert!(!rep.holds);
        // H^1(U, J_G) = H^2(U, Z) is the dual of U^ab
        assert_eq!(rep.witness.unwrap().invariants, AbelianInvariants::cyclic(2));
        let whole = h1(&v4.whole(), &j).unwrap();
        assert_eq!(whole.divisors, vec![Int::from(2), Int::from(2)]);
        assert_eq!(h1_bar(&v4.whole(), &j).unwrap(), whole);
    }

    #[test]
    fn presentation_and_bar_agree_on_d4_lattices() {
        let g = d(4);
        for h in g.subgroup_classes(400).unwrap() {
            let j = chevalley_module(&g, h);
            let Ok(j) = j else { continue };
            for u in g.subgroup_classes(400).unwrap() {
                assert_eq!(h1(u, &j).unwrap(), h1_bar(u, &j).unwrap());
            }
        }
    }

    #[test]
    fn fox_derivatives_of_dihedral_relator() {
        let g = d(4);
        let u = g.whole();
        let p = presentation(&g, &u).unwrap();
        let fox = fox_derivatives(&g, &p, &p.relators[2]);
        let (a, b) = (p.gens[0], p.gens[1]);
        let ab = g.mul(a, b);
        // ∂(abab)/∂a = 1 + ab, ∂(abab)/∂b = a + aba
        assert_eq!(fox[0][0], 1);
        assert_eq!(fox[0][ab], 1);
        assert_eq!(fox[1][a], 1);
        assert_eq!(fox[1][g.mul(ab, a)], 1);
        assert_eq!(fox[0].iter().sum::<i64>(), 2);
        assert_eq!(fox[1].iter().sum::<i64>(), 2);
    }

    #[test]
    fn degree_parsing() {
        assert_eq!(Degree::from_int(-1).unwrap(), Degree::Minus1);
        assert!(Degree::from_int(2).is_err());
    }
}
