//! Proof objects: exactness checks, equivariant isomorphisms, and obstructions
//! to being permutation or invertible. Every certificate can be re-checked
//! without repeating the search that produced it.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abelian::AbelianInvariants;
use crate::cohomology::{self, Degree};
use crate::error::{Error, Result};
use crate::glattice::{self, GLattice, LatticeJson};
use crate::groups::{factorize, FiniteGroup, GroupSpec, Subgroup};
use crate::int::Int;
use crate::intmat::{self, IntMatrix};
use crate::resolution::{ExactTriple, TripleJson};

/// Default coefficient bound for isomorphism searches.
pub const DEFAULT_SEARCH_BOUND: i64 = 3;
/// Default number of candidates tried before giving up.
pub const DEFAULT_SEARCH_BUDGET: u64 = 400_000;
/// Caps for the permutation-decomposition search.
pub const MULTISET_MAX_RANK: usize = 64;
pub const MULTISET_MAX_COUNT: usize = 1_000_000;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExactnessReport {
    pub ok: bool,
    pub failures: Vec<String>,
}

/// Checks `0 → A → B → C → 0`: equivariance, injectivity, surjectivity over Z,
/// and that the image of the first map is exactly the kernel of the second.
pub fn verify_exact(t: &ExactTriple) -> Result<ExactnessReport> {
    let (a, b, c) = (&t.left, &t.mid, &t.right);
    if !(a.same_group(b) && b.same_group(c)) {
        return Err(Error::Dimension("lattices over different groups".into()));
    }
    let (f, g) = (&t.inj.matrix, &t.surj.matrix);
    if f.rows() != b.rank() || f.cols() != a.rank() || g.rows() != c.rank() || g.cols() != b.rank() {
        return Err(Error::Dimension(format!(
            "maps {}x{} and {}x{} do not fit ranks {}, {}, {}",
            f.rows(),
            f.cols(),
            g.rows(),
            g.cols(),
            a.rank(),
            b.rank(),
            c.rank()
        )));
    }
    let mut failures = Vec::new();
    if let Err(e) = glattice::LatticeMap::new(a, b, f.clone()) {
        failures.push(format!("first map: {e}"));
    }
    if let Err(e) = glattice::LatticeMap::new(b, c, g.clone()) {
        failures.push(format!("second map: {e}"));
    }
    let rf = intmat::rank(f);
    if rf != a.rank() {
        failures.push(format!("first map has rank {rf} < {}", a.rank()));
    }
    let coker = intmat::cokernel_invariants(g);
    if !coker.is_trivial() {
        failures.push(format!("second map has cokernel {coker}"));
    }
    if !g.mul(f).is_zero() {
        failures.push("composite is not zero".into());
    }
    let rg = intmat::rank(g);
    if rf + rg != b.rank() {
        failures.push(format!("ranks {rf} + {rg} do not add up to {}", b.rank()));
    }
    if rf == a.rank() && !intmat::is_saturated(f) {
        failures.push("image of the first map is not saturated".into());
    }
    Ok(ExactnessReport {
        ok: failures.is_empty(),
        failures,
    })
}

/// Z-basis of the equivariant maps `M → N` (matrices `rank N × rank M`).
pub fn hom_basis(m: &GLattice, n: &GLattice) -> Result<Vec<IntMatrix>> {
    if !m.same_group(n) {
        return Err(Error::Dimension("hom between lattices over different groups".into()));
    }
    let (r, s) = (m.rank(), n.rank());
    let nvars = r * s;
    if nvars == 0 {
        return Ok(Vec::new());
    }
    let pairs: Vec<(&IntMatrix, &IntMatrix)> = n
        .generator_matrices()
        .iter()
        .zip(m.generator_matrices())
        .collect();
    // (A X - X B)[i][j] with X[a][b] at index a*r + b
    let rows = pairs.into_iter().flat_map(|(a, b)| {
        (0..s).flat_map(move |i| {
            (0..r).map(move |j| {
                let mut row = vec![Int::ZERO; nvars];
                for k in 0..s {
                    let v = &a[(i, k)];
                    if !v.is_zero() {
                        row[k * r + j].add_assign_ref(v);
                    }
                }
                for k in 0..r {
                    let v = &b[(k, j)];
                    if !v.is_zero() {
                        row[i * r + k].sub_mul_assign(&Int::ONE, v);
                    }
                }
                row
            })
        })
    });
    let k = intmat::kernel_basis_streaming(nvars, rows);
    Ok(k
        .columns()
        .into_iter()
        .map(|c| IntMatrix::from_fn(s, r, |i, j| c[i * r + j].clone()))
        .collect())
}

/// An equivariant unimodular matrix `source → target`.
#[derive(Clone, Debug)]
pub struct IsoCertificate {
    pub source: GLattice,
    pub target: GLattice,
    pub matrix: IntMatrix,
}

impl IsoCertificate {
    pub fn verify(&self) -> Result<()> {
        if self.matrix.rows() != self.target.rank() || self.matrix.cols() != self.source.rank() {
            return Err(Error::Dimension("certificate matrix has the wrong shape".into()));
        }
        let det = intmat::determinant(&self.matrix)?;
        if !det.abs().is_one() {
            return Err(Error::Internal(format!("certificate has determinant {det}")));
        }
        glattice::LatticeMap::new(&self.source, &self.target, self.matrix.clone())?;
        Ok(())
    }

    pub fn to_json(&self) -> IsoCertificateJson {
        IsoCertificateJson {
            source: self.source.to_json(),
            target: self.target.to_json(),
            matrix: self.matrix.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IsoCertificateJson {
    pub source: LatticeJson,
    pub target: LatticeJson,
    pub matrix: IntMatrix,
}

impl IsoCertificateJson {
    pub fn verify(&self) -> Result<()> {
        IsoCertificate {
            source: GLattice::from_json(&self.source)?,
            target: GLattice::from_json(&self.target)?,
            matrix: self.matrix.clone(),
        }
        .verify()
    }
}

#[derive(Clone, Debug)]
pub enum IsoOutcome {
    Found(IsoCertificate),
    NotIsomorphic { reason: String },
    Unknown { tried: u64 },
}

impl IsoOutcome {
    pub fn certificate(&self) -> Option<&IsoCertificate> {
        match self {
            IsoOutcome::Found(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub bound: i64,
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            bound: DEFAULT_SEARCH_BOUND,
            budget: DEFAULT_SEARCH_BUDGET,
        }
    }
}

/// Nonzero vectors of `[-bound, bound]^dim` by increasing max-norm, lexicographic in each shell.
pub fn shell_vectors(dim: usize, bound: i64) -> impl Iterator<Item = Vec<i64>> {
    (1..=bound).flat_map(move |s| {
        let mut cur = Some(vec![-s; dim]);
        std::iter::from_fn(move || loop {
            let v = cur.take()?;
            let mut next = v.clone();
            let mut i = dim;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if next[i] < s {
                    next[i] += 1;
                    for x in next.iter_mut().skip(i + 1) {
                        *x = -s;
                    }
                    advanced = true;
                    break;
                }
            }
            if advanced {
                cur = Some(next);
            }
            if v.iter().any(|x| x.abs() == s) {
                return Some(v);
            }
        })
    })
    .filter(move |_| dim > 0)
}

fn combine(basis: &[IntMatrix], c: &[i64]) -> IntMatrix {
    let mut acc = IntMatrix::zeros(basis[0].rows(), basis[0].cols());
    for (b, &ci) in basis.iter().zip(c) {
        if ci != 0 {
            acc.add_assign(&b.scale(&Int::from(ci)));
        }
    }
    acc
}

/// Searches for an isomorphism `M → N`. Never claims non-isomorphism unless
/// the ranks differ or there is no equivariant map at all.
pub fn find_iso(m: &GLattice, n: &GLattice, opts: SearchOptions) -> Result<IsoOutcome> {
    if !m.same_group(n) {
        return Err(Error::Dimension("lattices over different groups".into()));
    }
    if m.rank() != n.rank() {
        return Ok(IsoOutcome::NotIsomorphic {
            reason: format!("ranks {} and {} differ", m.rank(), n.rank()),
        });
    }
    if m.generator_matrices() == n.generator_matrices() {
        return Ok(IsoOutcome::Found(IsoCertificate {
            source: m.clone(),
            target: n.clone(),
            matrix: IntMatrix::identity(m.rank()),
        }));
    }
    if n.is_permutation_basis() || m.is_permutation_basis() {
        let (perm, other, invert) = if n.is_permutation_basis() { (n, m, true) } else { (m, n, false) };
        if let Some(y) = search_from_permutation(perm, other, opts)? {
            let matrix = if invert {
                intmat::inverse_unimodular(&y).ok_or_else(|| Error::Internal("search result not unimodular".into()))?
            } else {
                y
            };
            let cert = IsoCertificate {
                source: m.clone(),
                target: n.clone(),
                matrix,
            };
            cert.verify()?;
            return Ok(IsoOutcome::Found(cert));
        }
    }
    let basis = hom_basis(m, n)?;
    if basis.is_empty() {
        return Ok(IsoOutcome::NotIsomorphic {
            reason: "no nonzero equivariant map".into(),
        });
    }
    let mut tried = 0u64;
    for c in shell_vectors(basis.len(), opts.bound) {
        if tried >= opts.budget {
            break;
        }
        tried += 1;
        let x = combine(&basis, &c);
        if intmat::determinant(&x)?.abs().is_one() {
            let cert = IsoCertificate {
                source: m.clone(),
                target: n.clone(),
                matrix: x,
            };
            cert.verify()?;
            return Ok(IsoOutcome::Found(cert));
        }
    }
    Ok(IsoOutcome::Unknown { tried })
}

struct Orbit {
    fixed: IntMatrix,
    /// basis index `j` and an element `g` carrying the first basis vector to `e_j`
    members: Vec<(usize, usize)>,
}

fn permutation_orbits(p: &GLattice) -> Vec<(usize, Vec<(usize, usize)>)> {
    let g = p.group();
    let perms: Vec<Vec<usize>> = (0..g.order())
        .map(|e| p.action(e).as_permutation().expect("permutation lattice"))
        .collect();
    let mut seen = vec![false; p.rank()];
    let mut out = Vec::new();
    for b in 0..p.rank() {
        if seen[b] {
            continue;
        }
        let mut members = Vec::new();
        for (e, perm) in perms.iter().enumerate() {
            let j = perm[b];
            if !seen[j] {
                seen[j] = true;
                members.push((j, e));
            }
        }
        out.push((b, members));
    }
    out
}

/// Looks for a unimodular equivariant `Y: P → L` by choosing, orbit by orbit,
/// the image of the first basis vector in the fixed lattice of its stabilizer.
fn search_from_permutation(p: &GLattice, l: &GLattice, opts: SearchOptions) -> Result<Option<IntMatrix>> {
    let g = p.group();
    let orbits: Vec<Orbit> = permutation_orbits(p)
        .into_iter()
        .map(|(b, members)| {
            let stab: Vec<usize> = (0..g.order())
                .filter(|&e| p.action(e).as_permutation().expect("perm")[b] == b)
                .collect();
            let s = g.generated(&stab);
            Orbit {
                fixed: l.fixed_sublattice(&s),
                members,
            }
        })
        .collect();
    let r = p.rank();
    let mut tried = 0u64;
    for bound in 1..=opts.bound {
        let mut cols: Vec<Option<Vec<Int>>> = vec![None; r];
        if dfs(l, &orbits, 0, bound, &mut cols, &mut tried, opts.budget) {
            let cols: Vec<Vec<Int>> = cols.into_iter().map(|c| c.expect("filled")).collect();
            return Ok(Some(IntMatrix::from_columns(&cols, r)));
        }
        if tried >= opts.budget {
            break;
        }
    }
    Ok(None)
}

fn dfs(
    l: &GLattice,
    orbits: &[Orbit],
    o: usize,
    bound: i64,
    cols: &mut Vec<Option<Vec<Int>>>,
    tried: &mut u64,
    budget: u64,
) -> bool {
    if o == orbits.len() {
        return true;
    }
    let orbit = &orbits[o];
    let f = orbit.fixed.cols();
    if f == 0 {
        return false;
    }
    for c in shell_vectors(f, bound) {
        if *tried >= budget {
            return false;
        }
        *tried += 1;
        let c: Vec<Int> = c.into_iter().map(Int::from).collect();
        let v = orbit.fixed.mul_vec(&c);
        for &(j, e) in &orbit.members {
            cols[j] = Some(l.action(e).mul_vec(&v));
        }
        let filled: Vec<Vec<Int>> = cols.iter().flatten().cloned().collect();
        let partial = IntMatrix::from_columns(&filled, l.rank());
        if intmat::is_saturated(&partial) && dfs(l, orbits, o + 1, bound, cols, tried, budget) {
            return true;
        }
        for &(j, _) in &orbit.members {
            cols[j] = None;
        }
    }
    false
}

/// `M ⊕ Z^pad ≅ ⊕ Z[G/U_i]`, searched with [`find_iso`].
pub fn stably_permutation_certificate(
    m: &GLattice,
    pad: usize,
    targets: &[Subgroup],
    opts: SearchOptions,
) -> Result<IsoOutcome> {
    let g = m.group_arc();
    let total: usize = targets.iter().map(|u| g.index(u)).sum();
    if m.rank() + pad != total {
        return Err(Error::Dimension(format!(
            "rank {} + {pad} does not match target rank {total}",
            m.rank()
        )));
    }
    let padded = if pad == 0 {
        m.clone()
    } else {
        glattice::direct_sum(m, &glattice::trivial(g, pad))?
    };
    let p = glattice::permutation_lattice(g, targets)?;
    find_iso(&padded, &p, opts)
}

/// A subgroup recorded by its members and generators in the parent group.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SubgroupRecord {
    pub name: String,
    pub order: usize,
    pub index: usize,
    pub subgroup: Subgroup,
}

impl SubgroupRecord {
    pub fn new(g: &FiniteGroup, u: &Subgroup) -> Self {
        SubgroupRecord {
            name: glattice::subgroup_name(g, u),
            order: u.order(),
            index: g.index(u),
            subgroup: u.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MultisetWitness {
    /// multiplicity of each subgroup class
    pub counts: Vec<usize>,
    /// class at which `Ĥ^0` differs
    pub witness_class: usize,
    pub value: AbelianInvariants,
}

/// Re-checkable obstruction payloads.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind")]
pub enum Obstruction {
    /// `F` represents `[J_{G/H}]^fl` with `H = 1` and a Sylow subgroup of `G` is not cyclic.
    #[serde(rename = "noncyclic_sylow")]
    NoncyclicSylow {
        prime: usize,
        group_order: usize,
        sylow: SubgroupRecord,
        chevalley_stabilizer: Subgroup,
    },
    /// `H^1(U, F) ≠ 0`, so `F` is not coflabby and hence not invertible.
    #[serde(rename = "nonzero_H1")]
    NonzeroH1 {
        subgroup: SubgroupRecord,
        invariants: AbelianInvariants,
    },
    /// No direct sum of coset lattices of this rank has the same `Ĥ^0` table.
    #[serde(rename = "rank_multiset")]
    RankMultiset {
        rank: usize,
        classes: Vec<SubgroupRecord>,
        /// `(class, Ĥ^0)` pairs; a list because tagged enums cannot read integer map keys back
        #[serde(with = "class_pairs")]
        lattice_h0: BTreeMap<usize, AbelianInvariants>,
        exhausted: Vec<MultisetWitness>,
    },
}

mod class_pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::abelian::AbelianInvariants;

    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, AbelianInvariants>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, AbelianInvariants>, D::Error> {
        Ok(Vec::<(usize, AbelianInvariants)>::deserialize(d)?.into_iter().collect())
    }
}

#[derive(Clone, Debug)]
pub enum ObstructionOutcome {
    Found(Obstruction),
    Inconclusive(String),
}

impl ObstructionOutcome {
    pub fn obstruction(&self) -> Option<&Obstruction> {
        match self {
            ObstructionOutcome::Found(o) => Some(o),
            ObstructionOutcome::Inconclusive(_) => None,
        }
    }
}

/// `Ĥ^0(V, Z[G/U])` via Shapiro and Mackey: one `Z/|V ∩ gUg^{-1}|` per `V`-orbit on `G/U`.
pub fn h0_of_coset_lattice(g: &FiniteGroup, v: &Subgroup, u: &Subgroup) -> AbelianInvariants {
    let cos = g.cosets(u);
    let mut seen = vec![false; cos.len()];
    let mut orders = Vec::new();
    for c in 0..cos.len() {
        if seen[c] {
            continue;
        }
        let mut size = 0usize;
        for &h in v.members() {
            let d = cos.of_element[g.mul(h, cos.reps[c])];
            if !seen[d] {
                seen[d] = true;
                size += 1;
            }
        }
        orders.push(Int::from(v.order() / size));
    }
    AbelianInvariants::from_diagonal(orders)
}

fn multiset_h0(table: &[Vec<AbelianInvariants>], v: usize, counts: &[usize]) -> AbelianInvariants {
    let mut acc = AbelianInvariants::trivial();
    for (u, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            acc = acc.direct_sum(&table[v][u]);
        }
    }
    acc
}

fn enumerate_multisets(indices: &[usize], rank: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    fn rec(indices: &[usize], i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, cap: usize) -> bool {
        if i == indices.len() {
            if left == 0 {
                out.push(cur.clone());
                return out.len() <= cap;
            }
            return true;
        }
        let mut c = 0;
        loop {
            cur[i] = c;
            if !rec(indices, i + 1, left - c * indices[i], cur, out, cap) {
                return false;
            }
            c += 1;
            if c * indices[i] > left {
                break;
            }
        }
        cur[i] = 0;
        true
    }
    let mut out = Vec::new();
    let mut cur = vec![0; indices.len()];
    if !rec(indices, 0, rank, &mut cur, &mut out, cap) {
        return Err(Error::ResourceBound {
            what: "multiset enumeration".into(),
            bound: cap,
        });
    }
    Ok(out)
}

/// Tries to prove that `M` is not a permutation lattice by showing no sum of
/// coset lattices of the same rank matches its `Ĥ^0` over all subgroup classes.
pub fn permutation_decomposition_obstruction(m: &GLattice, max_order: usize) -> Result<ObstructionOutcome> {
    let g = m.group();
    if m.rank() > MULTISET_MAX_RANK {
        return Err(Error::ResourceBound {
            what: format!("multiset search at rank {}", m.rank()),
            bound: MULTISET_MAX_RANK,
        });
    }
    let classes = g.subgroup_classes(max_order)?;
    let indices: Vec<usize> = classes.iter().map(|u| g.index(u)).collect();
    let table: Vec<Vec<AbelianInvariants>> = classes
        .iter()
        .map(|v| classes.iter().map(|u| h0_of_coset_lattice(g, v, u)).collect())
        .collect();
    let whole = classes.len() - 1;
    let mut lattice_h0: BTreeMap<usize, AbelianInvariants> = BTreeMap::new();
    let lattice_value = |v: usize, cache: &mut BTreeMap<usize, AbelianInvariants>| -> Result<AbelianInvariants> {
        if let Some(x) = cache.get(&v) {
            return Ok(x.clone());
        }
        let x = cohomology::h0(&classes[v], m)?;
        cache.insert(v, x.clone());
        Ok(x)
    };
    let mut exhausted = Vec::new();
    // check the whole group first, then the other classes in order
    let order: Vec<usize> = std::iter::once(whole).chain(0..whole).collect();
    for counts in enumerate_multisets(&indices, m.rank(), MULTISET_MAX_COUNT)? {
        let mut witness = None;
        for &v in &order {
            let ours = multiset_h0(&table, v, &counts);
            if ours != lattice_value(v, &mut lattice_h0)? {
                witness = Some((v, ours));
                break;
            }
        }
        match witness {
            Some((v, value)) => exhausted.push(MultisetWitness {
                counts,
                witness_class: v,
                value,
            }),
            None => {
                let desc: Vec<String> = counts
                    .iter()
                    .zip(classes)
                    .filter(|(c, _)| **c > 0)
                    .map(|(c, u)| format!("{c} x Z[G/{}]", glattice::subgroup_name(g, u)))
                    .collect();
                return Ok(ObstructionOutcome::Inconclusive(format!(
                    "Ĥ^0 table matches {}",
                    desc.join(" + ")
                )));
            }
        }
    }
    Ok(ObstructionOutcome::Found(Obstruction::RankMultiset {
        rank: m.rank(),
        classes: classes.iter().map(|u| SubgroupRecord::new(g, u)).collect(),
        lattice_h0,
        exhausted,
    }))
}

/// Where a lattice came from, for the group-theoretic strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeOrigin {
    /// The lattice represents `[J_{G/H}]^fl` for its own group `G` and this `H`.
    ChevalleyFlabbyClass { stabilizer: Subgroup },
    Unknown,
}

/// Noncyclic Sylow subgroup of `G` when the lattice represents `[J_G]^fl`.
pub fn sylow_strategy(g: &FiniteGroup, origin: &LatticeOrigin, max_order: usize) -> Result<Option<Obstruction>> {
    let LatticeOrigin::ChevalleyFlabbyClass { stabilizer } = origin else {
        return Ok(None);
    };
    if !stabilizer.is_trivial() {
        return Ok(None);
    }
    let (_, witnesses) = g.sylow_all_cyclic(max_order)?;
    Ok(witnesses.into_iter().find(|w| !w.cyclic).map(|w| Obstruction::NoncyclicSylow {
        prime: w.prime,
        group_order: g.order(),
        sylow: SubgroupRecord::new(g, &w.subgroup),
        chevalley_stabilizer: stabilizer.clone(),
    }))
}

/// First subgroup class with `H^1(U, F) ≠ 0`.
pub fn h1_strategy(f: &GLattice, max_order: usize) -> Result<Option<Obstruction>> {
    let rep = cohomology::is_coflabby(f, max_order)?;
    Ok(rep.witness.map(|w| Obstruction::NonzeroH1 {
        subgroup: SubgroupRecord::new(f.group(), &w.subgroup),
        invariants: w.invariants,
    }))
}

/// Group-theoretic strategy first, then the `H^1` scan.
pub fn non_invertibility_certificate(
    f: &GLattice,
    origin: &LatticeOrigin,
    max_order: usize,
) -> Result<ObstructionOutcome> {
    if let Some(o) = sylow_strategy(f.group(), origin, max_order)? {
        return Ok(ObstructionOutcome::Found(o));
    }
    if let Some(o) = h1_strategy(f, max_order)? {
        return Ok(ObstructionOutcome::Found(o));
    }
    Ok(ObstructionOutcome::Inconclusive("all H^1 vanish and no group-theoretic witness".into()))
}

/// Re-checks an obstruction against the lattice (or group) it is about.
pub fn verify_obstruction(o: &Obstruction, m: &GLattice, max_order: usize) -> Result<bool> {
    let g = m.group();
    match o {
        Obstruction::NoncyclicSylow {
            prime,
            group_order,
            sylow,
            chevalley_stabilizer,
        } => {
            g.check_subgroup(&sylow.subgroup)?;
            let pk = factorize(g.order())
                .into_iter()
                .find(|(p, _)| p == prime)
                .map(|(p, e)| p.pow(e as u32));
            Ok(*group_order == g.order()
                && chevalley_stabilizer.is_trivial()
                && Some(sylow.subgroup.order()) == pk
                && sylow
                    .subgroup
                    .members()
                    .iter()
                    .all(|&e| g.element_order(e) < sylow.subgroup.order()))
        }
        Obstruction::NonzeroH1 { subgroup, invariants } => {
            let v = cohomology::tate(Degree::One, &subgroup.subgroup, m)?;
            Ok(!invariants.is_trivial() && &v == invariants)
        }
        Obstruction::RankMultiset {
            rank,
            classes,
            lattice_h0,
            exhausted,
        } => {
            let ours = g.subgroup_classes(max_order)?;
            if *rank != m.rank()
                || ours.len() != classes.len()
                || ours.iter().zip(classes).any(|(a, b)| a != &b.subgroup)
            {
                return Ok(false);
            }
            for (&v, val) in lattice_h0 {
                if v >= ours.len() || &cohomology::h0(&ours[v], m)? != val {
                    return Ok(false);
                }
            }
            let indices: Vec<usize> = ours.iter().map(|u| g.index(u)).collect();
            let all = enumerate_multisets(&indices, m.rank(), MULTISET_MAX_COUNT)?;
            let mut listed: Vec<&Vec<usize>> = exhausted.iter().map(|w| &w.counts).collect();
            listed.sort();
            listed.dedup();
            if listed.len() != exhausted.len() || listed.len() != all.len() {
                return Ok(false);
            }
            for w in exhausted {
                if w.counts.len() != ours.len()
                    || w.counts.iter().zip(&indices).map(|(c, i)| c * i).sum::<usize>() != m.rank()
                {
                    return Ok(false);
                }
                let Some(lv) = lattice_h0.get(&w.witness_class) else {
                    return Ok(false);
                };
                let table_row: Vec<AbelianInvariants> = ours
                    .iter()
                    .map(|u| h0_of_coset_lattice(g, &ours[w.witness_class], u))
                    .collect();
                let value = multiset_h0(std::slice::from_ref(&table_row), 0, &w.counts);
                if value != w.value || &value == lv {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Matches the orbits of a lattice whose generators act by permutation
/// matrices with the blocks of `⊕ Z[G/U_i]`, orbit by orbit, pairing basis
/// vectors with equal stabilizers. `None` when no such matching exists.
pub fn permutation_lattice_iso(m: &GLattice, targets: &[Subgroup]) -> Result<Option<IsoCertificate>> {
    let g = m.group_arc();
    let p = glattice::permutation_lattice(g, targets)?;
    if p.rank() != m.rank() || !m.is_permutation_basis() {
        return Ok(None);
    }
    let perms = |lat: &GLattice| -> Vec<Vec<usize>> {
        (0..g.order())
            .map(|e| lat.action(e).as_permutation().expect("permutation action"))
            .collect()
    };
    let (pm, pp) = (perms(m), perms(&p));
    let stab = |table: &[Vec<usize>], pt: usize| -> Vec<usize> {
        (0..g.order()).filter(|&e| table[e][pt] == pt).collect()
    };
    let mut offsets = Vec::with_capacity(targets.len());
    let mut off = 0;
    for u in targets {
        offsets.push(off);
        off += g.index(u);
    }
    let mut used = vec![false; targets.len()];
    let mut image = vec![usize::MAX; m.rank()];
    for w in 0..m.rank() {
        if image[w] != usize::MAX {
            continue;
        }
        let s = stab(&pm, w);
        let mut chosen = None;
        'blocks: for (t, u) in targets.iter().enumerate() {
            if used[t] || g.index(u) * s.len() != g.order() {
                continue;
            }
            for q in offsets[t]..offsets[t] + g.index(u) {
                if stab(&pp, q) == s {
                    chosen = Some((t, q));
                    break 'blocks;
                }
            }
        }
        let Some((t, q)) = chosen else {
            return Ok(None);
        };
        used[t] = true;
        for e in 0..g.order() {
            image[pm[e][w]] = pp[e][q];
        }
    }
    let cert = IsoCertificate {
        source: m.clone(),
        target: p,
        matrix: IntMatrix::permutation(&image),
    };
    cert.verify()?;
    Ok(Some(cert))
}

/// `J_{K/U} ≅ ψ*J_{G/H}` for a homomorphism `ψ: K → G` with `ψ(U) ⊆ H` whose
/// induced map `K/U → G/H` is a bijection. The coset bijection gives the
/// isomorphism of augmentation ideals, and its inverse transpose the one of duals.
pub fn chevalley_iso_along(
    k: &Arc<FiniteGroup>,
    u: &Subgroup,
    g: &Arc<FiniteGroup>,
    h: &Subgroup,
    psi: &[usize],
) -> Result<Option<IsoCertificate>> {
    let (ck, cg) = (k.cosets(u), g.cosets(h));
    if ck.len() != cg.len() || psi.len() != k.order() {
        return Ok(None);
    }
    let perm: Vec<usize> = ck.reps.iter().map(|&r| cg.of_element[psi[r]]).collect();
    let mut seen = perm.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != perm.len() {
        return Ok(None);
    }
    let n = perm.len();
    let src = glattice::augmentation_sequence(k, u)?;
    // coordinates of a degree-zero vector in the basis f_i = e_i - e_{i+1}
    let coords = IntMatrix::from_fn(n - 1, n, |r, c| if c <= r { Int::ONE } else { Int::ZERO });
    let a = coords.mul(&IntMatrix::permutation(&perm).mul(&src.incl.matrix));
    let Some(a_inv) = intmat::inverse_unimodular(&a) else {
        return Ok(None);
    };
    let target = match glattice::pullback(&glattice::chevalley_module(g, h)?, k, psi) {
        Ok(t) => t,
        Err(_) => return Ok(None),
    };
    let cert = IsoCertificate {
        source: glattice::chevalley_module(k, u)?,
        target,
        matrix: a_inv.transpose(),
    };
    Ok(cert.verify().is_ok().then_some(cert))
}

/// Serialized proof objects attached to reports.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    Isomorphism(IsoCertificateJson),
    /// `0 → M → P → F → 0` with `P` permutation and `F ⊕ Z^pad` isomorphic
    /// to a permutation lattice, so `[M]^fl = 0`.
    FlabbyClassZero {
        resolution: TripleJson,
        pad: usize,
        iso: IsoCertificateJson,
    },
    /// `lattice` may be omitted for payloads that only concern the group.
    Obstruction {
        group: GroupSpec,
        lattice: Option<LatticeJson>,
        max_group_order: usize,
        obstruction: Obstruction,
    },
    CyclicGroup {
        group: GroupSpec,
        generator: String,
        order: usize,
    },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Isomorphism(_) => "isomorphism",
            Certificate::FlabbyClassZero { .. } => "flabby_class_zero",
            Certificate::Obstruction { .. } => "obstruction",
            Certificate::CyclicGroup { .. } => "cyclic_group",
        }
    }

    /// Rebuilds everything from the serialized data and re-checks it.
    pub fn verify(&self) -> Result<bool> {
        match self {
            Certificate::Isomorphism(c) => Ok(c.verify().is_ok()),
            Certificate::FlabbyClassZero { resolution, pad, iso } => {
                let left = GLattice::from_json(&resolution.left)?;
                let mid = GLattice::from_json(&resolution.mid)?;
                let right = GLattice::from_json(&resolution.right)?;
                let inj = match glattice::LatticeMap::new(&left, &mid, resolution.inj.clone()) {
                    Ok(f) => f,
                    Err(_) => return Ok(false),
                };
                let surj = match glattice::LatticeMap::new(&mid, &right, resolution.surj.clone()) {
                    Ok(f) => f,
                    Err(_) => return Ok(false),
                };
                let t = ExactTriple {
                    left,
                    mid: mid.clone(),
                    right: right.clone(),
                    inj,
                    surj,
                    kind: resolution.kind,
                };
                if !verify_exact(&t)?.ok || !mid.is_permutation_basis() {
                    return Ok(false);
                }
                let padded = if *pad == 0 {
                    right.clone()
                } else {
                    glattice::direct_sum(&right, &glattice::trivial(right.group_arc(), *pad))?
                };
                let source = GLattice::from_json(&iso.source)?;
                let target = GLattice::from_json(&iso.target)?;
                Ok(source.generator_matrices() == padded.generator_matrices()
                    && source.group().spec() == right.group().spec()
                    && target.is_permutation_basis()
                    && iso.verify().is_ok())
            }
            Certificate::Obstruction {
                group,
                lattice,
                max_group_order,
                obstruction,
            } => {
                let m = match lattice {
                    Some(l) => GLattice::from_json(l)?,
                    None => {
                        if !matches!(obstruction, Obstruction::NoncyclicSylow { .. }) {
                            return Ok(false);
                        }
                        glattice::trivial(&Arc::new(group.build()?), 1)
                    }
                };
                if m.group().spec() != group {
                    return Ok(false);
                }
                verify_obstruction(obstruction, &m, *max_group_order)
            }
            Certificate::CyclicGroup { group, generator, order } => {
                let g = group.build()?;
                let e = g.parse_word(generator)?;
                Ok(g.order() == *order && g.element_order(e) == *order)
            }
        }
    }
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
    fn shells_are_ordered() {
        let v: Vec<Vec<i64>> = shell_vectors(2, 1).collect();
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], vec![-1, -1]);
        assert_eq!(v[7], vec![1, 1]);
        let w: Vec<Vec<i64>> = shell_vectors(2, 2).collect();
        assert_eq!(w.len(), 24);
        assert!(w[..8].iter().all(|x| x.iter().all(|c| c.abs() <= 1)));
        assert_eq!(shell_vectors(0, 3).count(), 0);
    }

    #[test]
    fn hom_basis_small_cases() {
        let g = d(3);
        let z = trivial(&g, 1);
        assert_eq!(hom_basis(&z, &z).unwrap(), vec![IntMatrix::identity(1)]);
        let h = g.parse_subgroup("<x*y>").unwrap();
        let p = coset_lattice(&g, &h).unwrap();
        assert_eq!(hom_basis(&p, &p).unwrap().len(), 2);
        let c2 = Arc::new(cyclic(2).unwrap());
        let s = augmentation_ideal(&c2, &c2.trivial_subgroup()).unwrap();
        assert!(hom_basis(&trivial(&c2, 1), &s).unwrap().is_empty());
    }

    #[test]
    fn find_iso_identity_and_non_iso() {
        let g = d(4);
        let j = chevalley_module(&g, &g.parse_subgroup("<y>").unwrap()).unwrap();
        let c = find_iso(&j, &j, SearchOptions::default()).unwrap();
        assert!(c.certificate().unwrap().matrix.is_identity());
        let c2 = Arc::new(cyclic(2).unwrap());
        let s = augmentation_ideal(&c2, &c2.trivial_subgroup()).unwrap();
        assert!(matches!(
            find_iso(&trivial(&c2, 1), &s, SearchOptions::default()).unwrap(),
            IsoOutcome::NotIsomorphic { .. }
        ));
    }

    #[test]
    fn conjugate_chevalley_modules_found_isomorphic() {
        let g = d(6);
        let h = g.parse_subgroup("<y>").unwrap();
        let x = g.gen_element(0);
        let a = coset_lattice(&g, &h).unwrap();
        let b = coset_lattice(&g, &g.conjugate(&h, x)).unwrap();
        let out = find_iso(&a, &b, SearchOptions::default()).unwrap();
        out.certificate().unwrap().verify().unwrap();
    }

    #[test]
    fn exactness_of_augmentation() {
        let g = d(5);
        let seq = augmentation_sequence(&g, &g.parse_subgroup("<y>").unwrap()).unwrap();
        let t = ExactTriple {
            left: seq.i.clone(),
            mid: seq.zgh.clone(),
            right: seq.z.clone(),
            inj: seq.incl.clone(),
            surj: seq.eps.clone(),
            kind: crate::resolution::TripleKind::General,
        };
        assert!(verify_exact(&t).unwrap().ok);
        let mut bad = t.clone();
        bad.surj.matrix = bad.surj.matrix.scale(&Int::from(2));
        let rep = verify_exact(&bad).unwrap();
        assert!(!rep.ok);
        assert!(rep.failures.iter().any(|f| f.contains("cokernel")));
    }

    #[test]
    fn coset_lattice_is_not_obstructed() {
        let g = d(3);
        let p = coset_lattice(&g, &g.parse_subgroup("<y>").unwrap()).unwrap();
        assert!(matches!(
            permutation_decomposition_obstruction(&p, 400).unwrap(),
            ObstructionOutcome::Inconclusive(_)
        ));
    }

    #[test]
    fn mackey_table_matches_direct_cohomology() {
        let g = d(4);
        let classes = g.subgroup_classes(400).unwrap();
        for u in classes {
            let p = coset_lattice(&g, u).unwrap();
            for v in classes {
                assert_eq!(h0_of_coset_lattice(&g, v, u), cohomology::h0(v, &p).unwrap());
            }
        }
    }

    #[test]
    fn klein_four_strategies() {
        let v4 = Arc::new(GroupSpec::parse("perms:a=(1 2)(3 4);b=(1 3)(2 4)").unwrap().build().unwrap());
        let j = chevalley_module(&v4, &v4.trivial_subgroup()).unwrap();
        let f = crate::resolution::flabby_resolution(&j, 400).unwrap().triple.right;
        let origin = LatticeOrigin::ChevalleyFlabbyClass {
            stabilizer: v4.trivial_subgroup(),
        };
        let s = sylow_strategy(&v4, &origin, 400).unwrap().unwrap();
        assert!(verify_obstruction(&s, &f, 400).unwrap());
        let h = h1_strategy(&f, 400).unwrap().unwrap();
        match &h {
            Obstruction::NonzeroH1 { subgroup, invariants } => {
                assert_eq!(subgroup.order, 4);
                assert_eq!(invariants, &AbelianInvariants::cyclic(2));
            }
            _ => panic!("wrong kind"),
        }
        assert!(verify_obstruction(&h, &f, 400).unwrap());
        let p = coset_lattice(&v4, &v4.trivial_subgroup()).unwrap();
        assert!(matches!(
            non_invertibility_certificate(&p, &LatticeOrigin::Unknown, 400).unwrap(),
            ObstructionOutcome::Inconclusive(_)
        ));
    }
}
