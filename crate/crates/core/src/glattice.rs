//! Lattices with an integral action of a finite group, and equivariant maps.
//!
//! Generator matrices act on column vectors. The action of an arbitrary
//! element is computed lazily from the BFS word of the group and memoized.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupSpec, Subgroup, Word};
use crate::int::Int;
use crate::intmat::{self, IntMatrix};

struct Inner {
    group: Arc<FiniteGroup>,
    rank: usize,
    gens: Vec<IntMatrix>,
    label: String,
    cache: Vec<OnceLock<IntMatrix>>,
}

/// A `G`-lattice. Cheap to clone.
#[derive(Clone)]
pub struct GLattice(Arc<Inner>);

impl fmt::Debug for GLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GLattice({}, rank {}, {:?})", self.0.label, self.0.rank, self.0.group)
    }
}

impl GLattice {
    /// Builds a lattice and checks that the generator matrices satisfy every
    /// relation of the group (which also forces them to be unimodular).
    pub fn new(group: Arc<FiniteGroup>, gens: Vec<IntMatrix>, label: impl Into<String>) -> Result<Self> {
        let m = Self::new_unchecked(group, gens, label)?;
        m.verify_relations()?;
        Ok(m)
    }

    /// Skips the relation check. Used for lattices obtained from already
    /// verified ones (restriction, change of basis along an invariant sublattice).
    pub fn new_unchecked(group: Arc<FiniteGroup>, gens: Vec<IntMatrix>, label: impl Into<String>) -> Result<Self> {
        if gens.len() != group.generators().len() {
            return Err(Error::InvalidLattice(format!(
                "{} generator matrices for {} generators",
                gens.len(),
                group.generators().len()
            )));
        }
        let rank = gens.first().map_or(0, IntMatrix::rows);
        for g in &gens {
            if g.rows() != rank || g.cols() != rank {
                return Err(Error::InvalidLattice("generator matrices must be square of equal size".into()));
            }
        }
        let cache = (0..group.order()).map(|_| OnceLock::new()).collect();
        Ok(GLattice(Arc::new(Inner {
            group,
            rank,
            gens,
            label: label.into(),
            cache,
        })))
    }

    fn verify_relations(&self) -> Result<()> {
        let g = self.group();
        let id = IntMatrix::identity(self.rank());
        let mut inverses = Vec::new();
        for (k, s) in self.0.gens.iter().enumerate() {
            let o = g.element_order(g.gen_element(k));
            let mut p = id.clone();
            for _ in 0..o - 1 {
                p = s.mul(&p);
            }
            if s.mul(&p) != id {
                return Err(Error::InvalidLattice(format!(
                    "generator {} does not have order dividing {o}",
                    g.gen_names()[k]
                )));
            }
            inverses.push(p);
        }
        for w in g.relations() {
            if self.eval_word_with(w, &inverses) != id {
                return Err(Error::InvalidLattice(format!("relation {w:?} fails")));
            }
        }
        Ok(())
    }

    fn eval_word_with(&self, w: &Word, inverses: &[IntMatrix]) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.rank());
        for &(k, e) in &w.0 {
            let m = if e < 0 { &inverses[k] } else { &self.0.gens[k] };
            for _ in 0..e.unsigned_abs() {
                acc = acc.mul(m);
            }
        }
        acc
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.0.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.0.group
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn with_label(&self, label: impl Into<String>) -> GLattice {
        GLattice::new_unchecked(self.0.group.clone(), self.0.gens.clone(), label).expect("same shape")
    }

    pub fn generator_matrices(&self) -> &[IntMatrix] {
        &self.0.gens
    }

    pub fn same_group(&self, other: &GLattice) -> bool {
        Arc::ptr_eq(&self.0.group, &other.0.group) || self.group().spec() == other.group().spec()
    }

    /// Action matrix of the element with index `g`.
    pub fn action(&self, g: usize) -> &IntMatrix {
        if let Some(m) = self.0.cache[g].get() {
            return m;
        }
        let group = self.group();
        // walk down the BFS tree until a cached ancestor, then build back up
        let mut chain = Vec::new();
        let mut cur = g;
        while self.0.cache[cur].get().is_none() {
            match group.tree_step(cur) {
                Some((k, parent)) => {
                    chain.push((cur, k));
                    cur = parent;
                }
                None => {
                    let _ = self.0.cache[cur].set(IntMatrix::identity(self.rank()));
                    break;
                }
            }
        }
        let mut below = cur;
        for &(elem, k) in chain.iter().rev() {
            let m = self.0.gens[k].mul(self.0.cache[below].get().expect("filled"));
            let _ = self.0.cache[elem].set(m);
            below = elem;
        }
        self.0.cache[g].get().expect("filled")
    }

    /// `Σ_{u ∈ U} ρ(u)`.
    pub fn norm_matrix(&self, u: &Subgroup) -> IntMatrix {
        let mut n = IntMatrix::zeros(self.rank(), self.rank());
        for &g in u.members() {
            n.add_assign(self.action(g));
        }
        n
    }

    /// True when every generator acts by a permutation matrix.
    pub fn is_permutation_basis(&self) -> bool {
        self.0.gens.iter().all(|m| m.as_permutation().is_some())
    }

    /// Saturated basis (columns) of the `U`-fixed vectors.
    pub fn fixed_sublattice(&self, u: &Subgroup) -> IntMatrix {
        let r = self.rank();
        if u.gens().is_empty() || r == 0 {
            return IntMatrix::identity(r);
        }
        let id = IntMatrix::identity(r);
        let blocks: Vec<IntMatrix> = u.gens().iter().map(|&g| self.action(g).sub(&id)).collect();
        intmat::kernel_basis(&IntMatrix::vstack_all(&blocks, r))
    }

    /// The lattice spanned by the (saturated, invariant) columns of `basis`,
    /// with the induced action. Fails if the span is not invariant.
    pub fn sublattice(&self, basis: &IntMatrix, label: impl Into<String>) -> Result<GLattice> {
        let l = intmat::left_inverse(basis)
            .ok_or_else(|| Error::InvalidLattice("sublattice basis is not saturated".into()))?;
        let mut gens = Vec::new();
        for s in &self.0.gens {
            let img = s.mul(basis);
            let coords = l.mul(&img);
            if basis.mul(&coords) != img {
                return Err(Error::InvalidLattice("span is not invariant".into()));
            }
            gens.push(coords);
        }
        GLattice::new_unchecked(self.0.group.clone(), gens, label)
    }

    /// `g ↦ ρ(aut[g])`. Precomposes the action with a group automorphism.
    pub fn twist(&self, aut: &[usize], label: impl Into<String>) -> GLattice {
        let g = self.group();
        let gens = (0..g.generators().len())
            .map(|k| self.action(aut[g.gen_element(k)]).clone())
            .collect();
        GLattice::new_unchecked(self.0.group.clone(), gens, label).expect("same shape")
    }

    pub fn to_json(&self) -> LatticeJson {
        let names = self.group().gen_names();
        LatticeJson {
            schema: 1,
            group: self.group().spec().clone(),
            rank: self.rank(),
            label: self.label().to_string(),
            generators: names
                .iter()
                .cloned()
                .zip(self.0.gens.iter().cloned())
                .map(|(name, matrix)| NamedMatrix { name, matrix })
                .collect(),
        }
    }

    pub fn from_json(j: &LatticeJson) -> Result<GLattice> {
        if j.schema != 1 {
            return Err(Error::Parse(format!("unsupported lattice schema {}", j.schema)));
        }
        let group = Arc::new(j.group.build()?);
        let mut gens = Vec::new();
        for name in group.gen_names() {
            let m = j
                .generators
                .iter()
                .find(|g| &g.name == name)
                .ok_or_else(|| Error::Parse(format!("no matrix for generator {name}")))?;
            gens.push(m.matrix.clone());
        }
        let lat = GLattice::new(group, gens, j.label.clone())?;
        if lat.rank() != j.rank {
            return Err(Error::Parse("rank field disagrees with matrices".into()));
        }
        Ok(lat)
    }
}

/// Serialized form of a lattice.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LatticeJson {
    pub schema: u32,
    pub group: GroupSpec,
    pub rank: usize,
    pub label: String,
    pub generators: Vec<NamedMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: IntMatrix,
}

/// Equivariant map, `matrix` is `target.rank × source.rank`.
#[derive(Clone, Debug)]
pub struct LatticeMap {
    pub source: GLattice,
    pub target: GLattice,
    pub matrix: IntMatrix,
}

impl LatticeMap {
    pub fn new(source: &GLattice, target: &GLattice, matrix: IntMatrix) -> Result<Self> {
        let m = LatticeMap {
            source: source.clone(),
            target: target.clone(),
            matrix,
        };
        m.check()?;
        Ok(m)
    }

    pub fn check(&self) -> Result<()> {
        if !self.source.same_group(&self.target) {
            return Err(Error::Dimension("maps must be between lattices over the same group".into()));
        }
        if self.matrix.rows() != self.target.rank() || self.matrix.cols() != self.source.rank() {
            return Err(Error::Dimension(format!(
                "map is {}x{}, lattices have ranks {} -> {}",
                self.matrix.rows(),
                self.matrix.cols(),
                self.source.rank(),
                self.target.rank()
            )));
        }
        let names = self.source.group().gen_names();
        for (k, (a, b)) in self
            .target
            .generator_matrices()
            .iter()
            .zip(self.source.generator_matrices())
            .enumerate()
        {
            if a.mul(&self.matrix) != self.matrix.mul(b) {
                return Err(Error::NotEquivariant(names[k].clone()));
            }
        }
        Ok(())
    }

    pub fn compose(&self, first: &LatticeMap) -> Result<LatticeMap> {
        LatticeMap::new(&first.source, &self.target, self.matrix.mul(&first.matrix))
    }
}

/// `Z[G/H]` with `G` permuting the canonically ordered left cosets.
pub fn coset_lattice(group: &Arc<FiniteGroup>, h: &Subgroup) -> Result<GLattice> {
    group.check_subgroup(h)?;
    let cos = group.cosets(h);
    let gens = (0..group.generators().len())
        .map(|k| {
            let s = group.gen_element(k);
            let perm: Vec<usize> = cos
                .reps
                .iter()
                .map(|&r| cos.of_element[group.mul(s, r)])
                .collect();
            IntMatrix::permutation(&perm)
        })
        .collect();
    GLattice::new(group.clone(), gens, format!("Z[G/{}]", subgroup_name(group, h)))
}

/// Direct sum of coset lattices, one block per subgroup in order.
pub fn permutation_lattice(group: &Arc<FiniteGroup>, hs: &[Subgroup]) -> Result<GLattice> {
    let blocks: Result<Vec<GLattice>> = hs.iter().map(|h| coset_lattice(group, h)).collect();
    let blocks = blocks?;
    if blocks.is_empty() {
        return Ok(trivial(group, 0));
    }
    let label = blocks.iter().map(|b| b.label().to_string()).collect::<Vec<_>>().join(" + ");
    Ok(direct_sum_all(&blocks)?.with_label(label))
}

/// `Z^r` with trivial action.
pub fn trivial(group: &Arc<FiniteGroup>, r: usize) -> GLattice {
    let gens = vec![IntMatrix::identity(r); group.generators().len()];
    GLattice::new_unchecked(group.clone(), gens, if r == 1 { "Z".into() } else { format!("Z^{r}") })
        .expect("identity action")
}

pub fn subgroup_name(group: &FiniteGroup, h: &Subgroup) -> String {
    if h.is_trivial() {
        return "1".into();
    }
    if h.order() == group.order() {
        return "G".into();
    }
    let names: Vec<String> = h.gens().iter().map(|&g| group.element_name(g)).collect();
    format!("<{}>", names.join(","))
}

/// `0 → I → Z[G/H] → Z → 0` with `I` in the basis `f_i = e_i - e_{i+1}`.
pub struct AugmentationSequence {
    pub i: GLattice,
    pub zgh: GLattice,
    pub z: GLattice,
    pub incl: LatticeMap,
    pub eps: LatticeMap,
}

pub fn augmentation_sequence(group: &Arc<FiniteGroup>, h: &Subgroup) -> Result<AugmentationSequence> {
    let zgh = coset_lattice(group, h)?;
    let m = zgh.rank();
    let incl_m = IntMatrix::from_fn(m, m - 1, |r, c| {
        if r == c {
            Int::ONE
        } else if r == c + 1 {
            -Int::ONE
        } else {
            Int::ZERO
        }
    });
    // coordinates of v ∈ I in the f basis are partial sums of v
    let coords = IntMatrix::from_fn(m - 1, m, |r, c| if c <= r { Int::ONE } else { Int::ZERO });
    let gens = zgh
        .generator_matrices()
        .iter()
        .map(|g| coords.mul(&g.mul(&incl_m)))
        .collect();
    let name = subgroup_name(group, h);
    let i = GLattice::new_unchecked(group.clone(), gens, format!("I_G/{name}"))?;
    let z = trivial(group, 1);
    let incl = LatticeMap::new(&i, &zgh, incl_m)?;
    let eps = LatticeMap::new(&zgh, &z, IntMatrix::from_fn(1, m, |_, _| Int::ONE))?;
    Ok(AugmentationSequence { i, zgh, z, incl, eps })
}

pub fn augmentation_ideal(group: &Arc<FiniteGroup>, h: &Subgroup) -> Result<GLattice> {
    Ok(augmentation_sequence(group, h)?.i)
}

/// `J_{G/H}`, the dual of `I_{G/H}`.
pub fn chevalley_module(group: &Arc<FiniteGroup>, h: &Subgroup) -> Result<GLattice> {
    let i = augmentation_ideal(group, h)?;
    Ok(dual(&i).with_label(format!("J_G/{}", subgroup_name(group, h))))
}

/// `Hom(M, Z)`: `g` acts by `ρ(g^{-1})^T`.
pub fn dual(m: &GLattice) -> GLattice {
    let g = m.group();
    let gens = (0..g.generators().len())
        .map(|k| m.action(g.inv(g.gen_element(k))).transpose())
        .collect();
    GLattice::new_unchecked(m.group_arc().clone(), gens, format!("({})°", m.label())).expect("same shape")
}

pub fn direct_sum(a: &GLattice, b: &GLattice) -> Result<GLattice> {
    direct_sum_all(&[a.clone(), b.clone()])
}

pub fn direct_sum_all(parts: &[GLattice]) -> Result<GLattice> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Dimension("empty direct sum".into()))?;
    if parts.iter().any(|p| !p.same_group(first)) {
        return Err(Error::Dimension("direct sum of lattices over different groups".into()));
    }
    let ngens = first.group().generators().len();
    let gens = (0..ngens)
        .map(|k| {
            let blocks: Vec<&IntMatrix> = parts.iter().map(|p| &p.generator_matrices()[k]).collect();
            IntMatrix::block_diag(&blocks)
        })
        .collect();
    let label = parts.iter().map(|p| p.label().to_string()).collect::<Vec<_>>().join(" + ");
    GLattice::new_unchecked(first.group_arc().clone(), gens, label)
}

/// The same matrices viewed as an action of `U`, as a group in its own right.
pub fn restriction(m: &GLattice, u: &Subgroup) -> Result<GLattice> {
    let parent = m.group();
    parent.check_subgroup(u)?;
    let sub = Arc::new(parent.subgroup_as_group(u)?);
    restriction_to(m, u, &sub)
}

/// Like [`restriction`] with a prebuilt group for `U` (generators in the order of `u.gens()`).
pub fn restriction_to(m: &GLattice, u: &Subgroup, sub: &Arc<FiniteGroup>) -> Result<GLattice> {
    if sub.generators().len() != u.gens().len() {
        return Err(Error::Dimension("subgroup group does not match generators".into()));
    }
    let gens = u.gens().iter().map(|&g| m.action(g).clone()).collect();
    GLattice::new_unchecked(
        sub.clone(),
        gens,
        format!("{}|{}", m.label(), subgroup_name(m.group(), u)),
    )
}

/// `M` viewed as a `K`-lattice through a homomorphism `ψ: K → G`, given as a
/// table of element indices.
pub fn pullback(m: &GLattice, k: &Arc<FiniteGroup>, psi: &[usize]) -> Result<GLattice> {
    if psi.len() != k.order() {
        return Err(Error::Dimension("homomorphism table has the wrong length".into()));
    }
    let gens = (0..k.generators().len())
        .map(|i| m.action(psi[k.gen_element(i)]).clone())
        .collect();
    GLattice::new(k.clone(), gens, m.label().to_string())
}

/// Permutation matrix carrying `Z[G/H]` onto `Z[G/H^σ]`, `H^σ = σ^{-1} H σ`:
/// the coset `gH` goes to `gσ H^σ`.
pub fn conjugation_iso(group: &FiniteGroup, h: &Subgroup, sigma: usize) -> IntMatrix {
    let hs = group.conjugate(h, sigma);
    let c1 = group.cosets(h);
    let c2 = group.cosets(&hs);
    let perm: Vec<usize> = c1
        .reps
        .iter()
        .map(|&r| c2.of_element[group.mul(r, sigma)])
        .collect();
    IntMatrix::permutation(&perm)
}

/// Parses a lattice description over `group`: summands joined by `+`, each
/// one of `Z`, `Z^r`, `P:<H>` (`Z[G/H]`), `I:<H>`, `J:<H>`, optionally
/// wrapped as `dual(...)`.
pub fn parse_lattice(group: &Arc<FiniteGroup>, spec: &str) -> Result<GLattice> {
    let parts = spec
        .split('+')
        .map(|t| parse_summand(group, t.trim()))
        .collect::<Result<Vec<_>>>()?;
    if parts.len() == 1 {
        return Ok(parts.into_iter().next().expect("one part"));
    }
    direct_sum_all(&parts)
}

fn parse_summand(group: &Arc<FiniteGroup>, t: &str) -> Result<GLattice> {
    if let Some(inner) = t.strip_prefix("dual(").and_then(|r| r.strip_suffix(')')) {
        return Ok(dual(&parse_summand(group, inner.trim())?));
    }
    if t == "Z" {
        return Ok(trivial(group, 1));
    }
    if let Some(r) = t.strip_prefix("Z^") {
        let r = r
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad rank in {t}: {e}")))?;
        if r == 0 {
            return Err(Error::Parse("Z^0 is not a summand".into()));
        }
        return Ok(trivial(group, r));
    }
    let (kind, sub) = t
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected Z, Z^r, P:<H>, I:<H> or J:<H>, got '{t}'")))?;
    let h = group.parse_subgroup(sub)?;
    match kind.trim() {
        "P" => coset_lattice(group, &h),
        "I" => augmentation_ideal(group, &h),
        "J" => chevalley_module(group, &h),
        k => Err(Error::Parse(format!("unknown lattice kind '{k}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{cyclic, dihedral_on_cosets};

    fn d(n: usize) -> Arc<FiniteGroup> {
        Arc::new(dihedral_on_cosets(n).unwrap())
    }

    #[test]
    fn coset_lattice_of_d6_over_xy() {
        let g = d(6);
        let h = g.parse_subgroup("<x*y>").unwrap();
        let m = coset_lattice(&g, &h).unwrap();
        assert_eq!(m.rank(), 6);
        // x: e_1 -> e_2 -> ... -> e_6 -> e_1
        assert_eq!(m.generator_matrices()[0].as_permutation().unwrap(), vec![1, 2, 3, 4, 5, 0]);
        assert_eq!(coset_lattice(&g, &g.whole()).unwrap().rank(), 1);
        assert_eq!(coset_lattice(&g, &g.trivial_subgroup()).unwrap().rank(), 12);
    }

    #[test]
    fn augmentation_in_f_basis() {
        let g = d(6);
        let h = g.parse_subgroup("<x*y>").unwrap();
        let seq = augmentation_sequence(&g, &h).unwrap();
        assert_eq!(seq.i.rank(), 5);
        let y = &seq.i.generator_matrices()[1];
        // y f_i = -f_{n-i}
        for i in 0..5 {
            for j in 0..5 {
                let want = if i + j == 4 { -1 } else { 0 };
                assert_eq!(y[(j, i)], Int::from(want));
            }
        }
        assert!(seq.eps.matrix.mul(&seq.incl.matrix).is_zero());
        let c2 = Arc::new(cyclic(2).unwrap());
        let s = augmentation_ideal(&c2, &c2.trivial_subgroup()).unwrap();
        assert_eq!(s.generator_matrices()[0], IntMatrix::from_i64_rows(&[[-1]]));
    }

    #[test]
    fn chevalley_and_duals() {
        let g = d(6);
        let h = g.parse_subgroup("<x*y>").unwrap();
        let j = chevalley_module(&g, &h).unwrap();
        assert_eq!(j.rank(), 5);
        let jj = dual(&dual(&j));
        assert_eq!(jj.generator_matrices(), j.generator_matrices());
        let p = coset_lattice(&g, &h).unwrap();
        assert_eq!(dual(&p).generator_matrices(), p.generator_matrices());
    }

    #[test]
    fn restriction_to_g_prime_is_transitive() {
        let g = d(6);
        let h = g.parse_subgroup("<x*y>").unwrap();
        let p = coset_lattice(&g, &h).unwrap();
        let gp = g.parse_subgroup("<x^2,y>").unwrap();
        let r = restriction(&p, &gp).unwrap();
        assert_eq!(r.rank(), 6);
        assert_eq!(r.group().order(), 6);
        assert!(r.is_permutation_basis());
        let fixed = r.fixed_sublattice(&r.group().whole());
        assert_eq!(fixed.cols(), 1);
    }

    #[test]
    fn fixed_sublattices() {
        let g = d(6);
        let h = g.parse_subgroup("<x*y>").unwrap();
        let p = coset_lattice(&g, &h).unwrap();
        let f = p.fixed_sublattice(&g.whole());
        assert_eq!(f.cols(), 1);
        assert!(f.column(0).iter().all(|v| v.abs().is_one()));
        let c2 = Arc::new(cyclic(2).unwrap());
        let s = chevalley_module(&c2, &c2.trivial_subgroup()).unwrap();
        assert_eq!(s.fixed_sublattice(&c2.whole()).cols(), 0);
    }

    #[test]
    fn bad_action_rejected() {
        let g = d(4);
        let x = IntMatrix::from_i64_rows(&[[0, 1], [1, 0]]);
        let y = IntMatrix::from_i64_rows(&[[1, 1], [0, 1]]);
        assert!(GLattice::new(g.clone(), vec![x.clone(), y], "bad").is_err());
        let ok = GLattice::new(g, vec![x.clone(), x], "ok");
        assert!(ok.is_ok());
    }

    #[test]
    fn maps_check_equivariance() {
        let g = d(5);
        let h = g.parse_subgroup("<y>").unwrap();
        let seq = augmentation_sequence(&g, &h).unwrap();
        let bad = seq.incl.matrix.select_columns(&[1, 0, 2, 3]);
        assert!(LatticeMap::new(&seq.i, &seq.zgh, bad).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = d(4);
        let j = chevalley_module(&g, &g.parse_subgroup("<y>").unwrap()).unwrap();
        let s = serde_json::to_string(&j.to_json()).unwrap();
        let back: LatticeJson = serde_json::from_str(&s).unwrap();
        let j2 = GLattice::from_json(&back).unwrap();
        assert_eq!(j2.generator_matrices(), j.generator_matrices());
        assert_eq!(j2.label(), j.label());
    }

    #[test]
    fn conjugate_coset_lattices_are_isomorphic() {
        let g = d(6);
        let h = g.parse_subgroup("<y>").unwrap();
        for sigma in 0..g.order() {
            let a = coset_lattice(&g, &h).unwrap();
            let b = coset_lattice(&g, &g.conjugate(&h, sigma)).unwrap();
            let p = conjugation_iso(&g, &h, sigma);
            LatticeMap::new(&a, &b, p).unwrap();
        }
    }

    #[test]
    fn lattice_specs() {
        let g = d(6);
        assert_eq!(parse_lattice(&g, "J:<x*y>").unwrap().rank(), 5);
        assert_eq!(parse_lattice(&g, "P:<y> + Z^2 + dual(I:1)").unwrap().rank(), 6 + 2 + 11);
        let j = parse_lattice(&g, "dual(I:<y>)").unwrap();
        assert_eq!(j.generator_matrices(), chevalley_module(&g, &g.parse_subgroup("<y>").unwrap()).unwrap().generator_matrices());
        for bad in ["", "Q:<x>", "Z^0", "P:<w>", "dual(Z"] {
            assert!(parse_lattice(&g, bad).is_err(), "{bad}");
        }
    }
}
