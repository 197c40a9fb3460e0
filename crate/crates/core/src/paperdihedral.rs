//! Explicit constructions for norm one tori with dihedral Galois group,
//! parameterized by `n`, each checked claim by claim.
//!
//! Symbols follow the printed constructions: `e_i` is the basis of `Z[G/H]`,
//! `f_i = e_i - e_{i+1}` the basis of `I_{G/H}` (with `f_n = -Σ f_i`), and
//! `α_i, β_i, γ_j` the basis of the permutation lattice `P`. The kernel
//! `C = Ker(φ)` gets the printed basis `a_i, b_i, c_l`; `z_0` spans the added
//! trivial summand and `u, v` complete the basis of `C ⊕ Z`.
//!
//! Indices are 1-based in comments and 0-based in code.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::abelian::AbelianInvariants;
use crate::certify::{self, Certificate, IsoCertificate, LatticeOrigin, ObstructionOutcome};
use crate::classify::Verdict;
use crate::cohomology;
use crate::error::{Error, Result};
use crate::glattice::{self, GLattice, LatticeMap, NamedMatrix};
use crate::groups::{self, FiniteGroup, GroupSpec, Shape, Subgroup, DEFAULT_MAX_GROUP_ORDER};
use crate::int::Int;
use crate::intmat::{self, IntMatrix};
use crate::resolution::{self, ExactTriple, TripleKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    MainI,
    MainIi,
    AppendixGalois,
    AppendixC2,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::MainI, CaseId::MainIi, CaseId::AppendixGalois, CaseId::AppendixC2];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::MainI => "main_i",
            CaseId::MainIi => "main_ii",
            CaseId::AppendixGalois => "appendix_galois",
            CaseId::AppendixC2 => "appendix_c2",
        }
    }

    /// Checks the parity constraint on `n`.
    pub fn check_parameter(self, n: usize) -> Result<()> {
        let ok = match self {
            CaseId::MainI => n >= 4 && n % 4 == 0,
            CaseId::MainIi => n >= 6 && n % 4 == 2,
            CaseId::AppendixGalois | CaseId::AppendixC2 => n >= 3 && n % 2 == 1,
        };
        if ok {
            return Ok(());
        }
        let need = match self {
            CaseId::MainI => "n ≡ 0 mod 4 and n >= 4",
            CaseId::MainIi => "n ≡ 2 mod 4 and n >= 6",
            _ => "odd n >= 3",
        };
        Err(Error::Parameter(format!("case {self} needs {need}, got n = {n}")))
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        CaseId::ALL
            .into_iter()
            .find(|c| c.as_str() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown case '{s}' (main-i, main-ii, appendix-galois, appendix-c2)")))
    }
}

/// One checkable statement about a construction. Equality ignores `elapsed`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim {
    pub id: u32,
    pub name: String,
    pub statement: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl PartialEq for Claim {
    fn eq(&self, o: &Self) -> bool {
        (self.id, &self.name, &self.statement, self.passed, &self.detail) == (o.id, &o.name, &o.statement, o.passed, &o.detail)
    }
}

#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    pub max_group_order: usize,
    /// Adds `f_1` to every `γ`-image in the `main_ii` map (a forced failure).
    pub perturb_gamma: bool,
    /// Skips the searches showing `C` is not permutation.
    pub certificate_only: bool,
}

impl BuildOptions {
    pub fn new() -> Self {
        BuildOptions {
            max_group_order: DEFAULT_MAX_GROUP_ORDER,
            perturb_gamma: false,
            certificate_only: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PaperCase {
    pub case_id: CaseId,
    pub n: usize,
    pub group: Arc<FiniteGroup>,
    pub h: Subgroup,
    pub lattices: Vec<(String, GLattice)>,
    pub maps: Vec<(String, IntMatrix)>,
    pub u: Option<i64>,
    pub v: Option<i64>,
    pub claims: Vec<Claim>,
    pub findings: Vec<String>,
    pub certificates: Vec<(String, Certificate)>,
    /// Which non-invertibility strategies fired (`main_i`).
    pub strategies: Vec<(String, bool)>,
    pub verdict: Option<Verdict>,
    pub elapsed: Duration,
}

impl PaperCase {
    fn new(case_id: CaseId, n: usize, group: Arc<FiniteGroup>, h: Subgroup) -> Self {
        PaperCase {
            case_id,
            n,
            group,
            h,
            lattices: Vec::new(),
            maps: Vec::new(),
            u: None,
            v: None,
            claims: Vec::new(),
            findings: Vec::new(),
            certificates: Vec::new(),
            strategies: Vec::new(),
            verdict: None,
            elapsed: Duration::ZERO,
        }
    }

    pub fn all_passed(&self) -> bool {
        !self.claims.is_empty() && self.claims.iter().all(|c| c.passed)
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }

    pub fn lattice(&self, name: &str) -> Option<&GLattice> {
        self.lattices.iter().find(|(k, _)| k == name).map(|(_, l)| l)
    }

    pub fn map(&self, name: &str) -> Option<&IntMatrix> {
        self.maps.iter().find(|(k, _)| k == name).map(|(_, m)| m)
    }

    pub fn certificate(&self, name: &str) -> Option<&Certificate> {
        self.certificates.iter().find(|(k, _)| k == name).map(|(_, c)| c)
    }

    fn push(&mut self, name: &str, statement: &str, started: Instant, outcome: Result<(bool, String)>) -> Result<bool> {
        let (passed, detail) = match outcome {
            Ok(x) => x,
            Err(e @ Error::ResourceBound { .. }) => return Err(e),
            Err(e) => (false, format!("error: {e}")),
        };
        self.claims.push(Claim {
            id: self.claims.len() as u32 + 1,
            name: name.into(),
            statement: statement.into(),
            passed,
            detail,
            elapsed: started.elapsed(),
        });
        Ok(passed)
    }

    fn skip(&mut self, name: &str, statement: &str, why: &str) {
        self.claims.push(Claim {
            id: self.claims.len() as u32 + 1,
            name: name.into(),
            statement: statement.into(),
            passed: false,
            detail: format!("not evaluated: {why}"),
            elapsed: Duration::ZERO,
        });
    }

    pub fn to_report(&self, with_timings: bool) -> PaperReport {
        let dimension = dimension_report(self).ok();
        PaperReport {
            schema: 1,
            case: self.case_id,
            n: self.n,
            group: self.group.spec().clone(),
            subgroup: glattice::subgroup_name(&self.group, &self.h),
            u: self.u,
            v: self.v,
            all_passed: self.all_passed(),
            verdict: self.verdict,
            claims: self.claims.clone(),
            findings: self.findings.clone(),
            strategies: self.strategies.iter().cloned().collect(),
            lattices: self
                .lattices
                .iter()
                .map(|(name, l)| LatticeSummary {
                    name: name.clone(),
                    label: l.label().to_string(),
                    group: l.group().spec().clone(),
                    rank: l.rank(),
                })
                .collect(),
            maps: self
                .maps
                .iter()
                .map(|(name, m)| NamedMatrix {
                    name: name.clone(),
                    matrix: m.clone(),
                })
                .collect(),
            certificates: self
                .certificates
                .iter()
                .map(|(name, c)| NamedCertificate {
                    name: name.clone(),
                    certificate: c.clone(),
                })
                .collect(),
            dimension,
            timings_ms: with_timings.then(|| {
                let mut t: BTreeMap<String, u64> = self
                    .claims
                    .iter()
                    .map(|c| (format!("{:02}_{}", c.id, c.name), c.elapsed.as_millis() as u64))
                    .collect();
                t.insert("total".into(), self.elapsed.as_millis() as u64);
                t
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LatticeSummary {
    pub name: String,
    pub label: String,
    pub group: GroupSpec,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NamedCertificate {
    pub name: String,
    pub certificate: Certificate,
}

/// Serialized form of a [`PaperCase`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PaperReport {
    pub schema: u32,
    pub case: CaseId,
    pub n: usize,
    pub group: GroupSpec,
    pub subgroup: String,
    pub u: Option<i64>,
    pub v: Option<i64>,
    pub all_passed: bool,
    pub verdict: Option<Verdict>,
    pub claims: Vec<Claim>,
    pub findings: Vec<String>,
    pub strategies: BTreeMap<String, bool>,
    pub lattices: Vec<LatticeSummary>,
    pub maps: Vec<NamedMatrix>,
    pub certificates: Vec<NamedCertificate>,
    pub dimension: Option<DimensionReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<BTreeMap<String, u64>>,
}

pub fn build(case: CaseId, n: usize, opts: &BuildOptions) -> Result<PaperCase> {
    case.check_parameter(n)?;
    let start = Instant::now();
    let mut c = match case {
        CaseId::MainI => main_i(n, opts),
        CaseId::MainIi => main_ii(n, opts),
        CaseId::AppendixGalois => appendix_galois(n, opts),
        CaseId::AppendixC2 => appendix_c2(n, opts),
    }?;
    c.elapsed = start.elapsed();
    Ok(c)
}

pub fn build_main_i(n: usize) -> Result<PaperCase> {
    build(CaseId::MainI, n, &BuildOptions::new())
}

pub fn build_main_ii(n: usize) -> Result<PaperCase> {
    build(CaseId::MainIi, n, &BuildOptions::new())
}

pub fn build_appendix_galois(n: usize) -> Result<PaperCase> {
    build(CaseId::AppendixGalois, n, &BuildOptions::new())
}

pub fn build_appendix_c2(n: usize) -> Result<PaperCase> {
    build(CaseId::AppendixC2, n, &BuildOptions::new())
}

/// `(u, v)` with `2u + kv = 1` for odd `k`: the extended-gcd solution
/// shifted to minimal `|u|`, ties going to positive `u`.
pub fn canonical_uv(k: i64) -> Result<(i64, i64)> {
    if k % 2 == 0 || k < 1 {
        return Err(Error::Parameter(format!("need odd k >= 1, got {k}")));
    }
    let (g, s, _) = Int::from(2).ext_gcd(&Int::from(k));
    debug_assert!(g.is_one());
    let s = s.to_i64().expect("small");
    let u0 = s.rem_euclid(k);
    let u = if u0.abs() <= (u0 - k).abs() { u0 } else { u0 - k };
    let v = (1 - 2 * u) / k;
    debug_assert_eq!(2 * u + k * v, 1);
    Ok((u, v))
}

/// The printed `(k+2) × (k+2)` completion matrix whose determinant is `-2u - kv`:
/// rows `[e_i | 0 v]` for `i ≤ k`, then `[0 | 1 -u]` and `[1 … 1 | -1 -u]`.
pub fn completion_matrix(k: usize, u: i64, v: i64) -> IntMatrix {
    IntMatrix::from_fn(k + 2, k + 2, |r, c| {
        let x = match (r, c) {
            (r, c) if r < k && c == r => 1,
            (r, c) if r < k && c == k + 1 => v,
            (r, _) if r < k => 0,
            (r, c) if r == k && c == k => 1,
            (r, c) if r == k && c == k + 1 => -u,
            (r, _) if r == k => 0,
            (_, c) if c < k => 1,
            (_, c) if c == k => -1,
            _ => -u,
        };
        Int::from(x)
    })
}

// ---------------------------------------------------------------------------
// small helpers

fn zero(k: usize) -> Vec<Int> {
    vec![Int::ZERO; k]
}

/// `f_i` (1-based) in the basis `f_1..f_{k-1}` of `I`; `f_k = -Σ f_i`.
fn f_vec(k: usize, i: usize) -> Vec<Int> {
    if i < k {
        let mut v = zero(k - 1);
        v[i - 1] = Int::ONE;
        v
    } else {
        vec![-Int::ONE; k - 1]
    }
}

fn add(a: &[Int], b: &[Int]) -> Vec<Int> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn neg(a: &[Int]) -> Vec<Int> {
    a.iter().map(|x| -x).collect()
}

fn unit(k: usize, i: usize) -> Vec<Int> {
    let mut v = zero(k);
    v[i] = Int::ONE;
    v
}

/// Matrix whose column `j` is the sparse image of basis vector `j`.
fn sparse_matrix(dim: usize, image: impl Fn(usize) -> Vec<(usize, i64)>) -> IntMatrix {
    let cols: Vec<Vec<Int>> = (0..dim)
        .map(|j| {
            let mut v = zero(dim);
            for (i, c) in image(j) {
                v[i].add_assign_ref(&Int::from(c));
            }
            v
        })
        .collect();
    IntMatrix::from_columns(&cols, dim)
}

fn perm_of(images: impl Fn(usize) -> usize, dim: usize) -> IntMatrix {
    IntMatrix::permutation(&(0..dim).map(images).collect::<Vec<_>>())
}

/// Compares the computed generator matrices with the printed ones; lists mismatching generators.
fn compare_action(lat: &GLattice, printed: &[IntMatrix]) -> (bool, String) {
    let names = lat.group().gen_names();
    let bad: Vec<&str> = lat
        .generator_matrices()
        .iter()
        .zip(printed)
        .zip(names)
        .filter(|((a, b), _)| a != b)
        .map(|(_, n)| n.as_str())
        .collect();
    if bad.is_empty() {
        (true, format!("action of {} matches on all {} basis vectors", names.join(", "), lat.rank()))
    } else {
        (false, format!("printed action of {} differs from the computed one", bad.join(", ")))
    }
}

/// `φ` is an equivariant surjection `P → I`.
fn check_phi(p: &GLattice, i: &GLattice, phi: &IntMatrix) -> (bool, String) {
    if let Err(e) = LatticeMap::new(p, i, phi.clone()) {
        return (false, format!("φ is not a G-homomorphism: {e}"));
    }
    let coker = intmat::cokernel_invariants(phi);
    let r = intmat::rank(phi);
    let ok = coker.is_trivial() && r == i.rank();
    (
        ok,
        format!("φ is a G-homomorphism; rank of image {r} of {}; cokernel {coker}", i.rank()),
    )
}

/// The printed columns `b` form a basis of `Ker(φ)` of the expected rank.
fn check_kernel_basis(phi: &IntMatrix, b: &IntMatrix, expected: usize) -> (bool, String) {
    let k = intmat::kernel_basis(phi);
    let in_kernel = phi.mul(b).is_zero();
    let sat = intmat::is_saturated(b);
    let ok = k.cols() == expected && b.cols() == expected && in_kernel && sat;
    (
        ok,
        format!(
            "rank Ker(φ) = {} (expected {expected}); printed basis: {} vectors, in kernel: {in_kernel}, saturated: {sat}",
            k.cols(),
            b.cols()
        ),
    )
}

struct Completion {
    /// `C ⊕ Z` in the completed basis
    ext: GLattice,
    det_t: Int,
    iso: Option<IsoCertificate>,
}

/// Rewrites `C ⊕ Z` in the basis given by the columns of `t` and matches it
/// with `⊕ Z[G/U]`. The certificate maps `C ⊕ Z` (original basis) onto the target.
fn complete(c: &GLattice, t: &IntMatrix, targets: &[Subgroup], label: &str) -> Result<Completion> {
    let e = glattice::direct_sum(c, &glattice::trivial(c.group_arc(), 1))?.with_label(format!("{} + Z", c.label()));
    let det_t = intmat::determinant(t)?;
    let ext = e.sublattice(t, label)?;
    let iso = match certify::permutation_lattice_iso(&ext, targets)? {
        Some(pi) => {
            let t_inv = intmat::inverse_unimodular(t)
                .ok_or_else(|| Error::Internal("completion is not unimodular".into()))?;
            let cert = IsoCertificate {
                source: e,
                target: pi.target,
                matrix: pi.matrix.mul(&t_inv),
            };
            cert.verify()?;
            Some(cert)
        }
        None => None,
    };
    Ok(Completion { ext, det_t, iso })
}

/// Dualizes `0 → C → P → I → 0` to `0 → J → P° → C° → 0`, checks it is a
/// flabby resolution, and packages `C° ⊕ Z ≅ permutation` as a certificate.
struct Dualized {
    triple: ExactTriple,
    ok: bool,
    detail: String,
    certificate: Option<Certificate>,
}

fn dualize(
    g: &Arc<FiniteGroup>,
    h: &Subgroup,
    p: &GLattice,
    c: &GLattice,
    phi: &IntMatrix,
    basis: &IntMatrix,
    iso_over_g: Option<&IsoCertificate>,
    max_order: usize,
) -> Result<Dualized> {
    let j = glattice::chevalley_module(g, h)?;
    let pd = glattice::dual(p).with_label("P°");
    let cd = glattice::dual(c).with_label("C°");
    let inj = LatticeMap::new(&j, &pd, phi.transpose())?;
    let surj = LatticeMap::new(&pd, &cd, basis.transpose())?;
    let triple = ExactTriple {
        left: j,
        mid: pd.clone(),
        right: cd.clone(),
        inj,
        surj,
        kind: TripleKind::FlabbyResolution,
    };
    let exact = certify::verify_exact(&triple)?;
    let perm = pd.is_permutation_basis();
    let flabby = cohomology::is_flabby(&cd, max_order)?;
    let certificate = match iso_over_g {
        Some(iso) => {
            let m_inv = intmat::inverse_unimodular(&iso.matrix)
                .ok_or_else(|| Error::Internal("certificate is not unimodular".into()))?;
            let dual_iso = IsoCertificate {
                source: glattice::dual(&iso.source).with_label("C° + Z"),
                target: glattice::dual(&iso.target).with_label(iso.target.label().to_string()),
                matrix: m_inv.transpose(),
            };
            dual_iso.verify()?;
            Some(Certificate::FlabbyClassZero {
                resolution: triple.to_json(),
                pad: 1,
                iso: dual_iso.to_json(),
            })
        }
        None => None,
    };
    let cert_ok = match &certificate {
        Some(c) => c.verify()?,
        None => false,
    };
    let ok = exact.ok && perm && flabby.holds && cert_ok;
    let mut detail = format!(
        "exact: {}; P° permutation: {perm}; C° flabby: {}; C° + Z ≅ permutation certificate: {cert_ok}",
        exact.ok, flabby.holds
    );
    if !exact.failures.is_empty() {
        detail.push_str(&format!(" ({})", exact.failures.join("; ")));
    }
    Ok(Dualized {
        triple,
        ok,
        detail,
        certificate,
    })
}

fn not_permutation(c: &GLattice, max_order: usize) -> Result<(bool, String, Option<Certificate>)> {
    match certify::permutation_decomposition_obstruction(c, max_order)? {
        ObstructionOutcome::Found(o) => {
            let cert = Certificate::Obstruction {
                group: c.group().spec().clone(),
                lattice: Some(c.to_json()),
                max_group_order: max_order,
                obstruction: o,
            };
            let ok = cert.verify()?;
            let tried = match &cert {
                Certificate::Obstruction {
                    obstruction: certify::Obstruction::RankMultiset { exhausted, .. },
                    ..
                } => exhausted.len(),
                _ => 0,
            };
            Ok((
                ok,
                format!("no sum of coset lattices of rank {} has the same Ĥ^0 table ({tried} candidates excluded)", c.rank()),
                Some(cert),
            ))
        }
        ObstructionOutcome::Inconclusive(why) => Ok((false, why, None)),
    }
}

// ---------------------------------------------------------------------------
// n ≡ 2 mod 4

fn main_ii(n: usize, opts: &BuildOptions) -> Result<PaperCase> {
    let m = n / 2;
    let g = Arc::new(groups::dihedral_on_cosets(n)?);
    let h = g.parse_subgroup("<x*y>")?;
    let mut case = PaperCase::new(CaseId::MainIi, n, g.clone(), h.clone());
    let i_lat = glattice::augmentation_ideal(&g, &h)?;

    // α_i ↦ i-1, β_i ↦ m+i-1, γ_j ↦ 2m+j-1
    let al = |i: usize| i - 1;
    let be = |i: usize| m + i - 1;
    let ga = |j: usize| 2 * m + j - 1;
    let rank_p = 2 * m + n;
    let mut px = vec![0; rank_p];
    let mut py = vec![0; rank_p];
    for i in 1..=m {
        px[al(i)] = al(i % m + 1);
        px[be(i)] = be(i % m + 1);
        let j = if i < m { m - i } else { m };
        py[al(i)] = be(j);
        py[be(j)] = al(i);
    }
    for j in 1..=n {
        px[ga(j)] = ga(j % n + 1);
        py[ga(j)] = ga(n + 1 - j);
    }
    let p = GLattice::new(
        g.clone(),
        vec![IntMatrix::permutation(&px), IntMatrix::permutation(&py)],
        "P",
    )?;

    let t0 = Instant::now();
    let zg = g.center();
    let r = (|| -> Result<(bool, String)> {
        let blocks = [g.parse_subgroup(&format!("<x^{m}>"))?, h.clone()];
        let centre_ok = zg == blocks[0];
        let iso = certify::permutation_lattice_iso(&p, &blocks)?;
        Ok((
            centre_ok && iso.is_some() && p.rank() == 2 * n,
            format!(
                "rank P = {}; Z(G) = <x^{m}>: {centre_ok}; P ≅ Z[G/<x^{m}>] + Z[G/<x*y>]: {}",
                p.rank(),
                iso.is_some()
            ),
        ))
    })();
    case.push("p_structure", "P ≅ Z[G/Z(G)] ⊕ Z[G/H] with rank 2n", t0, r)?;

    // φ
    let k = n;
    let f = |i: usize| f_vec(k, i);
    let x_i = &i_lat.generator_matrices()[0];
    let mut cols = vec![zero(n - 1); rank_p];
    for i in 1..=m {
        let v = add(&f(i), &f(m + i));
        cols[be(i)] = neg(&v);
        cols[al(i)] = v;
    }
    let mut w = f(m + 1);
    for l in 1..m {
        w = add(&w, &f(l));
    }
    for j in 1..=n {
        cols[ga(j)] = if opts.perturb_gamma { add(&w, &f(1)) } else { w.clone() };
        w = x_i.mul_vec(&w);
    }
    let phi = IntMatrix::from_columns(&cols, n - 1);
    case.maps.push(("phi".into(), phi.clone()));
    case.lattices.push(("I".into(), i_lat.clone()));
    case.lattices.push(("P".into(), p.clone()));

    let t0 = Instant::now();
    let (mut ok1, mut d1) = check_phi(&p, &i_lat, &phi);
    if ok1 && n <= 10 {
        // the printed route: Σ_{l=2}^{m-1} f_l and f_m + f_{m+2} are explicit
        // combinations of images, and f_1 (m ≡ 1 mod 4) or f_2 (m ≡ 3 mod 4) lies in the image
        let mut s = zero(n - 1);
        for l in 2..m {
            s = add(&s, &f(l));
        }
        let first = s == add(&cols[ga(1)], &neg(&cols[al(1)]));
        let second = add(&f(m), &f(m + 2)) == add(&add(&neg(&cols[ga(1)]), &cols[al(1)]), &cols[ga(2)]);
        let target = if m % 4 == 1 { 1 } else { 2 };
        let reach = intmat::solve(&phi, &f(target)).is_some();
        ok1 &= first && second && reach;
        d1.push_str(&format!(
            "; cross-check: Σf_l = φ(γ1)-φ(α1): {first}, f_m+f_(m+2) identity: {second}, f_{target} in image: {reach}"
        ));
    }
    let phi_ok = case.push("phi_surjective", "φ: P → I_{G/H} is a surjective G-homomorphism", t0, Ok((ok1, d1)))?;

    const REST: [(&str, &str); 6] = [
        ("rank_c", "rank C = n+1 = 2m+1, with the printed basis a_i, b_i, c_1"),
        ("printed_action", "the printed action of x, y on a_i, b_i, c_1 matches the kernel"),
        ("centre_trivial", "Z(G) = <x^m> acts trivially on C, so C is a D_m-lattice"),
        ("stably_permutation", "C ⊕ Z ≅ Z[D_m/<x^2y>] ⊕ Z[D_m/<xy>] ⊕ Z[D_m/<x>] via the u,v basis, det = -2u-mv = -1"),
        ("flabby_resolution", "0 → J_{G/H} → P° → C° → 0 is a flabby resolution"),
        ("h0_and_not_permutation", "Ĥ^0(D_m, C) = Z/2 and C is not a permutation lattice"),
    ];
    if !phi_ok {
        for (name, st) in REST {
            case.skip(name, st, "φ is not a surjective G-homomorphism");
        }
        return Ok(case);
    }

    // printed basis of C: a_i = α_i+β_i, b_i = x^{i-1}(α_1+β_m-γ_1-γ_{m+1}), c_1 = Σα
    let x_p = &p.generator_matrices()[0];
    let mut basis: Vec<Vec<Int>> = (1..=m).map(|i| add(&unit(rank_p, al(i)), &unit(rank_p, be(i)))).collect();
    let mut b = add(&unit(rank_p, al(1)), &unit(rank_p, be(m)));
    b = add(&b, &neg(&add(&unit(rank_p, ga(1)), &unit(rank_p, ga(m + 1)))));
    for _ in 1..=m {
        basis.push(b.clone());
        b = x_p.mul_vec(&b);
    }
    basis.push((1..=m).fold(zero(rank_p), |acc, i| add(&acc, &unit(rank_p, al(i)))));
    let bmat = IntMatrix::from_columns(&basis, rank_p);
    case.maps.push(("c_basis".into(), bmat.clone()));

    let t0 = Instant::now();
    let (ok2, d2) = check_kernel_basis(&phi, &bmat, 2 * m + 1);
    case.push(REST[0].0, REST[0].1, t0, Ok((ok2, d2)))?;
    let c = p.sublattice(&bmat, "C")?;
    case.lattices.push(("C".into(), c.clone()));

    // a_i ↦ i-1, b_i ↦ m+i-1, c_1 ↦ 2m
    let a_ = |i: usize| i - 1;
    let b_ = |i: usize| m + i - 1;
    let c1 = 2 * m;
    let dim_c = 2 * m + 1;
    let t0 = Instant::now();
    let printed_x = sparse_matrix(dim_c, |j| {
        if j < m {
            vec![((j + 1) % m, 1)]
        } else if j < 2 * m {
            vec![(m + (j - m + 1) % m, 1)]
        } else {
            vec![(c1, 1)]
        }
    });
    let printed_y = sparse_matrix(dim_c, |j| {
        if j < m {
            let i = j + 1;
            vec![(a_(if i < m { m - i } else { m }), 1)]
        } else if j < 2 * m {
            let i = j - m + 1;
            vec![(b_(m + 1 - i), 1)]
        } else {
            let mut v: Vec<(usize, i64)> = (1..=m).map(|i| (a_(i), 1)).collect();
            v.push((c1, -1));
            v
        }
    });
    let r3 = compare_action(&c, &[printed_x.clone(), printed_y.clone()]);
    case.push(REST[1].0, REST[1].1, t0, Ok(r3))?;

    let t0 = Instant::now();
    let xm = g.pow(g.gen_element(0), m as i64);
    let trivial_centre = c.action(xm).is_identity();
    let dm = Arc::new(groups::dihedral_on_cosets(m)?);
    let cbar = GLattice::new(dm.clone(), c.generator_matrices().to_vec(), "C");
    let r4 = (
        trivial_centre && cbar.is_ok(),
        format!(
            "x^{m} acts as the identity: {trivial_centre}; x, y satisfy the relations of D_{m} on C: {}",
            cbar.is_ok()
        ),
    );
    case.push(REST[2].0, REST[2].1, t0, Ok(r4))?;
    let cbar = match cbar {
        Ok(c) => c,
        Err(e) => {
            for (name, st) in &REST[3..] {
                case.skip(name, st, &format!("C does not descend to D_m: {e}"));
            }
            return Ok(case);
        }
    };
    case.lattices.push(("C_over_Dm".into(), cbar.clone()));

    // completion: a'_i = a_i + v z0, b_i, c'_1 = c_1 - u z0, c'_2 = Σa - c_1 - u z0
    let t0 = Instant::now();
    let (u, v) = canonical_uv(m as i64)?;
    case.u = Some(u);
    case.v = Some(v);
    let z = 2 * m + 1;
    let dim_e = 2 * m + 2;
    let t = sparse_matrix(dim_e, |j| {
        if j < m {
            vec![(a_(j + 1), 1), (z, v)]
        } else if j < 2 * m {
            vec![(j, 1)]
        } else if j == 2 * m {
            vec![(c1, 1), (z, -u)]
        } else {
            let mut w: Vec<(usize, i64)> = (1..=m).map(|i| (a_(i), 1)).collect();
            w.push((c1, -1));
            w.push((z, -u));
            w
        }
    });
    case.maps.push(("completion".into(), t.clone()));
    let paper = completion_matrix(m, u, v);
    case.maps.push(("completion_printed".into(), paper.clone()));
    let det_paper = intmat::determinant(&paper)?;
    let targets: Vec<Subgroup> = ["<x^2*y>", "<x*y>", "<x>"]
        .iter()
        .map(|s| dm.parse_subgroup(s))
        .collect::<Result<_>>()?;
    let comp = complete(&cbar, &t, &targets, "C + Z (completed basis)")?;
    // printed action on a'_i, b_i, c'_1, c'_2
    let ext_x = sparse_matrix(dim_e, |j| {
        if j < 2 * m {
            vec![(printed_x.as_permutation().expect("permutation")[j], 1)]
        } else {
            vec![(j, 1)]
        }
    });
    let ext_y = sparse_matrix(dim_e, |j| {
        if j < m {
            let i = j + 1;
            vec![(a_(if i < m { m - i } else { m }), 1)]
        } else if j < 2 * m {
            vec![(b_(m + 1 - (j - m + 1)), 1)]
        } else {
            vec![(if j == 2 * m { 2 * m + 1 } else { 2 * m }, 1)]
        }
    });
    let (ext_ok, _) = compare_action(&comp.ext, &[ext_x, ext_y]);
    let det_ok = det_paper == Int::from(-1) && det_paper == Int::from(-2 * u - (m as i64) * v);
    let ok5 = 2 * u + (m as i64) * v == 1 && det_ok && comp.det_t.abs().is_one() && ext_ok && comp.iso.is_some();
    let d5 = format!(
        "u = {u}, v = {v}, 2u+mv = {}; printed determinant {det_paper}; completion determinant {}; printed action on the new basis: {ext_ok}; certificate: {}",
        2 * u + (m as i64) * v,
        comp.det_t,
        if comp.iso.is_some() { "verified" } else { "not found" }
    );
    if let Some(iso) = &comp.iso {
        case.certificates.push(("c_plus_z_over_dm".into(), Certificate::Isomorphism(iso.to_json())));
    }
    case.push(REST[3].0, REST[3].1, t0, Ok((ok5, d5)))?;

    // the same completion over G, for the flabby-class certificate
    let t0 = Instant::now();
    let targets_g: Vec<Subgroup> = [format!("<x^{m},x^2*y>"), format!("<x^{m},x*y>"), "<x>".to_string()]
        .iter()
        .map(|s| g.parse_subgroup(s))
        .collect::<Result<_>>()?;
    let comp_g = complete(&c, &t, &targets_g, "C + Z (completed basis)")?;
    let dz = dualize(&g, &h, &p, &c, &phi, &bmat, comp_g.iso.as_ref(), opts.max_group_order)?;
    if let Some(cert) = dz.certificate.clone() {
        case.certificates.push(("flabby_class_zero".into(), cert));
    }
    case.push(REST[4].0, REST[4].1, t0, Ok((dz.ok, dz.detail)))?;
    case.lattices.push(("J".into(), dz.triple.left.clone()));
    case.lattices.push(("P_dual".into(), dz.triple.mid.clone()));
    case.lattices.push(("C_dual".into(), dz.triple.right.clone()));

    if opts.certificate_only {
        case.skip(REST[5].0, REST[5].1, "certificate-only build");
        return Ok(case);
    }
    let t0 = Instant::now();
    let r7 = (|| -> Result<(bool, String)> {
        let h0 = cohomology::h0(&dm.whole(), &cbar)?;
        let (np, detail, cert) = not_permutation(&cbar, opts.max_group_order)?;
        if let Some(cert) = cert {
            case.certificates.push(("c_not_permutation".into(), cert));
        }
        let h0_ok = h0 == AbelianInvariants::cyclic(2);
        Ok((h0_ok && np, format!("Ĥ^0(D_{m}, C) = {h0}; {detail}")))
    })();
    case.push(REST[5].0, REST[5].1, t0, r7)?;

    if case.all_passed() {
        case.verdict = Some(Verdict::StablyRational);
    }
    Ok(case)
}

// ---------------------------------------------------------------------------
// n ≡ 0 mod 4

fn main_i(n: usize, opts: &BuildOptions) -> Result<PaperCase> {
    let m = n / 2;
    let max = opts.max_group_order;
    let g = Arc::new(groups::dihedral_on_cosets(n)?);
    let h = g.parse_subgroup("<x*y>")?;
    let mut case = PaperCase::new(CaseId::MainI, n, g.clone(), h.clone());
    let gp = g.parse_subgroup("<x^2,y>")?;

    let t0 = Instant::now();
    let shape = g.shape(&gp);
    let is_dm = gp.order() == 2 * m && matches!(shape, Shape::Dihedral { k, .. } if k == m);
    case.push(
        "restriction_dihedral",
        "G' = <x^2, y> ≅ D_m",
        t0,
        Ok((is_dm, format!("|G'| = {}, shape {:?}", gp.order(), shape))),
    )?;

    let t0 = Instant::now();
    let meet = g.intersection(&h, &gp);
    case.push(
        "restriction_meets_h_trivially",
        "H ∩ G' = {1}",
        t0,
        Ok((meet.is_trivial(), format!("|H ∩ G'| = {}", meet.order()))),
    )?;

    let t0 = Instant::now();
    let trans = g.is_transitive(&gp);
    case.push(
        "restriction_transitive",
        "G' is transitive on the n points",
        t0,
        Ok((trans, format!("orbits of G': {}", g.orbits(&gp).len()))),
    )?;

    let sub = Arc::new(g.subgroup_as_group(&gp)?);
    let j = glattice::chevalley_module(&g, &h)?;
    case.lattices.push(("J".into(), j.clone()));

    let t0 = Instant::now();
    let r4 = (|| -> Result<(bool, String)> {
        let cert = restricted_chevalley_iso(&g, &h, &gp, &sub)?;
        let ok = match &cert {
            Some(c) => c.verify().is_ok(),
            None => false,
        };
        if let Some(c) = cert {
            case.certificates.push(("j_restricted_to_g_prime".into(), Certificate::Isomorphism(c.to_json())));
        }
        Ok((ok, format!("J_{{G/H}}|G' ≅ J_{{G'}} certificate verified: {ok}")))
    })();
    case.push(
        "restriction_is_regular_chevalley",
        "J_{G/H} restricted to G' is J_{G'} (H ∩ G' = 1, G' transitive)",
        t0,
        r4,
    )?;

    let t0 = Instant::now();
    let res = resolution::flabby_resolution(&j, max)?;
    let exact = certify::verify_exact(&res.triple)?;
    let f = res.triple.right.clone();
    let perm = res.triple.mid.is_permutation_basis();
    case.push(
        "flabby_resolution",
        "0 → J_{G/H} → P → F → 0 is a flabby resolution",
        t0,
        Ok((
            exact.ok && perm,
            format!(
                "rank P = {}, rank F = {}; exact: {}; P permutation: {perm}; F flabby (checked during construction)",
                res.triple.mid.rank(),
                f.rank(),
                exact.ok
            ),
        )),
    )?;
    case.lattices.push(("P".into(), res.triple.mid.clone()));
    case.lattices.push(("F".into(), f.clone()));

    let fr = glattice::restriction_to(&f, &gp, &sub)?;
    let origin = LatticeOrigin::ChevalleyFlabbyClass {
        stabilizer: sub.trivial_subgroup(),
    };

    let t0 = Instant::now();
    let sylow = certify::sylow_strategy(&sub, &origin, max)?;
    let r6 = match &sylow {
        Some(o) => {
            let cert = Certificate::Obstruction {
                group: sub.spec().clone(),
                lattice: None,
                max_group_order: max,
                obstruction: o.clone(),
            };
            let ok = cert.verify()?;
            let detail = match o {
                certify::Obstruction::NoncyclicSylow { prime, sylow, .. } => {
                    format!("Sylow {prime}-subgroup {} of order {} is not cyclic; re-verified: {ok}", sylow.name, sylow.order)
                }
                _ => String::new(),
            };
            case.certificates.push(("noncyclic_sylow".into(), cert));
            (ok, detail)
        }
        None => (false, "every Sylow subgroup of G' is cyclic".into()),
    };
    case.strategies.push(("sylow".into(), sylow.is_some()));
    case.push("sylow_noncyclic", "a Sylow 2-subgroup of G' is not cyclic", t0, Ok(r6))?;

    let t0 = Instant::now();
    let outcome = certify::non_invertibility_certificate(&fr, &origin, max)?;
    let h1 = certify::h1_strategy(&fr, max)?;
    case.strategies.push(("h1".into(), h1.is_some()));
    let h1_text = match &h1 {
        Some(certify::Obstruction::NonzeroH1 { subgroup, invariants }) => {
            format!("H^1({}, F|G') = {invariants} (order {})", subgroup.name, subgroup.order)
        }
        _ => "all H^1(U, F|G') vanish".into(),
    };
    case.findings.push(format!(
        "n = {n}: H^1 strategy {} on F restricted to G' ({h1_text})",
        if h1.is_some() { "also fires" } else { "does not fire" }
    ));
    let fired = outcome.obstruction().is_some();
    case.push(
        "not_invertible",
        "[J_{G/H}]^fl restricted to G' is not invertible",
        t0,
        Ok((fired, format!("non-invertibility certificate found: {fired}; {h1_text}"))),
    )?;

    if case.all_passed() {
        case.verdict = Some(Verdict::NotRetractRational);
    }
    Ok(case)
}

/// `J_{G/H}|_{G'} ≅ J_{G'}` when `G'` acts regularly on `G/H`.
pub fn restricted_chevalley_iso(
    g: &Arc<FiniteGroup>,
    h: &Subgroup,
    gp: &Subgroup,
    sub: &Arc<FiniteGroup>,
) -> Result<Option<IsoCertificate>> {
    let to_parent: Vec<usize> = sub
        .elements()
        .iter()
        .map(|p| g.index_of(p).ok_or_else(|| Error::Internal("subgroup element not in group".into())))
        .collect::<Result<_>>()?;
    if to_parent.iter().any(|&e| !gp.contains(e)) {
        return Err(Error::Dimension("group does not match the subgroup".into()));
    }
    certify::chevalley_iso_along(sub, &sub.trivial_subgroup(), g, h, &to_parent)
}

// ---------------------------------------------------------------------------
// odd n, H = 1

fn appendix_galois(n: usize, opts: &BuildOptions) -> Result<PaperCase> {
    let g = Arc::new(groups::dihedral_regular(n)?);
    let h = g.trivial_subgroup();
    let mut case = PaperCase::new(CaseId::AppendixGalois, n, g.clone(), h.clone());
    let k = 2 * n;
    let i_lat = glattice::augmentation_ideal(&g, &h)?;

    // α_i ↦ i-1, β_i ↦ 2n+i-1
    let al = |i: usize| i - 1;
    let be = |i: usize| k + i - 1;
    let rank_p = 2 * k;
    let step = |i: usize| (i + 1) % k + 1; // i ↦ i+2 within 1..2n
    let mut px = vec![0; rank_p];
    let mut py = vec![0; rank_p];
    for i in 1..=k {
        px[al(i)] = al(step(i));
        px[be(i)] = be(step(i));
        let j = if i < k { k - i } else { k };
        py[al(i)] = be(j);
        py[be(j)] = al(i);
    }
    let p = GLattice::new(
        g.clone(),
        vec![IntMatrix::permutation(&px), IntMatrix::permutation(&py)],
        "P",
    )?;
    let t0 = Instant::now();
    let iso_p = certify::permutation_lattice_iso(&p, &[h.clone(), h.clone()])?;
    case.push(
        "p_structure",
        "P ≅ Z[G] ⊕ Z[G]",
        t0,
        Ok((iso_p.is_some(), format!("rank P = {}; matched with Z[G] + Z[G]: {}", p.rank(), iso_p.is_some()))),
    )?;

    let cols: Vec<Vec<Int>> = (1..=k)
        .map(|i| f_vec(k, i))
        .chain((1..=k).map(|i| neg(&f_vec(k, i))))
        .collect();
    let phi = IntMatrix::from_columns(&cols, k - 1);
    case.maps.push(("phi".into(), phi.clone()));
    case.lattices.push(("I".into(), i_lat.clone()));
    case.lattices.push(("P".into(), p.clone()));

    let t0 = Instant::now();
    let r1 = check_phi(&p, &i_lat, &phi);
    let phi_ok = case.push("phi_surjective", "φ: P → I_G is a surjective G-homomorphism", t0, Ok(r1))?;
    if !phi_ok {
        return Ok(case);
    }

    // a_i = α_i + β_i (1 ≤ i ≤ 2n), b_1 = Σα
    let mut basis: Vec<Vec<Int>> = (1..=k).map(|i| add(&unit(rank_p, al(i)), &unit(rank_p, be(i)))).collect();
    basis.push((1..=k).fold(zero(rank_p), |acc, i| add(&acc, &unit(rank_p, al(i)))));
    let bmat = IntMatrix::from_columns(&basis, rank_p);
    case.maps.push(("c_basis".into(), bmat.clone()));
    case.findings.push(format!(
        "the basis of C is listed as a_i (1 ≤ i ≤ n) but spans a_1, …, a_{{2n}}; the builder uses all 2n = {k} vectors a_i, which with b_1 gives the stated rank 2n+1"
    ));

    let t0 = Instant::now();
    let r2 = check_kernel_basis(&phi, &bmat, k + 1);
    case.push("rank_c", "rank C = 2n+1, with the printed basis a_i, b_1", t0, Ok(r2))?;
    let c = p.sublattice(&bmat, "C")?;
    case.lattices.push(("C".into(), c.clone()));

    // a_i ↦ i-1, b_1 ↦ 2n
    let dim_c = k + 1;
    let b1 = k;
    let t0 = Instant::now();
    let printed_x = sparse_matrix(dim_c, |j| if j < k { vec![(step(j + 1) - 1, 1)] } else { vec![(b1, 1)] });
    let printed_y = sparse_matrix(dim_c, |j| {
        if j < k {
            let i = j + 1;
            vec![((if i < k { k - i } else { k }) - 1, 1)]
        } else {
            let mut v: Vec<(usize, i64)> = (0..k).map(|i| (i, 1)).collect();
            v.push((b1, -1));
            v
        }
    });
    let r3 = compare_action(&c, &[printed_x, printed_y]);
    case.findings.push(format!(
        "y fixes a_n = a_{n} as well as a_{{2n}}; the printed action lists only a_{{2n}} (the pairing a_i ↔ a_{{2n-i}} sends a_n to itself)"
    ));
    case.push("printed_action", "the printed action of x, y on a_i, b_1 matches the kernel", t0, Ok(r3))?;

    // a'_{2i-1} = a_{2i-1} + v z0, a_{2i}, b'_1 = b_1 - u z0, b'_2 = Σa - b_1 - u z0
    let t0 = Instant::now();
    let (u, v) = canonical_uv(n as i64)?;
    case.u = Some(u);
    case.v = Some(v);
    let z = k + 1;
    let dim_e = k + 2;
    // new basis order: a'_1, a'_3, …, a'_{2n-1}, a_2, a_4, …, a_{2n}, b'_1, b'_2
    let slot_odd = |i: usize| (i - 1) / 2;
    let slot_even = |i: usize| n + i / 2 - 1;
    let t = sparse_matrix(dim_e, |j| {
        if j < n {
            vec![(2 * j, 1), (z, v)]
        } else if j < k {
            vec![(2 * (j - n) + 1, 1)]
        } else if j == k {
            vec![(b1, 1), (z, -u)]
        } else {
            let mut w: Vec<(usize, i64)> = (0..k).map(|i| (i, 1)).collect();
            w.push((b1, -1));
            w.push((z, -u));
            w
        }
    });
    case.maps.push(("completion".into(), t.clone()));
    let paper = completion_matrix(n, u, v);
    case.maps.push(("completion_printed".into(), paper.clone()));
    let det_paper = intmat::determinant(&paper)?;
    let slot = |i: usize| if i % 2 == 1 { slot_odd(i) } else { slot_even(i) };
    let ext_x = sparse_matrix(dim_e, |j| {
        if j < n {
            vec![(slot_odd(step(2 * j + 1)), 1)]
        } else if j < k {
            vec![(slot_even(step(2 * (j - n) + 2)), 1)]
        } else {
            vec![(j, 1)]
        }
    });
    let ext_y = sparse_matrix(dim_e, |j| {
        if j < k {
            let i = if j < n { 2 * j + 1 } else { 2 * (j - n) + 2 };
            vec![(slot(if i < k { k - i } else { k }), 1)]
        } else {
            vec![(if j == k { k + 1 } else { k }, 1)]
        }
    });
    let targets: Vec<Subgroup> = ["<x*y>", "<x^2*y>", "<x>"]
        .iter()
        .map(|s| g.parse_subgroup(s))
        .collect::<Result<_>>()?;
    let comp = complete(&c, &t, &targets, "C + Z (completed basis)")?;
    let (ext_ok, _) = compare_action(&comp.ext, &[ext_x, ext_y]);
    let uv_ok = 2 * u + (n as i64) * v == 1;
    let det_ok = det_paper == Int::from(-1) && det_paper == Int::from(-2 * u - (n as i64) * v);
    case.push(
        "completion",
        "2u + nv = 1 and the printed completion has determinant -2u-nv = -1",
        t0,
        Ok((
            uv_ok && det_ok && comp.det_t.abs().is_one() && ext_ok,
            format!(
                "u = {u}, v = {v}; printed determinant {det_paper}; completion determinant {}; printed action on the new basis: {ext_ok}",
                comp.det_t
            ),
        )),
    )?;

    let t0 = Instant::now();
    if let Some(iso) = &comp.iso {
        case.certificates.push(("c_plus_z".into(), Certificate::Isomorphism(iso.to_json())));
    }
    case.push(
        "stably_permutation",
        "C ⊕ Z ≅ Z[G/<xy>] ⊕ Z[G/<x^2y>] ⊕ Z[G/<x>], rank (2n+1)+1 = n+n+2",
        t0,
        Ok((
            comp.iso.is_some() && k + 2 == n + n + 2,
            format!(
                "rank C ⊕ Z = {}; certificate {}",
                k + 2,
                if comp.iso.is_some() { "verified" } else { "not found" }
            ),
        )),
    )?;

    finish_appendix(&mut case, &g, &h, &p, &c, &phi, &bmat, comp.iso.as_ref(), opts)?;
    Ok(case)
}

/// Shared tail: dual flabby resolution, dimension identity, `C` not permutation.
#[allow(clippy::too_many_arguments)]
fn finish_appendix(
    case: &mut PaperCase,
    g: &Arc<FiniteGroup>,
    h: &Subgroup,
    p: &GLattice,
    c: &GLattice,
    phi: &IntMatrix,
    bmat: &IntMatrix,
    iso: Option<&IsoCertificate>,
    opts: &BuildOptions,
) -> Result<()> {
    let t0 = Instant::now();
    let dz = dualize(g, h, p, c, phi, bmat, iso, opts.max_group_order)?;
    if let Some(cert) = dz.certificate.clone() {
        case.certificates.push(("flabby_class_zero".into(), cert));
    }
    case.push(
        "flabby_resolution",
        "0 → J_{G/H} → P° → C° → 0 is a flabby resolution and [J_{G/H}]^fl = [C°] = 0",
        t0,
        Ok((dz.ok, dz.detail)),
    )?;
    case.lattices.push(("J".into(), dz.triple.left.clone()));
    case.lattices.push(("P_dual".into(), dz.triple.mid.clone()));
    case.lattices.push(("C_dual".into(), dz.triple.right.clone()));

    let t0 = Instant::now();
    let r = dimension_report(case).map(|d| (d.holds, d.rendered.clone()));
    case.push("dimension_identity", "both tori in the birational equivalence have the same dimension", t0, r)?;

    if opts.certificate_only {
        case.skip("not_permutation", "C is not a permutation lattice", "certificate-only build");
        return Ok(());
    }
    let t0 = Instant::now();
    let r = (|| -> Result<(bool, String)> {
        let (ok, detail, cert) = not_permutation(c, opts.max_group_order)?;
        if let Some(cert) = cert {
            case.certificates.push(("c_not_permutation".into(), cert));
        }
        Ok((ok, detail))
    })();
    case.push("not_permutation", "C is not a permutation lattice", t0, r)?;

    if case.all_passed() {
        case.verdict = Some(Verdict::StablyRational);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// odd n, H = <xy>

fn appendix_c2(n: usize, opts: &BuildOptions) -> Result<PaperCase> {
    let g = Arc::new(groups::dihedral_on_cosets(n)?);
    let h = g.parse_subgroup("<x*y>")?;
    let mut case = PaperCase::new(CaseId::AppendixC2, n, g.clone(), h.clone());
    let i_lat = glattice::augmentation_ideal(&g, &h)?;
    let al = |i: usize| i - 1;
    let be = |i: usize| n + i - 1;
    let rank_p = 2 * n;

    let cols: Vec<Vec<Int>> = (1..=n)
        .map(|i| f_vec(n, i))
        .chain((1..=n).map(|i| neg(&f_vec(n, i))))
        .collect();
    let phi = IntMatrix::from_columns(&cols, n - 1);

    // the printed pairings: y f_i = -f_{n+1-i} and α_i ↔ β_{n+1-i}
    let printed_yf = IntMatrix::from_columns(&(1..n).map(|i| neg(&f_vec(n, n + 1 - i))).collect::<Vec<_>>(), n - 1);
    let yf_matches = &i_lat.generator_matrices()[1] == &printed_yf;
    let px = perm_of(|s| if s < n { (s + 1) % n } else { be((s - n + 1) % n + 1) }, rank_p);
    let py_printed = perm_of(|s| if s < n { be(n + 1 - (s + 1)) } else { al(n + 1 - (s - n + 1)) }, rank_p);
    let printed_p = GLattice::new(g.clone(), vec![px.clone(), py_printed], "P (printed)")?;
    let printed_equivariant = LatticeMap::new(&printed_p, &i_lat, phi.clone()).is_ok();
    if !yf_matches || !printed_equivariant {
        case.findings.push(format!(
            "printed y-action is off by one: y e_i = e_{{n+1-i}} gives y f_i = -f_{{n-i}}, not -f_{{n+1-i}} (printed formula matches: {yf_matches}); with α_i ↔ β_{{n+1-i}} the map φ is not equivariant (equivariant: {printed_equivariant}); the builder uses α_i ↔ β_{{n-i}} (i < n), α_n ↔ β_n"
        ));
    }

    let py = perm_of(
        |s| {
            if s < n {
                let i = s + 1;
                be(if i < n { n - i } else { n })
            } else {
                let i = s - n + 1;
                al(if i < n { n - i } else { n })
            }
        },
        rank_p,
    );
    let p = GLattice::new(g.clone(), vec![px, py], "P")?;
    let t0 = Instant::now();
    let iso_p = certify::permutation_lattice_iso(&p, &[g.trivial_subgroup()])?;
    case.push(
        "p_structure",
        "P ≅ Z[G]",
        t0,
        Ok((iso_p.is_some(), format!("rank P = {}; matched with Z[G]: {}", p.rank(), iso_p.is_some()))),
    )?;
    case.maps.push(("phi".into(), phi.clone()));
    case.lattices.push(("I".into(), i_lat.clone()));
    case.lattices.push(("P".into(), p.clone()));

    let t0 = Instant::now();
    let r1 = check_phi(&p, &i_lat, &phi);
    let phi_ok = case.push("phi_surjective", "φ: P → I_{G/H} is a surjective G-homomorphism", t0, Ok(r1))?;
    if !phi_ok {
        return Ok(case);
    }

    let mut basis: Vec<Vec<Int>> = (1..=n).map(|i| add(&unit(rank_p, al(i)), &unit(rank_p, be(i)))).collect();
    basis.push((1..=n).fold(zero(rank_p), |acc, i| add(&acc, &unit(rank_p, al(i)))));
    let bmat = IntMatrix::from_columns(&basis, rank_p);
    case.maps.push(("c_basis".into(), bmat.clone()));
    let t0 = Instant::now();
    let r2 = check_kernel_basis(&phi, &bmat, n + 1);
    case.push("rank_c", "rank C = n+1, with the printed basis a_i, b_1", t0, Ok(r2))?;
    let c = p.sublattice(&bmat, "C")?;
    case.lattices.push(("C".into(), c.clone()));

    let dim_c = n + 1;
    let b1 = n;
    let refl = |i: usize, shift: usize| -> usize {
        // a_i ↔ a_{n+shift-i} with indices mod n in 1..n
        (n + shift + n - i - 1) % n
    };
    let action_with = |shift: usize| -> [IntMatrix; 2] {
        let x = sparse_matrix(dim_c, |j| if j < n { vec![((j + 1) % n, 1)] } else { vec![(b1, 1)] });
        let y = sparse_matrix(dim_c, |j| {
            if j < n {
                vec![(refl(j + 1, shift), 1)]
            } else {
                let mut v: Vec<(usize, i64)> = (0..n).map(|i| (i, 1)).collect();
                v.push((b1, -1));
                v
            }
        });
        [x, y]
    };
    let t0 = Instant::now();
    let (ok3, d3) = compare_action(&c, &action_with(0));
    let (printed_ok, _) = compare_action(&c, &action_with(1));
    if !printed_ok {
        // the printed y-action a_i ↔ a_{n+1-i} is the computed one after re-indexing a_i ↦ a_{i+s}
        let printed = action_with(1);
        let shift = (0..n).find(|&s| {
            let sigma = perm_of(|j| if j < n { (j + s) % n } else { j }, dim_c);
            c.generator_matrices()
                .iter()
                .zip(&printed)
                .all(|(m, q)| &sigma.transpose().mul(m).mul(&sigma) == q)
        });
        case.findings.push(match shift {
            Some(s) => format!(
                "printed action on C (a_i ↔ a_{{n+1-i}}, a_{{(n+1)/2}} fixed) differs from the kernel of the consistent φ (a_i ↔ a_{{n-i}}, a_n fixed); they agree after re-indexing a_i ↦ a_{{i+{s}}}"
            ),
            None => "printed action on C differs from the kernel of the consistent φ and no cyclic re-indexing reconciles them".into(),
        });
    }
    case.push(
        "printed_action",
        "the action on a_i, b_1 matches the kernel (with the corrected index pairing)",
        t0,
        Ok((ok3, d3)),
    )?;

    // a'_i = a_i + v z0, b'_1 = b_1 - u z0, b'_2 = Σa - b_1 - u z0
    let t0 = Instant::now();
    let (u, v) = canonical_uv(n as i64)?;
    case.u = Some(u);
    case.v = Some(v);
    let z = n + 1;
    let dim_e = n + 2;
    let t = sparse_matrix(dim_e, |j| {
        if j < n {
            vec![(j, 1), (z, v)]
        } else if j == n {
            vec![(b1, 1), (z, -u)]
        } else {
            let mut w: Vec<(usize, i64)> = (0..n).map(|i| (i, 1)).collect();
            w.push((b1, -1));
            w.push((z, -u));
            w
        }
    });
    case.maps.push(("completion".into(), t.clone()));
    let paper = completion_matrix(n, u, v);
    case.maps.push(("completion_printed".into(), paper.clone()));
    let det_paper = intmat::determinant(&paper)?;
    let [cx, cy] = action_with(0);
    let ext_x = sparse_matrix(dim_e, |j| if j < n { vec![(cx.as_permutation().expect("perm")[j], 1)] } else { vec![(j, 1)] });
    let ext_y = sparse_matrix(dim_e, |j| {
        if j < n {
            vec![(cy.column(j).iter().position(|e| !e.is_zero()).expect("image"), 1)]
        } else {
            vec![(if j == n { n + 1 } else { n }, 1)]
        }
    });
    let targets: Vec<Subgroup> = ["<x*y>", "<x>"].iter().map(|s| g.parse_subgroup(s)).collect::<Result<_>>()?;
    let comp = complete(&c, &t, &targets, "C + Z (completed basis)")?;
    let (ext_ok, _) = compare_action(&comp.ext, &[ext_x, ext_y]);
    let uv_ok = 2 * u + (n as i64) * v == 1;
    let det_ok = det_paper == Int::from(-1) && det_paper == Int::from(-2 * u - (n as i64) * v);
    case.push(
        "completion",
        "2u + nv = 1 and the printed completion has determinant -2u-nv = -1",
        t0,
        Ok((
            uv_ok && det_ok && comp.det_t.abs().is_one() && ext_ok,
            format!(
                "u = {u}, v = {v}; printed determinant {det_paper}; completion determinant {}; action on the new basis: {ext_ok}",
                comp.det_t
            ),
        )),
    )?;

    let t0 = Instant::now();
    if let Some(iso) = &comp.iso {
        case.certificates.push(("c_plus_z".into(), Certificate::Isomorphism(iso.to_json())));
    }
    case.push(
        "stably_permutation",
        "C ⊕ Z ≅ Z[G/<xy>] ⊕ Z[G/<x>], rank (n+1)+1 = n+2",
        t0,
        Ok((
            comp.iso.is_some(),
            format!(
                "rank C ⊕ Z = {}; certificate {}",
                n + 2,
                if comp.iso.is_some() { "verified" } else { "not found" }
            ),
        )),
    )?;

    finish_appendix(&mut case, &g, &h, &p, &c, &phi, &bmat, comp.iso.as_ref(), opts)?;
    Ok(case)
}

// ---------------------------------------------------------------------------
// dimension bookkeeping

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DimensionTerm {
    /// e.g. `R^(1)_{K/k}(G_m)`, `R_{k1/k}(G_m)`, `G_m`
    pub torus: String,
    /// subgroup `U` with `k_i = L^U`
    pub subgroup: String,
    pub index: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DimensionReport {
    pub lhs: Vec<DimensionTerm>,
    pub rhs: Vec<DimensionTerm>,
    pub lhs_total: usize,
    pub rhs_total: usize,
    pub expected: usize,
    pub holds: bool,
    pub rendered: String,
}

/// Both sides of the birational equivalence, with `[k_i : k] = [G : U_i]`.
pub fn dimension_report(case: &PaperCase) -> Result<DimensionReport> {
    let g = &case.group;
    let n = case.n;
    let term = |torus: &str, spec: &str, norm_one: bool| -> Result<DimensionTerm> {
        let u = g.parse_subgroup(spec)?;
        let index = g.index(&u);
        Ok(DimensionTerm {
            torus: torus.into(),
            subgroup: glattice::subgroup_name(g, &u),
            index,
            dim: if norm_one { index - 1 } else { index },
        })
    };
    let (lhs, rhs, expected) = match case.case_id {
        CaseId::MainIi => {
            let m = n / 2;
            (
                vec![
                    term("R^(1)_{K/k}(G_m)", "<x*y>", true)?,
                    term("R_{k1/k}(G_m)", &format!("<x^{m},x^2*y>"), false)?,
                    term("R_{k2/k}(G_m)", &format!("<x^{m},x*y>"), false)?,
                    term("R_{k3/k}(G_m)", "<x>", false)?,
                ],
                vec![
                    term("R_{k4/k}(G_m)", &format!("<x^{m}>"), false)?,
                    term("R_{k5/k}(G_m)", "<x*y>", false)?,
                    term("G_m", "G", false)?,
                ],
                2 * n + 1,
            )
        }
        CaseId::AppendixGalois => (
            vec![
                term("R^(1)_{K/k}(G_m)", "1", true)?,
                term("R_{k1/k}(G_m)", "<x*y>", false)?,
                term("R_{k2/k}(G_m)", "<x^2*y>", false)?,
                term("R_{k3/k}(G_m)", "<x>", false)?,
            ],
            vec![
                term("R_{L/k}(G_m)", "1", false)?,
                term("R_{L/k}(G_m)", "1", false)?,
                term("G_m", "G", false)?,
            ],
            4 * n + 1,
        ),
        CaseId::AppendixC2 => (
            vec![
                term("R^(1)_{K/k}(G_m)", "<x*y>", true)?,
                term("R_{k1/k}(G_m)", "<x*y>", false)?,
                term("R_{k2/k}(G_m)", "<x>", false)?,
            ],
            vec![term("R_{L/k}(G_m)", "1", false)?, term("G_m", "G", false)?],
            2 * n + 1,
        ),
        CaseId::MainI => {
            return Err(Error::Parameter("no dimension identity in the non-rational case".into()));
        }
    };
    let lhs_total: usize = lhs.iter().map(|t| t.dim).sum();
    let rhs_total: usize = rhs.iter().map(|t| t.dim).sum();
    let join = |ts: &[DimensionTerm]| ts.iter().map(|t| t.dim.to_string()).collect::<Vec<_>>().join(" + ");
    Ok(DimensionReport {
        rendered: format!("{} = {lhs_total} = {}", join(&lhs), join(&rhs)),
        holds: lhs_total == rhs_total && lhs_total == expected,
        lhs,
        rhs,
        lhs_total,
        rhs_total,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uv_choice() {
        assert_eq!(canonical_uv(3).unwrap(), (-1, 1));
        assert_eq!(canonical_uv(5).unwrap(), (-2, 1));
        assert_eq!(canonical_uv(1).unwrap(), (0, 1));
        for k in (1..40).step_by(2) {
            let (u, v) = canonical_uv(k).unwrap();
            assert_eq!(2 * u + k * v, 1);
            assert!(2 * u.abs() <= k);
        }
        assert!(canonical_uv(4).is_err());
    }

    #[test]
    fn completion_determinant() {
        for k in (3..20).step_by(2) {
            let (u, v) = canonical_uv(k as i64).unwrap();
            let d = intmat::determinant(&completion_matrix(k, u, v)).unwrap();
            assert_eq!(d, Int::from(-1));
        }
    }

    #[test]
    fn case_ids_parse() {
        assert_eq!("main-ii".parse::<CaseId>().unwrap(), CaseId::MainIi);
        assert_eq!("appendix_c2".parse::<CaseId>().unwrap(), CaseId::AppendixC2);
        assert!("main-iii".parse::<CaseId>().is_err());
        assert!(CaseId::MainIi.check_parameter(7).is_err());
        assert!(CaseId::MainI.check_parameter(8).is_ok());
    }
}
