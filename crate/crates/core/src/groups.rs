//! Finite permutation groups and the subgroup machinery used by the lattice code.
//!
//! Products compose right to left: `(g*h)(p) = g(h(p))`. Group elements are
//! stored sorted lexicographically by their image lists, so the identity has
//! index 0 and, for a point stabilizer `H`, the left cosets `gH` come out in
//! the order of the points `g(1)`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the order of groups whose subgroup lattice is enumerated.
pub const DEFAULT_MAX_GROUP_ORDER: usize = 400;

/// Hard cap on the order of any constructed group (keeps the product table bounded).
pub const HARD_MAX_GROUP_ORDER: usize = 5000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    /// From 0-based images; `None` unless a bijection.
    pub fn from_images(images: Vec<u32>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let i = i as usize;
            if i >= images.len() || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Perm(images))
    }

    /// From 1-based cycles, e.g. `&[&[1, 2, 3], &[4, 5]]`.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut img: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        for c in cycles {
            for (k, &p) in c.iter().enumerate() {
                if p == 0 || p > degree {
                    return Err(Error::InvalidGroup(format!("point {p} outside 1..{degree}")));
                }
                if used[p - 1] {
                    return Err(Error::InvalidGroup(format!("point {p} repeated in cycles")));
                }
                used[p - 1] = true;
                let q = c[(k + 1) % c.len()];
                img[p - 1] = (q - 1) as u32;
            }
        }
        Ok(Perm(img))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Image of a 0-based point.
    #[inline]
    pub fn apply(&self, p: usize) -> usize {
        self.0[p] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&p| self.0[p as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i as u32 == p)
    }

    /// Nontrivial cycles as 1-based point lists, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut c = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                c.push(p + 1);
                p = self.apply(p);
            }
            out.push(c);
        }
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let s: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses cycle notation such as `(1 2 3)(4 5)`; commas are accepted as separators.
pub fn parse_cycles(s: &str, degree: usize) -> Result<Perm> {
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let Some(open) = rest.strip_prefix('(') else {
            return Err(Error::Parse(format!("expected '(' in cycle notation: {s}")));
        };
        let Some(close) = open.find(')') else {
            return Err(Error::Parse(format!("unbalanced parenthesis in {s}")));
        };
        let body = &open[..close];
        let pts: std::result::Result<Vec<usize>, _> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect();
        let pts = pts.map_err(|e| Error::Parse(format!("bad point in {s}: {e}")))?;
        if !pts.is_empty() {
            cycles.push(pts);
        }
        rest = open[close + 1..].trim_start();
    }
    Perm::from_cycles(degree, &cycles)
}

/// A word in the generators: `(generator index, exponent)` factors, leftmost first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<(usize, i64)>);

impl Word {
    pub fn gen(k: usize) -> Self {
        Word(vec![(k, 1)])
    }

    pub fn pow(k: usize, e: i64) -> Self {
        Word(vec![(k, e)])
    }

    pub fn times(mut self, other: Word) -> Word {
        self.0.extend(other.0);
        self
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&(k, e)| (k, -e)).collect())
    }
}

/// How a group was specified; enough to rebuild it bit for bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    /// `D_n` on `n` points, `x = (1 2 … n)`, `y = (1 n)(2 n-1)…`.
    Dihedral { n: usize },
    /// `D_n` (n odd) on `2n` points by its regular representation.
    DihedralRegular { n: usize },
    /// `C_n` acting regularly on `n` points, generator `x = (1 2 … n)`.
    Cyclic { n: usize },
    /// Named generators in cycle notation on `degree` points.
    Explicit {
        degree: usize,
        generators: Vec<(String, String)>,
    },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match *self {
            GroupSpec::Dihedral { n } => dihedral_on_cosets(n),
            GroupSpec::DihedralRegular { n } => dihedral_regular(n),
            GroupSpec::Cyclic { n } => cyclic(n),
            GroupSpec::Explicit {
                degree,
                ref generators,
            } => {
                let mut names = Vec::new();
                let mut perms = Vec::new();
                for (name, cyc) in generators {
                    names.push(name.clone());
                    perms.push(parse_cycles(cyc, degree)?);
                }
                FiniteGroup::from_generators(self.clone(), degree, names, perms, None)
            }
        }
    }

    /// Parses `dihedral:n=6`, `dihedral-regular:n=3`, `cyclic:n=5` or
    /// `perms:x=(1 2 3);y=(1 2)` (degree inferred) / `perms[6]:...`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("group spec needs 'kind:...': {s}")))?;
        let param_n = |body: &str| -> Result<usize> {
            let v = body
                .trim()
                .strip_prefix("n=")
                .ok_or_else(|| Error::Parse(format!("expected n=<int> in {s}")))?;
            v.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad n in {s}: {e}")))
        };
        match head.trim() {
            "dihedral" => Ok(GroupSpec::Dihedral { n: param_n(body)? }),
            "dihedral-regular" | "dihedral_regular" => {
                Ok(GroupSpec::DihedralRegular { n: param_n(body)? })
            }
            "cyclic" => Ok(GroupSpec::Cyclic { n: param_n(body)? }),
            h if h.starts_with("perms") => {
                let explicit_degree = h
                    .strip_prefix("perms")
                    .and_then(|d| d.strip_prefix('['))
                    .and_then(|d| d.strip_suffix(']'))
                    .map(|d| {
                        d.parse::<usize>()
                            .map_err(|e| Error::Parse(format!("bad degree in {s}: {e}")))
                    })
                    .transpose()?;
                let mut generators = Vec::new();
                let mut max_point = 0usize;
                for part in body.split(';').filter(|p| !p.trim().is_empty()) {
                    let (name, cyc) = part
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("expected name=cycles in {part}")))?;
                    let name = name.trim();
                    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                    {
                        return Err(Error::Parse(format!("bad generator name '{name}'")));
                    }
                    for tok in cyc.split(|c: char| !c.is_ascii_digit()) {
                        if let Ok(p) = tok.parse::<usize>() {
                            max_point = max_point.max(p);
                        }
                    }
                    generators.push((name.to_string(), cyc.trim().to_string()));
                }
                if generators.is_empty() {
                    return Err(Error::Parse(format!("no generators in {s}")));
                }
                Ok(GroupSpec::Explicit {
                    degree: explicit_degree.unwrap_or(max_point.max(1)),
                    generators,
                })
            }
            other => Err(Error::Parse(format!("unknown group kind '{other}'"))),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Dihedral { n } => write!(f, "dihedral:n={n}"),
            GroupSpec::DihedralRegular { n } => write!(f, "dihedral-regular:n={n}"),
            GroupSpec::Cyclic { n } => write!(f, "cyclic:n={n}"),
            GroupSpec::Explicit { degree, generators } => {
                let g: Vec<String> = generators.iter().map(|(n, c)| format!("{n}={c}")).collect();
                write!(f, "perms[{degree}]:{}", g.join(";"))
            }
        }
    }
}

/// A subgroup, as sorted element indices of its parent group plus generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subgroup {
    members: Vec<usize>,
    gens: Vec<usize>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&g| other.contains(g))
    }
}

/// Cyclic or dihedral structure of a subgroup, with presentation generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    /// `<a | a^k>`
    Cyclic { a: usize, k: usize },
    /// `<a, b | a^k, b^2, (ab)^2>`, order `2k`, `k >= 2`
    Dihedral { a: usize, b: usize, k: usize },
    Other,
}

/// Left cosets `gH` in canonical order (by smallest member).
#[derive(Clone, Debug)]
pub struct Cosets {
    pub reps: Vec<usize>,
    pub of_element: Vec<usize>,
}

impl Cosets {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct SylowWitness {
    pub prime: usize,
    pub subgroup: Subgroup,
    pub cyclic: bool,
}

pub struct FiniteGroup {
    spec: GroupSpec,
    degree: usize,
    gen_names: Vec<String>,
    gens: Vec<Perm>,
    gen_elems: Vec<usize>,
    elements: Vec<Perm>,
    lookup: HashMap<Perm, usize>,
    table: Vec<u32>,
    inv: Vec<usize>,
    orders: Vec<usize>,
    tree: Vec<Option<(usize, usize)>>,
    relations: Vec<Word>,
    all_subgroups: OnceLock<Vec<Subgroup>>,
    classes: OnceLock<Vec<Subgroup>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.spec, self.order())
    }
}

impl FiniteGroup {
    /// Enumerates the group generated by `perms`. With `relations = None`
    /// the full set of Schreier relators of the Cayley graph is stored.
    pub fn from_generators(
        spec: GroupSpec,
        degree: usize,
        names: Vec<String>,
        perms: Vec<Perm>,
        relations: Option<Vec<Word>>,
    ) -> Result<Self> {
        if names.len() != perms.len() {
            return Err(Error::InvalidGroup("generator names and perms differ in count".into()));
        }
        let mut uniq = HashSet::new();
        for n in &names {
            if !uniq.insert(n) {
                return Err(Error::InvalidGroup(format!("duplicate generator name {n}")));
            }
        }
        if perms.iter().any(|p| p.degree() != degree) {
            return Err(Error::InvalidGroup("generator degree mismatch".into()));
        }
        let id = Perm::identity(degree);
        let mut seen: HashSet<Perm> = HashSet::new();
        seen.insert(id.clone());
        let mut bfs = vec![id.clone()];
        let mut parents: Vec<Option<(usize, usize)>> = vec![None];
        let mut head = 0;
        while head < bfs.len() {
            let g = bfs[head].clone();
            for (k, s) in perms.iter().enumerate() {
                let h = s.compose(&g);
                if seen.insert(h.clone()) {
                    if bfs.len() >= HARD_MAX_GROUP_ORDER {
                        return Err(Error::ResourceBound {
                            what: "group order".into(),
                            bound: HARD_MAX_GROUP_ORDER,
                        });
                    }
                    bfs.push(h);
                    parents.push(Some((k, head)));
                }
            }
            head += 1;
        }
        let mut elements = bfs.clone();
        elements.sort();
        let lookup: HashMap<Perm, usize> =
            elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let bfs_to_sorted: Vec<usize> = bfs.iter().map(|p| lookup[p]).collect();
        let mut tree = vec![None; elements.len()];
        for (b, par) in parents.iter().enumerate() {
            if let Some((k, pb)) = par {
                tree[bfs_to_sorted[b]] = Some((*k, bfs_to_sorted[*pb]));
            }
        }
        let n = elements.len();
        let mut table = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                table[i * n + j] = lookup[&elements[i].compose(&elements[j])] as u32;
            }
        }
        let inv: Vec<usize> = elements.iter().map(|p| lookup[&p.inverse()]).collect();
        let mut orders = vec![1usize; n];
        for (i, o) in orders.iter_mut().enumerate() {
            let mut g = i;
            while g != 0 {
                g = table[i * n + g] as usize;
                *o += 1;
            }
        }
        let gen_elems: Vec<usize> = perms.iter().map(|p| lookup[p]).collect();
        let mut group = FiniteGroup {
            spec,
            degree,
            gen_names: names,
            gens: perms,
            gen_elems,
            elements,
            lookup,
            table,
            inv,
            orders,
            tree,
            relations: Vec::new(),
            all_subgroups: OnceLock::new(),
            classes: OnceLock::new(),
        };
        let relations = match relations {
            Some(r) => r,
            None => group.schreier_relators(),
        };
        for w in &relations {
            if group.eval_word(w) != 0 {
                return Err(Error::InvalidGroup(format!("relation {w:?} does not hold")));
            }
        }
        group.relations = relations;
        Ok(group)
    }

    fn schreier_relators(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for g in 0..self.order() {
            for k in 0..self.gens.len() {
                let h = self.mul(self.gen_elems[k], g);
                if self.tree[h] == Some((k, g)) {
                    continue;
                }
                let w = self
                    .word_of(h)
                    .inverse()
                    .times(Word::gen(k))
                    .times(self.word_of(g));
                out.push(w);
            }
        }
        out
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn gen_names(&self) -> &[String] {
        &self.gen_names
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    /// Element index of generator `k`.
    pub fn gen_element(&self, k: usize) -> usize {
        self.gen_elems[k]
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.gen_names.iter().position(|n| n == name)
    }

    pub fn relations(&self) -> &[Word] {
        &self.relations
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        self.orders[a]
    }

    pub fn pow(&self, a: usize, e: i64) -> usize {
        let base = if e < 0 { self.inv(a) } else { a };
        let mut acc = 0;
        for _ in 0..e.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    /// `(k, parent)` such that element `g = gen_k * parent`; `None` for the identity.
    pub fn tree_step(&self, g: usize) -> Option<(usize, usize)> {
        self.tree[g]
    }

    /// Word in the generators (positive exponents) evaluating to `g`.
    pub fn word_of(&self, mut g: usize) -> Word {
        let mut w = Vec::new();
        while let Some((k, p)) = self.tree[g] {
            w.push((k, 1));
            g = p;
        }
        Word(w)
    }

    pub fn eval_word(&self, w: &Word) -> usize {
        w.0.iter().fold(0, |acc, &(k, e)| self.mul(acc, self.pow(self.gen_elems[k], e)))
    }

    /// Human-readable name of an element as a word, e.g. `x^2*y`.
    pub fn element_name(&self, g: usize) -> String {
        if g == 0 {
            return "1".into();
        }
        let w = self.word_of(g);
        let mut parts: Vec<(usize, i64)> = Vec::new();
        for (k, e) in w.0 {
            match parts.last_mut() {
                Some((pk, pe)) if *pk == k => *pe += e,
                _ => parts.push((k, e)),
            }
        }
        parts
            .iter()
            .map(|&(k, e)| {
                let name = &self.gen_names[k];
                if e == 1 {
                    name.clone()
                } else if name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    format!("{name}^{e}")
                } else {
                    format!("({name})^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Parses a product of generator powers such as `x^2*y` or `x^-1*y*x`.
    pub fn parse_word(&self, s: &str) -> Result<usize> {
        let s = s.trim();
        if s == "1" || s == "e" || s.is_empty() {
            return Ok(0);
        }
        let mut acc = 0;
        for factor in s.split('*') {
            let factor = factor.trim();
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (
                    n.trim(),
                    e.trim()
                        .parse::<i64>()
                        .map_err(|err| Error::Parse(format!("bad exponent in {factor}: {err}")))?,
                ),
                None => (factor, 1),
            };
            let k = self
                .gen_index(name)
                .ok_or_else(|| Error::Parse(format!("unknown generator '{name}'")))?;
            acc = self.mul(acc, self.pow(self.gen_elems[k], exp));
        }
        Ok(acc)
    }

    /// Parses `<w1,w2,…>`, `1`, `<>` or `G`.
    pub fn parse_subgroup(&self, s: &str) -> Result<Subgroup> {
        let s = s.trim();
        if s == "1" || s == "<>" || s == "trivial" {
            return Ok(self.trivial_subgroup());
        }
        if s == "G" {
            return Ok(self.whole());
        }
        let inner = s
            .strip_prefix('<')
            .and_then(|r| r.strip_suffix('>'))
            .ok_or_else(|| Error::Parse(format!("subgroup spec must look like <w1,w2>: {s}")))?;
        let gens: Result<Vec<usize>> = inner
            .split(',')
            .filter(|w| !w.trim().is_empty())
            .map(|w| self.parse_word(w))
            .collect();
        Ok(self.generated(&gens?))
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup {
            members: vec![0],
            gens: vec![],
        }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            members: (0..self.order()).collect(),
            gens: self.gen_elems.clone(),
        }
    }

    /// Subgroup generated by the given elements (identity and repeated generators dropped).
    pub fn generated(&self, gens: &[usize]) -> Subgroup {
        let mut kept: Vec<usize> = Vec::with_capacity(gens.len());
        for &g in gens {
            if g != 0 && !kept.contains(&g) {
                kept.push(g);
            }
        }
        let gens = kept;
        let members = self.closure(&gens);
        Subgroup { members, gens }
    }

    fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order()];
        inside[0] = true;
        let mut queue = vec![0usize];
        let mut head = 0;
        while head < queue.len() {
            let g = queue[head];
            head += 1;
            for &s in gens {
                let h = self.mul(s, g);
                if !inside[h] {
                    inside[h] = true;
                    queue.push(h);
                }
            }
        }
        queue.sort_unstable();
        queue
    }

    /// Validates that `members` (with `gens`) is a subgroup of this group.
    pub fn check_subgroup(&self, h: &Subgroup) -> Result<()> {
        if h.members.iter().any(|&g| g >= self.order()) {
            return Err(Error::NotSubgroup("element index out of range".into()));
        }
        if !h.members.windows(2).all(|w| w[0] < w[1]) || h.members.first() != Some(&0) {
            return Err(Error::NotSubgroup("members must be sorted and contain 1".into()));
        }
        for &a in &h.members {
            for &b in &h.members {
                if !h.contains(self.mul(a, b)) {
                    return Err(Error::NotSubgroup("not closed under products".into()));
                }
            }
        }
        if self.closure(&h.gens) != h.members {
            return Err(Error::NotSubgroup("generators do not generate the members".into()));
        }
        Ok(())
    }

    /// Canonical generators: greedily take members in index order that enlarge the span.
    fn canonical_gens(&self, members: &[usize]) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![0usize];
        for &g in members {
            if span.binary_search(&g).is_ok() {
                continue;
            }
            gens.push(g);
            span = self.closure(&gens);
            if span.len() == members.len() {
                break;
            }
        }
        gens
    }

    fn with_canonical_gens(&self, members: Vec<usize>) -> Subgroup {
        let gens = self.canonical_gens(&members);
        Subgroup { members, gens }
    }

    /// `H^σ = σ^{-1} H σ`.
    pub fn conjugate(&self, h: &Subgroup, sigma: usize) -> Subgroup {
        let si = self.inv(sigma);
        let conj = |g: usize| self.mul(self.mul(si, g), sigma);
        let mut members: Vec<usize> = h.members.iter().map(|&g| conj(g)).collect();
        members.sort_unstable();
        Subgroup {
            members,
            gens: h.gens.iter().map(|&g| conj(g)).collect(),
        }
    }

    /// Smallest-index `σ` with `σ^{-1} H1 σ = H2`.
    pub fn is_conjugate(&self, h1: &Subgroup, h2: &Subgroup) -> Option<usize> {
        if h1.order() != h2.order() {
            return None;
        }
        (0..self.order()).find(|&s| self.conjugate(h1, s).members == h2.members)
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        self.gen_elems
            .iter()
            .all(|&s| self.conjugate(h, s).members == h.members)
    }

    pub fn center(&self) -> Subgroup {
        let members: Vec<usize> = (0..self.order())
            .filter(|&z| {
                self.gen_elems
                    .iter()
                    .all(|&s| self.mul(z, s) == self.mul(s, z))
            })
            .collect();
        self.with_canonical_gens(members)
    }

    /// Intersection of all conjugates of `H`.
    pub fn core(&self, h: &Subgroup) -> Subgroup {
        let mut members = h.members.clone();
        for s in 0..self.order() {
            let c = self.conjugate(h, s);
            members.retain(|g| c.contains(*g));
        }
        self.with_canonical_gens(members)
    }

    pub fn core_is_trivial(&self, h: &Subgroup) -> bool {
        self.core(h).is_trivial()
    }

    pub fn intersection(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let members: Vec<usize> = a.members.iter().copied().filter(|&g| b.contains(g)).collect();
        self.with_canonical_gens(members)
    }

    /// Left cosets of `H`, ordered by their smallest element.
    pub fn cosets(&self, h: &Subgroup) -> Cosets {
        let mut of_element = vec![usize::MAX; self.order()];
        let mut reps = Vec::new();
        for g in 0..self.order() {
            if of_element[g] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(g);
            for &x in &h.members {
                of_element[self.mul(g, x)] = c;
            }
        }
        Cosets { reps, of_element }
    }

    pub fn index(&self, h: &Subgroup) -> usize {
        self.order() / h.order()
    }

    /// Orbits of `H` on the points (0-based), each sorted, ordered by smallest point.
    pub fn orbits(&self, h: &Subgroup) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for p in 0..self.degree {
            if seen[p] {
                continue;
            }
            let mut orbit: Vec<usize> = h.members.iter().map(|&g| self.elements[g].apply(p)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &q in &orbit {
                seen[q] = true;
            }
            out.push(orbit);
        }
        out
    }

    pub fn is_transitive(&self, h: &Subgroup) -> bool {
        self.orbits(h).len() == 1
    }

    /// Stabilizer of a 0-based point.
    pub fn point_stabilizer(&self, p: usize) -> Subgroup {
        let members = (0..self.order())
            .filter(|&g| self.elements[g].apply(p) == p)
            .collect();
        self.with_canonical_gens(members)
    }

    pub fn shape(&self, h: &Subgroup) -> Shape {
        let n = h.order();
        if let Some(&a) = h.members.iter().find(|&&g| self.element_order(g) == n) {
            return Shape::Cyclic { a, k: n };
        }
        if n % 2 == 1 || n < 4 {
            return Shape::Other;
        }
        let k = n / 2;
        for &a in h.members.iter().filter(|&&g| self.element_order(g) == k) {
            let cyc: Vec<usize> = (0..k as i64).map(|e| self.pow(a, e)).collect();
            for &b in &h.members {
                if cyc.contains(&b) || self.element_order(b) != 2 {
                    continue;
                }
                let ab = self.mul(a, b);
                if self.mul(ab, ab) == 0 {
                    return Shape::Dihedral { a, b, k };
                }
            }
        }
        Shape::Other
    }

    /// All subgroups, sorted by (order, members). Errors above `max_order`.
    pub fn all_subgroups(&self, max_order: usize) -> Result<&[Subgroup]> {
        if self.order() > max_order {
            return Err(Error::ResourceBound {
                what: format!("subgroup enumeration for group of order {}", self.order()),
                bound: max_order,
            });
        }
        Ok(self.all_subgroups.get_or_init(|| self.enumerate_subgroups()))
    }

    fn enumerate_subgroups(&self) -> Vec<Subgroup> {
        let n = self.order();
        let mut cyclic_gens: Vec<usize> = Vec::new();
        let mut seen_cyclic = HashSet::new();
        for g in 1..n {
            let m = self.closure(&[g]);
            if seen_cyclic.insert(m) {
                cyclic_gens.push(g);
            }
        }
        let mut found: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        found.insert(vec![0], vec![]);
        let mut queue: VecDeque<Vec<usize>> = VecDeque::from([vec![0]]);
        while let Some(members) = queue.pop_front() {
            let gens = found[&members].clone();
            for &c in &cyclic_gens {
                if members.binary_search(&c).is_ok() {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(c);
                let m2 = self.closure(&g2);
                if !found.contains_key(&m2) {
                    found.insert(m2.clone(), g2);
                    queue.push_back(m2);
                }
            }
        }
        let mut subs: Vec<Subgroup> = found
            .into_keys()
            .map(|members| self.with_canonical_gens(members))
            .collect();
        subs.sort_by(|a, b| (a.order(), &a.members).cmp(&(b.order(), &b.members)));
        subs
    }

    /// One representative per conjugacy class of subgroups (the conjugate with
    /// the lexicographically least member list), sorted by (order, members).
    pub fn subgroup_classes(&self, max_order: usize) -> Result<&[Subgroup]> {
        let all = self.all_subgroups(max_order)?;
        Ok(self.classes.get_or_init(|| {
            let mut done: HashSet<&[usize]> = HashSet::new();
            let mut reps = Vec::new();
            for h in all {
                if done.contains(h.members()) {
                    continue;
                }
                let mut conj: Vec<Vec<usize>> =
                    (0..self.order()).map(|s| self.conjugate(h, s).members).collect();
                conj.sort();
                conj.dedup();
                for c in &conj {
                    let s = all
                        .binary_search_by(|x| (x.order(), x.members()).cmp(&(c.len(), c.as_slice())))
                        .expect("conjugate is a subgroup");
                    done.insert(all[s].members());
                }
                reps.push(self.with_canonical_gens(conj[0].clone()));
            }
            reps.sort_by(|a, b| (a.order(), &a.members).cmp(&(b.order(), &b.members)));
            reps
        }))
    }

    /// Number of conjugates of `H` (the size of its class).
    pub fn class_size(&self, h: &Subgroup) -> usize {
        let mut conj: Vec<Vec<usize>> = (0..self.order()).map(|s| self.conjugate(h, s).members).collect();
        conj.sort();
        conj.dedup();
        conj.len()
    }

    /// Index into `subgroup_classes` of the class containing `H`.
    pub fn class_of(&self, h: &Subgroup, max_order: usize) -> Result<usize> {
        let classes = self.subgroup_classes(max_order)?;
        classes
            .iter()
            .position(|c| self.is_conjugate(c, h).is_some())
            .ok_or_else(|| Error::NotSubgroup("subgroup not found among classes".into()))
    }

    /// For each prime `p | |G|`, a Sylow `p`-subgroup and whether it is cyclic.
    pub fn sylow_subgroups(&self, max_order: usize) -> Result<Vec<SylowWitness>> {
        let all = self.all_subgroups(max_order)?;
        let mut out = Vec::new();
        for (p, e) in factorize(self.order()) {
            let pk = p.pow(e as u32);
            let s = all
                .iter()
                .find(|h| h.order() == pk)
                .expect("Sylow subgroups exist")
                .clone();
            let cyclic = s.members.iter().any(|&g| self.element_order(g) == pk);
            out.push(SylowWitness {
                prime: p,
                subgroup: s,
                cyclic,
            });
        }
        Ok(out)
    }

    pub fn sylow_all_cyclic(&self, max_order: usize) -> Result<(bool, Vec<SylowWitness>)> {
        let w = self.sylow_subgroups(max_order)?;
        Ok((w.iter().all(|s| s.cyclic), w))
    }

    /// Treats a subgroup as a permutation group in its own right. Generator
    /// names are the element names in this group.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> Result<FiniteGroup> {
        let names: Vec<String> = h.gens.iter().map(|&g| self.element_name(g)).collect();
        let perms: Vec<Perm> = h.gens.iter().map(|&g| self.elements[g].clone()).collect();
        let spec = GroupSpec::Explicit {
            degree: self.degree,
            generators: names.iter().cloned().zip(perms.iter().map(|p| p.to_string())).collect(),
        };
        FiniteGroup::from_generators(spec, self.degree, names, perms, None)
    }

    /// Detects `D_n` (n >= 3): returns `(n, x, y)` with `x` of order `n`, `y` an
    /// involution outside `<x>` and `y x y = x^{-1}`. The choice is canonical:
    /// named generators `x`, `y` are used when they already satisfy this.
    pub fn dihedral_structure(&self) -> Option<(usize, usize, usize)> {
        let order = self.order();
        if order < 6 || order % 2 == 1 {
            return None;
        }
        let n = order / 2;
        if let (Some(xi), Some(yi)) = (self.gen_index("x"), self.gen_index("y")) {
            let (x, y) = (self.gen_elems[xi], self.gen_elems[yi]);
            if self.is_dihedral_pair(n, x, y) {
                return Some((n, x, y));
            }
        }
        for x in 0..order {
            if self.element_order(x) != n {
                continue;
            }
            for y in 0..order {
                if self.is_dihedral_pair(n, x, y) {
                    return Some((n, x, y));
                }
            }
            return None;
        }
        None
    }

    fn is_dihedral_pair(&self, n: usize, x: usize, y: usize) -> bool {
        if self.element_order(x) != n || self.element_order(y) != 2 {
            return false;
        }
        let cyc: Vec<usize> = (0..n as i64).map(|e| self.pow(x, e)).collect();
        if cyc.contains(&y) {
            return false;
        }
        self.mul(self.mul(y, x), y) == self.inv(x)
    }

    /// Detects a cyclic group: returns a generator of smallest index.
    pub fn cyclic_generator(&self) -> Option<usize> {
        (0..self.order()).find(|&g| self.element_order(g) == self.order())
    }
}

/// Prime factorization `[(p, e)]`, primes ascending.
pub fn factorize(mut n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn dihedral_from(spec: GroupSpec, degree: usize, n: usize, x: Perm, y: Perm) -> Result<FiniteGroup> {
    // x^n, y^2, y^-1 x y x
    let rel = vec![
        Word::pow(0, n as i64),
        Word::pow(1, 2),
        Word(vec![(1, -1), (0, 1), (1, 1), (0, 1)]),
    ];
    let g = FiniteGroup::from_generators(spec, degree, vec!["x".into(), "y".into()], vec![x, y], Some(rel))?;
    if g.order() != 2 * n {
        return Err(Error::Internal(format!("dihedral group has order {}", g.order())));
    }
    Ok(g)
}

/// `D_n` on `n` points: `x = (1 2 … n)`, `y = (1 n)(2 n-1)…`.
pub fn dihedral_on_cosets(n: usize) -> Result<FiniteGroup> {
    if n < 3 {
        return Err(Error::Parameter(format!("dihedral group needs n >= 3, got {n}")));
    }
    let x = Perm::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect()).unwrap();
    let y = Perm::from_images((0..n as u32).map(|i| n as u32 - 1 - i).collect()).unwrap();
    dihedral_from(GroupSpec::Dihedral { n }, n, n, x, y)
}

/// `D_n` (n odd) on `2n` points: `x = (1 3 … 2n-1)(2 4 … 2n)`, `y = (1 2n)(2 2n-1)…(n n+1)`.
pub fn dihedral_regular(n: usize) -> Result<FiniteGroup> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Parameter(format!("regular dihedral case needs odd n >= 3, got {n}")));
    }
    let deg = 2 * n;
    let x = Perm::from_images((0..deg as u32).map(|i| (i + 2) % deg as u32).collect()).unwrap();
    let y = Perm::from_images((0..deg as u32).map(|i| deg as u32 - 1 - i).collect()).unwrap();
    dihedral_from(GroupSpec::DihedralRegular { n }, deg, n, x, y)
}

/// `C_n` acting regularly on `n` points.
pub fn cyclic(n: usize) -> Result<FiniteGroup> {
    if n < 1 {
        return Err(Error::Parameter("cyclic group needs n >= 1".into()));
    }
    let x = Perm::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect()).unwrap();
    FiniteGroup::from_generators(
        GroupSpec::Cyclic { n },
        n,
        vec!["x".into()],
        vec![x],
        Some(vec![Word::pow(0, n as i64)]),
    )
}

/// The automorphism `x ↦ x, y ↦ xy` of a dihedral group with generators `x`, `y`,
/// as a table on element indices.
pub fn dihedral_automorphism(g: &FiniteGroup) -> Result<Vec<usize>> {
    let (n, x, y) = g
        .dihedral_structure()
        .ok_or_else(|| Error::InvalidGroup("not a dihedral group".into()))?;
    let xy = g.mul(x, y);
    let mut table = vec![usize::MAX; g.order()];
    for i in 0..n as i64 {
        let xi = g.pow(x, i);
        table[xi] = xi;
        table[g.mul(xi, y)] = g.mul(xi, xy);
    }
    if table.contains(&usize::MAX) {
        return Err(Error::Internal("dihedral normal form incomplete".into()));
    }
    Ok(table)
}

pub fn apply_automorphism(g: &FiniteGroup, table: &[usize], h: &Subgroup) -> Subgroup {
    let gens: Vec<usize> = h.gens.iter().map(|&e| table[e]).collect();
    g.generated(&gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(deg: usize, s: &str) -> Perm {
        parse_cycles(s, deg).unwrap()
    }

    #[test]
    fn dihedral_six_matches_printed_generators() {
        let g = dihedral_on_cosets(6).unwrap();
        assert_eq!(g.order(), 12);
        assert_eq!(g.generators()[0], perm(6, "(1 2 3 4 5 6)"));
        assert_eq!(g.generators()[1], perm(6, "(1 6)(2 5)(3 4)"));
        let xy = g.parse_word("x*y").unwrap();
        assert_eq!(*g.element(xy), perm(6, "(2 6)(3 5)"));
        for w in g.relations() {
            assert_eq!(g.eval_word(w), 0);
        }
    }

    #[test]
    fn dihedral_three_xy_fixes_one() {
        let g = dihedral_on_cosets(3).unwrap();
        assert_eq!(g.order(), 6);
        let xy = g.parse_word("x*y").unwrap();
        assert_eq!(*g.element(xy), perm(3, "(2 3)"));
        assert!(dihedral_on_cosets(2).is_err());
    }

    #[test]
    fn regular_dihedral() {
        let g = dihedral_regular(3).unwrap();
        assert_eq!(g.degree(), 6);
        assert_eq!(g.generators()[0], perm(6, "(1 3 5)(2 4 6)"));
        assert_eq!(g.generators()[1], perm(6, "(1 6)(2 5)(3 4)"));
        assert!(g.is_transitive(&g.whole()));
        let g5 = dihedral_regular(5).unwrap();
        let x = g5.generated(&[g5.gen_element(0)]);
        assert_eq!(g5.orbits(&x)[0], vec![0, 2, 4, 6, 8]);
        assert!(dihedral_regular(4).is_err());
        // regular: only the identity fixes a point
        assert!(g5.point_stabilizer(0).is_trivial());
    }

    #[test]
    fn identity_first_and_coset_order_follows_points() {
        let g = dihedral_on_cosets(6).unwrap();
        assert!(g.element(0).is_identity());
        let h = g.parse_subgroup("<x*y>").unwrap();
        let c = g.cosets(&h);
        assert_eq!(c.len(), 6);
        for (i, &r) in c.reps.iter().enumerate() {
            assert_eq!(g.element(r).apply(0), i);
        }
    }

    #[test]
    fn subgroup_class_counts() {
        let c2 = cyclic(2).unwrap();
        assert_eq!(c2.subgroup_classes(400).unwrap().len(), 2);
        let d3 = dihedral_on_cosets(3).unwrap();
        let orders: Vec<usize> = d3.subgroup_classes(400).unwrap().iter().map(|h| h.order()).collect();
        assert_eq!(orders, vec![1, 2, 3, 6]);
        let d4 = dihedral_on_cosets(4).unwrap();
        assert_eq!(d4.subgroup_classes(400).unwrap().len(), 8);
        let d6 = dihedral_on_cosets(6).unwrap();
        assert_eq!(d6.subgroup_classes(400).unwrap().len(), 10);
        assert!(d6.subgroup_classes(10).is_err());
    }

    #[test]
    fn sylow_cyclicity() {
        let (ok, w) = dihedral_on_cosets(3).unwrap().sylow_all_cyclic(400).unwrap();
        assert!(ok);
        assert_eq!(w.iter().map(|s| s.prime).collect::<Vec<_>>(), vec![2, 3]);
        let (ok, w) = dihedral_on_cosets(4).unwrap().sylow_all_cyclic(400).unwrap();
        assert!(!ok);
        assert_eq!(w[0].subgroup.order(), 8);
        assert!(cyclic(6).unwrap().sylow_all_cyclic(400).unwrap().0);
    }

    #[test]
    fn cores_centers_conjugacy() {
        let g = dihedral_on_cosets(6).unwrap();
        let xy = g.parse_subgroup("<x*y>").unwrap();
        assert!(g.core_is_trivial(&xy));
        let z = g.center();
        assert_eq!(z.order(), 2);
        assert_eq!(z.members(), g.parse_subgroup("<x^3>").unwrap().members());
        assert!(!g.core_is_trivial(&z));
        assert!(g.core_is_trivial(&g.trivial_subgroup()));
        assert!(dihedral_on_cosets(3).unwrap().center().is_trivial());

        let y = g.parse_subgroup("<y>").unwrap();
        let x2y = g.parse_subgroup("<x^2*y>").unwrap();
        let s = g.is_conjugate(&y, &x2y).expect("conjugate");
        assert_eq!(g.conjugate(&y, s).members(), x2y.members());
        assert!(g.is_conjugate(&y, &xy).is_none());
        // x conjugates <y> to <x^2 y> (up to inversion of the conjugator)
        let x = g.gen_element(0);
        let c1 = g.conjugate(&y, x).members().to_vec();
        let c2 = g.conjugate(&y, g.inv(x)).members().to_vec();
        assert!(c1 == x2y.members() || c2 == x2y.members());
    }

    #[test]
    fn shapes_and_automorphism() {
        let g = dihedral_on_cosets(8).unwrap();
        let gp = g.parse_subgroup("<x^2,y>").unwrap();
        assert!(matches!(g.shape(&gp), Shape::Dihedral { k: 4, .. }));
        let c = g.parse_subgroup("<x>").unwrap();
        assert!(matches!(g.shape(&c), Shape::Cyclic { k: 8, .. }));
        let v4 = dihedral_on_cosets(4).unwrap();
        let v = v4.parse_subgroup("<x^2,y>").unwrap();
        assert!(matches!(v4.shape(&v), Shape::Dihedral { k: 2, .. }));

        let aut = dihedral_automorphism(&g).unwrap();
        let y = g.parse_subgroup("<y>").unwrap();
        let img = apply_automorphism(&g, &aut, &y);
        assert_eq!(img.members(), g.parse_subgroup("<x*y>").unwrap().members());
    }

    #[test]
    fn explicit_spec_round_trip() {
        let spec = GroupSpec::parse("perms:a=(1 2 3);b=(1 2)").unwrap();
        let g = spec.build().unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.dihedral_structure().map(|t| t.0), Some(3));
        let again = GroupSpec::parse(&spec.to_string()).unwrap();
        assert_eq!(again, spec);
        assert!(GroupSpec::parse("bogus:n=3").is_err());
        assert_eq!(GroupSpec::parse("dihedral:n=6").unwrap(), GroupSpec::Dihedral { n: 6 });
    }

    #[test]
    fn bad_subgroup_rejected() {
        let g = dihedral_on_cosets(4).unwrap();
        let x = g.gen_element(0);
        let mut members = vec![0, x];
        members.sort();
        let fake = Subgroup { members, gens: vec![x] };
        assert!(g.check_subgroup(&fake).is_err());
        assert!(g.check_subgroup(&g.parse_subgroup("<x^2,y>").unwrap()).is_ok());
        assert!(g.parse_subgroup("<z>").is_err());
    }
}
