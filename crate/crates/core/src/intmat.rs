//! Exact integer matrix algebra.
//!
//! Everything here is row-oriented: matrices are stored row-major and the
//! elimination routines work on rows, transposing when a column-style
//! operation is wanted. Pivots are always the entry of smallest absolute
//! value, ties broken by the lowest row index, so outputs are deterministic.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::abelian::AbelianInvariants;
use crate::error::{Error, Result};
use crate::int::Int;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Int::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::ONE;
        }
        m
    }

    pub fn scalar(n: usize, c: impl Into<Int>) -> Self {
        let c = c.into();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Int) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from small-integer rows; all rows must have equal length.
    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&v| Int::from(v)));
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_rows(rows: Vec<Vec<Int>>, cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Self {
            rows: n,
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Int>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn diagonal(d: &[Int], rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Int>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn into_rows(self) -> Vec<Vec<Int>> {
        if self.cols == 0 {
            return vec![Vec::new(); self.rows];
        }
        self.data.chunks(self.cols).map(|c| c.to_vec()).collect()
    }

    pub fn entries(&self) -> &[Int] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Int::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = &self[(i, j)];
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn max_abs(&self) -> Int {
        self.data
            .iter()
            .map(Int::abs)
            .max()
            .unwrap_or(Int::ZERO)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Matrix product; zero entries are skipped, so sparse operands are cheap.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        let nz: Vec<Vec<usize>> = (0..other.rows)
            .map(|k| {
                other
                    .row(k)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for &j in &nz[k] {
                    orow[j].add_mul_assign(a, &brow[j]);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Int::ZERO;
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_mul_assign(a, b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                a.add_assign_ref(b);
            }
        }
    }

    pub fn scale(&self, c: &Int) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&Int::from(-1))
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn hstack_all(parts: &[IntMatrix], rows: usize) -> Self {
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            for i in 0..rows {
                for j in 0..p.cols {
                    out[(i, off + j)] = p[(i, j)].clone();
                }
            }
            off += p.cols;
        }
        out
    }

    pub fn vstack_all(parts: &[IntMatrix], cols: usize) -> Self {
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack column mismatch");
            data.extend(p.data.iter().cloned());
            rows += p.rows;
        }
        Self { rows, cols, data }
    }

    pub fn block_diag(blocks: &[&IntMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(ro + i, co + j)] = b[(i, j)].clone();
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)].clone())
    }

    /// Permutation matrix sending basis vector `i` to basis vector `perm[i]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n);
        for (i, &p) in perm.iter().enumerate() {
            m[(p, i)] = Int::ONE;
        }
        m
    }

    /// Returns `Some(perm)` when this is a permutation matrix with `self * e_i = e_perm[i]`.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        if !self.is_square() {
            return None;
        }
        let mut perm = vec![usize::MAX; self.cols];
        let mut seen = vec![false; self.rows];
        for j in 0..self.cols {
            for i in 0..self.rows {
                let v = &self[(i, j)];
                if v.is_zero() {
                    continue;
                }
                if !v.is_one() || perm[j] != usize::MAX || seen[i] {
                    return None;
                }
                perm[j] = i;
                seen[i] = true;
            }
            if perm[j] == usize::MAX {
                return None;
            }
        }
        Some(perm)
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", r.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Int>>,
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.clone().into_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        if r.entries.len() != r.rows || r.entries.iter().any(|row| row.len() != r.cols) {
            return Err(serde::de::Error::custom("matrix entries do not match rows/cols"));
        }
        Ok(IntMatrix::from_rows(r.entries, r.cols))
    }
}

// ---------------------------------------------------------------------------
// Row elimination

fn two_rows(rows: &mut [Vec<Int>], target: usize, src: usize) -> (&mut Vec<Int>, &Vec<Int>) {
    debug_assert_ne!(target, src);
    if target < src {
        let (a, b) = rows.split_at_mut(src);
        (&mut a[target], &b[0])
    } else {
        let (a, b) = rows.split_at_mut(target);
        (&mut b[0], &a[src])
    }
}

fn nonzero_positions(row: &[Int], from: usize) -> Vec<usize> {
    (from..row.len()).filter(|&j| !row[j].is_zero()).collect()
}

fn row_sub_mul(rows: &mut [Vec<Int>], target: usize, src: usize, q: &Int, nz: &[usize]) {
    let (t, s) = two_rows(rows, target, src);
    for &j in nz {
        t[j].sub_mul_assign(q, &s[j]);
    }
}

fn negate_row(row: &mut [Int]) {
    for v in row.iter_mut() {
        if !v.is_zero() {
            v.negate();
        }
    }
}

/// Row echelon form in place. Returns the pivot columns. When `reduce_above`
/// is set the pivots are made positive and the entries above them reduced
/// into `[0, pivot)`, giving the Hermite normal form.
fn hermite_in_place(
    rows: &mut [Vec<Int>],
    ncols: usize,
    mut tr: Option<&mut [Vec<Int>]>,
    reduce_above: bool,
) -> Vec<usize> {
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        let mut found = false;
        loop {
            let mut best: Option<usize> = None;
            for i in r..m {
                if rows[i][c].is_zero() {
                    continue;
                }
                match best {
                    Some(b) if rows[i][c].cmp_abs(&rows[b][c]).is_ge() => {}
                    _ => best = Some(i),
                }
            }
            let Some(p) = best else { break };
            found = true;
            rows.swap(r, p);
            if let Some(t) = tr.as_deref_mut() {
                t.swap(r, p);
            }
            let nz = nonzero_positions(&rows[r], c);
            let nz_t = tr.as_deref().map(|t| nonzero_positions(&t[r], 0));
            let mut clean = true;
            for i in r + 1..m {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_trunc(&rows[r][c]);
                row_sub_mul(rows, i, r, &q, &nz);
                if let (Some(t), Some(nzt)) = (tr.as_deref_mut(), nz_t.as_ref()) {
                    row_sub_mul(t, i, r, &q, nzt);
                }
                if !rows[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !found {
            continue;
        }
        if reduce_above {
            if rows[r][c].is_negative() {
                negate_row(&mut rows[r]);
                if let Some(t) = tr.as_deref_mut() {
                    negate_row(&mut t[r]);
                }
            }
            let nz = nonzero_positions(&rows[r], c);
            let nz_t = tr.as_deref().map(|t| nonzero_positions(&t[r], 0));
            for i in 0..r {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                if q.is_zero() {
                    continue;
                }
                row_sub_mul(rows, i, r, &q, &nz);
                if let (Some(t), Some(nzt)) = (tr.as_deref_mut(), nz_t.as_ref()) {
                    row_sub_mul(t, i, r, &q, nzt);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Result of [`row_hermite`]: `transform * A = h` with `transform` unimodular.
#[derive(Clone, Debug)]
pub struct RowHermite {
    pub h: IntMatrix,
    pub transform: Option<IntMatrix>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn row_hermite(a: &IntMatrix, reduce_above: bool, with_transform: bool) -> RowHermite {
    let ncols = a.cols;
    let mut rows = a.clone().into_rows();
    let mut tr = with_transform.then(|| IntMatrix::identity(a.rows).into_rows());
    let pivots = hermite_in_place(&mut rows, ncols, tr.as_deref_mut(), reduce_above);
    RowHermite {
        h: IntMatrix::from_rows(rows, ncols),
        transform: tr.map(|t| IntMatrix::from_rows(t, a.rows)),
        rank: pivots.len(),
        pivots,
    }
}

pub fn rank(a: &IntMatrix) -> usize {
    let mut rows = a.clone().into_rows();
    hermite_in_place(&mut rows, a.cols, None, false).len()
}

// ---------------------------------------------------------------------------
// Smith normal form

/// `left * A * right = diag(d)` (padded with zeros), `d[i] | d[i+1]`, zeros last.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: Vec<Int>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.d.iter().filter(|v| !v.is_zero()).count()
    }
}

fn min_abs_in(a: &[Vec<Int>], t: usize, ncols: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().take(ncols).skip(t) {
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if v.cmp_abs(&a[bi][bj]).is_ge() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

fn swap_cols(a: &mut [Vec<Int>], x: usize, y: usize) {
    if x == y {
        return;
    }
    for row in a.iter_mut() {
        row.swap(x, y);
    }
}

/// Smith normal form with both transforms.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut rows = a.clone().into_rows();
    let mut left = IntMatrix::identity(m).into_rows();
    // Column operations on A are row operations on right^T.
    let mut right_t = IntMatrix::identity(n).into_rows();
    let all_cols: Vec<usize> = (0..n).collect();
    for t in 0..m.min(n) {
        let Some((pi, pj)) = min_abs_in(&rows, t, n) else {
            break;
        };
        rows.swap(t, pi);
        left.swap(t, pi);
        swap_cols(&mut rows, t, pj);
        right_t.swap(t, pj);
        loop {
            let mut clean = true;
            let nz = nonzero_positions(&rows[t], 0);
            let nzl = nonzero_positions(&left[t], 0);
            for i in t + 1..m {
                if rows[i][t].is_zero() {
                    continue;
                }
                let q = rows[i][t].div_trunc(&rows[t][t]);
                row_sub_mul(&mut rows, i, t, &q, &nz);
                row_sub_mul(&mut left, i, t, &q, &nzl);
                clean &= rows[i][t].is_zero();
            }
            let nzr = nonzero_positions(&right_t[t], 0);
            for j in t + 1..n {
                if rows[t][j].is_zero() {
                    continue;
                }
                let q = rows[t][j].div_trunc(&rows[t][t]);
                for row in rows.iter_mut() {
                    if !row[t].is_zero() {
                        let (pt, pjv) = (row[t].clone(), &mut row[j]);
                        pjv.sub_mul_assign(&q, &pt);
                    }
                }
                row_sub_mul(&mut right_t, j, t, &q, &nzr);
                clean &= rows[t][j].is_zero();
            }
            if !clean {
                // Bring the smallest remainder in row/column t to the pivot.
                let mut best = (t, t);
                for i in t + 1..m {
                    if !rows[i][t].is_zero() && rows[i][t].cmp_abs(&rows[best.0][best.1]).is_lt() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !rows[t][j].is_zero() && rows[t][j].cmp_abs(&rows[best.0][best.1]).is_lt() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    rows.swap(t, best.0);
                    left.swap(t, best.0);
                }
                if best.1 != t {
                    swap_cols(&mut rows, t, best.1);
                    right_t.swap(t, best.1);
                }
                continue;
            }
            let pivot = rows[t][t].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !pivot.divides(&rows[i][j])));
            match bad {
                Some(i) => {
                    row_sub_mul(&mut rows, t, i, &Int::from(-1), &all_cols);
                    let nzi: Vec<usize> = (0..m).collect();
                    row_sub_mul(&mut left, t, i, &Int::from(-1), &nzi);
                }
                None => break,
            }
        }
        if rows[t][t].is_negative() {
            negate_row(&mut rows[t]);
            negate_row(&mut left[t]);
        }
    }
    let d = (0..m.min(n)).map(|i| rows[i][i].clone()).collect();
    SmithForm {
        d,
        left: IntMatrix::from_rows(left, m),
        right: IntMatrix::from_rows(right_t, n).transpose(),
    }
}

/// Nonzero invariant factors of `a` (a divisor chain), without transforms.
///
/// Alternates Hermite reduction of the matrix and of its transpose until the
/// echelon form is diagonal, then normalizes the diagonal.
pub fn elementary_divisors(a: &IntMatrix) -> Vec<Int> {
    let mut rows = a.clone().into_rows();
    let mut ncols = a.cols;
    loop {
        let piv = hermite_in_place(&mut rows, ncols, None, false);
        rows.truncate(piv.len());
        let diagonal = rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(j, v)| j == piv[i] || v.is_zero()));
        if diagonal {
            let diag = rows.iter().enumerate().map(|(i, r)| r[piv[i]].abs());
            let inv = AbelianInvariants::from_diagonal(diag);
            let mut out = vec![Int::ONE; piv.len() - inv.divisors.len()];
            out.extend(inv.divisors);
            return out;
        }
        let t = IntMatrix::from_rows(rows, ncols).transpose();
        ncols = t.cols;
        rows = t.into_rows();
    }
}

/// Invariants of `Z^rows / A·Z^cols`.
pub fn cokernel_invariants(a: &IntMatrix) -> AbelianInvariants {
    let d = elementary_divisors(a);
    let mut inv = AbelianInvariants::from_diagonal(d.iter().cloned());
    inv.free_rank = a.rows - d.len();
    inv
}

/// Saturated basis (as columns) of `{v : A v = 0}`, canonicalized by column Hermite form.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let n = a.cols;
    let mut rows = a.transpose().into_rows();
    let mut tr = IntMatrix::identity(n).into_rows();
    let piv = hermite_in_place(&mut rows, a.rows, Some(&mut tr), false);
    let mut kern: Vec<Vec<Int>> = tr.split_off(piv.len());
    hermite_in_place(&mut kern, n, None, true);
    IntMatrix::from_rows(kern, n).transpose()
}

/// Kernel of the matrix whose rows are produced by `rows`, reducing as it goes
/// so that at most a few multiples of `ncols` rows are ever held.
pub fn kernel_basis_streaming<I: IntoIterator<Item = Vec<Int>>>(ncols: usize, rows: I) -> IntMatrix {
    let mut buf: Vec<Vec<Int>> = Vec::new();
    let limit = 2 * ncols + 64;
    for r in rows {
        debug_assert_eq!(r.len(), ncols);
        if r.iter().all(Int::is_zero) {
            continue;
        }
        buf.push(r);
        if buf.len() > limit {
            let rank = hermite_in_place(&mut buf, ncols, None, false).len();
            buf.truncate(rank);
        }
    }
    let rank = hermite_in_place(&mut buf, ncols, None, false).len();
    buf.truncate(rank);
    kernel_basis(&IntMatrix::from_rows(buf, ncols))
}

/// True when the columns of `b` are independent and span a pure sublattice.
pub fn is_saturated(b: &IntMatrix) -> bool {
    let d = elementary_divisors(b);
    d.len() == b.cols && d.iter().all(Int::is_one)
}

/// For a saturated full-column-rank `b`, returns `L` with `L * b = I`.
pub fn left_inverse(b: &IntMatrix) -> Option<IntMatrix> {
    let k = b.cols;
    let hr = row_hermite(b, true, true);
    if hr.rank != k {
        return None;
    }
    let top = IntMatrix::from_fn(k, k, |i, j| hr.h[(i, j)].clone());
    if !top.is_identity() {
        return None;
    }
    let t = hr.transform.expect("transform requested");
    Some(IntMatrix::from_fn(k, b.rows, |i, j| t[(i, j)].clone()))
}

/// Inverse of a unimodular matrix, `None` if `a` is not unimodular.
pub fn inverse_unimodular(a: &IntMatrix) -> Option<IntMatrix> {
    if !a.is_square() {
        return None;
    }
    let hr = row_hermite(a, true, true);
    if !hr.h.is_identity() {
        return None;
    }
    hr.transform
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> Result<Int> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    if n == 0 {
        return Ok(Int::ONE);
    }
    let mut m = a.clone().into_rows();
    let mut sign = 1i64;
    let mut prev = Int::ONE;
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(Int::ZERO);
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = v.div_exact(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if sign < 0 { -d } else { d })
}

pub fn is_unimodular(a: &IntMatrix) -> bool {
    match determinant(a) {
        Ok(d) => d.abs().is_one(),
        Err(_) => false,
    }
}

/// Integer solution of `A x = b`, or `None` when no integer solution exists.
pub fn solve(a: &IntMatrix, b: &[Int]) -> Option<Vec<Int>> {
    assert_eq!(a.rows, b.len(), "right-hand side length mismatch");
    let s = smith_normal_form(a);
    let y = s.left.mul_vec(b);
    let mut z = vec![Int::ZERO; a.cols];
    for (i, yi) in y.iter().enumerate() {
        let di = s.d.get(i).cloned().unwrap_or(Int::ZERO);
        if di.is_zero() {
            if !yi.is_zero() {
                return None;
            }
        } else {
            if !di.divides(yi) {
                return None;
            }
            z[i] = yi.div_exact(&di);
        }
    }
    Some(s.right.mul_vec(&z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    fn check_smith(a: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(a);
        let diag = IntMatrix::diagonal(&s.d, a.rows(), a.cols());
        assert_eq!(s.left.mul(a).mul(&s.right), diag);
        assert!(is_unimodular(&s.left));
        assert!(is_unimodular(&s.right));
        for w in s.d.windows(2) {
            assert!(w[0].divides(&w[1]), "chain broken: {:?}", s.d);
        }
        s
    }

    #[test]
    fn smith_examples() {
        assert_eq!(check_smith(&IntMatrix::identity(3)).d, ints(&[1, 1, 1]));
        assert_eq!(check_smith(&m(&[&[2, 4], &[6, 8]])).d, ints(&[2, 4]));
        assert_eq!(check_smith(&IntMatrix::zeros(2, 2)).d, ints(&[0, 0]));
        assert_eq!(check_smith(&m(&[&[2, 0], &[0, 3]])).d, ints(&[1, 6]));
        check_smith(&m(&[&[0, 2, 4], &[3, 0, 9]]));
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&m(&[&[1, 1]]));
        assert_eq!(k.cols(), 1);
        let v = k.column(0);
        assert!(v == ints(&[1, -1]) || v == ints(&[-1, 1]));
        assert_eq!(kernel_basis(&IntMatrix::identity(3)).cols(), 0);
        let aug = m(&[&[1, 1, 1]]);
        let k = kernel_basis(&aug);
        assert_eq!(k.cols(), 2);
        assert!(aug.mul(&k).is_zero());
        assert!(is_saturated(&k));
    }

    #[test]
    fn cokernel_examples() {
        let c = cokernel_invariants(&m(&[&[2]]));
        assert_eq!((c.divisors.clone(), c.free_rank), (ints(&[2]), 0));
        assert!(cokernel_invariants(&IntMatrix::identity(4)).is_trivial());
        let c = cokernel_invariants(&m(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 6]]));
        assert_eq!(c.divisors, ints(&[2, 6]));
        let c = cokernel_invariants(&m(&[&[2, 0]]));
        assert_eq!(c.free_rank, 0);
        let c = cokernel_invariants(&m(&[&[2], &[0]]));
        assert_eq!(c.free_rank, 1);
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&IntMatrix::identity(4)).unwrap(), Int::ONE);
        assert_eq!(determinant(&m(&[&[1, 2], &[3, 4]])).unwrap(), Int::from(-2));
        assert!(determinant(&m(&[&[1, 2]])).is_err());
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])).unwrap(), Int::from(-1));
    }

    #[test]
    fn completion_matrix_determinant() {
        // ones on the diagonal, a v-column, and the u-row pattern; m = 3, u = 2, v = -1
        let (mm, u, v) = (3usize, 2i64, -1i64);
        let mut a = IntMatrix::zeros(mm + 2, mm + 2);
        for i in 0..mm {
            a[(i, i)] = Int::ONE;
            a[(i, mm + 1)] = Int::from(v);
            a[(mm + 1, i)] = Int::ONE;
        }
        a[(mm, mm)] = Int::ONE;
        a[(mm, mm + 1)] = Int::from(-u);
        a[(mm + 1, mm)] = Int::from(-1);
        a[(mm + 1, mm + 1)] = Int::from(-u);
        assert_eq!(determinant(&a).unwrap(), Int::from(-1));
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve(&m(&[&[2]]), &ints(&[4])), Some(ints(&[2])));
        assert_eq!(solve(&m(&[&[2]]), &ints(&[3])), None);
        let aug = m(&[&[1, 1, 1]]);
        let _ = aug;
        // e1 - e2 lies in the image of the inclusion of the augmentation kernel.
        let incl = m(&[&[1, 0], &[-1, 1], &[0, -1]]);
        let x = solve(&incl, &ints(&[1, -1, 0])).unwrap();
        assert_eq!(incl.mul_vec(&x), ints(&[1, -1, 0]));
    }

    #[test]
    fn left_inverse_and_unimodular_inverse() {
        let b = m(&[&[1, 0], &[2, 1], &[3, 5]]);
        let l = left_inverse(&b).unwrap();
        assert!(l.mul(&b).is_identity());
        assert!(left_inverse(&m(&[&[2], &[0]])).is_none());
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse_unimodular(&a).unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(inverse_unimodular(&m(&[&[2, 0], &[0, 1]])).is_none());
    }

    #[test]
    fn huge_entries_stay_exact() {
        let big = Int::from(i64::MAX);
        let a = IntMatrix::from_fn(2, 2, |i, j| if i == j { big.clone() } else { Int::ONE });
        let d = determinant(&a).unwrap();
        assert_eq!(d, &(&big * &big) - &Int::ONE);
        let s = check_smith(&a);
        assert_eq!(&s.d[0] * &s.d[1], d.abs());
    }
}
