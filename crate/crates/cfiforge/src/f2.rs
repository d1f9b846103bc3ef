//! Linear algebra over GF(2) with labelled rows and columns.
//!
//! Vectors are bit-packed into `u64` words. Matrices and subspaces carry
//! their label sequences so that values built over different index sets
//! cannot be mixed silently.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered, immutable sequence of distinct labels.
pub type Labels = Arc<[String]>;

/// Builds a label sequence, rejecting duplicates.
pub fn labels<I, S>(items: I) -> Result<Labels>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let v: Vec<String> = items.into_iter().map(Into::into).collect();
    let mut seen = std::collections::HashSet::new();
    for l in &v {
        if !seen.insert(l.as_str()) {
            return Err(Error::Structure(format!("duplicate label {l:?}")));
        }
    }
    Ok(v.into())
}

/// Builds a label sequence sorted by the global label order.
pub fn sorted_labels<I, S>(items: I) -> Result<Labels>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut v: Vec<String> = items.into_iter().map(Into::into).collect();
    v.sort();
    labels(v)
}

/// A fixed-length bit vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, idx: I) -> Self {
        let mut v = Self::zeros(len);
        for i in idx {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
    }

    /// Bit `i` of the low bits of `mask`, for vectors of length at most 64.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = if len == 64 { mask } else { mask & ((1u64 << len) - 1) };
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        if b {
            self.words[i >> 6] |= 1 << (i & 63);
        } else {
            self.words[i >> 6] &= !(1 << (i & 63));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i >> 6] ^= 1 << (i & 63);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut v = self.clone();
        v.xor_assign(other);
        v
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "length mismatch");
        BitVec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn or(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "length mismatch");
        BitVec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn is_subset(&self, other: &BitVec) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    /// Returns the vector with coordinates moved by `perm` (bit `i` goes to `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> BitVec {
        assert_eq!(perm.len(), self.len);
        BitVec::from_indices(self.len, self.iter_ones().map(|i| perm[i]))
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            v.set(i, true);
        }
        for i in other.iter_ones() {
            v.set(self.len + i, true);
        }
        v
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        BitVec::from_indices(end - start, self.iter_ones().filter(|&i| i >= start && i < end).map(|i| i - start))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A vector in `F2^labels`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct F2Vector {
    labels: Labels,
    bits: BitVec,
}

impl F2Vector {
    pub fn new(labels: Labels, bits: BitVec) -> Result<Self> {
        if labels.len() != bits.len() {
            return Err(Error::Structure(format!(
                "vector has {} bits for {} labels",
                bits.len(),
                labels.len()
            )));
        }
        Ok(F2Vector { labels, bits })
    }

    pub fn zero(labels: Labels) -> Self {
        let bits = BitVec::zeros(labels.len());
        F2Vector { labels, bits }
    }

    /// Characteristic vector of a set of labels.
    pub fn indicator(labels: Labels, set: &[&str]) -> Result<Self> {
        let mut bits = BitVec::zeros(labels.len());
        for s in set {
            let i = labels
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| Error::Structure(format!("unknown label {s:?}")))?;
            bits.set(i, true);
        }
        Ok(F2Vector { labels, bits })
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn into_bits(self) -> BitVec {
        self.bits
    }

    /// Labels whose coordinate is one.
    pub fn support(&self) -> Vec<&str> {
        self.bits.iter_ones().map(|i| self.labels[i].as_str()).collect()
    }

    pub fn add(&self, other: &F2Vector) -> Result<F2Vector> {
        same_labels(&self.labels, &other.labels)?;
        Ok(F2Vector { labels: self.labels.clone(), bits: self.bits.xor(&other.bits) })
    }
}

fn same_labels(a: &Labels, b: &Labels) -> Result<()> {
    if Arc::ptr_eq(a, b) || a[..] == b[..] {
        Ok(())
    } else {
        Err(Error::Structure("label sequences differ".into()))
    }
}

/// Reduces `rows` to canonical reduced row-echelon form in place and returns the
/// pivot column of each remaining row. Zero rows are dropped.
fn rref(rows: &mut Vec<BitVec>) -> Vec<usize> {
    let mut basis: Vec<(usize, BitVec)> = Vec::new();
    for mut v in rows.drain(..) {
        for (p, r) in &basis {
            if v.get(*p) {
                v.xor_assign(r);
            }
        }
        if let Some(p) = v.first_one() {
            for (_, r) in basis.iter_mut() {
                if r.get(p) {
                    r.xor_assign(&v);
                }
            }
            basis.push((p, v));
        }
    }
    basis.sort_by_key(|(p, _)| *p);
    let pivots = basis.iter().map(|(p, _)| *p).collect();
    rows.extend(basis.into_iter().map(|(_, r)| r));
    pivots
}

/// A matrix over GF(2) with labelled rows and columns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct F2Matrix {
    rows: Labels,
    cols: Labels,
    data: Vec<BitVec>,
}

impl F2Matrix {
    pub fn zeros(rows: Labels, cols: Labels) -> Self {
        let data = vec![BitVec::zeros(cols.len()); rows.len()];
        F2Matrix { rows, cols, data }
    }

    pub fn identity(labels: Labels) -> Self {
        let n = labels.len();
        let data = (0..n).map(|i| BitVec::unit(n, i)).collect();
        F2Matrix { rows: labels.clone(), cols: labels, data }
    }

    pub fn from_rows(rows: Labels, cols: Labels, data: Vec<BitVec>) -> Result<Self> {
        if data.len() != rows.len() {
            return Err(Error::Structure(format!("{} rows given for {} labels", data.len(), rows.len())));
        }
        if data.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::Structure("row length does not match column labels".into()));
        }
        Ok(F2Matrix { rows, cols, data })
    }

    pub fn row_labels(&self) -> &Labels {
        &self.rows
    }

    pub fn col_labels(&self) -> &Labels {
        &self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        self.data[i].set(j, b)
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.data.clone();
        rref(&mut rows).len()
    }

    /// `M · v` for `v` indexed by the column labels.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.ncols(), "vector length does not match columns");
        BitVec::from_bools(&self.data.iter().map(|r| r.dot(v)).collect::<Vec<_>>())
    }

    /// Matrix product `self · other`; requires `self`'s columns to equal `other`'s rows.
    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix> {
        same_labels(&self.cols, &other.rows)?;
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut acc = BitVec::zeros(other.ncols());
                for k in r.iter_ones() {
                    acc.xor_assign(&other.data[k]);
                }
                acc
            })
            .collect();
        Ok(F2Matrix { rows: self.rows.clone(), cols: other.cols.clone(), data })
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols.clone(), self.rows.clone());
        for (i, r) in self.data.iter().enumerate() {
            for j in r.iter_ones() {
                t.data[j].set(i, true);
            }
        }
        t
    }

    pub fn kernel(&self) -> F2Subspace {
        let mut rows = self.data.clone();
        let pivots = rref(&mut rows);
        let n = self.ncols();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; n];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let basis = (0..n)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::unit(n, f);
                for (r, &p) in rows.iter().zip(&pivots) {
                    if r.get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect();
        F2Subspace::span_bits(self.cols.clone(), basis)
    }

    /// Row space as a subspace of `F2^cols`.
    pub fn row_space(&self) -> F2Subspace {
        F2Subspace::span_bits(self.cols.clone(), self.data.clone())
    }

    /// Solves `A x = b`, setting free variables to zero. Returns `None` if inconsistent.
    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        assert_eq!(b.len(), self.nrows(), "right-hand side length does not match rows");
        let n = self.ncols();
        let mut rows: Vec<BitVec> = self
            .data
            .iter()
            .enumerate()
            .map(|(i, r)| r.concat(&BitVec::from_bools(&[b.get(i)])))
            .collect();
        let pivots = rref(&mut rows);
        let mut x = BitVec::zeros(n);
        for (r, &p) in rows.iter().zip(&pivots) {
            if p == n {
                return None;
            }
            if r.get(n) {
                x.set(p, true);
            }
        }
        Some(x)
    }

    /// Image of a subspace of the column space.
    pub fn image(&self, s: &F2Subspace) -> Result<F2Subspace> {
        same_labels(&self.cols, &s.ambient)?;
        Ok(F2Subspace::span_bits(self.rows.clone(), s.basis.iter().map(|v| self.mul_vec(v)).collect()))
    }

    /// Stacks rows of `self` above rows of `other`; columns must agree.
    pub fn vstack(&self, other: &F2Matrix) -> Result<F2Matrix> {
        same_labels(&self.cols, &other.cols)?;
        let rows = labels(self.rows.iter().chain(other.rows.iter()).cloned())?;
        let data = self.data.iter().chain(&other.data).cloned().collect();
        Ok(F2Matrix { rows, cols: self.cols.clone(), data })
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            rows: self.rows.to_vec(),
            cols: self.cols.to_vec(),
            bits: self.data.iter().flat_map(|r| r.to_bits()).collect(),
        }
    }

    pub fn from_json(j: &MatrixJson) -> Result<F2Matrix> {
        let rows = labels(j.rows.iter().cloned())?;
        let cols = labels(j.cols.iter().cloned())?;
        if j.bits.len() != rows.len() * cols.len() || j.bits.iter().any(|&b| b > 1) {
            return Err(Error::Structure("matrix bits must be a row-major 0/1 array".into()));
        }
        let c = cols.len();
        let data = (0..rows.len())
            .map(|i| BitVec::from_bools(&j.bits[i * c..(i + 1) * c].iter().map(|&b| b == 1).collect::<Vec<_>>()))
            .collect();
        Ok(F2Matrix { rows, cols, data })
    }
}

/// JSON form of a matrix: labels plus row-major bits.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub bits: Vec<u8>,
}

/// JSON form of a subspace: ambient labels plus canonical basis rows.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SubspaceJson {
    pub ambient: Vec<String>,
    pub basis: Vec<Vec<u8>>,
}

/// A subspace of `F2^ambient`, stored by its canonical reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct F2Subspace {
    ambient: Labels,
    basis: Vec<BitVec>,
}

impl F2Subspace {
    pub fn zero(ambient: Labels) -> Self {
        F2Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: Labels) -> Self {
        let n = ambient.len();
        F2Subspace { ambient, basis: (0..n).map(|i| BitVec::unit(n, i)).collect() }
    }

    pub fn span_bits(ambient: Labels, mut vecs: Vec<BitVec>) -> Self {
        assert!(vecs.iter().all(|v| v.len() == ambient.len()), "vector length does not match ambient");
        rref(&mut vecs);
        F2Subspace { ambient, basis: vecs }
    }

    pub fn span(ambient: Labels, vecs: &[F2Vector]) -> Result<Self> {
        for v in vecs {
            same_labels(&ambient, &v.labels)?;
        }
        Ok(Self::span_bits(ambient, vecs.iter().map(|v| v.bits.clone()).collect()))
    }

    pub fn ambient(&self) -> &Labels {
        &self.ambient
    }

    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<F2Vector> {
        self.basis.iter().map(|b| F2Vector { labels: self.ambient.clone(), bits: b.clone() }).collect()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient.len() - self.basis.len()
    }

    pub fn contains_bits(&self, v: &BitVec) -> bool {
        let mut v = v.clone();
        for b in &self.basis {
            if v.get(b.first_one().unwrap()) {
                v.xor_assign(b);
            }
        }
        v.is_zero()
    }

    pub fn contains(&self, v: &F2Vector) -> Result<bool> {
        same_labels(&self.ambient, &v.labels)?;
        Ok(self.contains_bits(&v.bits))
    }

    pub fn is_subspace_of(&self, other: &F2Subspace) -> Result<bool> {
        same_labels(&self.ambient, &other.ambient)?;
        Ok(self.basis.iter().all(|b| other.contains_bits(b)))
    }

    pub fn sum(&self, other: &F2Subspace) -> Result<F2Subspace> {
        same_labels(&self.ambient, &other.ambient)?;
        Ok(Self::span_bits(self.ambient.clone(), self.basis.iter().chain(&other.basis).cloned().collect()))
    }

    /// Intersection by the Zassenhaus algorithm.
    pub fn intersect(&self, other: &F2Subspace) -> Result<F2Subspace> {
        same_labels(&self.ambient, &other.ambient)?;
        let n = self.ambient.len();
        let mut rows: Vec<BitVec> = self
            .basis
            .iter()
            .map(|u| u.concat(u))
            .chain(other.basis.iter().map(|v| v.concat(&BitVec::zeros(n))))
            .collect();
        let pivots = rref(&mut rows);
        let inter = rows
            .iter()
            .zip(&pivots)
            .filter(|(_, &p)| p >= n)
            .map(|(r, _)| r.slice(n, 2 * n))
            .collect();
        Ok(Self::span_bits(self.ambient.clone(), inter))
    }

    /// Enumerates all `2^dim` elements. Intended for small dimensions.
    pub fn elements(&self) -> Vec<BitVec> {
        assert!(self.dim() < 30, "subspace too large to enumerate");
        let n = self.ambient.len();
        (0u64..1 << self.dim())
            .map(|m| {
                let mut v = BitVec::zeros(n);
                for (k, b) in self.basis.iter().enumerate() {
                    if m >> k & 1 == 1 {
                        v.xor_assign(b);
                    }
                }
                v
            })
            .collect()
    }

    /// Image under a coordinate permutation of the ambient space.
    pub fn permuted(&self, perm: &[usize]) -> F2Subspace {
        Self::span_bits(self.ambient.clone(), self.basis.iter().map(|b| b.permuted(perm)).collect())
    }

    pub fn to_json(&self) -> SubspaceJson {
        SubspaceJson { ambient: self.ambient.to_vec(), basis: self.basis.iter().map(|b| b.to_bits()).collect() }
    }

    pub fn from_json(j: &SubspaceJson) -> Result<F2Subspace> {
        let ambient = labels(j.ambient.iter().cloned())?;
        let mut vecs = Vec::new();
        for row in &j.basis {
            if row.len() != ambient.len() || row.iter().any(|&b| b > 1) {
                return Err(Error::Structure("basis rows must be 0/1 arrays over the ambient labels".into()));
            }
            vecs.push(BitVec::from_bools(&row.iter().map(|&b| b == 1).collect::<Vec<_>>()));
        }
        Ok(Self::span_bits(ambient, vecs))
    }
}

/// Index lookup for a label sequence.
pub fn label_index(labels: &Labels) -> HashMap<String, usize> {
    labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn efg() -> Labels {
        labels(["e", "f", "g"]).unwrap()
    }

    fn ind(l: &Labels, s: &[&str]) -> BitVec {
        F2Vector::indicator(l.clone(), s).unwrap().into_bits()
    }

    #[test]
    fn rank_examples() {
        let l = efg();
        let m = F2Matrix::from_rows(labels(["r1", "r2"]).unwrap(), l.clone(), vec![ind(&l, &["f"]), ind(&l, &["g"])])
            .unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(F2Matrix::zeros(labels(["a"]).unwrap(), l.clone()).rank(), 0);
        assert_eq!(F2Matrix::identity(labels(["1", "2", "3", "4"]).unwrap()).rank(), 4);
    }

    #[test]
    fn kernel_examples() {
        let l = efg();
        let m = F2Matrix::from_rows(labels(["r"]).unwrap(), l.clone(), vec![ind(&l, &["e"])]).unwrap();
        let k = m.kernel();
        assert_eq!(k.dim(), 2);
        assert!(!k.contains_bits(&ind(&l, &["e"])));
        assert!(k.contains_bits(&ind(&l, &["f", "g"])));
        assert_eq!(F2Matrix::identity(l.clone()).kernel().dim(), 0);
        let m = F2Matrix::from_rows(labels(["r1", "r2"]).unwrap(), l.clone(), vec![ind(&l, &["f"]), ind(&l, &["g"])])
            .unwrap();
        assert_eq!(m.kernel(), F2Subspace::span_bits(l.clone(), vec![ind(&l, &["e"])]));
    }

    #[test]
    fn solve_examples() {
        let l = labels(["e", "f"]).unwrap();
        let m = F2Matrix::from_rows(labels(["r"]).unwrap(), l.clone(), vec![ind(&l, &["e", "f"])]).unwrap();
        assert_eq!(m.solve(&BitVec::ones(1)), Some(ind(&l, &["e"])));
        let m = F2Matrix::from_rows(labels(["a", "b"]).unwrap(), l.clone(), vec![ind(&l, &["e"]), ind(&l, &["e"])])
            .unwrap();
        assert_eq!(m.solve(&BitVec::from_bools(&[true, false])), None);
        let id = F2Matrix::identity(l.clone());
        let b = ind(&l, &["f"]);
        assert_eq!(id.solve(&b), Some(b));
    }

    #[test]
    fn subspace_examples() {
        let l = efg();
        let he = F2Matrix::from_rows(labels(["r"]).unwrap(), l.clone(), vec![ind(&l, &["e"])]).unwrap().kernel();
        let hf = F2Matrix::from_rows(labels(["r"]).unwrap(), l.clone(), vec![ind(&l, &["f"])]).unwrap().kernel();
        assert_eq!(he.intersect(&hf).unwrap(), F2Subspace::span_bits(l.clone(), vec![ind(&l, &["g"])]));
        assert_eq!(F2Matrix::identity(l.clone()).image(&he).unwrap(), he);

        let four = labels(["1", "2", "3", "4"]).unwrap();
        let even = F2Matrix::from_rows(labels(["p"]).unwrap(), four.clone(), vec![BitVec::ones(4)]).unwrap().kernel();
        assert!(even.contains_bits(&ind(&four, &["1", "2"])));
        assert!(!even.contains_bits(&ind(&four, &["1"])));
    }

    #[test]
    fn ambient_mismatch_is_error() {
        let a = F2Subspace::zero(efg());
        let b = F2Subspace::zero(labels(["x", "y", "z"]).unwrap());
        assert!(a.intersect(&b).is_err());
        assert!(labels(["a", "a"]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let l = efg();
        let m = F2Matrix::from_rows(labels(["r1", "r2"]).unwrap(), l.clone(), vec![ind(&l, &["f"]), ind(&l, &["e", "g"])])
            .unwrap();
        let j = serde_json::to_string(&m.to_json()).unwrap();
        let back = F2Matrix::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, m);
        let k = m.kernel();
        assert_eq!(F2Subspace::from_json(&k.to_json()).unwrap(), k);
    }
}
