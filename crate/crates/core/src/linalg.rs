//! Dense exact matrices, reduced row-echelon subspaces, and the sparse
//! append-only echelon basis used by the filtration engine.
//!
//! Dense objects keep `Rat` entries in canonical form. The sparse rows
//! clear denominators and store gcd-reduced integer coefficients; spans
//! are unchanged by that scaling and nothing ever rounds.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Dense row-major matrix over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        for row in &rows {
            if row.len() != c {
                return Err(Error::DimMismatch(format!(
                    "ragged rows: expected {c}, got {}",
                    row.len()
                )));
            }
        }
        Ok(Mat {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Rat {
        &mut self.entries[r * self.cols + c]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimMismatch("matrix add".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimMismatch("matrix sub".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rat) -> Mat {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::DimMismatch(format!(
                "matrix mul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if !b.is_zero() {
                        *out.at_mut(i, j) += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Mat) -> Result<Mat> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Kronecker product; tensor-basis index is row-major over factors
    /// (first factor slowest).
    pub fn kron(&self, other: &Mat) -> Mat {
        let mut out = Mat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.at(k, l);
                        if !b.is_zero() {
                            *out.at_mut(i * other.rows + k, j * other.cols + l) = a * b;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::DimMismatch("matrix apply".into()));
        }
        let mut out = vec![Rat::zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for i in 0..self.rows {
                let a = self.at(i, j);
                if !a.is_zero() {
                    out[i] += a * x;
                }
            }
        }
        Ok(out)
    }

    /// True if the matrix is diagonal.
    pub fn is_diagonal(&self) -> bool {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j && !self.at(i, j).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Subspace stored as a reduced row-echelon basis with unit pivots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residue of `v` after reduction against the echelon basis.
    pub fn reduce(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.ambient {
            return Err(Error::DimMismatch(format!(
                "vector length {} vs ambient {}",
                v.len(),
                self.ambient
            )));
        }
        let mut v = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let c = v[p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= &c * y;
                }
            }
        }
        Ok(v)
    }
}

/// Reduced row-echelon basis of the span of `vectors` inside an ambient
/// space of the given dimension. Pivoting is deterministic (first
/// nonzero entry), so equal inputs give byte-identical outputs.
pub fn rref_basis(ambient: usize, vectors: &[Vec<Rat>]) -> Result<Subspace> {
    let mut sp = Subspace::zero(ambient);
    for v in vectors {
        rref_insert(&mut sp, v)?;
    }
    Ok(sp)
}

fn rref_insert(sp: &mut Subspace, v: &[Rat]) -> Result<bool> {
    let mut v = sp.reduce(v)?;
    let Some(p) = v.iter().position(|x| !x.is_zero()) else {
        return Ok(false);
    };
    let inv = v[p].clone();
    for x in v.iter_mut() {
        *x /= &inv;
    }
    // Back-substitute to keep the reduced form.
    for (row, &q) in sp.basis.iter_mut().zip(&sp.pivots) {
        debug_assert!(q != p);
        if !row[p].is_zero() {
            let c = row[p].clone();
            for (x, y) in row.iter_mut().zip(&v) {
                *x -= &c * y;
            }
        }
    }
    let at = sp.pivots.iter().position(|&q| q > p).unwrap_or(sp.dim());
    sp.basis.insert(at, v);
    sp.pivots.insert(at, p);
    Ok(true)
}

/// Span of the union of two subspaces.
pub fn subspace_join(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    if a.ambient != b.ambient {
        return Err(Error::DimMismatch(format!(
            "join of ambient {} with {}",
            a.ambient, b.ambient
        )));
    }
    let mut out = a.clone();
    for v in &b.basis {
        rref_insert(&mut out, v)?;
    }
    Ok(out)
}

/// Membership test: true iff `v` lies in the span of `a`.
pub fn subspace_contains(a: &Subspace, v: &[Rat]) -> Result<bool> {
    Ok(a.reduce(v)?.iter().all(|x| x.is_zero()))
}

/// Solves `sum_i x_i b_i = target` for the coefficients `x`, if the
/// target lies in the span. Dense; meant for small systems.
pub fn solve_in_basis(basis: &[Vec<Rat>], target: &[Rat]) -> Result<Option<Vec<Rat>>> {
    let m = basis.len();
    let d = target.len();
    for b in basis {
        if b.len() != d {
            return Err(Error::DimMismatch("solve_in_basis".into()));
        }
    }
    // Augmented rows [b_i | e_i]; reduce target alongside.
    let mut rows: Vec<(Vec<Rat>, Vec<Rat>)> = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        let mut coeff = vec![Rat::zero(); m];
        coeff[i] = Rat::one();
        let mut vec = b.clone();
        let mut c = coeff;
        for (row, track) in &rows {
            let p = row.iter().position(|x| !x.is_zero()).unwrap();
            if !vec[p].is_zero() {
                let f = vec[p].clone() / &row[p];
                for (x, y) in vec.iter_mut().zip(row) {
                    *x -= &f * y;
                }
                for (x, y) in c.iter_mut().zip(track) {
                    *x -= &f * y;
                }
            }
        }
        if vec.iter().any(|x| !x.is_zero()) {
            rows.push((vec, c));
        }
    }
    let mut t = target.to_vec();
    let mut coeffs = vec![Rat::zero(); m];
    for (row, track) in &rows {
        let p = row.iter().position(|x| !x.is_zero()).unwrap();
        if !t[p].is_zero() {
            let f = t[p].clone() / &row[p];
            for (x, y) in t.iter_mut().zip(row) {
                *x -= &f * y;
            }
            for (x, y) in coeffs.iter_mut().zip(track) {
                *x += &f * y;
            }
        }
    }
    if t.iter().any(|x| !x.is_zero()) {
        return Ok(None);
    }
    Ok(Some(coeffs))
}

// ---------------------------------------------------------------------
// Sparse integer rows and the append-only echelon used by the engine.
// ---------------------------------------------------------------------

/// Sparse vector with gcd-reduced integer entries, sorted by index,
/// leading coefficient positive. Scaling does not change spans, so this
/// represents a line in the ambient space exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseRow {
    entries: Vec<(u32, BigInt)>,
}

impl SparseRow {
    pub fn unit(index: u32) -> Self {
        SparseRow {
            entries: vec![(index, BigInt::one())],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u32, BigInt)] {
        &self.entries
    }

    pub fn lead(&self) -> Option<u32> {
        self.entries.first().map(|e| e.0)
    }

    pub fn coeff_at(&self, index: u32) -> Option<&BigInt> {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    /// Builds a row from rational pairs by clearing denominators.
    pub fn from_rat_pairs(pairs: &[(u32, Rat)]) -> Self {
        let mut lcm = BigInt::one();
        for (_, r) in pairs {
            if !r.is_zero() {
                lcm = lcm.lcm(r.denom());
            }
        }
        let mut entries: Vec<(u32, BigInt)> = pairs
            .iter()
            .filter(|(_, r)| !r.is_zero())
            .map(|(i, r)| (*i, r.numer() * (&lcm / r.denom())))
            .collect();
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(u32, BigInt)> = Vec::with_capacity(entries.len());
        for (i, c) in entries {
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += c,
                _ => merged.push((i, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        let mut row = SparseRow { entries: merged };
        row.normalize();
        row
    }

    pub fn from_dense(v: &[Rat]) -> Self {
        let pairs: Vec<(u32, Rat)> = v
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(|(i, r)| (i as u32, r.clone()))
            .collect();
        SparseRow::from_rat_pairs(&pairs)
    }

    pub fn to_dense(&self, ambient: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); ambient];
        for (i, c) in &self.entries {
            v[*i as usize] = Rat::from_integer(c.clone());
        }
        v
    }

    /// Divides out the content and makes the leading coefficient positive.
    fn normalize(&mut self) {
        if self.entries.is_empty() {
            return;
        }
        let mut g = BigInt::zero();
        for (_, c) in &self.entries {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        let negate = self.entries[0].1.is_negative();
        if !g.is_one() || negate {
            if negate {
                g = -g;
            }
            for (_, c) in self.entries.iter_mut() {
                *c = &*c / &g;
            }
        }
    }

    /// `self <- other[pivot] * self - self[pivot] * other`, normalized.
    /// Cancels the `pivot` coordinate of `self`.
    fn eliminate(&mut self, other: &SparseRow, pivot: u32) {
        let a = other.coeff_at(pivot).expect("pivot in other").clone();
        let b = self.coeff_at(pivot).expect("pivot in self").clone();
        let mut out: Vec<(u32, BigInt)> =
            Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let next = match (self.entries.get(i), other.entries.get(j)) {
                (Some((pi, ci)), Some((pj, cj))) => {
                    if pi < pj {
                        i += 1;
                        (*pi, &a * ci)
                    } else if pj < pi {
                        j += 1;
                        (*pj, -(&b * cj))
                    } else {
                        let v = &a * ci - &b * cj;
                        i += 1;
                        j += 1;
                        (*pi, v)
                    }
                }
                (Some((pi, ci)), None) => {
                    i += 1;
                    (*pi, &a * ci)
                }
                (None, Some((pj, cj))) => {
                    j += 1;
                    (*pj, -(&b * cj))
                }
                (None, None) => unreachable!(),
            };
            if !next.1.is_zero() {
                out.push(next);
            }
        }
        self.entries = out;
        self.normalize();
    }
}

/// Append-only row-echelon basis. Every inserted row is reduced against
/// the existing rows before insertion and rows are never modified
/// afterwards, so for any prefix of the insertion order the rows of the
/// prefix span exactly the space they spanned when inserted.
#[derive(Debug, Clone)]
pub struct Echelon {
    ambient: usize,
    rows: Vec<SparseRow>,
    pivot_to_row: HashMap<u32, usize>,
}

impl Echelon {
    pub fn new(ambient: usize) -> Self {
        Echelon {
            ambient,
            rows: Vec::new(),
            pivot_to_row: HashMap::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn pivot_of_row(&self, idx: usize) -> u32 {
        self.rows[idx].lead().expect("rows are nonzero")
    }

    /// Fully reduces `v` against the basis.
    pub fn reduce(&self, mut v: SparseRow) -> SparseRow {
        let mut cursor = 0usize;
        while cursor < v.entries.len() {
            let idx = v.entries[cursor].0;
            if let Some(&r) = self.pivot_to_row.get(&idx) {
                v.eliminate(&self.rows[r], idx);
                // Elimination rewrites the tail; restart scanning at the
                // same position (earlier coords are pivot-free already).
            } else {
                cursor += 1;
            }
        }
        v
    }

    pub fn contains(&self, v: SparseRow) -> bool {
        self.reduce(v).is_zero()
    }

    /// Reduces and, if independent, appends; returns the new row index.
    pub fn insert(&mut self, v: SparseRow) -> Option<usize> {
        let v = self.reduce(v);
        if v.is_zero() {
            return None;
        }
        let pivot = v.lead().unwrap();
        let idx = self.rows.len();
        self.pivot_to_row.insert(pivot, idx);
        self.rows.push(v);
        Some(idx)
    }

    /// Coefficients expressing `v` in the row basis (creation order),
    /// or None if `v` is outside the span. Rows inserted later never
    /// have support on earlier pivots, so a forward pass suffices.
    pub fn solve_coords(&self, v: &[Rat]) -> Result<Option<Vec<Rat>>> {
        if v.len() != self.ambient {
            return Err(Error::DimMismatch("solve_coords".into()));
        }
        let mut v = v.to_vec();
        let mut coords = vec![Rat::zero(); self.rows.len()];
        for (j, row) in self.rows.iter().enumerate() {
            let p = row.lead().unwrap() as usize;
            if v[p].is_zero() {
                continue;
            }
            let lead = Rat::from_integer(row.coeff_at(p as u32).unwrap().clone());
            let c = v[p].clone() / lead;
            for (i, coeff) in row.entries() {
                v[*i as usize] -= &c * Rat::from_integer(coeff.clone());
            }
            coords[j] = c;
        }
        if v.iter().any(|x| !x.is_zero()) {
            return Ok(None);
        }
        Ok(Some(coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn rref_empty_span() {
        let s = rref_basis(3, &[]).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s.ambient_dim(), 3);
    }

    #[test]
    fn rref_full_space() {
        let s = rref_basis(2, &[v(&[1, 0]), v(&[0, 1]), v(&[1, 1])]).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.basis()[0], v(&[1, 0]));
        assert_eq!(s.basis()[1], v(&[0, 1]));
    }

    #[test]
    fn rref_proportional_rows() {
        let s = rref_basis(2, &[v(&[2, 4]), v(&[1, 2])]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis()[0], v(&[1, 2]));
    }

    #[test]
    fn rref_is_projection() {
        let s = rref_basis(3, &[v(&[1, 2, 3]), v(&[0, 1, 1])]).unwrap();
        let again = rref_basis(3, s.basis()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn join_examples() {
        let e1 = rref_basis(2, &[v(&[1, 0])]).unwrap();
        let e2 = rref_basis(2, &[v(&[0, 1])]).unwrap();
        assert_eq!(subspace_join(&e1, &e2).unwrap().dim(), 2);
        assert_eq!(subspace_join(&e1, &e1).unwrap(), e1);
        let zero = Subspace::zero(2);
        assert_eq!(subspace_join(&zero, &e2).unwrap(), e2);
        assert!(subspace_join(&e1, &Subspace::zero(3)).is_err());
    }

    #[test]
    fn contains_examples() {
        let diag = rref_basis(2, &[v(&[1, 1])]).unwrap();
        assert!(subspace_contains(&diag, &v(&[2, 2])).unwrap());
        assert!(!subspace_contains(&diag, &v(&[1, 0])).unwrap());
        assert!(subspace_contains(&Subspace::zero(2), &v(&[0, 0])).unwrap());
        assert!(subspace_contains(&diag, &v(&[1])).is_err());
    }

    #[test]
    fn mat_mul_and_commutator() {
        let e = Mat::from_rows(vec![v(&[0, 1]), v(&[0, 0])]).unwrap();
        let f = Mat::from_rows(vec![v(&[0, 0]), v(&[1, 0])]).unwrap();
        let h = e.commutator(&f).unwrap();
        assert_eq!(h.at(0, 0), &rat_int(1));
        assert_eq!(h.at(1, 1), &rat_int(-1));
        assert!(h.at(0, 1).is_zero());
    }

    #[test]
    fn kron_shape_and_values() {
        let a = Mat::from_rows(vec![v(&[1, 2]), v(&[3, 4])]).unwrap();
        let i = Mat::identity(2);
        let k = a.kron(&i);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.at(0, 0), &rat_int(1));
        assert_eq!(k.at(0, 2), &rat_int(2));
        assert_eq!(k.at(3, 1), &rat_int(3));
    }

    #[test]
    fn sparse_row_clears_denominators() {
        let r = SparseRow::from_rat_pairs(&[(0, rat(1, 2)), (3, rat(1, 3))]);
        assert_eq!(r.entries()[0], (0, BigInt::from(3)));
        assert_eq!(r.entries()[1], (3, BigInt::from(2)));
    }

    #[test]
    fn echelon_insert_and_solve() {
        let mut e = Echelon::new(3);
        assert!(e.insert(SparseRow::from_dense(&v(&[1, 1, 0]))).is_some());
        assert!(e.insert(SparseRow::from_dense(&v(&[0, 2, 2]))).is_some());
        assert!(e.insert(SparseRow::from_dense(&v(&[1, 3, 2]))).is_none());
        assert_eq!(e.dim(), 2);
        let coords = e.solve_coords(&v(&[1, 3, 2])).unwrap().unwrap();
        assert_eq!(coords, vec![rat_int(1), rat_int(2)]);
        assert!(e.solve_coords(&v(&[0, 0, 1])).unwrap().is_none());
    }

    #[test]
    fn solve_in_basis_small() {
        let basis = vec![v(&[1, 0, 1]), v(&[0, 1, 1])];
        let x = solve_in_basis(&basis, &v(&[2, 3, 5])).unwrap().unwrap();
        assert_eq!(x, vec![rat_int(2), rat_int(3)]);
        assert!(solve_in_basis(&basis, &v(&[0, 0, 1])).unwrap().is_none());
    }
}
