//! Exact arithmetic and dense linear algebra over a prime field `F_p`.
//!
//! Vectors and matrices store residues as `u32` together with the modulus;
//! individual entries are exposed as [`FieldElement`]s. Index vectors in
//! `F_p^k` are enumerated lexicographically with the first coordinate most
//! significant, which is also the order used by [`coset_enumerate`].

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime modulus")]
    NotPrime(u32),
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ragged matrix rows")]
    Ragged,
}

pub type Result<T> = std::result::Result<T, FieldError>;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A validated prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField(u32);

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if is_prime(p) {
            Ok(PrimeField(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn order(self) -> u32 {
        self.0
    }

    pub fn elem(self, value: u64) -> FieldElement {
        FieldElement {
            value: (value % self.0 as u64) as u32,
            modulus: self.0,
        }
    }

    pub fn zero_vector(self, len: usize) -> FieldVector {
        FieldVector {
            modulus: self.0,
            entries: vec![0; len],
        }
    }

    /// Number of vectors in `F_p^len`, if it fits in `usize`.
    pub fn space_size(self, len: usize) -> Option<usize> {
        (self.0 as usize).checked_pow(len as u32)
    }

    #[inline]
    pub(crate) fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub(crate) fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub(crate) fn inv(self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.0) {
            return Err(FieldError::ZeroInverse);
        }
        // Fermat: a^(p-2)
        let p = self.0 as u64;
        let mut base = a as u64 % p;
        let mut exp = p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        Ok(acc as u32)
    }
}

impl TryFrom<u32> for PrimeField {
    type Error = FieldError;
    fn try_from(p: u32) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    /// Inverse of the left operand; the right operand is ignored.
    Inv,
}

impl FieldElement {
    pub fn new(value: u64, modulus: u32) -> Result<Self> {
        Ok(PrimeField::new(modulus)?.elem(value))
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    fn field(self) -> PrimeField {
        PrimeField(self.modulus)
    }

    fn check(self, other: FieldElement) -> Result<PrimeField> {
        if self.modulus != other.modulus {
            return Err(FieldError::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(self.field())
    }

    pub fn try_add(self, other: FieldElement) -> Result<Self> {
        let f = self.check(other)?;
        Ok(f.elem(f.add(self.value, other.value) as u64))
    }

    pub fn try_sub(self, other: FieldElement) -> Result<Self> {
        let f = self.check(other)?;
        Ok(f.elem(f.add(self.value, self.modulus - other.value) as u64))
    }

    pub fn try_mul(self, other: FieldElement) -> Result<Self> {
        let f = self.check(other)?;
        Ok(f.elem(f.mul(self.value, other.value) as u64))
    }

    pub fn inv(self) -> Result<Self> {
        let f = self.field();
        Ok(f.elem(f.inv(self.value)? as u64))
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

/// Binary field operation dispatch.
pub fn ff_arith(a: FieldElement, b: FieldElement, op: FieldOp) -> Result<FieldElement> {
    match op {
        FieldOp::Add => a.try_add(b),
        FieldOp::Sub => a.try_sub(b),
        FieldOp::Mul => a.try_mul(b),
        FieldOp::Inv => a.inv(),
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldVector {
    modulus: u32,
    entries: Vec<u32>,
}

impl FieldVector {
    pub fn new(field: PrimeField, entries: impl IntoIterator<Item = u64>) -> Self {
        FieldVector {
            modulus: field.0,
            entries: entries.into_iter().map(|v| field.elem(v).value).collect(),
        }
    }

    pub fn from_elements(elems: &[FieldElement]) -> Result<Self> {
        let Some(first) = elems.first() else {
            return Err(FieldError::DimensionMismatch { expected: 1, found: 0 });
        };
        for e in elems {
            first.check(*e)?;
        }
        Ok(FieldVector {
            modulus: first.modulus,
            entries: elems.iter().map(|e| e.value).collect(),
        })
    }

    /// The `index`-th vector of `F_p^len` in lexicographic order.
    pub fn from_index(field: PrimeField, mut index: usize, len: usize) -> Self {
        let p = field.0 as usize;
        let mut entries = vec![0u32; len];
        for slot in entries.iter_mut().rev() {
            *slot = (index % p) as u32;
            index /= p;
        }
        FieldVector {
            modulus: field.0,
            entries,
        }
    }

    /// Inverse of [`FieldVector::from_index`].
    pub fn to_index(&self) -> usize {
        self.entries
            .iter()
            .fold(0usize, |acc, &v| acc * self.modulus as usize + v as usize)
    }

    pub fn field(&self) -> PrimeField {
        PrimeField(self.modulus)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> FieldElement {
        FieldElement {
            value: self.entries[i],
            modulus: self.modulus,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.entries.iter().map(move |&value| FieldElement {
            value,
            modulus: self.modulus,
        })
    }

    pub fn residues(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    fn check_shape(&self, other: &FieldVector) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(FieldError::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        if self.len() != other.len() {
            return Err(FieldError::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &FieldVector) -> Result<FieldVector> {
        self.check_shape(other)?;
        let f = self.field();
        Ok(FieldVector {
            modulus: self.modulus,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &FieldVector) -> Result<FieldVector> {
        self.check_shape(other)?;
        let f = self.field();
        Ok(FieldVector {
            modulus: self.modulus,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f.add(a, self.modulus - b))
                .collect(),
        })
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.entries.iter().filter(|&&v| v != 0).count()
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Lexicographic enumeration of `F_p^len`.
pub fn index_vectors(field: PrimeField, len: usize) -> impl Iterator<Item = FieldVector> {
    let total = field
        .space_size(len)
        .expect("index space fits in usize");
    (0..total).map(move |i| FieldVector::from_index(field, i, len))
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    modulus: u32,
    entries: Vec<u32>,
}

impl FieldMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            modulus: field.0,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, k: usize) -> Self {
        let mut m = Self::zeros(field, k, k);
        for i in 0..k {
            m.entries[i * k + i] = 1;
        }
        m
    }

    /// Builds a `rows.len() x cols` matrix; `cols` is needed for the zero-row case.
    pub fn from_rows(field: PrimeField, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(FieldError::Ragged);
            }
            entries.extend(r.iter().map(|&v| field.elem(v).value));
        }
        Ok(FieldMatrix {
            rows: rows.len(),
            cols,
            modulus: field.0,
            entries,
        })
    }

    pub(crate) fn from_raw(field: PrimeField, rows: usize, cols: usize, entries: Vec<u32>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        FieldMatrix {
            rows,
            cols,
            modulus: field.0,
            entries,
        }
    }

    pub fn field(&self) -> PrimeField {
        PrimeField(self.modulus)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        FieldElement {
            value: self.entries[r * self.cols + c],
            modulus: self.modulus,
        }
    }

    pub fn row(&self, r: usize) -> FieldVector {
        FieldVector {
            modulus: self.modulus,
            entries: self.entries[r * self.cols..(r + 1) * self.cols].to_vec(),
        }
    }

    pub fn row_vectors(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.cols.max(1)).take(self.rows).map(<[u32]>::to_vec).collect()
    }

    /// Row vector times matrix: `a G`.
    pub fn left_mul(&self, a: &FieldVector) -> Result<FieldVector> {
        if a.modulus != self.modulus {
            return Err(FieldError::ModulusMismatch {
                left: a.modulus,
                right: self.modulus,
            });
        }
        if a.len() != self.rows {
            return Err(FieldError::DimensionMismatch {
                expected: self.rows,
                found: a.len(),
            });
        }
        let mut out = vec![0u32; self.cols];
        self.left_mul_into(&a.entries, &mut out);
        Ok(FieldVector {
            modulus: self.modulus,
            entries: out,
        })
    }

    /// `out = a G` on raw residues; lengths are the caller's responsibility.
    #[inline]
    pub(crate) fn left_mul_into(&self, a: &[u32], out: &mut [u32]) {
        let p = self.modulus as u64;
        for (c, o) in out.iter_mut().enumerate() {
            let mut acc = 0u64;
            for (r, &ar) in a.iter().enumerate() {
                acc += ar as u64 * self.entries[r * self.cols + c] as u64;
            }
            *o = (acc % p) as u32;
        }
    }

    /// Row rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let f = self.field();
        let mut m = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(pivot) = (rank..rows).find(|&r| m[r * cols + col] != 0) else {
                continue;
            };
            for c in 0..cols {
                m.swap(pivot * cols + c, rank * cols + c);
            }
            let inv = f.inv(m[rank * cols + col]).expect("nonzero pivot");
            for c in 0..cols {
                m[rank * cols + c] = f.mul(m[rank * cols + c], inv);
            }
            for r in 0..rows {
                if r != rank && m[r * cols + col] != 0 {
                    let factor = m[r * cols + col];
                    for c in 0..cols {
                        let sub = f.mul(factor, m[rank * cols + c]);
                        m[r * cols + c] = f.add(m[r * cols + c], self.modulus - sub);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &FieldVector) -> Result<bool> {
        if v.len() != self.cols {
            return Err(FieldError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&v.entries);
        let stacked = FieldMatrix::from_raw(self.field(), self.rows + 1, self.cols, entries);
        Ok(stacked.rank() == self.rank())
    }
}

/// The multiset `{aG + B : a in F_p^k}`, ordered lexicographically in `a`.
pub fn coset_enumerate(g: &FieldMatrix, shift: &FieldVector) -> Result<Vec<FieldVector>> {
    if shift.len() != g.cols {
        return Err(FieldError::DimensionMismatch {
            expected: g.cols,
            found: shift.len(),
        });
    }
    if shift.modulus != g.modulus {
        return Err(FieldError::ModulusMismatch {
            left: g.modulus,
            right: shift.modulus,
        });
    }
    let f = g.field();
    let mut out = Vec::with_capacity(f.space_size(g.rows).unwrap_or(0));
    let mut buf = vec![0u32; g.cols];
    for a in index_vectors(f, g.rows) {
        g.left_mul_into(&a.entries, &mut buf);
        out.push(FieldVector {
            modulus: g.modulus,
            entries: buf.iter().zip(&shift.entries).map(|(&x, &b)| f.add(x, b)).collect(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeMap, BTreeSet};

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, field: PrimeField, rows: usize, cols: usize) -> FieldMatrix {
        let rs: Vec<Vec<u64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(0..field.order() as u64)).collect())
            .collect();
        FieldMatrix::from_rows(field, cols, &rs).unwrap()
    }

    #[test]
    fn scalar_ops() {
        let a = FieldElement::new(3, 5).unwrap();
        let b = FieldElement::new(4, 5).unwrap();
        assert_eq!(ff_arith(a, b, FieldOp::Add).unwrap().value(), 2);
        assert_eq!(ff_arith(a, b, FieldOp::Inv).unwrap().value(), 2);
        assert_eq!(ff_arith(a, b, FieldOp::Sub).unwrap().value(), 4);
        let zero = FieldElement::new(0, 5).unwrap();
        for x in 0..5 {
            let x = FieldElement::new(x, 5).unwrap();
            assert!(zero.try_mul(x).unwrap().is_zero());
        }
    }

    #[test]
    fn scalar_errors() {
        assert_eq!(FieldElement::new(1, 6), Err(FieldError::NotPrime(6)));
        let a = FieldElement::new(1, 5).unwrap();
        let b = FieldElement::new(1, 7).unwrap();
        assert!(matches!(a.try_add(b), Err(FieldError::ModulusMismatch { .. })));
        assert_eq!(FieldElement::new(0, 5).unwrap().inv(), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn inverses_over_f7() {
        for v in 1..7 {
            let x = FieldElement::new(v, 7).unwrap();
            assert_eq!(x.try_mul(x.inv().unwrap()).unwrap().value(), 1);
        }
    }

    #[test]
    fn vec_mat_small_cases() {
        let f2 = f(2);
        let g = FieldMatrix::from_rows(f2, 2, &[vec![1, 1]]).unwrap();
        let a = FieldVector::new(f2, [1]);
        assert_eq!(g.left_mul(&a).unwrap(), FieldVector::new(f2, [1, 1]));
        let g3 = FieldMatrix::from_rows(f(3), 4, &[vec![1, 2, 0, 1], vec![2, 2, 1, 0]]).unwrap();
        assert!(g3.left_mul(&f(3).zero_vector(2)).unwrap().is_zero());
        assert!(matches!(
            g3.left_mul(&f(3).zero_vector(3)),
            Err(FieldError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn vec_mat_matches_triple_loop() {
        let field = f(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = random_matrix(&mut rng, field, 3, 5);
            let a = FieldVector::new(field, (0..3).map(|_| rng.gen_range(0..3u64)));
            let got = g.left_mul(&a).unwrap();
            for c in 0..5 {
                let mut acc = 0u64;
                for r in 0..3 {
                    acc += a.get(r).value() as u64 * g.get(r, c).value() as u64;
                }
                assert_eq!(got.get(c).value() as u64, acc % 3);
            }
        }
    }

    #[test]
    fn rank_cases() {
        let f5 = f(5);
        assert_eq!(FieldMatrix::identity(f5, 4).rank(), 4);
        assert_eq!(FieldMatrix::zeros(f5, 3, 4).rank(), 0);
        let dup = FieldMatrix::from_rows(f5, 3, &[vec![1, 2, 3], vec![1, 2, 3]]).unwrap();
        assert_eq!(dup.rank(), 1);
        let scaled = FieldMatrix::from_rows(f5, 3, &[vec![1, 2, 3], vec![2, 4, 1]]).unwrap();
        assert_eq!(scaled.rank(), 1);
    }

    #[test]
    fn coset_small_cases() {
        let f2 = f(2);
        let g = FieldMatrix::from_rows(f2, 2, &[vec![1, 1]]).unwrap();
        let c = coset_enumerate(&g, &FieldVector::new(f2, [0, 1])).unwrap();
        assert_eq!(c, vec![FieldVector::new(f2, [0, 1]), FieldVector::new(f2, [1, 0])]);

        let f3 = f(3);
        let all = coset_enumerate(&FieldMatrix::identity(f3, 2), &f3.zero_vector(2)).unwrap();
        let expect: Vec<_> = index_vectors(f3, 2).collect();
        assert_eq!(all, expect);
    }

    #[test]
    fn coset_rank_deficient_multiplicity() {
        let f2 = f(2);
        let g = FieldMatrix::from_rows(f2, 3, &[vec![1, 0, 1], vec![1, 0, 1]]).unwrap();
        let shift = FieldVector::new(f2, [0, 1, 1]);
        let c = coset_enumerate(&g, &shift).unwrap();
        assert_eq!(c.len(), 4);
        // exhaustive oracle: count every aG+B directly
        let mut counts = BTreeMap::new();
        for a0 in 0..2u32 {
            for a1 in 0..2u32 {
                let w: Vec<u32> = (0..3)
                    .map(|col| {
                        (a0 * g.get(0, col).value() + a1 * g.get(1, col).value() + shift.get(col).value()) % 2
                    })
                    .collect();
                *counts.entry(w).or_insert(0) += 1;
            }
        }
        assert_eq!(counts.len(), 2);
        assert!(counts.values().all(|&v| v == 2));
        for w in &c {
            assert_eq!(counts[&w.residues().to_vec()], 2);
        }
    }

    #[test]
    fn cosets_partition_space() {
        let field = f(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = loop {
            let g = random_matrix(&mut rng, field, 2, 3);
            if g.rank() == 2 {
                break g;
            }
        };
        let mut seen: BTreeMap<FieldVector, BTreeSet<FieldVector>> = BTreeMap::new();
        for b in index_vectors(field, 3) {
            let set: BTreeSet<_> = coset_enumerate(&g, &b).unwrap().into_iter().collect();
            assert_eq!(set.len(), 9);
            seen.insert(b, set);
        }
        let sets: Vec<_> = seen.values().collect();
        for s in &sets {
            for t in &sets {
                assert!(s == t || s.is_disjoint(t));
            }
        }
        let distinct: BTreeSet<_> = sets.iter().map(|s| (*s).clone()).collect();
        assert_eq!(distinct.len(), 3);
        let union: BTreeSet<_> = distinct.iter().flatten().cloned().collect();
        assert_eq!(union.len(), 27);
    }

    #[test]
    fn index_round_trip() {
        let field = f(5);
        for i in 0..125 {
            assert_eq!(FieldVector::from_index(field, i, 3).to_index(), i);
        }
        assert_eq!(FieldVector::from_index(field, 7, 3).residues(), &[0, 1, 2]);
    }

    #[test]
    fn row_space_membership() {
        let f2 = f(2);
        let g = FieldMatrix::from_rows(f2, 3, &[vec![1, 1, 0]]).unwrap();
        assert!(g.row_space_contains(&FieldVector::new(f2, [1, 1, 0])).unwrap());
        assert!(g.row_space_contains(&f2.zero_vector(3)).unwrap());
        assert!(!g.row_space_contains(&FieldVector::new(f2, [1, 0, 0])).unwrap());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        proptest! {
            #[test]
            fn left_mul_is_linear(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 5, 7])) {
                let field = f(p);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let g = random_matrix(&mut rng, field, 3, 4);
                let a = FieldVector::new(field, (0..3).map(|_| rng.gen_range(0..p as u64)));
                let b = FieldVector::new(field, (0..3).map(|_| rng.gen_range(0..p as u64)));
                let lhs = g.left_mul(&a.try_add(&b).unwrap()).unwrap();
                let rhs = g.left_mul(&a).unwrap().try_add(&g.left_mul(&b).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn coset_size_is_p_to_k(seed in any::<u64>(), k in 0usize..4) {
                let field = f(3);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let g = random_matrix(&mut rng, field, k, 4);
                let b = FieldVector::new(field, (0..4).map(|_| rng.gen_range(0..3u64)));
                prop_assert_eq!(coset_enumerate(&g, &b).unwrap().len(), 3usize.pow(k as u32));
            }
        }
    }
}
