//! Unionized coset codes and the shared-generator codebook ensemble.
//!
//! Both encoders use one `k x n` generator `G`. Encoder `i` owns a shift table
//! `h_i^(mu)` for every common-randomness value `mu`, mapping a bin index
//! `m in F_p^{l_i}` to a shift vector. The codeword with coarse index `a` is
//! `a G + h_i^(mu)(m)`, and bin `m` is the coset `C(G, h_i^(mu)(m))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{coset_enumerate, FieldError, FieldMatrix, FieldVector, PrimeField};

/// Largest codebook (per side and per `mu`) that is enumerated explicitly.
pub const MAX_CODEWORDS: usize = 1 << 24;

#[derive(Debug, Error)]
pub enum UccError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{what} index {index} out of range (< {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("malformed codebook file: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, UccError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::One, Side::Two];

    pub fn index(self) -> usize {
        match self {
            Side::One => 0,
            Side::Two => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub s1: f64,
    pub s2: f64,
    pub r1: f64,
    pub r2: f64,
    pub c1: f64,
    pub c2: f64,
}

/// `(n, k, l_1, l_2, p)` code dimensions plus common-randomness counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UccParams {
    pub n: usize,
    pub p: PrimeField,
    pub k: usize,
    pub l1: usize,
    pub l2: usize,
    /// Number of `mu_1` values.
    #[serde(rename = "N1")]
    pub n1: usize,
    /// Number of `mu_2` values.
    #[serde(rename = "N2")]
    pub n2: usize,
}

impl UccParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(UccError::InvalidParams(s));
        if self.n == 0 {
            return bad("blocklength must be positive".into());
        }
        if self.k > self.n {
            return bad(format!("k = {} exceeds n = {}", self.k, self.n));
        }
        if self.n1 == 0 || self.n2 == 0 {
            return bad("common randomness counts must be at least 1".into());
        }
        for l in [self.l1, self.l2] {
            match self.p.space_size(self.k + l) {
                Some(c) if c <= MAX_CODEWORDS => {}
                _ => return bad(format!("p^(k+l) = {}^{} codewords exceeds the enumeration guard", self.p.order(), self.k + l)),
            }
        }
        if self.p.space_size(self.n).is_none() {
            return bad("p^n overflows".into());
        }
        Ok(())
    }

    pub fn l(&self, side: Side) -> usize {
        match side {
            Side::One => self.l1,
            Side::Two => self.l2,
        }
    }

    pub fn mu_count(&self, side: Side) -> usize {
        match side {
            Side::One => self.n1,
            Side::Two => self.n2,
        }
    }

    pub fn bins(&self, side: Side) -> usize {
        self.p.space_size(self.l(side)).expect("validated")
    }

    pub fn coarse_size(&self) -> usize {
        self.p.space_size(self.k).expect("validated")
    }

    pub fn word_space(&self) -> usize {
        self.p.space_size(self.n).expect("validated")
    }

    pub fn rates(&self) -> Rates {
        let lp = (self.p.order() as f64).log2();
        let n = self.n as f64;
        Rates {
            s1: (self.k + self.l1) as f64 / n * lp,
            s2: (self.k + self.l2) as f64 / n * lp,
            r1: self.l1 as f64 / n * lp,
            r2: self.l2 as f64 / n * lp,
            c1: (self.n1 as f64).log2() / n,
            c2: (self.n2 as f64).log2() / n,
        }
    }
}

pub fn rates(params: &UccParams) -> Rates {
    params.rates()
}

/// One generator shared by both sides plus per-`mu` shift tables.
#[derive(Debug, Clone, PartialEq)]
pub struct UccCodebookPair {
    params: UccParams,
    g: FieldMatrix,
    shifts: [Vec<Vec<FieldVector>>; 2],
    // a G for every coarse index, lexicographic in a
    coarse: Vec<Vec<u32>>,
}

impl UccCodebookPair {
    pub fn new(params: UccParams, g: FieldMatrix, h1: Vec<Vec<FieldVector>>, h2: Vec<Vec<FieldVector>>) -> Result<Self> {
        params.validate()?;
        if g.rows() != params.k || g.cols() != params.n || g.field() != params.p {
            return Err(UccError::Malformed(format!(
                "generator is {}x{} over F_{}, expected {}x{} over F_{}",
                g.rows(),
                g.cols(),
                g.field().order(),
                params.k,
                params.n,
                params.p.order()
            )));
        }
        for (side, table) in Side::BOTH.iter().zip([&h1, &h2]) {
            if table.len() != params.mu_count(*side) {
                return Err(UccError::Malformed(format!("side {:?}: {} shift tables", side, table.len())));
            }
            for row in table {
                if row.len() != params.bins(*side) {
                    return Err(UccError::Malformed(format!("side {:?}: {} shifts per table", side, row.len())));
                }
                if row.iter().any(|v| v.len() != params.n || v.field() != params.p) {
                    return Err(UccError::Malformed("shift vector has wrong length or field".into()));
                }
            }
        }
        let mut coarse = Vec::with_capacity(params.coarse_size());
        let mut buf = vec![0u32; params.n];
        for a in 0..params.coarse_size() {
            let av = FieldVector::from_index(params.p, a, params.k);
            g.left_mul_into(av.residues(), &mut buf);
            coarse.push(buf.clone());
        }
        Ok(UccCodebookPair {
            params,
            g,
            shifts: [h1, h2],
            coarse,
        })
    }

    pub fn params(&self) -> &UccParams {
        &self.params
    }

    pub fn generator(&self) -> &FieldMatrix {
        &self.g
    }

    /// Residues of `a G` for the coarse index of lexicographic rank `a`.
    pub fn coarse_row(&self, a: usize) -> &[u32] {
        &self.coarse[a]
    }

    pub fn shift(&self, side: Side, mu: usize, m: usize) -> &FieldVector {
        &self.shifts[side.index()][mu][m]
    }

    fn check(&self, side: Side, a: usize, m: usize, mu: usize) -> Result<()> {
        let checks = [
            ("coarse", a, self.params.coarse_size()),
            ("bin", m, self.params.bins(side)),
            ("common randomness", mu, self.params.mu_count(side)),
        ];
        for (what, index, bound) in checks {
            if index >= bound {
                return Err(UccError::IndexOutOfRange { what, index, bound });
            }
        }
        Ok(())
    }

    /// Word index (base `p`, lexicographic) of `a G + h(m)`; indices are not checked.
    #[inline]
    pub fn codeword_index(&self, side: Side, a: usize, m: usize, mu: usize) -> usize {
        let p = self.params.p.order();
        let shift = self.shifts[side.index()][mu][m].residues();
        self.coarse[a]
            .iter()
            .zip(shift)
            .fold(0usize, |acc, (&x, &b)| acc * p as usize + ((x + b) % p) as usize)
    }

    /// Codeword `a G + h_side^(mu)(m)` with index vectors given by lexicographic rank.
    pub fn codeword_at(&self, side: Side, a: usize, m: usize, mu: usize) -> Result<FieldVector> {
        self.check(side, a, m, mu)?;
        Ok(FieldVector::from_index(
            self.params.p,
            self.codeword_index(side, a, m, mu),
            self.params.n,
        ))
    }

    pub fn codeword(&self, side: Side, a: &FieldVector, m: &FieldVector, mu: usize) -> Result<FieldVector> {
        let expect = [(a, self.params.k), (m, self.params.l(side))];
        for (v, len) in expect {
            if v.len() != len {
                return Err(FieldError::DimensionMismatch { expected: len, found: v.len() }.into());
            }
            if v.field() != self.params.p {
                return Err(FieldError::ModulusMismatch {
                    left: v.field().order(),
                    right: self.params.p.order(),
                }
                .into());
            }
        }
        self.codeword_at(side, a.to_index(), m.to_index(), mu)
    }

    /// Bin `m`: the full coset `C(G, h(m))` with multiplicity.
    pub fn bin_of(&self, side: Side, m: usize, mu: usize) -> Result<Vec<FieldVector>> {
        self.check(side, 0, m, mu)?;
        Ok(coset_enumerate(&self.g, self.shift(side, mu, m))?)
    }

    /// The composite code: union of all bins, `p^(k+l)` words with multiplicity.
    pub fn composite_code(&self, side: Side, mu: usize) -> Result<Vec<FieldVector>> {
        let mut out = Vec::new();
        for m in 0..self.params.bins(side) {
            out.extend(self.bin_of(side, m, mu)?);
        }
        Ok(out)
    }

    pub fn to_file(&self) -> CodebookFile {
        let dump = |t: &Vec<Vec<FieldVector>>| {
            t.iter()
                .map(|row| row.iter().map(|v| v.residues().to_vec()).collect())
                .collect()
        };
        CodebookFile {
            params: self.params,
            generator: self.g.row_vectors(),
            h1: dump(&self.shifts[0]),
            h2: dump(&self.shifts[1]),
        }
    }

    pub fn from_file(file: &CodebookFile) -> Result<Self> {
        let params = file.params;
        params.validate()?;
        let p = params.p;
        let rows: Vec<Vec<u64>> = file
            .generator
            .iter()
            .map(|r| r.iter().map(|&v| v as u64).collect())
            .collect();
        let g = FieldMatrix::from_rows(p, params.n, &rows)?;
        let load = |t: &Vec<Vec<Vec<u32>>>| -> Vec<Vec<FieldVector>> {
            t.iter()
                .map(|row| {
                    row.iter()
                        .map(|v| FieldVector::new(p, v.iter().map(|&x| x as u64)))
                        .collect()
                })
                .collect()
        };
        Self::new(params, g, load(&file.h1), load(&file.h2))
    }
}

/// JSON dump of a codebook pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookFile {
    pub params: UccParams,
    pub generator: Vec<Vec<u32>>,
    pub h1: Vec<Vec<Vec<u32>>>,
    pub h2: Vec<Vec<Vec<u32>>>,
}

/// Draws `G` and every shift entry i.i.d. uniform on `F_p` from a seeded stream.
///
/// The draw order is: `G` row-major, then `h_1^(mu)` for each `mu` in order,
/// bins lexicographic, then the same for `h_2`.
pub fn sample_codebooks(seed: u64, params: &UccParams) -> Result<UccCodebookPair> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(&mut rng, params)
}

pub fn sample_with<G: Rng>(rng: &mut G, params: &UccParams) -> Result<UccCodebookPair> {
    params.validate()?;
    let p = params.p;
    let q = p.order();
    let g_entries: Vec<u32> = (0..params.k * params.n).map(|_| rng.gen_range(0..q)).collect();
    let g = FieldMatrix::from_raw(p, params.k, params.n, g_entries);
    let mut tables: [Vec<Vec<FieldVector>>; 2] = [Vec::new(), Vec::new()];
    for side in Side::BOTH {
        for _ in 0..params.mu_count(side) {
            let row = (0..params.bins(side))
                .map(|_| FieldVector::new(p, (0..params.n).map(|_| rng.gen_range(0..q) as u64)))
                .collect();
            tables[side.index()].push(row);
        }
    }
    let [h1, h2] = tables;
    UccCodebookPair::new(*params, g, h1, h2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::index_vectors;
    use std::collections::BTreeSet;

    fn params(n: usize, p: u32, k: usize, l: usize, mu: usize) -> UccParams {
        UccParams {
            n,
            p: PrimeField::new(p).unwrap(),
            k,
            l1: l,
            l2: l,
            n1: mu,
            n2: mu,
        }
    }

    #[test]
    fn rates_formulas() {
        let r = params(2, 2, 1, 1, 1).rates();
        assert_eq!((r.s1, r.r1, r.c1), (1.0, 0.5, 0.0));
        assert_eq!(params(4, 2, 2, 0, 4).rates().r2, 0.0);
        assert_eq!(params(4, 2, 2, 0, 4).rates().c2, 0.5);
        let r3 = params(3, 3, 1, 2, 1).rates();
        assert!((r3.s1 - 3f64.log2()).abs() < 1e-15);
        assert!((r3.r1 - 2.0 / 3.0 * 3f64.log2()).abs() < 1e-15);
        assert!((r3.s1 - r3.r1 - 3f64.log2() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_params() {
        assert!(params(2, 2, 3, 1, 1).validate().is_err());
        assert!(params(2, 2, 1, 1, 0).validate().is_err());
        assert!(params(0, 2, 0, 0, 1).validate().is_err());
        assert!(params(40, 2, 20, 20, 1).validate().is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        let pr = params(4, 3, 2, 1, 2);
        assert_eq!(sample_codebooks(9, &pr).unwrap(), sample_codebooks(9, &pr).unwrap());
        assert_ne!(sample_codebooks(9, &pr).unwrap(), sample_codebooks(10, &pr).unwrap());
    }

    #[test]
    fn codeword_structure() {
        let pr = params(5, 3, 2, 1, 2);
        let pair = sample_codebooks(4, &pr).unwrap();
        let f = pr.p;
        let zero = f.zero_vector(2);
        for mu in 0..2 {
            for m in index_vectors(f, 1) {
                let w0 = pair.codeword(Side::Two, &zero, &m, mu).unwrap();
                assert_eq!(&w0, pair.shift(Side::Two, mu, m.to_index()));
                let coset = coset_enumerate(pair.generator(), &w0).unwrap();
                for (pos, a) in index_vectors(f, 2).enumerate() {
                    let w = pair.codeword(Side::Two, &a, &m, mu).unwrap();
                    assert_eq!(w, coset[pos]);
                    for a2 in index_vectors(f, 2) {
                        let sum = a.try_add(&a2).unwrap();
                        let diff = pair
                            .codeword(Side::Two, &sum, &m, mu)
                            .unwrap()
                            .try_sub(&pair.codeword(Side::Two, &a2, &m, mu).unwrap())
                            .unwrap();
                        assert_eq!(diff, pair.generator().left_mul(&a).unwrap());
                    }
                }
            }
        }
        assert!(matches!(
            pair.codeword_at(Side::One, 9, 0, 0),
            Err(UccError::IndexOutOfRange { what: "coarse", .. })
        ));
        assert!(pair.codeword_at(Side::One, 0, 0, 2).is_err());
        assert!(pair.codeword(Side::One, &f.zero_vector(3), &f.zero_vector(1), 0).is_err());
    }

    #[test]
    fn bins_and_composite_code() {
        let pr = params(4, 2, 2, 2, 1);
        for seed in 0..10 {
            let pair = sample_codebooks(seed, &pr).unwrap();
            for side in Side::BOTH {
                let comp = pair.composite_code(side, 0).unwrap();
                assert_eq!(comp.len(), 16);
                for m in 0..4 {
                    let bin = pair.bin_of(side, m, 0).unwrap();
                    assert_eq!(bin, coset_enumerate(pair.generator(), pair.shift(side, 0, m)).unwrap());
                    for m2 in 0..4 {
                        let diff = pair.shift(side, 0, m).try_sub(pair.shift(side, 0, m2)).unwrap();
                        if !pair.generator().row_space_contains(&diff).unwrap() {
                            let a: BTreeSet<_> = bin.iter().collect();
                            let other = pair.bin_of(side, m2, 0).unwrap();
                            assert!(other.iter().all(|w| !a.contains(w)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_coarse_code() {
        let pr = params(3, 2, 0, 1, 1);
        let pair = sample_codebooks(1, &pr).unwrap();
        for m in 0..2 {
            assert_eq!(pair.bin_of(Side::One, m, 0).unwrap(), vec![pair.shift(Side::One, 0, m).clone()]);
        }
    }

    #[test]
    fn file_round_trip() {
        let pr = params(3, 5, 1, 1, 3);
        let pair = sample_codebooks(77, &pr).unwrap();
        let json = serde_json::to_string(&pair.to_file()).unwrap();
        let back = UccCodebookPair::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, pair);
    }
}
