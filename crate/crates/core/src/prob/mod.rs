//! Finite probability tables, Shannon quantities in bits, total variation,
//! i.i.d. extension and letter typicality.

mod info;
pub mod typical;
pub mod words;

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::scalar::Real;

pub use info::{binary_entropy, half_l1, total_variation};
pub use typical::{CondTypicalSet, TypicalSet};

/// Default cap on the number of entries of any explicitly enumerated table.
pub const DEFAULT_BUDGET: usize = 100_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbError {
    #[error("length mismatch: {expected} symbols but {found} probabilities")]
    Length { expected: usize, found: usize },
    #[error("negative probability {value} at index {index}")]
    Negative { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, outside 1 +/- 1e-9")]
    NotNormalized { sum: f64 },
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    #[error("malformed variable partition: {0}")]
    BadPartition(String),
    #[error("enumeration budget exceeded: {needed} entries > {budget}")]
    Budget { needed: usize, budget: usize },
    #[error("value {0} out of range")]
    OutOfRange(f64),
    #[error("empty alphabet")]
    Empty,
}

pub type Result<T> = std::result::Result<T, ProbError>;

fn normalize<R: Real>(probs: &mut [R]) -> Result<()> {
    for (index, p) in probs.iter().enumerate() {
        if !(*p >= R::zero()) {
            return Err(ProbError::Negative {
                index,
                value: p.as_f64(),
            });
        }
    }
    let sum: R = probs.iter().copied().sum();
    let tol = R::lit(1e-9).max(R::epsilon() * R::from_count(8 * probs.len().max(1)));
    if (sum - R::one()).abs() > tol {
        return Err(ProbError::NotNormalized { sum: sum.as_f64() });
    }
    for p in probs.iter_mut() {
        *p = *p / sum;
    }
    Ok(())
}

fn default_alphabet(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

fn check_budget(needed: Option<usize>, budget: usize) -> Result<usize> {
    match needed {
        Some(n) if n <= budget => Ok(n),
        Some(n) => Err(ProbError::Budget { needed: n, budget }),
        None => Err(ProbError::Budget {
            needed: usize::MAX,
            budget,
        }),
    }
}

/// A PMF over an ordered finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<R> {
    alphabet: Vec<String>,
    probs: Vec<R>,
}

impl<R: Real> Pmf<R> {
    /// Validates nonnegativity and normalization (1e-9), then renormalizes.
    pub fn new(alphabet: Vec<String>, mut probs: Vec<R>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(ProbError::Empty);
        }
        if alphabet.len() != probs.len() {
            return Err(ProbError::Length {
                expected: alphabet.len(),
                found: probs.len(),
            });
        }
        normalize(&mut probs)?;
        Ok(Pmf { alphabet, probs })
    }

    /// PMF over the alphabet `"0", "1", ...`.
    pub fn from_probs(probs: Vec<R>) -> Result<Self> {
        Self::new(default_alphabet(probs.len()), probs)
    }

    pub fn uniform(k: usize) -> Self {
        let v = R::one() / R::from_count(k);
        Pmf {
            alphabet: default_alphabet(k),
            probs: vec![v; k],
        }
    }

    pub fn point_mass(k: usize, at: usize) -> Self {
        let mut probs = vec![R::zero(); k];
        probs[at] = R::one();
        Pmf {
            alphabet: default_alphabet(k),
            probs,
        }
    }

    pub fn bernoulli(t: R) -> Result<Self> {
        if !(t >= R::zero() && t <= R::one()) {
            return Err(ProbError::OutOfRange(t.as_f64()));
        }
        Ok(Pmf {
            alphabet: default_alphabet(2),
            probs: vec![R::one() - t, t],
        })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn probs(&self) -> &[R] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, i: usize) -> R {
        self.probs[i]
    }

    pub fn entropy(&self) -> R {
        -self.probs.iter().map(|p| p.xlog2x()).sum::<R>()
    }

    /// `p^n(word)`.
    pub fn word_prob(&self, word: &[usize]) -> R {
        word.iter().map(|&s| self.probs[s]).fold(R::one(), |a, b| a * b)
    }

    /// The i.i.d. extension over words of length `n`, in lexicographic order.
    pub fn product_extend(&self, n: usize, budget: usize) -> Result<Pmf<R>> {
        if n == 0 {
            return Err(ProbError::OutOfRange(0.0));
        }
        let total = check_budget(words::word_count(self.len(), n), budget)?;
        let mut alphabet = Vec::with_capacity(total);
        let mut probs = Vec::with_capacity(total);
        for w in words::all_words(self.len(), n) {
            alphabet.push(words::label(&self.alphabet, &w));
            probs.push(self.word_prob(&w));
        }
        Ok(Pmf { alphabet, probs })
    }

    pub fn convert<S: Real>(&self) -> Pmf<S> {
        Pmf {
            alphabet: self.alphabet.clone(),
            probs: self.probs.iter().map(|p| S::lit(p.as_f64())).collect(),
        }
    }

    pub fn to_file(&self) -> PmfFile {
        PmfFile {
            alphabets: vec![self.alphabet.clone()],
            probs: self.probs.iter().map(|p| p.as_f64()).collect(),
        }
    }

    pub fn from_file(file: &PmfFile) -> Result<Self> {
        if file.alphabets.len() != 1 {
            return Err(ProbError::BadPartition(format!(
                "expected one alphabet, found {}",
                file.alphabets.len()
            )));
        }
        Self::new(
            file.alphabets[0].clone(),
            file.probs.iter().map(|&p| R::lit(p)).collect(),
        )
    }
}

/// A joint PMF over a product of finite alphabets, stored row-major
/// (last variable fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf<R> {
    alphabets: Vec<Vec<String>>,
    probs: Vec<R>,
}

impl<R: Real> JointPmf<R> {
    pub fn new(alphabets: Vec<Vec<String>>, mut probs: Vec<R>) -> Result<Self> {
        if alphabets.is_empty() || alphabets.iter().any(Vec::is_empty) {
            return Err(ProbError::Empty);
        }
        let size: usize = alphabets.iter().map(Vec::len).product();
        if size != probs.len() {
            return Err(ProbError::Length {
                expected: size,
                found: probs.len(),
            });
        }
        normalize(&mut probs)?;
        Ok(JointPmf { alphabets, probs })
    }

    /// Builds a table from a function of the multi-index.
    pub fn from_fn(sizes: &[usize], f: impl Fn(&[usize]) -> R) -> Result<Self> {
        let alphabets: Vec<Vec<String>> = sizes.iter().map(|&k| default_alphabet(k)).collect();
        let total: usize = sizes.iter().product();
        let mut idx = vec![0; sizes.len()];
        let mut probs = Vec::with_capacity(total);
        for flat in 0..total {
            unflatten(flat, sizes, &mut idx);
            probs.push(f(&idx));
        }
        Self::new(alphabets, probs)
    }

    pub(crate) fn from_parts_unchecked(alphabets: Vec<Vec<String>>, probs: Vec<R>) -> Self {
        debug_assert_eq!(alphabets.iter().map(Vec::len).product::<usize>(), probs.len());
        JointPmf { alphabets, probs }
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.alphabets.iter().map(Vec::len).collect()
    }

    pub fn num_vars(&self) -> usize {
        self.alphabets.len()
    }

    pub fn probs(&self) -> &[R] {
        &self.probs
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.alphabets)
            .fold(0, |acc, (&i, a)| acc * a.len() + i)
    }

    pub fn prob(&self, idx: &[usize]) -> R {
        self.probs[self.flat_index(idx)]
    }

    /// Visits every cell with its multi-index.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], R)) {
        let sizes = self.sizes();
        let mut idx = vec![0; sizes.len()];
        for (flat, &p) in self.probs.iter().enumerate() {
            unflatten(flat, &sizes, &mut idx);
            f(&idx, p);
        }
    }

    fn check_vars(&self, vars: &[usize]) -> Result<()> {
        if let Some(&v) = vars.iter().find(|&&v| v >= self.num_vars()) {
            return Err(ProbError::BadPartition(format!(
                "variable {v} out of range for {} variables",
                self.num_vars()
            )));
        }
        Ok(())
    }

    /// Marginal on `vars`, in the given order. Repeated variables are rejected.
    pub fn marginal(&self, vars: &[usize]) -> Result<JointPmf<R>> {
        self.check_vars(vars)?;
        let mut seen = vec![false; self.num_vars()];
        for &v in vars {
            if std::mem::replace(&mut seen[v], true) {
                return Err(ProbError::BadPartition(format!("variable {v} repeated")));
            }
        }
        if vars.is_empty() {
            return Err(ProbError::BadPartition("empty marginal".into()));
        }
        let out_sizes: Vec<usize> = vars.iter().map(|&v| self.alphabets[v].len()).collect();
        let mut out = vec![R::zero(); out_sizes.iter().product()];
        self.for_each(|idx, p| {
            let o = vars.iter().fold(0, |acc, &v| acc * self.alphabets[v].len() + idx[v]);
            out[o] = out[o] + p;
        });
        Ok(JointPmf {
            alphabets: vars.iter().map(|&v| self.alphabets[v].clone()).collect(),
            probs: out,
        })
    }

    /// Joint entropy of a set of variables (duplicates collapse). `H(empty) = 0`.
    pub fn entropy_of(&self, vars: &[usize]) -> Result<R> {
        self.check_vars(vars)?;
        let mut set: Vec<usize> = vars.to_vec();
        set.sort_unstable();
        set.dedup();
        if set.is_empty() {
            return Ok(R::zero());
        }
        let m = self.marginal(&set)?;
        Ok(-m.probs.iter().map(|p| p.xlog2x()).sum::<R>())
    }

    pub fn entropy(&self) -> R {
        -self.probs.iter().map(|p| p.xlog2x()).sum::<R>()
    }

    /// `H(A | C)`.
    pub fn cond_entropy(&self, a: &[usize], given: &[usize]) -> Result<R> {
        if a.is_empty() {
            return Err(ProbError::BadPartition("empty target set".into()));
        }
        let joint: Vec<usize> = a.iter().chain(given).copied().collect();
        Ok(self.entropy_of(&joint)? - self.entropy_of(given)?)
    }

    /// `I(A ; B | C)`.
    pub fn mutual_information(&self, a: &[usize], b: &[usize], given: &[usize]) -> Result<R> {
        if a.is_empty() || b.is_empty() {
            return Err(ProbError::BadPartition("empty side of mutual information".into()));
        }
        let ac: Vec<usize> = a.iter().chain(given).copied().collect();
        let bc: Vec<usize> = b.iter().chain(given).copied().collect();
        let abc: Vec<usize> = a.iter().chain(b).chain(given).copied().collect();
        Ok(self.entropy_of(&ac)? + self.entropy_of(&bc)? - self.entropy_of(&abc)? - self.entropy_of(given)?)
    }

    /// Appends a variable that is a deterministic function of the others.
    pub fn with_function(&self, alphabet: Vec<String>, f: impl Fn(&[usize]) -> usize) -> JointPmf<R> {
        let k = alphabet.len();
        let mut probs = vec![R::zero(); self.probs.len() * k];
        self.for_each(|idx, p| {
            let flat = self.flat_index(idx);
            probs[flat * k + f(idx)] = p;
        });
        let mut alphabets = self.alphabets.clone();
        alphabets.push(alphabet);
        JointPmf { alphabets, probs }
    }

    /// Component-wise i.i.d. extension: variable `i` of the result ranges over
    /// length-`n` words of variable `i`.
    pub fn product_extend(&self, n: usize, budget: usize) -> Result<JointPmf<R>> {
        if n == 0 {
            return Err(ProbError::OutOfRange(0.0));
        }
        let sizes = self.sizes();
        let word_sizes: Vec<Option<usize>> = sizes.iter().map(|&s| words::word_count(s, n)).collect();
        let total = word_sizes
            .iter()
            .try_fold(1usize, |acc, s| s.and_then(|s| acc.checked_mul(s)));
        check_budget(total, budget)?;
        let word_sizes: Vec<usize> = word_sizes.into_iter().map(Option::unwrap).collect();
        let alphabets: Vec<Vec<String>> = self
            .alphabets
            .iter()
            .map(|a| words::all_words(a.len(), n).map(|w| words::label(a, &w)).collect())
            .collect();
        let total = total.unwrap();
        let mut probs = Vec::with_capacity(total);
        let mut outer = vec![0usize; sizes.len()];
        let mut letters = vec![vec![0usize; n]; sizes.len()];
        let mut cell = vec![0usize; sizes.len()];
        for flat in 0..total {
            unflatten(flat, &word_sizes, &mut outer);
            for (v, w) in outer.iter().enumerate() {
                let mut i = *w;
                words::decode_into(&mut i, sizes[v], &mut letters[v]);
            }
            let mut prob = R::one();
            for t in 0..n {
                for v in 0..sizes.len() {
                    cell[v] = letters[v][t];
                }
                prob = prob * self.prob(&cell);
            }
            probs.push(prob);
        }
        Ok(JointPmf { alphabets, probs })
    }

    /// Flattens to a single-variable PMF with tuple labels.
    pub fn to_pmf(&self) -> Pmf<R> {
        let mut alphabet = Vec::with_capacity(self.probs.len());
        self.for_each(|idx, _| {
            let parts: Vec<&str> = idx.iter().zip(&self.alphabets).map(|(&i, a)| a[i].as_str()).collect();
            alphabet.push(parts.join(","));
        });
        Pmf {
            alphabet,
            probs: self.probs.clone(),
        }
    }

    pub fn convert<S: Real>(&self) -> JointPmf<S> {
        JointPmf {
            alphabets: self.alphabets.clone(),
            probs: self.probs.iter().map(|p| S::lit(p.as_f64())).collect(),
        }
    }

    pub fn to_file(&self) -> PmfFile {
        PmfFile {
            alphabets: self.alphabets.clone(),
            probs: self.probs.iter().map(|p| p.as_f64()).collect(),
        }
    }

    pub fn from_file(file: &PmfFile) -> Result<Self> {
        Self::new(
            file.alphabets.clone(),
            file.probs.iter().map(|&p| R::lit(p)).collect(),
        )
    }
}

pub(crate) fn unflatten(mut flat: usize, sizes: &[usize], out: &mut [usize]) {
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = flat % s;
        flat /= s;
    }
}

/// A conditional PMF `p(y|x)`: one normalized row per input symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct CondPmf<R> {
    inputs: Vec<String>,
    outputs: Vec<String>,
    rows: Vec<Vec<R>>,
}

impl<R: Real> CondPmf<R> {
    pub fn new(inputs: Vec<String>, outputs: Vec<String>, mut rows: Vec<Vec<R>>) -> Result<Self> {
        if inputs.is_empty() || outputs.is_empty() {
            return Err(ProbError::Empty);
        }
        if rows.len() != inputs.len() {
            return Err(ProbError::Length {
                expected: inputs.len(),
                found: rows.len(),
            });
        }
        for row in &mut rows {
            if row.len() != outputs.len() {
                return Err(ProbError::Length {
                    expected: outputs.len(),
                    found: row.len(),
                });
            }
            normalize(row)?;
        }
        Ok(CondPmf { inputs, outputs, rows })
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self> {
        let outs = rows.first().map_or(0, Vec::len);
        Self::new(default_alphabet(rows.len()), default_alphabet(outs), rows)
    }

    /// Binary symmetric channel with crossover `t`.
    pub fn bsc(t: R) -> Result<Self> {
        if !(t >= R::zero() && t <= R::one()) {
            return Err(ProbError::OutOfRange(t.as_f64()));
        }
        Self::from_rows(vec![vec![R::one() - t, t], vec![t, R::one() - t]])
    }

    /// Additive noise channel on `Z_p`: `y = x + noise`.
    pub fn additive(noise: &Pmf<R>) -> Self {
        let p = noise.len();
        let rows = (0..p)
            .map(|x| (0..p).map(|y| noise.prob((y + p - x) % p)).collect())
            .collect();
        CondPmf {
            inputs: default_alphabet(p),
            outputs: default_alphabet(p),
            rows,
        }
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn rows(&self) -> &[Vec<R>] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &[R] {
        &self.rows[x]
    }

    pub fn prob(&self, y: usize, x: usize) -> R {
        self.rows[x][y]
    }

    /// `p^n(y^n | x^n)`.
    pub fn word_prob(&self, y: &[usize], x: &[usize]) -> R {
        x.iter()
            .zip(y)
            .map(|(&a, &b)| self.rows[a][b])
            .fold(R::one(), |acc, v| acc * v)
    }

    pub fn product_extend(&self, n: usize, budget: usize) -> Result<CondPmf<R>> {
        if n == 0 {
            return Err(ProbError::OutOfRange(0.0));
        }
        let ni = words::word_count(self.inputs.len(), n);
        let no = words::word_count(self.outputs.len(), n);
        check_budget(ni.zip(no).and_then(|(a, b)| a.checked_mul(b)), budget)?;
        let inputs: Vec<String> = words::all_words(self.inputs.len(), n)
            .map(|w| words::label(&self.inputs, &w))
            .collect();
        let outputs: Vec<String> = words::all_words(self.outputs.len(), n)
            .map(|w| words::label(&self.outputs, &w))
            .collect();
        let rows = words::all_words(self.inputs.len(), n)
            .map(|x| {
                words::all_words(self.outputs.len(), n)
                    .map(|y| self.word_prob(&y, &x))
                    .collect()
            })
            .collect();
        Ok(CondPmf { inputs, outputs, rows })
    }

    /// `p(x) p(y|x)` as a two-variable joint (X, Y).
    pub fn joint_with(&self, input: &Pmf<R>) -> Result<JointPmf<R>> {
        if input.len() != self.inputs.len() {
            return Err(ProbError::AlphabetMismatch);
        }
        let mut probs = Vec::with_capacity(self.inputs.len() * self.outputs.len());
        for (x, row) in self.rows.iter().enumerate() {
            probs.extend(row.iter().map(|&q| input.prob(x) * q));
        }
        Ok(JointPmf {
            alphabets: vec![self.inputs.clone(), self.outputs.clone()],
            probs,
        })
    }

    pub fn to_file(&self) -> CondPmfFile {
        CondPmfFile {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|p| p.as_f64()).collect())
                .collect(),
        }
    }

    pub fn from_file(file: &CondPmfFile) -> Result<Self> {
        Self::new(
            file.inputs.clone(),
            file.outputs.clone(),
            file.rows
                .iter()
                .map(|r| r.iter().map(|&p| R::lit(p)).collect())
                .collect(),
        )
    }
}

fn symbols<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<String>, D::Error> {
    let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
    Ok(raw
        .into_iter()
        .map(|v| match v {
            serde_json::Value::String(s) => s,
            other => other.to_string(),
        })
        .collect())
}

fn symbol_lists<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<String>>, D::Error> {
    #[derive(Deserialize)]
    struct Wrap(#[serde(deserialize_with = "symbols")] Vec<String>);
    let raw: Vec<Wrap> = Vec::deserialize(d)?;
    Ok(raw.into_iter().map(|w| w.0).collect())
}

/// On-disk PMF: `{ "alphabets": [[...], ...], "probs": [row-major] }`.
/// Symbols may be JSON strings or numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfFile {
    #[serde(deserialize_with = "symbol_lists")]
    pub alphabets: Vec<Vec<String>>,
    pub probs: Vec<f64>,
}

/// On-disk conditional PMF: `{ "inputs": [...], "outputs": [...], "rows": [[...]] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondPmfFile {
    #[serde(deserialize_with = "symbols")]
    pub inputs: Vec<String>,
    #[serde(deserialize_with = "symbols")]
    pub outputs: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(matches!(
            Pmf::<f64>::from_probs(vec![0.5, 0.6]),
            Err(ProbError::NotNormalized { .. })
        ));
        assert!(matches!(
            Pmf::<f64>::from_probs(vec![1.5, -0.5]),
            Err(ProbError::Negative { .. })
        ));
        let p = Pmf::<f64>::from_probs(vec![0.5 + 4e-10, 0.5]).unwrap();
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(JointPmf::<f64>::new(vec![vec!["a".into()], vec!["b".into(), "c".into()]], vec![1.0]).is_err());
    }

    #[test]
    fn product_extend_bernoulli() {
        let p = Pmf::<f64>::bernoulli(0.3).unwrap();
        assert_eq!(p.product_extend(1, 10).unwrap(), p);
        let p2 = p.product_extend(2, 10).unwrap();
        assert_eq!(p2.alphabet(), &["00", "01", "10", "11"]);
        let expect = [0.49, 0.21, 0.21, 0.09];
        for (a, b) in p2.probs().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(p.product_extend(10, 100), Err(ProbError::Budget { .. })));
    }

    #[test]
    fn product_extend_normalizes_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let k = rng.gen_range(2..5);
            let raw: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 0.01).collect();
            let s: f64 = raw.iter().sum();
            let p = Pmf::from_probs(raw.iter().map(|v| v / s).collect()).unwrap();
            let n = rng.gen_range(1..5);
            let total: f64 = p.product_extend(n, 10_000).unwrap().probs().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_product_extend_layout() {
        // X ~ Bern(0.3), Y = X
        let j = JointPmf::<f64>::from_fn(&[2, 2], |i| if i[0] == i[1] { [0.7, 0.3][i[0]] } else { 0.0 }).unwrap();
        let j2 = j.product_extend(2, 100).unwrap();
        assert_eq!(j2.sizes(), vec![4, 4]);
        // x = 01, y = 01
        assert!((j2.prob(&[1, 1]) - 0.21).abs() < 1e-12);
        assert_eq!(j2.prob(&[1, 2]), 0.0);
        let total: f64 = j2.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cond_product_extend_rows_normalized() {
        let c = CondPmf::<f64>::bsc(0.2).unwrap();
        let c3 = c.product_extend(3, 100).unwrap();
        for row in c3.rows() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!((c3.prob(0, 7) - 0.008).abs() < 1e-12);
    }

    #[test]
    fn marginal_and_function() {
        let j = JointPmf::<f64>::from_fn(&[2, 3], |i| (1 + i[0] + i[1]) as f64 / 15.0).unwrap();
        let m = j.marginal(&[1]).unwrap();
        assert_eq!(m.sizes(), vec![3]);
        assert!((m.probs()[0] - 3.0 / 15.0).abs() < 1e-12);
        let z = j.with_function(vec!["0".into(), "1".into(), "2".into()], |i| (i[0] + i[1]) % 3);
        assert_eq!(z.num_vars(), 3);
        assert!((z.marginal(&[0, 1]).unwrap().probs()[4] - j.probs()[4]).abs() < 1e-15);
        assert!(j.marginal(&[0, 0]).is_err());
        assert!(j.marginal(&[2]).is_err());
    }

    #[test]
    fn file_round_trip_with_numeric_symbols() {
        let raw = r#"{"alphabets": [[0, 1], ["a", "b"]], "probs": [0.1, 0.2, 0.3, 0.4]}"#;
        let file: PmfFile = serde_json::from_str(raw).unwrap();
        let j = JointPmf::<f64>::from_file(&file).unwrap();
        assert_eq!(j.alphabets()[0], vec!["0", "1"]);
        let back: PmfFile = serde_json::from_str(&serde_json::to_string(&j.to_file()).unwrap()).unwrap();
        assert_eq!(back, j.to_file());
        let craw = r#"{"inputs": [0, 1], "outputs": [0, 1], "rows": [[0.9, 0.1], [0.1, 0.9]]}"#;
        let c = CondPmf::<f64>::from_file(&serde_json::from_str(craw).unwrap()).unwrap();
        assert_eq!(c, CondPmf::bsc(0.1).unwrap());
    }

    #[test]
    fn f32_tables() {
        let p = Pmf::<f32>::bernoulli(0.25).unwrap();
        assert!((p.entropy() - 0.811_278).abs() < 1e-5);
        let c: Pmf<f64> = p.convert();
        assert!((c.prob(1) - 0.25).abs() < 1e-7);
    }
}
