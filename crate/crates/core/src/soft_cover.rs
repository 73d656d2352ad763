//! Soft covering under a change of measure.
//!
//! Codewords are drawn from `q^n` on an extended alphabet and each is
//! reweighted by the importance ratio `p^n(x)/q^n(x)`; the mixture
//! `(1/M) Σ_m ratio(m) p^n(y | x(m))` approximates `p^n_Y` once the rate
//! exceeds `I_p(X;Y) - H_p(X) + H_q(X)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldMatrix, FieldVector, PrimeField};
use crate::prob::{self, half_l1, words, JointPmf, Pmf, ProbError};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum SoftCoverError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("codeword {index} has zero sampling probability")]
    ZeroQ { index: usize },
    #[error("coset codebooks need a prime alphabet size and uniform q, {0}")]
    CosetMode(String),
}

pub type Result<T> = std::result::Result<T, SoftCoverError>;

/// `p_{XY}` over an extended alphabet, a sampling PMF `q_X`, a rate and a blocklength.
#[derive(Debug, Clone)]
pub struct ChangeOfMeasureInstance<R> {
    joint: JointPmf<R>,
    q: Pmf<R>,
    rate: f64,
    n: usize,
    px: Pmf<R>,
    py: Pmf<R>,
    // p(y | x) rows; rows for x outside the support of p are all zero
    channel: Vec<Vec<R>>,
}

impl<R: Real> ChangeOfMeasureInstance<R> {
    pub fn new(joint: JointPmf<R>, q: Pmf<R>, rate: f64, n: usize) -> Result<Self> {
        if joint.num_vars() != 2 {
            return Err(SoftCoverError::Invalid("joint must be over (X, Y)".into()));
        }
        let sizes = joint.sizes();
        if q.len() != sizes[0] {
            return Err(SoftCoverError::Invalid(format!(
                "q has {} symbols, X has {}",
                q.len(),
                sizes[0]
            )));
        }
        if n == 0 || !(rate.is_finite() && rate >= 0.0) {
            return Err(SoftCoverError::Invalid("need n > 0 and a finite rate >= 0".into()));
        }
        let xm = joint.marginal(&[0])?;
        let ym = joint.marginal(&[1])?;
        let px = Pmf::new(xm.alphabets()[0].clone(), xm.probs().to_vec())?;
        let py = Pmf::new(ym.alphabets()[0].clone(), ym.probs().to_vec())?;
        for (x, (&pq, &pp)) in q.probs().iter().zip(px.probs()).enumerate() {
            if pq == R::zero() && pp > R::zero() {
                return Err(SoftCoverError::Invalid(format!(
                    "p_X is not absolutely continuous w.r.t. q_X at symbol {x}"
                )));
            }
        }
        let channel = (0..sizes[0])
            .map(|x| {
                let px_x = px.prob(x);
                (0..sizes[1])
                    .map(|y| {
                        if px_x > R::zero() {
                            joint.prob(&[x, y]) / px_x
                        } else {
                            R::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(ChangeOfMeasureInstance {
            joint,
            q,
            rate,
            n,
            px,
            py,
            channel,
        })
    }

    /// The same instance at another rate and blocklength.
    pub fn at(&self, rate: f64, n: usize) -> Result<Self> {
        Self::new(self.joint.clone(), self.q.clone(), rate, n)
    }

    pub fn joint(&self) -> &JointPmf<R> {
        &self.joint
    }

    pub fn q(&self) -> &Pmf<R> {
        &self.q
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn blocklength(&self) -> usize {
        self.n
    }

    /// `M = ⌈2^{nR}⌉`.
    pub fn codebook_size(&self) -> usize {
        codebook_size(self.rate, self.n)
    }

    pub fn threshold(&self) -> R {
        threshold_rate(&self.joint, &self.q).expect("validated instance")
    }

    /// `p^n_Y` as a flat table over `Y^n`.
    pub fn output_product(&self, budget: usize) -> Result<Vec<R>> {
        Ok(self.py.product_extend(self.n, budget)?.probs().to_vec())
    }

    fn ratio(&self, word: &[usize]) -> R {
        word.iter()
            .map(|&x| self.px.prob(x) / self.q.prob(x))
            .fold(R::one(), |a, b| a * b)
    }

    /// Adds `weight · p^n(· | x)` into `out` (length `|Y|^n`).
    fn accumulate(&self, word: &[usize], weight: R, out: &mut [R], scratch: &mut Vec<R>) {
        let ky = self.py.len();
        scratch.clear();
        scratch.push(weight);
        for &x in word {
            let row = &self.channel[x];
            let prev = std::mem::take(scratch);
            scratch.reserve(prev.len() * ky);
            for v in prev {
                scratch.extend(row.iter().map(|&r| v * r));
            }
        }
        out.iter_mut().zip(scratch.iter()).for_each(|(o, &s)| *o = *o + s);
    }
}

/// `⌈2^{nR}⌉`, treating values within `1e-9` of an integer as that integer.
pub fn codebook_size(rate: f64, n: usize) -> usize {
    let m = (n as f64 * rate).exp2();
    let r = m.round();
    let m = if (m - r).abs() <= 1e-9 * r.max(1.0) { r } else { m.ceil() };
    (m as usize).max(1)
}

/// `I_p(X;Y) - H_p(X) + H_q(X)`, equivalently `H_q(X) - H_p(X|Y)`.
pub fn threshold_rate<R: Real>(joint: &JointPmf<R>, q: &Pmf<R>) -> Result<R> {
    if joint.num_vars() != 2 || q.len() != joint.sizes()[0] {
        return Err(SoftCoverError::Invalid("need p_XY and q_X on the same X alphabet".into()));
    }
    let i = joint.mutual_information(&[0], &[1], &[])?;
    let hx = joint.entropy_of(&[0])?;
    Ok(i - hx + q.entropy())
}

/// The importance-weighted mixture over `Y^n` and its total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture<R> {
    pub probs: Vec<R>,
    pub mass: R,
}

/// `(1/M) Σ_m (p^n(x_m)/q^n(x_m)) p^n(y | x_m)` for the given codebook.
pub fn approx_output_pmf<R: Real>(inst: &ChangeOfMeasureInstance<R>, codebook: &[Vec<usize>]) -> Result<Mixture<R>> {
    approx_output_pmf_with_budget(inst, codebook, prob::DEFAULT_BUDGET)
}

pub fn approx_output_pmf_with_budget<R: Real>(
    inst: &ChangeOfMeasureInstance<R>,
    codebook: &[Vec<usize>],
    budget: usize,
) -> Result<Mixture<R>> {
    let ky = inst.py.len();
    let ny = match words::word_count(ky, inst.n) {
        Some(v) if v <= budget => v,
        other => {
            return Err(ProbError::Budget {
                needed: other.unwrap_or(usize::MAX),
                budget,
            }
            .into())
        }
    };
    let kx = inst.q.len();
    for (index, w) in codebook.iter().enumerate() {
        if w.len() != inst.n || w.iter().any(|&x| x >= kx) {
            return Err(SoftCoverError::Invalid(format!("codeword {index} is not a length-{} word", inst.n)));
        }
        if w.iter().any(|&x| inst.q.prob(x) == R::zero()) {
            return Err(SoftCoverError::ZeroQ { index });
        }
    }
    let mut probs = vec![R::zero(); ny];
    if codebook.is_empty() {
        return Ok(Mixture { probs, mass: R::zero() });
    }
    let m = R::from_count(codebook.len());
    let mut scratch = Vec::new();
    for w in codebook {
        let r = inst.ratio(w);
        if r > R::zero() {
            inst.accumulate(w, r / m, &mut probs, &mut scratch);
        }
    }
    let mass = probs.iter().copied().sum();
    Ok(Mixture { probs, mass })
}

/// `M` words drawn i.i.d. from `q^n`.
pub fn sample_iid_codebook<R: Real, G: Rng>(inst: &ChangeOfMeasureInstance<R>, m: usize, rng: &mut G) -> Vec<Vec<usize>> {
    let cdf: Vec<f64> = inst
        .q
        .probs()
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p.as_f64();
            Some(*acc)
        })
        .collect();
    let last = inst.q.probs().iter().rposition(|p| *p > R::zero()).unwrap_or(0);
    (0..m)
        .map(|_| {
            (0..inst.n)
                .map(|_| {
                    let u: f64 = rng.gen();
                    cdf.iter().position(|&c| u < c).unwrap_or(last).min(last)
                })
                .collect()
        })
        .collect()
}

/// The coset `{a G + B : a ∈ F_p^k}` with `G` and `B` uniform; with
/// `full_rank` the generator is redrawn until its rank is `k`.
pub fn sample_coset_codebook<G: Rng>(field: PrimeField, n: usize, k: usize, full_rank: bool, rng: &mut G) -> Result<Vec<Vec<usize>>> {
    if k > n && full_rank {
        return Err(SoftCoverError::CosetMode(format!("rank {k} impossible at n = {n}")));
    }
    let p = field.order();
    let g = loop {
        let rows: Vec<Vec<u64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.gen_range(0..p) as u64).collect())
            .collect();
        let g = FieldMatrix::from_rows(field, n, &rows).expect("well-formed rows");
        if !full_rank || g.rank() == k {
            break g;
        }
    };
    let shift = FieldVector::new(field, (0..n).map(|_| rng.gen_range(0..p) as u64));
    let size = field
        .space_size(k)
        .ok_or_else(|| SoftCoverError::CosetMode(format!("p^{k} overflows")))?;
    Ok((0..size)
        .map(|a| {
            let av = FieldVector::from_index(field, a, k);
            let w = g.left_mul(&av).expect("dimensions match").try_add(&shift).expect("same field");
            w.residues().iter().map(|&v| v as usize).collect()
        })
        .collect())
}

/// Per-seed exact total variations with summary statistics.
///
/// `tv` uses the ½-normalized convention clamped to `[0, 1]`; `l1` holds the
/// unnormalized, unclamped `Σ |p^n_Y - mixture|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftCoverReport {
    pub n: usize,
    pub rate: f64,
    pub threshold: f64,
    pub codebook_size: usize,
    pub seeds: Vec<u64>,
    pub tv: Vec<f64>,
    pub l1: Vec<f64>,
    pub mass: Vec<f64>,
    pub mean_tv: f64,
    pub mean_l1: f64,
    /// Minimum, lower quartile, median, upper quartile, maximum of `tv`.
    pub quantiles: [f64; 5],
}

impl SoftCoverReport {
    fn from_trials(n: usize, rate: f64, threshold: f64, codebook_size: usize, seeds: &[u64], trials: Vec<(f64, f64)>) -> Self {
        let l1: Vec<f64> = trials.iter().map(|t| t.0).collect();
        let tv: Vec<f64> = l1.iter().map(|v| (v / 2.0).clamp(0.0, 1.0)).collect();
        let mass: Vec<f64> = trials.iter().map(|t| t.1).collect();
        let count = tv.len().max(1) as f64;
        SoftCoverReport {
            n,
            rate,
            threshold,
            codebook_size,
            seeds: seeds.to_vec(),
            mean_tv: tv.iter().sum::<f64>() / count,
            mean_l1: l1.iter().sum::<f64>() / count,
            quantiles: quantiles(&tv),
            tv,
            l1,
            mass,
        }
    }
}

fn quantiles(values: &[f64]) -> [f64; 5] {
    if values.is_empty() {
        return [f64::NAN; 5];
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let at = |f: f64| {
        let pos = f * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    [at(0.0), at(0.25), at(0.5), at(0.75), at(1.0)]
}

fn trial<R: Real>(inst: &ChangeOfMeasureInstance<R>, target: &[R], codebook: &[Vec<usize>]) -> Result<(f64, f64)> {
    let mix = approx_output_pmf(inst, codebook)?;
    Ok(((half_l1(target, &mix.probs) * R::lit(2.0)).as_f64(), mix.mass.as_f64()))
}

/// Exact TV between `p^n_Y` and the mixture for one i.i.d. codebook per seed;
/// seed `s` drives a ChaCha8 stream seeded with `s`.
pub fn ensemble_mean_tv<R: Real>(inst: &ChangeOfMeasureInstance<R>, seeds: &[u64]) -> Result<SoftCoverReport> {
    let target = inst.output_product(prob::DEFAULT_BUDGET)?;
    let m = inst.codebook_size();
    let trials = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let cb = sample_iid_codebook(inst, m, &mut rng);
            trial(inst, &target, &cb)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SoftCoverReport::from_trials(
        inst.n,
        inst.rate,
        inst.threshold().as_f64(),
        m,
        seeds,
        trials,
    ))
}

/// Dimension of the coset codebook matching rate `R`: `⌈nR / log2 p⌉`, capped at `n`.
pub fn coset_dimension(rate: f64, n: usize, p: u32) -> usize {
    let k = (n as f64 * rate / (p as f64).log2() - 1e-9).ceil().max(0.0) as usize;
    k.min(n)
}

/// I.i.d. and random-coset codebooks side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseComparison {
    pub iid: SoftCoverReport,
    pub coset: SoftCoverReport,
    pub coset_dimension: usize,
}

/// Compares the i.i.d. ensemble with pairwise-independent coset codebooks of
/// dimension [`coset_dimension`]; needs a prime `|X̄|` and uniform `q`.
pub fn iid_vs_pairwise<R: Real>(inst: &ChangeOfMeasureInstance<R>, seeds: &[u64], full_rank: bool) -> Result<PairwiseComparison> {
    let kx = inst.q.len() as u32;
    let field = PrimeField::new(kx).map_err(|_| SoftCoverError::CosetMode(format!("|X| = {kx} is not prime")))?;
    let u = R::one() / R::from_count(kx as usize);
    if inst.q.probs().iter().any(|&v| (v - u).abs() > R::lit(1e-12)) {
        return Err(SoftCoverError::CosetMode("q is not uniform".into()));
    }
    let iid = ensemble_mean_tv(inst, seeds)?;
    let k = coset_dimension(inst.rate, inst.n, kx);
    let target = inst.output_product(prob::DEFAULT_BUDGET)?;
    let trials = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            rng.set_stream(1);
            let cb = sample_coset_codebook(field, inst.n, k, full_rank, &mut rng)?;
            trial(inst, &target, &cb)
        })
        .collect::<Result<Vec<_>>>()?;
    let size = field.space_size(k).unwrap_or(usize::MAX);
    let coset = SoftCoverReport::from_trials(inst.n, inst.rate, iid.threshold, size, seeds, trials);
    Ok(PairwiseComparison {
        iid,
        coset,
        coset_dimension: k,
    })
}

/// `p_X = Bern(px)`, `Y = X + Bern(flip)`, `q` uniform on `{0, 1}`.
pub fn binary_instance<R: Real>(px: R, flip: R, rate: f64, n: usize) -> Result<ChangeOfMeasureInstance<R>> {
    let joint = JointPmf::from_fn(&[2, 2], |i| {
        let a = if i[0] == 1 { px } else { R::one() - px };
        let b = if i[0] != i[1] { flip } else { R::one() - flip };
        a * b
    })?;
    ChangeOfMeasureInstance::new(joint, Pmf::uniform(2), rate, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::binary_entropy;

    #[test]
    fn threshold_values() {
        let inst = binary_instance(0.3f64, 0.2, 1.0, 4).unwrap();
        // 1 - H(X|Y) evaluated directly from the conditional PMFs
        let py1 = 0.3 * 0.8 + 0.7 * 0.2;
        let post1 = 0.3 * 0.8 / py1;
        let post0 = 0.3 * 0.2 / (1.0 - py1);
        let hxy = py1 * binary_entropy(post1).unwrap() + (1.0 - py1) * binary_entropy(post0).unwrap();
        assert!((inst.threshold() - (1.0 - hxy)).abs() < 1e-12);
        assert!((inst.threshold() - 0.3551).abs() < 1e-3);

        // q = p gives I(X;Y)
        let j = inst.joint().clone();
        let p = Pmf::new(vec!["0".into(), "1".into()], vec![0.7, 0.3]).unwrap();
        let t = threshold_rate(&j, &p).unwrap();
        assert!((t - j.mutual_information(&[0], &[1], &[]).unwrap()).abs() < 1e-12);

        // independent Y: H_q(X) - H_p(X)
        let ind = JointPmf::from_fn(&[2, 2], |i| [0.7, 0.3][i[0]] * 0.5).unwrap();
        let t = threshold_rate(&ind, &Pmf::uniform(2)).unwrap();
        assert!((t - (1.0 - binary_entropy(0.3f64).unwrap())).abs() < 1e-12);
    }

    #[test]
    fn codebook_sizes() {
        assert_eq!(codebook_size(1.0, 4), 16);
        assert_eq!(codebook_size(0.5, 4), 4);
        assert_eq!(codebook_size(0.3, 4), 3);
        assert_eq!(codebook_size(0.0, 4), 1);
    }

    #[test]
    fn exhaustive_codebook_is_exact() {
        let inst = binary_instance(0.3f64, 0.2, 1.0, 3).unwrap();
        let cb: Vec<Vec<usize>> = words::all_words(2, 3).collect();
        let mix = approx_output_pmf(&inst, &cb).unwrap();
        let target = inst.output_product(1 << 10).unwrap();
        assert!(half_l1(&mix.probs, &target) < 1e-15);
        assert!((mix.mass - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_codeword_with_q_equal_p() {
        let j = binary_instance(0.3f64, 0.2, 0.0, 3).unwrap().joint().clone();
        let p = Pmf::new(vec!["0".into(), "1".into()], vec![0.7, 0.3]).unwrap();
        let inst = ChangeOfMeasureInstance::new(j, p, 0.0, 3).unwrap();
        let x0 = vec![1, 0, 1];
        let mix = approx_output_pmf(&inst, std::slice::from_ref(&x0)).unwrap();
        for (y, &v) in words::all_words(2, 3).zip(&mix.probs) {
            let want: f64 = x0.iter().zip(&y).map(|(&a, &b)| if a == b { 0.8 } else { 0.2 }).product();
            assert!((v - want).abs() < 1e-15);
        }
    }

    #[test]
    fn random_codebook_matches_oracle() {
        let inst = binary_instance(0.3f64, 0.2, 0.7, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let cb = sample_iid_codebook(&inst, inst.codebook_size(), &mut rng);
        let mix = approx_output_pmf(&inst, &cb).unwrap();
        for (y, &v) in words::all_words(2, 5).zip(&mix.probs) {
            let mut want = 0.0;
            for x in &cb {
                let ratio: f64 = x.iter().map(|&a| [0.7, 0.3][a] / 0.5).product();
                let lik: f64 = x.iter().zip(&y).map(|(&a, &b)| if a == b { 0.8 } else { 0.2 }).product();
                want += ratio * lik / cb.len() as f64;
            }
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn independent_output_closed_form() {
        let j = JointPmf::from_fn(&[2, 2], |i| [0.7, 0.3][i[0]] * [0.4, 0.6][i[1]]).unwrap();
        for seed in 0..10 {
            let inst = ChangeOfMeasureInstance::new(j.clone(), Pmf::uniform(2), 0.5, 4).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cb = sample_iid_codebook(&inst, inst.codebook_size(), &mut rng);
            let mix = approx_output_pmf(&inst, &cb).unwrap();
            let avg: f64 = cb.iter().map(|x| inst.ratio(x)).sum::<f64>() / cb.len() as f64;
            let tv = half_l1(&inst.output_product(1 << 10).unwrap(), &mix.probs);
            assert!((tv - 0.5 * (1.0 - avg).abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn ensemble_average_is_unbiased() {
        // E_q[ratio(X) p(y|X)] = p^n(y): sum the mixture formula against q^n
        let inst = binary_instance(0.3f64, 0.2, 0.0, 3).unwrap();
        let mut expect = vec![0.0; 8];
        for x in words::all_words(2, 3) {
            let qx = 0.125;
            let mix = approx_output_pmf(&inst, std::slice::from_ref(&x)).unwrap();
            for (e, v) in expect.iter_mut().zip(&mix.probs) {
                *e += qx * v;
            }
        }
        assert!(half_l1(&expect, &inst.output_product(16).unwrap()) < 1e-15);
    }

    #[test]
    fn zero_q_codeword_rejected() {
        let j = JointPmf::from_fn(&[3, 2], |i| if i[0] == 2 { 0.0 } else { 0.25 }).unwrap();
        let q = Pmf::from_probs(vec![0.5, 0.5, 0.0]).unwrap();
        let inst = ChangeOfMeasureInstance::new(j, q, 1.0, 2).unwrap();
        assert!(matches!(approx_output_pmf(&inst, &[vec![0, 2]]), Err(SoftCoverError::ZeroQ { index: 0 })));
        let bad = JointPmf::from_fn(&[2, 2], |_| 0.25).unwrap();
        assert!(ChangeOfMeasureInstance::new(bad, Pmf::from_probs(vec![1.0, 0.0]).unwrap(), 1.0, 2).is_err());
    }

    #[test]
    fn extended_alphabet_symbols_carry_no_output() {
        // X̄ = {0, 1, 2} with p(2, ·) = 0 but q(2) > 0
        let j = JointPmf::from_fn(&[3, 2], |i| [[0.35, 0.15], [0.1, 0.4], [0.0, 0.0]][i[0]][i[1]]).unwrap();
        let inst = ChangeOfMeasureInstance::new(j, Pmf::uniform(3), 1.0, 2).unwrap();
        let mix = approx_output_pmf(&inst, &[vec![2, 0]]).unwrap();
        assert_eq!(mix.mass, 0.0);
        let report = ensemble_mean_tv(&inst, &[1, 2, 3]).unwrap();
        assert!(report.tv.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn report_statistics() {
        let inst = binary_instance(0.3f64, 0.2, 0.9, 6).unwrap();
        let seeds: Vec<u64> = (0..8).collect();
        let r = ensemble_mean_tv(&inst, &seeds).unwrap();
        assert_eq!(r.tv.len(), 8);
        assert!((r.mean_l1 - 2.0 * r.mean_tv).abs() < 1e-12);
        assert!(r.quantiles[0] <= r.quantiles[2] && r.quantiles[2] <= r.quantiles[4]);
        assert_eq!(r, ensemble_mean_tv(&inst, &seeds).unwrap());
    }

    #[test]
    fn full_rank_exhaustive_coset() {
        let inst = binary_instance(0.3f64, 0.2, 1.0, 4).unwrap();
        let cmp = iid_vs_pairwise(&inst, &[1, 2, 3], true).unwrap();
        assert_eq!(cmp.coset_dimension, 4);
        assert!(cmp.coset.tv.iter().all(|&v| v < 1e-12));
        assert_eq!(cmp.iid, ensemble_mean_tv(&inst, &[1, 2, 3]).unwrap());
    }

    #[test]
    fn coset_mode_requirements() {
        let j = JointPmf::from_fn(&[4, 2], |_| 0.125).unwrap();
        let inst = ChangeOfMeasureInstance::new(j, Pmf::uniform(4), 1.0, 2).unwrap();
        assert!(matches!(iid_vs_pairwise(&inst, &[1], false), Err(SoftCoverError::CosetMode(_))));
        let j = binary_instance(0.3f64, 0.2, 1.0, 2).unwrap().joint().clone();
        let p = Pmf::new(vec!["0".into(), "1".into()], vec![0.7, 0.3]).unwrap();
        let inst = ChangeOfMeasureInstance::new(j, p, 1.0, 2).unwrap();
        assert!(matches!(iid_vs_pairwise(&inst, &[1], false), Err(SoftCoverError::CosetMode(_))));
    }
}
