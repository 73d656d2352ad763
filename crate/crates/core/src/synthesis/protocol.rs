use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::decoder::DecoderMap;
use super::encoder::{EncoderTable, Message};
use super::{budget_check, default_budget, Result, SynthesisError, SynthesisProblem};
use crate::prob::{words, JointPmf};
use crate::scalar::Real;
use crate::ucc::{Side, UccCodebookPair};

const SAMPLE_CHUNK: usize = 1024;

/// One protocol execution, as letter sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub x1: Vec<usize>,
    pub x2: Vec<usize>,
    pub y: Vec<usize>,
}

/// Encoder tables and decoder map for a fixed codebook pair; immutable once built.
#[derive(Debug, Clone)]
pub struct Protocol<'a, R> {
    problem: &'a SynthesisProblem<R>,
    enc: [EncoderTable<R>; 2],
    dec: DecoderMap,
    budget: usize,
}

impl<'a, R: Real> Protocol<'a, R> {
    pub fn new(problem: &'a SynthesisProblem<R>, pair: &UccCodebookPair) -> Result<Self> {
        Self::with_budget(problem, pair, default_budget())
    }

    pub fn with_budget(problem: &'a SynthesisProblem<R>, pair: &UccCodebookPair, budget: usize) -> Result<Self> {
        let enc = [
            EncoderTable::build(problem, pair, Side::One, budget)?,
            EncoderTable::build(problem, pair, Side::Two, budget)?,
        ];
        let dec = DecoderMap::build(problem, pair, budget)?;
        Ok(Protocol {
            problem,
            enc,
            dec,
            budget,
        })
    }

    pub fn problem(&self) -> &SynthesisProblem<R> {
        self.problem
    }

    pub fn encoder(&self, side: Side) -> &EncoderTable<R> {
        &self.enc[side.index()]
    }

    pub fn decoder(&self) -> &DecoderMap {
        &self.dec
    }

    fn word_counts(&self) -> [usize; 3] {
        let n = self.problem.params().n;
        let [a, b, c] = self.problem.alphabet_sizes();
        [
            words::word_count(a, n).expect("encoder tables exist"),
            words::word_count(b, n).expect("encoder tables exist"),
            words::word_count(c, n).unwrap_or(usize::MAX),
        ]
    }

    /// Distribution of the decoder output given `(x1^n, x2^n)`, averaged over
    /// common randomness: nonzero `(word, mass)` pairs and the `w₀` mass.
    pub fn outcome_distribution(&self, x1: usize, x2: usize) -> (Vec<(usize, R)>, R) {
        let params = self.problem.params();
        let norm = R::from_count(params.mu_count(Side::One) * params.mu_count(Side::Two));
        let mut dense: Vec<R> = Vec::new();
        let mut touched: Vec<usize> = Vec::new();
        let mut fail = R::zero();
        for mu1 in 0..self.enc[0].mu_count() {
            let r1 = self.enc[0].row(mu1, x1).probs();
            for mu2 in 0..self.enc[1].mu_count() {
                let r2 = self.enc[1].row(mu2, x2).probs();
                for (s1, &e1) in r1.iter().enumerate() {
                    if e1 == R::zero() {
                        continue;
                    }
                    for (s2, &e2) in r2.iter().enumerate() {
                        if e2 == R::zero() {
                            continue;
                        }
                        let mass = e1 * e2 / norm;
                        match self
                            .dec
                            .word_index((mu1, mu2), Message::from_slot(s1), Message::from_slot(s2))
                        {
                            Some(w) => {
                                if dense.is_empty() {
                                    dense = vec![R::zero(); params.word_space()];
                                }
                                if dense[w] == R::zero() {
                                    touched.push(w);
                                }
                                dense[w] = dense[w] + mass;
                            }
                            None => fail = fail + mass,
                        }
                    }
                }
            }
        }
        touched.sort_unstable();
        (touched.into_iter().map(|w| (w, dense[w])).collect(), fail)
    }

    /// `p^n(y | w)` rows for every `w ∈ F_p^n`, plus `p^n_Y` for `w₀`.
    fn output_tables(&self) -> Result<(Vec<Vec<R>>, Vec<R>)> {
        let params = self.problem.params();
        let [_, _, ny] = self.word_counts();
        budget_check("output channel", params.word_space().checked_mul(ny), self.budget)?;
        let ky = self.problem.alphabet_sizes()[2];
        let p = params.p.order() as usize;
        let n = params.n;
        let ch = self.problem.output_channel();
        let rows = (0..params.word_space())
            .into_par_iter()
            .map(|w| {
                let wl = words::decode(w, p, n);
                let mut y = vec![0usize; n];
                (0..ny)
                    .map(|yi| {
                        let mut i = yi;
                        words::decode_into(&mut i, ky, &mut y);
                        ch.word_prob(&y, &wl)
                    })
                    .collect()
            })
            .collect();
        let ym = self.problem.y_marginal();
        let fail = words::all_words(ky, n).map(|y| ym.word_prob(&y)).collect();
        Ok((rows, fail))
    }

    fn check_joint_budget(&self) -> Result<[usize; 3]> {
        let c = self.word_counts();
        budget_check(
            "induced joint",
            c[0].checked_mul(c[1]).and_then(|v| v.checked_mul(c[2])),
            self.budget,
        )?;
        Ok(c)
    }

    /// Row `p(y^n | x1^n, x2^n)` induced by the protocol.
    fn induced_row(&self, x1: usize, x2: usize, out: &(Vec<Vec<R>>, Vec<R>), row: &mut [R]) {
        let (dist, fail) = self.outcome_distribution(x1, x2);
        for (y, slot) in row.iter_mut().enumerate() {
            let mut v = fail * out.1[y];
            for &(w, q) in &dist {
                v = v + q * out.0[w][y];
            }
            *slot = v;
        }
    }

    /// The exact induced joint over `(x1^n, x2^n, y^n)`.
    pub fn induced_joint(&self) -> Result<JointPmf<R>> {
        let [n1, n2, ny] = self.check_joint_budget()?;
        let out = self.output_tables()?;
        let probs: Vec<R> = (0..n1)
            .into_par_iter()
            .flat_map_iter(|x1| {
                let mut block = vec![R::zero(); n2 * ny];
                for x2 in 0..n2 {
                    let row = &mut block[x2 * ny..(x2 + 1) * ny];
                    self.induced_row(x1, x2, &out, row);
                    let px = self.problem.source_word_prob(x1, x2);
                    row.iter_mut().for_each(|v| *v = *v * px);
                }
                block
            })
            .collect();
        let n = self.problem.params().n;
        let alphabets = self
            .problem
            .target()
            .alphabets()
            .iter()
            .map(|a| words::all_words(a.len(), n).map(|w| words::label(a, &w)).collect())
            .collect();
        Ok(JointPmf::from_parts_unchecked(alphabets, probs))
    }

    /// `𝒬`: total variation between the induced joint and `p^n_{X1 X2 Y}`.
    pub fn tv(&self) -> Result<R> {
        let [n1, n2, ny] = self.check_joint_budget()?;
        let out = self.output_tables()?;
        let [k1, k2, ky] = self.problem.alphabet_sizes();
        let n = self.problem.params().n;
        let target = self.problem.target();
        let total: R = (0..n1)
            .into_par_iter()
            .map(|x1| {
                let a = words::decode(x1, k1, n);
                let mut row = vec![R::zero(); ny];
                let mut y = vec![0usize; n];
                let mut acc = R::zero();
                for x2 in 0..n2 {
                    let b = words::decode(x2, k2, n);
                    self.induced_row(x1, x2, &out, &mut row);
                    let px = self.problem.source_word_prob(x1, x2);
                    for (yi, &q) in row.iter().enumerate() {
                        let mut i = yi;
                        words::decode_into(&mut i, ky, &mut y);
                        let t = (0..n).fold(R::one(), |p, s| p * target.prob(&[a[s], b[s], y[s]]));
                        acc = acc + (px * q - t).abs();
                    }
                }
                acc
            })
            .collect::<Vec<R>>()
            .into_iter()
            .fold(R::zero(), |a, b| a + b);
        Ok((total / R::lit(2.0)).min(R::one()))
    }

    /// Mass of each message pair under the source, for one `(mu₁, mu₂)`:
    /// `Σ_x p^n(x1, x2) p(m1|x1) p(m2|x2)`, flat over slots `(s1, s2)`.
    pub(crate) fn message_pair_mass(&self, mu: (usize, usize)) -> Vec<R> {
        let [n1, n2, _] = self.word_counts();
        let b2 = self.enc[1].row(0, 0).probs().len();
        let b1 = self.enc[0].row(0, 0).probs().len();
        (0..n1)
            .into_par_iter()
            .map(|x1| {
                let mut v = vec![R::zero(); b2];
                for x2 in 0..n2 {
                    let px = self.problem.source_word_prob(x1, x2);
                    if px == R::zero() {
                        continue;
                    }
                    for (s2, &e2) in self.enc[1].row(mu.1, x2).probs().iter().enumerate() {
                        v[s2] = v[s2] + px * e2;
                    }
                }
                let mut out = vec![R::zero(); b1 * b2];
                for (s1, &e1) in self.enc[0].row(mu.0, x1).probs().iter().enumerate() {
                    if e1 == R::zero() {
                        continue;
                    }
                    for s2 in 0..b2 {
                        out[s1 * b2 + s2] = out[s1 * b2 + s2] + e1 * v[s2];
                    }
                }
                out
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(vec![R::zero(); b1 * b2], |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x = *x + y);
                a
            })
    }

    /// `count` independent executions; chunk `c` of the output uses stream
    /// `c` of a ChaCha8 generator seeded with `seed`.
    pub fn simulate(&self, seed: u64, count: usize) -> Vec<Sample> {
        let chunks = count.div_ceil(SAMPLE_CHUNK);
        (0..chunks)
            .into_par_iter()
            .flat_map_iter(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
                (0..len).map(|_| self.sample_one(&mut rng)).collect::<Vec<_>>()
            })
            .collect()
    }

    fn sample_one(&self, rng: &mut ChaCha8Rng) -> Sample {
        let params = self.problem.params();
        let [k1, k2, _] = self.problem.alphabet_sizes();
        let n = params.n;
        let p = params.p.order() as usize;
        let mu = (
            rng.gen_range(0..params.mu_count(Side::One)),
            rng.gen_range(0..params.mu_count(Side::Two)),
        );
        let mut x1 = Vec::with_capacity(n);
        let mut x2 = Vec::with_capacity(n);
        let source = self.problem.source_table();
        for _ in 0..n {
            let cell = draw(source, rng);
            x1.push(cell / k2);
            x2.push(cell % k2);
        }
        let m1 = Message::from_slot(draw(self.enc[0].row(mu.0, words::encode(&x1, k1)).probs(), rng));
        let m2 = Message::from_slot(draw(self.enc[1].row(mu.1, words::encode(&x2, k2)).probs(), rng));
        let y = match self.dec.word_index(mu, m1, m2) {
            Some(w) => words::decode(w, p, n)
                .into_iter()
                .map(|z| draw(self.problem.output_channel().row(z), rng))
                .collect(),
            None => (0..n).map(|_| draw(self.problem.y_marginal().probs(), rng)).collect(),
        };
        Sample { x1, x2, y }
    }
}

/// Inverse-CDF draw from a normalized table.
fn draw<R: Real>(probs: &[R], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.iter().enumerate() {
        let p = p.as_f64();
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

fn check_pair<R: Real>(problem: &SynthesisProblem<R>, pair: &UccCodebookPair) -> Result<()> {
    if pair.params() != problem.params() {
        return Err(SynthesisError::Invalid("codebook parameters differ from the problem".into()));
    }
    Ok(())
}

/// Exact induced joint `p_{X1^n X2^n Y^n}` of the protocol.
pub fn induced_joint_exact<R: Real>(problem: &SynthesisProblem<R>, pair: &UccCodebookPair) -> Result<JointPmf<R>> {
    check_pair(problem, pair)?;
    Protocol::new(problem, pair)?.induced_joint()
}

pub fn synthesis_tv<R: Real>(problem: &SynthesisProblem<R>, pair: &UccCodebookPair) -> Result<R> {
    check_pair(problem, pair)?;
    Protocol::new(problem, pair)?.tv()
}

pub fn simulate_samples<R: Real>(
    problem: &SynthesisProblem<R>,
    pair: &UccCodebookPair,
    seed: u64,
    count: usize,
) -> Result<Vec<Sample>> {
    check_pair(problem, pair)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    Ok(Protocol::new(problem, pair)?.simulate(seed, count))
}

#[cfg(test)]
mod tests {
    use super::super::tests::params;
    use super::super::{binary_symmetric_problem, target_product};
    use super::*;
    use crate::prob::half_l1;
    use crate::prob::typical::{is_jointly_typical, is_typical};
    use crate::prob::{CondPmf, Pmf};
    use crate::ucc::sample_codebooks;

    fn tiny() -> (SynthesisProblem<f64>, UccCodebookPair) {
        // W = X keeps the joint typical sets nonempty at n = 2 with δ < 1
        let prob = binary_symmetric_problem(0.1, 0.0, 0.0, 0.05, 0.6, 0.1, params(2, 1, 1, 2)).unwrap();
        let pair = sample_codebooks(10, prob.params()).unwrap();
        (prob, pair)
    }

    // Direct summation over (mu, m1, m2) with every quantity recomputed from
    // the defining formulas, using field-vector arithmetic only.
    fn oracle_joint(prob: &SynthesisProblem<f64>, pair: &UccCodebookPair) -> Vec<f64> {
        let pr = *prob.params();
        let n = pr.n;
        let f = pr.p;
        let [k1, k2, ky] = prob.alphabet_sizes();
        let enc = |side: Side, mu: usize, x: &[usize]| -> Vec<f64> {
            let l = pr.l(side);
            let px: Vec<f64> = prob.x_marginal(side).probs().to_vec();
            let bins = 1usize << l;
            let mut e = vec![0.0; bins];
            if is_typical(x, &px, prob.delta()) {
                for m in 0..bins {
                    for a in 0..(1usize << pr.k) {
                        let av = crate::field::FieldVector::from_index(f, a, pr.k);
                        let w = pair.generator().left_mul(&av).unwrap().try_add(pair.shift(side, mu, m)).unwrap();
                        let wl: Vec<usize> = w.residues().iter().map(|&v| v as usize).collect();
                        if is_jointly_typical(x, &wl, prob.xw_joint(side), prob.delta()) {
                            let lik: f64 = x.iter().zip(&wl).map(|(&a, &b)| prob.channel(side).prob(b, a)).product();
                            e[m] += 2f64.powi(n as i32 - (pr.k + l) as i32) * lik / (1.0 + prob.eta());
                        }
                    }
                }
            }
            let s: f64 = e.iter().sum();
            let mut row = vec![0.0; bins + 1];
            if s > 1.0 || !is_typical(x, &px, prob.delta()) {
                row[0] = 1.0;
            } else {
                row[0] = 1.0 - s;
                row[1..].copy_from_slice(&e);
            }
            row
        };
        let pz = prob.z_pmf().probs().to_vec();
        let dec = |mu: (usize, usize), i: usize, j: usize| -> Option<Vec<usize>> {
            let s = pair.shift(Side::One, mu.0, i).try_add(pair.shift(Side::Two, mu.1, j)).unwrap();
            let mut hits = Vec::new();
            for a in 0..(1usize << pr.k) {
                let av = crate::field::FieldVector::from_index(f, a, pr.k);
                let w = pair.generator().left_mul(&av).unwrap().try_add(&s).unwrap();
                let wl: Vec<usize> = w.residues().iter().map(|&v| v as usize).collect();
                if is_typical(&wl, &pz, prob.decoder_delta()) {
                    hits.push(wl);
                }
            }
            (hits.len() == 1).then(|| hits.pop().unwrap())
        };
        let mut out = Vec::new();
        for x1 in words::all_words(k1, n) {
            for x2 in words::all_words(k2, n) {
                let px: f64 = (0..n).map(|t| prob.source_prob(x1[t], x2[t])).product();
                for y in words::all_words(ky, n) {
                    let mut v = 0.0;
                    for mu1 in 0..pr.n1 {
                        for mu2 in 0..pr.n2 {
                            let e1 = enc(Side::One, mu1, &x1);
                            let e2 = enc(Side::Two, mu2, &x2);
                            for (s1, &a) in e1.iter().enumerate() {
                                for (s2, &b) in e2.iter().enumerate() {
                                    let w = if s1 > 0 && s2 > 0 { dec((mu1, mu2), s1 - 1, s2 - 1) } else { None };
                                    let py = match w {
                                        Some(w) => prob.output_channel().word_prob(&y, &w),
                                        None => prob.y_marginal().word_prob(&y),
                                    };
                                    v += a * b * py;
                                }
                            }
                        }
                    }
                    out.push(px * v / (pr.n1 * pr.n2) as f64);
                }
            }
        }
        out
    }

    #[test]
    fn induced_joint_matches_direct_summation() {
        let (prob, pair) = tiny();
        let joint = induced_joint_exact(&prob, &pair).unwrap();
        let want = oracle_joint(&prob, &pair);
        assert!(half_l1(joint.probs(), &want) < 1e-10);
        let target = target_product(&prob, 1 << 20).unwrap();
        let tv_oracle = half_l1(target.probs(), &want);
        assert!((synthesis_tv(&prob, &pair).unwrap() - tv_oracle).abs() < 1e-10);
    }

    #[test]
    fn marginal_and_mass() {
        for (n, k, l) in [(2, 1, 1), (3, 1, 2), (4, 2, 1)] {
            let prob = binary_symmetric_problem(0.2, 0.1, 0.15, 0.05, 0.5, 0.1, params(n, k, l, 2)).unwrap();
            let pair = sample_codebooks(n as u64, prob.params()).unwrap();
            let joint = induced_joint_exact(&prob, &pair).unwrap();
            let total: f64 = joint.probs().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            let xm = joint.marginal(&[0, 1]).unwrap();
            let want = prob.target().marginal(&[0, 1]).unwrap().product_extend(n, 1 << 20).unwrap();
            assert!(xm.probs().iter().zip(want.probs()).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }

    #[test]
    fn trivial_code_hand_summation() {
        // k = l = 0, N = 1: both messages are the single bin with mass s, and
        // the decoder output is the fixed word h1 + h2 when typical
        let prob = binary_symmetric_problem(0.2, 0.1, 0.1, 0.1, 0.9, 0.1, params(2, 0, 0, 1)).unwrap();
        let pair = sample_codebooks(4, prob.params()).unwrap();
        let joint = induced_joint_exact(&prob, &pair).unwrap();
        let want = oracle_joint(&prob, &pair);
        assert!(half_l1(joint.probs(), &want) < 1e-12);
        let q = synthesis_tv(&prob, &pair).unwrap();
        assert!((0.0..=1.0).contains(&q));
    }

    #[test]
    fn constant_output_gives_zero_tv() {
        // Y constant under both the target and p_{Y|Z}
        let base = binary_symmetric_problem(0.2, 0.1, 0.1, 0.1, 0.6, 0.1, params(2, 1, 1, 2)).unwrap();
        let target = crate::prob::JointPmf::from_fn(&[2, 2, 1], |i| base.source_prob(i[0], i[1])).unwrap();
        let prob = SynthesisProblem::new(
            target,
            CondPmf::bsc(0.1).unwrap(),
            CondPmf::bsc(0.1).unwrap(),
            CondPmf::from_rows(vec![vec![1.0], vec![1.0]]).unwrap(),
            0.6,
            0.1,
            params(2, 1, 1, 2),
        )
        .unwrap();
        let pair = sample_codebooks(1, prob.params()).unwrap();
        assert!(synthesis_tv(&prob, &pair).unwrap() < 1e-12);
    }

    #[test]
    fn sampler_matches_exact_table() {
        let (prob, pair) = tiny();
        let count = 200_000;
        let samples = simulate_samples(&prob, &pair, 7, count).unwrap();
        assert_eq!(samples.len(), count);
        let joint = induced_joint_exact(&prob, &pair).unwrap();
        let mut hist = vec![0.0; joint.probs().len()];
        for s in &samples {
            let idx = (words::encode(&s.x1, 2) * 4 + words::encode(&s.x2, 2)) * 4 + words::encode(&s.y, 2);
            hist[idx] += 1.0 / count as f64;
        }
        assert!(half_l1(&hist, joint.probs()) < 5.0 / (count as f64).sqrt());
        // per-cell 4σ
        for (h, p) in hist.iter().zip(joint.probs()) {
            let sd = (p * (1.0 - p) / count as f64).sqrt();
            assert!((h - p).abs() <= 4.0 * sd + 1e-12);
        }
    }

    #[test]
    fn sampler_is_deterministic_and_sources_match() {
        let (prob, pair) = tiny();
        assert!(simulate_samples(&prob, &pair, 3, 0).unwrap().is_empty());
        let a = simulate_samples(&prob, &pair, 3, 3000).unwrap();
        let b = simulate_samples(&prob, &pair, 3, 3000).unwrap();
        assert_eq!(a, b);
        let pxx = Pmf::<f64>::from_probs(prob.source_table().to_vec()).unwrap();
        let total = (a.len() * 2) as f64;
        let mut counts = [0.0; 4];
        for s in &a {
            for t in 0..2 {
                counts[s.x1[t] * 2 + s.x2[t]] += 1.0;
            }
        }
        for (c, p) in counts.iter().zip(pxx.probs()) {
            let sd = (p * (1.0 - p) / total).sqrt();
            assert!((c / total - p).abs() <= 4.0 * sd);
        }
    }

    #[test]
    fn budget_refusal() {
        let (prob, pair) = tiny();
        let p = Protocol::with_budget(&prob, &pair, 40).unwrap();
        assert!(matches!(p.induced_joint(), Err(SynthesisError::Budget { .. })));
    }
}
