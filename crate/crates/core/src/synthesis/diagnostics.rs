//! Ensemble estimates of the covering and packing failure events.
//!
//! Both estimators average over codebooks drawn from the given seeds; the
//! inner expectation over the source, the common randomness and the encoder
//! randomness is computed exactly for each codebook.

use rayon::prelude::*;

use super::encoder::{codeword_letters, SideContext};
use super::protocol::Protocol;
use super::{budget_check, default_budget, Result, SynthesisProblem};
use crate::prob::words;
use crate::scalar::Real;
use crate::ucc::{sample_codebooks, Side, UccParams};

fn with_params<R: Real>(problem: &SynthesisProblem<R>, params: &UccParams) -> Result<SynthesisProblem<R>> {
    if problem.params() == params {
        Ok(problem.clone())
    } else {
        problem.with_params(*params)
    }
}

/// Mean over seeds and `mu` of `Σ_x p^n(x) 1{s^(mu)(x) > 1}`.
pub fn overflow_probability<R: Real>(
    problem: &SynthesisProblem<R>,
    params: &UccParams,
    seeds: &[u64],
    side: Side,
) -> Result<f64> {
    if seeds.is_empty() {
        return Ok(0.0);
    }
    let problem = with_params(problem, params)?;
    let k = problem.alphabet_sizes()[side.index()];
    let nx = budget_check("encoder inputs", words::word_count(k, params.n), default_budget())?;
    let px = problem.x_marginal(side).clone();
    let per_seed: Vec<f64> = seeds
        .par_iter()
        .map(|&seed| -> Result<f64> {
            let pair = sample_codebooks(seed, params)?;
            let ctx = SideContext::new(&problem, side);
            let mut acc = 0.0;
            let mut x = vec![0usize; params.n];
            for mu in 0..params.mu_count(side) {
                let cw = codeword_letters(&pair, side, mu);
                for xi in 0..nx {
                    let mut i = xi;
                    words::decode_into(&mut i, k, &mut x);
                    let w = px.word_prob(&x);
                    if w == R::zero() || !ctx.x_typical(&x) {
                        continue;
                    }
                    if ctx.row(&cw, &x).1 > R::one() {
                        acc += w.as_f64();
                    }
                }
            }
            Ok(acc / params.mu_count(side) as f64)
        })
        .collect::<Result<_>>()?;
    Ok(per_seed.iter().sum::<f64>() / seeds.len() as f64)
}

/// Pooled decoder-failure statistics over protocol executions where both
/// messages are bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbiguityEstimate {
    /// `P(|D| ≠ 1 | both messages are bins)`.
    pub probability: f64,
    /// `P(|D| ≥ 2 | both messages are bins)`: a typical competitor exists.
    pub competitor: f64,
    /// Mean probability that both messages are bins.
    pub bin_mass: f64,
    pub seeds: usize,
}

/// Frequency of `|D^(mu)_{m1,m2}| ≠ 1` in executions with non-`⊥` messages,
/// pooled across the codebooks drawn from `seeds`.
pub fn ambiguity_probability<R: Real>(
    problem: &SynthesisProblem<R>,
    params: &UccParams,
    seeds: &[u64],
) -> Result<AmbiguityEstimate> {
    let problem = with_params(problem, params)?;
    let per_seed: Vec<[f64; 3]> = seeds
        .par_iter()
        .map(|&seed| -> Result<[f64; 3]> {
            let pair = sample_codebooks(seed, params)?;
            let proto = Protocol::new(&problem, &pair)?;
            let b2 = params.bins(Side::Two) + 1;
            let norm = (params.mu_count(Side::One) * params.mu_count(Side::Two)) as f64;
            let mut acc = [0.0; 3];
            for mu1 in 0..params.mu_count(Side::One) {
                for mu2 in 0..params.mu_count(Side::Two) {
                    let mass = proto.message_pair_mass((mu1, mu2));
                    for i in 0..params.bins(Side::One) {
                        for j in 0..params.bins(Side::Two) {
                            let q = mass[(i + 1) * b2 + j + 1].as_f64() / norm;
                            let size = proto.decoder().set_size((mu1, mu2), i, j);
                            acc[0] += q;
                            if size != 1 {
                                acc[1] += q;
                            }
                            if size >= 2 {
                                acc[2] += q;
                            }
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let [bins, fail, comp] = per_seed.iter().fold([0.0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    let ratio = |x: f64| if bins > 0.0 { x / bins } else { 0.0 };
    Ok(AmbiguityEstimate {
        probability: ratio(fail),
        competitor: ratio(comp),
        bin_mass: if seeds.is_empty() { 0.0 } else { bins / seeds.len() as f64 },
        seeds: seeds.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::binary_symmetric_problem;
    use super::super::tests::params;
    use super::super::{overflow_mass, Message};
    use super::*;

    #[test]
    fn overflow_matches_direct_average() {
        // two codewords per table: w = x carries weight 8 (0.7)^4 / 1.1 > 1
        let prob = binary_symmetric_problem(0.1, 0.3, 0.3, 0.05, 2.0, 0.1, params(4, 1, 0, 2)).unwrap();
        let pr = *prob.params();
        let seeds = [1u64, 2, 3];
        let got = overflow_probability(&prob, &pr, &seeds, Side::One).unwrap();
        let mut want = 0.0;
        for &seed in &seeds {
            let pair = sample_codebooks(seed, &pr).unwrap();
            for mu in 0..2 {
                for x in words::all_words(2, 4) {
                    if overflow_mass(&prob, &pair, Side::One, mu, &x).unwrap() > 1.0 {
                        want += prob.x_marginal(Side::One).word_prob(&x) / 6.0;
                    }
                }
            }
        }
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!(got > 0.0);
    }

    #[test]
    fn large_eta_suppresses_overflow() {
        let prob = binary_symmetric_problem(0.1, 0.3, 0.3, 0.05, 0.8, 1e6, params(4, 3, 2, 2)).unwrap();
        assert_eq!(overflow_probability(&prob, prob.params(), &[1, 2, 3], Side::Two).unwrap(), 0.0);
    }

    #[test]
    fn mean_overflow_mass_bounded() {
        // E s(x) = P(W ∈ T(W|x)) / (1 + η) for a uniformly drawn codebook
        let prob = binary_symmetric_problem(0.1, 0.2, 0.2, 0.05, 0.6, 0.1, params(4, 1, 2, 1)).unwrap();
        let x = [0usize, 1, 1, 0];
        let trials = 4000;
        let mean: f64 = (0..trials)
            .map(|seed| {
                let pair = sample_codebooks(seed, prob.params()).unwrap();
                overflow_mass(&prob, &pair, Side::One, 0, &x).unwrap()
            })
            .sum::<f64>()
            / trials as f64;
        let bound = 1.0 / 1.1;
        // each s is at most 8 · 2^{-1} · max likelihood / 1.1
        let sd = 4.0 * 0.8f64.powi(4) / 1.1 / (trials as f64).sqrt();
        assert!(mean <= bound + 5.0 * sd, "{mean}");
    }

    #[test]
    fn ambiguity_pools_exact_masses() {
        let prob = binary_symmetric_problem(0.05, 0.2, 0.2, 0.05, 1.5, 0.1, params(4, 2, 1, 2)).unwrap();
        let pr = *prob.params();
        let est = ambiguity_probability(&prob, &pr, &[5, 6]).unwrap();
        assert!((0.0..=1.0).contains(&est.probability));
        assert!(est.competitor <= est.probability + 1e-15);
        // brute-force recount for seed 5 alone
        let single = ambiguity_probability(&prob, &pr, &[5]).unwrap();
        let pair = sample_codebooks(5, &pr).unwrap();
        let proto = Protocol::new(&prob, &pair).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for x1 in 0..16 {
            for x2 in 0..16 {
                let px = prob.source_word_prob(x1, x2);
                for mu1 in 0..2 {
                    for mu2 in 0..2 {
                        for i in 0..2 {
                            for j in 0..2 {
                                let q = px
                                    * proto.encoder(Side::One).row(mu1, x1).prob(Message::Bin(i))
                                    * proto.encoder(Side::Two).row(mu2, x2).prob(Message::Bin(j))
                                    / 4.0;
                                den += q;
                                if proto.decoder().set_size((mu1, mu2), i, j) != 1 {
                                    num += q;
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(den > 0.0);
        assert!((single.probability - num / den).abs() < 1e-12);
        assert!((single.bin_mass - den).abs() < 1e-12);
    }

    #[test]
    fn zero_dimensional_code_has_no_competitors() {
        let prob = binary_symmetric_problem(0.05, 0.05, 0.05, 0.05, 0.5, 0.1, params(4, 0, 2, 2)).unwrap();
        let est = ambiguity_probability(&prob, prob.params(), &[1, 2, 3]).unwrap();
        assert_eq!(est.competitor, 0.0);
    }
}
