use rayon::prelude::*;

use super::encoder::Message;
use super::{budget_check, Result, SynthesisError, SynthesisProblem};
use crate::field::FieldVector;
use crate::prob::typical::CountBounds;
use crate::prob::words;
use crate::scalar::Real;
use crate::ucc::{Side, UccCodebookPair, UccError};

/// Decoder output: a word of `F_p^n` or the failure token `w₀`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DecoderOutput {
    Word(FieldVector),
    Failure,
}

/// Membership table for `T_{pδ}(Z)` over all of `F_p^n`.
pub(crate) struct ZTypical {
    member: Vec<bool>,
}

impl ZTypical {
    pub fn new<R: Real>(problem: &SynthesisProblem<R>, budget: usize) -> Result<Self> {
        let params = problem.params();
        let p = params.p.order() as usize;
        let size = budget_check("F_p^n", words::word_count(p, params.n), budget)?;
        let bounds = CountBounds::new(problem.z_pmf().probs(), params.n, problem.decoder_delta());
        let n = params.n;
        let member = (0..size)
            .into_par_iter()
            .map(|idx| {
                let mut counts = vec![0usize; p];
                let mut i = idx;
                for _ in 0..n {
                    counts[i % p] += 1;
                    i /= p;
                }
                bounds.admits(&counts)
            })
            .collect();
        Ok(ZTypical { member })
    }

    #[inline]
    pub fn contains(&self, word: usize) -> bool {
        self.member[word]
    }

    #[cfg(test)]
    pub fn is_empty(&self) -> bool {
        !self.member.iter().any(|&b| b)
    }
}

/// Word indices of `ã G + h₁(i) + h₂(j)` over all `ã`, lexicographic in `ã`.
fn candidate_words(pair: &UccCodebookPair, mu: (usize, usize), i: usize, j: usize) -> Vec<usize> {
    let params = pair.params();
    let p = params.p.order();
    let h1 = pair.shift(Side::One, mu.0, i).residues();
    let h2 = pair.shift(Side::Two, mu.1, j).residues();
    let shift: Vec<u32> = h1.iter().zip(h2).map(|(&a, &b)| (a + b) % p).collect();
    (0..params.coarse_size())
        .map(|a| {
            pair.coarse_row(a)
                .iter()
                .zip(&shift)
                .fold(0usize, |acc, (&x, &b)| acc * p as usize + ((x + b) % p) as usize)
        })
        .collect()
}

fn check_indices(pair: &UccCodebookPair, mu: (usize, usize), i: usize, j: usize) -> Result<()> {
    let params = pair.params();
    let checks = [
        ("common randomness 1", mu.0, params.mu_count(Side::One)),
        ("common randomness 2", mu.1, params.mu_count(Side::Two)),
        ("bin 1", i, params.bins(Side::One)),
        ("bin 2", j, params.bins(Side::Two)),
    ];
    for (what, index, bound) in checks {
        if index >= bound {
            return Err(UccError::IndexOutOfRange { what, index, bound }.into());
        }
    }
    Ok(())
}

fn check_pair<R: Real>(problem: &SynthesisProblem<R>, pair: &UccCodebookPair) -> Result<()> {
    if pair.params() != problem.params() {
        return Err(SynthesisError::Invalid("codebook parameters differ from the problem".into()));
    }
    Ok(())
}

/// `D^(mu)_{i,j}`: coarse indices `ã` with `ã G + h₁(i) + h₂(j) ∈ T_{pδ}(Z)`.
pub fn decoder_ambiguity_set<R: Real>(
    problem: &SynthesisProblem<R>,
    pair: &UccCodebookPair,
    mu: (usize, usize),
    i: usize,
    j: usize,
) -> Result<Vec<FieldVector>> {
    check_pair(problem, pair)?;
    check_indices(pair, mu, i, j)?;
    let params = problem.params();
    let bounds = CountBounds::new(problem.z_pmf().probs(), params.n, problem.decoder_delta());
    let p = params.p.order() as usize;
    Ok(candidate_words(pair, mu, i, j)
        .into_iter()
        .enumerate()
        .filter(|&(_, w)| {
            let mut counts = vec![0usize; p];
            for s in words::decode(w, p, params.n) {
                counts[s] += 1;
            }
            bounds.admits(&counts)
        })
        .map(|(a, _)| FieldVector::from_index(params.p, a, params.k))
        .collect())
}

/// `f^(mu)(m₁, m₂)`.
pub fn decode<R: Real>(
    problem: &SynthesisProblem<R>,
    pair: &UccCodebookPair,
    mu: (usize, usize),
    m1: Message,
    m2: Message,
) -> Result<DecoderOutput> {
    let (i, j) = match (m1, m2) {
        (Message::Bin(i), Message::Bin(j)) => (i, j),
        _ => {
            check_pair(problem, pair)?;
            return Ok(DecoderOutput::Failure);
        }
    };
    let set = decoder_ambiguity_set(problem, pair, mu, i, j)?;
    if set.len() != 1 {
        return Ok(DecoderOutput::Failure);
    }
    let params = problem.params();
    let word = FieldVector::from_index(params.p, candidate_words(pair, mu, i, j)[set[0].to_index()], params.n);
    Ok(DecoderOutput::Word(word))
}

/// The decoder for every `(mu₁, mu₂, i, j)`, as word indices, with `|D|`.
#[derive(Debug, Clone)]
pub struct DecoderMap {
    n: usize,
    p: u32,
    mu: [usize; 2],
    bins: [usize; 2],
    words: Vec<Option<usize>>,
    set_sizes: Vec<usize>,
}

impl DecoderMap {
    pub fn build<R: Real>(problem: &SynthesisProblem<R>, pair: &UccCodebookPair, budget: usize) -> Result<Self> {
        check_pair(problem, pair)?;
        let params = problem.params();
        let mu = [params.mu_count(Side::One), params.mu_count(Side::Two)];
        let bins = [params.bins(Side::One), params.bins(Side::Two)];
        let cells = budget_check(
            "decoder map",
            mu[0].checked_mul(mu[1])
                .and_then(|v| v.checked_mul(bins[0]))
                .and_then(|v| v.checked_mul(bins[1])),
            budget,
        )?;
        budget_check("decoder scan", cells.checked_mul(params.coarse_size()), budget)?;
        let typical = ZTypical::new(problem, budget)?;
        let entries: Vec<(Option<usize>, usize)> = (0..cells)
            .into_par_iter()
            .map(|cell| {
                let j = cell % bins[1];
                let i = (cell / bins[1]) % bins[0];
                let m2 = (cell / (bins[0] * bins[1])) % mu[1];
                let m1 = cell / (bins[0] * bins[1] * mu[1]);
                let mut hit = None;
                let mut size = 0usize;
                for w in candidate_words(pair, (m1, m2), i, j) {
                    if typical.contains(w) {
                        size += 1;
                        hit = Some(w);
                    }
                }
                (if size == 1 { hit } else { None }, size)
            })
            .collect();
        let (words, set_sizes) = entries.into_iter().unzip();
        Ok(DecoderMap {
            n: params.n,
            p: params.p.order(),
            mu,
            bins,
            words,
            set_sizes,
        })
    }

    #[inline]
    fn cell(&self, mu: (usize, usize), i: usize, j: usize) -> usize {
        ((mu.0 * self.mu[1] + mu.1) * self.bins[0] + i) * self.bins[1] + j
    }

    /// Decoded word index, `None` for `w₀`. Indices are not checked.
    #[inline]
    pub fn word_index(&self, mu: (usize, usize), m1: Message, m2: Message) -> Option<usize> {
        match (m1, m2) {
            (Message::Bin(i), Message::Bin(j)) => self.words[self.cell(mu, i, j)],
            _ => None,
        }
    }

    /// `|D^(mu)_{i,j}|`.
    pub fn set_size(&self, mu: (usize, usize), i: usize, j: usize) -> usize {
        self.set_sizes[self.cell(mu, i, j)]
    }

    pub fn decode(&self, mu: (usize, usize), m1: Message, m2: Message) -> DecoderOutput {
        match self.word_index(mu, m1, m2) {
            Some(w) => DecoderOutput::Word(FieldVector::from_index(
                crate::field::PrimeField::new(self.p).expect("validated modulus"),
                w,
                self.n,
            )),
            None => DecoderOutput::Failure,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::binary_symmetric_problem;
    use super::super::tests::params;
    use super::*;
    use crate::field::index_vectors;
    use crate::prob::typical::is_typical;
    use crate::ucc::sample_codebooks;

    fn instance(n: usize, k: usize, l: usize, delta: f64, seed: u64) -> (SynthesisProblem<f64>, UccCodebookPair) {
        let prob = binary_symmetric_problem(0.1, 0.05, 0.05, 0.05, delta, 0.1, params(n, k, l, 2)).unwrap();
        let pair = sample_codebooks(seed, prob.params()).unwrap();
        (prob, pair)
    }

    // exhaustive scan over F_p^k using only field-vector arithmetic
    fn oracle(prob: &SynthesisProblem<f64>, pair: &UccCodebookPair, mu: (usize, usize), i: usize, j: usize) -> Vec<(FieldVector, FieldVector)> {
        let f = prob.params().p;
        let pz = prob.z_pmf().probs().to_vec();
        let s = pair.shift(Side::One, mu.0, i).try_add(pair.shift(Side::Two, mu.1, j)).unwrap();
        index_vectors(f, prob.params().k)
            .filter_map(|a| {
                let w = pair.generator().left_mul(&a).unwrap().try_add(&s).unwrap();
                let letters: Vec<usize> = w.residues().iter().map(|&v| v as usize).collect();
                is_typical(&letters, &pz, prob.decoder_delta()).then_some((a, w))
            })
            .collect()
    }

    #[test]
    fn ambiguity_set_matches_enumeration() {
        for seed in 0..5 {
            let (prob, pair) = instance(6, 3, 1, 0.3, seed);
            let map = DecoderMap::build(&prob, &pair, 1 << 20).unwrap();
            for m1 in 0..2 {
                for m2 in 0..2 {
                    for i in 0..2 {
                        for j in 0..2 {
                            let want = oracle(&prob, &pair, (m1, m2), i, j);
                            let got = decoder_ambiguity_set(&prob, &pair, (m1, m2), i, j).unwrap();
                            let coarse: Vec<FieldVector> = want.iter().map(|(a, _)| a.clone()).collect();
                            assert_eq!(got, coarse);
                            assert_eq!(map.set_size((m1, m2), i, j), want.len());
                            let out = decode(&prob, &pair, (m1, m2), Message::Bin(i), Message::Bin(j)).unwrap();
                            let expect = if want.len() == 1 {
                                DecoderOutput::Word(want[0].1.clone())
                            } else {
                                DecoderOutput::Failure
                            };
                            assert_eq!(out, expect);
                            assert_eq!(map.decode((m1, m2), Message::Bin(i), Message::Bin(j)), expect);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bot_gives_failure() {
        let (prob, pair) = instance(4, 1, 1, 0.5, 1);
        let map = DecoderMap::build(&prob, &pair, 1 << 20).unwrap();
        for (a, b) in [(Message::Bot, Message::Bin(0)), (Message::Bin(1), Message::Bot), (Message::Bot, Message::Bot)] {
            assert_eq!(decode(&prob, &pair, (0, 0), a, b).unwrap(), DecoderOutput::Failure);
            assert_eq!(map.decode((1, 1), a, b), DecoderOutput::Failure);
        }
    }

    #[test]
    fn empty_typical_set_gives_empty_sets() {
        // p_Z(1) ≈ 0.19, so n p_Z(1) (1 ± 2δ) at n = 2, δ = 0.1 admits no count
        let (prob, pair) = instance(2, 1, 1, 0.1, 2);
        assert!(ZTypical::new(&prob, 1 << 10).unwrap().is_empty());
        for i in 0..2 {
            assert!(decoder_ambiguity_set(&prob, &pair, (0, 1), i, 1).unwrap().is_empty());
        }
    }

    #[test]
    fn zero_dimensional_coarse_code() {
        let (prob, pair) = instance(4, 0, 2, 0.5, 4);
        let pz = prob.z_pmf().probs().to_vec();
        for i in 0..4 {
            for j in 0..4 {
                let s = pair.shift(Side::One, 1, i).try_add(pair.shift(Side::Two, 0, j)).unwrap();
                let letters: Vec<usize> = s.residues().iter().map(|&v| v as usize).collect();
                let set = decoder_ambiguity_set(&prob, &pair, (1, 0), i, j).unwrap();
                if is_typical(&letters, &pz, prob.decoder_delta()) {
                    assert_eq!(set, vec![FieldVector::new(prob.params().p, [])]);
                } else {
                    assert!(set.is_empty());
                }
            }
        }
    }

    #[test]
    fn decode_is_pure() {
        let (prob, pair) = instance(6, 2, 1, 0.4, 9);
        let a = decode(&prob, &pair, (1, 0), Message::Bin(1), Message::Bin(0)).unwrap();
        for _ in 0..3 {
            assert_eq!(decode(&prob, &pair, (1, 0), Message::Bin(1), Message::Bin(0)).unwrap(), a);
        }
    }

    #[test]
    fn index_errors() {
        let (prob, pair) = instance(4, 1, 1, 0.5, 1);
        assert!(decoder_ambiguity_set(&prob, &pair, (2, 0), 0, 0).is_err());
        assert!(decoder_ambiguity_set(&prob, &pair, (0, 0), 0, 2).is_err());
    }
}
