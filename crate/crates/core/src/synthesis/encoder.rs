use rayon::prelude::*;

use super::{budget_check, Result, SynthesisError, SynthesisProblem};
use crate::prob::typical::CountBounds;
use crate::prob::{words, Pmf, ProbError};
use crate::scalar::Real;
use crate::ucc::{Side, UccCodebookPair, UccError};

/// Encoder output: the null message `⊥` or a bin index in `F_p^l`
/// (lexicographic rank).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Message {
    Bot,
    Bin(usize),
}

impl Message {
    /// Position in a [`MessagePmf`] table.
    pub fn slot(self) -> usize {
        match self {
            Message::Bot => 0,
            Message::Bin(m) => m + 1,
        }
    }

    pub fn from_slot(slot: usize) -> Self {
        if slot == 0 {
            Message::Bot
        } else {
            Message::Bin(slot - 1)
        }
    }
}

/// A row `p(m | x^n)` over `{⊥} ∪ F_p^l`; slot 0 is `⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct MessagePmf<R> {
    probs: Vec<R>,
}

impl<R: Real> MessagePmf<R> {
    fn bot(bins: usize) -> Self {
        let mut probs = vec![R::zero(); bins + 1];
        probs[0] = R::one();
        MessagePmf { probs }
    }

    pub fn probs(&self) -> &[R] {
        &self.probs
    }

    pub fn prob(&self, m: Message) -> R {
        self.probs[m.slot()]
    }

    pub fn bot_mass(&self) -> R {
        self.probs[0]
    }

    pub fn bins(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn total(&self) -> R {
        self.probs.iter().copied().sum()
    }

    /// Labels the row as a regular [`Pmf`] (`"⊥"`, then bin ranks).
    pub fn to_pmf(&self) -> std::result::Result<Pmf<R>, ProbError> {
        let mut alphabet = vec!["⊥".to_string()];
        alphabet.extend((0..self.bins()).map(|m| m.to_string()));
        Pmf::new(alphabet, self.probs.clone())
    }
}

/// Precomputed per-side quantities that do not depend on the codebook.
pub(crate) struct SideContext<'a, R> {
    pub problem: &'a SynthesisProblem<R>,
    pub side: Side,
    pub alphabet: usize,
    x_bounds: CountBounds,
    xw_bounds: CountBounds,
    scale: R,
}

impl<'a, R: Real> SideContext<'a, R> {
    pub fn new(problem: &'a SynthesisProblem<R>, side: Side) -> Self {
        let params = problem.params();
        let n = params.n;
        let x_bounds = CountBounds::new(problem.x_marginal(side).probs(), n, problem.delta());
        let xw_bounds = CountBounds::new(problem.xw_joint(side).probs(), n, problem.delta());
        // p^n / (2^{nS} (1 + η)) = p^{n-k-l} / (1 + η)
        let exp = n as i32 - (params.k + params.l(side)) as i32;
        let scale = R::from_count(params.p.order() as usize).powi(exp) / (R::one() + problem.eta());
        SideContext {
            problem,
            side,
            alphabet: problem.alphabet_sizes()[side.index()],
            x_bounds,
            xw_bounds,
            scale,
        }
    }

    pub fn x_typical(&self, x: &[usize]) -> bool {
        let mut counts = vec![0usize; self.alphabet];
        for &s in x {
            counts[s] += 1;
        }
        self.x_bounds.admits(&counts)
    }

    /// `E(a, m | x^n)` for a codeword given by its letters; assumes `x^n` typical.
    fn weight(&self, x: &[usize], w: &[usize], counts: &mut [usize]) -> R {
        let p = self.problem.params().p.order() as usize;
        counts.iter_mut().for_each(|c| *c = 0);
        for (&a, &b) in x.iter().zip(w) {
            counts[a * p + b] += 1;
        }
        if !self.xw_bounds.admits(counts) {
            return R::zero();
        }
        let ch = self.problem.channel(self.side);
        let lik = x
            .iter()
            .zip(w)
            .map(|(&a, &b)| ch.prob(b, a))
            .fold(R::one(), |acc, v| acc * v);
        self.scale * lik
    }

    /// Encoder row and overflow mass `s(x^n)` for common-randomness value `mu`.
    pub fn row(&self, codewords: &[Vec<Vec<usize>>], x: &[usize]) -> (MessagePmf<R>, R) {
        let bins = codewords.len();
        if !self.x_typical(x) {
            return (MessagePmf::bot(bins), R::zero());
        }
        let p = self.problem.params().p.order() as usize;
        let mut counts = vec![0usize; self.alphabet * p];
        let mut probs = vec![R::zero(); bins + 1];
        let mut s = R::zero();
        for (m, bin) in codewords.iter().enumerate() {
            let mass: R = bin.iter().map(|w| self.weight(x, w, &mut counts)).sum();
            probs[m + 1] = mass;
            s = s + mass;
        }
        if s > R::one() {
            return (MessagePmf::bot(bins), s);
        }
        probs[0] = R::one() - s;
        (MessagePmf { probs }, s)
    }
}

/// Letters of every codeword for one `(side, mu)`, indexed `[m][a]`.
pub(crate) fn codeword_letters(pair: &UccCodebookPair, side: Side, mu: usize) -> Vec<Vec<Vec<usize>>> {
    let params = pair.params();
    let p = params.p.order() as usize;
    (0..params.bins(side))
        .map(|m| {
            (0..params.coarse_size())
                .map(|a| words::decode(pair.codeword_index(side, a, m, mu), p, params.n))
                .collect()
        })
        .collect()
}

fn check_word<R: Real>(problem: &SynthesisProblem<R>, side: Side, x: &[usize]) -> Result<()> {
    let k = problem.alphabet_sizes()[side.index()];
    if x.len() != problem.params().n || x.iter().any(|&s| s >= k) {
        return Err(SynthesisError::Invalid(format!(
            "x^n must be a length-{} word over {} symbols",
            problem.params().n,
            k
        )));
    }
    Ok(())
}

fn check_pair<R: Real>(problem: &SynthesisProblem<R>, pair: &UccCodebookPair) -> Result<()> {
    if pair.params() != problem.params() {
        return Err(SynthesisError::Invalid("codebook parameters differ from the problem".into()));
    }
    Ok(())
}

fn check_mu(pair: &UccCodebookPair, side: Side, mu: usize) -> Result<()> {
    let bound = pair.params().mu_count(side);
    if mu >= bound {
        return Err(UccError::IndexOutOfRange {
            what: "common randomness",
            index: mu,
            bound,
        }
        .into());
    }
    Ok(())
}

/// `E(a, m | x^n) = p^n p^n_{W|X}(w | x^n) / (2^{nS}(1+η)) · 1{w ∈ T_δ(W|x^n)}`
/// with `w = a G + h^(mu)(m)`; zero when `x^n` is atypical.
pub fn encoder_weight<R: Real>(
    problem: &SynthesisProblem<R>,
    pair: &UccCodebookPair,
    side: Side,
    a: usize,
    m: usize,
    mu: usize,
    x: &[usize],
) -> Result<R> {
    check_pair(problem, pair)?;
    check_word(problem, side, x)?;
    let w = pair.codeword_at(side, a, m, mu)?;
    let ctx = SideContext::new(problem, side);
    if !ctx.x_typical(x) {
        return Ok(R::zero());
    }
    let letters: Vec<usize> = w.residues().iter().map(|&v| v as usize).collect();
    let mut counts = vec![0usize; ctx.alphabet * problem.params().p.order() as usize];
    Ok(ctx.weight(x, &letters, &mut counts))
}

/// `s^(mu)(x^n)`: total encoder weight over all coarse and bin indices.
pub fn overflow_mass<R: Real>(
    problem: &SynthesisProblem<R>,
    pair: &UccCodebookPair,
    side: Side,
    mu: usize,
    x: &[usize],
) -> Result<R> {
    check_pair(problem, pair)?;
    check_word(problem, side, x)?;
    check_mu(pair, side, mu)?;
    let ctx = SideContext::new(problem, side);
    Ok(ctx.row(&codeword_letters(pair, side, mu), x).1)
}

/// The binned encoder PMF over `{⊥} ∪ F_p^l`.
pub fn build_encoder_pmf<R: Real>(
    problem: &SynthesisProblem<R>,
    pair: &UccCodebookPair,
    side: Side,
    mu: usize,
    x: &[usize],
) -> Result<MessagePmf<R>> {
    check_pair(problem, pair)?;
    check_word(problem, side, x)?;
    check_mu(pair, side, mu)?;
    let ctx = SideContext::new(problem, side);
    Ok(ctx.row(&codeword_letters(pair, side, mu), x).0)
}

/// Every encoder row of one side: `[mu][x^n index]`.
#[derive(Debug, Clone)]
pub struct EncoderTable<R> {
    side: Side,
    rows: Vec<Vec<MessagePmf<R>>>,
    overflow: Vec<Vec<R>>,
}

impl<R: Real> EncoderTable<R> {
    pub fn build(problem: &SynthesisProblem<R>, pair: &UccCodebookPair, side: Side, budget: usize) -> Result<Self> {
        check_pair(problem, pair)?;
        let params = problem.params();
        let k = problem.alphabet_sizes()[side.index()];
        let nx = budget_check("encoder inputs", words::word_count(k, params.n), budget)?;
        budget_check(
            "encoder table",
            nx.checked_mul(params.mu_count(side))
                .and_then(|v| v.checked_mul(params.bins(side) + 1)),
            budget,
        )?;
        let ctx = SideContext::new(problem, side);
        let per_mu: Vec<(Vec<MessagePmf<R>>, Vec<R>)> = (0..params.mu_count(side))
            .into_par_iter()
            .map(|mu| {
                let cw = codeword_letters(pair, side, mu);
                let mut x = vec![0usize; params.n];
                let mut rows = Vec::with_capacity(nx);
                let mut over = Vec::with_capacity(nx);
                for xi in 0..nx {
                    let mut idx = xi;
                    words::decode_into(&mut idx, k, &mut x);
                    let (row, s) = ctx.row(&cw, &x);
                    rows.push(row);
                    over.push(s);
                }
                (rows, over)
            })
            .collect();
        let (rows, overflow) = per_mu.into_iter().unzip();
        Ok(EncoderTable { side, rows, overflow })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn row(&self, mu: usize, x: usize) -> &MessagePmf<R> {
        &self.rows[mu][x]
    }

    pub fn rows(&self, mu: usize) -> &[MessagePmf<R>] {
        &self.rows[mu]
    }

    pub fn overflow(&self, mu: usize, x: usize) -> R {
        self.overflow[mu][x]
    }

    pub fn mu_count(&self) -> usize {
        self.rows.len()
    }

    /// Largest `|sum_m p(m|x) - 1|` over the table.
    pub fn max_normalization_error(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|r| (r.total() - R::one()).abs().as_f64())
            .fold(0.0, f64::max)
    }
}
