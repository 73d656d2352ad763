//! Robust (letter) typicality.
//!
//! `x^n` is δ-typical for `p` when every symbol's empirical frequency is within
//! `δ p(a)` of `p(a)`; symbols with `p(a) = 0` must not occur. The conditional
//! test applies the same rule to the joint type of `(x^n, w^n)` against `p_XW`.

use super::{words, JointPmf, Pmf, ProbError, Result};
use crate::scalar::Real;

/// Allowed occurrence counts per cell for a fixed blocklength.
#[derive(Debug, Clone, PartialEq)]
pub struct CountBounds {
    lo: Vec<usize>,
    hi: Vec<usize>,
}

impl CountBounds {
    pub fn new<R: Real>(probs: &[R], n: usize, delta: R) -> Self {
        let nf = n as f64;
        let d = delta.as_f64();
        let slack = 1e-9;
        let mut lo = Vec::with_capacity(probs.len());
        let mut hi = Vec::with_capacity(probs.len());
        for p in probs {
            let p = p.as_f64();
            if p <= 0.0 {
                lo.push(0);
                hi.push(0);
                continue;
            }
            let l = (nf * p * (1.0 - d) - slack).ceil().max(0.0);
            let h = (nf * p * (1.0 + d) + slack).floor().min(nf);
            lo.push(l as usize);
            // an empty interval is encoded as lo > hi
            hi.push(if h < 0.0 { 0 } else { h as usize });
            if h < l {
                let last = lo.len() - 1;
                lo[last] = usize::MAX;
            }
        }
        CountBounds { lo, hi }
    }

    #[inline]
    pub fn admits(&self, counts: &[usize]) -> bool {
        counts
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&c, (&l, &h))| c >= l && c <= h)
    }

    /// False when some cell has no admissible count, so the set is empty.
    pub fn satisfiable(&self) -> bool {
        self.lo.iter().zip(&self.hi).all(|(&l, &h)| l <= h)
    }
}

pub fn is_typical<R: Real>(word: &[usize], probs: &[R], delta: R) -> bool {
    let mut counts = vec![0usize; probs.len()];
    for &s in word {
        counts[s] += 1;
    }
    CountBounds::new(probs, word.len(), delta).admits(&counts)
}

/// Whether `(x^n, w^n)` is jointly δ-typical for the two-variable joint `(X, W)`.
pub fn is_jointly_typical<R: Real>(x: &[usize], w: &[usize], joint: &JointPmf<R>, delta: R) -> bool {
    debug_assert_eq!(joint.num_vars(), 2);
    let kw = joint.sizes()[1];
    let mut counts = vec![0usize; joint.probs().len()];
    for (&a, &b) in x.iter().zip(w) {
        counts[a * kw + b] += 1;
    }
    CountBounds::new(joint.probs(), x.len(), delta).admits(&counts)
}

#[derive(Debug, Clone)]
pub struct TypicalSet<R> {
    pmf: Pmf<R>,
    n: usize,
    delta: R,
    bounds: CountBounds,
}

impl<R: Real> TypicalSet<R> {
    pub fn new(pmf: Pmf<R>, n: usize, delta: R) -> Result<Self> {
        if !(delta > R::zero()) {
            return Err(ProbError::OutOfRange(delta.as_f64()));
        }
        let bounds = CountBounds::new(pmf.probs(), n, delta);
        Ok(TypicalSet { pmf, n, delta, bounds })
    }

    pub fn blocklength(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> R {
        self.delta
    }

    pub fn contains(&self, word: &[usize]) -> bool {
        if word.len() != self.n {
            return false;
        }
        let mut counts = vec![0usize; self.pmf.len()];
        for &s in word {
            if s >= counts.len() {
                return false;
            }
            counts[s] += 1;
        }
        self.bounds.admits(&counts)
    }

    pub fn is_empty(&self) -> bool {
        !self.bounds.satisfiable() || self.enumerate(usize::MAX).map_or(true, |v| v.is_empty())
    }

    /// All members in lexicographic order.
    pub fn enumerate(&self, budget: usize) -> Result<Vec<Vec<usize>>> {
        let total = words::word_count(self.pmf.len(), self.n).unwrap_or(usize::MAX);
        if total > budget {
            return Err(ProbError::Budget { needed: total, budget });
        }
        Ok(words::all_words(self.pmf.len(), self.n)
            .filter(|w| self.contains(w))
            .collect())
    }

    /// `p^n(T_δ)`.
    pub fn mass(&self, budget: usize) -> Result<R> {
        Ok(self
            .enumerate(budget)?
            .iter()
            .map(|w| self.pmf.word_prob(w))
            .sum())
    }
}

/// `T_δ(W | x^n)` for a fixed conditioning word.
#[derive(Debug, Clone)]
pub struct CondTypicalSet<R> {
    joint: JointPmf<R>,
    x: Vec<usize>,
    delta: R,
    bounds: CountBounds,
}

impl<R: Real> CondTypicalSet<R> {
    /// `joint` is `p_XW`, variable order (X, W).
    pub fn new(joint: JointPmf<R>, x: Vec<usize>, delta: R) -> Result<Self> {
        if joint.num_vars() != 2 {
            return Err(ProbError::BadPartition("conditional typicality needs p_XW".into()));
        }
        if !(delta > R::zero()) {
            return Err(ProbError::OutOfRange(delta.as_f64()));
        }
        let bounds = CountBounds::new(joint.probs(), x.len(), delta);
        Ok(CondTypicalSet { joint, x, delta, bounds })
    }

    pub fn delta(&self) -> R {
        self.delta
    }

    pub fn contains(&self, w: &[usize]) -> bool {
        if w.len() != self.x.len() {
            return false;
        }
        let kw = self.joint.sizes()[1];
        let mut counts = vec![0usize; self.joint.probs().len()];
        for (&a, &b) in self.x.iter().zip(w) {
            counts[a * kw + b] += 1;
        }
        self.bounds.admits(&counts)
    }

    pub fn enumerate(&self, budget: usize) -> Result<Vec<Vec<usize>>> {
        let kw = self.joint.sizes()[1];
        let total = words::word_count(kw, self.x.len()).unwrap_or(usize::MAX);
        if total > budget {
            return Err(ProbError::Budget { needed: total, budget });
        }
        Ok(words::all_words(kw, self.x.len())
            .filter(|w| self.contains(w))
            .collect())
    }
}
