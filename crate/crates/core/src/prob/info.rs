use super::{Pmf, ProbError, Result};
use crate::scalar::Real;

/// `h_b(t) = -t log2 t - (1-t) log2 (1-t)`.
pub fn binary_entropy<R: Real>(t: R) -> Result<R> {
    if !(t >= R::zero() && t <= R::one()) {
        return Err(ProbError::OutOfRange(t.as_f64()));
    }
    Ok(-(t.xlog2x() + (R::one() - t).xlog2x()))
}

/// Half the L1 distance between two tables of equal length.
/// The tables need not be normalized.
pub fn half_l1<R: Real>(p: &[R], q: &[R]) -> R {
    debug_assert_eq!(p.len(), q.len());
    p.iter().zip(q).map(|(&a, &b)| (a - b).abs()).sum::<R>() / R::lit(2.0)
}

/// Total variation `1/2 sum |p - q|` between PMFs on the same alphabet.
pub fn total_variation<R: Real>(p: &Pmf<R>, q: &Pmf<R>) -> Result<R> {
    if p.alphabet() != q.alphabet() {
        return Err(ProbError::AlphabetMismatch);
    }
    Ok(half_l1(p.probs(), q.probs()).min(R::one()))
}
