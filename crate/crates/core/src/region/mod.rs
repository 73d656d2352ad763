//! Structured rate regions: the three-dimensional region over `(R1, R2, C)`,
//! the long-form system with auxiliary code rates, Fourier-Motzkin
//! projection between the two and small exact linear programs.

pub mod example1;
mod system;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::is_prime;
use crate::prob::{JointPmf, ProbError};
use crate::scalar::{Real, Scalar};

pub use example1::{
    bsc_convolve, example1_aux, example1_structured_min, example1_structured_min_on, example1_target,
    example1_unstructured_sum_min, theta_max, theta_sweep, Example1Min, ThetaPoint,
};
pub use system::{fme_eliminate, Inequality, LinearInequalitySystem, RowFile, SystemFile};

/// Markov-chain tolerance on conditional probabilities.
pub const MARKOV_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RegionError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("Markov chain {chain} violated (deviation {deviation:.3e})")]
    Markov { chain: &'static str, deviation: f64 },
    #[error("cardinality bound violated: {0}")]
    Cardinality(String),
    #[error("auxiliary alphabets must both be F_p for a prime p, found sizes {0} and {1}")]
    NotField(usize, usize),
    #[error("system is infeasible")]
    Infeasible,
    #[error("objective is unbounded below")]
    Unbounded,
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, RegionError>;

// variable order of an auxiliary joint; Z = W1 + W2 is appended internally
const Q: usize = 0;
const W1: usize = 1;
const W2: usize = 2;
const X1: usize = 3;
const X2: usize = 4;
const Y: usize = 5;
const Z: usize = 6;

/// Outcome of a Markov-chain test `A - B - C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovCheck {
    pub holds: bool,
    /// `max |p(c|a,b) - p(c|b)|` over cells with `p(a,b) > 0`.
    pub deviation: f64,
}

/// Tests whether `A - B - C` is a Markov chain; variable groups must be disjoint.
pub fn markov_verify<R: Real>(joint: &JointPmf<R>, a: &[usize], b: &[usize], c: &[usize]) -> Result<MarkovCheck> {
    if a.is_empty() || c.is_empty() {
        return Err(RegionError::Invalid("chain ends must be nonempty".into()));
    }
    let order: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    let m = joint.marginal(&order)?;
    let sizes = joint.sizes();
    let ka: usize = a.iter().map(|&v| sizes[v]).product();
    let kb: usize = b.iter().map(|&v| sizes[v]).product();
    let kc: usize = c.iter().map(|&v| sizes[v]).product();
    let p = |i: usize, j: usize, k: usize| m.probs()[(i * kb + j) * kc + k].as_f64();
    let mut pab = vec![0.0; ka * kb];
    let mut pbc = vec![0.0; kb * kc];
    let mut pb = vec![0.0; kb];
    for i in 0..ka {
        for j in 0..kb {
            for k in 0..kc {
                let v = p(i, j, k);
                pab[i * kb + j] += v;
                pbc[j * kc + k] += v;
                pb[j] += v;
            }
        }
    }
    let mut deviation: f64 = 0.0;
    for i in 0..ka {
        for j in 0..kb {
            let ab = pab[i * kb + j];
            if ab <= 0.0 {
                continue;
            }
            for k in 0..kc {
                let d = (p(i, j, k) / ab - pbc[j * kc + k] / pb[j]).abs();
                deviation = deviation.max(d);
            }
        }
    }
    Ok(MarkovCheck {
        holds: deviation <= MARKOV_TOL,
        deviation,
    })
}

/// A joint over `(Q, W1, W2, X1, X2, Y)` with `W1, W2 ∈ F_p`, validated
/// against the Markov chains `W1 - QX1 - QX2 - W2`, `X1X2 - QW1W2 - Y` and
/// the bounds `|W_i| <= |X_i|`.
#[derive(Debug, Clone)]
pub struct AuxPmf<R> {
    joint: JointPmf<R>,
    with_z: JointPmf<R>,
    p: usize,
    checks: [MarkovCheck; 3],
}

impl<R: Real> AuxPmf<R> {
    pub fn new(joint: JointPmf<R>) -> Result<Self> {
        if joint.num_vars() != 6 {
            return Err(RegionError::Invalid("auxiliary joint must be over (Q, W1, W2, X1, X2, Y)".into()));
        }
        let s = joint.sizes();
        if s[W1] != s[W2] || !is_prime(s[W1] as u32) {
            return Err(RegionError::NotField(s[W1], s[W2]));
        }
        for (w, x) in [(W1, X1), (W2, X2)] {
            if s[w] > s[x] {
                return Err(RegionError::Cardinality(format!("|W{w}| = {} > |X{w}| = {}", s[w], s[x])));
            }
        }
        let checks = [
            markov_verify(&joint, &[W1], &[Q, X1], &[X2, W2])?,
            markov_verify(&joint, &[W2], &[Q, X2], &[X1, W1])?,
            markov_verify(&joint, &[X1, X2], &[Q, W1, W2], &[Y])?,
        ];
        let names = ["W1 - QX1 - QX2 - W2", "W1 - QX1 - QX2 - W2", "X1X2 - QW1W2 - Y"];
        for (c, name) in checks.iter().zip(names) {
            if !c.holds {
                return Err(RegionError::Markov {
                    chain: name,
                    deviation: c.deviation,
                });
            }
        }
        let p = s[W1];
        let with_z = joint.with_function((0..p).map(|i| i.to_string()).collect(), |i| (i[W1] + i[W2]) % p);
        Ok(AuxPmf {
            joint,
            with_z,
            p,
            checks,
        })
    }

    /// Builds `p(q) p(x1,x2|q) p(w1|x1,q) p(w2|x2,q) p(y|w1,w2,q)`; every
    /// table is row-stochastic and indexed `[q][...]`.
    pub fn from_factors(
        pq: &[R],
        px: &[Vec<Vec<R>>],
        pw1: &[Vec<Vec<R>>],
        pw2: &[Vec<Vec<R>>],
        py: &[Vec<Vec<Vec<R>>>],
    ) -> Result<Self> {
        let nq = pq.len();
        let invalid = || RegionError::Invalid("inconsistent factor shapes".into());
        let k1 = px.first().ok_or_else(invalid)?.len();
        let k2 = px[0].first().ok_or_else(invalid)?.len();
        let p = pw1.first().and_then(|t| t.first()).ok_or_else(invalid)?.len();
        let ky = py.first().and_then(|t| t.first()).and_then(|t| t.first()).ok_or_else(invalid)?.len();
        let shapes_ok = px.len() == nq
            && pw1.len() == nq
            && pw2.len() == nq
            && py.len() == nq
            && px.iter().all(|t| t.len() == k1 && t.iter().all(|r| r.len() == k2))
            && pw1.iter().all(|t| t.len() == k1 && t.iter().all(|r| r.len() == p))
            && pw2.iter().all(|t| t.len() == k2 && t.iter().all(|r| r.len() == p))
            && py.iter().all(|t| t.len() == p && t.iter().all(|r| r.len() == p && r.iter().all(|c| c.len() == ky)));
        if !shapes_ok {
            return Err(invalid());
        }
        let joint = JointPmf::from_fn(&[nq, p, p, k1, k2, ky], |i| {
            let q = i[Q];
            pq[q] * px[q][i[X1]][i[X2]] * pw1[q][i[X1]][i[W1]] * pw2[q][i[X2]][i[W2]] * py[q][i[W1]][i[W2]][i[Y]]
        })?;
        Self::new(joint)
    }

    pub fn joint(&self) -> &JointPmf<R> {
        &self.joint
    }

    pub fn field_size(&self) -> usize {
        self.p
    }

    pub fn markov_checks(&self) -> &[MarkovCheck; 3] {
        &self.checks
    }

    /// The `(X1, X2, Y)` marginal.
    pub fn target(&self) -> JointPmf<R> {
        self.joint.marginal(&[X1, X2, Y]).expect("fixed layout")
    }

    /// Largest deviation of the `(X1, X2, Y)` marginal from `target`.
    pub fn target_deviation(&self, target: &JointPmf<R>) -> Result<f64> {
        let m = self.target();
        if m.sizes() != target.sizes() {
            return Err(ProbError::AlphabetMismatch.into());
        }
        Ok(m.probs()
            .iter()
            .zip(target.probs())
            .map(|(a, b)| (*a - *b).abs().as_f64())
            .fold(0.0, f64::max))
    }

    fn mi(&self, a: &[usize], b: &[usize], given: &[usize]) -> f64 {
        self.with_z.mutual_information(a, b, given).expect("fixed layout").as_f64()
    }

    fn ce(&self, a: &[usize], given: &[usize]) -> f64 {
        self.with_z.cond_entropy(a, given).expect("fixed layout").as_f64()
    }

    fn log_p(&self) -> f64 {
        (self.p as f64).log2()
    }

    /// Right-hand sides of the five rate constraints, in order.
    pub fn beta_constants(&self) -> [f64; 5] {
        let x = [X1, X2];
        let zw2 = self.mi(&[Z], &[W2], &[Q]);
        let zw1 = self.mi(&[Z], &[W1], &[Q]);
        let xw1 = self.mi(&x, &[W1], &[W2, Q]);
        let xw2 = self.mi(&x, &[W2], &[W1, Q]);
        [
            self.mi(&[X1], &[W1], &[W2, Q]) + zw2,
            self.mi(&[X2], &[W2], &[W1, Q]) + zw1,
            xw1 + self.mi(&[Y], &[W1], &[X1, X2, Q]) + zw2,
            xw2 + self.mi(&[Y], &[W2], &[X1, X2, Q]) + zw1,
            xw1 + xw2 + zw1 + zw2,
        ]
    }

    /// Right-hand sides of the long-form covering constraints, then the
    /// packing bound `log p - H(Z|Q)`.
    pub fn long_form_constants(&self) -> [f64; 6] {
        let l = self.log_p();
        let xy = [X1, X2, Y];
        [
            self.mi(&[X1], &[W1], &[Q]) - self.ce(&[W1], &[Q]) + l,
            self.mi(&[X2], &[W2], &[Q]) - self.ce(&[W2], &[Q]) + l,
            self.mi(&xy, &[W1], &[Q]) - self.ce(&[W1], &[Q]) + l,
            self.mi(&xy, &[W2], &[Q]) - self.ce(&[W2], &[Q]) + l,
            self.mi(&[W1, W2], &xy, &[Q]) - self.ce(&[W1, W2], &[Q]) + 2.0 * l,
            l - self.ce(&[Z], &[Q]),
        ]
    }

    /// `I(X1 X2 Y; W1 W2 | Q)`.
    pub fn unstructured_sum_bound(&self) -> f64 {
        self.mi(&[X1, X2, Y], &[W1, W2], &[Q])
    }
}

/// `(R1, R2, C)` in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
    pub c: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64, c: f64) -> Self {
        RatePoint { r1, r2, c }
    }

    pub fn to_vec<S: Scalar>(self) -> Vec<S> {
        vec![S::from_real(self.r1), S::from_real(self.r2), S::from_real(self.c)]
    }

    pub fn sum(self) -> f64 {
        self.r1 + self.r2 + self.c
    }
}

/// The region over `(R1, R2, C)`: five rate constraints plus nonnegativity.
pub fn beta_region<S: Scalar, R: Real>(aux: &AuxPmf<R>) -> Result<LinearInequalitySystem<S>> {
    let c = aux.beta_constants();
    let mut sys = LinearInequalitySystem::new(["R1", "R2", "C"]);
    let k = |v: f64| S::from_real(v);
    sys.add_named(&[("R1", 1.0)], k(c[0]))?;
    sys.add_named(&[("R2", 1.0)], k(c[1]))?;
    sys.add_named(&[("R1", 1.0), ("C", 1.0)], k(c[2]))?;
    sys.add_named(&[("R2", 1.0), ("C", 1.0)], k(c[3]))?;
    sys.add_named(&[("R1", 1.0), ("R2", 1.0), ("C", 1.0)], k(c[4]))?;
    for v in ["R1", "R2", "C"] {
        sys.add_named(&[(v, 1.0)], S::zero())?;
    }
    Ok(sys)
}

/// Variables of [`long_form_region`], in order.
pub const LONG_FORM_VARS: [&str; 7] = ["R1", "R2", "C", "S1", "S2", "C1", "C2"];

/// The long-form system over `(R1, R2, C, S1, S2, C1, C2)`, including
/// `C1, C2 >= 0`; the equality `S1 - R1 = S2 - R2` is stored as two rows.
pub fn long_form_region<S: Scalar, R: Real>(aux: &AuxPmf<R>) -> Result<LinearInequalitySystem<S>> {
    let c = aux.long_form_constants();
    let mut sys = LinearInequalitySystem::new(LONG_FORM_VARS);
    let k = |v: f64| S::from_real(v);
    sys.add_named(&[("S1", 1.0)], k(c[0]))?;
    sys.add_named(&[("S2", 1.0)], k(c[1]))?;
    sys.add_named(&[("S1", 1.0), ("C1", 1.0)], k(c[2]))?;
    sys.add_named(&[("S2", 1.0), ("C2", 1.0)], k(c[3]))?;
    sys.add_named(&[("S1", 1.0), ("S2", 1.0), ("C1", 1.0), ("C2", 1.0)], k(c[4]))?;
    let eq = [("S1", 1.0), ("R1", -1.0), ("S2", -1.0), ("R2", 1.0)];
    sys.add_named(&eq, S::zero())?;
    sys.add_named(&eq.map(|(v, a)| (v, -a)), S::zero())?;
    sys.add_named(&[("S1", -1.0), ("R1", 1.0)], k(-c[5]))?;
    for (r, s) in [("R1", "S1"), ("R2", "S2")] {
        sys.add_named(&[(r, 1.0)], S::zero())?;
        sys.add_named(&[(s, 1.0), (r, -1.0)], S::zero())?;
    }
    sys.add_named(&[("C", 1.0), ("C1", -1.0), ("C2", -1.0)], S::zero())?;
    sys.add_named(&[("C", 1.0)], S::zero())?;
    sys.add_named(&[("C1", 1.0)], S::zero())?;
    sys.add_named(&[("C2", 1.0)], S::zero())?;
    Ok(sys)
}

/// [`long_form_region`] with `S1, S2, C1, C2` eliminated.
pub fn projected_long_form<S: Scalar, R: Real>(aux: &AuxPmf<R>) -> Result<LinearInequalitySystem<S>> {
    fme_eliminate(&long_form_region(aux)?, &["S1", "S2", "C1", "C2"])
}

pub fn region_contains<S: Scalar>(system: &LinearInequalitySystem<S>, point: &[S]) -> bool {
    system.contains(point)
}

/// Minimum of the sum of all variables over the system.
pub fn min_sum_rate<S: Scalar>(system: &LinearInequalitySystem<S>) -> Result<S> {
    let ones = vec![S::one(); system.vars().len()];
    Ok(system.minimize(&ones)?.0)
}

pub fn unstructured_sum_bound<R: Real>(aux: &AuxPmf<R>) -> f64 {
    aux.unstructured_sum_bound()
}

fn random_stochastic<G: Rng>(rng: &mut G, k: usize) -> Vec<f64> {
    // flat Dirichlet via normalized exponentials
    let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// A random factorized auxiliary PMF with `|Q| = nq`, `W_i ∈ F_p`,
/// `|X_i| = kx[i]` and `|Y| = ky`; every factor is flat-Dirichlet.
pub fn random_aux<G: Rng>(rng: &mut G, p: usize, nq: usize, kx: [usize; 2], ky: usize) -> Result<AuxPmf<f64>> {
    let pq = random_stochastic(rng, nq);
    let px: Vec<Vec<Vec<f64>>> = (0..nq)
        .map(|_| {
            let flat = random_stochastic(rng, kx[0] * kx[1]);
            flat.chunks(kx[1]).map(|c| c.to_vec()).collect()
        })
        .collect();
    let pw1 = (0..nq).map(|_| (0..kx[0]).map(|_| random_stochastic(rng, p)).collect()).collect::<Vec<_>>();
    let pw2 = (0..nq).map(|_| (0..kx[1]).map(|_| random_stochastic(rng, p)).collect()).collect::<Vec<_>>();
    let py = (0..nq)
        .map(|_| (0..p).map(|_| (0..p).map(|_| random_stochastic(rng, ky)).collect()).collect())
        .collect::<Vec<_>>();
    AuxPmf::from_factors(&pq, &px, &pw1, &pw2, &py)
}
