//! The two-encoder distributed synthesis protocol built on a shared-generator
//! UCC pair: likelihood encoders with PMF binning, the coset-sum decoder, the
//! exactly induced joint distribution and its total variation to the target,
//! plus Monte Carlo estimates of the covering and packing failure events.

mod decoder;
mod diagnostics;
mod encoder;
mod protocol;

use thiserror::Error;

use crate::prob::{self, words, CondPmf, JointPmf, Pmf, ProbError};
use crate::scalar::Real;
use crate::ucc::{Side, UccError, UccParams};

pub use decoder::{decode, decoder_ambiguity_set, DecoderMap, DecoderOutput};
pub use diagnostics::{ambiguity_probability, overflow_probability, AmbiguityEstimate};
pub use encoder::{build_encoder_pmf, encoder_weight, overflow_mass, EncoderTable, Message, MessagePmf};
pub use protocol::{induced_joint_exact, simulate_samples, synthesis_tv, Protocol, Sample};

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error(transparent)]
    Ucc(#[from] UccError),
    #[error("enumeration budget exceeded: {what} needs {needed} entries > {budget}")]
    Budget {
        what: &'static str,
        needed: usize,
        budget: usize,
    },
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("candidate does not reproduce the target (max deviation {deviation:.3e})")]
    NotAdmissible { deviation: f64 },
}

pub type Result<T> = std::result::Result<T, SynthesisError>;

pub(crate) fn budget_check(what: &'static str, needed: Option<usize>, budget: usize) -> Result<usize> {
    match needed {
        Some(n) if n <= budget => Ok(n),
        other => Err(SynthesisError::Budget {
            what,
            needed: other.unwrap_or(usize::MAX),
            budget,
        }),
    }
}

/// Target `p_{X1 X2 Y}`, test channels `p_{W_i|X_i}` into `F_p`, the output
/// channel `p_{Y|Z}` on `Z = W1 + W2`, typicality slack `δ`, normalization
/// slack `η` and the code dimensions.
#[derive(Debug, Clone)]
pub struct SynthesisProblem<R> {
    target: JointPmf<R>,
    channels: [CondPmf<R>; 2],
    output: CondPmf<R>,
    delta: R,
    eta: R,
    params: UccParams,
    source: Vec<R>,
    x_marginals: [Pmf<R>; 2],
    xw: [JointPmf<R>; 2],
    z: Pmf<R>,
    y_marginal: Pmf<R>,
}

impl<R: Real> SynthesisProblem<R> {
    pub fn new(
        target: JointPmf<R>,
        channel1: CondPmf<R>,
        channel2: CondPmf<R>,
        output: CondPmf<R>,
        delta: R,
        eta: R,
        params: UccParams,
    ) -> Result<Self> {
        params.validate()?;
        if target.num_vars() != 3 {
            return Err(SynthesisError::Invalid("target must be a joint over (X1, X2, Y)".into()));
        }
        if !(delta > R::zero()) || !(eta > R::zero()) {
            return Err(SynthesisError::Invalid("delta and eta must be positive".into()));
        }
        let sizes = target.sizes();
        let p = params.p.order() as usize;
        for (i, ch) in [&channel1, &channel2].into_iter().enumerate() {
            if ch.inputs().len() != sizes[i] {
                return Err(SynthesisError::Invalid(format!(
                    "channel {} has {} inputs, X{} has {} symbols",
                    i + 1,
                    ch.inputs().len(),
                    i + 1,
                    sizes[i]
                )));
            }
            if ch.outputs().len() != p {
                return Err(SynthesisError::Invalid(format!(
                    "channel {} must output F_{p} symbols",
                    i + 1
                )));
            }
        }
        if output.inputs().len() != p || output.outputs().len() != sizes[2] {
            return Err(SynthesisError::Invalid("output channel must map F_p to the Y alphabet".into()));
        }

        let x12 = target.marginal(&[0, 1])?;
        let source = x12.probs().to_vec();
        let x_marginals = [
            prob_of(&target.marginal(&[0])?),
            prob_of(&target.marginal(&[1])?),
        ];
        let xw = [
            channel1.joint_with(&x_marginals[0])?,
            channel2.joint_with(&x_marginals[1])?,
        ];
        let mut zp = vec![R::zero(); p];
        for x1 in 0..sizes[0] {
            for x2 in 0..sizes[1] {
                let px = source[x1 * sizes[1] + x2];
                for w1 in 0..p {
                    for w2 in 0..p {
                        let q = px * channel1.prob(w1, x1) * channel2.prob(w2, x2);
                        zp[(w1 + w2) % p] = zp[(w1 + w2) % p] + q;
                    }
                }
            }
        }
        let z = Pmf::from_probs(zp)?;
        let y_marginal = prob_of(&target.marginal(&[2])?);
        Ok(SynthesisProblem {
            target,
            channels: [channel1, channel2],
            output,
            delta,
            eta,
            params,
            source,
            x_marginals,
            xw,
            z,
            y_marginal,
        })
    }

    pub fn with_params(&self, params: UccParams) -> Result<Self> {
        Self::new(
            self.target.clone(),
            self.channels[0].clone(),
            self.channels[1].clone(),
            self.output.clone(),
            self.delta,
            self.eta,
            params,
        )
    }

    pub fn with_slacks(&self, delta: R, eta: R) -> Result<Self> {
        let mut out = self.with_params(self.params)?;
        if !(delta > R::zero()) || !(eta > R::zero()) {
            return Err(SynthesisError::Invalid("delta and eta must be positive".into()));
        }
        out.delta = delta;
        out.eta = eta;
        Ok(out)
    }

    pub fn target(&self) -> &JointPmf<R> {
        &self.target
    }

    pub fn channel(&self, side: Side) -> &CondPmf<R> {
        &self.channels[side.index()]
    }

    pub fn output_channel(&self) -> &CondPmf<R> {
        &self.output
    }

    pub fn delta(&self) -> R {
        self.delta
    }

    /// Decoder slack `p δ`.
    pub fn decoder_delta(&self) -> R {
        self.delta * R::from_count(self.params.p.order() as usize)
    }

    pub fn eta(&self) -> R {
        self.eta
    }

    pub fn params(&self) -> &UccParams {
        &self.params
    }

    pub fn x_marginal(&self, side: Side) -> &Pmf<R> {
        &self.x_marginals[side.index()]
    }

    /// `p_{X_i W_i}` with variable order (X, W).
    pub fn xw_joint(&self, side: Side) -> &JointPmf<R> {
        &self.xw[side.index()]
    }

    pub fn z_pmf(&self) -> &Pmf<R> {
        &self.z
    }

    pub fn y_marginal(&self) -> &Pmf<R> {
        &self.y_marginal
    }

    pub fn alphabet_sizes(&self) -> [usize; 3] {
        let s = self.target.sizes();
        [s[0], s[1], s[2]]
    }

    /// `p_{X1 X2}(x1, x2)` for single letters.
    pub fn source_prob(&self, x1: usize, x2: usize) -> R {
        self.source[x1 * self.alphabet_sizes()[1] + x2]
    }

    pub(crate) fn source_table(&self) -> &[R] {
        &self.source
    }

    /// `p^n_{X1 X2}` for a pair of word indices.
    pub fn source_word_prob(&self, x1: usize, x2: usize) -> R {
        let [k1, k2, _] = self.alphabet_sizes();
        let n = self.params.n;
        let a = words::decode(x1, k1, n);
        let b = words::decode(x2, k2, n);
        a.iter()
            .zip(&b)
            .map(|(&s, &t)| self.source[s * k2 + t])
            .fold(R::one(), |acc, v| acc * v)
    }

    /// The joint `p(x1,x2) p(w1|x1) p(w2|x2) p(y|w1+w2)` over
    /// `(Q, W1, W2, X1, X2, Y)` with a one-point `Q`.
    pub fn aux_joint(&self) -> JointPmf<R> {
        let [k1, k2, ky] = self.alphabet_sizes();
        let p = self.params.p.order() as usize;
        let sizes = [1, p, p, k1, k2, ky];
        let probs = {
            let mut out = Vec::with_capacity(p * p * k1 * k2 * ky);
            for w1 in 0..p {
                for w2 in 0..p {
                    for x1 in 0..k1 {
                        for x2 in 0..k2 {
                            let base = self.source_prob(x1, x2)
                                * self.channels[0].prob(w1, x1)
                                * self.channels[1].prob(w2, x2);
                            for y in 0..ky {
                                out.push(base * self.output.prob(y, (w1 + w2) % p));
                            }
                        }
                    }
                }
            }
            out
        };
        let mut alphabets: Vec<Vec<String>> = sizes.iter().map(|&k| (0..k).map(|i| i.to_string()).collect()).collect();
        let t = self.target.alphabets();
        alphabets[3] = t[0].clone();
        alphabets[4] = t[1].clone();
        alphabets[5] = t[2].clone();
        JointPmf::from_parts_unchecked(alphabets, probs)
    }

    /// Largest deviation between the target and the `(X1, X2, Y)` marginal of
    /// [`SynthesisProblem::aux_joint`].
    pub fn admissibility_deviation(&self) -> f64 {
        let aux = self.aux_joint();
        let m = aux.marginal(&[3, 4, 5]).expect("fixed layout");
        m.probs()
            .iter()
            .zip(self.target.probs())
            .map(|(a, b)| (*a - *b).abs().as_f64())
            .fold(0.0, f64::max)
    }

    /// Errors unless the candidate reproduces the target within `1e-6`.
    pub fn require_admissible(&self) -> Result<()> {
        let deviation = self.admissibility_deviation();
        if deviation > 1e-6 {
            Err(SynthesisError::NotAdmissible { deviation })
        } else {
            Ok(())
        }
    }
}

fn prob_of<R: Real>(j: &JointPmf<R>) -> Pmf<R> {
    Pmf::new(j.alphabets()[0].clone(), j.probs().to_vec()).expect("marginal of a valid joint")
}

/// A convenient admissible family: `X1 ~ Bern(1/2)`, `X2 = X1 + Bern(p_flip)`,
/// `W_i = X_i + Bern(theta_i)` over `F_2`, and `Y = W1 + W2 + Bern(out_flip)`.
pub fn binary_symmetric_problem<R: Real>(
    p_flip: R,
    theta1: R,
    theta2: R,
    out_flip: R,
    delta: R,
    eta: R,
    params: UccParams,
) -> Result<SynthesisProblem<R>> {
    if params.p.order() != 2 {
        return Err(SynthesisError::Invalid("binary family needs p = 2".into()));
    }
    let half = R::lit(0.5);
    let th_bar = theta1 * (R::one() - theta2) + theta2 * (R::one() - theta1);
    let nz = th_bar * (R::one() - out_flip) + out_flip * (R::one() - th_bar);
    let target = JointPmf::from_fn(&[2, 2, 2], |i| {
        let flip = if i[0] != i[1] { p_flip } else { R::one() - p_flip };
        let noise = if (i[0] ^ i[1]) != i[2] { nz } else { R::one() - nz };
        half * flip * noise
    })?;
    SynthesisProblem::new(
        target,
        CondPmf::bsc(theta1)?,
        CondPmf::bsc(theta2)?,
        CondPmf::bsc(out_flip)?,
        delta,
        eta,
        params,
    )
}

/// Budget-checked `p^n_{X1 X2 Y}` in the `(x1^n, x2^n, y^n)` layout.
pub fn target_product<R: Real>(problem: &SynthesisProblem<R>, budget: usize) -> Result<JointPmf<R>> {
    Ok(problem.target().product_extend(problem.params().n, budget)?)
}

pub(crate) fn default_budget() -> usize {
    prob::DEFAULT_BUDGET
}
