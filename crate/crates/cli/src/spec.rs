//! Experiment configuration files and their validation.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ucc_synth::field::PrimeField;
use ucc_synth::prob::{CondPmfFile, PmfFile, DEFAULT_BUDGET};
use ucc_synth::synthesis::binary_symmetric_problem;
use ucc_synth::ucc::UccParams;
use ucc_synth::{AuxPmf, CondPmf, JointPmf, Pmf, SynthesisProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Synthesize,
    SoftCover,
    RateRegion,
    Example1,
    Diagnostics,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Synthesize => "synthesize",
            Mode::SoftCover => "soft-cover",
            Mode::RateRegion => "rate-region",
            Mode::Example1 => "example1",
            Mode::Diagnostics => "diagnostics",
        };
        f.write_str(s)
    }
}

/// Source, test channels and output channel of a synthesis run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SourceSpec {
    /// Doubly symmetric binary source with BSC test channels.
    Binary {
        p_flip: f64,
        theta1: f64,
        theta2: f64,
        out_flip: f64,
    },
    /// Paths, relative to the config file, of a target joint over
    /// `(X1, X2, Y)` and the three conditional PMFs.
    Files {
        target: PathBuf,
        channel1: PathBuf,
        channel2: PathBuf,
        output: PathBuf,
    },
}

/// One point of a code sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub n: usize,
    #[serde(default = "two")]
    pub p: u32,
    pub k: usize,
    pub l1: usize,
    pub l2: usize,
    #[serde(rename = "N1", default = "one")]
    pub n1: usize,
    #[serde(rename = "N2", default = "one")]
    pub n2: usize,
}

fn one() -> usize {
    1
}

fn two() -> u32 {
    2
}

impl CodeSpec {
    pub fn params(&self) -> Result<UccParams, String> {
        let p = PrimeField::new(self.p).map_err(|e| e.to_string())?;
        let params = UccParams {
            n: self.n,
            p,
            k: self.k,
            l1: self.l1,
            l2: self.l2,
            n1: self.n1,
            n2: self.n2,
        };
        params.validate().map_err(|e| e.to_string())?;
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SoftCoverSource {
    /// `p_X = Bern(px)`, `Y = X ⊕ Bern(flip)`, sampling PMF uniform unless given.
    Binary { px: f64, flip: f64, q: Option<Vec<f64>> },
    /// Joint over `(X, Y)` and the sampling PMF over `X`.
    Files { joint: PathBuf, q: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftCoverSpec {
    pub source: SoftCoverSource,
    pub n: Vec<usize>,
    /// Rates in bits; offsets from the threshold when `relative` is set.
    pub rates: Vec<f64>,
    #[serde(default)]
    pub relative: bool,
    /// Also run the coset-code ensemble.
    #[serde(default)]
    pub coset: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    /// `(p_flip, q_flip)` of the binary example.
    pub example1: Option<[f64; 2]>,
    /// Path of an auxiliary joint over `(Q, W1, W2, X1, X2, Y)`.
    pub aux: Option<PathBuf>,
    #[serde(default = "default_theta_points")]
    pub theta_points: usize,
}

fn default_theta_points() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default = "default_results")]
    pub results: String,
    #[serde(default = "default_summary")]
    pub summary: String,
}

fn default_results() -> String {
    "results.csv".into()
}

fn default_summary() -> String {
    "summary.json".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            results: default_results(),
            summary: default_summary(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub source: Option<SourceSpec>,
    #[serde(default)]
    pub codes: Vec<CodeSpec>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub soft_cover: Option<SoftCoverSpec>,
    #[serde(default)]
    pub region: Option<RegionSpec>,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

fn default_trials() -> usize {
    20
}

fn default_delta() -> f64 {
    1.5
}

fn default_eta() -> f64 {
    0.1
}

fn default_budget() -> usize {
    DEFAULT_BUDGET
}

/// Parse failure with file and line context.
#[derive(Debug)]
pub struct SpecError(pub String);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SpecError {}

/// Whether a finding stops a run or only marks some sweep points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Invalid,
    /// The point is skipped and the run reported as partial.
    Budget,
}

/// A validation finding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem {
    pub field: String,
    pub kind: ProblemKind,
    pub message: String,
}

/// Size of an enumeration the run will perform.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostEstimate {
    pub what: String,
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub problems: Vec<Problem>,
    pub costs: Vec<CostEstimate>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.problems.is_empty()
    }

    /// Findings other than per-point budget overruns.
    pub fn fatal(&self) -> impl Iterator<Item = &Problem> {
        self.problems.iter().filter(|p| p.kind == ProblemKind::Invalid)
    }
}

pub fn parse_spec(text: &str, origin: &Path) -> Result<ExperimentSpec, SpecError> {
    serde_json::from_str(text)
        .map_err(|e| SpecError(format!("{}:{}:{}: {}", origin.display(), e.line(), e.column(), e)))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
}

pub fn load_joint(path: &Path) -> Result<JointPmf, String> {
    let f: PmfFile = read_json(path)?;
    JointPmf::from_file(&f).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn load_pmf(path: &Path) -> Result<Pmf, String> {
    let j = load_joint(path)?;
    if j.num_vars() != 1 {
        return Err(format!("{}: expected a single-variable PMF", path.display()));
    }
    Ok(j.to_pmf())
}

pub fn load_cond(path: &Path) -> Result<CondPmf, String> {
    let f: CondPmfFile = read_json(path)?;
    CondPmf::from_file(&f).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn load_aux(path: &Path) -> Result<AuxPmf, String> {
    let j = load_joint(path)?;
    AuxPmf::new(j).map_err(|e| format!("{}: {e}", path.display()))
}

impl ExperimentSpec {
    /// Builds the synthesis problem for one code point.
    pub fn problem(&self, code: &CodeSpec, base: &Path) -> Result<SynthesisProblem, String> {
        let params = code.params()?;
        let source = self.source.as_ref().ok_or("mode needs a `source`")?;
        match source {
            SourceSpec::Binary {
                p_flip,
                theta1,
                theta2,
                out_flip,
            } => binary_symmetric_problem(*p_flip, *theta1, *theta2, *out_flip, self.delta, self.eta, params)
                .map_err(|e| e.to_string()),
            SourceSpec::Files {
                target,
                channel1,
                channel2,
                output,
            } => SynthesisProblem::new(
                load_joint(&base.join(target))?,
                load_cond(&base.join(channel1))?,
                load_cond(&base.join(channel2))?,
                load_cond(&base.join(output))?,
                self.delta,
                self.eta,
                params,
            )
            .map_err(|e| e.to_string()),
        }
    }

    /// Schema and invariant checks plus a dry-run cost estimate; paths are
    /// resolved against `base`.
    pub fn validate(&self, base: &Path) -> ValidationReport {
        let mut problems = Vec::new();
        let mut costs = Vec::new();
        let mut over = Vec::new();
        let mut bad = |field: &str, message: String| {
            problems.push(Problem {
                field: field.into(),
                kind: ProblemKind::Invalid,
                message,
            })
        };
        let budget = |over: &mut Vec<Problem>, field: &str, message: String| {
            over.push(Problem {
                field: field.into(),
                kind: ProblemKind::Budget,
                message,
            })
        };
        if self.trials == 0 {
            bad("trials", "must be positive".into());
        }
        if !(self.delta > 0.0) || !(self.eta > 0.0) {
            bad("delta/eta", "slacks must be positive".into());
        }
        match self.mode {
            Mode::Synthesize | Mode::Diagnostics => {
                if self.codes.is_empty() {
                    bad("codes", "sweep is empty".into());
                }
                if self.source.is_none() {
                    bad("source", "missing".into());
                }
                for (i, code) in self.codes.iter().enumerate() {
                    let field = format!("codes[{i}]");
                    if let Err(e) = code.params() {
                        bad(&field, e);
                        continue;
                    }
                    if self.source.is_some() {
                        match self.problem(code, base) {
                            Err(e) => bad(&field, e),
                            Ok(prob) => {
                                if let Err(e) = prob.require_admissible() {
                                    bad(&field, e.to_string());
                                }
                                let [k1, k2, ky] = prob.alphabet_sizes();
                                let n = code.n as f64;
                                let words = (k1 as f64 * k2 as f64 * ky as f64).powf(n);
                                costs.push(CostEstimate {
                                    what: format!("{field}: induced joint cells"),
                                    size: words,
                                });
                                let cw = (code.p as f64).powi((code.k + code.l1.max(code.l2)) as i32);
                                costs.push(CostEstimate {
                                    what: format!("{field}: codewords per table"),
                                    size: cw,
                                });
                                if words > self.budget as f64 {
                                    budget(
                                        &mut over,
                                        &field,
                                        format!("enumeration budget exceeded: {words:.3e} cells > {}", self.budget),
                                    );
                                }
                            }
                        }
                    }
                }
            }
            Mode::SoftCover => match &self.soft_cover {
                None => bad("soft_cover", "missing".into()),
                Some(sc) => {
                    if sc.n.is_empty() {
                        bad("soft_cover.n", "sweep is empty".into());
                    }
                    if sc.rates.is_empty() {
                        bad("soft_cover.rates", "sweep is empty".into());
                    }
                    match soft_cover_parts(sc, base) {
                        Err(e) => bad("soft_cover.source", e),
                        Ok((joint, q)) => {
                            let ky = joint.sizes()[1] as f64;
                            let kx = q.len() as f64;
                            if let Err(e) = ucc_synth::soft_cover::threshold_rate(&joint, &q) {
                                bad("soft_cover.source", e.to_string());
                            }
                            for &n in &sc.n {
                                let cells = ky.powi(n as i32);
                                costs.push(CostEstimate {
                                    what: format!("soft_cover n={n}: output words"),
                                    size: cells,
                                });
                                if cells > self.budget as f64 || kx.powi(n as i32) > self.budget as f64 {
                                    budget(
                                        &mut over,
                                        "soft_cover.n",
                                        format!("enumeration budget exceeded at n={n}: {cells:.3e} output words"),
                                    );
                                }
                            }
                        }
                    }
                }
            },
            Mode::RateRegion | Mode::Example1 => match &self.region {
                None => bad("region", "missing".into()),
                Some(r) => {
                    if r.example1.is_none() && r.aux.is_none() {
                        bad("region", "needs `example1` or `aux`".into());
                    }
                    if let Some([p, q]) = r.example1 {
                        if let Err(e) = ucc_synth::region::example1_aux(p, q, 0.0, 0.0) {
                            bad("region.example1", e.to_string());
                        }
                        costs.push(CostEstimate {
                            what: "theta grid points".into(),
                            size: r.theta_points as f64,
                        });
                    }
                    if let Some(path) = &r.aux {
                        if let Err(e) = load_aux(&base.join(path)) {
                            bad("region.aux", e);
                        }
                    }
                    if self.mode == Mode::Example1 && r.example1.is_none() {
                        bad("region.example1", "example1 mode needs `example1: [p, q]`".into());
                    }
                }
            },
        }
        problems.extend(over);
        ValidationReport { problems, costs }
    }
}

/// The `(X, Y)` joint and sampling PMF of a soft-covering sweep.
pub fn soft_cover_parts(sc: &SoftCoverSpec, base: &Path) -> Result<(JointPmf, Pmf), String> {
    match &sc.source {
        SoftCoverSource::Binary { px, flip, q } => {
            let inst = ucc_synth::soft_cover::binary_instance(*px, *flip, 0.0, 1).map_err(|e| e.to_string())?;
            let q = match q {
                Some(v) => Pmf::from_probs(v.clone()).map_err(|e| e.to_string())?,
                None => inst.q().clone(),
            };
            Ok((inst.joint().clone(), q))
        }
        SoftCoverSource::Files { joint, q } => Ok((load_joint(&base.join(joint))?, load_pmf(&base.join(q))?)),
    }
}
