//! Dispatch of a validated spec to the library and persistence of results.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use ucc_synth::region::{
    beta_region, example1_structured_min_on, example1_unstructured_sum_min, min_sum_rate, projected_long_form, theta_sweep,
    Inequality, LinearInequalitySystem, RegionError,
};
use ucc_synth::AuxPmf;
use ucc_synth::soft_cover::{ensemble_mean_tv, iid_vs_pairwise, ChangeOfMeasureInstance, SoftCoverReport};
use ucc_synth::synthesis::{ambiguity_probability, overflow_probability, Protocol, SynthesisError};
use ucc_synth::ucc::{sample_codebooks, Side};

use crate::manifest::OutputRecord;
use crate::spec::{load_aux, soft_cover_parts, CodeSpec, ExperimentSpec, Mode, RegionSpec};

/// Files written by one run plus the over-budget flag.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub outputs: Vec<OutputRecord>,
    pub partial: bool,
    pub seeds: Vec<u64>,
    timings: Vec<(String, f64)>,
}

impl RunOutcome {
    fn time<T>(&mut self, label: impl Into<String>, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let v = f();
        self.timings.push((label.into(), t.elapsed().as_secs_f64()));
        v
    }
}

/// Seeds of the trials of a sweep point: `seed, seed + 1, ...`.
pub fn trial_seeds(spec: &ExperimentSpec) -> Vec<u64> {
    (0..spec.trials as u64).map(|t| spec.seed.wrapping_add(t)).collect()
}

fn write_file(out: &Path, name: &str, bytes: &[u8], deterministic: bool, outcome: &mut RunOutcome) -> Result<()> {
    let path = out.join(name);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    outcome.outputs.push(OutputRecord::new(name, bytes, deterministic));
    Ok(())
}

fn csv_bytes<S: Serialize>(rows: &[S], header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(vec![]);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| anyhow!("{e}"))
}

fn json_bytes(v: &impl Serialize) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}

/// Runs `spec`, reading inputs relative to `base` and writing into `out`.
pub fn run(spec: &ExperimentSpec, base: &Path, out: &Path) -> Result<RunOutcome> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut outcome = RunOutcome::default();
    match spec.mode {
        Mode::Synthesize => synthesize(spec, base, out, &mut outcome)?,
        Mode::Diagnostics => diagnostics(spec, base, out, &mut outcome)?,
        Mode::SoftCover => soft_cover(spec, base, out, &mut outcome)?,
        Mode::RateRegion | Mode::Example1 => {
            let region = spec.region.as_ref().ok_or_else(|| anyhow!("missing `region`"))?;
            rate_region(spec, region, base, out, &mut outcome)?
        }
    }
    let mut timings = String::from("label,seconds\n");
    for (label, secs) in &outcome.timings {
        timings.push_str(&format!("{label},{secs:.6}\n"));
    }
    write_file(out, "timings.csv", timings.as_bytes(), false, &mut outcome)?;
    Ok(outcome)
}

#[derive(Serialize)]
struct SynthRow {
    n: usize,
    p: u32,
    k: usize,
    l1: usize,
    l2: usize,
    n1: usize,
    n2: usize,
    seed: u64,
    tv: Option<f64>,
    status: &'static str,
}

const CODE_HEADER: [&str; 8] = ["n", "p", "k", "l1", "l2", "N1", "N2", "seed"];

fn synthesize(spec: &ExperimentSpec, base: &Path, out: &Path, outcome: &mut RunOutcome) -> Result<()> {
    let seeds = trial_seeds(spec);
    outcome.seeds = seeds.clone();
    let jobs: Vec<(CodeSpec, u64)> = spec.codes.iter().flat_map(|c| seeds.iter().map(move |&s| (*c, s))).collect();
    let rows: Vec<SynthRow> = outcome.time("synthesize", || {
        jobs.par_iter()
            .map(|(code, seed)| -> Result<SynthRow> {
                let prob = spec.problem(code, base).map_err(|e| anyhow!(e))?;
                let pair = sample_codebooks(*seed, prob.params())?;
                let (tv, status) = match Protocol::with_budget(&prob, &pair, spec.budget).and_then(|p| p.tv()) {
                    Ok(tv) => (Some(tv), "ok"),
                    Err(SynthesisError::Budget { .. }) => (None, "over_budget"),
                    Err(e) => return Err(e.into()),
                };
                Ok(SynthRow {
                    n: code.n,
                    p: code.p,
                    k: code.k,
                    l1: code.l1,
                    l2: code.l2,
                    n1: code.n1,
                    n2: code.n2,
                    seed: *seed,
                    tv,
                    status,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    outcome.partial = rows.iter().any(|r| r.status != "ok");
    let mut header = CODE_HEADER.to_vec();
    header.extend(["tv", "status"]);
    write_file(out, &spec.outputs.results, &csv_bytes(&rows, &header)?, true, outcome)?;

    let summary: Vec<_> = spec
        .codes
        .iter()
        .map(|c| {
            let mut tvs: Vec<f64> = rows
                .iter()
                .filter(|r| (r.n, r.k, r.l1, r.l2, r.n1, r.n2, r.p) == (c.n, c.k, c.l1, c.l2, c.n1, c.n2, c.p))
                .filter_map(|r| r.tv)
                .collect();
            tvs.sort_by(f64::total_cmp);
            json!({ "code": c, "completed": tvs.len(), "median_tv": median(&tvs), "mean_tv": mean(&tvs) })
        })
        .collect();
    write_file(out, &spec.outputs.summary, &json_bytes(&json!({ "mode": spec.mode, "runs": summary }))?, true, outcome)
}

fn median(sorted: &[f64]) -> Option<f64> {
    let m = sorted.len();
    match m {
        0 => None,
        _ if m % 2 == 1 => Some(sorted[m / 2]),
        _ => Some((sorted[m / 2 - 1] + sorted[m / 2]) / 2.0),
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

#[derive(Serialize)]
struct DiagRow {
    n: usize,
    p: u32,
    k: usize,
    l1: usize,
    l2: usize,
    n1: usize,
    n2: usize,
    seed: u64,
    overflow1: f64,
    overflow2: f64,
    ambiguity: f64,
    competitor: f64,
    bin_mass: f64,
}

fn diagnostics(spec: &ExperimentSpec, base: &Path, out: &Path, outcome: &mut RunOutcome) -> Result<()> {
    let seeds = trial_seeds(spec);
    outcome.seeds = seeds.clone();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for code in &spec.codes {
        let prob = spec.problem(code, base).map_err(|e| anyhow!(e))?;
        let params = *prob.params();
        let cells = prob.alphabet_sizes().iter().map(|&k| k as f64).product::<f64>().powi(code.n as i32);
        if cells > spec.budget as f64 {
            outcome.partial = true;
            summary.push(json!({ "code": code, "status": "over_budget" }));
            continue;
        }
        let label = format!("diagnostics n={} k={} l1={} l2={}", code.n, code.k, code.l1, code.l2);
        let per_seed = outcome.time(label, || {
            seeds
                .par_iter()
                .map(|&s| -> Result<DiagRow> {
                    let amb = ambiguity_probability(&prob, &params, &[s])?;
                    Ok(DiagRow {
                        n: code.n,
                        p: code.p,
                        k: code.k,
                        l1: code.l1,
                        l2: code.l2,
                        n1: code.n1,
                        n2: code.n2,
                        seed: s,
                        overflow1: overflow_probability(&prob, &params, &[s], Side::One)?,
                        overflow2: overflow_probability(&prob, &params, &[s], Side::Two)?,
                        ambiguity: amb.probability,
                        competitor: amb.competitor,
                        bin_mass: amb.bin_mass,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let pooled = ambiguity_probability(&prob, &params, &seeds)?;
        let ov = |side| overflow_probability(&prob, &params, &seeds, side);
        summary.push(json!({
            "code": code,
            "status": "ok",
            "overflow1": ov(Side::One)?,
            "overflow2": ov(Side::Two)?,
            "ambiguity": pooled.probability,
            "competitor": pooled.competitor,
            "bin_mass": pooled.bin_mass,
        }));
        rows.extend(per_seed);
    }
    let mut header = CODE_HEADER.to_vec();
    header.extend(["overflow1", "overflow2", "ambiguity", "competitor", "bin_mass"]);
    write_file(out, &spec.outputs.results, &csv_bytes(&rows, &header)?, true, outcome)?;
    write_file(out, &spec.outputs.summary, &json_bytes(&json!({ "mode": spec.mode, "runs": summary }))?, true, outcome)
}

#[derive(Serialize)]
struct SoftRow {
    n: usize,
    rate: f64,
    threshold: f64,
    ensemble: &'static str,
    seed: u64,
    codebook_size: usize,
    tv: f64,
    l1: f64,
}

fn soft_rows<'a>(report: &'a SoftCoverReport, ensemble: &'static str) -> impl Iterator<Item = SoftRow> + 'a {
    report.seeds.iter().enumerate().map(move |(i, &seed)| SoftRow {
        n: report.n,
        rate: report.rate,
        threshold: report.threshold,
        ensemble,
        seed,
        codebook_size: report.codebook_size,
        tv: report.tv[i],
        l1: report.l1[i],
    })
}

fn soft_cover(spec: &ExperimentSpec, base: &Path, out: &Path, outcome: &mut RunOutcome) -> Result<()> {
    let sc = spec.soft_cover.as_ref().ok_or_else(|| anyhow!("missing `soft_cover`"))?;
    let (joint, q) = soft_cover_parts(sc, base).map_err(|e| anyhow!(e))?;
    let seeds = trial_seeds(spec);
    outcome.seeds = seeds.clone();
    let base_inst = ChangeOfMeasureInstance::new(joint, q, 0.0, 1)?;
    let threshold = base_inst.threshold();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let [kx, ky] = [base_inst.q().len() as f64, base_inst.joint().sizes()[1] as f64];
    for &n in &sc.n {
        if kx.powi(n as i32).max(ky.powi(n as i32)) > spec.budget as f64 {
            outcome.partial = true;
            summary.push(json!({ "n": n, "status": "over_budget" }));
            continue;
        }
        for &r in &sc.rates {
            let rate = if sc.relative { threshold + r } else { r };
            let inst = base_inst.at(rate.max(0.0), n)?;
            let label = format!("soft-cover n={n} rate={rate}");
            let (iid, coset) = outcome.time(label, || -> Result<_> {
                if sc.coset {
                    let c = iid_vs_pairwise(&inst, &seeds, true)?;
                    Ok((c.iid, Some(c.coset)))
                } else {
                    Ok((ensemble_mean_tv(&inst, &seeds)?, None))
                }
            })?;
            rows.extend(soft_rows(&iid, "iid"));
            summary.push(json!({
                "n": n, "status": "ok", "rate": inst.rate(), "ensemble": "iid",
                "mean_tv": iid.mean_tv, "quantiles": iid.quantiles,
            }));
            if let Some(c) = &coset {
                rows.extend(soft_rows(c, "coset"));
                summary.push(json!({
                    "n": n, "status": "ok", "rate": inst.rate(), "ensemble": "coset",
                    "mean_tv": c.mean_tv, "quantiles": c.quantiles,
                }));
            }
        }
    }
    let header = ["n", "rate", "threshold", "ensemble", "seed", "codebook_size", "tv", "l1"];
    write_file(out, &spec.outputs.results, &csv_bytes(&rows, &header)?, true, outcome)?;
    let doc = json!({ "mode": spec.mode, "threshold": threshold, "runs": summary });
    write_file(out, &spec.outputs.summary, &json_bytes(&doc)?, true, outcome)
}

#[derive(Serialize)]
struct ConstraintDoc {
    text: String,
    coeffs: Vec<f64>,
    constant: f64,
}

fn constraints(sys: &LinearInequalitySystem<f64>) -> Vec<ConstraintDoc> {
    sys.rows()
        .iter()
        .map(|r: &Inequality<f64>| {
            let mut one = LinearInequalitySystem::new(sys.vars().iter().cloned());
            one.add_geq(r.coeffs.clone(), r.constant).expect("same arity");
            ConstraintDoc {
                text: one.to_string().trim().to_string(),
                coeffs: r.coeffs.clone(),
                constant: r.constant,
            }
        })
        .collect()
}

fn region_doc(aux: &AuxPmf) -> Result<serde_json::Value> {
    let beta: LinearInequalitySystem<f64> = beta_region(aux)?;
    let projected: LinearInequalitySystem<f64> = projected_long_form(aux)?;
    let min = match min_sum_rate(&beta) {
        Ok(v) => Some(v),
        Err(RegionError::Infeasible | RegionError::Unbounded) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(json!({
        "vars": beta.vars(),
        "constraints": constraints(&beta),
        "min_sum_rate": min,
        "projected_long_form": constraints(&projected),
        "projected_min_sum_rate": min_sum_rate(&projected).ok(),
        "unstructured_sum_bound": aux.unstructured_sum_bound(),
    }))
}

#[derive(Serialize)]
struct ThetaRow {
    theta: f64,
    curve: &'static str,
    sum_rate: f64,
    feasible: bool,
}

fn rate_region(spec: &ExperimentSpec, region: &RegionSpec, base: &Path, out: &Path, outcome: &mut RunOutcome) -> Result<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("mode".into(), json!(spec.mode));
    if let Some(path) = &region.aux {
        let aux = load_aux(&base.join(path)).map_err(|e| anyhow!(e))?;
        doc.insert("aux".into(), outcome.time("aux region", || region_doc(&aux))?);
    }
    if let Some([p, q]) = region.example1 {
        let points = region.theta_points.max(1);
        let (best, unstructured, sweep) = outcome.time("example1", || -> Result<_> {
            Ok((
                example1_structured_min_on(p, q, points)?,
                example1_unstructured_sum_min(p, q)?,
                theta_sweep(p, q, points)?,
            ))
        })?;
        let identity = ucc_synth::region::example1_aux(p, q, 0.0, 0.0)?;
        let mut e1 = region_doc(&identity)?;
        e1["p"] = json!(p);
        e1["q"] = json!(q);
        e1["structured_min"] = json!(best.value);
        e1["argmin_theta"] = json!(best.theta);
        e1["unstructured_min"] = json!(unstructured.value);
        e1["unstructured_argmin_theta"] = json!(unstructured.theta);
        e1["theta_points"] = json!(points);
        doc.insert("example1".into(), e1);
        let rows: Vec<ThetaRow> = sweep
            .iter()
            .flat_map(|s| {
                [
                    ThetaRow {
                        theta: s.theta,
                        curve: "structured",
                        sum_rate: s.structured_min,
                        feasible: true,
                    },
                    ThetaRow {
                        theta: s.theta,
                        curve: "unstructured",
                        sum_rate: s.unstructured_bound,
                        feasible: true,
                    },
                ]
            })
            .collect();
        let header = ["theta", "curve", "sum_rate", "feasible"];
        write_file(out, &spec.outputs.results, &csv_bytes(&rows, &header)?, true, outcome)?;
    }
    write_file(out, &spec.outputs.summary, &json_bytes(&doc)?, true, outcome)
}

/// Directory that relative paths inside a config are resolved against.
pub fn config_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}
