//! Long-format tables for external plotting.

use std::str::FromStr;

use anyhow::{anyhow, bail, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    TvVsN,
    ThetaSweep,
    ThresholdHeatmap,
}

impl FromStr for PlotKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tv-vs-n" => Ok(PlotKind::TvVsN),
            "theta-sweep" => Ok(PlotKind::ThetaSweep),
            "threshold-heatmap" => Ok(PlotKind::ThresholdHeatmap),
            other => bail!("unknown plot kind `{other}` (expected tv-vs-n, theta-sweep or threshold-heatmap)"),
        }
    }
}

impl PlotKind {
    pub fn header(self) -> &'static [&'static str] {
        match self {
            PlotKind::TvVsN => &["series", "n", "seed", "tv"],
            PlotKind::ThetaSweep => &["theta", "sum_rate", "feasible", "curve"],
            PlotKind::ThresholdHeatmap => &["ensemble", "n", "rate", "offset", "mean_tv", "seeds"],
        }
    }
}

struct Table {
    header: csv::StringRecord,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn parse(input: &[u8]) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = r.headers()?.clone();
        let rows = r.records().collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Table { header, rows })
    }

    fn col(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow!("input has no `{name}` column"))
    }

    fn has(&self, name: &str) -> bool {
        self.header.iter().any(|h| h == name)
    }
}

/// Converts a results CSV into the tidy table for `kind`.
pub fn plot_data(input: &[u8], kind: PlotKind) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(kind.header())?;
    if input.iter().all(u8::is_ascii_whitespace) {
        return Ok(w.into_inner()?);
    }
    let t = Table::parse(input)?;
    match kind {
        PlotKind::TvVsN => {
            let (n, seed, tv) = (t.col("n")?, t.col("seed")?, t.col("tv")?);
            let ens = t.has("ensemble").then(|| t.col("ensemble")).transpose()?;
            let rate = t.has("rate").then(|| t.col("rate")).transpose()?;
            for r in &t.rows {
                if r[tv].is_empty() {
                    continue;
                }
                let series = match (ens, rate) {
                    (Some(e), Some(q)) => format!("{} rate={}", &r[e], &r[q]),
                    _ => "synthesis".to_string(),
                };
                w.write_record([series.as_str(), &r[n], &r[seed], &r[tv]])?;
            }
        }
        PlotKind::ThetaSweep => {
            let (theta, sum, feas) = (t.col("theta")?, t.col("sum_rate")?, t.col("feasible")?);
            let curve = t.has("curve").then(|| t.col("curve")).transpose()?;
            for r in &t.rows {
                let c = curve.map(|c| &r[c]).unwrap_or("structured");
                w.write_record([&r[theta], &r[sum], &r[feas], c])?;
            }
        }
        PlotKind::ThresholdHeatmap => {
            let (n, rate, thr, tv) = (t.col("n")?, t.col("rate")?, t.col("threshold")?, t.col("tv")?);
            let ens = t.col("ensemble")?;
            // groups in order of first appearance
            let mut groups: Vec<((String, String, String), f64, f64, usize)> = Vec::new();
            for r in &t.rows {
                let key = (r[ens].to_string(), r[n].to_string(), r[rate].to_string());
                let offset = r[rate].parse::<f64>()? - r[thr].parse::<f64>()?;
                let v: f64 = r[tv].parse()?;
                match groups.iter_mut().find(|g| g.0 == key) {
                    Some(g) => {
                        g.2 += v;
                        g.3 += 1;
                    }
                    None => groups.push((key, offset, v, 1)),
                }
            }
            for ((e, n, rate), offset, sum, count) in groups {
                let mean = sum / count as f64;
                w.write_record([e, n, rate, offset.to_string(), mean.to_string(), count.to_string()])?;
            }
        }
    }
    Ok(w.into_inner()?)
}
