//! Sampling campaigns: draw maps for a list of (n, g) pairs, measure them and
//! aggregate the second-moment statistics.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec;
use crate::enumerate::Variant;
use crate::error::{Error, Result};
use crate::geometry::{analyze, GeometryReport, Metrics, Radius, DEFAULT_SEARCH_CAP};
use crate::map::CombinatorialMap;
use crate::sampler::{Method, Sampler, SamplerSpec, DEFAULT_ATTEMPT_BUDGET, RNG_NAME};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.5758293035489004;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairConfig {
    pub n: usize,
    /// Defaults to `round(theta·n)`.
    #[serde(default)]
    pub g: Option<usize>,
    #[serde(default)]
    pub method: Option<Method>,
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    #[serde(default)]
    pub theta: Option<f64>,
    pub pairs: Vec<PairConfig>,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_metrics")]
    pub metrics: String,
    #[serde(default = "default_cap")]
    pub search_cap: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub attempt_budget: u64,
    #[serde(default = "default_steps")]
    pub mcmc_steps: u64,
    #[serde(default)]
    pub out_csv: Option<PathBuf>,
    #[serde(default)]
    pub out_summary: Option<PathBuf>,
    #[serde(default)]
    pub out_maps: Option<PathBuf>,
}

fn default_method() -> Method {
    Method::Exact
}
fn default_samples() -> usize {
    100
}
fn default_metrics() -> String {
    "pr,systole,two-cycles,ct,diameter".into()
}
fn default_cap() -> usize {
    DEFAULT_SEARCH_CAP
}
fn default_budget() -> u64 {
    DEFAULT_ATTEMPT_BUDGET
}
fn default_steps() -> u64 {
    1000
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))
    }

    /// Resolved sampler spec per pair.
    pub fn specs(&self) -> Result<Vec<(SamplerSpec, usize)>> {
        if let Some(t) = self.theta {
            if !(t > 0.0 && t < 0.5) {
                return Err(Error::Invalid(format!("theta must lie in (0, 1/2), got {t}")));
            }
        }
        if self.pairs.is_empty() {
            return Err(Error::Invalid("campaign has no (n, g) pairs".into()));
        }
        self.pairs
            .iter()
            .map(|p| {
                let g = match (p.g, self.theta) {
                    (Some(g), _) => g,
                    (None, Some(t)) => (t * p.n as f64).round() as usize,
                    (None, None) => {
                        return Err(Error::Invalid(format!("pair with n={} needs g or theta", p.n)))
                    }
                };
                let spec = SamplerSpec {
                    n: p.n,
                    g,
                    method: p.method.unwrap_or(self.method),
                    seed: self.seed,
                    attempt_budget: self.attempt_budget,
                    mcmc_steps: self.mcmc_steps,
                    mcmc_reroot: true,
                };
                spec.validate()?;
                Ok((spec, p.samples.unwrap_or(self.samples)))
            })
            .collect()
    }

    pub fn metrics(&self) -> Result<Metrics> {
        Metrics::parse(&self.metrics).map_err(Error::Invalid)
    }
}

/// One measured map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub map_index: usize,
    pub pair: usize,
    pub n: usize,
    pub g: usize,
    pub report: GeometryReport,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Quantiles {
    pub min: Option<String>,
    pub median: Option<String>,
    pub max: Option<String>,
    /// Median divided by `ln n`, when finite.
    pub median_over_ln_n: Option<f64>,
}

fn quantiles(mut v: Vec<Radius>, n: usize) -> Quantiles {
    if v.is_empty() {
        return Quantiles::default();
    }
    v.sort();
    let med = v[(v.len() - 1) / 2];
    Quantiles {
        min: Some(v[0].to_string()),
        median: Some(med.to_string()),
        max: Some(v[v.len() - 1].to_string()),
        median_over_ln_n: med.finite().filter(|_| n > 1).map(|m| m as f64 / (n as f64).ln()),
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let nf = trials as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SecondMoment {
    pub samples: usize,
    pub mean_x: f64,
    pub mean_x2: f64,
    pub p_positive: f64,
    pub p_positive_se: f64,
    pub p_positive_ci99: (f64, f64),
    /// `E(X)²/E(X²)`, a lower bound on `P(X>0)`.
    pub ratio: Option<f64>,
}

pub fn second_moment(xs: &[usize]) -> SecondMoment {
    let k = xs.len();
    if k == 0 {
        return SecondMoment::default();
    }
    let kf = k as f64;
    let mean_x = xs.iter().sum::<usize>() as f64 / kf;
    let mean_x2 = xs.iter().map(|&x| (x * x) as f64).sum::<f64>() / kf;
    let pos = xs.iter().filter(|&&x| x > 0).count();
    let p = pos as f64 / kf;
    SecondMoment {
        samples: k,
        mean_x,
        mean_x2,
        p_positive: p,
        p_positive_se: (p * (1.0 - p) / kf).sqrt(),
        p_positive_ci99: wilson(pos, k, Z99),
        ratio: (mean_x2 > 0.0).then(|| mean_x * mean_x / mean_x2),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairSummary {
    pub pair: usize,
    pub n: usize,
    pub g: usize,
    pub method: Method,
    pub requested: usize,
    pub produced: usize,
    pub error: Option<String>,
    pub x: Option<SecondMoment>,
    pub pr: Quantiles,
    pub ct_upper: Quantiles,
    pub caveat: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub config: CampaignConfig,
    pub seed: u64,
    pub version: &'static str,
    pub rng: &'static str,
    pub variant: &'static str,
    pub workers: usize,
    pub pairs: Vec<PairSummary>,
    #[serde(skip)]
    pub rows: Vec<Row>,
    #[serde(skip)]
    pub maps: Vec<CombinatorialMap>,
    pub wall_clock_ms: u128,
}

/// Worker count from `GENUSLAB_WORKERS`, defaulting to the available cores.
pub fn workers_from_env() -> Result<usize> {
    match std::env::var("GENUSLAB_WORKERS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(k),
            _ => Err(Error::Invalid(format!("GENUSLAB_WORKERS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|k| k.get()).unwrap_or(1)),
    }
}

pub fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Invalid(e.to_string()))
}

/// Samples and measures every pair; rows come out ordered by (pair, sample).
pub fn run_campaign(config: &CampaignConfig, workers: usize) -> Result<RunRecord> {
    let start = Instant::now();
    let specs = config.specs()?;
    let metrics = config.metrics()?;
    let pool = pool(workers)?;
    let mut rows = Vec::new();
    let mut maps = Vec::new();
    let mut pairs = Vec::new();
    for (pi, (spec, count)) in specs.into_iter().enumerate() {
        let sampler = Sampler::new(spec.clone())?;
        let results: Vec<Result<(CombinatorialMap, GeometryReport)>> = pool.install(|| {
            (0..count)
                .into_par_iter()
                .map(|si| {
                    let m = sampler.draw(pi as u32, si as u32)?;
                    let r = analyze(&m, metrics, config.search_cap);
                    Ok((m, r))
                })
                .collect()
        });
        let mut error = None;
        let mut xs = Vec::new();
        let mut prs = Vec::new();
        let mut cts = Vec::new();
        let mut produced = 0;
        for res in results {
            match res {
                Ok((m, report)) => {
                    produced += 1;
                    xs.extend(report.x());
                    prs.extend(report.planarity_radius);
                    cts.extend(report.ct_upper);
                    rows.push(Row { map_index: rows.len(), pair: pi, n: spec.n, g: spec.g, report });
                    maps.push(m);
                }
                Err(e) => {
                    error.get_or_insert_with(|| e.to_string());
                }
            }
        }
        pairs.push(PairSummary {
            pair: pi,
            n: spec.n,
            g: spec.g,
            method: spec.method,
            requested: count,
            produced,
            error,
            x: metrics.two_cycles.then(|| second_moment(&xs)),
            pr: quantiles(prs, spec.n),
            ct_upper: quantiles(cts, spec.n),
            caveat: (spec.method == Method::Mcmc).then_some("subject to mixing assumptions"),
        });
    }
    Ok(RunRecord {
        config: config.clone(),
        seed: config.seed,
        version: VERSION,
        rng: RNG_NAME,
        variant: Variant::Corrected.name(),
        workers,
        pairs,
        rows,
        maps,
        wall_clock_ms: start.elapsed().as_millis(),
    })
}

pub const CSV_HEADER: [&str; 11] = [
    "map_index",
    "n",
    "g",
    "pr",
    "ball_planar_radius",
    "systole",
    "x_nonsep_2cycles",
    "ct_lower",
    "ct_upper",
    "diameter",
    "flags",
];

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn csv_record(row: &Row) -> [String; 11] {
    let r = &row.report;
    let systole = r.systole.as_ref().map(|s| match s {
        Some(c) => c.length.to_string(),
        None => Radius::Infinite.to_string(),
    });
    let ct_upper = r.ct_upper.map(|u| {
        if r.ct_exact == Some(false) {
            format!("{u}?")
        } else {
            u.to_string()
        }
    });
    [
        row.map_index.to_string(),
        row.n.to_string(),
        row.g.to_string(),
        opt(r.planarity_radius),
        opt(r.ball_planar_radius),
        opt(systole),
        opt(r.x()),
        opt(r.ct_lower),
        opt(ct_upper),
        opt(r.diameter),
        r.flags.join(";"),
    ]
}

pub fn write_csv<W: Write>(w: W, rows: &[Row]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.into());
    out.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        out.write_record(csv_record(row)).map_err(io)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(mut w: W, rec: &RunRecord) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, rec).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    Ok(())
}

/// Runs a campaign and writes whichever outputs the config names.
pub fn run_and_write(config: &CampaignConfig, workers: usize) -> Result<RunRecord> {
    let rec = run_campaign(config, workers)?;
    if let Some(p) = &config.out_csv {
        write_csv(std::fs::File::create(p)?, &rec.rows)?;
    }
    if let Some(p) = &config.out_maps {
        codec::write_ndjson(std::io::BufWriter::new(std::fs::File::create(p)?), &rec.maps)?;
    }
    if let Some(p) = &config.out_summary {
        write_summary(std::fs::File::create(p)?, &rec)?;
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> CampaignConfig {
        CampaignConfig::from_json(
            r#"{"pairs":[{"n":2,"g":1}],"method":"exhaustive","samples":5,"seed":3}"#,
        )
        .unwrap()
    }

    #[test]
    fn single_map_pair() {
        let rec = run_campaign(&tiny(), 2).unwrap();
        let x = rec.pairs[0].x.clone().unwrap();
        assert_eq!((x.mean_x, x.p_positive), (6.0, 1.0));
        assert_eq!(rec.rows.len(), 5);
    }

    #[test]
    fn theta_pairs() {
        let mut c = tiny();
        c.theta = Some(0.1);
        c.pairs = vec![PairConfig { n: 20, g: None, method: Some(Method::Exact), samples: Some(1) }];
        assert_eq!(c.specs().unwrap()[0].0.g, 2);
        c.theta = Some(0.7);
        assert!(c.specs().is_err());
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson(50, 100, Z99);
        assert!(lo < 0.5 && hi > 0.5 && lo > 0.3 && hi < 0.7);
        assert_eq!(wilson(0, 10, Z99).0, 0.0);
    }
}
