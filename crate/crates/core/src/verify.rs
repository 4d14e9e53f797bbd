//! The acceptance suite: eleven numbered checks, each run at a fast or full
//! level and reported as pass/fail with a short detail line.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::campaign::{self, CampaignConfig, PairConfig, Z99};
use crate::cms::{cms_backward, cms_forward, distances_match, PointedQuadrangulation, Sign};
use crate::codec;
use crate::enumerate::{cc_table, derived_counts, planar_closed_form, Variant};
use crate::error::{Error, Result};
use crate::geometry::{self, analyze, check_invariants, Metrics, Radius};
use crate::map::{CanonicalCode, CombinatorialMap};
use crate::oracle;
use crate::sampler::{nonseparating_two_cycles, stream_rng, Method, Sampler, SamplerSpec};
use crate::surgery::{cut_two_cycle, glue_digons, vertex_disjoint_pairs};
use crate::unicellular::{
    find_trisections, glue_three_corners, sample_unicellular, slice_trisection, transport_labels,
    well_labelings, LabeledUnicellular, UnicellularTables,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(Error::Invalid(format!("unknown verification level `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub level: Level,
    /// Coefficient variant under test in criterion 1.
    pub variant: Variant,
    pub seed: u64,
}

impl Options {
    pub fn new(level: Level) -> Self {
        Options { level, variant: Variant::Corrected, seed: 20_240_601 }
    }

    fn pick<T>(&self, fast: T, full: T) -> T {
        match self.level {
            Level::Fast => fast,
            Level::Full => full,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {} ({:.1}s): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.seconds,
            self.detail
        )
    }
}

pub const TITLES: [&str; 11] = [
    "enumeration ground truth",
    "genus-0 closed form",
    "genus-reduction bound",
    "trisection count",
    "labeled correspondence",
    "exact sampler uniformity",
    "2-cycle surgery bijection",
    "geometry invariants",
    "short nonseparating cycles",
    "planarity radius trend",
    "reproducibility",
];

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn within(start: Instant, limit: Duration, what: &str) -> std::result::Result<(), String> {
    ensure(start.elapsed() < limit, || {
        format!("{what} took {:.1}s, limit {}s", start.elapsed().as_secs_f64(), limit.as_secs())
    })
}

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize, opts: &Options) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => c1_enumeration(opts),
        2 => c2_planar(),
        3 => c3_bound(),
        4 => c4_trisections(opts),
        5 => c5_correspondence(),
        6 => c6_uniformity(opts),
        7 => c7_surgery(opts),
        8 => c8_geometry(opts),
        9 => c9_second_moment(opts),
        10 => c10_ladder(opts),
        11 => c11_reproducibility(opts),
        _ => Err(format!("no criterion {id}")),
    };
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult {
        id,
        title: TITLES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn verify_suite(opts: &Options) -> Vec<CriterionResult> {
    (1..=11).map(|id| run_criterion(id, opts)).collect()
}

fn c1_enumeration(opts: &Options) -> Check {
    let start = Instant::now();
    for n in 0..=4 {
        let t = cc_table(n, n / 2, opts.variant).map_err(err)?;
        let list = oracle::quadrangulations(n).map_err(err)?;
        for g in 0..=n / 2 {
            let q = t.get(n, g);
            ensure(q == BigUint::from(list.count(g)), || {
                format!(
                    "{} table gives Q({n},{g}) = {q}, exhaustive count {}",
                    opts.variant.name(),
                    list.count(g)
                )
            })?;
        }
    }
    let t = cc_table(4, 2, opts.variant).map_err(err)?;
    for (n, g, v) in [(1, 0, 2u32), (2, 0, 9), (2, 1, 1), (3, 1, 20), (4, 2, 21)] {
        ensure(t.get(n, g) == BigUint::from(v), || format!("Q({n},{g}) = {} != {v}", t.get(n, g)))?;
    }
    let printed = cc_table(3, 1, Variant::Printed).map_err(err)?;
    ensure(printed.get(2, 1) != BigUint::from(1u32), || "printed variant not flagged at (2,1)".into())?;
    within(start, Duration::from_secs(120), "enumeration check")?;
    Ok(format!(
        "all (n<=4, g) match; printed variant flagged at (2,1) with Q={}",
        printed.get(2, 1)
    ))
}

fn c2_planar() -> Check {
    let t = cc_table(12, 0, Variant::Corrected).map_err(err)?;
    for n in 0..=12 {
        ensure(t.get(n, 0) == planar_closed_form(n), || {
            format!("Q({n},0) = {} but closed form gives {}", t.get(n, 0), planar_closed_form(n))
        })?;
    }
    Ok(format!("n<=12 match, Q(12,0) = {}", t.get(12, 0)))
}

/// Labeled unicellular maps of size `n` and genus `g` from the oracle.
fn labeled_list(n: usize, g: usize) -> Result<Vec<LabeledUnicellular>> {
    let list = oracle::unicellular(n)?;
    let mut out = Vec::new();
    for u in list.genus(g) {
        for labels in well_labelings(u) {
            out.push(LabeledUnicellular::new(u.clone(), labels)?);
        }
    }
    Ok(out)
}

fn c3_bound() -> Check {
    let t = cc_table(200, 100, Variant::Corrected).map_err(err)?;
    let d = derived_counts(&t).map_err(err)?;
    let checked = d.trisection_bound.len();
    if let Some((n, g, _)) = d.trisection_bound.iter().find(|x| !x.2) {
        return Err(format!("2g Q(n,g) > (2n)^3 Q(n,g-1) at ({n},{g})"));
    }
    let mut injected = 0;
    for n in 1..=4 {
        for g in 1..=n / 2 {
            let lower = labeled_list(n, g - 1).map_err(err)?.len();
            let mut keys = HashSet::new();
            let mut total = 0;
            for lu in labeled_list(n, g).map_err(err)? {
                for tri in find_trisections(&lu.map).map_err(err)? {
                    let s = slice_trisection(&lu.map, tri).map_err(err)?;
                    let back = glue_three_corners(&s.map, s.corners).map_err(err)?;
                    ensure(back.canonical_code() == lu.map.canonical_code(), || {
                        format!("slice/glue round trip fails on {}", codec::to_json(&lu.map))
                    })?;
                    let sl = LabeledUnicellular::new(s.map.clone(), transport_labels(&lu, &s.map))
                        .map_err(err)?;
                    ensure(sl.map.genus() + 1 == g, || "slice did not lower the genus".into())?;
                    let lab = s.map.canonical_labeling();
                    let corners = s.corners.map(|c| lab[c]);
                    keys.insert((sl.code(), corners));
                    total += 1;
                }
            }
            ensure(keys.len() == total, || format!("slicing not injective at ({n},{g})"))?;
            ensure(total == 2 * g * lu_count(n, g)?, || format!("wrong trisection total at ({n},{g})"))?;
            ensure(total <= (2 * n).pow(3) * lower, || format!("injection bound fails at ({n},{g})"))?;
            injected += total;
        }
    }
    Ok(format!("{checked} table entries hold for n<=200; {injected} sliced trisections injective for n<=4"))
}

fn lu_count(n: usize, g: usize) -> std::result::Result<usize, String> {
    labeled_list(n, g).map(|l| l.len()).map_err(err)
}

fn c4_trisections(opts: &Options) -> Check {
    let mut checked = 0;
    for n in 0..=5 {
        for u in oracle::unicellular(n).map_err(err)?.all() {
            let k = find_trisections(u).map_err(err)?.len();
            ensure(k == 2 * u.genus(), || format!("{k} trisections on {}", codec::to_json(u)))?;
            checked += 1;
        }
    }
    let count = opts.pick(100, 1000);
    for (n, g) in [(20, 2), (40, 4)] {
        let tables = UnicellularTables::new(n);
        let bad: Option<CombinatorialMap> = (0..count as u32)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(opts.seed, 400 + n as u32, i);
                sample_unicellular(n, g, &tables, &mut rng).unwrap()
            })
            .find_any(|u| find_trisections(u).map(|t| t.len()).ok() != Some(2 * g));
        if let Some(u) = bad {
            return Err(format!("wrong trisection count on {}", codec::to_json(&u)));
        }
        checked += count;
    }
    Ok(format!("{checked} maps, each with exactly 2g trisections"))
}

fn c5_correspondence() -> Check {
    let mut trips = 0;
    for n in 1..=3 {
        for g in 0..=n / 2 {
            for lu in labeled_list(n, g).map_err(err)? {
                for eps in [Sign::Plus, Sign::Minus] {
                    let pq = cms_forward(&lu, eps).map_err(err)?;
                    ensure(distances_match(&lu, &pq), || {
                        format!("labels are not distances on {}", codec::to_json(&pq.map))
                    })?;
                    let (back, e) = cms_backward(&pq).map_err(err)?;
                    ensure(e == eps && back.code() == lu.code(), || {
                        format!("round trip fails from {}", codec::to_json_labeled(&lu.map, &lu.labels))
                    })?;
                    trips += 1;
                }
            }
            for q in oracle::quadrangulations(n).map_err(err)?.genus(g) {
                for v0 in 0..q.vertex_count() {
                    let pq = PointedQuadrangulation { map: q.clone(), v0 };
                    let (lu, eps) = cms_backward(&pq).map_err(err)?;
                    let fw = cms_forward(&lu, eps).map_err(err)?;
                    ensure(fw.key() == pq.key(), || {
                        format!("round trip fails from {} pointed at {v0}", codec::to_json(q))
                    })?;
                    trips += 1;
                }
            }
        }
    }
    let t = cc_table(4, 2, Variant::Corrected).map_err(err)?;
    let d = derived_counts(&t).map_err(err)?;
    for n in 1..=4 {
        for g in 0..=n / 2 {
            let ul = lu_count(n, g)?;
            let q = oracle::quadrangulations(n).map_err(err)?.count(g);
            ensure(2 * ul == (n + 2 - 2 * g) * q, || {
                format!("2 U^lab({n},{g}) = {} but (n+2-2g) Q = {}", 2 * ul, (n + 2 - 2 * g) * q)
            })?;
            ensure(d.labeled_unicellular[n][g] == BigUint::from(ul), || {
                format!("table U^lab({n},{g}) = {} vs exhaustive {ul}", d.labeled_unicellular[n][g])
            })?;
        }
    }
    Ok(format!("{trips} round trips (n<=3); counting identity exact for n<=4"))
}

fn chi_square_p(counts: &HashMap<CanonicalCode, usize>, k: usize, total: usize) -> f64 {
    let e = total as f64 / k as f64;
    let observed: f64 = counts.values().map(|&o| (o as f64 - e).powi(2) / e).sum();
    let stat = observed + (k - counts.len()) as f64 * e;
    if k < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((k - 1) as f64).unwrap().cdf(stat)
}

fn c6_uniformity(opts: &Options) -> Check {
    let start = Instant::now();
    let count = opts.pick(10_000, 100_000);
    let mut parts = Vec::new();
    for (pair, (n, g)) in [(1, 0), (2, 0), (3, 1)].into_iter().enumerate() {
        let support: HashSet<CanonicalCode> =
            oracle::quadrangulations(n).map_err(err)?.codes(g).into_iter().collect();
        let sampler = Sampler::new(SamplerSpec::new(n, g, Method::Exact, opts.seed)).map_err(err)?;
        let codes: Vec<std::result::Result<CanonicalCode, String>> = (0..count as u32)
            .into_par_iter()
            .map(|i| {
                let (lu, pq) = sampler.draw_pointed(600 + pair as u32, i).map_err(err)?;
                ensure(distances_match(&lu, &pq), || "labels are not distances".into())?;
                Ok(pq.map.canonical_code())
            })
            .collect();
        let mut counts: HashMap<CanonicalCode, usize> = HashMap::new();
        for c in codes {
            let c = c?;
            ensure(support.contains(&c), || format!("sample outside Q({n},{g}): {c}"))?;
            *counts.entry(c).or_default() += 1;
        }
        let p = chi_square_p(&counts, support.len(), count);
        ensure(p > 0.01, || format!("chi-square rejects uniformity at ({n},{g}): p = {p:.4}"))?;
        parts.push(format!("({n},{g}) p={p:.3}"));
    }
    within(start, Duration::from_secs(300), "uniformity check")?;
    Ok(format!("{count} samples each: {}", parts.join(", ")))
}

fn edge_set(m: &CombinatorialMap, darts: &[usize]) -> Vec<usize> {
    let lab = m.canonical_labeling();
    let mut v: Vec<usize> = darts.iter().map(|&d| lab[d].min(lab[m.alpha(d)])).collect();
    v.sort_unstable();
    v
}

/// Cut-then-glue and glue-then-cut on one map; returns how many directions ran.
fn surgery_round_trips<R: Rng>(m: &CombinatorialMap, rng: &mut R) -> std::result::Result<usize, String> {
    let mut done = 0;
    let cycles = nonseparating_two_cycles(m);
    if !cycles.is_empty() {
        let (e, f) = cycles[rng.gen_range(0..cycles.len())];
        let cut = cut_two_cycle(m, e, f).map_err(err)?;
        let back = glue_digons(&cut.pieces[0], cut.marks[0].1, cut.marks[1].1).map_err(err)?;
        ensure(
            back.map.canonical_code() == m.canonical_code()
                && edge_set(&back.map, &back.cycle) == edge_set(m, &[e, f]),
            || format!("cut/glue round trip fails on {} at edges {e},{f}", codec::to_json(m)),
        )?;
        done += 1;
    }
    let pairs = vertex_disjoint_pairs(m);
    if !pairs.is_empty() {
        let (e, f) = pairs[rng.gen_range(0..pairs.len())];
        let up = glue_digons(m, e, f).map_err(err)?;
        let cut = cut_two_cycle(&up.map, up.cycle[0], up.cycle[1]).map_err(err)?;
        let lower = &cut.pieces[0];
        ensure(
            lower.canonical_code() == m.canonical_code()
                && edge_set(lower, &[cut.marks[0].1, cut.marks[1].1]) == edge_set(m, &[e, f]),
            || format!("glue/cut round trip fails on {} at edges {e},{f}", codec::to_json(m)),
        )?;
        done += 1;
    }
    Ok(done)
}

fn c7_surgery(opts: &Options) -> Check {
    let count = opts.pick(1000, 10_000);
    let sizes = [(5, 1), (6, 1), (8, 1), (8, 2), (10, 2), (12, 3), (16, 2), (20, 4)];
    let samplers: Vec<Sampler> = sizes
        .iter()
        .map(|&(n, g)| Sampler::new(SamplerSpec::new(n, g, Method::Exact, opts.seed)))
        .collect::<Result<_>>()
        .map_err(err)?;
    let runs: Vec<std::result::Result<usize, String>> = (0..count as u32)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(opts.seed, 700, i);
            let m = samplers[i as usize % sizes.len()].draw_with(&mut rng).map_err(err)?;
            surgery_round_trips(&m, &mut rng)
        })
        .collect();
    let mut directions = 0;
    for r in runs {
        directions += r?;
    }
    let mut at21 = (0, 0);
    for n in 1..=4 {
        let list = oracle::quadrangulations(n).map_err(err)?;
        for g in 1..=n / 2 {
            let x: usize = list.genus(g).iter().map(|m| nonseparating_two_cycles(m).len()).sum();
            let y: usize = list.genus(g - 1).iter().map(|m| vertex_disjoint_pairs(m).len()).sum();
            ensure(x == y, || format!("census differs at ({n},{g}): {x} vs {y}"))?;
            if (n, g) == (2, 1) {
                at21 = (x, y);
            }
        }
    }
    ensure(at21 == (6, 6), || format!("census at (2,1) is {at21:?}"))?;
    let all_pairs = 2 * 3 * oracle::quadrangulations(2).map_err(err)?.count(0);
    Ok(format!(
        "{count} random maps, {directions} round trips; census equal for n<=4, (2,1): 6 = 6 (all-pairs count n(2n-1)Q(n,g-1) = {all_pairs})"
    ))
}

const C9: (usize, usize) = (30, 3);
const LADDER: [usize; 4] = [10, 20, 40, 80];
const CT_CAP: usize = 10;

fn sample_many(opts: &Options, n: usize, g: usize, pair: u32, count: usize) -> std::result::Result<Vec<CombinatorialMap>, String> {
    let sampler = Sampler::new(SamplerSpec::new(n, g, Method::Exact, opts.seed)).map_err(err)?;
    (0..count as u32)
        .into_par_iter()
        .map(|i| {
            let (lu, pq) = sampler.draw_pointed(pair, i).map_err(err)?;
            ensure(distances_match(&lu, &pq), || {
                format!("labels are not distances on {}", codec::to_json(&pq.map))
            })?;
            Ok(pq.map)
        })
        .collect()
}

fn c8_geometry(opts: &Options) -> Check {
    let mut maps: Vec<CombinatorialMap> = Vec::new();
    let mut systoles = 0;
    for n in 1..=3 {
        for m in oracle::quadrangulations(n).map_err(err)?.all() {
            if m.genus() > 0 {
                let fast = geometry::shortest_non_contractible(m).map(|c| c.length);
                let slow = geometry::systole_exhaustive(m);
                ensure(fast == slow, || {
                    format!("systole {fast:?} vs exhaustive {slow:?} on {}", codec::to_json(m))
                })?;
                systoles += 1;
            }
            maps.push(m.clone());
        }
    }
    maps.extend(sample_many(opts, C9.0, C9.1, 900, opts.pick(200, 1000))?);
    for (k, &n) in LADDER.iter().enumerate() {
        maps.extend(sample_many(opts, n, 2, 1000 + k as u32, opts.pick(50, 200))?);
    }
    let exact: Vec<std::result::Result<bool, String>> = maps
        .par_iter()
        .map(|m| {
            let r = analyze(m, Metrics::ALL, CT_CAP);
            check_invariants(m, &r).map_err(|e| format!("{e} on {}", codec::to_json(m)))?;
            Ok(r.ct_exact == Some(true) && r.ct_upper.is_some_and(|c| !c.is_infinite()))
        })
        .collect();
    let mut with_ct = 0;
    for e in exact {
        with_ct += e? as usize;
    }
    Ok(format!(
        "{} maps checked, {with_ct} with exact finite ct; systole exact on {systoles} oracle maps",
        maps.len()
    ))
}

fn c9_second_moment(opts: &Options) -> Check {
    let start = Instant::now();
    let maps = sample_many(opts, C9.0, C9.1, 900, opts.pick(200, 1000))?;
    let xs: Vec<usize> = maps.par_iter().map(|m| nonseparating_two_cycles(m).len()).collect();
    let s = campaign::second_moment(&xs);
    let (lo, _) = s.p_positive_ci99;
    ensure(lo > 0.0, || format!("99% interval for P(X>0) reaches 0: {:?}", s.p_positive_ci99))?;
    let ratio = s.ratio.unwrap_or(0.0);
    ensure(ratio <= s.p_positive + 3.0 * s.p_positive_se, || {
        format!("E(X)^2/E(X^2) = {ratio:.4} exceeds P(X>0) + 3 se = {:.4}", s.p_positive + 3.0 * s.p_positive_se)
    })?;
    within(start, Duration::from_secs(600), "second-moment study")?;
    Ok(format!(
        "{} maps at ({},{}): E(X)={:.3}, E(X^2)={:.3}, P(X>0)={:.3} (99% CI {:.3}..{:.3}, z={Z99:.2}), ratio={ratio:.3}",
        xs.len(),
        C9.0,
        C9.1,
        s.mean_x,
        s.mean_x2,
        s.p_positive,
        s.p_positive_ci99.0,
        s.p_positive_ci99.1
    ))
}

fn c10_ladder(opts: &Options) -> Check {
    let mut medians = Vec::new();
    for (k, &n) in LADDER.iter().enumerate() {
        let maps = sample_many(opts, n, 2, 1000 + k as u32, opts.pick(50, 200))?;
        let mut prs: Vec<Radius> = maps.par_iter().map(geometry::planarity_radius).collect();
        prs.sort();
        medians.push(prs[(prs.len() - 1) / 2]);
    }
    let shown: Vec<String> = LADDER.iter().zip(&medians).map(|(n, m)| format!("n={n}: {m}")).collect();
    ensure(medians.windows(2).all(|w| w[0] <= w[1]), || format!("median PR decreases: {}", shown.join(", ")))?;
    Ok(format!("median PR at g=2: {}", shown.join(", ")))
}

fn c11_config(seed: u64) -> CampaignConfig {
    CampaignConfig {
        theta: None,
        pairs: vec![
            PairConfig { n: 8, g: Some(1), method: None, samples: Some(12) },
            PairConfig { n: 2, g: Some(0), method: Some(Method::Exhaustive), samples: Some(6) },
            PairConfig { n: 4, g: Some(1), method: Some(Method::Mcmc), samples: Some(4) },
        ],
        method: Method::Exact,
        samples: 0,
        metrics: "pr,systole,two-cycles,ct,diameter".into(),
        search_cap: 6,
        seed,
        attempt_budget: crate::sampler::DEFAULT_ATTEMPT_BUDGET,
        mcmc_steps: 30,
        out_csv: None,
        out_summary: None,
        out_maps: None,
    }
}

fn campaign_bytes(config: &CampaignConfig, workers: usize) -> std::result::Result<(Vec<u8>, Vec<u8>), String> {
    let rec = campaign::run_campaign(config, workers).map_err(err)?;
    let mut csv = Vec::new();
    campaign::write_csv(&mut csv, &rec.rows).map_err(err)?;
    let mut nd = Vec::new();
    codec::write_ndjson(&mut nd, &rec.maps).map_err(err)?;
    Ok((csv, nd))
}

fn c11_reproducibility(opts: &Options) -> Check {
    let config = c11_config(opts.seed);
    let a = campaign_bytes(&config, 1)?;
    let b = campaign_bytes(&config, 4)?;
    let c = campaign_bytes(&config, 4)?;
    ensure(a.0 == b.0 && b.0 == c.0, || "CSV output differs between runs".into())?;
    ensure(a.1 == b.1 && b.1 == c.1, || "NDJSON output differs between runs".into())?;
    let other = campaign_bytes(&c11_config(opts.seed + 1), 2)?;
    ensure(other.1 != a.1, || "a different seed gave identical maps".into())?;
    Ok(format!(
        "CSV ({} bytes) and NDJSON ({} bytes) identical across 1 and 4 workers",
        a.0.len(),
        a.1.len()
    ))
}
