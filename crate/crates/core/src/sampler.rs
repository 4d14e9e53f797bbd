//! Random quadrangulations of fixed size and genus: an exact sampler through
//! labeled unicellular maps, a uniform pick from the oracle list, and a
//! Metropolis chain of 2-cycle re-gluings.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::cms::{cms_forward, PointedQuadrangulation, Sign};
use crate::error::{Error, Result};
use crate::map::{CanonicalCode, CombinatorialMap};
use crate::oracle;
use crate::surgery::{cut_two_cycle, glue_digons, parallel_pairs, vertex_disjoint_pairs, Classification};
use crate::unicellular::{sample_unicellular, sample_well_labeling, LabeledUnicellular, UnicellularTables};

/// Name of the generator behind every stream.
pub const RNG_NAME: &str = "chacha12/seed_from_u64/stream=(pair<<32)|sample";
pub const DEFAULT_ATTEMPT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Exhaustive,
    Mcmc,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Exhaustive => "exhaustive",
            Method::Mcmc => "mcmc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "exhaustive" => Ok(Method::Exhaustive),
            "mcmc" => Ok(Method::Mcmc),
            _ => Err(Error::Invalid(format!("unknown sampling method `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub n: usize,
    pub g: usize,
    pub method: Method,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub attempt_budget: u64,
    #[serde(default)]
    pub mcmc_steps: u64,
    #[serde(default = "yes")]
    pub mcmc_reroot: bool,
}

fn yes() -> bool {
    true
}

fn default_budget() -> u64 {
    DEFAULT_ATTEMPT_BUDGET
}

impl SamplerSpec {
    pub fn new(n: usize, g: usize, method: Method, seed: u64) -> Self {
        SamplerSpec {
            n,
            g,
            method,
            seed,
            attempt_budget: DEFAULT_ATTEMPT_BUDGET,
            mcmc_steps: 1000,
            mcmc_reroot: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        if self.n + 2 < 2 * self.g + 2 {
            return Err(Error::Invalid(format!(
                "no quadrangulation with n={} faces and genus {}",
                self.n, self.g
            )));
        }
        if self.method == Method::Exhaustive && self.n > oracle::QUAD_LIMIT {
            return Err(Error::SizeLimit(format!(
                "exhaustive sampling supports n <= {}, got {}",
                oracle::QUAD_LIMIT,
                self.n
            )));
        }
        Ok(())
    }
}

/// Independent generator for sample `sample` of pair `pair`.
pub fn stream_rng(seed: u64, pair: u32, sample: u32) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(((pair as u64) << 32) | sample as u64);
    rng
}

/// Uniform well-labeled unicellular map with `n` edges and genus `g`, with
/// the number of attempts it took.
pub fn sample_labeled<R: Rng + ?Sized>(
    n: usize,
    g: usize,
    tables: &UnicellularTables,
    budget: u64,
    rng: &mut R,
) -> Result<(LabeledUnicellular, u64)> {
    for attempt in 1..=budget {
        let u = sample_unicellular(n, g, tables, rng)?;
        if let Some(labels) = sample_well_labeling(&u, rng) {
            return Ok((LabeledUnicellular::new(u, labels)?, attempt));
        }
    }
    Err(Error::Budget { n, g, attempts: budget, accepted: 0 })
}

/// Uniform pointed quadrangulation together with the labeled unicellular
/// map it was built from.
pub fn sample_pointed<R: Rng + ?Sized>(
    spec: &SamplerSpec,
    tables: &UnicellularTables,
    rng: &mut R,
) -> Result<(LabeledUnicellular, PointedQuadrangulation)> {
    let (lu, _) = sample_labeled(spec.n, spec.g, tables, spec.attempt_budget, rng)?;
    let eps = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
    let pq = cms_forward(&lu, eps)?;
    Ok((lu, pq))
}

/// Uniform rooted quadrangulation with `n` faces and genus `g`.
pub fn sample_exact<R: Rng + ?Sized>(
    spec: &SamplerSpec,
    tables: &UnicellularTables,
    rng: &mut R,
) -> Result<CombinatorialMap> {
    Ok(sample_pointed(spec, tables, rng)?.1.map)
}

pub fn sample_exhaustive<R: Rng + ?Sized>(spec: &SamplerSpec, rng: &mut R) -> Result<CombinatorialMap> {
    let list = oracle::quadrangulations(spec.n)?;
    list.genus(spec.g)
        .choose(rng)
        .cloned()
        .ok_or_else(|| Error::Invalid(format!("Q({}, {}) is empty", spec.n, spec.g)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChainStats {
    pub steps: u64,
    pub accepted: u64,
    pub rejected: u64,
    /// Steps spent in a state without a nonseparating 2-cycle.
    pub held: u64,
    pub rerooted: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted,
    Rejected,
    Held,
}

/// Nonseparating 2-cycles of `m`, as edge pairs.
pub fn nonseparating_two_cycles(m: &CombinatorialMap) -> Vec<(usize, usize)> {
    parallel_pairs(m)
        .into_iter()
        .filter(|&(e, f)| {
            let f2 = if m.vertex_of(f) == m.target(e) { f } else { m.alpha(f) };
            crate::surgery::classify_cycle(m, &[e, f2]).unwrap() == Classification::Nonseparating
        })
        .collect()
}

/// Chain on rooted quadrangulations of fixed size and genus: cut a uniform
/// nonseparating 2-cycle, glue back at a uniform vertex-disjoint edge pair,
/// accept with probability `min(1, X(m)/X(m'))`. With `reroot`, every other
/// step (chosen by a fair coin) moves the root to a uniform dart instead.
#[derive(Clone, Debug)]
pub struct Chain {
    pub state: CombinatorialMap,
    x: usize,
    pub reroot: bool,
    pub stats: ChainStats,
}

impl Chain {
    pub fn new(start: CombinatorialMap, reroot: bool) -> Self {
        let x = nonseparating_two_cycles(&start).len();
        Chain { state: start, x, reroot, stats: ChainStats::default() }
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> StepOutcome {
        self.stats.steps += 1;
        if self.reroot && rng.gen::<bool>() {
            let d = rng.gen_range(0..self.state.dart_count());
            self.state = self.state.with_root(d);
            self.stats.rerooted += 1;
            return StepOutcome::Accepted;
        }
        let cycles = nonseparating_two_cycles(&self.state);
        if cycles.is_empty() {
            self.stats.held += 1;
            return StepOutcome::Held;
        }
        let (e, f) = cycles[rng.gen_range(0..cycles.len())];
        let cut = cut_two_cycle(&self.state, e, f).expect("nonseparating 2-cycles cut");
        let lower = &cut.pieces[0];
        let pairs = vertex_disjoint_pairs(lower);
        if pairs.is_empty() {
            self.stats.held += 1;
            return StepOutcome::Held;
        }
        let (a, b) = pairs[rng.gen_range(0..pairs.len())];
        let glued = glue_digons(lower, a, b).expect("vertex-disjoint pairs glue");
        let x_new = nonseparating_two_cycles(&glued.map).len();
        if rng.gen_range(0..x_new) < self.x {
            self.state = glued.map;
            self.x = x_new;
            self.stats.accepted += 1;
            StepOutcome::Accepted
        } else {
            self.stats.rejected += 1;
            StepOutcome::Rejected
        }
    }
}

pub fn sample_mcmc<R: Rng + ?Sized>(
    spec: &SamplerSpec,
    tables: &UnicellularTables,
    rng: &mut R,
) -> Result<(CombinatorialMap, ChainStats)> {
    let start = sample_exact(spec, tables, rng)?;
    let mut chain = Chain::new(start, spec.mcmc_reroot);
    for _ in 0..spec.mcmc_steps {
        chain.step(rng);
    }
    Ok((chain.state, chain.stats))
}

/// One sampler per (n, g), with its counting tables built once.
#[derive(Clone, Debug)]
pub struct Sampler {
    pub spec: SamplerSpec,
    tables: Arc<UnicellularTables>,
}

impl Sampler {
    pub fn new(spec: SamplerSpec) -> Result<Self> {
        spec.validate()?;
        let tables = Arc::new(UnicellularTables::new(spec.n));
        Ok(Sampler { spec, tables })
    }

    /// Sample `index` of pair `pair`; depends only on the seed and these two numbers.
    pub fn draw(&self, pair: u32, index: u32) -> Result<CombinatorialMap> {
        let mut rng = stream_rng(self.spec.seed, pair, index);
        self.draw_with(&mut rng)
    }

    /// Exact method only: the pointed map and its labeled unicellular preimage.
    pub fn draw_pointed(&self, pair: u32, index: u32) -> Result<(LabeledUnicellular, PointedQuadrangulation)> {
        let mut rng = stream_rng(self.spec.seed, pair, index);
        sample_pointed(&self.spec, &self.tables, &mut rng)
    }

    pub fn draw_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CombinatorialMap> {
        match self.spec.method {
            Method::Exact => sample_exact(&self.spec, &self.tables, rng),
            Method::Exhaustive => sample_exhaustive(&self.spec, rng),
            Method::Mcmc => sample_mcmc(&self.spec, &self.tables, rng).map(|x| x.0),
        }
    }
}

/// Communicating classes of the re-gluing chain on an oracle list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reachability {
    pub n: usize,
    pub g: usize,
    pub reroot: bool,
    pub states: usize,
    pub classes: usize,
    /// States with no nonseparating 2-cycle.
    pub stuck: usize,
}

/// Builds the move graph of [`Chain`] on Q(n, g) exhaustively.
pub fn chain_reachability(n: usize, g: usize, reroot: bool) -> Result<Reachability> {
    let list = oracle::quadrangulations(n)?;
    let states = list.genus(g);
    let index: HashMap<CanonicalCode, usize> =
        states.iter().enumerate().map(|(i, m)| (m.canonical_code(), i)).collect();
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); states.len()];
    let mut stuck = 0;
    for (i, m) in states.iter().enumerate() {
        let cycles = nonseparating_two_cycles(m);
        if cycles.is_empty() {
            stuck += 1;
        }
        if reroot {
            for d in 0..m.dart_count() {
                let j = index[&m.with_root(d).canonical_code()];
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
        for (e, f) in cycles {
            let lower = cut_two_cycle(m, e, f)?.pieces.remove(0);
            for (a, b) in vertex_disjoint_pairs(&lower) {
                let j = index[&glue_digons(&lower, a, b)?.map.canonical_code()];
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    let mut comp = vec![usize::MAX; states.len()];
    let mut classes = 0;
    for s in 0..states.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = classes;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = classes;
                    queue.push_back(w);
                }
            }
        }
        classes += 1;
    }
    Ok(Reachability { n, g, reroot, states: states.len(), classes, stuck })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::fixtures::f2;

    #[test]
    fn exact_small() {
        let s = Sampler::new(SamplerSpec::new(2, 1, Method::Exact, 7)).unwrap();
        for i in 0..20 {
            assert_eq!(s.draw(0, i).unwrap().canonical_code(), f2().canonical_code());
        }
        let s = Sampler::new(SamplerSpec::new(5, 1, Method::Exact, 7)).unwrap();
        assert_eq!(s.draw(3, 4).unwrap().canonical_code(), s.draw(3, 4).unwrap().canonical_code());
    }

    #[test]
    fn spec_checks() {
        assert!(SamplerSpec::new(0, 0, Method::Exact, 0).validate().is_err());
        assert!(SamplerSpec::new(2, 2, Method::Exact, 0).validate().is_err());
        assert!(SamplerSpec::new(9, 1, Method::Exhaustive, 0).validate().is_err());
    }

    #[test]
    fn chain_keeps_size_and_genus() {
        let s = Sampler::new(SamplerSpec::new(4, 1, Method::Exact, 3)).unwrap();
        let mut rng = stream_rng(3, 0, 0);
        let mut chain = Chain::new(s.draw_with(&mut rng).unwrap(), true);
        for _ in 0..200 {
            chain.step(&mut rng);
            let m = &chain.state;
            assert_eq!((m.face_count(), m.genus()), (4, 1));
            m.revalidate(crate::Profile::Quadrangulation).unwrap();
        }
    }
}
