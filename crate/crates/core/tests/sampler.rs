use std::collections::HashMap;

use genuslab::oracle;
use genuslab::sampler::{
    chain_reachability, nonseparating_two_cycles, stream_rng, Chain, Method, Sampler, SamplerSpec,
};
use genuslab::{CanonicalCode, CombinatorialMap, Profile};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn histogram(maps: impl Iterator<Item = CombinatorialMap>) -> HashMap<CanonicalCode, usize> {
    let mut h = HashMap::new();
    for m in maps {
        *h.entry(m.canonical_code()).or_insert(0) += 1;
    }
    h
}

/// p-value of the chi-square goodness of fit against the uniform law on `k` codes.
fn uniform_p(h: &HashMap<CanonicalCode, usize>, k: usize) -> f64 {
    let total: usize = h.values().sum();
    let e = total as f64 / k as f64;
    let stat: f64 = h.values().map(|&o| (o as f64 - e).powi(2) / e).sum::<f64>()
        + (k - h.len()) as f64 * e;
    1.0 - ChiSquared::new((k - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn exact_and_exhaustive_agree_at_3_1() {
    let k = oracle::quadrangulations(3).unwrap().count(1);
    assert_eq!(k, 20);
    let count = 20_000;
    let exact = Sampler::new(SamplerSpec::new(3, 1, Method::Exact, 11)).unwrap();
    let exhaustive = Sampler::new(SamplerSpec::new(3, 1, Method::Exhaustive, 11)).unwrap();
    let a = histogram((0..count).map(|i| exact.draw(0, i).unwrap()));
    let b = histogram((0..count).map(|i| exhaustive.draw(0, i).unwrap()));
    assert_eq!(a.len(), k);
    assert_eq!(b.len(), k);
    let stat: f64 = a
        .iter()
        .map(|(c, &x)| {
            let y = b[c] as f64;
            (x as f64 - y).powi(2) / (x as f64 + y)
        })
        .sum();
    let p = 1.0 - ChiSquared::new((k - 1) as f64).unwrap().cdf(stat);
    assert!(p > 0.001, "homogeneity rejected, p = {p}");
    assert!(uniform_p(&a, k) > 0.001);
}

#[test]
fn draws_are_reproducible_and_streams_differ() {
    for method in [Method::Exact, Method::Exhaustive, Method::Mcmc] {
        let n = if method == Method::Exhaustive { 3 } else { 7 };
        let mut spec = SamplerSpec::new(n, 1, method, 5);
        spec.mcmc_steps = 20;
        let s = Sampler::new(spec).unwrap();
        let a: Vec<_> = (0..20).map(|i| s.draw(3, i).unwrap()).collect();
        let b: Vec<_> = (0..20).map(|i| s.draw(3, i).unwrap()).collect();
        assert_eq!(a, b);
        let c: Vec<_> = (0..20).map(|i| s.draw(4, i).unwrap()).collect();
        assert_ne!(a, c);
    }
}

#[test]
fn chain_stays_in_the_class() {
    let s = Sampler::new(SamplerSpec::new(9, 2, Method::Exact, 2)).unwrap();
    let mut rng = stream_rng(2, 1, 0);
    let mut chain = Chain::new(s.draw(0, 0).unwrap(), true);
    for _ in 0..300 {
        chain.step(&mut rng);
        let m = &chain.state;
        assert_eq!((m.face_count(), m.genus()), (9, 2));
        m.revalidate(Profile::Quadrangulation).unwrap();
    }
    let st = chain.stats;
    assert_eq!(st.steps, 300);
    assert_eq!(st.accepted + st.rejected + st.held + st.rerooted, st.steps);
    assert!(st.accepted > 0 && st.rerooted > 0);
}

#[test]
fn chain_preserves_the_uniform_law() {
    let k = oracle::quadrangulations(3).unwrap().count(1);
    let s = Sampler::new(SamplerSpec::new(3, 1, Method::Exact, 17)).unwrap();
    let h = histogram((0..10_000).map(|i| {
        let mut rng = stream_rng(17, 9, i);
        let mut chain = Chain::new(s.draw_with(&mut rng).unwrap(), true);
        for _ in 0..15 {
            chain.step(&mut rng);
        }
        chain.state
    }));
    assert_eq!(h.len(), k);
    let p = uniform_p(&h, k);
    assert!(p > 0.001, "uniform law not preserved, p = {p}");
}

#[test]
fn chain_reachability_small_sizes() {
    let r = chain_reachability(2, 1, false).unwrap();
    assert_eq!((r.states, r.classes, r.stuck), (1, 1, 0));
    let r = chain_reachability(3, 1, false).unwrap();
    assert_eq!((r.states, r.classes), (20, 2));
    let r = chain_reachability(3, 1, true).unwrap();
    assert_eq!(r.classes, 1);
}

#[test]
fn samples_at_genus_3_have_nonseparating_cycles() {
    let s = Sampler::new(SamplerSpec::new(12, 3, Method::Exact, 8)).unwrap();
    for i in 0..50 {
        let m = s.draw(0, i).unwrap();
        assert!(!nonseparating_two_cycles(&m).is_empty());
    }
}
