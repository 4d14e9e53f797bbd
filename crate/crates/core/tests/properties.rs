use genuslab::cms::{cms_backward, cms_forward, distances_match, Sign};
use genuslab::enumerate::{cc_table, cc_table_naive, Variant};
use genuslab::geometry::two_cycle_census;
use genuslab::sampler::{sample_labeled, stream_rng, Method, Sampler, SamplerSpec};
use genuslab::unicellular::{find_trisections, slice_trisection, UnicellularTables};
use genuslab::{codec, CombinatorialMap};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn sized() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..14).prop_flat_map(|n| (Just(n), 0..=n / 2, any::<u64>()))
}

fn draw(n: usize, g: usize, seed: u64) -> CombinatorialMap {
    Sampler::new(SamplerSpec::new(n, g, Method::Exact, seed)).unwrap().draw(0, 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabeling_keeps_code_and_census((n, g, seed) in sized(), shuffle in any::<u64>()) {
        let m = draw(n, g, seed);
        let mut perm: Vec<usize> = (0..m.dart_count()).collect();
        perm.shuffle(&mut stream_rng(shuffle, 0, 0));
        let r = m.relabel(&perm);
        prop_assert_eq!(r.canonical_code(), m.canonical_code());
        prop_assert_eq!(r.genus(), g);
        prop_assert_eq!(two_cycle_census(&r), two_cycle_census(&m));
        prop_assert_eq!(m.canonical_form(), r.canonical_form());
    }

    #[test]
    fn codec_round_trip((n, g, seed) in sized()) {
        let m = draw(n, g, seed);
        let back = codec::from_json(&codec::to_json(&m)).unwrap();
        prop_assert_eq!(&back, &m);
        let mut buf = Vec::new();
        codec::write_ndjson(&mut buf, &[m.clone(), back]).unwrap();
        let maps = codec::read_ndjson(&buf[..]).unwrap();
        prop_assert_eq!(maps.len(), 2);
        prop_assert_eq!(&maps[1], &m);
    }

    #[test]
    fn correspondence_round_trip((n, g, seed) in sized(), plus in any::<bool>()) {
        let tables = UnicellularTables::new(n);
        let (lu, _) = sample_labeled(n, g, &tables, 1 << 24, &mut stream_rng(seed, 1, 0)).unwrap();
        let eps = if plus { Sign::Plus } else { Sign::Minus };
        let pq = cms_forward(&lu, eps).unwrap();
        prop_assert_eq!((pq.map.face_count(), pq.map.genus()), (n, g));
        prop_assert!(distances_match(&lu, &pq));
        let (back, e) = cms_backward(&pq).unwrap();
        prop_assert_eq!(e, eps);
        prop_assert_eq!(back.code(), lu.code());
    }

    #[test]
    fn slicing_lowers_genus_by_one((n, g, seed) in sized()) {
        prop_assume!(g > 0);
        let tables = UnicellularTables::new(n);
        let (lu, _) = sample_labeled(n, g, &tables, 1 << 24, &mut stream_rng(seed, 2, 0)).unwrap();
        let tris = find_trisections(&lu.map).unwrap();
        prop_assert_eq!(tris.len(), 2 * g);
        for t in tris {
            let s = slice_trisection(&lu.map, t).unwrap();
            prop_assert_eq!(s.map.genus() + 1, g);
            prop_assert_eq!(s.map.face_count(), 1);
            prop_assert_eq!(s.map.vertex_count(), lu.map.vertex_count() + 2);
        }
    }
}

#[test]
fn fast_and_naive_tables_agree() {
    let v = Variant::Corrected;
    assert_eq!(cc_table(30, 15, v).unwrap(), cc_table_naive(30, 15, v).unwrap());
    let p = Variant::Printed;
    assert_eq!(cc_table(3, 1, p).unwrap(), cc_table_naive(3, 1, p).unwrap());
    assert!(cc_table(30, 15, p).is_err());
}
