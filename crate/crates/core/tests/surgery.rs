use std::collections::HashSet;

use genuslab::geometry::two_cycle_census;
use genuslab::oracle::quadrangulations;
use genuslab::sampler::nonseparating_two_cycles;
use genuslab::surgery::*;
use genuslab::CombinatorialMap;

fn edge_set(m: &CombinatorialMap, darts: &[usize]) -> Vec<usize> {
    let lab = m.canonical_labeling();
    let mut v: Vec<usize> = darts.iter().map(|&d| lab[d].min(lab[m.alpha(d)])).collect();
    v.sort_unstable();
    v
}

#[test]
fn census_identity() {
    for n in 1..=4 {
        let list = quadrangulations(n).unwrap();
        for g in 1..=(n / 2) {
            let x: usize = list.genus(g).iter().map(|m| two_cycle_census(m).nonseparating).sum();
            let y: usize = list.genus(g - 1).iter().map(|m| vertex_disjoint_pairs(m).len()).sum();
            assert_eq!(x, y, "n={n} g={g}");
            if (n, g) == (2, 1) {
                assert_eq!(x, 6);
            }
        }
    }
}

#[test]
fn cut_then_glue_is_identity() {
    for n in 1..=4 {
        for m in quadrangulations(n).unwrap().all() {
            for (e, f) in nonseparating_two_cycles(m) {
                let cut = cut_two_cycle(m, e, f).unwrap();
                assert_eq!(cut.pieces.len(), 1);
                let lower = &cut.pieces[0];
                assert_eq!(lower.genus() + 1, m.genus());
                let back = glue_digons(lower, cut.marks[0].1, cut.marks[1].1).unwrap();
                assert_eq!(back.map.canonical_code(), m.canonical_code());
                assert_eq!(edge_set(&back.map, &back.cycle), edge_set(m, &[e, f]));
            }
        }
    }
}

#[test]
fn glue_then_cut_is_identity() {
    for n in 1..=4 {
        for m in quadrangulations(n).unwrap().all() {
            for (e, f) in vertex_disjoint_pairs(m) {
                let g = glue_digons(m, e, f).unwrap();
                assert_eq!(g.map.genus(), m.genus() + 1);
                let h = glue_digons(m, f, e).unwrap();
                assert_eq!(g.map.canonical_code(), h.map.canonical_code());
                let cut = cut_two_cycle(&g.map, g.cycle[0], g.cycle[1]).unwrap();
                assert_eq!(cut.classification, Classification::Nonseparating);
                let lower = &cut.pieces[0];
                assert_eq!(lower.canonical_code(), m.canonical_code());
                let marks = [cut.marks[0].1, cut.marks[1].1];
                assert_eq!(edge_set(lower, &marks), edge_set(m, &[e, f]));
            }
        }
    }
}

#[test]
fn classification_matches_components() {
    for n in 1..=4 {
        for m in quadrangulations(n).unwrap().all() {
            for (e, f) in parallel_pairs(m) {
                let f2 = if m.vertex_of(f) == m.target(e) { f } else { m.alpha(f) };
                let r = cut_simple_cycle(m, &[e, f2]).unwrap();
                assert_eq!(r.euler_total(), m.euler_characteristic() + 2);
                let genera: Vec<usize> = r.pieces.iter().map(|p| p.genus()).collect();
                match r.classification {
                    Classification::Nonseparating => assert_eq!(genera, vec![m.genus() - 1]),
                    Classification::Contractible => {
                        assert_eq!(genera.len(), 2);
                        assert!(genera.contains(&0));
                    }
                    Classification::SeparatingNoncontractible => {
                        assert_eq!(genera.len(), 2);
                        assert_eq!(genera.iter().sum::<usize>(), m.genus());
                        assert!(!genera.contains(&0));
                    }
                }
            }
        }
    }
}

fn simple_paths(m: &CombinatorialMap, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(m: &CombinatorialMap, len: usize, p: &mut Vec<usize>, seen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.len() == len {
            out.push(p.clone());
            return;
        }
        let v = *seen.last().unwrap();
        for d in m.vertex_darts(v) {
            let w = m.target(d);
            if !seen.contains(&w) {
                p.push(d);
                seen.push(w);
                go(m, len, p, seen, out);
                p.pop();
                seen.pop();
            }
        }
    }
    for v in 0..m.vertex_count() {
        go(m, len, &mut vec![], &mut vec![v], &mut out);
    }
    out
}

#[test]
fn open_close_and_tessellate() {
    for n in 1..=3 {
        for m in quadrangulations(n).unwrap().all() {
            for len in 1..=3 {
                for p in simple_paths(m, len) {
                    let o = open_path(m, &p).unwrap();
                    assert_eq!(o.map.face_degree(o.map.face_of(o.mark)), 2 * len);
                    assert_eq!(o.map.genus(), m.genus());
                    assert_eq!(close_path(&o).unwrap().canonical_code(), m.canonical_code());
                    let t = tessellate_boundary(&o.map, o.mark).unwrap();
                    assert!(t.map.holes().is_empty());
                    assert_eq!(t.map.inner_face_count(), n + len.saturating_sub(1));
                    t.map.revalidate(genuslab::Profile::Quadrangulation).unwrap();
                }
            }
        }
    }
}

#[test]
fn cycle_with_tail_round_trip() {
    let mut seen_tail = false;
    for n in 2..=4 {
        for m in quadrangulations(n).unwrap().all().filter(|m| m.genus() > 0) {
            for len in 1..=4 {
                genuslab::geometry::for_each_simple_cycle(m, len, |c| {
                    for tl in 0..=2 {
                        let tails: Vec<Vec<usize>> = if tl == 0 {
                            vec![vec![]]
                        } else {
                            simple_paths(m, tl).into_iter().filter(|p| m.edge_id(p[0]) == m.edge_id(m.root())).collect()
                        };
                        for tail in tails {
                            let ct = CycleWithTail { tail, cycle: c.to_vec() };
                            if ct.check(m).is_err() {
                                continue;
                            }
                            if classify_cycle(m, c).unwrap() == Classification::Contractible {
                                continue;
                            }
                            seen_tail |= !ct.tail.is_empty();
                            let r = cut_cycle_with_tail(m, &ct).unwrap();
                            let (p, q) = r.boundary;
                            assert_eq!(p + q, ct.size());
                            let sizes: HashSet<usize> = r
                                .pieces
                                .iter()
                                .flat_map(|x| x.holes().iter().map(move |&h| x.face_degree(x.face_of(h))))
                                .collect();
                            assert!(sizes.contains(&(2 * p)) && sizes.contains(&(2 * q)));
                            let back = glue_tail_cut(&r).unwrap();
                            assert_eq!(back.canonical_code(), m.canonical_code());
                        }
                    }
                    true
                });
            }
        }
    }
    assert!(seen_tail);
}
