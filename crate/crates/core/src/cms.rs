//! Two-to-one correspondence between well-labeled unicellular maps and
//! pointed bipartite quadrangulations.

use crate::error::{Error, Result};
use crate::map::{CanonicalCode, CombinatorialMap, Dart, Profile};
use crate::unicellular::{face_tour, LabeledUnicellular};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedQuadrangulation {
    pub map: CombinatorialMap,
    pub v0: usize,
}

impl PointedQuadrangulation {
    /// Isomorphism key: canonical code plus the canonical vertex id of `v0`.
    pub fn key(&self) -> (CanonicalCode, usize) {
        let lab = self.map.canonical_labeling();
        let c = self.map.canonical_form();
        let v = c.vertex_of(lab[self.map.vertex_rep(self.v0)]);
        (c.canonical_code(), v)
    }
}

/// Unicellular map with labels to pointed quadrangulation.
///
/// Corners are numbered along the face tour (`corner i` precedes `tour[i]`).
/// Corner `i` with label `ℓ ≥ 2` gets an edge to the next corner with label
/// `ℓ−1`, corners labeled 1 get an edge to the new vertex `v0`. Quadrangulation
/// dart `2i` leaves corner `i`, `2i+1` is its other end.
pub fn cms_forward(lu: &LabeledUnicellular, eps: Sign) -> Result<PointedQuadrangulation> {
    lu.check()?;
    let u = &lu.map;
    let d = u.dart_count();
    if d == 0 {
        return Err(Error::Invalid("empty map has no corner".into()));
    }
    let tour = face_tour(u);
    let mut pos = vec![0; d];
    for (i, &x) in tour.iter().enumerate() {
        pos[x] = i;
    }
    let lab: Vec<usize> = tour.iter().map(|&x| lu.label_of_dart(x) as usize).collect();
    let max_l = *lab.iter().max().unwrap();
    let mut succ: Vec<Option<usize>> = vec![None; d];
    let mut next_at: Vec<Option<usize>> = vec![None; max_l + 1];
    for k in (0..2 * d).rev() {
        let i = k % d;
        if k < d && lab[i] >= 2 {
            succ[i] = next_at[lab[i] - 1];
        }
        next_at[lab[i]] = Some(i);
    }
    let mut content: Vec<Vec<(usize, Dart)>> = vec![Vec::new(); d];
    for i in 0..d {
        match succ[i] {
            None => content[i].push((0, 2 * i)),
            Some(s) => {
                let gap = (s + d - i) % d;
                content[i].push((gap, 2 * i));
                content[s].push((d - gap, 2 * i + 1));
            }
        }
    }
    for c in &mut content {
        c.sort_unstable_by_key(|a| std::cmp::Reverse(a.0));
    }
    let qd = 2 * d;
    let mut sigma = vec![usize::MAX; qd];
    let mut link = |seq: &[Dart]| {
        for k in 0..seq.len() {
            sigma[seq[k]] = seq[(k + 1) % seq.len()];
        }
    };
    for v in 0..u.vertex_count() {
        let seq: Vec<Dart> = u
            .vertex_darts(v)
            .into_iter()
            .flat_map(|x| content[pos[x]].iter().map(|e| e.1))
            .collect();
        link(&seq);
    }
    let ones: Vec<usize> = (0..d).rev().filter(|&i| lab[i] == 1).collect();
    let around_v0: Vec<Dart> = ones.iter().map(|&i| 2 * i + 1).collect();
    link(&around_v0);
    let alpha: Vec<Dart> = (0..qd).map(|x| x ^ 1).collect();
    let root = match eps {
        Sign::Plus => 0,
        Sign::Minus => 1,
    };
    let map = CombinatorialMap::new(sigma, alpha, root, vec![], Profile::Quadrangulation)?;
    let v0 = map.vertex_of(around_v0[0]);
    Ok(PointedQuadrangulation { map, v0 })
}

/// Checks that every corner label of `lu` is the distance from `v0` to the
/// corresponding vertex of the quadrangulation built by [`cms_forward`].
pub fn distances_match(lu: &LabeledUnicellular, pq: &PointedQuadrangulation) -> bool {
    let tour = face_tour(&lu.map);
    let dist = pq.map.distances_from(pq.v0);
    tour.iter()
        .enumerate()
        .all(|(i, &x)| dist[pq.map.vertex_of(2 * i)] == lu.label_of_dart(x))
}

/// Inverse of [`cms_forward`]: labels are distances to `v0`; each face
/// contributes one edge between two of its corners; `v0` is removed.
///
/// A face with labels `ℓ+1, ℓ, ℓ+1, ℓ` gets the edge between its two `ℓ+1`
/// corners; a face `ℓ, ℓ+1, ℓ+2, ℓ+1` gets the edge from the `ℓ+2` corner to
/// the `ℓ+1` corner preceding it along the face.
pub fn cms_backward(pq: &PointedQuadrangulation) -> Result<(LabeledUnicellular, Sign)> {
    let q = &pq.map;
    let qd = q.dart_count();
    if qd == 0 || q.face_count() == 0 {
        return Err(Error::Invalid("empty quadrangulation".into()));
    }
    let dist = q.distances_from(pq.v0);
    let lab = |x: Dart| dist[q.vertex_of(x)];
    const NONE: usize = usize::MAX;
    let mut host = vec![NONE; qd];
    let mut ud = 0;
    for f in 0..q.face_count() {
        let fd = q.face_darts(f);
        if fd.len() != 4 {
            return Err(Error::Invalid(format!("face {f} is not a quadrangle")));
        }
        let top = fd.iter().map(|&x| lab(x)).max().unwrap();
        let at: Vec<usize> = (0..4).filter(|&k| lab(fd[k]) == top).collect();
        let (a, b) = match at.as_slice() {
            [k, l] if l - k == 2 => (fd[*k], fd[*l]),
            [k] => (fd[*k], fd[(k + 3) % 4]),
            _ => return Err(Error::Invalid(format!("face {f} has no valid label pattern"))),
        };
        host[a] = ud;
        host[b] = ud + 1;
        ud += 2;
    }
    let mut sigma = vec![NONE; ud];
    for w in 0..q.vertex_count() {
        if w == pq.v0 {
            continue;
        }
        let seq: Vec<usize> = q
            .vertex_darts(w)
            .into_iter()
            .filter_map(|x| (host[x] != NONE).then_some(host[x]))
            .collect();
        if seq.is_empty() {
            return Err(Error::Invalid(format!("vertex {w} carries no edge")));
        }
        for k in 0..seq.len() {
            sigma[seq[k]] = seq[(k + 1) % seq.len()];
        }
    }
    let alpha: Vec<Dart> = (0..ud).map(|x| x ^ 1).collect();
    let qr = q.root();
    let out_end = if lab(qr) > lab(q.alpha(qr)) { qr } else { q.alpha(qr) };
    let eps = if out_end == qr { Sign::Plus } else { Sign::Minus };
    let mut z = q.sigma(out_end);
    while host[z] == NONE {
        z = q.sigma(z);
    }
    let umap = CombinatorialMap::new(sigma, alpha, host[z], vec![], Profile::Unicellular)?;
    let mut labels = vec![0; umap.vertex_count()];
    for x in 0..qd {
        if host[x] != NONE {
            labels[umap.vertex_of(host[x])] = lab(x);
        }
    }
    Ok((LabeledUnicellular::new(umap, labels)?, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::fixtures::*;
    use crate::unicellular::PlaneTree;

    #[test]
    fn f3_to_f2() {
        let lu = LabeledUnicellular::new(f3(), vec![1]).unwrap();
        let pq = cms_forward(&lu, Sign::Plus).unwrap();
        assert_eq!(pq.map.canonical_code(), f2().canonical_code());
        let (back, eps) = cms_backward(&pq).unwrap();
        assert_eq!(eps, Sign::Plus);
        assert_eq!(back.code(), lu.code());
        for v in 0..2 {
            let (u, _) = cms_backward(&PointedQuadrangulation { map: f2(), v0: v }).unwrap();
            assert_eq!(u.code(), lu.code());
        }
    }

    #[test]
    fn edge_to_f1() {
        let tree = PlaneTree { steps: vec![true, false] }.to_map();
        let lu = LabeledUnicellular::new(tree, vec![1, 1]).unwrap();
        let pq = cms_forward(&lu, Sign::Plus).unwrap();
        assert_eq!(pq.map.vertex_count(), 3);
        assert_eq!(pq.map.vertex_degree(pq.v0), 2);
        let (u, _) = cms_backward(&PointedQuadrangulation { map: f1(), v0: 1 }).unwrap();
        assert_eq!(u.labels, vec![1, 1]);
        assert_eq!(u.map.edge_count(), 1);
    }

    #[test]
    fn distances_match_labels() {
        let tree = PlaneTree { steps: vec![true, true, false, true, false, false] }.to_map();
        for labels in crate::unicellular::well_labelings(&tree) {
            let lu = LabeledUnicellular::new(tree.clone(), labels).unwrap();
            for eps in [Sign::Plus, Sign::Minus] {
                let pq = cms_forward(&lu, eps).unwrap();
                let dist = pq.map.distances_from(pq.v0);
                let (back, e) = cms_backward(&pq).unwrap();
                assert_eq!(e, eps);
                assert_eq!(back.code(), lu.code());
                let tour = crate::unicellular::face_tour(&lu.map);
                for (i, &x) in tour.iter().enumerate() {
                    assert_eq!(dist[pq.map.vertex_of(2 * i)], lu.label_of_dart(x));
                }
            }
        }
    }
}
