//! Unicellular maps: plane trees, odd-cycle decorations, vertex gluing,
//! trisections and well-labelings.

use std::collections::VecDeque;

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::enumerate::{binomial, falling, unicellular_count, OddCyclePermTable};
use crate::error::{Error, Result};
use crate::map::{CombinatorialMap, Dart, Profile};

/// Dyck word of a rooted plane tree; `true` is a step away from the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlaneTree {
    pub steps: Vec<bool>,
}

impl PlaneTree {
    pub fn edges(&self) -> usize {
        self.steps.len() / 2
    }

    pub fn is_valid(&self) -> bool {
        let mut h = 0i64;
        for &s in &self.steps {
            h += if s { 1 } else { -1 };
            if h < 0 {
                return false;
            }
        }
        h == 0
    }

    /// The tree as a map whose face tour visits darts `0, 1, …, 2n−1` in order.
    pub fn to_map(&self) -> CombinatorialMap {
        let d = self.steps.len();
        if d == 0 {
            return CombinatorialMap::vertex_map();
        }
        let mut alpha = vec![0; d];
        let mut stack = Vec::new();
        for (i, &up) in self.steps.iter().enumerate() {
            if up {
                stack.push(i);
            } else {
                let j = stack.pop().expect("balanced");
                alpha[i] = j;
                alpha[j] = i;
            }
        }
        let sigma = (0..d).map(|x| (alpha[x] + 1) % d).collect();
        CombinatorialMap::new(sigma, alpha, 0, vec![], Profile::Unicellular).expect("tree map")
    }
}

/// Uniform rooted plane tree with `n` edges (cycle lemma).
pub fn sample_plane_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PlaneTree {
    let mut w: Vec<bool> = (0..2 * n + 1).map(|i| i < n).collect();
    w.shuffle(rng);
    let (mut h, mut lo, mut at) = (0i64, 0i64, 0usize);
    for (i, &s) in w.iter().enumerate() {
        h += if s { 1 } else { -1 };
        if h < lo {
            lo = h;
            at = i;
        }
    }
    let steps = (1..=2 * n).map(|k| w[(at + k) % (2 * n + 1)]).collect();
    PlaneTree { steps }
}

/// Permutation of `0..N` with only odd cycles, plus one sign per cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    /// Signs of the cycles, listed by smallest element.
    pub signs: Vec<bool>,
}

impl SignedPermutation {
    /// Cycles, each starting at its smallest element, ordered by it.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.perm.len()];
        let mut out = Vec::new();
        for s in 0..self.perm.len() {
            if seen[s] {
                continue;
            }
            let mut c = vec![];
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                c.push(x);
                x = self.perm[x];
            }
            out.push(c);
        }
        out
    }
}

/// Uniform odd-cycle permutation of `N` points with `k` cycles and uniform signs.
pub fn sample_c_permutation<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    table: &OddCyclePermTable,
    rng: &mut R,
) -> Result<SignedPermutation> {
    if table.get(n, k).is_zero() {
        return Err(Error::Invalid(format!(
            "no odd-cycle permutation of {n} points with {k} cycles"
        )));
    }
    let mut perm = vec![usize::MAX; n];
    let mut rest: Vec<usize> = (0..n).collect();
    let mut kr = k;
    while let Some(&x) = rest.first() {
        let m = rest.len();
        let mut u = rng.gen_biguint_below(&table.get(m, kr));
        let mut len = 0;
        loop {
            let w = falling(m - 1, len) * table.get(m - 1 - len, kr - 1);
            if u < w {
                break;
            }
            u -= w;
            len += 2;
        }
        let mut others: Vec<usize> = rest[1..].to_vec();
        let (chosen, _) = others.partial_shuffle(rng, len);
        let mut cyc = vec![x];
        cyc.extend_from_slice(chosen);
        for i in 0..cyc.len() {
            perm[cyc[i]] = cyc[(i + 1) % cyc.len()];
        }
        rest.retain(|y| !cyc.contains(y));
        kr -= 1;
    }
    let signs = (0..k).map(|_| rng.gen()).collect();
    Ok(SignedPermutation { perm, signs })
}

/// Face tour from the root: `tour[i] = phi^i(root)`.
pub fn face_tour(m: &CombinatorialMap) -> Vec<Dart> {
    let d = m.dart_count();
    let mut tour = Vec::with_capacity(d);
    if d == 0 {
        return tour;
    }
    let mut x = m.root();
    for _ in 0..d {
        tour.push(x);
        x = m.phi(x);
    }
    tour
}

/// Merges an odd number of distinct vertices of a unicellular map into one,
/// raising the genus by `(k−1)/2` and keeping a single face.
///
/// Each vertex is opened right after its dart of smallest arrival time
/// (`τ(alpha(tour[i])) = i`); the opened rotations are concatenated in
/// increasing order of that time.
pub fn glue_vertices(m: &CombinatorialMap, vertices: &[usize]) -> CombinatorialMap {
    assert!(vertices.len() % 2 == 1, "odd number of vertices");
    if vertices.len() == 1 {
        return m.clone();
    }
    let tour = face_tour(m);
    assert_eq!(tour.len(), m.dart_count(), "unicellular input");
    let mut tau = vec![0; m.dart_count()];
    for (i, &d) in tour.iter().enumerate() {
        tau[m.alpha(d)] = i;
    }
    let mut mins: Vec<Dart> = vertices
        .iter()
        .map(|&v| {
            m.vertex_darts(v)
                .into_iter()
                .min_by_key(|&d| tau[d])
                .unwrap()
        })
        .collect();
    mins.sort_by_key(|&d| tau[d]);
    let mut sigma = m.sigma_slice().to_vec();
    for i in 0..mins.len() {
        let next = mins[(i + 1) % mins.len()];
        sigma[mins[i]] = m.sigma(next);
    }
    let out = CombinatorialMap::new(
        sigma,
        m.alpha_slice().to_vec(),
        m.root(),
        vec![],
        Profile::Unicellular,
    )
    .expect("gluing keeps one face");
    debug_assert_eq!(out.genus(), m.genus() + (vertices.len() - 1) / 2);
    out
}

/// Merges tree vertices along the cycles of the decoration, cycle by cycle.
pub fn assemble_unicellular(tree: &PlaneTree, deco: &SignedPermutation) -> Result<CombinatorialMap> {
    let n = tree.edges();
    if deco.perm.len() != n + 1 {
        return Err(Error::Invalid(format!(
            "decoration acts on {} points, tree has {} vertices",
            deco.perm.len(),
            n + 1
        )));
    }
    let cycles = deco.cycles();
    if cycles.iter().any(|c| c.len() % 2 == 0) || deco.signs.len() != cycles.len() {
        return Err(Error::Invalid("decoration must have odd cycles and one sign per cycle".into()));
    }
    let mut m = tree.to_map();
    if n == 0 {
        return Ok(m);
    }
    let reps: Vec<Dart> = (0..=n).map(|v| m.vertex_rep(v)).collect();
    for c in cycles.iter().filter(|c| c.len() > 1) {
        let vs: Vec<usize> = c.iter().map(|&v| m.vertex_of(reps[v])).collect();
        m = glue_vertices(&m, &vs);
    }
    let g = (n + 1 - cycles.len()) / 2;
    assert_eq!(m.face_count(), 1);
    assert_eq!(m.genus(), g);
    Ok(m)
}

/// Count tables needed by [`sample_unicellular`] up to `n_max` edges.
#[derive(Clone, Debug)]
pub struct UnicellularTables {
    odd: OddCyclePermTable,
}

impl UnicellularTables {
    pub fn new(n_max: usize) -> Self {
        UnicellularTables {
            odd: OddCyclePermTable::new(n_max + 1),
        }
    }
    pub fn odd(&self) -> &OddCyclePermTable {
        &self.odd
    }
    pub fn count(&self, n: usize, g: usize) -> BigUint {
        unicellular_count(n, g, &self.odd)
    }
}

/// Uniform rooted unicellular map with `n` edges and genus `g`.
///
/// Every genus-`g` map arises from exactly `2g` triples (p, genus `g−p` map,
/// set of `2p+1` of its vertices) under [`glue_vertices`], so drawing such a
/// triple uniformly and gluing is exact.
pub fn sample_unicellular<R: Rng + ?Sized>(
    n: usize,
    g: usize,
    tables: &UnicellularTables,
    rng: &mut R,
) -> Result<CombinatorialMap> {
    if 2 * g > n {
        return Err(Error::Invalid(format!("no unicellular map with n={n}, g={g}")));
    }
    if g == 0 {
        return Ok(sample_plane_tree(n, rng).to_map());
    }
    let weights: Vec<BigUint> = (1..=g)
        .map(|p| binomial(n + 1 - 2 * g + 2 * p, 2 * p + 1) * tables.count(n, g - p))
        .collect();
    let total: BigUint = weights.iter().sum();
    let mut u = rng.gen_biguint_below(&total);
    let mut p = 1;
    for w in &weights {
        if u < *w {
            break;
        }
        u -= w;
        p += 1;
    }
    let base = sample_unicellular(n, g - p, tables, rng)?;
    let mut vs: Vec<usize> = (0..base.vertex_count()).collect();
    let (chosen, _) = vs.partial_shuffle(rng, 2 * p + 1);
    Ok(glue_vertices(&base, chosen))
}

/// Decorated-tree pipeline: uniform tree, uniform decoration, assemble.
pub fn sample_decorated<R: Rng + ?Sized>(
    n: usize,
    g: usize,
    tables: &UnicellularTables,
    rng: &mut R,
) -> Result<(PlaneTree, SignedPermutation, CombinatorialMap)> {
    if 2 * g > n {
        return Err(Error::Invalid(format!("no unicellular map with n={n}, g={g}")));
    }
    let tree = sample_plane_tree(n, rng);
    let deco = sample_c_permutation(n + 1, n + 1 - 2 * g, tables.odd(), rng)?;
    let m = assemble_unicellular(&tree, &deco)?;
    Ok((tree, deco, m))
}

/// Corner `(dart, sigma(dart))` of a unicellular map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Trisection {
    pub dart: Dart,
}

fn departure_times(m: &CombinatorialMap) -> Vec<usize> {
    let mut t = vec![0; m.dart_count()];
    for (i, d) in face_tour(m).into_iter().enumerate() {
        t[d] = i;
    }
    t
}

fn min_time_darts(m: &CombinatorialMap, t: &[usize]) -> Vec<Option<Dart>> {
    (0..m.vertex_count())
        .map(|v| m.vertex_darts(v).into_iter().min_by_key(|&d| t[d]))
        .collect()
}

/// Descents of the tour time around vertices, except the descent into each
/// vertex's earliest dart.
pub fn find_trisections(m: &CombinatorialMap) -> Result<Vec<Trisection>> {
    if m.face_count() != 1 {
        return Err(Error::Map(crate::MapError::NotUnicellular(m.face_count())));
    }
    let t = departure_times(m);
    let first = min_time_darts(m, &t);
    Ok((0..m.dart_count())
        .filter(|&d| {
            let s = m.sigma(d);
            t[s] < t[d] && first[m.vertex_of(d)] != Some(s)
        })
        .map(|dart| Trisection { dart })
        .collect())
}

/// Labeled unicellular map; labels are indexed by vertex id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledUnicellular {
    pub map: CombinatorialMap,
    pub labels: Vec<u32>,
}

impl LabeledUnicellular {
    pub fn new(map: CombinatorialMap, labels: Vec<u32>) -> Result<Self> {
        let l = LabeledUnicellular { map, labels };
        l.check()?;
        Ok(l)
    }

    pub fn label_of_dart(&self, d: Dart) -> u32 {
        self.labels[self.map.vertex_of(d)]
    }

    pub fn check(&self) -> Result<()> {
        if self.map.face_count() != 1 {
            return Err(Error::Invalid("labeled map must be unicellular".into()));
        }
        if self.labels.len() != self.map.vertex_count() {
            return Err(Error::Invalid("one label per vertex expected".into()));
        }
        if self.labels.iter().min() != Some(&1) {
            return Err(Error::Invalid("minimum label must be 1".into()));
        }
        for d in 0..self.map.dart_count() {
            let (a, b) = (self.label_of_dart(d), self.label_of_dart(self.map.alpha(d)));
            if a.abs_diff(b) > 1 {
                return Err(Error::Invalid(format!("labels differ by more than 1 across dart {d}")));
            }
        }
        Ok(())
    }

    /// Code of the map together with its labels in canonical vertex order.
    pub fn code(&self) -> (crate::CanonicalCode, Vec<u32>) {
        let c = self.map.canonical_form();
        let lab = self.map.canonical_labeling();
        let mut labels = vec![0; c.vertex_count()];
        for d in 0..self.map.dart_count() {
            labels[c.vertex_of(lab[d])] = self.label_of_dart(d);
        }
        if self.map.dart_count() == 0 {
            labels = self.labels.clone();
        }
        (c.canonical_code(), labels)
    }
}

/// Result of slicing at a trisection: genus drops by one and the three new
/// vertices are given by their first darts.
#[derive(Clone, Debug)]
pub struct Sliced {
    pub map: CombinatorialMap,
    pub corners: [Dart; 3],
}

/// Splits the trisection's vertex in three, cutting before its earliest dart,
/// before the trisection dart and after it.
pub fn slice_trisection(m: &CombinatorialMap, tri: Trisection) -> Result<Sliced> {
    let valid = find_trisections(m)?;
    if !valid.contains(&tri) {
        return Err(Error::Invalid(format!("corner at dart {} is not a trisection", tri.dart)));
    }
    let t = departure_times(m);
    let first = min_time_darts(m, &t)[m.vertex_of(tri.dart)].expect("trisection vertex has darts");
    let x = tri.dart;
    let y = m.sigma(x);
    let mut sigma = m.sigma_slice().to_vec();
    sigma[m.sigma_inv(x)] = first;
    sigma[x] = x;
    sigma[m.sigma_inv(first)] = y;
    let out = CombinatorialMap::new(sigma, m.alpha_slice().to_vec(), m.root(), vec![], Profile::Unicellular)
        .map_err(Error::Map)?;
    debug_assert_eq!(out.genus() + 1, m.genus());
    Ok(Sliced {
        map: out,
        corners: [first, x, y],
    })
}

/// Inverse of [`slice_trisection`]: merges the three vertices opened at the
/// given darts in the cyclic order that keeps a single face.
pub fn glue_three_corners(m: &CombinatorialMap, corners: [Dart; 3]) -> Result<CombinatorialMap> {
    let vs: Vec<usize> = corners.iter().map(|&d| m.vertex_of(d)).collect();
    if vs[0] == vs[1] || vs[1] == vs[2] || vs[0] == vs[2] {
        return Err(Error::Invalid("corners must lie at three distinct vertices".into()));
    }
    for order in [[0, 1, 2], [0, 2, 1]] {
        let mut sigma = m.sigma_slice().to_vec();
        for i in 0..3 {
            let a = corners[order[i]];
            let b = corners[order[(i + 1) % 3]];
            sigma[m.sigma_inv(a)] = b;
        }
        if let Ok(out) =
            CombinatorialMap::new(sigma, m.alpha_slice().to_vec(), m.root(), vec![], Profile::Unicellular)
        {
            return Ok(out);
        }
    }
    Err(Error::Invalid("no gluing order keeps one face".into()))
}

/// Carries vertex labels across a change of rotation on the same dart set.
pub fn transport_labels(from: &LabeledUnicellular, to: &CombinatorialMap) -> Vec<u32> {
    let mut labels = vec![0; to.vertex_count()];
    if to.dart_count() == 0 {
        return from.labels.clone();
    }
    for d in 0..to.dart_count() {
        labels[to.vertex_of(d)] = from.label_of_dart(d);
    }
    labels
}

/// BFS spanning tree from the root vertex: `(vertex, parent vertex)` in visiting order.
fn bfs_tree(m: &CombinatorialMap) -> Vec<(usize, usize)> {
    let nv = m.vertex_count();
    let mut seen = vec![false; nv];
    let r = m.root_vertex();
    seen[r] = true;
    let mut out = Vec::with_capacity(nv.saturating_sub(1));
    let mut queue = VecDeque::from([r]);
    while let Some(v) = queue.pop_front() {
        for d in m.vertex_darts(v) {
            let w = m.target(d);
            if !seen[w] {
                seen[w] = true;
                out.push((w, v));
                queue.push_back(w);
            }
        }
    }
    out
}

fn labels_from_increments(m: &CombinatorialMap, tree: &[(usize, usize)], inc: &[i64]) -> Option<Vec<u32>> {
    let mut lab = vec![0i64; m.vertex_count()];
    for (&(v, p), &s) in tree.iter().zip(inc) {
        lab[v] = lab[p] + s;
    }
    for d in 0..m.dart_count() {
        if (lab[m.vertex_of(d)] - lab[m.target(d)]).abs() > 1 {
            return None;
        }
    }
    let lo = *lab.iter().min().unwrap();
    Some(lab.into_iter().map(|x| (x - lo + 1) as u32).collect())
}

/// One rejection attempt: uniform increments on the BFS tree, accepted iff
/// every edge is well-labeled.
pub fn sample_well_labeling<R: Rng + ?Sized>(m: &CombinatorialMap, rng: &mut R) -> Option<Vec<u32>> {
    let tree = bfs_tree(m);
    let inc: Vec<i64> = tree.iter().map(|_| rng.gen_range(-1..=1)).collect();
    labels_from_increments(m, &tree, &inc)
}

/// Every increment vector on the BFS tree, with the labeling it yields if accepted.
pub fn all_increment_outcomes(m: &CombinatorialMap) -> Vec<Option<Vec<u32>>> {
    let tree = bfs_tree(m);
    let k = tree.len();
    let total = 3usize.pow(k as u32);
    (0..total)
        .map(|mut code| {
            let inc: Vec<i64> = (0..k)
                .map(|_| {
                    let s = (code % 3) as i64 - 1;
                    code /= 3;
                    s
                })
                .collect();
            labels_from_increments(m, &tree, &inc)
        })
        .collect()
}

/// All well-labelings of a unicellular map.
pub fn well_labelings(m: &CombinatorialMap) -> Vec<Vec<u32>> {
    all_increment_outcomes(m).into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::fixtures::f3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn trees_are_plane() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for n in 0..20 {
            let t = sample_plane_tree(n, &mut rng);
            assert!(t.is_valid());
            assert_eq!(t.edges(), n);
            let m = t.to_map();
            assert_eq!((m.genus(), m.face_count()), (0, 1));
        }
    }

    #[test]
    fn f3_trisections() {
        let tris = find_trisections(&f3()).unwrap();
        let darts: Vec<Dart> = tris.iter().map(|t| t.dart).collect();
        assert_eq!(darts, vec![1, 2]);
        for t in tris {
            let s = slice_trisection(&f3(), t).unwrap();
            assert_eq!(s.map.genus(), 0);
            assert_eq!(s.map.vertex_count(), 3);
            let back = glue_three_corners(&s.map, s.corners).unwrap();
            assert_eq!(back, f3());
        }
    }

    #[test]
    fn one_edge_tree_labelings() {
        let tree = PlaneTree { steps: vec![true, false] }.to_map();
        let mut ls = well_labelings(&tree);
        ls.sort();
        assert_eq!(ls, vec![vec![1, 1], vec![1, 2], vec![2, 1]]);
        assert_eq!(well_labelings(&f3()), vec![vec![1]]);
    }

    #[test]
    fn decorated_assembly_f3() {
        let tables = UnicellularTables::new(4);
        for steps in [vec![true, true, false, false], vec![true, false, true, false]] {
            let tree = PlaneTree { steps };
            for perm in [vec![1, 2, 0], vec![2, 0, 1]] {
                let deco = SignedPermutation { perm, signs: vec![true] };
                let m = assemble_unicellular(&tree, &deco).unwrap();
                assert_eq!(m.canonical_code(), f3().canonical_code());
            }
        }
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let id = sample_c_permutation(3, 3, tables.odd(), &mut rng).unwrap();
        assert_eq!(id.perm, vec![0, 1, 2]);
    }
}
