//! Geometric observables: balls around the root, planarity radius, short
//! non-contractible cycles, 2-cycle census, cycles with tail and diameter.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::map::{CombinatorialMap, Dart, Profile};
use crate::surgery::{classify_cycle, parallel_pairs, Classification, CycleWithTail};

/// A radius or length that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Radius {
    Finite(usize),
    Infinite,
}

impl Radius {
    pub fn finite(self) -> Option<usize> {
        match self {
            Radius::Finite(r) => Some(r),
            Radius::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Radius::Infinite
    }

    pub fn plus(self, k: usize) -> Radius {
        match self {
            Radius::Finite(r) => Radius::Finite(r + k),
            Radius::Infinite => Radius::Infinite,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(r) => write!(f, "{r}"),
            Radius::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Radius::Finite(r) => s.serialize_u64(*r as u64),
            Radius::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Vertices within distance `r` of the root vertex, the edges between them
/// and the faces whose darts all lie inside.
#[derive(Clone, Debug)]
pub struct BallComplex {
    pub r: usize,
    /// Distance from the root vertex, per ambient vertex.
    pub dist: Vec<u32>,
    pub vertices: Vec<usize>,
    /// Ambient dart of each local dart of `map`.
    pub darts: Vec<Dart>,
    pub faces: Vec<usize>,
    /// The ball as a map; phi-cycles that are not ambient faces are its boundary.
    pub map: CombinatorialMap,
}

impl BallComplex {
    pub fn genus(&self) -> usize {
        self.map.genus()
    }

    pub fn edge_count(&self) -> usize {
        self.darts.len() / 2
    }
}

pub fn ball(m: &CombinatorialMap, r: usize) -> BallComplex {
    let dist = if m.dart_count() == 0 {
        vec![0]
    } else {
        m.distances_from(m.root_vertex())
    };
    ball_with(m, r, dist)
}

fn ball_with(m: &CombinatorialMap, r: usize, dist: Vec<u32>) -> BallComplex {
    let inside = |v: usize| (dist[v] as usize) <= r;
    let vertices: Vec<usize> = (0..dist.len()).filter(|&v| inside(v)).collect();
    let darts: Vec<Dart> = (0..m.dart_count())
        .filter(|&d| inside(m.vertex_of(d)) && inside(m.target(d)))
        .collect();
    let faces: Vec<usize> = (0..m.face_count())
        .filter(|&f| m.face_darts(f).iter().all(|&d| inside(m.vertex_of(d))))
        .collect();
    let map = if darts.is_empty() {
        CombinatorialMap::vertex_map()
    } else {
        let mut local = HashMap::new();
        for (i, &d) in darts.iter().enumerate() {
            local.insert(d, i);
        }
        let sigma = darts
            .iter()
            .map(|&d| {
                let mut x = m.sigma(d);
                while !local.contains_key(&x) {
                    x = m.sigma(x);
                }
                local[&x]
            })
            .collect();
        let alpha = darts.iter().map(|&d| local[&m.alpha(d)]).collect();
        let root = local.get(&m.root()).copied().unwrap_or(0);
        CombinatorialMap::new(sigma, alpha, root, vec![], Profile::General)
            .expect("balls are connected maps")
    };
    BallComplex { r, dist, vertices, darts, faces, map }
}

/// BFS tree from `src`: parent dart per vertex (leaving the vertex towards
/// its parent) and depth.
struct Tree {
    up: Vec<Option<Dart>>,
    depth: Vec<u32>,
}

fn bfs_tree(m: &CombinatorialMap, src: usize) -> Tree {
    let nv = m.vertex_count();
    let mut up = vec![None; nv];
    let mut depth = vec![u32::MAX; nv];
    depth[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for d in m.vertex_darts(v) {
            let w = m.target(d);
            if depth[w] == u32::MAX {
                depth[w] = depth[v] + 1;
                up[w] = Some(m.alpha(d));
                queue.push_back(w);
            }
        }
    }
    Tree { up, depth }
}

impl Tree {
    fn is_tree_edge(&self, m: &CombinatorialMap, d: Dart) -> bool {
        let (u, w) = (m.vertex_of(d), m.target(d));
        self.up[u] == Some(d) || self.up[w] == Some(m.alpha(d))
    }

    /// Simple cycle made of chord `d` and the tree paths to the common ancestor.
    fn fundamental_cycle(&self, m: &CombinatorialMap, d: Dart) -> Vec<Dart> {
        let mut u = m.vertex_of(d);
        let mut w = m.target(d);
        let mut from_w = Vec::new();
        let mut to_u = Vec::new();
        while u != w {
            if self.depth[w] >= self.depth[u] {
                let p = self.up[w].unwrap();
                from_w.push(p);
                w = m.target(p);
            } else {
                let p = self.up[u].unwrap();
                to_u.push(m.alpha(p));
                u = m.target(p);
            }
        }
        let mut c = vec![d];
        c.extend(from_w);
        c.extend(to_u.into_iter().rev());
        c
    }
}

/// Largest `r` such that every cycle of the ball of radius `r` is
/// contractible in `m`; infinite when no radius fails.
///
/// The BFS tree of a ball is the global BFS tree cut at depth `r`, so the
/// fundamental cycles of `B_r` are those of `B_{r-1}` plus the chords whose
/// deeper end is at distance `r`; only the new ones are tested at each step.
pub fn planarity_radius(m: &CombinatorialMap) -> Radius {
    if m.dart_count() == 0 {
        return Radius::Infinite;
    }
    let t = bfs_tree(m, m.root_vertex());
    let ecc = *t.depth.iter().max().unwrap() as usize;
    let mut by_level: Vec<Vec<Dart>> = vec![Vec::new(); ecc + 1];
    for e in m.edges() {
        if !t.is_tree_edge(m, e) {
            let lvl = t.depth[m.vertex_of(e)].max(t.depth[m.target(e)]) as usize;
            by_level[lvl].push(e);
        }
    }
    for (r, chords) in by_level.iter().enumerate() {
        for &e in chords {
            let c = t.fundamental_cycle(m, e);
            if !classify_cycle(m, &c).expect("fundamental cycles are simple").is_contractible() {
                return Radius::Finite(r - 1);
            }
        }
    }
    Radius::Infinite
}

/// Largest `r` such that the ball of radius `r` has genus 0.
pub fn ball_planar_radius(m: &CombinatorialMap) -> Radius {
    if m.dart_count() == 0 {
        return Radius::Infinite;
    }
    let dist = m.distances_from(m.root_vertex());
    let ecc = *dist.iter().max().unwrap() as usize;
    for r in 0..=ecc {
        if ball_with(m, r, dist.clone()).genus() > 0 {
            return Radius::Finite(r - 1);
        }
    }
    Radius::Infinite
}

/// A non-contractible simple cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleCertificate {
    pub length: usize,
    pub darts: Vec<Dart>,
}

/// Shortest non-contractible cycle among the fundamental cycles of the BFS
/// trees of all vertices.
pub fn shortest_non_contractible(m: &CombinatorialMap) -> Option<CycleCertificate> {
    let mut cands: Vec<Vec<Dart>> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let edges = m.edges();
    for v in 0..m.vertex_count() {
        if m.dart_count() == 0 {
            break;
        }
        let t = bfs_tree(m, v);
        for &e in &edges {
            if !t.is_tree_edge(m, e) {
                let c = t.fundamental_cycle(m, e);
                if seen.insert(edge_key(m, &c)) {
                    cands.push(c);
                }
            }
        }
    }
    cands.sort_by_key(|c| c.len());
    cands
        .into_iter()
        .find(|c| !classify_cycle(m, c).unwrap().is_contractible())
        .map(|darts| CycleCertificate { length: darts.len(), darts })
}

fn edge_key(m: &CombinatorialMap, c: &[Dart]) -> Vec<usize> {
    let mut k: Vec<usize> = c.iter().map(|&d| m.edge_id(d)).collect();
    k.sort_unstable();
    k
}

/// Calls `f` once per simple cycle of length exactly `len`, as a dart
/// sequence starting at its smallest vertex. Stops early when `f` returns false.
pub fn for_each_simple_cycle(m: &CombinatorialMap, len: usize, mut f: impl FnMut(&[Dart]) -> bool) {
    if len == 0 || m.dart_count() == 0 {
        return;
    }
    let nv = m.vertex_count();
    let mut on_path = vec![false; nv];
    let mut path = Vec::with_capacity(len);
    for s in 0..nv {
        on_path[s] = true;
        if !extend(m, s, s, len, &mut on_path, &mut path, &mut f) {
            return;
        }
        on_path[s] = false;
    }

    fn extend(
        m: &CombinatorialMap,
        s: usize,
        v: usize,
        len: usize,
        on_path: &mut Vec<bool>,
        path: &mut Vec<Dart>,
        f: &mut impl FnMut(&[Dart]) -> bool,
    ) -> bool {
        for d in m.vertex_darts(v) {
            let w = m.target(d);
            if path.len() + 1 == len {
                if w == s && (len == 1 || m.edge_id(path[0]) < m.edge_id(d)) {
                    path.push(d);
                    let go = f(path);
                    path.pop();
                    if !go {
                        return false;
                    }
                }
                continue;
            }
            if w <= s || on_path[w] {
                continue;
            }
            on_path[w] = true;
            path.push(d);
            let go = extend(m, s, w, len, on_path, path, f);
            path.pop();
            on_path[w] = false;
            if !go {
                return false;
            }
        }
        true
    }
}

/// Shortest non-contractible cycle length by trying every simple cycle.
pub fn systole_exhaustive(m: &CombinatorialMap) -> Option<usize> {
    for len in 1..=m.edge_count() {
        let mut found = false;
        for_each_simple_cycle(m, len, |c| {
            found = !classify_cycle(m, c).unwrap().is_contractible();
            !found
        });
        if found {
            return Some(len);
        }
    }
    None
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TwoCycleCensus {
    pub nonseparating: usize,
    pub separating_noncontractible: usize,
    pub contractible: usize,
}

impl TwoCycleCensus {
    pub fn total(&self) -> usize {
        self.nonseparating + self.separating_noncontractible + self.contractible
    }
}

pub fn two_cycle_census(m: &CombinatorialMap) -> TwoCycleCensus {
    let mut c = TwoCycleCensus::default();
    for (e, f) in parallel_pairs(m) {
        let f2 = if m.vertex_of(f) == m.target(e) { f } else { m.alpha(f) };
        match classify_cycle(m, &[e, f2]).unwrap() {
            Classification::Nonseparating => c.nonseparating += 1,
            Classification::SeparatingNoncontractible => c.separating_noncontractible += 1,
            Classification::Contractible => c.contractible += 1,
        }
    }
    c
}

/// Bounds on the smallest cycle with tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailBounds {
    pub lower: Radius,
    pub upper: Radius,
    pub certificate: Option<CycleWithTail>,
    /// True when every cycle shorter than `upper` was examined.
    pub exact: bool,
}

/// Searches non-contractible simple cycles of length at most `search_cap`
/// by increasing length; each is attached to the root by a shortest
/// admissible tail.
pub fn cycle_with_tail_min(m: &CombinatorialMap, search_cap: usize) -> TailBounds {
    let lower = planarity_radius(m).plus(1);
    if m.genus() == 0 {
        return TailBounds { lower, upper: Radius::Infinite, certificate: None, exact: true };
    }
    let root_edge = m.edge_id(m.root());
    let mut best: Option<(usize, CycleWithTail)> = None;
    let mut memo: HashMap<Vec<usize>, bool> = HashMap::new();
    let mut len = 1;
    while len <= search_cap && best.as_ref().is_none_or(|b| len < b.0) {
        for_each_simple_cycle(m, len, |c| {
            let through_root = c.iter().any(|&d| m.edge_id(d) == root_edge);
            let tail = if through_root { Some(vec![]) } else { shortest_tail(m, c) };
            let Some(tail) = tail else { return true };
            let size = len + tail.len();
            if best.as_ref().is_some_and(|b| size >= b.0) {
                return true;
            }
            let nc = *memo
                .entry(edge_key(m, c))
                .or_insert_with(|| !classify_cycle(m, c).unwrap().is_contractible());
            if nc {
                best = Some((size, CycleWithTail { tail, cycle: c.to_vec() }));
            }
            true
        });
        len += 1;
    }
    match best {
        Some((size, ct)) => TailBounds {
            lower,
            upper: Radius::Finite(size),
            certificate: Some(ct),
            exact: len >= size,
        },
        None => TailBounds { lower, upper: Radius::Infinite, certificate: None, exact: false },
    }
}

/// Shortest tail for cycle `c`: the root edge, traversed from either end,
/// followed by a shortest path that avoids the cycle until its last vertex.
fn shortest_tail(m: &CombinatorialMap, c: &[Dart]) -> Option<Vec<Dart>> {
    let on_cycle: HashSet<usize> = c.iter().map(|&d| m.vertex_of(d)).collect();
    [m.root(), m.alpha(m.root())]
        .into_iter()
        .filter_map(|first| tail_from(m, first, &on_cycle))
        .min_by_key(|t| t.len())
}

fn tail_from(m: &CombinatorialMap, first: Dart, on_cycle: &HashSet<usize>) -> Option<Vec<Dart>> {
    let (origin, start) = (m.vertex_of(first), m.target(first));
    if origin == start || on_cycle.contains(&origin) {
        return None;
    }
    if on_cycle.contains(&start) {
        return Some(vec![first]);
    }
    let mut via: HashMap<usize, Dart> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    let mut seen: HashSet<usize> = HashSet::from([start, origin]);
    while let Some(v) = queue.pop_front() {
        for d in m.vertex_darts(v) {
            let w = m.target(d);
            if !seen.insert(w) {
                continue;
            }
            via.insert(w, d);
            if on_cycle.contains(&w) {
                let mut path = vec![d];
                let mut x = v;
                while x != start {
                    let p = via[&x];
                    path.push(p);
                    x = m.vertex_of(p);
                }
                path.push(first);
                path.reverse();
                return Some(path);
            }
            queue.push_back(w);
        }
    }
    None
}

/// Largest eccentricity, exact by BFS from every vertex up to `exact_limit`
/// vertices, otherwise a double-sweep lower bound.
pub fn diameter(m: &CombinatorialMap, exact_limit: usize) -> (usize, bool) {
    if m.dart_count() == 0 {
        return (0, true);
    }
    let ecc = |v: usize| *m.distances_from(v).iter().max().unwrap() as usize;
    let nv = m.vertex_count();
    if nv <= exact_limit {
        return ((0..nv).map(ecc).max().unwrap(), true);
    }
    let d = m.distances_from(m.root_vertex());
    let far = (0..nv).max_by_key(|&v| d[v]).unwrap();
    (ecc(far), false)
}

pub const DIAMETER_EXACT_LIMIT: usize = 20_000;
pub const DEFAULT_SEARCH_CAP: usize = 8;

/// Which observables to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub pr: bool,
    pub systole: bool,
    pub two_cycles: bool,
    pub ct: bool,
    pub diameter: bool,
}

impl Metrics {
    pub const ALL: Metrics = Metrics { pr: true, systole: true, two_cycles: true, ct: true, diameter: true };
    pub const NONE: Metrics = Metrics { pr: false, systole: false, two_cycles: false, ct: false, diameter: false };

    /// Parses a comma-separated list such as `pr,systole,two-cycles,ct,diameter`.
    pub fn parse(s: &str) -> Result<Metrics, String> {
        let mut m = Metrics::NONE;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "pr" => m.pr = true,
                "systole" => m.systole = true,
                "two-cycles" | "x" => m.two_cycles = true,
                "ct" => m.ct = true,
                "diameter" => m.diameter = true,
                "all" => m = Metrics::ALL,
                other => return Err(format!("unknown metric `{other}`")),
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeometryReport {
    pub planarity_radius: Option<Radius>,
    pub ball_planar_radius: Option<Radius>,
    pub systole: Option<Option<CycleCertificate>>,
    pub census: Option<TwoCycleCensus>,
    pub ct_lower: Option<Radius>,
    pub ct_upper: Option<Radius>,
    pub ct_exact: Option<bool>,
    #[serde(skip)]
    pub ct_certificate: Option<CycleWithTail>,
    pub diameter: Option<usize>,
    pub flags: Vec<&'static str>,
}

impl GeometryReport {
    pub fn x(&self) -> Option<usize> {
        self.census.map(|c| c.nonseparating)
    }
}

pub fn analyze(m: &CombinatorialMap, metrics: Metrics, search_cap: usize) -> GeometryReport {
    let mut flags = Vec::new();
    let (pr, bpr) = if metrics.pr || metrics.ct {
        (Some(planarity_radius(m)), Some(ball_planar_radius(m)))
    } else {
        (None, None)
    };
    let systole = metrics.systole.then(|| {
        flags.push("systole-bfs-candidates");
        shortest_non_contractible(m)
    });
    let census = metrics.two_cycles.then(|| two_cycle_census(m));
    let (mut ct_lower, mut ct_upper, mut ct_exact, mut ct_certificate) = (None, None, None, None);
    if metrics.ct {
        let t = cycle_with_tail_min(m, search_cap);
        if !t.exact {
            flags.push("ct-inexact");
        }
        ct_lower = Some(t.lower);
        ct_upper = Some(t.upper);
        ct_exact = Some(t.exact);
        ct_certificate = t.certificate;
    }
    let diameter = metrics.diameter.then(|| {
        let (d, exact) = diameter(m, DIAMETER_EXACT_LIMIT);
        if !exact {
            flags.push("diameter-bound");
        }
        d
    });
    GeometryReport {
        planarity_radius: pr,
        ball_planar_radius: bpr,
        systole,
        census,
        ct_lower,
        ct_upper,
        ct_exact,
        ct_certificate,
        diameter,
        flags,
    }
}

/// Checks the sandwich `PR+1 ≤ ct ≤ 7(PR+1)+1` and `PR = ∞ ⇔ g = 0`.
pub fn check_invariants(m: &CombinatorialMap, r: &GeometryReport) -> Result<(), String> {
    if let Some(pr) = r.planarity_radius {
        if pr.is_infinite() != (m.genus() == 0) {
            return Err(format!("PR = {pr} on a genus {} map", m.genus()));
        }
        if let Some(b) = r.ball_planar_radius {
            if pr > b {
                return Err(format!("PR = {pr} exceeds ball planar radius {b}"));
            }
        }
        if let (Some(Radius::Finite(ct)), Some(true)) = (r.ct_upper, r.ct_exact) {
            let p = pr.finite().ok_or("finite ct with infinite PR")?;
            if ct < p + 1 || ct > 7 * (p + 1) + 1 {
                return Err(format!("ct = {ct} outside [{}, {}]", p + 1, 7 * (p + 1) + 1));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::fixtures::*;

    #[test]
    fn balls() {
        let b = ball(&f1(), 0);
        assert_eq!((b.vertices.len(), b.edge_count()), (1, 0));
        let b = ball(&f1(), 1);
        assert_eq!((b.vertices.len(), b.edge_count(), b.faces.len()), (2, 1, 0));
        let b = ball(&f2(), 1);
        assert_eq!((b.vertices.len(), b.edge_count(), b.genus()), (2, 4, 1));
    }

    #[test]
    fn fixtures() {
        assert_eq!(planarity_radius(&f1()), Radius::Infinite);
        assert_eq!(planarity_radius(&f2()), Radius::Finite(0));
        assert_eq!(shortest_non_contractible(&f1()), None);
        assert_eq!(shortest_non_contractible(&f2()).unwrap().length, 2);
        assert_eq!(systole_exhaustive(&f2()), Some(2));
        let c = two_cycle_census(&f2());
        assert_eq!((c.nonseparating, c.separating_noncontractible, c.contractible), (6, 0, 0));
        assert_eq!(two_cycle_census(&f1()).total(), 0);
        let t = cycle_with_tail_min(&f2(), 4);
        assert_eq!((t.lower, t.upper, t.exact), (Radius::Finite(1), Radius::Finite(2), true));
        assert!(t.certificate.unwrap().tail.is_empty());
        assert_eq!(cycle_with_tail_min(&f1(), 4).upper, Radius::Infinite);
        assert_eq!(diameter(&f1(), 100), (2, true));
        assert_eq!(diameter(&f2(), 100), (1, true));
        assert_eq!(diameter(&CombinatorialMap::vertex_map(), 100), (0, true));
    }

    #[test]
    fn report_invariants() {
        for m in [f1(), f2()] {
            let r = analyze(&m, Metrics::ALL, 6);
            check_invariants(&m, &r).unwrap();
        }
    }
}
