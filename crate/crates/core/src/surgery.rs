//! Cutting and gluing maps along cycles and paths.
//!
//! All operations run on a mutable dart workspace: cuts duplicate darts and
//! mark the two sides of the cut as hole faces, zips identify pairs of hole
//! edges and delete them. The workspace is then compacted into one validated
//! map per connected component.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::{CombinatorialMap, Dart, Profile};

const DEAD: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Contractible,
    SeparatingNoncontractible,
    Nonseparating,
}

impl Classification {
    pub fn is_contractible(self) -> bool {
        self == Classification::Contractible
    }
}

/// Mutable rotation system with deletable darts.
#[derive(Clone, Debug)]
pub(crate) struct Work {
    sigma: Vec<Dart>,
    alpha: Vec<Dart>,
    alive: Vec<bool>,
    root: Dart,
    holes: Vec<Dart>,
    quad: bool,
}

impl Work {
    pub(crate) fn from_map(m: &CombinatorialMap) -> Self {
        Work {
            sigma: m.sigma_slice().to_vec(),
            alpha: m.alpha_slice().to_vec(),
            alive: vec![true; m.dart_count()],
            root: m.root(),
            holes: m.holes().to_vec(),
            quad: matches!(m.profile(), Profile::Quadrangulation | Profile::WithHoles),
        }
    }

    /// Disjoint union; returns the id offset of the second map.
    fn append(&mut self, m: &CombinatorialMap) -> usize {
        let off = self.sigma.len();
        self.sigma.extend(m.sigma_slice().iter().map(|&d| d + off));
        self.alpha.extend(m.alpha_slice().iter().map(|&d| d + off));
        self.alive.extend(std::iter::repeat_n(true, m.dart_count()));
        self.holes.extend(m.holes().iter().map(|&h| h + off));
        off
    }

    fn new_edge(&mut self) -> (Dart, Dart) {
        let a = self.sigma.len();
        let b = a + 1;
        self.sigma.extend([a, b]);
        self.alpha.extend([b, a]);
        self.alive.extend([true, true]);
        (a, b)
    }

    fn phi(&self, d: Dart) -> Dart {
        self.sigma[self.alpha[d]]
    }

    fn sigma_inv(&self, d: Dart) -> Dart {
        let mut x = d;
        loop {
            let s = self.sigma[x];
            if s == d {
                return x;
            }
            x = s;
        }
    }

    fn phi_inv(&self, d: Dart) -> Dart {
        self.alpha[self.sigma_inv(d)]
    }

    fn orbit(&self, d: Dart, step: impl Fn(Dart) -> Dart) -> Vec<Dart> {
        let mut out = vec![d];
        let mut x = step(d);
        while x != d {
            out.push(x);
            x = step(x);
        }
        out
    }

    /// Splits the vertex at the corner before `o` and the corner before `n`'s
    /// successor: `o … n` stays, `n_b, sigma(n) … pred(o), o_b` is the new vertex.
    fn split_vertex(&mut self, o: Dart, n: Dart, o_b: Dart, n_b: Dart) {
        let s_n = self.sigma[n];
        let pred_o = self.sigma_inv(o);
        self.sigma[n] = o;
        if s_n == o {
            self.sigma[n_b] = o_b;
        } else {
            self.sigma[n_b] = s_n;
            self.sigma[pred_o] = o_b;
        }
        self.sigma[o_b] = n_b;
    }

    /// Cuts along the simple cycle `c` (dart `c[i]` runs from vertex `i` to
    /// vertex `i+1`). Original darts form the left side; returns the hole
    /// darts `(left, right)` and the right copies `(c_i', alpha(c_i)')`.
    fn cut_cycle(&mut self, c: &[Dart]) -> (Dart, Dart, Vec<(Dart, Dart)>) {
        let l = c.len();
        let copies: Vec<(Dart, Dart)> = (0..l).map(|_| self.new_edge()).collect();
        for i in 0..l {
            let o = c[i];
            let n = self.alpha[c[(i + l - 1) % l]];
            let o_b = copies[i].0;
            let n_b = copies[(i + l - 1) % l].1;
            self.split_vertex(o, n, o_b, n_b);
        }
        let left = c[0];
        let right = copies[0].1;
        self.holes.push(left);
        self.holes.push(right);
        (left, right, copies)
    }

    /// Cuts along a simple path. Start vertex: `o_b` is inserted before the
    /// first dart. End: either a free apex, or a hole corner `(a, h)` at the
    /// last vertex into which the slit opens. Returns the right copies.
    fn cut_path(&mut self, p: &[Dart], end_hole: Option<(Dart, Dart)>) -> Vec<(Dart, Dart)> {
        let l = p.len();
        let copies: Vec<(Dart, Dart)> = (0..l).map(|_| self.new_edge()).collect();
        let o = p[0];
        let pred = self.sigma_inv(o);
        self.sigma[pred] = copies[0].0;
        self.sigma[copies[0].0] = o;
        for k in 1..l {
            let n = self.alpha[p[k - 1]];
            self.split_vertex(p[k], n, copies[k].0, copies[k - 1].1);
        }
        let n = self.alpha[p[l - 1]];
        let n_b = copies[l - 1].1;
        match end_hole {
            None => {
                self.sigma[n_b] = self.sigma[n];
                self.sigma[n] = n_b;
                self.holes.push(p[0]);
            }
            Some((a, h)) => {
                let s_n = self.sigma[n];
                debug_assert_ne!(s_n, h);
                self.sigma[n] = h;
                self.sigma[n_b] = s_n;
                self.sigma[a] = n_b;
            }
        }
        copies
    }

    /// Identifies hole dart `x` with hole dart `pairs[x]` for every pair: both
    /// are deleted and their partners become one edge. The pairs must run
    /// along holes in opposite directions.
    fn zip(&mut self, pairs: &[(Dart, Dart)]) {
        let n = self.sigma.len();
        let mut partner = vec![DEAD; n];
        for &(x, y) in pairs {
            partner[x] = y;
            partner[y] = x;
        }
        let repl = |z: Dart| if partner[z] != DEAD { self.alpha[partner[z]] } else { z };
        let mut seam_of = vec![DEAD; n];
        for &(x, y) in pairs {
            seam_of[self.alpha[x]] = x;
            seam_of[self.alpha[y]] = y;
        }
        let mut sigma = self.sigma.clone();
        for u in 0..n {
            if !self.alive[u] || partner[u] != DEAD {
                continue;
            }
            sigma[u] = if seam_of[u] != DEAD {
                repl(self.sigma[partner[seam_of[u]]])
            } else {
                repl(self.sigma[u])
            };
        }
        for u in 0..n {
            if seam_of[u] == DEAD {
                continue;
            }
            let pb = self.sigma_inv(partner[seam_of[u]]);
            if partner[pb] == DEAD && seam_of[pb] == DEAD {
                sigma[pb] = repl(self.sigma[u]);
            }
        }
        let mut holes = Vec::new();
        for &h in &self.holes {
            let face = self.orbit(h, |d| self.phi(d));
            if let Some(&k) = face.iter().find(|&&d| partner[d] == DEAD) {
                holes.push(k);
            }
        }
        let mut alpha = self.alpha.clone();
        for &(x, y) in pairs {
            let (ax, ay) = (self.alpha[x], self.alpha[y]);
            alpha[ax] = ay;
            alpha[ay] = ax;
        }
        if partner[self.root] != DEAD {
            self.root = repl(self.root);
        }
        for &(x, y) in pairs {
            self.alive[x] = false;
            self.alive[y] = false;
        }
        self.sigma = sigma;
        self.alpha = alpha;
        self.holes = holes;
    }

    /// Adds an edge across a hole from the origin of `s` to the origin of
    /// `phi^k(s)`; returns the new dart at the origin of `s`, which lies on
    /// the part of the hole not containing `s`.
    fn add_chord(&mut self, s: Dart, k: usize) -> Dart {
        let mut hk = s;
        for _ in 0..k {
            hk = self.phi(hk);
        }
        let before_s = self.alpha[self.phi_inv(s)];
        let before_hk = self.alpha[self.phi_inv(hk)];
        let (a, b) = self.new_edge();
        self.sigma[before_s] = a;
        self.sigma[a] = s;
        self.sigma[before_hk] = b;
        self.sigma[b] = hk;
        a
    }

    /// Live darts grouped by connected component; the root's component first.
    fn components(&self) -> Vec<Vec<Dart>> {
        let n = self.sigma.len();
        let mut comp = vec![DEAD; n];
        let mut out: Vec<Vec<Dart>> = Vec::new();
        let mut starts = vec![self.root];
        starts.extend(0..n);
        for s in starts {
            if !self.alive[s] || comp[s] != DEAD {
                continue;
            }
            let c = out.len();
            let mut stack = vec![s];
            comp[s] = c;
            let mut darts = Vec::new();
            while let Some(d) = stack.pop() {
                darts.push(d);
                for e in [self.sigma[d], self.alpha[d]] {
                    if comp[e] == DEAD {
                        comp[e] = c;
                        stack.push(e);
                    }
                }
            }
            darts.sort_unstable();
            out.push(darts);
        }
        out
    }

    fn component_genus(&self, darts: &[Dart]) -> usize {
        let set: HashSet<Dart> = darts.iter().copied().collect();
        let count = |step: &dyn Fn(Dart) -> Dart| {
            let mut seen = HashSet::new();
            let mut cycles = 0i64;
            for &d in darts {
                if seen.insert(d) {
                    cycles += 1;
                    let mut x = step(d);
                    while x != d {
                        seen.insert(x);
                        x = step(x);
                    }
                }
            }
            cycles
        };
        debug_assert!(darts.iter().all(|d| set.contains(&self.sigma[*d])));
        let v = count(&|d| self.sigma[d]);
        let f = count(&|d| self.phi(d));
        let e = darts.len() as i64 / 2;
        ((2 - v + e - f) / 2) as usize
    }

    /// Compacts every component into a validated map. The root's component
    /// keeps the root; other components are rooted at `fallback_roots`' first
    /// member they contain, or their smallest dart.
    fn build(&self, fallback_roots: &[Dart]) -> Result<Built> {
        let comps = self.components();
        let mut index = vec![None; self.sigma.len()];
        let mut maps = Vec::new();
        for (ci, darts) in comps.iter().enumerate() {
            for (k, &d) in darts.iter().enumerate() {
                index[d] = Some((ci, k));
            }
            let local = |d: Dart| index[d].expect("live dart").1;
            let sigma = darts.iter().map(|&d| local(self.sigma[d])).collect();
            let alpha = darts.iter().map(|&d| local(self.alpha[d])).collect();
            let root = if ci == 0 {
                local(self.root)
            } else {
                fallback_roots
                    .iter()
                    .find(|&&r| self.alive[r] && index[r].map(|x| x.0) == Some(ci))
                    .map(|&r| local(r))
                    .unwrap_or(0)
            };
            let holes: Vec<Dart> = self
                .holes
                .iter()
                .filter(|&&h| index[h].map(|x| x.0) == Some(ci))
                .map(|&h| local(h))
                .collect();
            let profile = match (self.quad, holes.is_empty()) {
                (true, true) => Profile::Quadrangulation,
                (true, false) => Profile::WithHoles,
                (false, _) => Profile::General,
            };
            maps.push(CombinatorialMap::new(sigma, alpha, root, holes, profile)?);
        }
        Ok(Built { maps, index })
    }
}

struct Built {
    maps: Vec<CombinatorialMap>,
    index: Vec<Option<(usize, Dart)>>,
}

/// Location of a dart after surgery: `(piece, dart)`.
pub type Loc = (usize, Dart);

#[derive(Clone, Debug)]
pub struct CutResult {
    pub classification: Classification,
    /// Resulting maps; the first one holds the root.
    pub pieces: Vec<CombinatorialMap>,
    /// New location of every old dart (its left copy for cycle darts).
    pub correspondence: Vec<Option<Loc>>,
    /// Right copies of the cycle darts, aligned with the input cycle.
    pub right_copies: Vec<Loc>,
    /// Hole darts on the left and right side of the cut.
    pub holes: [Loc; 2],
}

impl CutResult {
    pub fn euler_total(&self) -> i64 {
        self.pieces.iter().map(|m| m.euler_characteristic()).sum()
    }
}

pub fn check_cycle(m: &CombinatorialMap, c: &[Dart]) -> Result<()> {
    if c.is_empty() {
        return Err(Error::Invalid("empty cycle".into()));
    }
    let l = c.len();
    let mut vs = HashSet::new();
    let mut es = HashSet::new();
    for i in 0..l {
        if c[i] >= m.dart_count() {
            return Err(Error::Invalid(format!("dart {} out of range", c[i])));
        }
        if m.target(c[i]) != m.vertex_of(c[(i + 1) % l]) {
            return Err(Error::Invalid(format!("cycle darts {} and {} do not meet", c[i], c[(i + 1) % l])));
        }
        if !vs.insert(m.vertex_of(c[i])) {
            return Err(Error::Invalid("cycle is not simple".into()));
        }
        if !es.insert(m.edge_id(c[i])) {
            return Err(Error::Invalid("cycle reuses an edge".into()));
        }
    }
    Ok(())
}

pub fn check_path(m: &CombinatorialMap, p: &[Dart]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Invalid("empty path".into()));
    }
    let mut vs = HashSet::new();
    vs.insert(m.vertex_of(p[0]));
    for i in 0..p.len() {
        if p[i] >= m.dart_count() {
            return Err(Error::Invalid(format!("dart {} out of range", p[i])));
        }
        if i + 1 < p.len() && m.target(p[i]) != m.vertex_of(p[i + 1]) {
            return Err(Error::Invalid(format!("path darts {} and {} do not meet", p[i], p[i + 1])));
        }
        if !vs.insert(m.target(p[i])) {
            return Err(Error::Invalid("path is not simple".into()));
        }
    }
    Ok(())
}

fn classify(w: &Work) -> Classification {
    let comps = w.components();
    if comps.len() == 1 {
        Classification::Nonseparating
    } else if comps.iter().any(|c| w.component_genus(c) == 0) {
        Classification::Contractible
    } else {
        Classification::SeparatingNoncontractible
    }
}

/// Classification of a simple cycle without building the pieces.
pub fn classify_cycle(m: &CombinatorialMap, c: &[Dart]) -> Result<Classification> {
    check_cycle(m, c)?;
    let mut w = Work::from_map(m);
    w.cut_cycle(c);
    Ok(classify(&w))
}

pub fn cut_simple_cycle(m: &CombinatorialMap, c: &[Dart]) -> Result<CutResult> {
    check_cycle(m, c)?;
    if !m.holes().is_empty() {
        return Err(Error::Invalid("cycle cuts expect a map without holes".into()));
    }
    let mut w = Work::from_map(m);
    let (left, right, copies) = w.cut_cycle(c);
    let classification = classify(&w);
    let built = w.build(&[right])?;
    let at = |d: Dart| built.index[d].unwrap();
    Ok(CutResult {
        classification,
        pieces: built.maps,
        correspondence: (0..m.dart_count()).map(|d| built.index[d]).collect(),
        right_copies: copies.iter().map(|&(cb, _)| at(cb)).collect(),
        holes: [at(left), at(right)],
    })
}

/// Outcome of cutting along a 2-cycle and contracting both digons.
#[derive(Clone, Debug)]
pub struct TwoCycleCut {
    pub classification: Classification,
    pub pieces: Vec<CombinatorialMap>,
    /// The two marked edges, as darts, in the order (left side, right side).
    pub marks: [Loc; 2],
}

fn two_cycle_darts(m: &CombinatorialMap, e: Dart, f: Dart) -> Result<[Dart; 2]> {
    if m.edge_id(e) == m.edge_id(f) {
        return Err(Error::Invalid("edges are equal".into()));
    }
    let (u, w) = (m.vertex_of(e), m.target(e));
    let f2 = if m.vertex_of(f) == w && m.target(f) == u {
        f
    } else if m.target(f) == w && m.vertex_of(f) == u {
        m.alpha(f)
    } else {
        return Err(Error::Invalid("edges are not parallel".into()));
    };
    if u == w {
        return Err(Error::Invalid("loops do not form a 2-cycle".into()));
    }
    Ok([e, f2])
}

pub fn cut_two_cycle(m: &CombinatorialMap, e: Dart, f: Dart) -> Result<TwoCycleCut> {
    let c = two_cycle_darts(m, e, f)?;
    let mut w = Work::from_map(m);
    let (left, right, copies) = w.cut_cycle(&c);
    let classification = classify(&w);
    if let Some(i) = c.iter().position(|&d| d == w.root) {
        w.root = copies[i].0;
    }
    let mut marks = [0; 2];
    for (i, h) in [left, right].into_iter().enumerate() {
        let y = w.phi(h);
        marks[i] = w.alpha[y];
        w.zip(&[(h, y)]);
    }
    let built = w.build(&[marks[1]])?;
    Ok(TwoCycleCut {
        classification,
        pieces: built.maps,
        marks: [built.index[marks[0]].unwrap(), built.index[marks[1]].unwrap()],
    })
}

/// Replaces edge `p` by a digon hole; returns its darts `(x, y)`, `x` at the origin of `p`.
fn expand_edge(w: &mut Work, p: Dart) -> (Dart, Dart) {
    let q = w.alpha[p];
    let (x, y) = w.new_edge();
    w.sigma[x] = w.sigma[p];
    w.sigma[p] = x;
    w.sigma[y] = w.sigma[q];
    w.sigma[q] = y;
    w.alpha[p] = y;
    w.alpha[y] = p;
    w.alpha[q] = x;
    w.alpha[x] = q;
    w.holes.push(x);
    (x, y)
}

/// Map with a marked 2-cycle, given by the darts of its two edges.
#[derive(Clone, Debug)]
pub struct Glued {
    pub map: CombinatorialMap,
    pub cycle: [Dart; 2],
}

/// Opens edges `e` and `f` into digons and identifies the two digons so that
/// vertex colors match.
pub fn glue_digons(m: &CombinatorialMap, e: Dart, f: Dart) -> Result<Glued> {
    if m.edge_id(e) == m.edge_id(f) {
        return Err(Error::Invalid("edges are equal".into()));
    }
    let ends: HashSet<usize> = [e, m.alpha(e), f, m.alpha(f)]
        .iter()
        .map(|&d| m.vertex_of(d))
        .collect();
    if ends.len() != 4 {
        return Err(Error::Invalid("edges share a vertex".into()));
    }
    let colors = m.colors()?;
    let mut w = Work::from_map(m);
    let (x1, y1) = expand_edge(&mut w, e);
    let (x2, y2) = expand_edge(&mut w, f);
    let h = if colors[m.vertex_of(e)] == colors[m.vertex_of(m.alpha(f))] {
        x2
    } else {
        y2
    };
    let h_next = if h == x2 { y2 } else { x2 };
    let cycle = [w.alpha[x1], w.alpha[y1]];
    w.zip(&[(x1, h), (y1, h_next)]);
    let built = w.build(&[])?;
    debug_assert_eq!(built.maps.len(), 1);
    Ok(Glued {
        map: built.maps.into_iter().next().unwrap(),
        cycle: [built.index[cycle[0]].unwrap().1, built.index[cycle[1]].unwrap().1],
    })
}

/// Map with a hole of size `2ℓ` obtained by opening a path; `mark` is the
/// hole dart leaving the path's first vertex.
#[derive(Clone, Debug)]
pub struct OpenedPath {
    pub map: CombinatorialMap,
    pub mark: Dart,
}

pub fn open_path(m: &CombinatorialMap, p: &[Dart]) -> Result<OpenedPath> {
    check_path(m, p)?;
    let mut w = Work::from_map(m);
    w.cut_path(p, None);
    let built = w.build(&[])?;
    Ok(OpenedPath {
        map: built.maps.into_iter().next().unwrap(),
        mark: built.index[p[0]].unwrap().1,
    })
}

/// Zips the hole of an opened path back together.
pub fn close_path(o: &OpenedPath) -> Result<CombinatorialMap> {
    let mut w = Work::from_map(&o.map);
    let hole = w.orbit(o.mark, |d| w.phi(d));
    let l = hole.len() / 2;
    let pairs: Vec<(Dart, Dart)> = (0..l).map(|k| (hole[k], hole[2 * l - 1 - k])).collect();
    w.zip(&pairs);
    Ok(w.build(&[])?.maps.into_iter().next().unwrap())
}

/// Hole-free map with a marked dart.
#[derive(Clone, Debug)]
pub struct Tessellated {
    pub map: CombinatorialMap,
    pub mark: Dart,
}

/// Fills the hole through `h0` with quadrangles fanned from the origin of
/// `h0`; a digon is contracted into a single edge.
pub fn tessellate_boundary(m: &CombinatorialMap, h0: Dart) -> Result<Tessellated> {
    if !m.is_hole_dart(h0) {
        return Err(Error::Invalid(format!("dart {h0} is not on a hole")));
    }
    let face = m.face_darts(m.face_of(h0));
    let vs: HashSet<usize> = face.iter().map(|&d| m.vertex_of(d)).collect();
    if vs.len() != face.len() {
        return Err(Error::Map(crate::MapError::NonSimpleHole(h0)));
    }
    let mut w = Work::from_map(m);
    let mut mark = h0;
    if face.len() == 2 {
        let y = w.phi(h0);
        mark = w.alpha[y];
        w.zip(&[(h0, y)]);
    } else {
        let mut s = h0;
        for _ in 0..face.len() / 2 - 2 {
            s = w.add_chord(s, 3);
        }
        w.holes.retain(|h| !face.contains(h));
    }
    let built = w.build(&[])?;
    Ok(Tessellated {
        map: built.maps.into_iter().next().unwrap(),
        mark: built.index[mark].unwrap().1,
    })
}

/// Path starting with the root edge (possibly empty) ending on a simple cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleWithTail {
    pub tail: Vec<Dart>,
    pub cycle: Vec<Dart>,
}

impl CycleWithTail {
    pub fn size(&self) -> usize {
        self.tail.len() + self.cycle.len()
    }

    pub fn check(&self, m: &CombinatorialMap) -> Result<()> {
        check_cycle(m, &self.cycle)?;
        let on_cycle: HashSet<usize> = self.cycle.iter().map(|&d| m.vertex_of(d)).collect();
        if self.tail.is_empty() {
            let r = m.edge_id(m.root());
            if !self.cycle.iter().any(|&d| m.edge_id(d) == r) {
                return Err(Error::Invalid("cycle must contain the root edge".into()));
            }
            return Ok(());
        }
        check_path(m, &self.tail)?;
        if m.edge_id(self.tail[0]) != m.edge_id(m.root()) {
            return Err(Error::Invalid("tail must start with the root edge".into()));
        }
        let end = m.target(*self.tail.last().unwrap());
        if !on_cycle.contains(&end) {
            return Err(Error::Invalid("tail must end on the cycle".into()));
        }
        for &d in &self.tail {
            if on_cycle.contains(&m.vertex_of(d)) {
                return Err(Error::Invalid("tail meets the cycle before its end".into()));
            }
        }
        Ok(())
    }
}

/// Result of cutting along a cycle with tail.
#[derive(Clone, Debug)]
pub struct TailCut {
    pub classification: Classification,
    pub pieces: Vec<CombinatorialMap>,
    /// First dart of the opened tail, on the merged hole.
    pub tail_mark: Option<Loc>,
    /// Gluing edge: matching hole darts on the two copies of the cycle.
    pub gluing: [Loc; 2],
    /// Half-sizes `(p, p')` of the two boundaries, `p ≥ p'`.
    pub boundary: (usize, usize),
}

pub fn cut_cycle_with_tail(m: &CombinatorialMap, ct: &CycleWithTail) -> Result<TailCut> {
    ct.check(m)?;
    if !m.holes().is_empty() {
        return Err(Error::Invalid("cycle cuts expect a map without holes".into()));
    }
    let mut c = ct.cycle.clone();
    if let Some(&last) = ct.tail.last() {
        let end = m.target(last);
        let k = c.iter().position(|&d| m.vertex_of(d) == end).unwrap();
        c.rotate_left(k);
    }
    let l = c.len();
    let mut w = Work::from_map(m);
    let (left, right, copies) = w.cut_cycle(&c);
    let classification = classify(&w);
    let mut tail_mark = None;
    if !ct.tail.is_empty() {
        let n = w.alpha[*ct.tail.last().unwrap()];
        // Which copy of the end vertex holds the tail.
        let left_side: HashSet<Dart> = w.orbit(c[0], |d| w.sigma[d]).into_iter().collect();
        let (a, h) = if left_side.contains(&n) {
            (w.alpha[c[l - 1]], c[0])
        } else {
            (copies[0].0, copies[l - 1].1)
        };
        w.cut_path(&ct.tail, Some((a, h)));
        tail_mark = Some(ct.tail[0]);
    }
    let built = w.build(&[right])?;
    let at = |d: Dart| built.index[d].unwrap();
    let tl = ct.tail.len();
    let (p, q) = (tl + l / 2, l / 2);
    Ok(TailCut {
        classification,
        pieces: built.maps,
        tail_mark: tail_mark.map(at),
        gluing: [at(left), at(right)],
        boundary: (p.max(q), p.min(q)),
    })
}

/// Inverse of [`cut_cycle_with_tail`].
pub fn glue_tail_cut(t: &TailCut) -> Result<CombinatorialMap> {
    let mut w = Work::from_map(&t.pieces[0]);
    let mut offs = vec![0];
    for piece in &t.pieces[1..] {
        offs.push(w.append(piece));
    }
    let g = |loc: Loc| offs[loc.0] + loc.1;
    if let Some(mark) = t.tail_mark {
        let hole = w.orbit(g(mark), |d| w.phi(d));
        let other = t.gluing.iter().map(|&x| g(x)).find(|x| !hole.contains(x)).unwrap();
        let tl = (hole.len() - w.orbit(other, |d| w.phi(d)).len()) / 2;
        let pairs: Vec<(Dart, Dart)> = (0..tl).map(|k| (hole[k], hole[hole.len() - 1 - k])).collect();
        w.zip(&pairs);
    }
    let a = w.orbit(g(t.gluing[0]), |d| w.phi(d));
    let b = w.orbit(g(t.gluing[1]), |d| w.phi_inv(d));
    let pairs: Vec<(Dart, Dart)> = a.into_iter().zip(b).collect();
    w.zip(&pairs);
    let built = w.build(&[])?;
    Ok(built.maps.into_iter().next().unwrap())
}

/// Debug record of one surgery.
#[derive(Clone, Debug, Serialize)]
pub struct Transcript {
    pub operation: String,
    pub input: String,
    pub outputs: Vec<String>,
    pub correspondence: Vec<Option<Loc>>,
}

impl Transcript {
    pub fn of_cut(input: &CombinatorialMap, r: &CutResult) -> Self {
        Transcript {
            operation: "cut_simple_cycle".into(),
            input: input.canonical_code().to_string(),
            outputs: r.pieces.iter().map(|p| p.canonical_code().to_string()).collect(),
            correspondence: r.correspondence.clone(),
        }
    }

    pub fn to_ndjson_line(&self) -> String {
        serde_json::to_string(self).expect("transcript serializes")
    }
}

/// Unordered vertex-disjoint edge pairs, as `(edge dart, edge dart)` with canonical edge ids.
pub fn vertex_disjoint_pairs(m: &CombinatorialMap) -> Vec<(Dart, Dart)> {
    let edges = m.edges();
    let mut out = Vec::new();
    for i in 0..edges.len() {
        let (a, b) = (m.vertex_of(edges[i]), m.target(edges[i]));
        for &f in &edges[i + 1..] {
            let (c, d) = (m.vertex_of(f), m.target(f));
            if a != c && a != d && b != c && b != d {
                out.push((edges[i], f));
            }
        }
    }
    out
}

/// Pairs of distinct parallel edges, grouped by endpoint pair.
pub fn parallel_pairs(m: &CombinatorialMap) -> Vec<(Dart, Dart)> {
    let mut by_ends: HashMap<(usize, usize), Vec<Dart>> = HashMap::new();
    for e in m.edges() {
        let (a, b) = (m.vertex_of(e), m.target(e));
        if a != b {
            by_ends.entry((a.min(b), a.max(b))).or_default().push(e);
        }
    }
    let mut keys: Vec<_> = by_ends.keys().copied().collect();
    keys.sort_unstable();
    let mut out = Vec::new();
    for k in keys {
        let es = &by_ends[&k];
        for i in 0..es.len() {
            for &f in &es[i + 1..] {
                out.push((es[i], f));
            }
        }
    }
    out
}

/// Edges of `m` as a canonical, relabeling-invariant set of ids.
pub fn canonical_edge(m: &CombinatorialMap, d: Dart) -> usize {
    let lab = m.canonical_labeling();
    lab[d].min(lab[m.alpha(d)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::fixtures::*;

    #[test]
    fn f2_two_cycle_is_nonseparating() {
        let m = f2();
        let r = cut_simple_cycle(&m, &[0, 6]).unwrap();
        assert_eq!(r.classification, Classification::Nonseparating);
        assert_eq!(r.pieces.len(), 1);
        let p = &r.pieces[0];
        assert_eq!(p.genus(), 0);
        assert_eq!(p.holes().len(), 2);
        for &h in p.holes() {
            assert_eq!(p.face_degree(p.face_of(h)), 2);
        }
        assert_eq!(r.euler_total(), m.euler_characteristic() + 2);
    }

    #[test]
    fn f2_cut_two_cycle() {
        let r = cut_two_cycle(&f2(), 0, 2).unwrap();
        assert_eq!(r.classification, Classification::Nonseparating);
        let p = &r.pieces[0];
        assert_eq!((p.genus(), p.inner_face_count(), p.edge_count()), (0, 2, 4));
        let (e, f) = (r.marks[0].1, r.marks[1].1);
        let vs: HashSet<usize> = [e, p.alpha(e), f, p.alpha(f)].iter().map(|&d| p.vertex_of(d)).collect();
        assert_eq!(vs.len(), 4);
        let g = glue_digons(p, e, f).unwrap();
        assert_eq!(g.map.canonical_code(), f2().canonical_code());
    }

    #[test]
    fn f1_open_close() {
        let m = f1();
        for p in [vec![0], vec![1], vec![0, 2], vec![3, 1]] {
            let o = open_path(&m, &p).unwrap();
            assert_eq!(o.map.holes().len(), 1);
            assert_eq!(o.map.face_degree(o.map.face_of(o.mark)), 2 * p.len());
            let back = close_path(&o).unwrap();
            assert_eq!(back.canonical_code(), m.canonical_code());
        }
    }

    #[test]
    fn f2_cycle_with_root_edge() {
        let m = f2();
        let ct = CycleWithTail { tail: vec![], cycle: vec![0, 5] };
        let r = cut_cycle_with_tail(&m, &ct).unwrap();
        assert_eq!(r.pieces.len(), 1);
        assert_eq!(r.pieces[0].genus(), 0);
        assert_eq!(r.boundary, (1, 1));
        let back = glue_tail_cut(&r).unwrap();
        assert_eq!(back.canonical_code(), m.canonical_code());
    }

    #[test]
    fn tessellate_digon_and_octagon() {
        let m = f1();
        let o = open_path(&m, &[0]).unwrap();
        let t = tessellate_boundary(&o.map, o.mark).unwrap();
        assert_eq!(t.map.canonical_code(), m.canonical_code());
        let big = crate::oracle::quadrangulations(3).unwrap();
        let q = &big.genus(0)[0];
        let path = long_path(q, 4);
        if let Some(path) = path {
            let o = open_path(q, &path).unwrap();
            let t = tessellate_boundary(&o.map, o.mark).unwrap();
            assert_eq!(t.map.inner_face_count(), q.inner_face_count() + 3);
            assert_eq!(t.map.genus(), q.genus());
        }
    }

    fn long_path(m: &CombinatorialMap, l: usize) -> Option<Vec<Dart>> {
        fn go(m: &CombinatorialMap, path: &mut Vec<Dart>, seen: &mut Vec<usize>, l: usize) -> bool {
            if path.len() == l {
                return true;
            }
            let v = *seen.last().unwrap();
            for d in m.vertex_darts(v) {
                let w = m.target(d);
                if !seen.contains(&w) {
                    path.push(d);
                    seen.push(w);
                    if go(m, path, seen, l) {
                        return true;
                    }
                    path.pop();
                    seen.pop();
                }
            }
            false
        }
        for v in 0..m.vertex_count() {
            let mut path = vec![];
            let mut seen = vec![v];
            if go(m, &mut path, &mut seen, l) {
                return Some(path);
            }
        }
        None
    }

    #[test]
    fn rejects_bad_input() {
        let m = f2();
        assert!(cut_two_cycle(&m, 0, 4).is_err());
        assert!(glue_digons(&f1(), 0, 2).is_err());
        assert!(check_cycle(&m, &[0, 1]).is_err());
    }
}
