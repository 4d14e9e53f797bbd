//! Rooted orientable maps as rotation systems.
//!
//! Darts are dense ids `0..D`. `sigma` turns counterclockwise around a
//! vertex, `alpha` flips a dart to the other end of its edge and faces are
//! the cycles of `phi = sigma ∘ alpha`, i.e. `phi(d) = sigma(alpha(d))`.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::MapError;

pub type Dart = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    General,
    Quadrangulation,
    Unicellular,
    WithHoles,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::General => "general",
            Profile::Quadrangulation => "quadrangulation",
            Profile::Unicellular => "unicellular",
            Profile::WithHoles => "with-holes",
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "general" => Ok(Profile::General),
            "quadrangulation" => Ok(Profile::Quadrangulation),
            "unicellular" => Ok(Profile::Unicellular),
            "with-holes" => Ok(Profile::WithHoles),
            _ => Err(format!("unknown profile {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

/// Root-first traversal code; equal codes mean root-preserving isomorphic maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(pub Vec<u32>);

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// A validated rooted map. Immutable; derived cell structure is cached.
#[derive(Clone, Debug)]
pub struct CombinatorialMap {
    sigma: Vec<Dart>,
    sigma_inv: Vec<Dart>,
    alpha: Vec<Dart>,
    root: Dart,
    holes: Vec<Dart>,
    profile: Profile,
    vertex_of: Vec<usize>,
    face_of: Vec<usize>,
    vertex_rep: Vec<Dart>,
    face_rep: Vec<Dart>,
    hole_face: Vec<bool>,
}

fn check_perm(which: &'static str, p: &[Dart]) -> Result<(), MapError> {
    let mut seen = vec![false; p.len()];
    for (d, &x) in p.iter().enumerate() {
        if x >= p.len() || seen[x] {
            return Err(MapError::NotPermutation { which, dart: d });
        }
        seen[x] = true;
    }
    Ok(())
}

/// Numbers the cycles of `p`, in order of their smallest element.
fn cycle_index(p: &[Dart]) -> (Vec<usize>, Vec<Dart>) {
    let mut idx = vec![usize::MAX; p.len()];
    let mut reps = Vec::new();
    for d in 0..p.len() {
        if idx[d] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(d);
        let mut x = d;
        while idx[x] == usize::MAX {
            idx[x] = c;
            x = p[x];
        }
    }
    (idx, reps)
}

impl CombinatorialMap {
    /// Builds and validates a map. Hole entries may be any dart of the hole face.
    pub fn new(
        sigma: Vec<Dart>,
        alpha: Vec<Dart>,
        root: Dart,
        holes: Vec<Dart>,
        profile: Profile,
    ) -> Result<Self, MapError> {
        let n = sigma.len();
        if n % 2 == 1 {
            return Err(MapError::OddDartCount(n));
        }
        if alpha.len() != n {
            return Err(MapError::Length {
                which: "alpha",
                len: alpha.len(),
                expected: n,
            });
        }
        check_perm("sigma", &sigma)?;
        for (d, &a) in alpha.iter().enumerate() {
            if a >= n {
                return Err(MapError::NotPermutation {
                    which: "alpha",
                    dart: d,
                });
            }
            if a == d {
                return Err(MapError::AlphaFixedPoint(d));
            }
            if alpha[a] != d {
                return Err(MapError::AlphaNotInvolution(d));
            }
        }
        if n == 0 {
            if root != 0 {
                return Err(MapError::RootOutOfRange(root));
            }
            if !holes.is_empty() {
                return Err(MapError::BadHole(holes[0]));
            }
        } else if root >= n {
            return Err(MapError::RootOutOfRange(root));
        }
        let mut sigma_inv = vec![0; n];
        for (d, &s) in sigma.iter().enumerate() {
            sigma_inv[s] = d;
        }
        let phi: Vec<Dart> = (0..n).map(|d| sigma[alpha[d]]).collect();
        let (vertex_of, vertex_rep) = cycle_index(&sigma);
        let (face_of, face_rep) = cycle_index(&phi);

        let mut m = CombinatorialMap {
            sigma,
            sigma_inv,
            alpha,
            root,
            holes: Vec::new(),
            profile,
            vertex_of,
            face_of,
            vertex_rep,
            face_rep,
            hole_face: Vec::new(),
        };
        m.check_connected()?;

        let mut hole_face = vec![false; m.face_rep.len().max(1)];
        for &h in &holes {
            if h >= n || hole_face[m.face_of[h]] {
                return Err(MapError::BadHole(h));
            }
            hole_face[m.face_of[h]] = true;
        }
        let mut reps: Vec<Dart> = holes.iter().map(|&h| m.face_rep[m.face_of[h]]).collect();
        reps.sort_unstable();
        m.holes = reps;
        m.hole_face = hole_face;
        m.check_profile(profile)?;
        Ok(m)
    }

    fn check_connected(&self) -> Result<(), MapError> {
        let n = self.dart_count();
        if n == 0 {
            return Ok(());
        }
        let mut seen = vec![false; n];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(d) = stack.pop() {
            for e in [self.sigma[d], self.alpha[d]] {
                if !seen[e] {
                    seen[e] = true;
                    stack.push(e);
                }
            }
        }
        match seen.iter().position(|&s| !s) {
            Some(d) => Err(MapError::Disconnected(d)),
            None => Ok(()),
        }
    }

    fn check_profile(&self, profile: Profile) -> Result<(), MapError> {
        match profile {
            Profile::General => Ok(()),
            Profile::Unicellular => {
                if !self.holes.is_empty() {
                    return Err(MapError::UnexpectedHoles(profile.name()));
                }
                if self.face_count() != 1 {
                    return Err(MapError::NotUnicellular(self.face_count()));
                }
                Ok(())
            }
            Profile::Quadrangulation | Profile::WithHoles => {
                if profile == Profile::Quadrangulation && !self.holes.is_empty() {
                    return Err(MapError::UnexpectedHoles(profile.name()));
                }
                for f in 0..self.face_rep.len() {
                    if self.hole_face[f] {
                        self.check_simple_face(f)?;
                        continue;
                    }
                    let deg = self.face_degree(f);
                    if deg != 4 {
                        return Err(MapError::FaceDegree {
                            dart: self.face_rep[f],
                            degree: deg,
                        });
                    }
                }
                self.colors().map(|_| ())
            }
        }
    }

    fn check_simple_face(&self, f: usize) -> Result<(), MapError> {
        let mut seen = std::collections::HashSet::new();
        for d in self.face_darts(f) {
            if !seen.insert(self.vertex_of[d]) {
                return Err(MapError::NonSimpleHole(self.face_rep[f]));
            }
        }
        Ok(())
    }

    /// The single-vertex map with no edges.
    pub fn vertex_map() -> Self {
        Self::new(Vec::new(), Vec::new(), 0, Vec::new(), Profile::General).expect("vertex map")
    }

    pub fn revalidate(&self, profile: Profile) -> Result<Self, MapError> {
        let mut m = self.clone();
        m.check_profile(profile)?;
        m.profile = profile;
        Ok(m)
    }

    pub fn dart_count(&self) -> usize {
        self.sigma.len()
    }
    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma[d]
    }
    pub fn sigma_inv(&self, d: Dart) -> Dart {
        self.sigma_inv[d]
    }
    pub fn alpha(&self, d: Dart) -> Dart {
        self.alpha[d]
    }
    pub fn phi(&self, d: Dart) -> Dart {
        self.sigma[self.alpha[d]]
    }
    pub fn phi_inv(&self, d: Dart) -> Dart {
        self.alpha[self.sigma_inv[d]]
    }
    pub fn sigma_slice(&self) -> &[Dart] {
        &self.sigma
    }
    pub fn alpha_slice(&self) -> &[Dart] {
        &self.alpha
    }
    pub fn root(&self) -> Dart {
        self.root
    }
    /// Hole faces, each given by its smallest dart, sorted.
    pub fn holes(&self) -> &[Dart] {
        &self.holes
    }
    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_rep.len().max(1)
    }
    pub fn edge_count(&self) -> usize {
        self.dart_count() / 2
    }
    pub fn face_count(&self) -> usize {
        self.face_rep.len().max(1)
    }
    /// Faces that are not holes.
    pub fn inner_face_count(&self) -> usize {
        self.face_count() - self.holes.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn genus(&self) -> usize {
        let chi = self.euler_characteristic();
        debug_assert!(chi <= 2 && (2 - chi) % 2 == 0);
        ((2 - chi) / 2) as usize
    }

    /// Vertex id of a dart's origin; ids follow the smallest dart of each vertex.
    pub fn vertex_of(&self, d: Dart) -> usize {
        self.vertex_of[d]
    }
    pub fn face_of(&self, d: Dart) -> usize {
        self.face_of[d]
    }
    pub fn vertex_rep(&self, v: usize) -> Dart {
        self.vertex_rep[v]
    }
    pub fn face_rep(&self, f: usize) -> Dart {
        self.face_rep[f]
    }
    pub fn is_hole_face(&self, f: usize) -> bool {
        self.hole_face.get(f).copied().unwrap_or(false)
    }
    pub fn is_hole_dart(&self, d: Dart) -> bool {
        self.hole_face[self.face_of[d]]
    }
    pub fn root_vertex(&self) -> usize {
        if self.dart_count() == 0 {
            0
        } else {
            self.vertex_of[self.root]
        }
    }

    /// Darts around vertex `v`, counterclockwise from its smallest dart.
    pub fn vertex_darts(&self, v: usize) -> Vec<Dart> {
        if self.dart_count() == 0 {
            return Vec::new();
        }
        self.orbit(self.vertex_rep[v], |d| self.sigma[d])
    }

    pub fn face_darts(&self, f: usize) -> Vec<Dart> {
        if self.dart_count() == 0 {
            return Vec::new();
        }
        self.orbit(self.face_rep[f], |d| self.phi(d))
    }

    pub fn face_degree(&self, f: usize) -> usize {
        self.face_darts(f).len()
    }

    pub fn vertex_degree(&self, v: usize) -> usize {
        self.vertex_darts(v).len()
    }

    fn orbit(&self, start: Dart, step: impl Fn(Dart) -> Dart) -> Vec<Dart> {
        let mut out = vec![start];
        let mut x = step(start);
        while x != start {
            out.push(x);
            x = step(x);
        }
        out
    }

    /// Other endpoint of the edge carried by `d`.
    pub fn target(&self, d: Dart) -> usize {
        self.vertex_of[self.alpha[d]]
    }

    /// Canonical edge id: the smaller of its two darts.
    pub fn edge_id(&self, d: Dart) -> Dart {
        d.min(self.alpha[d])
    }

    pub fn edges(&self) -> Vec<Dart> {
        (0..self.dart_count()).filter(|&d| d < self.alpha[d]).collect()
    }

    /// Same map rooted at another dart.
    pub fn with_root(&self, root: Dart) -> Self {
        assert!(root < self.dart_count().max(1));
        let mut m = self.clone();
        m.root = root;
        m
    }

    pub fn without_holes(&self, profile: Profile) -> Result<Self, MapError> {
        Self::new(
            self.sigma.clone(),
            self.alpha.clone(),
            self.root,
            Vec::new(),
            profile,
        )
    }

    /// Renames dart `d` to `perm[d]`.
    pub fn relabel(&self, perm: &[Dart]) -> Self {
        let n = self.dart_count();
        let mut sigma = vec![0; n];
        let mut alpha = vec![0; n];
        for d in 0..n {
            sigma[perm[d]] = perm[self.sigma[d]];
            alpha[perm[d]] = perm[self.alpha[d]];
        }
        let holes = self.holes.iter().map(|&h| perm[h]).collect();
        let root = if n == 0 { 0 } else { perm[self.root] };
        Self::new(sigma, alpha, root, holes, self.profile).expect("relabeling preserves validity")
    }

    /// BFS 2-coloring of vertices with the root vertex white.
    pub fn colors(&self) -> Result<Vec<Color>, MapError> {
        let nv = self.vertex_count();
        let mut color: Vec<Option<Color>> = vec![None; nv];
        if self.dart_count() == 0 {
            return Ok(vec![Color::White]);
        }
        let r = self.root_vertex();
        color[r] = Some(Color::White);
        let mut queue = VecDeque::from([r]);
        while let Some(v) = queue.pop_front() {
            let c = color[v].unwrap();
            for d in self.vertex_darts(v) {
                let w = self.target(d);
                match color[w] {
                    None => {
                        color[w] = Some(c.flip());
                        queue.push_back(w);
                    }
                    Some(cw) if cw == c => return Err(MapError::NotBipartite(d)),
                    _ => {}
                }
            }
        }
        Ok(color.into_iter().map(|c| c.unwrap()).collect())
    }

    /// Graph distances from vertex `src`.
    pub fn distances_from(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for d in self.vertex_darts(v) {
                let w = self.target(d);
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Dart renaming produced by the root-first traversal (old id -> new id).
    pub fn canonical_labeling(&self) -> Vec<Dart> {
        let n = self.dart_count();
        let mut label = vec![usize::MAX; n];
        if n == 0 {
            return label;
        }
        let mut order = Vec::with_capacity(n);
        label[self.root] = 0;
        order.push(self.root);
        let mut head = 0;
        while head < order.len() {
            let d = order[head];
            head += 1;
            for e in [self.sigma[d], self.alpha[d]] {
                if label[e] == usize::MAX {
                    label[e] = order.len();
                    order.push(e);
                }
            }
        }
        label
    }

    pub fn canonical_code(&self) -> CanonicalCode {
        let label = self.canonical_labeling();
        let n = self.dart_count();
        let mut inv = vec![0; n];
        for d in 0..n {
            inv[label[d]] = d;
        }
        let mut code = Vec::with_capacity(2 * n + 2 + self.holes.len());
        code.push(n as u32);
        for &d in &inv {
            code.push(label[self.sigma[d]] as u32);
            code.push(label[self.alpha[d]] as u32);
        }
        let mut hole_labels: Vec<u32> = self
            .holes
            .iter()
            .map(|&h| {
                self.face_darts(self.face_of[h])
                    .into_iter()
                    .map(|d| label[d] as u32)
                    .min()
                    .unwrap()
            })
            .collect();
        hole_labels.sort_unstable();
        code.push(hole_labels.len() as u32);
        code.extend(hole_labels);
        CanonicalCode(code)
    }

    /// Same map with darts renamed into canonical order.
    pub fn canonical_form(&self) -> Self {
        if self.dart_count() == 0 {
            return self.clone();
        }
        self.relabel(&self.canonical_labeling())
    }
}

impl PartialEq for CombinatorialMap {
    fn eq(&self, other: &Self) -> bool {
        self.sigma == other.sigma
            && self.alpha == other.alpha
            && self.root == other.root
            && self.holes == other.holes
    }
}
impl Eq for CombinatorialMap {}

/// Builds a permutation array from disjoint cycles; unmentioned points are fixed.
pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for c in cycles {
        for i in 0..c.len() {
            p[c[i]] = c[(i + 1) % c.len()];
        }
    }
    p
}

pub mod fixtures {
    //! Small reference maps.
    use super::*;

    /// Planar map with one quadrangle: a path of two edges.
    pub fn f1() -> CombinatorialMap {
        CombinatorialMap::new(
            vec![0, 2, 1, 3],
            vec![1, 0, 3, 2],
            0,
            vec![],
            Profile::Quadrangulation,
        )
        .unwrap()
    }

    /// Torus with two vertices, four edges and two quadrangles.
    pub fn f2() -> CombinatorialMap {
        CombinatorialMap::new(
            from_cycles(8, &[&[0, 1, 2, 3], &[4, 5, 6, 7]]),
            from_cycles(8, &[&[0, 4], &[1, 5], &[2, 6], &[3, 7]]),
            0,
            vec![],
            Profile::Quadrangulation,
        )
        .unwrap()
    }

    /// One-vertex torus with two loops.
    pub fn f3() -> CombinatorialMap {
        CombinatorialMap::new(
            from_cycles(4, &[&[0, 1, 2, 3]]),
            from_cycles(4, &[&[0, 2], &[1, 3]]),
            0,
            vec![],
            Profile::Unicellular,
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn fixture_cells() {
        let m = f1();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count()), (3, 2, 1));
        assert_eq!(m.face_darts(0), vec![0, 2, 3, 1]);
        assert_eq!(m.genus(), 0);

        let m = f2();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count()), (2, 4, 2));
        assert_eq!(m.face_darts(0), vec![0, 5, 2, 7]);
        assert_eq!(m.face_darts(1), vec![1, 6, 3, 4]);
        assert_eq!(m.genus(), 1);

        let m = f3();
        assert_eq!(m.face_darts(0), vec![0, 3, 2, 1]);
        assert_eq!(m.genus(), 1);
    }

    #[test]
    fn f3_is_not_a_quadrangulation() {
        let m = f3();
        let err = CombinatorialMap::new(
            m.sigma_slice().to_vec(),
            m.alpha_slice().to_vec(),
            0,
            vec![],
            Profile::Quadrangulation,
        )
        .unwrap_err();
        assert!(matches!(err, MapError::NotBipartite(_)));
        assert!(f3().colors().is_err());
    }

    #[test]
    fn alpha_fixed_point_rejected() {
        let mut alpha = f2().alpha_slice().to_vec();
        alpha[0] = 0;
        let err = CombinatorialMap::new(
            f2().sigma_slice().to_vec(),
            alpha,
            0,
            vec![],
            Profile::General,
        )
        .unwrap_err();
        assert_eq!(err, MapError::AlphaFixedPoint(0));
        assert_eq!(err.to_string(), "alpha fixed point at dart 0");
    }

    #[test]
    fn disconnected_rejected() {
        let err =
            CombinatorialMap::new(vec![0, 1, 2, 3], vec![1, 0, 3, 2], 0, vec![], Profile::General)
                .unwrap_err();
        assert_eq!(err, MapError::Disconnected(2));
    }

    #[test]
    fn colors_of_fixtures() {
        use Color::*;
        assert_eq!(f1().colors().unwrap(), vec![White, Black, White]);
        assert_eq!(f2().colors().unwrap(), vec![White, Black]);
    }

    #[test]
    fn rootings_of_f1() {
        let m = f1();
        assert_ne!(m.canonical_code(), m.with_root(2).canonical_code());
        assert_eq!(m.canonical_code(), m.with_root(3).canonical_code());
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let m = f2().relabel(&[5, 3, 7, 0, 2, 6, 1, 4]);
        let c = m.canonical_form();
        assert_eq!(c.canonical_form(), c);
        assert_eq!(c.canonical_code(), f2().canonical_code());
        assert_eq!(c.root(), 0);
    }

    #[test]
    fn vertex_map() {
        let m = CombinatorialMap::vertex_map();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count()), (1, 0, 1));
        assert_eq!(m.genus(), 0);
    }
}
