//! Brute-force ground truth: every rooted bipartite quadrangulation and every
//! rooted unicellular map at tiny sizes, found by trying all dart pairings.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::map::{CanonicalCode, CombinatorialMap, Profile};

pub const QUAD_LIMIT: usize = 5;
pub const UNICELLULAR_LIMIT: usize = 7;

/// Maps of one size, bucketed by genus, each in canonical form.
#[derive(Clone, Debug)]
pub struct OracleList {
    pub n: usize,
    pub by_genus: BTreeMap<usize, Vec<CombinatorialMap>>,
}

impl OracleList {
    pub fn genus(&self, g: usize) -> &[CombinatorialMap] {
        self.by_genus.get(&g).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, g: usize) -> usize {
        self.genus(g).len()
    }

    pub fn all(&self) -> impl Iterator<Item = &CombinatorialMap> {
        self.by_genus.values().flatten()
    }

    pub fn codes(&self, g: usize) -> Vec<CanonicalCode> {
        self.genus(g).iter().map(|m| m.canonical_code()).collect()
    }

    fn from_maps(n: usize, maps: impl IntoIterator<Item = CombinatorialMap>) -> Self {
        let mut seen = HashSet::new();
        let mut by_genus: BTreeMap<usize, Vec<(CanonicalCode, CombinatorialMap)>> = BTreeMap::new();
        for m in maps {
            let code = m.canonical_code();
            if seen.insert(code.clone()) {
                by_genus
                    .entry(m.genus())
                    .or_default()
                    .push((code, m.canonical_form()));
            }
        }
        let by_genus = by_genus
            .into_iter()
            .map(|(g, mut v)| {
                v.sort_by(|a, b| a.0.cmp(&b.0));
                (g, v.into_iter().map(|x| x.1).collect())
            })
            .collect();
        OracleList { n, by_genus }
    }
}

fn connected(alpha: &[usize], n_faces: usize, face_len: usize) -> bool {
    let mut parent: Vec<usize> = (0..n_faces).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = n_faces;
    for (d, &a) in alpha.iter().enumerate() {
        let (x, y) = (find(&mut parent, d / face_len), find(&mut parent, a / face_len));
        if x != y {
            parent[x] = y;
            comps -= 1;
        }
    }
    comps == 1
}

/// All rooted bipartite quadrangulations with `n` faces.
pub fn enumerate_quadrangulations(n: usize) -> Result<OracleList> {
    if n > QUAD_LIMIT {
        return Err(Error::SizeLimit(format!(
            "quadrangulation oracle supports n <= {QUAD_LIMIT}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(OracleList::from_maps(0, [CombinatorialMap::vertex_map()]));
    }
    let dc = 4 * n;
    let phi: Vec<usize> = (0..dc).map(|d| 4 * (d / 4) + (d + 1) % 4).collect();
    // Colorings: dart 4j+i is white iff i + c_j is even, with c_0 = 0 so the root is white.
    let colorings: Vec<u32> = (0..1u32 << (n - 1)).collect();
    let found: Vec<Vec<CombinatorialMap>> = colorings
        .par_iter()
        .map(|&mask| {
            let white_of = |d: usize| {
                let c = if d / 4 == 0 { 0 } else { (mask >> (d / 4 - 1)) & 1 } as usize;
                (d % 4 + c).is_multiple_of(2)
            };
            let whites: Vec<usize> = (0..dc).filter(|&d| white_of(d)).collect();
            let blacks: Vec<usize> = (0..dc).filter(|&d| !white_of(d)).collect();
            let mut out: HashMap<CanonicalCode, CombinatorialMap> = HashMap::new();
            let mut alpha = vec![usize::MAX; dc];
            let mut used = vec![false; blacks.len()];
            match_all(&whites, &blacks, 0, &mut alpha, &mut used, &mut |alpha| {
                if !connected(alpha, n, 4) {
                    return;
                }
                let sigma: Vec<usize> = (0..dc).map(|d| phi[alpha[d]]).collect();
                let m = CombinatorialMap::new(
                    sigma,
                    alpha.to_vec(),
                    0,
                    vec![],
                    Profile::Quadrangulation,
                )
                .expect("oracle map validates");
                out.entry(m.canonical_code()).or_insert(m);
            });
            out.into_values().collect()
        })
        .collect();
    Ok(OracleList::from_maps(n, found.into_iter().flatten()))
}

fn match_all(
    whites: &[usize],
    blacks: &[usize],
    i: usize,
    alpha: &mut Vec<usize>,
    used: &mut Vec<bool>,
    emit: &mut impl FnMut(&[usize]),
) {
    if i == whites.len() {
        emit(alpha);
        return;
    }
    let w = whites[i];
    for j in 0..blacks.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        alpha[w] = blacks[j];
        alpha[blacks[j]] = w;
        match_all(whites, blacks, i + 1, alpha, used, emit);
        used[j] = false;
    }
}

/// All rooted unicellular maps with `n` edges.
pub fn enumerate_unicellular(n: usize) -> Result<OracleList> {
    if n > UNICELLULAR_LIMIT {
        return Err(Error::SizeLimit(format!(
            "unicellular oracle supports n <= {UNICELLULAR_LIMIT}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(OracleList::from_maps(0, [CombinatorialMap::vertex_map()]));
    }
    let dc = 2 * n;
    let mut maps = Vec::new();
    let mut alpha = vec![usize::MAX; dc];
    pairings(&mut alpha, &mut |alpha| {
        let sigma: Vec<usize> = (0..dc).map(|d| (alpha[d] + 1) % dc).collect();
        maps.push(
            CombinatorialMap::new(sigma, alpha.to_vec(), 0, vec![], Profile::Unicellular)
                .expect("oracle map validates"),
        );
    });
    let total = maps.len();
    let list = OracleList::from_maps(n, maps);
    assert_eq!(list.all().count(), total, "distinct pairings give distinct rooted maps");
    Ok(list)
}

fn pairings(alpha: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    let Some(i) = alpha.iter().position(|&a| a == usize::MAX) else {
        emit(alpha);
        return;
    };
    for j in i + 1..alpha.len() {
        if alpha[j] != usize::MAX {
            continue;
        }
        alpha[i] = j;
        alpha[j] = i;
        pairings(alpha, emit);
        alpha[i] = usize::MAX;
        alpha[j] = usize::MAX;
    }
}

type Cache = Mutex<HashMap<(bool, usize), Arc<OracleList>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn cached(unicellular: bool, n: usize) -> Result<Arc<OracleList>> {
    if let Some(l) = cache().lock().unwrap().get(&(unicellular, n)) {
        return Ok(l.clone());
    }
    let list = Arc::new(if unicellular {
        enumerate_unicellular(n)?
    } else {
        enumerate_quadrangulations(n)?
    });
    cache()
        .lock()
        .unwrap()
        .insert((unicellular, n), list.clone());
    Ok(list)
}

/// Memoized [`enumerate_quadrangulations`].
pub fn quadrangulations(n: usize) -> Result<Arc<OracleList>> {
    cached(false, n)
}

/// Memoized [`enumerate_unicellular`].
pub fn unicellular(n: usize) -> Result<Arc<OracleList>> {
    cached(true, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_quadrangulations() {
        let l = quadrangulations(0).unwrap();
        assert_eq!(l.count(0), 1);
        let l = quadrangulations(1).unwrap();
        assert_eq!(l.count(0), 2);
        let l = quadrangulations(2).unwrap();
        assert_eq!((l.count(0), l.count(1)), (9, 1));
        let f2 = crate::map::fixtures::f2();
        assert_eq!(l.genus(1)[0].canonical_code(), f2.canonical_code());
    }

    #[test]
    fn small_unicellular() {
        let l = unicellular(1).unwrap();
        assert_eq!(l.count(0), 1);
        let l = unicellular(2).unwrap();
        assert_eq!((l.count(0), l.count(1)), (2, 1));
        let f3 = crate::map::fixtures::f3();
        assert_eq!(l.genus(1)[0].canonical_code(), f3.canonical_code());
    }

    #[test]
    fn size_limit() {
        assert!(enumerate_quadrangulations(QUAD_LIMIT + 1).is_err());
        assert!(enumerate_unicellular(UNICELLULAR_LIMIT + 1).is_err());
    }
}
