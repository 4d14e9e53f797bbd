//! Exact count tables.
//!
//! `Q(n,g)` is filled row by row from a quadratic recurrence in `n` and `g`.
//! For each `n` the `g`-convolutions of all row pairs are done at once by
//! packing every row into a single big integer (Kronecker substitution).

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Printed,
    #[default]
    Corrected,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Printed => "printed",
            Variant::Corrected => "corrected",
        }
    }

    /// Coefficient of `Q(n−2, g−1)`.
    fn middle(self, n: u64) -> u64 {
        let a = match self {
            Variant::Printed => 2 * n - 2,
            Variant::Corrected => 2 * n - 3,
        };
        a * (n - 1) * (2 * n - 1)
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "printed" => Ok(Variant::Printed),
            "corrected" => Ok(Variant::Corrected),
            _ => Err(format!("unknown variant {s:?}")),
        }
    }
}

/// Dense table `(n, g) → count` for `n ≤ max_n`, `g ≤ max_g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub variant: Variant,
    pub max_n: usize,
    pub max_g: usize,
    rows: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn get(&self, n: usize, g: usize) -> BigUint {
        self.rows
            .get(n)
            .and_then(|r| r.get(g))
            .cloned()
            .unwrap_or_default()
    }

    pub fn row(&self, n: usize) -> &[BigUint] {
        &self.rows[n]
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        serde_json::json!({
            "variant": self.variant.name(),
            "max_n": self.max_n,
            "max_g": self.max_g,
            "counts": rows,
        })
    }
}

fn gmax_for(n: usize) -> usize {
    n / 2
}

fn pack(row: &[BigUint], width: usize) -> BigUint {
    let mut acc = BigUint::zero();
    for x in row.iter().rev() {
        acc <<= width;
        acc += x;
    }
    acc
}

fn unpack(mut x: BigUint, width: usize, len: usize) -> Vec<BigUint> {
    let mask = (BigUint::one() << width) - 1u32;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(&x & &mask);
        x >>= width;
    }
    out
}

/// Fills `Q(n,g)` for `n ≤ n_max`, `g ≤ g_max`.
pub fn cc_table(n_max: usize, g_max: usize, variant: Variant) -> Result<CountTable> {
    // full[n][g] for g ≤ n/2; entries above n/2 vanish.
    let mut full: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
    // weighted[n][g] = (2n+1) Q(n,g)
    let mut weighted: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let gm = gmax_for(n);
        let row = if n == 0 {
            vec![BigUint::one()]
        } else {
            let conv = if n >= 2 {
                convolve_rows(&weighted[..=n - 2], gm)
            } else {
                vec![BigUint::zero(); gm + 1]
            };
            let mut row = Vec::with_capacity(gm + 1);
            let nn = n as u64;
            for (g, c) in conv.iter().enumerate().take(gm + 1) {
                let mut s: BigUint = c * 3u32;
                if let Some(prev) = full[n - 1].get(g) {
                    s += prev * (4 * (2 * nn - 1));
                }
                if n >= 2 && g >= 1 {
                    if let Some(prev) = full[n - 2].get(g - 1) {
                        s += prev * variant.middle(nn);
                    }
                }
                let (q, r) = s.div_rem(&BigUint::from(nn + 1));
                if !r.is_zero() {
                    return Err(Error::InexactDivision { n, g });
                }
                row.push(q);
            }
            row
        };
        let w: Vec<BigUint> = row.iter().map(|x| x * (2 * n as u64 + 1)).collect();
        full.push(row);
        weighted.push(w);
    }
    let rows = full
        .into_iter()
        .map(|r| (0..=g_max).map(|g| r.get(g).cloned().unwrap_or_default()).collect())
        .collect();
    Ok(CountTable {
        variant,
        max_n: n_max,
        max_g: g_max,
        rows,
    })
}

/// `out[g] = Σ_{n1+n2=m} Σ_{g1+g2=g} w[n1][g1] w[n2][g2]` with `m = w.len()−1`.
fn convolve_rows(w: &[Vec<BigUint>], gm: usize) -> Vec<BigUint> {
    let m = w.len() - 1;
    let max_bits = w
        .iter()
        .flat_map(|r| r.iter().map(|x| x.bits()))
        .max()
        .unwrap_or(1) as usize;
    let terms = (m + 1) * (gm + 1);
    let width = 2 * max_bits + (usize::BITS - terms.leading_zeros()) as usize + 2;
    let packed: Vec<BigUint> = w.iter().map(|r| pack(r, width)).collect();
    let mut acc = BigUint::zero();
    for n1 in 0..=m / 2 {
        let n2 = m - n1;
        let prod = &packed[n1] * &packed[n2];
        if n1 == n2 {
            acc += prod;
        } else {
            acc += prod << 1u32;
        }
    }
    unpack(acc, width, gm + 1)
}

/// Direct convolution, used to cross-check the packed version.
pub fn cc_table_naive(n_max: usize, g_max: usize, variant: Variant) -> Result<CountTable> {
    let gcap = n_max / 2 + 1;
    let mut q = vec![vec![BigUint::zero(); gcap + 1]; n_max + 1];
    q[0][0] = BigUint::one();
    for n in 1..=n_max {
        let nn = n as u64;
        for g in 0..=gcap {
            let mut s = &q[n - 1][g] * (4 * (2 * nn - 1));
            if n >= 2 && g >= 1 {
                s += &q[n - 2][g - 1] * variant.middle(nn);
            }
            if n >= 2 {
                let mut c = BigUint::zero();
                for n1 in 0..=n - 2 {
                    let n2 = n - 2 - n1;
                    for g1 in 0..=g {
                        c += (&q[n1][g1] * (2 * n1 as u64 + 1)) * (&q[n2][g - g1] * (2 * n2 as u64 + 1));
                    }
                }
                s += c * 3u32;
            }
            let (d, r) = s.div_rem(&BigUint::from(nn + 1));
            if !r.is_zero() {
                return Err(Error::InexactDivision { n, g });
            }
            q[n][g] = d;
        }
    }
    let rows = q
        .into_iter()
        .map(|r| (0..=g_max).map(|g| r.get(g).cloned().unwrap_or_default()).collect())
        .collect();
    Ok(CountTable {
        variant,
        max_n: n_max,
        max_g: g_max,
        rows,
    })
}

/// Planar count `2·3ⁿ(2n)! / (n!(n+2)!)`.
pub fn planar_closed_form(n: usize) -> BigUint {
    let num = BigUint::from(2u32) * BigUint::from(3u32).pow(n as u32) * factorial(2 * n);
    num / (factorial(n) * factorial(n + 2))
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |a, k| a * k)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

pub fn catalan(n: usize) -> BigUint {
    binomial(2 * n, n) / (n as u64 + 1)
}

/// Counts derived from a filled `Q` table.
#[derive(Clone, Debug)]
pub struct DerivedCounts {
    /// `U^lab(n,g) = (n+2−2g)·Q(n,g)/2`.
    pub labeled_unicellular: Vec<Vec<BigUint>>,
    /// `(n, g, holds)` for every nonzero `Q(n,g)` with `g ≥ 1`.
    pub trisection_bound: Vec<(usize, usize, bool)>,
    /// `Q(n−1,g)/Q(n,g)` for nonzero entries.
    pub ratio_step: Vec<(usize, usize, BigRational)>,
    /// `Q(n,g)/(n²·Q(n,g−1))` for nonzero entries.
    pub ratio_genus: Vec<(usize, usize, BigRational)>,
}

pub fn derived_counts(t: &CountTable) -> Result<DerivedCounts> {
    let mut lab = Vec::new();
    let mut bound = Vec::new();
    let mut ratio_step = Vec::new();
    let mut ratio_genus = Vec::new();
    for n in 0..=t.max_n {
        let mut row = Vec::new();
        for g in 0..=t.max_g {
            let q = t.get(n, g);
            let v = n as i64 + 2 - 2 * g as i64;
            if v < 2 || q.is_zero() {
                row.push(BigUint::zero());
                continue;
            }
            let (u, r) = (q.clone() * v as u64).div_rem(&BigUint::from(2u32));
            if !r.is_zero() {
                return Err(Error::InexactDivision { n, g });
            }
            row.push(u);
            if g >= 1 && n >= 1 {
                let lhs = q.clone() * (2 * g as u64);
                let rhs = t.get(n, g - 1) * (2 * n as u64).pow(3);
                bound.push((n, g, lhs <= rhs));
                let prev = t.get(n, g - 1);
                if !prev.is_zero() {
                    ratio_genus.push((
                        n,
                        g,
                        BigRational::new(q.clone().into(), (prev * (n * n) as u64).into()),
                    ));
                }
            }
            if n >= 1 {
                let p = t.get(n - 1, g);
                if !p.is_zero() {
                    ratio_step.push((n, g, BigRational::new(p.into(), q.clone().into())));
                }
            }
        }
        lab.push(row);
    }
    Ok(DerivedCounts {
        labeled_unicellular: lab,
        trisection_bound: bound,
        ratio_step,
        ratio_genus,
    })
}

/// `c(N,k)`: permutations of `N` points with `k` cycles, all of odd length.
#[derive(Clone, Debug)]
pub struct OddCyclePermTable {
    c: Vec<Vec<BigUint>>,
}

impl OddCyclePermTable {
    pub fn new(n_max: usize) -> Self {
        let mut c = vec![vec![BigUint::zero(); n_max + 1]; n_max + 1];
        c[0][0] = BigUint::one();
        for n in 1..=n_max {
            for k in 1..=n {
                let mut s = BigUint::zero();
                let mut j2 = 0;
                while j2 < n {
                    let rest = n - 1 - j2;
                    if !c[rest][k - 1].is_zero() {
                        s += falling(n - 1, j2) * &c[rest][k - 1];
                    }
                    j2 += 2;
                }
                c[n][k] = s;
            }
        }
        OddCyclePermTable { c }
    }

    pub fn max_n(&self) -> usize {
        self.c.len() - 1
    }

    pub fn get(&self, n: usize, k: usize) -> BigUint {
        self.c
            .get(n)
            .and_then(|r| r.get(k))
            .cloned()
            .unwrap_or_default()
    }
}

/// `m·(m−1)···(m−j+1)`.
pub fn falling(m: usize, j: usize) -> BigUint {
    ((m - j + 1)..=m).fold(BigUint::one(), |a, x| a * x as u64)
}

/// Rooted unicellular maps with `n` edges and genus `g`: `Cat(n)·c(n+1, n+1−2g)/4^g`.
pub fn unicellular_count(n: usize, g: usize, odd: &OddCyclePermTable) -> BigUint {
    if n + 1 < 2 * g {
        return BigUint::zero();
    }
    let k = n + 1 - 2 * g;
    let num = catalan(n) * odd.get(n + 1, k);
    let den = BigUint::one() << (2 * g);
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// Small counts as `u64`, for tests and reports.
pub fn to_u64(x: &BigUint) -> u64 {
    x.to_u64().expect("count fits in u64")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(t: &CountTable, n: usize, g: usize) -> u64 {
        to_u64(&t.get(n, g))
    }

    #[test]
    fn corrected_small_values() {
        let t = cc_table(6, 3, Variant::Corrected).unwrap();
        let expect: [&[u64]; 7] = [
            &[1],
            &[2],
            &[9, 1],
            &[54, 20],
            &[378, 307, 21],
            &[2916, 4280, 966],
            &[24057, 56914, 27954, 1485],
        ];
        for (n, row) in expect.iter().enumerate() {
            for (g, &v) in row.iter().enumerate() {
                assert_eq!(q(&t, n, g), v, "Q({n},{g})");
            }
            for g in row.len()..=3 {
                assert_eq!(q(&t, n, g), 0);
            }
        }
    }

    #[test]
    fn printed_variant_disagrees() {
        let t = cc_table(3, 1, Variant::Printed).unwrap();
        assert_eq!(q(&t, 2, 1), 2);
        assert_eq!(q(&t, 3, 1), 30);
        assert!(matches!(
            cc_table(4, 2, Variant::Printed),
            Err(Error::InexactDivision { n: 4, g: 1 })
        ));
    }

    #[test]
    fn packed_matches_naive() {
        let a = cc_table(30, 16, Variant::Corrected).unwrap();
        let b = cc_table_naive(30, 16, Variant::Corrected).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn planar_column() {
        let t = cc_table(12, 0, Variant::Corrected).unwrap();
        for n in 0..=12 {
            assert_eq!(t.get(n, 0), planar_closed_form(n));
        }
    }

    #[test]
    fn odd_cycle_counts() {
        let c = OddCyclePermTable::new(8);
        assert_eq!(to_u64(&c.get(0, 0)), 1);
        assert_eq!(to_u64(&c.get(1, 1)), 1);
        assert_eq!(to_u64(&c.get(3, 1)), 2);
        assert_eq!(to_u64(&c.get(4, 2)), 8);
        assert_eq!(to_u64(&c.get(5, 3)), 20);
        for n in (0..=8).step_by(2) {
            let total: BigUint = (0..=n).map(|k| c.get(n, k)).sum();
            let dfact: u64 = (1..n as u64).step_by(2).product();
            assert_eq!(to_u64(&total), dfact * dfact);
            for k in 0..=n {
                if (n + k) % 2 == 1 {
                    assert!(c.get(n, k).is_zero());
                }
            }
        }
    }

    #[test]
    fn unicellular_counts() {
        let c = OddCyclePermTable::new(8);
        let expect: [&[u64]; 5] = [&[1], &[1], &[2, 1], &[5, 10], &[14, 70, 21]];
        for (n, row) in expect.iter().enumerate() {
            for (g, &v) in row.iter().enumerate() {
                assert_eq!(to_u64(&unicellular_count(n, g, &c)), v);
            }
        }
    }

    #[test]
    fn derived() {
        let t = cc_table(4, 2, Variant::Corrected).unwrap();
        let d = derived_counts(&t).unwrap();
        assert_eq!(to_u64(&d.labeled_unicellular[1][0]), 3);
        assert_eq!(to_u64(&d.labeled_unicellular[2][1]), 1);
        assert!(d.trisection_bound.iter().all(|&(_, _, ok)| ok));
        assert!(d.trisection_bound.contains(&(4, 2, true)));
    }
}
