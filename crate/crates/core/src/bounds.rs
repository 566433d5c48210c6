//! Closed-form density bounds and the codegree certificate for the upper bound.
//!
//! A `G_r(3r-2k, 3)`-free graph has every `k`-subset in at most two edges.
//! After pruning edges that hold a `(k-1)`-subset of codegree one, each
//! codegree-2 subset `K` lies in edges `A`, `B` with `A ∩ B = K`, and the other
//! `k`-subsets of `A` and `B` form a set `Φ_K` of codegree-1 subsets. The sets
//! `Φ_K` are pairwise disjoint, which gives `K2 (2C(r,k) - 2) <= K1`.

use std::collections::{HashMap, HashSet};

use num::{BigInt, BigRational, One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{binomial, for_each_subset, FreenessWitness, Hypergraph, HypergraphError, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("input is not G_{r}({v}, 3)-free: edges {:?} span {} vertices", witness.edge_indices, witness.union_size)]
    NotFree {
        r: usize,
        v: usize,
        witness: FreenessWitness,
    },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Exact rational used by every bound.
pub type Rational = BigRational;

/// Decimal approximation for display.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn check_rk(r: usize, k: usize) -> Result<(), BoundsError> {
    if k < 2 || r <= k {
        return Err(BoundsError::InvalidParameters(format!("need r > k >= 2 (r={r}, k={k})")));
    }
    Ok(())
}

fn big(x: u128) -> BigInt {
    BigInt::from(x)
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// `1 / (r^k - r)`.
pub fn lower_bound_density(r: usize, k: usize) -> Result<BigRational, BoundsError> {
    check_rk(r, k)?;
    let denom = BigInt::from(r).pow(k as u32) - BigInt::from(r);
    Ok(BigRational::new(BigInt::one(), denom))
}

/// `1 / (k! C(r,k) - k!/2)`.
pub fn upper_bound_density(r: usize, k: usize) -> Result<BigRational, BoundsError> {
    check_rk(r, k)?;
    let kf = factorial(k);
    let two = BigInt::from(2);
    let denom = BigRational::from_integer(&kf * big(binomial(r, k))) - BigRational::new(kf, two);
    Ok(denom.recip())
}

/// `1 / (r^2 - r - 1)`.
pub fn pi_r23(r: usize) -> Result<BigRational, BoundsError> {
    if r < 3 {
        return Err(BoundsError::InvalidParameters(format!("need r >= 3, got {r}")));
    }
    let r = BigInt::from(r);
    Ok(BigRational::new(BigInt::one(), &r * &r - &r - 1))
}

/// `(e-1) C(n,k) / C(r,k)`: every `k`-set lies in at most `e-1` edges.
pub fn bes_edge_upper(n: usize, r: usize, k: usize, e: usize) -> Result<BigRational, BoundsError> {
    if k == 0 || k > r || e == 0 {
        return Err(BoundsError::InvalidParameters(format!(
            "need 1 <= k <= r and e >= 1 (r={r}, k={k}, e={e})"
        )));
    }
    Ok(BigRational::new(
        BigInt::from(e - 1) * big(binomial(n, k)),
        big(binomial(r, k)),
    ))
}

/// `(e-1) / (r (r-1) ... (r-k+1))`.
pub fn bes_density_upper(r: usize, k: usize, e: usize) -> Result<BigRational, BoundsError> {
    check_rk(r, k)?;
    let falling = (r - k + 1..=r).fold(BigInt::one(), |acc, i| acc * i);
    Ok(BigRational::new(BigInt::from(e.saturating_sub(1)), falling))
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 60;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// The probabilistic lower bound on the density for `G_r(er - (e-1)k, e)`:
/// the `(e-1)`-th root of `a! / (2 C(a,r) C(C(a,r), e) (r!)^e)` with
/// `a = er - (e-1)k`. Floating point, for display only.
pub fn bes_density_lower(r: usize, k: usize, e: usize) -> Result<f64, BoundsError> {
    check_rk(r, k)?;
    if e < 2 || e * r < (e - 1) * k + r {
        return Err(BoundsError::InvalidParameters(format!(
            "need e >= 2 and er - (e-1)k >= r (r={r}, k={k}, e={e})"
        )));
    }
    let a = e * r - (e - 1) * k;
    let car = binomial(a, r) as usize;
    let c = (1..=e).fold(BigRational::one(), |acc, i| {
        acc * BigRational::new(BigInt::from(car + 1 - i), BigInt::from(i))
    });
    let num = factorial(a);
    let den = BigInt::from(2) * big(car as u128) * c.to_integer() * factorial(r).pow(e as u32);
    Ok(((ln_big(&num) - ln_big(&den)) / (e - 1) as f64).exp())
}

/// Outcome of [`certificate_check`]. Counts refer to the pruned graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperBoundCertificate {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub input_edges: usize,
    pub pruned_removed: usize,
    pub pruned_edges: usize,
    #[serde(rename = "K1")]
    pub k1: u64,
    #[serde(rename = "K2")]
    pub k2: u64,
    pub max_codegree: usize,
    pub phi_disjoint: bool,
    pub pair_intersection_exact_k: bool,
    pub phi_in_k1: bool,
    /// `K1 - K2 (2 C(r,k) - 2)`.
    pub slack: i64,
    /// `C(r,k) |pruned| = K1 + 2 K2`.
    pub counting_identity: bool,
    /// `K2 (2 C(r,k) - 2) <= K1`.
    pub phi_inequality: bool,
    /// `K1 + K2 <= C(n,k)`.
    pub census_bound: bool,
    /// `|pruned| <= 2C(r,k) / (2C(r,k) - 1) · C(n,k) / C(r,k)`, as an exact rational.
    pub edge_bound: String,
    pub edge_bound_holds: bool,
}

impl UpperBoundCertificate {
    pub fn all_flags(&self) -> bool {
        self.phi_disjoint
            && self.pair_intersection_exact_k
            && self.phi_in_k1
            && self.counting_identity
            && self.phi_inequality
            && self.census_bound
            && self.edge_bound_holds
            && self.max_codegree <= 2
    }
}

/// Verifies `G_r(3r-2k, 3)`-freeness, prunes, and checks the codegree
/// argument on the result. Any failed step on a free input is reported as
/// [`BoundsError::Invariant`].
pub fn certificate_check(h: &Hypergraph, k: usize) -> Result<UpperBoundCertificate, BoundsError> {
    let r = h.r();
    check_rk(r, k)?;
    let v = 3 * r - 2 * k;
    if let Some(w) = h.is_free(v, 3)?.witness() {
        return Err(BoundsError::NotFree { r, v, witness: w.clone() });
    }
    let (pruned, removed) = h.prune_codegree_one(k)?;
    let index = pruned.subset_index(k);
    let crk = binomial(r, k);
    let phi_size = 2 * crk - 2;

    let mut k1: u64 = 0;
    let mut k2: u64 = 0;
    let mut max_codegree = 0;
    let mut pair_exact = true;
    let mut phi_in_k1 = true;
    let mut phi_disjoint = true;
    let mut seen: HashSet<Vec<Vertex>> = HashSet::new();
    let codegree: HashMap<&[Vertex], usize> =
        index.iter().map(|(s, es)| (s.as_slice(), es.len())).collect();

    let mut twos: Vec<(&Vec<Vertex>, &Vec<u32>)> =
        index.iter().filter(|(_, es)| es.len() == 2).collect();
    twos.sort();
    for es in index.values() {
        max_codegree = max_codegree.max(es.len());
        match es.len() {
            1 => k1 += 1,
            2 => k2 += 1,
            _ => {}
        }
    }
    for (subset, es) in twos {
        let a = pruned.edge(es[0] as usize);
        let b = pruned.edge(es[1] as usize);
        let common = a.iter().filter(|x| b.contains(x)).count();
        pair_exact &= common == k;
        let mut phi: Vec<Vec<Vertex>> = Vec::with_capacity(phi_size as usize);
        for edge in [a, b] {
            for_each_subset(edge, k, |s| {
                if s != subset.as_slice() {
                    phi.push(s.to_vec());
                }
            });
        }
        phi.sort_unstable();
        phi.dedup();
        pair_exact &= phi.len() as u128 == phi_size;
        for s in phi {
            phi_in_k1 &= codegree.get(s.as_slice()) == Some(&1);
            phi_disjoint &= seen.insert(s);
        }
    }

    let lhs = crk * pruned.len() as u128;
    let counting_identity = lhs == k1 as u128 + 2 * k2 as u128;
    let phi_inequality = k2 as u128 * phi_size <= k1 as u128;
    let census_bound = k1 as u128 + k2 as u128 <= binomial(h.n(), k);
    let edge_bound = BigRational::new(
        big(2 * crk) * big(binomial(h.n(), k)),
        big(2 * crk - 1) * big(crk),
    );
    let edge_bound_holds =
        BigRational::from_integer(BigInt::from(pruned.len())) <= edge_bound;
    let cert = UpperBoundCertificate {
        n: h.n(),
        r,
        k,
        input_edges: h.len(),
        pruned_removed: removed,
        pruned_edges: pruned.len(),
        k1,
        k2,
        max_codegree,
        phi_disjoint,
        pair_intersection_exact_k: pair_exact,
        phi_in_k1,
        slack: k1 as i64 - (k2 as u128 * phi_size) as i64,
        counting_identity,
        phi_inequality,
        census_bound,
        edge_bound: edge_bound.to_string(),
        edge_bound_holds,
    };
    if !cert.all_flags() {
        return Err(BoundsError::Invariant(format!("certificate flags failed: {cert:?}")));
    }
    Ok(cert)
}

/// One row of the bound table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub r: usize,
    pub k: usize,
    pub lower: String,
    pub upper: String,
    /// Reported, not asserted: it can fail when `r` is close to `k`.
    pub lower_below_upper: bool,
}

pub fn bound_table(r_max: usize) -> Vec<BoundRow> {
    let mut rows = Vec::new();
    for r in 3..=r_max {
        for k in 2..r {
            let lo = lower_bound_density(r, k).expect("r > k >= 2");
            let hi = upper_bound_density(r, k).expect("r > k >= 2");
            rows.push(BoundRow {
                r,
                k,
                lower_below_upper: lo < hi,
                lower: lo.to_string(),
                upper: hi.to_string(),
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::{construct_recursive, RecursionBudget};

    fn q(s: &str) -> BigRational {
        s.parse().unwrap()
    }

    #[test]
    fn density_formulas() {
        assert_eq!(lower_bound_density(3, 2).unwrap(), q("1/6"));
        assert_eq!(lower_bound_density(4, 2).unwrap(), q("1/12"));
        assert_eq!(lower_bound_density(4, 3).unwrap(), q("1/60"));
        assert_eq!(upper_bound_density(3, 2).unwrap(), q("1/5"));
        assert_eq!(upper_bound_density(4, 2).unwrap(), q("1/11"));
        assert_eq!(upper_bound_density(5, 3).unwrap(), q("1/57"));
        assert_eq!(pi_r23(3).unwrap(), q("1/5"));
        assert_eq!(pi_r23(4).unwrap(), q("1/11"));
        assert_eq!(pi_r23(5).unwrap(), q("1/19"));
        assert!(upper_bound_density(2, 2).is_err());
        assert!(pi_r23(2).is_err());
    }

    #[test]
    fn k2_upper_matches_pi() {
        for r in 3..40 {
            assert_eq!(upper_bound_density(r, 2).unwrap(), pi_r23(r).unwrap());
        }
    }

    #[test]
    fn bes_values() {
        assert_eq!(bes_edge_upper(10, 3, 2, 3).unwrap(), q("30"));
        assert_eq!(bes_edge_upper(17, 4, 2, 1).unwrap(), q("0"));
        assert_eq!(bes_edge_upper(6, 3, 2, 2).unwrap(), q("5"));
        assert_eq!(bes_density_upper(3, 2, 3).unwrap(), q("1/3"));
        let lo = bes_density_lower(3, 2, 3).unwrap();
        assert!(lo > 0.0 && lo < 1.0 / 3.0, "{lo}");
    }

    #[test]
    fn table_reports_without_asserting() {
        let rows = bound_table(6);
        assert_eq!(rows.len(), 1 + 2 + 3 + 4);
        assert!(rows.iter().any(|row| row.lower_below_upper));
    }

    #[test]
    fn certificate_empty_and_disjoint() {
        let empty = Hypergraph::empty(3, 6).unwrap();
        let c = certificate_check(&empty, 2).unwrap();
        assert_eq!((c.k1, c.k2, c.slack), (0, 0, 0));
        assert!(c.all_flags());
        let two = Hypergraph::new(3, 6, [[0, 1, 2], [3, 4, 5]]).unwrap();
        let c = certificate_check(&two, 2).unwrap();
        assert_eq!((c.pruned_removed, c.pruned_edges, c.k1, c.k2), (2, 0, 0, 0));
    }

    #[test]
    fn certificate_rejects_dense_input() {
        let h = Hypergraph::new(3, 4, [[0, 1, 2], [0, 1, 3], [0, 2, 3]]).unwrap();
        assert!(matches!(certificate_check(&h, 2), Err(BoundsError::NotFree { .. })));
    }

    #[test]
    fn certificate_on_recursive_construction() {
        let (h, _) = construct_recursive(3, 2, 15, &RecursionBudget::new(3, 1)).unwrap();
        let c = certificate_check(&h, 2).unwrap();
        assert!(c.all_flags());
        assert!(c.slack >= 0);
        assert_eq!(3 * c.pruned_edges as u64, c.k1 + 2 * c.k2);
    }
}
