//! Checking the strong 3-perfect hashing property.
//!
//! A column triple with pairwise agreement masks `A_ab`, `A_ac`, `A_bc` has
//! common rows `I = A_ab & A_ac` and separating rows outside
//! `X = A_ab | A_ac | A_bc`. It fails iff `r - |X| <= r - 2k + |I|`, that is
//! `|X| + |I| >= 2k`. Since `|A_ab| + |A_ac| + |A_bc| = |X| + 2|I|`, a failing
//! triple always contains a pair agreeing on at least `ceil(2k/3)` rows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{common_rows, separating_rows, CodeMatrix, PhmError};
use crate::hypergraph::binomial;

/// Triple count up to which [`CodeMatrix::is_strongly_3ph`] enumerates every triple.
pub const FULL_ENUMERATION_BUDGET: u128 = 100_000_000;

/// The row sets behind the verdict on one column triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub triple: [usize; 3],
    pub common: Vec<usize>,
    pub separating: Vec<usize>,
    /// `r - 2k + |common|`; the triple passes iff more rows than this separate it.
    pub threshold: i64,
}

impl SeparationReport {
    pub fn for_triple(m: &CodeMatrix, triple: [usize; 3]) -> SeparationReport {
        let [a, b, c] = triple.map(|j| m.column(j));
        let common = common_rows(&[a, b, c]);
        let separating = separating_rows(a, b, c);
        let threshold = m.rows() as i64 - 2 * m.k() as i64 + common.len() as i64;
        SeparationReport {
            triple,
            common,
            separating,
            threshold,
        }
    }

    pub fn passes(&self) -> bool {
        self.separating.len() as i64 > self.threshold
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strong3ph {
    Holds,
    /// The lexicographically first failing triple.
    Fails(SeparationReport),
}

impl Strong3ph {
    pub fn holds(&self) -> bool {
        matches!(self, Strong3ph::Holds)
    }
}

#[inline]
fn fails(ab: u64, ac: u64, bc: u64, two_k: u32) -> bool {
    (ab | ac | bc).count_ones() + (ab & ac).count_ones() >= two_k
}

impl CodeMatrix {
    fn verdict(&self, found: Option<[usize; 3]>) -> Strong3ph {
        match found {
            None => Strong3ph::Holds,
            Some(t) => Strong3ph::Fails(SeparationReport::for_triple(self, t)),
        }
    }

    /// Full enumeration when `C(m, 3)` is within [`FULL_ENUMERATION_BUDGET`],
    /// the pair-pruned search otherwise.
    pub fn is_strongly_3ph(&self) -> Strong3ph {
        match self.is_strongly_3ph_full(FULL_ENUMERATION_BUDGET) {
            Ok(v) => v,
            Err(_) => self.is_strongly_3ph_pruned(),
        }
    }

    /// Checks every column triple. Refuses when `C(m, 3)` exceeds `budget`.
    pub fn is_strongly_3ph_full(&self, budget: u128) -> Result<Strong3ph, PhmError> {
        let m = self.columns();
        let count = binomial(m, 3);
        if count > budget {
            return Err(PhmError::BudgetExceeded { count, budget });
        }
        // upper-triangular agreement masks; row i holds columns i+1..m
        let offsets: Vec<usize> = (0..m).scan(0, |acc, i| {
            let start = *acc;
            *acc += m - i - 1;
            Some(start)
        }).collect();
        let mut tri = vec![0u64; m * m.saturating_sub(1) / 2];
        let mut rest: &mut [u64] = &mut tri;
        let mut rows: Vec<&mut [u64]> = Vec::with_capacity(m);
        for i in 0..m {
            let (row, tail) = rest.split_at_mut(m - i - 1);
            rows.push(row);
            rest = tail;
        }
        rows.par_iter_mut().enumerate().for_each(|(i, row)| {
            for (slot, l) in row.iter_mut().zip(i + 1..m) {
                *slot = self.agreement_mask(i, l);
            }
        });
        drop(rows);
        let row = |i: usize| &tri[offsets[i]..offsets[i] + m - i - 1];
        let two_k = 2 * self.k() as u32;

        let found = (0..m).into_par_iter().find_map_first(|a| {
            let ra = row(a);
            for b in a + 1..m {
                let ab = ra[b - a - 1];
                let rb = row(b);
                let tail = &ra[b - a..];
                if let Some(pos) = tail
                    .iter()
                    .zip(rb)
                    .position(|(&ac, &bc)| fails(ab, ac, bc, two_k))
                {
                    return Some([a, b, b + 1 + pos]);
                }
            }
            None
        });
        Ok(self.verdict(found))
    }

    /// Examines only triples containing a pair that agrees on at least
    /// `ceil(2k/3)` rows; the third column must then agree with one of the pair
    /// somewhere, unless the pair alone already agrees on `2k` rows.
    pub fn is_strongly_3ph_pruned(&self) -> Strong3ph {
        let m = self.columns();
        let r = self.rows();
        let q = self.q() as usize;
        let k = self.k();
        let two_k = 2 * k as u32;
        let threshold = (2 * k).div_ceil(3).max(1);
        if m < 3 {
            return Strong3ph::Holds;
        }

        // bucket[i * q + α]: columns with value α in row i
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); r * q];
        for j in 0..m {
            for (i, &a) in self.column(j).iter().enumerate() {
                buckets[i * q + a as usize].push(j as u32);
            }
        }

        let best = (0..m)
            .into_par_iter()
            .map_init(
                || vec![0u8; m],
                |count, a| {
                    let col_a = self.column(a);
                    let mut partners = Vec::new();
                    for (i, &x) in col_a.iter().enumerate() {
                        for &b in &buckets[i * q + x as usize] {
                            let b = b as usize;
                            if b > a {
                                if count[b] == 0 {
                                    partners.push(b);
                                }
                                count[b] += 1;
                            }
                        }
                    }
                    let mut best: Option<[usize; 3]> = None;
                    partners.sort_unstable();
                    for &b in &partners {
                        let agree = count[b] as usize;
                        count[b] = 0;
                        if agree < threshold {
                            continue;
                        }
                        let ab = self.agreement_mask(a, b);
                        let candidate = if agree >= 2 * k {
                            let c = (0..3).find(|&c| c != a && c != b).unwrap();
                            Some(sorted3([a, b, c]))
                        } else {
                            let col_b = self.column(b);
                            let mut local: Option<[usize; 3]> = None;
                            for i in 0..r {
                                for bucket in [
                                    &buckets[i * q + col_a[i] as usize],
                                    &buckets[i * q + col_b[i] as usize],
                                ] {
                                    for &c in bucket {
                                        let c = c as usize;
                                        if c == a || c == b {
                                            continue;
                                        }
                                        let t = sorted3([a, b, c]);
                                        if local.is_some_and(|l| l <= t) {
                                            continue;
                                        }
                                        let ac = self.agreement_mask(a, c);
                                        let bc = self.agreement_mask(b, c);
                                        if fails(ab, ac, bc, two_k) {
                                            local = Some(t);
                                        }
                                    }
                                }
                            }
                            local
                        };
                        best = match (best, candidate) {
                            (Some(x), Some(y)) => Some(x.min(y)),
                            (x, y) => x.or(y),
                        };
                    }
                    best
                },
            )
            .flatten()
            .min();
        self.verdict(best)
    }
}

fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;
    use crate::phm::{build_matrix, EvaluationVector};

    fn matrix(q: u64, k: usize, entries: &[u64]) -> CodeMatrix {
        let v = EvaluationVector::new(PrimeField::new(q).unwrap(), entries).unwrap();
        build_matrix(q, k, &v).unwrap()
    }

    #[test]
    fn constant_columns_always_pass() {
        let m = matrix(7, 1, &[0, 1, 2, 3]);
        assert!(m.is_strongly_3ph().holds());
        assert!(m.is_strongly_3ph_pruned().holds());
    }

    #[test]
    fn small_rs_matrices_pass() {
        assert!(matrix(5, 2, &[0, 1, 2]).is_strongly_3ph_full(u128::MAX).unwrap().holds());
        assert!(matrix(7, 2, &[0, 1, 2, 3]).is_strongly_3ph_full(u128::MAX).unwrap().holds());
    }

    #[test]
    fn repeated_point_fails_consistently() {
        let m = matrix(5, 2, &[0, 0, 1]);
        let full = m.is_strongly_3ph_full(u128::MAX).unwrap();
        assert!(!full.holds());
        assert_eq!(full, m.is_strongly_3ph_pruned());
        let Strong3ph::Fails(report) = full else { unreachable!() };
        assert!(!report.passes());
        assert!(report.common.iter().all(|i| !report.separating.contains(i)));
    }

    #[test]
    fn report_threshold() {
        let m = matrix(5, 2, &[0, 1, 2]);
        let rep = SeparationReport::for_triple(&m, [0, 5, 10]);
        // the constants 0, 1, 2 differ everywhere
        assert_eq!(rep.separating, vec![0, 1, 2]);
        assert!(rep.common.is_empty());
        assert_eq!(rep.threshold, -1);
        assert!(rep.passes());
        // 0, x, 2x share only the root 0
        let rep = SeparationReport::for_triple(&m, [0, 1, 2]);
        assert_eq!((rep.common.clone(), rep.separating.clone()), (vec![0], vec![1, 2]));
        assert_eq!(rep.threshold, 0);
        assert!(rep.passes());
    }

    #[test]
    fn full_budget_refusal() {
        let m = matrix(5, 2, &[0, 1, 2]);
        assert!(matches!(
            m.is_strongly_3ph_full(100),
            Err(PhmError::BudgetExceeded { count: 2300, .. })
        ));
    }
}
