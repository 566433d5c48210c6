//! `G_r(v, e)`-freeness: no `e` distinct edges span `v` or fewer vertices.
//!
//! [`Hypergraph::is_free`] prunes by intersection structure; [`Hypergraph::is_free_naive`]
//! enumerates every `e`-subset with its own bitset code and exists to cross-check it.
//! Both report the lexicographically first violating tuple of edge indices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{binomial, Hypergraph, HypergraphError, Vertex};

/// Default cap on the number of subsets the naive verifier will enumerate.
pub const DEFAULT_NAIVE_BUDGET: u128 = 1_000_000_000;

/// Mask mirrors are kept for hypergraphs on at most this many vertices.
const MASK_VERTEX_LIMIT: usize = 512;
const MASK_WORDS: usize = MASK_VERTEX_LIMIT / 64;

/// `e` edges whose union has at most `v` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessWitness {
    pub edge_indices: Vec<usize>,
    pub union_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Freeness {
    Free,
    Violated(FreenessWitness),
}

impl Freeness {
    pub fn is_free(&self) -> bool {
        matches!(self, Freeness::Free)
    }

    pub fn witness(&self) -> Option<&FreenessWitness> {
        match self {
            Freeness::Free => None,
            Freeness::Violated(w) => Some(w),
        }
    }
}

/// For every edge, the other edges it meets and the size of each intersection.
#[derive(Clone, Debug)]
pub struct PairIndex {
    neighbors: Vec<Vec<(u32, u16)>>,
}

impl PairIndex {
    pub fn build(h: &Hypergraph) -> PairIndex {
        let inc = h.incidence();
        let m = h.len();
        let mut count = vec![0u16; m];
        let mut touched: Vec<u32> = Vec::new();
        let neighbors = (0..m)
            .map(|i| {
                for &v in h.edge(i) {
                    for &j in &inc[v as usize] {
                        if j as usize != i {
                            if count[j as usize] == 0 {
                                touched.push(j);
                            }
                            count[j as usize] += 1;
                        }
                    }
                }
                touched.sort_unstable();
                let list = touched
                    .drain(..)
                    .map(|j| {
                        let c = count[j as usize];
                        count[j as usize] = 0;
                        (j, c)
                    })
                    .collect();
                list
            })
            .collect();
        PairIndex { neighbors }
    }

    /// Edges meeting edge `i`, ascending by index, with intersection sizes.
    pub fn neighbors(&self, i: usize) -> &[(u32, u16)] {
        &self.neighbors[i]
    }

    /// `|E_i ∩ E_j|` for `i != j`.
    pub fn intersection(&self, i: usize, j: usize) -> usize {
        let list = &self.neighbors[i];
        match list.binary_search_by_key(&(j as u32), |&(x, _)| x) {
            Ok(pos) => list[pos].1 as usize,
            Err(_) => 0,
        }
    }

    /// All pairs `(i, j, |E_i ∩ E_j|)` with `i < j` and intersection at least `min`.
    pub fn pairs_at_least(&self, min: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (i, list) in self.neighbors.iter().enumerate() {
            for &(j, c) in list {
                if (j as usize) > i && c as usize >= min {
                    out.push((i, j as usize, c as usize));
                }
            }
        }
        out
    }
}

/// Union sizes of edge triples, through bitmasks when the vertex set is small.
struct UnionSizer<'a> {
    h: &'a Hypergraph,
    masks: Option<Vec<[u64; MASK_WORDS]>>,
}

impl<'a> UnionSizer<'a> {
    fn new(h: &'a Hypergraph) -> Self {
        let masks = (h.n() <= MASK_VERTEX_LIMIT).then(|| {
            h.edges()
                .map(|e| {
                    let mut m = [0u64; MASK_WORDS];
                    for &v in e {
                        m[v as usize / 64] |= 1 << (v % 64);
                    }
                    m
                })
                .collect()
        });
        UnionSizer { h, masks }
    }

    fn union3(&self, i: usize, j: usize, l: usize) -> usize {
        match &self.masks {
            Some(m) => (0..MASK_WORDS)
                .map(|w| (m[i][w] | m[j][w] | m[l][w]).count_ones() as usize)
                .sum(),
            None => sorted_union_len(&[self.h.edge(i), self.h.edge(j), self.h.edge(l)]),
        }
    }
}

fn sorted_union_len(edges: &[&[Vertex]]) -> usize {
    let mut all: Vec<Vertex> = edges.iter().flat_map(|e| e.iter().copied()).collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

impl Hypergraph {
    fn check_freeness_params(&self, v: usize, e: usize) -> Result<(), HypergraphError> {
        if e < 2 || v < self.r {
            return Err(HypergraphError::InvalidParameters(format!(
                "freeness needs e >= 2 and v >= r (r={}, v={v}, e={e})",
                self.r
            )));
        }
        Ok(())
    }

    /// Decides `G_r(v, e)`-freeness. For `e = 3` only triples containing a pair
    /// with intersection at least `ceil((3r - v) / 3)` are examined: three edges
    /// spanning at most `v` vertices have pairwise intersections summing to at
    /// least `3r - v`. For `e = 2` it is a pairwise intersection bound; larger `e`
    /// runs a depth-first enumeration cut off once the partial union exceeds `v`.
    pub fn is_free(&self, v: usize, e: usize) -> Result<Freeness, HypergraphError> {
        self.check_freeness_params(v, e)?;
        if e > self.len() {
            return Ok(Freeness::Free);
        }
        Ok(match e {
            2 => self.free_pairs(v),
            3 => self.free_triples(v),
            _ => self.free_general(v, e),
        })
    }

    fn free_pairs(&self, v: usize) -> Freeness {
        let need = (2 * self.r) as i64 - v as i64;
        let violation = if need <= 0 {
            Some((0, 1))
        } else {
            let index = PairIndex::build(self);
            (0..self.len()).find_map(|i| {
                index
                    .neighbors(i)
                    .iter()
                    .find(|&&(j, c)| j as usize > i && c as i64 >= need)
                    .map(|&(j, _)| (i, j as usize))
            })
        };
        match violation {
            None => Freeness::Free,
            Some((i, j)) => Freeness::Violated(FreenessWitness {
                edge_indices: vec![i, j],
                union_size: sorted_union_len(&[self.edge(i), self.edge(j)]),
            }),
        }
    }

    fn free_triples(&self, v: usize) -> Freeness {
        let sizer = UnionSizer::new(self);
        let deficit = 3 * self.r as i64 - v as i64;
        if deficit <= 0 {
            return Freeness::Violated(FreenessWitness {
                edge_indices: vec![0, 1, 2],
                union_size: sizer.union3(0, 1, 2),
            });
        }
        let deficit = deficit as usize;
        let threshold = deficit.div_ceil(3).max(1);
        let index = PairIndex::build(self);
        let heavy = index.pairs_at_least(threshold);

        let best = heavy
            .par_iter()
            .filter_map(|&(i, j, a)| {
                if a >= deficit {
                    // the pair alone is so dense that any third edge completes a violation
                    let l = (0..3).find(|&l| l != i && l != j).unwrap();
                    return Some(sorted3([i, j, l]));
                }
                let mut best: Option<[usize; 3]> = None;
                for &(l, _) in index.neighbors(i).iter().chain(index.neighbors(j)) {
                    let l = l as usize;
                    if l == i || l == j {
                        continue;
                    }
                    let t = sorted3([i, j, l]);
                    if best.is_some_and(|b| b <= t) {
                        continue;
                    }
                    if sizer.union3(i, j, l) <= v {
                        best = Some(t);
                    }
                }
                best
            })
            .min();

        match best {
            None => Freeness::Free,
            Some(t) => Freeness::Violated(FreenessWitness {
                edge_indices: t.to_vec(),
                union_size: sizer.union3(t[0], t[1], t[2]),
            }),
        }
    }

    fn free_general(&self, v: usize, e: usize) -> Freeness {
        struct Search<'a> {
            h: &'a Hypergraph,
            v: usize,
            e: usize,
            mult: Vec<u32>,
            union: usize,
            chosen: Vec<usize>,
        }
        impl Search<'_> {
            fn add(&mut self, i: usize) {
                for &x in self.h.edge(i) {
                    self.mult[x as usize] += 1;
                    if self.mult[x as usize] == 1 {
                        self.union += 1;
                    }
                }
                self.chosen.push(i);
            }
            fn remove(&mut self) {
                let i = self.chosen.pop().unwrap();
                for &x in self.h.edge(i) {
                    self.mult[x as usize] -= 1;
                    if self.mult[x as usize] == 0 {
                        self.union -= 1;
                    }
                }
            }
            fn dfs(&mut self, start: usize) -> bool {
                if self.chosen.len() == self.e {
                    return true;
                }
                let left = self.e - self.chosen.len();
                for i in start..=self.h.len() - left {
                    self.add(i);
                    if self.union <= self.v && self.dfs(i + 1) {
                        return true;
                    }
                    self.remove();
                }
                false
            }
        }
        let mut s = Search {
            h: self,
            v,
            e,
            mult: vec![0; self.n],
            union: 0,
            chosen: Vec::with_capacity(e),
        };
        if s.dfs(0) {
            Freeness::Violated(FreenessWitness {
                edge_indices: s.chosen.clone(),
                union_size: s.union,
            })
        } else {
            Freeness::Free
        }
    }

    /// [`Hypergraph::is_free_naive_with_budget`] with [`DEFAULT_NAIVE_BUDGET`].
    pub fn is_free_naive(&self, v: usize, e: usize) -> Result<Freeness, HypergraphError> {
        self.is_free_naive_with_budget(v, e, DEFAULT_NAIVE_BUDGET)
    }

    /// Unconditional enumeration of all `C(|H|, e)` edge subsets in lexicographic
    /// order. Refuses to start when that count exceeds `budget`.
    pub fn is_free_naive_with_budget(
        &self,
        v: usize,
        e: usize,
        budget: u128,
    ) -> Result<Freeness, HypergraphError> {
        self.check_freeness_params(v, e)?;
        let m = self.len();
        let count = binomial(m, e);
        if count > budget {
            return Err(HypergraphError::BudgetExceeded { count, budget });
        }
        if e > m {
            return Ok(Freeness::Free);
        }
        let words = self.n.div_ceil(64).max(1);
        let mut masks = vec![0u64; m * words];
        for (i, edge) in self.edges().enumerate() {
            for &x in edge {
                masks[i * words + x as usize / 64] |= 1 << (x % 64);
            }
        }
        let mask = |i: usize| &masks[i * words..(i + 1) * words];
        let popcount_or = |a: &[u64], b: &[u64]| -> usize {
            a.iter().zip(b).map(|(x, y)| (x | y).count_ones() as usize).sum()
        };

        let found = if e == 3 {
            (0..m).into_par_iter().find_map_first(|i| {
                let mut ab = vec![0u64; words];
                for j in i + 1..m {
                    for (w, (x, y)) in ab.iter_mut().zip(mask(i).iter().zip(mask(j))) {
                        *w = x | y;
                    }
                    for l in j + 1..m {
                        let u = popcount_or(&ab, mask(l));
                        if u <= v {
                            return Some((vec![i, j, l], u));
                        }
                    }
                }
                None
            })
        } else {
            // generic odometer over index tuples, partial unions kept per level
            let mut idx: Vec<usize> = (0..e).collect();
            let mut partial = vec![0u64; (e + 1) * words];
            let mut level = 0;
            let mut found = None;
            'outer: loop {
                for d in level..e {
                    let (lo, hi) = partial.split_at_mut((d + 1) * words);
                    for (w, (x, y)) in hi[..words]
                        .iter_mut()
                        .zip(lo[d * words..].iter().zip(mask(idx[d])))
                    {
                        *w = x | y;
                    }
                }
                let u: usize = partial[e * words..]
                    .iter()
                    .map(|w| w.count_ones() as usize)
                    .sum();
                if u <= v {
                    found = Some((idx.clone(), u));
                    break;
                }
                let mut pos = e;
                while pos > 0 && idx[pos - 1] == m - e + pos - 1 {
                    pos -= 1;
                }
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                idx[pos] += 1;
                for d in pos + 1..e {
                    idx[d] = idx[d - 1] + 1;
                }
                level = pos;
            }
            found
        };
        Ok(match found {
            None => Freeness::Free,
            Some((edge_indices, union_size)) => Freeness::Violated(FreenessWitness {
                edge_indices,
                union_size,
            }),
        })
    }
}
