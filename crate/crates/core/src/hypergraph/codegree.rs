use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{binomial, for_each_subset, Hypergraph, HypergraphError, Vertex};

/// How many `k`-subsets of the vertex set attain each codegree.
///
/// Codegrees that no subset attains are absent, so the empty graph on four
/// vertices has census `{0: 6}` and a single triple on three vertices `{1: 3}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodegreeCensus {
    pub k: usize,
    pub counts: BTreeMap<usize, u128>,
}

impl CodegreeCensus {
    pub fn count(&self, codegree: usize) -> u128 {
        self.counts.get(&codegree).copied().unwrap_or(0)
    }

    pub fn max_codegree(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// Number of `k`-subsets counted; equals `C(n, k)`.
    pub fn total(&self) -> u128 {
        self.counts.values().sum()
    }

    /// `Σ d · count_d`; equals `C(r, k) · |H|`.
    pub fn weighted_total(&self) -> u128 {
        self.counts.iter().map(|(&d, &c)| d as u128 * c).sum()
    }
}

impl Hypergraph {
    /// Every `k`-subset lying in some edge, mapped to the indices of the edges
    /// containing it (ascending).
    pub(crate) fn subset_index(&self, k: usize) -> HashMap<Vec<Vertex>, Vec<u32>> {
        let mut map: HashMap<Vec<Vertex>, Vec<u32>> = HashMap::new();
        for (i, e) in self.edges().enumerate() {
            for_each_subset(e, k, |s| map.entry(s.to_vec()).or_default().push(i as u32));
        }
        map
    }

    pub fn codegree_distribution(&self, k: usize) -> Result<CodegreeCensus, HypergraphError> {
        if k == 0 || k >= self.r {
            return Err(HypergraphError::InvalidParameters(format!(
                "codegree census needs 1 <= k < r (r={}, k={k})",
                self.r
            )));
        }
        let index = self.subset_index(k);
        let mut counts: BTreeMap<usize, u128> = BTreeMap::new();
        for edges in index.values() {
            *counts.entry(edges.len()).or_default() += 1;
        }
        let untouched = binomial(self.n, k) - index.len() as u128;
        if untouched > 0 {
            counts.insert(0, untouched);
        }
        Ok(CodegreeCensus { k, counts })
    }

    /// Repeatedly deletes the lowest-index edge containing a `(k-1)`-subset of
    /// codegree one, until no such edge remains. Returns the surviving graph and
    /// the number of edges deleted.
    pub fn prune_codegree_one(&self, k: usize) -> Result<(Hypergraph, usize), HypergraphError> {
        if k < 2 || k >= self.r {
            return Err(HypergraphError::InvalidParameters(format!(
                "pruning needs 2 <= k < r (r={}, k={k})",
                self.r
            )));
        }
        let index = self.subset_index(k - 1);
        let mut live = vec![true; self.len()];
        let mut alive_count: HashMap<&[Vertex], usize> =
            index.iter().map(|(s, es)| (s.as_slice(), es.len())).collect();
        let mut queue: BTreeSet<usize> = index
            .values()
            .filter(|es| es.len() == 1)
            .map(|es| es[0] as usize)
            .collect();

        let mut removed = 0;
        while let Some(i) = queue.pop_first() {
            live[i] = false;
            removed += 1;
            for_each_subset(self.edge(i), k - 1, |s| {
                let c = alive_count.get_mut(s).unwrap();
                *c -= 1;
                if *c == 1 {
                    let last = index[s].iter().map(|&j| j as usize).find(|&j| live[j]);
                    queue.insert(last.unwrap());
                }
            });
        }
        let kept = self
            .edges()
            .enumerate()
            .filter(|&(i, _)| live[i])
            .map(|(_, e)| e);
        Ok((Hypergraph::new(self.r, self.n, kept)?, removed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hg(r: usize, n: usize, edges: &[&[Vertex]]) -> Hypergraph {
        Hypergraph::new(r, n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn census_examples() {
        let one = hg(3, 3, &[&[0, 1, 2]]).codegree_distribution(2).unwrap();
        assert_eq!(one.counts, BTreeMap::from([(1, 3)]));
        let empty = Hypergraph::empty(3, 4).unwrap().codegree_distribution(2).unwrap();
        assert_eq!(empty.counts, BTreeMap::from([(0, 6)]));
        assert!(hg(3, 3, &[&[0, 1, 2]]).codegree_distribution(3).is_err());
    }

    #[test]
    fn census_double_counts() {
        let h = hg(3, 6, &[&[0, 1, 2], &[0, 1, 3], &[2, 4, 5], &[1, 3, 5]]);
        for k in 1..3 {
            let c = h.codegree_distribution(k).unwrap();
            assert_eq!(c.total(), binomial(6, k));
            assert_eq!(c.weighted_total(), binomial(3, k) * 4);
        }
        assert_eq!(h.codegree_distribution(2).unwrap().max_codegree(), 2);
    }

    #[test]
    fn prune_examples() {
        let (g, removed) = hg(3, 3, &[&[0, 1, 2]]).prune_codegree_one(2).unwrap();
        assert!(g.is_empty());
        assert_eq!(removed, 1);
        let (g, removed) = hg(3, 6, &[&[0, 1, 2], &[3, 4, 5]]).prune_codegree_one(2).unwrap();
        assert!(g.is_empty());
        assert_eq!(removed, 2);
        let (g, removed) = Hypergraph::empty(3, 4).unwrap().prune_codegree_one(2).unwrap();
        assert!(g.is_empty());
        assert_eq!(removed, 0);
    }

    #[test]
    fn prune_keeps_closed_core() {
        // every vertex of K_4^(3) has codegree 3; the pendant edge goes
        let h = hg(
            3,
            6,
            &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3], &[3, 4, 5]],
        );
        let (g, removed) = h.prune_codegree_one(2).unwrap();
        assert_eq!(removed, 1);
        assert_eq!(g.len(), 4);
        assert!(!g.contains_edge(&[3, 4, 5]));
    }
}
