use super::{Hypergraph, HypergraphError, Vertex};

/// A `G_r(v, e)`-free family grown one edge at a time, with an optional cap on
/// pairwise intersections. [`FamilyBuilder::can_add`] answers whether an edge
/// keeps every constraint; `push` and `pop` make the structure usable as a
/// search stack.
#[derive(Clone, Debug)]
pub struct FamilyBuilder {
    r: usize,
    n: usize,
    v: usize,
    e: usize,
    max_pair: Option<usize>,
    edges: Vec<Vec<Vertex>>,
    incidence: Vec<Vec<u32>>,
    /// Pairs whose union has at most `v - r` vertices; with any third edge they
    /// violate `e = 3` freeness.
    dense_pairs: usize,
    dense_added: Vec<usize>,
    overlap: Vec<u16>,
    mark: Vec<u32>,
    stamp: u32,
}

impl FamilyBuilder {
    pub fn new(
        r: usize,
        n: usize,
        v: usize,
        e: usize,
        max_pair: Option<usize>,
    ) -> Result<Self, HypergraphError> {
        if r == 0 {
            return Err(HypergraphError::ZeroUniformity);
        }
        if e < 2 || v < r {
            return Err(HypergraphError::InvalidParameters(format!(
                "freeness needs e >= 2 and v >= r (r={r}, v={v}, e={e})"
            )));
        }
        Ok(FamilyBuilder {
            r,
            n,
            v,
            e,
            max_pair,
            edges: Vec::new(),
            incidence: vec![Vec::new(); n],
            dense_pairs: 0,
            dense_added: Vec::new(),
            overlap: Vec::new(),
            mark: vec![0; n],
            stamp: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Vec<Vertex>] {
        &self.edges
    }

    pub fn to_hypergraph(&self) -> Hypergraph {
        Hypergraph::new(self.r, self.n, &self.edges).expect("builder edges are valid")
    }

    /// Existing edges meeting `x`, with intersection sizes, ascending by index.
    fn touching(&mut self, x: &[Vertex]) -> Vec<(usize, usize)> {
        if self.overlap.len() < self.edges.len() {
            self.overlap.resize(self.edges.len(), 0);
        }
        let mut touched = Vec::new();
        for &u in x {
            for &j in &self.incidence[u as usize] {
                if self.overlap[j as usize] == 0 {
                    touched.push(j as usize);
                }
                self.overlap[j as usize] += 1;
            }
        }
        touched.sort_unstable();
        touched
            .into_iter()
            .map(|j| {
                let c = self.overlap[j] as usize;
                self.overlap[j] = 0;
                (j, c)
            })
            .collect()
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.stamp = 1;
        }
        self.stamp
    }

    /// Whether adding the sorted edge `x` keeps all constraints. The edge must
    /// not already be present.
    pub fn can_add(&mut self, x: &[Vertex]) -> bool {
        let touched = self.touching(x);
        if let Some(p) = self.max_pair {
            if touched.iter().any(|&(_, c)| c > p) {
                return false;
            }
        }
        match self.e {
            2 => {
                let need = 2 * self.r as i64 - self.v as i64;
                if need <= 0 {
                    return self.edges.is_empty();
                }
                touched.iter().all(|&(_, c)| (c as i64) < need)
            }
            3 => self.can_add_triple(x, &touched),
            _ => !self.completes_violation(x),
        }
    }

    fn can_add_triple(&mut self, x: &[Vertex], touched: &[(usize, usize)]) -> bool {
        let len = self.edges.len();
        if len < 2 {
            return true;
        }
        let deficit = 3 * self.r as i64 - self.v as i64;
        if deficit <= 0 || self.dense_pairs > 0 {
            return false;
        }
        if touched.iter().any(|&(_, a)| a as i64 >= deficit) {
            return false;
        }
        // a violating triple now has x meeting some J, and L meeting x or J
        for &(j, _) in touched {
            let stamp = self.next_stamp();
            let mut base = 0;
            for &u in x.iter().chain(&self.edges[j]) {
                if self.mark[u as usize] != stamp {
                    self.mark[u as usize] = stamp;
                    base += 1;
                }
            }
            let v = self.v;
            let check = |l: usize, this: &Self| -> bool {
                let extra = this.edges[l]
                    .iter()
                    .filter(|&&u| this.mark[u as usize] != stamp)
                    .count();
                base + extra <= v
            };
            if touched.iter().any(|&(l, _)| l != j && check(l, self)) {
                return false;
            }
            for &u in &self.edges[j] {
                for &l in &self.incidence[u as usize] {
                    if l as usize != j && check(l as usize, self) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Depth-first search for `e - 1` existing edges that together with `x`
    /// span at most `v` vertices.
    fn completes_violation(&self, x: &[Vertex]) -> bool {
        fn dfs(
            b: &FamilyBuilder,
            start: usize,
            left: usize,
            mult: &mut [u32],
            union: usize,
        ) -> bool {
            if left == 0 {
                return true;
            }
            for i in start..=b.edges.len() - left {
                let mut u = union;
                for &w in &b.edges[i] {
                    mult[w as usize] += 1;
                    if mult[w as usize] == 1 {
                        u += 1;
                    }
                }
                let hit = u <= b.v && dfs(b, i + 1, left - 1, mult, u);
                for &w in &b.edges[i] {
                    mult[w as usize] -= 1;
                }
                if hit {
                    return true;
                }
            }
            false
        }
        if self.edges.len() + 1 < self.e {
            return false;
        }
        let mut mult = vec![0u32; self.n];
        for &w in x {
            mult[w as usize] = 1;
        }
        dfs(self, 0, self.e - 1, &mut mult, x.len())
    }

    /// Adds `x` without checking constraints.
    pub fn push(&mut self, x: &[Vertex]) {
        let mut x = x.to_vec();
        x.sort_unstable();
        let dense_threshold = 3 * self.r as i64 - self.v as i64;
        let dense = self
            .touching(&x)
            .iter()
            .filter(|&&(_, c)| c as i64 >= dense_threshold)
            .count();
        self.dense_pairs += dense;
        self.dense_added.push(dense);
        let idx = self.edges.len() as u32;
        for &u in &x {
            self.incidence[u as usize].push(idx);
        }
        self.edges.push(x);
    }

    pub fn pop(&mut self) -> Option<Vec<Vertex>> {
        let x = self.edges.pop()?;
        for &u in &x {
            self.incidence[u as usize].pop();
        }
        self.dense_pairs -= self.dense_added.pop().unwrap();
        Some(x)
    }
}
