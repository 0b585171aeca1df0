//! Fill-reducing symmetric ordering by graph nested dissection.
//!
//! Separators are breadth-first level sets rooted at a pseudo-peripheral
//! node. A level set always separates the levels before it from the levels
//! after it, so the recursion needs no geometric information.

use super::SparseMatrix;

/// Subgraphs at or below this size are ordered directly.
const LEAF_SIZE: usize = 64;

/// Returns `perm` with `perm[k]` the original index eliminated at step `k`.
pub fn nested_dissection(m: &SparseMatrix) -> Vec<usize> {
    let graph = Graph::symmetrized(m);
    let n = graph.len();
    let mut nd = Dissector {
        graph: &graph,
        label: vec![0; n],
        next_label: 1,
        level: vec![usize::MAX; n],
        stamp: vec![0; n],
        next_stamp: 1,
    };
    let mut order = Vec::with_capacity(n);
    nd.dissect((0..n).collect(), &mut order);
    debug_assert_eq!(order.len(), n);
    order
}

struct Graph {
    xadj: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    /// Adjacency of the pattern of `M + Mᵀ` without self loops.
    fn symmetrized(m: &SparseMatrix) -> Self {
        let n = m.nrows().max(m.ncols());
        let mut degree = vec![0usize; n + 1];
        for (i, j, _) in m.triplets() {
            if i != j {
                degree[i + 1] += 1;
                degree[j + 1] += 1;
            }
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let mut next = degree.clone();
        let mut adj = vec![0; degree[n]];
        for (i, j, _) in m.triplets() {
            if i != j {
                adj[next[i]] = j;
                next[i] += 1;
                adj[next[j]] = i;
                next[j] += 1;
            }
        }
        // drop duplicates introduced by symmetric entries
        let mut xadj = Vec::with_capacity(n + 1);
        let mut compact = Vec::with_capacity(adj.len());
        xadj.push(0);
        for i in 0..n {
            let nbrs = &mut adj[degree[i]..degree[i + 1]];
            nbrs.sort_unstable();
            let mut last = usize::MAX;
            for &j in nbrs.iter() {
                if j != last {
                    compact.push(j);
                    last = j;
                }
            }
            xadj.push(compact.len());
        }
        Self { xadj, adj: compact }
    }

    fn len(&self) -> usize {
        self.xadj.len() - 1
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.xadj[v]..self.xadj[v + 1]]
    }
}

struct Dissector<'g> {
    graph: &'g Graph,
    /// Current subgraph membership.
    label: Vec<usize>,
    next_label: usize,
    level: Vec<usize>,
    stamp: Vec<usize>,
    next_stamp: usize,
}

impl Dissector<'_> {
    fn claim(&mut self, nodes: &[usize]) -> usize {
        let id = self.next_label;
        self.next_label += 1;
        for &v in nodes {
            self.label[v] = id;
        }
        id
    }

    /// Breadth-first levels from `root` inside subgraph `id`.
    fn levels(&mut self, root: usize, id: usize) -> Vec<Vec<usize>> {
        let stamp = self.next_stamp;
        self.next_stamp += 1;
        self.stamp[root] = stamp;
        self.level[root] = 0;
        let mut levels = vec![vec![root]];
        loop {
            let mut next = Vec::new();
            for &v in levels.last().unwrap() {
                for &w in self.graph.neighbors(v) {
                    if self.label[w] == id && self.stamp[w] != stamp {
                        self.stamp[w] = stamp;
                        self.level[w] = levels.len();
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return levels;
            }
            levels.push(next);
        }
    }

    fn pseudo_peripheral(&mut self, start: usize, id: usize) -> (usize, Vec<Vec<usize>>) {
        let mut root = start;
        let mut levels = self.levels(root, id);
        for _ in 0..8 {
            let last = levels.last().unwrap();
            let candidate = *last
                .iter()
                .min_by_key(|&&v| self.graph.neighbors(v).iter().filter(|&&w| self.label[w] == id).count())
                .unwrap();
            let trial = self.levels(candidate, id);
            if trial.len() <= levels.len() {
                // restore level numbers for the kept structure
                levels = self.levels(root, id);
                break;
            }
            root = candidate;
            levels = trial;
        }
        (root, levels)
    }

    fn dissect(&mut self, nodes: Vec<usize>, out: &mut Vec<usize>) {
        if nodes.len() <= LEAF_SIZE {
            self.order_leaf(nodes, out);
            return;
        }
        let id = self.claim(&nodes);

        let (_, levels) = self.pseudo_peripheral(nodes[0], id);
        let reached: usize = levels.iter().map(Vec::len).sum();
        if reached < nodes.len() {
            // disconnected: split off the component just found
            let stamp = self.next_stamp - 1;
            let (found, rest): (Vec<usize>, Vec<usize>) = nodes.into_iter().partition(|&v| self.stamp[v] == stamp);
            self.dissect(found, out);
            self.dissect(rest, out);
            return;
        }
        if levels.len() < 3 {
            self.order_leaf(nodes, out);
            return;
        }

        // smallest level set whose removal leaves a reasonably balanced split
        let n = nodes.len();
        let mut before = 0;
        let mut best: Option<(usize, usize)> = None;
        for (l, lev) in levels.iter().enumerate() {
            let after = n - before - lev.len();
            if l > 0
                && l + 1 < levels.len()
                && 10 * before >= 3 * n
                && 10 * after >= 3 * n
                && best.is_none_or(|(_, size)| lev.len() < size)
            {
                best = Some((l, lev.len()));
            }
            before += lev.len();
        }
        let split = best.map(|(l, _)| l).unwrap_or_else(|| {
            let mut acc = 0;
            let mut l = 1;
            for (i, lev) in levels.iter().enumerate() {
                acc += lev.len();
                if 2 * acc >= n {
                    l = i;
                    break;
                }
            }
            l.clamp(1, levels.len() - 2)
        });

        let mut part_a: Vec<usize> = levels[..split].concat();
        let part_b: Vec<usize> = levels[split + 1..].concat();
        let mut separator = Vec::with_capacity(levels[split].len());
        for &v in &levels[split] {
            let touches_after = self
                .graph
                .neighbors(v)
                .iter()
                .any(|&w| self.label[w] == id && self.level[w] == split + 1);
            if touches_after {
                separator.push(v);
            } else {
                part_a.push(v);
            }
        }

        self.dissect(part_a, out);
        self.dissect(part_b, out);
        out.extend(separator);
    }

    fn order_leaf(&mut self, nodes: Vec<usize>, out: &mut Vec<usize>) {
        if nodes.is_empty() {
            return;
        }
        // reverse Cuthill-McKee style: BFS order keeps leaf fronts narrow
        let id = self.claim(&nodes);
        let stamp = self.next_stamp;
        self.next_stamp += 1;
        let mut ordered = Vec::with_capacity(nodes.len());
        for &seed in &nodes {
            if self.stamp[seed] == stamp {
                continue;
            }
            self.stamp[seed] = stamp;
            let begin = ordered.len();
            ordered.push(seed);
            let mut head = begin;
            while head < ordered.len() {
                let v = ordered[head];
                head += 1;
                for &w in self.graph.neighbors(v) {
                    if self.label[w] == id && self.stamp[w] != stamp {
                        self.stamp[w] = stamp;
                        ordered.push(w);
                    }
                }
            }
        }
        ordered.reverse();
        out.extend(ordered);
    }
}
