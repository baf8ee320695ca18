//! Maximum-cardinality matching.
//!
//! [`max_bipartite_matching`] is Hopcroft-Karp; [`max_general_matching`] is
//! Edmonds' blossom contraction seeded with a greedy matching. Both scan
//! vertices and neighbours in ascending order, so a given graph always
//! yields the same matching.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// A simple undirected graph whose vertices are labelled by column index.
///
/// Bipartite graphs keep their left side at local indices `0..left_len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairGraph {
    labels: Vec<usize>,
    left_len: Option<usize>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl PairGraph {
    pub fn general(labels: Vec<usize>) -> Self {
        let n = labels.len();
        Self {
            labels,
            left_len: None,
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn bipartite(left: Vec<usize>, right: Vec<usize>) -> Self {
        let left_len = left.len();
        let mut labels = left;
        labels.extend(right);
        let n = labels.len();
        Self {
            labels,
            left_len: Some(left_len),
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn is_bipartite(&self) -> bool {
        self.left_len.is_some()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    fn is_left(&self, v: usize) -> bool {
        self.left_len.is_some_and(|l| v < l)
    }

    /// Adds edge `{u, v}` between local vertex indices.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.labels.len();
        if u >= n || v >= n {
            return Err(Error::Contract(format!("edge ({u}, {v}) outside {n} vertices")));
        }
        if u == v {
            return Err(Error::Contract(format!("self-loop at vertex {u}")));
        }
        if self.is_bipartite() && self.is_left(u) == self.is_left(v) {
            return Err(Error::Contract(format!("edge ({u}, {v}) stays on one side")));
        }
        match self.adjacency[u].binary_search(&v) {
            Ok(_) => return Err(Error::Contract(format!("duplicate edge ({u}, {v})"))),
            Err(pos) => self.adjacency[u].insert(pos, v),
        }
        let pos = self.adjacency[v].binary_search(&u).unwrap_err();
        self.adjacency[v].insert(pos, u);
        self.edge_count += 1;
        Ok(())
    }

    /// Edges as ascending local index pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    fn labelled(&self, mate: &[usize]) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = (0..mate.len())
            .filter(|&v| mate[v] != NONE && v < mate[v])
            .map(|v| (self.labels[v], self.labels[mate[v]]))
            .collect();
        pairs.sort_unstable();
        pairs
    }
}

/// Maximum matching of a bipartite graph, as `(left label, right label)`
/// pairs sorted by left label.
pub fn max_bipartite_matching(g: &PairGraph) -> Result<Vec<(usize, usize)>> {
    let Some(left) = g.left_len else {
        return Err(Error::Contract("graph is not marked bipartite".into()));
    };
    let n = g.vertex_count();
    let mut mate = vec![NONE; n];
    let mut dist = vec![0usize; left];
    loop {
        // BFS layering from free left vertices.
        let mut queue = VecDeque::new();
        for v in 0..left {
            if mate[v] == NONE {
                dist[v] = 0;
                queue.push_back(v);
            } else {
                dist[v] = NONE;
            }
        }
        let mut found = false;
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbours(v) {
                match mate[w] {
                    NONE => found = true,
                    next if dist[next] == NONE => {
                        dist[next] = dist[v] + 1;
                        queue.push_back(next);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        for v in 0..left {
            if mate[v] == NONE {
                augment_layered(g, v, &mut mate, &mut dist);
            }
        }
    }
    Ok(g.labelled(&mate))
}

fn augment_layered(g: &PairGraph, v: usize, mate: &mut [usize], dist: &mut [usize]) -> bool {
    for &w in g.neighbours(v) {
        let next = mate[w];
        if next == NONE || (dist[next] == dist[v] + 1 && augment_layered(g, next, mate, dist)) {
            mate[v] = w;
            mate[w] = v;
            return true;
        }
    }
    dist[v] = NONE;
    false
}

/// Maximum matching of any simple graph, as label pairs `(a, b)` with the
/// lower local vertex first, sorted.
pub fn max_general_matching(g: &PairGraph) -> Vec<(usize, usize)> {
    let mut search = Blossom::new(g);
    search.greedy();
    for root in 0..g.vertex_count() {
        if search.mate[root] == NONE {
            if let Some(end) = search.find_augmenting_path(root) {
                search.augment(end);
            }
        }
    }
    g.labelled(&search.mate)
}

struct Blossom<'a> {
    g: &'a PairGraph,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    on_path: Vec<bool>,
    queue: VecDeque<usize>,
}

impl<'a> Blossom<'a> {
    fn new(g: &'a PairGraph) -> Self {
        let n = g.vertex_count();
        Self {
            g,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            on_path: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn greedy(&mut self) {
        for v in 0..self.g.vertex_count() {
            if self.mate[v] != NONE {
                continue;
            }
            if let Some(&w) = self.g.neighbours(v).iter().find(|&&w| self.mate[w] == NONE) {
                self.mate[v] = w;
                self.mate[w] = v;
            }
        }
    }

    fn lowest_common_base(&mut self, mut a: usize, mut b: usize) -> usize {
        self.on_path.iter_mut().for_each(|x| *x = false);
        loop {
            a = self.base[a];
            self.on_path[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if self.on_path[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, stem: usize, mut child: usize) {
        while self.base[v] != stem {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_augmenting_path(&mut self, root: usize) -> Option<usize> {
        let n = self.g.vertex_count();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in self.g.neighbours(v) {
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    // odd cycle: contract it into its base
                    let stem = self.lowest_common_base(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, stem, to);
                    self.mark_path(to, stem, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = stem;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let ppv = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = ppv;
        }
    }
}
