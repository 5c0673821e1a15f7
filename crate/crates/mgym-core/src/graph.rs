//! Undirected graph utilities for device topologies.
//!
//! Covers what the benchmark protocols need: connected components, bipartite
//! detection, proper edge coloring into parallel classes, random chain
//! sampling, and induced subgraphs. Edges are stored normalized as
//! `(min, max)` pairs, deduplicated and sorted.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{CoreError, Result};
use crate::rng::EngineRng;

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Build from an edge list; edges are normalized, deduplicated, sorted.
    /// Self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(CoreError::Device(format!("self-loop on vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(CoreError::Device(format!(
                    "edge ({u},{v}) outside vertex range 0..{n}"
                )));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &normalized {
            adj[u].push(v);
            adj[v].push(u);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: normalized,
            adj,
        })
    }

    /// Path graph 0-1-2-...-(n-1).
    pub fn path(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).expect("path edges are valid")
    }

    /// Complete graph on n vertices.
    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).expect("complete edges are valid")
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        let e = (u.min(v), u.max(v));
        self.edges.binary_search(&e).is_ok()
    }

    /// BFS 2-coloring; `Some(colors)` when bipartite, `None` otherwise.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let mut color = vec![u8::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        for start in 0..self.n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if color[v] == u8::MAX {
                        color[v] = 1 - color[u];
                        queue.push_back(v);
                    } else if color[v] == color[u] {
                        return None;
                    }
                }
            }
        }
        Some(color)
    }

    /// Connected components as vertex lists (each sorted), largest first;
    /// ties broken by smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }

    /// Size and members of the largest connected component.
    /// An empty graph yields `(0, [])`.
    pub fn largest_connected_component(&self) -> (usize, Vec<usize>) {
        match self.connected_components().into_iter().next() {
            Some(comp) => (comp.len(), comp),
            None => (0, Vec::new()),
        }
    }

    /// Induced subgraph on `vertices` (relabeled 0..k in the given order),
    /// plus the mapping new-index -> old-vertex.
    pub fn induced(&self, vertices: &[usize]) -> Result<(Graph, Vec<usize>)> {
        let mut index_of = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.n {
                return Err(CoreError::Device(format!("vertex {v} out of range")));
            }
            if index_of[v] != usize::MAX {
                return Err(CoreError::Device(format!("vertex {v} repeated")));
            }
            index_of[v] = i;
        }
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            if index_of[u] != usize::MAX && index_of[v] != usize::MAX {
                edges.push((index_of[u], index_of[v]));
            }
        }
        Ok((Graph::from_edges(vertices.len(), &edges)?, vertices.to_vec()))
    }
}

/// A partition of (a subset of) the edges into parallel classes: no two
/// edges in a class share a vertex. Edges that could not be placed within
/// the class cap are listed in `dropped`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    pub classes: Vec<Vec<(usize, usize)>>,
    pub dropped: Vec<(usize, usize)>,
}

impl EdgeColoring {
    /// Check the defining invariant: classes are matchings, and together
    /// with `dropped` they partition the graph's edge set exactly.
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        let mut covered: Vec<(usize, usize)> = self.dropped.clone();
        for (ci, class) in self.classes.iter().enumerate() {
            let mut used = vec![false; graph.num_vertices()];
            for &(u, v) in class {
                if !graph.contains_edge(u, v) {
                    return Err(CoreError::Device(format!(
                        "class {ci} contains non-edge ({u},{v})"
                    )));
                }
                if used[u] || used[v] {
                    return Err(CoreError::Device(format!(
                        "class {ci} is not a matching at edge ({u},{v})"
                    )));
                }
                used[u] = true;
                used[v] = true;
                covered.push((u.min(v), u.max(v)));
            }
        }
        covered.sort_unstable();
        covered.dedup();
        if covered != graph.edges() {
            return Err(CoreError::Device(
                "edge coloring does not partition the edge set".into(),
            ));
        }
        Ok(())
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }
}

/// Partition edges into parallel classes.
///
/// Bipartite graphs are colored with exactly `max_degree` classes using the
/// alternating-path (Kempe chain) method behind Koenig's theorem. Other
/// graphs fall back to first-fit greedy over the sorted edge list. When
/// `max_colors` is given, edges that cannot be placed within that many
/// classes are dropped rather than opening new classes.
pub fn edge_coloring(graph: &Graph, max_colors: Option<usize>) -> Result<EdgeColoring> {
    if graph.edges().is_empty() {
        return Ok(EdgeColoring {
            classes: Vec::new(),
            dropped: Vec::new(),
        });
    }
    let coloring = if graph.bipartition().is_some() {
        bipartite_edge_coloring(graph, max_colors)
    } else {
        greedy_edge_coloring(graph, max_colors)
    };
    coloring.validate(graph)?;
    Ok(coloring)
}

/// Exact Delta-class coloring for bipartite graphs. If `max_colors` is below
/// Delta the excess edges are dropped after coloring.
fn bipartite_edge_coloring(graph: &Graph, max_colors: Option<usize>) -> EdgeColoring {
    let n = graph.num_vertices();
    let delta = graph.max_degree();
    const NONE: usize = usize::MAX;
    // at[v][c] = neighbor matched to v via color c, or NONE.
    let mut at = vec![vec![NONE; delta]; n];

    let free_color = |at: &Vec<Vec<usize>>, v: usize| -> usize {
        (0..delta)
            .find(|&c| at[v][c] == NONE)
            .expect("a vertex of degree <= delta always has a free color")
    };

    for &(u, v) in graph.edges() {
        let a = free_color(&at, u);
        let b = free_color(&at, v);
        if a != b {
            // Color a is used at v. Collect the alternating a/b path that
            // starts at v, then flip every edge on it (a <-> b). In a
            // bipartite graph this path can never reach u, so after the
            // flip color a is free at both endpoints.
            let mut path = vec![v];
            let mut col = a;
            loop {
                let last = *path.last().expect("path starts non-empty");
                let next = at[last][col];
                if next == NONE {
                    break;
                }
                path.push(next);
                col = if col == a { b } else { a };
            }
            // Clear old colors first (adjacent path edges share vertices),
            // then write the flipped colors.
            let mut col = a;
            for w in path.windows(2) {
                at[w[0]][col] = NONE;
                at[w[1]][col] = NONE;
                col = if col == a { b } else { a };
            }
            let mut col = b;
            for w in path.windows(2) {
                at[w[0]][col] = w[1];
                at[w[1]][col] = w[0];
                col = if col == a { b } else { a };
            }
            debug_assert_eq!(at[v][a], NONE);
            debug_assert_eq!(at[u][a], NONE);
        }
        at[u][a] = v;
        at[v][a] = u;
    }

    // Collect classes from the matching structure.
    let cap = max_colors.unwrap_or(delta).min(delta);
    let mut classes = vec![Vec::new(); cap];
    let mut dropped = Vec::new();
    for c in 0..delta {
        for u in 0..n {
            let v = at[u][c];
            if v != NONE && u < v {
                if c < cap {
                    classes[c].push((u, v));
                } else {
                    dropped.push((u, v));
                }
            }
        }
    }
    classes.retain(|class| !class.is_empty());
    dropped.sort_unstable();
    EdgeColoring { classes, dropped }
}

/// First-fit greedy coloring over the sorted edge list.
fn greedy_edge_coloring(graph: &Graph, max_colors: Option<usize>) -> EdgeColoring {
    let n = graph.num_vertices();
    let cap = max_colors.unwrap_or(usize::MAX);
    let mut used: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut dropped = Vec::new();
    for &(u, v) in graph.edges() {
        let mut color = None;
        for c in 0..classes.len() {
            let u_used = used[u].get(c).copied().unwrap_or(false);
            let v_used = used[v].get(c).copied().unwrap_or(false);
            if !u_used && !v_used {
                color = Some(c);
                break;
            }
        }
        let c = match color {
            Some(c) => c,
            None if classes.len() < cap => {
                classes.push(Vec::new());
                classes.len() - 1
            }
            None => {
                dropped.push((u, v));
                continue;
            }
        };
        classes[c].push((u, v));
        for w in [u, v] {
            if used[w].len() <= c {
                used[w].resize(c + 1, false);
            }
            used[w][c] = true;
        }
    }
    EdgeColoring { classes, dropped }
}

/// Default class cap for all-to-all topologies: `2 * ceil(log2 n)`.
pub fn all_to_all_color_cap(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    let log2 = (usize::BITS - (n - 1).leading_zeros()) as usize;
    2 * log2.max(1)
}

/// Sample a simple path (chain) of `n` vertices: start from a uniformly
/// random edge, then repeatedly extend at a uniformly random free end, with
/// up to 1000 restarts before giving up.
pub fn sample_random_chain(graph: &Graph, n: usize, rng: &mut EngineRng) -> Result<Vec<usize>> {
    if n > graph.num_vertices() {
        return Err(CoreError::Benchmark(format!(
            "chain of {n} requested on a {}-vertex graph",
            graph.num_vertices()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![rng.gen_range(0..graph.num_vertices())]);
    }
    if graph.edges().is_empty() {
        return Err(CoreError::Benchmark("graph has no edges".into()));
    }
    let mut best: Vec<usize> = Vec::new();
    for _ in 0..1000 {
        let &(u, v) = graph
            .edges()
            .choose(rng)
            .expect("edge list is non-empty here");
        let mut chain: std::collections::VecDeque<usize> = [u, v].into_iter().collect();
        let mut in_chain = vec![false; graph.num_vertices()];
        in_chain[u] = true;
        in_chain[v] = true;
        while chain.len() < n {
            let head = *chain.front().expect("chain is non-empty");
            let tail = *chain.back().expect("chain is non-empty");
            let mut candidates: Vec<(bool, usize)> = Vec::new();
            candidates.extend(
                graph
                    .neighbors(head)
                    .iter()
                    .filter(|&&w| !in_chain[w])
                    .map(|&w| (true, w)),
            );
            candidates.extend(
                graph
                    .neighbors(tail)
                    .iter()
                    .filter(|&&w| !in_chain[w])
                    .map(|&w| (false, w)),
            );
            match candidates.choose(rng) {
                Some(&(at_front, w)) => {
                    if at_front {
                        chain.push_front(w);
                    } else {
                        chain.push_back(w);
                    }
                    in_chain[w] = true;
                }
                None => break,
            }
        }
        if chain.len() >= n {
            return Ok(chain.into_iter().take(n).collect());
        }
        if chain.len() > best.len() {
            best = chain.into_iter().collect();
        }
    }
    Err(CoreError::Benchmark(format!(
        "no chain of {n} vertices found after 1000 restarts (best: {})",
        best.len()
    )))
}

/// Sample a connected vertex subset of size `k` by random-frontier growth:
/// start from a uniformly random vertex and repeatedly absorb a uniformly
/// random neighbor of the current subset.
pub fn random_connected_subset(graph: &Graph, k: usize, rng: &mut EngineRng) -> Result<Vec<usize>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    if k > graph.num_vertices() {
        return Err(CoreError::Benchmark(format!(
            "subset of {k} requested on a {}-vertex graph",
            graph.num_vertices()
        )));
    }
    let start = rng.gen_range(0..graph.num_vertices());
    let mut selected = vec![start];
    let mut in_set = vec![false; graph.num_vertices()];
    in_set[start] = true;
    let mut frontier: Vec<usize> = graph
        .neighbors(start)
        .iter()
        .copied()
        .filter(|&w| !in_set[w])
        .collect();
    while selected.len() < k {
        // Deduplicate lazily: frontier may hold vertices already absorbed.
        frontier.retain(|&w| !in_set[w]);
        let &next = match frontier.choose(rng) {
            Some(v) => v,
            None => {
                return Err(CoreError::Benchmark(format!(
                    "connected subset of {k} not reachable from vertex {start} (component size {})",
                    selected.len()
                )))
            }
        };
        in_set[next] = true;
        selected.push(next);
        frontier.extend(graph.neighbors(next).iter().copied().filter(|&w| !in_set[w]));
    }
    selected.sort_unstable();
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn components_and_lcc() {
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (4, 5)]).unwrap();
        let comps = g.connected_components();
        assert_eq!(comps[0], vec![0, 1, 2]);
        let (size, members) = g.largest_connected_component();
        assert_eq!(size, 3);
        assert_eq!(members, vec![0, 1, 2]);
        let empty = Graph::from_edges(0, &[]).unwrap();
        assert_eq!(empty.largest_connected_component(), (0, vec![]));
    }

    #[test]
    fn bipartition_detects_odd_cycles() {
        let even = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(even.bipartition().is_some());
        let odd = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert!(odd.bipartition().is_none());
    }

    #[test]
    fn bipartite_coloring_uses_exactly_delta_classes() {
        // A 3x4 grid graph: bipartite with max degree 4... use 3x3 (degree 4
        // at center). Build grid edges manually.
        let (rows, cols) = (3, 4);
        let idx = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((idx(r, c), idx(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((idx(r, c), idx(r + 1, c)));
                }
            }
        }
        let g = Graph::from_edges(rows * cols, &edges).unwrap();
        let delta = g.max_degree();
        let coloring = edge_coloring(&g, None).unwrap();
        assert_eq!(coloring.num_classes(), delta);
        assert!(coloring.dropped.is_empty());
        coloring.validate(&g).unwrap();
    }

    #[test]
    fn path_coloring_is_two_classes() {
        let g = Graph::path(9);
        let coloring = edge_coloring(&g, None).unwrap();
        assert_eq!(coloring.num_classes(), 2);
        coloring.validate(&g).unwrap();
    }

    #[test]
    fn k4_greedy_gets_three_classes_and_c5_three() {
        let k4 = Graph::complete(4);
        let c = edge_coloring(&k4, None).unwrap();
        assert_eq!(c.num_classes(), 3);
        assert!(c.dropped.is_empty());

        let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let c = edge_coloring(&c5, None).unwrap();
        assert_eq!(c.num_classes(), 3);
    }

    #[test]
    fn greedy_cap_drops_excess_edges() {
        let k4 = Graph::complete(4);
        let c = edge_coloring(&k4, Some(2)).unwrap();
        assert_eq!(c.num_classes(), 2);
        assert_eq!(
            c.classes.iter().map(Vec::len).sum::<usize>() + c.dropped.len(),
            6
        );
        c.validate(&k4).unwrap();
    }

    #[test]
    fn all_to_all_cap_formula() {
        assert_eq!(all_to_all_color_cap(56), 12); // ceil(log2 56) = 6
        assert_eq!(all_to_all_color_cap(16), 8);
        assert_eq!(all_to_all_color_cap(2), 2);
    }

    #[test]
    fn random_chain_has_requested_length_and_valid_edges() {
        let g = Graph::path(82);
        let mut rng = rng::root(7, "chain-test");
        let chain = sample_random_chain(&g, 50, &mut rng).unwrap();
        assert_eq!(chain.len(), 50);
        let mut seen = std::collections::HashSet::new();
        for w in chain.windows(2) {
            assert!(g.contains_edge(w[0], w[1]));
            assert!(seen.insert(w[0]));
        }
    }

    #[test]
    fn random_chain_fails_gracefully() {
        // A star graph has no path of 4 vertices.
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let mut rng = rng::root(3, "chain-test");
        assert!(sample_random_chain(&star, 4, &mut rng).is_err());
        assert!(sample_random_chain(&star, 6, &mut rng).is_err());
    }

    #[test]
    fn chain_sampling_is_deterministic_per_seed() {
        let g = Graph::complete(12);
        let a = sample_random_chain(&g, 8, &mut rng::root(11, "c")).unwrap();
        let b = sample_random_chain(&g, 8, &mut rng::root(11, "c")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = Graph::from_edges(6, &[(0, 2), (2, 4), (4, 5), (1, 3)]).unwrap();
        let (sub, map) = g.induced(&[2, 4, 5]).unwrap();
        assert_eq!(map, vec![2, 4, 5]);
        assert_eq!(sub.edges(), &[(0, 1), (1, 2)]);
    }
}
