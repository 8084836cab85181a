//! Dual graphs of regions and exact perfect-matching counts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{FormatError, KuoError};
use crate::lattice::{Region, TriRef};

/// Bipartition class: `One` holds up-pointing cells, `Two` down-pointing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Class {
    One,
    Two,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub cell: Option<TriRef>,
    pub class: Class,
}

/// A bipartite graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    vertices: Vec<Vertex>,
    adj: Vec<Vec<usize>>,
}

/// An exact, nonnegative number of matchings or tilings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Count(pub BigUint);

impl Count {
    pub fn zero() -> Self {
        Count(BigUint::zero())
    }

    pub fn one() -> Self {
        Count(BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl From<u64> for Count {
    fn from(v: u64) -> Self {
        Count(BigUint::from(v))
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::ops::Mul for &Count {
    type Output = Count;
    fn mul(self, rhs: &Count) -> Count {
        Count(&self.0 * &rhs.0)
    }
}

impl std::ops::Add for Count {
    type Output = Count;
    fn add(self, rhs: Count) -> Count {
        Count(self.0 + rhs.0)
    }
}

impl DualGraph {
    /// Builds a graph from explicit classes and an edge list. Every edge must
    /// join the two classes.
    pub fn from_edges(classes: Vec<Class>, edges: &[(usize, usize)]) -> Result<Self, String> {
        let n = classes.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(format!("edge ({u}, {v}) out of range for {n} vertices"));
            }
            if classes[u] == classes[v] {
                return Err(format!("edge ({u}, {v}) joins vertices of the same class"));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let vertices = classes
            .into_iter()
            .map(|class| Vertex { cell: None, class })
            .collect();
        Ok(DualGraph { vertices, adj })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn class_sizes(&self) -> (usize, usize) {
        let one = self
            .vertices
            .iter()
            .filter(|v| v.class == Class::One)
            .count();
        (one, self.vertices.len() - one)
    }

    pub fn vertex_of(&self, cell: TriRef) -> Option<usize> {
        self.vertices.iter().position(|v| v.cell == Some(cell))
    }

    /// The same graph with vertex `i` renamed to `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> DualGraph {
        assert_eq!(perm.len(), self.len());
        let mut vertices = self.vertices.clone();
        let mut adj = vec![Vec::new(); self.len()];
        for (old, &new) in perm.iter().enumerate() {
            vertices[new] = self.vertices[old].clone();
            adj[new] = self.adj[old].iter().map(|&v| perm[v]).collect();
            adj[new].sort_unstable();
        }
        DualGraph { vertices, adj }
    }

    /// Fixture format: `p <vertices> <edges>`, an optional
    /// `c <class> <class> ...` line with one `1` or `2` per vertex, then one
    /// `u v` line per edge. Vertex ids are 0-based.
    pub fn to_fixture(&self) -> String {
        let mut out = format!("p {} {}\n", self.len(), self.edge_count());
        out.push('c');
        for v in &self.vertices {
            out.push_str(match v.class {
                Class::One => " 1",
                Class::Two => " 2",
            });
        }
        out.push('\n');
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses [`DualGraph::to_fixture`] output. Without a class line the
    /// classes come from a 2-colouring that puts the lowest vertex of each
    /// component in class 1.
    pub fn from_fixture(text: &str) -> Result<DualGraph, FormatError> {
        let err = |line: usize, msg: &str| FormatError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(FormatError::MissingHeader)?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (n, m) = match h.as_slice() {
            ["p", n, m] => (
                n.parse::<usize>()
                    .map_err(|_| err(hl, "bad vertex count"))?,
                m.parse::<usize>().map_err(|_| err(hl, "bad edge count"))?,
            ),
            _ => return Err(FormatError::MissingHeader),
        };
        let mut classes: Option<Vec<Class>> = None;
        let mut edges = Vec::with_capacity(m);
        for (line, l) in lines {
            if let Some(rest) = l.strip_prefix('c') {
                let cls = rest
                    .split_whitespace()
                    .map(|s| match s {
                        "1" => Ok(Class::One),
                        "2" => Ok(Class::Two),
                        _ => Err(err(line, "class must be 1 or 2")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if cls.len() != n {
                    return Err(err(line, "class line length differs from vertex count"));
                }
                classes = Some(cls);
                continue;
            }
            let parts: Vec<&str> = l.split_whitespace().collect();
            let [u, v] = parts.as_slice() else {
                return Err(err(line, "expected `u v`"));
            };
            let u = u.parse().map_err(|_| err(line, "bad vertex id"))?;
            let v = v.parse().map_err(|_| err(line, "bad vertex id"))?;
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(err(hl, "edge count differs from header"));
        }
        let classes = match classes {
            Some(c) => c,
            None => two_colour(n, &edges).ok_or_else(|| err(hl, "graph is not bipartite"))?,
        };
        DualGraph::from_edges(classes, &edges).map_err(|msg| err(hl, &msg))
    }
}

fn two_colour(n: usize, edges: &[(usize, usize)]) -> Option<Vec<Class>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u >= n || v >= n {
            return None;
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut colour: Vec<Option<Class>> = vec![None; n];
    for s in 0..n {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(Class::One);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            let cu = colour[u].unwrap();
            let other = if cu == Class::One {
                Class::Two
            } else {
                Class::One
            };
            for &v in &adj[u] {
                match colour[v] {
                    None => {
                        colour[v] = Some(other);
                        stack.push(v);
                    }
                    Some(cv) if cv == cu => return None,
                    _ => {}
                }
            }
        }
    }
    colour.into_iter().collect()
}

/// One vertex per cell in row-major order, one edge per shared side.
pub fn dual_graph(region: &Region) -> DualGraph {
    let index: BTreeMap<TriRef, usize> = region
        .cells()
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, i))
        .collect();
    let vertices = region
        .cells()
        .iter()
        .map(|&t| Vertex {
            cell: Some(t),
            class: if t.is_up() { Class::One } else { Class::Two },
        })
        .collect();
    let adj = region
        .cells()
        .iter()
        .map(|&t| {
            let mut l: Vec<usize> = t
                .neighbors()
                .iter()
                .filter_map(|n| index.get(n).copied())
                .collect();
            l.sort_unstable();
            l
        })
        .collect();
    DualGraph { vertices, adj }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct VertexSet(Vec<u64>);

impl VertexSet {
    fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; n.div_ceil(64)];
        if !n.is_multiple_of(64) {
            *words.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
        }
        VertexSet(words)
    }

    fn contains(&self, v: usize) -> bool {
        self.0[v / 64] >> (v % 64) & 1 == 1
    }

    fn remove(&mut self, v: usize) {
        self.0[v / 64] &= !(1u64 << (v % 64));
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
}

/// Memoised search: the lowest-numbered remaining vertex must be matched to
/// one of its remaining neighbours. With row-major vertex order the set of
/// remaining vertices is a suffix minus a narrow frontier, which keeps the
/// memo table small.
struct Counter<'g> {
    graph: &'g DualGraph,
    memo: HashMap<VertexSet, BigUint>,
}

impl Counter<'_> {
    fn has_partner(&self, set: &VertexSet, v: usize) -> bool {
        self.graph.adj[v].iter().any(|&w| set.contains(w))
    }

    fn count(&mut self, set: &VertexSet) -> BigUint {
        let Some(v) = set.first() else {
            return BigUint::one();
        };
        if let Some(hit) = self.memo.get(set) {
            return hit.clone();
        }
        let mut total = BigUint::zero();
        for &u in &self.graph.adj[v] {
            if !set.contains(u) {
                continue;
            }
            let mut next = set.clone();
            next.remove(v);
            next.remove(u);
            let stranded = self.graph.adj[v]
                .iter()
                .chain(&self.graph.adj[u])
                .any(|&w| next.contains(w) && !self.has_partner(&next, w));
            if !stranded {
                total += self.count(&next);
            }
        }
        self.memo.insert(set.clone(), total.clone());
        total
    }
}

/// Number of perfect matchings of `graph` with the `removed` vertices
/// deleted. The empty graph has exactly one matching.
///
/// Panics if a removed id is out of range.
pub fn count_matchings(graph: &DualGraph, removed: &[usize]) -> Count {
    let mut set = VertexSet::full(graph.len());
    for &v in removed {
        assert!(v < graph.len(), "removed vertex {v} out of range");
        set.remove(v);
    }
    let (mut one, mut two) = (0usize, 0usize);
    for (i, v) in graph.vertices.iter().enumerate() {
        if set.contains(i) {
            match v.class {
                Class::One => one += 1,
                Class::Two => two += 1,
            }
        }
    }
    if one != two {
        return Count::zero();
    }
    let mut counter = Counter {
        graph,
        memo: HashMap::new(),
    };
    Count(counter.count(&set))
}

/// Number of lozenge tilings of `region`.
pub fn count_tilings(region: &Region) -> Count {
    if region.is_untileable() {
        return Count::zero();
    }
    count_matchings(&dual_graph(region), &[])
}

/// A lozenge, stored as its two cells in row-major order.
pub type Lozenge = (TriRef, TriRef);

/// The first `limit` tilings in lexicographic order, each a sorted list of
/// lozenges.
pub fn enumerate_tilings(region: &Region, limit: usize) -> Vec<Vec<Lozenge>> {
    let mut out = Vec::new();
    if region.is_untileable() || limit == 0 || region.up_count() != region.down_count() {
        return out;
    }
    let graph = dual_graph(region);
    let mut set = VertexSet::full(graph.len());
    let mut partial = Vec::new();
    enumerate_rec(&graph, &mut set, &mut partial, &mut out, limit);
    out
}

fn enumerate_rec(
    graph: &DualGraph,
    set: &mut VertexSet,
    partial: &mut Vec<Lozenge>,
    out: &mut Vec<Vec<Lozenge>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    let Some(v) = set.first() else {
        out.push(partial.clone());
        return;
    };
    let cell = |i: usize| graph.vertices[i].cell.expect("region graph");
    for &u in &graph.adj[v] {
        if !set.contains(u) {
            continue;
        }
        set.remove(v);
        set.remove(u);
        partial.push((cell(v), cell(u)));
        enumerate_rec(graph, set, partial, out, limit);
        partial.pop();
        set.0[v / 64] |= 1 << (v % 64);
        set.0[u / 64] |= 1 << (u % 64);
        if out.len() >= limit {
            return;
        }
    }
}

/// Matching counts of the six deletions in the condensation identity
/// `M(G-y) M(G-{x,z,t}) = M(G-x) M(G-{y,z,t}) + M(G-t) M(G-{x,y,z})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KuoCounts {
    pub minus_y: String,
    pub minus_xzt: String,
    pub minus_x: String,
    pub minus_yzt: String,
    pub minus_t: String,
    pub minus_xyz: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KuoOutcome {
    pub holds: bool,
    /// In the order `G-y, G-{x,z,t}, G-x, G-{y,z,t}, G-t, G-{x,y,z}`.
    pub counts: [Count; 6],
}

/// Checks the condensation identity on four marked vertices.
///
/// Requires `|V1| = |V2| + 1` with `x`, `y`, `t` in class 1 and `z` in
/// class 2. The four vertices must lie on a common face in the cyclic order
/// `x, y, z, t`; that part is the caller's responsibility.
pub fn kuo_condensation_check(
    graph: &DualGraph,
    x: usize,
    y: usize,
    z: usize,
    t: usize,
) -> Result<KuoOutcome, KuoError> {
    let marks = [x, y, z, t];
    if let Some(&v) = marks.iter().find(|&&v| v >= graph.len()) {
        return Err(KuoError::OutOfRange(v));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if marks[i] == marks[j] {
                return Err(KuoError::NotDistinct(marks));
            }
        }
    }
    let (up, down) = graph.class_sizes();
    if up != down + 1 {
        return Err(KuoError::ClassCount { up, down });
    }
    let class = |v: usize| graph.vertices[v].class;
    if [x, y, t].iter().any(|&v| class(v) != Class::One) || class(z) != Class::Two {
        return Err(KuoError::ClassPattern);
    }
    let m = |del: &[usize]| count_matchings(graph, del);
    let counts = [
        m(&[y]),
        m(&[x, z, t]),
        m(&[x]),
        m(&[y, z, t]),
        m(&[t]),
        m(&[x, y, z]),
    ];
    let lhs = &counts[0] * &counts[1];
    let rhs = (&counts[2] * &counts[3]) + (&counts[4] * &counts[5]);
    Ok(KuoOutcome {
        holds: lhs == rhs,
        counts,
    })
}

impl KuoOutcome {
    pub fn to_strings(&self) -> KuoCounts {
        let s = |i: usize| self.counts[i].to_string();
        KuoCounts {
            minus_y: s(0),
            minus_xzt: s(1),
            minus_x: s(2),
            minus_yzt: s(3),
            minus_t: s(4),
            minus_xyz: s(5),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hexagon, build_quartered, QHParams};

    fn cycle(n: usize) -> DualGraph {
        let classes = (0..n)
            .map(|i| if i % 2 == 0 { Class::One } else { Class::Two })
            .collect();
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        DualGraph::from_edges(classes, &edges).unwrap()
    }

    #[test]
    fn empty_graph_has_one_matching() {
        let g = dual_graph(&Region::empty(""));
        assert_eq!(g.len(), 0);
        assert_eq!(count_matchings(&g, &[]), Count::one());
    }

    #[test]
    fn unit_hexagon_is_a_six_cycle() {
        let g = dual_graph(&build_hexagon(1, 1, 1));
        assert_eq!(g.len(), 6);
        assert_eq!(g.edge_count(), 6);
        assert!((0..6).all(|v| g.neighbors(v).len() == 2));
        assert_eq!(count_matchings(&g, &[]), Count::from(2));
    }

    #[test]
    fn even_cycles_have_two_matchings() {
        for n in (4..=20).step_by(2) {
            assert_eq!(count_matchings(&cycle(n), &[]), Count::from(2));
        }
    }

    #[test]
    fn unbalanced_deletion_gives_zero() {
        assert!(count_matchings(&cycle(6), &[0]).is_zero());
        // a path of four vertices remains
        assert_eq!(count_matchings(&cycle(6), &[0, 1]), Count::one());
    }

    #[test]
    fn quartered_dual_is_connected_and_balanced() {
        let r = build_quartered(&QHParams::new(2, 6, 3, vec![2, 3]).unwrap()).unwrap();
        let g = dual_graph(&r);
        let (one, two) = g.class_sizes();
        assert_eq!(one, two);
        assert!(g.edge_count() <= 3 * one.min(two));
        assert_eq!(crate::lattice::region_stats(&r).components, 1);
    }

    #[test]
    fn enumeration_of_small_cases() {
        assert_eq!(
            enumerate_tilings(&Region::empty(""), 10),
            vec![Vec::<Lozenge>::new()]
        );
        let tilings = enumerate_tilings(&build_hexagon(1, 1, 1), 10);
        assert_eq!(tilings.len(), 2);
        assert!(tilings.iter().all(|t| t.len() == 3));
        assert!(tilings[0] < tilings[1]);
        assert_eq!(enumerate_tilings(&build_hexagon(2, 2, 2), 5).len(), 5);
    }

    #[test]
    fn fixture_round_trip() {
        let g = dual_graph(&build_hexagon(1, 2, 1));
        let text = g.to_fixture();
        let back = DualGraph::from_fixture(&text).unwrap();
        assert_eq!(
            back.edges().collect::<Vec<_>>(),
            g.edges().collect::<Vec<_>>()
        );
        assert_eq!(count_matchings(&back, &[]), count_matchings(&g, &[]));
    }

    #[test]
    fn fixture_without_class_line() {
        let g = DualGraph::from_fixture("p 4 4\n0 1\n1 2\n2 3\n3 0\n").unwrap();
        assert_eq!(g.class_sizes(), (2, 2));
        assert_eq!(count_matchings(&g, &[]), Count::from(2));
        assert!(DualGraph::from_fixture("p 3 3\n0 1\n1 2\n2 0\n").is_err());
        assert!(DualGraph::from_fixture("p 3 2\n0 1\n").is_err());
    }

    #[test]
    fn kuo_rejects_bad_marks() {
        let g = DualGraph::from_edges(
            vec![
                Class::One,
                Class::Two,
                Class::One,
                Class::One,
                Class::Two,
                Class::One,
                Class::Two,
            ],
            &[(0, 1), (1, 2), (2, 4), (3, 4), (5, 6), (0, 6)],
        )
        .unwrap();
        assert_eq!(
            kuo_condensation_check(&g, 0, 0, 1, 2),
            Err(KuoError::NotDistinct([0, 0, 1, 2]))
        );
        assert_eq!(
            kuo_condensation_check(&g, 0, 1, 2, 3),
            Err(KuoError::ClassPattern)
        );
        assert_eq!(
            kuo_condensation_check(&g, 0, 9, 2, 3),
            Err(KuoError::OutOfRange(9))
        );
        let balanced = cycle(6);
        assert_eq!(
            kuo_condensation_check(&balanced, 0, 2, 1, 4),
            Err(KuoError::ClassCount { up: 3, down: 3 })
        );
    }

    #[test]
    fn kuo_all_zero_instance_holds() {
        // class 1 vertices 0, 2, 4 and class 2 vertices 1, 3, 5 plus an
        // isolated class 1 vertex 6 that can never be matched unless deleted
        let g = DualGraph::from_edges(
            vec![
                Class::One,
                Class::Two,
                Class::One,
                Class::Two,
                Class::One,
                Class::Two,
                Class::One,
            ],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)],
        )
        .unwrap();
        let out = kuo_condensation_check(&g, 0, 2, 1, 4).unwrap();
        assert!(out.counts.iter().all(Count::is_zero));
        assert!(out.holds);
    }
}
