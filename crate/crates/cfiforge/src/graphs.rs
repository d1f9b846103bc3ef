//! Base graphs for the CFI construction: hypercubes, paths, cycles, cycle spaces
//! and automorphism actions on edges.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{cap_error, Error, Result};
use crate::f2::{BitVec, F2Subspace, Labels};
use crate::perm::Perm;

/// A connected simple undirected graph with canonically ordered vertices and edges.
///
/// Vertices are sorted by name. An edge is labelled `"u-v"` with `u < v`, and edges
/// are sorted by label.
#[derive(Clone, Debug)]
pub struct BaseGraph {
    vertices: Vec<String>,
    vindex: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    edge_labels: Labels,
    eindex: HashMap<(usize, usize), usize>,
    incident: Vec<Vec<usize>>,
    hypercube_dim: Option<usize>,
}

/// JSON form `{vertices:[id], edges:[[id,id]]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl BaseGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String)>) -> Result<BaseGraph> {
        let mut vertices = vertices;
        vertices.sort();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Structure("duplicate vertex".into()));
        }
        if vertices.is_empty() {
            return Err(Error::Structure("graph has no vertices".into()));
        }
        if vertices.iter().any(|v| v.contains('-')) {
            return Err(Error::Structure("vertex names may not contain '-'".into()));
        }
        let vindex: HashMap<String, usize> = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in &edges {
            let ia = *vindex.get(a).ok_or_else(|| Error::Structure(format!("unknown vertex {a:?}")))?;
            let ib = *vindex.get(b).ok_or_else(|| Error::Structure(format!("unknown vertex {b:?}")))?;
            if ia == ib {
                return Err(Error::Structure(format!("self-loop at {a:?}")));
            }
            pairs.push((ia.min(ib), ia.max(ib)));
        }
        let mut labelled: Vec<(String, (usize, usize))> =
            pairs.into_iter().map(|(a, b)| (format!("{}-{}", vertices[a], vertices[b]), (a, b))).collect();
        labelled.sort();
        if labelled.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Structure("multi-edge".into()));
        }
        let edges: Vec<(usize, usize)> = labelled.iter().map(|(_, e)| *e).collect();
        let edge_labels: Labels = labelled.into_iter().map(|(l, _)| l).collect::<Vec<_>>().into();
        let eindex = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut incident = vec![Vec::new(); vertices.len()];
        for (i, &(a, b)) in edges.iter().enumerate() {
            incident[a].push(i);
            incident[b].push(i);
        }
        let g = BaseGraph { vertices, vindex, edges, edge_labels, eindex, incident, hypercube_dim: None };
        if !g.is_connected() {
            return Err(Error::Structure("graph is not connected".into()));
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.incident[v] {
                let w = self.other_end(e, v);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn from_json(j: &GraphJson) -> Result<BaseGraph> {
        Self::new(j.vertices.clone(), j.edges.iter().map(|[a, b]| (a.clone(), b.clone())).collect())
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|&(a, b)| [self.vertices[a].clone(), self.vertices[b].clone()]).collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for v in &self.vertices {
            let _ = writeln!(s, "  \"{v}\";");
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(s, "  \"{}\" -- \"{}\";", self.vertices[a], self.vertices[b]);
        }
        s.push_str("}\n");
        s
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vindex.get(name).copied()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_labels(&self) -> &Labels {
        &self.edge_labels
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.eindex.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn edge_by_label(&self, label: &str) -> Option<usize> {
        self.edge_labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    /// Incident edges of `v`, in increasing edge order.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Dimension `n` when the graph was built by [`BaseGraph::hypercube`].
    pub fn hypercube_dim(&self) -> Option<usize> {
        self.hypercube_dim
    }

    /// The `n`-cube on fixed-width binary strings. Position 1 is the leftmost character.
    pub fn hypercube(n: usize) -> Result<BaseGraph> {
        if !(1..=16).contains(&n) {
            return Err(Error::Parameter(format!("hypercube dimension must be in 1..=16, got {n}")));
        }
        let name = |v: usize| format!("{v:0n$b}");
        let vertices: Vec<String> = (0..1usize << n).map(name).collect();
        let mut edges = Vec::new();
        for v in 0..1usize << n {
            for bit in 0..n {
                if v >> bit & 1 == 0 {
                    edges.push((name(v), name(v | 1 << bit)));
                }
            }
        }
        let mut g = Self::new(vertices, edges)?;
        g.hypercube_dim = Some(n);
        Ok(g)
    }

    /// A path with `m` edges.
    pub fn path(m: usize) -> Result<BaseGraph> {
        if m == 0 {
            return Err(Error::Parameter("path needs at least one edge".into()));
        }
        let w = (m + 1).to_string().len();
        let name = |i: usize| format!("v{i:0w$}");
        Self::new((0..=m).map(name).collect(), (0..m).map(|i| (name(i), name(i + 1))).collect())
    }

    /// A cycle with `m ≥ 3` edges.
    pub fn cycle(m: usize) -> Result<BaseGraph> {
        if m < 3 {
            return Err(Error::Parameter("cycle needs at least three edges".into()));
        }
        let w = m.to_string().len();
        let name = |i: usize| format!("v{i:0w$}");
        Self::new((0..m).map(name).collect(), (0..m).map(|i| (name(i), name((i + 1) % m))).collect())
    }

    /// Parses a base specification such as `hypercube:3`, `path:6` or `cycle:6`.
    pub fn from_spec(spec: &str) -> Result<BaseGraph> {
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("base spec {spec:?} must look like kind:n")))?;
        let n: usize = arg.parse().map_err(|_| Error::Parameter(format!("bad size in {spec:?}")))?;
        match kind {
            "hypercube" => Self::hypercube(n),
            "path" => Self::path(n),
            "cycle" => Self::cycle(n),
            _ => Err(Error::Parameter(format!("unknown base kind {kind:?}"))),
        }
    }

    /// Characteristic vector of a set of edges.
    pub fn edge_set(&self, edges: impl IntoIterator<Item = usize>) -> BitVec {
        BitVec::from_indices(self.num_edges(), edges)
    }

    /// Cycle space, spanned by the fundamental cycles of a breadth-first spanning tree.
    pub fn cycle_space(&self) -> F2Subspace {
        let nv = self.num_vertices();
        let mut parent_edge = vec![usize::MAX; nv];
        let mut depth = vec![usize::MAX; nv];
        let mut tree = vec![false; self.num_edges()];
        depth[0] = 0;
        let mut q = VecDeque::from([0usize]);
        while let Some(v) = q.pop_front() {
            for &e in &self.incident[v] {
                let w = self.other_end(e, v);
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent_edge[w] = e;
                    tree[e] = true;
                    q.push_back(w);
                }
            }
        }
        let mut basis = Vec::new();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if tree[e] {
                continue;
            }
            let mut c = BitVec::unit(self.num_edges(), e);
            let (mut x, mut y) = (a, b);
            while x != y {
                if depth[x] >= depth[y] {
                    let pe = parent_edge[x];
                    c.flip(pe);
                    x = self.other_end(pe, x);
                } else {
                    let pe = parent_edge[y];
                    c.flip(pe);
                    y = self.other_end(pe, y);
                }
            }
            basis.push(c);
        }
        F2Subspace::span_bits(self.edge_labels.clone(), basis)
    }

    /// Vertices of odd degree in the subgraph with edge set `f`.
    pub fn odd_vertices(&self, f: &BitVec) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&v| self.incident[v].iter().filter(|&&e| f.get(e)).count() % 2 == 1)
            .collect()
    }
}

/// A permutation of the vertices of a base graph.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BasePerm(pub Perm);

impl BasePerm {
    pub fn identity(g: &BaseGraph) -> BasePerm {
        BasePerm(Perm::identity(g.num_vertices()))
    }

    pub fn perm(&self) -> &Perm {
        &self.0
    }

    pub fn apply(&self, v: usize) -> usize {
        self.0.apply(v)
    }

    pub fn compose(&self, other: &BasePerm) -> BasePerm {
        BasePerm(self.0.compose(&other.0))
    }

    pub fn is_automorphism(&self, g: &BaseGraph) -> bool {
        self.0.degree() == g.num_vertices()
            && g.edges().iter().all(|&(a, b)| g.edge_index(self.apply(a), self.apply(b)).is_some())
    }

    /// Image of edge `e`.
    pub fn edge_action(&self, g: &BaseGraph, e: usize) -> Result<usize> {
        let (a, b) = g.edges()[e];
        g.edge_index(self.apply(a), self.apply(b))
            .ok_or_else(|| Error::Validation(format!("permutation does not map edge {} to an edge", g.edge_labels()[e])))
    }

    /// The induced permutation of `E`, as an image table.
    pub fn induced_edge_perm(&self, g: &BaseGraph) -> Result<Vec<usize>> {
        if self.0.degree() != g.num_vertices() {
            return Err(Error::Validation("permutation degree differs from vertex count".into()));
        }
        (0..g.num_edges()).map(|e| self.edge_action(g, e)).collect()
    }
}

impl BaseGraph {
    /// All automorphisms by backtracking over vertex images, pruned by degree and
    /// adjacency to already-mapped vertices. Errors if more than `cap` exist.
    pub fn automorphisms(&self, cap: usize) -> Result<Vec<BasePerm>> {
        let n = self.num_vertices();
        let adj = |a: usize, b: usize| self.edge_index(a, b).is_some();
        let mut img = vec![usize::MAX; n];
        let mut used = vec![false; n];
        let mut out = Vec::new();
        fn rec(
            g: &BaseGraph,
            v: usize,
            img: &mut [usize],
            used: &mut [bool],
            out: &mut Vec<BasePerm>,
            cap: usize,
            adj: &dyn Fn(usize, usize) -> bool,
        ) -> Result<()> {
            let n = img.len();
            if v == n {
                if out.len() >= cap {
                    return Err(cap_error("base graph automorphisms", cap, out.len()));
                }
                let p = Perm::from_usize(img).expect("images form a bijection");
                out.push(BasePerm(p));
                return Ok(());
            }
            for w in 0..n {
                if used[w] || g.degree(w) != g.degree(v) {
                    continue;
                }
                if (0..v).any(|u| adj(u, v) != adj(img[u], w)) {
                    continue;
                }
                img[v] = w;
                used[w] = true;
                rec(g, v + 1, img, used, out, cap, adj)?;
                used[w] = false;
            }
            Ok(())
        }
        rec(self, 0, &mut img, &mut used, &mut out, cap, &adj)?;
        Ok(out)
    }
}

/// Vertex permutation of the `n`-cube induced by a position permutation `σ` of `0..n`,
/// acting by `σ(v)_j = v_{σ⁻¹(j)}` with positions counted from the left.
pub fn position_perm_on_hypercube(n: usize, sigma: &Perm) -> BasePerm {
    let images = (0..1usize << n)
        .map(|v| {
            let mut w = 0usize;
            for i in 0..n {
                // position i (from the left) is bit n-1-i
                if v >> (n - 1 - i) & 1 == 1 {
                    let j = sigma.apply(i);
                    w |= 1 << (n - 1 - j);
                }
            }
            w as u32
        })
        .collect();
    BasePerm(Perm::from_images(images).expect("position permutations are bijections"))
}

/// Translation of the `n`-cube flipping the given 0-based position.
pub fn bitflip_on_hypercube(n: usize, pos: usize) -> BasePerm {
    let images = (0..1u32 << n).map(|v| v ^ (1 << (n - 1 - pos))).collect();
    BasePerm(Perm::from_images(images).expect("translations are bijections"))
}

/// Generators of `Sym(n)` acting on positions, optionally with the bit flips.
pub fn hypercube_symmetry_generators(n: usize, with_flips: bool) -> Result<Vec<BasePerm>> {
    if !(1..=16).contains(&n) {
        return Err(Error::Parameter(format!("hypercube dimension must be in 1..=16, got {n}")));
    }
    let mut gens: Vec<BasePerm> =
        (0..n.saturating_sub(1)).map(|i| position_perm_on_hypercube(n, &Perm::transposition(n, i, i + 1))).collect();
    if with_flips {
        gens.extend((0..n).map(|i| bitflip_on_hypercube(n, i)));
    }
    Ok(gens)
}
