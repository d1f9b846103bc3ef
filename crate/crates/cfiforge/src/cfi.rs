//! CFI gadget graphs over a base graph, edge flips, base permutations, the CFI
//! query and a brute-force isomorphism search for small instances.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::f2::{BitVec, F2Matrix, F2Subspace};
use crate::graphs::{BaseGraph, BasePerm};

/// Largest base-graph degree accepted by [`build_cfi`].
pub const MAX_DEGREE: usize = 20;

/// A node of the full CFI graph: an edge atom `e_bit`, or a gadget node `v^X` where
/// bit `j` of `mask` says whether the `j`-th incident edge of `v` lies in `X`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CfiNode {
    Atom { edge: usize, bit: u8 },
    Gadget { vertex: usize, mask: u32 },
}

/// The gadget graph `𝔊^S`.
#[derive(Clone, Debug)]
pub struct CfiStructure {
    base: Arc<BaseGraph>,
    odd: Vec<bool>,
    nodes: Vec<CfiNode>,
    index: HashMap<CfiNode, usize>,
}

/// Builds `𝔊^S` for the odd set `odd` (vertex indices).
pub fn build_cfi(base: Arc<BaseGraph>, odd: &[usize]) -> Result<CfiStructure> {
    let nv = base.num_vertices();
    let mut odd_flags = vec![false; nv];
    for &v in odd {
        if v >= nv {
            return Err(Error::Validation(format!("odd vertex {v} is not a vertex of the base graph")));
        }
        odd_flags[v] = !odd_flags[v];
    }
    if let Some(v) = (0..nv).find(|&v| base.degree(v) > MAX_DEGREE) {
        return Err(Error::Parameter(format!(
            "vertex {} has degree {} above the supported maximum {MAX_DEGREE}",
            base.vertices()[v],
            base.degree(v)
        )));
    }
    let mut nodes = Vec::new();
    for e in 0..base.num_edges() {
        nodes.push(CfiNode::Atom { edge: e, bit: 0 });
        nodes.push(CfiNode::Atom { edge: e, bit: 1 });
    }
    for v in 0..nv {
        let d = base.degree(v);
        for mask in 0u32..1 << d {
            if (mask.count_ones() % 2 == 1) == odd_flags[v] {
                nodes.push(CfiNode::Gadget { vertex: v, mask });
            }
        }
    }
    let index = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    Ok(CfiStructure { base, odd: odd_flags, nodes, index })
}

/// Builds `𝔊^S` from vertex names.
pub fn build_cfi_named(base: Arc<BaseGraph>, odd: &[&str]) -> Result<CfiStructure> {
    let idx = odd
        .iter()
        .map(|s| base.vertex_index(s).ok_or_else(|| Error::Validation(format!("unknown vertex {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    build_cfi(base, &idx)
}

impl CfiStructure {
    pub fn base(&self) -> &Arc<BaseGraph> {
        &self.base
    }

    pub fn nodes(&self) -> &[CfiNode] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, n: &CfiNode) -> bool {
        self.index.contains_key(n)
    }

    pub fn is_odd(&self, v: usize) -> bool {
        self.odd[v]
    }

    /// Odd vertex indices in increasing order.
    pub fn odd_set(&self) -> Vec<usize> {
        (0..self.odd.len()).filter(|&v| self.odd[v]).collect()
    }

    /// Neighbours of a node within `𝔊^S`.
    pub fn neighbors(&self, n: &CfiNode) -> Vec<CfiNode> {
        let g = &self.base;
        match *n {
            CfiNode::Atom { edge, bit } => {
                let mut out = vec![CfiNode::Atom { edge, bit: 1 - bit }];
                let (a, b) = g.edges()[edge];
                for v in [a, b] {
                    let j = g.incident(v).iter().position(|&f| f == edge).unwrap();
                    for mask in 0u32..1 << g.degree(v) {
                        let node = CfiNode::Gadget { vertex: v, mask };
                        if (mask >> j & 1) as u8 == bit && self.contains(&node) {
                            out.push(node);
                        }
                    }
                }
                out
            }
            CfiNode::Gadget { vertex, mask } => g
                .incident(vertex)
                .iter()
                .enumerate()
                .map(|(j, &e)| CfiNode::Atom { edge: e, bit: (mask >> j & 1) as u8 })
                .collect(),
        }
    }

    /// All adjacencies as pairs of node indices `(i, j)` with `i < j`.
    pub fn adjacency(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            for m in self.neighbors(n) {
                let j = self.index[&m];
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Node label used in exports: `e_0` atoms as `edge:bit`, gadgets as `vertex^{edges}`.
    pub fn node_label(&self, n: &CfiNode) -> String {
        let g = &self.base;
        match *n {
            CfiNode::Atom { edge, bit } => format!("{}:{bit}", g.edge_labels()[edge]),
            CfiNode::Gadget { vertex, mask } => {
                let x: Vec<&str> = g
                    .incident(vertex)
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask >> j & 1 == 1)
                    .map(|(_, &e)| g.edge_labels()[e].as_str())
                    .collect();
                format!("{}^{{{}}}", g.vertices()[vertex], x.join(","))
            }
        }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph CFI {\n");
        for n in &self.nodes {
            let shape = if matches!(n, CfiNode::Atom { .. }) { "box" } else { "ellipse" };
            let _ = writeln!(s, "  \"{}\" [shape={shape}];", self.node_label(n));
        }
        for (i, j) in self.adjacency() {
            let _ = writeln!(s, "  \"{}\" -- \"{}\";", self.node_label(&self.nodes[i]), self.node_label(&self.nodes[j]));
        }
        s.push_str("}\n");
        s
    }

    /// Image of the whole structure under `ρ_F`: same base, odd set `S △ T_F`.
    pub fn apply_flip_structure(&self, f: &BitVec) -> Result<CfiStructure> {
        let t = self.base.odd_vertices(f);
        let mut odd = self.odd.clone();
        for v in t {
            odd[v] = !odd[v];
        }
        let odd: Vec<usize> = (0..odd.len()).filter(|&v| odd[v]).collect();
        build_cfi(self.base.clone(), &odd)
    }
}

/// Number of nodes forced by the definition: `2|E| + Σ_v 2^{deg(v)-1}`.
pub fn expected_node_count(g: &BaseGraph) -> usize {
    2 * g.num_edges() + (0..g.num_vertices()).map(|v| 1usize << (g.degree(v).max(1) - 1)).sum::<usize>()
}

/// Mask of `F ∩ E(v)` in the local incident-edge numbering of `v`.
fn local_mask(g: &BaseGraph, v: usize, f: &BitVec) -> u32 {
    g.incident(v).iter().enumerate().filter(|(_, &e)| f.get(e)).fold(0, |m, (j, _)| m | 1 << j)
}

/// Applies the edge flip `ρ_F` to a node of the full CFI graph.
pub fn apply_flip(g: &BaseGraph, f: &BitVec, n: &CfiNode) -> CfiNode {
    match *n {
        CfiNode::Atom { edge, bit } => CfiNode::Atom { edge, bit: bit ^ f.get(edge) as u8 },
        CfiNode::Gadget { vertex, mask } => CfiNode::Gadget { vertex, mask: mask ^ local_mask(g, vertex, f) },
    }
}

/// A base automorphism with its edge permutation and local incident-edge maps, ready
/// to act on CFI nodes.
#[derive(Clone, Debug)]
pub struct BaseAction {
    perm: BasePerm,
    edge_perm: Vec<usize>,
    /// For each vertex `v` and local index `j`, the local index of `π(e_j)` at `π(v)`.
    local: Vec<Vec<usize>>,
}

impl BaseAction {
    pub fn new(g: &BaseGraph, perm: &BasePerm) -> Result<BaseAction> {
        let edge_perm = perm.induced_edge_perm(g)?;
        let local = (0..g.num_vertices())
            .map(|v| {
                let w = perm.apply(v);
                g.incident(v)
                    .iter()
                    .map(|&e| g.incident(w).iter().position(|&f| f == edge_perm[e]).expect("automorphism"))
                    .collect()
            })
            .collect();
        Ok(BaseAction { perm: perm.clone(), edge_perm, local })
    }

    pub fn perm(&self) -> &BasePerm {
        &self.perm
    }

    pub fn edge_perm(&self) -> &[usize] {
        &self.edge_perm
    }

    /// `(ρ_F, π)` applied to `n`: flip first, then relabel by `π`.
    pub fn apply(&self, g: &BaseGraph, f: &BitVec, n: &CfiNode) -> CfiNode {
        match apply_flip(g, f, n) {
            CfiNode::Atom { edge, bit } => CfiNode::Atom { edge: self.edge_perm[edge], bit },
            CfiNode::Gadget { vertex, mask } => {
                let loc = &self.local[vertex];
                let m = (0..loc.len()).filter(|&j| mask >> j & 1 == 1).fold(0u32, |m, j| m | 1 << loc[j]);
                CfiNode::Gadget { vertex: self.perm.apply(vertex), mask: m }
            }
        }
    }
}

/// Applies `(ρ_F, π)` to a node; `π` must be an automorphism of the base.
pub fn apply_base_perm(g: &BaseGraph, pi: &BasePerm, f: &BitVec, n: &CfiNode) -> Result<CfiNode> {
    Ok(BaseAction::new(g, pi)?.apply(g, f, n))
}

/// Parity of a CFI structure.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Decides the CFI query by solving `Σ_{e∈E(v)} x_e = [v∈S]` over GF(2): the structure is
/// odd exactly when the system has no solution.
pub fn cfi_query(g: &BaseGraph, odd: &[usize]) -> Result<Parity> {
    let nv = g.num_vertices();
    let mut rhs = BitVec::zeros(nv);
    for &v in odd {
        if v >= nv {
            return Err(Error::Validation(format!("odd vertex {v} out of range")));
        }
        rhs.flip(v);
    }
    let rows = (0..nv).map(|v| BitVec::from_indices(g.num_edges(), g.incident(v).iter().copied())).collect();
    let vlabels: Vec<String> = g.vertices().to_vec();
    let a = F2Matrix::from_rows(vlabels.into(), g.edge_labels().clone(), rows)?;
    let parity = if a.solve(&rhs).is_some() { Parity::Even } else { Parity::Odd };
    let expected = if rhs.count_ones() % 2 == 0 { Parity::Even } else { Parity::Odd };
    if parity != expected {
        return Err(Error::Inconsistent("linear system disagrees with |S| mod 2".into()));
    }
    Ok(parity)
}

/// Flips that are automorphisms of every `𝔊^S`: the cycle space of the base.
pub fn cfi_automorphism_flips(g: &BaseGraph) -> F2Subspace {
    g.cycle_space()
}

/// An isomorphism `(ρ_F, π)` from one CFI structure to another.
#[derive(Clone, Debug)]
pub struct CfiIsomorphism {
    pub flip: BitVec,
    pub perm: BasePerm,
}

/// Checks literally that `(ρ_F, π)` maps the node set of `a` onto that of `b` and
/// preserves adjacency.
pub fn verify_isomorphism(a: &CfiStructure, b: &CfiStructure, act: &BaseAction, f: &BitVec) -> bool {
    let g = a.base();
    if a.num_nodes() != b.num_nodes() {
        return false;
    }
    let mut image = HashSet::new();
    for n in a.nodes() {
        let m = act.apply(g, f, n);
        if !b.contains(&m) || !image.insert(m) {
            return false;
        }
    }
    let b_adj: HashSet<(usize, usize)> = b.adjacency().into_iter().collect();
    a.adjacency().into_iter().all(|(i, j)| {
        let x = b.index[&act.apply(g, f, &a.nodes[i])];
        let y = b.index[&act.apply(g, f, &a.nodes[j])];
        b_adj.contains(&(x.min(y), x.max(y)))
    })
}

/// Searches for an isomorphism `(ρ_F, π)` from `a` to `b` with `π` ranging over
/// `base_group` (which must consist of automorphisms of the common base).
///
/// For each `π` the flip set is chosen edge by edge; a vertex is checked as soon as all
/// of its incident edges are decided. Every witness is verified literally.
pub fn find_isomorphism(a: &CfiStructure, b: &CfiStructure, base_group: &[BasePerm]) -> Result<Option<CfiIsomorphism>> {
    let g = a.base().clone();
    if g.edge_labels() != b.base().edge_labels() || g.vertices() != b.base().vertices() {
        return Err(Error::Structure("structures have different bases".into()));
    }
    let m = g.num_edges();
    // last_edge[v] = position in edge order at which v's incident edges are all decided
    let last_edge: Vec<usize> = (0..g.num_vertices()).map(|v| *g.incident(v).iter().max().unwrap_or(&0)).collect();
    let mut completes: Vec<Vec<usize>> = vec![Vec::new(); m.max(1)];
    for (v, &e) in last_edge.iter().enumerate() {
        completes[e].push(v);
    }
    for pi in base_group {
        let act = BaseAction::new(&g, pi)?;
        let mut f = BitVec::zeros(m);
        if search(&g, a, b, &act, &completes, 0, &mut f) {
            return Ok(Some(CfiIsomorphism { flip: f, perm: pi.clone() }));
        }
    }
    Ok(None)
}

fn search(
    g: &BaseGraph,
    a: &CfiStructure,
    b: &CfiStructure,
    act: &BaseAction,
    completes: &[Vec<usize>],
    e: usize,
    f: &mut BitVec,
) -> bool {
    if e == g.num_edges() {
        return verify_isomorphism(a, b, act, f);
    }
    for bit in [false, true] {
        f.set(e, bit);
        let ok = completes[e].iter().all(|&v| gadget_maps_onto(g, a, b, act, f, v));
        if ok && search(g, a, b, act, completes, e + 1, f) {
            return true;
        }
    }
    f.set(e, false);
    false
}

/// Whether the gadget `v*` of `a` is mapped onto the gadget `π(v)*` of `b`.
fn gadget_maps_onto(g: &BaseGraph, a: &CfiStructure, b: &CfiStructure, act: &BaseAction, f: &BitVec, v: usize) -> bool {
    let d = g.degree(v);
    (0u32..1 << d)
        .map(|mask| CfiNode::Gadget { vertex: v, mask })
        .filter(|n| a.contains(n))
        .all(|n| b.contains(&act.apply(g, f, &n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::position_perm_on_hypercube;
    use crate::perm::Perm;

    fn single_edge() -> Arc<BaseGraph> {
        Arc::new(BaseGraph::new(vec!["u".into(), "v".into()], vec![("u".into(), "v".into())]).unwrap())
    }

    #[test]
    fn single_edge_structure() {
        let c = build_cfi(single_edge(), &[]).unwrap();
        assert_eq!(c.num_nodes(), 4);
        assert!(c.contains(&CfiNode::Gadget { vertex: 0, mask: 0 }));
        assert!(c.contains(&CfiNode::Gadget { vertex: 1, mask: 0 }));
    }

    #[test]
    fn degree_three_gadget() {
        // Star with centre v and leaves a, b, c: v* has the four even subsets.
        let g = Arc::new(
            BaseGraph::new(
                vec!["a".into(), "b".into(), "c".into(), "v".into()],
                vec![("a".into(), "v".into()), ("b".into(), "v".into()), ("c".into(), "v".into())],
            )
            .unwrap(),
        );
        let c = build_cfi(g.clone(), &[]).unwrap();
        let v = g.vertex_index("v").unwrap();
        let gadget: Vec<_> =
            c.nodes().iter().filter(|n| matches!(n, CfiNode::Gadget { vertex, .. } if *vertex == v)).collect();
        assert_eq!(gadget.len(), 4);
        let e = g.edge_by_label("a-v").unwrap();
        let v_empty = CfiNode::Gadget { vertex: v, mask: 0 };
        assert!(c.neighbors(&v_empty).contains(&CfiNode::Atom { edge: e, bit: 0 }));
        let v_ab = CfiNode::Gadget { vertex: v, mask: 0b011 };
        assert!(c.neighbors(&v_ab).contains(&CfiNode::Atom { edge: e, bit: 1 }));
    }

    #[test]
    fn hypercube_three_counts() {
        let g = Arc::new(BaseGraph::hypercube(3).unwrap());
        for s in [vec![], vec![0], vec![0, 7], vec![1, 2, 3]] {
            let c = build_cfi(g.clone(), &s).unwrap();
            assert_eq!(c.num_nodes(), 56);
            assert_eq!(expected_node_count(&g), 56);
        }
        assert!(build_cfi(g, &[8]).is_err());
    }

    #[test]
    fn flip_examples() {
        let g = BaseGraph::hypercube(2).unwrap();
        let e = 0;
        let f = g.edge_set([e]);
        assert_eq!(apply_flip(&g, &f, &CfiNode::Atom { edge: e, bit: 0 }), CfiNode::Atom { edge: e, bit: 1 });
        let (v, _) = g.edges()[e];
        let j = g.incident(v).iter().position(|&x| x == e).unwrap();
        assert_eq!(
            apply_flip(&g, &f, &CfiNode::Gadget { vertex: v, mask: 0 }),
            CfiNode::Gadget { vertex: v, mask: 1 << j }
        );
        let gg = Arc::new(g);
        let s = build_cfi(gg.clone(), &[0]).unwrap();
        let cyc = gg.cycle_space().basis()[0].clone();
        let image = s.apply_flip_structure(&cyc).unwrap();
        assert_eq!(image.odd_set(), s.odd_set());
    }

    #[test]
    fn base_perm_examples() {
        let g = BaseGraph::hypercube(2).unwrap();
        let zero = BitVec::zeros(4);
        let id = BasePerm::identity(&g);
        let n = CfiNode::Gadget { vertex: 1, mask: 1 };
        assert_eq!(apply_base_perm(&g, &id, &zero, &n).unwrap(), n);
        let swap = position_perm_on_hypercube(2, &Perm::transposition(2, 0, 1));
        let e = g.edge_by_label("00-01").unwrap();
        let f = g.edge_by_label("00-10").unwrap();
        assert_eq!(
            apply_base_perm(&g, &swap, &zero, &CfiNode::Atom { edge: e, bit: 0 }).unwrap(),
            CfiNode::Atom { edge: f, bit: 0 }
        );
        let fl = g.edge_set([e]);
        assert_eq!(
            apply_base_perm(&g, &id, &fl, &CfiNode::Atom { edge: e, bit: 1 }).unwrap(),
            CfiNode::Atom { edge: e, bit: 0 }
        );
    }

    #[test]
    fn query_examples() {
        let g2 = BaseGraph::hypercube(2).unwrap();
        assert_eq!(cfi_query(&g2, &[]).unwrap(), Parity::Even);
        assert_eq!(cfi_query(&g2, &[0]).unwrap(), Parity::Odd);
        let g3 = BaseGraph::hypercube(3).unwrap();
        assert_eq!(cfi_query(&g3, &[0, 7]).unwrap(), Parity::Even);
        assert_eq!(cfi_automorphism_flips(&g2).dim(), 1);
        assert_eq!(cfi_automorphism_flips(&g3).dim(), 5);
        assert_eq!(cfi_automorphism_flips(&BaseGraph::path(4).unwrap()).dim(), 0);
    }

    #[test]
    fn isomorphism_search_on_square() {
        let g = Arc::new(BaseGraph::hypercube(2).unwrap());
        let id = vec![BasePerm::identity(&g)];
        let a = build_cfi(g.clone(), &[0]).unwrap();
        let b = build_cfi(g.clone(), &[3]).unwrap();
        let c = build_cfi(g.clone(), &[]).unwrap();
        assert!(find_isomorphism(&a, &b, &id).unwrap().is_some());
        assert!(find_isomorphism(&a, &c, &id).unwrap().is_none());
    }
}
