//! Hash-consed hereditarily finite sets over edge atoms, with edge-flip and base
//! permutation actions, supports, orbits, components and CFI-symmetry checks.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde_json::{json, Value};

use crate::cfi::CfiStructure;
use crate::error::{cap_error, Error, Result};
use crate::f2::{BitVec, F2Subspace, Labels};
use crate::graphs::{BaseGraph, BasePerm};

/// Default cap on the support size for flip enumeration.
pub const DEFAULT_SUPPORT_CAP: usize = 20;

/// Identifier of a hash-consed hereditarily finite set. Structurally equal sets share
/// one identifier for the lifetime of the process.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hf(u32);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Node {
    Atom(u32, u8),
    Set(Arc<[Hf]>),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    heights: Vec<u32>,
    lookup: HashMap<Node, Hf>,
    labels: Vec<Arc<str>>,
    label_ids: HashMap<Arc<str>, u32>,
}

fn arena() -> &'static RwLock<Arena> {
    static ARENA: OnceLock<RwLock<Arena>> = OnceLock::new();
    ARENA.get_or_init(|| RwLock::new(Arena::default()))
}

fn intern(node: Node, height: u32) -> Hf {
    if let Some(&h) = arena().read().unwrap().lookup.get(&node) {
        return h;
    }
    let mut a = arena().write().unwrap();
    if let Some(&h) = a.lookup.get(&node) {
        return h;
    }
    let id = Hf(a.nodes.len() as u32);
    a.nodes.push(node.clone());
    a.heights.push(height);
    a.lookup.insert(node, id);
    id
}

fn label_id(label: &str) -> u32 {
    if let Some(&i) = arena().read().unwrap().label_ids.get(label) {
        return i;
    }
    let mut a = arena().write().unwrap();
    if let Some(&i) = a.label_ids.get(label) {
        return i;
    }
    let i = a.labels.len() as u32;
    let l: Arc<str> = label.into();
    a.labels.push(l.clone());
    a.label_ids.insert(l, i);
    i
}

/// A view of one node of the arena.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HfKind {
    Atom { label: Arc<str>, bit: u8 },
    Set(Arc<[Hf]>),
}

impl Hf {
    /// The atom `label_bit`.
    pub fn atom(label: &str, bit: u8) -> Hf {
        assert!(bit <= 1, "atom bit must be 0 or 1");
        intern(Node::Atom(label_id(label), bit), 0)
    }

    /// The set of the given elements (order and repetition are irrelevant).
    pub fn set<I: IntoIterator<Item = Hf>>(elems: I) -> Hf {
        let mut v: Vec<Hf> = elems.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        let height = {
            let a = arena().read().unwrap();
            v.iter().map(|c| a.heights[c.0 as usize] + 1).max().unwrap_or(1)
        };
        intern(Node::Set(v.into()), height)
    }

    pub fn empty() -> Hf {
        Hf::set([])
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn kind(self) -> HfKind {
        let a = arena().read().unwrap();
        match &a.nodes[self.0 as usize] {
            Node::Atom(l, b) => HfKind::Atom { label: a.labels[*l as usize].clone(), bit: *b },
            Node::Set(c) => HfKind::Set(c.clone()),
        }
    }

    pub fn is_atom(self) -> bool {
        matches!(arena().read().unwrap().nodes[self.0 as usize], Node::Atom(..))
    }

    /// Elements of a set; empty for atoms.
    pub fn children(self) -> Arc<[Hf]> {
        match &arena().read().unwrap().nodes[self.0 as usize] {
            Node::Set(c) => c.clone(),
            Node::Atom(..) => Arc::from(Vec::new()),
        }
    }

    /// Atoms have height 0; the empty set has height 1.
    pub fn height(self) -> u32 {
        arena().read().unwrap().heights[self.0 as usize]
    }

    /// `(label, bit)` for atoms.
    pub fn as_atom(self) -> Option<(Arc<str>, u8)> {
        match self.kind() {
            HfKind::Atom { label, bit } => Some((label, bit)),
            HfKind::Set(_) => None,
        }
    }

    /// JSON form: atoms as `{"atom":["e",0]}`, sets as `{"set":[...]}`.
    pub fn to_json(self) -> Value {
        let mut memo: HashMap<Hf, Value> = HashMap::new();
        for y in tc(self) {
            let v = match y.kind() {
                HfKind::Atom { label, bit } => json!({ "atom": [label.as_ref(), bit] }),
                HfKind::Set(c) => json!({ "set": c.iter().map(|z| memo[z].clone()).collect::<Vec<_>>() }),
            };
            memo.insert(y, v);
        }
        memo.remove(&self).unwrap()
    }

    pub fn from_json(v: &Value) -> Result<Hf> {
        let obj = v.as_object().ok_or_else(|| Error::Structure("expected an object".into()))?;
        if let Some(a) = obj.get("atom") {
            let arr = a.as_array().filter(|a| a.len() == 2).ok_or_else(|| Error::Structure("atom must be [label, bit]".into()))?;
            let label = arr[0].as_str().ok_or_else(|| Error::Structure("atom label must be a string".into()))?;
            let bit = arr[1].as_u64().filter(|&b| b <= 1).ok_or_else(|| Error::Structure("atom bit must be 0 or 1".into()))?;
            Ok(Hf::atom(label, bit as u8))
        } else if let Some(s) = obj.get("set") {
            let arr = s.as_array().ok_or_else(|| Error::Structure("set must be an array".into()))?;
            Ok(Hf::set(arr.iter().map(Hf::from_json).collect::<Result<Vec<_>>>()?))
        } else {
            Err(Error::Structure("expected \"atom\" or \"set\"".into()))
        }
    }
}

impl fmt::Debug for Hf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            HfKind::Atom { label, bit } => write!(f, "{label}_{bit}"),
            HfKind::Set(c) => {
                f.write_str("{")?;
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x:?}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Transitive closure `tc(x)` including `x`, in post-order (elements before sets).
pub fn tc(x: Hf) -> Vec<Hf> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut stack = vec![(x, false)];
    while let Some((y, expanded)) = stack.pop() {
        if expanded {
            out.push(y);
            continue;
        }
        if !seen.insert(y) {
            continue;
        }
        stack.push((y, true));
        for &c in y.children().iter().rev() {
            if !seen.contains(&c) {
                stack.push((c, false));
            }
        }
    }
    out
}

/// Deterministic structural order on the nodes reachable from `roots`, independent of
/// arena identifiers: by height, then atoms by `(label, bit)`, sets by the sorted ranks
/// of their elements.
#[derive(Clone, Debug)]
pub struct CanonicalOrder {
    rank: HashMap<Hf, usize>,
    order: Vec<Hf>,
}

impl CanonicalOrder {
    pub fn new(roots: &[Hf]) -> CanonicalOrder {
        let mut all = HashSet::new();
        for &r in roots {
            all.extend(tc(r));
        }
        let mut by_height: BTreeMap<u32, Vec<Hf>> = BTreeMap::new();
        for x in all {
            by_height.entry(x.height()).or_default().push(x);
        }
        #[derive(PartialEq, Eq, PartialOrd, Ord)]
        enum Key {
            Atom(Arc<str>, u8),
            Set(Vec<usize>),
        }
        let mut rank = HashMap::new();
        let mut order = Vec::new();
        for (_, xs) in by_height {
            let mut keyed: Vec<(Key, Hf)> = xs
                .into_iter()
                .map(|x| {
                    let k = match x.kind() {
                        HfKind::Atom { label, bit } => Key::Atom(label, bit),
                        HfKind::Set(c) => {
                            let mut r: Vec<usize> = c.iter().map(|y| rank[y]).collect();
                            r.sort_unstable();
                            Key::Set(r)
                        }
                    };
                    (k, x)
                })
                .collect();
            keyed.sort_by(|a, b| a.0.cmp(&b.0));
            for (_, x) in keyed {
                rank.insert(x, order.len());
                order.push(x);
            }
        }
        CanonicalOrder { rank, order }
    }

    pub fn rank(&self, x: Hf) -> usize {
        self.rank[&x]
    }

    pub fn order(&self) -> &[Hf] {
        &self.order
    }

    pub fn sort(&self, xs: &mut [Hf]) {
        xs.sort_by_key(|x| self.rank[x]);
    }
}

/// The edge universe `E` that atoms refer to, optionally backed by a base graph.
#[derive(Clone, Debug)]
pub struct EdgeSpace {
    labels: Labels,
    by_label: HashMap<String, usize>,
    graph: Option<Arc<BaseGraph>>,
}

impl EdgeSpace {
    pub fn from_graph(g: Arc<BaseGraph>) -> EdgeSpace {
        let labels = g.edge_labels().clone();
        let by_label = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        EdgeSpace { labels, by_label, graph: Some(g) }
    }

    /// An edge universe without a graph; cycle-space notions are unavailable.
    pub fn free(labels: Labels) -> EdgeSpace {
        let by_label = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        EdgeSpace { labels, by_label, graph: None }
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn graph(&self) -> Option<&Arc<BaseGraph>> {
        self.graph.as_ref()
    }

    pub fn edge(&self, label: &str) -> Result<usize> {
        self.by_label.get(label).copied().ok_or_else(|| Error::Structure(format!("unknown edge label {label:?}")))
    }

    pub fn atom(&self, e: usize, bit: u8) -> Hf {
        Hf::atom(&self.labels[e], bit)
    }

    /// `(edge, bit)` of an atom; errors if its label is not in this space.
    pub fn atom_edge(&self, x: Hf) -> Result<Option<(usize, u8)>> {
        match x.as_atom() {
            Some((l, b)) => Ok(Some((self.edge(&l)?, b))),
            None => Ok(None),
        }
    }

    pub fn zero(&self) -> BitVec {
        BitVec::zeros(self.len())
    }

    pub fn edge_set(&self, edges: impl IntoIterator<Item = usize>) -> BitVec {
        BitVec::from_indices(self.len(), edges)
    }

    pub fn cycle_space(&self) -> Result<F2Subspace> {
        self.graph
            .as_ref()
            .map(|g| g.cycle_space())
            .ok_or_else(|| Error::Structure("edge space has no base graph".into()))
    }

    pub fn edge_names(&self, set: &BitVec) -> Vec<String> {
        set.iter_ones().map(|e| self.labels[e].clone()).collect()
    }
}

/// Applies a map on atoms recursively over `tc(x)`.
fn map_atoms(x: Hf, mut f: impl FnMut(Hf) -> Result<Hf>) -> Result<Hf> {
    let mut memo: HashMap<Hf, Hf> = HashMap::new();
    for y in tc(x) {
        let img = match y.kind() {
            HfKind::Atom { .. } => f(y)?,
            HfKind::Set(c) => Hf::set(c.iter().map(|z| memo[z])),
        };
        memo.insert(y, img);
    }
    Ok(memo[&x])
}

/// `ρ_F(x)`.
pub fn act_flip(sp: &EdgeSpace, f: &BitVec, x: Hf) -> Result<Hf> {
    map_atoms(x, |a| {
        let (e, b) = sp.atom_edge(a)?.unwrap();
        Ok(sp.atom(e, b ^ f.get(e) as u8))
    })
}

/// Applies an edge permutation (image table) to `x`.
pub fn act_edge_perm(sp: &EdgeSpace, edge_perm: &[usize], x: Hf) -> Result<Hf> {
    map_atoms(x, |a| {
        let (e, b) = sp.atom_edge(a)?.unwrap();
        Ok(sp.atom(edge_perm[e], b))
    })
}

/// Applies `(ρ_F, π)` (flip first) given the edge permutation of `π`.
pub fn act_flip_perm(sp: &EdgeSpace, f: &BitVec, edge_perm: &[usize], x: Hf) -> Result<Hf> {
    map_atoms(x, |a| {
        let (e, b) = sp.atom_edge(a)?.unwrap();
        Ok(sp.atom(edge_perm[e], b ^ f.get(e) as u8))
    })
}

/// `πx` for a base automorphism `π`.
pub fn act_perm(sp: &EdgeSpace, pi: &BasePerm, x: Hf) -> Result<Hf> {
    let g = sp.graph.as_ref().ok_or_else(|| Error::Structure("edge space has no base graph".into()))?;
    let ep = pi.induced_edge_perm(g)?;
    act_edge_perm(sp, &ep, x)
}

/// Edges occurring in atoms of `tc(x)`.
pub fn atom_edges(sp: &EdgeSpace, x: Hf) -> Result<BitVec> {
    let mut s = sp.zero();
    for y in tc(x) {
        if let Some((e, _)) = sp.atom_edge(y)? {
            s.set(e, true);
        }
    }
    Ok(s)
}

/// The unique minimal CFI-support: edges whose single flip moves `x`.
pub fn min_cfi_support(sp: &EdgeSpace, x: Hf) -> Result<BitVec> {
    let cand = atom_edges(sp, x)?;
    let mut sup = sp.zero();
    for e in cand.iter_ones() {
        if act_flip(sp, &sp.edge_set([e]), x)? != x {
            sup.set(e, true);
        }
    }
    Ok(sup)
}

fn subset_flip(sp: &EdgeSpace, idx: &[usize], mask: u64) -> BitVec {
    sp.edge_set(idx.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e))
}

/// `Stab_E(x)`: flips within the support that fix `x`, plus all flips outside it.
pub fn stab_e(sp: &EdgeSpace, x: Hf, cap: usize) -> Result<F2Subspace> {
    let sup = min_cfi_support(sp, x)?;
    let idx: Vec<usize> = sup.iter_ones().collect();
    if idx.len() > cap {
        return Err(cap_error("support size for flip enumeration", cap, idx.len()));
    }
    let mut gens: Vec<BitVec> = (0..sp.len()).filter(|&e| !sup.get(e)).map(|e| BitVec::unit(sp.len(), e)).collect();
    for mask in 1u64..1 << idx.len() {
        let f = subset_flip(sp, &idx, mask);
        if act_flip(sp, &f, x)? == x {
            gens.push(f);
        }
    }
    Ok(F2Subspace::span_bits(sp.labels.clone(), gens))
}

/// `|Orb_E(x)| = 2^{|E| - dim Stab_E(x)}`.
pub fn orb_e_size(sp: &EdgeSpace, x: Hf, cap: usize) -> Result<u64> {
    Ok(1u64 << stab_e(sp, x, cap)?.codim())
}

/// The flip orbit of `x`, by breadth-first search over single flips in its support.
pub fn orbit_e(sp: &EdgeSpace, x: Hf, cap: usize) -> Result<Vec<Hf>> {
    let sup: Vec<usize> = min_cfi_support(sp, x)?.iter_ones().collect();
    if sup.len() > cap {
        return Err(cap_error("support size for flip enumeration", cap, sup.len()));
    }
    let mut seen = HashSet::from([x]);
    let mut out = vec![x];
    let mut i = 0;
    while i < out.len() {
        let y = out[i];
        i += 1;
        for &e in &sup {
            let z = act_flip(sp, &sp.edge_set([e]), y)?;
            if seen.insert(z) {
                out.push(z);
            }
        }
    }
    Ok(out)
}

/// Orbit size under cycle-space flips, `2^{dim cyc − dim(Stab_E(x) ∩ cyc)}`.
pub fn orb_cfi_size(sp: &EdgeSpace, x: Hf, cap: usize) -> Result<u64> {
    let cyc = sp.cycle_space()?;
    if cyc.dim() > 24 {
        return Err(cap_error("cycle space dimension", 24, cyc.dim()));
    }
    let inter = stab_e(sp, x, cap)?.intersect(&cyc)?;
    Ok(1u64 << (cyc.dim() - inter.dim()))
}

/// Groups `items` into flip-orbit classes; classes keep the input order of first members.
fn group_by_flip_orbit(sp: &EdgeSpace, items: &[Hf], cap: usize) -> Result<Vec<Vec<Hf>>> {
    let mut class_of: HashMap<Hf, usize> = HashMap::new();
    let mut classes: Vec<Vec<Hf>> = Vec::new();
    let wanted: HashSet<Hf> = items.iter().copied().collect();
    for &y in items {
        if class_of.contains_key(&y) {
            continue;
        }
        let k = classes.len();
        let mut members = Vec::new();
        for z in orbit_e(sp, y, cap)? {
            if wanted.contains(&z) && !class_of.contains_key(&z) {
                class_of.insert(z, k);
                members.push(z);
            }
        }
        classes.push(members);
    }
    Ok(classes)
}

/// The connected components `C(x)`: `∼_E`-classes among the elements of `x`, each sorted
/// canonically, listed in canonical order of their least member.
pub fn components(sp: &EdgeSpace, x: Hf, cap: usize) -> Result<Vec<Vec<Hf>>> {
    let ch = x.children();
    let order = CanonicalOrder::new(&ch);
    let mut items = ch.to_vec();
    order.sort(&mut items);
    let mut cls = group_by_flip_orbit(sp, &items, cap)?;
    for c in &mut cls {
        order.sort(c);
    }
    Ok(cls)
}

/// `∼_E`-classes of `tc(μ)` in canonical order.
pub fn sim_classes(sp: &EdgeSpace, mu: Hf, cap: usize) -> Result<Vec<Vec<Hf>>> {
    let order = CanonicalOrder::new(&[mu]);
    let mut cls = group_by_flip_orbit(sp, order.order(), cap)?;
    for c in &mut cls {
        order.sort(c);
    }
    Ok(cls)
}

/// Number of components of `y` moved by `ρ_F`; an atom counts as a single component.
fn flipped_component_count(sp: &EdgeSpace, y: Hf, f: &BitVec, cap: usize) -> Result<usize> {
    if let Some((e, _)) = sp.atom_edge(y)? {
        return Ok(f.get(e) as usize);
    }
    let mut n = 0;
    for comp in components(sp, y, cap)? {
        let g = Hf::set(comp);
        if act_flip(sp, f, g)? != g {
            n += 1;
        }
    }
    Ok(n)
}

/// Why a set fails to be CFI-symmetric.
#[derive(Clone, Debug)]
pub struct SymmetryViolation {
    pub set: Hf,
    pub component: Vec<Hf>,
    pub flip: Option<BitVec>,
    pub reason: String,
}

/// Checks the CFI-symmetry definition on every set in `tc(μ)`: each component has flip
/// orbit of size two, and is fixed by a flip iff an even number of components of any
/// of its members is flipped. Returns the first violation found, if any.
pub fn cfi_symmetry_violation(sp: &EdgeSpace, mu: Hf, cap: usize) -> Result<Option<SymmetryViolation>> {
    let order = CanonicalOrder::new(&[mu]);
    for &x in order.order() {
        if x.is_atom() {
            continue;
        }
        for comp in components(sp, x, cap)? {
            let g = Hf::set(comp.iter().copied());
            let orb = orb_e_size(sp, g, cap)?;
            if orb != 2 {
                return Ok(Some(SymmetryViolation {
                    set: x,
                    component: comp,
                    flip: None,
                    reason: format!("component orbit has size {orb}, not 2"),
                }));
            }
            let mut u = min_cfi_support(sp, g)?;
            for &y in &comp {
                u = u.or(&min_cfi_support(sp, y)?);
            }
            let idx: Vec<usize> = u.iter_ones().collect();
            if idx.len() > cap {
                return Err(cap_error("component support size", cap, idx.len()));
            }
            for mask in 0u64..1 << idx.len() {
                let f = subset_flip(sp, &idx, mask);
                let fixed = act_flip(sp, &f, g)? == g;
                for &y in &comp {
                    let c = flipped_component_count(sp, y, &f, cap)?;
                    if fixed != (c % 2 == 0) {
                        return Ok(Some(SymmetryViolation {
                            set: x,
                            component: comp.clone(),
                            flip: Some(f),
                            reason: format!(
                                "component {} by the flip but {c} components of a member are flipped",
                                if fixed { "is fixed" } else { "moves" }
                            ),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

pub fn is_cfi_symmetric(sp: &EdgeSpace, mu: Hf, cap: usize) -> Result<bool> {
    Ok(cfi_symmetry_violation(sp, mu, cap)?.is_none())
}

/// Checks that within every component of every set in `tc(μ)`, all members have the same
/// number of flipped components under every flip inside the component's support.
pub fn check_component_count_consistency(sp: &EdgeSpace, mu: Hf, cap: usize) -> Result<bool> {
    for x in tc(mu) {
        if x.is_atom() {
            continue;
        }
        for comp in components(sp, x, cap)? {
            let mut u = sp.zero();
            for &y in &comp {
                u = u.or(&min_cfi_support(sp, y)?);
            }
            let idx: Vec<usize> = u.iter_ones().collect();
            if idx.len() > cap {
                return Err(cap_error("component support size", cap, idx.len()));
            }
            for mask in 0u64..1 << idx.len() {
                let f = subset_flip(sp, &idx, mask);
                let counts = comp
                    .iter()
                    .map(|&y| flipped_component_count(sp, y, &f, cap).map(|c| c % 2))
                    .collect::<Result<Vec<_>>>()?;
                if counts.windows(2).any(|w| w[0] != w[1]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `maxOrb_E(μ)`.
pub fn max_orb_e(sp: &EdgeSpace, mu: Hf, cap: usize) -> Result<u64> {
    tc(mu).into_iter().map(|y| orb_e_size(sp, y, cap)).try_fold(1, |m, o| o.map(|o| m.max(o)))
}

/// `maxOrb_CFI(μ)`.
pub fn max_orb_cfi(sp: &EdgeSpace, mu: Hf, cap: usize) -> Result<u64> {
    tc(mu).into_iter().map(|y| orb_cfi_size(sp, y, cap)).try_fold(1, |m, o| o.map(|o| m.max(o)))
}

/// The parity-tracking pair `(μ_B, μ̃_B)` over an ordered edge list. The first edge is
/// the seed `(e_0, e_1)`; each further edge `e` wraps the pair as
/// `μ = {{μ, e_0}, {μ̃, e_1}}`, `μ̃ = {{μ, e_1}, {μ̃, e_0}}`.
pub fn parity_set(sp: &EdgeSpace, edges: &[usize]) -> Result<(Hf, Hf)> {
    if edges.is_empty() {
        return Err(Error::Parameter("parity set needs at least one edge".into()));
    }
    let mut seen = HashSet::new();
    for &e in edges {
        if e >= sp.len() {
            return Err(Error::Parameter(format!("edge index {e} out of range")));
        }
        if !seen.insert(e) {
            return Err(Error::Parameter(format!("duplicate edge {}", sp.labels[e])));
        }
    }
    let mut mu = sp.atom(edges[0], 0);
    let mut tilde = sp.atom(edges[0], 1);
    for &e in &edges[1..] {
        let (e0, e1) = (sp.atom(e, 0), sp.atom(e, 1));
        let m = Hf::set([Hf::set([mu, e0]), Hf::set([tilde, e1])]);
        let t = Hf::set([Hf::set([mu, e1]), Hf::set([tilde, e0])]);
        mu = m;
        tilde = t;
    }
    Ok((mu, tilde))
}

/// Support, stabilizer and orbit sizes of one object.
#[derive(Clone, Debug)]
pub struct SupportReport {
    pub object: Hf,
    pub sup_cfi: BitVec,
    pub stab_e: F2Subspace,
    pub orb_e_size: u64,
    pub orb_cfi_size: Option<u64>,
}

impl SupportReport {
    pub fn new(sp: &EdgeSpace, x: Hf, cap: usize) -> Result<SupportReport> {
        let stab = stab_e(sp, x, cap)?;
        let orb_cfi = if sp.graph.is_some() { Some(orb_cfi_size(sp, x, cap)?) } else { None };
        Ok(SupportReport {
            object: x,
            sup_cfi: min_cfi_support(sp, x)?,
            orb_e_size: 1u64 << stab.codim(),
            stab_e: stab,
            orb_cfi_size: orb_cfi,
        })
    }

    pub fn to_json(&self, sp: &EdgeSpace) -> Value {
        json!({
            "object": self.object.to_json(),
            "sup_cfi": sp.edge_names(&self.sup_cfi),
            "stab_e": serde_json::to_value(self.stab_e.to_json()).unwrap(),
            "orb_e_size": self.orb_e_size,
            "orb_cfi_size": self.orb_cfi_size,
        })
    }
}

/// How a smallest automorphism support was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AutSupportMode {
    /// Smallest hitting set found by exhaustive subset enumeration.
    Exhaustive,
    /// Upper bound: one atom per support edge plus a star; not verified minimal.
    Bound,
}

/// A support of `μ` for `Aut(𝔊^S)`, as atoms `(edge, bit)`.
#[derive(Clone, Debug)]
pub struct AutSupport {
    pub atoms: Vec<(usize, u8)>,
    pub mode: AutSupportMode,
}

impl AutSupport {
    pub fn size(&self) -> usize {
        self.atoms.len()
    }
}

/// All automorphisms `(ρ_F, π)` of `𝔊^S` with `π` in `base_group`, as (flip, edge
/// permutation) pairs. `π` contributes iff `π(S △ T_F) = S` for some `F`; the valid `F`
/// form a coset of the cycle space.
pub fn cfi_automorphisms(cfi: &CfiStructure, base_group: &[BasePerm]) -> Result<Vec<(BitVec, Vec<usize>)>> {
    let g = cfi.base();
    let cyc = g.cycle_space();
    if cyc.dim() > 20 {
        return Err(cap_error("cycle space dimension for automorphism enumeration", 20, cyc.dim()));
    }
    let cyc_elems = cyc.elements();
    let nv = g.num_vertices();
    let rows: Vec<BitVec> =
        (0..nv).map(|v| BitVec::from_indices(g.num_edges(), g.incident(v).iter().copied())).collect();
    let inc = crate::f2::F2Matrix::from_rows(g.vertices().to_vec().into(), g.edge_labels().clone(), rows)?;
    let mut out = Vec::new();
    for pi in base_group {
        let ep = pi.induced_edge_perm(g)?;
        // Need T_F = S △ π⁻¹(S), i.e. the vertices v with [v ∈ S] ≠ [π(v) ∈ S].
        let mut t = BitVec::zeros(nv);
        for v in 0..nv {
            if cfi.is_odd(v) != cfi.is_odd(pi.apply(v)) {
                t.set(v, true);
            }
        }
        if let Some(f0) = inc.solve(&t) {
            for c in &cyc_elems {
                out.push((f0.xor(c), ep.clone()));
            }
        }
    }
    Ok(out)
}

/// Smallest `Aut(𝔊^S)`-support of `μ` among atom sets. Falls back to the bound
/// construction (support atoms plus a star at the first vertex) when `2|E| > atom_cap`.
pub fn min_aut_support(
    sp: &EdgeSpace,
    cfi: &CfiStructure,
    mu: Hf,
    base_group: &[BasePerm],
    atom_cap: usize,
    cap: usize,
) -> Result<AutSupport> {
    let g = cfi.base();
    let m = g.num_edges();
    if 2 * m > atom_cap || 2 * m > 63 {
        let sup = min_cfi_support(sp, mu)?;
        let mut atoms: Vec<(usize, u8)> = sup.iter_ones().map(|e| (e, 0)).collect();
        for &e in g.incident(0) {
            if !sup.get(e) {
                atoms.push((e, 0));
            }
        }
        atoms.sort_unstable();
        return Ok(AutSupport { atoms, mode: AutSupportMode::Bound });
    }
    let _ = cap;
    // Atom (e, b) has index 2e + b.
    let mut moved_masks: Vec<u64> = Vec::new();
    for (f, ep) in cfi_automorphisms(cfi, base_group)? {
        if act_flip_perm(sp, &f, &ep, mu)? == mu {
            continue;
        }
        let mut mask = 0u64;
        for e in 0..m {
            for b in 0..2u8 {
                if ep[e] != e || f.get(e) {
                    mask |= 1 << (2 * e + b as usize);
                }
            }
        }
        moved_masks.push(mask);
    }
    moved_masks.sort_unstable();
    moved_masks.dedup();
    if moved_masks.is_empty() {
        return Ok(AutSupport { atoms: Vec::new(), mode: AutSupportMode::Exhaustive });
    }
    let n = 2 * m;
    for k in 1..=n {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let a: u64 = combo.iter().fold(0, |s, &i| s | 1 << i);
            if moved_masks.iter().all(|&mm| mm & a != 0) {
                return Ok(AutSupport {
                    atoms: combo.iter().map(|&i| (i / 2, (i % 2) as u8)).collect(),
                    mode: AutSupportMode::Exhaustive,
                });
            }
            let mut i = k;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if combo[i] < n - k + i {
                    combo[i] += 1;
                    for j in i + 1..k {
                        combo[j] = combo[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    Err(Error::Inconsistent("no atom set hits every automorphism moving μ".into()))
}

/// `α(μ) = s(μ) / |sup_CFI(μ)|` as a reduced fraction; `None` when the CFI-support is empty.
pub fn support_gap(aut_support_size: usize, sup_cfi_size: usize) -> Option<(usize, usize)> {
    if sup_cfi_size == 0 {
        return None;
    }
    let gcd = {
        let (mut a, mut b) = (aut_support_size, sup_cfi_size);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    Some((aut_support_size / gcd, sup_cfi_size / gcd))
}

/// Number of connected components of the base graph after deleting the edges in `removed`.
pub fn components_without(g: &BaseGraph, removed: &BitVec) -> usize {
    let nv = g.num_vertices();
    let mut seen = vec![false; nv];
    let mut count = 0;
    for s in 0..nv {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &e in g.incident(v) {
                if removed.get(e) {
                    continue;
                }
                let w = g.other_end(e, v);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Data for the bridge inequality `|Orb_E(μ)| ≤ 2^{k²}·|Orb(μ)|`, where `k` counts the
/// components of the base minus `sup_CFI(μ)`.
#[derive(Clone, Debug)]
pub struct BridgeCheck {
    pub k: usize,
    pub orb_e: u64,
    pub orb_cfi: u64,
    pub orb_full_aut: usize,
    pub holds: bool,
}

/// Evaluates the bridge inequality against both the cycle-flip orbit and the orbit under
/// all of `Aut(𝔊^S)` restricted to `base_group`.
pub fn bridge_check(sp: &EdgeSpace, cfi: &CfiStructure, mu: Hf, base_group: &[BasePerm], cap: usize) -> Result<BridgeCheck> {
    let g = cfi.base();
    let sup = min_cfi_support(sp, mu)?;
    let k = components_without(g, &sup);
    let orb_e = orb_e_size(sp, mu, cap)?;
    let orb_cfi = orb_cfi_size(sp, mu, cap)?;
    let mut images = HashSet::new();
    for (f, ep) in cfi_automorphisms(cfi, base_group)? {
        images.insert(act_flip_perm(sp, &f, &ep, mu)?);
    }
    let bound = |o: u64| (orb_e as u128) <= (o as u128) << (k * k).min(100);
    Ok(BridgeCheck { k, orb_e, orb_cfi, orb_full_aut: images.len(), holds: bound(orb_cfi) && bound(images.len() as u64) })
}
