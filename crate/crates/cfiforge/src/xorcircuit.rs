//! XOR circuits over a labelled input domain: sensitivity sets, gate matrices, fan-in
//! dimensions, the quotient circuit of a CFI-symmetric set, and circuit automorphisms.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{cap_error, Error, Result};
use crate::f2::{label_index, sorted_labels, BitVec, F2Matrix, F2Subspace, Labels};
use crate::graphs::BasePerm;
use crate::hfs::{self, EdgeSpace, Hf};

/// A rooted DAG of XOR gates. Leaves carry input labels from `domain`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorCircuit {
    names: Vec<String>,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
    root: usize,
    leaf_label: Vec<Option<usize>>,
    domain: Labels,
    height: Vec<u32>,
    topo: Vec<usize>,
}

/// JSON form of a circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitJson {
    pub gates: Vec<String>,
    pub wires: Vec<[String; 2]>,
    pub root: String,
    pub labels: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<String>>,
}

impl XorCircuit {
    /// Builds a circuit from gate names, `(parent, child)` wires, a root and leaf labels.
    /// The domain defaults to the sorted set of leaf labels.
    pub fn new(
        gates: Vec<String>,
        wires: &[(String, String)],
        root: &str,
        labels: &BTreeMap<String, String>,
        domain: Option<Labels>,
    ) -> Result<XorCircuit> {
        let mut index = HashMap::new();
        for (i, g) in gates.iter().enumerate() {
            if index.insert(g.clone(), i).is_some() {
                return Err(Error::Structure(format!("duplicate gate {g:?}")));
            }
        }
        let gi = |g: &str| index.get(g).copied().ok_or_else(|| Error::Structure(format!("unknown gate {g:?}")));
        let mut children = vec![Vec::new(); gates.len()];
        let mut seen = HashSet::new();
        for (p, c) in wires {
            let (p, c) = (gi(p)?, gi(c)?);
            if !seen.insert((p, c)) {
                return Err(Error::Structure(format!("duplicate wire {}→{}", gates[p], gates[c])));
            }
            children[p].push(c);
        }
        let domain = match domain {
            Some(d) => d,
            None => sorted_labels(labels.values().cloned().collect::<HashSet<_>>())?,
        };
        let dindex = label_index(&domain);
        let mut leaf_label = vec![None; gates.len()];
        for (g, l) in labels {
            let i = gi(g)?;
            let d = *dindex.get(l).ok_or_else(|| Error::Structure(format!("label {l:?} not in the domain")))?;
            leaf_label[i] = Some(d);
        }
        XorCircuit::from_parts(gates, children, gi(root)?, leaf_label, domain)
    }

    pub(crate) fn from_parts(
        names: Vec<String>,
        mut children: Vec<Vec<usize>>,
        root: usize,
        leaf_label: Vec<Option<usize>>,
        domain: Labels,
    ) -> Result<XorCircuit> {
        let n = names.len();
        for c in &mut children {
            c.sort_unstable();
            c.dedup();
        }
        let mut parents = vec![Vec::new(); n];
        for (p, cs) in children.iter().enumerate() {
            for &c in cs {
                parents[c].push(p);
            }
        }
        for g in 0..n {
            match (children[g].is_empty(), leaf_label[g]) {
                (true, None) => return Err(Error::Structure(format!("leaf {} has no label", names[g]))),
                (false, Some(_)) => return Err(Error::Structure(format!("internal gate {} has a label", names[g]))),
                _ => {}
            }
        }
        if !parents[root].is_empty() {
            return Err(Error::Structure("the root has a parent".into()));
        }
        // Post-order from the root; detects cycles and unreachable gates.
        let mut state = vec![0u8; n];
        let mut topo = Vec::with_capacity(n);
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some(&mut (g, ref mut i)) = stack.last_mut() {
            if *i < children[g].len() {
                let c = children[g][*i];
                *i += 1;
                match state[c] {
                    0 => {
                        state[c] = 1;
                        stack.push((c, 0));
                    }
                    1 => return Err(Error::Structure("the wires contain a cycle".into())),
                    _ => {}
                }
            } else {
                state[g] = 2;
                topo.push(g);
                stack.pop();
            }
        }
        if topo.len() != n {
            return Err(Error::Structure("some gates are not reachable from the root".into()));
        }
        let mut height = vec![0u32; n];
        for &g in &topo {
            height[g] = children[g].iter().map(|&c| height[c] + 1).max().unwrap_or(0);
        }
        Ok(XorCircuit { names, children, parents, root, leaf_label, domain, height, topo })
    }

    pub fn from_json(j: &CircuitJson) -> Result<XorCircuit> {
        let wires: Vec<(String, String)> = j.wires.iter().map(|[a, b]| (a.clone(), b.clone())).collect();
        let domain = j.domain.as_ref().map(|d| crate::f2::labels(d.iter().cloned())).transpose()?;
        XorCircuit::new(j.gates.clone(), &wires, &j.root, &j.labels, domain)
    }

    pub fn to_json(&self) -> CircuitJson {
        let mut wires = Vec::new();
        for (p, cs) in self.children.iter().enumerate() {
            for &c in cs {
                wires.push([self.names[p].clone(), self.names[c].clone()]);
            }
        }
        let labels = (0..self.len())
            .filter_map(|g| self.leaf_label[g].map(|l| (self.names[g].clone(), self.domain[l].clone())))
            .collect();
        CircuitJson {
            gates: self.names.clone(),
            wires,
            root: self.names[self.root].clone(),
            labels,
            domain: Some(self.domain.to_vec()),
        }
    }

    /// DOT rendering with each gate annotated by its sensitivity set.
    pub fn to_dot(&self) -> String {
        let sens = self.sensitivities();
        let mut s = String::from("digraph circuit {\n");
        for g in 0..self.len() {
            let x: Vec<&str> = sens[g].iter_ones().map(|i| self.domain[i].as_str()).collect();
            let shape = if g == self.root { "doublecircle" } else if self.is_leaf(g) { "box" } else { "circle" };
            let _ = writeln!(s, "  \"{}\" [shape={shape}, label=\"{}\\nX={{{}}}\"];", self.names[g], self.names[g], x.join(","));
        }
        for (p, cs) in self.children.iter().enumerate() {
            for &c in cs {
                let _ = writeln!(s, "  \"{}\" -> \"{}\";", self.names[p], self.names[c]);
            }
        }
        s.push_str("}\n");
        s
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn gate(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn children(&self, g: usize) -> &[usize] {
        &self.children[g]
    }

    pub fn parents(&self, g: usize) -> &[usize] {
        &self.parents[g]
    }

    pub fn is_leaf(&self, g: usize) -> bool {
        self.children[g].is_empty()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&g| self.is_leaf(g)).collect()
    }

    /// Domain index of a leaf's label.
    pub fn leaf_label(&self, g: usize) -> Option<usize> {
        self.leaf_label[g]
    }

    pub fn domain(&self) -> &Labels {
        &self.domain
    }

    /// Length of the longest path from `g` down to a leaf.
    pub fn height(&self, g: usize) -> u32 {
        self.height[g]
    }

    /// Gates in an order where children precede parents.
    pub fn bottom_up(&self) -> &[usize] {
        &self.topo
    }

    pub fn num_wires(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Whether the leaf labelling is injective.
    pub fn has_injective_labels(&self) -> bool {
        let mut seen = HashSet::new();
        self.leaf_label.iter().flatten().all(|l| seen.insert(*l))
    }

    /// `𝒳(g)` for every gate, as vectors over the domain.
    pub fn sensitivities(&self) -> Vec<BitVec> {
        let d = self.domain.len();
        let mut out = vec![BitVec::zeros(d); self.len()];
        for &g in &self.topo {
            let v = match self.leaf_label[g] {
                Some(l) => BitVec::unit(d, l),
                None => {
                    let mut v = BitVec::zeros(d);
                    for &c in &self.children[g] {
                        v.xor_assign(&out[c]);
                    }
                    v
                }
            };
            out[g] = v;
        }
        out
    }

    pub fn sensitivity(&self, g: usize) -> BitVec {
        self.sensitivities().swap_remove(g)
    }

    pub fn sensitivity_labels(&self, g: usize) -> Vec<String> {
        self.sensitivity(g).iter_ones().map(|i| self.domain[i].clone()).collect()
    }

    fn gate_matrix_with(&self, g: usize, sens: &[BitVec]) -> F2Matrix {
        let (rows, data): (Vec<String>, Vec<BitVec>) = if self.is_leaf(g) {
            (vec![self.names[g].clone()], vec![sens[g].clone()])
        } else {
            self.children[g].iter().map(|&c| (self.names[c].clone(), sens[c].clone())).unzip()
        };
        F2Matrix::from_rows(rows.into(), self.domain.clone(), data).expect("gate matrix shapes agree")
    }

    /// `M(g)`: one row per child, the child's sensitivity vector. A leaf's matrix is its
    /// own label vector.
    pub fn gate_matrix(&self, g: usize) -> F2Matrix {
        self.gate_matrix_with(g, &self.sensitivities())
    }

    pub fn gate_matrices(&self) -> Vec<F2Matrix> {
        let sens = self.sensitivities();
        (0..self.len()).map(|g| self.gate_matrix_with(g, &sens)).collect()
    }

    /// Maximum rank of a gate matrix.
    pub fn fan_in_dim(&self) -> usize {
        self.gate_matrices().iter().map(F2Matrix::rank).max().unwrap_or(0)
    }

    /// Maximum of `dim M(g)·cyc` over all gates.
    pub fn restricted_fan_in_dim(&self, cyc: &F2Subspace) -> Result<usize> {
        if cyc.ambient() != &self.domain {
            return Err(Error::Structure("subspace ambient differs from the circuit domain".into()));
        }
        let mut best = 0;
        for m in self.gate_matrices() {
            best = best.max(m.image(cyc)?.dim());
        }
        Ok(best)
    }

    /// Number of root-to-gate paths for every gate.
    pub fn path_counts(&self) -> Result<Vec<u128>> {
        let mut cnt = vec![0u128; self.len()];
        cnt[self.root] = 1;
        for &g in self.topo.iter().rev() {
            let c = cnt[g];
            for &h in &self.children[g] {
                cnt[h] = cnt[h].checked_add(c).ok_or_else(|| cap_error("path count", u128::MAX as usize, usize::MAX))?;
            }
        }
        Ok(cnt)
    }

    /// Parity of the number of root-to-gate paths, for every gate.
    pub fn path_parities(&self) -> Vec<bool> {
        let mut par = vec![false; self.len()];
        par[self.root] = true;
        for &g in self.topo.iter().rev() {
            if par[g] {
                for &h in &self.children[g] {
                    par[h] = !par[h];
                }
            }
        }
        par
    }

    pub fn path_parity(&self, g: usize) -> bool {
        self.path_parities()[g]
    }

    /// Labels with an odd total number of root paths over their leaves.
    pub fn sensitive_inputs_by_paths(&self) -> BitVec {
        let par = self.path_parities();
        let mut v = BitVec::zeros(self.domain.len());
        for g in 0..self.len() {
            if let (Some(l), true) = (self.leaf_label[g], par[g]) {
                v.flip(l);
            }
        }
        v
    }

    /// Enumerates all root-to-`target` paths, up to `cap` of them.
    pub fn enumerate_paths(&self, target: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut path = vec![self.root];
        self.paths_rec(target, cap, &mut path, &mut out)?;
        Ok(out)
    }

    fn paths_rec(&self, target: usize, cap: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> Result<()> {
        let g = *path.last().unwrap();
        if g == target {
            if out.len() >= cap {
                return Err(cap_error("path enumeration", cap, out.len()));
            }
            out.push(path.clone());
            return Ok(());
        }
        if self.height[g] <= self.height[target] {
            return Ok(());
        }
        for &c in &self.children[g] {
            path.push(c);
            self.paths_rec(target, cap, path, out)?;
            path.pop();
        }
        Ok(())
    }
}

/// Finds gate bijections `σ` with `children(σg) = σ(children(g))` and
/// `ℓ(σ(leaf)) = label_map(ℓ(leaf))`, where `label_map` permutes the domain. Returns up
/// to `limit` of them; the search fixes the root automatically since it is the only
/// gate without parents.
pub fn find_extensions(c: &XorCircuit, label_map: &[usize], limit: usize) -> Vec<Vec<usize>> {
    let n = c.len();
    let sens = c.sensitivities();
    let mapped_sens: Vec<BitVec> = sens.iter().map(|s| s.permuted(label_map)).collect();
    // Gates grouped by (height, sensitivity, child count, leaf label).
    type Key = (u32, BitVec, usize, Option<usize>);
    let mut by_key: HashMap<Key, Vec<usize>> = HashMap::new();
    for g in 0..n {
        by_key.entry((c.height[g], sens[g].clone(), c.children[g].len(), c.leaf_label[g])).or_default().push(g);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&g| (c.height[g], g));
    struct Ctx<'a> {
        c: &'a XorCircuit,
        order: Vec<usize>,
        cands: Vec<Vec<usize>>,
        limit: usize,
    }
    let cands: Vec<Vec<usize>> = (0..n)
        .map(|g| {
            let k = (c.height[g], mapped_sens[g].clone(), c.children[g].len(), c.leaf_label[g].map(|l| label_map[l]));
            by_key.get(&k).cloned().unwrap_or_default()
        })
        .collect();
    let ctx = Ctx { c, order, cands, limit };

    fn rec(ctx: &Ctx, i: usize, sigma: &mut [usize], used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if out.len() >= ctx.limit {
            return;
        }
        if i == ctx.order.len() {
            out.push(sigma.to_vec());
            return;
        }
        let g = ctx.order[i];
        let mut want: Vec<usize> = ctx.c.children[g].iter().map(|&h| sigma[h]).collect();
        want.sort_unstable();
        for &t in &ctx.cands[g] {
            if used[t] || ctx.c.children[t] != want {
                continue;
            }
            sigma[g] = t;
            used[t] = true;
            rec(ctx, i + 1, sigma, used, out);
            used[t] = false;
            sigma[g] = usize::MAX;
            if out.len() >= ctx.limit {
                return;
            }
        }
    }
    let mut sigma = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut out = Vec::new();
    rec(&ctx, 0, &mut sigma, &mut used, &mut out);
    out
}

/// Checks that `(σ, label_map)` is an automorphism of `c`.
pub fn is_circuit_automorphism(c: &XorCircuit, sigma: &[usize], label_map: &[usize]) -> bool {
    let n = c.len();
    if sigma.len() != n || sigma[c.root] != c.root {
        return false;
    }
    let mut seen = vec![false; n];
    for &t in sigma {
        if t >= n || std::mem::replace(&mut seen[t], true) {
            return false;
        }
    }
    (0..n).all(|g| {
        let mut want: Vec<usize> = c.children[g].iter().map(|&h| sigma[h]).collect();
        want.sort_unstable();
        want == c.children[sigma[g]] && c.leaf_label[g].map(|l| label_map[l]) == c.leaf_label[sigma[g]]
    })
}

/// The quotient circuit `C(μ)` together with its gate classes.
#[derive(Clone, Debug)]
pub struct HfsCircuit {
    pub circuit: XorCircuit,
    /// The `∼_E`-class of each gate, sorted canonically.
    pub classes: Vec<Vec<Hf>>,
    gate_of: HashMap<Hf, usize>,
}

impl HfsCircuit {
    pub fn gate_of(&self, x: Hf) -> Option<usize> {
        self.gate_of.get(&x).copied()
    }

    /// A canonical representative of the class of gate `g`.
    pub fn representative(&self, g: usize) -> Hf {
        self.classes[g][0]
    }
}

/// Builds `C(μ)`: gates are the `∼_E`-classes of `tc(μ)`, with a wire `[x]→[y]` whenever a
/// member of `[y]` is an element of a member of `[x]`. Atom classes become leaves labelled
/// by their edge. Unless `bypass_symmetry_check` is set, `μ` must be CFI-symmetric.
pub fn from_hfs(sp: &EdgeSpace, mu: Hf, cap: usize, bypass_symmetry_check: bool) -> Result<HfsCircuit> {
    if !bypass_symmetry_check {
        if let Some(v) = hfs::cfi_symmetry_violation(sp, mu, cap)? {
            return Err(Error::Validation(format!("set is not CFI-symmetric: {}", v.reason)));
        }
    }
    // Root class first so that gate 0 is the root.
    let mut classes = hfs::sim_classes(sp, mu, cap)?;
    let root_pos = classes.iter().position(|c| c.contains(&mu)).unwrap();
    let root_class = classes.remove(root_pos);
    classes.insert(0, root_class);
    let mut gate_of = HashMap::new();
    for (i, cl) in classes.iter().enumerate() {
        for &x in cl {
            gate_of.insert(x, i);
        }
    }
    let mut names = Vec::with_capacity(classes.len());
    let mut children = vec![Vec::new(); classes.len()];
    let mut leaf_label = vec![None; classes.len()];
    let mut set_count = 0;
    for (i, cl) in classes.iter().enumerate() {
        match sp.atom_edge(cl[0])? {
            Some((e, _)) => {
                names.push(sp.labels()[e].clone());
                leaf_label[i] = Some(e);
            }
            None => {
                names.push(format!("#{set_count}"));
                set_count += 1;
                for &x in cl {
                    for &y in x.children().iter() {
                        if let Some(&j) = gate_of.get(&y) {
                            children[i].push(j);
                        }
                    }
                }
                if children[i].is_empty() {
                    return Err(Error::Validation("the empty set cannot be a gate".into()));
                }
            }
        }
    }
    let circuit = XorCircuit::from_parts(names, children, 0, leaf_label, sp.labels().clone())?;
    Ok(HfsCircuit { circuit, classes, gate_of })
}

/// Result of checking that the stabilizer of `μ` acts on `C(μ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircuitStabReport {
    pub group_order: usize,
    pub stabilizer_order: usize,
    pub all_extend: bool,
    pub orbit_mu: usize,
    pub orbit_circuit: usize,
    pub bound_holds: bool,
}

/// For every `π` fixing `μ`, builds `σ([x]) = [πx]` and verifies it is an automorphism of
/// `C(μ)` over the induced edge permutation. The circuit orbit is `|G| / |{π : π extends}|`.
pub fn circuit_stab_check(sp: &EdgeSpace, mu: Hf, hc: &HfsCircuit, base_group: &[BasePerm]) -> Result<CircuitStabReport> {
    let g = sp.graph().ok_or_else(|| Error::Structure("edge space has no base graph".into()))?.clone();
    let c = &hc.circuit;
    let mut images = HashSet::new();
    let mut stab = 0;
    let mut all_extend = true;
    let mut extend_count = 0;
    for pi in base_group {
        let ep = pi.induced_edge_perm(&g)?;
        let img = hfs::act_edge_perm(sp, &ep, mu)?;
        images.insert(img);
        if img == mu {
            stab += 1;
            let mut sigma = vec![usize::MAX; c.len()];
            let mut ok = true;
            for (i, cl) in hc.classes.iter().enumerate() {
                match hc.gate_of(hfs::act_edge_perm(sp, &ep, cl[0])?) {
                    Some(j) => sigma[i] = j,
                    None => ok = false,
                }
            }
            if !(ok && is_circuit_automorphism(c, &sigma, &ep)) {
                all_extend = false;
            }
        }
        if !find_extensions(c, &ep, 1).is_empty() {
            extend_count += 1;
        }
    }
    let orbit_circuit = base_group.len() / extend_count.max(1);
    Ok(CircuitStabReport {
        group_order: base_group.len(),
        stabilizer_order: stab,
        all_extend,
        orbit_mu: images.len(),
        orbit_circuit,
        bound_holds: orbit_circuit <= images.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::labels;
    use crate::hfs::parity_set;

    fn build(gates: &[&str], wires: &[(&str, &str)], root: &str, lab: &[(&str, &str)], dom: Option<&[&str]>) -> XorCircuit {
        let wires: Vec<(String, String)> = wires.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        let lab = lab.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        let dom = dom.map(|d| labels(d.iter().copied()).unwrap());
        XorCircuit::new(gates.iter().map(|s| s.to_string()).collect(), &wires, root, &lab, dom).unwrap()
    }

    fn efg() -> EdgeSpace {
        EdgeSpace::free(labels(["e", "f", "g"]).unwrap())
    }

    #[test]
    fn sensitivity_examples() {
        let c = build(&["r", "a", "b"], &[("r", "a"), ("r", "b")], "r", &[("a", "f"), ("b", "g")], Some(&["e", "f", "g"]));
        assert_eq!(c.sensitivity_labels(c.gate("a").unwrap()), ["f"]);
        assert_eq!(c.sensitivity_labels(c.root()), ["f", "g"]);
        assert_eq!(c.gate_matrix(c.root()).rank(), 2);
        let leaf = c.gate_matrix(c.gate("a").unwrap());
        assert_eq!((leaf.nrows(), leaf.rank()), (1, 1));
        let cyc = F2Subspace::span_bits(c.domain().clone(), vec![BitVec::ones(3)]);
        assert_eq!(c.restricted_fan_in_dim(&cyc).unwrap(), 1);
        assert_eq!(c.fan_in_dim(), 2);
    }

    #[test]
    fn structural_validation() {
        let w = |v: &[(&str, &str)]| v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect::<Vec<_>>();
        let l: BTreeMap<String, String> = [("b".to_string(), "e".to_string())].into();
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert!(XorCircuit::new(names(&["r", "a", "b"]), &w(&[("r", "a"), ("a", "r")]), "r", &l, None).is_err());
        assert!(XorCircuit::new(names(&["r", "b", "z"]), &w(&[("r", "b")]), "r", &l, None).is_err());
        assert!(XorCircuit::new(names(&["r", "b"]), &w(&[("r", "b"), ("r", "b")]), "r", &l, None).is_err());
        assert!(XorCircuit::new(names(&["r", "a", "b"]), &w(&[("r", "a"), ("r", "b")]), "r", &l, None).is_err());
    }

    #[test]
    fn path_parity_examples() {
        let chain = build(&["r", "m", "l"], &[("r", "m"), ("m", "l")], "r", &[("l", "e")], None);
        assert!(chain.path_parities().iter().all(|&p| p));
        let diamond = build(
            &["r", "h1", "h2", "l"],
            &[("r", "h1"), ("r", "h2"), ("h1", "l"), ("h2", "l")],
            "r",
            &[("l", "e")],
            None,
        );
        assert!(!diamond.path_parity(diamond.gate("l").unwrap()));
        assert!(diamond.sensitive_inputs_by_paths().is_zero());
        assert!(diamond.sensitivity(diamond.root()).is_zero());
        assert_eq!(diamond.enumerate_paths(3, 10).unwrap().len(), 2);
        assert_eq!(diamond.path_counts().unwrap()[3], 2);
    }

    #[test]
    fn c_of_mu_efg() {
        let sp = efg();
        let mu = parity_set(&sp, &[2, 1, 0]).unwrap().0;
        let hc = from_hfs(&sp, mu, 20, false).unwrap();
        let c = &hc.circuit;
        assert_eq!(c.len(), 7);
        assert_eq!(c.leaves().len(), 3);
        assert_eq!(c.sensitivity_labels(c.root()), ["e", "f", "g"]);
        assert!(c.has_injective_labels());
        for g in 0..c.len() {
            let x = hc.representative(g);
            assert_eq!(c.gate_matrix(g).kernel(), hfs::stab_e(&sp, x, 20).unwrap());
        }
        assert_eq!(c.fan_in_dim(), 2);
        let j = c.to_json();
        assert_eq!(&XorCircuit::from_json(&j).unwrap(), c);
        assert!(c.to_dot().contains("X={e,f,g}"));
    }

    #[test]
    fn c_of_atom_and_gate_counts() {
        let sp = efg();
        let hc = from_hfs(&sp, sp.atom(0, 0), 20, false).unwrap();
        assert_eq!(hc.circuit.len(), 1);
        assert_eq!(hc.circuit.sensitivity_labels(0), ["e"]);
        let sp8 = EdgeSpace::free(labels((0..8).map(|i| format!("e{i}"))).unwrap());
        for k in 1..=8 {
            let edges: Vec<usize> = (0..k).collect();
            let mu = parity_set(&sp8, &edges).unwrap().0;
            assert_eq!(from_hfs(&sp8, mu, 20, false).unwrap().circuit.len(), 3 * k - 2);
        }
    }

    #[test]
    fn non_symmetric_rejected() {
        let sp = efg();
        let mb = parity_set(&sp, &[2, 1]).unwrap().0;
        let bad = Hf::set([Hf::set([mb, sp.atom(0, 0)])]);
        assert!(matches!(from_hfs(&sp, bad, 20, false), Err(Error::Validation(_))));
        assert!(from_hfs(&sp, bad, 20, true).is_ok());
    }

    #[test]
    fn diamond_automorphisms() {
        let d = build(
            &["r", "h1", "h2", "l"],
            &[("r", "h1"), ("r", "h2"), ("h1", "l"), ("h2", "l")],
            "r",
            &[("l", "e")],
            None,
        );
        let ext = find_extensions(&d, &[0], 10);
        assert_eq!(ext.len(), 2);
        for s in &ext {
            assert!(is_circuit_automorphism(&d, s, &[0]));
        }
    }

    #[test]
    fn stab_check_square() {
        use crate::graphs::{hypercube_symmetry_generators, BaseGraph};
        use crate::perm::PermGroup;
        use std::sync::Arc;
        let g = Arc::new(BaseGraph::hypercube(2).unwrap());
        let sp = EdgeSpace::from_graph(g.clone());
        let gens = hypercube_symmetry_generators(2, true).unwrap();
        let grp = PermGroup::new(4, gens.into_iter().map(|b| b.0).collect()).unwrap();
        let group: Vec<BasePerm> = grp.enumerate(100).unwrap().list().iter().cloned().map(BasePerm).collect();
        let mu = parity_set(&sp, &[0, 1, 2, 3]).unwrap().0;
        let hc = from_hfs(&sp, mu, 20, false).unwrap();
        let r = circuit_stab_check(&sp, mu, &hc, &group).unwrap();
        assert!(r.all_extend && r.bound_holds);
        assert!(r.stabilizer_order >= 1);

        // A single-edge set moves under the group; the circuit orbit follows it.
        let mu1 = sp.atom(0, 0);
        let hc1 = from_hfs(&sp, mu1, 20, false).unwrap();
        let r1 = circuit_stab_check(&sp, mu1, &hc1, &group).unwrap();
        assert_eq!(r1.orbit_mu, 4);
        assert!(r1.all_extend && r1.bound_holds);
    }
}
