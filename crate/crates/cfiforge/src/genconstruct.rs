//! The generalized circuit `Ĉ(μ)`, built from kernel matrices closed under the
//! stabilizer of `μ`, together with symmetric bases and the counterexample spaces.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::f2::{labels, BitVec, F2Matrix, F2Subspace, Labels};
use crate::graphs::{BaseGraph, BasePerm};
use crate::hfs::{self, EdgeSpace, Hf};
use crate::perm::{Perm, PermGroup};
use crate::xorcircuit::XorCircuit;

/// A matrix `N` with `k = dim Δ − dim Γ` rows and `Ker(N) ∩ Δ = Γ`. Row `i` solves
/// `B·x = b_i`, where `B` lists a basis of `Γ` extended to a basis of `Δ` and `b_i`
/// selects the `i`-th extension vector.
pub fn kernel_matrix(gamma: &F2Subspace, delta: &F2Subspace) -> Result<F2Matrix> {
    if gamma.ambient() != delta.ambient() {
        return Err(Error::Structure("subspaces have different ambient spaces".into()));
    }
    if !gamma.is_subspace_of(delta)? {
        return Err(Error::Validation("Γ is not contained in Δ".into()));
    }
    let ambient = gamma.ambient().clone();
    let mut basis: Vec<BitVec> = gamma.basis().to_vec();
    let mut span = gamma.clone();
    let mut ext = Vec::new();
    for v in delta.basis() {
        if !span.contains_bits(v) {
            basis.push(v.clone());
            ext.push(basis.len() - 1);
            span = span.sum(&F2Subspace::span_bits(ambient.clone(), vec![v.clone()]))?;
        }
    }
    let rows_l: Labels = (0..basis.len()).map(|i| i.to_string()).collect::<Vec<_>>().into();
    let a = F2Matrix::from_rows(rows_l, ambient.clone(), basis.clone())?;
    let mut rows = Vec::with_capacity(ext.len());
    for &w in &ext {
        let b = BitVec::unit(basis.len(), w);
        rows.push(a.solve(&b).ok_or_else(|| Error::Inconsistent("basis system has no solution".into()))?);
    }
    let n = F2Matrix::from_rows(row_labels(rows.len()), ambient, rows)?;
    if n.kernel().intersect(delta)? != *gamma {
        return Err(Error::Inconsistent("kernel matrix does not cut out Γ".into()));
    }
    Ok(n)
}

fn row_labels(k: usize) -> Labels {
    (0..k).map(|i| i.to_string()).collect::<Vec<_>>().into()
}

/// Replaces every row of `n` by its orbit under the column permutations `group` (given as
/// image tables; bit `i` moves to `p[i]`). Orbits are listed in the order of `n`'s rows,
/// each starting with the row itself; equal rows from different orbits are kept. When
/// `delta` is given, checks that `Ker ∩ Δ` is unchanged.
pub fn symmetric_closure(n: &F2Matrix, group: &[Vec<usize>], delta: Option<&F2Subspace>) -> Result<F2Matrix> {
    let mut rows = Vec::new();
    for r in n.rows() {
        let mut seen = HashSet::from([r.clone()]);
        rows.push(r.clone());
        for p in group {
            let img = r.permuted(p);
            if seen.insert(img.clone()) {
                rows.push(img);
            }
        }
    }
    let out = F2Matrix::from_rows(row_labels(rows.len()), n.col_labels().clone(), rows)?;
    if let Some(d) = delta {
        if out.kernel().intersect(d)? != n.kernel().intersect(d)? {
            return Err(Error::Inconsistent("symmetric closure changed the kernel".into()));
        }
    }
    Ok(out)
}

/// The split `Γ = F2^A ⊕ F̃2^B` into a full part and an even-weight part, if `Γ` has
/// that shape. `A` holds the coordinates whose unit vector lies in `Γ`.
pub fn decompose_stab(gamma: &F2Subspace) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = gamma.ambient().len();
    let (a, b): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| gamma.contains_bits(&BitVec::unit(n, i)));
    let mut gens: Vec<BitVec> = a.iter().map(|&i| BitVec::unit(n, i)).collect();
    gens.extend(b.windows(2).map(|w| BitVec::from_indices(n, [w[0], w[1]])));
    (F2Subspace::span_bits(gamma.ambient().clone(), gens) == *gamma).then_some((a, b))
}

/// A basis `B_Γ` of `Γ` inside a basis `B` of the ambient space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymBasisPair {
    pub gamma_basis: Vec<BitVec>,
    pub basis: Vec<BitVec>,
    /// Index of the joint setwise stabilizer of both bases in the given group.
    pub stab_index: usize,
}

fn set_stabilizer_count(group: &[Vec<usize>], sets: &[&[BitVec]]) -> usize {
    let keyed: Vec<HashSet<&BitVec>> = sets.iter().map(|s| s.iter().collect()).collect();
    group
        .iter()
        .filter(|p| sets.iter().zip(&keyed).all(|(s, k)| s.iter().all(|v| k.contains(&v.permuted(p)))))
        .count()
}

/// The basis `{χ(e) : e ∈ A} ∪ {χ({e,f}) : e ∈ B∖{f}}` with `f = min B`, extended by
/// `χ(f)`. `group` lists all elements of the acting coordinate group.
pub fn symmetric_basis(gamma: &F2Subspace, group: &[Vec<usize>]) -> Result<SymBasisPair> {
    let (a, b) = decompose_stab(gamma).ok_or_else(|| Error::Validation("Γ is not a full ⊕ even-weight space".into()))?;
    let Some(&f) = b.first() else {
        return Err(Error::Validation("Γ is the whole space; no even-weight part".into()));
    };
    let n = gamma.ambient().len();
    let mut gb: Vec<BitVec> = a.iter().map(|&e| BitVec::unit(n, e)).collect();
    gb.extend(b[1..].iter().map(|&e| BitVec::from_indices(n, [e, f])));
    let mut basis = gb.clone();
    basis.push(BitVec::unit(n, f));
    let order = group.len().max(1);
    let stab = set_stabilizer_count(group, &[&gb, &basis]).max(1);
    let stab_index = order / stab;
    if stab_index > n {
        return Err(Error::Inconsistent(format!("basis stabilizer index {stab_index} exceeds {n}")));
    }
    Ok(SymBasisPair { gamma_basis: gb, basis, stab_index })
}

/// Row identifier `(k, [x], [y])`; atoms use `(0, [x], [x])`.
pub type RowId = (u32, u32, u32);

/// One `N[x][y]` block.
#[derive(Clone, Debug)]
pub struct NBlock {
    pub matrix: F2Matrix,
    /// The primer pair this block was transported from.
    pub primer: (usize, usize),
    /// Index into the stabilizer list of the permutation used for transport.
    pub transport: usize,
    /// Rows of the kernel matrix before the symmetric closure (primers only).
    pub kernel_rows: usize,
    /// `Stab_E([y] ∩ x)`.
    pub stab: F2Subspace,
    /// Symmetric-basis stabilizer index for this component, if the component space has the
    /// full ⊕ even-weight shape.
    pub basis_index: Option<usize>,
}

/// All matrices of the construction with their symmetry bookkeeping.
#[derive(Clone, Debug)]
pub struct GadgetMatrices {
    pub classes: Vec<Vec<Hf>>,
    pub root_class: usize,
    /// `C[x]` as class indices, ascending.
    pub components: Vec<Vec<usize>>,
    /// `I_[x]`.
    pub rows: Vec<Vec<RowId>>,
    pub m: Vec<F2Matrix>,
    pub n: BTreeMap<(usize, usize), NBlock>,
    /// Edge permutations of `Stab_G(μ)`; index 0 is the identity.
    pub stab_edge_perms: Vec<Vec<usize>>,
    /// Class permutation induced by each stabilizer element.
    pub class_perms: Vec<Vec<usize>>,
    /// Row bijection `g(π)` for each stabilizer element.
    pub row_maps: Vec<HashMap<RowId, RowId>>,
    pub primers: Vec<(usize, usize)>,
    row_pos: HashMap<RowId, usize>,
}

impl GadgetMatrices {
    /// Position of a row inside its class's index set.
    pub fn row_position(&self, r: RowId) -> usize {
        self.row_pos[&r]
    }

    pub fn total_rows(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `N[x][y]·M[y]`.
    pub fn nm(&self, x: usize, y: usize) -> Result<F2Matrix> {
        self.n[&(x, y)].matrix.mul(&self.m[y])
    }

    /// Checks `M[πx] = (g(π), π)M[x]` entrywise for every stabilizer element and class.
    pub fn verify_equivariance(&self) -> Result<()> {
        for (p, ep) in self.stab_edge_perms.iter().enumerate() {
            for x in 0..self.classes.len() {
                let px = self.class_perms[p][x];
                for (i, r) in self.rows[x].iter().enumerate() {
                    let target = self.row_maps[p][r];
                    if target.1 as usize != px {
                        return Err(Error::Inconsistent("row map leaves the image class".into()));
                    }
                    if self.m[px].row(self.row_pos[&target]) != &self.m[x].row(i).permuted(ep) {
                        return Err(Error::Inconsistent(format!("M is not equivariant at class {x}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks that the row maps compose like the stabilizer elements they realize.
    pub fn verify_homomorphism(&self) -> Result<()> {
        let idx: HashMap<&Vec<usize>, usize> = self.stab_edge_perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        for a in 0..self.stab_edge_perms.len() {
            for b in 0..self.stab_edge_perms.len() {
                let ab: Vec<usize> = (0..self.stab_edge_perms[a].len()).map(|e| self.stab_edge_perms[a][self.stab_edge_perms[b][e]]).collect();
                let Some(&c) = idx.get(&ab) else { continue };
                // Only compare when the composite acts identically on classes.
                let same_classes = (0..self.classes.len()).all(|x| self.class_perms[c][x] == self.class_perms[a][self.class_perms[b][x]]);
                if !same_classes {
                    continue;
                }
                for (r, rb) in &self.row_maps[b] {
                    if self.row_maps[a][rb] != self.row_maps[c][r] {
                        return Err(Error::Inconsistent("row maps do not compose".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// JSON dump keyed by class representatives.
    pub fn to_json(&self) -> Value {
        let key = |c: usize| format!("{:?}", self.classes[c][0]);
        let m: serde_json::Map<String, Value> =
            (0..self.classes.len()).map(|c| (key(c), serde_json::to_value(self.m[c].to_json()).unwrap())).collect();
        let n: Vec<Value> = self
            .n
            .iter()
            .map(|(&(x, y), b)| {
                json!({
                    "x": key(x), "y": key(y),
                    "primer": [key(b.primer.0), key(b.primer.1)],
                    "rows": b.matrix.nrows(),
                    "kernel_rows": b.kernel_rows,
                    "basis_index": b.basis_index,
                    "matrix": serde_json::to_value(b.matrix.to_json()).unwrap(),
                })
            })
            .collect();
        json!({ "root": key(self.root_class), "m": m, "n": n, "stabilizer_order": self.stab_edge_perms.len() })
    }
}

/// `Ĉ(μ)` and the matrices it was built from.
#[derive(Clone, Debug)]
pub struct GeneralizedCircuit {
    pub circuit: XorCircuit,
    pub gadgets: GadgetMatrices,
    /// Row realized by each circuit gate.
    pub gate_rows: Vec<RowId>,
    /// Gates built before restricting to those reachable from the root.
    pub total_gates: usize,
}

/// Edge permutations induced by base automorphisms.
pub fn edge_perms(g: &BaseGraph, base_group: &[BasePerm]) -> Result<Vec<Vec<usize>>> {
    base_group.iter().map(|p| p.induced_edge_perm(g)).collect()
}

fn rowid_label(r: RowId, sp: &EdgeSpace, atom_edge: &HashMap<usize, usize>) -> String {
    if r.1 == r.2 {
        if let Some(&e) = atom_edge.get(&(r.1 as usize)) {
            return sp.labels()[e].clone();
        }
    }
    format!("g{}.{}.{}", r.0, r.1, r.2)
}

/// Builds `Ĉ(μ)` over the group of edge permutations `edge_group` (the elements fixing
/// `μ` are selected internally; the identity is always included).
pub fn build_generalized_circuit(sp: &EdgeSpace, mu: Hf, edge_group: &[Vec<usize>], cap: usize) -> Result<GeneralizedCircuit> {
    let ne = sp.len();
    let e_labels = sp.labels().clone();
    let classes = hfs::sim_classes(sp, mu, cap)?;
    let nc = classes.len();
    let mut class_of = HashMap::new();
    for (i, c) in classes.iter().enumerate() {
        for &x in c {
            class_of.insert(x, i);
        }
    }
    let root_class = class_of[&mu];

    // Stab_G(μ) as edge permutations, identity first.
    let id: Vec<usize> = (0..ne).collect();
    let mut stab: Vec<Vec<usize>> = vec![id.clone()];
    for p in edge_group {
        if p.len() != ne {
            return Err(Error::Structure("edge permutation has the wrong length".into()));
        }
        if *p != id && hfs::act_edge_perm(sp, p, mu)? == mu {
            stab.push(p.clone());
        }
    }
    stab.dedup();
    let mut class_perms = Vec::with_capacity(stab.len());
    for p in &stab {
        let mut cp = Vec::with_capacity(nc);
        for c in &classes {
            let img = hfs::act_edge_perm(sp, p, c[0])?;
            cp.push(*class_of.get(&img).ok_or_else(|| Error::Inconsistent("stabilizer moves a set out of tc(μ)".into()))?);
        }
        class_perms.push(cp);
    }

    // Components and atom edges.
    let mut atom_edge: HashMap<usize, usize> = HashMap::new();
    let mut components = vec![Vec::new(); nc];
    let mut comp_sets: HashMap<(usize, usize), Hf> = HashMap::new();
    for (i, c) in classes.iter().enumerate() {
        if let Some((e, _)) = sp.atom_edge(c[0])? {
            atom_edge.insert(i, e);
            continue;
        }
        let x = c[0];
        let mut by_class: BTreeMap<usize, Vec<Hf>> = BTreeMap::new();
        for &y in x.children().iter() {
            by_class.entry(class_of[&y]).or_default().push(y);
        }
        for (y, members) in by_class {
            components[i].push(y);
            comp_sets.insert((i, y), Hf::set(members));
        }
        if components[i].is_empty() {
            return Err(Error::Validation("tc(μ) contains the empty set".into()));
        }
    }

    let mut rows: Vec<Vec<RowId>> = vec![Vec::new(); nc];
    let mut m: Vec<Option<F2Matrix>> = vec![None; nc];
    let mut row_pos: HashMap<RowId, usize> = HashMap::new();
    let mut row_maps: Vec<HashMap<RowId, RowId>> = vec![HashMap::new(); stab.len()];
    let mut nblocks: BTreeMap<(usize, usize), NBlock> = BTreeMap::new();
    let mut primers = Vec::new();

    let mut order: Vec<usize> = (0..nc).collect();
    order.sort_by_key(|&c| (classes[c][0].height(), c));
    let mut done = vec![false; nc];

    // Column permutation I_[y] → I_[πy] realized by g(π).
    let col_perm = |p: usize, y: usize, rows: &[Vec<RowId>], row_maps: &[HashMap<RowId, RowId>], row_pos: &HashMap<RowId, usize>| -> Vec<usize> {
        rows[y].iter().map(|r| row_pos[&row_maps[p][r]]).collect()
    };

    for &c in &order {
        if done[c] {
            continue;
        }
        let mut orbit: Vec<usize> = class_perms.iter().map(|cp| cp[c]).collect();
        orbit.sort_unstable();
        orbit.dedup();
        if let Some(&e) = atom_edge.get(&c) {
            for &x in &orbit {
                let r: RowId = (0, x as u32, x as u32);
                rows[x] = vec![r];
                row_pos.insert(r, 0);
                let ex = atom_edge[&x];
                let lab: Labels = vec![rowid_label(r, sp, &atom_edge)].into();
                m[x] = Some(F2Matrix::from_rows(lab, e_labels.clone(), vec![BitVec::unit(ne, ex)])?);
                done[x] = true;
            }
            let _ = e;
            for (p, cp) in class_perms.iter().enumerate() {
                for &x in &orbit {
                    row_maps[p].insert((0, x as u32, x as u32), (0, cp[x] as u32, cp[x] as u32));
                }
            }
            continue;
        }

        // N blocks for every pair ([x'], [y']) with [x'] in the orbit.
        for &x in &orbit {
            for &y in &components[x].clone() {
                if nblocks.contains_key(&(x, y)) {
                    continue;
                }
                primers.push((x, y));
                let my = m[y].as_ref().unwrap();
                let stab_e = hfs::stab_e(sp, comp_sets[&(x, y)], cap)?;
                let delta = my.image(&F2Subspace::full(e_labels.clone()))?;
                let gamma = my.image(&stab_e)?;
                let n0 = kernel_matrix(&gamma, &delta)?;
                let closure: Vec<Vec<usize>> = (0..stab.len())
                    .filter(|&p| class_perms[p][x] == x && class_perms[p][y] == y)
                    .map(|p| col_perm(p, y, &rows, &row_maps, &row_pos))
                    .collect();
                let n1 = symmetric_closure(&n0, &closure, Some(&delta))?;
                let pair_group: Vec<Vec<usize>> = (0..stab.len())
                    .filter(|&p| class_perms[p][x] == x && class_perms[p][y] == y)
                    .map(|p| stab[p].clone())
                    .collect();
                let basis_index = symmetric_basis(&stab_e, &pair_group).ok().map(|b| b.stab_index);
                let kernel_rows = n0.nrows();
                for p in 0..stab.len() {
                    let (x2, y2) = (class_perms[p][x], class_perms[p][y]);
                    if nblocks.contains_key(&(x2, y2)) {
                        continue;
                    }
                    let cpm = col_perm(p, y, &rows, &row_maps, &row_pos);
                    let data: Vec<BitVec> = n1.rows().iter().map(|r| r.permuted(&cpm)).collect();
                    let rl: Labels =
                        (0..data.len()).map(|k| rowid_label((k as u32, x2 as u32, y2 as u32), sp, &atom_edge)).collect::<Vec<_>>().into();
                    let cl: Labels = m[y2].as_ref().unwrap().row_labels().clone();
                    let mat = F2Matrix::from_rows(rl, cl, data)?;
                    let stab2 = if p == 0 { stab_e.clone() } else { hfs::stab_e(sp, comp_sets[&(x2, y2)], cap)? };
                    let nm = mat.mul(m[y2].as_ref().unwrap())?;
                    if nm.kernel() != stab2 {
                        return Err(Error::Inconsistent(format!("Ker(N·M) differs from the component stabilizer at ({x2},{y2})")));
                    }
                    nblocks.insert(
                        (x2, y2),
                        NBlock {
                            matrix: mat,
                            primer: (x, y),
                            transport: p,
                            kernel_rows: if p == 0 { kernel_rows } else { 0 },
                            stab: stab2,
                            basis_index,
                        },
                    );
                }
            }
        }

        // M blocks.
        for &x in &orbit {
            let mut rl = Vec::new();
            let mut data = Vec::new();
            for &y in &components[x] {
                let nb = &nblocks[&(x, y)];
                let my = m[y].as_ref().unwrap();
                for k in 0..nb.matrix.nrows() {
                    let r: RowId = (k as u32, x as u32, y as u32);
                    row_pos.insert(r, rl.len());
                    rl.push(r);
                    let mut v = BitVec::zeros(ne);
                    for j in nb.matrix.row(k).iter_ones() {
                        v.xor_assign(my.row(j));
                    }
                    data.push(v);
                }
            }
            let lab: Labels = rl.iter().map(|&r| rowid_label(r, sp, &atom_edge)).collect::<Vec<_>>().into();
            let mx = F2Matrix::from_rows(lab, e_labels.clone(), data)?;
            if mx.kernel() != hfs::stab_e(sp, classes[x][0], cap)? {
                return Err(Error::Inconsistent(format!("Ker(M) differs from Stab_E at class {x}")));
            }
            rows[x] = rl;
            m[x] = Some(mx);
            done[x] = true;
        }

        // Row maps by the duplicate-rank rule.
        for p in 0..stab.len() {
            for &x in &orbit {
                for &y in &components[x] {
                    let (x2, y2) = (class_perms[p][x], class_perms[p][y]);
                    let src = &nblocks[&(x, y)].matrix;
                    let dst = &nblocks[&(x2, y2)].matrix;
                    let cpm = col_perm(p, y, &rows, &row_maps, &row_pos);
                    for k in 0..src.nrows() {
                        let r = src.row(k);
                        let t = (0..k).filter(|&i| src.row(i) == r).count();
                        let img = r.permuted(&cpm);
                        let l = (0..dst.nrows())
                            .filter(|&i| *dst.row(i) == img)
                            .nth(t)
                            .ok_or_else(|| Error::Inconsistent(format!("no matching row for ({k},{x},{y}) under a stabilizer element")))?;
                        row_maps[p].insert((k as u32, x as u32, y as u32), (l as u32, x2 as u32, y2 as u32));
                    }
                }
            }
        }
    }

    let gadgets = GadgetMatrices {
        classes,
        root_class,
        components,
        rows,
        m: m.into_iter().map(|x| x.unwrap()).collect(),
        n: nblocks,
        stab_edge_perms: stab,
        class_perms,
        row_maps,
        primers,
        row_pos,
    };
    gadgets.verify_equivariance()?;
    let (circuit, gate_rows, total_gates) = assemble(sp, &gadgets, &atom_edge)?;
    Ok(GeneralizedCircuit { circuit, gadgets, gate_rows, total_gates })
}

fn assemble(sp: &EdgeSpace, gm: &GadgetMatrices, atom_edge: &HashMap<usize, usize>) -> Result<(XorCircuit, Vec<RowId>, usize)> {
    let all: Vec<RowId> = gm.rows.iter().flatten().copied().collect();
    let total = all.len();
    let mroot = &gm.m[gm.root_class];
    if mroot.nrows() == 0 {
        return Err(Error::Validation("μ is fixed by every flip; the circuit has no root".into()));
    }
    let best = (0..mroot.nrows()).max_by_key(|&i| (mroot.row(i).count_ones(), std::cmp::Reverse(i))).unwrap();
    let root = gm.rows[gm.root_class][best];
    let kids = |r: RowId| -> Vec<RowId> {
        if atom_edge.contains_key(&(r.1 as usize)) && r.1 == r.2 {
            return Vec::new();
        }
        let nb = &gm.n[&(r.1 as usize, r.2 as usize)].matrix;
        nb.row(r.0 as usize).iter_ones().map(|j| gm.rows[r.2 as usize][j]).collect()
    };
    let mut index: HashMap<RowId, usize> = HashMap::from([(root, 0)]);
    let mut gates = vec![root];
    let mut i = 0;
    while i < gates.len() {
        for k in kids(gates[i]) {
            if !index.contains_key(&k) {
                index.insert(k, gates.len());
                gates.push(k);
            }
        }
        i += 1;
    }
    let names: Vec<String> = gates.iter().map(|&r| rowid_label(r, sp, atom_edge)).collect();
    let children: Vec<Vec<usize>> = gates.iter().map(|&r| kids(r).into_iter().map(|k| index[&k]).collect()).collect();
    let leaf_label: Vec<Option<usize>> = gates
        .iter()
        .map(|&r| if r.1 == r.2 { atom_edge.get(&(r.1 as usize)).copied() } else { None })
        .collect();
    let c = XorCircuit::from_parts(names, children, 0, leaf_label, sp.labels().clone())?;
    let sens = c.sensitivities();
    for (g, &r) in gates.iter().enumerate() {
        if sens[g] != *gm.m[r.1 as usize].row(gm.row_pos[&r]) {
            return Err(Error::Inconsistent("gate sensitivity differs from its M row".into()));
        }
    }
    Ok((c, gates, total))
}

impl GeneralizedCircuit {
    /// Per class: whether `Ker(M[x])` equals the kernel of the corresponding `C(μ)` gate.
    pub fn class_kernels(&self) -> Vec<F2Subspace> {
        self.gadgets.m.iter().map(F2Matrix::kernel).collect()
    }

    /// `|𝒳(root)| · fan_in_dim ≥ |sup_CFI(μ)|`.
    pub fn sensitivity_bound_holds(&self, sup_size: usize) -> bool {
        let root = self.circuit.sensitivity(self.circuit.root()).count_ones();
        root * self.circuit.fan_in_dim() >= sup_size
    }
}

/// Report for the counterexample space `Γ_n`.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub n: usize,
    pub t: usize,
    pub parts: Vec<Vec<usize>>,
    pub dim: usize,
    pub codim: usize,
    pub group_order: String,
    pub invariant: bool,
    /// Minimum over all basis pairs `B_Γ ⊆ B` of the index of their joint stabilizer
    /// (computed for `n ≤ 4`).
    pub min_basis_index: Option<usize>,
}

/// `Γ_n`: the direct sum of even-weight spaces on `⌈log₂ n⌉` equal even parts of
/// `[t(n)]`, with `t(n)` the next multiple of `2⌈log₂ n⌉` at or above `n`, and the
/// setwise stabilizer `G_n` of that partition.
pub fn counterexample_space(n: usize) -> Result<(F2Subspace, PermGroup, CounterexampleReport)> {
    if !(4..=32).contains(&n) {
        return Err(Error::Parameter(format!("n must be in 4..=32, got {n}")));
    }
    let p = (usize::BITS - (n - 1).leading_zeros()) as usize;
    let t = n.div_ceil(2 * p) * 2 * p;
    let s = t / p;
    let parts: Vec<Vec<usize>> = (0..p).map(|i| (i * s..(i + 1) * s).collect()).collect();
    let amb = labels((1..=t).map(|i| i.to_string()))?;
    let mut gens_v = Vec::new();
    for part in &parts {
        for w in part.windows(2) {
            gens_v.push(BitVec::from_indices(t, [w[0], w[1]]));
        }
    }
    let gamma = F2Subspace::span_bits(amb.clone(), gens_v);
    let mut gens = Vec::new();
    for part in &parts {
        gens.push(Perm::transposition(t, part[0], part[1]));
        gens.push(Perm::cycle(t, part));
    }
    if p > 1 {
        let block_swap: Vec<usize> = (0..t).map(|i| if i < 2 * s { (i + s) % (2 * s) } else { i }).collect();
        gens.push(Perm::from_usize(&block_swap)?);
        let block_cycle: Vec<usize> = (0..t).map(|i| (i + s) % t).collect();
        gens.push(Perm::from_usize(&block_cycle)?);
    }
    let group = PermGroup::new(t, gens.clone())?;
    let invariant = gens.iter().all(|g| {
        let img = g.images();
        gamma.basis().iter().all(|v| gamma.contains_bits(&v.permuted(&img)))
    });
    let fact = |k: usize| (1..=k).fold(BigUint::from(1u32), |a, i| a * i);
    let order = fact(s).pow(p as u32) * fact(p);
    let min_basis_index = if t <= 4 { Some(min_joint_stabilizer_index(&gamma, &group)?) } else { None };
    let report = CounterexampleReport {
        n,
        t,
        parts: parts.iter().map(|p| p.iter().map(|i| i + 1).collect()).collect(),
        dim: gamma.dim(),
        codim: gamma.codim(),
        group_order: order.to_string(),
        invariant,
        min_basis_index,
    };
    Ok((gamma, group, report))
}

/// Exhaustive minimum of `[G : Stab_G(B_Γ) ∩ Stab_G(B)]` over all bases `B_Γ` of `Γ` and
/// all extensions `B ⊇ B_Γ` to the ambient space.
pub fn min_joint_stabilizer_index(gamma: &F2Subspace, group: &PermGroup) -> Result<usize> {
    let t = gamma.ambient().len();
    if t > 6 {
        return Err(Error::Parameter("exhaustive basis search is limited to 6 coordinates".into()));
    }
    let elems: Vec<Vec<usize>> = group.enumerate(100_000)?.list().iter().map(Perm::images).collect();
    let nonzero_g: Vec<BitVec> = gamma.elements().into_iter().filter(|v| !v.is_zero()).collect();
    let all: Vec<BitVec> = (1u64..1 << t).map(|m| BitVec::from_mask(t, m)).collect();
    let d = gamma.dim();
    let amb = gamma.ambient().clone();
    let mut best = usize::MAX;
    for bg in subsets(&nonzero_g, d) {
        if F2Subspace::span_bits(amb.clone(), bg.clone()).dim() != d {
            continue;
        }
        let rest: Vec<BitVec> = all.iter().filter(|v| !gamma.contains_bits(v)).cloned().collect();
        for ext in subsets(&rest, t - d) {
            let mut b = bg.clone();
            b.extend(ext);
            if F2Subspace::span_bits(amb.clone(), b.clone()).dim() != t {
                continue;
            }
            let st = set_stabilizer_count(&elems, &[&bg, &b]);
            best = best.min(elems.len() / st);
            if best == 1 {
                return Ok(1);
            }
        }
    }
    Ok(best)
}

fn subsets<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec<T: Clone>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i].clone());
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hfs::parity_set;
    use crate::xorcircuit::from_hfs;
    use std::sync::Arc;

    fn amb(n: usize) -> Labels {
        labels((0..n).map(|i| format!("c{i}"))).unwrap()
    }

    #[test]
    fn kernel_matrix_examples() {
        let a = amb(2);
        let full = F2Subspace::full(a.clone());
        assert_eq!(kernel_matrix(&full, &full).unwrap().nrows(), 0);
        let even = F2Subspace::span_bits(a.clone(), vec![BitVec::ones(2)]);
        let n = kernel_matrix(&even, &full).unwrap();
        assert_eq!(n.rows(), &[BitVec::ones(2)]);
        let zero = F2Subspace::zero(a.clone());
        let n = kernel_matrix(&zero, &full).unwrap();
        assert_eq!(n.nrows(), 2);
        assert_eq!(n.kernel().intersect(&full).unwrap(), zero);
        assert!(matches!(kernel_matrix(&full, &even), Err(Error::Validation(_))));
    }

    #[test]
    fn closure_examples() {
        let n = F2Matrix::from_rows(row_labels(1), amb(2), vec![BitVec::unit(2, 0)]).unwrap();
        assert_eq!(symmetric_closure(&n, &[], None).unwrap(), n);
        let c = symmetric_closure(&n, &[vec![0, 1], vec![1, 0]], None).unwrap();
        assert_eq!(c.rows(), &[BitVec::unit(2, 0), BitVec::unit(2, 1)]);

        let n3 = F2Matrix::from_rows(row_labels(1), amb(3), vec![BitVec::from_indices(3, [0, 1])]).unwrap();
        let sym3: Vec<Vec<usize>> = PermGroup::symmetric(3).enumerate(10).unwrap().list().iter().map(Perm::images).collect();
        let c = symmetric_closure(&n3, &sym3, None).unwrap();
        assert_eq!(c.nrows(), 3);
        let pairs: Vec<F2Subspace> = [[0, 1], [0, 2], [1, 2]]
            .iter()
            .map(|p| F2Matrix::from_rows(row_labels(1), amb(3), vec![BitVec::from_indices(3, *p)]).unwrap().kernel())
            .collect();
        let inter = pairs[0].intersect(&pairs[1]).unwrap().intersect(&pairs[2]).unwrap();
        assert_eq!(c.kernel(), inter);
        assert_eq!(inter.dim(), 1);
    }

    #[test]
    fn decompose_examples() {
        let a = amb(3);
        let hyper = F2Subspace::span_bits(a.clone(), vec![BitVec::unit(3, 1), BitVec::unit(3, 2)]);
        assert_eq!(decompose_stab(&hyper), Some((vec![1, 2], vec![0])));
        let even = F2Subspace::span_bits(a.clone(), vec![BitVec::from_indices(3, [0, 1]), BitVec::from_indices(3, [1, 2])]);
        assert_eq!(decompose_stab(&even), Some((vec![], vec![0, 1, 2])));
        let (g4, _, _) = counterexample_space(4).unwrap();
        assert_eq!(decompose_stab(&g4), None);
    }

    #[test]
    fn symmetric_basis_examples() {
        let a = amb(3);
        let gamma = F2Subspace::span_bits(a.clone(), vec![BitVec::unit(3, 0), BitVec::from_indices(3, [1, 2])]);
        let b = symmetric_basis(&gamma, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(b.gamma_basis, vec![BitVec::unit(3, 0), BitVec::from_indices(3, [1, 2])]);
        assert_eq!(b.basis.last().unwrap(), &BitVec::unit(3, 1));
        assert!(symmetric_basis(&F2Subspace::full(a.clone()), &[]).is_err());

        let even = F2Subspace::span_bits(a, vec![BitVec::from_indices(3, [0, 1]), BitVec::from_indices(3, [1, 2])]);
        let sym3: Vec<Vec<usize>> = PermGroup::symmetric(3).enumerate(10).unwrap().list().iter().map(Perm::images).collect();
        assert_eq!(symmetric_basis(&even, &sym3).unwrap().stab_index, 3);
    }

    #[test]
    fn counterexample_examples() {
        let (g, grp, r) = counterexample_space(4).unwrap();
        assert_eq!((g.dim(), g.codim()), (2, 2));
        assert_eq!(grp.order(1000).unwrap(), 8);
        assert_eq!(r.parts, vec![vec![1, 2], vec![3, 4]]);
        assert!(r.invariant);
        assert!(r.min_basis_index.unwrap() >= 2);
        for n in [8, 16] {
            let (g, _, r) = counterexample_space(n).unwrap();
            assert!(r.invariant);
            assert_eq!(g.codim(), r.parts.len());
        }
        assert_eq!(counterexample_space(8).unwrap().2.t, 12);
        assert!(counterexample_space(3).is_err());
    }

    fn efg() -> EdgeSpace {
        EdgeSpace::free(labels(["e", "f", "g"]).unwrap())
    }

    #[test]
    fn generalized_matches_quotient_on_parity_set() {
        let sp = efg();
        let mu = parity_set(&sp, &[2, 1, 0]).unwrap().0;
        let gc = build_generalized_circuit(&sp, mu, &[], 20).unwrap();
        let hc = from_hfs(&sp, mu, 20, false).unwrap();
        assert_eq!(gc.circuit.sensitivity_labels(gc.circuit.root()), ["e", "f", "g"]);
        for (c, cl) in gc.gadgets.classes.iter().enumerate() {
            let g = hc.gate_of(cl[0]).unwrap();
            assert_eq!(gc.gadgets.m[c].kernel(), hc.circuit.gate_matrix(g).kernel());
        }
        assert_eq!(gc.circuit.fan_in_dim(), hc.circuit.fan_in_dim());
        gc.gadgets.verify_homomorphism().unwrap();
    }

    #[test]
    fn generalized_on_non_symmetric_set() {
        let g = Arc::new(BaseGraph::cycle(3).unwrap());
        let sp = EdgeSpace::from_graph(g.clone());
        let mb = parity_set(&sp, &[2, 1]).unwrap().0;
        let e0 = sp.atom(0, 0);
        let mu = Hf::set([Hf::set([mb, e0])]);
        let group = edge_perms(&g, &g.automorphisms(100).unwrap()).unwrap();
        let gc = build_generalized_circuit(&sp, mu, &group, 20).unwrap();
        let comp = Hf::set([mb, e0]);
        let root_comp = gc.gadgets.components[gc.gadgets.root_class][0];
        let nm = gc.gadgets.nm(gc.gadgets.root_class, root_comp).unwrap();
        assert_eq!(nm.kernel(), hfs::stab_e(&sp, Hf::set([comp]), 20).unwrap());
        let sup = hfs::min_cfi_support(&sp, mu).unwrap().count_ones();
        assert!(gc.sensitivity_bound_holds(sup));
        assert_eq!(gc.gadgets.n[&(gc.gadgets.root_class, root_comp)].matrix.nrows(), 2);
    }

    #[test]
    fn generalized_atom_and_square() {
        let sp = efg();
        let gc = build_generalized_circuit(&sp, sp.atom(1, 0), &[], 20).unwrap();
        assert_eq!(gc.circuit.len(), 1);
        let g = Arc::new(BaseGraph::hypercube(2).unwrap());
        let sp = EdgeSpace::from_graph(g.clone());
        let group = edge_perms(&g, &g.automorphisms(100).unwrap()).unwrap();
        let mu = parity_set(&sp, &[0, 1, 2, 3]).unwrap().0;
        let gc = build_generalized_circuit(&sp, mu, &group, 20).unwrap();
        assert_eq!(gc.circuit.sensitivity(gc.circuit.root()).count_ones(), 4);
        gc.gadgets.verify_homomorphism().unwrap();
        assert!(gc.gadgets.to_json()["n"].as_array().unwrap().len() >= 3);
    }
}
