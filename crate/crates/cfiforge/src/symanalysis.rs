//! Automorphism groups of XOR circuits over a symmetric base domain, gate stabilizers
//! and their supporting partitions, orbit profiles of root paths, and the even-path audit
//! on halved hypercubes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{cap_error, Error, Result};
use crate::f2::{label_index, sorted_labels};
use crate::perm::{coarsest_alt_supporting_partition, Partition, Perm, PermGroup, SpaEngine};
use crate::xorcircuit::{find_extensions, is_circuit_automorphism, XorCircuit};

pub const DEFAULT_GATE_CAP: usize = 5000;

/// Automorphisms `(σ, π)` of a circuit: `σ` permutes gates, `π` is an element of the base
/// group acting on the domain through a label action.
#[derive(Clone, Debug)]
pub struct CircuitAutGroup {
    pub degree: usize,
    pub pairs: Vec<(Vec<usize>, Perm)>,
}

impl CircuitAutGroup {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Base elements that extend to at least one automorphism.
    pub fn base_projection(&self) -> BTreeSet<Perm> {
        self.pairs.iter().map(|(_, p)| p.clone()).collect()
    }

    /// Checks that the pair list is closed under composition.
    pub fn is_closed(&self) -> bool {
        let set: BTreeSet<(Vec<usize>, Perm)> = self.pairs.iter().cloned().collect();
        self.pairs.iter().all(|(s1, p1)| {
            self.pairs.iter().all(|(s2, p2)| {
                let s: Vec<usize> = s2.iter().map(|&g| s1[g]).collect();
                set.contains(&(s, p1.compose(p2)))
            })
        })
    }
}

/// Permutation of the domain induced by a position permutation on bit-string labels:
/// position `i` of a label moves to position `π(i)`.
pub fn position_label_map(c: &XorCircuit, pi: &Perm) -> Result<Vec<usize>> {
    let idx = label_index(c.domain());
    c.domain()
        .iter()
        .map(|s| {
            let b = s.as_bytes();
            if b.len() != pi.degree() {
                return Err(Error::Structure(format!("label {s:?} is not a string of length {}", pi.degree())));
            }
            let mut t = vec![b'0'; b.len()];
            for (i, &ch) in b.iter().enumerate() {
                t[pi.apply(i)] = ch;
            }
            let t = String::from_utf8(t).expect("ascii");
            idx.get(&t).copied().ok_or_else(|| Error::Structure(format!("image {t:?} of label {s:?} is not in the domain")))
        })
        .collect()
}

/// All automorphisms over `base`, found by backtracking one base element at a time.
/// `label_map` turns a base element into a permutation of the domain.
pub fn circuit_automorphisms<F>(c: &XorCircuit, base: &PermGroup, label_map: F, gate_cap: usize, group_cap: usize) -> Result<CircuitAutGroup>
where
    F: Fn(&Perm) -> Result<Vec<usize>>,
{
    if c.len() > gate_cap {
        return Err(cap_error("circuit gates", gate_cap, c.len()));
    }
    let el = base.enumerate(group_cap)?;
    let mut pairs = Vec::new();
    for pi in el.list() {
        let lm = label_map(pi)?;
        for sigma in find_extensions(c, &lm, group_cap) {
            debug_assert!(is_circuit_automorphism(c, &sigma, &lm));
            pairs.push((sigma, pi.clone()));
            if pairs.len() > group_cap {
                return Err(cap_error("circuit automorphisms", group_cap, pairs.len()));
            }
        }
    }
    Ok(CircuitAutGroup { degree: base.degree(), pairs })
}

/// `Stab_n(g)`: base elements extending to an automorphism that fixes `g`.
pub fn gate_base_stabilizer(aut: &CircuitAutGroup, g: usize) -> Result<PermGroup> {
    let els: BTreeSet<Perm> = aut.pairs.iter().filter(|(s, _)| s[g] == g).map(|(_, p)| p.clone()).collect();
    PermGroup::from_elements(aut.degree, els.into_iter().collect())
}

/// Size profile `ζ`: part size ↦ number of parts of that size.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SizeProfile(pub BTreeMap<usize, usize>);

impl SizeProfile {
    pub fn of(p: &Partition) -> SizeProfile {
        let mut m = BTreeMap::new();
        for s in p.sizes() {
            *m.entry(s).or_default() += 1;
        }
        SizeProfile(m)
    }

    pub fn get(&self, size: usize) -> usize {
        self.0.get(&size).copied().unwrap_or(0)
    }

    /// `Σ_i i·ζ(i)`.
    pub fn total(&self) -> usize {
        self.0.iter().map(|(s, c)| s * c).sum()
    }

    /// `Σ_{i ≥ s} ζ(i)`.
    pub fn parts_at_least(&self, s: usize) -> usize {
        self.0.range(s..).map(|(_, c)| c).sum()
    }

    /// Compact rendering such as `1:2 2:1`.
    pub fn render(&self) -> String {
        self.0.iter().map(|(s, c)| format!("{s}:{c}")).collect::<Vec<_>>().join(" ")
    }
}

/// Per-gate stabilizers and supporting partitions.
#[derive(Clone, Debug)]
pub struct GateSymmetry {
    pub stabilizer_order: Vec<usize>,
    pub spa: Vec<Partition>,
    pub certified: bool,
}

impl GateSymmetry {
    pub fn profile(&self, g: usize) -> SizeProfile {
        SizeProfile::of(&self.spa[g])
    }
}

/// `SP_A(Stab_n(g))` for one gate.
pub fn gate_spa(aut: &CircuitAutGroup, g: usize, cap: usize) -> Result<(Partition, bool)> {
    let st = gate_base_stabilizer(aut, g)?;
    let r = coarsest_alt_supporting_partition(&st, cap)?;
    Ok((r.partition, r.engine == SpaEngine::Exhaustive))
}

/// `ζ[g]`.
pub fn size_profile(aut: &CircuitAutGroup, g: usize, cap: usize) -> Result<SizeProfile> {
    Ok(SizeProfile::of(&gate_spa(aut, g, cap)?.0))
}

/// Stabilizers and supporting partitions of all gates, with the transport check
/// `SP_A(σg) = π(SP_A(g))` over every automorphism.
pub fn gate_symmetry(c: &XorCircuit, aut: &CircuitAutGroup, cap: usize) -> Result<GateSymmetry> {
    let mut stabilizer_order = Vec::with_capacity(c.len());
    let mut spa = Vec::with_capacity(c.len());
    let mut certified = true;
    for g in 0..c.len() {
        let st = gate_base_stabilizer(aut, g)?;
        stabilizer_order.push(st.order(cap)?);
        let r = coarsest_alt_supporting_partition(&st, cap)?;
        certified &= r.engine == SpaEngine::Exhaustive;
        spa.push(r.partition);
    }
    for (sigma, pi) in &aut.pairs {
        for g in 0..c.len() {
            if spa[sigma[g]] != spa[g].apply(pi) {
                return Err(Error::Inconsistent(format!("SP_A is not transported along an automorphism at gate {}", c.name(g))));
            }
        }
    }
    Ok(GateSymmetry { stabilizer_order, spa, certified })
}

/// `Orbit_{(g)}(h)` and `Orbit_{(h)}(g)` for a wire `h → g`.
pub fn parent_child_orbits(c: &XorCircuit, aut: &CircuitAutGroup, g: usize, h: usize) -> Result<(BTreeSet<usize>, BTreeSet<usize>)> {
    if !c.parents(g).contains(&h) {
        return Err(Error::Validation(format!("{} is not a parent of {}", c.name(h), c.name(g))));
    }
    let og: BTreeSet<usize> = aut.pairs.iter().filter(|(s, _)| s[g] == g).map(|(s, _)| s[h]).collect();
    let oh: BTreeSet<usize> = aut.pairs.iter().filter(|(s, _)| s[h] == h).map(|(s, _)| s[g]).collect();
    Ok((og, oh))
}

/// Orbits of the automorphism group on wires, used to name orbit profiles.
#[derive(Clone, Debug)]
pub struct WireOrbits {
    /// Wire `(parent, child)` ↦ orbit id (the index of the smallest wire in the orbit).
    pub id: HashMap<(usize, usize), usize>,
    /// Size of `Orbit_{(g)}(h)` for each wire `(h, g)`.
    pub parent_orbit_size: HashMap<(usize, usize), usize>,
}

pub fn wire_orbits(c: &XorCircuit, aut: &CircuitAutGroup) -> WireOrbits {
    let mut wires: Vec<(usize, usize)> = (0..c.len()).flat_map(|h| c.children(h).iter().map(move |&g| (h, g))).collect();
    wires.sort_unstable();
    let mut id = HashMap::new();
    for (i, &w) in wires.iter().enumerate() {
        if id.contains_key(&w) {
            continue;
        }
        for (s, _) in &aut.pairs {
            id.entry((s[w.0], s[w.1])).or_insert(i);
        }
    }
    let mut parent_orbit_size = HashMap::new();
    for &(h, g) in &wires {
        let n = aut.pairs.iter().filter(|(s, _)| s[g] == g).map(|(s, _)| s[h]).collect::<BTreeSet<_>>().len();
        parent_orbit_size.insert((h, g), n);
    }
    WireOrbits { id, parent_orbit_size }
}

/// Orbit profile of a root path: the wire-orbit ids from the target back to the root.
pub fn orbit_profile(c: &XorCircuit, wo: &WireOrbits, path: &[usize]) -> Result<Vec<usize>> {
    if path.first() != Some(&c.root()) {
        return Err(Error::Validation("the path must start at the root".into()));
    }
    path.windows(2)
        .rev()
        .map(|w| wo.id.get(&(w[0], w[1])).copied().ok_or_else(|| Error::Validation(format!("{}→{} is not a wire", c.name(w[0]), c.name(w[1])))))
        .collect()
}

/// Number of root paths to `target` with a given orbit profile, counted by dynamic
/// programming backwards from the target.
pub fn count_paths_with_profile(c: &XorCircuit, wo: &WireOrbits, profile: &[usize], target: usize) -> u128 {
    let mut cur: HashMap<usize, u128> = HashMap::from([(target, 1)]);
    for &o in profile {
        let mut next: HashMap<usize, u128> = HashMap::new();
        for (&g, &k) in &cur {
            for &h in c.parents(g) {
                if wo.id.get(&(h, g)) == Some(&o) {
                    *next.entry(h).or_default() += k;
                }
            }
        }
        cur = next;
    }
    cur.get(&c.root()).copied().unwrap_or(0)
}

/// `∏ |Orbit_{(h_i)}(h_{i−1})|` along a path.
pub fn profile_product(wo: &WireOrbits, path: &[usize]) -> u128 {
    path.windows(2).map(|w| wo.parent_orbit_size[&(w[0], w[1])] as u128).product()
}

/// Checks the product law for every path to `target` (up to `cap` paths): paths with
/// equal profiles are counted by the product of parent-orbit sizes of any of them.
pub fn verify_profile_law(c: &XorCircuit, wo: &WireOrbits, target: usize, cap: usize) -> Result<BTreeMap<Vec<usize>, u128>> {
    let paths = c.enumerate_paths(target, cap)?;
    let mut by_profile: BTreeMap<Vec<usize>, (u128, Vec<usize>)> = BTreeMap::new();
    for p in &paths {
        let prof = orbit_profile(c, wo, p)?;
        by_profile.entry(prof).or_insert((0, p.clone())).0 += 1;
    }
    let mut out = BTreeMap::new();
    for (prof, (count, witness)) in by_profile {
        let product = profile_product(wo, &witness);
        let dp = count_paths_with_profile(c, wo, &prof, target);
        if product != count || dp != count {
            return Err(Error::Inconsistent(format!(
                "profile law fails at {}: {count} paths, product {product}, recount {dp}",
                c.name(target)
            )));
        }
        out.insert(prof, count);
    }
    Ok(out)
}

/// Strings of length `n` with at most `⌈n/2⌉` ones; the weight-`⌈n/2⌉` strings are
/// leaves labeled by themselves, and each string is wired to the strings with one more 1.
pub fn halved_hypercube_circuit(n: usize) -> Result<XorCircuit> {
    if !(2..=20).contains(&n) {
        return Err(Error::Parameter(format!("n must be in 2..=20, got {n}")));
    }
    let top = n.div_ceil(2) as u32;
    let name = |v: u32| (0..n).map(|i| if v >> (n - 1 - i) & 1 == 1 { '1' } else { '0' }).collect::<String>();
    let mut gates: Vec<u32> = (0..1u32 << n).filter(|v| v.count_ones() <= top).collect();
    gates.sort_by_key(|&v| (v.count_ones(), std::cmp::Reverse(v)));
    let index: HashMap<u32, usize> = gates.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let names: Vec<String> = gates.iter().map(|&v| name(v)).collect();
    let children: Vec<Vec<usize>> = gates
        .iter()
        .map(|&v| if v.count_ones() == top { Vec::new() } else { (0..n).filter(|i| v >> i & 1 == 0).map(|i| index[&(v | 1 << i)]).collect() })
        .collect();
    let domain = sorted_labels(gates.iter().filter(|v| v.count_ones() == top).map(|&v| name(v)))?;
    let di = label_index(&domain);
    let leaf_label = gates.iter().map(|&v| (v.count_ones() == top).then(|| di[&name(v)])).collect();
    XorCircuit::from_parts(names, children, 0, leaf_label, domain)
}

/// One check of the part-size lemma on a wire `h → g`.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaCheck {
    pub parent: String,
    pub child: String,
    /// `(s, Δ(s))` for the nonzero values with `s ≥ εn`.
    pub delta: Vec<(usize, i64)>,
    pub parent_orbit: usize,
    pub violations: Vec<String>,
}

/// Checks `|Δ(s)| ≤ 2`, the neighbour patterns and their parity implications. When some
/// value is `±2`, every other nonzero value must be one of its neighbours; otherwise every
/// `±1` needs a compensating neighbour of opposite sign. `Δ` is defined on `s ≥ εn`, so
/// a lower neighbour below that threshold is unconstrained.
pub fn delta_taxonomy(zh: &SizeProfile, zg: &SizeProfile, n: usize, eps: f64, parent_orbit: usize) -> (Vec<(usize, i64)>, Vec<String>) {
    let lo = (eps * n as f64).ceil().max(1.0) as usize;
    let d = |s: usize| zh.get(s) as i64 - zg.get(s) as i64;
    let nz: Vec<(usize, i64)> = (lo..=n).map(|s| (s, d(s))).filter(|&(_, v)| v != 0).collect();
    let has_two = nz.iter().any(|&(_, v)| v.abs() == 2);
    let mut bad = Vec::new();
    let even_orbit = parent_orbit % 2 == 0;
    for &(s, v) in &nz {
        let dm = (s > lo).then(|| d(s - 1));
        let dp = d(s + 1);
        match v {
            2 | -2 => {
                let want = -v / 2;
                if dm.is_some_and(|x| x != want) || dp != want {
                    bad.push(format!("Δ({s}) = {v} without Δ(s±1) = {want}"));
                }
                let needs_even = if v == 2 { s % 2 == 1 } else { s % 2 == 0 };
                if needs_even && !even_orbit {
                    bad.push(format!("Δ({s}) = {v} with odd parent orbit {parent_orbit}"));
                }
            }
            1 | -1 if has_two => {
                if dm.is_none_or(|x| x.abs() != 2) && dp.abs() != 2 {
                    bad.push(format!("Δ({s}) ≠ 0 away from the ±2 values"));
                }
            }
            1 | -1 => {
                let m_ok = dm.map(|x| x == -v);
                let p_ok = dp == -v;
                if m_ok == Some(false) && !p_ok {
                    bad.push(format!("Δ({s}) = {v} without a compensating neighbour"));
                }
                let parity_case = if v == 1 { s % 2 == 1 && p_ok } else { s % 2 == 0 && m_ok == Some(true) };
                if parity_case && !even_orbit {
                    bad.push(format!("Δ({s}) = {v} with odd parent orbit {parent_orbit}"));
                }
            }
            _ => bad.push(format!("|Δ({s})| = {} > 2", v.abs())),
        }
    }
    (nz, bad)
}

/// Audit of one gate whose supporting partition has at least two parts of size `≥ εn`.
#[derive(Clone, Debug, Serialize)]
pub struct GateAudit {
    pub gate: String,
    pub spa: String,
    pub profile: SizeProfile,
    pub paths: u128,
    pub even: bool,
    /// Number of distinct orbit profiles among the root paths.
    pub profiles: usize,
    /// For each profile, the first parent orbit (from the gate upwards) of even size.
    pub witnesses: Vec<Option<usize>>,
    /// The even threshold `s` used for the large-part count, if one exists.
    pub threshold: Option<usize>,
    /// Whether `Σ_{i≥s} ζ[h](i) ≥ Σ_{i≥s} ζ[g](i)` on every path wire with an odd parent orbit.
    pub monotone: bool,
    pub delta: Vec<DeltaCheck>,
}

impl GateAudit {
    pub fn passes(&self) -> bool {
        self.even && self.witnesses.iter().all(Option::is_some) && self.delta.iter().all(|d| d.violations.is_empty())
    }
}

/// Result of the even-path audit.
#[derive(Clone, Debug, Serialize)]
pub struct EvenPathAudit {
    pub epsilon: f64,
    pub degree: usize,
    pub group_order: usize,
    pub certified: bool,
    pub root_sensitive: usize,
    pub audited: Vec<GateAudit>,
    /// Every gate with its profile and root-path parity.
    pub rows: Vec<(String, String, bool)>,
}

impl EvenPathAudit {
    pub fn passes(&self) -> bool {
        self.audited.iter().all(GateAudit::passes)
    }

    pub fn failures(&self) -> Vec<&GateAudit> {
        self.audited.iter().filter(|a| !a.passes()).collect()
    }

    /// `gate,profile,odd_paths` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("gate,profile,odd_paths\n");
        for (g, p, odd) in &self.rows {
            s.push_str(&format!("{g},{p},{odd}\n"));
        }
        s
    }
}

/// Runs the even-path audit with threshold `ε`.
pub fn even_path_audit(c: &XorCircuit, aut: &CircuitAutGroup, eps: f64, cap: usize, path_cap: usize) -> Result<EvenPathAudit> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!("ε must lie in (0, 1), got {eps}")));
    }
    let n = aut.degree;
    let sym = gate_symmetry(c, aut, cap)?;
    let wo = wire_orbits(c, aut);
    let counts = c.path_counts()?;
    let lo = (eps * n as f64).ceil() as usize;
    let profiles: Vec<SizeProfile> = (0..c.len()).map(|g| sym.profile(g)).collect();
    let mut audited = Vec::new();
    for g in 0..c.len() {
        let large: Vec<usize> = sym.spa[g].sizes().into_iter().filter(|&s| s as f64 >= eps * n as f64).collect();
        if large.len() < 2 {
            continue;
        }
        let mut sorted = large.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let top2 = sorted[1];
        let threshold = (lo.max(1)..=top2).find(|s| s % 2 == 0);
        let paths = c.enumerate_paths(g, path_cap)?;
        let mut seen: BTreeMap<Vec<usize>, Option<usize>> = BTreeMap::new();
        let mut monotone = true;
        for p in &paths {
            let prof = orbit_profile(c, &wo, p)?;
            if seen.contains_key(&prof) {
                continue;
            }
            let witness = p.windows(2).rev().map(|w| wo.parent_orbit_size[&(w[0], w[1])]).find(|k| k % 2 == 0);
            seen.insert(prof, witness);
            if let Some(s) = threshold {
                for w in p.windows(2) {
                    if wo.parent_orbit_size[&(w[0], w[1])] % 2 == 1 && profiles[w[0]].parts_at_least(s) < profiles[w[1]].parts_at_least(s) {
                        monotone = false;
                    }
                }
            }
        }
        verify_profile_law(c, &wo, g, path_cap)?;
        let delta = c
            .parents(g)
            .iter()
            .map(|&h| {
                let orbit = wo.parent_orbit_size[&(h, g)];
                let (d, violations) = delta_taxonomy(&profiles[h], &profiles[g], n, eps, orbit);
                DeltaCheck { parent: c.name(h).to_string(), child: c.name(g).to_string(), delta: d, parent_orbit: orbit, violations }
            })
            .collect();
        audited.push(GateAudit {
            gate: c.name(g).to_string(),
            spa: sym.spa[g].to_one_based_string(),
            profile: profiles[g].clone(),
            paths: counts[g],
            even: counts[g] % 2 == 0,
            profiles: seen.len(),
            witnesses: seen.into_values().collect(),
            threshold,
            monotone,
            delta,
        });
    }
    let rows = (0..c.len()).map(|g| (c.name(g).to_string(), profiles[g].render(), counts[g] % 2 == 1)).collect();
    Ok(EvenPathAudit {
        epsilon: eps,
        degree: n,
        group_order: aut.base_projection().len(),
        certified: sym.certified,
        root_sensitive: c.sensitivity(c.root()).count_ones(),
        audited,
        rows,
    })
}

/// `Σ_{k ≤ αn} C(n, k)` and the estimate `2^{n·H(α) − ½·log₂ n}`.
pub fn imbalance_count(n: usize, alpha: f64) -> Result<(BigUint, f64)> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::Parameter(format!("α must lie in (0, 1/2], got {alpha}")));
    }
    let kmax = (alpha * n as f64 + 1e-9).floor() as usize;
    let mut term = BigUint::from(1u32);
    let mut sum = BigUint::from(1u32);
    for k in 1..=kmax.min(n) {
        term = term * (n - k + 1) / k;
        sum += &term;
    }
    let h = if alpha >= 0.5 { 1.0 } else { -alpha * alpha.log2() - (1.0 - alpha) * (1.0 - alpha).log2() };
    let est = if n == 0 { 1.0 } else { (n as f64 * h - 0.5 * (n as f64).log2()).exp2() };
    Ok((sum, est))
}
