//! Named verification suites. Each suite is a list of independent checks that run on a
//! worker pool; the report is ordered by check tag and instance.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use cfiforge::cfi::{self, apply_flip, build_cfi, cfi_query, expected_node_count, find_isomorphism, Parity};
use cfiforge::f2::labels;
use cfiforge::genconstruct::{build_generalized_circuit, counterexample_space, edge_perms};
use cfiforge::graphs::BaseGraph;
use cfiforge::hfs::{self, parity_set, EdgeSpace, Hf};
use cfiforge::perm::{self, Partition, PermGroup};
use cfiforge::sampling;
use cfiforge::symanalysis::{circuit_automorphisms, even_path_audit, halved_hypercube_circuit, position_label_map, DEFAULT_GATE_CAP};
use cfiforge::xorcircuit::from_hfs;
use cfiforge::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

pub const SUITES: &[&str] = &["cfi-core", "hfs-orbits", "circuit-kernel", "generalized", "partitions", "even-paths"];

/// Size limits shared by all checks.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Caps {
    pub group: usize,
    pub support: usize,
    pub paths: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { group: perm::DEFAULT_GROUP_CAP, support: hfs::DEFAULT_SUPPORT_CAP, paths: 1_000_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub tag: String,
    pub instance: String,
    pub pass: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("suite,tag,instance,pass,detail\n");
        for c in &self.checks {
            s.push_str(&format!("{},{},{},{},{}\n", self.suite, csv_field(&c.tag), csv_field(&c.instance), c.pass, csv_field(&c.detail)));
        }
        s
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

type CheckFn = Box<dyn Fn() -> Result<(bool, String)> + Send + Sync>;

struct Check {
    tag: &'static str,
    instance: String,
    run: CheckFn,
}

fn check(tag: &'static str, instance: impl Into<String>, run: impl Fn() -> Result<(bool, String)> + Send + Sync + 'static) -> Check {
    Check { tag, instance: instance.into(), run: Box::new(run) }
}

/// Runs one suite. Errors from a check, including cap violations, become failures of
/// that check. Timings are recorded only when `timings` is set, so reports are
/// byte-identical for equal seeds and caps otherwise.
pub fn run_suite(name: &str, seed: u64, caps: Caps, timings: bool) -> Result<SuiteReport> {
    let checks = match name {
        "cfi-core" => cfi_core(seed),
        "hfs-orbits" => hfs_orbits(caps),
        "circuit-kernel" => circuit_kernel(caps),
        "generalized" => generalized(caps),
        "partitions" => partitions(seed, caps),
        "even-paths" => even_paths(caps),
        _ => return Err(Error::Parameter(format!("unknown suite {name:?}; expected one of {}", SUITES.join(", ")))),
    };
    let mut results: Vec<CheckResult> = checks
        .par_iter()
        .map(|c| {
            let t = Instant::now();
            let (pass, detail) = match (c.run)() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult {
                tag: c.tag.to_string(),
                instance: c.instance.clone(),
                pass,
                detail,
                elapsed_ms: timings.then(|| t.elapsed().as_secs_f64() * 1e3),
            }
        })
        .collect();
    results.sort_by(|a, b| (&a.tag, &a.instance).cmp(&(&b.tag, &b.instance)));
    Ok(SuiteReport { suite: name.to_string(), seed, checks: results })
}

fn free_space(k: usize) -> EdgeSpace {
    EdgeSpace::free(labels((0..k).map(|i| format!("e{i}"))).expect("distinct labels"))
}

fn parity_on(sp: &EdgeSpace, k: usize) -> Result<Hf> {
    Ok(parity_set(sp, &(0..k).collect::<Vec<_>>())?.0)
}

fn cfi_core(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push(check("node-count", format!("hypercube:{n}"), move || {
            let g = Arc::new(BaseGraph::hypercube(n)?);
            let mut r = sampling::rng(seed ^ n as u64);
            let mut ok = true;
            for _ in 0..8 {
                let s: Vec<usize> = sampling::random_subset(&mut r, g.num_vertices()).iter_ones().collect();
                ok &= build_cfi(g.clone(), &s)?.num_nodes() == expected_node_count(&g);
            }
            Ok((ok, format!("{} nodes expected", expected_node_count(&g))))
        }));
        out.push(check("parity-query", format!("hypercube:{n}"), move || {
            let g = BaseGraph::hypercube(n)?;
            let mut r = sampling::rng(seed.wrapping_add(17 * n as u64));
            let mut ok = true;
            for _ in 0..20 {
                let s: Vec<usize> = sampling::random_subset(&mut r, g.num_vertices()).iter_ones().collect();
                let want = if s.len() % 2 == 1 { Parity::Odd } else { Parity::Even };
                ok &= cfi_query(&g, &s)? == want;
            }
            Ok((ok, "20 random odd sets".into()))
        }));
        out.push(check("flip-group-law", format!("hypercube:{n}"), move || {
            let g = Arc::new(BaseGraph::hypercube(n)?);
            let s = build_cfi(g.clone(), &[])?;
            let mut r = sampling::rng(seed.wrapping_mul(31).wrapping_add(n as u64));
            let mut ok = true;
            for _ in 0..10 {
                let f1 = sampling::random_subset(&mut r, g.num_edges());
                let f2 = sampling::random_subset(&mut r, g.num_edges());
                let f12 = f1.xor(&f2);
                ok &= s.nodes().iter().all(|x| apply_flip(&g, &f1, &apply_flip(&g, &f2, x)) == apply_flip(&g, &f12, x));
            }
            Ok((ok, "10 random flip pairs".into()))
        }));
    }
    for n in 2..=3 {
        out.push(check("isomorphism-iff-parity", format!("hypercube:{n}"), move || {
            let g = Arc::new(BaseGraph::hypercube(n)?);
            let group = g.automorphisms(10_000)?;
            let mut r = sampling::rng(seed.wrapping_add(101 * n as u64));
            let mut ok = true;
            for _ in 0..4 {
                let s: Vec<usize> = sampling::random_subset(&mut r, g.num_vertices()).iter_ones().collect();
                let t: Vec<usize> = sampling::random_subset(&mut r, g.num_vertices()).iter_ones().collect();
                let a = build_cfi(g.clone(), &s)?;
                let b = build_cfi(g.clone(), &t)?;
                let iso = find_isomorphism(&a, &b, &group)?.is_some();
                ok &= iso == (s.len() % 2 == t.len() % 2);
            }
            Ok((ok, format!("{} nodes", expected_node_count(&g))))
        }));
    }
    out.push(check("automorphism-flips", "hypercube:3", || {
        let g = BaseGraph::hypercube(3)?;
        let c = cfi::cfi_automorphism_flips(&g);
        Ok((c.dim() == g.num_edges() - g.num_vertices() + 1, format!("cycle space dim {}", c.dim())))
    }));
    out
}

fn hfs_orbits(caps: Caps) -> Vec<Check> {
    let mut out = Vec::new();
    for k in 1..=6 {
        out.push(check("parity-set-orbits", format!("k={k}"), move || {
            let sp = free_space(k);
            let mu = parity_on(&sp, k)?;
            let sym = hfs::is_cfi_symmetric(&sp, mu, caps.support)?;
            let orb = hfs::orb_e_size(&sp, mu, caps.support)?;
            let sup = hfs::min_cfi_support(&sp, mu)?.count_ones();
            Ok((sym && orb <= 2 && sup == k, format!("symmetric={sym} orb_E={orb} |sup|={sup}")))
        }));
        out.push(check("component-counts", format!("k={k}"), move || {
            let sp = free_space(k);
            let mu = parity_on(&sp, k)?;
            Ok((hfs::check_component_count_consistency(&sp, mu, caps.support)?, String::new()))
        }));
    }
    out.push(check("orbit-stabilizer", "hypercube:2 parity over all edges", move || {
        let g = Arc::new(BaseGraph::hypercube(2)?);
        let sp = EdgeSpace::from_graph(g);
        let mu = parity_on(&sp, 4)?;
        let mut ok = true;
        for x in hfs::tc(mu) {
            let orbit = hfs::orbit_e(&sp, x, caps.support)?.len() as u64;
            ok &= orbit == hfs::orb_e_size(&sp, x, caps.support)?;
        }
        Ok((ok, String::new()))
    }));
    out
}

/// Kernel lemma, fan-in dimension and root sensitivity of `C(μ)` for one parity set.
pub fn kernel_lemma_check(sp: &EdgeSpace, mu: Hf, cap: usize) -> Result<(bool, String)> {
    let hc = from_hfs(sp, mu, cap, false)?;
    let c = &hc.circuit;
    let mut kernels = true;
    for g in 0..c.len() {
        kernels &= c.gate_matrix(g).kernel() == hfs::stab_e(sp, hc.representative(g), cap)?;
    }
    let orb = hfs::max_orb_e(sp, mu, cap)?;
    let dim_ok = 1u64 << c.fan_in_dim() == orb;
    let sup = hfs::min_cfi_support(sp, mu)?;
    let sens_ok = c.sensitivity(c.root()) == sup;
    Ok((kernels && dim_ok && sens_ok, format!("gates={} kernels={kernels} fan_in_dim={} max_orb_E={orb}", c.len(), c.fan_in_dim())))
}

fn circuit_kernel(caps: Caps) -> Vec<Check> {
    let mut out = Vec::new();
    for k in 1..=5 {
        out.push(check("kernel-lemma", format!("free parity k={k}"), move || {
            let sp = free_space(k);
            kernel_lemma_check(&sp, parity_on(&sp, k)?, caps.support)
        }));
    }
    for (name, spec) in [("path", "path:6"), ("cycle", "cycle:6"), ("hypercube", "hypercube:2")] {
        out.push(check("kernel-lemma", format!("{name} all edges"), move || {
            let g = Arc::new(BaseGraph::from_spec(spec)?);
            let sp = EdgeSpace::from_graph(g.clone());
            kernel_lemma_check(&sp, parity_on(&sp, g.num_edges())?, caps.support)
        }));
    }
    out.push(check("path-parity-sensitivity", "free parity k=5", move || {
        let sp = free_space(5);
        let hc = from_hfs(&sp, parity_on(&sp, 5)?, caps.support, false)?;
        let c = &hc.circuit;
        Ok((c.sensitive_inputs_by_paths() == c.sensitivity(c.root()), String::new()))
    }));
    out
}

fn generalized(caps: Caps) -> Vec<Check> {
    let mut out = Vec::new();
    for k in 2..=5 {
        out.push(check("generalized-matches-quotient", format!("free parity k={k}"), move || {
            let sp = free_space(k);
            let mu = parity_on(&sp, k)?;
            let gc = build_generalized_circuit(&sp, mu, &[], caps.support)?;
            let hc = from_hfs(&sp, mu, caps.support, false)?;
            let mut ok = true;
            for (c, cl) in gc.gadgets.classes.iter().enumerate() {
                let g = hc.gate_of(cl[0]).ok_or_else(|| Error::Inconsistent("class without a gate".into()))?;
                ok &= gc.gadgets.m[c].kernel() == hc.circuit.gate_matrix(g).kernel();
            }
            ok &= gc.circuit.fan_in_dim() == hc.circuit.fan_in_dim();
            ok &= gc.circuit.sensitivity(gc.circuit.root()) == hc.circuit.sensitivity(hc.circuit.root());
            Ok((ok, format!("gates={} fan_in_dim={}", gc.circuit.len(), gc.circuit.fan_in_dim())))
        }));
    }
    out.push(check("non-symmetric-set", "cycle:3", move || {
        let g = Arc::new(BaseGraph::cycle(3)?);
        let sp = EdgeSpace::from_graph(g.clone());
        let mb = parity_set(&sp, &[2, 1])?.0;
        let comp = Hf::set([mb, sp.atom(0, 0)]);
        let mu = Hf::set([comp]);
        let group = edge_perms(&g, &g.automorphisms(1000)?)?;
        let gc = build_generalized_circuit(&sp, mu, &group, caps.support)?;
        let sup = hfs::min_cfi_support(&sp, mu)?.count_ones();
        let r = gc.gadgets.root_class;
        let y = gc.gadgets.components[r][0];
        let ker_ok = gc.gadgets.nm(r, y)?.kernel() == hfs::stab_e(&sp, Hf::set([comp]), caps.support)?;
        Ok((ker_ok && gc.sensitivity_bound_holds(sup), format!("gates={} |sup|={sup}", gc.circuit.len())))
    }));
    for n in [4, 8, 16] {
        out.push(check("counterexample-space", format!("n={n}"), move || {
            let (g, _, r) = counterexample_space(n)?;
            let ok = r.invariant && g.codim() == r.parts.len() && r.min_basis_index.is_none_or(|i| i >= 2);
            Ok((ok, format!("t={} codim={} min_index={:?}", r.t, r.codim, r.min_basis_index)))
        }));
    }
    out
}

fn partitions(seed: u64, caps: Caps) -> Vec<Check> {
    let mut out = Vec::new();
    for n in 3..=7 {
        out.push(check("spa-engines", format!("n={n}"), move || {
            let mut r = sampling::rng(seed.wrapping_add(n as u64));
            let mut ok = true;
            let mut orders = BTreeSet::new();
            for _ in 0..20 {
                let g = sampling::random_subgroup(&mut r, n);
                orders.insert(g.order(caps.group)?);
                let ex = perm::coarsest_spa_exhaustive(&g, caps.group)?;
                let me = perm::coarsest_spa_merge(&g, caps.group)?;
                ok &= ex == me && perm::sandwich_check(&g, caps.group)?;
                let sigma = sampling::random_perm(&mut r, n);
                ok &= perm::conjugate_partition_check(&g, &sigma, caps.group)?;
            }
            Ok((ok, format!("20 random subgroups, {} distinct orders", orders.len())))
        }));
    }
    for n in 4..=7 {
        out.push(check("alt-orbit-size", format!("n={n}"), move || {
            let mut ok = true;
            for p in perm::all_partitions(n) {
                let (formula, _) = perm::alt_partition_orbit_size(&p)?;
                ok &= formula == perm::alt_partition_orbit_by_enumeration(&p, caps.group)?.into();
            }
            Ok((ok, format!("{} partitions", perm::all_partitions(n).len())))
        }));
    }
    out.push(check("supporting-partition", "Sym(2) x Sym(2)", move || {
        let g = PermGroup::from_cycle_strings(4, &["(1 2)", "(3 4)"])?;
        let p = perm::coarsest_alt_supporting_partition(&g, caps.group)?.partition;
        Ok((p == Partition::from_one_based(4, &[&[1, 2], &[3, 4]])?, p.to_one_based_string()))
    }));
    out
}

fn even_paths(caps: Caps) -> Vec<Check> {
    let mut out = Vec::new();
    for n in 3..=10 {
        out.push(check("root-insensitive", format!("halved hypercube n={n}"), move || {
            let c = halved_hypercube_circuit(n)?;
            let counts = c.path_counts()?;
            let even = c.leaves().iter().all(|&g| counts[g] % 2 == 0);
            let root = c.sensitivity(c.root()).count_ones();
            Ok((even && root == 0, format!("leaves={} root sensitive to {root}", c.leaves().len())))
        }));
    }
    for n in 4..=6 {
        out.push(check("even-path-audit", format!("halved hypercube n={n} eps=0.3"), move || {
            let c = halved_hypercube_circuit(n)?;
            let aut = circuit_automorphisms(&c, &PermGroup::symmetric(n), |p| position_label_map(&c, p), DEFAULT_GATE_CAP, caps.group)?;
            let a = even_path_audit(&c, &aut, 0.3, caps.group, caps.paths)?;
            Ok((a.passes(), format!("{} gates audited, {} failures", a.audited.len(), a.failures().len())))
        }));
    }
    out
}
