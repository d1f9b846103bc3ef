use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use cfiforge::cfi::{build_cfi_named, cfi_query};
use cfiforge::f2::{label_index, sorted_labels};
use cfiforge::genconstruct::{build_generalized_circuit, edge_perms};
use cfiforge::graphs::{BaseGraph, GraphJson};
use cfiforge::hfs::{self, parity_set, EdgeSpace, Hf, SupportReport};
use cfiforge::perm::PermGroup;
use cfiforge::symanalysis::{circuit_automorphisms, even_path_audit, halved_hypercube_circuit, position_label_map, DEFAULT_GATE_CAP};
use cfiforge::xorcircuit::{from_hfs, XorCircuit};
use cfiforge::{Error, Result};
use cfiforge_cli::export::{self, Format};
use cfiforge_cli::suites::{run_suite, Caps};

#[derive(Parser)]
#[command(name = "cfiforge", version, about = "CFI structures, hereditarily finite sets and symmetric XOR circuits")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Largest permutation group that may be enumerated.
    #[arg(long, global = true, env = "CFIFORGE_CAP_GROUP", default_value_t = cfiforge::perm::DEFAULT_GROUP_CAP)]
    cap_group: usize,
    /// Largest CFI support searched for stabilizers.
    #[arg(long, global = true, env = "CFIFORGE_CAP_SUPPORT", default_value_t = hfs::DEFAULT_SUPPORT_CAP)]
    cap_support: usize,
    /// Largest number of explicitly enumerated paths.
    #[arg(long, global = true, env = "CFIFORGE_CAP_PATHS", default_value_t = 1_000_000)]
    cap_paths: usize,
    #[arg(long, global = true, env = "CFIFORGE_SEED", default_value_t = 1)]
    seed: u64,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true, env = "CFIFORGE_OUT")]
    out: Option<PathBuf>,
    /// Include per-check timings in suite reports.
    #[arg(long, global = true, env = "CFIFORGE_TIMINGS")]
    timings: bool,
}

impl Global {
    fn caps(&self) -> Caps {
        Caps { group: self.cap_group, support: self.cap_support, paths: self.cap_paths }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification suite.
    Suite {
        name: String,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Base graphs.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// CFI structures.
    #[command(subcommand)]
    Cfi(CfiCmd),
    /// Hereditarily finite sets over CFI atoms.
    #[command(subcommand)]
    Hfs(HfsCmd),
    /// XOR circuits.
    #[command(subcommand)]
    Circuit(CircuitCmd),
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Print a base graph such as `hypercube:3`, `path:6` or `cycle:5`.
    Show {
        #[arg(long)]
        base: String,
        #[arg(long, default_value = "json")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum CfiCmd {
    /// Build a CFI structure with the given odd vertices.
    Build {
        #[arg(long)]
        base: String,
        /// Comma-separated vertex names.
        #[arg(long, value_delimiter = ',', default_value = "")]
        odd: Vec<String>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Print `odd` or `even` for a structure written by `cfi build`.
    Query {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum HfsCmd {
    /// The parity set over the given edges; the first edge is the innermost one.
    ParitySet {
        #[arg(long, value_delimiter = ',', required = true)]
        edges: Vec<String>,
        /// Base graph providing the edges; without it the edges are free labels.
        #[arg(long)]
        base: Option<String>,
        /// Print the complementary set instead.
        #[arg(long)]
        tilde: bool,
    },
    /// Supports, stabilizer and orbit sizes of a set.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum CircuitCmd {
    /// Build a circuit from a set.
    FromHfs {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        base: Option<String>,
        /// Use the generalized construction (accepts sets that are not CFI-symmetric).
        #[arg(long)]
        general: bool,
        /// With `--general`, also write the gadget matrices to this file.
        #[arg(long)]
        gadgets: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Summarize a circuit read from JSON.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        dims: bool,
        #[arg(long)]
        sensitivity: bool,
        #[arg(long)]
        paths: bool,
    },
    /// The halved hypercube circuit on `n` positions.
    HalvedHypercube {
        #[arg(short)]
        n: usize,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Even-path audit over the symmetric group acting on label positions.
    Audit {
        #[arg(long)]
        epsilon: f64,
        /// Acting group; only `sym` is supported.
        #[arg(long, default_value = "sym")]
        base: String,
        /// Audit the halved hypercube on `n` positions.
        #[arg(short, conflicts_with = "input")]
        n: Option<usize>,
        /// Audit a circuit read from JSON whose labels are bit strings.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
}

#[derive(Serialize, Deserialize)]
struct CfiFile {
    base: GraphJson,
    odd: Vec<String>,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())))
}

fn write(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Parameter(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Edge space from a base spec, or free labels covering every atom of `x`.
fn edge_space(base: &Option<String>, x: Option<Hf>, extra: &[String]) -> Result<EdgeSpace> {
    if let Some(spec) = base {
        return Ok(EdgeSpace::from_graph(Arc::new(BaseGraph::from_spec(spec)?)));
    }
    let mut names: Vec<String> = extra.to_vec();
    if let Some(x) = x {
        names.extend(hfs::tc(x).into_iter().filter_map(|y| y.as_atom()).map(|(l, _)| l.to_string()));
    }
    names.sort();
    names.dedup();
    Ok(EdgeSpace::free(sorted_labels(names)?))
}

fn symmetric_aut(c: &XorCircuit, base: &str, n: usize, caps: Caps) -> Result<cfiforge::symanalysis::CircuitAutGroup> {
    if base != "sym" {
        return Err(Error::Parameter(format!("unsupported acting group {base:?}; only `sym` is available")));
    }
    circuit_automorphisms(c, &PermGroup::symmetric(n), |p| position_label_map(c, p), DEFAULT_GATE_CAP, caps.group)
}

fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    let caps = g.caps();
    match cli.command {
        Command::Suite { name, format } => {
            let r = run_suite(&name, g.seed, caps, g.timings)?;
            write(&g.out, &export::export_suite(&r, format)?)?;
            if !r.passed() {
                eprintln!("{}: {} of {} checks failed", r.suite, r.failures(), r.checks.len());
            }
            Ok(r.passed())
        }
        Command::Graph(GraphCmd::Show { base, format }) => {
            write(&g.out, &export::export_graph(&BaseGraph::from_spec(&base)?, format)?)?;
            Ok(true)
        }
        Command::Cfi(CfiCmd::Build { base, odd, format }) => {
            let graph = Arc::new(BaseGraph::from_spec(&base)?);
            let odd: Vec<String> = odd.into_iter().filter(|s| !s.is_empty()).collect();
            let refs: Vec<&str> = odd.iter().map(String::as_str).collect();
            let s = build_cfi_named(graph.clone(), &refs)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&CfiFile { base: graph.to_json(), odd }).expect("serializable") + "\n",
                Format::Dot => s.to_dot(),
                Format::Csv => return Err(Error::Parameter("a CFI structure cannot be exported as csv".into())),
            };
            write(&g.out, &text)?;
            Ok(true)
        }
        Command::Cfi(CfiCmd::Query { input }) => {
            let f: CfiFile = serde_json::from_str(&read(&input)?).map_err(|e| Error::Structure(format!("CFI JSON: {e}")))?;
            let graph = BaseGraph::from_json(&f.base)?;
            let odd = f
                .odd
                .iter()
                .map(|v| graph.vertex_index(v).ok_or_else(|| Error::Validation(format!("unknown vertex {v:?}"))))
                .collect::<Result<Vec<_>>>()?;
            write(&g.out, &format!("{}\n", cfi_query(&graph, &odd)?.as_str()))?;
            Ok(true)
        }
        Command::Hfs(HfsCmd::ParitySet { edges, base, tilde }) => {
            let sp = edge_space(&base, None, &edges)?;
            let idx = label_index(sp.labels());
            let ids = edges
                .iter()
                .map(|e| idx.get(e).copied().ok_or_else(|| Error::Parameter(format!("unknown edge {e:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let (mu, mt) = parity_set(&sp, &ids)?;
            write(&g.out, &export::export_hf(if tilde { mt } else { mu }, Format::Json)?)?;
            Ok(true)
        }
        Command::Hfs(HfsCmd::Report { input, base, format }) => {
            let x = export::import_hf(&read(&input)?)?;
            let sp = edge_space(&base, Some(x), &[])?;
            let r = SupportReport::new(&sp, x, g.cap_support)?;
            write(&g.out, &export::export_support_report(&r, &sp, format)?)?;
            Ok(true)
        }
        Command::Circuit(CircuitCmd::FromHfs { input, base, general, gadgets, format }) => {
            let x = export::import_hf(&read(&input)?)?;
            let sp = edge_space(&base, Some(x), &[])?;
            let circuit = if general {
                let group = match sp.graph() {
                    Some(graph) => edge_perms(graph, &graph.automorphisms(g.cap_group)?)?,
                    None => Vec::new(),
                };
                let gc = build_generalized_circuit(&sp, x, &group, g.cap_support)?;
                if let Some(path) = &gadgets {
                    write(&Some(path.clone()), &export::export_gadgets(&gc.gadgets, Format::Json)?)?;
                }
                gc.circuit
            } else {
                if gadgets.is_some() {
                    return Err(Error::Parameter("--gadgets requires --general".into()));
                }
                from_hfs(&sp, x, g.cap_support, false)?.circuit
            };
            write(&g.out, &export::export_circuit(&circuit, format)?)?;
            Ok(true)
        }
        Command::Circuit(CircuitCmd::Analyze { input, dims, sensitivity, paths }) => {
            let c = export::import_circuit(&read(&input)?)?;
            let all = !(dims || sensitivity || paths);
            let mut j = serde_json::json!({ "gates": c.len(), "wires": c.num_wires(), "leaves": c.leaves().len() });
            if all || dims {
                j["fan_in_dim"] = c.fan_in_dim().into();
            }
            if all || sensitivity {
                j["root_sensitivity"] = c.sensitivity_labels(c.root()).into();
            }
            if all || paths {
                let counts = c.path_counts()?;
                let odd: Vec<&str> = c.leaves().into_iter().filter(|&l| counts[l] % 2 == 1).map(|l| c.name(l)).collect();
                j["leaf_paths_total"] = c.leaves().iter().map(|&l| counts[l]).sum::<u128>().to_string().into();
                j["odd_path_leaves"] = odd.into();
                let by_paths: Vec<String> = c.sensitive_inputs_by_paths().iter_ones().map(|i| c.domain()[i].clone()).collect();
                j["sensitive_by_paths"] = by_paths.into();
            }
            write(&g.out, &(serde_json::to_string_pretty(&j).expect("serializable") + "\n"))?;
            Ok(true)
        }
        Command::Circuit(CircuitCmd::HalvedHypercube { n, format }) => {
            write(&g.out, &export::export_circuit(&halved_hypercube_circuit(n)?, format)?)?;
            Ok(true)
        }
        Command::Circuit(CircuitCmd::Audit { epsilon, base, n, input, format }) => {
            let c = match (n, input) {
                (Some(n), None) => halved_hypercube_circuit(n)?,
                (None, Some(p)) => export::import_circuit(&read(&p)?)?,
                _ => return Err(Error::Parameter("give either -n or --in".into())),
            };
            let degree = c.domain().first().map(String::len).unwrap_or(0);
            let aut = symmetric_aut(&c, &base, degree, caps)?;
            let a = even_path_audit(&c, &aut, epsilon, g.cap_group, g.cap_paths)?;
            write(&g.out, &export::export_audit(&a, format)?)?;
            Ok(a.passes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Parameter(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
