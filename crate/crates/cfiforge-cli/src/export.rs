//! JSON, DOT and CSV renderings of the library's objects.

use std::fmt;
use std::str::FromStr;

use cfiforge::genconstruct::GadgetMatrices;
use cfiforge::graphs::{BaseGraph, GraphJson};
use cfiforge::hfs::{EdgeSpace, Hf, SupportReport};
use cfiforge::symanalysis::EvenPathAudit;
use cfiforge::xorcircuit::{CircuitJson, XorCircuit};
use cfiforge::{Error, Result};

use crate::suites::{csv_field, SuiteReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parameter(format!("unknown format {s:?}; expected json, dot or csv"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Dot => "dot",
            Format::Csv => "csv",
        })
    }
}

fn unsupported(what: &str, fmt: Format) -> Error {
    Error::Parameter(format!("{what} cannot be exported as {fmt}"))
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

pub fn export_circuit(c: &XorCircuit, fmt: Format) -> Result<String> {
    match fmt {
        Format::Json => Ok(pretty(&c.to_json())),
        Format::Dot => Ok(c.to_dot()),
        Format::Csv => {
            let sens = c.sensitivities();
            let par = c.path_parities();
            let mut s = String::from("gate,children,label,sensitivity,odd_paths\n");
            for g in 0..c.len() {
                let kids: Vec<&str> = c.children(g).iter().map(|&h| c.name(h)).collect();
                let label = c.leaf_label(g).map(|l| c.domain()[l].clone()).unwrap_or_default();
                let x: Vec<&str> = sens[g].iter_ones().map(|i| c.domain()[i].as_str()).collect();
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    csv_field(c.name(g)),
                    csv_field(&kids.join(" ")),
                    csv_field(&label),
                    csv_field(&x.join(" ")),
                    par[g]
                ));
            }
            Ok(s)
        }
    }
}

pub fn import_circuit(text: &str) -> Result<XorCircuit> {
    let j: CircuitJson = serde_json::from_str(text).map_err(|e| Error::Structure(format!("circuit JSON: {e}")))?;
    XorCircuit::from_json(&j)
}

pub fn export_graph(g: &BaseGraph, fmt: Format) -> Result<String> {
    match fmt {
        Format::Json => Ok(pretty(&g.to_json())),
        Format::Dot => Ok(g.to_dot()),
        Format::Csv => Err(unsupported("a graph", fmt)),
    }
}

pub fn import_graph(text: &str) -> Result<BaseGraph> {
    let j: GraphJson = serde_json::from_str(text).map_err(|e| Error::Structure(format!("graph JSON: {e}")))?;
    BaseGraph::from_json(&j)
}

pub fn export_hf(x: Hf, fmt: Format) -> Result<String> {
    match fmt {
        Format::Json => Ok(pretty(&x.to_json())),
        _ => Err(unsupported("a hereditarily finite set", fmt)),
    }
}

pub fn import_hf(text: &str) -> Result<Hf> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Structure(format!("set JSON: {e}")))?;
    Hf::from_json(&v)
}

pub fn export_support_report(r: &SupportReport, sp: &EdgeSpace, fmt: Format) -> Result<String> {
    match fmt {
        Format::Json => Ok(pretty(&r.to_json(sp))),
        Format::Csv => {
            let sup = sp.edge_names(&r.sup_cfi).join(" ");
            let orb_cfi = r.orb_cfi_size.map(|v| v.to_string()).unwrap_or_default();
            Ok(format!(
                "object,sup_cfi,stab_e_dim,orb_e_size,orb_cfi_size\n{},{},{},{},{}\n",
                csv_field(&format!("{:?}", r.object)),
                csv_field(&sup),
                r.stab_e.dim(),
                r.orb_e_size,
                orb_cfi
            ))
        }
        Format::Dot => Err(unsupported("a support report", fmt)),
    }
}

pub fn export_suite(r: &SuiteReport, fmt: Format) -> Result<String> {
    match fmt {
        Format::Json => Ok(pretty(r)),
        Format::Csv => Ok(r.to_csv()),
        Format::Dot => Err(unsupported("a suite report", fmt)),
    }
}

pub fn export_audit(a: &EvenPathAudit, fmt: Format) -> Result<String> {
    match fmt {
        Format::Json => Ok(pretty(a)),
        Format::Csv => Ok(a.to_csv()),
        Format::Dot => Err(unsupported("an audit report", fmt)),
    }
}

pub fn export_gadgets(g: &GadgetMatrices, fmt: Format) -> Result<String> {
    match fmt {
        Format::Json => Ok(pretty(&g.to_json())),
        _ => Err(unsupported("gadget matrices", fmt)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cfiforge::f2::labels;
    use cfiforge::hfs::parity_set;
    use cfiforge::symanalysis::halved_hypercube_circuit;

    #[test]
    fn circuit_round_trip() {
        let c = halved_hypercube_circuit(4).unwrap();
        let text = export_circuit(&c, Format::Json).unwrap();
        let back = import_circuit(&text).unwrap();
        assert_eq!(export_circuit(&back, Format::Json).unwrap(), text);
        assert!(export_circuit(&c, Format::Dot).unwrap().contains("X={"));
        assert_eq!(export_circuit(&c, Format::Csv).unwrap().lines().count(), 12);
    }

    #[test]
    fn hf_and_graph_round_trip() {
        let sp = EdgeSpace::free(labels(["e", "f", "g"]).unwrap());
        let mu = parity_set(&sp, &[2, 1, 0]).unwrap().0;
        assert_eq!(import_hf(&export_hf(mu, Format::Json).unwrap()).unwrap(), mu);
        assert!(export_hf(mu, Format::Csv).is_err());
        let g = BaseGraph::hypercube(2).unwrap();
        let back = import_graph(&export_graph(&g, Format::Json).unwrap()).unwrap();
        assert_eq!(back.edge_labels(), g.edge_labels());
    }

    #[test]
    fn support_report_csv_row() {
        let sp = EdgeSpace::free(labels(["e", "f"]).unwrap());
        let mu = parity_set(&sp, &[0, 1]).unwrap().0;
        let r = SupportReport::new(&sp, mu, 20).unwrap();
        let csv = export_support_report(&r, &sp, Format::Csv).unwrap();
        let row = csv.lines().nth(1).unwrap();
        assert!(row.contains("e f"));
        assert!(export_support_report(&r, &sp, Format::Dot).is_err());
        assert!("xml".parse::<Format>().is_err());
    }
}
