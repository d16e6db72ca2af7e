//! Node/edge coefficient tables.
//!
//! Node table: `spin_id,kind,label,h`, preceded by `# key=value` metadata
//! lines (`offset`, `core_count`, `ground`, `gadget_mode`, `source`).
//! Edge table: `spin_i,spin_j,J` with `spin_i < spin_j`. Spin ids are
//! 1-based; floats are written with 17 significant digits.

use std::collections::BTreeMap;

use super::{GadgetMode, GadgetRecord, Hamiltonian, HamiltonianParts};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::numfmt::g17;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamiltonianTables {
    pub nodes: String,
    pub edges: String,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidTable(msg.into())
}

fn gadget_label(g: &GadgetRecord) -> String {
    format!(
        "x{}*x{} K={}",
        g.parent_i + 1,
        g.parent_j + 1,
        g17(g.penalty_weight.to_f64())
    )
}

fn parse_gadget_label(label: &str, ancilla_index: usize) -> Result<GadgetRecord> {
    let err = || bad(format!("malformed ancilla label `{label}`"));
    let (pair, k) = label.split_once(" K=").ok_or_else(err)?;
    let (a, b) = pair.split_once('*').ok_or_else(err)?;
    let var = |s: &str| -> Result<usize> {
        let v: usize = s.strip_prefix('x').and_then(|d| d.parse().ok()).ok_or_else(err)?;
        v.checked_sub(1).ok_or_else(err)
    };
    let k: f64 = k.parse().map_err(|_| err())?;
    Ok(GadgetRecord {
        ancilla_index,
        parent_i: var(a)?,
        parent_j: var(b)?,
        penalty_weight: Dyadic::from_f64(k).ok_or_else(err)?,
    })
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| bad(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 csv"))
}

pub fn export_csv(h: &Hamiltonian) -> Result<HamiltonianTables> {
    let mut nodes = format!(
        "# offset={}\n# core_count={}\n# ground={}\n# gadget_mode={}\n# source={}\n",
        g17(h.offset().to_f64()),
        h.core_count(),
        g17(h.ground().to_f64()),
        h.mode(),
        h.source().replace('\n', " "),
    );
    let gadget_of: BTreeMap<usize, &GadgetRecord> = h.gadgets().iter().map(|g| (g.ancilla_index, g)).collect();
    let mut w = writer();
    w.write_record(["spin_id", "kind", "label", "h"])?;
    for (i, field) in h.fields().iter().enumerate() {
        let (kind, label) = if i < h.core_count() {
            ("core", format!("x{}", i + 1))
        } else {
            let label = gadget_of.get(&i).map(|g| gadget_label(g)).unwrap_or_default();
            ("ancilla", label)
        };
        w.write_record([(i + 1).to_string(), kind.into(), label, g17(field.to_f64())])?;
    }
    nodes.push_str(&finish(w)?);

    let mut w = writer();
    w.write_record(["spin_i", "spin_j", "J"])?;
    for (&(i, j), c) in h.couplings() {
        w.write_record([(i + 1).to_string(), (j + 1).to_string(), g17(c.to_f64())])?;
    }
    Ok(HamiltonianTables {
        nodes,
        edges: finish(w)?,
    })
}

fn parse_f64(s: &str, what: &str) -> Result<Dyadic> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| bad(format!("{what}: `{s}` is not a number")))?;
    Dyadic::from_f64(v).ok_or_else(|| bad(format!("{what}: `{s}` out of range")))
}

pub fn import_csv(tables: &HamiltonianTables) -> Result<Hamiltonian> {
    let mut meta = BTreeMap::new();
    for line in tables.nodes.lines().take_while(|l| l.starts_with('#')) {
        if let Some((k, v)) = line.trim_start_matches('#').trim().split_once('=') {
            meta.insert(k.trim().to_string(), v.to_string());
        }
    }
    let get = |k: &str| meta.get(k).ok_or_else(|| bad(format!("missing metadata `{k}`")));
    let offset = parse_f64(get("offset")?, "offset")?;
    let core_count: usize = get("core_count")?
        .trim()
        .parse()
        .map_err(|_| bad("core_count is not an integer"))?;
    let ground = match meta.get("ground") {
        Some(g) => parse_f64(g, "ground")?,
        None => Dyadic::ZERO,
    };
    let mode = match meta.get("gadget_mode") {
        Some(m) => m.trim().parse()?,
        None => GadgetMode::Corrected,
    };
    let source = meta.get("source").cloned().unwrap_or_default();

    let mut fields = Vec::new();
    let mut gadgets = Vec::new();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(tables.nodes.as_bytes());
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(bad("node row needs 4 columns"));
        }
        let idx = fields.len();
        let id: usize = rec[0].parse().map_err(|_| bad("spin_id is not an integer"))?;
        if id != idx + 1 {
            return Err(bad(format!("spin_id {id} out of sequence (expected {})", idx + 1)));
        }
        match &rec[1] {
            "core" if idx < core_count => {}
            "ancilla" if idx >= core_count => {
                if !rec[2].is_empty() {
                    gadgets.push(parse_gadget_label(&rec[2], idx)?);
                }
            }
            "core" | "ancilla" => return Err(bad(format!("spin {id}: kind `{}` disagrees with core_count", &rec[1]))),
            other => return Err(bad(format!("unknown kind `{other}`"))),
        }
        fields.push(parse_f64(&rec[3], "h")?);
    }
    if fields.len() < core_count {
        return Err(bad("fewer node rows than core_count"));
    }

    let mut couplings = Vec::new();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(tables.edges.as_bytes());
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(bad("edge row needs 3 columns"));
        }
        let i: usize = rec[0].parse().map_err(|_| bad("spin_i is not an integer"))?;
        let j: usize = rec[1].parse().map_err(|_| bad("spin_j is not an integer"))?;
        if i == 0 || j == 0 {
            return Err(bad("spin ids are 1-based"));
        }
        if i == j {
            return Err(bad(format!("self-loop on spin {i}")));
        }
        if i > j {
            return Err(bad(format!("edge ({i},{j}) must have spin_i < spin_j")));
        }
        couplings.push(((i - 1, j - 1), parse_f64(&rec[2], "J")?));
    }

    Hamiltonian::from_parts(HamiltonianParts {
        offset,
        fields,
        couplings,
        core_count,
        gadgets,
        ground,
        mode,
        source,
    })
}
