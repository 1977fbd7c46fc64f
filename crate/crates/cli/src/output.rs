//! CSV and JSON renderings. CSV column orders are fixed:
//!
//! * tables: `n,m,d,t,s,total`
//! * classes: `index,dim,rank_seq,cardinality,stabilizer_order,representative,nondegenerate,primitive`
//!
//! JSON documents carry `"schema": 1`.

use std::io::{self, Write};

use bibrace::algebra::{AlternatingAlgebra, BibraceReport, IsoResult};
use bibrace::counting::CountReport;
use bibrace::orbits::OrbitClass;
use bibrace::published::Comparison;
use bibrace::spaces::{RankSequence, SkewSpace};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::json;

pub const SCHEMA: u32 = 1;

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Serialize)]
pub struct ClassRow {
    pub index: usize,
    pub dim: usize,
    pub rank_seq: String,
    pub cardinality: u64,
    pub stabilizer_order: String,
    pub representative: String,
    pub nondegenerate: bool,
    pub primitive: bool,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum Report {
    Summary { classes: usize, primitive: usize },
}

/// `primitive` is `dim == d` for nondegenerate classes when `d` is known.
pub fn class_rows(classes: &[OrbitClass], d: Option<usize>) -> Vec<ClassRow> {
    classes
        .iter()
        .enumerate()
        .map(|(i, c)| ClassRow {
            index: i + 1,
            dim: c.dim(),
            rank_seq: c.rank_seq.to_string(),
            cardinality: c.cardinality,
            stabilizer_order: c.stabilizer_order().to_string(),
            representative: c.representative.to_text(),
            nondegenerate: c.nondegenerate,
            primitive: c.nondegenerate && d.is_none_or(|d| c.dim() == d),
        })
        .collect()
}

fn write_csv<T: Serialize>(rows: &[T]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for r in rows {
        w.serialize(r).map_err(io::Error::other)?;
    }
    w.flush()
}

fn write_json(value: serde_json::Value) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &value)?;
    writeln!(out)
}

#[derive(Serialize)]
struct CountRow {
    n: usize,
    m: usize,
    d: usize,
    t: String,
    s: String,
    total: String,
}

pub fn tables(rows: &[CountReport], format: Format) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(
            &rows
                .iter()
                .map(|r| CountRow {
                    n: r.n,
                    m: r.m,
                    d: r.d,
                    t: r.t.to_string(),
                    s: r.s.to_string(),
                    total: r.total.to_string(),
                })
                .collect::<Vec<_>>(),
        ),
        // counts stay exact: u128 values are written as JSON integers
        Format::Json => write_json(json!({ "schema": SCHEMA, "rows": rows })),
    }
}

pub fn classes(rows: &[ClassRow], summary: Option<Report>, format: Format) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(rows),
        Format::Json => write_json(json!({ "schema": SCHEMA, "classes": rows, "summary": summary })),
    }
}

pub fn census(rows: &[ClassRow], comparison: &[Comparison], format: Format) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(rows),
        Format::Json => {
            let total: u64 = rows.iter().map(|r| r.cardinality).sum();
            write_json(json!({ "schema": SCHEMA, "classes": rows, "total": total, "comparison": comparison }))
        }
    }
}

pub fn verify(
    r: &AlternatingAlgebra,
    report: &BibraceReport,
    alternating: bool,
    roundtrip: bool,
    ann_dim: usize,
    square_dim: usize,
    format: Format,
) -> io::Result<()> {
    let value = json!({
        "schema": SCHEMA,
        "m": r.m(),
        "d": r.d(),
        "bibrace": report.is_bibrace(),
        "identities": report,
        "alternating_nilpotent": alternating,
        "product_roundtrip": roundtrip,
        "nondegenerate": r.is_nondegenerate(),
        "primitive": r.is_primitive(),
        "annihilator_dim": ann_dim,
        "square_dim": square_dim,
    });
    match format {
        Format::Json => write_json(value),
        Format::Csv => {
            let mut out = io::stdout().lock();
            writeln!(out, "property,value")?;
            for (k, v) in value.as_object().expect("object").iter().filter(|(k, _)| *k != "identities") {
                writeln!(out, "{k},{v}")?;
            }
            for (k, v) in serde_json::to_value(report)?.as_object().expect("object") {
                writeln!(out, "{k},{v}")?;
            }
            Ok(())
        }
    }
}

pub fn iso(result: &IsoResult, format: Format) -> io::Result<()> {
    let witness = result.witness.map(|w| {
        let a = w.to_matrix();
        (0..a.rows()).map(|i| format!("{:x}", a.row_words()[i])).collect::<Vec<_>>().join(",")
    });
    match format {
        Format::Json => write_json(json!({
            "schema": SCHEMA,
            "isomorphic": result.isomorphic,
            "method": result.method,
            "witness_rows": witness,
        })),
        Format::Csv => {
            let mut out = io::stdout().lock();
            writeln!(out, "{}", if result.isomorphic { "isomorphic" } else { "not isomorphic" })?;
            if let Some(w) = witness {
                writeln!(out, "witness rows (hex, bit j = column j+1): {w}")?;
            }
            Ok(())
        }
    }
}

pub fn ranks(
    s: &SkewSpace,
    seq: &RankSequence,
    profiles: Option<&std::collections::BTreeSet<RankSequence>>,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Json => write_json(json!({
            "schema": SCHEMA,
            "space": s.to_text(),
            "rank_sequence": seq,
            "sub_profiles": profiles,
        })),
        Format::Csv => {
            let mut out = io::stdout().lock();
            writeln!(out, "{seq}")?;
            if let Some(p) = profiles {
                let list: Vec<String> = p.iter().map(ToString::to_string).collect();
                writeln!(out, "{{{}}}", list.join(","))?;
            }
            Ok(())
        }
    }
}
