//! Reports for each engine operation, rendered as JSON or plain text.

use serde_json::{json, Map, Value as Json};

use crate::bundle::Bundle;
use crate::closure::{emit_datalog, ta_blocks_from_program, ta_closure, TaPartition};
use crate::cqa::KeyedRelation;
use crate::error::Result;
use crate::query::{is_ujcq, resolved_answers, rewrite, ConjunctiveQuery, Mode, Provenance};
use crate::relation::{Instance, Position, Value};
use crate::resolve::{enumerate_mris_oracle, fast_mri_family, Bounds};

/// A report in both output formats.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Json,
    pub text: String,
}

fn positions_json(d: &Instance, ps: &[Position]) -> Json {
    ps.iter()
        .map(|&p| Json::from(d.position_label(p)))
        .collect()
}

fn values_json<'a>(vs: impl IntoIterator<Item = &'a Value>) -> Json {
    vs.into_iter().map(|v| Json::from(v.to_string())).collect()
}

fn instance_json(d: &Instance) -> Json {
    let mut out = Map::new();
    for (rel, rs) in d.schema().relations().iter().enumerate() {
        let rows = d
            .tuples(rel)
            .map(|(tid, vals)| json!({"tid": tid.0, "values": values_json(vals)}))
            .collect();
        out.insert(rs.name.clone(), Json::Array(rows));
    }
    Json::Object(out)
}

fn blocks_json(d: &Instance, part: &TaPartition) -> Json {
    (0..part.len())
        .map(|b| {
            let freq: Map<String, Json> = part
                .frequencies(b)
                .iter()
                .map(|(v, n)| (v.to_string(), Json::from(*n)))
                .collect();
            json!({
                "positions": positions_json(d, &part.blocks()[b]),
                "frequencies": freq,
                "candidates": values_json(&part.most_frequent(b)),
            })
        })
        .collect()
}

fn big_json(n: &num_bigint::BigUint) -> Json {
    serde_json::from_str(&n.to_string()).expect("decimal digits")
}

fn instance_text(d: &Instance) -> String {
    let mut out = String::new();
    for (rel, rs) in d.schema().relations().iter().enumerate() {
        for (tid, vals) in d.tuples(rel) {
            let vs: Vec<String> = vals.iter().map(ToString::to_string).collect();
            out.push_str(&format!("  {}#{tid}({})\n", rs.name, vs.join(", ")));
        }
    }
    out
}

fn blocks_text(d: &Instance, part: &TaPartition) -> String {
    let mut out = String::new();
    for (b, block) in part.blocks().iter().enumerate() {
        let ps: Vec<String> = block.iter().map(|&p| d.position_label(p)).collect();
        let cs: Vec<String> = part
            .most_frequent(b)
            .iter()
            .map(ToString::to_string)
            .collect();
        out.push_str(&format!(
            "block {b}: {} -> {{{}}}\n",
            ps.join(" "),
            cs.join(", ")
        ));
    }
    out
}

/// Tractability class with evidence.
pub fn classify(b: &Bundle) -> Report {
    let c = b.mds.classify_on(&b.instance);
    Report {
        json: serde_json::to_value(&c).expect("serializable"),
        text: c.to_text(),
    }
}

/// Closure blocks with frequencies and most frequent values.
pub fn closure(b: &Bundle) -> Report {
    let d = &b.instance;
    let label = b.mds.classify_on(d).label;
    let part = ta_closure(d, &b.mds);
    Report {
        json: json!({"classification": label, "blocks": blocks_json(d, &part)}),
        text: format!("label: {label}\n{}", blocks_text(d, &part)),
    }
}

/// The fast MRI family, with at most `max_materialized` MRIs written out.
pub fn resolve(b: &Bundle, max_materialized: usize) -> Result<Report> {
    let d = &b.instance;
    let fam = fast_mri_family(d, &b.mds)?;
    let (mris, truncated) = fam.materialize(max_materialized);
    let json = json!({
        "classification": fam.label(),
        "blocks": blocks_json(d, fam.partition()),
        "candidates": (0..fam.partition().len())
            .map(|i| values_json(fam.candidates(i)))
            .collect::<Vec<_>>(),
        "mri_count": big_json(&fam.count()),
        "min_change": fam.min_change(),
        "mris": mris.iter().map(instance_json).collect::<Vec<_>>(),
        "truncated": truncated,
    });
    let mut text = format!(
        "label: {}\nmri_count: {}\nmin_change: {}\n{}",
        fam.label(),
        fam.count(),
        fam.min_change(),
        blocks_text(d, fam.partition())
    );
    for (i, x) in mris.iter().enumerate() {
        text.push_str(&format!("mri {i}:\n{}", instance_text(x)));
    }
    Ok(Report { json, text })
}

/// Resolved answers to `q`.
pub fn answers(b: &Bundle, q: &ConjunctiveQuery, mode: Mode, bounds: &Bounds) -> Result<Report> {
    let check = is_ujcq(q, &b.mds);
    let ans = resolved_answers(q, &b.instance, &b.mds, mode, bounds)?;
    let rewritten = match ans.provenance {
        Provenance::Rewrite => Some(rewrite(q, &b.mds)?.to_string()),
        _ => None,
    };
    let json = json!({
        "mode_used": ans.provenance,
        "ujcq": {"ok": check.ok, "witness": check.witness},
        "answers": ans.rows(),
        "rewritten_query": rewritten,
    });
    let mut text = format!("mode_used: {}\n", ans.provenance);
    if let Some(r) = &rewritten {
        text.push_str(&format!("rewritten: {r}\n"));
    }
    for row in ans.rows() {
        text.push_str(&format!("({})\n", row.join(", ")));
    }
    Ok(Report { json, text })
}

/// MRIs by exhaustive chase, with at most `max_materialized` written out.
pub fn oracle(b: &Bundle, bounds: &Bounds, max_materialized: usize) -> Result<Report> {
    let r = enumerate_mris_oracle(&b.instance, &b.mds, bounds)?;
    let shown = &r.mris[..r.mris.len().min(max_materialized)];
    let json = json!({
        "mri_count": r.mris.len(),
        "min_change": r.min_change,
        "resolved": r.resolved,
        "states": r.states,
        "depth": r.depth,
        "mris": shown.iter().map(instance_json).collect::<Vec<_>>(),
        "truncated": shown.len() < r.mris.len(),
    });
    let mut text = format!(
        "mri_count: {}\nmin_change: {}\n",
        r.mris.len(),
        r.min_change
    );
    for (i, x) in shown.iter().enumerate() {
        text.push_str(&format!("mri {i}:\n{}", instance_text(x)));
    }
    Ok(Report { json, text })
}

/// The closure program.
pub fn datalog(b: &Bundle) -> String {
    emit_datalog(&b.instance, &b.mds)
}

/// Blocks of linked positions derived by evaluating the closure program.
pub fn datalog_blocks(b: &Bundle) -> Result<Report> {
    let d = &b.instance;
    let blocks = ta_blocks_from_program(&datalog(b), d)?;
    let json = json!({"blocks": blocks.iter().map(|bl| positions_json(d, bl)).collect::<Vec<_>>()});
    let text = blocks
        .iter()
        .map(|bl| {
            let ps: Vec<String> = bl.iter().map(|&p| d.position_label(p)).collect();
            ps.join(" ") + "\n"
        })
        .collect();
    Ok(Report { json, text })
}

/// Summary of a key-repair export written to `out`.
pub fn cqa_export(kr: &KeyedRelation, out: &std::path::Path) -> Report {
    let repairs = kr
        .groups()
        .values()
        .fold(num_bigint::BigUint::from(1u8), |acc, g| {
            acc * num_bigint::BigUint::from(g.len())
        });
    Report {
        json: json!({
            "rows": kr.rows.len(),
            "repairs": big_json(&repairs),
            "constraint": kr.constraint_text(),
            "out": out.display().to_string(),
        }),
        text: format!("{}\nwrote {}\n", kr.constraint_text(), out.display()),
    }
}
