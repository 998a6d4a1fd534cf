//! JSON renderings of results. Every top-level object carries
//! `"schema": "pda-workbench/1"`; users, rows and symbols are 1-based.

use num_rational::Ratio;
use serde_json::{json, Value};

use crate::bound::{BoundCertificate, SearchReport};
use crate::closed_forms::RatioReport;
use crate::filler::FillOutcome;
use crate::pda::{PdaParams, StarPattern, VerifyResult};
use crate::sim::{DeliveryTranscript, RateMeasurement};

pub const SCHEMA: &str = "pda-workbench/1";

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), Value::from(SCHEMA));
    }
    v
}

pub fn ratio(r: Ratio<u64>) -> Value {
    json!({ "num": r.numer(), "den": r.denom() })
}

pub fn params(p: &PdaParams) -> Value {
    json!({ "users": p.users, "rows": p.rows, "stars": p.stars, "symbols": p.symbols })
}

/// Uncached sets, one list of rows per user.
pub fn placement(p: &StarPattern) -> Value {
    Value::from(
        p.sets()
            .iter()
            .map(|s| s.iter().map(|r| r + 1).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )
}

pub fn certificate(c: &BoundCertificate) -> Value {
    with_schema(json!({
        "value": c.value,
        "rate_bound": ratio(c.rate_bound()),
        "witness": c.witness.one_based(),
        "step_sizes": c.step_sizes,
        "method": c.method.as_str(),
        "exact": c.exact,
    }))
}

pub fn verification(result: &VerifyResult, params: Option<&PdaParams>) -> Value {
    let violations: Vec<Value> = result
        .violations()
        .iter()
        .map(|v| {
            json!({
                "axiom": v.axiom.to_string(),
                "cells": v.cells.iter().map(|&(r, c)| [r + 1, c + 1]).collect::<Vec<_>>(),
                "detail": v.detail,
            })
        })
        .collect();
    with_schema(json!({
        "valid": result.valid(),
        "params": params.map(self::params),
        "violations": violations,
    }))
}

pub fn search(r: &SearchReport) -> Value {
    with_schema(json!({
        "params": { "users": r.params.users, "rows": r.params.rows, "stars": r.params.stars },
        "best_value": r.best_value,
        "rate_bound": ratio(r.rate_bound()),
        "best_pattern": placement(&r.best_pattern),
        "nodes_explored": r.nodes_explored,
        "dedup_hits": r.dedup_hits,
        "exhaustive": r.exhaustive,
    }))
}

pub fn transcript(t: &DeliveryTranscript) -> Value {
    let signals: Vec<Value> = t
        .signals
        .iter()
        .map(|s| {
            json!({
                "id": s.id,
                "terms": s.terms.iter()
                    .map(|t| json!({ "user": t.user + 1, "row": t.row + 1 }))
                    .collect::<Vec<_>>(),
                "payload_hex": hex::encode(&s.payload),
            })
        })
        .collect();
    let log: Vec<Value> = t
        .decode_log
        .iter()
        .map(|entries| {
            Value::from(
                entries
                    .iter()
                    .map(|&(row, sig)| json!({ "row": row + 1, "signal": sig }))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    with_schema(json!({
        "demand": t.demand.one_based(),
        "signals": signals,
        "decode_log": log,
    }))
}

pub fn rate(m: &RateMeasurement) -> Value {
    with_schema(json!({
        "demands_checked": m.demands_checked,
        "max_signals": m.max_signals,
        "rows": m.rows,
        "rate": ratio(m.rate),
        "constant": m.constant,
        "all_decoded": m.all_decoded,
    }))
}

pub fn fill(f: &FillOutcome) -> Value {
    with_schema(json!({
        "symbols": f.symbols,
        "lower_bound": f.lower_bound,
        "optimal": f.optimal,
        "nodes": f.nodes,
        "pda": crate::pda::text::write_pda(&f.grid),
    }))
}

pub fn ratio_rows(rows: &[RatioReport]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "q": r.q,
                "m": r.m,
                "s_pda": r.s_pda.to_string(),
                "s_derived": r.s_derived.to_string(),
                "s_exact": r.s_exact.as_ref().map(|s| s.to_string()),
                "exact_unavailable": r.exact_unavailable,
                "mu": r.mu.as_ref().map(|m| json!({ "num": m.numer().to_string(), "den": m.denom().to_string() })),
                "formula_ratio": {
                    "num": r.formula_ratio.numer().to_string(),
                    "den": r.formula_ratio.denom().to_string(),
                },
            })
        })
        .collect();
    with_schema(json!({ "rows": rows }))
}
