//! The JSON-lines report: one bound report per line, fixed schema.

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::check::BoundReport;

fn nat_or_inf(k: Option<&BigUint>) -> Value {
    match k {
        None => json!("inf"),
        Some(k) => match u64::try_from(k) {
            Ok(small) => json!(small),
            // Beyond u64 the exact decimal is kept as a string.
            Err(_) => json!(k.to_string()),
        },
    }
}

pub fn json_line(r: &BoundReport) -> String {
    let observed = r.observed_cost.map(BigUint::from);
    json!({
        "id": r.program_id,
        "strategy": r.strategy.to_string(),
        "observed_cost": nat_or_inf(observed.as_ref()),
        "bound_cost": nat_or_inf(r.bound_cost.as_ref()),
        "verdict": r.verdict.name(),
        "fuel": r.fuel_used,
    })
    .to_string()
}

/// A human-readable rendering, one observation per line.
pub fn text(r: &BoundReport) -> String {
    let show = |k: Option<String>| k.unwrap_or_else(|| "inf".to_string());
    let mut out = format!(
        "{} [{}] {}: observed cost {}, bound {}; value {}, potential {}\n",
        if r.program_id.is_empty() { "program" } else { &r.program_id },
        r.strategy,
        r.verdict,
        show(r.observed_cost.map(|c| c.to_string())),
        show(r.bound_cost.as_ref().map(|c| c.to_string())),
        r.observed_value,
        r.bound_potential,
    );
    for leaf in &r.leaves {
        out.push_str(&format!(
            "  {}: {} (cost {} <= {})",
            leaf.path,
            leaf.verdict,
            show(leaf.observed_cost.map(|c| c.to_string())),
            show(leaf.bound_cost.as_ref().map(|c| c.to_string())),
        ));
        if let Some(note) = &leaf.note {
            out.push_str(&format!(" -- {note}"));
        }
        out.push('\n');
    }
    out
}
