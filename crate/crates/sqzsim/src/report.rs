//! JSON form of a squeezing report.
//!
//! Numbers are written through [`fmt_num`], so every value carries at least
//! six significant digits regardless of locale.

use serde_json::{Map, Number, Value};
use sqzsim_core::budget::{BudgetFactor, SqueezingReport};

use crate::format::fmt_num;

pub fn number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(
        fmt_num(x)
            .parse::<Number>()
            .expect("fmt_num emits valid JSON numbers"),
    )
}

/// Budget as an ordered `{factor: value}` object. Repeated names get `_2`, `_3`, ...
pub fn budget_object(budget: &[BudgetFactor]) -> Map<String, Value> {
    let mut out = Map::new();
    for factor in budget {
        let mut key = factor.name.clone();
        let mut k = 2;
        while out.contains_key(&key) {
            key = format!("{}_{k}", factor.name);
            k += 1;
        }
        out.insert(key, number(factor.value));
    }
    out
}

pub fn report_object(report: &SqueezingReport) -> Map<String, Value> {
    let mut out = Map::new();
    let fields = [
        ("raw_sq_db", report.raw_sq_db),
        ("raw_asq_db", report.raw_asq_db),
        ("raw_sq_unc_db", report.raw_sq_unc_db),
        ("raw_asq_unc_db", report.raw_asq_unc_db),
        ("eta_total", report.eta_total),
        ("inferred_sq_db", report.inferred_sq_db),
        ("inferred_asq_db", report.inferred_asq_db),
        ("inferred_sq_unc_db", report.inferred_sq_unc_db),
        ("inferred_asq_unc_db", report.inferred_asq_unc_db),
        ("raw_purity_product", report.raw_purity_product),
        ("purity_product", report.purity_product),
        ("purity_product_db", report.purity_product_db),
    ];
    for (key, value) in fields {
        out.insert(key.to_string(), number(value));
    }
    out.insert(
        "budget".to_string(),
        Value::Object(budget_object(&report.budget)),
    );
    out
}

/// Report without an antisqueezing reading: every field derived from it is null.
pub fn squeezing_only_object(report: &SqueezingReport) -> Map<String, Value> {
    let mut out = report_object(report);
    for key in [
        "raw_asq_db",
        "raw_asq_unc_db",
        "inferred_asq_db",
        "inferred_asq_unc_db",
        "raw_purity_product",
        "purity_product",
        "purity_product_db",
    ] {
        out.insert(key.to_string(), Value::Null);
    }
    out
}

/// Pretty-printed with a trailing newline.
pub fn to_json_string(object: Map<String, Value>) -> String {
    let mut text = serde_json::to_string_pretty(&Value::Object(object)).expect("in-memory JSON");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use sqzsim_core::budget::{build_report, lumped_budget, Measured};

    #[test]
    fn fields_and_formatting() {
        let report = build_report(
            Measured::new(-2.0, 0.05),
            Measured::new(2.8, 0.05),
            lumped_budget(0.71),
        )
        .unwrap();
        let text = to_json_string(report_object(&report));
        assert!(text.contains("\"raw_sq_db\": -2.000000000"));
        assert!(text.contains("\"eta_total\": 0.710000000"));
        assert!(text.contains("\"budget\": {\n    \"total\": 0.710000000\n  }"));
        let parsed: Value = serde_json::from_str(&text).unwrap();
        let inferred = parsed["inferred_sq_db"].as_f64().unwrap();
        assert!((inferred + 3.18558).abs() < 1e-5);
    }

    #[test]
    fn repeated_budget_names() {
        let factors = [
            BudgetFactor::new("anonymous", 0.9),
            BudgetFactor::new("anonymous", 0.8),
            BudgetFactor::new("anonymous", 0.7),
        ];
        let keys: Vec<_> = budget_object(&factors).keys().cloned().collect();
        assert_eq!(keys, ["anonymous", "anonymous_2", "anonymous_3"]);
    }
}
