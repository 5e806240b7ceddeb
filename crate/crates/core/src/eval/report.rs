use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Results for one method. `ni` and `pc` are keyed by the perturbed
/// percentage as written by [`EvalReport::key`] (e.g. `"5"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub spearman: Option<f64>,
    pub ni: BTreeMap<String, f64>,
    pub pc: BTreeMap<String, f64>,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
}

impl EvalReport {
    pub fn new(method: impl Into<String>, config: serde_json::Value, seeds: Vec<u64>) -> Self {
        Self { method: method.into(), spearman: None, ni: BTreeMap::new(), pc: BTreeMap::new(), config, seeds }
    }

    pub fn key(z_percent: f64) -> String {
        format!("{z_percent}")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn percent_keys<'a>(maps: impl Iterator<Item = &'a BTreeMap<String, f64>>) -> Vec<String> {
    let mut keys: Vec<String> = maps.flat_map(|m| m.keys().cloned()).collect();
    keys.sort_by(|a, b| {
        let (x, y) = (a.parse::<f64>().unwrap_or(f64::MAX), b.parse::<f64>().unwrap_or(f64::MAX));
        x.total_cmp(&y).then_with(|| a.cmp(b))
    });
    keys.dedup();
    keys
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"))
}

/// One row per method: Spearman, then NI and PC per perturbed percentage.
pub fn markdown_table(reports: &[EvalReport]) -> String {
    let ni_keys = percent_keys(reports.iter().map(|r| &r.ni));
    let pc_keys = percent_keys(reports.iter().map(|r| &r.pc));
    let mut out = String::from("| Method | Spearman |");
    for k in &ni_keys {
        let _ = write!(out, " NI {k}% |");
    }
    for k in &pc_keys {
        let _ = write!(out, " PC {k}% |");
    }
    out.push_str("\n|---|---:|");
    for _ in 0..ni_keys.len() + pc_keys.len() {
        out.push_str("---:|");
    }
    out.push('\n');
    for r in reports {
        let _ = write!(out, "| {} | {} |", r.method, cell(r.spearman));
        for k in &ni_keys {
            let _ = write!(out, " {} |", cell(r.ni.get(k).copied()));
        }
        for k in &pc_keys {
            let _ = write!(out, " {} |", cell(r.pc.get(k).copied()));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_layout() {
        let mut a = EvalReport::new("graph_wgd", serde_json::json!({}), vec![1]);
        a.spearman = Some(0.5);
        for z in [3.0, 5.0, 7.0] {
            a.ni.insert(EvalReport::key(z), z / 100.0);
        }
        a.ni.insert(EvalReport::key(10.0), 0.1);
        let b = EvalReport::new("degree", serde_json::json!({}), vec![1]);
        let t = markdown_table(&[a.clone(), b]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "| Method | Spearman | NI 3% | NI 5% | NI 7% | NI 10% |");
        assert_eq!(lines[2], "| graph_wgd | 0.500 | 0.030 | 0.050 | 0.070 | 0.100 |");
        assert_eq!(lines[3], "| degree | - | - | - | - | - |");
        assert_eq!(EvalReport::from_json(&a.to_json().unwrap()).unwrap(), a);
    }
}
