use super::roc::RocCurve;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method_id: String,
    pub auc: f64,
    /// `(fpr, tpr)` pairs.
    pub roc_points: Vec<(f64, f64)>,
    pub n_pos: usize,
    pub n_neg: usize,
    /// p-value of the paired comparison against each other method.
    pub p_values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_k: Option<BTreeMap<usize, f64>>,
}

impl EvalReport {
    pub fn from_roc(method_id: &str, roc: RocCurve) -> Self {
        EvalReport {
            method_id: method_id.to_string(),
            auc: roc.auc,
            roc_points: roc.points,
            n_pos: roc.n_pos,
            n_neg: roc.n_neg,
            p_values: BTreeMap::new(),
            per_k: None,
        }
    }

    /// `fpr,tpr` CSV for plotting.
    pub fn roc_csv(&self) -> String {
        let mut out = String::from("fpr,tpr\n");
        for (fpr, tpr) in &self.roc_points {
            writeln!(out, "{fpr},{tpr}").unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub method_a: String,
    pub method_b: String,
    #[serde(flatten)]
    pub result: super::Significance,
}
