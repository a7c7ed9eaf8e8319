//! Run manifest embedded in JSON outputs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::field::FieldCtx;

/// Formula versions reported in manifests; bump when a formula changes.
pub const FORMULAS: &[(&str, &str)] = &[
    ("path_different", "transitivity/v1"),
    ("deg_D", "2(1-p^(3-n))deg/v1"),
    ("deg_L", "2(p-p^(2-n))deg/v1"),
    ("genus", "(p-p^(3-n)-p^(2-n))deg+1/v1"),
    ("ratio", "(p^2-p)deg/genus/v1"),
    ("census", "split-locus-dfs/v1"),
];

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub p: u32,
    pub modulus: String,
    pub formulas: BTreeMap<&'static str, &'static str>,
}

impl RunManifest {
    pub fn new(command: &str, ctx: &FieldCtx) -> Self {
        RunManifest {
            tool: "gstower",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            flags: BTreeMap::new(),
            p: ctx.characteristic(),
            modulus: ctx.modulus_string(),
            formulas: FORMULAS.iter().copied().collect(),
        }
    }

    pub fn flag(mut self, name: &str, value: impl ToString) -> Self {
        self.flags.insert(name.to_string(), value.to_string());
        self
    }
}
