// SPDX-License-Identifier: Apache-2.0

//! Fixture designs with expected verdicts. Sources and the manifest are
//! compiled into the library.

use serde::Deserialize;

use crate::engine::EngineKind;
use crate::pipeline::CheckConfig;
use crate::wrappers::ModelKind;

pub const MANIFEST: &str = include_str!("../corpus/manifest.json");

const SOURCES: &[(&str, &str)] = &[
    ("adder_blocking.li", include_str!("../corpus/adder_blocking.li")),
    ("adder_nb_guarded.li", include_str!("../corpus/adder_nb_guarded.li")),
    ("adder_nb_unguarded.li", include_str!("../corpus/adder_nb_unguarded.li")),
    ("circular_dependency_fix1.li", include_str!("../corpus/circular_dependency_fix1.li")),
    ("circular_dependency_initial.li", include_str!("../corpus/circular_dependency_initial.li")),
    ("mismatched_depths_fix1.li", include_str!("../corpus/mismatched_depths_fix1.li")),
    ("mismatched_depths_initial.li", include_str!("../corpus/mismatched_depths_initial.li")),
    ("out_of_order_push_fix1.li", include_str!("../corpus/out_of_order_push_fix1.li")),
    ("out_of_order_push_fix2.li", include_str!("../corpus/out_of_order_push_fix2.li")),
    ("out_of_order_push_initial.li", include_str!("../corpus/out_of_order_push_initial.li")),
    ("producer_consumer_buggy.li", include_str!("../corpus/producer_consumer_buggy.li")),
    ("producer_consumer_fixed.li", include_str!("../corpus/producer_consumer_fixed.li")),
    ("router_v1.li", include_str!("../corpus/router_v1.li")),
    ("router_v2.li", include_str!("../corpus/router_v2.li")),
    ("unconstrained_input_fix1.li", include_str!("../corpus/unconstrained_input_fix1.li")),
    ("unconstrained_input_initial.li", include_str!("../corpus/unconstrained_input_initial.li")),
    ("under_constrained_read_fix1.li", include_str!("../corpus/under_constrained_read_fix1.li")),
    ("under_constrained_read_fix2.li", include_str!("../corpus/under_constrained_read_fix2.li")),
    ("under_constrained_read_initial.li", include_str!("../corpus/under_constrained_read_initial.li")),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expected {
    Falsified,
    Proven,
    BoundReached,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub name: String,
    pub path: String,
    pub check: ModelKind,
    pub engine: EngineKind,
    pub bound: usize,
    #[serde(default)]
    pub config: CheckConfig,
    pub expected: Expected,
    /// Largest acceptable counterexample depth.
    pub max_depth: Option<usize>,
    pub budget_secs: u64,
    pub family: String,
    pub role: String,
    pub note: String,
}

impl Fixture {
    pub fn source(&self) -> &'static str {
        source(&self.path).expect("manifest names a bundled design")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    schema_version: u32,
    fixtures: Vec<Fixture>,
}

/// Bundled design source by file name.
pub fn source(path: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(p, _)| *p == path).map(|(_, s)| *s)
}

pub fn design_names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(p, _)| *p)
}

pub fn corpus_suite() -> Vec<Fixture> {
    let m: Manifest = serde_json::from_str(MANIFEST).expect("bundled manifest parses");
    assert_eq!(m.schema_version, 1);
    m.fixtures
}
