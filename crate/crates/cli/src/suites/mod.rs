//! Verification suites. Every suite is a pure function of its settings;
//! cases may run concurrently and are reported sorted by key.

mod algebra;
mod canjar;
mod filters;
mod names;
mod solovay;

use serde::Serialize;
use serde_json::Value;

use crate::report::SuiteReport;
use crate::settings::Settings;
use crate::CliError;

pub const SUITES: [&str; 12] = [
    "algebra-laws",
    "homodot",
    "restr-incl",
    "ms-measure",
    "partition",
    "gm-reals",
    "additivity",
    "oracle-laws",
    "borel-cantelli",
    "ap1",
    "fullness",
    "splice",
];

pub fn run_suite(id: &str, settings: &Settings) -> Result<SuiteReport, CliError> {
    let (cases, notes) = match id {
        "algebra-laws" => algebra::algebra_laws(settings),
        "homodot" => names::homodot(settings),
        "restr-incl" => names::restr_incl(settings),
        "ms-measure" => solovay::ms_measure(settings),
        "partition" => solovay::partition(settings),
        "gm-reals" => solovay::gm_reals(settings),
        "additivity" => solovay::additivity(settings),
        "oracle-laws" => filters::oracle_laws(settings),
        "borel-cantelli" => filters::borel_cantelli(settings),
        "ap1" => filters::ap1(settings),
        "fullness" => canjar::fullness(settings),
        "splice" => canjar::splice(settings),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown suite {id:?}; known suites: {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport::new(id, settings, cases, notes))
}

pub(crate) fn j(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("values serialize")
}
