//! Built-in experiment files reproducing the published tables and figure data.

use serde::{Deserialize, Serialize};

use super::report::ExperimentReport;
use super::runner::{run_experiment_cached, ReferenceCache};
use super::spec::{ExperimentSpec, RunScale};
use crate::error::{Error, Result};

/// Experiments written together to one report file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportGroup {
    pub file: String,
    #[serde(rename = "experiment")]
    pub experiments: Vec<ExperimentSpec>,
}

#[derive(Serialize, Deserialize)]
struct CatalogFile {
    report: Vec<ReportGroup>,
}

pub const IDS: [&str; 9] = ["1", "2", "3", "4", "5", "6", "fig1", "fig2", "fig3"];

fn source(id: &str) -> Option<&'static str> {
    Some(match id {
        "1" => include_str!("../../catalog/table1.toml"),
        "2" => include_str!("../../catalog/table2.toml"),
        "3" => include_str!("../../catalog/table3.toml"),
        "4" => include_str!("../../catalog/table4.toml"),
        "5" => include_str!("../../catalog/table5.toml"),
        "6" => include_str!("../../catalog/table6.toml"),
        "fig1" => include_str!("../../catalog/fig1.toml"),
        "fig2" => include_str!("../../catalog/fig2.toml"),
        "fig3" => include_str!("../../catalog/fig3.toml"),
        _ => return None,
    })
}

/// Parses an experiment file (`[[report]]` groups of `[[report.experiment]]`).
pub fn parse(text: &str) -> Result<Vec<ReportGroup>> {
    let file: CatalogFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(file.report)
}

pub fn to_toml(groups: &[ReportGroup]) -> Result<String> {
    toml::to_string(&CatalogFile {
        report: groups.to_vec(),
    })
    .map_err(|e| Error::Report(e.to_string()))
}

pub fn load(id: &str) -> Result<Vec<ReportGroup>> {
    let id = id.strip_prefix("table").unwrap_or(id);
    let text = source(id).ok_or_else(|| Error::UnknownTable {
        id: id.to_string(),
        valid: IDS.join(", "),
    })?;
    parse(text)
}

/// Runs every experiment in the group at the given scale and merges the rows.
pub fn run_group(
    group: &ReportGroup,
    scale: RunScale,
    cache: &mut ReferenceCache,
) -> Result<ExperimentReport> {
    let mut parts = Vec::with_capacity(group.experiments.len());
    for spec in &group.experiments {
        parts.push(run_experiment_cached(&spec.scaled(scale), cache)?);
    }
    Ok(ExperimentReport::merge(group.file.clone(), parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_catalog_entry_parses_and_validates() {
        for id in IDS {
            let groups = load(id).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert!(!groups.is_empty());
            for g in &groups {
                for spec in &g.experiments {
                    spec.validate().unwrap_or_else(|e| panic!("{id}: {e}"));
                    assert_eq!(spec.n_paths, 1_000_000, "{}", spec.name);
                    assert_eq!(spec.runs, 20, "{}", spec.name);
                }
            }
        }
    }

    #[test]
    fn unknown_id_lists_valid_ids() {
        let err = load("7").unwrap_err().to_string();
        assert!(err.contains("fig3"), "{err}");
        assert!(load("table1").is_ok());
    }

    #[test]
    fn fig2_layout() {
        let groups = load("fig2").unwrap();
        assert_eq!(groups.len(), 3);
        for g in &groups {
            let maturities: std::collections::BTreeSet<u64> =
                g.experiments.iter().map(|e| e.maturity.to_bits()).collect();
            assert_eq!(maturities.len(), 13, "{}", g.file);
        }
    }

    #[test]
    fn toml_round_trip() {
        let groups = load("1").unwrap();
        let text = to_toml(&groups).unwrap();
        assert_eq!(parse(&text).unwrap(), groups);
    }
}
