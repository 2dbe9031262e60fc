use std::path::{Path, PathBuf};

use tracing::info;

use super::{create_dir, create_file, CliError};
use crate::sim::{run_campaign, write_slot_log, write_summary, Scenario, Summary};

/// Runs a campaign for a bundled scenario name or a scenario file and writes `slots.jsonl` and
/// `summary.csv`.
pub fn cmd_simulate(scenario: &str, slots: u64, seed: u64, out_dir: &Path) -> Result<Summary, CliError> {
    let sc = Scenario::resolve(scenario)?;
    let campaign = run_campaign(&sc, slots, seed)?;
    create_dir(out_dir)?;
    let log: PathBuf = out_dir.join("slots.jsonl");
    write_slot_log(&campaign.outcomes, create_file(&log)?).map_err(|e| CliError::io(&log, e))?;
    let summary = out_dir.join("summary.csv");
    write_summary(&campaign.summary, create_file(&summary)?).map_err(|e| CliError::io(&summary, e))?;
    info!(scenario = %sc.name, slots, seed, "simulate finished");
    Ok(campaign.summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_slot_writes_one_line() {
        let dir = tempfile::tempdir().unwrap();
        cmd_simulate("bsc_duopoly", 1, 4, dir.path()).unwrap();
        let log = std::fs::read_to_string(dir.path().join("slots.jsonl")).unwrap();
        assert_eq!(log.lines().count(), 1);
    }

    #[test]
    fn unknown_scenario_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(cmd_simulate("nope_not_here", 1, 4, dir.path()).is_err());
    }
}
