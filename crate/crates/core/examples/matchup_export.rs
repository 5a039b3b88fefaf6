//! Run a seeded matchup with seat swapping and write both report formats.
//!
//! cargo run --example matchup_export -- /tmp/reports

use std::path::PathBuf;

use coord_core::harness::{export, run_matchup, ExportFormat, MatchupConfig};
use coord_core::GameKind;

fn main() -> anyhow::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map_or_else(std::env::temp_dir, PathBuf::from);
    let mut cfg = MatchupConfig::from_toml(
        r#"
game = "kitchen"
board = "asymmetric_advantages"
agent_a = "scripted:greedy-kitchen"
agent_b = "scripted:random-legal"
episodes = 3
seed = 10
horizon = 200
swap_positions = true
"#,
    )?;
    cfg.player_names = Some(vec!["Zoë".into(), "Kai".into()]);
    assert_eq!(cfg.game, GameKind::Kitchen);
    let run = run_matchup(&cfg)?;
    print!("{}", run.report.render());
    for (format, file) in [
        (ExportFormat::Csv, "episodes.csv"),
        (ExportFormat::Json, "report.json"),
    ] {
        let path = dir.join(file);
        export(&run.report, format, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
