use std::path::Path;

use coord_core::backend::scripted::{ScriptedAgent, ScriptedPolicy};
use coord_core::env::EnvConfig;
use coord_core::game::{Agent, DecisionView, GameKind};
use coord_core::hanabi::HanabiMove;
use coord_core::harness::{
    export, read_episodes_csv, report_from_json, report_to_json, run_matchup, write_episodes_csv,
    Ablation, ExportFormat, MatchupConfig, SeatOrder,
};
use coord_core::rng::Seed;

/// Per-seat replay scripts for a Hanabi game that stops scoring at `target`.
///
/// The oracle plays until the stacks add up to `target`; after that both seats
/// only discard or reveal, so the final score is exactly `target`.
fn capped_hanabi_scripts(seed: u64, target: u32) -> [String; 2] {
    let mut env = EnvConfig::new(GameKind::Hanabi).build(Seed(seed)).unwrap();
    let mut oracle: Vec<ScriptedAgent> = (0..2)
        .map(|_| ScriptedAgent::new(ScriptedPolicy::OracleHanabi, Seed(seed)))
        .collect();
    let mut scripts = [Vec::new(), Vec::new()];
    while !env.is_terminal() {
        let p = env.pending()[0];
        let legal = env.legal_actions(p);
        let idx = if env.score() < target {
            let obs = env.observation(p);
            let desc = env.description(p);
            let view = DecisionView {
                game: GameKind::Hanabi,
                player: p,
                player_names: env.player_names(),
                description: &desc,
                observation: &obs,
                legal: &legal,
                partner_last: None,
                state: env.state(),
            };
            oracle[p].decide(&view).unwrap().index
        } else {
            let coord_core::game::StateRef::Hanabi(s) = env.state() else {
                unreachable!()
            };
            let discard = s.move_label(HanabiMove::Discard(0));
            legal
                .iter()
                .position(|a| a.label == discard)
                .or_else(|| legal.iter().position(|a| a.label.starts_with("Reveal")))
                .unwrap()
        };
        scripts[p].push(format!(
            "I will go with this.\nAction: {}",
            legal[idx].label
        ));
        env.step(&[(p, idx)]).unwrap();
    }
    assert_eq!(env.score(), target, "script generator missed the target");
    scripts.map(|s| s.join("\n---\n"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn replay_pair_reproduces_a_fourteen_point_line() {
    let dir = tempfile::tempdir().unwrap();
    let [a, b] = capped_hanabi_scripts(11, 14);
    let mut cfg = MatchupConfig::new(
        GameKind::Hanabi,
        format!("replay:{}", write(dir.path(), "a.txt", &a)),
        format!("replay:{}", write(dir.path(), "b.txt", &b)),
    );
    cfg.seeds = Some(vec![11; 3]);
    let run = run_matchup(&cfg).unwrap();
    assert_eq!(run.report.score_line(), "14.00 ± 0.00");
    let s = run.report.summary(SeatOrder::AFirst).unwrap();
    assert_eq!((s.episodes, s.aborted, s.fallbacks), (3, 0, 0));
    assert!(run.results.iter().all(|(_, r)| r.terminal && r.score == 14));
}

fn kitchen_cfg() -> MatchupConfig {
    let mut cfg = MatchupConfig::new(
        GameKind::Kitchen,
        "scripted:greedy-kitchen",
        "scripted:random-legal",
    );
    cfg.board = Some("cramped_room".into());
    cfg.horizon = Some(120);
    cfg.episodes = 4;
    cfg.seed = 5;
    cfg.swap_positions = true;
    cfg
}

#[test]
fn exports_are_byte_identical_across_runs_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in [1, 4, 4] {
        let mut cfg = kitchen_cfg();
        cfg.max_workers = workers;
        let report = run_matchup(&cfg).unwrap().report;
        let csv = dir.path().join(format!("r{}.csv", outputs.len()));
        let json = dir.path().join(format!("r{}.json", outputs.len()));
        export(&report, ExportFormat::Csv, &csv).unwrap();
        export(&report, ExportFormat::Json, &json).unwrap();
        // Worker count is part of the config, so strip it before comparing.
        let json_text = std::fs::read_to_string(&json)
            .unwrap()
            .replace(&format!("\"max_workers\": {workers}"), "");
        outputs.push((std::fs::read(&csv).unwrap(), json_text));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn swapped_seats_get_their_own_summary() {
    let report = run_matchup(&kitchen_cfg()).unwrap().report;
    assert_eq!(report.summaries.len(), 2);
    assert_eq!(report.episodes.len(), 8);
    for r in &report.episodes {
        let expect = match r.order {
            SeatOrder::AFirst => "scripted:greedy-kitchen",
            SeatOrder::BFirst => "scripted:random-legal",
        };
        assert_eq!(r.seat0_agent, expect);
    }
    let line = report.score_line();
    assert_eq!(line.matches(" | ").count(), 1, "{line}");
    assert!(report.render().contains("  BA  score "));
}

#[test]
fn unicode_names_survive_csv_and_json() {
    let mut cfg = kitchen_cfg();
    cfg.player_names = Some(vec!["Zoë".into(), "李雷".into()]);
    cfg.episodes = 2;
    let report = run_matchup(&cfg).unwrap().report;
    assert_eq!(report.episodes[0].seat0_name, "Zoë");

    let mut buf = Vec::new();
    write_episodes_csv(&mut buf, &report.episodes).unwrap();
    assert_eq!(read_episodes_csv(buf.as_slice()).unwrap(), report.episodes);

    let text = report_to_json(&report);
    assert!(text.contains("李雷"));
    let back = report_from_json(&text).unwrap();
    assert_eq!(report_to_json(&back), text);
    assert_eq!(back.episodes, report.episodes);
}

#[test]
fn greedy_self_play_in_the_kitchen() {
    let mut cfg = MatchupConfig::new(
        GameKind::Kitchen,
        "scripted:greedy-kitchen",
        "scripted:greedy-kitchen",
    );
    cfg.board = Some("cramped_room".into());
    let run = run_matchup(&cfg).unwrap();
    assert_eq!(run.report.episodes.len(), 3);
    for r in &run.report.episodes {
        assert!(r.score >= 60, "seed {} scored {}", r.seed, r.score);
        assert_eq!(r.score % 20, 0);
        assert_eq!(r.steps, 400);
    }
}

#[test]
fn ablation_flags_reach_the_agents() {
    let dir = tempfile::tempdir().unwrap();
    // Every stage reads the same script: planner, explanation and verdict in one reply.
    let reply =
        "Partner Action Explanation: none\nVerification: Okay\nAction: Stay in current Room";
    let script = write(dir.path(), "s.txt", &vec![reply; 400].join("\n---\n"));
    let mut calls = Vec::new();
    for (no_tom, no_verify) in [(false, false), (true, false), (false, true), (true, true)] {
        let mut cfg = MatchupConfig::new(
            GameKind::Capture,
            format!("cac:replay:{script}"),
            "scripted:greedy-pursuit",
        );
        cfg.episodes = 1;
        cfg.max_turns = 10;
        cfg.ablation = Ablation { no_tom, no_verify };
        let r = &run_matchup(&cfg).unwrap().report.episodes[0];
        calls.push((r.tom_calls > 0, r.verifier_calls > 0));
    }
    assert_eq!(
        calls,
        vec![(true, true), (false, true), (true, false), (false, false)]
    );
}

#[test]
fn toml_config_matches_builder() {
    let text = r#"
game = "kitchen"
board = "cramped_room"
agent_a = "scripted:greedy-kitchen"
agent_b = "scripted:random-legal"
episodes = 4
seed = 5
horizon = 120
swap_positions = true
"#;
    assert_eq!(MatchupConfig::from_toml(text).unwrap(), kitchen_cfg());
    assert!(
        MatchupConfig::from_toml("game = \"chess\"\nagent_a = \"x\"\nagent_b = \"y\"").is_err()
    );
}

#[test]
fn bad_configs_are_rejected_before_running() {
    let mut cfg = kitchen_cfg();
    cfg.seeds = Some(vec![1]);
    assert!(run_matchup(&cfg).is_err());
    let cfg = MatchupConfig::new(
        GameKind::Kitchen,
        "scripted:nope",
        "scripted:greedy-kitchen",
    );
    assert!(run_matchup(&cfg).is_err());
    let mut cfg = kitchen_cfg();
    cfg.board = Some("no_such_layout".into());
    assert!(run_matchup(&cfg).is_err());
}
