mod common;

use std::collections::BTreeMap;

use pitchrl::edms::PVS_LEN;
use pitchrl::ingest::{Scenario, StateKind, SynthOptions};
use pitchrl::pitch::Team;

#[test]
fn synthetic_edms_dataset_shape() {
    let data = common::synthetic_sar(21, 4, StateKind::Edms);
    assert_eq!(data.header.state_dim, 180);
    assert_eq!(data.header.columns.len(), 180);
    let trajectories = data.trajectories().unwrap();
    let mut per_episode: BTreeMap<u64, Vec<_>> = BTreeMap::new();
    for t in &trajectories {
        per_episode.entry(t.episode).or_default().push(t);
    }
    assert_eq!(per_episode.len(), 4);
    for (episode, players) in &per_episode {
        // Every attacker has a trajectory, and they all see the same rewards.
        assert_eq!(players.len(), 11, "episode {episode}");
        assert!((30..=600).contains(&players[0].len()));
        for p in players {
            assert_eq!(p.rewards, players[0].rewards);
        }
        // At most one on-ball attacker per step.
        for step in 0..players[0].len() {
            assert!(players.iter().filter(|p| p.on_ball[step]).count() <= 1);
        }
    }
}

#[test]
fn pvs_dataset_and_determinism() {
    let a = common::synthetic_sar(22, 2, StateKind::Pvs);
    assert_eq!(a.header.state_dim, PVS_LEN);
    let b = common::synthetic_sar(22, 2, StateKind::Pvs);
    assert_eq!(a, b);
}

#[test]
fn goals_and_concessions_reach_the_terminal_reward() {
    let options = SynthOptions { goal_probability: (1.0, 0.0), ..SynthOptions::new(23, 6, Scenario::Buildup) };
    let data = common::synthetic_sar_with(options, StateKind::Edms);
    let trajectories = data.trajectories().unwrap();
    let last_episode = trajectories.iter().map(|t| t.episode).max().unwrap();
    for t in &trajectories {
        let terminal = *t.rewards.last().unwrap();
        match t.team {
            Team::Home => assert_eq!(terminal, 1.0),
            // Every away possession is followed by a home goal, except the last.
            Team::Away if t.episode != last_episode => assert_eq!(terminal, -1.0),
            Team::Away => assert!((0.0..=1.0).contains(&terminal)),
        }
    }
}
