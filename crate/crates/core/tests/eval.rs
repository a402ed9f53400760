mod common;

use pitchrl::config::Config;
use pitchrl::edms::PossessionContext;
use pitchrl::eval::{extract_offball_q, team_aggregate};
use pitchrl::ingest::{ActionLabel, Scenario, StateKind, SynthOptions, Trajectory};
use pitchrl::pitch::{is_offside, FrameSnapshot, PlayerState, Team, Vec2};
use pitchrl::rlearn::{standardize, train, TrainConfig};

fn player(id: u32, team: Team, x: f64, y: f64) -> PlayerState {
    let mut p = PlayerState::new(id, team, (id - 1) % 11 + 1, Vec2::new(x, y));
    p.goalkeeper = (id - 1) % 11 == 0;
    p.height = Some(170.0 + (id % 7) as f64 * 3.0);
    p
}

/// Home attacks +x with the ball at x = -11; the second-to-last defender is at
/// x = 33.5 and attacker 11 at x = 40.
fn offside_frame() -> FrameSnapshot {
    let mut players = vec![player(1, Team::Home, -45.0, 0.0)];
    for k in 0..10u32 {
        players.push(player(2 + k, Team::Home, -20.0 + 3.0 * k as f64, -25.0 + 5.0 * k as f64));
    }
    players[10].position = Vec2::new(40.0, 10.0);
    players.push(player(12, Team::Away, 50.0, 0.0));
    for k in 0..10u32 {
        players.push(player(13 + k, Team::Away, 20.0 + 1.5 * k as f64, -27.0 + 6.0 * k as f64));
    }
    let mut frame = FrameSnapshot {
        frame_index: 1,
        timestamp: 0.0,
        players,
        ball: Default::default(),
        possession_team: Some(Team::Home),
        on_ball_player: Some(5),
        attack_direction: Default::default(),
        formations: Default::default(),
    };
    frame.ball.position = frame.players[4].position;
    frame
}

fn single_step(states: Vec<f64>) -> Trajectory {
    Trajectory {
        episode: 0,
        team: Team::Home,
        player_id: 11,
        frame_indices: vec![1],
        states: vec![states],
        actions: vec![ActionLabel::Stay.index()],
        rewards: vec![0.0],
        on_ball: vec![false],
    }
}

// Regression snapshot on a small trained model: the offside attacker's zero
// space score propagates to lower directional Q-values. The ordering is a
// property of this trained net, not of the architecture; a 5-epoch model
// still has it reversed.
#[test]
fn offside_lowers_directional_q() {
    let data = common::synthetic_sar(11, 10, StateKind::Edms);
    let scaler = &data.header.scaling.features;
    let config = TrainConfig { epochs: 20, seed: 11, ..TrainConfig::default() };
    let net = train(&standardize(&data.trajectories().unwrap(), scaler), &config, None).unwrap().net;

    let engine = Config::default()
        .feature_engine()
        .with_pass_scaling(data.header.scaling.pass.expect("EDMS data carries pass scaling"));
    // The defensive line is at x = 33.5; the attacker steps one metre across it.
    let mut offside = offside_frame();
    offside.players[10].position.x = 34.0;
    let mut onside = offside.clone();
    onside.players[10].position.x = 33.0;
    assert!(is_offside(&offside, 10).unwrap() && !is_offside(&onside, 10).unwrap());

    let mean_q = |frame: &FrameSnapshot| {
        let state = engine.assemble_state(frame, PossessionContext::Intra, 11).unwrap().to_vector();
        let q = extract_offball_q(&net, scaler, &config, &[single_step(state)], 1, 11, None, 3).unwrap();
        q.mean_directional()
    };
    let (off, on) = (mean_q(&offside), mean_q(&onside));
    assert!(off < on, "offside {off} vs onside {on}");
}

#[test]
fn scoring_team_has_higher_terminal_q() {
    let options = SynthOptions { goal_probability: (1.0, 0.0), ..SynthOptions::new(12, 12, Scenario::Counterattack) };
    let data = common::synthetic_sar_with(options, StateKind::Edms);
    let scaler = &data.header.scaling.features;
    let raw = data.trajectories().unwrap();
    let config = TrainConfig { epochs: 5, seed: 12, ..TrainConfig::default() };
    let net = train(&standardize(&raw, scaler), &config, None).unwrap().net;
    let rows = team_aggregate(&net, scaler, &raw).unwrap();
    assert_eq!(rows.len(), 2);
    let (home, away) = (&rows[0], &rows[1]);
    assert_eq!((home.team, away.team), (Team::Home, Team::Away));
    assert!(home.mean_q > away.mean_q, "home {} vs away {}", home.mean_q, away.mean_q);
}
