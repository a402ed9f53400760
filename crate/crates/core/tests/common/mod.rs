#![allow(dead_code)]

use pitchrl::config::Config;
use pitchrl::ingest::{
    preprocess, synth_generate, MatchInput, PreprocessSettings, SarDataset, Scenario, StateKind, SynthOptions,
};
use pitchrl::pitch::{FrameSnapshot, PitchConfig, PlayerState, Team, Vec2};
use rand::Rng;

/// 22 players anywhere on the pitch with random velocities; home attacks +x.
pub fn random_frame(rng: &mut impl Rng, pitch: &PitchConfig) -> FrameSnapshot {
    let (hl, hw) = (pitch.half_length(), pitch.half_width());
    let players = (0..22u32)
        .map(|i| {
            let team = if i < 11 { Team::Home } else { Team::Away };
            let mut p = PlayerState::new(i + 1, team, i % 11 + 1, Vec2::new(rng.gen_range(-hl..hl), rng.gen_range(-hw..hw)));
            p.velocity = Vec2::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
            p.goalkeeper = i % 11 == 0;
            p
        })
        .collect();
    FrameSnapshot {
        frame_index: rng.gen_range(0..100_000),
        timestamp: 0.0,
        players,
        ball: Default::default(),
        possession_team: Some(Team::Home),
        on_ball_player: None,
        attack_direction: Default::default(),
        formations: Default::default(),
    }
}

/// Synthetic counterattacks run through the default preprocessing pipeline.
pub fn synthetic_sar(seed: u64, n: usize, kind: StateKind) -> SarDataset {
    synthetic_sar_with(SynthOptions::new(seed, n, Scenario::Counterattack), kind)
}

pub fn synthetic_sar_with(options: SynthOptions, kind: StateKind) -> SarDataset {
    let synth = synth_generate(&options).expect("synth");
    let input = MatchInput {
        tracking: synth.tracking,
        events: synth.events,
        roster: synth.roster,
    };
    let config = Config::default();
    let vocabulary = config.vocabulary().unwrap();
    let engine = config.feature_engine();
    let epv = config.epv_grid().unwrap();
    let settings = PreprocessSettings {
        pitch: &config.pitch,
        kinematics: &config.kinematics,
        ingest: &config.ingest,
        vocabulary: &vocabulary,
        engine: &engine,
        epv: &epv,
        state_kind: kind,
    };
    preprocess(&[input], &settings).expect("preprocess").0
}
