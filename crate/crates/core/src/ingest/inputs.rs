//! Tracking CSV, events JSON and roster JSON readers, and frame assembly.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pitch::{
    compute_kinematics, AttackDirection, BallState, FrameSnapshot, Formations, KinematicsOptions,
    PitchConfig, PlayerState, Team, Vec2,
};

/// One row of the tracking CSV `frame,timestamp_s,object_id,team,jersey,x_m,y_m`.
/// The ball is object 0 with empty team and jersey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingRow {
    pub frame: u64,
    pub timestamp_s: f64,
    pub object_id: u32,
    pub team: Option<Team>,
    pub jersey: Option<u32>,
    pub x_m: f64,
    pub y_m: f64,
}

pub const BALL_ID: u32 = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventRecord {
    pub timestamp: f64,
    pub action_type: String,
    pub player_id: u32,
    pub team: Team,
    pub position: Vec2,
    pub possession_id: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RosterEntry {
    pub player_id: u32,
    pub team: Team,
    pub jersey: u32,
    #[serde(default)]
    pub height_cm: Option<f64>,
    #[serde(default)]
    pub goalkeeper: bool,
}

/// Per-match metadata not carried by the tracking file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Roster {
    pub players: Vec<RosterEntry>,
    pub formations: Formations,
    /// Direction the home team attacks; inferred from mean team positions
    /// when absent.
    pub home_attack: Option<AttackDirection>,
}

impl Roster {
    pub fn entry(&self, player_id: u32) -> Option<&RosterEntry> {
        self.players.iter().find(|p| p.player_id == player_id)
    }
}

pub fn read_tracking_csv<R: std::io::Read>(reader: R) -> Result<Vec<TrackingRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<TrackingRow>, _>>()?;
    for r in &rows {
        if !(r.timestamp_s.is_finite() && r.x_m.is_finite() && r.y_m.is_finite()) {
            return Err(Error::Input(format!(
                "tracking frame {} object {}: non-finite value",
                r.frame, r.object_id
            )));
        }
        if r.object_id != BALL_ID && (r.team.is_none() || r.jersey.is_none()) {
            return Err(Error::Input(format!(
                "tracking frame {} object {}: players need team and jersey",
                r.frame, r.object_id
            )));
        }
    }
    Ok(rows)
}

pub fn write_tracking_csv<W: std::io::Write>(writer: W, rows: &[TrackingRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<tracking csv>", e))?;
    Ok(())
}

pub fn load_tracking(path: &Path) -> Result<Vec<TrackingRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_tracking_csv(std::io::BufReader::new(file))
}

pub fn parse_events(text: &str) -> Result<Vec<EventRecord>> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let events: Vec<EventRecord> = serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Input(format!("events JSON at `{}`: {}", e.path(), e.inner())))?;
    for pair in events.windows(2) {
        if pair[1].timestamp < pair[0].timestamp {
            return Err(Error::Input(format!(
                "event timestamps decrease at t = {}",
                pair[1].timestamp
            )));
        }
    }
    if let Some(e) = events.iter().find(|e| !e.timestamp.is_finite() || !e.position.is_finite()) {
        return Err(Error::Input(format!("event at t = {} has non-finite fields", e.timestamp)));
    }
    Ok(events)
}

pub fn load_events(path: &Path) -> Result<Vec<EventRecord>> {
    parse_events(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

pub fn parse_roster(text: &str) -> Result<Roster> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Input(format!("roster JSON at `{}`: {}", e.path(), e.inner())))
}

pub fn load_roster(path: &Path) -> Result<Roster> {
    parse_roster(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

/// Assembles frames from tracking rows: kinematics are computed per object
/// over each run of consecutive frame numbers. Possession fields are left
/// empty; the attack direction records the home team's direction until
/// possession is known.
pub fn build_frames(
    rows: &[TrackingRow],
    roster: &Roster,
    pitch: &PitchConfig,
    kinematics: &KinematicsOptions,
) -> Result<Vec<FrameSnapshot>> {
    let mut by_frame: BTreeMap<u64, Vec<&TrackingRow>> = BTreeMap::new();
    let mut identity: BTreeMap<u32, (Team, u32)> = BTreeMap::new();
    for r in rows {
        by_frame.entry(r.frame).or_default().push(r);
        if r.object_id != BALL_ID {
            let id = (r.team.expect("checked on read"), r.jersey.expect("checked on read"));
            if *identity.entry(r.object_id).or_insert(id) != id {
                return Err(Error::Input(format!(
                    "object {} changes team or jersey at frame {}",
                    r.object_id, r.frame
                )));
            }
        }
    }
    let home_attack = match roster.home_attack {
        Some(d) => d,
        None => infer_home_attack(rows),
    };

    let frame_numbers: Vec<u64> = by_frame.keys().copied().collect();
    let mut runs: Vec<&[u64]> = Vec::new();
    let mut start = 0;
    for i in 1..=frame_numbers.len() {
        if i == frame_numbers.len() || frame_numbers[i] != frame_numbers[i - 1] + 1 {
            runs.push(&frame_numbers[start..i]);
            start = i;
        }
    }

    let mut frames = Vec::with_capacity(frame_numbers.len());
    for run in runs {
        if run.len() < 3 {
            continue;
        }
        let objects: BTreeSet<u32> = run
            .iter()
            .flat_map(|f| by_frame[f].iter().map(|r| r.object_id))
            .collect();
        if !objects.contains(&BALL_ID) {
            return Err(Error::Input(format!("no ball samples in frames {}..={}", run[0], run[run.len() - 1])));
        }
        let mut tracks = BTreeMap::new();
        for &id in &objects {
            let series: Vec<Option<Vec2>> = run
                .iter()
                .map(|f| {
                    by_frame[f]
                        .iter()
                        .find(|r| r.object_id == id)
                        .map(|r| Vec2::new(r.x_m, r.y_m))
                })
                .collect();
            tracks.insert(id, compute_kinematics(&series, pitch.frame_rate, kinematics)?);
        }
        for (k, &f) in run.iter().enumerate() {
            let ball = &tracks[&BALL_ID];
            let players = objects
                .iter()
                .filter(|id| **id != BALL_ID)
                .map(|&id| {
                    let (team, jersey) = identity[&id];
                    let t = &tracks[&id];
                    let entry = roster.entry(id);
                    PlayerState {
                        player_id: id,
                        team,
                        jersey,
                        position: t.positions[k],
                        velocity: t.velocity[k],
                        acceleration: t.acceleration[k],
                        height: entry.and_then(|e| e.height_cm),
                        goalkeeper: entry.is_some_and(|e| e.goalkeeper),
                        visible: !t.flagged[k],
                    }
                })
                .collect();
            let frame = FrameSnapshot {
                frame_index: f,
                timestamp: by_frame[&f][0].timestamp_s,
                players,
                ball: BallState {
                    position: ball.positions[k],
                    velocity: ball.velocity[k],
                },
                possession_team: None,
                on_ball_player: None,
                attack_direction: home_attack,
                formations: roster.formations.clone(),
            };
            frame.validate(pitch)?;
            frames.push(frame);
        }
    }
    Ok(frames)
}

/// The home team attacks `+x` when its players sit, on average, at lower x.
fn infer_home_attack(rows: &[TrackingRow]) -> AttackDirection {
    let mean = |team: Team| {
        let xs: Vec<f64> = rows.iter().filter(|r| r.team == Some(team)).map(|r| r.x_m).collect();
        xs.iter().sum::<f64>() / xs.len().max(1) as f64
    };
    if mean(Team::Home) <= mean(Team::Away) {
        AttackDirection::PositiveX
    } else {
        AttackDirection::NegativeX
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows_for(frames: std::ops::Range<u64>) -> Vec<TrackingRow> {
        let mut rows = Vec::new();
        for f in frames {
            rows.push(TrackingRow {
                frame: f,
                timestamp_s: f as f64 / 25.0,
                object_id: 0,
                team: None,
                jersey: None,
                x_m: 0.0,
                y_m: 0.0,
            });
            for id in 1..=22u32 {
                let team = if id <= 11 { Team::Home } else { Team::Away };
                let side = if team == Team::Home { -1.0 } else { 1.0 };
                rows.push(TrackingRow {
                    frame: f,
                    timestamp_s: f as f64 / 25.0,
                    object_id: id,
                    team: Some(team),
                    jersey: Some((id - 1) % 11 + 1),
                    x_m: side * (5.0 + ((id - 1) % 11) as f64 * 3.0) + f as f64 * 0.04,
                    y_m: ((id % 7) as f64 - 3.0) * 5.0,
                });
            }
        }
        rows
    }

    #[test]
    fn csv_round_trip_and_frame_assembly() {
        let rows = rows_for(0..10);
        let mut buf = Vec::new();
        write_tracking_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("frame,timestamp_s,object_id,team,jersey,x_m,y_m\n0,0.0,0,,,"));
        let back = read_tracking_csv(buf.as_slice()).unwrap();
        assert_eq!(back, rows);

        let frames = build_frames(&back, &Roster::default(), &PitchConfig::default(), &KinematicsOptions::default()).unwrap();
        assert_eq!(frames.len(), 10);
        assert_eq!(frames[0].attack_direction, AttackDirection::PositiveX);
        for f in &frames {
            assert_eq!(f.players.len(), 22);
            assert!((f.players[0].velocity.x - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn frame_gaps_split_kinematics() {
        let mut rows = rows_for(0..5);
        let mut later = rows_for(100..105);
        for r in &mut later {
            r.x_m += 10.0;
        }
        rows.extend(later);
        let frames = build_frames(&rows, &Roster::default(), &PitchConfig::default(), &KinematicsOptions::default()).unwrap();
        assert_eq!(frames.len(), 10);
        assert!(frames.iter().all(|f| (f.players[3].velocity.x - 1.0).abs() < 1e-9));
    }

    #[test]
    fn malformed_inputs() {
        assert!(read_tracking_csv("frame,timestamp_s,object_id,team,jersey,x_m,y_m\n0,0,3,,,1,1\n".as_bytes()).is_err());
        let err = parse_events(r#"[{"timestamp": 1, "action_type": "pass", "player_id": 3, "team": "red", "position": {"x": 0, "y": 0}, "possession_id": 1}]"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("[0].team"), "{err}");
        let unordered = r#"[
            {"timestamp": 2, "action_type": "pass", "player_id": 3, "team": "home", "position": {"x": 0, "y": 0}, "possession_id": 1},
            {"timestamp": 1, "action_type": "pass", "player_id": 3, "team": "home", "position": {"x": 0, "y": 0}, "possession_id": 1}]"#;
        assert!(parse_events(unordered).is_err());
        let roster = parse_roster(r#"{"players": [{"player_id": 1, "team": "home", "jersey": 1, "height_cm": 181, "goalkeeper": true}], "home_attack": "-x"}"#).unwrap();
        assert_eq!(roster.home_attack, Some(AttackDirection::NegativeX));
        assert!(parse_roster(r#"{"players": [], "extra": 1}"#).is_err());
    }
}
