//! Event/tracking synchronization, possession segmentation and action labels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ActionLabel, ActionVocabulary, EventRecord};
use crate::error::{Error, Result};
use crate::pitch::{AttackDirection, FrameSnapshot, Team, Vec2};
use crate::reward::{resolve_outcome, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    /// Events farther than this from every frame are dropped (seconds).
    pub event_tolerance: f64,
    /// Off-ball players slower than this over the labeling window stay (m/s).
    pub v_stay: f64,
    /// Forward window for off-ball motion labels (seconds).
    pub label_window: f64,
    pub min_frames: usize,
    pub max_frames: usize,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            event_tolerance: 1.0,
            v_stay: 0.5,
            label_window: 1.0,
            min_frames: 30,
            max_frames: 600,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.event_tolerance) {
            return Err(Error::config("ingest.event_tolerance", "must be > 0"));
        }
        if !(self.v_stay.is_finite() && self.v_stay >= 0.0) {
            return Err(Error::config("ingest.v_stay", "must be >= 0"));
        }
        if !positive(self.label_window) {
            return Err(Error::config("ingest.label_window", "must be > 0"));
        }
        if self.min_frames < 2 || self.min_frames > self.max_frames {
            return Err(Error::config("ingest.min_frames", "need 2 <= min_frames <= max_frames"));
        }
        Ok(())
    }
}

/// Tracking frames with events attached and possession state filled forward.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedStream {
    pub frames: Vec<FrameSnapshot>,
    pub possession_ids: Vec<Option<u64>>,
    /// Indices into `events` attached to each frame, in event order.
    pub attached: Vec<Vec<usize>>,
    pub events: Vec<EventRecord>,
    /// Events with no frame within the tolerance.
    pub dropped: usize,
}

impl AlignedStream {
    /// Team of the first attached event after frame `i`.
    pub fn next_actor_after(&self, i: usize) -> Option<Team> {
        self.attached[i + 1..]
            .iter()
            .find_map(|ev| ev.first().map(|&e| self.events[e].team))
    }

    /// Team of the most recent event at or before frame `i`.
    pub fn current_actor(&self, i: usize) -> Option<Team> {
        self.attached[..=i]
            .iter()
            .rev()
            .find_map(|ev| ev.last().map(|&e| self.events[e].team))
    }
}

/// Attaches each event to the nearest frame by timestamp (ties go to the
/// earlier frame) and fills possession, carrier and attack direction forward.
/// `frames` must be ordered by time and carry the home team's attack
/// direction, as produced by `build_frames`.
pub fn sync_events_tracking(events: &[EventRecord], frames: Vec<FrameSnapshot>, tolerance: f64) -> AlignedStream {
    let mut attached = vec![Vec::new(); frames.len()];
    let mut dropped = 0;
    for (e, ev) in events.iter().enumerate() {
        let after = frames.partition_point(|f| f.timestamp < ev.timestamp);
        let mut best: Option<(usize, f64)> = None;
        for i in [after.checked_sub(1), Some(after)].into_iter().flatten() {
            if let Some(f) = frames.get(i) {
                let gap = (f.timestamp - ev.timestamp).abs();
                if best.is_none_or(|(_, g)| gap < g) {
                    best = Some((i, gap));
                }
            }
        }
        match best {
            Some((i, gap)) if gap <= tolerance => attached[i].push(e),
            _ => dropped += 1,
        }
    }

    let mut possession_team: BTreeMap<u64, Team> = BTreeMap::new();
    for ev in events {
        possession_team.entry(ev.possession_id).or_insert(ev.team);
    }
    let mut frames = frames;
    let mut possession_ids = Vec::with_capacity(frames.len());
    let (mut current, mut carrier) = (None, None);
    for (frame, evs) in frames.iter_mut().zip(&attached) {
        if let Some(&e) = evs.last() {
            current = Some(events[e].possession_id);
            carrier = Some(events[e].player_id);
        }
        let home_attack = frame.attack_direction;
        frame.possession_team = current.map(|id| possession_team[&id]);
        frame.on_ball_player = carrier.filter(|id| frame.player(*id).is_some());
        frame.attack_direction = match frame.possession_team {
            Some(Team::Away) => home_attack.flipped(),
            _ => home_attack,
        };
        possession_ids.push(current);
    }
    AlignedStream {
        frames,
        possession_ids,
        attached,
        events: events.to_vec(),
        dropped,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PossessionSequence {
    pub possession_id: u64,
    pub team: Team,
    /// Index of the first frame in the aligned stream.
    pub stream_start: usize,
    pub frames: Vec<FrameSnapshot>,
    pub outcome: Option<Outcome>,
    /// Steps at which the attacking team shot.
    pub shot_steps: Vec<usize>,
    pub truncated: bool,
}

impl PossessionSequence {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Ball positions with the attacking team facing `+x`.
    pub fn normalized_ball_positions(&self) -> Vec<Vec2> {
        self.frames
            .iter()
            .map(|f| {
                let p = f.ball.position;
                match f.attack_direction {
                    AttackDirection::PositiveX => p,
                    AttackDirection::NegativeX => p.mirror_x(),
                }
            })
            .collect()
    }

    /// Attacking players, by player id.
    pub fn attackers(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.frames[0].team_players(self.team).map(|p| p.player_id).collect();
        ids.sort_unstable();
        ids
    }
}

/// Splits the stream into runs of one possession over consecutive frames.
/// Runs shorter than `min_frames` are dropped and longer ones truncated.
/// Outcomes count only goals inside the retained frames; a sequence
/// concedes when the next possession in event order belongs to the opponent
/// and scores.
pub fn segment_sequences(
    stream: &AlignedStream,
    vocabulary: &ActionVocabulary,
    config: &IngestConfig,
) -> Result<Vec<PossessionSequence>> {
    let goal_in = |range: std::ops::Range<usize>, team: Team| -> bool {
        stream.attached[range].iter().flatten().any(|&e| {
            let ev = &stream.events[e];
            ev.team == team && vocabulary.is_goal(&ev.action_type)
        })
    };

    let roster = |k: usize| {
        let mut ids: Vec<u32> = stream.frames[k].players.iter().map(|p| p.player_id).collect();
        ids.sort_unstable();
        ids
    };

    // A run also breaks where the set of players changes (substitutions,
    // dismissals, dropouts), so every attacker is present at every step.
    let mut runs: Vec<(u64, std::ops::Range<usize>)> = Vec::new();
    let mut i = 0;
    while i < stream.frames.len() {
        let Some(id) = stream.possession_ids[i] else {
            i += 1;
            continue;
        };
        let start = i;
        let players = roster(start);
        i += 1;
        while i < stream.frames.len()
            && stream.possession_ids[i] == Some(id)
            && stream.frames[i].frame_index == stream.frames[i - 1].frame_index + 1
            && roster(i) == players
        {
            i += 1;
        }
        runs.push((id, start..i));
    }

    // Possession order and team from events, for concession lookups.
    let mut order: Vec<(u64, Team)> = Vec::new();
    for ev in &stream.events {
        if !order.iter().any(|(id, _)| *id == ev.possession_id) {
            order.push((ev.possession_id, ev.team));
        }
    }
    let scored_possession = |id: u64, team: Team| {
        stream.events.iter().any(|ev| ev.possession_id == id && ev.team == team && vocabulary.is_goal(&ev.action_type))
    };

    let mut out = Vec::new();
    for (id, range) in runs {
        if range.len() < config.min_frames {
            continue;
        }
        let truncated = range.len() > config.max_frames;
        let range = range.start..range.start + range.len().min(config.max_frames);
        let team = stream.frames[range.start]
            .possession_team
            .ok_or(Error::UnknownPossession(stream.frames[range.start].frame_index))?;
        let scored = goal_in(range.clone(), team);
        let next = order
            .iter()
            .position(|(p, _)| *p == id)
            .and_then(|k| order.get(k + 1))
            .filter(|(_, t)| *t != team)
            .map(|&(p, t)| scored_possession(p, t));
        let mut shot_steps = Vec::new();
        for (step, evs) in stream.attached[range.clone()].iter().enumerate() {
            let shot = evs.iter().any(|&e| {
                let ev = &stream.events[e];
                ev.team == team && matches!(vocabulary.classify(&ev.action_type), Ok(ActionLabel::Shot))
            });
            if shot {
                shot_steps.push(step);
            }
        }
        out.push(PossessionSequence {
            possession_id: id,
            team,
            stream_start: range.start,
            frames: stream.frames[range].to_vec(),
            outcome: Some(resolve_outcome(scored, next)),
            shot_steps,
            truncated,
        });
    }
    Ok(out)
}

/// Labels of every attacker (ordered as [`PossessionSequence::attackers`]) at
/// every step, `labels[step][k]`.
pub fn label_actions(
    sequence: &PossessionSequence,
    stream: &AlignedStream,
    vocabulary: &ActionVocabulary,
    config: &IngestConfig,
    frame_rate: f64,
) -> Result<Vec<Vec<ActionLabel>>> {
    let attackers = sequence.attackers();
    let window = ((config.label_window * frame_rate).round() as usize).max(1);
    let mut labels = Vec::with_capacity(sequence.len());
    for step in 0..sequence.len() {
        let i = sequence.stream_start + step;
        let frame = &stream.frames[i];
        let sign = frame.attack_direction.sign();
        let contiguous = |a: usize, b: usize| {
            stream.frames[b].frame_index - stream.frames[a].frame_index == (b - a) as u64
        };
        let mut end = (i + window).min(stream.frames.len() - 1);
        while end > i && !contiguous(i, end) {
            end -= 1;
        }
        let (from, to) = if end > i {
            (i, end)
        } else {
            let mut start = i.saturating_sub(window);
            while start < i && !contiguous(start, i) {
                start += 1;
            }
            (start, i)
        };
        let mut row = Vec::with_capacity(attackers.len());
        for &pid in &attackers {
            let label = if frame.on_ball_player == Some(pid) {
                let mut label = ActionLabel::IdleOnBall;
                for &e in &stream.attached[i] {
                    if stream.events[e].player_id == pid {
                        label = vocabulary.classify(&stream.events[e].action_type)?;
                    }
                }
                label
            } else if from == to {
                ActionLabel::Stay
            } else {
                let a = stream.frames[from].player(pid).ok_or(Error::UnknownPlayer(pid))?.position;
                let b = stream.frames[to].player(pid).ok_or(Error::UnknownPlayer(pid))?.position;
                let d = b - a;
                ActionLabel::from_motion(Vec2::new(d.x * sign, d.y), (to - from) as f64 / frame_rate, config.v_stay)
            };
            row.push(label);
        }
        labels.push(row);
    }
    Ok(labels)
}
