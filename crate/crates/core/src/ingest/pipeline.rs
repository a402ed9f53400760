//! Tracking + events to SAR samples.

use rayon::prelude::*;

use super::{
    build_frames, build_sar, label_actions, segment_sequences, sync_events_tracking, ActionVocabulary,
    EpisodeSamples, EventRecord, IngestConfig, PossessionSequence, Roster, SarDataset, SarHeader,
    SarSample, SarScaling, Standardizer, StateKind, TrackingRow, SAR_LAYOUT_VERSION,
};
use crate::edms::{
    assemble_pvs, edms_column_names, pvs_column_names, resolve_context, FeatureEngine, FrameEdms,
    PassScaling, PossessionContext, PVS_LEN,
};
use crate::error::{Error, Result};
use crate::pitch::{normalize_attack_direction, FrameSnapshot, KinematicsOptions, PitchConfig};
use crate::reward::{assign_rewards, EpvGrid, RewardInputs};

/// One match worth of raw inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchInput {
    pub tracking: Vec<TrackingRow>,
    pub events: Vec<EventRecord>,
    pub roster: Roster,
}

pub struct PreprocessSettings<'a> {
    pub pitch: &'a PitchConfig,
    pub kinematics: &'a KinematicsOptions,
    pub ingest: &'a IngestConfig,
    pub vocabulary: &'a ActionVocabulary,
    pub engine: &'a FeatureEngine,
    pub epv: &'a EpvGrid,
    pub state_kind: StateKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreprocessReport {
    pub dropped_events: usize,
    pub sequences: usize,
    pub truncated: usize,
    pub samples: usize,
}

/// A segmented possession with everything needed to emit samples.
struct Prepared {
    sequence: PossessionSequence,
    labels: Vec<Vec<super::ActionLabel>>,
    rewards: Vec<f64>,
    contexts: Vec<PossessionContext>,
}

fn prepare_match(input: &MatchInput, s: &PreprocessSettings<'_>) -> Result<(Vec<Prepared>, usize)> {
    let frames = build_frames(&input.tracking, &input.roster, s.pitch, s.kinematics)?;
    let stream = sync_events_tracking(&input.events, frames, s.ingest.event_tolerance);
    let sequences = segment_sequences(&stream, s.vocabulary, s.ingest)?;
    let mut out = Vec::with_capacity(sequences.len());
    for sequence in sequences {
        let labels = label_actions(&sequence, &stream, s.vocabulary, s.ingest, s.pitch.frame_rate)?;
        let balls = sequence.normalized_ball_positions();
        let rewards = assign_rewards(
            &RewardInputs {
                sequence_id: sequence.possession_id,
                outcome: sequence.outcome,
                shot_steps: &sequence.shot_steps,
                ball_positions: &balls,
            },
            s.epv,
        )?;
        let contexts = (0..sequence.len())
            .map(|step| {
                let i = sequence.stream_start + step;
                resolve_context(stream.current_actor(i), stream.next_actor_after(i), sequence.team)
            })
            .collect();
        out.push(Prepared {
            sequence,
            labels,
            rewards,
            contexts,
        });
    }
    Ok((out, stream.dropped))
}

/// Runs synchronization, segmentation, labeling, rewards and state assembly
/// over every match. Matches and frames are processed in parallel; the output
/// order is fixed by match order, sequence order, attacker id and step.
pub fn preprocess(matches: &[MatchInput], s: &PreprocessSettings<'_>) -> Result<(SarDataset, PreprocessReport)> {
    let prepared: Vec<(Vec<Prepared>, usize)> = matches
        .par_iter()
        .map(|m| prepare_match(m, s))
        .collect::<Result<_>>()?;
    let mut report = PreprocessReport::default();
    let episodes: Vec<&Prepared> = prepared.iter().flat_map(|(p, _)| p).collect();
    report.dropped_events = prepared.iter().map(|(_, d)| d).sum();
    report.sequences = episodes.len();
    report.truncated = episodes.iter().filter(|p| p.sequence.truncated).count();
    if episodes.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let jobs: Vec<(usize, usize)> = episodes
        .iter()
        .enumerate()
        .flat_map(|(e, p)| (0..p.sequence.len()).map(move |t| (e, t)))
        .collect();

    let (columns, pass_scaling, states): (Vec<String>, Option<PassScaling>, Vec<Vec<PlayerStates>>) =
        match s.state_kind {
            StateKind::Edms => {
                let mut features: Vec<FrameEdms> = jobs
                    .par_iter()
                    .map(|&(e, t)| {
                        let p = episodes[e];
                        s.engine.frame_features(&p.sequence.frames[t], p.contexts[t])
                    })
                    .collect::<Result<_>>()?;
                let scaling = PassScaling::fit(features.iter().flat_map(|f| f.rows.iter().map(|(_, r)| &r.inputs)));
                features.par_iter_mut().try_for_each(|f| f.rescore(&scaling))?;
                let per_frame = features
                    .par_iter()
                    .zip(&jobs)
                    .map(|(f, &(e, _))| {
                        episodes[e]
                            .sequence
                            .attackers()
                            .into_iter()
                            .map(|pid| Ok((pid, f.state_for(pid)?.to_vector())))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                (edms_column_names(&s.engine.config.formations), Some(scaling), regroup(&episodes, per_frame))
            }
            StateKind::Pvs => {
                let per_frame = jobs
                    .par_iter()
                    .map(|&(e, t)| {
                        let p = episodes[e];
                        let v = assemble_pvs(&normalize_attack_direction(&p.sequence.frames[t])?)?;
                        Ok(p.sequence.attackers().into_iter().map(|pid| (pid, v.clone())).collect())
                    })
                    .collect::<Result<Vec<_>>>()?;
                (pvs_column_names(), None, regroup(&episodes, per_frame))
            }
        };

    let mut samples: Vec<SarSample> = Vec::new();
    for (e, p) in episodes.iter().enumerate() {
        let frame_indices: Vec<u64> = p.sequence.frames.iter().map(|f| f.frame_index).collect();
        let carriers: Vec<Option<u32>> = p
            .sequence
            .frames
            .iter()
            .map(|f| f.carrier().filter(|c| c.team == p.sequence.team).map(|c| c.player_id))
            .collect();
        let attackers = p.sequence.attackers();
        let input = EpisodeSamples {
            episode: e as u64,
            team: p.sequence.team,
            frame_indices: &frame_indices,
            carriers: &carriers,
            attackers: &attackers,
            labels: &p.labels,
            rewards: &p.rewards,
        };
        let per_step = &states[e];
        samples.extend(build_sar(&input, |t, pid| {
            per_step[t]
                .iter()
                .find(|(id, _)| *id == pid)
                .map(|(_, v)| v.clone())
                .ok_or(Error::UnknownPlayer(pid))
        })?);
    }
    report.samples = samples.len();

    let dim = columns.len();
    debug_assert!(s.state_kind != StateKind::Pvs || dim == PVS_LEN);
    let features = Standardizer::fit(dim, samples.iter().map(|x| x.state.as_slice()));
    let dataset = SarDataset {
        header: SarHeader {
            layout_version: SAR_LAYOUT_VERSION,
            state_kind: s.state_kind,
            scaling: SarScaling {
                pass: pass_scaling,
                features,
            },
            frame_rate: s.pitch.frame_rate,
            state_dim: dim,
            columns,
        },
        samples,
    };
    dataset.validate()?;
    Ok((dataset, report))
}

type PlayerStates = Vec<(u32, Vec<f64>)>;

fn regroup(episodes: &[&Prepared], flat: Vec<PlayerStates>) -> Vec<Vec<PlayerStates>> {
    let mut it = flat.into_iter();
    episodes
        .iter()
        .map(|p| it.by_ref().take(p.sequence.len()).collect())
        .collect()
}

/// A synchronized frame with the context its state would be built under.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneFrame {
    pub frame: FrameSnapshot,
    pub possession_id: Option<u64>,
    /// `None` when no team is in possession.
    pub context: Option<PossessionContext>,
}

/// Frames of one match after synchronization, in time order.
pub fn scene_frames(
    input: &MatchInput,
    pitch: &PitchConfig,
    kinematics: &KinematicsOptions,
    ingest: &IngestConfig,
) -> Result<Vec<SceneFrame>> {
    let frames = build_frames(&input.tracking, &input.roster, pitch, kinematics)?;
    let stream = sync_events_tracking(&input.events, frames, ingest.event_tolerance);
    Ok((0..stream.frames.len())
        .map(|i| {
            let frame = stream.frames[i].clone();
            let context = frame
                .possession_team
                .map(|team| resolve_context(stream.current_actor(i), stream.next_actor_after(i), team));
            SceneFrame {
                frame,
                possession_id: stream.possession_ids[i],
                context,
            }
        })
        .collect())
}

/// One state row of a feature dump.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub frame_index: u64,
    pub player_id: u32,
    pub values: Vec<f64>,
}

/// EDMS states of every attacking player for frames in `[first, last]`.
/// Frames without possession or without a resolvable carrier are skipped.
/// Pass scaling is fitted over the dumped frames.
pub fn feature_dump(scenes: &[SceneFrame], engine: &FeatureEngine, first: u64, last: u64) -> Result<(Vec<String>, Vec<FeatureRow>)> {
    let picked: Vec<&SceneFrame> = scenes
        .iter()
        .filter(|s| (first..=last).contains(&s.frame.frame_index) && s.context.is_some())
        .collect();
    let mut features: Vec<(&SceneFrame, FrameEdms)> = picked
        .par_iter()
        .filter_map(|s| match engine.frame_features(&s.frame, s.context.expect("filtered")) {
            Ok(f) => Some(Ok((*s, f))),
            Err(Error::UnresolvedCarrier(_)) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_>>()?;
    let scaling = PassScaling::fit(features.iter().flat_map(|(_, f)| f.rows.iter().map(|(_, r)| &r.inputs)));
    features.par_iter_mut().try_for_each(|(_, f)| f.rescore(&scaling))?;
    let mut rows = Vec::new();
    for (scene, f) in &features {
        let team = scene.frame.attacking_team()?;
        let mut ids: Vec<u32> = scene.frame.team_players(team).map(|p| p.player_id).collect();
        ids.sort_unstable();
        for pid in ids {
            rows.push(FeatureRow {
                frame_index: scene.frame.frame_index,
                player_id: pid,
                values: f.state_for(pid)?.to_vector(),
            });
        }
    }
    Ok((edms_column_names(&engine.config.formations), rows))
}
