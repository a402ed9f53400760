//! Loading, synchronizing, segmenting and labeling match data, the SAR
//! sample format, and the synthetic match generator.

mod actions;
mod inputs;
mod pipeline;
mod sar;
mod sequence;
mod synth;

pub use actions::{ActionLabel, ActionMask, ActionVocabulary, N_ACTIONS, N_OFF_BALL, N_ON_BALL};
pub use inputs::{
    build_frames, load_events, load_roster, load_tracking, parse_events, parse_roster, read_tracking_csv,
    write_tracking_csv, EventRecord, Roster, RosterEntry, TrackingRow, BALL_ID,
};
pub use pipeline::{
    feature_dump, preprocess, scene_frames, FeatureRow, MatchInput, PreprocessReport, PreprocessSettings, SceneFrame,
};
pub use sar::{
    build_sar, edms_state, EpisodeSamples, SarDataset, SarHeader, SarSample, SarScaling, Standardizer,
    StateKind, Trajectory, SAR_LAYOUT_VERSION,
};
pub use sequence::{
    label_actions, segment_sequences, sync_events_tracking, AlignedStream, IngestConfig, PossessionSequence,
};
pub use synth::{synth_generate, Scenario, SynthDataset, SynthOptions, SynthPossession};
