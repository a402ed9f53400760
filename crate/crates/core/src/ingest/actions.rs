use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pitch::Vec2;

pub const N_ACTIONS: usize = 16;
pub const N_ON_BALL: usize = 7;
pub const N_OFF_BALL: usize = 9;

/// The 16 discrete actions. Indices 0..7 are on-ball, 7..16 off-ball; the
/// eight moves run counterclockwise from the attacked goal in 45 degree steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionLabel {
    Pass,
    ThroughPass,
    Shot,
    Cross,
    Dribble,
    DefensiveAction,
    IdleOnBall,
    Move(u8),
    Stay,
}

const NAMES: [&str; N_ACTIONS] = [
    "pass",
    "through_pass",
    "shot",
    "cross",
    "dribble",
    "defensive_action",
    "idle_on_ball",
    "move_0",
    "move_45",
    "move_90",
    "move_135",
    "move_180",
    "move_225",
    "move_270",
    "move_315",
    "stay",
];

impl ActionLabel {
    pub const ALL: [ActionLabel; N_ACTIONS] = [
        ActionLabel::Pass,
        ActionLabel::ThroughPass,
        ActionLabel::Shot,
        ActionLabel::Cross,
        ActionLabel::Dribble,
        ActionLabel::DefensiveAction,
        ActionLabel::IdleOnBall,
        ActionLabel::Move(0),
        ActionLabel::Move(1),
        ActionLabel::Move(2),
        ActionLabel::Move(3),
        ActionLabel::Move(4),
        ActionLabel::Move(5),
        ActionLabel::Move(6),
        ActionLabel::Move(7),
        ActionLabel::Stay,
    ];

    pub fn index(self) -> usize {
        match self {
            ActionLabel::Pass => 0,
            ActionLabel::ThroughPass => 1,
            ActionLabel::Shot => 2,
            ActionLabel::Cross => 3,
            ActionLabel::Dribble => 4,
            ActionLabel::DefensiveAction => 5,
            ActionLabel::IdleOnBall => 6,
            ActionLabel::Move(k) => 7 + usize::from(k % 8),
            ActionLabel::Stay => 15,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        NAMES[self.index()]
    }

    pub fn is_on_ball(self) -> bool {
        self.index() < N_ON_BALL
    }

    pub fn one_hot(self) -> [f64; N_ACTIONS] {
        let mut v = [0.0; N_ACTIONS];
        v[self.index()] = 1.0;
        v
    }

    /// Off-ball label of a displacement: `Stay` below `v_stay`, otherwise the
    /// nearest of the eight directions.
    pub fn from_motion(displacement: Vec2, seconds: f64, v_stay: f64) -> Self {
        if displacement.norm() / seconds < v_stay {
            return ActionLabel::Stay;
        }
        let step = std::f64::consts::FRAC_PI_4;
        let k = (displacement.y.atan2(displacement.x) / step).round() as i64;
        ActionLabel::Move(k.rem_euclid(8) as u8)
    }
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NAMES
            .iter()
            .position(|n| *n == s)
            .map(|i| Self::ALL[i])
            .ok_or_else(|| Error::UnknownAction(s.to_string()))
    }
}

impl Serialize for ActionLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ActionLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Validity of each action for a player, as a 16-bit set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionMask(pub u16);

impl ActionMask {
    pub const ON_BALL: ActionMask = ActionMask((1 << N_ON_BALL) - 1);
    pub const OFF_BALL: ActionMask = ActionMask(((1u32 << N_ACTIONS) - 1) as u16 & !((1 << N_ON_BALL) - 1));

    pub fn for_player(on_ball: bool) -> Self {
        if on_ball {
            Self::ON_BALL
        } else {
            Self::OFF_BALL
        }
    }

    pub fn allows(self, index: usize) -> bool {
        index < N_ACTIONS && self.0 & (1 << index) != 0
    }

    pub fn is_on_ball(self) -> bool {
        self == Self::ON_BALL
    }
}

/// Maps provider action strings to on-ball classes. Lookups are
/// case-insensitive and treat spaces and hyphens as underscores.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionVocabulary {
    map: BTreeMap<String, ActionLabel>,
    goals: Vec<String>,
}

impl Default for ActionVocabulary {
    fn default() -> Self {
        use ActionLabel::*;
        let table: &[(&str, ActionLabel)] = &[
            ("pass", Pass),
            ("short_pass", Pass),
            ("long_pass", Pass),
            ("long_ball", Pass),
            ("throw_in", Pass),
            ("free_kick", Pass),
            ("corner", Cross),
            ("goal_kick", Pass),
            ("kick_off", Pass),
            ("through_pass", ThroughPass),
            ("through_ball", ThroughPass),
            ("shot", Shot),
            ("shot_on_target", Shot),
            ("shot_off_target", Shot),
            ("shot_blocked", Shot),
            ("goal", Shot),
            ("cross", Cross),
            ("dribble", Dribble),
            ("carry", Dribble),
            ("take_on", Dribble),
            ("ball_receipt", Dribble),
            ("defensive_action", DefensiveAction),
            ("interception", DefensiveAction),
            ("clearance", DefensiveAction),
            ("tackle", DefensiveAction),
            ("block", DefensiveAction),
            ("ball_recovery", DefensiveAction),
            ("duel", DefensiveAction),
        ];
        Self {
            map: table.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            goals: vec!["goal".into()],
        }
    }
}

fn canonical(s: &str) -> String {
    s.trim().to_lowercase().replace([' ', '-'], "_")
}

impl ActionVocabulary {
    /// Adds or overrides entries; targets must be on-ball class names.
    pub fn with_entries(mut self, extra: &BTreeMap<String, String>) -> Result<Self> {
        for (provider, class) in extra {
            let label: ActionLabel = class.parse()?;
            if !label.is_on_ball() {
                return Err(Error::config(
                    format!("ingest.action_map.{provider}"),
                    format!("`{class}` is not an on-ball action"),
                ));
            }
            self.map.insert(canonical(provider), label);
        }
        Ok(self)
    }

    pub fn classify(&self, provider: &str) -> Result<ActionLabel> {
        self.map
            .get(&canonical(provider))
            .copied()
            .ok_or_else(|| Error::UnknownAction(provider.to_string()))
    }

    pub fn is_goal(&self, provider: &str) -> bool {
        let c = canonical(provider);
        self.goals.contains(&c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sixteen_disjoint_actions() {
        assert_eq!(ActionLabel::ALL.len(), 16);
        for (i, a) in ActionLabel::ALL.iter().enumerate() {
            assert_eq!(a.index(), i);
            assert_eq!(a.name().parse::<ActionLabel>().unwrap(), *a);
            assert_eq!(ActionMask::ON_BALL.allows(i), a.is_on_ball());
            assert_eq!(ActionMask::OFF_BALL.allows(i), !a.is_on_ball());
        }
        assert_eq!(ActionMask::ON_BALL.0 & ActionMask::OFF_BALL.0, 0);
        assert_eq!(ActionMask::ON_BALL.0 | ActionMask::OFF_BALL.0, u16::MAX);
        assert_eq!(ActionMask::OFF_BALL.0.count_ones(), 9);
    }

    #[test]
    fn motion_labels() {
        assert_eq!(ActionLabel::from_motion(Vec2::new(1.0, 0.0), 1.0, 0.5), ActionLabel::Move(0));
        assert_eq!(ActionLabel::from_motion(Vec2::new(0.2, 0.0), 1.0, 0.5), ActionLabel::Stay);
        assert_eq!(ActionLabel::from_motion(Vec2::new(0.0, -2.0), 1.0, 0.5), ActionLabel::Move(6));
        assert_eq!(ActionLabel::from_motion(Vec2::new(-1.0, -0.01), 1.0, 0.5), ActionLabel::Move(4));
    }

    #[test]
    fn provider_vocabulary() {
        let v = ActionVocabulary::default();
        assert_eq!(v.classify("tackle").unwrap(), ActionLabel::DefensiveAction);
        assert_eq!(v.classify("Through Ball").unwrap(), ActionLabel::ThroughPass);
        assert!(v.is_goal("Goal"));
        match v.classify("bicycle_kick") {
            Err(Error::UnknownAction(s)) => assert_eq!(s, "bicycle_kick"),
            other => panic!("{other:?}"),
        }
        let extra = BTreeMap::from([("bicycle kick".to_string(), "shot".to_string())]);
        let v = v.with_entries(&extra).unwrap();
        assert_eq!(v.classify("bicycle_kick").unwrap(), ActionLabel::Shot);
        let bad = BTreeMap::from([("x".to_string(), "stay".to_string())]);
        assert!(ActionVocabulary::default().with_entries(&bad).is_err());
    }

    proptest! {
        #[test]
        fn rotation_advances_direction(angle in 0.0f64..std::f64::consts::TAU, speed in 0.6f64..9.0) {
            let step = std::f64::consts::FRAC_PI_4;
            let offset = (angle / step).fract();
            prop_assume!((offset - 0.5).abs() > 0.01);
            let a = ActionLabel::from_motion(Vec2::from_angle(angle) * speed, 1.0, 0.5);
            let b = ActionLabel::from_motion(Vec2::from_angle(angle + step) * speed, 1.0, 0.5);
            match (a, b) {
                (ActionLabel::Move(i), ActionLabel::Move(j)) => prop_assert_eq!((i + 1) % 8, j),
                other => prop_assert!(false, "{:?}", other),
            }
        }
    }
}
