use serde::{Deserialize, Serialize};

use super::Vec2;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KinematicsOptions {
    /// Centered moving-average window applied after differencing (odd, frames).
    pub smoothing_window: usize,
    /// Longest gap (frames) that is interpolated without flagging the player.
    pub max_gap: usize,
}

impl Default for KinematicsOptions {
    fn default() -> Self {
        Self {
            smoothing_window: 5,
            max_gap: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kinematics {
    /// Gap-filled positions.
    pub positions: Vec<Vec2>,
    pub velocity: Vec<Vec2>,
    pub acceleration: Vec<Vec2>,
    /// Frames that sit inside a gap longer than `max_gap`; such samples should
    /// be treated as not visible.
    pub flagged: Vec<bool>,
}

/// Velocity and acceleration of a regularly sampled trajectory.
///
/// Missing samples are linearly interpolated (held constant before the first
/// and after the last observation); derivatives use central differences in the
/// interior and one-sided differences at both ends, followed by a centered
/// moving average.
pub fn compute_kinematics(
    positions: &[Option<Vec2>],
    frame_rate: f64,
    options: &KinematicsOptions,
) -> Result<Kinematics> {
    if positions.len() < 3 {
        return Err(Error::Kinematics(format!(
            "series needs at least 3 samples, got {}",
            positions.len()
        )));
    }
    if !(frame_rate > 0.0) {
        return Err(Error::Kinematics("frame rate must be > 0".into()));
    }
    let (filled, flagged) = fill_gaps(positions, options.max_gap)?;
    let velocity = smooth(&differentiate(&filled, frame_rate), options.smoothing_window);
    let acceleration = smooth(&differentiate(&velocity, frame_rate), options.smoothing_window);
    Ok(Kinematics {
        positions: filled,
        velocity,
        acceleration,
        flagged,
    })
}

fn fill_gaps(positions: &[Option<Vec2>], max_gap: usize) -> Result<(Vec<Vec2>, Vec<bool>)> {
    let observed: Vec<usize> = positions
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.map(|_| i))
        .collect();
    let (&first, &last) = match (observed.first(), observed.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::Kinematics("series has no observed samples".into())),
    };
    let n = positions.len();
    let mut out = vec![Vec2::ZERO; n];
    let mut flagged = vec![false; n];

    let head = positions[first].unwrap();
    for slot in out.iter_mut().take(first) {
        *slot = head;
    }
    if first > max_gap {
        flagged[..first].iter_mut().for_each(|f| *f = true);
    }
    let tail = positions[last].unwrap();
    for slot in out.iter_mut().skip(last + 1) {
        *slot = tail;
    }
    if n - 1 - last > max_gap {
        flagged[last + 1..].iter_mut().for_each(|f| *f = true);
    }

    for pair in observed.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (pa, pb) = (positions[a].unwrap(), positions[b].unwrap());
        out[a] = pa;
        let gap = b - a - 1;
        for i in a + 1..b {
            let t = (i - a) as f64 / (b - a) as f64;
            out[i] = pa + (pb - pa) * t;
            flagged[i] = gap > max_gap;
        }
    }
    out[last] = tail;
    Ok((out, flagged))
}

fn differentiate(series: &[Vec2], frame_rate: f64) -> Vec<Vec2> {
    let n = series.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (series[1] - series[0]) * frame_rate
            } else if i == n - 1 {
                (series[n - 1] - series[n - 2]) * frame_rate
            } else {
                (series[i + 1] - series[i - 1]) * (frame_rate / 2.0)
            }
        })
        .collect()
}

fn smooth(series: &[Vec2], window: usize) -> Vec<Vec2> {
    if window <= 1 {
        return series.to_vec();
    }
    let half = window / 2;
    let n = series.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let sum = series[lo..=hi].iter().fold(Vec2::ZERO, |acc, &v| acc + v);
            sum * (1.0 / (hi - lo + 1) as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(n: usize, rate: f64) -> Vec<Option<Vec2>> {
        (0..n).map(|i| Some(Vec2::new(i as f64 / rate, 2.0))).collect()
    }

    #[test]
    fn stationary_series() {
        let s = vec![Some(Vec2::new(3.0, -4.0)); 12];
        let k = compute_kinematics(&s, 25.0, &Default::default()).unwrap();
        assert!(k.velocity.iter().all(|v| *v == Vec2::ZERO));
        assert!(k.acceleration.iter().all(|a| *a == Vec2::ZERO));
    }

    #[test]
    fn linear_motion_has_unit_velocity() {
        let k = compute_kinematics(&linear(50, 25.0), 25.0, &Default::default()).unwrap();
        for (v, a) in k.velocity.iter().zip(&k.acceleration) {
            assert!((v.x - 1.0).abs() < 1e-9, "{v:?}");
            assert!(v.y.abs() < 1e-12);
            assert!(a.norm() < 1e-9, "{a:?}");
        }
    }

    #[test]
    fn single_gap_is_restored() {
        let full = linear(30, 25.0);
        let mut gappy = full.clone();
        gappy[13] = None;
        let a = compute_kinematics(&full, 25.0, &Default::default()).unwrap();
        let b = compute_kinematics(&gappy, 25.0, &Default::default()).unwrap();
        for (p, q) in a.velocity.iter().zip(&b.velocity) {
            assert!((*p - *q).norm() < 1e-12);
        }
        for (p, q) in a.positions.iter().zip(&b.positions) {
            assert!((*p - *q).norm() < 1e-12);
        }
        assert!(b.flagged.iter().all(|f| !f));
    }

    #[test]
    fn long_gaps_are_flagged() {
        let mut s = linear(40, 25.0);
        for slot in s.iter_mut().skip(5).take(11) {
            *slot = None;
        }
        let k = compute_kinematics(&s, 25.0, &Default::default()).unwrap();
        assert!(k.flagged[5..16].iter().all(|f| *f));
        assert!(!k.flagged[4] && !k.flagged[16]);
    }

    #[test]
    fn errors() {
        assert!(compute_kinematics(&linear(2, 25.0), 25.0, &Default::default()).is_err());
        assert!(compute_kinematics(&[None, None, None], 25.0, &Default::default()).is_err());
    }
}
