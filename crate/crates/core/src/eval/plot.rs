use std::fmt::Write;

use crate::error::{Error, Result};
use crate::pitch::{normalize_attack_direction, FrameSnapshot, PitchConfig, Team};

use super::{DirectionalQ, DIRECTION_LABELS};

const SCALE: f64 = 8.0;
const MARGIN: f64 = 20.0;
const PANEL_WIDTH: f64 = 360.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMode {
    /// Pitch on the left, Q bar chart on the right.
    Panel,
    /// Top-k move arrows drawn from each highlighted player.
    Overlay,
}

#[derive(Debug, Clone)]
pub struct PlotOptions {
    pub mode: PlotMode,
    pub top_k: usize,
    pub pitch: PitchConfig,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self { mode: PlotMode::Panel, top_k: 3, pitch: PitchConfig::default() }
    }
}

struct Canvas<'a> {
    pitch: &'a PitchConfig,
}

impl Canvas<'_> {
    fn x(&self, x: f64) -> f64 {
        MARGIN + (x + self.pitch.half_length()) * SCALE
    }

    fn y(&self, y: f64) -> f64 {
        MARGIN + (self.pitch.half_width() - y) * SCALE
    }
}

fn team_color(team: Team) -> &'static str {
    match team {
        Team::Home => "#c0392b",
        Team::Away => "#2c6fbb",
    }
}

/// Renders a frame (rotated so the team in possession attacks toward +x)
/// with optional off-ball Q highlights. The output is a deterministic SVG
/// string. Moves are the eight directions; stay never gets an arrow.
pub fn render_field_plot(frame: &FrameSnapshot, highlights: &[DirectionalQ], options: &PlotOptions) -> Result<String> {
    let pitch = &options.pitch;
    frame.validate(pitch)?;
    let frame = if frame.possession_team.is_some() { normalize_attack_direction(frame)? } else { frame.clone() };
    for h in highlights {
        let p = frame.player(h.player_id).ok_or(Error::UnknownPlayer(h.player_id))?;
        if frame.on_ball_player == Some(p.player_id) {
            return Err(Error::CarrierRequested { player: h.player_id, frame: frame.frame_index });
        }
        if !h.q.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("directional q"));
        }
    }
    let c = Canvas { pitch };
    let field_w = pitch.length * SCALE + 2.0 * MARGIN;
    let field_h = pitch.width * SCALE + 2.0 * MARGIN;
    let with_panel = options.mode == PlotMode::Panel && !highlights.is_empty();
    let width = if with_panel { field_w + PANEL_WIDTH } else { field_w };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{field_h:.0}" viewBox="0 0 {width:.0} {field_h:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r##"<rect width="{width:.0}" height="{field_h:.0}" fill="#ffffff"/>"##);
    draw_pitch(&mut s, &c);

    for p in frame.players.iter().filter(|p| p.visible) {
        let (x, y) = (c.x(p.position.x), c.y(p.position.y));
        let _ = writeln!(
            s,
            r##"<circle class="player" cx="{x:.2}" cy="{y:.2}" r="7" fill="{}" stroke="#222" stroke-width="1"/>"##,
            team_color(p.team)
        );
        let _ = writeln!(s, r##"<text x="{x:.2}" y="{:.2}" text-anchor="middle" fill="#fff" font-size="8">{}</text>"##, y + 3.0, p.jersey);
        if highlights.iter().any(|h| h.player_id == p.player_id) {
            let _ = writeln!(s, r##"<circle class="subject" cx="{x:.2}" cy="{y:.2}" r="11" fill="none" stroke="#f1c40f" stroke-width="2"/>"##);
        }
    }
    let b = frame.ball.position;
    let _ = writeln!(s, r##"<circle class="ball" cx="{:.2}" cy="{:.2}" r="4" fill="#111" stroke="#fff"/>"##, c.x(b.x), c.y(b.y));

    if options.mode == PlotMode::Overlay {
        for h in highlights {
            let p = frame.player(h.player_id).expect("checked above");
            let k = options.top_k.min(8);
            for (rank, mv) in h.top_moves(k).into_iter().enumerate() {
                let len = 3.0 + 6.0 * (k - rank) as f64 / k as f64;
                let angle = mv as f64 * std::f64::consts::FRAC_PI_4;
                let tip = p.position + crate::pitch::Vec2::from_angle(angle) * len;
                let opacity = 1.0 - 0.25 * rank as f64;
                let _ = writeln!(
                    s,
                    r##"<line class="arrow" data-player="{}" data-move="{}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#f39c12" stroke-width="3" stroke-opacity="{opacity:.2}" marker-end="url(#head)"/>"##,
                    p.player_id,
                    DIRECTION_LABELS[mv],
                    c.x(p.position.x),
                    c.y(p.position.y),
                    c.x(tip.x),
                    c.y(tip.y)
                );
            }
        }
    }
    if with_panel {
        draw_bars(&mut s, field_w, field_h, highlights);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn draw_pitch(s: &mut String, c: &Canvas) {
    let p = c.pitch;
    let (hl, hw) = (p.half_length(), p.half_width());
    let line = r##"fill="none" stroke="#ffffff" stroke-width="2""##;
    let _ = writeln!(
        s,
        r##"<defs><marker id="head" markerWidth="6" markerHeight="6" refX="3" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#f39c12"/></marker></defs>"##
    );
    let _ = writeln!(
        s,
        r##"<rect class="pitch" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#3a8d3f" stroke="#ffffff" stroke-width="2"/>"##,
        c.x(-hl),
        c.y(hw),
        p.length * SCALE,
        p.width * SCALE
    );
    let _ = writeln!(s, r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" {line}/>"#, c.x(0.0), c.y(hw), c.y(-hw));
    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" {line}/>"#, c.x(0.0), c.y(0.0), 9.15 * SCALE);
    for sign in [-1.0, 1.0] {
        // penalty and goal areas
        for (depth, half) in [(16.5, 20.16), (5.5, 9.16)] {
            let x0 = if sign > 0.0 { hl - depth } else { -hl };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" {line}/>"#,
                c.x(x0),
                c.y(half),
                depth * SCALE,
                2.0 * half * SCALE
            );
        }
        let gx = sign * hl;
        let _ = writeln!(
            s,
            r##"<line class="goal" x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="#111" stroke-width="4"/>"##,
            c.x(gx),
            c.y(p.goal_width / 2.0),
            c.y(-p.goal_width / 2.0)
        );
    }
}

fn draw_bars(s: &mut String, x0: f64, height: f64, highlights: &[DirectionalQ]) {
    let rows = highlights.len() as f64;
    let block = (height - 2.0 * MARGIN) / rows;
    let (lo, hi) = highlights
        .iter()
        .flat_map(|h| h.q.iter().copied())
        .fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let span = (hi - lo).max(1e-12);
    let chart_w = PANEL_WIDTH - 2.0 * MARGIN;
    let bar_w = chart_w / 9.0;
    for (row, h) in highlights.iter().enumerate() {
        let top = MARGIN + row as f64 * block;
        let plot_h = block - 30.0;
        let zero = top + 14.0 + plot_h * hi / span;
        let _ = writeln!(s, r##"<text x="{:.2}" y="{:.2}" fill="#222">player {} frame {}</text>"##, x0 + MARGIN, top + 10.0, h.player_id, h.frame_index);
        for (i, v) in h.q.iter().enumerate() {
            let bx = x0 + MARGIN + i as f64 * bar_w;
            let bh = plot_h * v.abs() / span;
            let by = if *v >= 0.0 { zero - bh } else { zero };
            let fill = if h.top_k.contains(&i) { "#f39c12" } else { "#7f8c8d" };
            let _ = writeln!(
                s,
                r#"<rect class="bar" data-move="{}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"><title>{} {:.4}</title></rect>"#,
                DIRECTION_LABELS[i],
                bx + 2.0,
                by,
                bar_w - 4.0,
                bh,
                DIRECTION_LABELS[i],
                v
            );
            let _ = writeln!(s, r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" fill="#222" font-size="9">{}</text>"##, bx + bar_w / 2.0, top + block - 6.0, DIRECTION_LABELS[i]);
        }
        let _ = writeln!(s, r##"<line x1="{:.2}" y1="{zero:.2}" x2="{:.2}" y2="{zero:.2}" stroke="#222"/>"##, x0 + MARGIN, x0 + MARGIN + chart_w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pitch::{PlayerState, Vec2};

    fn frame() -> FrameSnapshot {
        let mut players = Vec::new();
        for i in 0..22u32 {
            let team = if i < 11 { Team::Home } else { Team::Away };
            let x = -40.0 + (i % 11) as f64 * 8.0;
            let y = if i < 11 { 10.0 } else { -10.0 };
            players.push(PlayerState::new(i + 1, team, i % 11 + 1, Vec2::new(x, y)));
        }
        FrameSnapshot {
            frame_index: 9,
            timestamp: 0.36,
            players,
            ball: Default::default(),
            possession_team: Some(Team::Home),
            on_ball_player: Some(5),
            attack_direction: Default::default(),
            formations: Default::default(),
        }
    }

    fn highlight(player_id: u32) -> DirectionalQ {
        let q = [0.1, 0.5, -0.2, 0.3, 0.0, 0.05, 0.6, -0.1, 0.9];
        DirectionalQ { episode: 0, player_id, frame_index: 9, q, top_k: vec![8, 6, 1] }
    }

    #[test]
    fn overlay_draws_k_arrows_per_subject_and_skips_stay() {
        let opts = PlotOptions { mode: PlotMode::Overlay, ..Default::default() };
        let svg = render_field_plot(&frame(), &[highlight(3), highlight(14)], &opts).unwrap();
        assert_eq!(svg.matches("class=\"arrow\"").count(), 6);
        assert!(!svg.contains("data-move=\"stay\""));
        assert_eq!(svg, render_field_plot(&frame(), &[highlight(3), highlight(14)], &opts).unwrap());
    }

    #[test]
    fn empty_highlights_give_pitch_only() {
        for mode in [PlotMode::Panel, PlotMode::Overlay] {
            let svg = render_field_plot(&frame(), &[], &PlotOptions { mode, ..Default::default() }).unwrap();
            assert!(!svg.contains("class=\"arrow\"") && !svg.contains("class=\"bar\""));
            assert_eq!(svg.matches("class=\"player\"").count(), 22);
        }
        let svg = render_field_plot(&frame(), &[highlight(3)], &PlotOptions::default()).unwrap();
        assert_eq!(svg.matches("class=\"bar\"").count(), 9);
    }

    #[test]
    fn rejects_bad_frames_and_carriers() {
        let mut f = frame();
        f.players.pop();
        assert!(render_field_plot(&f, &[], &PlotOptions::default()).is_err());
        assert!(matches!(
            render_field_plot(&frame(), &[highlight(5)], &PlotOptions::default()),
            Err(Error::CarrierRequested { .. })
        ));
    }
}
