use crate::pitch::{PitchConfig, Vec2};

use super::ImportanceSurface;

/// Regular cell grid covering the pitch. Cell `(i, j)` has index `j * nx + i`,
/// with `i` running along x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchGrid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
}

impl PitchGrid {
    /// Cells are at most `resolution` meters wide and tile the pitch exactly.
    pub fn new(pitch: &PitchConfig, resolution: f64) -> Self {
        let nx = ((pitch.length / resolution) - 1e-9).ceil().max(1.0) as usize;
        let ny = ((pitch.width / resolution) - 1e-9).ceil().max(1.0) as usize;
        Self {
            nx,
            ny,
            dx: pitch.length / nx as f64,
            dy: pitch.width / ny as f64,
            x0: -pitch.half_length(),
            y0: -pitch.half_width(),
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn center_x(&self, i: usize) -> f64 {
        self.x0 + (i as f64 + 0.5) * self.dx
    }

    pub fn center_y(&self, j: usize) -> f64 {
        self.y0 + (j as f64 + 0.5) * self.dy
    }

    pub fn center(&self, cell: usize) -> Vec2 {
        Vec2::new(self.center_x(cell % self.nx), self.center_y(cell / self.nx))
    }
}

/// Importance times cell area, precomputed per cell. Immutable and shareable.
#[derive(Debug, Clone)]
pub struct ImportanceField {
    pub grid: PitchGrid,
    pub weights: Vec<f64>,
    pub pitch_area: f64,
}

impl ImportanceField {
    pub fn new(pitch: &PitchConfig, surface: &ImportanceSurface, resolution: f64) -> Self {
        let grid = PitchGrid::new(pitch, resolution);
        let area = grid.cell_area();
        let weights = (0..grid.len())
            .map(|c| surface.importance(grid.center(c)) * area)
            .collect();
        Self {
            grid,
            weights,
            pitch_area: pitch.area(),
        }
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}
