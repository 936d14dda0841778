//! Buffered rectangle relations and presence intervals.
//!
//! The hangar origin is the back-left corner; the open front (the only
//! entrance and exit) is the edge at maximum Y. An aircraft `upper` blocks
//! `lower` when it sits fully above it (with the buffer) while their
//! buffered x-ranges overlap, i.e. they share a lane toward the exit.

/// Absolute tolerance for every time (hours) and length (meters) comparison.
pub const TOL: f64 = 1e-6;

/// Axis-aligned footprint, `(x, y)` is the front-left corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub l: f64,
}

impl Footprint {
    pub fn new(x: f64, y: f64, w: f64, l: f64) -> Self {
        Self { x, y, w, l }
    }

    /// `self` lies entirely to the right of `other` with `buffer` clearance.
    pub fn right_of(&self, other: &Footprint, buffer: f64) -> bool {
        other.x + other.w + buffer <= self.x + TOL
    }

    /// `self` lies entirely above (toward the exit) `other` with clearance.
    pub fn above(&self, other: &Footprint, buffer: f64) -> bool {
        other.y + other.l + buffer <= self.y + TOL
    }

    pub fn x_separated(&self, other: &Footprint, buffer: f64) -> bool {
        self.right_of(other, buffer) || other.right_of(self, buffer)
    }

    pub fn separated(&self, other: &Footprint, buffer: f64) -> bool {
        self.x_separated(other, buffer) || self.above(other, buffer) || other.above(self, buffer)
    }

    /// Smallest shift along one axis that would restore buffered separation;
    /// zero or negative when already separated.
    pub fn separation_deficit(&self, other: &Footprint, buffer: f64) -> f64 {
        [
            other.x + other.w + buffer - self.x,
            self.x + self.w + buffer - other.x,
            other.y + other.l + buffer - self.y,
            self.y + self.l + buffer - other.y,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }

    /// `self` sits in `lower`'s lane between it and the exit.
    pub fn blocks(&self, lower: &Footprint, buffer: f64) -> bool {
        self.above(lower, buffer) && !self.x_separated(lower, buffer)
    }
}

/// An accepted aircraft's footprint together with its stay in the hangar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupancy {
    pub rect: Footprint,
    pub roll_in: f64,
    pub roll_out: f64,
    /// Current aircraft are inside before the plan starts; their roll-in at
    /// zero is not a movement.
    pub current: bool,
}

impl Occupancy {
    /// Inside the hangar at instant `t`, exclusive of its own movements.
    pub fn present_at(&self, t: f64) -> bool {
        (self.current || self.roll_in + TOL < t) && t + TOL < self.roll_out
    }

    /// The two stays share a period of positive length.
    pub fn overlaps(&self, other: &Occupancy) -> bool {
        self.roll_in.max(other.roll_in) + TOL < self.roll_out.min(other.roll_out)
    }
}

/// Grid coordinates `start, start + step, ...` not exceeding `end`.
/// Values are computed from the integer index to avoid drift.
pub fn grid_points(start: f64, end: f64, step: f64) -> Vec<f64> {
    if end + TOL < start {
        return Vec::new();
    }
    let n = ((end - start) / step + TOL).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocking_needs_shared_lane() {
        let a = Footprint::new(5.0, 5.0, 20.0, 20.0);
        let b = Footprint::new(5.0, 30.0, 20.0, 20.0);
        assert!(b.blocks(&a, 5.0));
        assert!(!a.blocks(&b, 5.0));
        let side = Footprint::new(30.0, 30.0, 20.0, 20.0);
        assert!(!side.blocks(&a, 5.0));
        // One meter short of the buffer still shares the lane.
        let near = Footprint::new(29.0, 30.0, 20.0, 20.0);
        assert!(near.blocks(&a, 5.0));
    }

    #[test]
    fn deficit_reports_smallest_axis_shift() {
        let a = Footprint::new(5.0, 5.0, 20.0, 20.0);
        let b = Footprint::new(29.999, 10.0, 20.0, 20.0);
        assert!((a.separation_deficit(&b, 5.0) - 0.001).abs() < 1e-9);
        assert!(!a.separated(&b, 5.0));
    }

    #[test]
    fn presence_is_open() {
        let o = Occupancy { rect: Footprint::new(0.0, 0.0, 1.0, 1.0), roll_in: 10.0, roll_out: 20.0, current: false };
        assert!(!o.present_at(10.0));
        assert!(o.present_at(10.1));
        assert!(!o.present_at(20.0));
        let c = Occupancy { roll_in: 0.0, current: true, ..o };
        assert!(c.present_at(0.0));
    }

    #[test]
    fn grid_includes_end_when_aligned() {
        assert_eq!(grid_points(5.0, 7.0, 1.0), vec![5.0, 6.0, 7.0]);
        assert_eq!(grid_points(5.0, 7.5, 1.0), vec![5.0, 6.0, 7.0]);
        assert!(grid_points(5.0, 4.0, 1.0).is_empty());
    }
}
