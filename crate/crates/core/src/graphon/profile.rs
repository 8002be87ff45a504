//! Non-decreasing piecewise-linear endowment profiles on a block interval.
//!
//! A profile is a list of contiguous segments, each linear on `[x0, x1)`.
//! Adjacent segments may jump upward (an infusion plateau starts with one),
//! and the profile is right-continuous at every knot.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Segment {
    fn eval(&self, x: f64) -> f64 {
        if self.x1 == self.x0 {
            return self.y0;
        }
        self.y0 + (self.y1 - self.y0) * (x - self.x0) / (self.x1 - self.x0)
    }

    fn slope(&self) -> f64 {
        (self.y1 - self.y0) / (self.x1 - self.x0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndowmentProfile {
    segments: Vec<Segment>,
}

impl EndowmentProfile {
    pub fn linear(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self {
            segments: vec![Segment { x0, x1, y0, y1 }],
        }
    }

    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Parameter("profile needs a segment".into()));
        }
        for s in &segments {
            if !(s.x1 > s.x0) || s.y1 < s.y0 {
                return Err(Error::Parameter(format!(
                    "segment {s:?} is empty or decreasing"
                )));
            }
        }
        for w in segments.windows(2) {
            if w[0].x1 != w[1].x0 || w[1].y0 < w[0].y1 {
                return Err(Error::Parameter(format!(
                    "segments {:?} and {:?} are not contiguous and non-decreasing",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn lo(&self) -> f64 {
        self.segments[0].x0
    }

    pub fn hi(&self) -> f64 {
        self.segments[self.segments.len() - 1].x1
    }

    fn segment_at(&self, x: f64) -> &Segment {
        self.segments
            .iter()
            .find(|s| x < s.x1)
            .unwrap_or(&self.segments[self.segments.len() - 1])
    }

    /// Value at `x`, clamped to the profile's domain.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(self.lo(), self.hi());
        self.segment_at(x).eval(x)
    }

    /// Right derivative at `x`.
    pub fn slope_at(&self, x: f64) -> f64 {
        self.segment_at(x.clamp(self.lo(), self.hi())).slope()
    }

    pub fn integral(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| 0.5 * (s.y0 + s.y1) * (s.x1 - s.x0))
            .sum()
    }

    /// `inf { x ∈ [lo, hi] : e(x) ≥ level }`, or `hi` when no point reaches
    /// the level.
    pub fn lower_inverse(&self, level: f64) -> f64 {
        self.lower_inverse_tol(level, 0.0)
    }

    /// As [`Self::lower_inverse`], but a segment start (e.g. the top of a
    /// jump) within `tol` below `level` already counts as reaching it.
    pub fn lower_inverse_tol(&self, level: f64, tol: f64) -> f64 {
        for s in &self.segments {
            if s.y0 >= level - tol {
                return s.x0;
            }
            if s.y1 >= level {
                let x = s.x0 + (level - s.y0) / (s.y1 - s.y0) * (s.x1 - s.x0);
                return x.clamp(s.x0, s.x1);
            }
        }
        self.hi()
    }

    /// Segment endpoints, including jump locations.
    pub fn knots(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.segments.iter().map(|s| s.x0).collect();
        out.push(self.hi());
        out
    }

    /// Replace the profile on `[lo, hi)` by the constant `level` (which must
    /// be at least the profile's value there), keeping it elsewhere.
    pub fn with_plateau(&self, lo: f64, hi: f64, level: f64) -> Result<Self> {
        if !(lo < hi) {
            return Ok(self.clone());
        }
        if lo < self.lo() || hi > self.hi() {
            return Err(Error::Parameter(format!(
                "plateau [{lo}, {hi}) leaves [{}, {}]",
                self.lo(),
                self.hi()
            )));
        }
        let mut out = Vec::new();
        for s in &self.segments {
            // left part
            if s.x0 < lo {
                let x1 = s.x1.min(lo);
                out.push(Segment {
                    x0: s.x0,
                    x1,
                    y0: s.y0,
                    y1: s.eval(x1),
                });
            }
            // right part
            if s.x1 > hi {
                let x0 = s.x0.max(hi);
                out.push(Segment {
                    x0,
                    x1: s.x1,
                    y0: s.eval(x0),
                    y1: s.y1,
                });
            }
        }
        out.push(Segment {
            x0: lo,
            x1: hi,
            y0: level,
            y1: level,
        });
        out.sort_by(|a, b| a.x0.total_cmp(&b.x0));
        Self::from_segments(out)
    }
}
