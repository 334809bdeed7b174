use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{MzvError, Result};

pub type Point = Complex64;

pub fn pt(re: f64, im: f64) -> Point {
    Complex64::new(re, im)
}

/// One piece of a piecewise path. Arcs carry both endpoints explicitly so
/// that closed loops return exactly to their start point.
#[derive(Clone, Debug, PartialEq)]
pub enum Piece {
    Segment { from: Point, to: Point },
    Arc { center: Point, start: Point, end: Point, sweep: f64 },
}

impl Piece {
    pub fn start(&self) -> Point {
        match self {
            Piece::Segment { from, .. } => *from,
            Piece::Arc { start, .. } => *start,
        }
    }

    pub fn end(&self) -> Point {
        match self {
            Piece::Segment { to, .. } => *to,
            Piece::Arc { end, .. } => *end,
        }
    }

    fn reversed(&self) -> Piece {
        match *self {
            Piece::Segment { from, to } => Piece::Segment { from: to, to: from },
            Piece::Arc { center, start, end, sweep } => Piece::Arc { center, start: end, end: start, sweep: -sweep },
        }
    }

    /// Chords per arc: each subtends at most π/8.
    fn chord_count(sweep: f64) -> usize {
        ((sweep.abs() / (PI / 8.0)).ceil() as usize).max(1)
    }

    /// Vertices after the start point (polygonal approximation of arcs;
    /// homotopic to the arc as long as no pole lies between arc and chords).
    fn push_vertices(&self, out: &mut Vec<Point>) {
        match *self {
            Piece::Segment { to, .. } => out.push(to),
            Piece::Arc { center, start, end, sweep } => {
                let r = (start - center).norm();
                let theta0 = (start - center).arg();
                let k = Self::chord_count(sweep);
                for j in 1..k {
                    let th = theta0 + sweep * j as f64 / k as f64;
                    out.push(center + Complex64::from_polar(r, th));
                }
                out.push(end);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pieces: Vec<Piece>,
}

impl Path {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(MzvError::InvalidPath("empty path".into()));
        }
        for w in pieces.windows(2) {
            if w[0].end() != w[1].start() {
                return Err(MzvError::InvalidPath(format!("gap between {} and {}", w[0].end(), w[1].start())));
            }
        }
        for p in &pieces {
            if let Piece::Arc { center, start, end, sweep } = p {
                let r = (start - center).norm();
                if r == 0.0 || !sweep.is_finite() || *sweep == 0.0 {
                    return Err(MzvError::InvalidPath("degenerate arc".into()));
                }
                let predicted = center + Complex64::from_polar(r, (start - center).arg() + sweep);
                if (predicted - end).norm() > 1e-12 * r.max(1.0) {
                    return Err(MzvError::InvalidPath(format!("arc end {end} inconsistent with sweep")));
                }
            }
        }
        Ok(Path { pieces })
    }

    pub fn segment(from: Point, to: Point) -> Self {
        Path { pieces: vec![Piece::Segment { from, to }] }
    }

    /// Polygon through the given points.
    pub fn polyline(points: &[Point]) -> Result<Self> {
        if points.len() < 2 {
            return Err(MzvError::InvalidPath("a polyline needs two points".into()));
        }
        Path::new(points.windows(2).map(|w| Piece::Segment { from: w[0], to: w[1] }).collect())
    }

    /// Arc around `center` from `start`, sweeping `sweep` radians
    /// (positive = counterclockwise). The end point is computed, with
    /// components below `1e-15·r` snapped to the center's.
    pub fn arc(center: Point, start: Point, sweep: f64) -> Result<Self> {
        let r = (start - center).norm();
        let full = (sweep / (2.0 * PI)).round();
        let end = if (sweep - full * 2.0 * PI).abs() < 1e-14 {
            start
        } else {
            let mut d = Complex64::from_polar(r, (start - center).arg() + sweep);
            if d.re.abs() < 1e-15 * r {
                d.re = 0.0;
            }
            if d.im.abs() < 1e-15 * r {
                d.im = 0.0;
            }
            center + d
        };
        Path::new(vec![Piece::Arc { center, start, end, sweep }])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn start(&self) -> Point {
        self.pieces[0].start()
    }

    pub fn end(&self) -> Point {
        self.pieces.last().unwrap().end()
    }

    /// Concatenation: `self` first, then `other`.
    pub fn then(&self, other: &Path) -> Result<Path> {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Path::new(pieces)
    }

    pub fn reverse(&self) -> Path {
        Path { pieces: self.pieces.iter().rev().map(Piece::reversed).collect() }
    }

    /// Vertices of the polygon traversed in place of the path.
    pub fn vertices(&self) -> Vec<Point> {
        let mut out = vec![self.start()];
        for p in &self.pieces {
            p.push_vertices(&mut out);
        }
        out
    }

    /// Rejects paths meeting a pole anywhere except possibly at the two
    /// endpoints (allowed only when `allow_endpoints`).
    pub fn check_avoids(&self, poles: &[Point], allow_endpoints: bool) -> Result<()> {
        let v = self.vertices();
        let last = v.len() - 2;
        for (i, w) in v.windows(2).enumerate() {
            for &p in poles {
                let d = segment_distance(w[0], w[1], p);
                if d > 0.0 {
                    continue;
                }
                let at_start = i == 0 && w[0] == p;
                let at_end = i == last && w[1] == p;
                if allow_endpoints && (at_start || at_end) && w[0] != w[1] {
                    continue;
                }
                return Err(MzvError::PathThroughSingularity(format!("{p}")));
            }
        }
        for piece in &self.pieces {
            if let Piece::Arc { center, start, .. } = piece {
                let r = (start - center).norm();
                let band = r * (1.0 - (PI / 8.0 / 2.0).cos()) + 1e-12;
                for &p in poles {
                    let d = (p - center).norm();
                    if d <= r + 1e-12 && d >= r - band {
                        return Err(MzvError::PathThroughSingularity(format!("{p} (too close to an arc)")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `[0, 1]`, regularized at both ends.
    pub fn unit_interval() -> Path {
        Path::segment(pt(0.0, 0.0), pt(1.0, 0.0))
    }

    /// `α = [1/2, 1]`.
    pub fn alpha() -> Path {
        Path::segment(pt(0.5, 0.0), pt(1.0, 0.0))
    }

    /// `β = [0, 1/2]`.
    pub fn beta() -> Path {
        Path::segment(pt(0.0, 0.0), pt(0.5, 0.0))
    }

    /// Counterclockwise loop around 0 based at 1/2: out to 1/4, once
    /// around `|x| = 1/4`, back.
    pub fn rho0() -> Path {
        let tail = Path::segment(pt(0.5, 0.0), pt(0.25, 0.0));
        let circle = Path::arc(pt(0.0, 0.0), pt(0.25, 0.0), 2.0 * PI).unwrap();
        tail.then(&circle).unwrap().then(&tail.reverse()).unwrap()
    }

    /// Counterclockwise loop around 1 based at 1/2.
    pub fn rho1() -> Path {
        let tail = Path::segment(pt(0.5, 0.0), pt(0.75, 0.0));
        let circle = Path::arc(pt(1.0, 0.0), pt(0.75, 0.0), 2.0 * PI).unwrap();
        tail.then(&circle).unwrap().then(&tail.reverse()).unwrap()
    }
}

/// Euclidean distance from `p` to the segment `[a, b]`.
pub fn segment_distance(a: Point, b: Point, p: Point) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * t - p).norm()
}
