//! Exact geometric primitives of the chord-frame parametrization.
//!
//! A segment `AB` of the unit disk is described either by its endpoints or by its
//! chord frame: `rho` is the distance from the origin to the line through `A` and `B`,
//! `gamma` is the angle of the foot of the perpendicular `F = rho (cos gamma, sin gamma)`,
//! and `t_a`, `t_b` are the signed offsets of the endpoints from `F` along the chord
//! direction `(-sin gamma, cos gamma)`:
//!
//! ```text
//! A = rho (cos gamma, sin gamma) + t_a (-sin gamma, cos gamma)
//! ```
use core::f64::consts::{PI, TAU};

use crate::{Error, Result};

/// Slack allowed on the disk and chord-support bounds at construction.
pub const CONSTRUCTION_EPS: f64 = 1e-12;

/// `|sin(gamma1 - gamma2)|` at or below this value is treated as parallel.
pub const PARALLEL_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { x, y })
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of `self x other`.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn sub(self, other: Point2) -> Point2 {
        Point2 { x: self.x - other.x, y: self.y - other.y }
    }

    /// `(1 - alpha) self + alpha other`.
    pub fn lerp(self, other: Point2, alpha: f64) -> Point2 {
        Point2 { x: (1.0 - alpha) * self.x + alpha * other.x, y: (1.0 - alpha) * self.y + alpha * other.y }
    }
}

/// A non-degenerate segment with both endpoints in the closed unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SegmentEndpoints {
    a: Point2,
    b: Point2,
}

impl SegmentEndpoints {
    pub fn new(a: Point2, b: Point2) -> Result<Self> {
        for p in [a, b] {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(Error::NonFinite);
            }
            if p.norm_sq() > 1.0 + CONSTRUCTION_EPS {
                return Err(Error::OutsideDisk { x: p.x, y: p.y });
            }
        }
        if a == b {
            return Err(Error::DegenerateSegment);
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> Point2 {
        self.a
    }

    pub fn b(&self) -> Point2 {
        self.b
    }

    pub fn point_at(&self, alpha: f64) -> Point2 {
        self.a.lerp(self.b, alpha)
    }
}

/// The `(rho, gamma, t_a, t_b)` description of a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChordFrame {
    rho: f64,
    gamma: f64,
    t_a: f64,
    t_b: f64,
}

impl ChordFrame {
    /// Builds a frame, reducing `gamma` to `[0, 2pi)`.
    pub fn new(rho: f64, gamma: f64, t_a: f64, t_b: f64) -> Result<Self> {
        if !(rho.is_finite() && gamma.is_finite() && t_a.is_finite() && t_b.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidFrame("rho outside [0, 1]"));
        }
        let half_chord = libm::sqrt(1.0 - rho * rho);
        if t_a.abs() > half_chord + CONSTRUCTION_EPS || t_b.abs() > half_chord + CONSTRUCTION_EPS {
            return Err(Error::InvalidFrame("endpoint offset outside the chord"));
        }
        if t_a == t_b {
            return Err(Error::InvalidFrame("t_a equals t_b"));
        }
        Ok(Self { rho, gamma: normalize_angle(gamma), t_a, t_b })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn t_a(&self) -> f64 {
        self.t_a
    }

    pub fn t_b(&self) -> f64 {
        self.t_b
    }

    /// Half length of the full chord, `sqrt(1 - rho^2)`.
    pub fn half_chord(&self) -> f64 {
        libm::sqrt(1.0 - self.rho * self.rho)
    }

    /// Foot of the perpendicular from the origin.
    pub fn foot(&self) -> Point2 {
        Point2 { x: self.rho * libm::cos(self.gamma), y: self.rho * libm::sin(self.gamma) }
    }

    /// Unit vector along the chord, `(-sin gamma, cos gamma)`.
    pub fn direction(&self) -> Point2 {
        Point2 { x: -libm::sin(self.gamma), y: libm::cos(self.gamma) }
    }

    /// Point of the line at signed offset `t` from the foot.
    pub fn point_at_offset(&self, t: f64) -> Point2 {
        let (s, c) = (libm::sin(self.gamma), libm::cos(self.gamma));
        Point2 { x: self.rho * c - t * s, y: self.rho * s + t * c }
    }

    /// Signed offset of the orthogonal projection of `p` onto the line.
    pub fn offset_of(&self, p: Point2) -> f64 {
        p.dot(self.direction())
    }
}

/// Reduces an angle to `[0, 2pi)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let mut r = angle % TAU;
    if r < 0.0 {
        r += TAU;
    }
    // -tiny + 2pi rounds to 2pi
    if r >= TAU {
        r = 0.0;
    }
    r
}

/// The two line parameters at which `(1 - alpha) A + alpha B` has a prescribed squared norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRoots {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl AlphaRoots {
    pub fn any_in_unit_interval(&self) -> bool {
        (0.0..=1.0).contains(&self.alpha1) || (0.0..=1.0).contains(&self.alpha2)
    }
}

pub fn chord_frame_from_endpoints(s: &SegmentEndpoints) -> ChordFrame {
    let (a, b) = (s.a(), s.b());
    let d = b.sub(a);
    let len = d.norm();
    let u = Point2 { x: d.x / len, y: d.y / len };
    // Candidate normal: direction of b - a rotated by +pi/2. At rho = 0 this is the
    // normal that the convention gamma = arg(b - a) + pi/2 selects.
    let n0 = Point2 { x: -u.y, y: u.x };
    let signed = 0.5 * (a.dot(n0) + b.dot(n0));
    let n = if signed < 0.0 { Point2 { x: -n0.x, y: -n0.y } } else { n0 };
    let rho = (a.cross(b).abs() / len).min(1.0);
    let gamma = normalize_angle(libm::atan2(n.y, n.x));
    let dir = Point2 { x: -libm::sin(gamma), y: libm::cos(gamma) };
    ChordFrame { rho, gamma, t_a: a.dot(dir), t_b: b.dot(dir) }
}

pub fn endpoints_from_chord_frame(cf: &ChordFrame) -> Result<SegmentEndpoints> {
    SegmentEndpoints::new(cf.point_at_offset(cf.t_a), cf.point_at_offset(cf.t_b))
}

/// `|det J| = 4 |t_a - t_b|` of the map `(t_a, t_b, rho, gamma) -> (R_A, Gamma_A, R_B, Gamma_B)`
/// where `R_j = |endpoint_j|^2`.
pub fn jacobian_abs(cf: &ChordFrame) -> f64 {
    4.0 * (cf.t_a - cf.t_b).abs()
}

/// Crossing point of the two infinite chord lines.
pub fn intersection_point(cf1: &ChordFrame, cf2: &ChordFrame) -> Result<Point2> {
    let (s1, c1) = (libm::sin(cf1.gamma), libm::cos(cf1.gamma));
    let (s2, c2) = (libm::sin(cf2.gamma), libm::cos(cf2.gamma));
    let den = s1 * c2 - c1 * s2;
    if den.abs() <= PARALLEL_EPS {
        return Err(Error::Parallel { sin_diff: den });
    }
    Point2::new((cf2.rho * s1 - cf1.rho * s2) / den, (cf1.rho * c2 - cf2.rho * c1) / den)
}

/// Squared norm of the crossing point of the lines `(rho1, gamma1)` and `(rho2, gamma2)`.
pub fn z_norm_sq(rho1: f64, rho2: f64, gamma1: f64, gamma2: f64) -> Result<f64> {
    let diff = gamma1 - gamma2;
    let sin_diff = libm::sin(diff);
    if sin_diff.abs() <= PARALLEL_EPS {
        return Err(Error::Parallel { sin_diff });
    }
    let num = rho1 * rho1 + rho2 * rho2 - 2.0 * rho1 * rho2 * libm::cos(diff);
    Ok(num / (sin_diff * sin_diff))
}

/// Negative radicands `z_sq - rho^2` down to this value are float noise and clamp to 0.
const RADICAND_EPS: f64 = 1e-12;

pub fn alpha_roots(cf: &ChordFrame, z_sq: f64) -> Result<AlphaRoots> {
    let radicand = z_sq - cf.rho * cf.rho;
    if radicand < -RADICAND_EPS {
        return Err(Error::Domain(alloc::format!("squared norm {z_sq} is below rho^2 = {}", cf.rho * cf.rho)));
    }
    let root = libm::sqrt(radicand.max(0.0));
    let delta = cf.t_a - cf.t_b;
    let den = delta * delta;
    Ok(AlphaRoots {
        alpha1: (cf.t_a * delta - delta.abs() * root) / den,
        alpha2: (cf.t_a * delta + delta.abs() * root) / den,
    })
}

/// Picks the root whose point on the line is `z` itself rather than its mirror image
/// through the foot of the perpendicular.
pub fn alpha_locating(cf: &ChordFrame, roots: &AlphaRoots, z: Point2) -> f64 {
    let tau = |alpha: f64| (1.0 - alpha) * cf.t_a + alpha * cf.t_b;
    let target = cf.offset_of(z);
    if (tau(roots.alpha1) - target).abs() <= (tau(roots.alpha2) - target).abs() {
        roots.alpha1
    } else {
        roots.alpha2
    }
}

/// Twice the signed area of `(p, q, r)`; positive for a counterclockwise turn.
pub fn orient2d(p: Point2, q: Point2, r: Point2) -> f64 {
    (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
}

fn on_segment(p: Point2, q: Point2, r: Point2) -> bool {
    // r is collinear with p, q
    r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
}

/// Closed-segment intersection test from orientation predicates on the endpoints.
pub fn segments_intersect(s1: &SegmentEndpoints, s2: &SegmentEndpoints) -> bool {
    let (a, b, c, d) = (s1.a(), s1.b(), s2.a(), s2.b());
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);

    let straddles = |u: f64, v: f64| (u > 0.0 && v < 0.0) || (u < 0.0 && v > 0.0);
    if straddles(o1, o2) && straddles(o3, o4) {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// `| |gamma1 - gamma2| - pi |`, in `[0, pi]`.
pub fn angle_between(cf1: &ChordFrame, cf2: &ChordFrame) -> f64 {
    ((cf1.gamma - cf2.gamma).abs() - PI).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y).unwrap()
    }

    fn seg(a: (f64, f64), b: (f64, f64)) -> SegmentEndpoints {
        SegmentEndpoints::new(p(a.0, a.1), p(b.0, b.1)).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn vertical_chord_frame() {
        let cf = chord_frame_from_endpoints(&seg((0.3, 0.5), (0.3, -0.2)));
        assert!(close(cf.rho(), 0.3, 1e-15));
        assert_eq!(cf.gamma(), 0.0);
        assert!(close(cf.t_a(), 0.5, 1e-15));
        assert!(close(cf.t_b(), -0.2, 1e-15));
    }

    #[test]
    fn diameter_uses_rho_zero_convention() {
        let cf = chord_frame_from_endpoints(&seg((-1.0, 0.0), (1.0, 0.0)));
        assert_eq!(cf.rho(), 0.0);
        assert!(close(cf.gamma(), FRAC_PI_2, 1e-15));
        assert!(close(cf.t_a(), 1.0, 1e-15));
        assert!(close(cf.t_b(), -1.0, 1e-15));
    }

    #[test]
    fn endpoints_from_examples() {
        let s = endpoints_from_chord_frame(&ChordFrame::new(0.3, 0.0, 0.5, -0.2).unwrap()).unwrap();
        assert!(close(s.a().x, 0.3, 1e-15) && close(s.a().y, 0.5, 1e-15));
        assert!(close(s.b().x, 0.3, 1e-15) && close(s.b().y, -0.2, 1e-15));

        let s = endpoints_from_chord_frame(&ChordFrame::new(0.0, FRAC_PI_2, 1.0, -1.0).unwrap()).unwrap();
        assert!(close(s.a().x, -1.0, 1e-15) && close(s.a().y, 0.0, 1e-15));
        assert!(close(s.b().x, 1.0, 1e-15) && close(s.b().y, 0.0, 1e-15));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(SegmentEndpoints::new(p(0.1, 0.1), p(0.1, 0.1)), Err(Error::DegenerateSegment));
        assert!(matches!(SegmentEndpoints::new(p(0.9, 0.9), p(0.0, 0.0)), Err(Error::OutsideDisk { .. })));
        assert_eq!(Point2::new(f64::NAN, 0.0), Err(Error::NonFinite));
        assert!(ChordFrame::new(1.2, 0.0, 0.0, 0.1).is_err());
        assert!(ChordFrame::new(0.8, 0.0, 0.7, 0.1).is_err());
        assert!(ChordFrame::new(0.5, 0.0, 0.1, 0.1).is_err());
        assert!(ChordFrame::new(1.0, 0.0, 0.0, 1e-13).is_ok());
    }

    #[test]
    fn gamma_is_reduced() {
        let cf = ChordFrame::new(0.2, -FRAC_PI_2, 0.1, 0.2).unwrap();
        assert!(close(cf.gamma(), 3.0 * FRAC_PI_2, 1e-15));
        assert_eq!(normalize_angle(-1e-300), 0.0);
        assert!(normalize_angle(7.0) < TAU);
    }

    #[test]
    fn jacobian_example() {
        let cf = ChordFrame::new(0.5, 1.0, 0.3, -0.2).unwrap();
        assert!(close(jacobian_abs(&cf), 2.0, 1e-15));
    }

    #[test]
    fn intersection_examples() {
        let cf1 = ChordFrame::new(0.3, 0.0, 0.1, -0.4).unwrap();
        let cf2 = ChordFrame::new(0.4, FRAC_PI_2, 0.2, 0.5).unwrap();
        let z = intersection_point(&cf1, &cf2).unwrap();
        assert!(close(z.x, 0.3, 1e-15) && close(z.y, 0.4, 1e-15));
        assert!(close(z_norm_sq(0.3, 0.4, 0.0, FRAC_PI_2).unwrap(), 0.25, 1e-15));

        let d1 = ChordFrame::new(0.0, 0.0, 0.5, -0.5).unwrap();
        let d2 = ChordFrame::new(0.0, FRAC_PI_2, 0.5, -0.5).unwrap();
        let z = intersection_point(&d1, &d2).unwrap();
        assert_eq!((z.x, z.y), (0.0, 0.0));
        assert_eq!(z_norm_sq(0.0, 0.0, 0.4, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn parallel_lines_are_rejected() {
        let cf1 = ChordFrame::new(0.3, 0.5, 0.1, -0.4).unwrap();
        let cf2 = ChordFrame::new(0.6, 0.5, 0.1, -0.4).unwrap();
        assert!(matches!(intersection_point(&cf1, &cf2), Err(Error::Parallel { .. })));
        assert!(matches!(z_norm_sq(0.3, 0.6, 0.5, 0.5), Err(Error::Parallel { .. })));
    }

    #[test]
    fn alpha_root_examples() {
        let cf = ChordFrame::new(0.0, FRAC_PI_2, 1.0, -1.0).unwrap();
        let r = alpha_roots(&cf, 0.0).unwrap();
        assert_eq!((r.alpha1, r.alpha2), (0.5, 0.5));
        let r = alpha_roots(&cf, 1.0).unwrap();
        assert_eq!((r.alpha1, r.alpha2), (0.0, 1.0));
    }

    #[test]
    fn alpha_radicand_clamp_and_domain_error() {
        let cf = ChordFrame::new(0.5, 0.0, 0.3, -0.2).unwrap();
        let r = alpha_roots(&cf, 0.25 - 5e-13).unwrap();
        assert_eq!(r.alpha1, r.alpha2);
        assert!(matches!(alpha_roots(&cf, 0.2), Err(Error::Domain(_))));
    }

    #[test]
    fn intersect_examples() {
        assert!(segments_intersect(&seg((-1.0, 0.0), (1.0, 0.0)), &seg((0.0, -1.0), (0.0, 1.0))));
        assert!(!segments_intersect(&seg((0.5, 0.1), (0.9, 0.1)), &seg((0.5, 0.2), (0.9, 0.2))));
    }

    #[test]
    fn intersect_touching_and_collinear() {
        // T-junction
        assert!(segments_intersect(&seg((0.0, 0.0), (0.5, 0.0)), &seg((0.5, -0.5), (0.5, 0.5))));
        // collinear overlap
        assert!(segments_intersect(&seg((0.0, 0.0), (0.5, 0.0)), &seg((0.25, 0.0), (0.75, 0.0))));
        // collinear disjoint
        assert!(!segments_intersect(&seg((0.0, 0.0), (0.2, 0.0)), &seg((0.25, 0.0), (0.75, 0.0))));
    }

    #[test]
    fn angle_examples() {
        let f = |g: f64| ChordFrame::new(0.1, g, 0.1, 0.2).unwrap();
        assert!(close(angle_between(&f(0.0), &f(FRAC_PI_2)), FRAC_PI_2, 1e-15));
        assert_eq!(angle_between(&f(1.0), &f(1.0)), PI);
        assert!(close(angle_between(&f(0.0), &f(PI)), 0.0, 1e-15));
    }
}
