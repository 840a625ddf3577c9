//! Independent oracles and statistical comparators.
//!
//! Each check here reaches its answer by a route that does not share code with the
//! formula it arbitrates: central differences for the Jacobian, a midpoint lattice
//! for `g*`, orientation predicates against the chord-frame crossing test, and
//! histograms against bin-integrated densities.
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::densities::G1_PREFACTOR;
use crate::geometry::{
    alpha_locating, alpha_roots, chord_frame_from_endpoints, intersection_point, segments_intersect, z_norm_sq,
    ChordFrame, SegmentEndpoints,
};
use crate::quadrature::{adaptive_quadrature, QuadratureConfig};
use crate::sampling::{sample_segment, ChunkExecutor, Histogram, RandomSource, CHUNK_SIZE};
use crate::{Error, Result};

/// Outcome of one comparison; `pass` holds iff `value <= threshold`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonReport {
    pub statistic_name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    pub n: u64,
}

impl ComparisonReport {
    pub fn new(statistic_name: impl Into<String>, value: f64, threshold: f64, n: u64) -> Self {
        Self { statistic_name: statistic_name.into(), value, threshold, pass: value <= threshold, n }
    }
}

/// The forward map `(t_a, t_b, rho, gamma) -> (R_A, Gamma_A, R_B, Gamma_B)` with
/// `R_j = rho^2 + t_j^2` and `Gamma_j` the polar angle of endpoint `j`.
fn forward_map(x: [f64; 4]) -> [f64; 4] {
    let [t_a, t_b, rho, gamma] = x;
    let (s, c) = (libm::sin(gamma), libm::cos(gamma));
    let polar = |t: f64| libm::atan2(rho * s + t * c, rho * c - t * s);
    [rho * rho + t_a * t_a, polar(t_a), rho * rho + t_b * t_b, polar(t_b)]
}

fn wrap_angle(d: f64) -> f64 {
    let r = libm::remainder(d, 2.0 * PI);
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

fn det4(mut m: [[f64; 4]; 4]) -> f64 {
    let mut det = 1.0;
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).expect("non-empty range");
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..4 {
            let factor = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    det
}

/// `|det|` of the central-difference Jacobian of the endpoint polar map.
pub fn finite_difference_jacobian(cf: &ChordFrame, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let margin = 2.0 * step;
    let rho = cf.rho();
    let outer = rho + margin;
    let inside = rho >= margin
        && outer <= 1.0
        && [cf.t_a(), cf.t_b()]
            .iter()
            .all(|t| t.abs() + margin <= libm::sqrt(1.0 - outer * outer) && rho * rho + t * t > margin * margin);
    if !inside {
        return Err(Error::FrameNearBoundary { step });
    }

    let x = [cf.t_a(), cf.t_b(), rho, cf.gamma()];
    let mut jac = [[0.0; 4]; 4];
    for j in 0..4 {
        let (mut plus, mut minus) = (x, x);
        plus[j] += step;
        minus[j] -= step;
        let (fp, fm) = (forward_map(plus), forward_map(minus));
        for i in 0..4 {
            let mut d = fp[i] - fm[i];
            if i % 2 == 1 {
                d = wrap_angle(d);
            }
            jac[i][j] = d / (2.0 * step);
        }
    }
    Ok(det4(jac).abs())
}

/// Midpoint rule for `g*(theta)` on a `grid_n x grid_n` lattice of `[0, 1]^2`, with the
/// integrand written through `|z|^2` of two lines whose foot angles differ by `pi - theta`.
pub fn grid_integral_g_star(theta: f64, grid_n: usize) -> Result<f64> {
    if grid_n < 10 {
        return Err(Error::InvalidArgument(alloc::format!("grid_n must be >= 10, got {grid_n}")));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(alloc::format!("theta = {theta} is outside [0, pi]")));
    }
    let gamma_diff = PI - theta;
    if libm::sin(gamma_diff).abs() <= crate::geometry::PARALLEL_EPS {
        return Ok(0.0);
    }
    let h = 1.0 / grid_n as f64;
    let roots: Vec<f64> = (0..grid_n)
        .map(|i| {
            let r = (i as f64 + 0.5) * h;
            libm::sqrt(1.0 - r * r)
        })
        .collect();
    let mut total = 0.0;
    for i in 0..grid_n {
        let a = (i as f64 + 0.5) * h;
        let mut row = 0.0;
        for j in 0..grid_n {
            let b = (j as f64 + 0.5) * h;
            let z2 = z_norm_sq(a, b, gamma_diff, 0.0)?;
            if z2 <= 1.0 {
                let w = 1.0 - z2;
                row += roots[j] * w * w;
            }
        }
        total += roots[i] * row;
    }
    Ok(G1_PREFACTOR / PI * total * h * h)
}

/// Total variation between a histogram and reference bin masses:
/// `1/2 sum |empirical mass - reference mass|`.
pub fn tv_distance<F>(hist: &Histogram, mut bin_mass: F, threshold: f64) -> Result<ComparisonReport>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let masses = hist.masses();
    let mut tv = 0.0;
    for (bin, m) in masses.iter().enumerate() {
        let (lo, hi) = hist.edges(bin);
        tv += (m - bin_mass(lo, hi)?).abs();
    }
    Ok(ComparisonReport::new("total-variation", 0.5 * tv, threshold, hist.total))
}

/// [`tv_distance`] with bin masses from adaptive quadrature of `density`.
pub fn tv_distance_density<F>(
    hist: &Histogram,
    density: F,
    cfg: &QuadratureConfig,
    threshold: f64,
) -> Result<ComparisonReport>
where
    F: Fn(f64) -> f64,
{
    tv_distance(hist, |lo, hi| Ok(adaptive_quadrature(&density, lo, hi, cfg)?.value), threshold)
}

/// Pearson chi-square of the histogram counts against reference bin masses. Bins with
/// zero expected mass are skipped.
pub fn chi_square<F>(hist: &Histogram, mut bin_mass: F, threshold: f64) -> Result<ComparisonReport>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let n = hist.total as f64;
    let mut stat = 0.0;
    for (bin, &count) in hist.counts.iter().enumerate() {
        let (lo, hi) = hist.edges(bin);
        let expected = n * bin_mass(lo, hi)?;
        if expected > 0.0 {
            let d = count as f64 - expected;
            stat += d * d / expected;
        }
    }
    Ok(ComparisonReport::new("chi-square", stat, threshold, hist.total))
}

/// Ties closer than this to a decision boundary are not counted as evidence.
pub const DEGENERACY_BAND: f64 = 1e-12;

/// How the chord-frame route decides whether `z` lies on a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Characterization {
    /// `|z|^2 <= 1` and some root `alpha^(i)` of each segment lies in `[0, 1]`.
    /// Each root pair also locates the mirror image of `z` through the foot of the
    /// perpendicular, so this accepts pairs that do not cross.
    UnionOfBranches,
    /// `|z|^2 <= 1` and, for each segment, the root whose point is `z` lies in `[0, 1]`.
    BranchMatched,
}

impl Characterization {
    pub fn name(&self) -> &'static str {
        match self {
            Characterization::UnionOfBranches => "union-of-branches",
            Characterization::BranchMatched => "branch-matched",
        }
    }
}

/// Chord-frame verdict on a pair of segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameVerdict {
    pub crosses: bool,
    /// The verdict sits within [`DEGENERACY_BAND`] of a boundary.
    pub degenerate: bool,
}

fn near_unit_boundary(alpha: f64) -> bool {
    alpha.abs() < DEGENERACY_BAND || (alpha - 1.0).abs() < DEGENERACY_BAND
}

/// Decides crossing through `|z|^2` and the alpha roots, never through orientations.
pub fn crossing_by_chord_frames(s1: &SegmentEndpoints, s2: &SegmentEndpoints, mode: Characterization) -> FrameVerdict {
    let cf1 = chord_frame_from_endpoints(s1);
    let cf2 = chord_frame_from_endpoints(s2);
    let degenerate = FrameVerdict { crosses: false, degenerate: true };
    let Ok(z_sq) = z_norm_sq(cf1.rho(), cf2.rho(), cf1.gamma(), cf2.gamma()) else {
        return degenerate;
    };
    let (Ok(r1), Ok(r2)) = (alpha_roots(&cf1, z_sq), alpha_roots(&cf2, z_sq)) else {
        return degenerate;
    };
    let mut near = (z_sq - 1.0).abs() < DEGENERACY_BAND;
    let inside = z_sq <= 1.0;
    let crosses = match mode {
        Characterization::UnionOfBranches => {
            near |= [r1.alpha1, r1.alpha2, r2.alpha1, r2.alpha2].into_iter().any(near_unit_boundary);
            inside && r1.any_in_unit_interval() && r2.any_in_unit_interval()
        }
        Characterization::BranchMatched => {
            let Ok(z) = intersection_point(&cf1, &cf2) else {
                return degenerate;
            };
            let a1 = alpha_locating(&cf1, &r1, z);
            let a2 = alpha_locating(&cf2, &r2, z);
            near |=
                near_unit_boundary(a1) || near_unit_boundary(a2) || r1.alpha1 == r1.alpha2 || r2.alpha1 == r2.alpha2;
            inside && (0.0..=1.0).contains(&a1) && (0.0..=1.0).contains(&a2)
        }
    };
    FrameVerdict { crosses, degenerate: near }
}

/// Tallies of a predicate cross-validation run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PredicateCrossValidation {
    pub characterization: Characterization,
    pub pairs: u64,
    pub disagreements: u64,
    pub degenerate: u64,
    pub orientation_true: u64,
    pub frames_true: u64,
    pub report: ComparisonReport,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    disagreements: u64,
    degenerate: u64,
    orientation_true: u64,
    frames_true: u64,
}

/// Draws `n` segment pairs and counts where the orientation predicate and the
/// chord-frame characterization disagree outside the degeneracy band.
pub fn predicate_cross_validation<E: ChunkExecutor>(
    src: &RandomSource,
    n: u64,
    mode: Characterization,
    exec: &E,
) -> Result<PredicateCrossValidation> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    let chunks = n.div_ceil(CHUNK_SIZE);
    let tallies = exec.map_chunks(0..chunks, |k| {
        let mut rng = src.substream(k);
        let mut t = Tally::default();
        for _ in 0..CHUNK_SIZE.min(n - k * CHUNK_SIZE) {
            let s1 = sample_segment(&mut rng);
            let s2 = sample_segment(&mut rng);
            let by_orientation = segments_intersect(&s1, &s2);
            let by_frames = crossing_by_chord_frames(&s1, &s2, mode);
            t.orientation_true += by_orientation as u64;
            t.frames_true += by_frames.crosses as u64;
            if by_frames.degenerate {
                t.degenerate += 1;
            } else if by_frames.crosses != by_orientation {
                t.disagreements += 1;
            }
        }
        t
    });
    let total = tallies.into_iter().fold(Tally::default(), |acc, t| Tally {
        disagreements: acc.disagreements + t.disagreements,
        degenerate: acc.degenerate + t.degenerate,
        orientation_true: acc.orientation_true + t.orientation_true,
        frames_true: acc.frames_true + t.frames_true,
    });
    let mut name = String::from("predicate-disagreements/");
    name.push_str(mode.name());
    Ok(PredicateCrossValidation {
        characterization: mode,
        pairs: n,
        disagreements: total.disagreements,
        degenerate: total.degenerate,
        orientation_true: total.orientation_true,
        frames_true: total.frames_true,
        report: ComparisonReport::new(name, total.disagreements as f64, 0.0, n),
    })
}

/// Draws a random frame whose finite-difference stencil of width `step` stays inside
/// the domain.
pub fn sample_interior_frame(rng: &mut RandomSource, step: f64) -> ChordFrame {
    loop {
        let cf = chord_frame_from_endpoints(&sample_segment(rng));
        if finite_difference_jacobian(&cf, step).is_ok() {
            return cf;
        }
    }
}

/// Worst relative gap between `4 |t_a - t_b|` and the finite-difference determinant.
pub fn jacobian_check(rng: &mut RandomSource, frames: u64, step: f64, threshold: f64) -> Result<ComparisonReport> {
    let mut worst: f64 = 0.0;
    for _ in 0..frames {
        let cf = sample_interior_frame(rng, step);
        let fd = finite_difference_jacobian(&cf, step)?;
        let exact = crate::geometry::jacobian_abs(&cf);
        worst = worst.max((fd - exact).abs() / exact);
    }
    Ok(ComparisonReport::new("jacobian-max-relative-error", worst, threshold, frames))
}

/// Worst componentwise gap of the endpoints -> frame -> endpoints round trip, and of
/// `|endpoint|^2 = rho^2 + t^2`.
pub fn round_trip_check(rng: &mut RandomSource, n: u64, threshold: f64) -> Result<[ComparisonReport; 2]> {
    let mut worst_trip: f64 = 0.0;
    let mut worst_radius: f64 = 0.0;
    for _ in 0..n {
        let s = sample_segment(rng);
        let cf = chord_frame_from_endpoints(&s);
        let back = crate::geometry::endpoints_from_chord_frame(&cf)?;
        for (p, q) in [(s.a(), back.a()), (s.b(), back.b())] {
            worst_trip = worst_trip.max((p.x - q.x).abs()).max((p.y - q.y).abs());
        }
        for (p, t) in [(s.a(), cf.t_a()), (s.b(), cf.t_b())] {
            worst_radius = worst_radius.max((p.norm_sq() - (cf.rho() * cf.rho() + t * t)).abs());
        }
    }
    Ok([
        ComparisonReport::new("round-trip-max-abs-error", worst_trip, threshold, n),
        ComparisonReport::new("radius-relation-max-abs-error", worst_radius, threshold, n),
    ])
}

/// Pretty one-line rendering for logs.
pub fn describe(report: &ComparisonReport) -> String {
    let verdict = if report.pass { "PASS" } else { "FAIL" };
    let mut s = verdict.to_string();
    s.push_str(&alloc::format!(
        " {} = {:.6e} (threshold {:.3e}, n = {})",
        report.statistic_name,
        report.value,
        report.threshold,
        report.n
    ));
    s
}
