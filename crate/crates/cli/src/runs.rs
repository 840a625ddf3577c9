//! Drivers for the `density-table`, `simulate` and `chords` subcommands.
use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use segangle_core::densities::{f_d, f_d_alt, f_l, h_gamma, theta_grid, uniform_grid, AngleDensity, DensityTable};
use segangle_core::quadrature::QuadratureConfig;
use segangle_core::sampling::{
    estimate_intersection_probability, histogram, sample_conditional_angles, RandomSource, ANGLE_RANGE, CHUNK_SIZE,
};
use segangle_core::validation::{tv_distance, ComparisonReport};
use serde::Serialize;

use crate::report::{HistogramComparison, RunReport};
use crate::{CliError, Parallel};

/// Reference value of the normalization constant `c`, also claimed as the crossing probability.
pub const REFERENCE_C: f64 = 0.9393598;

/// Stream labels, so that each estimator of a run draws from its own generator.
pub mod streams {
    pub const INTERSECTION: u64 = 1;
    pub const CONDITIONAL: u64 = 2;
    pub const UNCONDITIONED: u64 = 3;
    pub const MARGINALS: u64 = 4;
    pub const PREDICATES: u64 = 5;
    pub const JACOBIAN: u64 = 6;
    pub const ROUND_TRIP: u64 = 7;
}

/// `g` at every node of a uniform grid of `[0, pi]`, nodes evaluated in parallel.
pub fn tabulate(dens: &AngleDensity, grid_n: usize, exec: &Parallel) -> Result<DensityTable, CliError> {
    let thetas = theta_grid(grid_n)?;
    let values = exec.install(|| thetas.par_iter().map(|&t| dens.g(t)).collect::<Result<Vec<_>, _>>())?;
    Ok(DensityTable::new(thetas, values, dens.c())?)
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityTableRun {
    pub report: RunReport,
    #[serde(flatten)]
    pub table: DensityTable,
}

pub fn density_table(grid_n: usize, cfg: QuadratureConfig, exec: &Parallel) -> Result<DensityTableRun, CliError> {
    if grid_n < 2 {
        return Err(CliError::Usage(format!("--grid must be at least 2, got {grid_n}")));
    }
    let start = Instant::now();
    let dens = AngleDensity::new(cfg)?;
    let table = tabulate(&dens, grid_n, exec)?;
    let mut report = RunReport::new("density-table", None);
    report
        .param("grid", grid_n)
        .param("abs_tol", cfg.abs_tol)
        .param("rel_tol", cfg.rel_tol)
        .param("max_subdivisions", cfg.max_subdivisions)
        .estimate("normalization_c", dens.c(), None)
        .estimate("normalization_c_quadrature_error", dens.c_error(), None)
        .estimate("trapezoid_integral", table.trapezoid_integral(), None);
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(DensityTableRun { report, table })
}

/// Bin masses of `g` for every bin of a histogram on `[0, pi]`.
pub fn angle_bin_masses(dens: &AngleDensity, bins: usize, exec: &Parallel) -> Result<Vec<f64>, CliError> {
    let edges: Vec<(f64, f64)> = {
        let h = segangle_core::sampling::Histogram::empty(ANGLE_RANGE.0, ANGLE_RANGE.1, bins)?;
        (0..bins).map(|b| h.edges(b)).collect()
    };
    Ok(exec.install(|| edges.par_iter().map(|&(lo, hi)| dens.mass(lo, hi)).collect::<Result<Vec<_>, _>>())?)
}

pub fn simulate(seed: u64, samples: u64, bins: usize, exec: &Parallel) -> Result<RunReport, CliError> {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    if bins == 0 {
        return Err(CliError::Usage("--bins must be at least 1".into()));
    }
    let start = Instant::now();
    let src = RandomSource::new(seed);
    let p = estimate_intersection_probability(&src.fork(streams::INTERSECTION), samples, exec)?;
    let cond = sample_conditional_angles(&src.fork(streams::CONDITIONAL), samples, exec)?;
    let acceptance = cond.acceptance()?;
    let dens = AngleDensity::new(QuadratureConfig::default())?;

    let hist = histogram(&cond.angles, ANGLE_RANGE.0, ANGLE_RANGE.1, bins)?;
    let analytic = angle_bin_masses(&dens, bins, exec)?;
    let mut reference = analytic.iter();
    let tv = tv_distance(&hist, |_, _| Ok(*reference.next().expect("one mass per bin")), 0.01)?;

    let mut report = RunReport::new("simulate", Some(seed));
    report
        .param("samples", samples)
        .param("bins", bins)
        .param("chunk_size", CHUNK_SIZE)
        .estimate("p_intersect", p.value, Some(p.std_error))
        .estimate("conditional_acceptance_rate", acceptance.value, Some(acceptance.std_error))
        .estimate("normalization_c", dens.c(), None);
    report.comparisons.push(ComparisonReport { statistic_name: "total-variation/conditional-angle-vs-g".into(), ..tv });
    report.informational.push(ComparisonReport::new(
        "sigmas/p_intersect-vs-c-over-4",
        (p.value - dens.c() / 4.0).abs() / p.std_error,
        3.0,
        p.n,
    ));
    report.informational.push(ComparisonReport::new(
        "sigmas/p_intersect-vs-0.9393598",
        (p.value - REFERENCE_C).abs() / p.std_error,
        3.0,
        p.n,
    ));
    report.conditional_angles = Some(HistogramComparison {
        heights: hist.heights(),
        empirical_bin_masses: hist.masses(),
        analytic_bin_masses: analytic,
        histogram: hist,
    });
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChordDensity {
    /// Distance from the center to the chord line.
    FL,
    /// Distance between the two endpoints, arccos form.
    FD,
    /// Distance between the two endpoints, arccot form.
    FDAlt,
    /// Difference of two uniform angles.
    H,
}

impl ChordDensity {
    pub fn name(self) -> &'static str {
        match self {
            ChordDensity::FL => "fL",
            ChordDensity::FD => "fD",
            ChordDensity::FDAlt => "fDalt",
            ChordDensity::H => "h",
        }
    }

    pub fn support(self) -> (f64, f64) {
        match self {
            ChordDensity::FL => (0.0, 1.0),
            ChordDensity::FD | ChordDensity::FDAlt => (0.0, 2.0),
            ChordDensity::H => (-2.0 * PI, 2.0 * PI),
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            ChordDensity::FL => f_l(x),
            ChordDensity::FD => f_d(x),
            ChordDensity::FDAlt => f_d_alt(x),
            ChordDensity::H => h_gamma(x),
        }
    }
}

pub struct ChordsRun {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub report: RunReport,
}

pub fn chords(which: ChordDensity, grid_n: usize) -> Result<ChordsRun, CliError> {
    if grid_n < 2 {
        return Err(CliError::Usage(format!("--grid must be at least 2, got {grid_n}")));
    }
    let start = Instant::now();
    let (lo, hi) = which.support();
    let xs = uniform_grid(lo, hi, grid_n)?;
    let values: Vec<f64> = xs.iter().map(|&x| which.eval(x)).collect();
    let mut report = RunReport::new("chords", None);
    report.param("which", which.name()).param("grid", grid_n);
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(ChordsRun { xs, values, report })
}
