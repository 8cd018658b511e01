use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{Context, PointSource};
use super::report::{write_json, Report};
use crate::error::{Error, Result};
use crate::ifs::{project_to_plane, sample_limit_set};
use crate::loglift::check_growth;
use crate::oracle::{
    box_counting_dim, brute_force_pressure, cloud_diameter, containment_recheck, decade_scales, middle_thirds,
    read_points_csv, BoxCountEstimate, BrutePressure, Recheck,
};
use crate::pressure::{bowen_root, certify_dim_gt_one, pressure_bounds, BowenInterval, CertifyConfig, Verdict, WeightedSystem};
use crate::tractgeom::{
    build_G, radius_margins, trace_level_lines, GSet, Letter, LevelLineOptions, RadiusMargins, Verdict as Cell,
};

/// Flags that affect outputs but not the configuration.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub timing: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub margin: f64,
    pub samples: usize,
}

impl Check {
    fn positive(name: &'static str, margin: f64, samples: usize) -> Self {
        Self {
            name,
            pass: margin > 0.0,
            margin,
            samples,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelLineSummary {
    pub curve_count: usize,
    pub count_floor: u64,
    pub min_arclength: f64,
    pub length_floor: f64,
    pub length_ratio: f64,
    pub periodicity_defect: f64,
    pub aborted: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub radius: RadiusMargins,
    pub checks: Vec<Check>,
    pub level_lines: LevelLineSummary,
    pub all_pass: bool,
}

/// `n` points from `a` to `b`, log-spaced in `x - origin`.
fn log_grid(origin: f64, a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = ((a - origin).ln(), (b - origin).ln());
    (0..n)
        .map(|k| origin + (la + (lb - la) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn lemma_report(ctx: &Context) -> Result<LemmaReport> {
    let family = &ctx.family;
    let ln_r0 = family.ln_r0();
    let radius = radius_margins(family, &ctx.budget, ctx.resolved.r)?;

    // points F⁻¹_s(ζ) for ζ on a 100 × 100 grid of H
    let xs = log_grid(ln_r0 - 1e-3, ln_r0 + 1e-6, 1e6, 100);
    let lemma2 = xs
        .par_iter()
        .map(|&x| {
            let mut worst = f64::INFINITY;
            for j in 0..100 {
                let zeta = Complex64::new(x, -1e3 + 20.0 * j as f64);
                let (w, _) = family.inv_branch(j as i64 % 7 - 3, zeta)?;
                worst = worst.min(family.lemma2_margin(w)?);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    let c0 = family.inv_branch(0, Complex64::new(1.0 + ln_r0, 0.0))?.0.re;
    let growth_grid = log_grid(ln_r0, 1.0 + ln_r0, 1e6, 1000);
    let mut corollary = f64::INFINITY;
    for &x in &growth_grid {
        for s in [-1000, -1, 0, 1, 1000] {
            let re = family.inv_branch(s, Complex64::new(x, 0.0))?.0.re;
            corollary = corollary.min(4.0 * PI * (x - ln_r0).ln() + c0 + 1e-9 - re);
        }
    }
    let growth = check_growth(family, &growth_grid, &[ln_r0 + 2.0 * ctx.budget.d])?;
    let growth_margin = if growth.crossings.iter().all(|c| c.first_index.is_some()) {
        growth
            .real_parts
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    } else {
        -1.0
    };

    let lines = trace_level_lines(family, &ctx.spec, &LevelLineOptions::default())?;
    let checks = vec![
        Check::positive("derivative_condition", radius.derivative, 1),
        Check::positive("depth_condition", radius.depth, 1),
        Check {
            name: "square_geometry",
            pass: radius.geometry >= 0.0,
            margin: radius.geometry,
            samples: 1,
        },
        Check::positive("expansion", lemma2, 10_000),
        Check::positive("real_part_growth_bound", corollary, 5 * growth_grid.len()),
        Check::positive("growth", growth_margin, growth_grid.len()),
        Check {
            name: "level_line_lengths",
            pass: lines.lengths_hold() && lines.aborted.is_empty(),
            margin: lines.min_arclength - lines.length_floor,
            samples: lines.traces.len(),
        },
        Check {
            name: "level_line_count",
            pass: lines.count_holds(),
            margin: lines.curve_count as f64 - lines.count_floor as f64,
            samples: lines.curve_count,
        },
    ];
    Ok(LemmaReport {
        radius,
        all_pass: checks.iter().all(|c| c.pass),
        checks,
        level_lines: LevelLineSummary {
            curve_count: lines.curve_count,
            count_floor: lines.count_floor,
            min_arclength: lines.min_arclength,
            length_floor: lines.length_floor,
            length_ratio: lines.length_ratio,
            periodicity_defect: lines.periodicity_defect,
            aborted: lines.aborted,
        },
    })
}

pub fn lemmas(ctx: &Context, opts: &RunOptions) -> Result<i32> {
    let report = lemma_report(ctx)?;
    let code = if report.all_pass { 0 } else { 2 };
    write_json(opts.out.as_deref(), &Report::new("lemmas", &ctx.resolved, report))?;
    Ok(code)
}

pub fn dim(ctx: &Context, opts: &RunOptions) -> Result<i32> {
    let r = &ctx.resolved;
    let config = CertifyConfig {
        r: r.r,
        epsilon: r.epsilon,
        d: r.d,
        margin: r.margin,
        boundary_samples: r.boundary_samples,
        distortion: r.distortion,
        subdivisions: r.subdivisions,
        build: r.build,
        bisection_tol: r.bisection_tol,
    };
    let start = Instant::now();
    let mut cert = certify_dim_gt_one(&ctx.family, &config)?;
    if opts.timing {
        cert.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    let code = match cert.verdict {
        Verdict::Certified => 0,
        Verdict::NotCertified => 2,
    };
    write_json(opts.out.as_deref(), &Report::new("dim", r, cert))?;
    Ok(code)
}

fn build(ctx: &Context) -> Result<GSet> {
    build_G(&ctx.family, &ctx.spec, &ctx.dist, &ctx.budget, &ctx.resolved.build)
}

/// The `k` explicit letters with the smallest `|s|`, then `|u|`.
pub fn subsystem(g: &GSet, k: Option<usize>) -> Vec<Letter> {
    let mut letters = g.pairs.clone();
    letters.sort_by_key(|l| (l.s.abs(), l.u.abs(), l.u, l.s));
    if let Some(k) = k {
        letters.truncate(k);
    }
    letters
}

fn explicit_letters(ctx: &Context, k: Option<usize>) -> Result<Vec<Letter>> {
    let letters = subsystem(&build(ctx)?, k);
    if letters.is_empty() {
        return Err(Error::Construction("G has no explicit letters at this configuration".into()));
    }
    Ok(letters)
}

fn sampling(ctx: &Context) -> Result<&super::config::SamplingBlock> {
    ctx.resolved
        .sampling
        .as_ref()
        .ok_or_else(|| Error::Config("this command needs a sampling block".into()))
}

pub fn sample(ctx: &Context, opts: &RunOptions) -> Result<i32> {
    let s = sampling(ctx)?;
    let letters = explicit_letters(ctx, s.letters)?;
    let points = sample_limit_set(&ctx.family, &ctx.spec, &letters, s.depth, s.count, s.seed)?;
    let points = project_to_plane(&ctx.family, points)?;
    match &opts.out {
        Some(path) => points.write_csv(BufWriter::new(File::create(path)?))?,
        None => points.write_csv(io::stdout().lock())?,
    }
    Ok(0)
}

fn oracle_block(ctx: &Context) -> Result<&super::config::OracleBlock> {
    ctx.resolved
        .oracle
        .as_ref()
        .ok_or_else(|| Error::Config("oracle commands need an oracle block".into()))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoxDimReport {
    pub source: &'static str,
    pub points: usize,
    pub diameter: f64,
    pub estimate: BoxCountEstimate,
    pub bowen: Option<BowenInterval>,
    pub expected: Option<[f64; 2]>,
    pub pass: bool,
}

pub fn box_dim_report(ctx: &Context) -> Result<BoxDimReport> {
    let o = oracle_block(ctx)?;
    let (count, seed) = ctx.resolved.sampling.as_ref().map_or((100_000, 0), |s| (s.count, s.seed));
    let mut bowen = None;
    let (source, points, default_expected) = match &o.source {
        PointSource::MiddleThirds { depth } => {
            let d = 2f64.ln() / 3f64.ln();
            (
                "middle-thirds",
                middle_thirds(*depth, count, seed),
                Some([d - o.tolerance, d + o.tolerance]),
            )
        }
        PointSource::Subsystem => {
            let s = sampling(ctx)?;
            let letters = explicit_letters(ctx, s.letters)?;
            let system = WeightedSystem::from_letters(&ctx.family, &ctx.spec, &ctx.dist, &letters)?;
            let b = bowen_root(&system, ctx.resolved.bisection_tol)?;
            bowen = Some(b);
            let sample = sample_limit_set(&ctx.family, &ctx.spec, &letters, s.depth, s.count, s.seed)?;
            ("subsystem", sample.points, Some([b.t_lo - o.tolerance, b.t_hi + o.tolerance]))
        }
        PointSource::Csv { path } => ("csv", read_points_csv(File::open(path)?, "lifted")?, None),
    };
    let diameter = cloud_diameter(&points);
    let scales = decade_scales(o.scales.hi * diameter, o.scales.lo * diameter, o.scales.per_decade);
    let estimate = box_counting_dim(&points, &scales)?;
    let expected = o.expected.or(default_expected);
    let pass = expected.is_none_or(|[a, b]| a <= estimate.slope && estimate.slope <= b);
    Ok(BoxDimReport {
        source,
        points: points.len(),
        diameter,
        estimate,
        bowen,
        expected,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BrutePressureReport {
    pub letters: Vec<Letter>,
    pub t: f64,
    pub p_lo: f64,
    pub p_hi: f64,
    pub levels: Vec<BrutePressure>,
    pub pass: bool,
}

pub fn brute_pressure_report(ctx: &Context) -> Result<BrutePressureReport> {
    let o = oracle_block(ctx)?;
    let letters = explicit_letters(ctx, Some(o.brute_letters))?;
    let system = WeightedSystem::from_letters(&ctx.family, &ctx.spec, &ctx.dist, &letters)?;
    let (p_lo, p_hi) = pressure_bounds(&system, o.t)?;
    let levels = o
        .levels
        .iter()
        .map(|&n| brute_force_pressure(&ctx.family, &ctx.spec, &ctx.dist, &letters, n, o.t))
        .collect::<Result<Vec<_>>>()?;
    let pass = levels
        .iter()
        .all(|b| p_lo - b.slack <= b.value && b.value <= p_hi + b.slack);
    Ok(BrutePressureReport {
        letters,
        t: o.t,
        p_lo,
        p_hi,
        levels,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RecheckReport {
    pub cells: usize,
    pub density: usize,
    pub flagged: Vec<Recheck>,
    pub pass: bool,
}

pub fn recheck_report(ctx: &Context) -> Result<RecheckReport> {
    let o = oracle_block(ctx)?;
    let g = build(ctx)?;
    let checks = g
        .pairs
        .par_iter()
        .map(|&l| {
            containment_recheck(
                &ctx.family,
                &ctx.spec,
                &ctx.dist,
                l,
                ctx.budget.margin,
                ctx.budget.boundary_samples,
                o.density,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let flagged: Vec<Recheck> = checks.into_iter().filter(|c| c.verdict != Cell::Inside).collect();
    Ok(RecheckReport {
        cells: g.pairs.len(),
        density: o.density,
        pass: flagged.is_empty(),
        flagged,
    })
}

fn finish<T: Serialize>(ctx: &Context, opts: &RunOptions, command: &str, pass: bool, body: T) -> Result<i32> {
    write_json(opts.out.as_deref(), &Report::new(command, &ctx.resolved, body))?;
    if pass {
        Ok(0)
    } else {
        let err = Error::Oracle(format!("{command} disagrees with the pipeline"));
        let _ = writeln!(io::stderr(), "error: {err}");
        Ok(err.exit_code())
    }
}

pub fn oracle_box_dim(ctx: &Context, opts: &RunOptions) -> Result<i32> {
    let report = box_dim_report(ctx)?;
    finish(ctx, opts, "oracle box-dim", report.pass, report)
}

pub fn oracle_brute_pressure(ctx: &Context, opts: &RunOptions) -> Result<i32> {
    let report = brute_pressure_report(ctx)?;
    finish(ctx, opts, "oracle brute-pressure", report.pass, report)
}

pub fn oracle_recheck(ctx: &Context, opts: &RunOptions) -> Result<i32> {
    let report = recheck_report(ctx)?;
    finish(ctx, opts, "oracle recheck", report.pass, report)
}
