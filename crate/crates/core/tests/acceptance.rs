//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line is printed even when all
//! criteria pass. Exits nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI, TAU};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tractdim::cli::commands::{box_dim_report, subsystem};
use tractdim::cli::{Context, RunConfig};
use tractdim::ifs::cylinder_eval;
use tractdim::numeric::compensated_sum;
use tractdim::oracle::{containment_recheck, fd_derivative_check, DifferenceOp, ExpCylinder, NewtonInverse};
use tractdim::pressure::{bowen_root, default_t_grid, level1_sum, pressure_report, TailTerm, WeightedSystem};
use tractdim::tractgeom::{
    analytic_diameter_bound, build_G, build_squares, cell_image, find_radius, measure_cell,
    radius_margins, trace_level_lines, BuildOptions, DistortionBound, GMode, GSet, GeometryBudget,
    LevelLineOptions, Letter, ScanSpec, SquareSpec, TailGeometry, TailSegment, Verdict,
};
use tractdim::{normalize_family, MapFamily, Result};

const CONJUGACY_TOL: f64 = 1e-9;
const CONJUGACY_BUDGET: Duration = Duration::from_secs(1);
const BRANCH_FD_TOL: f64 = 1e-6;
const CYLINDER_FD_TOL: f64 = 1e-5;
const GROWTH_SLACK: f64 = 1e-9;
const SMALL_RUN_BUDGET: Duration = Duration::from_secs(60);
const CROSS_MODE_TOL: f64 = 0.01;
const CERT_T_LO: f64 = 1.001;
const CERT_SUM_RATIO: f64 = 1.1;
const CERT_BUDGET: Duration = Duration::from_secs(60);
const BOWEN_TOL: f64 = 1e-3;
const RECHECK_DENSITY: usize = 10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn exp_family(lambda: f64) -> Result<MapFamily> {
    normalize_family(&MapFamily::exponential(Complex64::new(lambda, 0.0), E))
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn context(name: &str) -> Result<Context> {
    Context::resolve(&RunConfig::load(&configs().join(name))?)
}

struct Small {
    family: MapFamily,
    spec: SquareSpec,
    dist: DistortionBound,
    budget: GeometryBudget,
    g: GSet,
}

fn small_instance() -> Result<Small> {
    let ctx = context("dim_small.json")?;
    let g = build_G(&ctx.family, &ctx.spec, &ctx.dist, &ctx.budget, &BuildOptions::default())?;
    Ok(Small {
        family: ctx.family,
        spec: ctx.spec,
        dist: ctx.dist,
        budget: ctx.budget,
        g,
    })
}

fn conjugacy() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for lambda in [1.0, 2.5] {
        let family = exp_family(lambda)?;
        let ln_r0 = family.ln_r0();
        for s in -3..=3 {
            for _ in 0..1000 {
                let zeta = Complex64::new(ln_r0 + rng.random_range(0.0..30.0), rng.random_range(-30.0..30.0));
                let (w, _) = family.inv_branch(s, zeta)?;
                let (fw, _) = family.eval_lift(w)?;
                let rhs = fw.exp();
                let residual = (family.plane_map(w.exp()) - rhs).norm() / (1.0 + rhs.norm());
                worst = worst.max(residual);
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= CONJUGACY_TOL && elapsed < CONJUGACY_BUDGET,
        format!("{checked} points, worst relative residual {worst:.2e}, {} ms", elapsed.as_millis()),
    )
}

/// Newton-inverted values against the closed-form branch derivative.
struct BranchCheck<'a> {
    newton: NewtonInverse<'a>,
}

impl DifferenceOp for BranchCheck<'_> {
    fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (_, d) = self.newton.family.inv_branch(self.newton.s, z)?;
        Ok((self.newton.solve(z)?, d))
    }
}

/// Pipeline cylinder derivative against propagated oracle differences.
struct CylinderCheck<'a> {
    family: &'a MapFamily,
    spec: &'a SquareSpec,
    word: Vec<Letter>,
    oracle: ExpCylinder,
}

impl DifferenceOp for CylinderCheck<'_> {
    fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        cylinder_eval(self.family, self.spec, &self.word, z)
    }

    fn difference(&self, z: Complex64, h: Complex64) -> Result<Complex64> {
        self.oracle.difference(z, h)
    }
}

fn derivatives(small: &Small) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut branch = 0.0f64;
    for lambda in [1.0, 2.5] {
        let family = exp_family(lambda)?;
        let ln_r0 = family.ln_r0();
        for s in -3..=3 {
            let zs: Vec<Complex64> = (0..1000)
                .map(|_| Complex64::new(ln_r0 + rng.random_range(0.5..200.0), rng.random_range(-200.0..200.0)))
                .collect();
            let check = BranchCheck {
                newton: NewtonInverse { family: &family, s },
            };
            branch = branch.max(fd_derivative_check(&check, &zs, 1e-5)?);
        }
    }
    let letters = subsystem(&small.g, Some(64));
    let inner = small.spec.q.shrink(1.0);
    let mut cylinder = 0.0f64;
    for _ in 0..100 {
        let word: Vec<Letter> = (0..3).map(|_| letters[rng.random_range(0..letters.len())]).collect();
        let zs: Vec<Complex64> = (0..10)
            .map(|_| {
                Complex64::new(
                    rng.random_range(inner.x0..inner.x1),
                    rng.random_range(inner.y0..inner.y1),
                )
            })
            .collect();
        let check = CylinderCheck {
            family: &small.family,
            spec: &small.spec,
            oracle: ExpCylinder::new(&small.family, &word)?,
            word,
        };
        cylinder = cylinder.max(fd_derivative_check(&check, &zs, 1e-5)?);
    }
    outcome(
        branch <= BRANCH_FD_TOL && cylinder <= CYLINDER_FD_TOL,
        format!("branches {branch:.2e} (14000 samples), depth-3 cylinders {cylinder:.2e} (1000 samples)"),
    )
}

fn lemma_margins() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let family = exp_family(1.0)?;
    let ln_r0 = family.ln_r0();
    let mut expansion = f64::INFINITY;
    for _ in 0..10_000 {
        let zeta = Complex64::new(
            ln_r0 + 10f64.powf(rng.random_range(-6.0..6.0)),
            rng.random_range(-1e3..1e3),
        );
        let (w, _) = family.inv_branch(rng.random_range(-10..=10), zeta)?;
        expansion = expansion.min(family.lemma2_margin(w)?);
    }
    let c0 = family.inv_branch(0, Complex64::new(1.0 + ln_r0, 0.0))?.0.re;
    let mut growth = f64::INFINITY;
    for k in 0..=600 {
        let x = ln_r0 + 10f64.powf(6.0 * k as f64 / 600.0);
        for s in (-1000..=1000).step_by(40) {
            let re = family.inv_branch(s, Complex64::new(x, 0.0))?.0.re;
            growth = growth.min(4.0 * PI * (x - ln_r0).ln() + c0 + GROWTH_SLACK - re);
        }
    }
    let lemmas = context("lemmas.json")?;
    let selected = radius_margins(&lemmas.family, &lemmas.budget, lemmas.resolved.r)?;
    let cert = context("dim.json")?;
    let cert_margin = radius_margins(&cert.family, &cert.budget, cert.resolved.r)?;
    outcome(
        expansion > 0.0 && growth >= 0.0 && selected.derivative > 0.0 && cert_margin.derivative > 0.0,
        format!(
            "expansion margin {expansion:.3} (10^4 samples), growth margin {growth:.2e}, \
             derivative margin {:.4} at R = {} and {:.4} at R = {}",
            selected.derivative, selected.r, cert_margin.derivative, cert_margin.r
        ),
    )
}

/// Smallest gap between enclosing disks, by a sweep over left edges.
fn disks_disjoint(disks: &mut [(Complex64, f64)]) -> (bool, f64) {
    disks.sort_by(|a, b| (a.0.re - a.1).total_cmp(&(b.0.re - b.1)));
    let mut min_gap = f64::INFINITY;
    for i in 0..disks.len() {
        let (c, r) = disks[i];
        for &(d, q) in &disks[i + 1..] {
            // later disks are at least this far away horizontally
            if (d.re - q) - (c.re + r) >= min_gap {
                break;
            }
            min_gap = min_gap.min((c - d).norm() - r - q);
        }
    }
    (min_gap > 0.0, min_gap)
}

fn small_construction(small: &Small, build_time: Duration) -> Result<Outcome> {
    let start = Instant::now();
    let g = &small.g;
    let bound = analytic_diameter_bound(&small.spec, small.family.ln_r0(), small.dist.c);
    let mut flagged = 0;
    let mut worst_diameter = 0.0f64;
    let mut disks = Vec::with_capacity(g.pairs.len());
    for &l in &g.pairs {
        let recheck = containment_recheck(
            &small.family,
            &small.spec,
            &small.dist,
            l,
            small.budget.margin,
            small.budget.boundary_samples,
            RECHECK_DENSITY,
        )?;
        if recheck.verdict != Verdict::Inside {
            flagged += 1;
        }
        let cell = cell_image(&small.family, l, &small.spec, &small.dist)?;
        let m = measure_cell(&small.family, &cell, &small.spec, &small.dist, 128)?;
        worst_diameter = worst_diameter.max(m.diameter);
        disks.push((cell.center, m.enclosing_radius));
    }
    let (disjoint, gap) = disks_disjoint(&mut disks);
    let elapsed = build_time + start.elapsed();
    outcome(
        !g.is_empty() && flagged == 0 && worst_diameter <= bound && disjoint && elapsed < SMALL_RUN_BUDGET,
        format!(
            "{} cells, {flagged} flagged at {RECHECK_DENSITY}x, largest diameter {worst_diameter:.3e} <= {bound:.1}, \
             smallest gap {gap:.3e}, {} ms",
            g.pairs.len(),
            elapsed.as_millis()
        ),
    )
}

fn cross_mode(small: &Small) -> Result<Outcome> {
    let mut runs: BTreeMap<(i64, i8), Vec<i64>> = BTreeMap::new();
    for l in &small.g.pairs {
        runs.entry((l.u, l.s.signum() as i8)).or_default().push(l.s.abs());
    }
    let unit = DistortionBound {
        lower: 1.0,
        upper: 1.0,
        c: 1.0,
        ..small.dist
    };
    let geometry = TailGeometry::new(&small.family, small.spec.r)?;
    let mut worst = 0.0f64;
    let mut inside = true;
    for ((u, sign), ns) in runs.iter_mut() {
        ns.sort_unstable();
        let (a, b) = (ns[0], ns[ns.len() - 1]);
        if b - a + 1 != ns.len() as i64 {
            return outcome(false, format!("branch ({u}, {sign}) is not a contiguous run"));
        }
        let explicit = compensated_sum(
            ns.iter()
                .map(|&n| cell_image(&small.family, Letter::new(*u, *sign as i64 * n), &small.spec, &small.dist))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .map(|c| c.ln_derivative.exp()),
        );
        let segment = TailSegment {
            u: *u,
            sign: *sign,
            sigma_lo: (TAU * (a as f64 - 0.5)).ln(),
            sigma_hi: (TAU * (b as f64 + 0.5)).ln(),
        };
        let system = WeightedSystem {
            letters: Vec::new(),
            tails: vec![TailTerm::new(&geometry, &unit, &segment)],
            c: 1.0,
        };
        let sandwich = level1_sum(&system, 1.0)?;
        inside &= sandwich.lo() <= explicit && explicit <= sandwich.hi();
        worst = worst
            .max((explicit - sandwich.lo()) / explicit)
            .max((sandwich.hi() - explicit) / explicit);
    }
    outcome(
        inside && worst <= CROSS_MODE_TOL,
        format!("{} branches, explicit sums inside the sandwich, widest side {:.3}%", runs.len(), 100.0 * worst),
    )
}

fn run_cli(args: &[&str]) -> std::io::Result<(i32, Vec<u8>)> {
    let out = Command::new(env!("CARGO_BIN_EXE_tractdim")).args(args).output()?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn certificate() -> Result<Outcome> {
    let config = configs().join("dim.json");
    let start = Instant::now();
    let (code, stdout) = run_cli(&["--config", config.to_str().unwrap(), "--timing", "dim"])?;
    let elapsed = start.elapsed();
    let cert: serde_json::Value = serde_json::from_slice(&stdout)?;
    let num = |k: &str| cert[k].as_f64().unwrap_or(f64::NAN);
    let ratio = num("sigma_sum_t1_lo") / num("C");
    outcome(
        code == 0
            && num("P1_lo") > 0.0
            && num("t_lo") >= CERT_T_LO
            && ratio >= CERT_SUM_RATIO
            && elapsed < CERT_BUDGET,
        format!(
            "exit {code}, R = {}, P_lo(1) = {:.4}, t in [{:.6}, {:.6}], sum_lo/C = {ratio:.3}, {} ms",
            num("R"),
            num("P1_lo"),
            num("t_lo"),
            num("t_hi"),
            elapsed.as_millis()
        ),
    )
}

fn bowen_oracles() -> Result<Outcome> {
    let single = bowen_root(&WeightedSystem::similarities(&[0.4]), 1e-3)?;
    let quarters = bowen_root(&WeightedSystem::similarities(&[0.25, 0.25]), 1e-3)?;
    let thirds = bowen_root(&WeightedSystem::similarities(&[1.0 / 3.0, 1.0 / 3.0]), 1e-3)?;
    let near = |b: tractdim::pressure::BowenInterval, x: f64| (b.t_lo - x).abs() <= BOWEN_TOL && (b.t_hi - x).abs() <= BOWEN_TOL;
    outcome(
        single.t_lo == 0.0 && single.t_hi == 0.0 && near(quarters, 0.5) && near(thirds, 0.630930),
        format!(
            "single [{}, {}], quarters [{:.5}, {:.5}], thirds [{:.5}, {:.5}]",
            single.t_lo, single.t_hi, quarters.t_lo, quarters.t_hi, thirds.t_lo, thirds.t_hi
        ),
    )
}

fn dimension_cross_check() -> Result<Outcome> {
    let report = box_dim_report(&context("oracle_subsystem.json")?)?;
    let b = report.bowen.expect("subsystem source records its Bowen interval");
    outcome(
        report.pass,
        format!(
            "box-counting slope {:.4}, Bowen interval [{:.4}, {:.4}], accepted [{:.4}, {:.4}]",
            report.estimate.slope,
            b.t_lo,
            b.t_hi,
            b.t_lo - 0.07,
            b.t_hi + 0.07
        ),
    )
}

fn monotonicity(small: &Small) -> Result<Outcome> {
    let grid = default_t_grid();
    let mut systems = vec![
        ("similarities", WeightedSystem::similarities(&[0.25, 0.25, 1.0 / 3.0])),
        (
            "G enumerate R=12",
            WeightedSystem::from_gset(&small.family, &small.spec, &small.dist, &small.g)?,
        ),
        (
            "8-letter subsystem",
            WeightedSystem::from_letters(&small.family, &small.spec, &small.dist, &subsystem(&small.g, Some(8)))?,
        ),
    ];
    let tail_small = build_G(
        &small.family,
        &small.spec,
        &small.dist,
        &small.budget,
        &BuildOptions {
            mode: GMode::Tail,
            ..BuildOptions::default()
        },
    )?;
    systems.push((
        "G tail R=12",
        WeightedSystem::from_gset(&small.family, &small.spec, &small.dist, &tail_small)?,
    ));
    let cert = context("dim.json")?;
    let g = build_G(&cert.family, &cert.spec, &cert.dist, &cert.budget, &cert.resolved.build)?;
    systems.push(("G tail R=4000", WeightedSystem::from_gset(&cert.family, &cert.spec, &cert.dist, &g)?));
    let mut failing = Vec::new();
    for (name, system) in &systems {
        if !pressure_report(system, &grid)?.strictly_decreasing {
            failing.push(*name);
        }
    }
    outcome(
        failing.is_empty(),
        format!("{} systems on {} grid points, failing: {failing:?}", systems.len(), grid.len()),
    )
}

fn determinism() -> Result<Outcome> {
    let dir = configs();
    let runs: [(&str, &[&str]); 6] = [
        ("lemmas.json", &["lemmas"]),
        ("dim.json", &["dim"]),
        ("dim_small.json", &["dim"]),
        ("sample.json", &["sample"]),
        ("oracle_subsystem.json", &["oracle", "box-dim"]),
        ("oracle_subsystem.json", &["oracle", "brute-pressure"]),
    ];
    let mut differing = Vec::new();
    for (config, command) in runs {
        let path = dir.join(config);
        let mut outputs = Vec::new();
        for workers in ["1", "4", "8", "4"] {
            let mut args = vec!["--config", path.to_str().unwrap(), "--workers", workers];
            args.extend_from_slice(command);
            outputs.push(run_cli(&args)?);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) || outputs[0].1.is_empty() {
            differing.push(format!("{config} {}", command.join(" ")));
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} commands x workers 1, 4, 8 and a repeat; differing: {differing:?}", runs.len()),
    )
}

fn level_lines() -> Result<Outcome> {
    let family = exp_family(1.0)?;
    let budget = GeometryBudget::new(0.1, 1.0, 0.0, 256)?;
    let selected = find_radius(&family, &budget, &ScanSpec { lo: 40.0, hi: 400.0, step: 1.0 })?.r;
    let mut details = Vec::new();
    let mut pass = true;
    for r in [selected, 60.0, 100.0] {
        let report = trace_level_lines(&family, &build_squares(r, 1.0)?, &LevelLineOptions::default())?;
        pass &= report.lengths_hold() && report.count_holds() && report.aborted.is_empty();
        details.push(format!(
            "R = {r}: {} curves >= {}, shortest {:.2} >= {:.2}",
            report.curve_count, report.count_floor, report.min_arclength, report.length_floor
        ));
    }
    outcome(pass, details.join("; "))
}

type Criterion<'a> = Box<dyn Fn() -> Result<Outcome> + 'a>;

fn main() {
    let build_start = Instant::now();
    let small = small_instance();
    let build_time = build_start.elapsed();
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("conjugacy suite", Box::new(conjugacy)),
        (
            "derivative suite",
            Box::new(|| derivatives(small.as_ref().map_err(|e| tractdim::Error::Construction(e.to_string()))?)),
        ),
        ("lemma margins", Box::new(lemma_margins)),
        (
            "small-instance construction",
            Box::new(|| {
                small_construction(
                    small.as_ref().map_err(|e| tractdim::Error::Construction(e.to_string()))?,
                    build_time,
                )
            }),
        ),
        (
            "cross-mode sum agreement",
            Box::new(|| cross_mode(small.as_ref().map_err(|e| tractdim::Error::Construction(e.to_string()))?)),
        ),
        ("certificate run", Box::new(certificate)),
        ("Bowen-solver oracles", Box::new(bowen_oracles)),
        ("dimension cross-check", Box::new(dimension_cross_check)),
        (
            "pressure monotonicity",
            Box::new(|| monotonicity(small.as_ref().map_err(|e| tractdim::Error::Construction(e.to_string()))?)),
        ),
        ("determinism", Box::new(determinism)),
        ("level-line suite", Box::new(level_lines)),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!("{:>2}. {} {name}: {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
