use std::f64::consts::E;

use num_complex::Complex64;
use tractdim::cli::commands::{brute_pressure_report, recheck_report, subsystem};
use tractdim::cli::{Context, RunConfig};
use tractdim::ifs::{check_invariance, sample_limit_set};
use tractdim::oracle::brute_force_pressure;
use tractdim::pressure::{certify_dim_gt_one, pressure_bounds, CertifyConfig, Verdict, WeightedSystem};
use tractdim::tractgeom::{
    build_G, build_squares, distortion_constant, BuildOptions, DistortionMode, GMode, GeometryBudget,
};
use tractdim::{normalize_family, MapFamily, TailAsymptotics};

fn context(name: &str) -> Context {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    Context::resolve(&RunConfig::load(&path).unwrap()).unwrap()
}

#[test]
fn tail_collars_agree_with_enumeration() {
    let ctx = context("dim_small.json");
    let g = build_G(&ctx.family, &ctx.spec, &ctx.dist, &ctx.budget, &BuildOptions::default()).unwrap();
    let tail = BuildOptions {
        mode: GMode::Tail,
        ..BuildOptions::default()
    };
    let t = build_G(&ctx.family, &ctx.spec, &ctx.dist, &ctx.budget, &tail).unwrap();
    assert!(!t.pairs.is_empty() && !t.segments.is_empty());
    // the low end of every branch is enumerated in both modes
    let low: Vec<_> = t.pairs.iter().filter(|l| l.s.abs() < 1000).collect();
    assert!(!low.is_empty());
    for l in low {
        assert!(g.pairs.binary_search(l).is_ok(), "{l:?} missing from the enumeration");
    }
    for seg in &t.segments {
        let n_lo = (seg.sigma_lo.exp() / std::f64::consts::TAU).ceil() as i64;
        assert!(g.pairs.binary_search(&tractdim::tractgeom::Letter::new(seg.u, seg.sign as i64 * n_lo)).is_ok());
    }
}

#[test]
fn sampled_points_are_invariant() {
    let ctx = context("oracle_subsystem.json");
    let g = build_G(&ctx.family, &ctx.spec, &ctx.dist, &ctx.budget, &BuildOptions::default()).unwrap();
    let letters = subsystem(&g, Some(8));
    let sample = sample_limit_set(&ctx.family, &ctx.spec, &letters, 10, 2000, 5).unwrap();
    let report = check_invariance(&ctx.family, &ctx.spec, &sample).unwrap();
    assert_eq!(report.checked, 2000);
    assert!(report.worst_ratio <= 1.0);
}

#[test]
fn brute_force_levels_stay_in_the_slack_band() {
    let ctx = context("oracle_subsystem.json");
    let g = build_G(&ctx.family, &ctx.spec, &ctx.dist, &ctx.budget, &BuildOptions::default()).unwrap();
    let letters = subsystem(&g, Some(6));
    let system = WeightedSystem::from_letters(&ctx.family, &ctx.spec, &ctx.dist, &letters).unwrap();
    for t in [0.5, 1.0, 1.5] {
        let (lo, hi) = pressure_bounds(&system, t).unwrap();
        let values: Vec<_> = (1..=3)
            .map(|n| brute_force_pressure(&ctx.family, &ctx.spec, &ctx.dist, &letters, n, t).unwrap())
            .collect();
        for v in &values {
            assert!(lo - v.slack <= v.value && v.value <= hi + v.slack);
            assert!((v.value - values[0].value).abs() <= v.slack);
        }
    }
    assert!(brute_pressure_report(&ctx).unwrap().pass);
}

#[test]
fn recheck_flags_nothing_in_g() {
    let report = recheck_report(&context("oracle_subsystem.json")).unwrap();
    assert_eq!(report.cells, 16384);
    assert!(report.pass && report.flagged.is_empty());
}

#[test]
fn user_callbacks_reproduce_the_builtin_certificate() {
    let ln2 = 2f64.ln();
    let user = MapFamily::user()
        .label("two-exp")
        .r0(E)
        .plane_map(|z| 2.0 * z.exp())
        .lift(move |w| (w.exp() + ln2, w.exp()))
        .inverse0(move |zeta| {
            let shifted = zeta - ln2;
            (shifted.ln(), shifted.inv())
        })
        .tail(TailAsymptotics {
            log_shift: Complex64::new(ln2, 0.0),
            value_error: 0.0,
            derivative_error: 0.0,
            validity_sigma: 1.0,
        })
        .univalence_abscissa(E + ln2)
        .build()
        .unwrap();
    let user = normalize_family(&user).unwrap();
    let builtin = normalize_family(&MapFamily::exponential(Complex64::new(2.0, 0.0), E)).unwrap();
    assert!((user.univalence_abscissa() - builtin.univalence_abscissa()).abs() < 1e-12);

    let config = CertifyConfig {
        r: 4000.0,
        epsilon: 0.1,
        d: 306.0,
        margin: 1e-9,
        boundary_samples: 256,
        distortion: DistortionMode::Chained,
        subdivisions: 64,
        build: BuildOptions {
            mode: GMode::Tail,
            ..BuildOptions::default()
        },
        bisection_tol: 1e-5,
    };
    let a = certify_dim_gt_one(&user, &config).unwrap();
    let b = certify_dim_gt_one(&builtin, &config).unwrap();
    assert_eq!(a.verdict, Verdict::Certified);
    assert_eq!(a.verdict, b.verdict);
    assert_eq!(a.tail_segments, b.tail_segments);
    assert!((a.t_lo - b.t_lo).abs() <= 1e-5);
}

#[test]
fn certificate_json_has_every_key() {
    let family = normalize_family(&MapFamily::exponential(Complex64::new(1.0, 0.0), E)).unwrap();
    let dist = distortion_constant(12.0, family.univalence_abscissa(), DistortionMode::Chained, 64).unwrap();
    assert!(dist.c > 1.0);
    let spec = build_squares(12.0, 1.0).unwrap();
    let budget = GeometryBudget::new(0.1, 1.0, 0.0, 64).unwrap();
    assert!(spec.q.x0 > budget.d);
    let cert = certify_dim_gt_one(
        &family,
        &CertifyConfig {
            r: 12.0,
            epsilon: 0.1,
            d: 1.0,
            margin: 1e-9,
            boundary_samples: 256,
            distortion: DistortionMode::Chained,
            subdivisions: 64,
            build: BuildOptions::default(),
            bisection_tol: 1e-3,
        },
    )
    .unwrap();
    let value = serde_json::to_value(&cert).unwrap();
    for key in [
        "family", "lambda", "R0", "R", "epsilon", "D", "C", "mode", "sigma_sum_t1_lo", "P1_lo", "t_lo", "t_hi",
        "verdict", "runtime_ms", "constants",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    for key in ["c0", "a", "b", "C1_empirical"] {
        assert!(value["constants"].get(key).is_some(), "missing constants.{key}");
    }
    assert_eq!(value["verdict"], "not-certified");
}
