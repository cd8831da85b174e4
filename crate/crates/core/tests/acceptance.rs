//! Acceptance criteria. Each check prints one PASS/FAIL line; the process
//! exits non-zero if any check fails.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use casimir_core::analysis::{rlm_repair, MeasurementPoint, MeasurementSeries, RoughnessSpec, ScenarioConfig};
use casimir_core::constants::{wavelength_to_omega, C, MICRO_OHM_CM, NM, PN, UM};
use casimir_core::corrections::{conductivity_factor_2nd, krmm_family, layered_k, KrmmMode};
use casimir_core::dielectric::{
    plasma_from_composition, DielectricModel, DrudeParams, MaterialComposition, OpticalSample,
};
use casimir_core::drude_fit::{fit_drude, FitOptions};
use casimir_core::force::{
    classical_term, force_curve, ideal_sphere_plate, sphere_plate_force, sphere_plate_force_zero_t, Geometry, Thermal,
};
use casimir_core::reflection::{g_factors, LayerStack, WallResponse};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(x: f64, y: f64) -> f64 {
    (x / y - 1.0).abs()
}

fn plasma(wp: f64) -> LayerStack {
    LayerStack::halfspace(DielectricModel::plasma(wp).unwrap())
}

fn drude(wp: f64, wt: f64) -> LayerStack {
    LayerStack::halfspace(DielectricModel::drude(wp, wt).unwrap())
}

fn closed_form_anchors() -> Check {
    // independent evaluation from the defining constants
    let (hbar, c, k) = (1.054_571_817e-34_f64, 299_792_458.0_f64, 1.380_649e-23_f64);
    let zeta3 = 1.202_056_903_159_594_3_f64;
    let pi = std::f64::consts::PI;
    let classical_ref = k * 300.0 * 1e-4 * zeta3 / (4.0 * 1e-12);
    let ideal_ref = pi.powi(3) * hbar * c * 0.125 / (360.0 * 1e-18);

    let classical = classical_term(1.0 * UM, 100.0 * UM, 300.0);
    let ideal = ideal_sphere_plate(1.0 * UM, 0.125);
    ensure(
        rel(classical, classical_ref) < 1e-6
            && rel(ideal, ideal_ref) < 1e-6
            && (classical - 1.245e-13).abs() <= 0.0005e-13
            && (ideal - 3.40e-10).abs() <= 0.005e-10,
        format!("classical {classical:.6e} N, ideal {ideal:.6e} N"),
    )
}

fn reference_resistivities() -> Check {
    let au = DrudeParams::new(1.3720e16, 4.060e13).unwrap().resistivity() / MICRO_OHM_CM;
    let al = DrudeParams::new(2.235e16, 12.49e13).unwrap().resistivity() / MICRO_OHM_CM;
    ensure(
        rel(au, 2.44) < 5e-3 && rel(al, 2.83) < 5e-3,
        format!("Au {au:.4} uOhm cm, Al {al:.4} uOhm cm"),
    )
}

fn composition_limits() -> Check {
    let cases = [
        ("Au", MaterialComposition::gold(), 1.37e16),
        ("Al", MaterialComposition::aluminium(), 2.40e16),
        ("AuPd", MaterialComposition::gold_palladium(), 1.69e16),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, comp, expected) in cases {
        let wp = plasma_from_composition(&comp).unwrap();
        ok &= rel(wp, expected) < 0.01;
        detail.push(format!("{name} {wp:.4e}"));
    }
    ensure(ok, detail.join(", "))
}

fn sum_vs_integral() -> Check {
    let (a, r) = (100.0 * NM, 100.0 * UM);
    let diff = |wall: &LayerStack| {
        let ft = sphere_plate_force(wall, a, r, 300.0, 1e-8).unwrap().value;
        let f0 = sphere_plate_force_zero_t(wall, a, r, 1e-8).unwrap().value;
        (ft - f0) / PN
    };
    let dp = diff(&plasma(2e16));
    let dd = diff(&drude(2e16, 5e13));
    ensure(
        (dp / 2.5 - 1.0).abs() <= 0.25 && (dd / 4.0 - 1.0).abs() <= 0.25,
        format!("plasma {dp:.3} pN (2.5 +-25%), Drude {dd:.3} pN (4 +-25%)"),
    )
}

fn ideal_limit_convergence() -> Check {
    // damping is not part of the criterion; 5e13 rad/s is the typical metal value
    let wall = drude(1e18, 5e13);
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for a in [0.2 * UM, 0.5 * UM, 1.0 * UM] {
        let f = sphere_plate_force(&wall, a, 100.0 * UM, 1.0, 1e-8).unwrap().value;
        let ratio = f / ideal_sphere_plate(a, 100.0 * UM);
        worst = worst.max((ratio - 1.0).abs());
        detail.push(format!("{:.1} um: {ratio:.6}", a / UM));
    }
    ensure(worst < 5e-3, format!("F/F0 {} (limit 0.5%)", detail.join(", ")))
}

fn expansion_agreement() -> Check {
    let r = 100.0 * UM;
    let mut worst: f64 = 0.0;
    for wp in [1e16, 2e16, 5e16] {
        for k in [50.0, 60.0, 75.0, 100.0, 150.0, 200.0, 300.0, 500.0, 1000.0] {
            let a = k * C / wp;
            let exact = sphere_plate_force_zero_t(&plasma(wp), a, r, 1e-9).unwrap().value / ideal_sphere_plate(a, r);
            let series = conductivity_factor_2nd(a, wp).unwrap();
            worst = worst.max(rel(series, exact));
        }
    }
    ensure(
        worst < 0.01,
        format!("max relative deviation {worst:.3e} over a*wp/c in [50, 1000]"),
    )
}

fn krmm_critique() -> Check {
    let (wp, r) = (1.88e16, 100.0 * UM);
    let wall = plasma(wp);
    let grid: Vec<f64> = (0..10).map(|i| 100.0 * NM * 10f64.powf(i as f64 / 9.0)).collect();
    let exact = force_curve(
        &wall,
        &grid,
        |a| Geometry::sphere_plate(a, r),
        Thermal::Finite(300.0),
        1e-8,
    )
    .unwrap();
    let mut worst = (0.0, 0.0);
    for (a, f) in grid.iter().zip(&exact) {
        let s = krmm_family(*a, wp, r, KrmmMode::SphereIntegral).unwrap();
        let d = rel(s, f.value);
        if d > worst.0 {
            worst = (d, *a);
        }
    }
    let a = 65.0 * NM;
    let series = krmm_family(a, wp, r, KrmmMode::Series4).unwrap();
    let integral = krmm_family(a, wp, r, KrmmMode::SphereIntegral).unwrap();
    let gap = rel(series, integral);
    ensure(
        worst.0 < 0.03 && gap > 0.05,
        format!(
            "integral vs Lifshitz(300 K) worst {:.3}% at {:.0} nm (limit 3%); series4 vs integral at 65 nm {:.1}% (need > 5%)",
            100.0 * worst.0,
            worst.1 / NM,
            100.0 * gap
        ),
    )
}

fn layered_identities() -> Check {
    let (w1, w2) = (1.69e16, 2.40e16);
    let exact = layered_k(0.0, w1, w2).unwrap() == w1 / w2
        && layered_k(f64::INFINITY, w1, w2).unwrap() == 1.0
        && layered_k(1.0, w1, w2).unwrap() == 1.0
        && [0.0, 1e-9, 1.5e-8, 1e-6]
            .iter()
            .all(|&h| layered_k(h, w1, w1).unwrap() == 1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = 1.0 + rng.gen::<f64>() * 50.0;
        let zeta = 10f64.powf(rng.gen_range(12.0..17.0));
        let wp1 = 10f64.powf(rng.gen_range(15.0..17.0));
        let wp2 = 10f64.powf(rng.gen_range(15.0..17.0));
        let wt = 10f64.powf(rng.gen_range(12.0..15.0));
        let top = DielectricModel::drude(wp1, wt).unwrap();
        let sub = DielectricModel::drude(wp2, wt).unwrap();
        let eps1 = top.eps_imag_axis(zeta).unwrap();
        let eps2 = sub.eps_imag_axis(zeta).unwrap();
        let half = WallResponse::Halfspace { eps: eps2 }.g_factors(p);
        // layered formula itself with a vanishing layer
        let thin = WallResponse::Layered { eps1, eps2, phase: 0.0 }.g_factors(p);
        let stack = g_factors(&LayerStack::coated(top, 0.0, sub).unwrap(), p, zeta).unwrap();
        for (x, y) in [
            (thin.g1, half.g1),
            (thin.g2, half.g2),
            (stack.g1, half.g1),
            (stack.g2, half.g2),
        ] {
            worst = worst.max(rel(x, y));
        }
    }
    ensure(
        exact && worst <= 1e-12,
        format!("K limits exact: {exact}; h=0 vs halfspace worst {worst:.2e} on 1000 points"),
    )
}

fn synthetic_table(wp: f64, wt: f64) -> Vec<OpticalSample> {
    let n = 40;
    (0..n)
        .map(|i| {
            let lambda = 32.0 * UM * (2.0f64 / 32.0).powf(i as f64 / (n - 1) as f64);
            let w = wavelength_to_omega(lambda);
            let d = w * w + wt * wt;
            OpticalSample::new(w, 1.0 - wp * wp / d, wp * wp * wt / (w * d)).unwrap()
        })
        .collect()
}

fn drude_round_trip() -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            let wp = 1e15 * 100f64.powf(i as f64 / 4.0);
            let wt = 1e12 * 1000f64.powf(j as f64 / 4.0);
            let fit = fit_drude(&synthetic_table(wp, wt), &FitOptions::default()).map_err(|e| e.to_string())?;
            worst = worst
                .max(rel(fit.params.omega_p, wp))
                .max(rel(fit.params.omega_tau, wt));
        }
    }
    ensure(worst < 1e-3, format!("worst relative error {worst:.2e} on a 5x5 grid"))
}

fn monotonicity() -> Check {
    let r = 100.0 * UM;
    let wps: Vec<f64> = (0..10).map(|i| 5e15 * 10f64.powf(i as f64 / 9.0)).collect();
    let wts: Vec<f64> = (0..10).map(|i| 1e13 * 100f64.powf(i as f64 / 9.0)).collect();
    let grid: Vec<f64> = (0..10).map(|i| 100.0 * NM * 10f64.powf(i as f64 / 9.0)).collect();
    // f[ip][it][ia]
    let mut f = vec![vec![Vec::new(); wts.len()]; wps.len()];
    for (ip, &wp) in wps.iter().enumerate() {
        for (it, &wt) in wts.iter().enumerate() {
            let curve = force_curve(
                &drude(wp, wt),
                &grid,
                |a| Geometry::sphere_plate(a, r),
                Thermal::Finite(300.0),
                1e-9,
            )
            .map_err(|e| e.to_string())?;
            f[ip][it] = curve.iter().map(|x| x.value).collect::<Vec<_>>();
        }
    }
    let mut violations = Vec::new();
    for ia in 0..grid.len() {
        for it in 0..wts.len() {
            for ip in 1..wps.len() {
                if f[ip][it][ia] <= f[ip - 1][it][ia] {
                    violations.push(format!("omega_p at ({ip},{it},{ia})"));
                }
            }
        }
        for ip in 0..wps.len() {
            for it in 1..wts.len() {
                if f[ip][it][ia] >= f[ip][it - 1][ia] {
                    violations.push(format!("omega_tau at ({ip},{it},{ia})"));
                }
            }
        }
    }
    for ip in 0..wps.len() {
        for it in 0..wts.len() {
            let v = &f[ip][it];
            for ia in 1..grid.len() {
                if v[ia] >= v[ia - 1] {
                    violations.push(format!("decrease at ({ip},{it},{ia})"));
                }
            }
            for ia in 1..grid.len() - 1 {
                let s1 = (v[ia] - v[ia - 1]) / (grid[ia] - grid[ia - 1]);
                let s2 = (v[ia + 1] - v[ia]) / (grid[ia + 1] - grid[ia]);
                if s2 <= s1 {
                    violations.push(format!("convexity at ({ip},{it},{ia})"));
                }
            }
        }
    }
    ensure(
        violations.is_empty(),
        format!(
            "{} violations on 10x10x10 grid {:?}",
            violations.len(),
            violations.iter().take(5).collect::<Vec<_>>()
        ),
    )
}

fn afm_layer_effect() -> Check {
    let layered = ScenarioConfig::afm_mr().resolve(None).map_err(|e| e.to_string())?;
    let mut al = ScenarioConfig::afm_mr();
    al.wall.top = None;
    al.wall.thickness_m = 0.0;
    assert_eq!(al.roughness, RoughnessSpec::Preset("afm-mr-1998".into()));
    let al = al.resolve(None).map_err(|e| e.to_string())?;
    let a = 120.0 * NM;
    let f1 = layered.point(a).map_err(|e| e.to_string())?.0.force;
    let f2 = al.point(a).map_err(|e| e.to_string())?.0.force;
    let diff = (f2 - f1) / PN;
    ensure(
        (diff / 15.0 - 1.0).abs() <= 0.30,
        format!("pure Al minus AuPd(15 nm)/Al at 120 nm: {diff:.2} pN (15 +-30%)"),
    )
}

fn repair_semantics() -> Check {
    let points: Vec<MeasurementPoint> = (0..30)
        .map(|i| {
            let a = 62.0 * NM + 9.7 * NM * i as f64;
            MeasurementPoint {
                separation: a,
                force: -1e-27 / a.powi(3),
                error: Some(2.0 * PN),
            }
        })
        .collect();
    let s = MeasurementSeries::new(points, "synthetic").unwrap();
    let h = 8.0 * NM;
    let once = rlm_repair(&s, h).unwrap();
    let shifted = s
        .separations()
        .iter()
        .zip(once.separations())
        .all(|(a, b)| b == a + 16.0 * NM && ((b - a) - 16.0 * NM).abs() <= 4.0 * f64::EPSILON * b);
    let unchanged = once.forces() == s.forces();
    let twice = rlm_repair(&once, h).unwrap();
    let composed = twice.separations() == rlm_repair(&s, 2.0 * h).unwrap().separations();
    let labelled = once.provenance().contains("repaired(+2h)");
    ensure(
        shifted && unchanged && composed && labelled,
        format!("shift +16 nm: {shifted}, forces unchanged: {unchanged}, repair(repair(h)) = repair(2h): {composed}, label: {labelled}"),
    )
}

fn main() -> ExitCode {
    let checks: [(u32, &str, Duration, fn() -> Check); 12] = [
        (1, "closed-form anchors", Duration::from_secs(1), closed_form_anchors),
        (
            2,
            "reference resistivities",
            Duration::from_secs(1),
            reference_resistivities,
        ),
        (
            3,
            "plasma frequency from composition",
            Duration::from_secs(1),
            composition_limits,
        ),
        (4, "sum vs integral at 100 nm", Duration::from_secs(10), sum_vs_integral),
        (
            5,
            "ideal-limit convergence",
            Duration::from_secs(30),
            ideal_limit_convergence,
        ),
        (
            6,
            "second-order expansion agreement",
            Duration::from_secs(60),
            expansion_agreement,
        ),
        (
            7,
            "interpolation family critique",
            Duration::from_secs(60),
            krmm_critique,
        ),
        (
            8,
            "layered-limit identities",
            Duration::from_secs(1),
            layered_identities,
        ),
        (9, "Drude fit round trip", Duration::from_secs(5), drude_round_trip),
        (10, "monotonicity suite", Duration::from_secs(300), monotonicity),
        (11, "AFM top-layer effect", Duration::from_secs(30), afm_layer_effect),
        (12, "repair semantics", Duration::from_secs(1), repair_semantics),
    ];
    let mut failed = 0;
    for (n, name, budget, check) in checks {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let (status, detail) = match (&outcome, elapsed <= budget) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over time budget {budget:?}")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {status}: {name}: {detail} [{:.3} s]",
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
