//! One test per acceptance criterion. Each prints a single
//! `PASS criterion N` / `FAIL criterion N` line before asserting, so
//! `cargo test --test acceptance -- --nocapture` gives a readable summary.

use morrey_core::abel::{self, AbelProblem};
use morrey_core::fde::{self, CauchyProblem, Rhs};
use morrey_core::morrey::{self, Domain, MorreyParams, Side};
use morrey_core::operators::{self, FractionalOrder, KernelSpec};
use morrey_core::report::Format;
use morrey_core::special;
use morrey_core::verify::{self, MembershipVerdict, OperatorId, SpacePair, TestFunction};
use morrey_core::weights::{self, WeightSpec};
use morrey_core::{Grid1D, Interval, SampledFunction};

fn verdict(n: u32, what: &str, ok: bool, detail: String) {
    println!("{} criterion {n}: {what} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {what} ({detail})");
}

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

#[test]
fn c01_fractional_power_rule() {
    let g = Grid1D::over(0.0, 1.0, 2048).unwrap();
    let f = SampledFunction::from_fn(g, false, |t| t).unwrap();
    let out = operators::rl_integral(&f, order(0.5)).unwrap();
    let exact = special::gamma(2.0) / special::gamma(2.5);
    let err = g
        .nodes()
        .zip(out.values())
        .skip(1)
        .map(|(t, v)| (v / t.powf(1.5) - exact).abs() / exact)
        .fold(0.0, f64::max);
    verdict(1, "I^{1/2} t = c t^{3/2}", err < 1e-3, format!("c = {exact:.6}, max rel err {err:.2e}"));
}

fn abel_residual(n: usize) -> f64 {
    let g = Grid1D::over(0.0, 1.0, n).unwrap();
    let f = SampledFunction::from_fn(g, false, |t| t).unwrap();
    let w = WeightSpec::constant(1.0, g.interval).unwrap();
    let p = AbelProblem::new(f, order(0.5), 0.0, w).unwrap();
    abel::solve_abel(&p, false).unwrap().residual_sup
}

#[test]
fn c02_abel_round_trip() {
    let coarse = abel_residual(2048);
    let fine = abel_residual(4096);
    let ok = fine < 1e-2 && coarse / fine >= 1.5;
    verdict(2, "Abel round trip for f = x", ok, format!("residual {fine:.2e}, shrink {:.2}", coarse / fine));
}

/// `max |I^α D^α f − expected|` over interior nodes for `f = t^{α−1} + b t^α`.
/// Since `(I^{1−α} f)(0) = Γ(α)`, the identity predicts `I^α D^α f = b t^α`.
fn composition_deviation(n: usize, b: f64) -> f64 {
    let a = order(0.5);
    let g = Grid1D::over(0.0, 1.0, n).unwrap();
    let f = SampledFunction::from_fn_offset(g, false, |t| t.powf(-0.5) + b * t.powf(0.5))
        .unwrap()
        .with_origin_power(-0.5)
        .unwrap();
    let back = operators::rl_integral(&operators::rl_derivative(&f, a).unwrap(), a).unwrap();
    g.nodes()
        .zip(back.values())
        .filter(|(t, _)| *t >= abel::INTERIOR_CUT)
        .map(|(t, v)| (v - b * t.powf(0.5)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn c03_composition_identity() {
    // below this the deviation is rounding noise and counts as converged
    const FLOOR: f64 = 1e-13;
    let mut ok = true;
    let mut detail = Vec::new();
    for b in [0.0, 1.0] {
        let devs: Vec<f64> = [1024, 2048, 4096, 8192].into_iter().map(|n| composition_deviation(n, b)).collect();
        let factors: Vec<f64> = devs.windows(2).map(|w| w[0] / w[1]).collect();
        ok &= devs.windows(2).all(|w| w[1] < FLOOR || w[0] / w[1] >= 1.5);
        detail.push(format!("f = t^(-1/2) + {b} t^(1/2): deviations {devs:?}, factors {factors:.2?}"));
    }
    verdict(3, "I^α D^α f = f − (I^{1-α} f)(0+) t^{α-1}/Γ(α) in the interior", ok, detail.join("; "));
}

#[test]
fn c04_exact_fde_solution() {
    let r = fde::verify_exact_solution(0.8, 0.1, 1.0, 1.0, 8192, 0.25).unwrap();
    verdict(
        4,
        "exact power solution satisfies the FDE",
        r.max_relative_residual < 2e-2,
        format!("C = {:.7}, rel residual {:.2e}", r.solution.coefficient, r.max_relative_residual),
    );
}

#[test]
fn c05_picard_convergence() {
    let rhs = Rhs::LinearManufactured { mu: 1.0, c: 0.1 };
    let p = CauchyProblem::new(order(0.5), rhs, 1.0, 0.1).unwrap();
    let r = fde::picard_solve(&p, 1024, 1e-12, 50).unwrap();
    let err = r.u.grid().nodes().zip(r.u.values()).map(|(t, v)| (v - t).abs()).fold(0.0, f64::max);
    let decreasing = r.update_norms.windows(2).skip(1).all(|w| w[1] < w[0]);
    let ok = r.converged && r.iterations <= 50 && err < 1e-3 && decreasing;
    verdict(5, "Picard on the manufactured linear problem", ok, format!("{} iterations, sup error {err:.2e}", r.iterations));
}

#[test]
fn c06_weight_constants() {
    let one = WeightSpec::constant(1.0, iv(0.0, 1.0)).unwrap();
    let a2 = weights::ap_plus_constant(&one, 2.0, Grid1D::over(0.0, 1.0, 256).unwrap()).unwrap();
    let g = Grid1D::over(-1.0, 1.0, 512).unwrap();
    let e = WeightSpec::exponential(g.interval);
    let a1 = weights::ap_plus_constant(&e, 1.0, g).unwrap();
    let dbl = weights::one_sided_doubling_ratio(&e, g).unwrap();
    let ok = (a2.constant_estimate - 0.25).abs() < 1e-3
        && (a1.constant_estimate - 1.0).abs() < 1e-2
        && (dbl.constant_estimate - 2.0).abs() < 1e-2;
    verdict(
        6,
        "A_2^+(1), A_1^+(e^x), doubling(e^x)",
        ok,
        format!("{:.6}, {:.6}, {:.6}", a2.constant_estimate, a1.constant_estimate, dbl.constant_estimate),
    );
}

#[test]
fn c07_morrey_norms() {
    let g = Grid1D::over(0.0, 1.0, 256).unwrap();
    let chi = SampledFunction::from_fn(g, true, |_| 1.0).unwrap();
    let one = WeightSpec::constant(1.0, g.interval).unwrap();
    let params = MorreyParams::new(2.0, 0.5, 1.0, Side::Plus, Domain::WholeLine).unwrap();
    let r = morrey::morrey_norm(&chi, &one, &params).unwrap();
    let indicator_ok = (r.value - 1.0).abs() < 1e-2 && (r.argmax_x0, r.argmax_h) == (0.0, 1.0);

    let g = Grid1D::over(0.0, 1.0, 128).unwrap();
    let ws = [
        WeightSpec::constant(1.0, g.interval).unwrap(),
        WeightSpec::exponential(g.interval),
        WeightSpec::power(0.5, g.interval).unwrap(),
    ];
    let mut checked = 0;
    let mut violations = Vec::new();
    for f in verify::full_family() {
        let s = f.sample_on(g).unwrap();
        for w in &ws {
            for p in [1.0, 1.5, 2.0] {
                for lambda in [0.0, 0.25, 0.5] {
                    for side in [Side::Plus, Side::Minus] {
                        for domain in [Domain::WholeLine, Domain::Local(1.0)] {
                            let params = MorreyParams::new(p, lambda, p, side, domain).unwrap();
                            let strong = morrey::morrey_norm(&s, w, &params).unwrap().value;
                            let weak = morrey::weak_morrey_norm(&s, w, &params).unwrap().value;
                            checked += 1;
                            if weak > strong * (1.0 + 1e-12) {
                                violations.push(format!("{f} {} p={p} λ={lambda} {side:?} {domain:?}", w.label()));
                            }
                        }
                    }
                }
            }
        }
    }
    verdict(
        7,
        "indicator norm and weak ≤ strong",
        indicator_ok && violations.is_empty(),
        format!("‖χ‖ = {:.6} at ({}, {}); {} violations in {checked} combinations {violations:?}", r.value, r.argmax_x0, r.argmax_h, violations.len()),
    );
}

#[test]
fn c08_rl_boundedness() {
    let alpha = order(0.8);
    let op = OperatorId::RlInt { alpha };
    let pair = SpacePair::riemann_liouville(1.5, 2.0, 0.0, 0.0, 1.0).unwrap();
    let family = verify::full_family();
    let domain = iv(0.0, 4.0);
    let ws = [
        WeightSpec::constant(1.0, domain).unwrap(),
        WeightSpec::exponential(domain),
        WeightSpec::power(0.5, domain).unwrap(),
    ];
    let horizons = [0.25, 0.5, 1.0, 2.0, 4.0];
    let mut ok = true;
    let mut detail = Vec::new();
    for w in &ws {
        let coarse = verify::boundedness_experiment(op, &pair, &family, w, 1.0, 512).unwrap();
        let fine = verify::boundedness_experiment(op, &pair, &family, w, 1.0, 1024).unwrap();
        let finite = fine.rows.iter().all(|r| r.ratio.is_some_and(f64::is_finite));
        let drift = (fine.max_ratio - coarse.max_ratio).abs() / coarse.max_ratio;
        let fit = verify::scaling_exponent_fit(op, &pair, &family, w, &horizons, 512).unwrap();
        let w_ok = finite && drift < 0.2 && fit.fit.slope <= fit.predicted + 0.1;
        ok &= w_ok;
        detail.push(format!(
            "{}: max {:.4}, drift {:.2}%, slope {:.4} vs {:.4}",
            w.label(),
            fine.max_ratio,
            100.0 * drift,
            fit.fit.slope,
            fit.predicted + 0.1
        ));
    }
    verdict(8, "R-L boundedness (0.8, 1.5, 2, 0, 0)", ok, detail.join("; "));
}

#[test]
fn c09_weak_type_maximal() {
    let op = OperatorId::Maximal { side: Side::Plus, alpha: 0.0 };
    let pair = SpacePair::weak_type(0.25).unwrap();
    let w = WeightSpec::exponential(iv(-1.0, 2.0));
    let family = verify::bump_family();
    let coarse = verify::boundedness_experiment(op, &pair, &family, &w, 1.0, 256).unwrap();
    let fine = verify::boundedness_experiment(op, &pair, &family, &w, 1.0, 512).unwrap();
    let finite = fine.rows.iter().all(|r| r.ratio.is_some_and(f64::is_finite));
    let drift = coarse.drift(&fine);
    let ok = finite && drift < 0.2;
    verdict(
        9,
        "weak (1,1) for M⁺ with e^x, λ = 1/4",
        ok,
        format!("max ratio {:.4}, worst row drift {:.2}%", fine.max_ratio, 100.0 * drift),
    );
}

#[test]
fn c10_compactness_rate() {
    let domain = Domain::Local(1.0);
    let pair = SpacePair::new(
        MorreyParams::new(2.0, 0.0, 2.0, Side::Plus, domain).unwrap(),
        MorreyParams::new(4.0, 0.0, 4.0, Side::Plus, domain).unwrap(),
        false,
    )
    .unwrap();
    let w = WeightSpec::constant(1.0, iv(0.0, 1.0)).unwrap();
    let shifts: Vec<f64> = (3..=7).map(|k| 0.5f64.powi(k)).collect();
    let r = verify::equicontinuity_exponent(order(0.8), &pair, &verify::full_family(), &w, 1.0, 1024, 1.0, &shifts).unwrap();
    let ok = r.fit.slope >= 0.15;
    verdict(10, "translation modulus exponent of I^0.8", ok, format!("slope {:.4}, predicted {:.2}", r.fit.slope, r.predicted));
}

#[test]
fn c11_membership_probes() {
    let delta = iv(0.0, 1.0);
    let u_params = MorreyParams::new(1.25, 0.5, 1.0, Side::Plus, Domain::Local(1.0)).unwrap();
    let u_weight = WeightSpec::power(-0.5, delta).unwrap();
    let u = verify::morrey_membership_probe(-0.36, &u_weight, &u_params, 256, 3).unwrap();
    let f_params = MorreyParams::new(2.0, 0.0, 1.0, Side::Plus, Domain::Local(1.0)).unwrap();
    let f_weight = WeightSpec::power(-2.0 / (2.0 * 1.25), delta).unwrap();
    let f = verify::morrey_membership_probe(-1.7, &f_weight, &f_params, 256, 3).unwrap();
    let ok = u.verdict == MembershipVerdict::Converging && f.verdict == MembershipVerdict::Diverging;
    verdict(
        11,
        "u-profile converges, f-profile diverges",
        ok,
        format!("u growth {:.4?}, f growth {:.3?}", u.growth, f.growth),
    );
}

#[test]
fn c12_oczk_kernel() {
    let r = operators::oczk_check(&KernelSpec::LogSinc, 1e-3, 1e3, 4096).unwrap();
    let si_pi = 1.851_937_051_982_466;
    let ok = r.size_sup <= 1.0 && r.cancellation_sup <= 4.0 && (r.unit_to_e_pi - si_pi).abs() < 1e-3;
    verdict(
        12,
        "example kernel is an OCZK",
        ok,
        format!("size {:.6}, cancellation {:.6}, (1, e^π) integral {:.6}", r.size_sup, r.cancellation_sup, r.unit_to_e_pi),
    );
}

fn artifacts() -> Vec<String> {
    let mut table = verify::verify_table();
    let pair = SpacePair::riemann_liouville(1.5, 2.0, 0.0, 0.0, 1.0).unwrap();
    let w = WeightSpec::exponential(iv(0.0, 1.0));
    let op = OperatorId::RlInt { alpha: order(0.8) };
    let family = verify::full_family();
    verify::boundedness_experiment(op, &pair, &family, &w, 1.0, 256)
        .unwrap()
        .append_rows(&mut table, "rl-bound", "", "")
        .unwrap();
    let params = MorreyParams::new(1.0, 0.25, 1.0, Side::Plus, Domain::WholeLine).unwrap();
    let f = TestFunction::Bump { centre: 0.5, radius: 0.25 }.sample(1.0, 256).unwrap();
    let norm = morrey::weak_morrey_norm(&f, &w, &params).unwrap();
    vec![
        table.render(Format::Csv).unwrap(),
        table.render(Format::Json).unwrap(),
        serde_json::to_string(&norm).unwrap(),
    ]
}

#[test]
fn c13_determinism() {
    let first = artifacts();
    let second = artifacts();
    let same = first == second;
    verdict(13, "repeated runs give byte-identical artifacts", same, format!("{} artifacts compared", first.len()));
}
