//! Reference values computed independently at 40 digits with mpmath and
//! frozen here.

use approx::assert_relative_eq;
use dglab::classifier::{classify_sequence, delta, lambda_sequence, DeltaProfile, Sequence, Tail, VerdictKind};
use dglab::geometry::iterated_log;
use dglab::metric::{ball_volume, cross_section, geodesic_radius, height_hstar, kernel_k, solve_lambda, KernelForm};
use dglab::Geometry;

#[test]
fn triple_log_of_ten_billion() {
    assert_relative_eq!(iterated_log(3, 1e10).unwrap(), 1.143_145_002_184_414_7, max_relative = 1e-14);
}

#[test]
fn power_log_k0_at_quarter() {
    let g = Geometry::power_log(0, 0.5).unwrap();
    assert_relative_eq!(g.big_f(0.25).unwrap(), 2.772_588_722_239_781, max_relative = 1e-14);
}

#[test]
fn literal_power_log_at_tower_point() {
    // ln^{(3)}(1/x) = 1 at x = e^{-e^e}, so F = ln(1/x) = e^e.
    let x = (-std::f64::consts::E.exp()).exp();
    for sigma in [0.5, 1.0, 2.0] {
        let g = Geometry::power_log_literal(3, sigma).unwrap();
        assert_relative_eq!(g.big_f(x).unwrap(), 15.154_262_241_479_262, max_relative = 1e-12);
    }
}

#[test]
fn inverse_power_volume_large_regime() {
    let g = Geometry::inverse_power(1.0).unwrap();
    assert_relative_eq!(ball_volume(&g, 3, 0.01, 0.2).unwrap(), 1.561_501_875_016_166_3e-6, max_relative = 1e-12);
}

#[test]
fn inverse_power_cross_section_n4() {
    let g = Geometry::inverse_power(1.0).unwrap();
    assert_relative_eq!(cross_section(&g, 4, 0.01, 0.2).unwrap(), 3.325_356_513_837_646e-6, max_relative = 1e-12);
}

#[test]
fn arcsin_geodesic_radius() {
    let g = Geometry::finite_type(1.0).unwrap();
    assert_relative_eq!(geodesic_radius(&g, 0.1, 0.2, 0.3).unwrap(), 0.116_967_224_031_853_33, max_relative = 1e-10);
}

#[test]
fn linear_profile_turning_from_origin() {
    let g = Geometry::finite_type(1.0).unwrap();
    let lam = solve_lambda(&g, 0.0, 0.1 * std::f64::consts::FRAC_PI_2).unwrap();
    assert_relative_eq!(lam, 0.1, max_relative = 1e-9);
}

#[test]
fn simplified_kernel_is_inverse_height() {
    let g = Geometry::finite_type(1.0).unwrap();
    let h = height_hstar(&g, 0.1, 0.2).unwrap();
    assert_relative_eq!(h, 0.069_535_309_404_065_81, max_relative = 1e-10);
    let k = kernel_k(&g, [0.1, 0.0], [0.3, 0.0], 0.25, KernelForm::Simplified).unwrap();
    assert_relative_eq!(k, 1.0 / 0.069_535_309_404_065_81, max_relative = 1e-10);
}

#[test]
fn delta_for_power_log_default_constants() {
    let g = Geometry::power_log(3, 0.5).unwrap();
    let d = delta(&DeltaProfile::of_geometry(&g), 1e-4).unwrap();
    assert_relative_eq!(d, 0.029_371_221_876_264_437, max_relative = 1e-12);
}

#[test]
fn lambda_sequence_power_log_09() {
    let g = Geometry::power_log(3, 0.9).unwrap();
    let rows = lambda_sequence(&DeltaProfile::of_geometry(&g), 0.25, 5).unwrap();
    let want = [-695.735_866_971_973_6, -767.966_905_115_755_2, -839.411_428_355_719_7, -910.016_469_641_699_4, -979.751_561_390_334_3];
    for (row, w) in rows.iter().zip(want) {
        assert_relative_eq!(row.ln_lambda, w, max_relative = 1e-12);
    }
}

#[test]
fn bertrand_two_converges() {
    let v = classify_sequence(Sequence::Bertrand { p: 2.0 }, Tail::DEFAULT_INDEX, 0.05).unwrap();
    assert_eq!(v.verdict, VerdictKind::Convergent);
}
