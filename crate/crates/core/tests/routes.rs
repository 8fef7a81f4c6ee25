//! Frozen fluxes at a non-default parameter point, and route selection
//! through the public API.

// Reference constants keep every digit of their high-precision source.
#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;

use qfridge::driving::{
    flux, flux_laplace, flux_quadrature_thermal, flux_series, Route, DEFAULT_K_MAX,
};
use qfridge::lindblad::FluxCoefficients;
use qfridge::thermalbath::{steady_populations_thermal, thermal_field_flux, ThermalFieldParams};
use qfridge::{Error, PhotonDistribution, RefrigeratorParams};

/// γ = 0.7, Δ = 0.9, ξ0 = 1.6, n̄_c = 1.4, n̄_h = 0.3.
fn point() -> RefrigeratorParams {
    RefrigeratorParams::builder()
        .gamma(0.7)
        .delta(0.9)
        .xi0(1.6)
        .nbar_c(1.4)
        .nbar_h(0.3)
        .build()
        .unwrap()
}

#[test]
fn scales_at_reference_point() {
    let f = FluxCoefficients::new(&point());
    assert_relative_eq!(
        f.saturation(),
        0.108_450_704_225_352_112_68,
        max_relative = 1e-14
    );
    assert_relative_eq!(
        1.6 * 1.6 * f.c / f.b,
        1.194_382_591_231_530_512_6,
        max_relative = 1e-14
    );
}

// Expected values: 150-digit quadrature of S∫e^{−s}(1 − F(σs))ds with F from
// the Z± closed forms, confirmed against direct sums of the distribution.
#[test]
fn frozen_fluxes_by_statistic() {
    let p = point();
    let cases = [
        (
            PhotonDistribution::coherent(3.0).unwrap(),
            0.084_787_774_383_156_068_38,
        ),
        (
            PhotonDistribution::thermal(3.0).unwrap(),
            0.070_049_351_191_660_708_1,
        ),
        (
            PhotonDistribution::thermal(40.0).unwrap(),
            0.100_777_753_304_592_743_27,
        ),
        (
            PhotonDistribution::sub_poisson(9.0).unwrap(),
            0.077_422_835_757_094_270_69,
        ),
        (
            PhotonDistribution::sub_poisson(400.0).unwrap(),
            0.100_432_720_400_853_595_37,
        ),
        (
            PhotonDistribution::super_poisson(9.0).unwrap(),
            0.096_278_989_153_265_055_15,
        ),
        (
            PhotonDistribution::super_poisson(0.4).unwrap(),
            0.014_890_483_452_950_049_54,
        ),
    ];
    for (d, expected) in cases {
        let r = flux(&p, &d).unwrap();
        assert_eq!(r.route, Route::Laplace);
        assert_relative_eq!(r.j_bar, expected, max_relative = 1e-10);
        assert!(!r.flagged(), "{:?}: {:?}", d.kind(), r.cross_check);
    }
}

#[test]
fn thermal_dispatch_is_cross_checked_by_quadrature() {
    let r = flux(&point(), &PhotonDistribution::thermal(40.0).unwrap()).unwrap();
    let cc = r
        .cross_check
        .expect("thermal light always has a quadrature check");
    assert_eq!(cc.route, Route::ThermalQuadrature);
    assert!(cc.discrepancy < 1e-12);
    let q = flux_quadrature_thermal(&point(), 40.0).unwrap();
    assert_relative_eq!(q.j_bar, 0.100_777_753_304_592_743_27, max_relative = 1e-10);
}

#[test]
fn series_cross_check_only_when_convergent() {
    let p = point();
    let weak = flux(&p, &PhotonDistribution::super_poisson(0.4).unwrap()).unwrap();
    assert_eq!(weak.cross_check.map(|c| c.route), Some(Route::Series));
    let strong = PhotonDistribution::thermal(40.0).unwrap();
    assert!(matches!(
        flux_series(&p, &strong, DEFAULT_K_MAX),
        Err(Error::SeriesDivergent { .. })
    ));
}

#[test]
fn custom_distribution_routes_agree() {
    // Two-photon Fock-state mixture: F(s) = 0.25 + 0.5(1−s) + 0.25(1−s)².
    let p = point();
    let d = PhotonDistribution::custom(vec![0.25, 0.5, 0.25]).unwrap();
    let f = FluxCoefficients::new(&p);
    let (s, sigma) = (f.saturation(), 1.6 * 1.6 * f.c / f.b);
    // ∫e^{−t}(1 − F(σt)) = σ·m1 − σ²·m2 with m1 = 1, m2 = 0.5.
    let exact = s * (sigma - sigma * sigma * 0.5);
    assert_relative_eq!(
        flux_laplace(&p, &d).unwrap().j_bar,
        exact,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        flux_series(&p, &d, DEFAULT_K_MAX).unwrap().j_bar,
        exact,
        max_relative = 1e-12
    );
}

#[test]
fn thermal_field_reference_point() {
    let base = RefrigeratorParams::default().with_kappa(0.2).unwrap();
    let f = ThermalFieldParams::new(base, 5.0).unwrap();
    assert_relative_eq!(
        thermal_field_flux(&f),
        0.023_622_047_244_094,
        max_relative = 1e-12
    );
    let s = steady_populations_thermal(&f);
    assert_relative_eq!(s.pop_1, 0.259_842_519_685_04, max_relative = 1e-12);
    assert_relative_eq!(s.pop_2, 0.196_850_393_700_79, max_relative = 1e-12);
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(PhotonDistribution::thermal(-1.0).is_err());
    assert!(PhotonDistribution::custom(vec![0.5, 0.2]).is_err());
    assert!(PhotonDistribution::custom(vec![]).is_err());
    assert!(flux_quadrature_thermal(&point(), f64::NAN).is_err());
    assert!(flux_series(&point(), &PhotonDistribution::coherent(1.0).unwrap(), 0).is_err());
}
