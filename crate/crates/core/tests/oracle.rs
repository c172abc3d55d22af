use chargequbit::materials::{gaas, silicon};
use chargequbit::oracle::{
    b2_time_dependent_oracle, b2_time_dependent_with_envelope, gamma_golden_rule_oracle,
    gamma_golden_rule_with_envelope, piezo_angular_factor, CouplingEnvelope,
};
use chargequbit::quadrature::integrate_adaptive;
use chargequbit::rates::{b2_closed_form, gamma_closed_form, splitting_for_cycle_time};
use chargequbit::{preset, ConfinementShape, CouplingChannel, QuadratureSettings, QubitGeometry};
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn settings() -> QuadratureSettings {
    QuadratureSettings::default()
}

#[test]
fn angular_factor_examples() {
    assert_eq!(piezo_angular_factor([0.0, 0.0, 1.0]).unwrap(), 0.0);
    assert_eq!(piezo_angular_factor([0.0, -1.0, 0.0]).unwrap(), 0.0);
    let d = 1.0 / 3f64.sqrt();
    assert!((piezo_angular_factor([d, d, d]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert!(piezo_angular_factor([1.0, 1.0, 0.0]).is_err());
    assert!(piezo_angular_factor([f64::NAN, 0.0, 1.0]).is_err());
}

#[test]
fn angular_factor_sphere_average_is_one_fifth() {
    let s = QuadratureSettings {
        rel_tol: 1e-12,
        ..settings()
    };
    let outer = integrate_adaptive(
        |u| {
            let st = (1.0 - u * u).sqrt();
            integrate_adaptive(
                |phi| piezo_angular_factor([st * phi.cos(), st * phi.sin(), u]).unwrap(),
                0.0,
                2.0 * PI,
                &s,
            )
            .unwrap()
            .value
        },
        -1.0,
        1.0,
        &s,
    )
    .unwrap();
    assert!((outer.value / (4.0 * PI) - 0.2).abs() < 1e-12);
}

#[test]
fn envelope_form_factor_is_nonnegative_and_decays() {
    let m = gaas();
    let g = QubitGeometry::new(20e-9, 80e-9, ConfinementShape::Gaussian).unwrap();
    let env = CouplingEnvelope::new(CouplingChannel::PiezoGaussian, &m, &g).unwrap();
    let dir = [0.48, 0.6, 0.64];
    let mut last = f64::INFINITY;
    for q in [1e6, 1e7, 1e8, 3e8, 1e9] {
        let f = env.form_factor(q, dir);
        assert!(f >= 0.0);
        let envelope = env.radial_form_factor(q);
        assert!(envelope <= last);
        last = envelope;
    }
    assert!(env.radial_form_factor(env.radial_cutoff(1e-18)) <= 1.0000001e-18);

    let si = silicon();
    let h = QubitGeometry::new(3e-9, 50e-9, ConfinementShape::Hydrogenic).unwrap();
    let env = CouplingEnvelope::new(CouplingChannel::DeformationHydrogenic, &si, &h).unwrap();
    let qc = env.radial_cutoff(1e-18);
    assert!((env.radial_form_factor(qc) / 1e-18 - 1.0).abs() < 1e-9);
}

#[test]
fn envelope_rejects_mismatched_shape() {
    let m = silicon();
    let g = QubitGeometry::new(3e-9, 50e-9, ConfinementShape::Hydrogenic).unwrap();
    assert!(CouplingEnvelope::new(CouplingChannel::DeformationGaussian, &m, &g).is_err());
    let g = QubitGeometry::new(3e-9, 50e-9, ConfinementShape::Gaussian).unwrap();
    assert!(CouplingEnvelope::new(CouplingChannel::PiezoGaussian, &m, &g).is_err());
}

#[test]
fn normalisation_volume_cancels() {
    let eps = splitting_for_cycle_time(50e-12).unwrap();
    for name in ["gaas-dots", "si-donors"] {
        let p = preset(name).unwrap();
        for &c in &p.channels {
            let env = CouplingEnvelope::new(c, &p.material, &p.geometry).unwrap();
            let doubled = env.with_volume(2.0).unwrap();
            let g1 = gamma_golden_rule_with_envelope(&env, eps, &settings()).unwrap();
            let g2 = gamma_golden_rule_with_envelope(&doubled, eps, &settings()).unwrap();
            assert_eq!(g1.to_bits(), g2.to_bits(), "{c}");
            if c.is_deformation() {
                let b1 = b2_time_dependent_with_envelope(&env, 20e-12, &settings()).unwrap();
                let b2 = b2_time_dependent_with_envelope(&doubled, 20e-12, &settings()).unwrap();
                assert_eq!(b1.to_bits(), b2.to_bits(), "{c}");
            }
        }
    }
}

#[test]
fn si_dots_rate_matches_closed_form() {
    let p = preset("si-dots").unwrap();
    let eps = splitting_for_cycle_time(100e-12).unwrap();
    let c = CouplingChannel::DeformationGaussian;
    let oracle = gamma_golden_rule_oracle(c, &p.material, &p.geometry, eps, &settings()).unwrap();
    let closed = gamma_closed_form(c, &p.material, &p.geometry, eps).unwrap();
    assert!(rel(oracle, closed) <= 1e-6, "{oracle} vs {closed}");
}

#[test]
fn gaas_piezo_rate_matches_closed_form_over_three_decades() {
    let p = preset("gaas-dots").unwrap();
    let c = CouplingChannel::PiezoGaussian;
    let centre = splitting_for_cycle_time(100e-12).unwrap();
    for i in 0..=12 {
        let eps = centre * 10f64.powf(-1.5 + 0.25 * i as f64);
        let oracle =
            gamma_golden_rule_oracle(c, &p.material, &p.geometry, eps, &settings()).unwrap();
        let closed = gamma_closed_form(c, &p.material, &p.geometry, eps).unwrap();
        assert!(
            rel(oracle, closed) <= 1e-5,
            "eps = {eps:e}: {oracle} vs {closed}"
        );
    }
}

#[test]
fn strongly_suppressed_rates_keep_relative_accuracy() {
    // at 1 ps the gaas form factor is ~1e-37
    let p = preset("gaas-dots").unwrap();
    let eps = splitting_for_cycle_time(1e-12).unwrap();
    for c in [
        CouplingChannel::DeformationGaussian,
        CouplingChannel::PiezoGaussian,
    ] {
        let oracle =
            gamma_golden_rule_oracle(c, &p.material, &p.geometry, eps, &settings()).unwrap();
        let closed = gamma_closed_form(c, &p.material, &p.geometry, eps).unwrap();
        assert!(closed > 0.0 && closed < 1e-30);
        assert!(rel(oracle, closed) <= 1e-5, "{c}: {oracle} vs {closed}");
    }
}

#[test]
fn rate_vanishes_as_dots_merge() {
    let m = gaas();
    let eps = splitting_for_cycle_time(100e-12).unwrap();
    let mut last = f64::INFINITY;
    for l in [10e-9, 1e-9, 1e-10, 1e-11] {
        let g = QubitGeometry::new(20e-9, l, ConfinementShape::Gaussian).unwrap();
        for c in [
            CouplingChannel::DeformationGaussian,
            CouplingChannel::PiezoGaussian,
        ] {
            let v = gamma_golden_rule_oracle(c, &m, &g, eps, &settings()).unwrap();
            assert!(v >= 0.0);
        }
        let v = gamma_golden_rule_oracle(
            CouplingChannel::DeformationGaussian,
            &m,
            &g,
            eps,
            &settings(),
        )
        .unwrap();
        assert!(v < last);
        last = v;
    }
    assert!(
        last < 1e-6
            * gamma_closed_form(
                CouplingChannel::DeformationGaussian,
                &m,
                &QubitGeometry::new(20e-9, 50e-9, ConfinementShape::Gaussian).unwrap(),
                eps
            )
            .unwrap()
    );
}

#[test]
fn b2_at_zero_time_is_zero() {
    for name in ["gaas-dots", "si-dots", "si-donors"] {
        let p = preset(name).unwrap();
        for &c in &p.channels {
            assert_eq!(
                b2_time_dependent_oracle(c, &p.material, &p.geometry, 0.0, &settings()).unwrap(),
                0.0
            );
        }
    }
}

#[test]
fn si_donor_dephasing_saturates_at_closed_form() {
    let p = preset("si-donors").unwrap();
    let c = CouplingChannel::DeformationHydrogenic;
    let oracle =
        b2_time_dependent_oracle(c, &p.material, &p.geometry, 100e-12, &settings()).unwrap();
    let closed = b2_closed_form(c, &p.material, &p.geometry).unwrap();
    // the finite-size correction is 3a²/(2L²) = 0.54 %
    assert!(rel(oracle, closed) < 0.02);
    assert!(oracle < closed);
    assert!((rel(oracle, closed) / (1.5 * 9.0 / 2500.0) - 1.0).abs() < 0.1);
}

#[test]
fn gaussian_dephasing_rises_until_the_transit_time() {
    // B²(t) rises up to st ≈ 2a, overshoots, then settles from above
    let m = silicon();
    let g = QubitGeometry::new(5e-9, 100e-9, ConfinementShape::Gaussian).unwrap();
    let c = CouplingChannel::DeformationGaussian;
    let transit = g.a / m.s;
    let mut last = 0.0;
    for i in 1..=15 {
        let t = 0.1 * i as f64 * transit;
        let v = b2_time_dependent_oracle(c, &m, &g, t, &settings()).unwrap();
        assert!(v >= last * (1.0 - 1e-9), "t = {t:e}");
        last = v;
    }
    let closed = b2_closed_form(c, &m, &g).unwrap();
    let late: Vec<f64> = [100.0, 200.0, 400.0]
        .iter()
        .map(|k| b2_time_dependent_oracle(c, &m, &g, k * transit, &settings()).unwrap())
        .collect();
    assert!(late.iter().all(|v| rel(*v, closed) < 0.02));
}

#[test]
fn dephasing_is_stationary_well_after_transit() {
    let s = silicon();
    let cases = [
        (
            CouplingChannel::DeformationHydrogenic,
            QubitGeometry::new(3e-9, 50e-9, ConfinementShape::Hydrogenic).unwrap(),
        ),
        (
            CouplingChannel::DeformationGaussian,
            QubitGeometry::new(5e-9, 60e-9, ConfinementShape::Gaussian).unwrap(),
        ),
    ];
    for (c, g) in cases {
        for t in [1e-10, 1e-9] {
            assert!(s.s * t >= 4.0 * g.l);
            let b1 = b2_time_dependent_oracle(c, &s, &g, t, &settings()).unwrap();
            let b2 = b2_time_dependent_oracle(c, &s, &g, 2.0 * t, &settings()).unwrap();
            assert!(rel(b2, b1) <= 0.01, "{c} t = {t:e}");
        }
    }
}

#[test]
fn piezo_dephasing_close_to_closed_form() {
    // the closed form splits the bracket at q = π/L, so only rough agreement
    let p = preset("gaas-dots").unwrap();
    let c = CouplingChannel::PiezoGaussian;
    let oracle =
        b2_time_dependent_oracle(c, &p.material, &p.geometry, 100e-12, &settings()).unwrap();
    let closed = b2_closed_form(c, &p.material, &p.geometry).unwrap();
    assert!(oracle > 0.0);
    assert!(rel(oracle, closed) < 0.5, "{oracle} vs {closed}");
}

#[test]
fn tiny_budget_reports_nonconvergence() {
    let p = preset("gaas-dots").unwrap();
    let s = QuadratureSettings {
        max_subdivisions: 1,
        rel_tol: 1e-14,
        ..settings()
    };
    let eps = splitting_for_cycle_time(2e-12).unwrap();
    let e = gamma_golden_rule_oracle(
        CouplingChannel::PiezoGaussian,
        &p.material,
        &p.geometry,
        eps,
        &s,
    )
    .unwrap_err();
    assert!(e.is_nonconvergence());
}
