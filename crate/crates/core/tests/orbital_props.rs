use geojam_core::orbital::{self, AttackerBands, Vec3};
use geojam_core::signal::{self, RfLinkConfig};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn voi_samples_stay_inside(radius in 1.0f64..10_000.0, count in 1usize..300, seed: u64, lon in -3.0f64..3.0) {
        let target = orbital::geo_slot_state(lon, 0.0).position;
        let pts = orbital::sample_voi(target, radius, count, seed);
        prop_assert_eq!(pts.len(), count);
        for p in pts {
            prop_assert!(orbital::range_km(p, target) <= radius);
        }
    }

    #[test]
    fn two_body_invariants_hold_over_a_day(seed: u64) {
        let el = AttackerBands::default().sample(seed);
        let s0 = orbital::propagate(&el, 0.0).unwrap();
        let e0 = s0.specific_energy();
        let h0 = s0.angular_momentum();
        for k in 1..=48 {
            let s = orbital::propagate(&el, k as f64 * 1_800.0).unwrap();
            prop_assert!(rel(s.specific_energy(), e0) < 1e-9);
            let h = s.angular_momentum();
            prop_assert!((h - h0).norm() / h0.norm() < 1e-9);
        }
    }

    #[test]
    fn kepler_residual_vanishes(m in -20.0f64..20.0, e in 0.0f64..0.95) {
        let ea = orbital::solve_kepler(m, e).unwrap();
        prop_assert!((ea - e * ea.sin() - m).abs() < 1e-10);
    }

    #[test]
    fn line_of_sight_is_symmetric(a in prop::array::uniform3(-50_000.0f64..50_000.0), b in prop::array::uniform3(-50_000.0f64..50_000.0)) {
        let (a, b) = (Vec3::new(a[0], a[1], a[2]), Vec3::new(b[0], b[1], b[2]));
        prop_assert_eq!(orbital::line_of_sight(a, b), orbital::line_of_sight(b, a));
    }
}

#[test]
fn geostationary_slot_stays_put_relative_to_ground() {
    let gs = orbital::GroundStation::beneath(0.3);
    let d0 = orbital::range_km(
        orbital::geo_slot_state(0.3, 0.0).position,
        orbital::ground_station_eci(&gs, 0.0),
    );
    for k in 1..24 {
        let t = k as f64 * 3_600.0;
        let d = orbital::range_km(
            orbital::geo_slot_state(0.3, t).position,
            orbital::ground_station_eci(&gs, t),
        );
        assert!((d - d0).abs() < 1e-6, "{d} vs {d0}");
    }
}

#[test]
fn received_power_is_additive() {
    let link = RfLinkConfig::default();
    let s = link.signal_rx(35_786.0);
    let n = link.noise();
    let j = link.jam_rx(100.0, 30.0, 3_000.0);
    let r = signal::synthesize_received(s, j, n, 10_000, true, 11).unwrap();
    let p = signal::rss(&r).unwrap();
    assert!(rel(p, s + j + n) < 0.05, "{p} vs {}", s + j + n);
    let r = signal::synthesize_received(s, j, n, 10_000, false, 11).unwrap();
    let p = signal::rss(&r).unwrap();
    assert!(rel(p, s + n) < 0.05, "{p} vs {}", s + n);
}
