use std::f64::consts::PI;

use mzv_core::chen::{pt, transport, transport_with, NCSeries, Path, Poles};
use mzv_core::chen::transport::working_bits;
use proptest::prelude::*;

fn assert_series_close(a: &NCSeries, b: &NCSeries, slack: f64) {
    for (pos, (x, y)) in a.coeffs().iter().zip(b.coeffs()).enumerate() {
        let allowed = slack * (x.err() + y.err()).max(1e-300);
        let d = x.mid_distance(y);
        assert!(d <= allowed, "word {:?}: {x} vs {y}", a.word_at(pos));
    }
}

#[test]
fn homotopic_arcs_agree() {
    // Two different arcs from 1/2 to −1/2 passing above 0.
    let upper = Path::arc(pt(0.0, 0.0), pt(0.5, 0.0), PI).unwrap();
    let lifted = Path::polyline(&[pt(0.5, 0.0), pt(0.5, 0.6), pt(-0.5, 0.6), pt(-0.5, 0.0)]).unwrap();
    let f = transport(&upper, 4, 25).unwrap();
    let g = transport(&lifted, 4, 25).unwrap();
    assert_series_close(&f, &g, 1.0);
    // ∫ dx/x = iπ along either.
    assert!((f.coeff(&[0]).im.to_f64() - PI).abs() < 1e-14);
}

#[test]
fn reversal_is_the_antipode() {
    let p = Path::rho0().then(&Path::segment(pt(0.5, 0.0), pt(0.3, 0.4))).unwrap();
    let f = transport(&p, 4, 25).unwrap();
    let r = transport(&p.reverse(), 4, 25).unwrap();
    assert_series_close(&r, &f.antipode(), 1.0);
}

#[test]
fn transports_are_grouplike() {
    for p in [Path::rho0(), Path::rho1(), Path::segment(pt(0.2, -0.3), pt(-0.7, 0.9))] {
        let f = transport(&p, 5, 20).unwrap();
        let (_, ratio) = f.shuffle_defect();
        assert!(ratio <= 1.0, "defect ratio {ratio}");
    }
}

#[test]
fn loops_compose_like_the_group() {
    // ρ_0 ρ_0^{-1} is trivial.
    let f = transport(&Path::rho0(), 3, 20).unwrap();
    let id = f.compose(&f.antipode()).unwrap();
    let one = NCSeries::one(2, 3, id.bits());
    assert_series_close(&id, &one, 1.0);
}

fn point() -> impl Strategy<Value = (f64, f64)> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_filter("away from the punctures", |&(x, y)| {
        ((x * x + y * y).sqrt() > 0.2) && (((x - 1.0).powi(2) + y * y).sqrt() > 0.2)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn concatenation_is_composition(a in point(), b in point(), c in point()) {
        let (a, b, c) = (pt(a.0, a.1), pt(b.0, b.1), pt(c.0, c.1));
        let bits = working_bits(15);
        let poles = Poles::standard(bits);
        let whole = Path::polyline(&[a, b, c]).unwrap();
        prop_assume!(whole.check_avoids(poles.points(), false).is_ok());
        let direct = transport_with(&whole, &poles, 3, bits).unwrap();
        let f = transport_with(&Path::segment(a, b), &poles, 3, bits).unwrap();
        let g = transport_with(&Path::segment(b, c), &poles, 3, bits).unwrap();
        let composed = f.compose(&g).unwrap();
        for (x, y) in direct.coeffs().iter().zip(composed.coeffs()) {
            prop_assert!(x.mid_distance(y) <= x.err() + y.err());
        }
    }
}
