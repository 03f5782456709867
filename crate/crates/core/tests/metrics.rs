use kacbath::kinetic::{Law1d, ThermostatSpec};
use kacbath::metrics::*;
use kacbath::Error;
use proptest::prelude::*;

fn closed(laws: Vec<Law1d>) -> CharFunSource {
    CharFunSource::ClosedForm(ClosedForm::Product(laws))
}

fn centred(kind: u8, scale: f64) -> Law1d {
    let base = match kind % 4 {
        0 => ThermostatSpec::gaussian(scale),
        1 => ThermostatSpec::uniform(scale),
        2 => ThermostatSpec::rademacher(scale),
        _ => ThermostatSpec::two_point(scale, -0.5 * scale),
    };
    Law1d::centred(base.unwrap())
}

// sup over a fine scan of (0, 6]
fn scan(f: impl Fn(f64) -> f64) -> (f64, f64) {
    (1..=600_000)
        .map(|k| k as f64 * 1e-5)
        .map(|x| (f(x), x))
        .fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a })
}

#[test]
fn rademacher_against_gaussian() {
    let p = ProbeSet::standard(1, 6.0).unwrap();
    let f = closed(vec![centred(2, 1.0)]);
    let h = closed(vec![centred(0, 1.0)]);
    let (oracle, at) = scan(|x| (x.cos() - (-x * x / 2.0).exp()).abs() / (x * x));
    assert!((oracle - 0.139965).abs() < 1e-6, "{oracle}");
    let d = gtw_distance(&f, &h, &p).unwrap();
    assert!((d.value - oracle).abs() < 1e-3, "{} vs {oracle}", d.value);
    assert!((d.argmax[0].abs() - at).abs() < 0.05);

    let (oracle, _) = scan(|x| (x.cos() - (-x * x / 2.0).exp()).abs() / x);
    assert!((oracle - 0.344554).abs() < 1e-6, "{oracle}");
    let d = t1_distance(&f, &h, &p).unwrap();
    assert!((d.value - oracle).abs() < 1e-3, "{} vs {oracle}", d.value);
}

#[test]
fn t1_of_shifted_point_masses_along_the_diagonal() {
    let d = 0.8;
    let f = closed(vec![Law1d::dirac(d), Law1d::dirac(d)]);
    let h = closed(vec![Law1d::dirac(0.0), Law1d::dirac(0.0)]);
    let eps = 1e-7 / 2f64.sqrt();
    let p = ProbeSet::from_points(2, vec![vec![eps, eps]]).unwrap();
    let v = t1_distance(&f, &h, &p).unwrap().value;
    assert!((v - 2f64.sqrt() * d).abs() < 1e-9, "{v}");
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let p = ProbeSet::standard(1, 6.0).unwrap();
    let f = closed(vec![centred(0, 1.0)]);
    let h = closed(vec![centred(0, 1.0), centred(0, 1.0)]);
    assert!(matches!(t1_distance(&f, &h, &p), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn counterexample_marginals_agree_but_the_pair_differs() {
    let phi = Law1d::centred(ThermostatSpec::two_point(2.0, -1.0).unwrap());
    let (f, g) = counterexample_pair(phi);
    let (f, g) = (CharFunSource::ClosedForm(f), CharFunSource::ClosedForm(g));
    let p1 = ProbeSet::standard(1, 6.0).unwrap();
    let p2 = ProbeSet::standard(2, 6.0).unwrap();
    let m = gtw_distance(&f.marginal(1).unwrap(), &g.marginal(1).unwrap(), &p1).unwrap();
    assert!(m.value < 1e-12);
    assert!(gtw_distance(&f, &g, &p2).unwrap().value > 0.1);
}

#[test]
fn empirical_sources_skip_probes_below_the_floor() {
    let states: Vec<Vec<f64>> = (0..10_000).map(|k| vec![if k % 2 == 0 { 1.0 } else { -1.0 }]).collect();
    let f = CharFunSource::empirical(states).unwrap();
    let h = closed(vec![centred(2, 1.0)]);
    let d = gtw_distance(&f, &h, &ProbeSet::standard(1, 6.0).unwrap()).unwrap();
    assert!((d.probe_floor - 0.1).abs() < 1e-12);
    assert!(d.value < 1e-9, "{}", d.value);
}

fn law() -> impl Strategy<Value = Law1d> {
    (0u8..4, 0.3f64..2.0).prop_map(|(k, s)| centred(k, s))
}

fn pair_source() -> impl Strategy<Value = CharFunSource> {
    (law(), law()).prop_map(|(a, b)| closed(vec![a, b]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distances_obey_the_triangle_inequality(f in pair_source(), g in pair_source(), h in pair_source()) {
        let p = ProbeSet::ball(2, 6.0, 33).unwrap().union(&ProbeSet::small(2, 6.0));
        let chi = CorrectionKernel::new(6.0).unwrap();
        let d = |a: &CharFunSource, b: &CharFunSource| {
            [
                gtw_distance(a, b, &p).unwrap().value,
                t1_distance(a, b, &p).unwrap().value,
                corrected_gtw(a, b, &chi, &p).unwrap().value,
            ]
        };
        let (fg, gh, fh) = (d(&f, &g), d(&g, &h), d(&f, &h));
        for k in 0..3 {
            prop_assert!(fh[k] <= fg[k] + gh[k] + 1e-12);
            prop_assert!((d(&g, &f)[k] - fg[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn marginals_are_closer_than_the_joint_laws(f in pair_source(), h in pair_source()) {
        let p1 = ProbeSet::standard(1, 6.0).unwrap();
        let p2 = p1.embed(2).unwrap();
        let joint = gtw_distance(&f, &h, &p2).unwrap().value;
        let marginal = gtw_distance(&f.marginal(1).unwrap(), &h.marginal(1).unwrap(), &p1).unwrap().value;
        prop_assert!(marginal <= joint + 1e-15);
        let joint = t1_distance(&f, &h, &p2).unwrap().value;
        let marginal = t1_distance(&f.marginal(1).unwrap(), &h.marginal(1).unwrap(), &p1).unwrap().value;
        prop_assert!(marginal <= joint + 1e-15);
    }

    #[test]
    fn corrected_gtw_reduces_to_gtw_for_equal_means(f in pair_source(), h in pair_source(), r in 1.0f64..8.0) {
        let p = ProbeSet::ball(2, 6.0, 17).unwrap();
        let chi = CorrectionKernel::new(r).unwrap();
        let a = gtw_distance(&f, &h, &p).unwrap().value;
        let b = corrected_gtw(&f, &h, &chi, &p).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }
}
