use elastica_mkdv::io::{fmt_f64, points_json, to_json_string, LoopSpec};
use elastica_mkdv::loopgeom::{energy, winding};
use elastica_mkdv::Tolerances;

#[test]
fn curvature_spec_and_point_spec_describe_the_same_loop() {
    let tol = Tolerances::default();
    let spec = LoopSpec::from_json(r#"{"N": 128, "curvature": {"mean": 1.0, "cos": [0.0, 0.5]}}"#)
        .unwrap();
    let (z, defect) = spec.immersion(&tol).unwrap();
    assert!(defect < 1e-12);

    let text = to_json_string(&serde_json::json!({ "Z": points_json(&z.z) }));
    let back = LoopSpec::from_json(&text).unwrap();
    assert_eq!(back.grid_size().unwrap(), 128);

    let k1 = spec.curvature(&tol).unwrap();
    let k2 = back.curvature(&tol).unwrap();
    let gap = k1
        .values()
        .iter()
        .zip(k2.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(gap < 1e-9, "curvature gap {gap}");
    assert_eq!(winding(&k2, &tol).unwrap(), 1);
    assert!((energy(&k1) - energy(&k2)).abs() < 1e-9);
}

#[test]
fn floats_survive_a_text_round_trip_bit_for_bit() {
    for x in [0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, std::f64::consts::PI] {
        let parsed: f64 = fmt_f64(x).parse().unwrap();
        assert_eq!(parsed.to_bits(), x.to_bits());
    }
}

#[test]
fn mismatched_sample_count_is_rejected() {
    let spec = LoopSpec::from_json(r#"{"N": 8, "curvature": [1, 1, 1, 1]}"#).unwrap();
    assert!(spec.grid_size().is_err());
}
