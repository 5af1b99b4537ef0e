use purefields_web::{construct, lambda_series, residue_pattern};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn lambda_series_for_cube_root_two() {
    let v = parse(lambda_series("2", 3, 100));
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts[0][0], 5);
    assert!(pts.iter().any(|p| p[0] == 31 && p[1] == 2));
    assert!(pts.iter().any(|p| p[0] == 7 && p[1] == -1));
    let last = pts.last().unwrap()[2].as_f64().unwrap();
    assert!((last - v["sum"].as_f64().unwrap()).abs() < 1e-12);
    assert!(parse(lambda_series("2", 4, 100))["error"].is_string());
    assert!(parse(lambda_series("x", 3, 100))["error"].is_string());
}

#[test]
fn residue_pattern_mod_seven() {
    let v = parse(residue_pattern(7, 3, 1));
    let classes = v["classes"].as_array().unwrap();
    assert!(classes[0].is_null());
    // Cubes mod 7 are {1, 6}.
    for d in 1..7 {
        assert_eq!(classes[d] == 0, d == 1 || d == 6, "d = {d}");
    }
    assert_eq!(v["threshold"], "144");
    assert!(parse(residue_pattern(11, 3, 1))["error"].is_string());
}

#[test]
fn construct_matches_the_pipeline() {
    let v = parse(construct(3, 2, "10^9", 2, 7, false));
    let ms: Vec<u64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["j"] == 1)
        .map(|r| r["m"].as_u64().unwrap())
        .collect();
    assert_eq!(ms, vec![105, 210, 315, 420]);
    assert_eq!(v["q"], "105");
    let staged = parse(construct(3, 2, "10^9", 2, 7, true));
    assert_eq!(staged["rows"], v["rows"]);
    assert!(parse(construct(3, 2, "5", -1, -1, false))["error"].as_str().unwrap().contains("too small"));
    assert!(parse(construct(3, 1, "10^30", -1, -1, false))["error"].is_string());
}
