use ltlab_web::{det_json, hyp_json, shifts_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn shifts_at_height_two() {
    let v = parse(&shifts_json(3, 2, 2).unwrap());
    assert_eq!(v["schema"], "ltlab/1");
    assert_eq!(v["shifts"]["bc_shift"], 650);
    assert_eq!(v["shifts"]["alg_shift"], 644);
}

#[test]
fn det_of_one_plus_s() {
    let v = parse(&det_json(3, 2, 4, "1; 1").unwrap());
    assert_eq!(v["g"], "1; 1");
    // det(1 + S) = 1 - p at n = 2
    assert_eq!(v["det"], "79");
    assert!(v["zeta"].is_object());
}

#[test]
fn hyp_table() {
    assert_eq!(parse(&hyp_json(5, 2).unwrap())["holds"], true);
    assert_eq!(parse(&hyp_json(3, 2).unwrap())["holds"], false);
}

#[test]
fn bad_input_is_an_error() {
    assert!(shifts_json(4, 2, 2).is_err());
    assert!(det_json(3, 2, 4, "1;; 1").unwrap_err().contains("position 2"));
    assert!(det_json(3, 4, 4, "1").is_err());
}
