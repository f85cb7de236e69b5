// In-process entry point, as used by main.
use gramlab_cli::run;
use proptest::prelude::*;

fn call(args: &[String]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("gramlab".to_string()).chain(args.iter().cloned()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valid_params_always_report(z in 0.0..5.0f64, w in 0.1..5.0f64) {
        let (code, out) = call(&["analyze".into(), "--zeta".into(), z.to_string(), "--omega-n".into(), w.to_string()]);
        prop_assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let det = v["det_wc"].as_f64().unwrap();
        let expected = if z > 0.0 { 1.0 / (16.0 * z * z * w.powi(4)) } else { 1.0 / (w * w) };
        prop_assert!((det - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn invalid_params_exit_two(z in -5.0..-1e-9f64, w in 0.1..5.0f64) {
        let (code, out) = call(&["analyze".into(), "--zeta".into(), z.to_string(), "--omega-n".into(), w.to_string()]);
        prop_assert_eq!(code, 2);
        prop_assert!(out.is_empty());
    }
}
