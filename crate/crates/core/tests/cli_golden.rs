mod common;

use common::{check_case, CASES};

fn run(name: &str) {
    let case = CASES
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no case {name}"));
    let problems = check_case(case);
    assert!(problems.is_empty(), "{name}: {}", problems.join("; "));
}

macro_rules! golden {
    ($($name:ident),* $(,)?) => {
        $( #[test] fn $name() { run(stringify!($name)); } )*

        #[test]
        fn every_case_has_a_test() {
            let listed = [$(stringify!($name)),*];
            for c in CASES {
                assert!(listed.contains(&c.name), "case {} has no test", c.name);
            }
        }
    };
}

golden!(
    model_42mm,
    model_42mm_s2p,
    model_zero_length,
    model_missing_length,
    extract_42mm,
    extract_zero_length,
    extract_corrupted,
    extract_noisy,
    predict_36mm,
    predict_noisy,
    predict_noisy_tight_tol,
    predict_out_of_range,
    synth_vacuum,
    synth_matched,
    synth_const_alpha,
    check_compliant,
    check_65ohm,
    check_empty_band,
    convert_ri_to_db,
    convert_db_to_ri,
    convert_identity,
    convert_malformed,
);

#[test]
fn identity_conversion_reproduces_input() {
    let dir = common::workdir();
    let r = common::run_in(dir.path(), &["convert", "small_ri.s2p", "same.s2p", "--to", "ri", "--unit", "ghz"]);
    assert_eq!(r.code, 0);
    let a = std::fs::read(dir.path().join("small_ri.s2p")).unwrap();
    let b = std::fs::read(dir.path().join("same.s2p")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn no_arguments_is_usage_error() {
    let dir = common::workdir();
    assert_eq!(common::run_in(dir.path(), &[]).code, 2);
    assert_eq!(common::run_in(dir.path(), &["frobnicate"]).code, 2);
}
