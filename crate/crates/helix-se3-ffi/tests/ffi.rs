use helix_se3_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

const NEUTRAL: &str = "\
[bouquet]
node = 0 0 0 0 1 0
[dispersion]
k_points = 8
";

const TWIST: &str = "\
[bouquet]
node = 0 1 0 0.17 1 2.9e-4
node = 0 -1 0 -0.17 1 2.9e-4
[environment]
ionic_strength = 0.01
[dispersion]
k_points = 16
";

fn parse(text: &str) -> (HsStatus, *mut HsConfig) {
    let c = CString::new(text).unwrap();
    let mut cfg = ptr::null_mut();
    let s = unsafe { hs_config_parse(c.as_ptr(), &mut cfg) };
    (s, cfg)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(hs_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn neutral_dispersion_through_handles() {
    let (s, cfg) = parse(NEUTRAL);
    assert_eq!(s, HsStatus::Ok);
    let mut table = ptr::null_mut();
    assert_eq!(unsafe { hs_run(cfg, HsCommand::Dispersion, &mut table) }, HsStatus::Ok);
    unsafe {
        assert_eq!(hs_table_rows(table), 8);
        assert_eq!(hs_table_columns(table), 9);
        for r in 0..8 {
            let (mut k, mut l) = (0.0, 0.0);
            assert_eq!(hs_table_value(table, r, 0, &mut k), HsStatus::Ok);
            assert_eq!(hs_table_value(table, r, 1, &mut l), HsStatus::Ok);
            let expect = 4.0 * (k / 2.0).sin().powi(2);
            assert!((l - expect).abs() < 1e-12, "k = {k}: {l} vs {expect}");
        }
        let mut x = 0.0;
        assert_eq!(hs_table_value(table, 8, 0, &mut x), HsStatus::OutOfRange);
        let csv = CStr::from_ptr(hs_table_csv(table)).to_str().unwrap();
        assert!(csv.contains("\nk,lambda_1,"));
        hs_table_free(table);

        let mut lambdas = [0.0; 6];
        assert_eq!(hs_dispersion_at(cfg, std::f64::consts::PI, lambdas.as_mut_ptr()), HsStatus::Ok);
        assert!(lambdas.iter().all(|&l| (l - 4.0).abs() < 1e-12));
        hs_config_free(cfg);
    }
}

#[test]
fn twist_check_passes_through_the_abi() {
    let (s, cfg) = parse(TWIST);
    assert_eq!(s, HsStatus::Ok);
    let mut table = ptr::null_mut();
    assert_eq!(unsafe { hs_run(cfg, HsCommand::TwistCheck, &mut table) }, HsStatus::Ok, "{}", last_error());
    unsafe {
        assert_eq!(hs_table_rows(table), 16);
        for r in 0..16 {
            let mut dev = 1.0;
            assert_eq!(hs_table_value(table, r, 3, &mut dev), HsStatus::Ok);
            assert!(dev < 1e-9);
        }
        hs_table_free(table);
        hs_config_free(cfg);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let (s, cfg) = parse("[bouquet]\nnode = 0 0 0\n");
    assert_eq!(s, HsStatus::ConfigError);
    assert!(cfg.is_null());
    assert!(last_error().contains("node"), "{}", last_error());

    let (s, _) = parse("[nonsense]\n");
    assert_eq!(s, HsStatus::ConfigError);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hs_config_parse(ptr::null(), &mut out) }, HsStatus::NullArgument);
    assert!(last_error().contains("text"));

    let bad = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { hs_config_parse(bad.as_ptr().cast(), &mut out) }, HsStatus::InvalidUtf8);

    let mut table = ptr::null_mut();
    assert_eq!(unsafe { hs_run(ptr::null(), HsCommand::Landscape, &mut table) }, HsStatus::NullArgument);
    assert!(table.is_null());

    let mut x = 0.0;
    assert_eq!(unsafe { hs_debye_length(-1.0, 80.0, 298.15, &mut x) }, HsStatus::ConfigError);
    assert_eq!(unsafe { hs_debye_length(0.001, 80.0, 298.15, &mut x) }, HsStatus::Ok);
    assert!((x - 97.11).abs() < 0.01, "{x}");

    unsafe {
        hs_config_free(ptr::null_mut());
        hs_table_free(ptr::null_mut());
        assert!(hs_table_csv(ptr::null()).is_null());
        assert_eq!(hs_table_rows(ptr::null()), 0);
    }
}

#[test]
fn generated_header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/helix_se3.h")).unwrap();
    for decl in [
        "typedef struct HsConfig HsConfig;",
        "typedef struct HsTable HsTable;",
        "HS_STATUS_OK = 0,",
        "HS_STATUS_ORACLE_FAILURE = 4,",
        "HS_COMMAND_TWO_HELIX = 5,",
        "enum HsStatus hs_config_parse(const char *text, struct HsConfig **out);",
        "enum HsStatus hs_run(const struct HsConfig *cfg, enum HsCommand command, struct HsTable **out);",
        "const char *hs_table_csv(const struct HsTable *table);",
        "enum HsStatus hs_table_value(const struct HsTable *table,",
        "const char *hs_last_error(void);",
    ] {
        assert!(header.contains(decl), "missing `{decl}`");
    }
}
