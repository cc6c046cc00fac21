//! Compiles and runs a C program against the generated header and static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "fswe.h"

int main(void) {
    double c = 0.0;
    if (fswe_fbm_covariance(1.0, 1.0, 0.3, &c) != FSWE_STATUS_OK || fabs(c - 1.0) > 1e-15) return 1;
    if (fswe_fbm_covariance(1.0, 1.0, 2.0, &c) != FSWE_STATUS_INVALID_ARGUMENT) return 2;
    char msg[128];
    if (fswe_last_error_message(msg, sizeof msg) == 0) return 3;

    FsweConfig *cfg = NULL;
    const char *text = "alpha=0.8\nhurst=0.4\nsigma=0.1\nT=0.2\nsteps=4,8\nmodes=15\n"
                       "trajectories=3\nseed=5\nf=paper\nu0=1:0.25\n";
    if (fswe_config_parse(text, &cfg) != FSWE_STATUS_OK) return 4;
    FsweErrorTable *table = NULL;
    if (fswe_strong_errors(cfg, &table) != FSWE_STATUS_OK) return 5;
    size_t len = 0, steps = 0;
    double e, se, r;
    fswe_table_len(table, &len);
    if (len != 1 || fswe_table_row(table, 0, &steps, &e, &se, &r) != FSWE_STATUS_OK) return 6;
    if (steps != 4 || !(e > 0.0) || !isnan(r)) return 7;
    fswe_table_free(table);
    fswe_config_free(cfg);
    printf("fswe %s ok\n", fswe_version());
    return 0;
}
"#;

/// `cargo test` links the rlib only, so the static library is built here.
fn static_library() -> PathBuf {
    let target = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("staticlib");
    let status = Command::new(env!("CARGO"))
        .args(["build", "--release", "-p", "fswe-ffi", "--lib", "--target-dir"])
        .arg(&target)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .status()
        .expect("cargo runs");
    assert!(status.success(), "building the static library failed");
    target.join("release").join("libfswe_ffi.a")
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/fswe.h")).unwrap();
    for name in [
        "fswe_version",
        "fswe_last_error_message",
        "fswe_fbm_covariance",
        "fswe_config_parse",
        "fswe_config_free",
        "fswe_strong_errors",
        "fswe_table_row",
        "fswe_table_free",
        "fswe_solve_final",
        "typedef struct FsweConfig FsweConfig",
        "FSWE_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = static_library();
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = dir.join("fswe_smoke.c");
    let bin = dir.join("fswe_smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("fswe 0.1.0 ok"));
}
