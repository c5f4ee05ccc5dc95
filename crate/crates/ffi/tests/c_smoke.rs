//! Compiles a small C program against the generated header and static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "qhmetric.h"

int main(void) {
    QhMatrix *h = NULL, *theta = NULL;
    QhChain *chain = NULL;
    bool pass = false;
    double worst = -1.0;
    if (qh_toy_2x2(2.0, &h) != QH_STATUS_OK) return 10;
    if (qh_default_metric(h, &theta) != QH_STATUS_OK) return 11;
    if (qh_chain_build(h, theta, NULL, 0, &chain) != QH_STATUS_OK) return 12;
    if (qh_chain_verify(chain, 1e-9, &pass, &worst, NULL) != QH_STATUS_OK) return 13;
    if (qh_toy_2x2(0.0, NULL) != QH_STATUS_NULL_POINTER) return 14;
    printf("pass=%d worst=%g\n", pass, worst);
    qh_chain_free(chain);
    qh_matrix_free(theta);
    qh_matrix_free(h);
    return pass ? 0 : 1;
}
"#;

fn static_lib() -> Option<PathBuf> {
    // the test binary and the freshly built archive share target/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.join("libqhmetric_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = static_lib() else {
        eprintln!("skipping: static library not found next to the test binary");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I", include])
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "exit {:?}: {stdout}", out.status);
    assert!(stdout.starts_with("pass=1"), "{stdout}");
}
