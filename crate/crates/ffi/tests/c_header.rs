//! Compiles and runs a C program against the generated header and the shared library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "quatsurf.h"

int main(void) {
    const char *cfg = "{\"surface\": {\"type\": \"cylinder\", \"grid\": "
                      "{\"x_min\": -0.5, \"x_max\": 0.5, \"nx\": 8, \"ny\": 8}}}";
    QsScene *scene = NULL;
    if (qs_scene_from_json(cfg, &scene) != QS_STATUS_OK) return 1;
    QsMesh *mesh = NULL;
    if (qs_scene_surface_mesh(scene, &mesh) != QS_STATUS_OK) return 2;
    size_t n = qs_mesh_vertex_count(mesh);
    double xyz[3 * 64];
    if (n != 64 || qs_mesh_vertices(mesh, xyz, 3 * n) != QS_STATUS_OK) return 3;
    qs_mesh_free(mesh);
    qs_scene_free(scene);
    if (qs_scene_from_json("{", &scene) != QS_STATUS_CONFIG_INVALID || scene != NULL) return 4;
    if (strstr(qs_last_error_message(), "ConfigInvalid") == NULL) return 5;
    double rho[2];
    if (qs_mu_to_rho(-1.0, 0.0, rho) != QS_STATUS_OK || rho[0] != 1.0) return 6;
    printf("ok %s\n", qs_version());
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler ({cc}); skipping");
        return;
    }
    let lib_dir = target_dir();
    let lib = lib_dir.join(if cfg!(target_os = "macos") { "libquatsurf_ffi.dylib" } else { "libquatsurf_ffi.so" });
    assert!(lib.exists(), "shared library missing at {}", lib.display());
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("smoke.c");
    let bin = work.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lquatsurf_ffi")
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}

