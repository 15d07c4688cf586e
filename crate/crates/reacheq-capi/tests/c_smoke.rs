//! Compiles `examples/smoke.c` against the generated header and the static
//! library, runs it, and checks it exits cleanly. Skipped when no C
//! compiler is on PATH.

use std::env;
use std::path::PathBuf;
use std::process::Command;

fn static_lib() -> Option<PathBuf> {
    // Integration tests run after the library is built; the staticlib sits
    // next to this test binary (deps/) or one level up (target/debug/).
    let mut dir = env::current_exe().ok()?;
    dir.pop(); // test binary name
    for candidate in [dir.join("libreacheq_capi.a"), dir.join("../libreacheq_capi.a")] {
        if candidate.exists() {
            return Some(candidate);
        }
    }
    None
}

#[test]
fn c_program_runs_against_the_header() {
    let cc = env::var("CC").unwrap_or_else(|_| "cc".to_string());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler ({cc}) available");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = static_lib().expect("staticlib built alongside tests");
    let out_dir = env::temp_dir().join(format!("reacheq-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&out_dir).unwrap();
    let exe = out_dir.join("smoke");

    let compile = Command::new(&cc)
        .arg(manifest.join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .arg("-lpthread")
        .arg("-ldl")
        .arg("-lm")
        .arg("-o")
        .arg(&exe)
        .output()
        .expect("compiler invocation");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&exe).output().expect("smoke binary runs");
    assert!(
        run.status.success(),
        "smoke binary failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&run.stdout),
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("c smoke ok"));
    let _ = std::fs::remove_dir_all(&out_dir);
}
