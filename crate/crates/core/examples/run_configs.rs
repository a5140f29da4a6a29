//! Runs every configuration in `configs/` through the harness, writing
//! traces and reports to a temporary directory.
//!
//!     cargo run --release --example run_configs [OUT_DIR]

use std::path::PathBuf;

use monozero::harness::{run_file, Overrides};

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("monozero-configs"));
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("configs directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    for path in files {
        let overrides = Overrides {
            out: Some(out.clone()),
            ..Overrides::default()
        };
        println!("== {}", path.file_name().unwrap().to_string_lossy());
        let outcome = run_file(Some(&path), &overrides);
        print!("{}", outcome.summary);
        println!();
    }
}
