//! Library side of the `asplund` command: experiment manifests, the suite
//! runner and file transforms. Exit codes: 0 success, 1 a violated
//! inequality, 2 bad input.

pub mod config;
pub mod run;

use std::path::{Path, PathBuf};

use asplund::{format, project, schwarz_fn, steiner_fn, sup_convolution, GridFn, Lambda, PParam};

pub use config::{Config, Suite};
pub use run::{verify, RunError, Summary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Caps the rayon pool at `ASPLUND_THREADS` workers (unset or 0 means one per core).
pub fn init_threads() {
    let n = std::env::var("ASPLUND_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    // a second initialisation in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

/// Runs `asplund verify <config>` and returns the exit code.
pub fn cmd_verify(path: &Path) -> i32 {
    let config = match Config::read(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_INPUT;
        }
    };
    match verify(&config) {
        Ok(s) if s.violations > 0 => {
            eprintln!("{} of {} checks violated", s.violations, s.rows);
            EXIT_VIOLATION
        }
        Ok(_) => EXIT_OK,
        Err(RunError::Config(e)) => {
            eprintln!("config error: {e}");
            EXIT_INPUT
        }
        Err(RunError::Io(e)) => {
            eprintln!("io error: {e}");
            EXIT_INPUT
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Transform {
    Project { axis: usize },
    Steiner { axis: usize },
    Schwarz { axis: usize },
    Supconv { lambda: Lambda, p: PParam },
}

fn apply(t: &Transform, inputs: &[PathBuf]) -> asplund::Result<GridFn> {
    let want = if matches!(t, Transform::Supconv { .. }) { 2 } else { 1 };
    if inputs.len() != want {
        return Err(asplund::Error::Parse(format!(
            "expected {want} input file(s), got {}",
            inputs.len()
        )));
    }
    let f = format::read_file(&inputs[0])?;
    match *t {
        Transform::Project { axis } => project(&f, axis),
        Transform::Steiner { axis } => steiner_fn(&f, axis),
        Transform::Schwarz { axis } => schwarz_fn(&f, axis),
        Transform::Supconv { lambda, p } => sup_convolution(&f, &format::read_file(&inputs[1])?, lambda, p),
    }
}

/// Runs `asplund transform`; the result goes to `out`, or standard output.
pub fn cmd_transform(t: &Transform, inputs: &[PathBuf], out: Option<&Path>) -> i32 {
    let written = apply(t, inputs).and_then(|r| match out {
        Some(path) => format::write_file(&r, path),
        None => format::write(&r, std::io::stdout().lock()),
    });
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
