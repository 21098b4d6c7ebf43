//! Bridge to external MaxSAT solver processes (std only): the instance is
//! written to a temporary WCNF file, the user command is run on it through
//! the shell, and stdout is parsed. Exit codes are ignored in favor of the
//! status lines.

use alloc::format;
use alloc::string::{String, ToString};

use std::io::Read;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use super::{parse_external_result, SolveError, SolveResult, WcnfDialect};
use crate::proplogic::WcnfInstance;

static NEXT_FILE_ID: AtomicU64 = AtomicU64::new(0);

pub(super) fn solve_external(
    inst: &WcnfInstance,
    command: &str,
    dialect: WcnfDialect,
    time_limit_secs: Option<u64>,
) -> Result<SolveResult, SolveError> {
    let id = NEXT_FILE_ID.fetch_add(1, Ordering::Relaxed);
    let path = std::env::temp_dir().join(format!(
        "rulesat-{}-{}.wcnf",
        std::process::id(),
        id
    ));
    let text = super::emit_wcnf(inst, dialect);
    std::fs::write(&path, text)
        .map_err(|e| SolveError::ExternalLaunch(format!("writing {}: {e}", path.display())))?;

    let path_str = path.display().to_string();
    let cmdline = if command.contains("{instance}") {
        command.replace("{instance}", &path_str)
    } else {
        format!("{command} {path_str}")
    };
    let result = run_with_limit(&cmdline, time_limit_secs);
    let _ = std::fs::remove_file(&path);
    let stdout = result?;
    parse_external_result(&stdout, inst)
}

fn run_with_limit(cmdline: &str, time_limit_secs: Option<u64>) -> Result<String, SolveError> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(cmdline)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| SolveError::ExternalLaunch(e.to_string()))?;

    // Drain stdout on a separate thread so a chatty solver cannot deadlock
    // on a full pipe while we wait for it.
    let mut stdout_pipe = child.stdout.take().expect("stdout was piped");
    let reader = std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = stdout_pipe.read_to_string(&mut buf);
        buf
    });

    let deadline = time_limit_secs.map(|s| Instant::now() + Duration::from_secs(s));
    loop {
        match child.try_wait() {
            Ok(Some(_status)) => break,
            Ok(None) => {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        let _ = child.kill();
                        let _ = child.wait();
                        let _ = reader.join();
                        return Err(SolveError::ExternalTimeout(
                            time_limit_secs.unwrap_or_default(),
                        ));
                    }
                }
                std::thread::sleep(Duration::from_millis(5));
            }
            Err(e) => {
                let _ = child.kill();
                return Err(SolveError::ExternalLaunch(e.to_string()));
            }
        }
    }
    reader
        .join()
        .map_err(|_| SolveError::ExternalLaunch("stdout reader panicked".to_string()))
}
