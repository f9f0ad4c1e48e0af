use std::io::{Read, Write};
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::Duration;

use regex::Regex;
use wait_timeout::ChildExt;

use crate::Fail;

const TRUE_PATTERN: &str = r"(?mi)^\s*(true|sat)\s*$";
const FALSE_PATTERN: &str = r"(?mi)^\s*(false|unsat)\s*$";

#[derive(Debug, Default)]
pub struct Config {
    pub name: Option<String>,
    pub args: Vec<String>,
    pub true_pattern: Option<String>,
    pub false_pattern: Option<String>,
}

impl Config {
    /// Reads `key = value` lines; `#` starts a comment line.
    pub fn load(path: &Path) -> Result<Config, Fail> {
        let text = std::fs::read_to_string(path).map_err(|e| Fail(8, format!("{}: {e}", path.display())))?;
        Config::parse(&text).map_err(|m| Fail(2, format!("{}: {m}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Config, String> {
        let mut c = Config::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
            let v = v.trim().to_string();
            match k.trim() {
                "backend.name" => c.name = Some(v),
                "backend.args" => c.args = v.split_whitespace().map(String::from).collect(),
                "backend.true_pattern" => c.true_pattern = Some(v),
                "backend.false_pattern" => c.false_pattern = Some(v),
                k => return Err(format!("line {}: unknown key `{k}`", n + 1)),
            }
        }
        Ok(c)
    }
}

fn pattern(p: &Option<String>, default: &str) -> Result<Regex, Fail> {
    let p = p.as_deref().unwrap_or(default);
    Regex::new(p).map_err(|e| Fail(2, format!("bad reply pattern `{p}`: {e}")))
}

/// Pipes `script` to the backend and maps its reply to a truth value.
pub fn run(cfg: &Config, script: &str, timeout: Duration) -> Result<bool, Fail> {
    let name = cfg.name.as_deref().ok_or_else(|| Fail(2, "no backend given (--backend or backend.name)".into()))?;
    let yes = pattern(&cfg.true_pattern, TRUE_PATTERN)?;
    let no = pattern(&cfg.false_pattern, FALSE_PATTERN)?;

    let mut child = Command::new(name)
        .args(&cfg.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Fail(4, format!("cannot start backend `{name}`: {e}")))?;

    let mut stdin = child.stdin.take().expect("piped stdin");
    let script = script.to_string();
    // a backend may exit without reading everything; a broken pipe is fine
    let writer = std::thread::spawn(move || {
        let _ = stdin.write_all(script.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });

    let status = child.wait_timeout(timeout).map_err(|e| Fail(4, format!("waiting for backend: {e}")))?;
    if status.is_none() {
        let _ = child.kill();
        let _ = child.wait();
        return Err(Fail(5, format!("backend timed out after {} s", timeout.as_secs())));
    }
    let _ = writer.join();
    let reply = reader.join().unwrap_or_default();
    let reply = reply.trim();

    match (yes.is_match(reply), no.is_match(reply)) {
        (true, false) => Ok(true),
        (false, true) => Ok(false),
        _ => Err(Fail(6, format!("unrecognized backend reply ({} bytes)", reply.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_keys() {
        let c = Config::parse("# qe\nbackend.name = qepcad\nbackend.args = +N8000000 -noecho\nbackend.true_pattern=^TRUE$\n").unwrap();
        assert_eq!(c.name.as_deref(), Some("qepcad"));
        assert_eq!(c.args, ["+N8000000", "-noecho"]);
        assert_eq!(c.true_pattern.as_deref(), Some("^TRUE$"));
        assert!(c.false_pattern.is_none());
        assert!(Config::parse("backend.nmae = x").is_err());
        assert!(Config::parse("just text").is_err());
    }

    #[test]
    fn default_patterns() {
        let (y, n) = (Regex::new(TRUE_PATTERN).unwrap(), Regex::new(FALSE_PATTERN).unwrap());
        assert!(y.is_match("sat\n") && !n.is_match("sat\n"));
        assert!(n.is_match("unsat\n") && !y.is_match("unsat\n"));
        assert!(y.is_match("An equivalent quantifier-free formula:\n\nTRUE\n"));
        assert!(!y.is_match("unknown\n") && !n.is_match("unknown\n"));
    }
}
