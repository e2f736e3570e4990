use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use super::classifier::Classifier;
use super::entity::{check_width, Entity};
use crate::error::{Error, Result};

/// Protocol identifier sent as the first line by an external classifier.
pub const HANDSHAKE_PREFIX: &str = "xscore-clf v1 n=";

pub fn handshake(width: usize) -> String {
    format!("{HANDSHAKE_PREFIX}{width}")
}

struct Channel {
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

impl Channel {
    fn read_line(&mut self) -> Result<String> {
        let mut line = String::new();
        let n = self
            .stdout
            .read_line(&mut line)
            .map_err(|e| Error::Protocol(format!("reading from classifier: {e}")))?;
        if n == 0 {
            return Err(Error::Protocol("classifier closed its output".into()));
        }
        if !line.ends_with('\n') {
            return Err(Error::Protocol(format!("unterminated response `{line}`")));
        }
        line.pop();
        Ok(line)
    }
}

/// A classifier running as a child process, spoken to over its standard
/// streams one entity per line.
///
/// Requests are serialized through a single channel. When the process is
/// declared deterministic, answers are cached by entity.
pub struct ExternalClassifier {
    width: usize,
    channel: Mutex<Channel>,
    cache: Option<Mutex<HashMap<u64, bool>>>,
}

impl ExternalClassifier {
    /// Starts `command` and checks its handshake against `width`.
    pub fn spawn(command: Command, width: usize, deterministic: bool) -> Result<Self> {
        Self::start(command, Some(width), deterministic)
    }

    /// Starts `command` and takes the width from its handshake.
    pub fn spawn_any_width(command: Command, deterministic: bool) -> Result<Self> {
        Self::start(command, None, deterministic)
    }

    fn start(mut command: Command, width: Option<usize>, deterministic: bool) -> Result<Self> {
        let mut child = command
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Protocol(format!("starting classifier: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        let mut channel = Channel {
            child,
            stdin: Some(stdin),
            stdout,
        };
        let hello = channel.read_line()?;
        let announced = hello
            .strip_prefix(HANDSHAKE_PREFIX)
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| (1..=64).contains(&n));
        let width = match (announced, width) {
            (Some(n), None) => n,
            (Some(n), Some(w)) if n == w => w,
            (_, w) => {
                let expected = w.map_or(format!("{HANDSHAKE_PREFIX}<width>"), handshake);
                return Err(Error::Protocol(format!(
                    "handshake `{hello}`, expected `{expected}`"
                )));
            }
        };
        Ok(Self {
            width,
            channel: Mutex::new(channel),
            cache: deterministic.then(|| Mutex::new(HashMap::new())),
        })
    }

    fn ask(&self, e: &Entity) -> Result<bool> {
        let mut ch = self.channel.lock().unwrap_or_else(|p| p.into_inner());
        let stdin = ch
            .stdin
            .as_mut()
            .ok_or_else(|| Error::Protocol("classifier input closed".into()))?;
        writeln!(stdin, "{e}")
            .and_then(|()| stdin.flush())
            .map_err(|err| Error::Protocol(format!("writing to classifier: {err}")))?;
        match ch.read_line()?.as_str() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(Error::Protocol(format!(
                "unexpected response `{other}` for {e}"
            ))),
        }
    }
}

impl Classifier for ExternalClassifier {
    fn width(&self) -> usize {
        self.width
    }

    fn label(&self, e: &Entity) -> Result<bool> {
        check_width(self.width, e)?;
        let Some(cache) = &self.cache else {
            return self.ask(e);
        };
        if let Some(&l) = cache
            .lock()
            .unwrap_or_else(|p| p.into_inner())
            .get(&e.bits())
        {
            return Ok(l);
        }
        let l = self.ask(e)?;
        cache
            .lock()
            .unwrap_or_else(|p| p.into_inner())
            .entry(e.bits())
            .or_insert(l);
        Ok(l)
    }
}

impl Drop for Channel {
    fn drop(&mut self) {
        self.stdin.take();
        // Nothing more will be asked; do not wait on a server that ignores EOF.
        if !matches!(self.child.try_wait(), Ok(Some(_))) {
            let _ = self.child.kill();
        }
        let _ = self.child.wait();
    }
}

/// Runs the server side of the protocol for `c` until `input` ends.
///
/// Malformed requests end the session with an error, which the client sees
/// as a closed channel.
pub fn serve<R: BufRead, W: Write>(c: &dyn Classifier, input: R, mut output: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Protocol(e.to_string());
    writeln!(output, "{}", handshake(c.width())).map_err(io)?;
    output.flush().map_err(io)?;
    for line in input.lines() {
        let line = line.map_err(io)?;
        let e = Entity::parse(line.trim_end_matches('\r'))
            .map_err(|_| Error::Protocol(format!("bad request `{line}`")))?;
        let l = c.label(&e)?;
        writeln!(output, "{}", u8::from(l)).map_err(io)?;
        output.flush().map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::FnClassifier;

    #[test]
    fn serve_answers_each_line() {
        let c = FnClassifier::new(3, |e| e.get(1));
        let mut out = Vec::new();
        serve(&c, "011\n001\n".as_bytes(), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "xscore-clf v1 n=3\n1\n0\n");
    }

    #[test]
    fn serve_rejects_bad_requests() {
        let c = FnClassifier::new(3, |_| true);
        assert!(serve(&c, "0x1\n".as_bytes(), Vec::new()).is_err());
        assert!(serve(&c, "01\n".as_bytes(), Vec::new()).is_err());
    }

    #[cfg(unix)]
    #[test]
    fn shell_classifier_round_trip() {
        let script = "echo 'xscore-clf v1 n=2'; while read l; do \
                      case $l in 1?) echo 1;; *) echo 0;; esac; done";
        let mut cmd = Command::new("sh");
        cmd.args(["-c", script]);
        let c = ExternalClassifier::spawn(cmd, 2, true).unwrap();
        assert!(c.label(&Entity::parse("10").unwrap()).unwrap());
        assert!(!c.label(&Entity::parse("01").unwrap()).unwrap());
        assert!(c.label(&Entity::parse("10").unwrap()).unwrap());
    }

    #[cfg(unix)]
    #[test]
    fn protocol_violations() {
        let mut cmd = Command::new("sh");
        cmd.args(["-c", "echo 'xscore-clf v1 n=3'"]);
        assert!(matches!(
            ExternalClassifier::spawn(cmd, 2, false),
            Err(Error::Protocol(_))
        ));
        let mut cmd = Command::new("sh");
        cmd.args(["-c", "echo 'xscore-clf v1 n=1'; read l; echo maybe"]);
        let c = ExternalClassifier::spawn_any_width(cmd, false).unwrap();
        assert_eq!(c.width(), 1);
        assert!(matches!(
            c.label(&Entity::parse("1").unwrap()),
            Err(Error::Protocol(_))
        ));
    }
}
