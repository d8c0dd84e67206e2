use std::fmt;
use std::path::Path;

use super::HarnessError;

/// Ordered scan-out responses of one run.
///
/// Text form: a `SCANLOG v1 n=<n> count=<count>` header, then one response
/// per line as `0`/`1` characters with the first bit shifted out leftmost.
/// LF line endings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenLog {
    n: usize,
    responses: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    /// First vector index at which the logs differ.
    Diverge { index: usize },
    /// Different lengths; `first_divergence` is set if the common prefix
    /// already differs.
    LengthMismatch {
        left: usize,
        right: usize,
        first_divergence: Option<usize>,
    },
    ChainLengthMismatch { left: usize, right: usize },
}

impl Comparison {
    pub fn is_equal(&self) -> bool {
        *self == Comparison::Equal
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Comparison::Equal => write!(f, "logs are identical"),
            Comparison::Diverge { index } => write!(f, "logs diverge at vector {index}"),
            Comparison::LengthMismatch {
                left,
                right,
                first_divergence,
            } => {
                write!(f, "log lengths differ ({left} vs {right} responses)")?;
                if let Some(i) = first_divergence {
                    write!(f, "; first divergence at vector {i}")?;
                }
                Ok(())
            }
            Comparison::ChainLengthMismatch { left, right } => {
                write!(f, "chain lengths differ ({left} vs {right})")
            }
        }
    }
}

impl GoldenLog {
    pub fn new(n: usize) -> Self {
        GoldenLog {
            n,
            responses: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self) -> usize {
        self.responses.len()
    }

    pub fn responses(&self) -> &[Vec<bool>] {
        &self.responses
    }

    pub fn push(&mut self, response: Vec<bool>) {
        assert_eq!(response.len(), self.n, "response width must equal chain length");
        self.responses.push(response);
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(32 + self.count() * (self.n + 1));
        s.push_str(&format!("SCANLOG v1 n={} count={}\n", self.n, self.count()));
        for r in &self.responses {
            s.extend(r.iter().map(|&b| if b { '1' } else { '0' }));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let bad = |line: usize, message: String| HarnessError::GoldenFormat { line, message };
        let mut lines = text.split('\n');
        let header = lines.next().unwrap_or("");
        let fields: Vec<&str> = header.split(' ').collect();
        let (n, count) = match fields.as_slice() {
            ["SCANLOG", "v1", n, count] => {
                let num = |f: &str, key: &str| {
                    f.strip_prefix(key)
                        .and_then(|v| v.parse::<usize>().ok())
                        .ok_or_else(|| bad(1, format!("expected `{key}<number>`, found `{f}`")))
                };
                (num(n, "n=")?, num(count, "count=")?)
            }
            _ => return Err(bad(1, format!("bad header `{header}`"))),
        };
        let mut log = GoldenLog::new(n);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            if line.is_empty() {
                continue;
            }
            if line.len() != n {
                return Err(bad(lineno, format!("expected {n} bits, found {}", line.len())));
            }
            let bits = line
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(bad(lineno, format!("unexpected character `{other}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            log.responses.push(bits);
        }
        if log.count() != count {
            return Err(bad(1, format!("header says {count} responses, found {}", log.count())));
        }
        Ok(log)
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_text()).map_err(|e| HarnessError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        GoldenLog::parse(&text)
    }
}

pub fn compare_golden(a: &GoldenLog, b: &GoldenLog) -> Comparison {
    if a.n != b.n {
        return Comparison::ChainLengthMismatch { left: a.n, right: b.n };
    }
    let first = a.responses.iter().zip(&b.responses).position(|(x, y)| x != y);
    if a.count() != b.count() {
        return Comparison::LengthMismatch {
            left: a.count(),
            right: b.count(),
            first_divergence: first,
        };
    }
    match first {
        Some(index) => Comparison::Diverge { index },
        None => Comparison::Equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log() -> GoldenLog {
        let mut g = GoldenLog::new(3);
        g.push(vec![true, false, false]);
        g.push(vec![false, true, true]);
        g
    }

    #[test]
    fn text_format() {
        assert_eq!(log().to_text(), "SCANLOG v1 n=3 count=2\n100\n011\n");
        assert_eq!(GoldenLog::parse(&log().to_text()).unwrap(), log());
    }

    #[test]
    fn empty_log() {
        let g = GoldenLog::new(5);
        assert_eq!(g.to_text(), "SCANLOG v1 n=5 count=0\n");
        assert_eq!(GoldenLog::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(GoldenLog::parse("SCANLOG v2 n=3 count=0\n"), Err(HarnessError::GoldenFormat { line: 1, .. })));
        assert!(matches!(GoldenLog::parse("SCANLOG v1 n=3 count=1\n10\n"), Err(HarnessError::GoldenFormat { line: 2, .. })));
        assert!(matches!(GoldenLog::parse("SCANLOG v1 n=2 count=1\n1x\n"), Err(HarnessError::GoldenFormat { line: 2, .. })));
        assert!(matches!(GoldenLog::parse("SCANLOG v1 n=2 count=2\n10\n"), Err(HarnessError::GoldenFormat { line: 1, .. })));
    }

    #[test]
    fn comparisons() {
        assert_eq!(compare_golden(&log(), &log()), Comparison::Equal);
        let mut flipped = log();
        flipped.responses[1][2] = false;
        assert_eq!(compare_golden(&log(), &flipped), Comparison::Diverge { index: 1 });
        let mut short = log();
        short.responses.pop();
        assert_eq!(
            compare_golden(&log(), &short),
            Comparison::LengthMismatch {
                left: 2,
                right: 1,
                first_divergence: None
            }
        );
        assert_eq!(
            compare_golden(&log(), &GoldenLog::new(4)),
            Comparison::ChainLengthMismatch { left: 3, right: 4 }
        );
    }
}
