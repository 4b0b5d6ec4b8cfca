//! Flat INI-style problem descriptions.
//!
//! ```text
//! [curve]
//! x = "cos(t)"
//! y = "sin(t)"
//! [domain]
//! u = -pi:pi
//! v = -1:1
//! nu = 101
//! nv = 101
//! ```
//!
//! Expressions are double-quoted; numbers may be constant expressions such as
//! `pi/2`. `#` and `;` start comments outside quotes.

use std::collections::BTreeMap;
use std::fmt;

use bjorling_core::parse_expr;

#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "spec file: {}", self.message)
        } else {
            write!(f, "spec file line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for SpecError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Quoted(Vec<String>),
    Bare(String),
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: Value,
}

type Section = BTreeMap<String, Entry>;

const SECTIONS: [(&str, &[&str]); 6] = [
    ("curve", &["x", "y", "z", "phi", "side"]),
    ("normal", &["x", "y", "z"]),
    ("domain", &["u", "v", "nu", "nv", "base"]),
    ("checks", &["tests", "tol", "quad_tol", "registration_tol"]),
    (
        "search",
        &[
            "x_fixed", "y_fixed", "x_basis", "y_basis", "bounds", "start", "budget", "restarts", "seed", "step", "tol",
        ],
    ),
    ("output", &["mesh", "format", "report"]),
];

fn split_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => quoted = !quoted,
            '#' | ';' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_value(raw: &str, line: usize) -> Result<Value, SpecError> {
    let raw = raw.trim();
    if !raw.starts_with('"') {
        if raw.contains('"') {
            return err(line, "stray quote in unquoted value");
        }
        return Ok(Value::Bare(raw.to_string()));
    }
    let mut items = Vec::new();
    let mut rest = raw;
    loop {
        let Some(body) = rest.strip_prefix('"') else {
            return err(line, "expected a quoted string");
        };
        let Some(end) = body.find('"') else {
            return err(line, "unterminated quote");
        };
        items.push(body[..end].to_string());
        rest = body[end + 1..].trim_start();
        if rest.is_empty() {
            return Ok(Value::Quoted(items));
        }
        let Some(next) = rest.strip_prefix(',') else {
            return err(line, "quoted strings must be separated by commas");
        };
        rest = next.trim_start();
    }
}

fn parse_sections(text: &str) -> Result<BTreeMap<String, (usize, Section)>, SpecError> {
    let mut sections: BTreeMap<String, (usize, Section)> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = split_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return err(line, "section header is missing `]`");
            };
            let name = name.trim().to_ascii_lowercase();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                return err(line, format!("unknown section [{name}]"));
            }
            if sections.contains_key(&name) {
                return err(line, format!("section [{name}] appears twice"));
            }
            sections.insert(name.clone(), (line, Section::new()));
            current = Some(name);
            continue;
        }
        let Some(section) = current.as_ref() else {
            return err(line, "key outside of any section");
        };
        let Some((key, value)) = body.split_once('=') else {
            return err(line, "expected `key = value`");
        };
        let key = key.trim().to_ascii_lowercase();
        let allowed = SECTIONS.iter().find(|(s, _)| s == section).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key.as_str()) {
            return err(line, format!("unknown key `{key}` in [{section}]"));
        }
        let value = parse_value(value, line)?;
        let entries = &mut sections.get_mut(section).expect("section inserted").1;
        if entries.contains_key(&key) {
            return err(line, format!("key `{key}` set twice in [{section}]"));
        }
        entries.insert(key, Entry { line, value });
    }
    Ok(sections)
}

/// Evaluates a constant expression such as `-pi/2` or `1e-8`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    if let Ok(v) = s.trim().parse::<f64>() {
        return Ok(v);
    }
    let e = parse_expr(s).map_err(|e| format!("bad number `{s}`: {e}"))?;
    let v = e.eval_real(0.0).map_err(|e| format!("bad number `{s}`: {e}"))?;
    let shifted = e.eval_real(1.0).map_err(|e| format!("bad number `{s}`: {e}"))?;
    if v != shifted {
        return Err(format!("`{s}` depends on t; a constant is required"));
    }
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

/// `a:b` with `a < b`.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let Some((a, b)) = s.split_once(':') else {
        return Err(format!("expected `min:max`, got `{s}`"));
    };
    let (a, b) = (parse_number(a)?, parse_number(b)?);
    if a >= b {
        return Err(format!("range `{s}` needs min < max"));
    }
    Ok((a, b))
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_number).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSection {
    pub x: String,
    pub y: String,
    pub z: String,
    pub phi: Option<f64>,
    /// `away` (default) or `toward` the curvature of a planar curve.
    pub side: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSection {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub nu: usize,
    pub nv: usize,
    pub base: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChecksSection {
    pub tests: Vec<String>,
    pub tol: Option<f64>,
    pub quad_tol: Option<f64>,
    pub registration_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSection {
    pub x_fixed: String,
    pub y_fixed: String,
    pub x_basis: Vec<String>,
    pub y_basis: Vec<String>,
    /// One range for every coefficient, or one per coefficient.
    pub bounds: Vec<(f64, f64)>,
    pub start: Option<Vec<f64>>,
    pub budget: Option<usize>,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub step: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSection {
    pub mesh: Option<String>,
    pub format: Option<String>,
    pub report: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub curve: Option<CurveSection>,
    pub normal: Option<[String; 3]>,
    pub domain: DomainSection,
    pub checks: ChecksSection,
    pub search: Option<SearchSection>,
    pub output: OutputSection,
}

struct Reader<'a> {
    name: &'a str,
    header: usize,
    section: &'a Section,
}

impl Reader<'_> {
    fn entry(&self, key: &str) -> Option<&Entry> {
        self.section.get(key)
    }

    fn line(&self, key: &str) -> usize {
        self.entry(key).map_or(self.header, |e| e.line)
    }

    fn expr(&self, key: &str) -> Result<Option<String>, SpecError> {
        match self.entry(key) {
            None => Ok(None),
            Some(Entry {
                value: Value::Quoted(v),
                line,
            }) => {
                if v.len() != 1 {
                    return err(*line, format!("`{key}` takes a single quoted expression"));
                }
                parse_expr(&v[0]).map_err(|e| SpecError {
                    line: *line,
                    message: format!("`{key}`: {e}"),
                })?;
                Ok(Some(v[0].clone()))
            }
            Some(e) => err(e.line, format!("`{key}` must be a double-quoted expression")),
        }
    }

    fn exprs(&self, key: &str) -> Result<Vec<String>, SpecError> {
        match self.entry(key) {
            None => Ok(Vec::new()),
            Some(Entry {
                value: Value::Quoted(v),
                line,
            }) => {
                for s in v {
                    parse_expr(s).map_err(|e| SpecError {
                        line: *line,
                        message: format!("`{key}`: {e}"),
                    })?;
                }
                Ok(v.clone())
            }
            Some(e) => err(e.line, format!("`{key}` must be a list of double-quoted expressions")),
        }
    }

    fn text(&self, key: &str) -> Option<String> {
        self.entry(key).map(|e| match &e.value {
            Value::Bare(s) => s.clone(),
            Value::Quoted(v) => v.join(","),
        })
    }

    fn with<T>(&self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, SpecError> {
        match self.text(key) {
            None => Ok(None),
            Some(s) => f(&s).map(Some).map_err(|message| SpecError {
                line: self.line(key),
                message: format!("`{key}`: {message}"),
            }),
        }
    }

    fn required<T>(&self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<T, SpecError> {
        self.with(key, f)?.map_or_else(
            || err(self.header, format!("[{}] is missing `{key}`", self.name)),
            Ok,
        )
    }
}

fn parse_count(s: &str) -> Result<usize, String> {
    s.trim().parse::<usize>().map_err(|_| format!("expected a non-negative integer, got `{s}`"))
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let sections = parse_sections(text)?;
        let empty = Section::new();
        let reader = |name: &'static str| {
            sections.get(name).map(|(header, section)| Reader {
                name,
                header: *header,
                section,
            })
        };
        let blank = Reader {
            name: "",
            header: 0,
            section: &empty,
        };

        let curve = match reader("curve") {
            None => None,
            Some(r) => Some(CurveSection {
                x: r.expr("x")?.map_or_else(|| err(r.header, "[curve] is missing `x`"), Ok)?,
                y: r.expr("y")?.map_or_else(|| err(r.header, "[curve] is missing `y`"), Ok)?,
                z: r.expr("z")?.unwrap_or_else(|| "0".into()),
                phi: r.with("phi", parse_number)?,
                side: r.with("side", |s| match s {
                    "away" | "toward" => Ok(s.to_string()),
                    _ => Err("expected `away` or `toward`".into()),
                })?,
            }),
        };
        let normal = match reader("normal") {
            None => None,
            Some(r) => {
                let get = |k: &str| r.expr(k)?.map_or_else(|| err(r.header, format!("[normal] is missing `{k}`")), Ok);
                Some([get("x")?, get("y")?, get("z")?])
            }
        };
        if normal.is_some() && curve.is_none() {
            return err(0, "[normal] needs a [curve] section");
        }
        let Some(d) = reader("domain") else {
            return err(0, "missing required section [domain]");
        };
        let domain = DomainSection {
            u: d.required("u", parse_range)?,
            v: d.required("v", parse_range)?,
            nu: d.required("nu", parse_count)?,
            nv: d.required("nv", parse_count)?,
            base: d
                .with("base", |s| {
                    let parts = parse_list(s)?;
                    match parts[..] {
                        [re] => Ok((re, 0.0)),
                        [re, im] => Ok((re, im)),
                        _ => Err("expected `re` or `re, im`".into()),
                    }
                })?
                .unwrap_or((0.0, 0.0)),
        };
        if domain.nu < 2 || domain.nv < 2 {
            return err(d.header, "nu and nv must be at least 2");
        }

        let c = reader("checks").unwrap_or(blank);
        let checks = ChecksSection {
            tests: c
                .text("tests")
                .map(|s| s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect())
                .unwrap_or_default(),
            tol: c.with("tol", parse_number)?,
            quad_tol: c.with("quad_tol", parse_number)?,
            registration_tol: c.with("registration_tol", parse_number)?,
        };

        let search = match reader("search") {
            None => None,
            Some(r) => {
                let x_basis = r.exprs("x_basis")?;
                let y_basis = r.exprs("y_basis")?;
                let bounds = r
                    .with("bounds", |s| s.split(',').map(parse_range).collect::<Result<Vec<_>, _>>())?
                    .unwrap_or_else(|| vec![(-2.0, 2.0)]);
                let n = x_basis.len() + y_basis.len();
                let bounds = match bounds.len() {
                    1 => vec![bounds[0]; n],
                    k if k == n => bounds,
                    k => return err(r.line("bounds"), format!("{k} bounds for {n} coefficients")),
                };
                Some(SearchSection {
                    x_fixed: r.expr("x_fixed")?.unwrap_or_else(|| "0".into()),
                    y_fixed: r.expr("y_fixed")?.unwrap_or_else(|| "0".into()),
                    x_basis,
                    y_basis,
                    bounds,
                    start: r.with("start", parse_list)?,
                    budget: r.with("budget", parse_count)?,
                    restarts: r.with("restarts", parse_count)?,
                    seed: r.with("seed", |s| s.trim().parse::<u64>().map_err(|_| format!("bad seed `{s}`")))?,
                    step: r.with("step", parse_number)?,
                    tol: r.with("tol", parse_number)?,
                })
            }
        };

        let o = reader("output").unwrap_or(Reader {
            name: "output",
            header: 0,
            section: &empty,
        });
        let output = OutputSection {
            mesh: o.text("mesh"),
            format: o.with("format", |s| match s {
                "obj" | "ply" => Ok(s.to_string()),
                _ => Err("expected `obj` or `ply`".into()),
            })?,
            report: o.text("report"),
        };

        Ok(SpecFile {
            curve,
            normal,
            domain,
            checks,
            search,
            output,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = r#"
# circle strip
[curve]
x = "cos(t)"   ; inline comment
y = "sin(t)"
phi = pi/2

[domain]
u = -pi:pi
v = -1:1
nu = 21
nv = 11
base = 0.5, 0

[checks]
tests = isotropy, boundary_curve
tol = 1e-9

[output]
mesh = "out/circle.obj"
"#;

    #[test]
    fn parses_a_full_file() {
        let s = SpecFile::parse(CIRCLE).unwrap();
        let c = s.curve.unwrap();
        assert_eq!((c.x.as_str(), c.y.as_str(), c.z.as_str()), ("cos(t)", "sin(t)", "0"));
        assert_eq!(c.phi, Some(std::f64::consts::FRAC_PI_2));
        assert_eq!(s.domain.u, (-std::f64::consts::PI, std::f64::consts::PI));
        assert_eq!((s.domain.nu, s.domain.nv, s.domain.base), (21, 11, (0.5, 0.0)));
        assert_eq!(s.checks.tests, vec!["isotropy", "boundary_curve"]);
        assert_eq!(s.checks.tol, Some(1e-9));
        assert_eq!(s.output.mesh.as_deref(), Some("out/circle.obj"));
        assert!(s.normal.is_none() && s.search.is_none());
    }

    #[test]
    fn reports_the_offending_line() {
        let cases = [
            ("[curve]\nx = cos(t)\n", 2, "double-quoted"),
            ("[curve]\nx = \"cos(t\"\n", 2, "x"),
            ("[domain]\nu = 1:0\n", 2, "min < max"),
            ("[shape]\n", 1, "unknown section"),
            ("x = \"t\"\n", 1, "outside"),
            ("[domain]\nu = 0:1\nu = 0:2\n", 3, "twice"),
            ("[domain]\ncolour = red\n", 2, "unknown key"),
            ("[curve]\nx = \"t\"\ny = \"0\"\n", 0, "[domain]"),
            ("[domain]\nu=0:1\nv=0:1\nnu=1\nnv=5\n", 1, "at least 2"),
            ("[domain]\nu=0:1\nv=0:1\nnv=5\n", 1, "missing `nu`"),
            ("[domain]\nu = 0:t\n", 2, "depends on t"),
        ];
        for (text, line, needle) in cases {
            let e = SpecFile::parse(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?}: {e}");
            assert!(e.to_string().contains(needle), "{text:?}: {e}");
        }
    }

    #[test]
    fn search_block() {
        let text = r#"
[domain]
u = -0.7:0.7
v = -0.7:0.7
nu = 11
nv = 11
[search]
x_basis = "t^2", "t^4"
y_basis = "t", "t^3"
bounds = -2:2
start = 1.1, 0.05, -0.9, 1/3
budget = 2000
seed = 7
"#;
        let s = SpecFile::parse(text).unwrap().search.unwrap();
        assert_eq!(s.x_basis, vec!["t^2", "t^4"]);
        assert_eq!(s.bounds, vec![(-2.0, 2.0); 4]);
        assert_eq!(s.start.unwrap()[3], 1.0 / 3.0);
        assert_eq!((s.budget, s.seed), (Some(2000), Some(7)));
        let bad = text.replace("bounds = -2:2", "bounds = -2:2, -1:1");
        assert!(SpecFile::parse(&bad).unwrap_err().message.contains("2 bounds for 4"));
    }

    #[test]
    fn comment_characters_inside_quotes_survive() {
        let s = parse_value(r#""a;b", "c#d""#, 1).unwrap();
        assert_eq!(s, Value::Quoted(vec!["a;b".into(), "c#d".into()]));
        assert_eq!(split_comment(r#"x = "t;" ; note"#), r#"x = "t;" "#);
    }
}
