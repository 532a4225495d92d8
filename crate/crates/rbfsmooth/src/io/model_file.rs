//! Versioned plain-text model files.
//!
//! ```text
//! rbfsmooth-model
//! version 1
//! kind exact
//! family thinplate
//! s 1.5000000000000000e0
//! a -
//! theta 2
//! d 1
//! rho 1.0000000000000000e-3
//! centers 2
//! -1.0000000000000000e0
//! 1.0000000000000000e0
//! v 2
//! ...
//! beta 2
//! ...
//! ```
//!
//! Reals are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rbfsmooth_core::{FittedModel, KernelFamily, KernelSpec, ModelKind, Points};

use super::{Error, Result};

pub const MODEL_VERSION: u32 = 1;
const MAGIC: &str = "rbfsmooth-model";

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn optional(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), real)
}

pub fn model_to_string(model: &FittedModel) -> String {
    let spec = model.spec();
    let family = spec.family();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "version {MODEL_VERSION}");
    let _ = writeln!(out, "kind {}", model.kind().tag());
    let _ = writeln!(out, "family {}", family.tag());
    let _ = writeln!(out, "s {}", optional(family.exponent()));
    let _ = writeln!(out, "a {}", optional(family.shift_param()));
    let _ = writeln!(out, "theta {}", spec.theta());
    let _ = writeln!(out, "d {}", spec.dim());
    let _ = writeln!(out, "rho {}", real(model.rho()));
    let _ = writeln!(out, "centers {}", model.centers().len());
    for p in model.centers().iter() {
        let row: Vec<String> = p.iter().copied().map(real).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    for (name, values) in [("v", model.v()), ("beta", model.beta())] {
        let _ = writeln!(out, "{name} {}", values.len());
        for &x in values {
            let _ = writeln!(out, "{}", real(x));
        }
    }
    out
}

struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    source: &'a str,
    line: usize,
}

impl<'a> Reader<'a> {
    fn error(&self, message: String) -> Error {
        Error::Parse {
            source_name: self.source.to_string(),
            line: self.line,
            message,
        }
    }

    fn next_line(&mut self) -> Result<&'a str> {
        match self.lines.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.trim())
            }
            None => Err(self.error("unexpected end of model file".into())),
        }
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next_line()?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.trim()),
            _ => Err(self.error(format!("expected field `{key}`, found `{line}`"))),
        }
    }

    fn parse<T: std::str::FromStr>(&self, text: &str, what: &str) -> Result<T> {
        text.parse()
            .map_err(|_| self.error(format!("invalid {what} `{text}`")))
    }

    fn optional(&mut self, key: &str) -> Result<Option<f64>> {
        let v = self.field(key)?;
        if v == "-" {
            Ok(None)
        } else {
            self.parse(v, key).map(Some)
        }
    }

    fn reals(&mut self, key: &str) -> Result<Vec<f64>> {
        let n: usize = {
            let v = self.field(key)?;
            self.parse(v, "count")?
        };
        (0..n)
            .map(|_| {
                let l = self.next_line()?;
                self.parse(l, key)
            })
            .collect()
    }
}

pub fn model_from_str(text: &str, source: &str) -> Result<FittedModel> {
    let mut r = Reader {
        lines: text.lines().enumerate(),
        source,
        line: 0,
    };
    if r.next_line()? != MAGIC {
        return Err(r.error(format!("not a model file (missing `{MAGIC}` header)")));
    }
    let version: u32 = {
        let v = r.field("version")?;
        r.parse(v, "version")?
    };
    if version != MODEL_VERSION {
        return Err(r.error(format!("unsupported model version {version}")));
    }
    let kind = ModelKind::from_tag(r.field("kind")?)?;
    let tag = r.field("family")?;
    let s = r.optional("s")?;
    let a = r.optional("a")?;
    let theta: usize = {
        let v = r.field("theta")?;
        r.parse(v, "theta")?
    };
    let d: usize = {
        let v = r.field("d")?;
        r.parse(v, "d")?
    };
    let rho: f64 = {
        let v = r.field("rho")?;
        r.parse(v, "rho")?
    };
    let n: usize = {
        let v = r.field("centers")?;
        r.parse(v, "center count")?
    };
    let mut coords = Vec::with_capacity(n * d);
    for _ in 0..n {
        let line = r.next_line()?;
        let row = line
            .split_whitespace()
            .map(|v| r.parse::<f64>(v, "center coordinate"))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != d {
            return Err(r.error(format!("center has {} coordinates, expected {d}", row.len())));
        }
        coords.extend(row);
    }
    let v = r.reals("v")?;
    let beta = r.reals("beta")?;
    let spec = KernelSpec::new(KernelFamily::from_parts(tag, s, a)?, theta, d)?;
    Ok(FittedModel::from_parts(spec, Points::new(d, coords)?, v, beta, kind, rho)?)
}

pub fn save_model(path: &Path, model: &FittedModel) -> Result<()> {
    fs::write(path, model_to_string(model)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<FittedModel> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    model_from_str(&text, &path.display().to_string())
}
