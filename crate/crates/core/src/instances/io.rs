//! Line-oriented instance files.
//!
//! ```text
//! bilevel-instance v1
//! family quad
//! id diagonal-ny10-000-optimistic
//! q_kind diagonal
//! seed 1234
//! sense optimistic
//! dims n_x 2 n_y 1 m_x 1
//! h_x 2
//! 1 -3
//! A 1 2
//! 1 1
//! ...
//! ```
//!
//! After the header come tagged fields in a fixed order. A vector field is a
//! `name len` line followed by one line of values; a matrix field is a
//! `name rows cols` line followed by `rows` lines. Numbers use the shortest
//! decimal text that parses back to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

use super::generate::QKind;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::model::{BilevelInstance, LinBilevelInstance, QuadBilevelInstance, Sense};

pub const FORMAT_HEADER: &str = "bilevel-instance v1";

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub id: String,
    /// `None` for instances not drawn by the generator.
    pub q_kind: Option<QKind>,
    pub seed: Option<u64>,
    pub instance: BilevelInstance,
}

fn push_vec<T: ToString>(out: &mut String, name: &str, v: &[T]) {
    let _ = writeln!(out, "{name} {}", v.len());
    let line: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(out, "{}", line.join(" "));
}

fn push_mat(out: &mut String, name: &str, m: &DenseMatrix) {
    let _ = writeln!(out, "{name} {} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
}

pub fn format_instance(file: &InstanceFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_HEADER}");
    let family = match file.instance {
        BilevelInstance::Quad(_) => "quad",
        BilevelInstance::Lin(_) => "lin",
    };
    let _ = writeln!(out, "family {family}");
    let _ = writeln!(out, "id {}", file.id);
    let _ = writeln!(out, "q_kind {}", file.q_kind.map_or("custom", |k| k.as_str()));
    match file.seed {
        Some(s) => {
            let _ = writeln!(out, "seed {s}");
        }
        None => {
            let _ = writeln!(out, "seed none");
        }
    }
    let _ = writeln!(out, "sense {}", file.instance.sense());
    match &file.instance {
        BilevelInstance::Quad(q) => {
            let _ = writeln!(out, "dims n_x {} n_y {} m_x {}", q.n_x(), q.n_y(), q.m_x());
            push_vec(&mut out, "h_x", &q.h_x);
            push_vec(&mut out, "d_x", &q.d_x);
            push_mat(&mut out, "A", &q.a);
            push_vec(&mut out, "b", &q.b);
            push_mat(&mut out, "Q_y", &q.q_y);
            push_mat(&mut out, "C_y", &q.c_y);
            push_vec(&mut out, "d_y", &q.d_y);
        }
        BilevelInstance::Lin(l) => {
            let _ = writeln!(
                out,
                "dims n_x {} n_y {} m_x {} m_y {}",
                l.n_x(),
                l.n_y(),
                l.a.rows(),
                l.m_y()
            );
            push_vec(&mut out, "h_x", &l.h_x);
            push_vec(&mut out, "d", &l.d);
            push_mat(&mut out, "A", &l.a);
            push_vec(&mut out, "b", &l.b);
            push_mat(&mut out, "C_x", &l.c_x);
            push_vec(&mut out, "b_y", &l.b_y);
            push_mat(&mut out, "D_y", &l.d_y);
            push_vec(&mut out, "y_lo", &l.y_lo);
            push_vec(&mut out, "y_hi", &l.y_hi);
        }
    }
    out
}

pub fn write_instance(file: &InstanceFile, path: &Path) -> Result<()> {
    std::fs::write(path, format_instance(file))?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<InstanceFile> {
    parse_instance(&std::fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.trim_end_matches('\r'))
            }
            None => {
                self.line += 1;
                Err(self.err(format!("unexpected end of file, expected {what}")))
            }
        }
    }

    /// `key value` line; returns the value.
    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let l = self.next(key)?;
        match l.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.trim()),
            _ => Err(self.err(format!("expected `{key} <value>`, found `{l}`"))),
        }
    }

    fn header(&mut self, name: &str, arity: usize) -> Result<Vec<usize>> {
        let l = self.next(name)?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(name) {
            return Err(self.err(format!("expected field `{name}`, found `{l}`")));
        }
        let dims: Vec<usize> = parts
            .map(|p| p.parse().map_err(|_| self.err(format!("bad dimension `{p}` for `{name}`"))))
            .collect::<Result<_>>()?;
        if dims.len() != arity {
            return Err(self.err(format!("field `{name}` needs {arity} dimension(s)")));
        }
        Ok(dims)
    }

    fn values<T: std::str::FromStr>(&mut self, name: &str, len: usize) -> Result<Vec<T>> {
        let l = self.next(name)?;
        let v: Vec<T> = l
            .split_whitespace()
            .map(|p| p.parse().map_err(|_| self.err(format!("bad number `{p}` in `{name}`"))))
            .collect::<Result<_>>()?;
        if v.len() != len {
            return Err(self.err(format!("`{name}` has {} entries, expected {len}", v.len())));
        }
        Ok(v)
    }

    fn vector<T: std::str::FromStr>(&mut self, name: &str, expected: usize) -> Result<Vec<T>> {
        let dims = self.header(name, 1)?;
        if dims[0] != expected {
            return Err(self.err(format!("`{name}` length {} disagrees with dims ({expected})", dims[0])));
        }
        self.values(name, expected)
    }

    fn matrix(&mut self, name: &str, rows: usize, cols: usize) -> Result<DenseMatrix> {
        let dims = self.header(name, 2)?;
        if dims != [rows, cols] {
            return Err(self.err(format!(
                "`{name}` is {}x{}, dims require {rows}x{cols}",
                dims[0], dims[1]
            )));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            data.extend(self.values::<f64>(name, cols)?);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(self.err(format!("`{name}` has a non-finite entry")));
        }
        DenseMatrix::new(rows, cols, data)
    }
}

fn dims(lines: &mut Lines<'_>, names: &[&str]) -> Result<Vec<usize>> {
    let v = lines.keyed("dims")?;
    let parts: Vec<&str> = v.split_whitespace().collect();
    if parts.len() != 2 * names.len() {
        return Err(lines.err(format!("dims must list {}", names.join(", "))));
    }
    names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            if parts[2 * i] != *name {
                return Err(lines.err(format!("expected `{name}` in dims, found `{}`", parts[2 * i])));
            }
            parts[2 * i + 1]
                .parse()
                .map_err(|_| lines.err(format!("bad value for `{name}`")))
        })
        .collect()
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let header = lines.next("format header")?;
    if header != FORMAT_HEADER {
        return Err(lines.err(format!("expected `{FORMAT_HEADER}`, found `{header}`")));
    }
    let family = lines.keyed("family")?;
    let id = lines.keyed("id")?.to_string();
    let tag = lines.keyed("q_kind")?;
    let q_kind = match tag {
        "custom" => None,
        t => Some(t.parse::<QKind>().map_err(|e| lines.err(e))?),
    };
    let seed = match lines.keyed("seed")? {
        "none" => None,
        s => Some(s.parse().map_err(|_| lines.err(format!("bad seed `{s}`")))?),
    };
    let sense: Sense = lines.keyed("sense")?.parse().map_err(|e: String| lines.err(e))?;
    let instance = match family {
        "quad" => {
            let d = dims(&mut lines, &["n_x", "n_y", "m_x"])?;
            let (n_x, n_y, m_x) = (d[0], d[1], d[2]);
            BilevelInstance::Quad(QuadBilevelInstance {
                h_x: lines.vector("h_x", n_x)?,
                d_x: lines.vector("d_x", n_y)?,
                a: lines.matrix("A", m_x, n_x)?,
                b: lines.vector("b", m_x)?,
                q_y: lines.matrix("Q_y", n_y, n_y)?,
                c_y: lines.matrix("C_y", n_y, n_x)?,
                d_y: lines.vector("d_y", n_y)?,
                sense,
            })
        }
        "lin" => {
            let d = dims(&mut lines, &["n_x", "n_y", "m_x", "m_y"])?;
            let (n_x, n_y, m_x, m_y) = (d[0], d[1], d[2], d[3]);
            BilevelInstance::Lin(LinBilevelInstance {
                h_x: lines.vector("h_x", n_x)?,
                d: lines.vector("d", n_y)?,
                a: lines.matrix("A", m_x, n_x)?,
                b: lines.vector("b", m_x)?,
                c_x: lines.matrix("C_x", m_y, n_x)?,
                b_y: lines.vector("b_y", m_y)?,
                d_y: lines.matrix("D_y", m_y, n_y)?,
                y_lo: lines.vector("y_lo", n_y)?,
                y_hi: lines.vector("y_hi", n_y)?,
                sense,
            })
        }
        other => return Err(lines.err(format!("unknown family `{other}`"))),
    };
    Ok(InstanceFile {
        id,
        q_kind,
        seed,
        instance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::generate::{gen_quad, GenConfig};

    #[test]
    fn round_trip_generated() {
        for kind in QKind::ALL {
            let inst = gen_quad(&GenConfig::new(11, 10, kind, Sense::Pessimistic));
            let file = InstanceFile {
                id: "t".into(),
                q_kind: Some(kind),
                seed: Some(11),
                instance: BilevelInstance::Quad(inst),
            };
            assert_eq!(parse_instance(&format_instance(&file)).unwrap(), file);
        }
    }

    #[test]
    fn truncated_file() {
        let inst = gen_quad(&GenConfig::new(1, 10, QKind::Diagonal, Sense::Optimistic));
        let text = format_instance(&InstanceFile {
            id: "t".into(),
            q_kind: Some(QKind::Diagonal),
            seed: Some(1),
            instance: BilevelInstance::Quad(inst),
        });
        let cut: String = text.lines().take(12).collect::<Vec<_>>().join("\n");
        assert!(matches!(parse_instance(&cut), Err(Error::Parse { .. })));
    }

    #[test]
    fn unknown_q_kind_is_named() {
        let text = "bilevel-instance v1\nfamily quad\nid t\nq_kind wishart\n";
        let err = parse_instance(text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
        assert!(err.to_string().contains("wishart"));
    }
}
