//! Text format:
//!
//! ```text
//! c optional comments
//! p xor <n> <m>
//! <v1> ... <vl> <b>      (m lines, variables 1-indexed, b in {0,1})
//! ```

use std::io::{BufRead, Write};
use std::path::Path;

use super::{Ensemble, FactorGraph, Provenance};
use crate::error::{Error, Result};
use crate::gf2::BitVec;

/// A parity system `Hx = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorInstance {
    pub graph: FactorGraph,
    pub rhs: BitVec,
}

impl XorInstance {
    pub fn homogeneous(graph: FactorGraph) -> Self {
        let rhs = BitVec::zeros(graph.num_checks());
        XorInstance { graph, rhs }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rhs.is_zero()
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        read_instance(std::io::BufReader::new(f))
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_instance(&mut f, self)?;
        f.flush()?;
        Ok(())
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn read_instance(reader: impl BufRead) -> Result<XorInstance> {
    let mut header: Option<(usize, usize)> = None;
    let mut checks = Vec::new();
    let mut rhs = Vec::new();
    let mut last_line = 0;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text == "c" || text.starts_with("c ") {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let Some((n, m)) = header else {
            if tokens.len() != 4 || tokens[0] != "p" || tokens[1] != "xor" {
                return Err(parse_err(lineno, "expected header `p xor <n> <m>`"));
            }
            let n = tokens[2].parse().map_err(|_| parse_err(lineno, "bad variable count"))?;
            let m = tokens[3].parse().map_err(|_| parse_err(lineno, "bad check count"))?;
            header = Some((n, m));
            continue;
        };
        if checks.len() == m {
            return Err(parse_err(lineno, format!("more than {m} check lines")));
        }
        if tokens.len() < 2 {
            return Err(parse_err(lineno, "a check needs at least one variable and a right-hand side"));
        }
        let (vars, b) = tokens.split_at(tokens.len() - 1);
        let b = match b[0] {
            "0" => false,
            "1" => true,
            other => return Err(parse_err(lineno, format!("right-hand side must be 0 or 1, got `{other}`"))),
        };
        let mut check = Vec::with_capacity(vars.len());
        for tok in vars {
            let v: usize = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad variable `{tok}`")))?;
            if v == 0 || v > n {
                return Err(parse_err(lineno, format!("variable {v} outside 1..={n}")));
            }
            check.push(v - 1);
        }
        checks.push(check);
        rhs.push(b);
    }
    let Some((n, m)) = header else {
        return Err(parse_err(last_line.max(1), "missing header"));
    };
    if checks.len() != m {
        return Err(parse_err(last_line, format!("expected {m} checks, found {}", checks.len())));
    }
    let graph =
        FactorGraph::from_checks(n, checks, Provenance { ensemble: Ensemble::File, seed: None })?;
    let mut bits = BitVec::zeros(m);
    for (a, b) in rhs.into_iter().enumerate() {
        bits.set(a, b);
    }
    Ok(XorInstance { graph, rhs: bits })
}

pub fn write_instance(mut w: impl Write, inst: &XorInstance) -> Result<()> {
    let g = &inst.graph;
    let prov = g.provenance();
    if let Some(seed) = prov.seed {
        writeln!(w, "c ensemble {:?} seed {seed}", prov.ensemble)?;
    }
    writeln!(w, "p xor {} {}", g.num_vars(), g.num_checks())?;
    for (a, c) in g.checks().enumerate() {
        for &v in c {
            write!(w, "{} ", v + 1)?;
        }
        writeln!(w, "{}", u8::from(inst.rhs.get(a)))?;
    }
    Ok(())
}
