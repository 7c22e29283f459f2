//! Plain-text instance and generator-config formats.
//!
//! Instance files hold `m1 m2 nnz` on the first line, then `nnz` lines of
//! `row col value` (1-based), then the `m1` entries of `b` and the `m2`
//! entries of `c`, each vector on a line of its own.
//! Values written without a decimal point or exponent are integers; a
//! matrix containing any other spelling is kept in floating-point mode.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lp_model::StandardFormLP;
use crate::sparse::SparseMatrix;
use crate::tu::FlowInstanceSpec;

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let items: Vec<_> = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)))
            .collect();
        let last_line = text.lines().count().max(1);
        Tokens { items, pos: 0, last_line }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let t = self.items.get(self.pos).copied().ok_or_else(|| Error::Parse {
            line: self.last_line,
            msg: format!("unexpected end of input, expected {what}"),
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn line_of_next(&self) -> usize {
        self.items.get(self.pos).map_or(self.last_line, |t| t.0)
    }
}

fn parse_count(tok: (usize, &str), what: &str) -> Result<usize> {
    tok.1.parse().map_err(|_| Error::Parse {
        line: tok.0,
        msg: format!("expected {what} as a nonnegative integer, found {:?}", tok.1),
    })
}

fn parse_value(tok: (usize, &str)) -> Result<(f64, bool)> {
    let v: f64 = tok.1.parse().map_err(|_| Error::Parse {
        line: tok.0,
        msg: format!("expected a number, found {:?}", tok.1),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line: tok.0,
            msg: format!("non-finite value {:?}", tok.1),
        });
    }
    let integer_spelled = tok.1.trim_start_matches(['+', '-']).bytes().all(|b| b.is_ascii_digit());
    Ok((v, integer_spelled))
}

pub fn parse_instance(text: &str) -> Result<StandardFormLP> {
    let mut toks = Tokens::new(text);
    if toks.items.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "empty instance".into(),
        });
    }
    let header_line = toks.items[0].0;
    let header: Vec<&str> = toks.items.iter().take_while(|t| t.0 == header_line).map(|t| t.1).collect();
    if header.len() != 3 {
        return Err(Error::Parse {
            line: header_line,
            msg: format!("header must be \"m1 m2 nnz\", found {} fields", header.len()),
        });
    }
    let m1 = parse_count(toks.next("m1")?, "m1")?;
    let m2 = parse_count(toks.next("m2")?, "m2")?;
    let nnz = parse_count(toks.next("nnz")?, "nnz")?;

    let mut trip = Vec::with_capacity(nnz);
    let mut integer = true;
    let mut entry_lines = Vec::with_capacity(nnz);
    while trip.len() < nnz {
        let line = toks.line_of_next();
        let fields: Vec<_> = toks.items[toks.pos..].iter().take_while(|t| t.0 == line).copied().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!(
                    "nnz mismatch: header declares {nnz} entries, found {} before this line",
                    trip.len()
                ),
            });
        }
        toks.pos += 3;
        let r = parse_count(fields[0], "row index")?;
        let c = parse_count(fields[1], "column index")?;
        if r == 0 || r > m1 || c == 0 || c > m2 {
            return Err(Error::Parse {
                line,
                msg: format!("entry ({r}, {c}) outside 1..={m1} x 1..={m2}"),
            });
        }
        let (v, int_spelled) = parse_value(fields[2])?;
        integer &= int_spelled;
        trip.push((r - 1, c - 1, v));
        entry_lines.push(line);
    }
    let a = SparseMatrix::from_triplets(m1, m2, &trip).map_err(|e| Error::Parse {
        line: entry_lines.last().copied().unwrap_or(header_line),
        msg: e.to_string(),
    })?;
    let a = if integer { a } else { a.into_float() };

    let mut read_line_vec = |len: usize, name: &str| -> Result<Vec<f64>> {
        let line = toks.line_of_next();
        let fields: Vec<_> = toks.items[toks.pos..].iter().take_while(|t| t.0 == line).copied().collect();
        if fields.len() != len {
            let hint = if fields.len() == 3 && name == "b" {
                format!(" (an extra matrix entry? header declares nnz = {nnz})")
            } else {
                String::new()
            };
            return Err(Error::Parse {
                line,
                msg: format!("{name} expects {len} values, found {}{hint}", fields.len()),
            });
        }
        toks.pos += len;
        fields.into_iter().map(|t| parse_value(t).map(|(v, _)| v)).collect()
    };
    let b = read_line_vec(m1, "b")?;
    let c = read_line_vec(m2, "c")?;
    if let Some(&(line, t)) = toks.items.get(toks.pos) {
        return Err(Error::Parse {
            line,
            msg: format!("unexpected trailing token {t:?}"),
        });
    }
    StandardFormLP::new(a, b, c).map_err(|e| Error::Parse {
        line: header_line,
        msg: e.to_string(),
    })
}

pub fn load_instance(path: &Path) -> Result<StandardFormLP> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

fn fmt_value(v: f64, out: &mut String) {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        let _ = write!(out, "{}", v as i64);
    } else {
        // shortest round-trip representation, always with a '.' or exponent
        let s = format!("{v:?}");
        out.push_str(&s);
    }
}

/// Inverse of [`parse_instance`]; integer values are written without a
/// decimal point unless the matrix is in floating-point mode.
pub fn write_instance(lp: &StandardFormLP) -> String {
    let a = lp.a();
    let mut out = format!("{} {} {}\n", lp.m1(), lp.m2(), a.nnz());
    for (i, j, v) in a.triplets() {
        let _ = write!(out, "{} {} ", i + 1, j + 1);
        if a.is_exact_integer() {
            fmt_value(v, &mut out);
        } else {
            let _ = write!(out, "{v:?}");
        }
        out.push('\n');
    }
    for vec in [lp.b(), lp.c()] {
        let mut line = String::new();
        for (k, &v) in vec.iter().enumerate() {
            if k > 0 {
                line.push(' ');
            }
            fmt_value(v, &mut line);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Flow generator config.
///
/// ```text
/// # comment
/// nodes 4
/// arc 1 2
/// arc 2 3
/// supplies 1 0 -1 0     (optional)
/// costs 3 1             (optional)
/// max_cost 5            (optional, default 3)
/// seed 11               (optional)
/// keep_last_row         (optional)
/// ```
///
/// Missing supplies come from a random integral flow on the arcs and missing
/// costs are uniform in `0..=max_cost`, both drawn from `seed` (or the
/// fallback seed when the file has none).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub nodes: usize,
    pub arcs: Vec<(usize, usize)>,
    pub supplies: Option<Vec<i64>>,
    pub costs: Option<Vec<i64>>,
    pub max_cost: i64,
    pub seed: Option<u64>,
    pub drop_last_row: bool,
}

pub fn parse_generator_config(text: &str) -> Result<GeneratorConfig> {
    let mut nodes = None;
    let mut arcs = Vec::new();
    let mut supplies = None;
    let mut costs = None;
    let mut max_cost = 3;
    let mut seed = None;
    let mut drop_last_row = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let err = |msg: String| Error::Parse { line, msg };
        let ints = |rest: &[&str]| -> Result<Vec<i64>> {
            rest.iter()
                .map(|t| t.parse::<i64>().map_err(|_| err(format!("expected an integer, found {t:?}"))))
                .collect()
        };
        let single = |rest: &[&str]| -> Result<i64> {
            match ints(rest)?.as_slice() {
                [v] => Ok(*v),
                vs => Err(err(format!("{key} takes one value, found {}", vs.len()))),
            }
        };
        match key {
            "nodes" => {
                let v = single(&rest)?;
                if v < 2 {
                    return Err(err(format!("need at least 2 nodes, found {v}")));
                }
                nodes = Some(v as usize);
            }
            "arc" => match ints(&rest)?.as_slice() {
                &[t, h] if t >= 1 && h >= 1 => arcs.push((t as usize - 1, h as usize - 1)),
                _ => return Err(err("arc takes two 1-based node indices".into())),
            },
            "supplies" => supplies = Some(ints(&rest)?),
            "costs" => costs = Some(ints(&rest)?),
            "max_cost" => max_cost = single(&rest)?,
            "seed" => {
                let v = single(&rest)?;
                seed = Some(u64::try_from(v).map_err(|_| err(format!("seed must be nonnegative, found {v}")))?);
            }
            "keep_last_row" if rest.is_empty() => drop_last_row = false,
            _ => return Err(err(format!("unknown directive {key:?}"))),
        }
    }
    let nodes = nodes.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        msg: "missing \"nodes\" line".into(),
    })?;
    if arcs.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            msg: "no arcs".into(),
        });
    }
    Ok(GeneratorConfig {
        nodes,
        arcs,
        supplies,
        costs,
        max_cost,
        seed,
        drop_last_row,
    })
}

impl GeneratorConfig {
    pub fn to_spec(&self, fallback_seed: u64) -> Result<FlowInstanceSpec> {
        let seed = self.seed.unwrap_or(fallback_seed);
        let random = random_data(self.nodes, &self.arcs, self.max_cost, seed);
        let spec = FlowInstanceSpec {
            nodes: self.nodes,
            arcs: self.arcs.clone(),
            supplies: self.supplies.clone().unwrap_or(random.0),
            costs: self.costs.clone().unwrap_or(random.1),
            drop_last_row: self.drop_last_row,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn random_data(nodes: usize, arcs: &[(usize, usize)], max_cost: i64, seed: u64) -> (Vec<i64>, Vec<i64>) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut supplies = vec![0i64; nodes];
    for &(t, h) in arcs {
        let f = rng.gen_range(0..=2i64);
        if t < nodes && h < nodes {
            supplies[t] += f;
            supplies[h] -= f;
        }
    }
    let costs = arcs.iter().map(|_| rng.gen_range(0..=max_cost.max(0))).collect();
    (supplies, costs)
}
