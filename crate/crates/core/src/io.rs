//! Text formats: `lcgrid v1` grid files, key-value function/body specs,
//! and experiment configs. Parse errors carry line numbers.

use std::path::Path;

use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::grid::Grid;
use crate::lowmstar::LowMstarConfig;
use crate::potential::{Analytic, LogConcaveFn, Potential};
use crate::radial::{RadialPiece, RadialProfile};

/// Serializes a grid:
/// ```text
/// lcgrid v1 dim=<n>
/// origin=<floats>
/// spacing=<floats>
/// shape=<ints>
/// <row-major values, `inf` for +inf>
/// ```
pub fn write_grid(grid: &Grid) -> String {
    let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = format!("lcgrid v1 dim={}\n", grid.dim());
    out.push_str(&format!("origin={}\n", join(grid.origin())));
    out.push_str(&format!("spacing={}\n", join(grid.spacing())));
    out.push_str(&format!(
        "shape={}\n",
        grid.shape().iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
    ));
    let mut line = String::new();
    for (k, v) in grid.values().iter().enumerate() {
        if k > 0 {
            line.push(if k % 16 == 0 { '\n' } else { ' ' });
        }
        if v.is_inf() {
            line.push_str("inf");
        } else {
            line.push_str(&v.raw().to_string());
        }
    }
    out.push_str(&line);
    out.push('\n');
    out
}

pub fn read_grid(text: &str) -> Result<Grid> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty grid file".into() })?;
    let dim: usize = header
        .strip_prefix("lcgrid v1 dim=")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "expected header `lcgrid v1 dim=<n>`".into(),
        })?;
    let mut origin = None;
    let mut spacing = None;
    let mut shape: Option<Vec<usize>> = None;
    let mut values: Vec<ExtReal> = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("origin=") {
            origin = Some(parse_floats(rest, line_no)?);
        } else if let Some(rest) = line.strip_prefix("spacing=") {
            spacing = Some(parse_floats(rest, line_no)?);
        } else if let Some(rest) = line.strip_prefix("shape=") {
            let mut v = Vec::new();
            for tok in rest.split_whitespace() {
                v.push(tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad shape entry `{tok}`"),
                })?);
            }
            shape = Some(v);
        } else {
            for tok in line.split_whitespace() {
                values.push(parse_ext(tok, line_no)?);
            }
        }
    }
    let origin = origin.ok_or_else(|| Error::Parse { line: 2, msg: "missing origin=".into() })?;
    let spacing =
        spacing.ok_or_else(|| Error::Parse { line: 3, msg: "missing spacing=".into() })?;
    let shape = shape.ok_or_else(|| Error::Parse { line: 4, msg: "missing shape=".into() })?;
    if origin.len() != dim {
        return Err(Error::Parse { line: 2, msg: format!("origin has {} entries, dim={dim}", origin.len()) });
    }
    Grid::new(origin, spacing, shape, values)
}

fn parse_floats(s: &str, line: usize) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("bad number `{tok}`"),
            })
        })
        .collect()
}

fn parse_ext(tok: &str, line: usize) -> Result<ExtReal> {
    if tok == "inf" {
        return Ok(ExtReal::INF);
    }
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse { line, msg: format!("bad value `{tok}`") })?;
    if !v.is_finite() {
        return Err(Error::Parse { line, msg: format!("non-finite value `{tok}`") });
    }
    Ok(ExtReal::finite(v))
}

/// `key = value` lines with `#` comments; returns (line, key, value).
pub fn parse_keyvals(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        out.push((line_no, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

struct KeyVals {
    entries: Vec<(usize, String, String)>,
}

impl KeyVals {
    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries
            .iter()
            .find(|(_, k, _)| k == key)
            .map(|(l, _, v)| (*l, v.as_str()))
    }

    fn require(&self, key: &str) -> Result<(usize, &str)> {
        self.get(key).ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("missing key `{key}`"),
        })
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let (line, v) = self.require(key)?;
        v.parse().map_err(|_| Error::Parse { line, msg: format!("bad number for `{key}`: `{v}`") })
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some((line, v)) => v
                .parse()
                .map_err(|_| Error::Parse { line, msg: format!("bad number for `{key}`: `{v}`") }),
        }
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let (line, v) = self.require(key)?;
        v.parse().map_err(|_| Error::Parse { line, msg: format!("bad integer for `{key}`: `{v}`") })
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some((line, v)) => v.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad integer for `{key}`: `{v}`"),
            }),
        }
    }

    fn floats(&self, key: &str) -> Result<Vec<f64>> {
        let (line, v) = self.require(key)?;
        parse_floats(v, line)
    }

    fn floats_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some((line, v)) => parse_floats(v, line),
        }
    }
}

/// Function-spec format:
/// ```text
/// kind = gaussian | indicator_ball | indicator_box | norm_cone
///      | radial_piecewise | grid_file
/// dim = 2
/// # gaussian:          center = 0 0,  log_height = 0
/// # indicator_ball:    radius = 1,    center = 0 0
/// # indicator_box:     min = -1 -1,   max = 1 1
/// # norm_cone:         alpha = 1,     center = 0 0,  offset = 0
/// # radial_piecewise:  breaks = 1 2,  coeffs = a b c; a b c; a b c,
/// #                    rmax = inf | <r>   (one coeff triple per segment,
/// #                    psi = a/2 r^2 + b r + c)
/// # grid_file:         path = relative/or/absolute.lcgrid
/// ```
pub fn parse_function_spec(text: &str, base_dir: &Path) -> Result<LogConcaveFn> {
    let kv = KeyVals { entries: parse_keyvals(text)? };
    let (kind_line, kind) = kv.require("kind")?;
    let phi = match kind {
        "gaussian" => {
            let center = kv.floats_or("center", &[0.0])?;
            let log_height = kv.f64_or("log_height", 0.0)?;
            Potential::from_analytic(Analytic::gaussian(center, log_height))
        }
        "indicator_ball" => {
            let radius = kv.f64("radius")?;
            let dim = kv.usize_or("dim", 1)?;
            let center = kv.floats_or("center", &vec![0.0; dim])?;
            Potential::from_analytic(Analytic::indicator(ConvexBody::Ball { center, radius }))
        }
        "indicator_box" => {
            let lo = kv.floats("min")?;
            let hi = kv.floats("max")?;
            if lo.len() != hi.len() {
                return Err(Error::Parse {
                    line: kind_line,
                    msg: "min and max lengths differ".into(),
                });
            }
            let intervals = lo.into_iter().zip(hi).collect();
            Potential::from_analytic(Analytic::indicator(ConvexBody::Box { intervals }))
        }
        "norm_cone" => {
            let alpha = kv.f64("alpha")?;
            let dim = kv.usize_or("dim", 1)?;
            let center = kv.floats_or("center", &vec![0.0; dim])?;
            let offset = kv.f64_or("offset", 0.0)?;
            Potential::from_analytic(Analytic::norm_cone(alpha, center, offset))
        }
        "radial_piecewise" => {
            let dim = kv.usize("dim")?;
            let breaks = kv.floats_or("breaks", &[])?;
            let (cl, coeffs_raw) = kv.require("coeffs")?;
            let rmax = match kv.get("rmax") {
                None => f64::INFINITY,
                Some((_, "inf")) => f64::INFINITY,
                Some((line, v)) => v.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad rmax `{v}`"),
                })?,
            };
            let mut cuts = vec![0.0];
            cuts.extend(&breaks);
            cuts.push(rmax);
            let segments: Vec<Vec<f64>> = coeffs_raw
                .split(';')
                .map(|s| parse_floats(s, cl))
                .collect::<Result<_>>()?;
            if segments.len() + 1 != cuts.len() {
                return Err(Error::Parse {
                    line: cl,
                    msg: format!(
                        "{} coefficient triples for {} segments",
                        segments.len(),
                        cuts.len() - 1
                    ),
                });
            }
            let mut pieces = Vec::new();
            for (k, seg) in segments.iter().enumerate() {
                if seg.len() != 3 {
                    return Err(Error::Parse {
                        line: cl,
                        msg: format!("segment {k} needs `a b c`"),
                    });
                }
                pieces.push(RadialPiece {
                    lo: cuts[k],
                    hi: cuts[k + 1],
                    a: seg[0],
                    b: seg[1],
                    c: seg[2],
                });
            }
            Potential::from_radial(dim, RadialProfile::new(pieces)?)
        }
        "grid_file" => {
            let (line, rel) = kv.require("path")?;
            let path = base_dir.join(rel);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse {
                line,
                msg: format!("cannot read `{}`: {e}", path.display()),
            })?;
            Potential::from_grid(read_grid(&text)?)?
        }
        other => {
            return Err(Error::Parse {
                line: kind_line,
                msg: format!("unknown kind `{other}`"),
            })
        }
    };
    LogConcaveFn::new(phi)
}

/// Body-spec format:
/// ```text
/// body = ball | box | polytope | segment
/// # ball:     radius = 1, center = 0 0
/// # box:      min = -1 -1, max = 1 1
/// # polytope: vertices = x y; x y; ...
/// # segment:  a = 0 0, b = 1 0
/// ```
pub fn parse_body_spec(text: &str) -> Result<ConvexBody> {
    let kv = KeyVals { entries: parse_keyvals(text)? };
    let (line, kind) = kv.require("body")?;
    let body = match kind {
        "ball" => {
            let radius = kv.f64("radius")?;
            let dim = kv.usize_or("dim", 2)?;
            let center = kv.floats_or("center", &vec![0.0; dim])?;
            ConvexBody::Ball { center, radius }
        }
        "box" => {
            let lo = kv.floats("min")?;
            let hi = kv.floats("max")?;
            ConvexBody::Box { intervals: lo.into_iter().zip(hi).collect() }
        }
        "polytope" => {
            let (vl, raw) = kv.require("vertices")?;
            let vertices: Vec<Vec<f64>> = raw
                .split(';')
                .map(|s| parse_floats(s, vl))
                .collect::<Result<_>>()?;
            ConvexBody::Polytope { vertices }
        }
        "segment" => ConvexBody::Segment { a: kv.floats("a")?, b: kv.floats("b")? },
        other => {
            return Err(Error::Parse { line, msg: format!("unknown body `{other}`") });
        }
    };
    body.validate()?;
    Ok(body)
}

/// Experiment config: the LowMstarConfig fields plus `n` and a `function`
/// reference (a spec path, or the literal `counterexample` for the built-in
/// sharpness family at dimension n).
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub n: usize,
    pub config: LowMstarConfig,
    pub function: FunctionRef,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionRef {
    Counterexample,
    SpecPath(String),
}

pub fn parse_experiment_spec(text: &str) -> Result<ExperimentSpec> {
    let kv = KeyVals { entries: parse_keyvals(text)? };
    let config = LowMstarConfig {
        eps: kv.f64("eps")?,
        m: kv.f64("M").or_else(|_| kv.f64("m"))?,
        lambda: kv.f64("lambda")?,
        trials: kv.usize_or("trials", 64)?,
        shell_samples: kv.usize_or("samples", 4096)?,
        seed: kv.usize_or("seed", 17)? as u64,
        c_probe: kv.floats_or("c_probe", &[0.5, 1.0, 2.0, 4.0, 8.0])?,
    };
    let n = kv.usize("n")?;
    let (_, fref) = kv.require("function")?;
    let function = if fref == "counterexample" {
        FunctionRef::Counterexample
    } else {
        FunctionRef::SpecPath(fref.to_string())
    };
    Ok(ExperimentSpec { n, config, function })
}
