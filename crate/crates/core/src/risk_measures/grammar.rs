//! Text form of risk specifications.
//!
//! ```text
//! var:0.05   es:0.05   wc   el   lses:0.5
//! adjes:g=0.5*(1/x-1)   adjes:g=step(0.25)   adjes:g=table(0.4:inf,0.8:0.5,1:0)
//! oce:l=exp   sr:l=pwl(0.5,0,2)   ew:l=power(1,2)   oce:l=cvar(0.1)
//! ```
//!
//! `pwl(s0,x1,s1,...,xk,sk)` is the loss with slope `s0` left of `x1` and
//! slope `sj` right of `xj`, normalized by `l(0) = 0`.

use std::fmt;

use super::{LossFunction, ProfileFn, Pwl, RiskSpec, TargetProfile};
use crate::error::{Error, Result};

fn num(s: &str) -> Result<f64> {
    let t = s.trim();
    match t {
        "inf" | "+inf" => Ok(f64::INFINITY),
        _ => t.parse::<f64>().map_err(|_| Error::invalid(format!("expected a number, got `{t}`"))),
    }
}

fn args<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')
}

fn num_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(num).collect()
}

pub(super) fn parse_loss(s: &str) -> Result<LossFunction> {
    let s = s.trim();
    if s == "exp" {
        return Ok(LossFunction::Exp);
    }
    if s == "id" {
        return Ok(LossFunction::Piecewise(Pwl::identity()));
    }
    if let Some(a) = args(s, "power") {
        match num_list(a)?.as_slice() {
            [c, g] => return LossFunction::power(*c, *g),
            _ => return Err(Error::invalid("power(c,gamma) takes two arguments")),
        }
    }
    if let Some(a) = args(s, "cvar") {
        return Ok(LossFunction::Piecewise(Pwl::cvar(num(a)?)?));
    }
    if let Some(a) = args(s, "pwl") {
        let v = num_list(a)?;
        if v.len() % 2 == 0 {
            return Err(Error::invalid("pwl(s0,x1,s1,...) needs an odd number of arguments"));
        }
        let pairs: Vec<(f64, f64)> = v[1..].chunks(2).map(|c| (c[0], c[1])).collect();
        return Ok(LossFunction::Piecewise(Pwl::from_slopes(v[0], &pairs)?));
    }
    Err(Error::invalid(format!("unknown loss `{s}`")))
}

pub(super) fn parse_profile(s: &str) -> Result<TargetProfile> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(a) = args(&s, "step") {
        return TargetProfile::step(num(a)?);
    }
    if let Some(a) = args(&s, "table") {
        let pts = a
            .split(',')
            .map(|p| {
                let (x, g) = p.split_once(':').ok_or_else(|| Error::invalid("table entries are x:g"))?;
                Ok((num(x)?, num(g)?))
            })
            .collect::<Result<Vec<_>>>()?;
        return TargetProfile::table(&pts);
    }
    if let Some(b) = s.strip_suffix("*(1/x-1)") {
        return TargetProfile::lses(num(b)?);
    }
    Err(Error::invalid(format!("unknown profile `{s}`")))
}

pub(super) fn parse_spec(s: &str) -> Result<RiskSpec> {
    let s = s.trim().to_ascii_lowercase();
    let (head, rest) = match s.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (s.as_str(), None),
    };
    let need = |r: Option<&str>| -> Result<String> {
        r.map(str::to_string).ok_or_else(|| Error::invalid(format!("`{head}` needs a parameter")))
    };
    let keyed = |r: Option<&str>, key: &str| -> Result<String> {
        need(r)?
            .trim()
            .strip_prefix(key)
            .map(str::to_string)
            .ok_or_else(|| Error::invalid(format!("`{head}` expects `{key}...`")))
    };
    let spec = match head {
        "var" => RiskSpec::var(num(&need(rest)?)?)?,
        "es" => RiskSpec::es(num(&need(rest)?)?)?,
        "lses" => RiskSpec::lses(num(&need(rest)?)?)?,
        "wc" | "el" if rest.is_some() => return Err(Error::invalid(format!("`{head}` takes no parameter"))),
        "wc" => RiskSpec::Wc,
        "el" => RiskSpec::ExpectedLoss,
        "adjes" => RiskSpec::AdjEs { g: parse_profile(&keyed(rest, "g=")?)? },
        "oce" => RiskSpec::oce(parse_loss(&keyed(rest, "l=")?)?)?,
        "sr" => RiskSpec::Sr { l: parse_loss(&keyed(rest, "l=")?)? },
        "ew" => RiskSpec::Ew { l: parse_loss(&keyed(rest, "l=")?)? },
        _ => return Err(Error::invalid(format!("unknown risk family `{head}`"))),
    };
    Ok(spec)
}

fn fmt_loss(l: &LossFunction, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match l {
        LossFunction::Exp => f.write_str("exp"),
        LossFunction::Power { c, gamma } => write!(f, "power({c},{gamma})"),
        LossFunction::Piecewise(p) => {
            write!(f, "pwl({}", p.slopes()[0])?;
            for (x, s) in p.breaks().iter().zip(&p.slopes()[1..]) {
                write!(f, ",{x},{s}")?;
            }
            f.write_str(")")
        }
    }
}

fn fmt_profile(g: &TargetProfile, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if let Some(b) = g.as_lses() {
        return write!(f, "{b}*(1/x-1)");
    }
    let p = g.pieces();
    if p.len() == 2
        && matches!(p[0].f, ProfileFn::Infinite)
        && matches!(&p[1].f, ProfileFn::Poly(c) if c.iter().all(|c| *c == 0.0))
    {
        return write!(f, "step({})", p[0].hi);
    }
    let tabular = matches!(p[0].f, ProfileFn::Infinite)
        && p.len() >= 2
        && p[1..].iter().enumerate().all(|(i, q)| match q.f {
            ProfileFn::InvAffine { .. } => true,
            ProfileFn::Reciprocal { m, k, .. } => i == 0 && m == 1.0 && k == -q.lo,
            _ => false,
        });
    if !tabular {
        return f.write_str("<custom>");
    }
    write!(f, "table({}:{}", p[1].lo, fmt_num(p[1].f.eval(p[1].lo)))?;
    for q in &p[1..] {
        write!(f, ",{}:{}", q.hi, fmt_num(q.f.eval(q.hi)))?;
    }
    f.write_str(")")
}

fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        // Table values are recomputed from the stored formulas.
        let t = format!("{v:.12}");
        t.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub(super) fn fmt_spec(s: &RiskSpec, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match s {
        RiskSpec::Var { alpha } => write!(f, "var:{alpha}"),
        RiskSpec::Es { alpha } => write!(f, "es:{alpha}"),
        RiskSpec::Wc => f.write_str("wc"),
        RiskSpec::ExpectedLoss => f.write_str("el"),
        RiskSpec::Lses { b } => write!(f, "lses:{b}"),
        RiskSpec::AdjEs { g } => {
            f.write_str("adjes:g=")?;
            fmt_profile(g, f)
        }
        RiskSpec::Oce { l } | RiskSpec::Sr { l } | RiskSpec::Ew { l } => {
            let head = match s {
                RiskSpec::Oce { .. } => "oce",
                RiskSpec::Sr { .. } => "sr",
                _ => "ew",
            };
            write!(f, "{head}:l=")?;
            fmt_loss(l, f)
        }
    }
}
