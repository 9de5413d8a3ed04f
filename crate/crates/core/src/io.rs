//! Market text files.
//!
//! ```text
//! space.probs = 0.25 0.25 0.5
//! market.r = 0.01
//! asset.1.excess = 0.3 -0.2 0.1      # R^1 - r per atom
//! asset.2.price = 100
//! asset.2.payoffs = 120 95 101
//! ```
//!
//! Each asset is given either by its excess returns or by a price and
//! payoffs. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::finite_market::{FiniteSpace, Market};

fn numbers(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| Error::invalid(format!("`{key}`: `{t}` is not a number"))))
        .collect()
}

#[derive(Default)]
struct AssetLines {
    excess: Option<Vec<f64>>,
    price: Option<f64>,
    payoffs: Option<Vec<f64>>,
}

/// Parses the market text format.
pub fn parse_market(text: &str) -> Result<Market> {
    let mut probs = None;
    let mut r = None;
    let mut assets: BTreeMap<usize, AssetLines> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("line {}: expected `key = values`", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let dup = || Error::invalid(format!("line {}: `{key}` given twice", lineno + 1));
        match key {
            "space.probs" => {
                if probs.replace(numbers(key, value)?).is_some() {
                    return Err(dup());
                }
            }
            "market.r" => {
                let v = numbers(key, value)?;
                if v.len() != 1 || r.replace(v[0]).is_some() {
                    return Err(Error::invalid(format!("line {}: `market.r` takes one value once", lineno + 1)));
                }
            }
            _ => {
                let rest = key
                    .strip_prefix("asset.")
                    .ok_or_else(|| Error::invalid(format!("line {}: unknown key `{key}`", lineno + 1)))?;
                let (idx, field) = rest
                    .split_once('.')
                    .ok_or_else(|| Error::invalid(format!("line {}: unknown key `{key}`", lineno + 1)))?;
                let idx: usize = idx.parse().ok().filter(|i| *i >= 1).ok_or_else(|| {
                    Error::invalid(format!("line {}: asset index `{idx}` must be a positive integer", lineno + 1))
                })?;
                let a = assets.entry(idx).or_default();
                let v = numbers(key, value)?;
                let taken = match field {
                    "excess" => a.excess.replace(v).is_some(),
                    "payoffs" => a.payoffs.replace(v).is_some(),
                    "price" if v.len() == 1 => a.price.replace(v[0]).is_some(),
                    "price" => return Err(Error::invalid(format!("line {}: `{key}` takes one value", lineno + 1))),
                    _ => return Err(Error::invalid(format!("line {}: unknown key `{key}`", lineno + 1))),
                };
                if taken {
                    return Err(dup());
                }
            }
        }
    }
    let space = FiniteSpace::new(probs.ok_or_else(|| Error::invalid("missing `space.probs`"))?)?;
    let r = r.unwrap_or(0.0);
    if assets.keys().copied().ne(1..=assets.len()) {
        return Err(Error::invalid("assets must be numbered 1, 2, ..., d"));
    }
    let mut excess = Vec::with_capacity(assets.len());
    let mut prices = Vec::with_capacity(assets.len());
    for (i, a) in assets {
        match (a.excess, a.price, a.payoffs) {
            (Some(e), None, None) => {
                excess.push(e);
                prices.push(1.0);
            }
            (None, Some(s0), Some(pay)) => {
                if !(s0 > 0.0 && s0.is_finite()) {
                    return Err(Error::invalid(format!("asset {i}: price must be positive")));
                }
                excess.push(pay.iter().map(|s1| s1 / s0 - 1.0 - r).collect());
                prices.push(s0);
            }
            _ => return Err(Error::invalid(format!("asset {i}: give either `excess` or both `price` and `payoffs`"))),
        }
    }
    Market::with_prices(&space, r, excess, prices)
}

/// Emits a market in excess-return form with 17 significant digits, which
/// `parse_market` reads back bit for bit.
pub fn emit_market(m: &Market) -> String {
    let row = |v: &[f64]| v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(" ");
    let mut s = String::new();
    writeln!(s, "space.probs = {}", row(m.space().probs())).unwrap();
    writeln!(s, "market.r = {:.16e}", m.r()).unwrap();
    for (j, e) in m.excess().iter().enumerate() {
        writeln!(s, "asset.{}.excess = {}", j + 1, row(e)).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_parse_both_forms() {
        let m = parse_market(
            "space.probs = 0.25 0.25 0.5\nmarket.r = 0.01\n# note\nasset.1.excess = 0.3 -0.2 0.1  # R - r\n\
             asset.2.price = 100\nasset.2.payoffs = 120 95 101\n",
        )
        .unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.prices(), &[1.0, 100.0]);
        assert!((m.excess()[1][0] - (1.2 - 1.0 - 0.01)).abs() < 1e-15);
        let back = parse_market(&emit_market(&m)).unwrap();
        assert_eq!(back.excess(), m.excess());
        assert_eq!(back.space().probs(), m.space().probs());
    }

    #[test]
    fn test_rejects_malformed() {
        for bad in [
            "market.r = 0\nasset.1.excess = 1 -1",
            "space.probs = 0.5 0.5\nasset.2.excess = 1 -0.5",
            "space.probs = 0.5 0.5\nasset.1.excess = 1 -0.5\nasset.1.price = 1",
            "space.probs = 0.5 0.5\nasset.1.excess = 1 -0.5\nfoo = 1",
            "space.probs = 0.5 0.5\nasset.1.excess = 1 x",
            "space.probs = 0.5 0.5\nspace.probs = 0.5 0.5\nasset.1.excess = 1 -0.5",
        ] {
            assert!(parse_market(bad).is_err(), "{bad}");
        }
    }
}
