//! Text input formats. Blank lines and lines starting with `#` are skipped
//! in the line-oriented formats; errors carry 1-based line numbers.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::apps::motif::DiGraph;
use crate::apps::rank::RankingDataset;
use crate::apps::subspace::PointCloud;
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, HypergraphJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Hjson,
    Edgelist,
    Rankings,
    Points,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hjson" => Ok(Format::Hjson),
            "edgelist" => Ok(Format::Edgelist),
            "rankings" => Ok(Format::Rankings),
            "points" => Ok(Format::Points),
            _ => Err(Error::InvalidArgument(format!("unknown format {s:?}"))),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_field<T: FromStr>(line: usize, field: &str, what: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} {:?}", field.trim())))
}

/// JSON hypergraph: `{"n": .., "edges": [{"vertices": [..], "cost": {"type": ..}}]}`.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let json: HypergraphJson = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    Hypergraph::from_json(&json)
}

/// Directed edges `u v`, one per line. The vertex count is one past the
/// largest id.
pub fn parse_edgelist(text: &str) -> Result<DiGraph> {
    let mut edges = Vec::new();
    for (line, l) in content_lines(text) {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(
                line,
                format!("expected `u v`, found {} fields", fields.len()),
            ));
        }
        let u: usize = parse_field(line, fields[0], "vertex")?;
        let v: usize = parse_field(line, fields[1], "vertex")?;
        if u == v {
            return Err(parse_err(line, format!("self loop on {u}")));
        }
        edges.push((u, v));
    }
    let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    DiGraph::new(n, edges)
}

/// One ranking per line: comma-separated candidate ids from first to last.
pub fn parse_rankings(text: &str) -> Result<RankingDataset> {
    let mut orders = Vec::new();
    let mut n = None;
    for (line, l) in content_lines(text) {
        let order = l
            .split(',')
            .map(|f| parse_field::<usize>(line, f, "candidate"))
            .collect::<Result<Vec<_>>>()?;
        match n {
            None => n = Some(order.len()),
            Some(n) if n != order.len() => {
                return Err(parse_err(
                    line,
                    format!("ranking has {} candidates, expected {n}", order.len()),
                ))
            }
            _ => {}
        }
        let mut seen = vec![false; order.len()];
        for &c in &order {
            if c >= order.len() || std::mem::replace(&mut seen[c], true) {
                return Err(parse_err(line, "ranking is not a permutation of 0..n"));
            }
        }
        orders.push(order);
    }
    RankingDataset::from_orders(n.unwrap_or(0), &orders)
}

/// One point per line: comma-separated coordinates, optionally followed by
/// `| label`. Labels must be given for every point or none.
pub fn parse_points(text: &str) -> Result<PointCloud> {
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut dim = None;
    for (line, l) in content_lines(text) {
        let (coords, label) = match l.split_once('|') {
            Some((c, lab)) => (c, Some(parse_field::<usize>(line, lab, "label")?)),
            None => (l, None),
        };
        let p = coords
            .split(',')
            .map(|f| parse_field::<f64>(line, f, "coordinate"))
            .collect::<Result<Vec<_>>>()?;
        if p.iter().any(|x| !x.is_finite()) {
            return Err(parse_err(line, "non-finite coordinate"));
        }
        match dim {
            None => dim = Some(p.len()),
            Some(d) if d != p.len() => {
                return Err(parse_err(
                    line,
                    format!("point has dimension {}, expected {d}", p.len()),
                ))
            }
            _ => {}
        }
        if !points.is_empty() && label.is_some() != (labels.len() == points.len()) {
            return Err(parse_err(line, "labels must be given for all points or none"));
        }
        labels.extend(label);
        points.push(p);
    }
    let labels = (!labels.is_empty()).then_some(labels);
    PointCloud::new(points, labels)
}
