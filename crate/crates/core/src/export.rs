//! File writers (and round-trip readers) for every downstream format:
//! Pajek networks, vectors and clusters, VOSviewer map/network files,
//! the tagged record format, and the distance-matrix table.
//!
//! All writers are deterministic: newline-only line endings, UTF-8
//! without a byte-order mark, integers printed bare and other reals in
//! the shortest form after rounding to six significant digits.

use std::fs;
use std::path::Path;

use crate::compare::PortfolioDistanceMatrix;
use crate::error::Error;
use crate::ingest::{ParsedRecords, PatentRecord, RECORD_SEPARATOR};
use crate::network::{CooccurrenceMatrix, SimilarityGraph};
use crate::portfolio::ClassVector;
use crate::scalar::Real;
use crate::taxonomy::ClassSimilarityMap;
use crate::Result;

/// Round to six significant digits and print the shortest round-trip
/// form; integral values print bare.
pub fn fmt_real(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v == v.trunc() && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    let exp = v.abs().log10().floor() as i32;
    let scale = 10f64.powi(5 - exp);
    let rounded = (v * scale).round() / scale;
    if rounded == rounded.trunc() && rounded.abs() < 1e15 {
        format!("{}", rounded as i64)
    } else {
        format!("{rounded}")
    }
}

fn fmt_scalar<R: Real>(v: R) -> String {
    fmt_real(v.to_f64().unwrap_or(f64::NAN))
}

/// Write a Pajek `.net` file: `*Vertices N`, quoted vertex labels, then
/// `*Edges` with one `i j w` line per undirected edge (`i < j`,
/// 1-based).
pub fn write_pajek_net<R: Real>(g: &SimilarityGraph<R>, path: &Path) -> Result<()> {
    let mut out = format!("*Vertices {}\n", g.node_count());
    for (i, label) in g.nodes.iter().enumerate() {
        out.push_str(&format!("{} \"{}\"\n", i + 1, label));
    }
    out.push_str("*Edges\n");
    for &(i, j, w) in &g.edges {
        out.push_str(&format!("{} {} {}\n", i + 1, j + 1, fmt_scalar(w)));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read back a Pajek `.net` file written by [`write_pajek_net`].
pub fn read_pajek_net(path: &Path) -> Result<SimilarityGraph<f64>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format(format!("{}: empty file", path.display())))?;
    let n: usize = header
        .strip_prefix("*Vertices ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Format(format!("{}: missing *Vertices header", path.display())))?;
    let mut nodes = vec![String::new(); n];
    let mut edges = Vec::new();
    let mut in_edges = false;
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "*Edges" {
            in_edges = true;
            continue;
        }
        let bad = || Error::Parse { line: idx + 1, message: format!("bad line {line:?}") };
        if in_edges {
            let mut parts = line.split_whitespace();
            let i: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let j: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let w: f64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if i == 0 || j == 0 || i > n || j > n {
                return Err(bad());
            }
            edges.push((i - 1, j - 1, w));
        } else {
            let (id, rest) = line.split_once(' ').ok_or_else(bad)?;
            let id: usize = id.parse().map_err(|_| bad())?;
            let label = rest.trim().trim_matches('"');
            if id == 0 || id > n {
                return Err(bad());
            }
            nodes[id - 1] = label.to_string();
        }
    }
    Ok(SimilarityGraph::new(nodes, edges))
}

/// Write a Pajek vector file: `*Vertices N` then one numeric line per
/// class in canonical order.
pub fn write_pajek_vec<R: Real>(values: &[R], class_count: usize, path: &Path) -> Result<()> {
    if values.len() != class_count {
        return Err(Error::Shape(format!(
            "vector has {} entries, base map has {class_count} classes",
            values.len()
        )));
    }
    let mut out = format!("*Vertices {}\n", values.len());
    for &v in values {
        out.push_str(&fmt_scalar(v));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_pajek_vec(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format(format!("{}: empty file", path.display())))?;
    let n: usize = header
        .strip_prefix("*Vertices ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Format(format!("{}: missing *Vertices header", path.display())))?;
    let values: Vec<f64> = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse()
                .map_err(|_| Error::Format(format!("{}: bad value {l:?}", path.display())))
        })
        .collect::<Result<_>>()?;
    if values.len() != n {
        return Err(Error::Format(format!(
            "{}: {} values, header says {n}",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}

/// Write a Pajek cluster file: `*Vertices N` then one integer per class.
pub fn write_pajek_clu(clusters: &[u32], class_count: usize, path: &Path) -> Result<()> {
    if clusters.len() != class_count {
        return Err(Error::Shape(format!(
            "cluster vector has {} entries, base map has {class_count} classes",
            clusters.len()
        )));
    }
    let mut out = format!("*Vertices {}\n", clusters.len());
    for &c in clusters {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_pajek_clu(path: &Path) -> Result<Vec<u32>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format(format!("{}: empty file", path.display())))?;
    let n: usize = header
        .strip_prefix("*Vertices ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Format(format!("{}: missing *Vertices header", path.display())))?;
    let values: Vec<u32> = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse()
                .map_err(|_| Error::Format(format!("{}: bad cluster {l:?}", path.display())))
        })
        .collect::<Result<_>>()?;
    if values.len() != n {
        return Err(Error::Format(format!(
            "{}: {} values, header says {n}",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}

/// Write a raw co-occurrence matrix as a Pajek matrix (`.dat`) file.
pub fn write_pajek_mat(m: &CooccurrenceMatrix, path: &Path) -> Result<()> {
    let n = m.len();
    let mut out = format!("*Vertices {n}\n");
    for (i, label) in m.codes().iter().enumerate() {
        out.push_str(&format!("{} \"{}\"\n", i + 1, label));
    }
    out.push_str("*Matrix\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| m.weight(i, j).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write the VOSviewer map and network files for one portfolio.
///
/// The map file holds one row per occupied class with coordinates and
/// cluster copied from the base map and the class count as weight; the
/// network file lists class pairs with base-map cosine strictly above
/// `min_weight`.
pub fn write_vosviewer<R: Real>(
    portfolio: &ClassVector,
    basemap: &ClassSimilarityMap<R>,
    path_map: &Path,
    path_net: &Path,
    min_weight: R,
) -> Result<()> {
    if portfolio.level() != basemap.level() {
        return Err(Error::Shape(format!(
            "portfolio level {} does not match base map level {}",
            portfolio.level(),
            basemap.level()
        )));
    }
    if portfolio.counts().len() != basemap.len() {
        return Err(Error::Shape(format!(
            "portfolio has {} classes, base map has {}",
            portfolio.counts().len(),
            basemap.len()
        )));
    }
    // occupied classes in canonical order, ids contiguous from 1
    let occupied: Vec<usize> =
        (0..basemap.len()).filter(|&i| portfolio.counts()[i] > 0).collect();
    let mut map_out = String::from("id\tlabel\tx\ty\tcluster\tweight\n");
    for (row, &i) in occupied.iter().enumerate() {
        let (x, y) = basemap.coord(i);
        map_out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            row + 1,
            basemap.codes()[i],
            fmt_scalar(x),
            fmt_scalar(y),
            basemap.cluster(i),
            portfolio.counts()[i]
        ));
    }
    fs::write(path_map, map_out)?;

    let mut net_out = String::new();
    for a in 0..occupied.len() {
        for b in (a + 1)..occupied.len() {
            let cos = basemap.similarity(occupied[a], occupied[b]);
            if cos > min_weight {
                net_out.push_str(&format!("{}\t{}\t{}\n", a + 1, b + 1, fmt_scalar(cos)));
            }
        }
    }
    fs::write(path_net, net_out)?;
    Ok(())
}

/// VOSviewer map + network files for the city distance network; the
/// network strength is the recovered cosine (`1 - distance`). Without
/// coordinates of its own, the map file carries id, label and weight
/// and leaves the layout to the viewer.
pub fn write_vosviewer_cities<R: Real>(
    dm: &PortfolioDistanceMatrix<R>,
    weights: &[R],
    path_map: &Path,
    path_net: &Path,
    min_weight: R,
) -> Result<()> {
    if weights.len() != dm.len() {
        return Err(Error::Shape("weight vector does not match distance matrix".into()));
    }
    let mut map_out = String::from("id\tlabel\tweight\n");
    for (i, name) in dm.names.iter().enumerate() {
        map_out.push_str(&format!("{}\t{}\t{}\n", i + 1, name, fmt_scalar(weights[i])));
    }
    fs::write(path_map, map_out)?;
    let mut net_out = String::new();
    for i in 0..dm.len() {
        for j in (i + 1)..dm.len() {
            let cos = dm.similarity(i, j);
            if cos > min_weight {
                net_out.push_str(&format!("{}\t{}\t{}\n", i + 1, j + 1, fmt_scalar(cos)));
            }
        }
    }
    fs::write(path_net, net_out)?;
    Ok(())
}

/// Write the tab-separated square distance matrix with a name header.
pub fn write_distance_matrix<R: Real>(dm: &PortfolioDistanceMatrix<R>, path: &Path) -> Result<()> {
    let mut out = String::from("name");
    for name in &dm.names {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..dm.len() {
        out.push_str(&dm.names[i]);
        for j in 0..dm.len() {
            out.push('\t');
            // full precision: the matrix feeds further numeric analysis
            out.push_str(&format!("{}", dm.distance(i, j).to_f64().unwrap_or(f64::NAN)));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Emit the tagged record format; `parse_records` of the output is the
/// identity on well-formed record sets.
pub fn write_records(records: &[PatentRecord], path: &Path) -> Result<()> {
    fs::write(path, render_records(records))?;
    Ok(())
}

pub fn render_records(records: &[PatentRecord]) -> String {
    let mut out = String::new();
    for (k, r) in records.iter().enumerate() {
        if k > 0 {
            out.push_str(RECORD_SEPARATOR);
            out.push('\n');
        }
        out.push_str(&format!("PN {}\n", r.patent_id));
        out.push_str(&format!("ISD {}\n", r.issue_date.format("%Y%m%d")));
        for loc in &r.inventor_locations {
            out.push_str(&format!(
                "IC {}|{}|{}\n",
                loc.city,
                loc.region.as_deref().unwrap_or(""),
                loc.country
            ));
        }
        for s in &r.class_symbols {
            out.push_str(&format!("CL {s}\n"));
        }
    }
    out
}

pub fn read_records(path: &Path) -> Result<ParsedRecords> {
    crate::ingest::parse_records(&fs::read_to_string(path)?)
}
