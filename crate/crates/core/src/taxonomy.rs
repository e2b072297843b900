//! Classification symbols and the precomputed base map.
//!
//! Raw USPTO classification strings ("G06F 17/30") are normalized to the
//! four-character subclass level shared by IPC and CPC. The base map is a
//! precomputed cosine-similarity matrix over the canonical classes plus a
//! layout (coordinates and cluster per class); it is consumed, never
//! computed, here.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::Error;
use crate::scalar::Real;
use crate::Result;

/// Number of four-digit classes in the canonical map.
pub const CANONICAL_IPC4_COUNT: usize = 630;

/// Bucket name used for symbols outside the canonical list in lenient mode.
pub const UNKNOWN_BUCKET: &str = "UNKNOWN";

/// Classification aggregation level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Ipc3,
    Ipc4,
}

impl Level {
    pub fn as_str(&self) -> &'static str {
        match self {
            Level::Ipc3 => "ipc3",
            Level::Ipc4 => "ipc4",
        }
    }
}

impl std::str::FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ipc3" | "3" => Ok(Level::Ipc3),
            "ipc4" | "4" => Ok(Level::Ipc4),
            other => Err(Error::Format(format!("unknown level {other:?}"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A four-character subclass code: section letter, two digits, subclass
/// letter (e.g. "G06F"). CPC section "Y" is permitted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ipc4(String);

impl Ipc4 {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// First three characters, the class level ("G06F" -> "G06").
    pub fn truncate3(&self) -> String {
        self.0[..3].to_string()
    }

    /// Code string at the requested level.
    pub fn at_level(&self, level: Level) -> String {
        match level {
            Level::Ipc3 => self.truncate3(),
            Level::Ipc4 => self.0.clone(),
        }
    }
}

impl fmt::Display for Ipc4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Normalize a raw classification symbol to its four-digit class.
///
/// Whitespace is stripped, the symbol uppercased, and the first four
/// characters validated as letter-digit-digit-letter. Membership in the
/// canonical list is a separate concern (see [`ClassSimilarityMap::contains`]).
pub fn normalize_class(raw: &str) -> Result<Ipc4> {
    let compact: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::InvalidSymbol(raw.to_string()));
    }
    let upper = compact.to_ascii_uppercase();
    let prefix: Vec<char> = upper.chars().take(4).collect();
    let ok = prefix.len() == 4
        && prefix[0].is_ascii_uppercase()
        && prefix[1].is_ascii_digit()
        && prefix[2].is_ascii_digit()
        && prefix[3].is_ascii_uppercase();
    if !ok {
        return Err(Error::InvalidSymbol(raw.to_string()));
    }
    Ok(Ipc4(prefix.into_iter().collect()))
}

/// The base map: canonical class codes in file order, symmetric cosine
/// values among them, and the layout (coordinates plus cluster) used by
/// the VOSviewer writers. Immutable after load.
#[derive(Debug, Clone)]
pub struct ClassSimilarityMap<R: Real> {
    level: Level,
    codes: Vec<String>,
    index: HashMap<String, usize>,
    // row-major n*n, symmetric, values in [0,1]
    values: Vec<R>,
    coords: Vec<(R, R)>,
    clusters: Vec<u32>,
}

impl<R: Real> ClassSimilarityMap<R> {
    /// Build a map directly from parts; used by tests and toy fixtures.
    pub fn from_parts(
        level: Level,
        codes: Vec<String>,
        values: Vec<R>,
        coords: Vec<(R, R)>,
        clusters: Vec<u32>,
    ) -> Result<Self> {
        let n = codes.len();
        if values.len() != n * n {
            return Err(Error::Shape(format!(
                "similarity matrix has {} values, expected {}",
                values.len(),
                n * n
            )));
        }
        if coords.len() != n || clusters.len() != n {
            return Err(Error::Shape("layout length does not match class count".into()));
        }
        let index = codes.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let map = Self { level, codes, index, values, coords, clusters };
        map.check_values()?;
        Ok(map)
    }

    fn check_values(&self) -> Result<()> {
        let n = self.codes.len();
        let eps = R::from_f64_lossy(1e-9);
        for i in 0..n {
            for j in 0..n {
                let v = self.values[i * n + j];
                if v < -eps || v > R::one() + eps {
                    return Err(Error::Range {
                        value: v.to_f64().unwrap_or(f64::NAN),
                        row: i,
                        col: j,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[String] {
        &self.codes
    }

    pub fn contains(&self, code: &str) -> bool {
        self.index.contains_key(code)
    }

    pub fn position(&self, code: &str) -> Option<usize> {
        self.index.get(code).copied()
    }

    /// Cosine similarity between two classes by index.
    pub fn similarity(&self, i: usize, j: usize) -> R {
        self.values[i * self.codes.len() + j]
    }

    /// Disparity `1 - cosine` between two classes by index.
    pub fn disparity(&self, i: usize, j: usize) -> R {
        R::one() - self.similarity(i, j)
    }

    pub fn coord(&self, i: usize) -> (R, R) {
        self.coords[i]
    }

    pub fn cluster(&self, i: usize) -> u32 {
        self.clusters[i]
    }

    /// True when this map carries the full canonical four-digit list.
    pub fn is_canonical_ipc4(&self) -> bool {
        self.level == Level::Ipc4 && self.codes.len() == CANONICAL_IPC4_COUNT
    }
}

/// Load a base map from its two delimited files.
///
/// The matrix file starts with a tab-separated header of class codes in
/// canonical order followed by one row of cosine values per code. The
/// layout file holds `code<TAB>x<TAB>y<TAB>cluster` per line. Symmetry is
/// enforced by construction: the upper triangle is read and mirrored.
pub fn load_basemap<R: Real>(
    matrix_path: &Path,
    layout_path: &Path,
    level: Level,
) -> Result<ClassSimilarityMap<R>> {
    let text = fs::read_to_string(matrix_path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format(format!("{}: empty matrix file", matrix_path.display())))?;
    let codes: Vec<String> = header.split('\t').map(|s| s.trim().to_string()).collect();
    let n = codes.len();
    if n == 0 || codes.iter().any(|c| c.is_empty()) {
        return Err(Error::Format(format!("{}: bad header", matrix_path.display())));
    }

    let mut raw = vec![R::zero(); n * n];
    let mut row_count = 0usize;
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if i >= n {
            return Err(Error::Format(format!(
                "{}: more than {n} matrix rows",
                matrix_path.display()
            )));
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != n {
            return Err(Error::Format(format!(
                "{}: row {} has {} columns, expected {n}",
                matrix_path.display(),
                i + 1,
                cells.len()
            )));
        }
        for (j, cell) in cells.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::Format(format!(
                    "{}: bad value {cell:?} at row {}, column {}",
                    matrix_path.display(),
                    i + 1,
                    j + 1
                ))
            })?;
            if !(-1e-9..=1.0 + 1e-9).contains(&v) {
                return Err(Error::Range { value: v, row: i, col: j });
            }
            raw[i * n + j] = R::from_f64_lossy(v);
        }
        row_count += 1;
    }
    if row_count != n {
        return Err(Error::Format(format!(
            "{}: {row_count} matrix rows, expected {n}",
            matrix_path.display()
        )));
    }

    // mirror the upper triangle so values[i][j] == values[j][i] exactly
    let mut values = raw.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            values[j * n + i] = raw[i * n + j];
        }
    }

    let (coords, clusters) = load_layout::<R>(layout_path, &codes)?;
    ClassSimilarityMap::from_parts(level, codes, values, coords, clusters)
}

fn load_layout<R: Real>(path: &Path, codes: &[String]) -> Result<(Vec<(R, R)>, Vec<u32>)> {
    let text = fs::read_to_string(path)?;
    let mut by_code: HashMap<String, ((R, R), u32)> = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != 4 {
            return Err(Error::Format(format!(
                "{}: layout line {} has {} fields, expected 4",
                path.display(),
                lineno + 1,
                cells.len()
            )));
        }
        let parse_real = |s: &str| -> Result<R> {
            s.trim()
                .parse::<f64>()
                .map(R::from_f64_lossy)
                .map_err(|_| Error::Format(format!("{}: bad number {s:?}", path.display())))
        };
        let x = parse_real(cells[1])?;
        let y = parse_real(cells[2])?;
        let cluster: u32 = cells[3].trim().parse().map_err(|_| {
            Error::Format(format!("{}: bad cluster {:?}", path.display(), cells[3]))
        })?;
        if cluster == 0 {
            return Err(Error::Format(format!(
                "{}: cluster must be positive on line {}",
                path.display(),
                lineno + 1
            )));
        }
        by_code.insert(cells[0].trim().to_string(), ((x, y), cluster));
    }

    let mut coords = Vec::with_capacity(codes.len());
    let mut clusters = Vec::with_capacity(codes.len());
    for code in codes {
        let ((x, y), c) = by_code.get(code).copied().ok_or_else(|| {
            Error::Format(format!("{}: layout missing class {code:?}", path.display()))
        })?;
        coords.push((x, y));
        clusters.push(c);
    }
    Ok((coords, clusters))
}

/// Write a base map back out in the load format. Mainly used by tests
/// and by the DBF migration path described in the README.
pub fn write_basemap<R: Real>(
    map: &ClassSimilarityMap<R>,
    matrix_path: &Path,
    layout_path: &Path,
) -> Result<()> {
    let n = map.len();
    let mut out = String::new();
    out.push_str(&map.codes().join("\t"));
    out.push('\n');
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| format!("{}", map.similarity(i, j).to_f64().unwrap_or(f64::NAN)))
            .collect();
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    fs::write(matrix_path, out)?;

    let mut lay = String::new();
    for (i, code) in map.codes().iter().enumerate() {
        let (x, y) = map.coord(i);
        lay.push_str(&format!(
            "{code}\t{}\t{}\t{}\n",
            x.to_f64().unwrap_or(f64::NAN),
            y.to_f64().unwrap_or(f64::NAN),
            map.cluster(i)
        ));
    }
    fs::write(layout_path, lay)?;
    Ok(())
}
