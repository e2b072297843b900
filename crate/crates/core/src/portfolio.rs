//! Class-count vectors and the two incremental stores: the class-by-set
//! matrix and the per-set diversity table.
//!
//! Both stores are delimited text with a header row and are rewritten
//! atomically (write to a temp file in the same directory, then rename),
//! so a rejected append leaves the on-disk bytes untouched.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::diversity::DiversityRecord;
use crate::error::Error;
use crate::ingest::PatentRecord;
use crate::taxonomy::{normalize_class, Level, UNKNOWN_BUCKET};
use crate::Result;

/// Maximum set-name length accepted by the stores.
pub const MAX_NAME_LEN: usize = 10;

/// How repeated classes within one patent are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Counting {
    /// Each distinct class counts once per patent (the default).
    #[default]
    Set,
    /// Every symbol occurrence counts.
    Multiset,
}

/// How symbols outside the canonical list are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClassMode {
    /// Route non-canonical or malformed symbols to the UNKNOWN bucket.
    #[default]
    Lenient,
    /// Any non-canonical or malformed symbol is an error.
    Strict,
}

/// One portfolio column: counts over the canonical class order plus the
/// lenient-mode UNKNOWN bucket (excluded from diversity and network math).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassVector {
    name: String,
    level: Level,
    counts: Vec<u64>,
    unknown: u64,
}

impl ClassVector {
    pub fn new(name: &str, level: Level, counts: Vec<u64>, unknown: u64) -> Result<Self> {
        validate_name(name)?;
        Ok(Self { name: name.to_string(), level, counts, unknown })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn unknown(&self) -> u64 {
        self.unknown
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn validate_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().count() > MAX_NAME_LEN {
        return Err(Error::InvalidName(name.to_string()));
    }
    Ok(())
}

/// Normalized class codes of one patent at the given level.
///
/// Returns the codes in symbol order (duplicates included); malformed or
/// non-canonical symbols are mapped to the UNKNOWN bucket in lenient
/// mode and are errors in strict mode.
fn patent_codes(
    record: &PatentRecord,
    codes_index: &HashMap<&str, usize>,
    level: Level,
    mode: ClassMode,
) -> Result<Vec<Option<usize>>> {
    let mut out = Vec::with_capacity(record.class_symbols.len());
    for raw in &record.class_symbols {
        match normalize_class(raw) {
            Ok(ipc4) => {
                let code = ipc4.at_level(level);
                match codes_index.get(code.as_str()) {
                    Some(&i) => out.push(Some(i)),
                    None => match mode {
                        ClassMode::Lenient => out.push(None),
                        ClassMode::Strict => return Err(Error::UnknownClass(code)),
                    },
                }
            }
            Err(e) => match mode {
                ClassMode::Lenient => out.push(None),
                ClassMode::Strict => return Err(e),
            },
        }
    }
    Ok(out)
}

/// Count the class distribution of a record set.
///
/// With [`Counting::Set`] each distinct class contributes once per
/// patent; with [`Counting::Multiset`] every occurrence counts. Patents
/// without valid classes contribute nothing.
pub fn count_classes(
    records: &[PatentRecord],
    name: &str,
    classes: &[String],
    level: Level,
    counting: Counting,
    mode: ClassMode,
) -> Result<ClassVector> {
    let index: HashMap<&str, usize> =
        classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut counts = vec![0u64; classes.len()];
    let mut unknown = 0u64;
    for record in records {
        let slots = patent_codes(record, &index, level, mode)?;
        match counting {
            Counting::Set => {
                let distinct: BTreeSet<Option<usize>> = slots.into_iter().collect();
                for slot in distinct {
                    match slot {
                        Some(i) => counts[i] += 1,
                        None => unknown += 1,
                    }
                }
            }
            Counting::Multiset => {
                for slot in slots {
                    match slot {
                        Some(i) => counts[i] += 1,
                        None => unknown += 1,
                    }
                }
            }
        }
    }
    ClassVector::new(name, level, counts, unknown)
}

/// Atomic file rewrite: temp file in the target directory, then rename.
pub(crate) fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    fs::write(tmp.path(), contents)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// The incremental class-by-set matrix, one column per run.
#[derive(Debug)]
pub struct MatrixStore {
    path: PathBuf,
    level: Level,
    classes: Vec<String>,
    columns: Vec<ClassVector>,
}

impl MatrixStore {
    /// Open the store at `path`, creating it in memory de novo when the
    /// file does not exist yet. An existing file must agree on the class
    /// list.
    pub fn open(path: &Path, level: Level, classes: &[String]) -> Result<Self> {
        let mut store = Self {
            path: path.to_path_buf(),
            level,
            classes: classes.to_vec(),
            columns: Vec::new(),
        };
        if path.exists() {
            store.load()?;
        }
        Ok(store)
    }

    fn load(&mut self) -> Result<()> {
        let text = fs::read_to_string(&self.path)?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format(format!("{}: empty store", self.path.display())))?;
        let cols: Vec<&str> = header.split('\t').collect();
        if cols.first() != Some(&"class") {
            return Err(Error::Format(format!(
                "{}: header must start with 'class'",
                self.path.display()
            )));
        }
        let names: Vec<String> = cols[1..].iter().map(|s| s.to_string()).collect();
        let mut counts: Vec<Vec<u64>> = vec![Vec::new(); names.len()];
        let mut unknown: Vec<u64> = vec![0; names.len()];
        let mut file_classes = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() != names.len() + 1 {
                return Err(Error::Format(format!(
                    "{}: row {:?} has wrong arity",
                    self.path.display(),
                    cells.first().unwrap_or(&"")
                )));
            }
            let parse = |s: &str| -> Result<u64> {
                s.trim().parse().map_err(|_| {
                    Error::Format(format!("{}: bad count {s:?}", self.path.display()))
                })
            };
            if cells[0] == UNKNOWN_BUCKET {
                for (k, cell) in cells[1..].iter().enumerate() {
                    unknown[k] = parse(cell)?;
                }
            } else {
                file_classes.push(cells[0].to_string());
                for (k, cell) in cells[1..].iter().enumerate() {
                    counts[k].push(parse(cell)?);
                }
            }
        }
        if file_classes != self.classes {
            return Err(Error::Format(format!(
                "{}: class list does not match the configured base map",
                self.path.display()
            )));
        }
        self.columns = names
            .into_iter()
            .enumerate()
            .map(|(k, name)| ClassVector::new(&name, self.level, counts[k].clone(), unknown[k]))
            .collect::<Result<Vec<_>>>()?;
        Ok(())
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn columns(&self) -> &[ClassVector] {
        &self.columns
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name().to_string()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&ClassVector> {
        self.columns.iter().find(|c| c.name() == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.column(name).is_some()
    }

    /// Append one column and rewrite the persisted file atomically. A
    /// duplicate name or level mismatch rejects the append without
    /// touching the file.
    pub fn append_column(&mut self, v: ClassVector) -> Result<()> {
        if v.level() != self.level {
            return Err(Error::LevelConflict {
                store: self.level.to_string(),
                column: v.level().to_string(),
            });
        }
        if v.counts().len() != self.classes.len() {
            return Err(Error::Shape(format!(
                "column has {} counts, store has {} classes",
                v.counts().len(),
                self.classes.len()
            )));
        }
        if self.contains(v.name()) {
            return Err(Error::NameConflict(v.name().to_string()));
        }
        self.columns.push(v);
        self.save()
    }

    fn save(&self) -> Result<()> {
        write_atomic(&self.path, &self.render())
    }

    fn render(&self) -> String {
        let mut out = String::from("class");
        for c in &self.columns {
            out.push('\t');
            out.push_str(c.name());
        }
        out.push('\n');
        for (i, code) in self.classes.iter().enumerate() {
            out.push_str(code);
            for c in &self.columns {
                out.push('\t');
                out.push_str(&c.counts()[i].to_string());
            }
            out.push('\n');
        }
        out.push_str(UNKNOWN_BUCKET);
        for c in &self.columns {
            out.push('\t');
            out.push_str(&c.unknown().to_string());
        }
        out.push('\n');
        out
    }
}

/// The incremental diversity table, one row per run.
#[derive(Debug)]
pub struct RaoStore {
    path: PathBuf,
    rows: Vec<DiversityRecord<f64>>,
}

pub const RAO_HEADER: &str = "name\tn_patents\tvariety\tgini_simpson\trao_delta\ttrue_diversity";

impl RaoStore {
    pub fn open(path: &Path) -> Result<Self> {
        let mut store = Self { path: path.to_path_buf(), rows: Vec::new() };
        if path.exists() {
            store.load()?;
        }
        Ok(store)
    }

    fn load(&mut self) -> Result<()> {
        let text = fs::read_to_string(&self.path)?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format(format!("{}: empty store", self.path.display())))?;
        if header != RAO_HEADER {
            return Err(Error::Format(format!("{}: bad header", self.path.display())));
        }
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() != 6 {
                return Err(Error::Format(format!(
                    "{}: row has {} fields, expected 6",
                    self.path.display(),
                    cells.len()
                )));
            }
            let bad = |what: &str| Error::Format(format!("{}: bad {what}", self.path.display()));
            self.rows.push(DiversityRecord {
                name: cells[0].to_string(),
                n_patents: cells[1].parse().map_err(|_| bad("n_patents"))?,
                variety: cells[2].parse().map_err(|_| bad("variety"))?,
                gini_simpson: cells[3].parse().map_err(|_| bad("gini_simpson"))?,
                rao_delta: cells[4].parse().map_err(|_| bad("rao_delta"))?,
                true_diversity: cells[5].parse().map_err(|_| bad("true_diversity"))?,
            });
        }
        Ok(())
    }

    pub fn rows(&self) -> &[DiversityRecord<f64>] {
        &self.rows
    }

    pub fn contains(&self, name: &str) -> bool {
        self.rows.iter().any(|r| r.name == name)
    }

    pub fn append_row(&mut self, rec: DiversityRecord<f64>) -> Result<()> {
        validate_name(&rec.name)?;
        if self.contains(&rec.name) {
            return Err(Error::NameConflict(rec.name));
        }
        self.rows.push(rec);
        self.save()
    }

    fn save(&self) -> Result<()> {
        let mut out = String::from(RAO_HEADER);
        out.push('\n');
        for r in &self.rows {
            // default float Display is the shortest round-trip form
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                r.name, r.n_patents, r.variety, r.gini_simpson, r.rao_delta, r.true_diversity
            ));
        }
        write_atomic(&self.path, &out)
    }
}
