//! End-to-end orchestration of one analysis run and of the follow-up
//! comparison and cohesion commands. The CLI is a thin wrapper over this
//! module, which keeps the whole workflow testable in-process.
//!
//! A run is atomic with respect to the stores: every input is parsed,
//! counted and exported before the matrix column and diversity row are
//! appended, and both appends rewrite their files atomically. A failed
//! run therefore leaves the store directory byte-identical.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::compare::{self, PortfolioDistanceMatrix};
use crate::diversity::{self, DiversityRecord};
use crate::error::Error;
use crate::export;
use crate::ingest::{self, ParsedRecords, PatentRecord};
use crate::network::{self, CohesionReport, CooccurrenceMatrix};
use crate::portfolio::{self, ClassMode, ClassVector, Counting, MatrixStore, RaoStore};
use crate::taxonomy::{load_basemap, ClassSimilarityMap, Level};
use crate::Result;

pub const MATRIX_FILE: &str = "matrix.tsv";
pub const RAO_FILE: &str = "rao.tsv";
const LOCK_FILE: &str = ".lock";

/// Configuration of one `run` invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub set_name: String,
    pub level: Level,
    /// Tagged-format record files; several files are concatenated
    /// (batched downloads) and deduplicated by patent id.
    pub inputs: Vec<PathBuf>,
    /// Tab-separated tabular imports, concatenated with `inputs`.
    pub tabular_inputs: Vec<PathBuf>,
    pub basemap_matrix: PathBuf,
    pub basemap_layout: PathBuf,
    pub store_dir: PathBuf,
    pub year: Option<i32>,
    pub counting: Counting,
    pub class_mode: ClassMode,
    /// Cosine threshold for the VOSviewer network file.
    pub threshold: f64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        portfolio::validate_name(&self.set_name)?;
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidSpec(format!(
                "cosine threshold {} outside [0,1]",
                self.threshold
            )));
        }
        if self.inputs.is_empty() && self.tabular_inputs.is_empty() {
            return Err(Error::InvalidSpec("no input files".into()));
        }
        Ok(())
    }
}

/// One-line result of a run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub set_name: String,
    pub n_patents: u64,
    pub duplicates_dropped: usize,
    pub unknown_tags: usize,
    pub variety: u64,
    pub gini_simpson: f64,
    pub rao_delta: f64,
    pub true_diversity: f64,
    pub outputs: Vec<PathBuf>,
}

/// Exclusive store-directory lock; serializes concurrent invocations.
struct StoreLock {
    path: PathBuf,
}

impl StoreLock {
    fn acquire(store_dir: &Path) -> Result<Self> {
        fs::create_dir_all(store_dir)?;
        let path = store_dir.join(LOCK_FILE);
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(Self { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(Error::StoreLocked(path.display().to_string()))
            }
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for StoreLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn load_inputs(config: &RunConfig) -> Result<(Vec<PatentRecord>, usize, usize)> {
    let mut all = Vec::new();
    let mut unknown_tags = 0;
    for path in &config.inputs {
        let ParsedRecords { records, unknown_tags: u } =
            ingest::parse_records(&fs::read_to_string(path)?)?;
        all.extend(records);
        unknown_tags += u;
    }
    for path in &config.tabular_inputs {
        let ParsedRecords { records, unknown_tags: u } =
            ingest::parse_tabular(&fs::read_to_string(path)?)?;
        all.extend(records);
        unknown_tags += u;
    }
    let (mut records, duplicates) = ingest::dedup_records(all);
    if let Some(year) = config.year {
        records = ingest::filter_by_year(records, year);
    }
    Ok((records, duplicates, unknown_tags))
}

fn level_tag(level: Level) -> &'static str {
    match level {
        Level::Ipc3 => "3",
        Level::Ipc4 => "4",
    }
}

/// Execute one full run: parse, filter, count, export the per-set files,
/// then append to the matrix and rao stores.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let _lock = StoreLock::acquire(&config.store_dir)?;

    let basemap: ClassSimilarityMap<f64> =
        load_basemap(&config.basemap_matrix, &config.basemap_layout, config.level)?;
    let classes = basemap.codes().to_vec();

    // open both stores up front so a name conflict aborts before any output
    let matrix_path = config.store_dir.join(MATRIX_FILE);
    let rao_path = config.store_dir.join(RAO_FILE);
    let mut matrix_store = MatrixStore::open(&matrix_path, config.level, &classes)?;
    let mut rao_store = RaoStore::open(&rao_path)?;
    if matrix_store.contains(&config.set_name) || rao_store.contains(&config.set_name) {
        return Err(Error::NameConflict(config.set_name.clone()));
    }

    let (records, duplicates_dropped, unknown_tags) = load_inputs(config)?;

    let column = portfolio::count_classes(
        &records,
        &config.set_name,
        &classes,
        config.level,
        config.counting,
        config.class_mode,
    )?;
    if column.total() == 0 {
        return Err(Error::EmptyPortfolio(config.set_name.clone()));
    }

    let n_patents = records.len() as u64;
    let record: DiversityRecord<f64> = diversity::diversity_record(&column, n_patents, &basemap)?;

    let known: HashSet<String> = classes.iter().cloned().collect();
    let coocc = network::cooccurrence(&records, config.level, config.class_mode, Some(&known))?;
    let cosine_graph = network::cosine_rows::<f64>(&coocc);

    // per-set output files
    let out_dir = config.store_dir.join(&config.set_name);
    fs::create_dir_all(&out_dir)?;
    let tag = level_tag(config.level);
    let coocc_path = out_dir.join("coocc.dat");
    let cosine_path = out_dir.join("cosine.net");
    let vos_map_path = out_dir.join(format!("vos{tag}.txt"));
    let vos_net_path = out_dir.join(format!("vos{tag}n.txt"));
    let vec_path = out_dir.join(format!("ipc{tag}.vec"));
    let clu_path = out_dir.join(format!("ipc{tag}.cls"));

    export::write_pajek_mat(&coocc, &coocc_path)?;
    export::write_pajek_net(&cosine_graph, &cosine_path)?;
    export::write_vosviewer(&column, &basemap, &vos_map_path, &vos_net_path, config.threshold)?;
    let values: Vec<f64> = column.counts().iter().map(|&c| c as f64).collect();
    export::write_pajek_vec(&values, basemap.len(), &vec_path)?;
    let clusters: Vec<u32> = (0..basemap.len()).map(|i| basemap.cluster(i)).collect();
    export::write_pajek_clu(&clusters, basemap.len(), &clu_path)?;

    // stores are mutated last
    matrix_store.append_column(column.clone())?;
    rao_store.append_row(record.clone())?;

    Ok(RunSummary {
        set_name: config.set_name.clone(),
        n_patents,
        duplicates_dropped,
        unknown_tags,
        variety: record.variety,
        gini_simpson: record.gini_simpson,
        rao_delta: record.rao_delta,
        true_diversity: record.true_diversity,
        outputs: vec![
            coocc_path,
            cosine_path,
            vos_map_path,
            vos_net_path,
            vec_path,
            clu_path,
            matrix_path,
            rao_path,
        ],
    })
}

/// Pairwise statistics of one comparison.
#[derive(Debug, Clone)]
pub struct PairStats {
    pub a: String,
    pub b: String,
    pub pearson: f64,
    pub spearman: f64,
    pub cosine: f64,
    /// Spearman over the classes attributed to both sets, with the
    /// subset size; `None` when fewer than two shared classes exist.
    pub restricted_spearman: Option<(f64, usize)>,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub pairs: Vec<PairStats>,
    pub distances: PortfolioDistanceMatrix<f64>,
    pub outputs: Vec<PathBuf>,
}

/// Compare named portfolios from the matrix store: per-pair Pearson,
/// Spearman and cosine, plus the `1 - cosine` distance matrix and its
/// Pajek/VOSviewer files written next to the stores.
pub fn compare_sets(
    store_dir: &Path,
    level: Level,
    basemap_matrix: &Path,
    basemap_layout: &Path,
    names: &[String],
    threshold: f64,
) -> Result<CompareReport> {
    let basemap: ClassSimilarityMap<f64> = load_basemap(basemap_matrix, basemap_layout, level)?;
    let store =
        MatrixStore::open(&store_dir.join(MATRIX_FILE), level, &basemap.codes().to_vec())?;

    let selected: Vec<ClassVector> = if names.is_empty() {
        store.columns().to_vec()
    } else {
        names
            .iter()
            .map(|n| {
                store.column(n).cloned().ok_or_else(|| Error::UnknownName {
                    name: n.clone(),
                    valid: store.names(),
                })
            })
            .collect::<Result<Vec<_>>>()?
    };
    if selected.len() < 2 {
        return Err(Error::InvalidSpec("compare needs at least 2 set names".into()));
    }

    let n = selected.len();
    let mut pairs = Vec::new();
    let mut d = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&selected[i], &selected[j]);
            let cos = compare::cosine_sim::<f64>(a, b)?;
            d[i * n + j] = 1.0 - cos;
            d[j * n + i] = 1.0 - cos;
            pairs.push(PairStats {
                a: a.name().to_string(),
                b: b.name().to_string(),
                pearson: compare::pearson(a, b)?,
                spearman: compare::spearman(a, b)?,
                cosine: cos,
                restricted_spearman: compare::restricted_spearman(a, b).ok(),
            });
        }
    }
    let distances = PortfolioDistanceMatrix {
        names: selected.iter().map(|c| c.name().to_string()).collect(),
        d,
    };

    let dist_path = store_dir.join("cities_dist.tsv");
    let net_path = store_dir.join("cities.net");
    let vos_map_path = store_dir.join("cos_map.txt");
    let vos_net_path = store_dir.join("cos_net.txt");
    export::write_distance_matrix(&distances, &dist_path)?;
    // Pajek network among the sets, weighted by cosine
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let cos = distances.similarity(i, j);
            if cos > 0.0 {
                edges.push((i, j, cos));
            }
        }
    }
    let city_graph = network::SimilarityGraph::new(distances.names.clone(), edges);
    export::write_pajek_net(&city_graph, &net_path)?;
    let weights: Vec<f64> = selected.iter().map(|c| c.total() as f64).collect();
    export::write_vosviewer_cities(&distances, &weights, &vos_map_path, &vos_net_path, threshold)?;

    Ok(CompareReport {
        pairs,
        distances,
        outputs: vec![dist_path, net_path, vos_map_path, vos_net_path],
    })
}

/// Build the co-occurrence graph of a record set and compute the
/// cohesion report. Cohesion needs patent-level class pairs, so this
/// reads record files rather than the marginal matrix store.
pub fn cohesion_from_files(
    inputs: &[PathBuf],
    level: Level,
    class_mode: ClassMode,
    known: Option<&HashSet<String>>,
    year: Option<i32>,
) -> Result<(CooccurrenceMatrix, CohesionReport<f64>)> {
    let mut all = Vec::new();
    for path in inputs {
        all.extend(ingest::parse_records(&fs::read_to_string(path)?)?.records);
    }
    let (mut records, _) = ingest::dedup_records(all);
    if let Some(year) = year {
        records = ingest::filter_by_year(records, year);
    }
    let coocc = network::cooccurrence(&records, level, class_mode, known)?;
    if coocc.len() < 2 {
        return Err(Error::DegenerateGraph(format!(
            "only {} occupied class(es); cohesion needs at least 2",
            coocc.len()
        )));
    }
    let report = network::cohesion_report::<f64>(&coocc);
    Ok((coocc, report))
}

/// Re-emit the per-set map files for an existing matrix-store column
/// (no co-occurrence products: those need patent-level records).
pub fn export_set(
    store_dir: &Path,
    level: Level,
    basemap_matrix: &Path,
    basemap_layout: &Path,
    set_name: &str,
    out_dir: &Path,
    threshold: f64,
) -> Result<Vec<PathBuf>> {
    let basemap: ClassSimilarityMap<f64> = load_basemap(basemap_matrix, basemap_layout, level)?;
    let store =
        MatrixStore::open(&store_dir.join(MATRIX_FILE), level, &basemap.codes().to_vec())?;
    let column = store.column(set_name).cloned().ok_or_else(|| Error::UnknownName {
        name: set_name.to_string(),
        valid: store.names(),
    })?;
    fs::create_dir_all(out_dir)?;
    let tag = level_tag(level);
    let vos_map_path = out_dir.join(format!("vos{tag}.txt"));
    let vos_net_path = out_dir.join(format!("vos{tag}n.txt"));
    let vec_path = out_dir.join(format!("ipc{tag}.vec"));
    let clu_path = out_dir.join(format!("ipc{tag}.cls"));
    export::write_vosviewer(&column, &basemap, &vos_map_path, &vos_net_path, threshold)?;
    let values: Vec<f64> = column.counts().iter().map(|&c| c as f64).collect();
    export::write_pajek_vec(&values, basemap.len(), &vec_path)?;
    let clusters: Vec<u32> = (0..basemap.len()).map(|i| basemap.cluster(i)).collect();
    export::write_pajek_clu(&clusters, basemap.len(), &clu_path)?;
    Ok(vec![vos_map_path, vos_net_path, vec_path, clu_path])
}
