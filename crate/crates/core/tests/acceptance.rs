//! Acceptance suite: eight end-to-end criteria with pinned tolerances.
//!
//! Every criterion prints a single `acceptance <n> <name>: PASS` line on
//! success; a failing criterion fails its test. Reference values are
//! either frozen from independent oracle computations or recomputed
//! in-test by deliberately naive implementations (double loops, BFS,
//! textbook formulas) that share no code with the library.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use patport::compare;
use patport::diversity;
use patport::error::Error;
use patport::export;
use patport::ingest::{self, build_search_string, CbsaGroup, QuerySpec};
use patport::network::{self, CohesionReport, SimilarityGraph};
use patport::pipeline::{self, RunConfig, MATRIX_FILE, RAO_FILE};
use patport::portfolio::{ClassMode, ClassVector, Counting, MatrixStore, RaoStore};
use patport::taxonomy::{write_basemap, ClassSimilarityMap, Level};

const TOL_ORACLE: f64 = 1e-12;
const TOL_GRAPH: f64 = 1e-9;

fn approx(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn assert_close(label: &str, got: f64, want: f64, tol: f64) {
    assert!(approx(got, want, tol), "{label}: got {got}, want {want} (tol {tol})");
}

// ---------------------------------------------------------------- 1 ---

#[test]
fn criterion_1_search_strings() {
    let cases: Vec<(QuerySpec, &str)> = vec![
        (
            QuerySpec::CityCountry {
                cities: vec!["amsterdam".into()],
                country: "nl".into(),
                year: 2014,
            },
            "ic/amsterdam and icn/nl and isd/2014$$",
        ),
        (
            QuerySpec::CityState { cities: vec!["boston".into()], state: "ma".into(), year: 2014 },
            "ic/boston and is/ma and isd/2014$$",
        ),
        (
            QuerySpec::CityCountry {
                cities: vec!["beer-sheva".into(), "beersheva".into()],
                country: "il".into(),
                year: 2014,
            },
            "(ic/beer-sheva or ic/beersheva) and icn/il and isd/2014$$",
        ),
        (
            QuerySpec::Cbsa {
                groups: vec![
                    CbsaGroup {
                        state: "MA".into(),
                        places: ["Essex", "Middlesex", "Norfolk", "Plymouth", "Suffolk", "Boston",
                            "Cambridge"]
                            .map(String::from)
                            .to_vec(),
                    },
                    CbsaGroup {
                        state: "NH".into(),
                        places: ["Quincy", "Rockingham", "Strafford"].map(String::from).to_vec(),
                    },
                ],
                year: 2014,
            },
            "(ic/(Essex OR Middlesex OR Norfolk OR Plymouth OR Suffolk OR Boston OR Cambridge) \
             AND IS/MA) OR (ic/(Quincy OR Rockingham OR Strafford) AND IS/NH) AND ISD/2014$$",
        ),
        (
            QuerySpec::Cbsa {
                groups: vec![CbsaGroup {
                    state: "GA".into(),
                    places: ["Atlanta", "Sandy Springs", "Marietta", "Barrow", "Bartow", "Butts",
                        "Carroll", "Cherokee", "Clayton", "Cobb", "Coweta", "Dawson", "DeKalb",
                        "Douglas", "Fayette", "Forsyth", "Fulton", "Gwinnett", "Haralson",
                        "Heard", "Henry", "Jasper", "Lamar", "Meriwether", "Newton", "Paulding",
                        "Pickens", "Pike", "Rockdale", "Spalding", "Walton"]
                        .map(String::from)
                        .to_vec(),
                }],
                year: 2014,
            },
            "IS/GA and isd/2014$$ and ic/(Atlanta OR \"Sandy Springs\" OR Marietta OR Barrow OR \
             Bartow OR Butts OR Carroll OR Cherokee OR Clayton OR Cobb OR Coweta OR Dawson OR \
             DeKalb OR Douglas OR Fayette OR Forsyth OR Fulton OR Gwinnett OR Haralson OR Heard \
             OR Henry OR Jasper OR Lamar OR Meriwether OR Newton OR Paulding OR Pickens OR Pike \
             OR Rockdale OR Spalding OR Walton)",
        ),
        (
            QuerySpec::Cbsa {
                groups: vec![CbsaGroup {
                    state: "CA".into(),
                    places: ["San Francisco", "Oakland", "Fremont", "Alameda", "Contra Costa",
                        "Marin", "San Mateo"]
                        .map(String::from)
                        .to_vec(),
                }],
                year: 2014,
            },
            "IS/CA and isd/2014$$ and ic/(\"San Francisco\" OR Oakland OR Fremont OR Alameda OR \
             \"Contra Costa\" OR Marin OR \"San Mateo\")",
        ),
        (
            QuerySpec::Cbsa {
                groups: vec![CbsaGroup { state: "CO".into(), places: vec!["Boulder".into()] }],
                year: 2014,
            },
            "IS/CO and isd/2014$$ and ic/Boulder",
        ),
    ];
    for (spec, want) in &cases {
        let got = build_search_string(spec).unwrap();
        assert_eq!(&got, want, "search string mismatch for {spec:?}");
    }
    println!("acceptance 1 search-strings: PASS");
}

// ---------------------------------------------------------------- 2 ---

fn toy_map(n: usize, rng: &mut ChaCha8Rng) -> ClassSimilarityMap<f64> {
    let codes: Vec<String> = (0..n).map(|i| format!("A{:02}B", i)).collect();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let v: f64 = rng.gen_range(0.0..1.0);
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    let coords = (0..n).map(|i| (i as f64, 0.5 * i as f64)).collect();
    let clusters = (0..n).map(|i| 1 + (i % 3) as u32).collect();
    ClassSimilarityMap::from_parts(Level::Ipc4, codes, values, coords, clusters).unwrap()
}

#[test]
fn criterion_2_rao_stirling_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    for case in 0..1000 {
        let n = rng.gen_range(1..=20usize);
        let map = toy_map(n, &mut rng);
        let mut counts: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=50u64)).collect();
        if counts.iter().all(|&c| c == 0) {
            counts[rng.gen_range(0..n)] = 1;
        }
        let v = ClassVector::new("t", Level::Ipc4, counts.clone(), 0).unwrap();

        // naive double-loop oracle in plain f64
        let total: u64 = counts.iter().sum();
        let p: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
        let mut delta_o = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    delta_o += p[i] * p[j] * (1.0 - map.similarity(i, j));
                }
            }
        }

        let pv = diversity::proportions::<f64>(&v).unwrap();
        let delta = diversity::rao_stirling(&pv, &map).unwrap();
        assert_close(&format!("case {case} rao_delta"), delta, delta_o, TOL_ORACLE);

        // the true-diversity identity must hold in the same arithmetic
        let td = diversity::true_diversity(delta).unwrap();
        assert_eq!(td, 1.0 / (1.0 - delta), "case {case} true diversity identity");

        // identity similarity map: Rao-Stirling collapses to Gini-Simpson
        let mut eye = vec![0.0; n * n];
        for i in 0..n {
            eye[i * n + i] = 1.0;
        }
        let id_map = ClassSimilarityMap::from_parts(
            Level::Ipc4,
            map.codes().to_vec(),
            eye,
            (0..n).map(|i| (i as f64, 0.0)).collect(),
            vec![1; n],
        )
        .unwrap();
        let delta_id = diversity::rao_stirling(&pv, &id_map).unwrap();
        let gs = diversity::gini_simpson(&pv);
        assert_close(&format!("case {case} identity-map"), delta_id, gs, TOL_ORACLE);
    }
    println!("acceptance 2 rao-stirling-oracle: PASS");
}

// ---------------------------------------------------------------- 3 ---

/// Internal arithmetic of the published Paris/Toulouse cohesion table:
/// the ratio measures must be reproducible from the integer measures of
/// the same column to within rounding (3 published decimals).
#[test]
fn criterion_3_cohesion_table_arithmetic() {
    let round3 = |x: f64| (x * 1000.0).round() / 1000.0;
    // Paris: 226 nodes, avg degree 8.159, 25 components
    assert_close("paris component ratio", round3(24.0 / 225.0), 0.107, 0.0005);
    assert_close("paris density", round3(8.159 / 225.0), 0.036, 0.0005);
    // Toulouse: 110 nodes, avg degree 6.855, 16 components
    assert_close("toulouse component ratio", round3(15.0 / 109.0), 0.138, 0.0005);
    assert_close("toulouse density", round3(6.855 / 109.0), 0.063, 0.0005);
    // complement pairs in both columns sum to one
    assert_eq!(0.775 + 0.225, 1.0, "paris breadth + compactness");
    assert_eq!(0.786 + 0.214, 1.0, "toulouse breadth + compactness");
    assert_eq!(0.256 + 0.744, 1.0, "paris fragmentation + connectedness");
    assert_eq!(0.387 + 0.613, 1.0, "toulouse fragmentation + connectedness");
    println!("acceptance 3 cohesion-table-arithmetic: PASS");
}

// ---------------------------------------------------------------- 4 ---

/// Deliberately naive reference implementation of the cohesion report.
struct OracleCohesion {
    avg_degree: f64,
    h_index: usize,
    centralization: f64,
    density: f64,
    components: usize,
    component_ratio: f64,
    connectedness: f64,
    closure: Option<f64>,
    avg_distance: Option<f64>,
    sd_distance: Option<f64>,
    diameter: Option<usize>,
    compactness: f64,
}

fn oracle_cohesion(n: usize, edges: &[(usize, usize)]) -> OracleCohesion {
    assert!(n >= 3);
    let mut adj = vec![vec![false; n]; n];
    for &(i, j) in edges {
        adj[i][j] = true;
        adj[j][i] = true;
    }
    let deg: Vec<usize> = (0..n).map(|i| adj[i].iter().filter(|&&b| b).count()).collect();
    let avg_degree = 2.0 * edges.len() as f64 / n as f64;

    let mut h_index = 0;
    for h in 1..=n {
        if deg.iter().filter(|&&d| d >= h).count() >= h {
            h_index = h;
        }
    }

    let dmax = *deg.iter().max().unwrap();
    let centralization =
        deg.iter().map(|&d| (dmax - d) as f64).sum::<f64>() / ((n - 1) as f64 * (n - 2) as f64);
    let density = edges.len() as f64 / (n as f64 * (n - 1) as f64 / 2.0);

    // all-pairs shortest paths by repeated BFS over the boolean matrix
    let mut dist = vec![vec![usize::MAX; n]; n];
    for s in 0..n {
        dist[s][s] = 0;
        let mut frontier = vec![s];
        let mut d = 0;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for &u in &frontier {
                for v in 0..n {
                    if adj[u][v] && dist[s][v] == usize::MAX {
                        dist[s][v] = d;
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
    }

    // components by reachability
    let mut seen = vec![false; n];
    let mut components = 0;
    for s in 0..n {
        if !seen[s] {
            components += 1;
            for v in 0..n {
                if dist[s][v] != usize::MAX {
                    seen[v] = true;
                }
            }
        }
    }
    let component_ratio = (components - 1) as f64 / (n - 1) as f64;

    let mut reachable = 0u64;
    let mut finite: Vec<usize> = Vec::new();
    let mut inv = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j && dist[i][j] != usize::MAX {
                reachable += 1;
                finite.push(dist[i][j]);
                inv += 1.0 / dist[i][j] as f64;
            }
        }
    }
    let pairs = (n * (n - 1)) as f64;
    let connectedness = reachable as f64 / pairs;
    let compactness = inv / pairs;

    let mut triangles = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                if adj[i][j] && adj[j][k] && adj[i][k] {
                    triangles += 1;
                }
            }
        }
    }
    let triples: u64 = deg.iter().map(|&d| (d * d.saturating_sub(1) / 2) as u64).sum();
    let closure = (triples > 0).then(|| 3.0 * triangles as f64 / triples as f64);

    let (avg_distance, sd_distance, diameter) = if finite.is_empty() {
        (None, None, None)
    } else {
        let m = finite.iter().map(|&d| d as f64).sum::<f64>() / finite.len() as f64;
        let var =
            finite.iter().map(|&d| (d as f64 - m).powi(2)).sum::<f64>() / finite.len() as f64;
        (Some(m), Some(var.sqrt()), finite.iter().copied().max())
    };

    OracleCohesion {
        avg_degree,
        h_index,
        centralization,
        density,
        components,
        component_ratio,
        connectedness,
        closure,
        avg_distance,
        sd_distance,
        diameter,
        compactness,
    }
}

fn assert_opt_close(label: &str, got: Option<f64>, want: Option<f64>, tol: f64) {
    match (got, want) {
        (Some(g), Some(w)) => assert_close(label, g, w, tol),
        (None, None) => {}
        _ => panic!("{label}: got {got:?}, want {want:?}"),
    }
}

#[test]
fn criterion_4_cohesion_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    for case in 0..200 {
        let n = rng.gen_range(5..=15usize);
        let p: f64 = rng.gen_range(0.05..0.6);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(p) {
                    // exercise the normalization path with swapped ends
                    if rng.gen_bool(0.5) {
                        edges.push((j, i));
                    } else {
                        edges.push((i, j));
                    }
                }
            }
        }
        let r: CohesionReport<f64> = network::cohesion_from_edges(n, &edges);
        let normalized: Vec<(usize, usize)> =
            edges.iter().map(|&(i, j)| if i <= j { (i, j) } else { (j, i) }).collect();
        let o = oracle_cohesion(n, &normalized);

        let tag = |m: &str| format!("case {case} (n={n}, e={}) {m}", edges.len());
        assert_close(&tag("avg_degree"), r.avg_degree, o.avg_degree, TOL_GRAPH);
        assert_eq!(r.indeg_h_index, o.h_index, "{}", tag("h_index"));
        assert_close(&tag("centralization"), r.deg_centralization.unwrap(), o.centralization, TOL_GRAPH);
        assert_eq!(r.out_central, r.deg_centralization, "{}", tag("out_central"));
        assert_eq!(r.in_central, r.deg_centralization, "{}", tag("in_central"));
        assert_close(&tag("density"), r.density.unwrap(), o.density, TOL_GRAPH);
        assert_eq!(r.components, o.components, "{}", tag("components"));
        assert_close(&tag("component_ratio"), r.component_ratio.unwrap(), o.component_ratio, TOL_GRAPH);
        assert_close(&tag("connectedness"), r.connectedness.unwrap(), o.connectedness, TOL_GRAPH);
        assert_opt_close(&tag("closure"), r.closure, o.closure, TOL_GRAPH);
        assert_opt_close(&tag("avg_distance"), r.avg_distance, o.avg_distance, TOL_GRAPH);
        assert_opt_close(&tag("sd_distance"), r.sd_distance, o.sd_distance, TOL_GRAPH);
        assert_eq!(r.diameter, o.diameter, "{}", tag("diameter"));
        assert_close(&tag("compactness"), r.compactness.unwrap(), o.compactness, TOL_GRAPH);

        // exact identities, no tolerance
        assert_eq!(r.breadth.unwrap() + r.compactness.unwrap(), 1.0, "{}", tag("breadth identity"));
        assert_eq!(
            r.fragmentation.unwrap() + r.connectedness.unwrap(),
            1.0,
            "{}",
            tag("fragmentation identity")
        );
        assert_eq!(
            r.density.unwrap(),
            r.avg_degree / (n - 1) as f64,
            "{}",
            tag("density identity")
        );
    }
    println!("acceptance 4 cohesion-oracle: PASS");
}

// ---------------------------------------------------------------- 5 ---

fn oracle_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den =
        (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() * y.iter().map(|b| (b - my).powi(2)).sum::<f64>())
            .sqrt();
    num / den
}

fn oracle_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let less = x.iter().filter(|&&u| u < v).count() as f64;
            let equal = x.iter().filter(|&&u| u == v).count() as f64;
            less + (equal - 1.0) / 2.0 + 1.0
        })
        .collect()
}

fn constant(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

#[test]
fn criterion_5_correlation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    for case in 0..1000 {
        let m = rng.gen_range(3..=25usize);
        // small integer values produce heavy rank ties
        let mut x: Vec<f64> = (0..m).map(|_| rng.gen_range(0..=4u64) as f64).collect();
        let mut y: Vec<f64> = (0..m).map(|_| rng.gen_range(0..=4u64) as f64).collect();
        if constant(&x) {
            x[0] += 1.0;
        }
        if constant(&y) {
            y[0] += 1.0;
        }

        let r = compare::pearson_slices::<f64>(&x, &y).unwrap();
        assert_close(&format!("case {case} pearson"), r, oracle_pearson(&x, &y), TOL_ORACLE);

        let rho = compare::spearman_slices::<f64>(&x, &y).unwrap();
        let rho_o = oracle_pearson(&oracle_ranks(&x), &oracle_ranks(&y));
        assert_close(&format!("case {case} spearman"), rho, rho_o, TOL_ORACLE);

        let cos = compare::cosine_slices::<f64>(&x, &y, "x", "y").unwrap();
        let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let cos_o = dot
            / (x.iter().map(|a| a * a).sum::<f64>().sqrt()
                * y.iter().map(|b| b * b).sum::<f64>().sqrt());
        assert_close(&format!("case {case} cosine"), cos, cos_o, TOL_ORACLE);

        // restricted Spearman on the joint positive support
        let cx: Vec<u64> = x.iter().map(|&v| v as u64).collect();
        let cy: Vec<u64> = y.iter().map(|&v| v as u64).collect();
        let vx = ClassVector::new("x", Level::Ipc4, cx.clone(), 0).unwrap();
        let vy = ClassVector::new("y", Level::Ipc4, cy.clone(), 0).unwrap();
        let (sx, sy): (Vec<f64>, Vec<f64>) = cx
            .iter()
            .zip(&cy)
            .filter(|(&a, &b)| a > 0 && b > 0)
            .map(|(&a, &b)| (a as f64, b as f64))
            .unzip();
        let lib = compare::restricted_spearman::<f64>(&vx, &vy);
        if sx.len() < 2 || constant(&sx) || constant(&sy) {
            assert!(lib.is_err(), "case {case} restricted: expected undefined");
        } else {
            let (rho, size) = lib.unwrap();
            assert_eq!(size, sx.len(), "case {case} restricted size");
            let rho_o = oracle_pearson(&oracle_ranks(&sx), &oracle_ranks(&sy));
            assert_close(&format!("case {case} restricted rho"), rho, rho_o, TOL_ORACLE);
        }
    }
    // constant input is undefined, not zero
    assert!(compare::pearson_slices::<f64>(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    println!("acceptance 5 correlation-oracle: PASS");
}

// ---------------------------------------------------------------- 6 ---

#[test]
fn criterion_6_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6006);

    for case in 0..100 {
        // Pajek .net round trip; weights are 3-decimal fractions so the
        // 6-significant-digit output is lossless
        let n = rng.gen_range(2..=12usize);
        let nodes: Vec<String> = (0..n).map(|i| format!("N{:02}X", i)).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(0.4) {
                    edges.push((i, j, rng.gen_range(1..=999u32) as f64 / 1000.0));
                }
            }
        }
        let g = SimilarityGraph::new(nodes, edges);
        let net_path = dir.path().join("roundtrip.net");
        export::write_pajek_net(&g, &net_path).unwrap();
        let first = fs::read(&net_path).unwrap();
        let g2 = export::read_pajek_net(&net_path).unwrap();
        assert_eq!(g, g2, "case {case}: pajek net round trip");
        export::write_pajek_net(&g2, &net_path).unwrap();
        assert_eq!(first, fs::read(&net_path).unwrap(), "case {case}: pajek net determinism");

        // .vec and .clu round trips
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=50u64) as f64).collect();
        let vec_path = dir.path().join("roundtrip.vec");
        export::write_pajek_vec(&values, n, &vec_path).unwrap();
        assert_eq!(values, export::read_pajek_vec(&vec_path).unwrap(), "case {case}: vec");
        let clusters: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=5u32)).collect();
        let clu_path = dir.path().join("roundtrip.cls");
        export::write_pajek_clu(&clusters, n, &clu_path).unwrap();
        assert_eq!(clusters, export::read_pajek_clu(&clu_path).unwrap(), "case {case}: clu");

        // tagged record round trip: render ∘ parse is idempotent
        let pool = ["A01B 1/00", "B64C 1/06", "G06F 17/30", "H04L 29/06"];
        let mut text = String::new();
        let k = rng.gen_range(1..=5usize);
        for p in 0..k {
            if p > 0 {
                text.push_str("----\n");
            }
            text.push_str(&format!("PN US{case:03}{p:02}\nISD 2014{:02}{:02}\n",
                rng.gen_range(1..=12u32), rng.gen_range(1..=28u32)));
            text.push_str("IC testcity||NL\n");
            for _ in 0..rng.gen_range(1..=3usize) {
                text.push_str(&format!("CL {}\n", pool[rng.gen_range(0..pool.len())]));
            }
        }
        let records = ingest::parse_records(&text).unwrap().records;
        let s1 = export::render_records(&records);
        let records2 = ingest::parse_records(&s1).unwrap().records;
        assert_eq!(records, records2, "case {case}: record round trip");
        assert_eq!(s1, export::render_records(&records2), "case {case}: record determinism");

        // VOSviewer map row count equals variety
        let map = toy_map(10, &mut rng);
        let counts: Vec<u64> = (0..10).map(|_| rng.gen_range(0..=5u64)).collect();
        if counts.iter().all(|&c| c == 0) {
            continue;
        }
        let column = ClassVector::new("t", Level::Ipc4, counts, 0).unwrap();
        let map_path = dir.path().join("vos4.txt");
        let net_path = dir.path().join("vos4n.txt");
        export::write_vosviewer(&column, &map, &map_path, &net_path, 0.2).unwrap();
        let rows = fs::read_to_string(&map_path).unwrap().lines().count() - 1;
        assert_eq!(rows as u64, diversity::variety(&column), "case {case}: vos map rows");
    }
    println!("acceptance 6 export-round-trips: PASS");
}

// --------------------------------------------------------- fixtures ---

/// Six-class base map used by the end-to-end criteria.
fn fixture_basemap(dir: &Path) -> (PathBuf, PathBuf) {
    let codes = ["A01B", "B64C", "C07D", "G06F", "H04L", "Y02E"].map(String::from).to_vec();
    #[rustfmt::skip]
    let values = vec![
        1.0, 0.2, 0.1, 0.0, 0.0, 0.4,
        0.2, 1.0, 0.3, 0.1, 0.0, 0.0,
        0.1, 0.3, 1.0, 0.2, 0.1, 0.0,
        0.0, 0.1, 0.2, 1.0, 0.6, 0.1,
        0.0, 0.0, 0.1, 0.6, 1.0, 0.2,
        0.4, 0.0, 0.0, 0.1, 0.2, 1.0,
    ];
    let coords = (0..6).map(|i| (i as f64, 0.5 * i as f64)).collect();
    let clusters = vec![1, 1, 2, 2, 3, 3];
    let map =
        ClassSimilarityMap::<f64>::from_parts(Level::Ipc4, codes, values, coords, clusters)
            .unwrap();
    let matrix = dir.join("basemap_matrix.tsv");
    let layout = dir.join("basemap_layout.tsv");
    write_basemap(&map, &matrix, &layout).unwrap();
    (matrix, layout)
}

fn fixture_records(dir: &Path, city: &str, start_pn: u32, patents: &[&[&str]]) -> PathBuf {
    let mut text = String::new();
    for (p, classes) in patents.iter().enumerate() {
        if p > 0 {
            text.push_str("----\n");
        }
        text.push_str(&format!("PN US{}\nISD 2014{:02}07\nIC {city}||FR\n", start_pn + p as u32, p + 1));
        for c in *classes {
            text.push_str(&format!("CL {c}\n"));
        }
    }
    let path = dir.join(format!("{city}.txt"));
    fs::write(&path, text).unwrap();
    path
}

fn fixture_config(
    set: &str,
    input: PathBuf,
    matrix: &Path,
    layout: &Path,
    store: &Path,
) -> RunConfig {
    RunConfig {
        set_name: set.to_string(),
        level: Level::Ipc4,
        inputs: vec![input],
        tabular_inputs: vec![],
        basemap_matrix: matrix.to_path_buf(),
        basemap_layout: layout.to_path_buf(),
        store_dir: store.to_path_buf(),
        year: Some(2014),
        counting: Counting::Set,
        class_mode: ClassMode::Lenient,
        threshold: 0.2,
    }
}

// ---------------------------------------------------------------- 7 ---

#[test]
fn criterion_7_end_to_end_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let (matrix, layout) = fixture_basemap(dir.path());
    let store = dir.path().join("store");

    let alpha = fixture_records(dir.path(), "alpha", 100, &[
        &["G06F 17/30", "H04L 9/00"],
        &["G06F 3/01"],
        &["H04L 29/06", "Y02E 10/50"],
        &["G06F 1/16", "H04L 12/28"],
    ]);
    let beta = fixture_records(dir.path(), "beta", 200, &[
        &["A01B 1/00"],
        &["A01B 3/04", "Y02E 10/40"],
        &["Y02E 10/70"],
        &["A01B 15/02", "B64C 1/06"],
    ]);
    let gamma = fixture_records(dir.path(), "gamma", 300, &[
        &["C07D 209/00", "G06F 17/30"],
        &["C07D 213/00"],
        &["B64C 1/06", "C07D 233/00"],
        &["G06F 9/44", "H04L 29/08"],
    ]);

    // frozen oracle goldens: name -> (variety, gini, delta, true diversity)
    let golden: [(&str, u64, f64, f64, f64); 3] = [
        ("alpha", 3, 0.6122448979591837, 0.35510204081632646, 1.5506329113924049),
        ("beta", 3, 0.6111111111111112, 0.4444444444444444, 1.7999999999999998),
        ("gamma", 4, 0.6938775510204082, 0.5387755102040815, 2.1681415929203536),
    ];
    for ((set, input), (_, variety, gini, delta, td)) in
        [("alpha", alpha), ("beta", beta), ("gamma", gamma)].into_iter().zip(&golden)
    {
        let summary = pipeline::run(&fixture_config(set, input, &matrix, &layout, &store)).unwrap();
        assert_eq!(summary.n_patents, 4, "{set} n_patents");
        assert_eq!(summary.variety, *variety, "{set} variety");
        assert_close(&format!("{set} gini"), summary.gini_simpson, *gini, TOL_ORACLE);
        assert_close(&format!("{set} delta"), summary.rao_delta, *delta, TOL_ORACLE);
        assert_close(&format!("{set} true diversity"), summary.true_diversity, *td, TOL_ORACLE);
        assert_eq!(summary.outputs.len(), 8, "{set} output count");
        for path in &summary.outputs {
            assert!(path.exists(), "{set}: missing output {}", path.display());
        }
    }

    // the matrix store holds the exact count columns
    let classes: Vec<String> =
        ["A01B", "B64C", "C07D", "G06F", "H04L", "Y02E"].map(String::from).to_vec();
    let ms = MatrixStore::open(&store.join(MATRIX_FILE), Level::Ipc4, &classes).unwrap();
    assert_eq!(ms.column("alpha").unwrap().counts(), &[0, 0, 0, 3, 3, 1]);
    assert_eq!(ms.column("beta").unwrap().counts(), &[3, 1, 0, 0, 0, 2]);
    assert_eq!(ms.column("gamma").unwrap().counts(), &[0, 1, 3, 2, 1, 0]);

    // the rao store round-trips the summary values exactly
    let rao = RaoStore::open(&store.join(RAO_FILE)).unwrap();
    for (row, (name, variety, gini, delta, td)) in rao.rows().iter().zip(&golden) {
        assert_eq!(row.name, *name);
        assert_eq!(row.variety, *variety);
        assert_close(&format!("{name} stored gini"), row.gini_simpson, *gini, TOL_ORACLE);
        assert_close(&format!("{name} stored delta"), row.rao_delta, *delta, TOL_ORACLE);
        assert_close(&format!("{name} stored 2D"), row.true_diversity, *td, TOL_ORACLE);
    }

    // pairwise statistics against the frozen oracle
    let report =
        pipeline::compare_sets(&store, Level::Ipc4, &matrix, &layout, &[], 0.2).unwrap();
    let pair_golden: [(&str, &str, f64, f64, f64); 3] = [
        ("alpha", "beta", -0.5370861555295746, -0.4918693768379647, 0.12262786789699315),
        ("alpha", "gamma", 0.09685485552825747, 0.07945521577046602, 0.5331139899831831),
        ("beta", "gamma", -0.811502671200689, -0.8754275592730114, 0.06900655593423542),
    ];
    assert_eq!(report.pairs.len(), 3);
    for (p, (a, b, pearson, spearman, cosine)) in report.pairs.iter().zip(&pair_golden) {
        assert_eq!((p.a.as_str(), p.b.as_str()), (*a, *b));
        assert_close(&format!("{a}~{b} pearson"), p.pearson, *pearson, TOL_ORACLE);
        assert_close(&format!("{a}~{b} spearman"), p.spearman, *spearman, TOL_ORACLE);
        assert_close(&format!("{a}~{b} cosine"), p.cosine, *cosine, TOL_ORACLE);
        // no fixture pair shares two non-constant positive classes
        assert!(p.restricted_spearman.is_none(), "{a}~{b} restricted");
    }
    assert_close("alpha-beta distance", report.distances.distance(0, 1), 0.8773721321030068, TOL_ORACLE);
    assert_close("alpha-gamma distance", report.distances.distance(0, 2), 0.46688601001681695, TOL_ORACLE);
    assert_close("beta-gamma distance", report.distances.distance(1, 2), 0.9309934440657646, TOL_ORACLE);

    // alpha cohesion: path graph G06F - H04L - Y02E
    let known: HashSet<String> = classes.iter().cloned().collect();
    let (coocc, r) = pipeline::cohesion_from_files(
        &[dir.path().join("alpha.txt")],
        Level::Ipc4,
        ClassMode::Lenient,
        Some(&known),
        Some(2014),
    )
    .unwrap();
    assert_eq!(coocc.codes(), &["G06F".to_string(), "H04L".to_string(), "Y02E".to_string()]);
    assert_eq!(coocc.weight(0, 1), 2, "G06F-H04L co-occurrences");
    assert_eq!(coocc.weight(1, 2), 1, "H04L-Y02E co-occurrences");
    assert_eq!((r.node_count, r.edge_count, r.components), (3, 2, 1));
    assert_close("alpha avg degree", r.avg_degree, 4.0 / 3.0, TOL_ORACLE);
    assert_close("alpha centralization", r.deg_centralization.unwrap(), 1.0, TOL_ORACLE);
    assert_close("alpha density", r.density.unwrap(), 2.0 / 3.0, TOL_ORACLE);
    assert_eq!(r.component_ratio, Some(0.0));
    assert_eq!(r.connectedness, Some(1.0));
    assert_eq!(r.closure, Some(0.0));
    assert_close("alpha avg distance", r.avg_distance.unwrap(), 4.0 / 3.0, TOL_ORACLE);
    assert_close("alpha sd distance", r.sd_distance.unwrap(), 0.4714045207910317, TOL_ORACLE);
    assert_eq!(r.diameter, Some(2));
    assert_close("alpha compactness", r.compactness.unwrap(), 5.0 / 6.0, TOL_ORACLE);
    assert_close("alpha breadth", r.breadth.unwrap(), 1.0 / 6.0, TOL_ORACLE);

    println!("acceptance 7 end-to-end-fixture: PASS");
}

// ---------------------------------------------------------------- 8 ---

#[test]
fn criterion_8_store_discipline() {
    let dir = tempfile::tempdir().unwrap();
    let (matrix, layout) = fixture_basemap(dir.path());
    let store = dir.path().join("store");
    let codes = ["A01B", "B64C", "C07D", "G06F", "H04L", "Y02E"];

    // twenty disjoint single-city runs with distinct, non-constant columns
    let mut pn = 1000;
    for k in 0..20 {
        let name = format!("c{k:02}");
        let a = format!("{} 1/00", codes[k % 6]);
        let b = format!("{} 2/00", codes[(k + 1) % 6]);
        let patents: Vec<Vec<&str>> = vec![vec![&a], vec![&a], vec![&b]];
        let slices: Vec<&[&str]> = patents.iter().map(|p| p.as_slice()).collect();
        let input = fixture_records(dir.path(), &name, pn, &slices);
        pn += 10;
        pipeline::run(&fixture_config(&name, input, &matrix, &layout, &store)).unwrap();
    }

    // re-running an existing name fails and leaves the stores untouched
    let before_matrix = fs::read(store.join(MATRIX_FILE)).unwrap();
    let before_rao = fs::read(store.join(RAO_FILE)).unwrap();
    let rerun = pipeline::run(&fixture_config(
        "c00",
        dir.path().join("c00.txt"),
        &matrix,
        &layout,
        &store,
    ));
    assert!(matches!(rerun, Err(Error::NameConflict(_))), "rerun must be a name conflict");
    assert_eq!(before_matrix, fs::read(store.join(MATRIX_FILE)).unwrap(), "matrix store changed");
    assert_eq!(before_rao, fs::read(store.join(RAO_FILE)).unwrap(), "rao store changed");

    // comparing all twenty sets yields a full, finite 20x20 distance matrix
    let report =
        pipeline::compare_sets(&store, Level::Ipc4, &matrix, &layout, &[], 0.2).unwrap();
    assert_eq!(report.distances.len(), 20);
    assert_eq!(report.pairs.len(), 190);
    for i in 0..20 {
        assert_eq!(report.distances.distance(i, i), 0.0, "diagonal {i}");
        for j in 0..20 {
            let d = report.distances.distance(i, j);
            assert!(d.is_finite() && (0.0..=1.0).contains(&d), "distance [{i}][{j}] = {d}");
            assert_eq!(d, report.distances.distance(j, i), "symmetry [{i}][{j}]");
        }
    }
    for path in &report.outputs {
        assert!(path.exists(), "missing comparison output {}", path.display());
    }
    println!("acceptance 8 store-discipline: PASS");
}
