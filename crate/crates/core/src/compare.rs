//! Cross-portfolio statistics: Pearson, Spearman (mean ranks under
//! ties), cosine, and the `1 - cosine` distance matrix among sets.
//!
//! Spearman is computed as the Pearson correlation of average ranks, not
//! the `6*sum(d^2)` shortcut, which is invalid under ties; portfolio
//! vectors carry many zero ties.

use crate::error::Error;
use crate::portfolio::{ClassVector, MatrixStore};
use crate::scalar::{CompensatedSum, Real};
use crate::Result;

fn check_len<R: Real>(x: &[R], y: &[R]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("vectors have lengths {} and {}", x.len(), y.len())));
    }
    Ok(())
}

/// Product-moment correlation of two equal-length slices.
pub fn pearson_slices<R: Real>(x: &[R], y: &[R]) -> Result<R> {
    check_len(x, y)?;
    let n = x.len();
    if n < 2 {
        return Err(Error::UndefinedCorrelation("need at least 2 observations".into()));
    }
    let count = R::from_count(n as u64);
    let mean = |v: &[R]| {
        let mut s = CompensatedSum::new();
        for &e in v {
            s.add(e);
        }
        s.total() / count
    };
    let (mx, my) = (mean(x), mean(y));
    let mut cov = CompensatedSum::new();
    let mut vx = CompensatedSum::new();
    let mut vy = CompensatedSum::new();
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        cov.add(da * db);
        vx.add(da * da);
        vy.add(db * db);
    }
    let denom = (vx.total() * vy.total()).sqrt();
    if denom == R::zero() {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok(cov.total() / denom)
}

/// Pearson correlation of two portfolio columns.
pub fn pearson<R: Real>(x: &ClassVector, y: &ClassVector) -> Result<R> {
    pearson_slices(&to_reals::<R>(x), &to_reals::<R>(y))
}

fn to_reals<R: Real>(v: &ClassVector) -> Vec<R> {
    v.counts().iter().map(|&c| R::from_count(c)).collect()
}

/// Average ranks (1-based); tied values share the mean of their ranks.
pub fn average_ranks<R: Real>(values: &[R]) -> Vec<R> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("no NaN in ranks"));
    let mut ranks = vec![R::zero(); n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // mean of ranks i+1 ..= j+1
        let mean = R::from_count((i + j + 2) as u64) / R::from_count(2);
        for &idx in &order[i..=j] {
            ranks[idx] = mean;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank-order correlation with mean ranks under ties.
pub fn spearman_slices<R: Real>(x: &[R], y: &[R]) -> Result<R> {
    check_len(x, y)?;
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation("need at least 2 observations".into()));
    }
    pearson_slices(&average_ranks(x), &average_ranks(y))
}

pub fn spearman<R: Real>(x: &ClassVector, y: &ClassVector) -> Result<R> {
    spearman_slices(&to_reals::<R>(x), &to_reals::<R>(y))
}

/// Cosine similarity; in `[0, 1]` for non-negative vectors.
pub fn cosine_slices<R: Real>(x: &[R], y: &[R], x_name: &str, y_name: &str) -> Result<R> {
    check_len(x, y)?;
    let mut dot = CompensatedSum::new();
    let mut nx = CompensatedSum::new();
    let mut ny = CompensatedSum::new();
    for (&a, &b) in x.iter().zip(y) {
        dot.add(a * b);
        nx.add(a * a);
        ny.add(b * b);
    }
    if nx.total() == R::zero() {
        return Err(Error::UndefinedCosine(x_name.to_string()));
    }
    if ny.total() == R::zero() {
        return Err(Error::UndefinedCosine(y_name.to_string()));
    }
    Ok(dot.total() / (nx.total().sqrt() * ny.total().sqrt()))
}

pub fn cosine_sim<R: Real>(x: &ClassVector, y: &ClassVector) -> Result<R> {
    cosine_slices(&to_reals::<R>(x), &to_reals::<R>(y), x.name(), y.name())
}

/// Spearman over the classes attributed to both sets (both entries
/// strictly positive); returns the correlation and the subset size.
pub fn restricted_spearman<R: Real>(x: &ClassVector, y: &ClassVector) -> Result<(R, usize)> {
    if x.counts().len() != y.counts().len() {
        return Err(Error::Shape("restricted spearman needs equal-length vectors".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&a, &b) in x.counts().iter().zip(y.counts()) {
        if a > 0 && b > 0 {
            xs.push(R::from_count(a));
            ys.push(R::from_count(b));
        }
    }
    let size = xs.len();
    if size < 2 {
        return Err(Error::UndefinedCorrelation(format!(
            "only {size} classes attributed to both sets"
        )));
    }
    Ok((spearman_slices(&xs, &ys)?, size))
}

/// Symmetric `1 - cosine` distances among the store's columns, zero
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioDistanceMatrix<R: Real> {
    pub names: Vec<String>,
    // row-major n*n
    pub d: Vec<R>,
}

impl<R: Real> PortfolioDistanceMatrix<R> {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> R {
        self.d[i * self.names.len() + j]
    }

    /// Cosine similarity recovered from the stored distance.
    pub fn similarity(&self, i: usize, j: usize) -> R {
        R::one() - self.distance(i, j)
    }
}

/// Pairwise `1 - cosine` distances among all columns of a matrix store.
pub fn distance_matrix<R: Real>(store: &MatrixStore) -> Result<PortfolioDistanceMatrix<R>> {
    let cols = store.columns();
    if cols.len() < 2 {
        return Err(Error::Shape("distance matrix needs at least 2 columns".into()));
    }
    let n = cols.len();
    let mut d = vec![R::zero(); n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let cos = cosine_sim::<R>(&cols[i], &cols[j])?;
            let dist = R::one() - cos;
            d[i * n + j] = dist;
            d[j * n + i] = dist;
        }
    }
    Ok(PortfolioDistanceMatrix {
        names: cols.iter().map(|c| c.name().to_string()).collect(),
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::Level;
    use proptest::prelude::*;

    fn vector(name: &str, counts: Vec<u64>) -> ClassVector {
        ClassVector::new(name, Level::Ipc4, counts, 0).unwrap()
    }

    #[test]
    fn pearson_of_identical_vectors_is_one() {
        let x = vector("x", vec![1, 2, 3, 4]);
        let r: f64 = pearson(&x, &x).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_of_negated_is_minus_one() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| -v + 10.0).collect();
        let r = pearson_slices(&x, &y).unwrap();
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_is_undefined() {
        let x = vector("x", vec![2, 2, 2]);
        let y = vector("y", vec![1, 2, 3]);
        assert!(matches!(pearson::<f64>(&x, &y), Err(Error::UndefinedCorrelation(_))));
        assert!(matches!(spearman::<f64>(&x, &y), Err(Error::UndefinedCorrelation(_))));
    }

    #[test]
    fn spearman_invariant_under_monotone_transform() {
        let x = [3.0f64, 1.0, 4.0, 1.5, 9.0];
        let fx: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let rho = spearman_slices(&fx, &x).unwrap();
        assert!((rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_of_reversed_ranks_is_minus_one() {
        let x = [1.0f64, 2.0, 3.0, 4.0, 5.0];
        let y = [5.0f64, 4.0, 3.0, 2.0, 1.0];
        let rho = spearman_slices(&x, &y).unwrap();
        assert!((rho + 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_ranks_under_ties() {
        let r = average_ranks(&[10.0f64, 20.0, 20.0, 30.0]);
        assert_eq!(r, vec![1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn cosine_basics() {
        let x = vector("x", vec![1, 2, 0]);
        let y = vector("y", vec![0, 0, 5]);
        assert!((cosine_sim::<f64>(&x, &x).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine_sim::<f64>(&x, &y).unwrap(), 0.0);
        let z = vector("z", vec![0, 0, 0]);
        assert!(matches!(cosine_sim::<f64>(&x, &z), Err(Error::UndefinedCosine(_))));
    }

    #[test]
    fn restricted_spearman_on_shared_support() {
        let x = vector("x", vec![3, 0, 2, 5, 0]);
        let y = vector("y", vec![1, 4, 6, 2, 0]);
        let (rho, size) = restricted_spearman::<f64>(&x, &y).unwrap();
        assert_eq!(size, 3); // indices 0, 2, 3
        let expected = spearman_slices(&[3.0, 2.0, 5.0], &[1.0, 6.0, 2.0]).unwrap();
        assert!((rho - expected).abs() < 1e-12);
    }

    #[test]
    fn restricted_spearman_disjoint_supports_undefined() {
        let x = vector("x", vec![1, 0, 2, 0]);
        let y = vector("y", vec![0, 3, 0, 4]);
        assert!(matches!(
            restricted_spearman::<f64>(&x, &y),
            Err(Error::UndefinedCorrelation(_))
        ));
    }

    fn toy_store(cols: Vec<ClassVector>) -> MatrixStore {
        let dir = tempfile::tempdir().unwrap();
        let classes: Vec<String> =
            (0..cols[0].counts().len()).map(|i| format!("A{:02}B", i)).collect();
        let mut store =
            MatrixStore::open(&dir.path().join("matrix.tsv"), Level::Ipc4, &classes).unwrap();
        for c in cols {
            store.append_column(c).unwrap();
        }
        store
    }

    #[test]
    fn duplicate_columns_have_zero_distance() {
        let store = toy_store(vec![
            vector("a", vec![1, 2, 3]),
            vector("b", vec![1, 2, 3]),
        ]);
        let dm: PortfolioDistanceMatrix<f64> = distance_matrix(&store).unwrap();
        assert!(dm.distance(0, 1).abs() < 1e-12);
        assert_eq!(dm.distance(0, 0), 0.0);
    }

    #[test]
    fn orthogonal_columns_have_distance_one() {
        let store = toy_store(vec![
            vector("a", vec![1, 0, 0]),
            vector("b", vec![0, 0, 2]),
        ]);
        let dm: PortfolioDistanceMatrix<f64> = distance_matrix(&store).unwrap();
        assert_eq!(dm.distance(0, 1), 1.0);
    }

    #[test]
    fn distance_matrix_matches_per_pair_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let cols: Vec<ClassVector> = (0..5)
            .map(|i| {
                let counts: Vec<u64> = (0..8).map(|_| rng.gen_range(0..9u64)).collect();
                vector(&format!("c{i}"), counts)
            })
            .collect();
        // ensure nonzero norms
        let cols: Vec<ClassVector> = cols
            .into_iter()
            .map(|c| {
                let mut counts = c.counts().to_vec();
                counts[0] += 1;
                vector(c.name(), counts)
            })
            .collect();
        let store = toy_store(cols.clone());
        let dm: PortfolioDistanceMatrix<f64> = distance_matrix(&store).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let expected = if i == j {
                    0.0
                } else {
                    let x = cols[i].counts();
                    let y = cols[j].counts();
                    let dot: f64 = x.iter().zip(y).map(|(&a, &b)| (a * b) as f64).sum();
                    let nx: f64 = x.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
                    let ny: f64 = y.iter().map(|&b| (b * b) as f64).sum::<f64>().sqrt();
                    1.0 - dot / (nx * ny)
                };
                assert!((dm.distance(i, j) - expected).abs() < 1e-12);
                assert_eq!(dm.distance(i, j), dm.distance(j, i));
            }
        }
    }

    proptest! {
        #[test]
        fn pearson_symmetric_and_scale_invariant(
            x in proptest::collection::vec(0.0f64..50.0, 5..20),
            scale in 0.5f64..4.0,
        ) {
            let y: Vec<f64> = x.iter().rev().cloned().collect();
            let a = pearson_slices(&x, &y);
            let b = pearson_slices(&y, &x);
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!((a - b).abs() < 1e-12);
                let xs: Vec<f64> = x.iter().map(|v| v * scale).collect();
                let c = pearson_slices(&xs, &y).unwrap();
                prop_assert!((a - c).abs() < 1e-10);
            }
        }

        #[test]
        fn spearman_depends_only_on_ranks(
            x in proptest::collection::vec(0u64..10, 5..20),
        ) {
            let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            let y: Vec<f64> = xf.iter().rev().cloned().collect();
            let transformed: Vec<f64> = xf.iter().map(|v| v * v + 3.0).collect();
            let a = spearman_slices(&xf, &y);
            let b = spearman_slices(&transformed, &y);
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
