//! Online k-means: winner-take-all seed updates over a fixed data order.
//!
//! Each input moves only its nearest seed, by `rate * (x - seed)`. Passes
//! over the data repeat until the largest seed displacement over a full
//! pass drops below the convergence tolerance. Initialization is
//! deterministic greedy farthest-point, so identical inputs always produce
//! identical clusterings.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMeansParams {
    /// Number of seed points (clusters).
    pub k: usize,
    /// Small positive learning rate in (0, 1).
    pub learning_rate: f64,
    /// Convergence threshold on the max seed displacement per pass.
    pub convergence_tol: f64,
    pub max_passes: usize,
}

impl KMeansParams {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            learning_rate: 0.1,
            convergence_tol: 1e-6,
            max_passes: 500,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::param("k", "cluster count must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate < 1.0) {
            return Err(Error::param(
                "learning_rate",
                format!("learning rate out of range (0, 1) (got {})", self.learning_rate),
            ));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::param("convergence_tol", "must be positive"));
        }
        if self.max_passes == 0 {
            return Err(Error::param("max_passes", "must be at least 1"));
        }
        Ok(())
    }
}

/// The seed points (cluster representatives).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedPoints {
    dimension: usize,
    seeds: Vec<Vec<f64>>,
}

impl SeedPoints {
    pub fn new(seeds: Vec<Vec<f64>>) -> Result<Self> {
        let dimension = match seeds.first() {
            Some(s) => s.len(),
            None => return Err(Error::param("seeds", "at least one seed required")),
        };
        if seeds.iter().any(|s| s.len() != dimension) {
            return Err(Error::dim("seed dimensionality is not uniform".to_string()));
        }
        if seeds.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::param("seeds", "seeds must be finite"));
        }
        Ok(Self { dimension, seeds })
    }

    pub fn k(&self) -> usize {
        self.seeds.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn seeds(&self) -> &[Vec<f64>] {
        &self.seeds
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(x: &[f64], seeds: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = squared_distance(x, &seeds[0]);
    for (r, s) in seeds.iter().enumerate().skip(1) {
        let d = squared_distance(x, s);
        if d < best_d {
            best_d = d;
            best = r;
        }
    }
    best
}

/// Index of the seed minimizing squared Euclidean distance to `x`;
/// ties go to the lowest index.
pub fn assign(x: &[f64], seeds: &SeedPoints) -> Result<usize> {
    if x.len() != seeds.dimension {
        return Err(Error::dim(format!(
            "point dimension {} does not match seeds dimension {}",
            x.len(),
            seeds.dimension
        )));
    }
    Ok(nearest(x, &seeds.seeds))
}

/// Moves only the winning seed toward `x` by `rate * (x - seed)` and
/// returns the winner's index.
pub fn update_winner(seeds: &mut SeedPoints, x: &[f64], rate: f64) -> Result<usize> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::param("learning_rate", "rate out of range (0, 1)"));
    }
    let w = assign(x, seeds)?;
    for (s, v) in seeds.seeds[w].iter_mut().zip(x) {
        *s += rate * (v - *s);
    }
    Ok(w)
}

/// Deterministic greedy farthest-point initialization: the first seed is
/// the lowest-index point of maximal norm; each next seed is the point
/// maximizing the distance to its nearest chosen seed, ties to the lowest
/// index.
pub fn farthest_point_seeds(data: &[Vec<f64>], k: usize) -> Result<SeedPoints> {
    if data.is_empty() {
        return Err(Error::param("data", "at least one point required"));
    }
    if k == 0 || k > data.len() {
        return Err(Error::KTooLarge {
            k,
            what: "number of points",
            limit: data.len(),
        });
    }
    let dimension = data[0].len();
    if data.iter().any(|x| x.len() != dimension) {
        return Err(Error::dim("point dimensionality is not uniform".to_string()));
    }
    let mut first = 0;
    let mut best_norm: f64 = data[0].iter().map(|v| v * v).sum();
    for (i, x) in data.iter().enumerate().skip(1) {
        let n = x.iter().map(|v| v * v).sum::<f64>();
        if n > best_norm {
            best_norm = n;
            first = i;
        }
    }
    let mut seeds = vec![data[first].clone()];
    while seeds.len() < k {
        let mut choice = 0;
        let mut best_d = -1.0;
        for (i, x) in data.iter().enumerate() {
            let d = seeds
                .iter()
                .map(|s| squared_distance(x, s))
                .fold(f64::INFINITY, f64::min);
            if d > best_d {
                best_d = d;
                choice = i;
            }
        }
        seeds.push(data[choice].clone());
    }
    SeedPoints::new(seeds)
}

/// A fitted clustering: final seeds, per-point labels (0-based), the
/// effective cluster count (reduced when the data has fewer distinct
/// points than `k`), and the number of passes run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMeansFit {
    pub seeds: SeedPoints,
    pub labels: Vec<usize>,
    pub effective_k: usize,
    pub k_reduced: bool,
    pub passes: usize,
}

/// Fits online k-means over `data` in fixed order.
///
/// Cycles through the data applying assign + winner update until the max
/// seed displacement over a full pass is below `convergence_tol` or
/// `max_passes` is reached; a final pure assignment pass produces the
/// labels. A seed that wins no point during a pass is reseeded to the
/// point farthest from it and fitting continues.
///
/// `k` greater than the number of points is an error; `k` greater than the
/// number of *distinct* points is reduced (reported via `k_reduced`).
pub fn fit(data: &[Vec<f64>], params: &KMeansParams) -> Result<KMeansFit> {
    params.validate()?;
    if data.is_empty() {
        return Err(Error::param("data", "at least one point required"));
    }
    let dimension = data[0].len();
    if data.iter().any(|x| x.len() != dimension) {
        return Err(Error::dim("point dimensionality is not uniform".to_string()));
    }
    if params.k > data.len() {
        return Err(Error::KTooLarge {
            k: params.k,
            what: "number of points",
            limit: data.len(),
        });
    }
    let mut distinct: Vec<&[f64]> = Vec::new();
    for x in data {
        if !distinct.iter().any(|d| *d == x.as_slice()) {
            distinct.push(x);
        }
    }
    let effective_k = params.k.min(distinct.len());
    let k_reduced = effective_k < params.k;

    let mut seeds = farthest_point_seeds(data, effective_k)?;
    let mut passes = 0;
    for _ in 0..params.max_passes {
        passes += 1;
        let start = seeds.clone();
        let mut won = vec![false; effective_k];
        for x in data {
            let w = nearest(x, &seeds.seeds);
            won[w] = true;
            for (s, v) in seeds.seeds[w].iter_mut().zip(x) {
                *s += params.learning_rate * (v - *s);
            }
        }
        for r in 0..effective_k {
            if !won[r] {
                reseed_to_farthest(&mut seeds, r, data);
            }
        }
        let displacement = start
            .seeds
            .iter()
            .zip(&seeds.seeds)
            .map(|(a, b)| squared_distance(a, b).sqrt())
            .fold(0.0, f64::max);
        if displacement < params.convergence_tol {
            break;
        }
    }

    let mut labels: Vec<usize> = data.iter().map(|x| nearest(x, &seeds.seeds)).collect();
    // the online repair above almost always suffices; this covers a seed
    // that lost its points between the last update and the pure pass
    for _ in 0..effective_k {
        let empty = (0..effective_k).find(|r| !labels.contains(r));
        match empty {
            Some(r) => {
                reseed_to_farthest(&mut seeds, r, data);
                labels = data.iter().map(|x| nearest(x, &seeds.seeds)).collect();
            }
            None => break,
        }
    }

    Ok(KMeansFit {
        seeds,
        labels,
        effective_k,
        k_reduced,
        passes,
    })
}

fn reseed_to_farthest(seeds: &mut SeedPoints, r: usize, data: &[Vec<f64>]) {
    let mut choice = 0;
    let mut best_d = -1.0;
    for (i, x) in data.iter().enumerate() {
        let d = squared_distance(x, &seeds.seeds[r]);
        if d > best_d {
            best_d = d;
            choice = i;
        }
    }
    seeds.seeds[r] = data[choice].clone();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeds_of(v: Vec<Vec<f64>>) -> SeedPoints {
        SeedPoints::new(v).unwrap()
    }

    #[test]
    fn assign_picks_nearest_and_breaks_ties_low() {
        let seeds = seeds_of(vec![vec![0.0, 0.0], vec![5.0, 5.0]]);
        assert_eq!(assign(&[0.0, 0.0], &seeds).unwrap(), 0);
        assert_eq!(assign(&[4.9, 4.9], &seeds).unwrap(), 1);
        // equidistant point goes to the lowest index
        assert_eq!(assign(&[2.5, 2.5], &seeds).unwrap(), 0);
        assert!(assign(&[1.0], &seeds).is_err());
    }

    #[test]
    fn update_moves_only_the_winner() {
        let mut seeds = seeds_of(vec![vec![0.0, 0.0], vec![5.0, 5.0]]);
        let w = update_winner(&mut seeds, &[1.0, 1.0], 0.1).unwrap();
        assert_eq!(w, 0);
        assert_eq!(seeds.seeds()[0], vec![0.1, 0.1]);
        assert_eq!(seeds.seeds()[1], vec![5.0, 5.0]);
    }

    #[test]
    fn update_with_coincident_point_is_a_fixed_point() {
        let mut seeds = seeds_of(vec![vec![2.0, 3.0]]);
        update_winner(&mut seeds, &[2.0, 3.0], 0.3).unwrap();
        assert_eq!(seeds.seeds()[0], vec![2.0, 3.0]);
    }

    #[test]
    fn repeated_updates_converge_geometrically() {
        let mut seeds = seeds_of(vec![vec![0.0]]);
        for _ in 0..200 {
            update_winner(&mut seeds, &[1.0], 0.1).unwrap();
        }
        assert!((seeds.seeds()[0][0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn farthest_point_init_is_deterministic() {
        let data = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![3.0, 3.0]];
        let s = farthest_point_seeds(&data, 3).unwrap();
        // max norm point first, then the farthest-from-chosen point
        assert_eq!(s.seeds()[0], vec![3.0, 3.0]);
        assert_eq!(s.seeds()[1], vec![0.0, 0.0]);
        // (1,0) and (0,1) tie at distance 1 from (0,0); lower index wins
        assert_eq!(s.seeds()[2], vec![1.0, 0.0]);
    }

    #[test]
    fn fit_separates_two_clusters() {
        let data = vec![
            vec![0.0, 0.0],
            vec![0.0, 0.1],
            vec![5.0, 5.0],
            vec![5.0, 5.1],
        ];
        let fit = fit(&data, &KMeansParams::new(2)).unwrap();
        assert_eq!(fit.labels[0], fit.labels[1]);
        assert_eq!(fit.labels[2], fit.labels[3]);
        assert_ne!(fit.labels[0], fit.labels[2]);
        assert!(!fit.k_reduced);
    }

    #[test]
    fn k_of_one_groups_everything() {
        let data = vec![vec![0.0], vec![1.0], vec![2.0]];
        let fit = fit(&data, &KMeansParams::new(1)).unwrap();
        assert_eq!(fit.labels, vec![0, 0, 0]);
    }

    #[test]
    fn k_above_point_count_is_an_error() {
        let data = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            fit(&data, &KMeansParams::new(3)),
            Err(Error::KTooLarge { .. })
        ));
    }

    #[test]
    fn k_above_distinct_count_is_reduced() {
        let data = vec![vec![0.0], vec![0.0], vec![1.0], vec![1.0]];
        let fit = fit(&data, &KMeansParams::new(3)).unwrap();
        assert!(fit.k_reduced);
        assert_eq!(fit.effective_k, 2);
        assert_eq!(fit.labels[0], fit.labels[1]);
        assert_eq!(fit.labels[2], fit.labels[3]);
    }

    #[test]
    fn final_labels_are_nearest_seed_consistent() {
        let data = vec![
            vec![0.0, 0.3],
            vec![0.4, 0.1],
            vec![2.0, 2.0],
            vec![2.2, 1.9],
            vec![5.0, 0.0],
        ];
        let f = fit(&data, &KMeansParams::new(3)).unwrap();
        for (x, &label) in data.iter().zip(&f.labels) {
            assert_eq!(assign(x, &f.seeds).unwrap(), label);
        }
        for r in 0..f.effective_k {
            assert!(f.labels.contains(&r), "cluster {r} is empty");
        }
    }

    #[test]
    fn rejects_bad_params() {
        let data = vec![vec![0.0], vec![1.0]];
        let mut p = KMeansParams::new(2);
        p.learning_rate = 1.0;
        assert!(fit(&data, &p).is_err());
        let mut p = KMeansParams::new(2);
        p.convergence_tol = 0.0;
        assert!(fit(&data, &p).is_err());
    }
}
