//! Representative users and items for recommender data.
//!
//! Ratings are densified into a users x items matrix with zeros for missing
//! entries. Representatives are the rows selected by maxvol or rect_maxvol on
//! the left (users) or right (items) factor of a rank-`k` truncated SVD.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{least_squares_min_norm, svd};
use crate::matrix::DenseMatrix;
use crate::random::{rng_from_seed, Rng64};
use crate::{select_rows, Method};

pub const DEFAULT_GOOD_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatingsFormat {
    /// `user,item,rating[,timestamp]`, optionally preceded by a header line.
    Csv,
    /// `user::item::rating::timestamp`.
    MovielensDat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Users,
    Items,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rating {
    pub user: usize,
    pub item: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RatingsDataset {
    user_ids: Vec<String>,
    item_ids: Vec<String>,
    user_index: HashMap<String, usize>,
    item_index: HashMap<String, usize>,
    ratings: Vec<Rating>,
    duplicates: usize,
}

fn intern(ids: &mut Vec<String>, index: &mut HashMap<String, usize>, id: &str) -> usize {
    if let Some(&i) = index.get(id) {
        return i;
    }
    ids.push(id.to_owned());
    index.insert(id.to_owned(), ids.len() - 1);
    ids.len() - 1
}

impl RatingsDataset {
    /// Builds a dataset from `(user, item, rating)` triples. Dense indices
    /// follow first appearance. A repeated pair keeps its last rating.
    pub fn from_triples<U, I>(triples: impl IntoIterator<Item = (U, I, f64)>) -> Result<Self>
    where
        U: AsRef<str>,
        I: AsRef<str>,
    {
        let mut ds = RatingsDataset::default();
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for (u, i, v) in triples {
            if !v.is_finite() {
                return Err(Error::Parse { line: 0, msg: format!("non-finite rating {v}") });
            }
            let user = intern(&mut ds.user_ids, &mut ds.user_index, u.as_ref());
            let item = intern(&mut ds.item_ids, &mut ds.item_index, i.as_ref());
            match seen.get(&(user, item)) {
                Some(&pos) => {
                    ds.ratings[pos].value = v;
                    ds.duplicates += 1;
                }
                None => {
                    seen.insert((user, item), ds.ratings.len());
                    ds.ratings.push(Rating { user, item, value: v });
                }
            }
        }
        if ds.ratings.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(ds)
    }

    /// Same ID space, different ratings.
    fn with_ratings(&self, ratings: Vec<Rating>) -> Self {
        RatingsDataset { ratings, duplicates: 0, ..self.clone() }
    }

    pub fn n_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn ratings(&self) -> &[Rating] {
        &self.ratings
    }

    /// Number of repeated `(user, item)` pairs dropped on construction.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn user_id(&self, user: usize) -> &str {
        &self.user_ids[user]
    }

    pub fn item_id(&self, item: usize) -> &str {
        &self.item_ids[item]
    }

    pub fn user_index(&self, id: &str) -> Option<usize> {
        self.user_index.get(id).copied()
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.item_index.get(id).copied()
    }

    pub fn ids(&self, side: Side, indices: &[usize]) -> Vec<String> {
        let ids = match side {
            Side::Users => &self.user_ids,
            Side::Items => &self.item_ids,
        };
        indices.iter().map(|&i| ids[i].clone()).collect()
    }

    /// `n_users x n_items`, zeros where unrated.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n_users(), self.n_items());
        for r in &self.ratings {
            a[(r.user, r.item)] = r.value;
        }
        a
    }
}

pub fn load_ratings(path: impl AsRef<Path>, format: RatingsFormat) -> Result<RatingsDataset> {
    parse_ratings(&fs::read_to_string(path)?, format)
}

pub fn parse_ratings(text: &str, format: RatingsFormat) -> Result<RatingsDataset> {
    let mut triples = Vec::new();
    for (no, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = match format {
            RatingsFormat::Csv => line.split(',').map(str::trim).collect(),
            RatingsFormat::MovielensDat => line.split("::").map(str::trim).collect(),
        };
        if !(3..=4).contains(&fields.len()) {
            return Err(Error::Parse { line: no, msg: format!("expected 3 or 4 fields, found {}", fields.len()) });
        }
        let value = match fields[2].parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            Ok(_) => return Err(Error::Parse { line: no, msg: format!("non-finite rating {:?}", fields[2]) }),
            // a header row is allowed before any data
            Err(_) if format == RatingsFormat::Csv && triples.is_empty() && no == first_data_line(text) => continue,
            Err(_) => return Err(Error::Parse { line: no, msg: format!("invalid rating {:?}", fields[2]) }),
        };
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::Parse { line: no, msg: "empty user or item id".into() });
        }
        triples.push((fields[0], fields[1], value));
    }
    let ds = RatingsDataset::from_triples(triples)?;
    if ds.duplicates > 0 {
        log::warn!("{} duplicate (user, item) pairs; kept the last rating of each", ds.duplicates);
    }
    Ok(ds)
}

fn first_data_line(text: &str) -> usize {
    text.lines()
        .position(|l| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map_or(0, |p| p + 1)
}

/// Indices of `k` or more representatives on `side`, in selection order.
pub fn representatives(ds: &RatingsDataset, k: usize, side: Side, method: Method, tau: f64) -> Result<Vec<usize>> {
    let a = ds.to_dense();
    let (n, m) = a.shape();
    if k == 0 || k > n.min(m) {
        return Err(Error::InvalidBounds(format!("k = {k} must lie in 1..={}", n.min(m))));
    }
    let factors = svd(&a, Some(k));
    if factors.sigma[0] == 0.0 {
        return Err(Error::RankDeficient { step: 0, pivot: 0.0, threshold: 0.0 });
    }
    let basis = match side {
        Side::Users => &factors.u,
        Side::Items => &factors.v,
    };
    Ok(select_rows(basis, method, tau)?.row_indices)
}

/// For each counterpart entity, how many representatives it touches.
fn touches(ds: &RatingsDataset, reps: &[usize], side: Side) -> Vec<usize> {
    let (n_reps_side, n_other) = match side {
        Side::Users => (ds.n_users(), ds.n_items()),
        Side::Items => (ds.n_items(), ds.n_users()),
    };
    let mut is_rep = vec![false; n_reps_side];
    for &r in reps {
        is_rep[r] = true;
    }
    let mut counts = vec![0; n_other];
    for r in &ds.ratings {
        let (this, other) = match side {
            Side::Users => (r.user, r.item),
            Side::Items => (r.item, r.user),
        };
        if is_rep[this] {
            counts[other] += 1;
        }
    }
    counts
}

/// Fraction of counterpart entities with at least one rating touching the
/// representatives: users who rated a representative item, or items rated by
/// a representative user.
pub fn coverage(ds: &RatingsDataset, reps: &[usize], side: Side) -> f64 {
    let counts = touches(ds, reps, side);
    if counts.is_empty() {
        return 0.0;
    }
    counts.iter().filter(|&&c| c > 0).count() as f64 / counts.len() as f64
}

/// Fraction of counterpart entities touching at least one but strictly
/// fewer than 10% of the representatives.
pub fn diversity(ds: &RatingsDataset, reps: &[usize], side: Side) -> f64 {
    let counts = touches(ds, reps, side);
    if counts.is_empty() {
        return 0.0;
    }
    let limit = 0.1 * reps.len() as f64;
    counts.iter().filter(|&&c| c > 0 && (c as f64) < limit).count() as f64 / counts.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrecisionReport {
    pub precision: f64,
    pub users_evaluated: usize,
    /// False when no user could be evaluated; `precision` is then 0.
    pub defined: bool,
}

/// Mean precision of the top-`n` recommendations.
///
/// Item weights come from least squares on the representative item columns,
/// `A ≈ A[:, reps] X`, and user `u` is scored by `A[u, reps] X`. Only items
/// the user has not rated in `train` are recommended. A recommendation is good
/// when its `test` rating is at least `good_threshold`. Users are matched by
/// ID; test users unknown to `train` and users without test ratings are
/// skipped.
pub fn precision_at_n(
    train: &RatingsDataset,
    test: &RatingsDataset,
    reps: &[usize],
    n: usize,
    good_threshold: f64,
) -> Result<PrecisionReport> {
    let undefined = PrecisionReport { precision: 0.0, users_evaluated: 0, defined: false };
    if reps.is_empty() || n == 0 {
        return Ok(undefined);
    }
    let a = train.to_dense();
    let basis = a.select_cols(reps);
    let weights = least_squares_min_norm(&basis, &a)?;
    let n_items = train.n_items();
    let mut rated = vec![false; train.n_users() * n_items];
    for r in &train.ratings {
        rated[r.user * n_items + r.item] = true;
    }

    let mut test_by_user: HashMap<usize, HashMap<usize, f64>> = HashMap::new();
    for r in &test.ratings {
        let user = train.user_index(test.user_id(r.user));
        let item = train.item_index(test.item_id(r.item));
        if let (Some(u), Some(i)) = (user, item) {
            test_by_user.entry(u).or_default().insert(i, r.value);
        }
    }
    let mut users: Vec<usize> = test_by_user.keys().copied().collect();
    users.sort_unstable();

    let mut total = 0.0;
    let mut evaluated = 0;
    for u in users {
        let scores = weights.transpose().matvec(basis.row(u))?;
        let mut candidates: Vec<usize> = (0..n_items).filter(|&i| !rated[u * n_items + i]).collect();
        if candidates.is_empty() {
            continue;
        }
        // highest score first, lower index on ties
        candidates.sort_by(|&p, &q| scores[q].partial_cmp(&scores[p]).unwrap_or(Ordering::Equal).then(p.cmp(&q)));
        candidates.truncate(n);
        let held_out = &test_by_user[&u];
        let hits = candidates.iter().filter(|i| held_out.get(i).is_some_and(|&v| v >= good_threshold)).count();
        total += hits as f64 / candidates.len() as f64;
        evaluated += 1;
    }
    if evaluated == 0 {
        return Ok(undefined);
    }
    Ok(PrecisionReport { precision: total / evaluated as f64, users_evaluated: evaluated, defined: true })
}

/// Seeded per-user holdout: each user's ratings are shuffled and
/// `floor(test_fraction * count)` of them move to the test set. Both parts
/// share the ID space of `ds`.
pub fn split_per_user(ds: &RatingsDataset, test_fraction: f64, seed: u64) -> (RatingsDataset, RatingsDataset) {
    let mut rng = rng_from_seed(seed);
    let mut by_user: Vec<Vec<Rating>> = vec![Vec::new(); ds.n_users()];
    for r in &ds.ratings {
        by_user[r.user].push(*r);
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for mut list in by_user {
        list.shuffle(&mut rng);
        let n_test = (test_fraction * list.len() as f64).floor() as usize;
        test.extend_from_slice(&list[..n_test]);
        train.extend_from_slice(&list[n_test..]);
    }
    (ds.with_ratings(train), ds.with_ratings(test))
}

/// Ratings on a 1..=5 scale from a rank-`rank` Gaussian model with additive
/// noise, each entry observed with probability `density`.
pub fn synthetic_ratings(
    rng: &mut Rng64,
    n_users: usize,
    n_items: usize,
    rank: usize,
    density: f64,
    noise: f64,
) -> Result<RatingsDataset> {
    use rand::RngExt;
    let left = crate::random::gaussian_matrix(rng, n_users, rank);
    let right = crate::random::gaussian_matrix(rng, rank, n_items);
    let scores = left.matmul(&right)?.scale(1.0 / (rank as f64).sqrt());
    let mut triples = Vec::new();
    for u in 0..n_users {
        for i in 0..n_items {
            let e: f64 = StandardNormal.sample(rng);
            if rng.random_bool(density) {
                let v = (3.0 + 1.2 * (scores[(u, i)] + noise * e)).round().clamp(1.0, 5.0);
                triples.push((format!("u{u}"), format!("i{i}"), v));
            }
        }
    }
    RatingsDataset::from_triples(triples)
}
