use maxvolkit::precond::{build_augmented, compare_methods, solve_via_augmented};
use maxvolkit::random::{gaussian_matrix, geometric_spectrum_matrix, random_low_rank, rng_from_seed};
use maxvolkit::recsys::{
    load_ratings, precision_at_n, representatives, split_per_user, synthetic_ratings, RatingsFormat, Side,
    DEFAULT_GOOD_THRESHOLD,
};
use maxvolkit::skeleton::{build_pseudo_skeleton, select_skeleton};
use maxvolkit::{least_squares_min_norm, select_rows, DenseMatrix, Method};

#[test]
fn skeleton_from_matrix_market_file() {
    let mut rng = rng_from_seed(11);
    let a = random_low_rank(&mut rng, 25, 18, 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.mtx");
    maxvolkit::mtx::write_matrix_market(&path, &a, maxvolkit::mtx::Layout::Array).unwrap();
    let a = maxvolkit::mtx::read_matrix_market(&path).unwrap();
    for method in [Method::Square, Method::Rect] {
        let (rows, cols) = select_skeleton(&a, 3, method, 1.0).unwrap();
        let err = build_pseudo_skeleton(&a, &rows, &cols).unwrap().error(&a).unwrap();
        assert!(err.relative_frobenius <= 1e-9, "{method:?}: {}", err.relative_frobenius);
    }
}

#[test]
fn rect_preconditioner_beats_square_on_ill_conditioned_input() {
    let mut rng = rng_from_seed(12);
    let a = geometric_spectrum_matrix(&mut rng, 300, 30, 1e-8);
    let cmp = compare_methods(&a, 1.0).unwrap();
    assert!(cmp.rect.coef_norm < cmp.square.coef_norm);
    assert!(cmp.rect.basis_rows > cmp.square.basis_rows);
    let sys = build_augmented(&a, Method::Rect, 1.0).unwrap();
    assert_eq!(sys.k(), cmp.rect.basis_rows);
}

#[test]
fn augmented_solve_matches_pseudoinverse() {
    let mut rng = rng_from_seed(13);
    let a = gaussian_matrix(&mut rng, 120, 12);
    let b = gaussian_matrix(&mut rng, 120, 1);
    let direct = least_squares_min_norm(&a, &b).unwrap();
    let sol = solve_via_augmented(&a, b.as_slice(), Method::Rect, 1.0).unwrap();
    let diff = DenseMatrix::column_vector(&sol.x).unwrap().sub(&direct).unwrap();
    assert!(diff.frobenius_norm() <= 1e-8 * direct.frobenius_norm());
}

#[test]
fn select_rows_dispatch() {
    let mut rng = rng_from_seed(14);
    let a = gaussian_matrix(&mut rng, 60, 4);
    assert_eq!(select_rows(&a, Method::Square, 1.0).unwrap().k(), 4);
    let k = select_rows(&a, Method::Rect, 1.0).unwrap().k();
    assert!((4..=9).contains(&k));
}

#[test]
fn ratings_file_to_representatives() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ratings.dat");
    let text: String = (0..8)
        .flat_map(|u| (0..6).map(move |i| (u, i)))
        .filter(|(u, i)| (u + i) % 3 != 0)
        .map(|(u, i)| format!("{u}::{i}::{}::0\n", 1 + (u * i) % 5))
        .collect();
    std::fs::write(&path, text).unwrap();
    let ds = load_ratings(&path, RatingsFormat::MovielensDat).unwrap();
    assert_eq!((ds.n_users(), ds.n_items()), (8, 6));
    let reps = representatives(&ds, 3, Side::Users, Method::Square, 1.0).unwrap();
    assert_eq!(reps.len(), 3);
}

#[test]
fn rect_precision_keeps_up_with_twice_as_many_square_items() {
    let mut rng = rng_from_seed(0);
    let ds = synthetic_ratings(&mut rng, 300, 120, 5, 0.3, 0.3).unwrap();
    let (train, test) = split_per_user(&ds, 0.2, 0);
    for k in [5, 10] {
        let rect = representatives(&train, k, Side::Items, Method::Rect, 1.0).unwrap();
        let square = representatives(&train, 2 * k, Side::Items, Method::Square, 1.0).unwrap();
        assert!(rect.len() >= k);
        let pr = precision_at_n(&train, &test, &rect, 10, DEFAULT_GOOD_THRESHOLD).unwrap();
        let ps = precision_at_n(&train, &test, &square, 10, DEFAULT_GOOD_THRESHOLD).unwrap();
        assert!(pr.defined && ps.defined);
        assert!(pr.precision >= ps.precision - 0.05, "k = {k}: {} vs {}", pr.precision, ps.precision);
    }
}
