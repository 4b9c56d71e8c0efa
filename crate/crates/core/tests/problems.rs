use ebstop::harness::default_wdbc_path;
use ebstop::numerics::{finite_diff_gradient, relative_error, RngStream};
use ebstop::problems::{
    load_wdbc, load_wdbc_raw, make_quadratic, Blobs, Logistic, MlpArchitecture, Objective,
    SpectrumKind, Split, SupervisedProblem, WdbcSplit,
};

#[test]
fn wdbc_file_shape() {
    let raw = load_wdbc_raw(default_wdbc_path()).unwrap();
    assert_eq!(raw.len(), 569);
    assert_eq!(raw.labels.iter().filter(|&&y| y == 1).count(), 212);
    let data = load_wdbc::<f64>(
        default_wdbc_path(),
        WdbcSplit::WITH_VALIDATION,
        &mut RngStream::new(1),
    )
    .unwrap();
    assert_eq!(data.n_features(), 496);
    assert_eq!(
        (
            data.count(Split::Test),
            data.count(Split::Train),
            data.count(Split::Validation)
        ),
        (369, 140, 60)
    );
}

#[test]
fn wdbc_standardized_on_training_rows() {
    for split in [WdbcSplit::FULL_TRAIN, WdbcSplit::WITH_VALIDATION] {
        let data = load_wdbc::<f64>(default_wdbc_path(), split, &mut RngStream::new(3)).unwrap();
        let train = data.split(Split::Train);
        let n = train.len() as f64;
        // Columns 1..=30 of the expansion are the standardized raw features.
        for k in 1..=30 {
            let col: Vec<f64> = (0..train.len()).map(|i| train.row(i)[k]).collect();
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() < 1e-10, "feature {k} mean {mean}");
            assert!((var - 1.0).abs() < 1e-10, "feature {k} variance {var}");
        }
    }
}

#[test]
fn missing_wdbc_file_is_io_error() {
    assert!(matches!(
        load_wdbc_raw("/nonexistent/wdbc.data"),
        Err(ebstop::Error::Io(_))
    ));
}

/// Full-batch gradient of each problem against finite differences of its
/// training loss.
fn check_objective(problem: &dyn Objective<f64>, rng: &mut RngStream, scale: f64) {
    for _ in 0..3 {
        let w: Vec<f64> = problem
            .initial_params()
            .iter()
            .map(|w| w + scale * rng.standard_normal())
            .collect();
        let est = problem.estimate(&w, None).unwrap();
        let fd = finite_diff_gradient(|w| problem.train_loss(w), &w, 1e-6).unwrap();
        let err = relative_error(&est.grad, &fd);
        assert!(err < 1e-5, "{}: relative error {err}", problem.name());
    }
}

#[test]
fn objective_gradients_match_losses() {
    let mut rng = RngStream::new(17);
    let quad = make_quadratic::<f64>(
        30,
        SpectrumKind::Exponential { min: 0.1, max: 1.0 },
        10.0,
        &mut rng,
    )
    .unwrap();
    check_objective(&quad, &mut rng, 1.0);

    let blobs = Blobs {
        n_train: 40,
        n_test: 10,
        n_features: 6,
        n_informative: 4,
        ..Blobs::default()
    };
    let data = blobs.generate::<f64>(&mut rng).unwrap();
    let arch = MlpArchitecture::new(vec![6, 7, 5, 3]).unwrap();
    let init = arch.he_init(&mut rng);
    let mlp = SupervisedProblem::new("mlp", arch, &data, init).unwrap();
    check_objective(&mlp, &mut rng, 0.1);

    let data = load_wdbc::<f64>(
        default_wdbc_path(),
        WdbcSplit::FULL_TRAIN,
        &mut RngStream::new(2),
    )
    .unwrap();
    let model = Logistic {
        n_features: 496,
        split_bias: true,
    };
    let logistic = SupervisedProblem::new("wdbc", model, &data, vec![0.0; 496]).unwrap();
    assert_eq!(logistic.partition().len(), 2);
    check_objective(&logistic, &mut rng, 0.01);
}

#[test]
fn quadratic_gradient_offset_is_b_zeta() {
    let mut rng = RngStream::new(6);
    let p = make_quadratic::<f64>(
        25,
        SpectrumKind::Structured {
            small: 0.1,
            large: 2.0,
            n_large: 3,
        },
        10.0,
        &mut rng,
    )
    .unwrap();
    for _ in 0..5 {
        let w: Vec<f64> = (0..25).map(|_| 3.0 * rng.standard_normal()).collect();
        let e = p.evaluate(&w).unwrap();
        for k in 0..25 {
            let diff = e.true_grad[k] - e.emp_grad[k];
            assert!((diff + p.b_zeta()[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn haar_rotation_gives_requested_spectrum() {
    let mut rng = RngStream::new(12);
    let p = make_quadratic::<f64>(
        15,
        SpectrumKind::Uniform { min: 0.5, max: 2.0 },
        1.0,
        &mut rng,
    )
    .unwrap();
    assert!(p.rotation().orthogonality_defect() < 1e-12);
    let trace: f64 = p.hessian().diag().iter().sum();
    let expected: f64 = p.eigenvalues().iter().sum();
    assert!((trace - expected).abs() < 1e-10);
    assert_eq!(p.eigenvalues()[14] / p.eigenvalues()[0], 4.0);
}
