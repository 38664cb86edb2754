use nalgebra::DMatrix;
use proptest::prelude::*;

use super::*;
use crate::camera::CameraSpec;
use crate::test_support::*;

fn grid() -> WavelengthGrid {
    WavelengthGrid::default()
}

fn training(r: DMatrix<f64>, p: DMatrix<f64>) -> TrainingSet {
    let g = WavelengthGrid::new(400.0, 10.0, r.nrows()).unwrap();
    TrainingSet::new(g, r, p, Provenance::default()).unwrap()
}

/// Responses of `r` under the gaussian camera.
fn camera_training(r: DMatrix<f64>) -> (CameraSpec, TrainingSet) {
    let cam = CameraSpec::gaussian_rgb(&grid());
    let p = cam.system_matrix() * &r;
    let ts = TrainingSet::new(grid(), r, p, Provenance::default()).unwrap();
    (cam, ts)
}

fn training_rmse(model: &EstimationModel, ts: &TrainingSet) -> f64 {
    let n = ts.grid().count();
    let mut total = 0.0;
    let mut out = vec![0.0; n];
    for j in 0..ts.len() {
        let rho: Vec<f64> = ts.responses().column(j).iter().copied().collect();
        model.estimate_into(&rho, &mut out).unwrap();
        let sq: f64 = out.iter().zip(ts.reflectances().column(j).iter()).map(|(a, b)| (a - b).powi(2)).sum();
        total += (sq / n as f64).sqrt();
    }
    total / ts.len() as f64
}

#[test]
fn wiener_prior_identity_autocorrelation_gives_q_transpose() {
    let g = WavelengthGrid::new(400.0, 10.0, 5).unwrap();
    let mut q = DMatrix::zeros(3, 5);
    q[(0, 0)] = 1.0;
    q[(1, 2)] = 1.0;
    q[(2, 4)] = 1.0;
    let cam = camera_with_system(g, q.clone());
    // R = sqrt(k) I with k = N gives Rss = I
    let r = DMatrix::<f64>::identity(5, 5) * 5f64.sqrt();
    let model = fit_wiener_prior(&r, &cam, &DMatrix::zeros(3, 3)).unwrap();
    assert!((model.operator().unwrap() - q.transpose()).abs().max() < 1e-12);
}

#[test]
fn wiener_prior_reproduces_responses_on_row_space() {
    let (cam, _) = camera_training(random_matrix(31, 10, 1));
    let q = cam.system_matrix().clone();
    let r = q.transpose() * random_matrix(3, 40, 2);
    let model = fit_wiener_prior(&r, &cam, &DMatrix::zeros(3, 3)).unwrap();
    let proj = &q * model.operator().unwrap();
    assert!((proj - DMatrix::<f64>::identity(3, 3)).abs().max() < 1e-8);
}

#[test]
fn wiener_prior_matches_explicit_loop_oracle() {
    let cam = CameraSpec::gaussian_rgb(&grid());
    let r = random_matrix(31, 60, 3);
    let noise = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1e-4, 2e-4, 3e-4]));
    let model = fit_wiener_prior(&r, &cam, &noise).unwrap();

    let rr = to_rows(&r);
    let k = r.ncols() as f64;
    let mut rss = naive_mul(&rr, &naive_transpose(&rr));
    for row in rss.iter_mut() {
        for v in row.iter_mut() {
            *v /= k;
        }
    }
    let q = to_rows(cam.system_matrix());
    let qt = naive_transpose(&q);
    let mut inner = naive_mul(&naive_mul(&q, &rss), &qt);
    for i in 0..3 {
        inner[i][i] += noise[(i, i)];
    }
    let oracle = naive_mul(&naive_mul(&rss, &qt), &naive_inverse(&inner));
    assert!(max_abs_diff(model.operator().unwrap(), &oracle) < 1e-9);
}

#[test]
fn wiener_prior_singular_inner_matrix() {
    let cam = CameraSpec::gaussian_rgb(&grid());
    // one repeated spectrum: Rss has rank 1, Q Rss Q^t rank 1
    let col = random_matrix(31, 1, 4);
    let r = DMatrix::from_fn(31, 5, |i, _| col[i]);
    let err = fit_wiener_prior(&r, &cam, &DMatrix::zeros(3, 3)).unwrap_err();
    assert!(matches!(err, Error::SingularSystem(_)));
    // noise regularises it
    assert!(fit_wiener_prior(&r, &cam, &(DMatrix::identity(3, 3) * 1e-3)).is_ok());
}

#[test]
fn wiener_data_identity_responses_gives_r() {
    let r = random_matrix(31, 3, 5);
    let ts = training(r.clone(), DMatrix::identity(3, 3));
    let model = fit_wiener_data(&ts, &PolyCombo::linear()).unwrap();
    assert!((model.operator().unwrap() - r).abs().max() < 1e-12);
}

#[test]
fn wiener_data_equals_pseudoinverse() {
    for seed in 0..5 {
        let p = random_matrix(3, 200, 100 + seed);
        let r = random_matrix(31, 200, 200 + seed);
        let ts = training(r, p);
        for combo in ["linear3", "sq6", "full12"] {
            let combo = PolyCombo::preset(combo).unwrap();
            let a = fit_wiener_data(&ts, &combo).unwrap();
            let b = fit_pseudoinverse(&ts, &combo).unwrap();
            let diff = (a.operator().unwrap() - b.operator().unwrap()).abs().max();
            assert!(diff < 1e-8, "{combo}: {diff}");
        }
    }
}

#[test]
fn wiener_data_recovers_exact_linear_model() {
    let combo = PolyCombo::preset("sq6").unwrap();
    let p = random_matrix(3, 100, 7);
    let pe = expand_responses(&p, &combo).unwrap();
    let g = random_matrix(31, 6, 8);
    let ts = training(&g * &pe, p);
    let model = fit_wiener_data(&ts, &combo).unwrap();
    assert!((model.operator().unwrap() - g).abs().max() < 1e-8);
}

#[test]
fn wiener_data_rank_deficient() {
    let col = random_matrix(3, 1, 9);
    let p = DMatrix::from_fn(3, 10, |i, _| col[i]);
    let ts = training(random_matrix(31, 10, 10), p);
    assert!(matches!(fit_wiener_data(&ts, &PolyCombo::linear()), Err(Error::SingularSystem(_))));
}

#[test]
fn pseudoinverse_identity_and_exact_recovery() {
    let r = random_matrix(31, 3, 11);
    let ts = training(r.clone(), DMatrix::identity(3, 3));
    let model = fit_pseudoinverse(&ts, &PolyCombo::linear()).unwrap();
    assert!((model.operator().unwrap() - &r).abs().max() < 1e-12);
    let e1 = model.estimate_pixel(&[1.0, 0.0, 0.0]).unwrap();
    for (a, b) in e1.values().iter().zip(r.column(0).iter()) {
        assert!((a - b).abs() < 1e-12);
    }

    let combo = PolyCombo::preset("cross6").unwrap();
    let p = random_matrix(3, 80, 12);
    let pe = expand_responses(&p, &combo).unwrap();
    let r = random_matrix(31, 6, 13) * &pe;
    let model = fit_pseudoinverse(&training(r.clone(), p), &combo).unwrap();
    let residual = (&r - model.operator().unwrap() * &pe).norm();
    assert!(residual < 1e-10, "{residual}");
}

#[test]
fn pseudoinverse_single_sample_by_hand() {
    let r0 = random_matrix(31, 1, 14);
    let rho = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
    let model = fit_pseudoinverse(&training(r0.clone(), rho.clone()), &PolyCombo::linear()).unwrap();
    // rho^+ = rho^t / |rho|^2
    let oracle = &r0 * rho.transpose() / rho.norm_squared();
    assert!((model.operator().unwrap() - oracle).abs().max() < 1e-14);
    let est = model.estimate_pixel(&[1.0, 0.0, 0.0]).unwrap();
    for (a, b) in est.values().iter().zip(r0.iter()) {
        assert!((a - b).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nested_combos_never_increase_training_rmse(seed in 0u64..10_000) {
        let r = random_matrix(31, 60, seed);
        let p = random_matrix(3, 60, seed + 50_000);
        let ts = training(r, p);
        let mut last = f64::INFINITY;
        let mut prev: Option<PolyCombo> = None;
        for name in ["linear3", "cross6", "cross9", "full12"] {
            let combo = PolyCombo::preset(name).unwrap();
            if let Some(p) = &prev { prop_assert!(p.is_subset_of(&combo)); }
            let model = fit_pseudoinverse(&ts, &combo).unwrap();
            let w = model.operator().unwrap();
            let pe = ts.expanded_responses(&combo).unwrap();
            let frob = (ts.reflectances() - w * pe).norm();
            prop_assert!(frob <= last + 1e-12, "{name}: {frob} > {last}");
            last = frob;
            prev = Some(combo);
        }
    }

    #[test]
    fn wiener_and_pinv_agree(seed in 0u64..10_000) {
        let ts = training(random_matrix(31, 50, seed), random_matrix(3, 50, seed + 1));
        let a = fit_wiener_data(&ts, &PolyCombo::linear()).unwrap();
        let b = fit_pseudoinverse(&ts, &PolyCombo::linear()).unwrap();
        prop_assert!((a.operator().unwrap() - b.operator().unwrap()).abs().max() < 1e-8);
    }
}

#[test]
fn linear_exact_recovery_in_span() {
    let basis = random_matrix(31, 3, 20);
    let r = &basis * random_matrix(3, 30, 21);
    let (cam, ts) = camera_training(r);
    let model = fit_linear(ts.reflectances(), &cam, 3).unwrap();
    assert!(training_rmse(&model, &ts) < 1e-8);
    // Q r_hat == rho for square Lambda
    let rho = [0.3, 0.5, 0.7];
    let est = model.estimate_pixel(&rho).unwrap();
    let mut back = [0.0; 3];
    cam.response_into(est.values(), &mut back);
    for (a, b) in back.iter().zip(rho) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn linear_single_basis_vector() {
    let v = random_matrix(31, 1, 22);
    let r = DMatrix::from_fn(31, 6, |i, j| v[i] * (0.2 + 0.1 * j as f64));
    let (cam, ts) = camera_training(r);
    let model = fit_linear(ts.reflectances(), &cam, 1).unwrap();
    assert!(training_rmse(&model, &ts) < 1e-8);
}

#[test]
fn linear_singular_lambda() {
    // two basis directions invisible to the camera: Lambda is rank deficient
    let g = WavelengthGrid::new(400.0, 10.0, 6).unwrap();
    let mut q = DMatrix::zeros(3, 6);
    q[(0, 0)] = 1.0;
    q[(1, 1)] = 1.0;
    q[(2, 2)] = 1.0;
    let cam = camera_with_system(g, q);
    let mut r = DMatrix::zeros(6, 3);
    r[(0, 0)] = 1.0;
    r[(4, 1)] = 2.0;
    r[(5, 2)] = 3.0;
    assert!(matches!(fit_linear(&r, &cam, 3), Err(Error::SingularSystem(_))));
}

#[test]
fn imai_berns_weights_as_responses_give_identity() {
    let r = random_matrix(31, 3, 23) * random_matrix(3, 40, 24);
    let v = pca_basis(&r, 3).unwrap();
    let b = v.transpose() * &r;
    let model = fit_imai_berns(&training(r, b), 3, &PolyCombo::linear()).unwrap();
    match model.params().unwrap() {
        ModelParams::ImaiBerns { weights, .. } => {
            assert!((weights - DMatrix::<f64>::identity(3, 3)).abs().max() < 1e-10);
        }
        _ => unreachable!(),
    }
}

#[test]
fn imai_berns_exact_linear_model() {
    let r = random_matrix(31, 3, 25) * random_matrix(3, 50, 26);
    let v = pca_basis(&r, 3).unwrap();
    let b = v.transpose() * &r;
    let mix = random_matrix(3, 3, 27) + DMatrix::identity(3, 3);
    let ts = training(r, mix * b);
    let model = fit_imai_berns(&ts, 3, &PolyCombo::linear()).unwrap();
    assert!(training_rmse(&model, &ts) < 1e-8);
}

#[test]
fn imai_berns_full_basis_reduces_to_pseudoinverse() {
    let r = random_matrix(3, 3, 28);
    let p = random_matrix(3, 3, 29) + DMatrix::identity(3, 3);
    let ts = training(r, p);
    let ib = fit_imai_berns(&ts, 3, &PolyCombo::linear()).unwrap();
    let pi = fit_pseudoinverse(&ts, &PolyCombo::linear()).unwrap();
    for s in 0..10 {
        let rho: Vec<f64> = random_matrix(3, 1, 300 + s).iter().copied().collect();
        let a = ib.estimate_pixel(&rho).unwrap();
        let b = pi.estimate_pixel(&rho).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}

/// Bank whose spectra all lie in a 5-dimensional space.
fn shi_healey_setup(k: usize, seed: u64) -> (CameraSpec, DMatrix<f64>, EstimationModel) {
    let cam = CameraSpec::gaussian_rgb(&grid());
    let r = random_matrix(31, 5, seed) * random_matrix(5, k, seed + 1) * 0.2;
    let model = fit_shi_healey(&r, &cam, 5, None).unwrap();
    (cam, r, model)
}

#[test]
fn shi_healey_recovers_bank_member() {
    let (cam, r, model) = shi_healey_setup(40, 30);
    for j in [0, 7, 39] {
        let mut rho = [0.0; 3];
        cam.response_into(r.column(j).as_slice(), &mut rho);
        let sel = model.estimate_shi_healey(&rho).unwrap();
        assert_eq!(sel.index, j);
        let err: f64 = sel.reflectance.iter().zip(r.column(j).iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err < 1e-6, "{err}");
    }
}

#[test]
fn shi_healey_reproduces_response() {
    let (cam, _, model) = shi_healey_setup(25, 31);
    for s in 0..20 {
        let rho: Vec<f64> = random_matrix(3, 1, 400 + s).iter().copied().collect();
        let est = model.estimate_pixel(&rho).unwrap();
        let mut back = [0.0; 3];
        cam.response_into(est.values(), &mut back);
        let err: f64 = back.iter().zip(&rho).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err < 1e-8, "{err}");
    }
}

#[test]
fn shi_healey_single_candidate_matches_loop_oracle() {
    let cam = CameraSpec::gaussian_rgb(&grid());
    let bank = random_matrix(31, 8, 32);
    let model = fit_shi_healey(&bank, &cam, 5, None).unwrap();
    let v = match model.params().unwrap() {
        ModelParams::ShiHealey(b) => b.basis().clone(),
        _ => unreachable!(),
    };
    let single = DMatrix::from_fn(31, 1, |i, _| bank[(i, 3)]);
    let bank1 = ShiHealeyBank::new(single.clone(), v.clone(), cam.system_matrix().clone(), 5).unwrap();
    let rho = [0.4, 0.35, 0.2];
    let got = bank1.select(&rho).unwrap();

    // r_hat = V1 w1 + V2 (QV2)^-1 (rho - Q V1 w1),
    // w1 = (V1 - V2 (QV2)^-1 Q V1)^+ (r - V2 (QV2)^-1 rho)
    let q = to_rows(cam.system_matrix());
    let vr = to_rows(&v);
    let v1: Vec<Vec<f64>> = vr.iter().map(|row| row[..2].to_vec()).collect();
    let v2: Vec<Vec<f64>> = vr.iter().map(|row| row[2..].to_vec()).collect();
    let qv2_inv = naive_inverse(&naive_mul(&q, &v2));
    let bp = naive_mul(&v2, &qv2_inv);
    let qv1 = naive_mul(&q, &v1);
    let bpqv1 = naive_mul(&bp, &qv1);
    let a: Vec<Vec<f64>> = (0..31).map(|i| (0..2).map(|c| v1[i][c] - bpqv1[i][c]).collect()).collect();
    // A^+ = (A^t A)^-1 A^t for full column rank A
    let at = naive_transpose(&a);
    let a_pinv = naive_mul(&naive_inverse(&naive_mul(&at, &a)), &at);
    let rho_col: Vec<Vec<f64>> = rho.iter().map(|&x| vec![x]).collect();
    let anchor = naive_mul(&bp, &rho_col);
    let target: Vec<Vec<f64>> = (0..31).map(|i| vec![single[(i, 0)] - anchor[i][0]]).collect();
    let w1 = naive_mul(&a_pinv, &target);
    let qv1w1 = naive_mul(&qv1, &w1);
    let resid: Vec<Vec<f64>> = (0..3).map(|i| vec![rho[i] - qv1w1[i][0]]).collect();
    let part1 = naive_mul(&v1, &w1);
    let part2 = naive_mul(&bp, &resid);
    for i in 0..31 {
        let oracle = part1[i][0] + part2[i][0];
        assert!((got.reflectance[i] - oracle).abs() < 1e-10);
    }
    assert_eq!(got.index, 0);
}

#[test]
fn shi_healey_basis_search_never_worse() {
    let cam = CameraSpec::gaussian_rgb(&grid());
    let bank = random_matrix(31, 30, 33);
    let fixed = fit_shi_healey(&bank, &cam, 6, None).unwrap();
    let searched = fit_shi_healey(&bank, &cam, 6, Some(4)).unwrap();
    for s in 0..10 {
        let rho: Vec<f64> = random_matrix(3, 1, 500 + s).iter().copied().collect();
        let a = fixed.estimate_shi_healey(&rho).unwrap();
        let b = searched.estimate_shi_healey(&rho).unwrap();
        assert!(b.distance <= a.distance + 1e-12);
        assert!((4..=6).contains(&b.basis_count));
    }
}

#[test]
fn shi_healey_requires_more_basis_than_channels() {
    let cam = CameraSpec::gaussian_rgb(&grid());
    let bank = random_matrix(31, 10, 34);
    assert!(matches!(fit_shi_healey(&bank, &cam, 3, None), Err(Error::BadBasisCount { .. })));
    assert!(matches!(
        fit_shi_healey(&DMatrix::zeros(31, 0), &cam, 5, None),
        Err(Error::EmptyTrainingSet)
    ));
}

#[test]
fn unfitted_model_errors() {
    let model = EstimationModel::unfitted(MethodKind::Pseudoinverse, grid());
    assert!(matches!(model.estimate_pixel(&[0.1, 0.2, 0.3]), Err(Error::ModelNotFitted)));
}

#[test]
fn estimate_pixel_matches_explicit_oracle_for_every_method() {
    let r = random_matrix(31, 120, 40) * 0.8;
    let (cam, ts) = camera_training(r);
    let sq6 = PolyCombo::preset("sq6").unwrap();
    let specs = [
        MethodSpec::new(MethodKind::WienerPrior),
        MethodSpec::new(MethodKind::WienerData).with_combo(sq6.clone()),
        MethodSpec::new(MethodKind::Pseudoinverse).with_combo(sq6.clone()),
        MethodSpec::new(MethodKind::Linear),
        MethodSpec::new(MethodKind::ImaiBerns).with_combo(sq6.clone()),
    ];
    for spec in specs {
        let model = spec.fit(&ts, Some(&cam)).unwrap();
        // per-method parameters combined by explicit loops
        let (op, uses_combo) = match model.params().unwrap() {
            ModelParams::Matrix { w } => (to_rows(w), spec.kind.uses_combo()),
            ModelParams::Linear { basis, lambda, .. } => {
                (naive_mul(&to_rows(basis), &naive_inverse(&to_rows(lambda))), false)
            }
            ModelParams::ImaiBerns { basis, weights, .. } => (naive_mul(&to_rows(basis), &to_rows(weights)), true),
            ModelParams::ShiHealey(_) => unreachable!(),
        };
        for s in 0..100 {
            let rho: Vec<f64> = random_matrix(3, 1, 1000 + s).iter().copied().collect();
            let feats = if uses_combo { spec.combo.expand(&rho) } else { rho.clone() };
            let est = model.estimate_pixel(&rho).unwrap();
            for i in 0..31 {
                let oracle: f64 = (0..feats.len()).map(|t| op[i][t] * feats[t]).sum();
                assert!((est.values()[i] - oracle).abs() < 1e-10, "{}", spec.kind);
            }
        }
    }
}

#[test]
fn estimate_cube_is_per_pixel() {
    let ts = training(random_matrix(31, 50, 41), random_matrix(3, 50, 42));
    let model = fit_pseudoinverse(&ts, &PolyCombo::preset("sq6").unwrap()).unwrap();

    let one = RgbImage::filled(1, 1, [0.2, 0.4, 0.6]).unwrap();
    let cube = model.estimate_cube(&one).unwrap();
    assert_eq!(cube.pixel(0, 0), model.estimate_pixel(&[0.2, 0.4, 0.6]).unwrap().values());

    let flat = RgbImage::filled(4, 5, [0.3, 0.3, 0.1]).unwrap();
    let cube = model.estimate_cube(&flat).unwrap();
    assert!(cube.pixels().all(|px| px == cube.pixel(0, 0)));

    let vals: Vec<f64> = random_matrix(16 * 16 * 3, 1, 43).iter().copied().collect();
    let img = RgbImage::new(16, 16, vals).unwrap();
    let cube = model.estimate_cube(&img).unwrap();
    for y in 0..16 {
        for x in 0..16 {
            let px = model.estimate_pixel(&img.pixel(y, x)).unwrap();
            assert_eq!(cube.pixel(y, x), px.values());
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let par = pool.install(|| model.estimate_cube_par(&img)).unwrap();
    assert_eq!(par, cube);
}

#[test]
fn missing_prior_knowledge_is_named() {
    let ts = training(random_matrix(31, 10, 44), random_matrix(3, 10, 45));
    for kind in [MethodKind::Linear, MethodKind::ShiHealey, MethodKind::WienerPrior] {
        let err = MethodSpec::new(kind).fit(&ts, None).unwrap_err().to_string();
        assert!(err.contains("Sensitivities") && err.contains("Illumination"), "{err}");
    }
    let cam = CameraSpec::gaussian_rgb(&grid());
    let err = MethodSpec::new(MethodKind::Pseudoinverse)
        .fit_from_reflectances(&random_matrix(31, 10, 46), &cam)
        .unwrap_err()
        .to_string();
    assert!(err.contains("RGB Values"), "{err}");
}

#[test]
fn method_names_round_trip() {
    for kind in MethodKind::ALL {
        assert_eq!(kind.name().parse::<MethodKind>().unwrap(), kind);
        assert_eq!(MethodKind::from_code(kind.code()), Some(kind));
    }
    assert_eq!("imai-berns".parse::<MethodKind>().unwrap(), MethodKind::ImaiBerns);
}
