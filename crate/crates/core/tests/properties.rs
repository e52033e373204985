use std::f64::consts::PI;

use shg2d::analysis::{
    classify, first_order_response, material, multipole_moments, resonance_scan, Channel,
    ScanConfig, ScanPath, DEFAULT_REL_TOL,
};
use shg2d::analytic::{predict_radiation, DiskParams, RadiationCase};
use shg2d::background::HarmonicBackground;
use shg2d::geometry::{sample_grid, Point, StarBoundary};
use shg2d::potentials::{double_layer_matrix, evaluate_potentials, kstar_matrix};
use shg2d::solver::{shg_pipeline, PipelineConfig};

/// Value at `t = 0` of the polynomial through `(ts, vs)`.
fn extrapolate_to_zero(ts: &[f64], vs: &[f64]) -> f64 {
    ts.iter()
        .enumerate()
        .map(|(k, tk)| {
            let w: f64 = ts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, tj)| -tj / (tk - tj))
                .product();
            w * vs[k]
        })
        .sum()
}

#[test]
fn jump_relations_from_off_boundary_limits() {
    let b = StarBoundary::new(1.0, 0.1, [(3, 1.0), (2, 0.5)]).unwrap();
    let f = |t: &f64| 0.7 * (2.0 * t).cos() - 0.4 * (3.0 * t + 0.3).sin() + 0.2 * (5.0 * t).cos();
    let grid = sample_grid(&b, 256).unwrap();
    let density: Vec<f64> = grid.theta.iter().map(f).collect();
    let ks = kstar_matrix(&grid).unwrap().apply(&density);
    let kd = double_layer_matrix(&grid).unwrap().apply(&density);
    // independent fine grid for the off-boundary values
    let fine = sample_grid(&b, 1024).unwrap();
    let fine_density: Vec<f64> = fine.theta.iter().map(f).collect();
    let zero = vec![0.0; fine.len()];
    let ts: Vec<f64> = (0..9).map(|k| 0.03 + 0.015 * k as f64).collect();
    let fd = 1e-4;
    let mut err = 0.0f64;
    for i in (0..grid.len()).step_by(16) {
        let (x, nu) = (grid.points[i], grid.normals[i]);
        for side in [1.0, -1.0] {
            let pts: Vec<Point> = ts.iter().map(|t| x + nu * (side * t)).collect();
            let d_vals = evaluate_potentials(&fine, &fine_density, &zero, &pts).unwrap();
            let dn_vals: Vec<f64> = pts
                .iter()
                .map(|p| {
                    let s = evaluate_potentials(
                        &fine,
                        &zero,
                        &fine_density,
                        &[p + nu * fd, p - nu * fd],
                    )
                    .unwrap();
                    (s[0] - s[1]) / (2.0 * fd)
                })
                .collect();
            let d_lim = extrapolate_to_zero(&ts, &d_vals);
            let dn_lim = extrapolate_to_zero(&ts, &dn_vals);
            // exterior: D = Kφ − φ/2, ∂νS = K*ψ + ψ/2; interior flips both halves
            err = err.max((d_lim - (kd[i] - side * 0.5 * density[i])).abs());
            err = err.max((dn_lim - (ks[i] + side * 0.5 * density[i])).abs());
        }
    }
    assert!(err < 1e-6, "{err:e}");
}

#[test]
fn background_symmetry_order_matches_invariance_definition() {
    let ring: Vec<Point> = (0..64)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / 64.0 + 0.1;
            Point::new(t.cos(), t.sin())
        })
        .collect();
    for ell in 1..=12u32 {
        let h = HarmonicBackground::new([(ell, 1.3)]).unwrap();
        let norm = ring.iter().map(|p| h.evaluate(p).abs()).fold(0.0, f64::max);
        for q in 1..=12u32 {
            let mut defect = 0.0f64;
            for k in 0..q {
                let a = 2.0 * PI * k as f64 / q as f64;
                let (c, s) = (a.cos(), a.sin());
                for p in &ring {
                    let rot = Point::new(c * p.x - s * p.y, s * p.x + c * p.y);
                    let refl = Point::new(rot.x, -rot.y);
                    defect = defect
                        .max((h.evaluate(&rot) - h.evaluate(p)).abs())
                        .max((h.evaluate(&refl) - h.evaluate(p)).abs());
                }
            }
            assert_eq!(
                h.symmetry_order(q),
                defect < 1e-12 * norm,
                "ell={ell} q={q}"
            );
        }
    }
}

fn cfg(boundary: StarBoundary, background: HarmonicBackground) -> PipelineConfig {
    PipelineConfig {
        boundary,
        background,
        material: material(&DiskParams::P1),
        grid_n: 256,
    }
}

#[test]
fn numeric_classification_matches_predictions() {
    let disk = StarBoundary::circle(1.0).unwrap();
    let (_, sh) = shg_pipeline(&cfg(disk.clone(), HarmonicBackground::uniform(1.0))).unwrap();
    let got = classify(&multipole_moments(&sh, 8).unwrap(), DEFAULT_REL_TOL).unwrap();
    assert_eq!(
        got.lowest_mode,
        predict_radiation(RadiationCase::Disk { ell: 1 })
            .unwrap()
            .lowest_mode
    );

    for (m, ell) in [(1u32, 2u32), (2, 5), (3, 1)] {
        let (_, sh) = shg_pipeline(&cfg(
            disk.clone(),
            HarmonicBackground::two_term(m, ell, 1.0).unwrap(),
        ))
        .unwrap();
        let got = classify(&multipole_moments(&sh, 12).unwrap(), DEFAULT_REL_TOL).unwrap();
        let want = predict_radiation(RadiationCase::TwoTerm { m, ell })
            .unwrap()
            .lowest_mode;
        assert_eq!(got.lowest_mode, want, "two-term ({m}, {ell})");
        assert_eq!(want, m.abs_diff(ell));
    }

    // shape cases: the unperturbed field is subtracted out by the central difference
    for (n, ell) in [
        (3u32, 1u32),
        (4, 1),
        (5, 1),
        (6, 1),
        (5, 2),
        (3, 2),
        (7, 2),
        (7, 3),
    ] {
        let b = StarBoundary::new(1.0, 1e-3, [(n, 1.0)]).unwrap();
        let r = first_order_response(&cfg(b, HarmonicBackground::single(ell, 1.0))).unwrap();
        let got = classify(&r.spectrum(16).unwrap(), DEFAULT_REL_TOL).unwrap();
        let want = predict_radiation(RadiationCase::Shape { n, ell })
            .unwrap()
            .lowest_mode;
        assert_eq!(got.lowest_mode, want, "shape ({n}, {ell})");
        assert_eq!(want, n.abs_diff(2 * ell));
    }
}

#[test]
fn diagonal_scan_matches_a_listed_branch() {
    let cfg = ScanConfig {
        params: DiskParams::P1,
        case: RadiationCase::Shape { n: 5, ell: 2 },
        path: ScanPath::Analytic,
        grid_n: 128,
        shape_epsilon: 1e-7,
    };
    let s = resonance_scan(&cfg, Channel::Both, &[1e-2, 1e-3, 1e-4, 1e-5]).unwrap();
    assert!(s
        .candidate_branches
        .iter()
        .any(|(a, b)| (s.fitted_slope + (a + b) as f64).abs() < 0.1));
    for (channel, want) in [(Channel::Omega, -3.0), (Channel::TwoOmega, -2.0)] {
        let s = resonance_scan(&cfg, channel, &[1e-2, 1e-3, 1e-4, 1e-5]).unwrap();
        assert!(
            (s.fitted_slope - want).abs() < 0.1,
            "{channel:?} {}",
            s.fitted_slope
        );
    }
}
