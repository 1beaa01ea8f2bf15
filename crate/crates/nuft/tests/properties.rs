//! Property tests for the measure and kernel invariants.

use nuft::mesh::{content, distortion_factor, signed_distortion};
use nuft::transform::{simplex_ft, simplex_ft_specialized};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    (0.02f64..0.98).prop_map(|v| v)
}

fn freq() -> impl Strategy<Value = f64> {
    (-8.0f64..8.0).prop_map(|m| 2.0 * std::f64::consts::PI * m)
}

/// Area/volume of a simplex from vertex slices, or `None` when too flat for
/// stable comparisons.
fn well_shaped(pts: &[&[f64]]) -> bool {
    match content(pts) {
        Ok(c) => c > 1e-3,
        Err(_) => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn content_permutation_and_rigid_motion(
        xs in prop::collection::vec(coord(), 12),
        angle in 0.0f64..std::f64::consts::TAU,
        tx in -2.0f64..2.0,
        ty in -2.0f64..2.0,
    ) {
        // tetrahedron in 3D from the 12 coordinates
        let pts: Vec<&[f64]> = xs.chunks(3).collect();
        prop_assume!(well_shaped(&pts));
        let base = content(&pts).unwrap();

        // permutation
        let perm: Vec<&[f64]> = vec![pts[2], pts[0], pts[3], pts[1]];
        let permuted = content(&perm).unwrap();
        prop_assert!((base - permuted).abs() <= 1e-12 * base);

        // rigid motion: rotate about z, then translate in x/y
        let rot: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                vec![
                    p[0] * angle.cos() - p[1] * angle.sin() + tx,
                    p[0] * angle.sin() + p[1] * angle.cos() + ty,
                    p[2],
                ]
            })
            .collect();
        let rot_refs: Vec<&[f64]> = rot.iter().map(|v| v.as_slice()).collect();
        let moved = content(&rot_refs).unwrap();
        prop_assert!((base - moved).abs() <= 1e-10 * base);
    }

    #[test]
    fn distortion_is_factorial_times_content(xs in prop::collection::vec(coord(), 6)) {
        let pts: Vec<&[f64]> = xs.chunks(2).collect();
        prop_assume!(well_shaped(&pts));
        let c = content(&pts).unwrap();
        let g = distortion_factor(&pts).unwrap();
        prop_assert!((g - 2.0 * c).abs() <= 1e-12 * g.max(1e-30));
    }

    #[test]
    fn signed_distortion_magnitude_and_multilinearity(
        xs in prop::collection::vec(coord(), 4),
        c in -4.0f64..4.0,
    ) {
        let x1 = &xs[0..2];
        let x2 = &xs[2..4];
        let s = signed_distortion(&[x1, x2]).unwrap();
        prop_assume!(s.abs() > 1e-3);

        // magnitude equals the distortion factor of the origin simplex
        let origin = [0.0, 0.0];
        let g = distortion_factor(&[&origin[..], x1, x2]).unwrap();
        prop_assert!((s.abs() - g).abs() <= 1e-10 * g);

        // scaling one column scales the result
        let scaled = [c * x1[0], c * x1[1]];
        let sc = signed_distortion(&[&scaled[..], x2]).unwrap();
        prop_assert!((sc - c * s).abs() <= 1e-12 * (1.0 + (c * s).abs()));
    }

    #[test]
    fn general_and_specialized_forms_agree(
        xs in prop::collection::vec(coord(), 9),
        ka in freq(),
        kb in freq(),
    ) {
        // triangle in the plane at a generic frequency
        let pts: Vec<&[f64]> = xs.chunks(3).map(|c| &c[..2]).collect();
        prop_assume!(well_shaped(&pts));
        let k = [ka, kb];
        let general = simplex_ft(&pts, &k);
        let special = simplex_ft_specialized(&pts, &k);
        match (general, special) {
            (Ok(a), Ok(b)) => {
                let scale = a.norm().max(b.norm()).max(1e-30);
                prop_assert!((a - b).norm() <= 1e-10 * scale, "{a} vs {b}");
            }
            // both routes must agree on collisions as well
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "one route failed: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn simplex_ft_vertex_permutation_invariant(
        xs in prop::collection::vec(coord(), 8),
        ka in freq(),
        kb in freq(),
    ) {
        let pts: Vec<&[f64]> = xs.chunks(2).collect();
        prop_assume!(well_shaped(&pts[..3]));
        let k = [ka, kb];
        let tri = [pts[0], pts[1], pts[2]];
        let swapped = [pts[2], pts[0], pts[1]];
        if let (Ok(a), Ok(b)) = (simplex_ft(&tri, &k), simplex_ft(&swapped, &k)) {
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn upsampled_series_meets_original_at_coarse_centers(
        x0 in 0.2f64..0.8,
        y0 in 0.2f64..0.8,
    ) {
        use nuft::mesh::SimplexMesh;
        use nuft::spectral::{eval_series_at, inverse_transform, upsample_by};
        use nuft::transform::{mesh_ft, JitterConfig, KGrid};

        let mesh = SimplexMesh::with_unit_densities(2, 0, vec![x0, y0], vec![0]).unwrap();
        let spec = mesh_ft(&mesh, &KGrid::cubic(2, 8), &JitterConfig::default()).unwrap();
        let field = inverse_transform(&spec).unwrap();
        let up = upsample_by(&spec, 4).unwrap();
        let centers: Vec<Vec<f64>> = (0..8)
            .flat_map(|i| (0..8).map(move |j| vec![(i as f64 + 0.5) / 8.0, (j as f64 + 0.5) / 8.0]))
            .collect();
        let direct = eval_series_at(&up, &centers);
        for (got, want) in direct.iter().zip(field.values()) {
            prop_assert!((got.re - want).abs() <= 1e-10);
        }
    }
}
