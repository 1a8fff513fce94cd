use bounded_sampling::domain::{BoxDomain, Point};
use bounded_sampling::linalg::CsrMatrix;
use bounded_sampling::quadrature::GaussLegendre;
use bounded_sampling::sampling::{oscillation, PartitionOfUnity, PsiFamily, SamplingSet};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn nodes_1d(xs: &[f64]) -> Vec<Point> {
    xs.iter().map(|&x| [x, 0.0]).collect()
}

#[test]
fn linear_oscillation_equals_delta() {
    let unit = BoxDomain::interval(0.0, 1.0).unwrap();
    let osc = oscillation(|p| p[0], &unit, 0.1, 0.1 / 64.0);
    assert!((osc - 0.1).abs() <= 0.1 / 64.0, "{osc}");
    assert_eq!(oscillation(|_| 3.0, &unit, 0.1, 0.01), 0.0);
}

#[test]
fn gauss_legendre_two_point_rule() {
    let r = GaussLegendre::new(2);
    let x = 1.0 / 3f64.sqrt();
    assert!((r.nodes()[0] + x).abs() < 1e-15 && (r.nodes()[1] - x).abs() < 1e-15);
    assert!(r.weights().iter().all(|w| (w - 1.0).abs() < 1e-15));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn voronoi_and_hat_partitions_sum_to_one(
        xs in prop::collection::vec(0.0f64..2.0, 2..20),
        probes in prop::collection::vec(0.0f64..2.0, 1..20),
    ) {
        let domain = BoxDomain::interval(0.0, 2.0).unwrap();
        let set = SamplingSet::new(&domain, nodes_1d(&xs)).unwrap();
        for family in [PsiFamily::Voronoi, PsiFamily::Hat] {
            let psi = PartitionOfUnity::new(family, &set).unwrap();
            for &x in &probes {
                let vals: Vec<f64> = (0..psi.len()).map(|l| psi.eval(l, &[x, 0.0])).collect();
                prop_assert!(vals.iter().all(|v| (0.0..=1.0 + 1e-14).contains(v)));
                prop_assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn voronoi_partition_in_2d(
        pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..15),
        probe in (0.0f64..1.0, 0.0f64..1.0),
    ) {
        let domain = BoxDomain::square(0.0, 1.0).unwrap();
        let set = SamplingSet::new(&domain, pts.iter().map(|&(x, y)| [x, y]).collect()).unwrap();
        let psi = PartitionOfUnity::new(PsiFamily::Voronoi, &set).unwrap();
        let p = [probe.0, probe.1];
        let total: f64 = (0..psi.len()).map(|l| psi.eval(l, &p)).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let cells = set.cells();
        let area: f64 = (0..cells.len()).map(|i| cells.measure(i)).sum();
        prop_assert!((area - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quasi_interpolation_is_linear_positive_and_bounded(
        xs in prop::collection::vec(0.0f64..1.0, 3..12),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        x in 0.0f64..1.0,
        seed in 0u64..1000,
    ) {
        let domain = BoxDomain::interval(0.0, 1.0).unwrap();
        let set = SamplingSet::new(&domain, nodes_1d(&xs)).unwrap();
        let n = set.len();
        let f: Vec<f64> = (0..n).map(|i| ((i as u64 * 7919 + seed) % 101) as f64 / 50.0 - 1.0).collect();
        let g: Vec<f64> = (0..n).map(|i| ((i as u64 * 104729 + seed) % 97) as f64 / 48.0).collect();
        let combo: Vec<f64> = f.iter().zip(&g).map(|(u, v)| a * u + b * v).collect();
        for family in [PsiFamily::Voronoi, PsiFamily::Hat] {
            let psi = PartitionOfUnity::new(family, &set).unwrap();
            let q = |s: &[f64]| psi.quasi_interpolate(s, &[x, 0.0]);
            prop_assert!((q(&combo) - a * q(&f) - b * q(&g)).abs() < 1e-12);
            prop_assert!(q(&g) >= 0.0);
            let sup = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(q(&f).abs() <= sup + 1e-15);
        }
    }

    #[test]
    fn oscillation_is_monotone_and_subadditive(k1 in 8u32..400, k2 in 8u32..400, w in 1.0f64..8.0) {
        let domain = BoxDomain::interval(0.0, 1.0).unwrap();
        let f = |p: &Point| (w * p[0]).sin();
        // Radii on the probe grid, so all three balls see the same points.
        let spacing = 1.0 / 2048.0;
        let (d1, d2) = (k1 as f64 * spacing, k2 as f64 * spacing);
        let (o1, o2) = (oscillation(f, &domain, d1, spacing), oscillation(f, &domain, d2, spacing));
        let o12 = oscillation(f, &domain, d1 + d2, spacing);
        prop_assert!(o12 >= o1.max(o2) - 1e-12);
        prop_assert!(o12 <= o1 + o2 + 1e-12);
    }

    #[test]
    fn csr_text_round_trip(rows in 1usize..8, cols in 1usize..8, seed in 0u64..10_000, dense in any::<bool>()) {
        let m = DMatrix::from_fn(rows, cols, |i, j| {
            let v = ((i * 31 + j * 17) as u64 + seed) % 5;
            if v < 2 { 0.0 } else { v as f64 / 3.0 - (j as f64) * 0.1 }
        });
        let csr = CsrMatrix::from_dense(&m);
        let back = CsrMatrix::from_text(&csr.to_text(dense)).unwrap();
        prop_assert_eq!(back.to_dense(), m.clone());
        let x: Vec<f64> = (0..cols).map(|j| j as f64 - 1.5).collect();
        let y = csr.apply(&x);
        let expected = &m * nalgebra::DVector::from_vec(x);
        for (a, b) in y.iter().zip(expected.iter()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_2k_minus_1(k in 1usize..20, a in -2.0f64..0.0, b in 0.1f64..3.0) {
        let rule = GaussLegendre::cached(k);
        let deg = 2 * k - 1;
        let got = rule.integrate(a, b, |x| x.powi(deg as i32));
        let exact = (b.powi(deg as i32 + 1) - a.powi(deg as i32 + 1)) / (deg + 1) as f64;
        prop_assert!((got - exact).abs() < 1e-11 * (1.0 + exact.abs()), "{got} {exact}");
    }
}
