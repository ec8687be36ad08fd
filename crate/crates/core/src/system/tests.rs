use super::*;
use crate::random::{complex_gaussian, rng};
use crate::signal::{l2_distance, l2_norm};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_signal(group: &FiniteAbelianGroup, seed: u64) -> Signal {
    let mut r = rng(seed);
    Signal::new(group.clone(), complex_gaussian(&mut r, group.size())).unwrap()
}

fn all_systems() -> Vec<OrthonormalSystem> {
    vec![
        make_dft("4x6".parse().unwrap()),
        make_dft("2x2x3".parse().unwrap()),
        make_wht(5).unwrap(),
        make_gabor_block(8, 4).unwrap(),
        make_haar(64).unwrap(),
    ]
}

/// Naive `M^{-1/2} sum_x f(x) e^{-2 pi i sum_i gamma_i x_i / n_i}` for two factors.
fn character_sum_two_factors(f: &[Complex64], n1: usize, n2: usize) -> Vec<Complex64> {
    let m = n1 * n2;
    let mut out = vec![c(0.0, 0.0); m];
    for (g, slot) in out.iter_mut().enumerate() {
        let (g1, g2) = (g / n2, g % n2);
        for (x, fx) in f.iter().enumerate() {
            let (x1, x2) = (x / n2, x % n2);
            let angle = -2.0 * PI * ((g1 * x1) as f64 / n1 as f64 + (g2 * x2) as f64 / n2 as f64);
            *slot += fx * Complex64::from_polar(1.0, angle);
        }
        *slot /= (m as f64).sqrt();
    }
    out
}

#[test]
fn dft_on_trivial_group_is_identity() {
    let sys = make_dft(FiniteAbelianGroup::cyclic(1).unwrap());
    let f = Signal::new(sys.group().clone(), vec![c(2.5, -1.0)]).unwrap();
    assert_eq!(sys.analyze(&f).unwrap().entries(), &[c(2.5, -1.0)]);
    assert_eq!(sys.tau(), 1.0);
}

#[test]
fn dft_of_delta_is_flat() {
    let sys = make_dft(FiniteAbelianGroup::cyclic(4).unwrap());
    let coeffs = sys.analyze(&Signal::delta(sys.group().clone(), 0)).unwrap();
    for z in coeffs.entries() {
        assert!((z.norm() - 0.5).abs() < 1e-15);
    }
}

#[test]
fn dft_matches_character_sum_on_z2_z3() {
    let sys = make_dft("2x3".parse().unwrap());
    for seed in 0..20 {
        let f = random_signal(sys.group(), seed);
        let fast = sys.analyze(&f).unwrap();
        let naive = character_sum_two_factors(f.values(), 2, 3);
        for (a, b) in fast.entries().iter().zip(&naive) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn dft_matches_character_sum_on_z6() {
    let sys = make_dft(FiniteAbelianGroup::cyclic(6).unwrap());
    let f = random_signal(sys.group(), 99);
    let fast = sys.analyze(&f).unwrap();
    let naive = character_sum_two_factors(f.values(), 1, 6);
    let dev = fast
        .entries()
        .iter()
        .zip(&naive)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(dev < 1e-10, "max deviation {dev}");
}

#[test]
fn wht_base_case() {
    let sys = make_wht(1).unwrap();
    let s = FRAC_1_SQRT_2;
    let rows: Vec<Vec<Complex64>> = (0..2).map(|j| sys.basis_function(j).into_values()).collect();
    assert!(l2_distance(&rows[0], &[c(s, 0.0), c(s, 0.0)]) < 1e-15);
    assert!(l2_distance(&rows[1], &[c(s, 0.0), c(-s, 0.0)]) < 1e-15);
}

#[test]
fn wht_rejects_zero_dimension() {
    assert!(make_wht(0).is_err());
}

#[test]
fn walsh_character_is_a_single_spike() {
    let sys = make_wht(3).unwrap();
    let s_mask = 0b101;
    let chi: Vec<f64> = (0..8usize)
        .map(|x| if (x & s_mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    let f = Signal::from_real(sys.group().clone(), &chi).unwrap();
    let coeffs = sys.analyze(&f).unwrap();
    for (j, z) in coeffs.entries().iter().enumerate() {
        let expected = if j == s_mask { 8f64.sqrt() } else { 0.0 };
        assert!((z - c(expected, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn wht_matches_sign_pattern() {
    let sys = make_wht(2).unwrap();
    for j in 0..4usize {
        let phi = sys.basis_function(j);
        for x in 0..4usize {
            let sign = if (j & x).count_ones() % 2 == 0 { 0.5 } else { -0.5 };
            assert!((phi.values()[x] - c(sign, 0.0)).norm() < 1e-15);
        }
    }
}

#[test]
fn gabor_with_one_row_is_the_dft() {
    let gabor = make_gabor_block(8, 1).unwrap();
    let dft = make_dft(FiniteAbelianGroup::cyclic(8).unwrap());
    let f = random_signal(dft.group(), 3);
    let f_rows = Signal::new(gabor.group().clone(), f.values().to_vec()).unwrap();
    let a = gabor.analyze(&f_rows).unwrap();
    let b = dft.analyze(&f).unwrap();
    assert!(l2_distance(a.entries(), b.entries()) < 1e-12);
}

#[test]
fn gabor_tau_fails_the_bound() {
    let sys = make_gabor_block(4, 3).unwrap();
    let b = sys.check_boundedness();
    assert_eq!(b.tau, 0.5);
    assert!((b.bound - 12f64.sqrt().recip()).abs() < 1e-15);
    assert!((b.bound - 0.2887).abs() < 1e-4);
    assert!(!b.passes);
}

#[test]
fn gabor_is_the_row_wise_dft() {
    let (n, t) = (6, 4);
    let sys = make_gabor_block(n, t).unwrap();
    for seed in 0..10 {
        let f = random_signal(sys.group(), 100 + seed);
        let coeffs = sys.analyze(&f).unwrap();
        for a in 0..t {
            for m in 0..n {
                let mut acc = c(0.0, 0.0);
                for time in 0..n {
                    let angle = -2.0 * PI * (m * time) as f64 / n as f64;
                    acc += f.values()[time * t + a] * Complex64::from_polar(1.0, angle);
                }
                acc /= (n as f64).sqrt();
                assert!((coeffs.entries()[m * t + a] - acc).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn haar_smallest_case() {
    let sys = make_haar(2).unwrap();
    let s = FRAC_1_SQRT_2;
    assert!(l2_distance(sys.basis_function(0).values(), &[c(s, 0.0), c(s, 0.0)]) < 1e-15);
    assert!(l2_distance(sys.basis_function(1).values(), &[c(s, 0.0), c(-s, 0.0)]) < 1e-15);
    assert!((sys.tau() - s).abs() < 1e-15);
}

#[test]
fn haar_of_constant_is_one_spike() {
    let sys = make_haar(8).unwrap();
    let f = Signal::from_real(sys.group().clone(), &[3.0; 8]).unwrap();
    let coeffs = sys.analyze(&f).unwrap();
    assert!((coeffs.entries()[0] - c(3.0 * 8f64.sqrt(), 0.0)).norm() < 1e-12);
    assert!(coeffs.entries()[1..].iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn haar_gram_matrix_is_identity() {
    let sys = make_haar(4).unwrap();
    let basis: Vec<Signal> = (0..4).map(|j| sys.basis_function(j)).collect();
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            let ip: Complex64 = bi.values().iter().zip(bj.values()).map(|(a, b)| a * b.conj()).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((ip - c(expected, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn haar_rejects_non_powers_of_two() {
    assert!(make_haar(12).is_err());
    assert!(make_haar(0).is_err());
}

#[test]
fn haar_tau_is_finest_scale_modulus() {
    for n in 1..8u32 {
        let m = 1usize << n;
        let sys = make_haar(m).unwrap();
        let expected = 2f64.powf((n as f64 - 1.0) / 2.0) / (m as f64).sqrt();
        assert!((sys.tau() - expected).abs() < 1e-14);
    }
}

#[test]
fn analyze_basis_function_gives_unit_vector() {
    for sys in all_systems() {
        for j in [0, 1, sys.size() / 2, sys.size() - 1] {
            let coeffs = sys.analyze(&sys.basis_function(j)).unwrap();
            for (i, z) in coeffs.entries().iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((z - c(expected, 0.0)).norm() < 1e-12, "{:?} j={j}", sys);
            }
        }
    }
}

#[test]
fn zero_maps_to_zero() {
    for sys in all_systems() {
        let zero = Signal::zeros(sys.group().clone());
        assert!(!sys.analyze(&zero).unwrap().is_nonzero());
        let back = sys
            .synthesize(&CoefficientVector::raw(vec![c(0.0, 0.0); sys.size()]))
            .unwrap();
        assert!(!back.is_nonzero());
    }
}

#[test]
fn domain_and_dimension_mismatches_are_errors() {
    let sys = make_dft("4x6".parse().unwrap());
    let other = Signal::zeros("6x4".parse().unwrap());
    assert!(matches!(sys.analyze(&other), Err(Error::DomainMismatch { .. })));
    let short = CoefficientVector::raw(vec![c(1.0, 0.0); 23]);
    assert!(matches!(sys.synthesize(&short), Err(Error::DimensionMismatch { .. })));
    let wht_coeffs = make_wht(3).unwrap().analyze(&Signal::zeros(FiniteAbelianGroup::boolean_cube(3).unwrap())).unwrap();
    assert!(make_haar(8).unwrap().synthesize(&wht_coeffs).is_err());
}

#[test]
fn boundedness_of_constant_modulus_systems() {
    let b = make_dft(FiniteAbelianGroup::cyclic(16).unwrap()).check_boundedness();
    assert_eq!(b.tau, 0.25);
    assert!(b.passes);
    let b = make_wht(4).unwrap().check_boundedness();
    assert_eq!(b.tau, 0.25);
    assert!(b.passes);
}

#[test]
fn parseval_and_roundtrip() {
    for sys in all_systems() {
        for seed in 0..100 {
            let f = random_signal(sys.group(), seed);
            let coeffs = sys.analyze(&f).unwrap();
            let norm = f.l2_norm();
            assert!((coeffs.l2_norm() - norm).abs() <= 1e-10 * norm);
            let back = sys.synthesize(&coeffs).unwrap();
            assert!(back.distance(&f) <= 1e-10 * norm);
        }
    }
}

#[test]
fn gram_matrix_and_tau_by_dense_evaluation() {
    for sys in all_systems() {
        let m = sys.size();
        assert!(m <= 64);
        let basis: Vec<Vec<Complex64>> = (0..m).map(|j| sys.basis_function(j).into_values()).collect();
        let mut tau: f64 = 0.0;
        for (i, bi) in basis.iter().enumerate() {
            tau = tau.max(bi.iter().map(|z| z.norm()).fold(0.0, f64::max));
            for (j, bj) in basis.iter().enumerate() {
                let ip: Complex64 = bi.iter().zip(bj).map(|(a, b)| a * b.conj()).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(expected, 0.0)).norm() < 1e-10);
            }
        }
        assert!((tau - sys.tau()).abs() < 1e-12, "{sys:?}: dense tau {tau}");
    }
}

#[test]
fn closed_form_values_match_synthesis() {
    for sys in all_systems() {
        for j in 0..sys.size() {
            let phi = sys.basis_function(j);
            for x in 0..sys.size() {
                assert!((phi.values()[x] - sys.basis_value(j, x)).norm() < 1e-12, "{sys:?} j={j} x={x}");
            }
        }
    }
}

#[test]
fn constant_modulus_entries() {
    for sys in [make_dft("4x4".parse().unwrap()), make_wht(4).unwrap()] {
        let target = (sys.size() as f64).sqrt().recip();
        for j in 0..sys.size() {
            for z in sys.basis_function(j).values() {
                assert!((z.norm() - target).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn spec_strings_roundtrip() {
    for s in ["dft:4x6", "wht:5", "gabor:N=16,T=8", "haar:64"] {
        let spec: SystemSpec = s.parse().unwrap();
        assert_eq!(spec.to_string(), s);
        let sys = OrthonormalSystem::from_spec(&spec).unwrap();
        assert_eq!(sys.spec(), &spec);
    }
    assert!(matches!("fourier:4".parse::<SystemSpec>(), Err(Error::UnknownSystem(_))));
    assert!("gabor:N=4".parse::<SystemSpec>().is_err());
    let _ = l2_norm(&[]);
}
