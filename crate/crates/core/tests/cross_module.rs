use nalgebra::DMatrix;
use proptest::prelude::*;

use qdlab_core::combdisc::{disc_exact, disc_heuristic};
use qdlab_core::dpp::{self, DppKernel};
use qdlab_core::matcore::{OrthogonalProjection, QuantumColoring};
use qdlab_core::qdisc::{max_objective, objective, objective_vs_dpp, qdisc_estimate, qdisc_estimate_set_system, QdiscOptions};
use qdlab_core::randmat::{
    exact_mean_trace_sq, exact_mean_trace_sq_fixed_coloring, exact_mean_trace_sq_general, haar_fourth_moments,
    random_coloring_with_plus_count, random_projection_system,
};
use qdlab_core::seeding::rng_for;
use qdlab_core::setsys::{evaluate_coloring, random_set_system, to_projection_system, Coloring};
use qdlab_core::{Rational, C};

type Q128 = num_rational::Ratio<i128>;

// P[X = T] = |det(K − I_{T^c})| for every subset T.
fn subset_law(k: &DppKernel<f64>) -> Vec<f64> {
    let n = k.dim();
    (0..1usize << n)
        .map(|mask| {
            let mut a: DMatrix<C<f64>> = k.matrix().clone();
            for i in (0..n).filter(|i| mask & (1 << i) == 0) {
                a[(i, i)] -= C::new(1.0, 0.0);
            }
            a.determinant().norm()
        })
        .collect()
}

#[test]
fn exact_law_matches_determinant_oracle() {
    let mut rng = rng_for(1, &[]);
    for n in 1..=7 {
        let k: DppKernel<f64> = dpp::random_kernel(n, &mut rng);
        let ours = dpp::exact_distribution(&k).unwrap();
        for (a, b) in ours.iter().zip(subset_law(&k)) {
            assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn fourth_moment_sum_rules() {
    // Σ_j |U_ij|² = 1 splits E|U_ij|² = 1/N into same-row and disjoint terms.
    for n in 2..=30i128 {
        let m = haar_fourth_moments::<Q128>(n as usize).unwrap();
        let inv_n = Q128::new(1, n);
        assert_eq!(m.abs4 + m.shared_line * Q128::from_integer(n - 1), inv_n);
        assert_eq!(m.shared_line + m.disjoint * Q128::from_integer(n - 1), inv_n);
        // Σ_m U_mn Ū_mj = δ_nj, so the cross terms cancel the diagonal one
        assert_eq!(m.shared_line + m.cross * Q128::from_integer(n - 1), Q128::from_integer(0));
    }
}

#[test]
fn second_moment_formulas_agree() {
    for n in 2..=12usize {
        let half = n / 2;
        let trace = 2 * half as i64 - n as i64;
        for r in 0..=n {
            assert_eq!(
                exact_mean_trace_sq::<Rational>(n, r).unwrap(),
                exact_mean_trace_sq_general::<Rational>(n, r, trace).unwrap(),
                "n={n} r={r}"
            );
            let f = exact_mean_trace_sq::<f64>(n, r).unwrap();
            let q = exact_mean_trace_sq::<Rational>(n, r).unwrap();
            assert!((f - *q.numer() as f64 / *q.denom() as f64).abs() < 1e-12);
        }
        // the roles of χ and P are symmetric when both are Haar-rotated
        for k in 0..=n {
            let t = 2 * k as i64 - n as i64;
            assert_eq!(
                exact_mean_trace_sq_fixed_coloring::<Rational>(n, t).unwrap(),
                exact_mean_trace_sq_general::<Rational>(n, half, t).unwrap()
            );
        }
    }
}

#[test]
fn heuristic_never_beats_exhaustive() {
    for seed in 0..20 {
        let s = random_set_system(12, 15, seed).unwrap();
        let exact = disc_exact(&s).unwrap().value;
        assert!(disc_heuristic(&s, 6, seed).unwrap().value >= exact);
    }
}

#[test]
fn projection_systems_replay_from_seed() {
    let a = random_projection_system::<f64>(5, 3, 44).unwrap();
    let b = random_projection_system::<f64>(5, 3, 44).unwrap();
    for (p, q) in a.iter().zip(b.iter()) {
        assert_eq!(p.matrix(), q.matrix());
    }
    let est = qdisc_estimate(&a, &QdiscOptions { restarts: 2, sweeps: 5, seed: 1, plus_counts: None }).unwrap();
    let again = qdisc_estimate(&b, &QdiscOptions { restarts: 2, sweeps: 5, seed: 1, plus_counts: None }).unwrap();
    assert_eq!(est.value, again.value);
    assert_eq!(est.witness.matrix(), again.witness.matrix());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objective_is_dpp_imbalance(seed in any::<u64>(), n in 1usize..7, k_frac in 0.0f64..=1.0, s_mask in any::<u64>()) {
        let k = ((n as f64) * k_frac).round() as usize;
        let chi = random_coloring_with_plus_count::<f64, _>(n, k, &mut rng_for(seed, &[])).unwrap();
        let s: Vec<usize> = (0..n).filter(|i| s_mask & (1 << i) != 0).collect();
        let rec = objective_vs_dpp(&chi, &s).unwrap();
        prop_assert!(rec.difference < 1e-9);

        // brute force over the exact law of the process with kernel (χ + I)/2
        let law = subset_law(&DppKernel::from_coloring(&chi).unwrap());
        let brute: f64 = law.iter().enumerate().map(|(mask, p)| {
            let inside = s.iter().filter(|&&i| mask & (1 << i) != 0).count() as f64;
            p * (2.0 * inside - s.len() as f64).powi(2)
        }).sum();
        prop_assert!((brute - rec.objective_sq).abs() < 1e-9);
    }

    #[test]
    fn diagonal_colorings_recover_set_imbalance(seed in any::<u64>(), n in 1usize..9, m in 1usize..9, mask in any::<u64>()) {
        let s = random_set_system(n, m, seed).unwrap();
        let chi = Coloring::from_mask(n, mask);
        let comb = evaluate_coloring(&s, &chi).unwrap().into_iter().map(i64::unsigned_abs).max().unwrap();
        let q = max_objective(&QuantumColoring::diagonal(chi.signs()).unwrap(), &to_projection_system::<f64>(&s)).unwrap();
        prop_assert!((q - comb as f64).abs() < 1e-9);
    }

    #[test]
    fn set_system_estimate_is_sandwiched(seed in any::<u64>(), n in 1usize..8, m in 1usize..6) {
        let s = random_set_system(n, m, seed).unwrap();
        let est = qdisc_estimate_set_system::<f64>(&s, &QdiscOptions { restarts: 1, sweeps: 4, seed, plus_counts: None }).unwrap();
        prop_assert!(est.qdisc.value >= 0.0);
        prop_assert!(est.qdisc.value <= est.disc as f64 + 1e-9);
        prop_assert!(est.disc_exact);
    }

    #[test]
    fn objective_bounded_by_rank_terms(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = rng_for(seed, &[1]);
        let k = (seed as usize) % (n + 1);
        let chi = random_coloring_with_plus_count::<f64, _>(n, k, &mut rng).unwrap();
        let idx: Vec<usize> = (0..n).filter(|i| (seed >> i) & 1 == 1).collect();
        let p = OrthogonalProjection::coordinate(n, &idx).unwrap();
        let o = objective(&chi, &p).unwrap();
        let r = idx.len() as f64;
        prop_assert!(o.trace_term <= r * r + 1e-9);
        prop_assert!(o.commutator_term >= -1e-9 && o.commutator_term <= r + 1e-9);
    }
}
