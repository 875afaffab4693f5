//! Randomized invariants. Each case draws a seed and a dimension; the
//! geometric objects are then sampled from the seeded trial generator.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

use tslab_core::lorentz::{
    dist, exp_alg, exp_boost, exp_pade, is_exp_s, is_in_k0a0, random_boost, random_group_element,
    random_k0, random_rotation, random_unit, trial_rng, AlgebraElement, GroupElement, HPoint,
    TrialRng,
};
use tslab_core::measure::{numeric_jacobian_ratio, random_coordinate, RatioStats, FD_STEP};
use tslab_core::parabolic::{
    dim_identity_terms, is_spherical_triple, pair_dim, pair_intersection_basis,
    pair_intersection_dim, parabolic_basis, parabolic_dim, triple_dim, triple_intersection_dim,
    Parabolic, MEMBERSHIP_TOL,
};
use tslab_core::polar::{
    canonical_a, infinitesimal_polar_decompose, kah_decompose, same_orbit, TripleDirections,
    KAH_TOL,
};
use tslab_core::subspace::{
    direct_triple_rank, extend_to_basis, split_triple, triple_sum_decomposable, triple_sum_dims,
    Subspace, DEFAULT_RANK_TOL,
};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn gaussian(d: usize, rng: &mut TrialRng) -> DVector<f64> {
    random_unit(d, rng) * rng.random_range(0.5..2.0)
}

/// Span of `k` random vectors, optionally sharing the first `shared` with `base`.
fn random_span(d: usize, k: usize, base: &[DVector<f64>], rng: &mut TrialRng) -> Subspace {
    let shared = base.len().min(k);
    let mut vs: Vec<DVector<f64>> = base[..shared].to_vec();
    while vs.len() < k {
        vs.push(gaussian(d, rng));
    }
    Subspace::span(d, &vs, DEFAULT_RANK_TOL).unwrap()
}

fn random_s0(n: usize, rng: &mut TrialRng) -> AlgebraElement {
    AlgebraElement::boost(gaussian(n, rng))
}

fn rank2_dirs(n: usize, rng: &mut TrialRng) -> TripleDirections {
    let u1 = random_unit(n, rng);
    let mut u2 = random_unit(n, rng);
    while (u1.dot(&u2).abs() - 1.0).abs() < 1e-3 {
        u2 = random_unit(n, rng);
    }
    let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    TripleDirections::normalized(u1.clone(), u2.clone(), &u1 * a + &u2 * b).unwrap()
}

fn dirs_of_rank(n: usize, rank: usize, rng: &mut TrialRng) -> TripleDirections {
    match rank {
        1 => {
            let u = random_unit(n, rng);
            TripleDirections::new(u.clone(), -&u, u).unwrap()
        }
        2 => rank2_dirs(n, rng),
        _ => TripleDirections::new(
            random_unit(n, rng),
            random_unit(n, rng),
            random_unit(n, rng),
        )
        .unwrap(),
    }
}

fn random_triple(n: usize, rng: &mut TrialRng) -> [GroupElement; 3] {
    std::array::from_fn(|_| random_group_element(n, rng))
}

fn e(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn intersection_plus_sum_dims(seed in any::<u64>(), d in 2usize..9, k1 in 0usize..9, k2 in 0usize..9, shared in 0usize..4) {
        let mut rng = trial_rng(seed, 0);
        let (k1, k2) = (k1.min(d), k2.min(d));
        let base: Vec<DVector<f64>> = (0..shared).map(|_| gaussian(d, &mut rng)).collect();
        let s1 = random_span(d, k1, &base, &mut rng);
        let s2 = random_span(d, k2, &base, &mut rng);
        let sum = s1.sum(&s2).unwrap();
        let cap = s1.intersect(&s2).unwrap();
        prop_assert_eq!(cap.dim() + sum.dim(), s1.dim() + s2.dim());
        for v in cap.basis_vectors() {
            prop_assert!(s1.contains(&v).unwrap() && s2.contains(&v).unwrap());
        }
    }

    #[test]
    fn triple_lemma_matches_direct_rank(seed in any::<u64>(), d in 1usize..7, dims in prop::array::uniform3(0usize..7), shared in 0usize..3, equal_pair in any::<bool>()) {
        let mut rng = trial_rng(seed, 1);
        let base: Vec<DVector<f64>> = (0..shared).map(|_| gaussian(d, &mut rng)).collect();
        let u1 = random_span(d, dims[0].min(d), &base, &mut rng);
        let u2 = if equal_pair { u1.clone() } else { random_span(d, dims[1].min(d), &base, &mut rng) };
        let u3 = random_span(d, dims[2].min(d), &base, &mut rng);
        let lemma = triple_sum_decomposable(&u1, &u2, &u3).unwrap();
        let direct = direct_triple_rank(&u1, &u2, &u3).unwrap() == 3 * d;
        prop_assert_eq!(lemma, direct);
        let sums = triple_sum_dims(&u1, &u2, &u3).unwrap();
        let full = sums.iter().filter(|&&k| k == d).count();
        prop_assert!(full != 2, "two sums full but not the third: {sums:?}");
    }

    #[test]
    fn split_reconstructs(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = trial_rng(seed, 2);
        let u: Vec<Subspace> = (0..3).map(|_| random_span(d, d - 1, &[], &mut rng)).collect();
        prop_assume!(triple_sum_decomposable(&u[0], &u[1], &u[2]).unwrap());
        let x: Vec<DVector<f64>> = (0..3).map(|_| gaussian(d, &mut rng)).collect();
        let split = split_triple([&x[0], &x[1], &x[2]], [&u[0], &u[1], &u[2]]).unwrap();
        let scale = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(split.residual < 1e-9 * scale.max(1.0));
        for j in 0..3 {
            prop_assert!(u[j].contains(&split.u[j]).unwrap());
            let back = &split.components[j] + &split.diag_part;
            prop_assert!((back - &x[j]).norm() < 1e-9 * scale.max(1.0));
        }
    }

    #[test]
    fn xux_is_symmetric_positive(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 3, 5])) {
        let mut rng = trial_rng(seed, 3);
        let x = exp_alg(&random_s0(n, &mut rng));
        let u = exp_alg(&random_s0(n, &mut rng));
        prop_assert!(is_exp_s(&(&(&x * &u) * &x), 1e-9));
    }

    #[test]
    fn closed_boost_matches_pade(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = trial_rng(seed, 4);
        let x = random_s0(n, &mut rng);
        let scale = exp_pade(&x).matrix().amax();
        prop_assert!((exp_boost(&x.b).matrix() - exp_pade(&x).matrix()).amax() < 1e-12 * scale);
    }

    #[test]
    fn cartan_involution_and_distance(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = trial_rng(seed, 5);
        let k = random_k0(n, &mut rng);
        let a = random_boost(n, &mut rng);
        let g = random_group_element(n, &mut rng);
        prop_assert!(g.cartan_involution().satisfies_invariants(1e-8));
        prop_assert!(k.cartan_involution().distance(&k) < 1e-12);
        prop_assert!((&a.cartan_involution() * &a).distance(&GroupElement::identity(n)) < 1e-9 * a.matrix().amax().powi(2));
        let p: Vec<HPoint> = (0..3).map(|_| random_group_element(n, &mut rng).act(&HPoint::origin(n))).collect();
        prop_assert!((dist(&p[0], &p[1]) - dist(&p[1], &p[0])).abs() < 1e-12);
        prop_assert!(dist(&p[0], &p[2]) <= dist(&p[0], &p[1]) + dist(&p[1], &p[2]) + 1e-9);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn kah_recomposes(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = trial_rng(seed, 6);
        let dirs = rank2_dirs(n, &mut rng);
        let g = random_triple(n, &mut rng);
        let res = kah_decompose(&g, &dirs).unwrap();
        prop_assert!(res.residual < KAH_TOL);
        prop_assert!(res.max_deviation(&g, &dirs) < KAH_TOL);
        for k in &res.k {
            prop_assert!(k.fixes_origin(1e-9));
        }
        if let Some(slide) = res.slide {
            prop_assert!(slide.f_start * slide.f_end <= 0.0);
        }
    }

    #[test]
    fn infinitesimal_iff_rank_two_iff_global(seed in any::<u64>(), n in 3usize..7, rank in 1usize..4) {
        let mut rng = trial_rng(seed, 7);
        let dirs = dirs_of_rank(n, rank, &mut rng);
        let z: [DVector<f64>; 3] = std::array::from_fn(|_| gaussian(n, &mut rng));
        let infinitesimal = infinitesimal_polar_decompose(&z, &dirs).is_ok();
        let global = kah_decompose(&random_triple(n, &mut rng), &dirs).is_ok();
        prop_assert_eq!(infinitesimal, rank == 2);
        prop_assert_eq!(global, rank == 2);
    }

    #[test]
    fn canonical_form_is_bi_invariant(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 3, 5])) {
        let mut rng = trial_rng(seed, 8);
        let dirs = TripleDirections::new(e(n, n - 1), e(n, n - 1), e(n, 0)).unwrap();
        let g = random_triple(n, &mut rng);
        let k: [GroupElement; 3] = std::array::from_fn(|_| random_k0(n, &mut rng));
        let h = random_group_element(n, &mut rng);
        let moved: [GroupElement; 3] = std::array::from_fn(|j| &(&k[j] * &g[j]) * &h);
        let t = kah_decompose(&g, &dirs).unwrap().t;
        let t_moved = kah_decompose(&moved, &dirs).unwrap().t;
        prop_assume!((t[0] - t[1]).abs() > 1e-3);
        let (c, c_moved) = (canonical_a(t, n), canonical_a(t_moved, n));
        for j in 0..3 {
            prop_assert!((c[j] - c_moved[j]).abs() < 1e-6, "{c:?} vs {c_moved:?}");
        }
        prop_assert!(same_orbit(t, t_moved, n, 1e-6).unwrap());
    }

    #[test]
    fn coincident_lines_give_k0a0(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = trial_rng(seed, 9);
        let u = random_unit(n, &mut rng);
        let frame = DMatrix::from_columns(&extend_to_basis(std::slice::from_ref(&u), n));
        let mut block = DMatrix::identity(n, n);
        if n > 2 {
            block.view_mut((1, 1), (n - 1, n - 1)).copy_from(&random_rotation(n - 1, &mut rng));
        }
        let m = GroupElement::rotation(&(&frame * block * frame.transpose()));
        let a = |t: f64| exp_boost(&(&u * t));
        let t0: f64 = rng.random_range(0.2..2.0);
        let (t1, t3) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let t2 = t3 + t0;
        let h = &a(-t3) * &m.inverse();
        let k1 = random_k0(n, &mut rng);
        let g1 = &(&k1 * &a(t1)) * &h;
        let g2 = &(&m * &a(t2)) * &h;
        let g3 = &(&m * &a(t3)) * &h;
        prop_assert!(g3.distance(&GroupElement::identity(n)) < 1e-9);
        prop_assert!(g2.distance(&a(t0)) < 1e-9);
        prop_assert!(is_in_k0a0(&g1, &u, 1e-9).unwrap());
    }

    #[test]
    fn parabolic_dims_follow_formulas(seed in any::<u64>(), n in 2usize..13) {
        let mut rng = trial_rng(seed, 10);
        let ps: Vec<Parabolic> = (0..3).map(|_| Parabolic::new(random_unit(n, &mut rng)).unwrap()).collect();
        let basis = parabolic_basis(&ps[0]).unwrap();
        prop_assert_eq!(basis.len(), parabolic_dim(n));
        prop_assert_eq!(basis.rank(), parabolic_dim(n));
        prop_assert!(basis.max_membership_defect(&[&ps[0]]) < MEMBERSHIP_TOL);
        let pair = pair_intersection_basis(&ps[0], &ps[1]).unwrap();
        prop_assert!(pair.max_membership_defect(&[&ps[0], &ps[1]]) < MEMBERSHIP_TOL);
        prop_assert_eq!(pair_intersection_dim(&ps[0], &ps[1]).unwrap(), pair_dim(n));
        prop_assert_eq!(triple_intersection_dim(&ps[0], &ps[1], &ps[2]).unwrap(), triple_dim(n));
        prop_assert!(dim_identity_terms(&ps[0], &ps[1], &ps[2]).unwrap().holds());
    }

    #[test]
    fn dependent_triples_follow_formulas(seed in any::<u64>(), n in 3usize..13) {
        let mut rng = trial_rng(seed, 11);
        let (v, w) = (random_unit(n, &mut rng), random_unit(n, &mut rng));
        let plane = extend_to_basis(&[v, w], n);
        let q = |t: f64| Parabolic::new(&plane[0] * t.cos() + &plane[1] * t.sin()).unwrap();
        let ps = [q(rng.random_range(0.0..2.0)), q(rng.random_range(2.1..4.0)), q(rng.random_range(4.1..6.2))];
        prop_assert_eq!(triple_intersection_dim(&ps[0], &ps[1], &ps[2]).unwrap(), triple_dim(n));
        prop_assert!(dim_identity_terms(&ps[0], &ps[1], &ps[2]).unwrap().holds());
    }

    #[test]
    fn sphericality_routes_agree(seed in any::<u64>(), n in 2usize..11, pattern in 0usize..4) {
        let mut rng = trial_rng(seed, 12);
        let q1 = random_unit(n, &mut rng);
        let q2 = match pattern {
            0 => q1.clone(),
            1 => (&q1 + random_unit(n, &mut rng) * 1e-6).normalize(),
            _ => random_unit(n, &mut rng),
        };
        let q3 = if pattern == 3 { -&q1 } else { random_unit(n, &mut rng) };
        let ps: Vec<Parabolic> = [q1, q2, q3].into_iter().map(|q| Parabolic::new(q).unwrap()).collect();
        let check = is_spherical_triple(&ps[0], &ps[1], &ps[2]).unwrap();
        prop_assert!(check.agree(), "{check:?}");
        prop_assert_eq!(check.spherical(), pattern != 0);
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn measure_ratio_constant_and_left_invariant(seed in any::<u64>(), n in 2usize..4) {
        let mut rng = trial_rng(seed, 13);
        let points: Vec<_> = (0..6).map(|_| random_coordinate(n, &mut rng)).collect();
        let ratios: Vec<f64> = points.iter().map(|c| numeric_jacobian_ratio(c, FD_STEP).unwrap()).collect();
        prop_assert!(RatioStats::from_samples(&ratios).relative_spread() < 1e-4);
        let mut moved = points[0].clone();
        for k in moved.k.iter_mut() {
            *k = &random_k0(n, &mut rng) * k;
        }
        let r = numeric_jacobian_ratio(&moved, FD_STEP).unwrap();
        prop_assert!((r / ratios[0] - 1.0).abs() < 1e-6);
    }
}
