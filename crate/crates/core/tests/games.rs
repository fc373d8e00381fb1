mod common;

use rand::SeedableRng;
use teamdiff_core::games::{estimate_constants, nash_solve, GameOracle};
use teamdiff_core::graph::Team;
use teamdiff_core::linalg::Matrix;
use teamdiff_core::rng::{stream, StreamRng};
use teamdiff_core::QuadraticZeroSumGame;

fn grad(game: &dyn GameOracle, t: Team, k: usize, own: &[f64], other: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; own.len()];
    game.local_grad(t, k, own, other, &mut g).unwrap();
    g
}

#[test]
fn local_gradient_matches_central_differences() {
    let game = common::quadratic(4, 0.0);
    let w1 = [0.7, -1.3];
    let w2 = [0.2, 0.9];
    let h = 1e-6;
    for k in 0..4 {
        for t in Team::BOTH {
            let (own, other) = match t {
                Team::One => (w1, w2),
                Team::Two => (w2, w1),
            };
            let g = grad(&game, t, k, &own, &other);
            for j in 0..2 {
                let cost = |d: f64| {
                    let mut o = own;
                    o[j] += d;
                    match t {
                        Team::One => game.local_cost(t, k, &o, &other),
                        Team::Two => game.local_cost(t, k, &other, &o),
                    }
                };
                let fd = (cost(h) - cost(-h)) / (2.0 * h);
                assert!((fd - g[j]).abs() < 1e-7, "team {t:?} agent {k} coord {j}: {fd} vs {}", g[j]);
            }
        }
    }
}

#[test]
fn team_average_is_the_base_game() {
    let game = common::quadratic(6, 0.0);
    let w1 = [0.4, -0.2];
    let w2 = [-1.1, 0.5];
    let mut avg = [0.0; 2];
    for k in 0..6 {
        let g = grad(&game, Team::One, k, &w1, &w2);
        avg[0] += g[0] / 6.0;
        avg[1] += g[1] / 6.0;
    }
    // P w1 + C w2 + b with P = I
    let c = common::coupling();
    for i in 0..2 {
        let expected = w1[i] + c[(i, 0)] * w2[0] + c[(i, 1)] * w2[1] + [1.0, -0.5][i];
        assert!((avg[i] - expected).abs() < 1e-12);
    }
}

#[test]
fn zero_sum_identity_holds_for_team_averages() {
    let game = common::quadratic(3, 0.0);
    let w1 = [0.3, 0.1];
    let w2 = [-0.6, 1.4];
    let mut total = 0.0;
    for k in 0..3 {
        total += game.local_cost(Team::One, k, &w1, &w2) + game.local_cost(Team::Two, k, &w1, &w2);
    }
    assert!(total.abs() < 1e-12, "{total}");
}

#[test]
fn shifted_agent_gradient_adds_its_shift() {
    let e1 = vec![1.0, 0.0];
    let game = QuadraticZeroSumGame::new(
        Matrix::identity(2, 2),
        Matrix::identity(2, 2),
        Matrix::zeros(2, 2),
        vec![0.5, 2.0],
        vec![0.0, 0.0],
        vec![e1.clone(), vec![-1.0, 0.0]],
        vec![vec![0.0; 2]; 2],
        0.0,
    )
    .unwrap();
    assert_eq!(grad(&game, Team::One, 0, &[0.0; 2], &[0.0; 2]), vec![1.5, 2.0]);
    assert_eq!(grad(&game, Team::One, 1, &[0.0; 2], &[0.0; 2]), vec![-0.5, 2.0]);
}

#[test]
fn nash_point_of_random_game_has_tiny_residual() {
    let mut rng = StreamRng::seed_from_u64(11);
    use rand::Rng;
    let mut rand_mat = |n: usize, m: usize, s: f64| Matrix::from_fn(n, m, |_, _| s * (rng.gen::<f64>() - 0.5));
    let a = rand_mat(3, 3, 1.0);
    let p = &a * a.transpose() + Matrix::identity(3, 3);
    let b = rand_mat(3, 3, 1.0);
    let q = &b * b.transpose() + Matrix::identity(3, 3) * 0.5;
    let c = rand_mat(3, 3, 0.3);
    let game = QuadraticZeroSumGame::with_random_shifts(p.clone(), q.clone(), c.clone(), vec![0.3, -1.0, 2.0], vec![1.0, 0.0, -0.4], [2, 2], 0.5, 3, 0.0).unwrap();
    let nash = nash_solve(&game).unwrap();
    let avg = |t: Team, i: usize| -> f64 {
        (0..2)
            .map(|k| match t {
                Team::One => grad(&game, t, k, &nash.w1_star, &nash.w2_star)[i],
                Team::Two => grad(&game, t, k, &nash.w2_star, &nash.w1_star)[i],
            })
            .sum::<f64>()
            / 2.0
    };
    for i in 0..3 {
        assert!(avg(Team::One, i).abs() <= 1e-9);
        assert!(avg(Team::Two, i).abs() <= 1e-9);
    }
}

#[test]
fn gradient_noise_statistics() {
    let sigma = 0.3;
    let game = common::quadratic(2, sigma);
    let w1 = [0.1, 0.2];
    let w2 = [-0.3, 0.4];
    let exact = grad(&game, Team::Two, 1, &w2, &w1);
    let n = 100_000;
    let mut rng = stream(5, 0, 0, 0);
    let mut sum = [0.0; 2];
    let mut sq = 0.0;
    let mut g = vec![0.0; 2];
    for _ in 0..n {
        game.stoch_grad(Team::Two, 1, &w2, &w1, &mut rng, &mut g).unwrap();
        let e = [g[0] - exact[0], g[1] - exact[1]];
        sum[0] += e[0];
        sum[1] += e[1];
        sq += e[0] * e[0] + e[1] * e[1];
    }
    for s in sum {
        assert!((s / n as f64).abs() <= 4.0 * sigma / (n as f64).sqrt());
    }
    let second = sq / n as f64;
    assert!((second - sigma * sigma).abs() <= 0.05 * sigma * sigma, "{second}");
}

#[test]
fn noiseless_and_seeded_draws_are_reproducible() {
    let game = common::quadratic(2, 0.0);
    let mut a = vec![0.0; 2];
    game.stoch_grad(Team::One, 0, &[1.0, 2.0], &[0.0, 1.0], &mut stream(1, 0, 0, 1), &mut a).unwrap();
    assert_eq!(a, grad(&game, Team::One, 0, &[1.0, 2.0], &[0.0, 1.0]));

    let noisy = game.with_sigma(0.5);
    let mut b = vec![0.0; 2];
    let mut c = vec![0.0; 2];
    noisy.stoch_grad(Team::One, 0, &[1.0, 2.0], &[0.0, 1.0], &mut stream(1, 0, 0, 1), &mut b).unwrap();
    noisy.stoch_grad(Team::One, 0, &[1.0, 2.0], &[0.0, 1.0], &mut stream(1, 0, 0, 1), &mut c).unwrap();
    assert_eq!(b, c);
    assert_ne!(a, b);
}

fn scalar(p: f64) -> QuadraticZeroSumGame {
    let one = |v: f64| Matrix::from_element(1, 1, v);
    QuadraticZeroSumGame::new(one(p), one(p), one(0.0), vec![0.0], vec![0.0], vec![vec![0.0]], vec![vec![0.0]], 0.0).unwrap()
}

#[test]
fn constants_of_scalar_quadratic() {
    let mut rng = StreamRng::seed_from_u64(2);
    let est = estimate_constants(&scalar(2.0), 1.0, 4000, &mut rng);
    assert!(est.g_hat <= 2.0 + 1e-12 && est.g_hat > 1.9, "{est:?}");
    assert!((est.delta_hat - 2.0).abs() < 1e-9, "{est:?}");
}

#[test]
fn constants_of_zero_game_vanish() {
    let mut rng = StreamRng::seed_from_u64(2);
    let est = estimate_constants(&common::zero_game(3, 2), 1.0, 200, &mut rng);
    assert_eq!((est.delta_hat, est.g_hat), (0.0, 0.0));
}

#[test]
fn gradient_bound_grows_linearly_with_radius() {
    let game = common::quadratic(3, 0.0).with_sigma(0.0);
    let pure = QuadraticZeroSumGame::new(
        game.p().clone(),
        game.q().clone(),
        game.coupling().clone(),
        vec![0.0; 2],
        vec![0.0; 2],
        vec![vec![0.0; 2]; 3],
        vec![vec![0.0; 2]; 3],
        0.0,
    )
    .unwrap();
    let r1 = estimate_constants(&pure, 1.0, 3000, &mut StreamRng::seed_from_u64(4)).g_hat;
    let r2 = estimate_constants(&pure, 2.0, 3000, &mut StreamRng::seed_from_u64(4)).g_hat;
    assert!((r2 / r1 - 2.0).abs() < 0.1, "{r1} {r2}");
}
