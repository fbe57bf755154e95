use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tennisball_core::measure::{self, PairMode};
use tennisball_core::sampling::{self, SeededStream};
use tennisball_core::{experiments, staircase, IntervalClass, SphereVector, StaircaseParams};

fn p41() -> StaircaseParams {
    StaircaseParams::new(4.0, 0.1, 1.0 / 257.0, 0.0).unwrap()
}

/// Random vector whose coordinates cluster near powers of lambda, so that
/// many ratios fall in or near the ratio sets.
fn near_powers(n: usize, spread: f64, p: &StaircaseParams, rng: &mut impl Rng) -> SphereVector {
    let c = (0..n)
        .map(|_| {
            let m: i32 = rng.random_range(-3..=3);
            let jitter = rng.random_range(-spread..spread);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            sign * p.lambda().powf(m as f64 + jitter)
        })
        .collect();
    SphereVector::new(c).unwrap()
}

#[test]
fn fast_pair_mass_matches_naive() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..300 {
        let p = if i % 2 == 0 { StaircaseParams::desk() } else { p41() };
        let n = rng.random_range(1..=512);
        let x = match i % 3 {
            0 => sampling::sample_unit(n, &mut rng),
            1 => near_powers(n, 0.1, &p, &mut rng),
            _ => near_powers(n, 1e-5, &p, &mut rng),
        };
        for power in [2, 4] {
            let naive = measure::pair_in_mass(&x, power, &p, PairMode::Naive).unwrap();
            let fast = measure::pair_in_mass(&x, power, &p, PairMode::Fast).unwrap();
            assert!((naive - fast).abs() <= 1e-12, "i={i} n={n} naive={naive} fast={fast}");
        }
    }
}

#[test]
fn psi_is_odd_and_unit() {
    let p = StaircaseParams::desk();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let n = rng.random_range(1..40);
        let scale: f64 = rng.random_range(0.01..100.0);
        let x = sampling::sample_unit(n, &mut rng).map(|c| c * scale);
        let y = measure::psi(&x, &p).unwrap();
        assert!((y.norm() - 1.0).abs() <= 1e-12);
        assert_eq!(measure::psi(&-&x, &p).unwrap(), -&y);
    }
}

#[test]
fn psi_inverse_undoes_psi() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in [StaircaseParams::desk(), p41()] {
        for _ in 0..2_000 {
            let n = rng.random_range(1..200);
            let x = sampling::sample_unit(n, &mut rng);
            let back = measure::psi_inverse(&measure::psi(&x, &p).unwrap(), &p).unwrap();
            assert!(x.distance(&back).unwrap() < 1e-9);
        }
    }
}

#[test]
fn norm_sandwich() {
    let p = p41();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5_000 {
        let x = near_powers(rng.random_range(1..50), 0.5, &p, &mut rng);
        let f = measure::phi_vec(&x, &p);
        assert!(x.norm() <= f.norm() * (1.0 + 1e-15));
        assert!(f.norm() <= p.lambda() * x.norm() * (1.0 + 1e-15));
    }
}

#[test]
fn coordinate_measure_is_exchangeable() {
    // E mu_x({1}) = 1/n and E <x, y> = 0 for independent Haar vectors
    let n = 100;
    let trials = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut w_sum, mut w_sq, mut d_sum, mut d_sq) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..trials {
        let x = sampling::sample_unit(n, &mut rng);
        let y = sampling::sample_unit(n, &mut rng);
        let w = measure::mu(&x).unwrap().weights()[0];
        let d = x.dot(&y).unwrap();
        w_sum += w;
        w_sq += w * w;
        d_sum += d;
        d_sq += d * d;
    }
    let t = trials as f64;
    let w_sigma = ((w_sq / t - (w_sum / t).powi(2)) / t).sqrt();
    let d_sigma = ((d_sq / t - (d_sum / t).powi(2)) / t).sqrt();
    assert!((w_sum / t - 1.0 / n as f64).abs() < 5.0 * w_sigma);
    assert!((d_sum / t).abs() < 5.0 * d_sigma);
}

#[test]
fn weights_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let x = sampling::sample_unit(rng.random_range(1..300), &mut rng);
        let m = measure::mu(&x).unwrap();
        assert!((m.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn delta_is_delta_beta_eta_on_the_sphere() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [StaircaseParams::desk(), p41()] {
        let mut agree_in = 0;
        for i in 0..10_000 {
            let n = rng.random_range(2..60);
            let x = if i % 2 == 0 {
                sampling::sample_unit(n, &mut rng)
            } else {
                near_powers(n, 0.2, &p, &mut rng).normalized().unwrap()
            };
            let d = measure::in_delta(&x, &p).unwrap();
            assert_eq!(d, measure::in_delta_gamma_xi(&x, p.beta(), p.eta(), &p));
            agree_in += usize::from(d);
        }
        assert!(agree_in > 0);
    }
}

#[test]
fn round_to_powers_moves_little() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for p in [StaircaseParams::desk(), p41()] {
        for _ in 0..10_000 {
            let n = rng.random_range(1..50);
            let y = near_powers(n, 0.05, &p, &mut rng);
            let x = measure::round_to_powers(&y, &p).unwrap();
            assert!(x.distance(&y).unwrap() <= p.eta() * y.norm() * (1.0 + 1e-12));
            for (&xi, &yi) in x.coords().iter().zip(y.coords()) {
                if staircase::classify(yi, &p) == IntervalClass::InB {
                    assert!(staircase::is_approx_power(xi, 0.0, &p));
                } else {
                    assert_eq!(xi, yi);
                }
            }
            // membership in Delta_beta^eta carries over with beta (1 - 2 eta)
            let b = measure::single_in_b_mass(&y, &p).unwrap();
            if b >= p.beta() {
                assert!(measure::in_delta_gamma_xi(&x, p.beta() * (1.0 - 2.0 * p.eta()), 0.0, &p));
            }
        }
    }
}

#[test]
fn switching_measure_moves_at_most_twice_the_distance() {
    let stream = SeededStream::root(9);
    for (k, eps) in [0.01, 0.1].into_iter().enumerate() {
        for t in 0..5_000 {
            let d = experiments::switchprob_trial(50, eps, stream.child(k as u64), t).unwrap();
            assert!(d <= 2.0 * eps + 1e-9, "eps={eps} trial={t} diff={d}");
        }
    }
}

#[test]
fn gamma_expansion_certificate() {
    let stream = SeededStream::root(10);
    for t in 0..2_000 {
        let r = experiments::gamma_eps_trial(60, &StaircaseParams::desk(), stream, t).unwrap();
        assert!(r.member_mass >= StaircaseParams::desk().gamma_threshold());
        assert!(r.holds(1e-9), "{r:?}");
    }
}

#[test]
fn images_of_delta_complement_lie_in_gamma() {
    let stream = SeededStream::root(11);
    let mut checked = 0;
    // with eta = 0.1 almost every vector lies in Delta, so most checks come from desk
    for p in [StaircaseParams::desk(), p41()] {
        for t in 0..3_000 {
            if let Some(in_gamma) = experiments::proposition_trial(40, &p, stream, t).unwrap() {
                assert!(in_gamma, "trial {t}");
                checked += 1;
            }
        }
    }
    assert!(checked > 2_500);
}

#[test]
fn gamma_is_permutation_invariant() {
    let p = p41();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let x = near_powers(30, 0.03, &p, &mut rng).normalized().unwrap();
        let mut c = x.coords().to_vec();
        c.reverse();
        c.rotate_left(7);
        let y = SphereVector::new(c).unwrap();
        assert_eq!(measure::in_gamma(&x, &p).unwrap(), measure::in_gamma(&y, &p).unwrap());
    }
}
