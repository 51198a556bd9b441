use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use semifn::analysis::residual;
use semifn::cyclotomic::Cyclotomic;
use semifn::families::{construct, random_descriptor, Mode, Registry};
use semifn::functions::{star, ScalarFunction};
use semifn::io::{CarrierSource, PairFile};
use semifn::scalar::{c, format_complex, parse_complex, tol, C64};
use semifn::semigroup::{finite_fixture, Carrier, Involution, FINITE_FIXTURES};

fn finite(name: &str) -> Carrier {
    Carrier::Finite(finite_fixture(name).unwrap())
}

fn carrier_and_sigma(k: usize, j: usize) -> (Carrier, Involution) {
    let s = finite(FINITE_FIXTURES[k % FINITE_FIXTURES.len()]);
    let sigmas = s.involutions().unwrap();
    let sigma = sigmas[j % sigmas.len()].clone();
    (s, sigma)
}

fn small_complex() -> impl Strategy<Value = C64> {
    (-1e3f64..1e3, -1e3f64..1e3).prop_map(|(re, im)| c(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_family_members_solve_the_equation(k in 0usize..7, j in 0usize..4, seed in any::<u64>()) {
        let (s, sigma) = carrier_and_sigma(k, j);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_descriptor(&s, &sigma, &mut rng).unwrap();
        let pair = construct(&s, &sigma, &e.descriptor, e.free.as_ref(), &Registry::new(), Mode::Float).unwrap();
        let r = residual(&s, &sigma, e.descriptor.alpha, &pair.g, &pair.f).unwrap();
        // the oracle is the defect itself, evaluated pair by pair
        let (g, f) = (pair.g.dense_values(&s).unwrap(), pair.f.dense_values(&s).unwrap());
        let fs = s.finite().unwrap();
        let p: Vec<usize> = (0..fs.order())
            .map(|i| sigma.apply(&semifn::semigroup::Element::Index(i)).unwrap().index().unwrap())
            .collect();
        let alpha = e.descriptor.alpha;
        let mut worst = 0.0f64;
        for x in 0..fs.order() {
            for y in 0..fs.order() {
                let m = fs.mul(x, p[y]);
                worst = worst.max((g[m] - g[x] * g[y] + f[x] * f[y] - alpha * f[m]).norm());
            }
        }
        let scale = g.iter().chain(&f).map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(r.max_residual < tol::IDENTITY, "family {}: {:e}", e.descriptor.family_tag, r.max_residual);
        prop_assert!(worst < tol::IDENTITY * scale * scale);
    }

    #[test]
    fn complex_literals_round_trip(z in small_complex()) {
        prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }

    #[test]
    fn dyadic_floats_are_exact(z in small_complex()) {
        prop_assert_eq!(Cyclotomic::from_c64(z).to_c64(), z);
    }

    #[test]
    fn cyclotomic_ring_laws(a in -20i64..20, b in -20i64..20, k in 0u32..12, n in 1u32..12, m in 1u32..6) {
        let x = Cyclotomic::from_integer(a) + Cyclotomic::root_of_unity(k % n, n);
        let y = Cyclotomic::from_integer(b) * Cyclotomic::root_of_unity(1, m);
        let z = Cyclotomic::root_of_unity(k, 12);
        prop_assert_eq!(x.clone() * (y.clone() + z.clone()), x.clone() * y.clone() + x.clone() * z.clone());
        prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
        prop_assert!((x.clone() - x).is_zero());
        let approx = (Cyclotomic::from_integer(a) * z.clone()).to_c64() - c(a as f64, 0.0) * z.to_c64();
        prop_assert!(approx.norm() < 1e-12);
    }

    #[test]
    fn star_is_an_involution(k in 0usize..7, j in 0usize..4, values in prop::collection::vec(small_complex(), 3)) {
        let (s, sigma) = carrier_and_sigma(k, j);
        let n = s.finite().unwrap().order();
        let f = ScalarFunction::Dense(values.into_iter().cycle().take(n).collect());
        let twice = star(&star(&f, &sigma).unwrap(), &sigma).unwrap();
        prop_assert_eq!(twice.dense_values(&s).unwrap(), f.dense_values(&s).unwrap());
    }

    #[test]
    fn pair_files_round_trip(k in 0usize..7, j in 0usize..4, seed in any::<u64>(), exact in any::<bool>()) {
        let (s, sigma) = carrier_and_sigma(k, j);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_descriptor(&s, &sigma, &mut rng).unwrap();
        let mode = if exact { Mode::Exact } else { Mode::Float };
        // irrational square roots have no exact form
        let Ok(pair) = construct(&s, &sigma, &e.descriptor, e.free.as_ref(), &Registry::new(), mode) else {
            return Ok(());
        };
        let file = PairFile {
            carrier: CarrierSource::Table { semigroup: s.finite().unwrap().clone() },
            sigma,
            pair,
        };
        prop_assert_eq!(PairFile::from_json(&file.to_json().unwrap()).unwrap(), file);
    }
}
