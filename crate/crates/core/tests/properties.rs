//! Invariants that hold for every input, checked with proptest.

use proptest::prelude::*;

use rmrw::diagnostics::{tail_mass, tv_distance};
use rmrw::grid::Axis;
use rmrw::mixture::{logcosh, sample_data, Dataset, MixtureSpec};
use rmrw::potential::{Potential, PowerPosterior, PriorSpec};
use rmrw::sampler::{proposal_density, Algorithm, ChainTrace};
use rmrw::theory::GridKernel;

fn vec_of(d: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, d)
}

fn simplex(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, len).prop_map(|mut v| {
        v[0] += 1e-3;
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    })
}

fn posterior(d: usize, a: f64, beta: f64, seed: u64, prior: PriorSpec) -> PowerPosterior {
    let spec = MixtureSpec::along_first_axis(d, a).unwrap();
    let data = sample_data(&spec, None, 40, seed).unwrap();
    PowerPosterior::new(spec, data, beta, prior).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn potential_is_even(
        d in 1usize..5,
        a in 0.0..4.0f64,
        beta in 0.5..20.0f64,
        seed in any::<u64>(),
        raw in vec_of(5, 6.0),
        gaussian in any::<bool>(),
    ) {
        let prior = if gaussian { PriorSpec::Gaussian { sigma: 2.0 } } else { PriorSpec::UniformImproper };
        let pp = posterior(d, a, beta, seed, prior);
        let t = &raw[..d];
        let neg: Vec<f64> = t.iter().map(|x| -x).collect();
        let (u, v) = (pp.empirical_potential(t).unwrap(), pp.empirical_potential(&neg).unwrap());
        prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()));
    }

    #[test]
    fn potential_is_even_for_arbitrary_data(
        rows in prop::collection::vec(vec_of(2, 10.0), 1..30),
        raw in vec_of(2, 6.0),
    ) {
        let data = Dataset::from_rows(&rows).unwrap();
        let spec = MixtureSpec::along_first_axis(2, 1.0).unwrap();
        let pp = PowerPosterior::new(spec, data, 3.0, PriorSpec::UniformImproper).unwrap();
        let neg: Vec<f64> = raw.iter().map(|x| -x).collect();
        let (u, v) = (pp.value(&raw), pp.value(&neg));
        prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()));
    }

    #[test]
    fn mixture_density_is_even(theta0 in vec_of(3, 5.0), x in vec_of(3, 15.0)) {
        let spec = MixtureSpec::new(theta0).unwrap();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let (p, q) = (spec.log_density(&x).unwrap(), spec.log_density(&neg).unwrap());
        prop_assert!(p.is_finite());
        prop_assert!((p - q).abs() <= 1e-12 * (1.0 + p.abs()));
    }

    #[test]
    fn logcosh_bounds(t in -800.0..800.0f64) {
        let v = logcosh(t);
        prop_assert_eq!(v, logcosh(-t));
        prop_assert!(v <= t.abs() + 1e-12);
        prop_assert!(v >= t.abs() - std::f64::consts::LN_2 - 1e-12);
    }

    #[test]
    fn tv_is_a_metric((p, q, r) in (3usize..12).prop_flat_map(|m| (simplex(m), simplex(m), simplex(m)))) {
        let pq = tv_distance(&p, &q);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
        prop_assert_eq!(tv_distance(&p, &p), 0.0);
        prop_assert!((pq - tv_distance(&q, &p)).abs() <= 1e-15);
        prop_assert!(pq <= tv_distance(&p, &r) + tv_distance(&r, &q) + 1e-12);
    }

    #[test]
    fn tail_mass_decreases_with_radius(
        states in prop::collection::vec(-10.0..10.0f64, 2..200),
        r1 in 0.0..12.0f64,
        dr in 0.0..5.0f64,
    ) {
        let trace = ChainTrace::from_states(1, states).unwrap();
        let (a, b) = (tail_mass(&trace, r1, 0).unwrap(), tail_mass(&trace, r1 + dr, 0).unwrap());
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a);
    }

    #[test]
    fn reflected_proposal_is_symmetric_and_sign_invariant(
        x in vec_of(2, 5.0),
        y in vec_of(2, 5.0),
        eta in 0.01..2.0f64,
    ) {
        let q = proposal_density(&x, &y, eta, Algorithm::Rmrw);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let close = |u: f64, v: f64| (u - v).abs() <= 1e-12 * u.abs().max(v.abs()).max(1e-300);
        prop_assert!(close(q, proposal_density(&y, &x, eta, Algorithm::Rmrw)));
        prop_assert!(close(q, proposal_density(&neg, &y, eta, Algorithm::Rmrw)));
        prop_assert!(close(
            proposal_density(&x, &y, eta, Algorithm::Mrw),
            proposal_density(&y, &x, eta, Algorithm::Mrw)
        ));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grid_kernel_is_stochastic_and_reversible(
        half in prop::collection::vec(-6.0..0.0f64, 20),
        eta in 0.005..0.5f64,
        reflect in any::<bool>(),
    ) {
        let mut logw: Vec<f64> = half.iter().rev().copied().collect();
        logw.extend(half.iter().copied());
        let axis = Axis::symmetric(2.0, logw.len()).unwrap();
        let alg = if reflect { Algorithm::Rmrw } else { Algorithm::Mrw };
        let k = GridKernel::from_log_weights(axis, logw, eta, alg).unwrap();
        prop_assert!(k.row_sum_error() <= 1e-12);
        prop_assert!(k.detailed_balance_residual() <= 1e-12);
        prop_assert!(k.stationarity_residual() <= 1e-12);
    }

    #[test]
    fn s_conductance_grows_with_s(
        logw in prop::collection::vec(-6.0..0.0f64, 30),
        eta in 0.005..0.2f64,
        s in 0.0..0.2f64,
        ds in 0.0..0.25f64,
    ) {
        let axis = Axis::symmetric(2.0, logw.len()).unwrap();
        let k = GridKernel::from_log_weights(axis, logw, eta, Algorithm::Mrw).unwrap();
        let lo = k.s_conductance(s).unwrap();
        let hi = k.s_conductance((s + ds).min(0.49)).unwrap();
        if let (Some(lo), Some(hi)) = (lo, hi) {
            prop_assert!(hi >= lo - 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&lo));
        }
    }
}
