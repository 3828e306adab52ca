use kolmo::chebyshev::{generalized_vandermonde, PowerSystem};
use kolmo::cone::{classify, measure_residual, principal_representation};
use kolmo::kolmogorov::{check_admissible, extremal_family_sample, Admissibility};
use kolmo::splines::{class_transfer, eval, measure_from_spline, norms, spline_from_measure, TransferDirection};
use kolmo::{Atom, AtomicMeasure, ExponentVector, MomentVector, SolverConfig, SplineClass, Status};
use proptest::prelude::*;

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

/// Strictly increasing orders drawn from `0..=max`, of length `1..=max_len`.
fn orders(max: u32, max_len: usize) -> impl Strategy<Value = Vec<u32>> {
    proptest::sample::subsequence((0..=max).collect::<Vec<_>>(), 1..=max_len)
}

/// Up to three positive atoms in `[0.1, 10]` with masses in `[0.1, 10]`, well separated.
fn measure() -> impl Strategy<Value = AtomicMeasure> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=3).prop_filter_map("separated", |raw| {
        let mut atoms: Vec<Atom> = raw.iter().map(|&(u, w)| Atom::new(10f64.powf(u), 10f64.powf(w))).collect();
        atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
        if atoms.windows(2).any(|w| w[1].position < 1.2 * w[0].position) {
            return None;
        }
        AtomicMeasure::new(atoms).ok()
    })
}

/// Positive atoms are separated by a factor 1.2 and each carries a share of at
/// least `1e-5` of both the first and the last moment. Otherwise the moments
/// lie within the boundary band of a limit that merges atoms or moves mass to
/// the origin or to infinity, which the solver may report as outside.
fn resolvable(mu: &AtomicMeasure, k: &[u32]) -> bool {
    let share = |a: &Atom, o: u32| a.mass * a.position.powi(o as i32) >= 1e-5 * mu.moment(o);
    let (first, last) = (k[0], k[k.len() - 1]);
    let positive: Vec<&Atom> = mu.atoms().iter().filter(|a| a.position > 0.0).collect();
    k.len() < 2
        || (positive.windows(2).all(|w| w[1].position >= 1.2 * w[0].position)
            && positive.iter().all(|a| share(a, first) && share(a, last)))
}

fn resolvable_case() -> impl Strategy<Value = (AtomicMeasure, Vec<u32>)> {
    (measure(), orders(8, 6)).prop_filter("resolvable", |(mu, k)| resolvable(mu, k))
}

/// An atom at the origin plus up to three positive atoms, with orders starting
/// at 0: interior whenever twice the atom count exceeds `d + 1`.
fn with_origin_atom() -> impl Strategy<Value = (AtomicMeasure, Vec<u32>)> {
    (measure(), -1.0f64..1.0, orders(6, 5)).prop_filter_map("interior and resolvable", |(mu, extra, k)| {
        let mut atoms = mu.atoms().to_vec();
        atoms.insert(0, Atom::new(0.0, 10f64.powf(extra)));
        let mu = AtomicMeasure::new(atoms).ok()?;
        let k: Vec<u32> = std::iter::once(0).chain(k.into_iter().filter(|&o| o > 0)).collect();
        (2 * mu.len() > k.len() + 1 && resolvable(&mu, &k)).then_some((mu, k))
    })
}

fn class() -> impl Strategy<Value = SplineClass> {
    prop_oneof![Just(SplineClass::Cm), Just(SplineClass::Mm)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn moments_of_measures_are_in_the_cone((mu, k) in resolvable_case()) {
        let ex = ExponentVector::new(&k, 8).unwrap();
        let c = mu.moments(&ex);
        let cl = classify(&c, &cfg()).unwrap();
        prop_assert!(matches!(cl.status, Status::Interior | Status::Boundary), "{:?}", cl.status);
        let w = cl.witness.unwrap();
        prop_assert!(w.len() <= k.len() + 1);
        prop_assert!(measure_residual(&w, &c) <= 1e-7);
        prop_assert_eq!(cl.index, Some(w.index()));
    }

    #[test]
    fn classification_is_scale_and_dilation_covariant(
        mu in measure(), k in orders(6, 4), rho in -2.0f64..2.0, sigma in -0.5f64..0.5
    ) {
        let ex = ExponentVector::new(&k, 6).unwrap();
        let c = mu.moments(&ex);
        let base = classify(&c, &cfg()).unwrap().status;
        let rho = 10f64.powf(rho);
        let scaled = classify(&c.scaled(rho).unwrap(), &cfg()).unwrap();
        prop_assert_eq!(scaled.status, base);
        let sigma = 10f64.powf(sigma);
        let dilated: Vec<f64> = c.values().iter().zip(&k).map(|(v, &o)| v * sigma.powi(o as i32)).collect();
        let dilated = classify(&MomentVector::new(dilated, ex).unwrap(), &cfg()).unwrap();
        prop_assert_eq!(dilated.status, base);
    }

    #[test]
    fn principal_representation_has_index_half_d((mu, k) in with_origin_atom()) {
        let ex = ExponentVector::new(&k, 6).unwrap();
        let c = mu.moments(&ex);
        let p = principal_representation(&c, &cfg()).unwrap();
        prop_assert_eq!(p.index().twice_value as usize, k.len());
        prop_assert!(measure_residual(&p, &c) <= 1e-9);
    }

    #[test]
    fn spline_norms_are_moments(mu in measure(), zero in proptest::option::of(0.1f64..10.0), r in 1u32..8, cls in class()) {
        let mut atoms = mu.atoms().to_vec();
        if let Some(w0) = zero {
            atoms.insert(0, Atom::new(0.0, w0));
        }
        let mu = AtomicMeasure::new(atoms).unwrap();
        let k: Vec<u32> = (0..=r).collect();
        let ex = ExponentVector::new(&k, r).unwrap();
        let s = spline_from_measure(cls, r, &mu).unwrap();
        prop_assert!(s.knots().windows(2).all(|w| w[0] > w[1]));
        let n = norms(&s, &ex).unwrap();
        let cm = match cls {
            SplineClass::Cm => n,
            SplineClass::Mm => class_transfer(&n, TransferDirection::MmToCm).unwrap(),
        };
        for (got, &o) in cm.values().iter().zip(&k) {
            let want = mu.moment(o);
            prop_assert!((got - want).abs() <= 1e-12 * want, "order {o}: {got} vs {want}");
        }
        let back = measure_from_spline(&s).unwrap();
        prop_assert_eq!(back.len(), mu.len());
        for (a, b) in back.atoms().iter().zip(mu.atoms()) {
            prop_assert!((a.position - b.position).abs() <= 1e-12 * b.position.max(1.0));
            prop_assert!((a.mass - b.mass).abs() <= 1e-12 * b.mass);
        }
    }

    #[test]
    fn transfer_round_trips(k in orders(8, 5), vals in proptest::collection::vec(0.0f64..100.0, 5)) {
        let ex = ExponentVector::new(&k, 8).unwrap();
        let m = MomentVector::new(vals[..k.len()].to_vec(), ex).unwrap();
        let there = class_transfer(&m, TransferDirection::MmToCm).unwrap();
        let back = class_transfer(&there, TransferDirection::CmToMm).unwrap();
        for (a, b) in back.values().iter().zip(m.values()) {
            prop_assert!((a - b).abs() <= 1e-15 * b.abs().max(1.0));
        }
    }

    #[test]
    fn splines_are_monotone_with_consistent_derivatives(mu in measure(), r in 2u32..6, cls in class()) {
        let s = spline_from_measure(cls, r, &mu).unwrap();
        let ts: Vec<f64> = (0..40).map(|i| -6.0 * i as f64 / 39.0).collect();
        for k in 0..r {
            for pair in ts.windows(2) {
                // ts decreases, so the value must not increase
                prop_assert!(eval(&s, pair[1], k).unwrap() <= eval(&s, pair[0], k).unwrap() * (1.0 + 1e-12) + 1e-300);
            }
            for &t in &ts[1..ts.len() - 1] {
                // central differences of truncated powers lose accuracy near a knot
                let near_knot = s.knots().iter().any(|a| (a + t).abs() < 2e-2);
                if cls == SplineClass::Mm && near_knot {
                    continue;
                }
                let h = 1e-5;
                let fd = (eval(&s, t + h, k).unwrap() - eval(&s, t - h, k).unwrap()) / (2.0 * h);
                let exact = eval(&s, t, k + 1).unwrap();
                prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3), "k={k} t={t}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn vandermonde_is_positive_and_antisymmetric(
        exps in orders(10, 6), raw in proptest::collection::vec(0.05f64..10.0, 6), zero_first in any::<bool>()
    ) {
        let d = exps.len();
        let mut points: Vec<f64> = raw[..d].to_vec();
        points.sort_by(f64::total_cmp);
        prop_assume!(points.windows(2).all(|w| w[1] - w[0] > 1e-3));
        if zero_first && exps[0] == 0 {
            points[0] = 0.0;
        }
        let sys = PowerSystem::new(&exps).unwrap();
        let det = generalized_vandermonde(&sys, &points).unwrap();
        prop_assert!(det > 0.0);
        if d >= 2 {
            let mut swapped = points.clone();
            swapped.swap(0, d - 1);
            let neg = generalized_vandermonde(&sys, &swapped).unwrap();
            prop_assert!((neg + det).abs() <= 1e-12 * det.abs().max(neg.abs()) * 1e3);
        }
    }

    #[test]
    fn family_members_are_admissible(k in orders(6, 5), seed in any::<u64>(), cls in class()) {
        let k: Vec<u32> = std::iter::once(0).chain(k.into_iter().filter(|&o| o > 0)).collect();
        let ex = ExponentVector::new(&k, 6).unwrap();
        for s in extremal_family_sample(cls, &ex, 3, seed).unwrap() {
            // the factorial transfer rescales whole orders, so shares match for both classes
            if !resolvable(&measure_from_spline(&s).unwrap(), &k) {
                continue;
            }
            let m = norms(&s, &ex).unwrap();
            let status = check_admissible(cls, &m, &cfg()).unwrap().status;
            prop_assert!(status != Admissibility::NotAdmissible);
        }
    }
}

#[test]
fn index_is_additive() {
    let a = AtomicMeasure::from_pairs(&[(0.0, 1.0), (2.0, 1.0)]).unwrap();
    let b = AtomicMeasure::from_pairs(&[(1.0, 3.0), (5.0, 0.5)]).unwrap();
    let mut all = a.atoms().to_vec();
    all.extend_from_slice(b.atoms());
    all.sort_by(|x, y| x.position.total_cmp(&y.position));
    let union = AtomicMeasure::new(all).unwrap();
    assert_eq!(union.index().twice_value, a.index().twice_value + b.index().twice_value);
}

#[test]
fn family_sample_is_reproducible() {
    let ex = ExponentVector::new(&[0, 1, 2, 3], 3).unwrap();
    let a = extremal_family_sample(SplineClass::Cm, &ex, 5, 42).unwrap();
    let b = extremal_family_sample(SplineClass::Cm, &ex, 8, 42).unwrap();
    assert_eq!(a[..], b[..5]);
    assert_ne!(a, extremal_family_sample(SplineClass::Cm, &ex, 5, 43).unwrap());
}
