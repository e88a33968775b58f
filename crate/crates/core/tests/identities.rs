use transmute::catalog::{expand_cases, list_identities, sample_side, IdentityId, IdentitySpec, Side};
use transmute::dist::{sample_with, SampleBatch, Variates};
use transmute::engine::ks_two_sample;
use transmute::rng::RngStream;

const N: usize = 100_000;
const ALPHA: f64 = 0.001;
const SEED: u64 = 0x5EED_0001;

fn side(spec: &IdentitySpec, side: Side, replicate: u32) -> SampleBatch {
    let stream = RngStream::for_replicate(SEED, &spec.label(), side.as_str(), replicate);
    sample_side(spec, side, &stream, N).unwrap()
}

fn spec(id: IdentityId, param: Option<u32>) -> IdentitySpec {
    IdentitySpec::new(id, param).unwrap()
}

fn assert_same_law(a: &SampleBatch, b: &SampleBatch, what: &str) {
    let r = ks_two_sample(a, b, ALPHA).unwrap();
    assert!(
        r.passed,
        "{what}: D = {} > {} (p = {:?})",
        r.statistic, r.threshold, r.p_value
    );
}

fn all_cases() -> Vec<IdentitySpec> {
    expand_cases(&IdentityId::ALL, &[1, 2, 5], &[1, 2, 10]).unwrap()
}

#[test]
fn symmetric_identities_match_their_reflection() {
    for case in all_cases().iter().filter(|c| c.id.is_symmetric()) {
        for s in [Side::Lhs, Side::Rhs] {
            let b = side(case, s, 0);
            let neg = b.map("negated", |x| -x).unwrap();
            assert_same_law(&b, &neg, &format!("{case} {s:?} vs its negation"));
        }
    }
}

#[test]
fn positive_identities_stay_positive() {
    for case in all_cases().iter().filter(|c| c.id.is_positive()) {
        for s in [Side::Lhs, Side::Rhs] {
            assert!(side(case, s, 0).values().iter().all(|&x| x > 0.0), "{case} {s:?}");
        }
    }
}

#[test]
fn sides_use_disjoint_streams() {
    for case in all_cases() {
        let l = RngStream::for_replicate(SEED, &case.label(), "LHS", 0);
        let r = RngStream::for_replicate(SEED, &case.label(), "RHS", 0);
        assert_ne!(l.key(), r.key());
        let a = sample_side(&case, Side::Lhs, &l, 100).unwrap();
        let again = sample_side(&case, Side::Lhs, &l, 100).unwrap();
        assert_eq!(a, again);
    }
}

#[test]
fn hierarchy_matches_product_form() {
    let i1 = side(&spec(IdentityId::I1, None), Side::Lhs, 0);
    let i9 = side(&spec(IdentityId::I9, None), Side::Lhs, 1);
    assert_same_law(&i1, &i9, "I9 LHS vs I1 LHS");
}

#[test]
fn rotation_step_chains_to_difference_of_exponentials() {
    // Z1 Z3 + Z2 Z4 rewritten through Z_a Z_b ~ (Z_a^2 - Z_b^2)/2 on each product
    let stream = RngStream::new(SEED, "chain/I5-via-I3");
    let chained = sample_with("chain", &stream, N, |v| {
        let (z1, z2, z3, z4) = (v.normal(), v.normal(), v.normal(), v.normal());
        0.5 * (z1 * z1 + z2 * z2) - 0.5 * (z3 * z3 + z4 * z4)
    })
    .unwrap();
    let i4 = side(&spec(IdentityId::I4, None), Side::Lhs, 0);
    assert_same_law(&chained, &i4, "chained I5 RHS vs I4 LHS");
}

#[test]
fn bartlett_with_two_matches_conditioning_identity() {
    let i8 = spec(IdentityId::I8, Some(2));
    let i5 = spec(IdentityId::I5, None);
    assert_same_law(&side(&i8, Side::Lhs, 0), &side(&i5, Side::Lhs, 0), "I8[n=2] LHS vs I5 LHS");
    assert_same_law(&side(&i8, Side::Rhs, 0), &side(&i5, Side::Rhs, 0), "I8[n=2] RHS vs I5 RHS");
}

#[test]
fn duplication_with_k_one_is_the_laplace_case() {
    // 4 X_1 X_2 ~ (X_2)^2; X_2 = 2 Expo so the RHS is 4 Expo^2
    let i7 = spec(IdentityId::I7, Some(1));
    let stream = RngStream::new(SEED, "I7/k1/expo-form");
    let expo_form = sample_with("4 Expo^2", &stream, N, |v| {
        let e = v.expo();
        4.0 * e * e
    })
    .unwrap();
    assert_same_law(&side(&i7, Side::Lhs, 0), &expo_form, "I7[k=1] LHS vs 4 Expo^2");
    assert_eq!(list_identities()[6], i7);
}

#[test]
fn every_identity_holds_for_one_replicate() {
    for case in all_cases() {
        assert_same_law(&side(&case, Side::Lhs, 3), &side(&case, Side::Rhs, 3), &case.label());
    }
}

#[test]
fn laplace_valued_sides_have_laplace_moments() {
    use transmute::engine::moment_check;
    for id in [IdentityId::I1, IdentityId::I4, IdentityId::I5, IdentityId::I6, IdentityId::I9] {
        for s in [Side::Lhs, Side::Rhs] {
            let b = side(&spec(id, None), s, 0);
            let r = moment_check(&b, 0.0, 2.0, 6.0).unwrap();
            assert!(r.passed, "{id} {s:?}: {:?}", r.metadata);
        }
    }
}
