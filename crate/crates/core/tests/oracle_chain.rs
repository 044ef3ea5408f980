use proptest::prelude::*;
use spiegel_core::affine::e_affine;
use spiegel_core::arith::{factor_squarefree_odd, gcd, FactoredOddSquarefree};
use spiegel_core::charsum::{s_value, sigma, sigma_quad, SigmaParams, UNITS};
use spiegel_core::counting::e_direct;
use spiegel_core::formsoracle::{class_group, rk4_of};
use spiegel_core::rank4::{classify, equality_case, rank_pair, CaseTag, Equality};

fn odd_squarefree(limit: i64) -> impl Iterator<Item = FactoredOddSquarefree> {
    (1..=limit)
        .step_by(2)
        .filter_map(|n| factor_squarefree_odd(n).ok())
}

#[test]
fn s_value_is_scaled_count() {
    for d in odd_squarefree(3000) {
        let scale = 1i64 << d.omega();
        for u in UNITS {
            for v in UNITS {
                let s = s_value(&d, u, v).unwrap();
                assert!(s >= 0);
                assert_eq!(s % scale, 0);
                assert_eq!(s / scale, e_direct(&d, u, v).unwrap() as i64);
                assert_eq!(s, s_value(&d, v, u).unwrap());
            }
        }
    }
}

#[test]
fn rank_invariants_small_range() {
    for d in 1..20_000 {
        let Ok(case) = classify(d) else { continue };
        let report = rank_pair(&case).unwrap();
        let e = |u, v| report.e(u, v).unwrap();
        match case.tag {
            CaseTag::OneMod4 => assert_eq!(e(-1, 1), e(1, 1)),
            CaseTag::FourMod8 => assert_eq!(e(1, 1), 2 * e(-1, 1)),
            CaseTag::ZeroMod8 => {
                let mid = e(-2, 1) + e(-1, 2);
                assert!(e(2, 1) <= mid && mid <= 2 * e(2, 1));
            }
        }
        let verdict = equality_case(&case).unwrap();
        assert_eq!(verdict.equality, report.equality, "d={d}");
        let diff = report.rk4_sharp - report.rk4_k;
        assert_eq!(report.equality == Equality::PlusOne, diff == 1);
    }
}

#[test]
fn forms_oracle_agrees_on_small_discriminants() {
    for d in 1..3000 {
        let Ok(case) = classify(d) else { continue };
        let report = rank_pair(&case).unwrap();
        for (disc, expected) in [(d, report.rk4_k), (case.d_sharp, report.rk4_sharp)] {
            let group = class_group(disc).unwrap();
            let (n2, n4) = group.torsion_counts().unwrap();
            assert!(n2.is_power_of_two() && n4.is_power_of_two() && n4 % n2 == 0);
            assert_eq!(rk4_of(&group).unwrap(), expected, "disc {disc} from d={d}");
        }
    }
}

#[test]
fn first_negative_discriminant_with_four_rank_one() {
    let first = (1..)
        .filter_map(|d| classify(d).ok())
        .map(|case| rank_pair(&case).unwrap())
        .find(|r| r.rk4_sharp == 1)
        .unwrap();
    let disc = first.case.d_sharp;
    let group = class_group(disc).unwrap();
    assert_eq!(rk4_of(&group).unwrap(), 1, "disc {disc}");
    assert_eq!(group.class_number() % 4, 0);
}

fn unit() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![-7i64, -5, -3, -2, -1, 1, 2, 3, 5, 7, 11, 13])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn sigma_routes_agree_for_general_parameters(
        n in (0i64..30_000).prop_map(|k| 2 * k + 1),
        s in unit(), t in unit(), u in unit(), v in unit(),
    ) {
        let Ok(d) = factor_squarefree_odd(n) else { return Ok(()) };
        let coprime = [s, t, u, v].iter().all(|x| gcd(x.unsigned_abs(), n as u64) == 1);
        prop_assume!(coprime);
        let p = SigmaParams::new(s, t, u, v);
        let value = sigma(&d, p).unwrap();
        prop_assert_eq!(value, sigma_quad(&d, p).unwrap());
        prop_assert_eq!(value, sigma(&d, p.swapped()).unwrap());
        prop_assert!(value.abs() <= s_value(&d, s * u, t * v).unwrap());
        let e = e_affine(&d, u, v).unwrap();
        prop_assert_eq!(e, e_direct(&d, u, v).unwrap());
        prop_assert!(e == 0 || e.is_power_of_two());
    }
}
