use hodge_virasoro::bigphase::BigPhase;
use hodge_virasoro::constraints::*;
use hodge_virasoro::correlators::{Oracle, Seeds};
use hodge_virasoro::diffop::multisets;
use hodge_virasoro::exactnum::{int, rat, Rat};
use hodge_virasoro::fock::{t, Monomial, Series, Truncation};
use hodge_virasoro::model::TargetModel;
use proptest::prelude::*;

fn tr(t_deg: u32, level: u32, genus_max: u32) -> Truncation {
    Truncation { t_deg, max_level: level, s_deg: 0, s_max_index: 4, genus_max, q_max: 2 }
}

fn point() -> Oracle {
    Oracle::new(TargetModel::point(), 0)
}

fn perturbed(s: Seeds) -> Oracle {
    Oracle::with_seeds(TargetModel::point(), 0, s)
}

#[test]
fn psi_examples() {
    let o = point();
    let tr = tr(2, 6, 2);
    assert!(psi_series(&o, &PsiRequest::new(0, 1, &[], tr)).unwrap().is_zero());
    assert!(psi_series(&o, &PsiRequest::new(1, 1, &[2], tr)).unwrap().is_zero());
    let g1 = psi_series(&o, &PsiRequest::new(1, 1, &[], tr)).unwrap();
    assert_eq!(g1.coefficient_of(&Monomial::one()), Rat::from_integer(0.into()));
}

#[test]
fn unsupported_requests_are_errors() {
    let p1 = Oracle::new(TargetModel::p1(), 2);
    let e = psi_series(&p1, &PsiRequest::new(1, 1, &[], tr(2, 4, 2))).unwrap_err();
    assert!(matches!(e, ConstraintError::Unsupported(_)), "{e}");
    let e = psi_series(&point(), &PsiRequest::new(0, -2, &[], tr(2, 4, 2))).unwrap_err();
    assert!(matches!(e, ConstraintError::Unsupported(_)));
}

#[test]
fn point_satisfies_every_constraint() {
    // g <= 2, -1 <= n <= 2, every profile of s-degree <= 2 over s_1..s_3
    let o = point();
    let tr = tr(2, 5, 2);
    let mut profiles = vec![vec![]];
    for len in 1..=2 {
        profiles.extend(multisets(len, 3));
    }
    for g in 0..=2 {
        for n in -1..=2 {
            for p in &profiles {
                let s = psi_series(&o, &PsiRequest::new(g, n, p, tr)).unwrap();
                assert!(s.is_zero(), "g={g} n={n} {p:?}: {s}");
            }
        }
    }
}

#[test]
fn formula_matches_operator_on_perturbed_oracles() {
    // Two unrelated code paths must agree even where the residue is nonzero.
    let tr = tr(2, 4, 2);
    let seeds = [
        Seeds { tau0_cubed: int(2), ..Seeds::default() },
        Seeds { tau1_genus1: rat(1, 7), ..Seeds::default() },
    ];
    let mut nonzero = 0;
    for s in seeds {
        let o = perturbed(s);
        for (g, n, p) in [(0, -1, vec![]), (0, 2, vec![1]), (1, 0, vec![]), (1, -1, vec![1]), (1, 1, vec![1]), (2, 1, vec![2])] {
            let req = PsiRequest::new(g, n, &p, tr);
            let a = psi_series(&o, &req).unwrap();
            let b = psi_operator(&o, &req).unwrap();
            assert_eq!(a, b, "g={g} n={n} {p:?}");
            nonzero += usize::from(!a.is_zero());
        }
    }
    assert!(nonzero >= 4);
}

#[test]
fn genus1_split_values() {
    // <<tau_0 tau_1>>_0 = t_0^2/2 + ..., b = 1/2 and c_1 = 0 for the point:
    // Psi' = (1/12)<<tau_1 tau_0>>_0 = -Psi''.
    let o = point();
    let tr = tr(2, 6, 1);
    let req = PsiRequest::new(1, 1, &[1], tr);
    let shifted = psi_part(&o, &req, Part::Shifted).unwrap();
    let plain = psi_part(&o, &req, Part::Plain).unwrap();
    let t00 = Monomial::pow(t(0, 0), 2);
    assert_eq!(shifted.coefficient_of(&t00), rat(1, 24));
    assert_eq!(plain.coefficient_of(&t00), rat(-1, 24));
    let [p1, p2, total] = genus1_split_prediction(&o, &tr).unwrap();
    assert_eq!(shifted, p1);
    assert_eq!(plain, p2);
    assert!(total.is_zero());
}

#[test]
fn higher_genus_factor_calibration() {
    // With k_1 below the bound the display is nonzero and the m >= 1 part of
    // Psi equals -2(2k_1 - 1) w_{k_1} times it.
    let o = point();
    let tr = tr(1, 6, 2);
    let bp = BigPhase::new(&o, tr);
    let d1 = higher_genus_display(&bp, 2, 1).unwrap();
    assert_eq!(d1.coefficient_of(&Monomial::var(t(2, 0))), rat(-5, 96));
    for k1 in [1, 2] {
        let d = higher_genus_display(&bp, 2, k1).unwrap();
        let sh = psi_part(&o, &PsiRequest::new(2, 1, &[k1], tr), Part::Shifted).unwrap();
        assert!(!d.is_zero());
        assert_eq!(sh, d.scale(&higher_genus_factor(k1)));
    }
    assert_eq!(higher_genus_factor(1), rat(-1, 6));
    for k1 in [3, 4] {
        assert!(higher_genus_display(&bp, 2, k1).unwrap().is_zero());
    }
}

#[test]
fn ehx_matches_family_member() {
    for o in [point(), Oracle::new(TargetModel::p1(), 2)] {
        let bp = BigPhase::new(&o, tr(2, 5, 0));
        for n in 1..=2 {
            let fam = genus0_family(&bp, n, &[1]).unwrap();
            let lt = ehx_tilde(&bp, n).unwrap();
            assert!(fam.sub(&lt.scale(&int(n + 1))).is_zero());
            assert!(lt.is_zero());
        }
    }
}

#[test]
fn perturbed_point_breaks_genus0_string() {
    // <tau_0^3>_0 -> 2 leaves the t_0^2 coefficient of Psi_{0,-1} at 1/2 - 1.
    let o = perturbed(Seeds { tau0_cubed: int(2), ..Seeds::default() });
    let s = psi_series(&o, &PsiRequest::new(0, -1, &[], tr(2, 4, 0))).unwrap();
    assert_eq!(s.coefficient_of(&Monomial::pow(t(0, 0), 2)), rat(-1, 2));
}

#[test]
fn p1_seed_is_a_rescaling_of_q() {
    // <..>_{0,d} with seed c equals c^d times the seed-1 value, so every
    // q-graded constraint is blind to the seed.
    let one = Oracle::new(TargetModel::p1(), 2);
    let three = Oracle::with_seeds(TargetModel::p1(), 2, Seeds { p1_seed: int(3), ..Seeds::default() });
    let keys: &[(u32, &[(u32, usize)])] =
        &[(1, &[(0, 1)]), (1, &[(1, 0)]), (2, &[(2, 1)]), (2, &[(0, 1), (3, 1)]), (2, &[(1, 1), (1, 1), (0, 0)])];
    for &(d, ins) in keys {
        let a = one.correlator(0, d, ins, &[]).unwrap();
        let b = three.correlator(0, d, ins, &[]).unwrap();
        assert_eq!(b, a * num::pow::pow(int(3), d as usize), "d={d} {ins:?}");
    }
    let s = psi_series(&three, &PsiRequest::new(0, 1, &[], tr(2, 4, 0))).unwrap();
    assert!(s.is_zero());
}

#[test]
fn p1_quantum_product_is_associative() {
    // WDVV near t = 0 through q^2, for the true seed and a perturbed one.
    for c in [int(1), int(3)] {
        let o = Oracle::with_seeds(TargetModel::p1(), 2, Seeds { p1_seed: c, ..Seeds::default() });
        let bp = BigPhase::new(&o, tr(1, 2, 0));
        let basis: Vec<_> = (0..2).map(|a| hodge_virasoro::bigphase::VectorField::basis(0, a, bp.trunc())).collect();
        for x in &basis {
            for y in &basis {
                for z in &basis {
                    let l = bp.quantum_product(&bp.quantum_product(x, y).unwrap(), z).unwrap();
                    let r = bp.quantum_product(x, &bp.quantum_product(y, z).unwrap()).unwrap();
                    assert!(l.sub(&r).is_zero());
                }
            }
        }
    }
}

fn series_nonzero(s: &Series) -> bool {
    !s.is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn paths_agree_for_any_seed(num in 1i64..9, den in 1i64..9, g in 0u32..=1, n in -1i64..=2, k in 0u32..=2) {
        let o = perturbed(Seeds { tau0_cubed: rat(num, den), tau1_genus1: rat(den, 24 * num), ..Seeds::default() });
        let p: Vec<u32> = if k == 0 { vec![] } else { vec![k] };
        let req = PsiRequest::new(g, n, &p, tr(2, 3, 1));
        let a = psi_series(&o, &req).unwrap();
        let b = psi_operator(&o, &req).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn split_adds_up(g in 0u32..=2, n in -1i64..=2, k in 1u32..=3) {
        let o = point();
        let req = PsiRequest::new(g, n, &[k], tr(1, 4, 2));
        let all = psi_part(&o, &req, Part::All).unwrap();
        let sum = psi_part(&o, &req, Part::Plain).unwrap().add(&psi_part(&o, &req, Part::Shifted).unwrap());
        prop_assert_eq!(all, sum);
    }

    #[test]
    fn point_genus0_residues_vanish(n in -1i64..=3, k in 0u32..=3) {
        let p: Vec<u32> = if k == 0 { vec![] } else { vec![k] };
        let s = psi_series(&point(), &PsiRequest::new(0, n, &p, tr(3, 5, 0))).unwrap();
        prop_assert!(!series_nonzero(&s));
    }
}
