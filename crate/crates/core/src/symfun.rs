//! Elementary symmetric functions and finite differences.
//!
//! `e_hat(j, n, alpha)(x) = e_j(x + b_alpha, ..., x + n + b_alpha)` and
//! `e_check` is the same with `b^alpha`. Both are cached as polynomials.

use crate::exactnum::{binomial, int, Rat};
use crate::model::TargetModel;
use num::{One, Zero};
use parking_lot::RwLock;
use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

/// Dense polynomial in one variable, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    /// `x + c`
    pub fn linear(c: Rat) -> Self {
        Self::new(vec![c, Rat::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, x: i64) -> Rat {
        self.eval(&int(x))
    }

    /// `f(x + c)`
    pub fn shift(&self, c: &Rat) -> Self {
        let mut out = vec![Rat::zero(); self.coeffs.len()];
        let mut cpow = vec![Rat::one()];
        for _ in 1..self.coeffs.len() {
            let last = cpow.last().unwrap() * c;
            cpow.push(last);
        }
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, slot) in out.iter_mut().enumerate().take(i + 1) {
                *slot += a * Rat::from_integer(binomial(i as i64, k as i64)) * &cpow[i - k];
            }
        }
        Self::new(out)
    }

    /// `(Delta_k f)(x) = f(x + k) - f(x)`
    pub fn delta(&self, k: i64) -> Self {
        &self.shift(&int(k)) - self
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        self.scale(&-Rat::one())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

/// `e_j` of scalars: 0 if `j < 0` or `j > len`, 1 if `j = 0`.
pub fn elem_sym(j: i64, xs: &[Rat]) -> Rat {
    let polys: Vec<UniPoly> = xs.iter().map(|x| UniPoly::constant(x.clone())).collect();
    elem_sym_poly(j, &polys).coeff(0)
}

/// `e_j` of polynomials, by the recurrence `e_j(xs, y) = e_j(xs) + y e_{j-1}(xs)`.
pub fn elem_sym_poly(j: i64, xs: &[UniPoly]) -> UniPoly {
    if j < 0 || j as usize > xs.len() {
        return UniPoly::zero();
    }
    let j = j as usize;
    let mut e = vec![UniPoly::zero(); j + 1];
    e[0] = UniPoly::one();
    for x in xs {
        for i in (1..=j).rev() {
            let term = &e[i - 1] * x;
            e[i] = &e[i] + &term;
        }
    }
    e.swap_remove(j)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EKind {
    Hat,
    Check,
}

type ECacheKey = (EKind, i64, i64, String, usize);

fn e_cache() -> &'static RwLock<HashMap<ECacheKey, UniPoly>> {
    static CACHE: OnceLock<RwLock<HashMap<ECacheKey, UniPoly>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `e_hat` / `e_check` as polynomials in `x`. `n = -1` is the empty product.
pub fn hat_check_e(kind: EKind, j: i64, n: i64, m: &TargetModel, alpha: usize) -> UniPoly {
    assert!(n >= -1, "hat_check_e needs n >= -1, got {n}");
    let key = (kind, j, n, m.name.clone(), alpha);
    if let Some(p) = e_cache().read().get(&key) {
        return p.clone();
    }
    let b = match kind {
        EKind::Hat => m.b_lower(alpha),
        EKind::Check => m.b_upper(alpha),
    };
    let xs: Vec<UniPoly> = (0..=n).map(|i| UniPoly::linear(int(i) + &b)).collect();
    let p = elem_sym_poly(j, &xs);
    e_cache().write().insert(key, p.clone());
    p
}

pub fn e_hat(j: i64, n: i64, m: &TargetModel, alpha: usize) -> UniPoly {
    hat_check_e(EKind::Hat, j, n, m, alpha)
}

pub fn e_check(j: i64, n: i64, m: &TargetModel, alpha: usize) -> UniPoly {
    hat_check_e(EKind::Check, j, n, m, alpha)
}

/// `Delta_{k_1} o ... o Delta_{k_m} f`; the empty list is the identity.
pub fn iterated_delta(shifts: &[i64], f: &UniPoly) -> UniPoly {
    shifts.iter().rev().fold(f.clone(), |acc, &k| acc.delta(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn elementary() {
        assert_eq!(elem_sym(0, &ints(&[5, 7])), int(1));
        assert_eq!(elem_sym(2, &ints(&[1, 2, 3])), int(11));
        assert_eq!(elem_sym(4, &ints(&[1, 2, 3])), int(0));
        assert_eq!(elem_sym(-1, &ints(&[1])), int(0));
        assert_eq!(elem_sym(0, &[]), int(1));
    }

    #[test]
    fn hat_and_check() {
        let pt = TargetModel::point();
        let p1 = TargetModel::p1();
        let expect = &UniPoly::linear(rat(1, 2)) * &UniPoly::linear(rat(3, 2));
        assert_eq!(e_hat(2, 1, &pt, 0), expect);
        assert_eq!(e_hat(0, 3, &p1, 1), UniPoly::one());
        assert_eq!(e_check(1, 1, &p1, 1), UniPoly::new(ints(&[1, 2])));
        assert_eq!(e_hat(0, -1, &pt, 0), UniPoly::one());
        assert!(e_hat(1, -1, &pt, 0).is_zero());
    }

    #[test]
    fn delta_examples() {
        let pt = TargetModel::point();
        let p1 = TargetModel::p1();
        for m in [&pt, &p1] {
            for a in 0..m.n {
                for k in 1..=4i64 {
                    let d1 = iterated_delta(&[2 * k - 1], &e_hat(1, 1, m, a));
                    assert_eq!(d1, UniPoly::constant(int(2 * (2 * k - 1))));
                    let d2 = iterated_delta(&[2 * k - 1], &e_hat(2, 1, m, a));
                    let b = m.b_lower(a);
                    let want = UniPoly::linear(b + int(k)).scale(&int(2 * (2 * k - 1)));
                    assert_eq!(d2, want);
                }
            }
        }
        assert_eq!(iterated_delta(&[2 * 2 - 1], &e_hat(1, 1, &pt, 0)), UniPoly::constant(int(6)));
        assert!(iterated_delta(&[5], &UniPoly::one()).is_zero());
    }

    #[test]
    fn delta_one_lowers_n() {
        for m in [TargetModel::point(), TargetModel::p1()] {
            for a in 0..m.n {
                for n in 0..=4i64 {
                    for j in 0..=n {
                        let lhs = e_hat(n + 1 - j, n, &m, a).delta(1);
                        let rhs = e_hat(n - j, n - 1, &m, a).shift(&int(1)).scale(&int(n + 1));
                        assert_eq!(lhs, rhs, "hat n={n} j={j}");
                        for s in 0..6i64 {
                            let l = e_check(n + 1 - j, n, &m, a).delta(1).eval_int(-s - 1);
                            let r = e_check(n - j, n - 1, &m, a).eval_int(-s) * int(n + 1);
                            assert_eq!(l, r, "check n={n} j={j} s={s}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn check_is_shifted_hat() {
        for m in [TargetModel::point(), TargetModel::p1()] {
            for a in 0..m.n {
                let c = m.b_upper(a) - m.b_lower(a);
                for n in 0..=4 {
                    for j in 0..=4 {
                        assert_eq!(e_check(j, n, &m, a), e_hat(j, n, &m, a).shift(&c));
                    }
                }
            }
        }
    }

    fn arb_poly() -> impl Strategy<Value = UniPoly> {
        proptest::collection::vec(-20i64..20, 0..6)
            .prop_map(|v| UniPoly::new(v.into_iter().map(int).collect()))
    }

    proptest! {
        #[test]
        fn deltas_commute(f in arb_poly(), a in 1i64..7, b in 1i64..7) {
            prop_assert_eq!(iterated_delta(&[a, b], &f), iterated_delta(&[b, a], &f));
        }

        #[test]
        fn delta_degree(f in arb_poly(), ks in proptest::collection::vec(1i64..6, 0..4)) {
            let g = iterated_delta(&ks, &f);
            match (f.degree(), g.degree()) {
                (_, None) => {}
                (Some(df), Some(dg)) => prop_assert_eq!(dg, df - ks.len()),
                (None, Some(_)) => prop_assert!(false),
            }
        }

        #[test]
        fn shift_is_evaluation(f in arb_poly(), c in -5i64..5, x in -5i64..5) {
            prop_assert_eq!(f.shift(&int(c)).eval_int(x), f.eval_int(x + c));
        }
    }
}
