//! Exact rational arithmetic and Bernoulli numbers.
//!
//! Every coefficient in the crate is a [`Rat`]. Bernoulli numbers follow the
//! recurrence `sum_{j=0}^{m} C(m+1, j) B_j = 0` with `B_0 = 1`, so `B_1 = -1/2`.
//! Only even indices are consumed elsewhere.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use parking_lot::RwLock;
use std::cmp::Ordering;
use std::sync::OnceLock;

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational `{0}`")]
    Parse(String),
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

/// Binary (or unary, for `Neg`, which ignores `b`) operation with an explicit
/// error on division by zero.
pub fn rat_op(a: &Rat, b: &Rat, op: RatOp) -> Result<Rat, NumError> {
    Ok(match op {
        RatOp::Add => a + b,
        RatOp::Sub => a - b,
        RatOp::Mul => a * b,
        RatOp::Div => return checked_div(a, b),
        RatOp::Neg => -a,
    })
}

pub fn rat_cmp(a: &Rat, b: &Rat) -> Ordering {
    a.cmp(b)
}

pub fn checked_div(a: &Rat, b: &Rat) -> Result<Rat, NumError> {
    if b.is_zero() {
        Err(NumError::DivisionByZero)
    } else {
        Ok(a / b)
    }
}

fn bernoulli_table() -> &'static RwLock<Vec<Rat>> {
    static TABLE: OnceLock<RwLock<Vec<Rat>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![Rat::one()]))
}

pub fn bernoulli(m: usize) -> Rat {
    if let Some(b) = bernoulli_table().read().get(m) {
        return b.clone();
    }
    let mut table = bernoulli_table().write();
    while table.len() <= m {
        let k = table.len();
        // B_k = -1/(k+1) * sum_{j<k} C(k+1, j) B_j
        let mut acc = Rat::zero();
        for (j, bj) in table.iter().enumerate() {
            acc += Rat::from_integer(binomial(k as i64 + 1, j as i64)) * bj;
        }
        let bk = -acc / int(k as i64 + 1);
        table.push(bk);
    }
    table[m].clone()
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn factorial_rat(n: u64) -> Rat {
    Rat::from_integer(factorial(n))
}

/// `n!!` with the convention `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> BigInt {
    assert!(n >= -1, "double factorial of {n}");
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    acc
}

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `B_{2k} / (2k)!`, the weight attached to `s_k` throughout.
pub fn hodge_weight(k: u32) -> Rat {
    bernoulli(2 * k as usize) / factorial_rat(2 * k as u64)
}

pub fn sign(e: i64) -> Rat {
    if e.rem_euclid(2) == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// Renders as `p` or `p/q`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat, NumError> {
    let s = s.trim();
    let err = || NumError::Parse(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(NumError::DivisionByZero);
    }
    Ok(Rat::new(n, d))
}

pub fn to_i64(r: &Rat) -> Option<i64> {
    if r.denom().is_one() {
        r.numer().to_i64()
    } else {
        None
    }
}

pub fn is_negative(r: &Rat) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        assert!(rat_op(&rat(1, 6), &rat(-1, 6), RatOp::Add).unwrap().is_zero());
        assert_eq!(rat_op(&rat(2, 3), &rat(3, 4), RatOp::Mul).unwrap(), rat(1, 2));
        assert_eq!(rat_op(&int(1), &int(24), RatOp::Div).unwrap(), rat(1, 24));
        assert_eq!(rat_op(&int(1), &int(0), RatOp::Div), Err(NumError::DivisionByZero));
        assert_eq!(rat_op(&rat(1, 3), &int(0), RatOp::Neg).unwrap(), rat(-1, 3));
        assert_eq!(rat_cmp(&rat(1, 3), &rat(1, 2)), Ordering::Less);
    }

    #[test]
    fn lowest_terms() {
        let r = rat(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(6), rat(1, 42));
        assert_eq!(bernoulli(8), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        for m in (3..30).step_by(2) {
            assert!(bernoulli(m).is_zero());
        }
        assert_eq!(bernoulli(12), bernoulli(12));
    }

    #[test]
    fn factorials() {
        assert_eq!(double_factorial(-1), BigInt::from(1));
        assert_eq!(double_factorial(7), BigInt::from(105));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(hodge_weight(1), rat(1, 12));
        assert_eq!(hodge_weight(2), rat(-1, 720));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat(" 7 ").unwrap(), int(7));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
        assert_eq!(fmt_rat(&rat(1, 1152)), "1/1152");
        assert_eq!(fmt_rat(&int(-2)), "-2");
    }

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (-50i64..50, 1i64..30).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn add_commutes(a in arb_rat(), b in arb_rat()) {
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn mul_distributes(a in arb_rat(), b in arb_rat(), c in arb_rat()) {
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        }

        #[test]
        fn roundtrip_text(a in arb_rat()) {
            prop_assert_eq!(parse_rat(&fmt_rat(&a)).unwrap(), a);
        }
    }
}
