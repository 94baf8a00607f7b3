//! Exact correlator values for the built-in targets, memoized per key.

mod hodge;
mod p1;
mod point;
mod potential;
mod store;

pub use point::{dvv_multinomial, genus_zero_point_closed};
pub use potential::{constant_term, double_bracket, HodgePotential};
pub use store::{Provenance, Store};

use crate::exactnum::{fmt_rat, Rat};
use crate::model::TargetModel;
use num::Zero;
use std::fmt;

/// Bumped whenever a recursion changes, so stale cache files are ignored.
pub const ORACLE_VERSION: &str = "3";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorrError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("circular dependency at {0}")]
    Circular(String),
    #[error("conflicting values for {0}")]
    Conflict(String),
    #[error("degree {0} exceeds the Novikov cap")]
    DegreeCap(String),
    #[error("no reduction applies to {0}")]
    Irreducible(String),
    #[error("cache: {0}")]
    Cache(String),
}

/// `(level k, basis index alpha)`.
pub type Insertion = (u32, usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrelatorKey {
    pub model: String,
    pub genus: u32,
    pub degree: u32,
    pub insertions: Vec<Insertion>,
    /// Chern character indices: `2l-1` stands for `ch_{2l-1}(E)`.
    pub hodge: Vec<u32>,
}

impl CorrelatorKey {
    pub fn new(model: &str, genus: u32, degree: u32, ins: &[Insertion], hodge: &[u32]) -> Self {
        let mut insertions = ins.to_vec();
        insertions.sort_unstable();
        let mut hodge = hodge.to_vec();
        hodge.sort_unstable();
        CorrelatorKey { model: model.to_string(), genus, degree, insertions, hodge }
    }

    pub fn n(&self) -> usize {
        self.insertions.len()
    }

    pub fn parse(s: &str) -> Result<Self, CorrError> {
        let err = || CorrError::Cache(format!("bad key `{s}`"));
        let parts: Vec<&str> = s.split('|').collect();
        if parts.len() != 5 {
            return Err(err());
        }
        let num = |x: &str| x.parse::<u32>().map_err(|_| err());
        let ins = if parts[3].is_empty() {
            vec![]
        } else {
            parts[3]
                .split(',')
                .map(|p| {
                    let (k, a) = p.split_once(':').ok_or_else(err)?;
                    Ok((num(k)?, num(a)? as usize))
                })
                .collect::<Result<Vec<_>, CorrError>>()?
        };
        let hodge = if parts[4].is_empty() {
            vec![]
        } else {
            parts[4].split(',').map(num).collect::<Result<Vec<_>, _>>()?
        };
        Ok(Self::new(parts[0], num(parts[1])?, num(parts[2])?, &ins, &hodge))
    }
}

impl fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.insertions.iter().map(|(k, a)| format!("{k}:{a}")).collect();
        let h: Vec<String> = self.hodge.iter().map(|x| x.to_string()).collect();
        write!(f, "{}|{}|{}|{}|{}", self.model, self.genus, self.degree, ins.join(","), h.join(","))
    }
}

/// Overridable initial values of the recursions.
#[derive(Debug, Clone, PartialEq)]
pub struct Seeds {
    /// `<tau_0^3>_0` of the point.
    pub tau0_cubed: Rat,
    /// `<tau_1>_1` of the point.
    pub tau1_genus1: Rat,
    /// `<tau_0(w) tau_0(w)>_{0,1}` of P^1.
    pub p1_seed: Rat,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds {
            tau0_cubed: Rat::from_integer(1.into()),
            tau1_genus1: Rat::new(1.into(), 24.into()),
            p1_seed: Rat::from_integer(1.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Point,
    P1,
    Other,
}

fn kind_of(m: &TargetModel) -> Kind {
    let same = |b: TargetModel| {
        m.n == b.n && m.d == b.d && m.eta == b.eta && m.chern == b.chern && m.novikov == b.novikov && m.hol_deg == b.hol_deg
    };
    if same(TargetModel::point()) {
        Kind::Point
    } else if same(TargetModel::p1()) {
        Kind::P1
    } else {
        Kind::Other
    }
}

/// Correlator oracle for one target with a shared memo store.
pub struct Oracle {
    pub model: TargetModel,
    pub seeds: Seeds,
    pub q_max: u32,
    kind: Kind,
    store: Store,
}

impl Oracle {
    pub fn new(model: TargetModel, q_max: u32) -> Self {
        Self::with_seeds(model, q_max, Seeds::default())
    }

    pub fn with_seeds(model: TargetModel, q_max: u32, seeds: Seeds) -> Self {
        let kind = kind_of(&model);
        Oracle { model, seeds, q_max, kind, store: Store::new() }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    /// Content hash of the model and seeds, used to validate cache files.
    pub fn config_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.model.to_config());
        h.update(ORACLE_VERSION);
        for s in [&self.seeds.tau0_cubed, &self.seeds.tau1_genus1, &self.seeds.p1_seed] {
            h.update(fmt_rat(s));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Virtual dimension rule with Hodge degrees included.
    pub fn dimension_ok(&self, key: &CorrelatorKey) -> bool {
        let m = &self.model;
        let lhs: i64 = key
            .insertions
            .iter()
            .map(|&(k, a)| k as i64 + m.hol_deg[a])
            .sum::<i64>()
            + key.hodge.iter().map(|&h| h as i64).sum::<i64>();
        let c1d = m.novikov.unwrap_or(0) * key.degree as i64;
        if m.novikov.is_none() && key.degree != 0 {
            return false;
        }
        lhs == (1 - key.genus as i64) * (m.d - 3) + key.n() as i64 + c1d
    }

    pub fn correlator(&self, g: u32, d: u32, ins: &[Insertion], hodge: &[u32]) -> Result<Rat, CorrError> {
        self.value(&CorrelatorKey::new(&self.model.name, g, d, ins, hodge))
    }

    pub fn value(&self, key: &CorrelatorKey) -> Result<Rat, CorrError> {
        if key.insertions.iter().any(|&(_, a)| a >= self.model.n) {
            return Err(CorrError::Unsupported(format!("basis index out of range in {key}")));
        }
        if key.hodge.iter().any(|&h| h == 0 || h % 2 == 0) {
            return Ok(Rat::zero());
        }
        if !self.dimension_ok(key) {
            return Ok(Rat::zero());
        }
        if self.kind == Kind::P1 && key.degree > self.q_max {
            return Err(CorrError::DegreeCap(key.to_string()));
        }
        self.store.get_or_compute(key, || self.compute(key))
    }

    fn compute(&self, key: &CorrelatorKey) -> Result<(Rat, Provenance), CorrError> {
        if !key.hodge.is_empty() {
            if key.genus == 0 {
                return Ok((Rat::zero(), Provenance::DimensionZero));
            }
            if self.kind == Kind::P1 {
                return Err(CorrError::Unsupported(format!("genus {} on p1: {key}", key.genus)));
            }
            return hodge::fp_reduce(self, key, 0).map(|v| (v, Provenance::FpReduction));
        }
        match self.kind {
            Kind::Point => point::dvv(self, key),
            Kind::P1 => {
                if key.genus > 0 {
                    return Err(CorrError::Unsupported(format!("genus {} on p1: {key}", key.genus)));
                }
                p1::genus_zero(self, key)
            }
            Kind::Other => Err(CorrError::Unsupported(format!("no oracle for model {}", self.model.name))),
        }
    }

    /// FP reduction eliminating the `which`-th Hodge insertion, bypassing the
    /// store for the top-level key.
    pub fn fp_reduce_at(&self, key: &CorrelatorKey, which: usize) -> Result<Rat, CorrError> {
        hodge::fp_reduce(self, key, which)
    }

    pub fn export_cache(&self) -> String {
        self.store.export(&self.config_hash())
    }

    /// Loads a cache file; returns the number of entries loaded, or 0 if the
    /// header does not match or any line is corrupt.
    pub fn import_cache(&self, text: &str) -> usize {
        self.store.import(text, &self.config_hash())
    }
}

/// All ways to split `items` into two labeled parts.
pub(crate) fn labeled_splits<T: Clone>(items: &[T]) -> Vec<(Vec<T>, Vec<T>)> {
    let n = items.len();
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0..(1u64 << n) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, x) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                a.push(x.clone());
            } else {
                b.push(x.clone());
            }
        }
        out.push((a, b));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn key_roundtrip() {
        let k = CorrelatorKey::new("p1", 0, 1, &[(2, 1), (0, 0)], &[3, 1]);
        assert_eq!(k.insertions, vec![(0, 0), (2, 1)]);
        assert_eq!(CorrelatorKey::parse(&k.to_string()).unwrap(), k);
        let e = CorrelatorKey::new("point", 1, 0, &[], &[]);
        assert_eq!(CorrelatorKey::parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn point_values() {
        let o = Oracle::new(TargetModel::point(), 0);
        assert_eq!(o.correlator(0, 0, &[(0, 0); 3], &[]).unwrap(), int(1));
        assert_eq!(o.correlator(1, 0, &[(1, 0)], &[]).unwrap(), rat(1, 24));
        assert_eq!(o.correlator(1, 0, &[(0, 0), (2, 0)], &[]).unwrap(), rat(1, 24));
        assert_eq!(o.correlator(1, 0, &[(1, 0), (1, 0)], &[]).unwrap(), rat(1, 24));
        assert_eq!(o.correlator(2, 0, &[(4, 0)], &[]).unwrap(), rat(1, 1152));
        assert_eq!(o.correlator(0, 0, &[(0, 0), (0, 0)], &[]).unwrap(), int(0));
    }

    #[test]
    fn point_hodge_values() {
        let o = Oracle::new(TargetModel::point(), 0);
        assert_eq!(o.correlator(1, 0, &[(0, 0)], &[1]).unwrap(), rat(1, 24));
        assert_eq!(o.correlator(1, 0, &[(0, 0)], &[2]).unwrap(), int(0));
        assert_eq!(o.correlator(0, 0, &[(0, 0); 4], &[1]).unwrap(), int(0));
        assert_eq!(o.correlator(2, 0, &[(2, 0)], &[1, 1]).unwrap(), rat(7, 2880));
    }

    #[test]
    fn p1_values() {
        let o = Oracle::new(TargetModel::p1(), 2);
        assert_eq!(o.correlator(0, 1, &[(0, 1), (0, 1)], &[]).unwrap(), int(1));
        assert_eq!(o.correlator(0, 0, &[(0, 0), (0, 1), (0, 1)], &[]).unwrap(), int(0));
        assert_eq!(o.correlator(0, 0, &[(0, 0), (0, 0), (0, 1)], &[]).unwrap(), int(1));
        assert_eq!(o.correlator(0, 1, &[(1, 1)], &[]).unwrap(), int(0));
        assert_eq!(o.correlator(0, 1, &[], &[]).unwrap(), int(1));
        assert!(matches!(o.correlator(1, 0, &[(0, 1)], &[]), Err(CorrError::Unsupported(_))));
        assert!(matches!(o.correlator(0, 3, &[(4, 1)], &[]), Err(CorrError::DegreeCap(_))));
    }
}
