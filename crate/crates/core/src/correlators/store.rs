use super::{CorrError, CorrelatorKey};
use crate::exactnum::{fmt_rat, parse_rat, Rat};
use parking_lot::{Condvar, Mutex, RwLock};
use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Seed,
    Dvv,
    Reconstruction,
    FpReduction,
    DimensionZero,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Seed => "seed",
            Provenance::Dvv => "dvv",
            Provenance::Reconstruction => "reconstruction",
            Provenance::FpReduction => "fp_reduction",
            Provenance::DimensionZero => "dimension_zero",
        };
        f.write_str(s)
    }
}

impl Provenance {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "seed" => Provenance::Seed,
            "dvv" => Provenance::Dvv,
            "reconstruction" => Provenance::Reconstruction,
            "fp_reduction" => Provenance::FpReduction,
            "dimension_zero" => Provenance::DimensionZero,
            _ => return None,
        })
    }
}

thread_local! {
    static STACK: RefCell<Vec<(usize, CorrelatorKey)>> = const { RefCell::new(Vec::new()) };
}

static NEXT_ID: AtomicUsize = AtomicUsize::new(0);

/// Memo map with write-once entries and a per-key in-flight guard.
pub struct Store {
    id: usize,
    map: RwLock<HashMap<CorrelatorKey, (Rat, Provenance)>>,
    inflight: Mutex<HashSet<CorrelatorKey>>,
    done: Condvar,
}

impl Default for Store {
    fn default() -> Self {
        Self::new()
    }
}

impl Store {
    pub fn new() -> Self {
        Store {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            map: RwLock::new(HashMap::new()),
            inflight: Mutex::new(HashSet::new()),
            done: Condvar::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.read().is_empty()
    }

    pub fn get(&self, key: &CorrelatorKey) -> Option<(Rat, Provenance)> {
        self.map.read().get(key).cloned()
    }

    /// Inserts a value. Rewriting an existing key with a different value is
    /// an error.
    pub fn insert(&self, key: CorrelatorKey, value: Rat, prov: Provenance) -> Result<(), CorrError> {
        let mut map = self.map.write();
        match map.get(&key) {
            Some((v, _)) if *v != value => Err(CorrError::Conflict(key.to_string())),
            Some(_) => Ok(()),
            None => {
                map.insert(key, (value, prov));
                Ok(())
            }
        }
    }

    pub fn get_or_compute(
        &self,
        key: &CorrelatorKey,
        f: impl FnOnce() -> Result<(Rat, Provenance), CorrError>,
    ) -> Result<Rat, CorrError> {
        if let Some((v, _)) = self.get(key) {
            return Ok(v);
        }
        let on_stack = STACK.with(|s| s.borrow().iter().any(|(id, k)| *id == self.id && k == key));
        if on_stack {
            return Err(CorrError::Circular(key.to_string()));
        }
        {
            let mut inflight = self.inflight.lock();
            loop {
                if let Some((v, _)) = self.get(key) {
                    return Ok(v);
                }
                if inflight.contains(key) {
                    self.done.wait(&mut inflight);
                } else {
                    inflight.insert(key.clone());
                    break;
                }
            }
        }
        STACK.with(|s| s.borrow_mut().push((self.id, key.clone())));
        let result = f();
        STACK.with(|s| s.borrow_mut().pop());
        let out = result.and_then(|(v, p)| self.insert(key.clone(), v.clone(), p).map(|_| v));
        self.inflight.lock().remove(key);
        self.done.notify_all();
        out
    }

    pub fn export(&self, header: &str) -> String {
        let map = self.map.read();
        let mut lines: Vec<String> = map
            .iter()
            .map(|(k, (v, p))| format!("{k}\t{}\t{p}", fmt_rat(v)))
            .collect();
        lines.sort();
        let mut out = format!("# hodgevir-cache {header}\n");
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }

    /// All-or-nothing import; a wrong header or any malformed line discards
    /// the whole file.
    pub fn import(&self, text: &str, header: &str) -> usize {
        let mut lines = text.lines();
        if lines.next() != Some(&format!("# hodgevir-cache {header}")) {
            return 0;
        }
        let mut parsed = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split('\t').collect();
            if parts.len() != 3 {
                return 0;
            }
            let (Ok(k), Ok(v), Some(p)) =
                (CorrelatorKey::parse(parts[0]), parse_rat(parts[1]), Provenance::parse(parts[2]))
            else {
                return 0;
            };
            parsed.push((k, v, p));
        }
        let mut count = 0;
        for (k, v, p) in parsed {
            if self.insert(k, v, p).is_ok() {
                count += 1;
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    #[test]
    fn conflicting_write_is_an_error() {
        let s = Store::new();
        let k = CorrelatorKey::new("point", 0, 0, &[(0, 0); 3], &[]);
        s.insert(k.clone(), int(1), Provenance::Seed).unwrap();
        s.insert(k.clone(), int(1), Provenance::Seed).unwrap();
        assert!(matches!(s.insert(k, int(2), Provenance::Seed), Err(CorrError::Conflict(_))));
    }

    #[test]
    fn cycles_are_detected() {
        let s = Store::new();
        let k = CorrelatorKey::new("point", 0, 0, &[(1, 0)], &[]);
        let r = s.get_or_compute(&k, || s.get_or_compute(&k, || Ok((int(0), Provenance::Seed))).map(|v| (v, Provenance::Seed)));
        assert!(matches!(r, Err(CorrError::Circular(_))));
        assert!(s.is_empty());
    }

    #[test]
    fn concurrent_requests_agree() {
        let s = std::sync::Arc::new(Store::new());
        let k = CorrelatorKey::new("point", 1, 0, &[(1, 0)], &[]);
        let calls = std::sync::Arc::new(AtomicUsize::new(0));
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let (s, k, calls) = (s.clone(), k.clone(), calls.clone());
                std::thread::spawn(move || {
                    s.get_or_compute(&k, || {
                        calls.fetch_add(1, Ordering::SeqCst);
                        std::thread::sleep(std::time::Duration::from_millis(20));
                        Ok((int(7), Provenance::Seed))
                    })
                    .unwrap()
                })
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), int(7));
        }
        assert_eq!(calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn import_rejects_bad_files() {
        let s = Store::new();
        let k = CorrelatorKey::new("point", 1, 0, &[(1, 0)], &[]);
        s.insert(k, int(3), Provenance::Dvv).unwrap();
        let text = s.export("abc");
        assert_eq!(Store::new().import(&text, "abc"), 1);
        assert_eq!(Store::new().import(&text, "xyz"), 0);
        assert_eq!(Store::new().import(&format!("{text}garbage\n"), "abc"), 0);
    }
}
