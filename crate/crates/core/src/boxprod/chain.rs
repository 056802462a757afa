use super::Symbol;
use std::collections::BTreeMap;
use std::fmt;

/// Finite integer combination of symbols. Arithmetic panics on `i64` overflow.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolChain {
    terms: BTreeMap<Symbol, i64>,
}

impl SymbolChain {
    pub fn new() -> Self {
        SymbolChain::default()
    }

    pub fn single(s: Symbol, c: i64) -> Self {
        let mut out = SymbolChain::new();
        out.add_term(s, c);
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Symbol, i64)>) -> Self {
        let mut out = SymbolChain::new();
        for (s, c) in terms {
            out.add_term(s, c);
        }
        out
    }

    pub fn add_term(&mut self, s: Symbol, c: i64) {
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(s) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().checked_add(c).expect("coefficient overflow");
                if sum == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SymbolChain, c: i64) {
        for (s, v) in &other.terms {
            self.add_term(s.clone(), v.checked_mul(c).expect("coefficient overflow"));
        }
    }

    pub fn scaled(&self, c: i64) -> SymbolChain {
        let mut out = SymbolChain::new();
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &Symbol) -> i64 {
        self.terms.get(s).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, i64)> {
        self.terms.iter().map(|(s, c)| (s, *c))
    }

    pub fn retain(&mut self, keep: impl Fn(&Symbol) -> bool) {
        self.terms.retain(|s, _| keep(s));
    }

    /// The common degree of all terms, if there is one.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|s| s.degree());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms.iter().map(|(s, c)| serde_json::json!({ "symbol": s.to_json(), "coefficient": c })).collect(),
        )
    }
}

impl fmt::Display for SymbolChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(s, c)| format!("{c}·[{s}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl FromIterator<(Symbol, i64)> for SymbolChain {
    fn from_iter<T: IntoIterator<Item = (Symbol, i64)>>(iter: T) -> Self {
        SymbolChain::from_terms(iter)
    }
}
