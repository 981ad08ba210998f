use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ordinal::Ordinal;

/// A finite function from ordinals to finite sets of ordinals.
///
/// Domain points may carry empty value sets; such a point still counts as
/// being in the domain.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Condition {
    entries: BTreeMap<Ordinal, BTreeSet<Ordinal>>,
}

impl Condition {
    pub fn new() -> Self {
        Condition::default()
    }

    pub fn from_entries<I, V>(entries: I) -> Self
    where
        I: IntoIterator<Item = (Ordinal, V)>,
        V: IntoIterator<Item = Ordinal>,
    {
        let mut c = Condition::new();
        for (d, vals) in entries {
            c.entries.entry(d).or_default().extend(vals);
        }
        c
    }

    /// Parses `"w: 4, w+3; w*2: 5"` style shorthand. Panics on bad input; meant
    /// for tests and examples.
    pub fn parse_short(text: &str) -> Self {
        let mut c = Condition::new();
        for part in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (d, vals) = part.split_once(':').expect("`dom: vals`");
            let d: Ordinal = d.trim().parse().expect("domain ordinal");
            let set = c.entries.entry(d).or_default();
            for v in vals.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                set.insert(v.parse().expect("value ordinal"));
            }
        }
        c
    }

    pub fn insert(&mut self, dom: Ordinal, value: Ordinal) -> bool {
        self.entries.entry(dom).or_default().insert(value)
    }

    pub fn touch(&mut self, dom: Ordinal) {
        self.entries.entry(dom).or_default();
    }

    pub fn get(&self, dom: &Ordinal) -> Option<&BTreeSet<Ordinal>> {
        self.entries.get(dom)
    }

    pub fn values_at(&self, dom: &Ordinal) -> impl Iterator<Item = &Ordinal> {
        self.entries.get(dom).into_iter().flatten()
    }

    pub fn contains_dom(&self, dom: &Ordinal) -> bool {
        self.entries.contains_key(dom)
    }

    pub fn dom(&self) -> impl Iterator<Item = &Ordinal> + Clone {
        self.entries.keys()
    }

    pub fn dom_set(&self) -> BTreeSet<Ordinal> {
        self.entries.keys().cloned().collect()
    }

    pub fn entries(&self) -> &BTreeMap<Ordinal, BTreeSet<Ordinal>> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every value used anywhere.
    pub fn value_pool(&self) -> BTreeSet<Ordinal> {
        self.entries.values().flatten().cloned().collect()
    }

    /// `self ≤ p`: `dom(p) ⊂ dom(self)` and `p(α) ⊂ self(α)` on `dom(p)`.
    pub fn extends(&self, p: &Condition) -> bool {
        p.entries.iter().all(|(d, vals)| {
            self.entries
                .get(d)
                .is_some_and(|mine| vals.is_subset(mine))
        })
    }

    /// Pointwise union.
    pub fn union(&self, other: &Condition) -> Condition {
        let mut out = self.clone();
        for (d, vals) in &other.entries {
            out.entries.entry(d.clone()).or_default().extend(vals.iter().cloned());
        }
        out
    }

    pub fn restrict(&self, keep: impl Fn(&Ordinal) -> bool) -> Condition {
        Condition {
            entries: self
                .entries
                .iter()
                .filter(|(d, _)| keep(d))
                .map(|(d, v)| (d.clone(), v.clone()))
                .collect(),
        }
    }

    /// Drops `value` from the set at `dom`; the domain point stays.
    pub fn remove_value(&mut self, dom: &Ordinal, value: &Ordinal) -> bool {
        self.entries.get_mut(dom).is_some_and(|s| s.remove(value))
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (d, vals)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let vals: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
            write!(f, "{d} ↦ {{{}}}", vals.join(", "))?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    dom: Ordinal,
    vals: Vec<Ordinal>,
}

#[derive(Serialize, Deserialize)]
struct ConditionJson {
    entries: Vec<EntryJson>,
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ConditionJson {
            entries: self
                .entries
                .iter()
                .map(|(d, v)| EntryJson {
                    dom: d.clone(),
                    vals: v.iter().cloned().collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Condition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = ConditionJson::deserialize(d)?;
        Ok(Condition::from_entries(
            raw.entries.into_iter().map(|e| (e.dom, e.vals)),
        ))
    }
}
