//! Name-keyed registries for interchangeable strategies.
//!
//! Two families are registered out of the box: beamsplitter transformation
//! methods ([`crate::optics::BeamsplitterMethod`]) and detector responses
//! ([`crate::detection::DetectorResponse`]). Both are selectable at runtime
//! by name, e.g. from the command line.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::detection::{DetectorResponse, NumberResolving, OnOff};
use crate::error::{Error, Result};
use crate::optics::{BeamsplitterMethod, MonomialSubstitution, PermanentExpansion};

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Arc<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Registers `item` under `name`, replacing any previous entry.
    pub fn register(&mut self, name: &'static str, item: Arc<T>) -> &mut Self {
        self.entries.insert(name, item);
        self
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_owned(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}

pub fn beamsplitter_methods() -> &'static Registry<dyn BeamsplitterMethod> {
    static REG: OnceLock<Registry<dyn BeamsplitterMethod>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r = Registry::new("beamsplitter");
        for m in [
            Arc::new(MonomialSubstitution) as Arc<dyn BeamsplitterMethod>,
            Arc::new(PermanentExpansion),
        ] {
            r.register(m.name(), m);
        }
        r
    })
}

pub fn detector_responses() -> &'static Registry<dyn DetectorResponse> {
    static REG: OnceLock<Registry<dyn DetectorResponse>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r = Registry::new("detector");
        for d in [
            Arc::new(OnOff) as Arc<dyn DetectorResponse>,
            Arc::new(NumberResolving),
        ] {
            r.register(d.name(), d);
        }
        r
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names() {
        assert_eq!(
            beamsplitter_methods().names(),
            vec!["monomial", "permanent"]
        );
        assert_eq!(detector_responses().names(), vec!["onoff", "pnr"]);
    }

    #[test]
    fn unknown_name_lists_alternatives() {
        let err = beamsplitter_methods().get("fft").err().unwrap();
        assert_eq!(
            err.to_string(),
            "unknown beamsplitter strategy 'fft' (available: monomial, permanent)"
        );
    }

    #[test]
    fn register_replaces() {
        let mut r: Registry<dyn DetectorResponse> = Registry::new("detector");
        r.register("x", Arc::new(OnOff));
        r.register("x", Arc::new(NumberResolving));
        assert_eq!(r.get("x").unwrap().name(), "pnr");
    }
}
