//! Name-keyed registries of interchangeable strategies.
//!
//! Every family of algorithms in the crate (crossing detectors, observable
//! backends, spinor cut strategies, experiment shapes) is exposed as a trait
//! object behind a [`Registry`], so callers pick a variant by name at runtime.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Implemented by every strategy trait object stored in a [`Registry`].
pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized + Named> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Registers a strategy under its own name, replacing any previous entry.
    pub fn register(&mut self, strategy: Box<T>) -> &mut Self {
        self.entries.insert(strategy.name(), strategy);
        self
    }

    pub fn with(mut self, strategy: Box<T>) -> Self {
        self.register(strategy);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.values().map(|b| b.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter: Named {
        fn greet(&self) -> String;
    }

    struct Hello;
    impl Named for Hello {
        fn name(&self) -> &'static str {
            "hello"
        }
    }
    impl Greeter for Hello {
        fn greet(&self) -> String {
            "hi".into()
        }
    }

    #[test]
    fn lookup_by_name() {
        let reg: Registry<dyn Greeter> = Registry::new("greeter").with(Box::new(Hello));
        assert_eq!(reg.get("hello").unwrap().greet(), "hi");
        assert_eq!(reg.names(), vec!["hello"]);
        match reg.get("nope") {
            Err(Error::UnknownStrategy { available, .. }) => assert_eq!(available, "hello"),
            _ => panic!("expected UnknownStrategy"),
        }
    }
}
