use indexmap::IndexMap;

use crate::error::{Error, Result};

/// Strategies selected by name at runtime.
pub struct Registry<T: ?Sized> {
    what: &'static str,
    entries: IndexMap<&'static str, Box<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(what: &'static str) -> Self {
        Registry {
            what,
            entries: IndexMap::new(),
        }
    }

    /// Later registrations under the same name replace earlier ones.
    pub fn register(&mut self, name: &'static str, entry: Box<T>) -> &mut Self {
        self.entries.insert(name, entry);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownKind {
                registry: self.what,
                name: name.to_string(),
            })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}
