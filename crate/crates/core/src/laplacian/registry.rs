use super::{ConvolutionOperator, Magnetic, SignMagnetic};
use crate::{Error, Result};

/// Parameters any registered operator may read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    pub q: f64,
}

impl Default for OperatorParams {
    fn default() -> Self {
        Self { q: 0.25 }
    }
}

pub type OperatorFactory = fn(&OperatorParams) -> Result<Box<dyn ConvolutionOperator>>;

struct Entry {
    name: &'static str,
    aliases: &'static [&'static str],
    factory: OperatorFactory,
}

/// Name → operator constructor.
pub struct OperatorRegistry {
    entries: Vec<Entry>,
}

impl OperatorRegistry {
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    /// `sigma` (alias `sign-magnetic`) and `magnetic` (alias `q`).
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register("sigma", &["sign-magnetic"], |_| Ok(Box::new(SignMagnetic)));
        r.register("magnetic", &["q"], |p| Ok(Box::new(Magnetic::new(p.q)?)));
        r
    }

    pub fn register(
        &mut self,
        name: &'static str,
        aliases: &'static [&'static str],
        factory: OperatorFactory,
    ) {
        self.entries.retain(|e| e.name != name);
        self.entries.push(Entry {
            name,
            aliases,
            factory,
        });
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name).collect()
    }

    /// Canonical name for `name` or one of its aliases.
    pub fn resolve(&self, name: &str) -> Result<&'static str> {
        self.entries
            .iter()
            .find(|e| e.name == name || e.aliases.contains(&name))
            .map(|e| e.name)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "operator",
                name: name.to_owned(),
                available: self.names().join(", "),
            })
    }

    pub fn create(
        &self,
        name: &str,
        params: &OperatorParams,
    ) -> Result<Box<dyn ConvolutionOperator>> {
        let canonical = self.resolve(name)?;
        let entry = self
            .entries
            .iter()
            .find(|e| e.name == canonical)
            .expect("resolved");
        (entry.factory)(params)
    }
}

impl Default for OperatorRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
