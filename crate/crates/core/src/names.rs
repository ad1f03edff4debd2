//! Fresh-name generation.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;

pub type Name = String;

/// Appends primes to `base` until the result is rejected by `taken`.
pub fn prime_away(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    let mut candidate = String::from(base);
    loop {
        candidate.push('\'');
        if !taken(&candidate) {
            return candidate;
        }
    }
}

/// Hands out identifiers that collide with nothing in a fixed set of names.
///
/// Translations seed the supply with every name occurring in their input, so
/// the binders they introduce can never capture a source variable.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: BTreeSet<Name>,
    counter: u64,
}

impl NameSupply {
    pub fn new(used: BTreeSet<Name>) -> Self {
        NameSupply { used, counter: 0 }
    }

    pub fn fresh(&mut self, hint: &str) -> Name {
        loop {
            self.counter += 1;
            let candidate = format!("_{}{}", hint, self.counter);
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(String::from(name));
    }
}
