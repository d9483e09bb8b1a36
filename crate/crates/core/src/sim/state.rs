use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::number::{format_rational, Rational};

/// A predicate applied to object names. Ordered lexicographically by
/// predicate name, then arguments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

/// A function applied to object names; the key of a numeric fluent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundFluent {
    pub function: String,
    pub args: Vec<String>,
}

fn write_app(f: &mut fmt::Formatter<'_>, head: &str, args: &[String]) -> fmt::Result {
    write!(f, "({head}")?;
    for a in args {
        write!(f, " {a}")?;
    }
    f.write_str(")")
}

impl GroundAtom {
    pub fn new(predicate: &str, args: &[&str]) -> Self {
        GroundAtom { predicate: predicate.to_string(), args: args.iter().map(|s| s.to_string()).collect() }
    }
}

impl GroundFluent {
    pub fn new(function: &str, args: &[&str]) -> Self {
        GroundFluent { function: function.to_string(), args: args.iter().map(|s| s.to_string()).collect() }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_app(f, &self.predicate, &self.args)
    }
}

impl fmt::Display for GroundFluent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_app(f, &self.function, &self.args)
    }
}

/// Closed-world state: the true atoms plus the values of initialized
/// fluents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct State {
    pub atoms: BTreeSet<GroundAtom>,
    pub fluents: BTreeMap<GroundFluent, Rational>,
}

impl State {
    pub fn holds(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn value(&self, fluent: &GroundFluent) -> Option<&Rational> {
        self.fluents.get(fluent)
    }
}

/// One line per atom, then one `(= (f ...) v)` line per fluent, both sorted.
impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for atom in &self.atoms {
            writeln!(f, "{atom}")?;
        }
        for (fluent, value) in &self.fluents {
            writeln!(f, "(= {fluent} {})", format_rational(value))?;
        }
        Ok(())
    }
}

/// `{"atoms": ["(on a b)", ...], "fluents": {"(f a)": "3.5", ...}}`
impl Serialize for State {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let atoms: Vec<String> = self.atoms.iter().map(ToString::to_string).collect();
        let fluents: BTreeMap<String, String> =
            self.fluents.iter().map(|(k, v)| (k.to_string(), format_rational(v))).collect();
        let mut s = serializer.serialize_struct("State", 2)?;
        s.serialize_field("atoms", &atoms)?;
        s.serialize_field("fluents", &fluents)?;
        s.end()
    }
}
