use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered, immutable list of variable names shared by a family of polynomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VarSet(Arc<[String]>);

impl VarSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::Structure("empty variable name".into()));
            }
            if names[..i].contains(n) {
                return Err(Error::DuplicateVariable(n.clone()));
            }
        }
        Ok(VarSet(names.into()))
    }

    /// Parses a comma separated list such as `"x,y,z"`.
    pub fn parse(list: &str) -> Result<Self> {
        Self::new(list.split(',').map(|s| s.trim().to_string()))
    }

    pub fn xyz() -> Self {
        Self::new(["x", "y", "z"]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// The same set with the variable at `idx` removed.
    pub fn without(&self, idx: usize) -> Self {
        VarSet(self.0.iter().enumerate().filter(|&(i, _)| i != idx).map(|(_, n)| n.clone()).collect())
    }

    pub(crate) fn check_same(&self, other: &VarSet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::VarSetMismatch { left: self.to_string(), right: other.to_string() })
        }
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(","))
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VarSet[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates() {
        assert_eq!(VarSet::parse("x,y,x"), Err(Error::DuplicateVariable("x".into())));
    }

    #[test]
    fn without_drops_one() {
        let v = VarSet::xyz().without(2);
        assert_eq!(v.names(), &["x".to_string(), "y".to_string()]);
    }
}
