use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::ir::{FieldId, VariantId};

/// Deepest field path tracked separately; anything below is joined.
pub const MAX_DEPTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Public,
    Secret,
}

impl Label {
    pub fn join(self, other: Label) -> Label {
        self.max(other)
    }

    pub fn is_secret(self) -> bool {
        self == Label::Secret
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Variant(VariantId),
    Field(FieldId),
}

/// Taint of a value, per field. `tag` covers an enum's discriminant and
/// `rest` every child not listed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaintTree {
    pub tag: Label,
    pub rest: Label,
    pub children: BTreeMap<Elem, TaintTree>,
}

impl TaintTree {
    pub fn leaf(l: Label) -> TaintTree {
        TaintTree { tag: l, rest: l, children: BTreeMap::new() }
    }

    pub fn public() -> TaintTree {
        TaintTree::leaf(Label::Public)
    }

    pub fn secret() -> TaintTree {
        TaintTree::leaf(Label::Secret)
    }

    pub fn node(children: BTreeMap<Elem, TaintTree>) -> TaintTree {
        TaintTree { tag: Label::Public, rest: Label::Public, children }.normalized()
    }

    /// Join of every label in the tree.
    pub fn collapse(&self) -> Label {
        self.children.values().fold(self.tag.join(self.rest), |l, c| l.join(c.collapse()))
    }

    pub fn child(&self, e: Elem) -> TaintTree {
        self.children.get(&e).cloned().unwrap_or_else(|| TaintTree::leaf(self.rest))
    }

    pub fn join(&self, other: &TaintTree) -> TaintTree {
        let mut children = BTreeMap::new();
        for k in self.children.keys().chain(other.children.keys()) {
            if !children.contains_key(k) {
                children.insert(*k, self.child(*k).join(&other.child(*k)));
            }
        }
        TaintTree { tag: self.tag.join(other.tag), rest: self.rest.join(other.rest), children }.normalized()
    }

    /// Replaces the subtree at `path`, or joins into it when `weak`.
    pub fn update(&self, path: &[Elem], value: &TaintTree, weak: bool) -> TaintTree {
        let Some((first, rest)) = path.split_first() else {
            return if weak { self.join(value) } else { value.clone() };
        };
        let mut out = self.clone();
        let updated = self.child(*first).update(rest, value, weak);
        out.children.insert(*first, updated);
        out.normalized()
    }

    /// Cuts the tree at the depth limit and drops children equal to `rest`.
    pub fn normalized(mut self) -> TaintTree {
        self.truncate(MAX_DEPTH);
        self
    }

    fn truncate(&mut self, depth: usize) {
        if depth == 0 {
            let l = self.collapse();
            *self = TaintTree::leaf(l);
            return;
        }
        for c in self.children.values_mut() {
            c.truncate(depth - 1);
        }
        let rest = TaintTree::leaf(self.rest);
        self.children.retain(|_, c| *c != rest);
    }

    pub fn depth(&self) -> usize {
        1 + self.children.values().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Every label in `self` is at most the corresponding one in `other`.
    pub fn leq(&self, other: &TaintTree) -> bool {
        self.join(other) == *other
    }
}

impl fmt::Display for TaintTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |l: Label| if l.is_secret() { "secret" } else { "public" };
        if self.children.is_empty() && self.tag == self.rest {
            return f.write_str(name(self.tag));
        }
        write!(f, "{{")?;
        if self.tag != self.rest {
            write!(f, "tag: {}, ", name(self.tag))?;
        }
        for (k, c) in &self.children {
            match k {
                Elem::Variant(v) => write!(f, "as {}: {c}, ", v.0)?,
                Elem::Field(x) => write!(f, "{}: {c}, ", x.0)?,
            }
        }
        write!(f, "..: {}}}", name(self.rest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(i: u32) -> Elem {
        Elem::Field(FieldId(i))
    }

    #[test]
    fn update_then_read() {
        let t = TaintTree::public().update(&[f(1)], &TaintTree::secret(), false);
        assert_eq!(t.child(f(1)), TaintTree::secret());
        assert_eq!(t.child(f(0)), TaintTree::public());
        assert_eq!(t.collapse(), Label::Secret);
        let back = t.update(&[f(1)], &TaintTree::public(), false);
        assert_eq!(back, TaintTree::public());
    }

    #[test]
    fn deep_paths_collapse_without_losing_secrecy() {
        let path: Vec<_> = (0..6).map(f).collect();
        let t = TaintTree::public().update(&path, &TaintTree::secret(), false);
        assert!(t.depth() <= MAX_DEPTH + 1);
        assert_eq!(t.collapse(), Label::Secret);
        assert_eq!(t.child(f(0)).child(f(1)).child(f(2)).child(f(3)).child(f(4)), TaintTree::secret());
    }

    #[test]
    fn join_is_an_upper_bound() {
        let a = TaintTree::public().update(&[f(0)], &TaintTree::secret(), false);
        let b = TaintTree::public().update(&[f(1), f(2)], &TaintTree::secret(), false);
        let j = a.join(&b);
        assert!(a.leq(&j) && b.leq(&j));
        assert_eq!(j.join(&a), j);
    }
}
