//! Category hierarchy, attribute vocabularies, the asset catalog and
//! property-set entailment.

mod catalog;
mod props;

use std::collections::HashMap;

use serde::Deserialize;
use thiserror::Error;

pub use catalog::{AssetSpec, Catalog};
pub use props::{AtomicProperty, Color, Material, ObjectId, PropertySet, Props};

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("unknown {kind} `{value}`")]
    UnknownValue { kind: &'static str, value: String },
    #[error("duplicate category `{0}`")]
    DuplicateCategory(String),
    #[error("category `{0}` is part of a parent cycle")]
    Cycle(String),
    #[error("property set must not be empty")]
    EmptyPropertySet,
    #[error("object description must carry color, material and category")]
    IncompleteDescription,
    #[error("asset `{asset}`: {reason}")]
    InvalidAsset { asset: String, reason: String },
    #[error("malformed data file: {0}")]
    Parse(#[from] toml::de::Error),
}

/// One node of the category forest.
#[derive(Clone, Debug)]
pub struct Category {
    pub name: String,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

#[derive(Deserialize)]
struct TaxonomyFile {
    category: Vec<CategoryEntry>,
}

#[derive(Deserialize)]
struct CategoryEntry {
    name: String,
    parent: Option<String>,
}

/// The category forest. Immutable after load.
#[derive(Clone, Debug)]
pub struct Taxonomy {
    nodes: Vec<Category>,
    index: HashMap<String, usize>,
    // chains[i] = [i, parent(i), ..., root]
    chains: Vec<Vec<usize>>,
}

pub const BUILTIN_TAXONOMY: &str = include_str!("../../data/taxonomy.toml");

impl Taxonomy {
    pub fn builtin() -> Self {
        Self::from_toml(BUILTIN_TAXONOMY).expect("builtin taxonomy is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, TaxonomyError> {
        let file: TaxonomyFile = toml::from_str(text)?;
        let pairs = file.category.into_iter().map(|e| (e.name, e.parent));
        Self::from_pairs(pairs)
    }

    /// Builds the forest from `(name, parent)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, Option<String>)>) -> Result<Self, TaxonomyError> {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let mut index = HashMap::new();
        let mut nodes = Vec::with_capacity(pairs.len());
        for (name, _) in &pairs {
            if index.insert(name.clone(), nodes.len()).is_some() {
                return Err(TaxonomyError::DuplicateCategory(name.clone()));
            }
            nodes.push(Category { name: name.clone(), parent: None, children: Vec::new() });
        }
        for (i, (_, parent)) in pairs.iter().enumerate() {
            if let Some(p) = parent {
                let pi = *index.get(p).ok_or_else(|| TaxonomyError::UnknownCategory(p.clone()))?;
                nodes[i].parent = Some(pi);
                nodes[pi].children.push(i);
            }
        }
        let mut chains = Vec::with_capacity(nodes.len());
        for i in 0..nodes.len() {
            let mut chain = vec![i];
            let mut cur = nodes[i].parent;
            while let Some(p) = cur {
                if chain.contains(&p) {
                    return Err(TaxonomyError::Cycle(nodes[i].name.clone()));
                }
                chain.push(p);
                cur = nodes[p].parent;
            }
            chains.push(chain);
        }
        Ok(Taxonomy { nodes, index, chains })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.name.as_str())
    }

    pub fn node(&self, name: &str) -> Result<&Category, TaxonomyError> {
        Ok(&self.nodes[self.id(name)?])
    }

    fn id(&self, name: &str) -> Result<usize, TaxonomyError> {
        self.index.get(name).copied().ok_or_else(|| TaxonomyError::UnknownCategory(name.to_string()))
    }

    pub fn parent(&self, name: &str) -> Result<Option<&str>, TaxonomyError> {
        let node = self.node(name)?;
        Ok(node.parent.map(|p| self.nodes[p].name.as_str()))
    }

    pub fn children(&self, name: &str) -> Result<Vec<&str>, TaxonomyError> {
        let node = self.node(name)?;
        Ok(node.children.iter().map(|&c| self.nodes[c].name.as_str()).collect())
    }

    pub fn is_leaf(&self, name: &str) -> Result<bool, TaxonomyError> {
        Ok(self.node(name)?.children.is_empty())
    }

    /// Strict ancestors, immediate parent first.
    pub fn ancestors(&self, name: &str) -> Result<Vec<&str>, TaxonomyError> {
        Ok(self.chain(name)?.into_iter().skip(1).collect())
    }

    /// The category followed by its ancestors: the full category set of an
    /// object of this category.
    pub fn chain(&self, name: &str) -> Result<Vec<&str>, TaxonomyError> {
        let id = self.id(name)?;
        Ok(self.chains[id].iter().map(|&i| self.nodes[i].name.as_str()).collect())
    }

    /// True iff `specific` equals `general` or has it as an ancestor.
    /// Unknown names are never related.
    pub fn is_a(&self, specific: &str, general: &str) -> bool {
        match (self.index.get(specific), self.index.get(general)) {
            (Some(&s), Some(&g)) => self.chains[s].contains(&g),
            _ => false,
        }
    }

    /// Whether every atomic property of `general` is matched by `specific`.
    pub fn entails(&self, specific: &Props, general: &Props) -> bool {
        if let Some(c) = general.color() {
            if specific.color() != Some(c) {
                return false;
            }
        }
        if let Some(m) = general.material() {
            if specific.material() != Some(m) {
                return false;
            }
        }
        if let Some(g) = general.category() {
            match specific.category() {
                Some(s) if self.is_a(s, g) => {}
                _ => return false,
            }
        }
        true
    }

    /// Entailment over general property sets. Identifier sets are resolved
    /// to the object's full description through `describe`.
    pub fn entails_set(
        &self,
        specific: &PropertySet,
        general: &PropertySet,
        describe: impl Fn(&ObjectId) -> Option<Props>,
    ) -> bool {
        match (specific, general) {
            (PropertySet::Props(s), PropertySet::Props(g)) => self.entails(s, g),
            (PropertySet::Object(id), PropertySet::Props(g)) => describe(id).is_some_and(|d| self.entails(&d, g)),
            (PropertySet::Object(a), PropertySet::Object(b)) => a == b,
            (PropertySet::Props(_), PropertySet::Object(_)) => false,
        }
    }

    /// Every non-identifier property set satisfied by an object with the
    /// given full description, in canonical order.
    ///
    /// With a category chain of `L` categories this is `2 * 2 * (L + 1) - 1`
    /// sets.
    pub fn property_sets(&self, description: &Props) -> Result<Vec<Props>, TaxonomyError> {
        let (Some(color), Some(material), Some(category)) =
            (description.color(), description.material(), description.category())
        else {
            return Err(TaxonomyError::IncompleteDescription);
        };
        let chain = self.chain(category)?;
        let mut out = Vec::with_capacity(4 * (chain.len() + 1));
        for c in [None, Some(color)] {
            for m in [None, Some(material)] {
                for cat in std::iter::once(None).chain(chain.iter().map(|s| Some(s.to_string()))) {
                    if let Some(p) = Props::new(c, m, cat) {
                        out.push(p);
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Identifier set followed by [`Taxonomy::property_sets`].
    pub fn enumerate_property_sets(
        &self,
        id: &ObjectId,
        description: &Props,
    ) -> Result<Vec<PropertySet>, TaxonomyError> {
        let mut out = vec![PropertySet::Object(id.clone())];
        out.extend(self.property_sets(description)?.into_iter().map(PropertySet::Props));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tax() -> Taxonomy {
        Taxonomy::builtin()
    }

    #[test]
    fn ancestors_follow_table() {
        let t = tax();
        assert_eq!(t.ancestors("pizza").unwrap(), vec!["baked food", "food"]);
        assert_eq!(t.ancestors("table").unwrap(), vec!["furniture"]);
        assert!(t.ancestors("furniture").unwrap().is_empty());
        assert!(matches!(t.ancestors("spaceship"), Err(TaxonomyError::UnknownCategory(_))));
    }

    #[test]
    fn chain_depth_bounded() {
        let t = tax();
        let max = t.categories().map(|c| t.ancestors(c).unwrap().len()).max().unwrap();
        assert_eq!(max, 3);
        assert_eq!(t.ancestors("cotton cap").unwrap(), vec!["hat", "fashion accessory", "fashion item"]);
        assert_eq!(t.ancestors("laptop").unwrap(), vec!["computer", "office equipment", "office supply"]);
    }

    #[test]
    fn forest_invariants() {
        let t = tax();
        for c in t.categories() {
            let node = t.node(c).unwrap();
            for child in t.children(c).unwrap() {
                assert_eq!(t.parent(child).unwrap(), Some(c));
            }
            if let Some(p) = node.parent {
                assert!(t.nodes[p].children.iter().any(|&k| t.nodes[k].name == c));
            }
        }
    }

    #[test]
    fn rejects_cycles_and_duplicates() {
        let cyc =
            Taxonomy::from_pairs([("a".to_string(), Some("b".to_string())), ("b".to_string(), Some("a".to_string()))]);
        assert!(matches!(cyc, Err(TaxonomyError::Cycle(_))));
        let dup = Taxonomy::from_pairs([("a".to_string(), None), ("a".to_string(), None)]);
        assert!(matches!(dup, Err(TaxonomyError::DuplicateCategory(_))));
        let missing = Taxonomy::from_pairs([("a".to_string(), Some("zz".to_string()))]);
        assert!(matches!(missing, Err(TaxonomyError::UnknownCategory(_))));
    }

    #[test]
    fn entailment_examples() {
        let t = tax();
        let white_nightstand = Props::of_color(Color::White).with_category("nightstand");
        let white_furniture = Props::of_color(Color::White).with_category("furniture");
        assert!(t.entails(&white_nightstand, &white_furniture));
        assert!(!t.entails(&white_furniture, &white_nightstand));
        let white = Props::of_color(Color::White);
        assert!(t.entails(&white, &white));
        let wooden_table = Props::of_material(Material::Wooden).with_category("table");
        assert!(!t.entails(&wooden_table, &white));
    }

    #[test]
    fn identifier_entailment_uses_description() {
        let t = tax();
        let id = ObjectId::new("o1");
        let desc = Props::describe(Color::White, Material::Wooden, "nightstand");
        let describe = |_: &ObjectId| Some(desc.clone());
        let ident = PropertySet::Object(id.clone());
        let general = PropertySet::Props(Props::of_category("furniture"));
        assert!(t.entails_set(&ident, &general, describe));
        assert!(!t.entails_set(&general, &ident, describe));
        assert!(t.entails_set(&ident, &ident, describe));
    }

    #[test]
    fn enumeration_counts() {
        let t = tax();
        let nightstand = Props::describe(Color::White, Material::Wooden, "nightstand");
        let sets = t.property_sets(&nightstand).unwrap();
        assert_eq!(sets.len(), 11);
        assert!(sets.contains(&Props::of_color(Color::White).with_category("nightstand")));
        assert!(sets.contains(&Props::of_material(Material::Wooden).with_category("furniture")));
        assert!(sets.contains(&Props::of_color(Color::White)));

        let apple = Props::describe(Color::Red, Material::Plastic, "apple");
        assert_eq!(t.property_sets(&apple).unwrap().len(), 15);

        let id = ObjectId::new("o7");
        let all = t.enumerate_property_sets(&id, &apple).unwrap();
        assert_eq!(all.len(), 16);
        assert!(all.contains(&PropertySet::Object(id)));
    }
}
