use serde::Deserialize;

use super::{Color, Material, Taxonomy, TaxonomyError};

/// A placeable model: leaf category, admissible attributes, bounding size.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct AssetSpec {
    pub name: String,
    pub category: String,
    #[serde(rename = "colors")]
    pub allowed_colors: Vec<Color>,
    #[serde(rename = "materials")]
    pub allowed_materials: Vec<Material>,
    /// `[width, depth, height]` in scene units.
    pub size: [f64; 3],
}

impl AssetSpec {
    pub fn footprint(&self) -> (f64, f64) {
        (self.size[0], self.size[1])
    }

    pub fn footprint_area(&self) -> f64 {
        self.size[0] * self.size[1]
    }
}

#[derive(Deserialize)]
struct CatalogFile {
    asset: Vec<AssetSpec>,
}

#[derive(Clone, Debug)]
pub struct Catalog {
    assets: Vec<AssetSpec>,
}

pub const BUILTIN_CATALOG: &str = include_str!("../../data/catalog.toml");

impl Catalog {
    pub fn builtin(taxonomy: &Taxonomy) -> Self {
        Self::from_toml(BUILTIN_CATALOG, taxonomy).expect("builtin catalog is valid")
    }

    pub fn from_toml(text: &str, taxonomy: &Taxonomy) -> Result<Self, TaxonomyError> {
        let file: CatalogFile = toml::from_str(text)?;
        Self::new(file.asset, taxonomy)
    }

    pub fn new(assets: Vec<AssetSpec>, taxonomy: &Taxonomy) -> Result<Self, TaxonomyError> {
        let mut names = std::collections::HashSet::new();
        for a in &assets {
            let bad = |reason: &str| TaxonomyError::InvalidAsset { asset: a.name.clone(), reason: reason.to_string() };
            if !names.insert(a.name.as_str()) {
                return Err(bad("duplicate asset name"));
            }
            if !taxonomy.is_leaf(&a.category)? {
                return Err(bad("category is not a leaf"));
            }
            if a.allowed_colors.is_empty() || a.allowed_materials.is_empty() {
                return Err(bad("empty color or material list"));
            }
            if a.size.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
                return Err(bad("size components must be positive"));
            }
        }
        Ok(Catalog { assets })
    }

    pub fn assets(&self) -> &[AssetSpec] {
        &self.assets
    }

    pub fn get(&self, name: &str) -> Option<&AssetSpec> {
        self.assets.iter().find(|a| a.name == name)
    }

    pub fn len(&self) -> usize {
        self.assets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assets.is_empty()
    }
}
