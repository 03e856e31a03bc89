//! Bundles every piece of static data the generator reads.

use std::path::Path;

use thiserror::Error;

use crate::nlg::{Lexicon, NlgError};
use crate::scene::{PlacementGraph, SceneError};
use crate::taxonomy::{Catalog, Taxonomy, TaxonomyError};

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Nlg(#[from] NlgError),
}

/// Raw contents of the data files.
#[derive(Clone, Copy, Debug)]
pub struct WorldFiles<'a> {
    pub taxonomy: &'a str,
    pub placement: &'a str,
    pub catalog: &'a str,
    pub nouns: &'a str,
    pub templates: &'a str,
}

/// Taxonomy, placement relation, asset catalog and lexicon. Immutable once
/// built.
#[derive(Clone, Debug)]
pub struct World {
    pub taxonomy: Taxonomy,
    pub placement: PlacementGraph,
    pub catalog: Catalog,
    pub lexicon: Lexicon,
}

impl World {
    /// The data files shipped with the crate.
    pub fn builtin() -> Self {
        let taxonomy = Taxonomy::builtin();
        let placement = PlacementGraph::builtin(&taxonomy);
        let catalog = Catalog::builtin(&taxonomy);
        let lexicon = Lexicon::builtin(&taxonomy);
        World { taxonomy, placement, catalog, lexicon }
    }

    pub fn from_strs(files: &WorldFiles<'_>) -> Result<Self, WorldError> {
        let taxonomy = Taxonomy::from_toml(files.taxonomy)?;
        let placement = PlacementGraph::from_toml(files.placement, &taxonomy)?;
        let catalog = Catalog::from_toml(files.catalog, &taxonomy)?;
        let lexicon = Lexicon::from_toml(files.nouns, files.templates, &taxonomy)?;
        Ok(World { taxonomy, placement, catalog, lexicon })
    }

    /// Loads the five data files from `dir`, under the names the crate ships
    /// them with.
    pub fn from_dir(dir: &Path) -> Result<Self, WorldError> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| WorldError::Io { path: path.display().to_string(), source })
        };
        let (taxonomy, placement, catalog) = (read("taxonomy.toml")?, read("placement.toml")?, read("catalog.toml")?);
        let (nouns, templates) = (read("nouns.toml")?, read("templates.toml")?);
        Self::from_strs(&WorldFiles {
            taxonomy: &taxonomy,
            placement: &placement,
            catalog: &catalog,
            nouns: &nouns,
            templates: &templates,
        })
    }
}
