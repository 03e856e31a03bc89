use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TaxonomyError;

macro_rules! vocabulary {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "lowercase")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = TaxonomyError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(TaxonomyError::UnknownValue {
                        kind: stringify!($name),
                        value: other.to_string(),
                    }),
                }
            }
        }
    };
}

vocabulary! {
    /// Closed color vocabulary.
    Color {
        White => "white",
        Black => "black",
        Brown => "brown",
        Gray => "gray",
        Red => "red",
        Green => "green",
        Blue => "blue",
        Yellow => "yellow",
    }
}

vocabulary! {
    /// Closed material vocabulary.
    Material {
        Wooden => "wooden",
        Metal => "metal",
        Plastic => "plastic",
        Glass => "glass",
        Ceramic => "ceramic",
        Fabric => "fabric",
        Leather => "leather",
        Rubber => "rubber",
    }
}

/// Identifier of an object within one scene.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(String);

impl ObjectId {
    pub fn new(id: impl Into<String>) -> Self {
        ObjectId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One atomic property of an object.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum AtomicProperty {
    Color(Color),
    Material(Material),
    Category(String),
}

/// A non-empty combination of at most one color, one material and one
/// category.
///
/// The derived ordering compares color, then material, then category, which
/// is the canonical order used for tie-breaking and stable output.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PropsRepr", into = "PropsRepr")]
pub struct Props {
    color: Option<Color>,
    material: Option<Material>,
    category: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct PropsRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    color: Option<Color>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    material: Option<Material>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    category: Option<String>,
}

impl TryFrom<PropsRepr> for Props {
    type Error = TaxonomyError;

    fn try_from(r: PropsRepr) -> Result<Self, Self::Error> {
        Props::new(r.color, r.material, r.category).ok_or(TaxonomyError::EmptyPropertySet)
    }
}

impl From<Props> for PropsRepr {
    fn from(p: Props) -> Self {
        PropsRepr { color: p.color, material: p.material, category: p.category }
    }
}

impl Props {
    /// Returns `None` when every component is absent.
    pub fn new(color: Option<Color>, material: Option<Material>, category: Option<String>) -> Option<Self> {
        if color.is_none() && material.is_none() && category.is_none() {
            return None;
        }
        Some(Props { color, material, category })
    }

    pub fn of_color(color: Color) -> Self {
        Props { color: Some(color), material: None, category: None }
    }

    pub fn of_material(material: Material) -> Self {
        Props { color: None, material: Some(material), category: None }
    }

    pub fn of_category(category: impl Into<String>) -> Self {
        Props { color: None, material: None, category: Some(category.into()) }
    }

    /// Full description of a concrete object.
    pub fn describe(color: Color, material: Material, category: impl Into<String>) -> Self {
        Props { color: Some(color), material: Some(material), category: Some(category.into()) }
    }

    pub fn with_color(mut self, color: Color) -> Self {
        self.color = Some(color);
        self
    }

    pub fn with_material(mut self, material: Material) -> Self {
        self.material = Some(material);
        self
    }

    pub fn with_category(mut self, category: impl Into<String>) -> Self {
        self.category = Some(category.into());
        self
    }

    pub fn color(&self) -> Option<Color> {
        self.color
    }

    pub fn material(&self) -> Option<Material> {
        self.material
    }

    pub fn category(&self) -> Option<&str> {
        self.category.as_deref()
    }

    /// Number of atomic properties.
    pub fn len(&self) -> usize {
        self.color.is_some() as usize + self.material.is_some() as usize + self.category.is_some() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn atoms(&self) -> Vec<AtomicProperty> {
        let mut out = Vec::with_capacity(3);
        if let Some(c) = self.color {
            out.push(AtomicProperty::Color(c));
        }
        if let Some(m) = self.material {
            out.push(AtomicProperty::Material(m));
        }
        if let Some(c) = &self.category {
            out.push(AtomicProperty::Category(c.clone()));
        }
        out
    }

    /// Set union; `None` when both sides carry different values of the same
    /// kind, since a property set holds at most one value per kind.
    pub fn union(&self, other: &Props) -> Option<Props> {
        fn merge<T: PartialEq + Clone>(a: &Option<T>, b: &Option<T>) -> Result<Option<T>, ()> {
            match (a, b) {
                (Some(x), Some(y)) if x != y => Err(()),
                (Some(x), _) => Ok(Some(x.clone())),
                (None, y) => Ok(y.clone()),
            }
        }
        Some(Props {
            color: merge(&self.color, &other.color).ok()?,
            material: merge(&self.material, &other.material).ok()?,
            category: merge(&self.category, &other.category).ok()?,
        })
    }
}

impl fmt::Display for Props {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> =
            [self.color.map(Color::as_str), self.material.map(Material::as_str), self.category.as_deref()]
                .into_iter()
                .flatten()
                .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Either a concrete object identifier or a combination of properties.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertySet {
    Object(ObjectId),
    Props(Props),
}

impl PropertySet {
    pub fn as_props(&self) -> Option<&Props> {
        match self {
            PropertySet::Props(p) => Some(p),
            PropertySet::Object(_) => None,
        }
    }

    pub fn is_identifier(&self) -> bool {
        matches!(self, PropertySet::Object(_))
    }
}

impl From<Props> for PropertySet {
    fn from(p: Props) -> Self {
        PropertySet::Props(p)
    }
}

impl fmt::Display for PropertySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertySet::Object(id) => write!(f, "{{{id}}}"),
            PropertySet::Props(p) => p.fmt(f),
        }
    }
}
