//! Per-location tallies of (predicted) categories, written as GeoJSON points.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::categories::CategorySet;
use crate::corpus::Document;
use crate::error::{DataError, DataResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeoMode {
    /// Group by the geotag's location name.
    Named,
    /// Group into `cell_deg`-sized latitude/longitude cells.
    Grid { cell_deg: f64 },
    /// Named when at least 90% of geotagged documents carry a location
    /// name, otherwise a grid of the given size.
    Auto { cell_deg: f64 },
}

pub const DEFAULT_CELL_DEG: f64 = 0.5;

impl Default for GeoMode {
    fn default() -> Self {
        GeoMode::Auto { cell_deg: DEFAULT_CELL_DEG }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeoAggregate {
    pub key: String,
    pub lat: f64,
    pub lon: f64,
    pub counts: Vec<u64>,
    pub total: u64,
    pub dominant_class: usize,
    pub dominant_share: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeoSummary {
    pub categories: CategorySet,
    /// Sorted by key.
    pub aggregates: Vec<GeoAggregate>,
    /// Documents that could not be placed (no geotag, or no name in named mode).
    pub skipped: usize,
}

struct Bucket {
    lats: Vec<f64>,
    lons: Vec<f64>,
    counts: Vec<u64>,
    centroid: Option<(f64, f64)>,
}

// order-independent mean
fn stable_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn aggregate_by_location(docs: &[Document], categories: &CategorySet, mode: GeoMode) -> DataResult<GeoSummary> {
    let mode = match mode {
        GeoMode::Auto { cell_deg } => {
            let tagged: Vec<_> = docs.iter().filter_map(|d| d.geotag.as_ref()).collect();
            let named = tagged.iter().filter(|g| g.location.is_some()).count();
            if !tagged.is_empty() && named as f64 >= 0.9 * tagged.len() as f64 {
                GeoMode::Named
            } else {
                GeoMode::Grid { cell_deg }
            }
        }
        other => other,
    };
    if let GeoMode::Grid { cell_deg } = mode {
        if !(cell_deg > 0.0 && cell_deg.is_finite()) {
            return Err(DataError::Invalid(format!("grid cell size must be positive, got {cell_deg}")));
        }
    }
    let mut buckets: HashMap<String, Bucket> = HashMap::new();
    let mut skipped = 0;
    for doc in docs {
        let label = doc.label.as_deref().ok_or_else(|| DataError::Document {
            id: doc.id.clone(),
            message: "document has no (predicted) label".into(),
        })?;
        let class = categories.require(label)?;
        let Some(geo) = &doc.geotag else {
            skipped += 1;
            continue;
        };
        let (key, centroid) = match mode {
            GeoMode::Named => match &geo.location {
                Some(name) => (name.clone(), None),
                None => {
                    skipped += 1;
                    continue;
                }
            },
            GeoMode::Grid { cell_deg } => {
                let i = (geo.lat / cell_deg).floor() as i64;
                let j = (geo.lon / cell_deg).floor() as i64;
                let lat = ((i as f64 + 0.5) * cell_deg).clamp(-90.0, 90.0);
                let lon = ((j as f64 + 0.5) * cell_deg).clamp(-180.0, 180.0);
                (format!("cell_{i}_{j}"), Some((lat, lon)))
            }
            GeoMode::Auto { .. } => unreachable!("resolved above"),
        };
        let bucket = buckets.entry(key).or_insert_with(|| Bucket {
            lats: Vec::new(),
            lons: Vec::new(),
            counts: vec![0; categories.len()],
            centroid,
        });
        bucket.lats.push(geo.lat);
        bucket.lons.push(geo.lon);
        bucket.counts[class] += 1;
    }
    if buckets.is_empty() {
        return Err(DataError::Empty("no geotagged documents to aggregate".into()));
    }
    let mut aggregates: Vec<GeoAggregate> = buckets
        .into_iter()
        .map(|(key, mut b)| {
            let (lat, lon) = b.centroid.unwrap_or_else(|| (stable_mean(&mut b.lats), stable_mean(&mut b.lons)));
            let total: u64 = b.counts.iter().sum();
            let mut dominant = 0;
            for (c, &n) in b.counts.iter().enumerate() {
                if n > b.counts[dominant] {
                    dominant = c;
                }
            }
            GeoAggregate {
                key,
                lat,
                lon,
                dominant_share: b.counts[dominant] as f64 / total as f64,
                counts: b.counts,
                total,
                dominant_class: dominant,
            }
        })
        .collect();
    aggregates.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(GeoSummary { categories: categories.clone(), aggregates, skipped })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureCollection {
    #[serde(rename = "type")]
    pub kind: String,
    pub features: Vec<Feature>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Feature {
    #[serde(rename = "type")]
    pub kind: String,
    pub geometry: Point,
    pub properties: FeatureProperties,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point {
    #[serde(rename = "type")]
    pub kind: String,
    /// `[longitude, latitude]`.
    pub coordinates: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureProperties {
    pub key: String,
    pub total: u64,
    pub counts: BTreeMap<String, u64>,
    pub dominant_class: String,
    pub dominant_share: f64,
}

impl GeoSummary {
    pub fn to_feature_collection(&self) -> FeatureCollection {
        let features = self
            .aggregates
            .iter()
            .map(|a| Feature {
                kind: "Feature".into(),
                geometry: Point { kind: "Point".into(), coordinates: [a.lon, a.lat] },
                properties: FeatureProperties {
                    key: a.key.clone(),
                    total: a.total,
                    counts: self.categories.names().iter().cloned().zip(a.counts.iter().copied()).collect(),
                    dominant_class: self.categories.name(a.dominant_class).to_string(),
                    dominant_share: a.dominant_share,
                },
            })
            .collect();
        FeatureCollection { kind: "FeatureCollection".into(), features }
    }
}

impl FeatureCollection {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("geojson serializes");
        s.push('\n');
        s
    }

    /// Checks the structural rules this writer guarantees: type tags,
    /// coordinate ranges in lon-lat order, and consistent properties.
    pub fn validate(&self, categories: &CategorySet) -> DataResult<()> {
        let bad = |m: String| Err(DataError::Invalid(m));
        if self.kind != "FeatureCollection" {
            return bad(format!("top-level type `{}`", self.kind));
        }
        for f in &self.features {
            let p = &f.properties;
            if f.kind != "Feature" || f.geometry.kind != "Point" {
                return bad(format!("feature `{}` is not a Point feature", p.key));
            }
            let [lon, lat] = f.geometry.coordinates;
            if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
                return bad(format!("feature `{}` has coordinates out of range", p.key));
            }
            if p.counts.len() != categories.len() || categories.names().iter().any(|n| !p.counts.contains_key(n)) {
                return bad(format!("feature `{}` does not list every category", p.key));
            }
            if p.counts.values().sum::<u64>() != p.total || p.total == 0 {
                return bad(format!("feature `{}` counts do not sum to total", p.key));
            }
            let top = p.counts.get(&p.dominant_class).copied();
            if top != p.counts.values().max().copied() {
                return bad(format!("feature `{}` dominant class is not the maximum", p.key));
            }
            if !(p.dominant_share > 0.0 && p.dominant_share <= 1.0) {
                return bad(format!("feature `{}` dominant share out of range", p.key));
            }
        }
        if self.features.windows(2).any(|w| w[0].properties.key >= w[1].properties.key) {
            return bad("features are not sorted by unique key".into());
        }
        Ok(())
    }
}

pub fn parse_geojson(text: &str) -> DataResult<FeatureCollection> {
    Ok(serde_json::from_str(text)?)
}

pub fn emit_geojson(summary: &GeoSummary, path: impl AsRef<Path>) -> DataResult<()> {
    let path = path.as_ref();
    std::fs::write(path, summary.to_feature_collection().to_json()).map_err(|e| DataError::io(path, e))
}
