//! Deterministic encoding of job records into fixed-width numeric vectors.
//!
//! Categorical tokens get ordinal indices learned from training data only;
//! index 0 is reserved for tokens never seen at schema-build time, so new
//! job/hardware combinations still encode.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::{Dataset, JobRecord};
use crate::error::{Error, Result};

/// Categorical fields, in encoding order.
const CATEGORICAL_FIELDS: [&str; 5] = [
    "firmware",
    "current_version",
    "target_version",
    "server_type",
    "region",
];

/// Numeric fields, in encoding order (after the categorical block).
const NUMERIC_FIELDS: [&str; 7] = [
    "num_cores",
    "ram_gb",
    "disk_gb",
    "flash_gb",
    "days_since_last_maintenance",
    "priority",
    "version_gap",
];

/// Token-to-index vocabulary for one categorical field.
///
/// Indices are contiguous from 1 in order of first appearance; 0 is the
/// reserved unseen-token index and is never assigned here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    map: BTreeMap<String, usize>,
}

impl Vocabulary {
    fn index_of(&self, token: &str) -> usize {
        self.map.get(token).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Encoding dictionary learned from a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    categorical_maps: BTreeMap<String, Vocabulary>,
    numeric_fields: Vec<String>,
    version: u64,
}

impl FeatureSchema {
    pub fn width(&self) -> usize {
        CATEGORICAL_FIELDS.len() + NUMERIC_FIELDS.len()
    }

    /// Fingerprint of the vocabulary maps; changes whenever the learned
    /// token universe changes.
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn vocabulary(&self, field: &str) -> Option<&Vocabulary> {
        self.categorical_maps.get(field)
    }

    pub fn feature_names(&self) -> Vec<&'static str> {
        CATEGORICAL_FIELDS.iter().chain(NUMERIC_FIELDS.iter()).copied().collect()
    }
}

/// Fixed-width numeric representation of one job record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: Vec<f64>,
    schema_version: u64,
}

impl FeatureVector {
    /// Wraps raw values without a producing schema (tests, synthetic fits).
    pub fn from_raw(values: Vec<f64>) -> FeatureVector {
        FeatureVector { values, schema_version: 0 }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn schema_version(&self) -> u64 {
        self.schema_version
    }
}

/// Learns the categorical vocabularies from training data.
///
/// Index assignment is by first appearance in visit-time order, starting
/// at 1.
pub fn build_schema(train: &Dataset) -> Result<FeatureSchema> {
    if train.is_empty() {
        return Err(Error::EmptyInput("training set"));
    }

    let mut maps: BTreeMap<String, BTreeMap<String, usize>> = CATEGORICAL_FIELDS
        .iter()
        .map(|f| (f.to_string(), BTreeMap::new()))
        .collect();

    for record in train.records() {
        for (field, token) in categorical_tokens(record) {
            let map = maps.get_mut(field).expect("known field");
            if !map.contains_key(token) {
                let next = map.len() + 1;
                map.insert(token.to_string(), next);
            }
        }
    }

    let categorical_maps: BTreeMap<String, Vocabulary> = maps
        .into_iter()
        .map(|(field, map)| (field, Vocabulary { map }))
        .collect();
    let version = fingerprint(&categorical_maps)?;

    Ok(FeatureSchema {
        categorical_maps,
        numeric_fields: NUMERIC_FIELDS.iter().map(|s| s.to_string()).collect(),
        version,
    })
}

/// Encodes a record against a schema. Unseen categorical tokens map to 0;
/// numeric fields pass through unchanged.
pub fn encode(record: &JobRecord, schema: &FeatureSchema) -> Result<FeatureVector> {
    let mut values = Vec::with_capacity(schema.width());
    for (field, token) in categorical_tokens(record) {
        let vocab = schema
            .categorical_maps
            .get(field)
            .ok_or_else(|| Error::InvalidRecord(format!("schema missing field {field}")))?;
        values.push(vocab.index_of(token) as f64);
    }
    for value in numeric_values(record) {
        if !value.is_finite() {
            return Err(Error::InvalidRecord(format!(
                "job {}: non-finite numeric feature",
                record.job_id
            )));
        }
        values.push(value);
    }
    Ok(FeatureVector { values, schema_version: schema.version })
}

/// Encodes a batch of records.
pub fn encode_all(records: &[&JobRecord], schema: &FeatureSchema) -> Result<Vec<FeatureVector>> {
    records.iter().map(|r| encode(r, schema)).collect()
}

fn categorical_tokens(record: &JobRecord) -> [(&'static str, &str); 5] {
    [
        ("firmware", record.firmware.as_str()),
        ("current_version", record.current_version.as_str()),
        ("target_version", record.target_version.as_str()),
        ("server_type", record.hardware.server_type.as_str()),
        ("region", record.hardware.region.as_str()),
    ]
}

fn numeric_values(record: &JobRecord) -> [f64; 7] {
    [
        record.hardware.num_cores as f64,
        record.hardware.ram_gb,
        record.hardware.disk_gb,
        record.hardware.flash_gb,
        record.hardware.days_since_last_maintenance,
        record.priority as f64,
        version_gap(&record.current_version, &record.target_version),
    ]
}

/// Numeric distance between version tokens, parsed from trailing digits.
/// Falls back to 0 when either token has no numeric suffix.
fn version_gap(current: &str, target: &str) -> f64 {
    match (trailing_number(current), trailing_number(target)) {
        (Some(c), Some(t)) => (t - c) as f64,
        _ => 0.0,
    }
}

fn trailing_number(token: &str) -> Option<i64> {
    let digits: String = token
        .chars()
        .rev()
        .take_while(|c| c.is_ascii_digit())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    digits.parse().ok()
}

fn fingerprint(maps: &BTreeMap<String, Vocabulary>) -> Result<u64> {
    let canonical = serde_json::to_vec(maps)?;
    let digest = Sha256::digest(&canonical);
    Ok(u64::from_be_bytes(digest[..8].try_into().expect("8 bytes")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::test_support::record;
    use crate::domain::FirmwareType;

    fn tiny_train() -> Dataset {
        let mut a = record("a", 1.0);
        a.firmware = FirmwareType::Bios;
        let mut b = record("b", 2.0);
        b.firmware = FirmwareType::Nic;
        b.hardware.region = "eu-west".to_string();
        Dataset::new(vec![a, b]).unwrap()
    }

    #[test]
    fn vocabulary_indices_start_at_one_in_appearance_order() {
        let schema = build_schema(&tiny_train()).unwrap();
        let fw = schema.vocabulary("firmware").unwrap();
        assert_eq!(fw.index_of("BIOS"), 1);
        assert_eq!(fw.index_of("NIC"), 2);
        assert_eq!(fw.index_of("CPLD"), 0, "unseen token gets the reserved index");
    }

    #[test]
    fn schema_build_is_reproducible() {
        let a = build_schema(&tiny_train()).unwrap();
        let b = build_schema(&tiny_train()).unwrap();
        assert_eq!(a.version(), b.version());
        assert_eq!(a, b);
    }

    #[test]
    fn empty_train_is_rejected() {
        let empty = Dataset::new(vec![]).unwrap();
        assert!(matches!(build_schema(&empty), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn unseen_region_encodes_to_zero_slot() {
        let schema = build_schema(&tiny_train()).unwrap();
        let mut r = record("c", 3.0);
        r.hardware.region = "apac-1".to_string();
        let v = encode(&r, &schema).unwrap();
        assert_eq!(v.len(), schema.width());
        // Region is the fifth categorical slot.
        assert_eq!(v.values()[4], 0.0);
        // All other categorical slots found their token.
        assert!(v.values()[..4].iter().all(|&x| x >= 1.0));
    }

    #[test]
    fn encode_is_deterministic() {
        let schema = build_schema(&tiny_train()).unwrap();
        let r = record("c", 3.0);
        assert_eq!(encode(&r, &schema).unwrap(), encode(&r, &schema).unwrap());
    }

    #[test]
    fn full_train_set_encodes_without_unseen_tokens() {
        let train = tiny_train();
        let schema = build_schema(&train).unwrap();
        let n_cat = CATEGORICAL_FIELDS.len();
        let zeros: usize = train
            .records()
            .iter()
            .map(|r| {
                let v = encode(r, &schema).unwrap();
                v.values()[..n_cat].iter().filter(|&&x| x == 0.0).count()
            })
            .sum();
        assert_eq!(zeros, 0);
    }

    #[test]
    fn non_finite_numeric_field_is_rejected() {
        let schema = build_schema(&tiny_train()).unwrap();
        let mut r = record("c", 3.0);
        r.hardware.ram_gb = f64::NAN;
        assert!(matches!(encode(&r, &schema), Err(Error::InvalidRecord(_))));
    }

    #[test]
    fn version_gap_parses_trailing_digits() {
        assert_eq!(version_gap("v3", "v5"), 2.0);
        assert_eq!(version_gap("fw-12", "fw-13"), 1.0);
        assert_eq!(version_gap("alpha", "beta"), 0.0);
    }
}
