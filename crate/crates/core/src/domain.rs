//! Core data types shared by every other module, plus dataset time-splitting.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type JobId = String;
pub type ServerId = String;

/// The six firmware families that make up the workload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FirmwareType {
    Cpld,
    Flash,
    Bic,
    Bios,
    Nic,
    OpenBmc,
}

impl FirmwareType {
    pub const ALL: [FirmwareType; 6] = [
        FirmwareType::Cpld,
        FirmwareType::Flash,
        FirmwareType::Bic,
        FirmwareType::Bios,
        FirmwareType::Nic,
        FirmwareType::OpenBmc,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FirmwareType::Cpld => "CPLD",
            FirmwareType::Flash => "FLASH",
            FirmwareType::Bic => "BIC",
            FirmwareType::Bios => "BIOS",
            FirmwareType::Nic => "NIC",
            FirmwareType::OpenBmc => "OPENBMC",
        }
    }
}

impl fmt::Display for FirmwareType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FirmwareType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "CPLD" => Ok(FirmwareType::Cpld),
            "FLASH" => Ok(FirmwareType::Flash),
            "BIC" => Ok(FirmwareType::Bic),
            "BIOS" => Ok(FirmwareType::Bios),
            "NIC" => Ok(FirmwareType::Nic),
            "OPENBMC" => Ok(FirmwareType::OpenBmc),
            other => Err(Error::InvalidRecord(format!("unknown firmware `{other}`"))),
        }
    }
}

/// Static description of the server a job runs on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareDescriptor {
    pub server_type: String,
    pub num_cores: u32,
    pub ram_gb: f64,
    pub disk_gb: f64,
    pub flash_gb: f64,
    pub region: String,
    pub days_since_last_maintenance: f64,
}

impl HardwareDescriptor {
    fn validate(&self) -> Result<()> {
        let numeric = [
            self.ram_gb,
            self.disk_gb,
            self.flash_gb,
            self.days_since_last_maintenance,
        ];
        if numeric.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRecord(
                "non-finite hardware field".to_string(),
            ));
        }
        if self.num_cores == 0 || self.ram_gb <= 0.0 || self.disk_gb <= 0.0 {
            return Err(Error::InvalidRecord(
                "non-positive hardware dimension".to_string(),
            ));
        }
        if self.flash_gb < 0.0 || self.days_since_last_maintenance < 0.0 {
            return Err(Error::InvalidRecord(
                "negative hardware field".to_string(),
            ));
        }
        Ok(())
    }
}

/// One maintenance job: what firmware moves from which version to which,
/// on what hardware, and how long it actually took.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub job_id: JobId,
    pub firmware: FirmwareType,
    pub current_version: String,
    pub target_version: String,
    pub hardware: HardwareDescriptor,
    pub priority: u32,
    pub true_duration: f64,
    /// Day-granularity timestamp of the maintenance visit.
    pub visit_time: f64,
    pub server_id: ServerId,
}

impl JobRecord {
    fn validate(&self) -> Result<()> {
        if !(self.true_duration.is_finite() && self.true_duration > 0.0) {
            return Err(Error::InvalidRecord(format!(
                "job {}: true_duration must be positive",
                self.job_id
            )));
        }
        if !(self.visit_time.is_finite() && self.visit_time >= 0.0) {
            return Err(Error::InvalidRecord(format!(
                "job {}: visit_time must be non-negative",
                self.job_id
            )));
        }
        self.hardware.validate()
    }
}

/// Immutable collection of job records, kept sorted by visit time.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<JobRecord>,
}

impl Dataset {
    /// Builds a dataset, validating records, rejecting duplicate job ids and
    /// (stably) sorting by visit time.
    pub fn new(mut records: Vec<JobRecord>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            r.validate()?;
            if !seen.insert(r.job_id.clone()) {
                return Err(Error::DuplicateJobId(r.job_id.clone()));
            }
        }
        records.sort_by(|a, b| a.visit_time.total_cmp(&b.visit_time));
        Ok(Dataset { records })
    }

    pub fn records(&self) -> &[JobRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn min_visit_time(&self) -> Option<f64> {
        self.records.first().map(|r| r.visit_time)
    }

    pub fn max_visit_time(&self) -> Option<f64> {
        self.records.last().map(|r| r.visit_time)
    }

    /// Records of a single firmware type, in visit-time order.
    pub fn of_firmware(&self, firmware: FirmwareType) -> Vec<&JobRecord> {
        self.records.iter().filter(|r| r.firmware == firmware).collect()
    }

    pub fn read_csv(path: &Path) -> Result<Dataset> {
        let mut reader = csv::Reader::from_path(path)?;
        let mut records = Vec::new();
        for row in reader.deserialize::<CsvRow>() {
            records.push(row?.into_record()?);
        }
        Dataset::new(records)
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.records {
            w.serialize(CsvRow::from_record(r))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Flat row layout of the dataset CSV interchange format.
#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    job_id: String,
    firmware: String,
    current_version: String,
    target_version: String,
    server_type: String,
    num_cores: u32,
    ram_gb: f64,
    disk_gb: f64,
    flash_gb: f64,
    region: String,
    days_since_last_maintenance: f64,
    priority: u32,
    true_duration: f64,
    visit_time: f64,
    server_id: String,
}

impl CsvRow {
    fn from_record(r: &JobRecord) -> CsvRow {
        CsvRow {
            job_id: r.job_id.clone(),
            firmware: r.firmware.to_string(),
            current_version: r.current_version.clone(),
            target_version: r.target_version.clone(),
            server_type: r.hardware.server_type.clone(),
            num_cores: r.hardware.num_cores,
            ram_gb: r.hardware.ram_gb,
            disk_gb: r.hardware.disk_gb,
            flash_gb: r.hardware.flash_gb,
            region: r.hardware.region.clone(),
            days_since_last_maintenance: r.hardware.days_since_last_maintenance,
            priority: r.priority,
            true_duration: r.true_duration,
            visit_time: r.visit_time,
            server_id: r.server_id.clone(),
        }
    }

    fn into_record(self) -> Result<JobRecord> {
        Ok(JobRecord {
            job_id: self.job_id,
            firmware: self.firmware.parse()?,
            current_version: self.current_version,
            target_version: self.target_version,
            hardware: HardwareDescriptor {
                server_type: self.server_type,
                num_cores: self.num_cores,
                ram_gb: self.ram_gb,
                disk_gb: self.disk_gb,
                flash_gb: self.flash_gb,
                region: self.region,
                days_since_last_maintenance: self.days_since_last_maintenance,
            },
            priority: self.priority,
            true_duration: self.true_duration,
            visit_time: self.visit_time,
            server_id: self.server_id,
        })
    }
}

/// Time-ordered train/validation/test partition of a dataset.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

impl DatasetSplit {
    /// Latest visit time the models were trained on (train or validation).
    pub fn trained_through(&self) -> f64 {
        self.train
            .max_visit_time()
            .into_iter()
            .chain(self.validation.max_visit_time())
            .fold(0.0, f64::max)
    }
}

/// Splits a dataset into a trailing-window test set and a seeded random
/// train/validation partition of the remainder.
///
/// Test membership is `visit_time > max_visit_time - test_window_days`; the
/// rest is shuffled with the given seed and cut at the rounded validation
/// fraction.
pub fn split_by_time(
    dataset: &Dataset,
    test_window_days: f64,
    validation_fraction: f64,
    seed: u64,
) -> Result<DatasetSplit> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    if !(test_window_days > 0.0 && test_window_days.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "test_window_days must be positive, got {test_window_days}"
        )));
    }
    if !(validation_fraction > 0.0 && validation_fraction < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "validation_fraction must be in (0,1), got {validation_fraction}"
        )));
    }

    let max_visit = dataset.max_visit_time().expect("non-empty");
    let cutoff = max_visit - test_window_days;
    let (test_records, rest): (Vec<JobRecord>, Vec<JobRecord>) = dataset
        .records
        .iter()
        .cloned()
        .partition(|r| r.visit_time > cutoff);

    if rest.is_empty() {
        return Err(Error::DegenerateSplit(format!(
            "test window of {test_window_days} days covers every record"
        )));
    }

    let n_validation = (validation_fraction * rest.len() as f64).round() as usize;
    let mut order: Vec<usize> = (0..rest.len()).collect();
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut validation = Vec::with_capacity(n_validation);
    let mut train = Vec::with_capacity(rest.len() - n_validation);
    for (slot, idx) in order.into_iter().enumerate() {
        if slot < n_validation {
            validation.push(rest[idx].clone());
        } else {
            train.push(rest[idx].clone());
        }
    }

    Ok(DatasetSplit {
        train: Dataset::new(train)?,
        validation: Dataset::new(validation)?,
        test: Dataset::new(test_records)?,
    })
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Minimal record for tests that do not care about hardware detail.
    pub(crate) fn record(job_id: &str, visit_time: f64) -> JobRecord {
        record_on(job_id, visit_time, &format!("srv-{job_id}"))
    }

    pub(crate) fn record_on(job_id: &str, visit_time: f64, server_id: &str) -> JobRecord {
        JobRecord {
            job_id: job_id.to_string(),
            firmware: FirmwareType::Bios,
            current_version: "v1".to_string(),
            target_version: "v2".to_string(),
            hardware: HardwareDescriptor {
                server_type: "gp-compute".to_string(),
                num_cores: 64,
                ram_gb: 256.0,
                disk_gb: 4000.0,
                flash_gb: 960.0,
                region: "na-east".to_string(),
                days_since_last_maintenance: 30.0,
            },
            priority: 0,
            true_duration: 100.0,
            visit_time,
            server_id: server_id.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::record;
    use super::*;

    fn day_range_dataset(days: std::ops::RangeInclusive<i32>) -> Dataset {
        let records = days
            .map(|d| record(&format!("job-{d:03}"), d as f64))
            .collect();
        Dataset::new(records).unwrap()
    }

    #[test]
    fn dataset_rejects_duplicate_ids() {
        let err = Dataset::new(vec![record("a", 1.0), record("a", 2.0)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateJobId(_)));
    }

    #[test]
    fn dataset_rejects_nonpositive_duration() {
        let mut r = record("a", 1.0);
        r.true_duration = 0.0;
        assert!(matches!(Dataset::new(vec![r]), Err(Error::InvalidRecord(_))));
    }

    #[test]
    fn dataset_sorts_by_visit_time() {
        let ds = Dataset::new(vec![record("b", 5.0), record("a", 1.0)]).unwrap();
        assert_eq!(ds.records()[0].job_id, "a");
        assert_eq!(ds.records()[1].job_id, "b");
    }

    #[test]
    fn split_last_seven_days_goes_to_test() {
        let ds = day_range_dataset(1..=30);
        let split = split_by_time(&ds, 7.0, 0.1, 0).unwrap();
        // Window is (23, 30]: days 24..=30.
        assert_eq!(split.test.len(), 7);
        assert!(split.test.records().iter().all(|r| r.visit_time > 23.0));
        assert_eq!(split.train.len() + split.validation.len(), 23);
    }

    #[test]
    fn split_empty_dataset_errors() {
        let ds = Dataset::new(vec![]).unwrap();
        assert!(matches!(
            split_by_time(&ds, 7.0, 0.1, 0),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn split_single_record_is_degenerate() {
        let ds = Dataset::new(vec![record("only", 3.0)]).unwrap();
        assert!(matches!(
            split_by_time(&ds, 7.0, 0.1, 0),
            Err(Error::DegenerateSplit(_))
        ));
    }

    #[test]
    fn split_hits_validation_fraction_exactly() {
        // 100 records outside the window plus a far-future record that
        // becomes the whole test set.
        let mut records: Vec<JobRecord> =
            (0..100).map(|i| record(&format!("j{i:03}"), i as f64)).collect();
        records.push(record("future", 400.0));
        let ds = Dataset::new(records).unwrap();
        let split = split_by_time(&ds, 7.0, 0.1, 42).unwrap();
        assert_eq!(split.test.len(), 1);
        assert_eq!(split.validation.len(), 10);
        assert_eq!(split.train.len(), 90);

        let mut ids: Vec<&str> = split
            .train
            .records()
            .iter()
            .chain(split.validation.records())
            .chain(split.test.records())
            .map(|r| r.job_id.as_str())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 101, "partition must be disjoint and complete");
    }

    #[test]
    fn split_is_deterministic_per_seed() {
        let ds = day_range_dataset(1..=60);
        let ids = |d: &Dataset| d.records().iter().map(|r| r.job_id.clone()).collect::<Vec<_>>();
        let a = split_by_time(&ds, 7.0, 0.1, 7).unwrap();
        let b = split_by_time(&ds, 7.0, 0.1, 7).unwrap();
        assert_eq!(ids(&a.train), ids(&b.train));
        assert_eq!(ids(&a.validation), ids(&b.validation));
        assert_eq!(ids(&a.test), ids(&b.test));
        let c = split_by_time(&ds, 7.0, 0.1, 8).unwrap();
        assert_ne!(ids(&a.train), ids(&c.train), "different seed, different shuffle");
    }

    #[test]
    fn split_test_strictly_after_train() {
        let ds = day_range_dataset(1..=45);
        let split = split_by_time(&ds, 10.0, 0.2, 3).unwrap();
        let max_pre = split.trained_through();
        let min_test = split.test.min_visit_time().unwrap();
        assert!(min_test > max_pre);
    }

    #[test]
    fn csv_round_trip_preserves_records() {
        let ds = day_range_dataset(1..=12);
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "job_id,firmware,current_version,target_version,server_type,num_cores,ram_gb,\
             disk_gb,flash_gb,region,days_since_last_maintenance,priority,true_duration,\
             visit_time,server_id"
        ));
        let dir = std::env::temp_dir().join("acela-domain-csv-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("round_trip.csv");
        std::fs::write(&path, &buf).unwrap();
        let back = Dataset::read_csv(&path).unwrap();
        assert_eq!(ds, back);
    }
}
