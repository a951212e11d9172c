//! Directory-backed plan store: one `<id>.plan` file per record.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use acetab_core::plan_format::{self, PlanParseError};
use acetab_core::{ImplantCatalog, PlanError, PlanRecord};
use thiserror::Error;

const EXTENSION: &str = "plan";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error(transparent)]
    Consistency(#[from] PlanError),
    #[error("plan {0:?} not found")]
    NotFound(String),
    #[error("plan {0:?} already exists")]
    AlreadyExists(String),
    #[error("{0:?} is not a valid plan id")]
    InvalidId(String),
    #[error("plan {id:?}: {error}")]
    Parse { id: String, error: PlanParseError },
    #[error("plan store: {0}")]
    Io(#[from] io::Error),
}

pub struct PlanStore {
    root: PathBuf,
    writes: Mutex<()>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_'))
}

/// File-name-safe form of a patient id.
fn slug(patient_id: &str) -> String {
    let s: String = patient_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '-') { c } else { '_' })
        .collect();
    let s = s.trim_start_matches('.');
    if s.is_empty() {
        "plan".to_string()
    } else {
        s.to_string()
    }
}

impl PlanStore {
    pub fn open(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(PlanStore {
            root,
            writes: Mutex::new(()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_of(&self, id: &str) -> Result<PathBuf, StoreError> {
        if !valid_id(id) {
            return Err(StoreError::InvalidId(id.to_string()));
        }
        Ok(self.root.join(format!("{id}.{EXTENSION}")))
    }

    /// Saves under a fresh id made of the patient id and the save time.
    pub fn save(&self, record: &PlanRecord, catalog: &ImplantCatalog) -> Result<String, StoreError> {
        record.verify(catalog)?;
        let millis = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);
        let base = format!("{}-{millis}", slug(&record.patient_id));
        let _guard = self.writes.lock().unwrap_or_else(|e| e.into_inner());
        let mut id = base.clone();
        let mut n = 1;
        while self.path_of(&id)?.exists() {
            id = format!("{base}-{n}");
            n += 1;
        }
        self.write(&id, record)?;
        Ok(id)
    }

    /// Saves under `id`; replacing an existing plan requires `overwrite`.
    pub fn save_as(
        &self,
        id: &str,
        record: &PlanRecord,
        catalog: &ImplantCatalog,
        overwrite: bool,
    ) -> Result<(), StoreError> {
        record.verify(catalog)?;
        let path = self.path_of(id)?;
        let _guard = self.writes.lock().unwrap_or_else(|e| e.into_inner());
        if !overwrite && path.exists() {
            return Err(StoreError::AlreadyExists(id.to_string()));
        }
        self.write(id, record)
    }

    fn write(&self, id: &str, record: &PlanRecord) -> Result<(), StoreError> {
        let path = self.path_of(id)?;
        let tmp = self.root.join(format!(".{id}.tmp"));
        let mut file = fs::File::create(&tmp)?;
        file.write_all(plan_format::to_text(record).as_bytes())?;
        file.sync_all()?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn load(&self, id: &str) -> Result<PlanRecord, StoreError> {
        let text = self.load_text(id)?;
        plan_format::parse(&text).map_err(|error| StoreError::Parse {
            id: id.to_string(),
            error,
        })
    }

    /// Raw file contents of a stored plan.
    pub fn load_text(&self, id: &str) -> Result<String, StoreError> {
        let path = self.path_of(id)?;
        match fs::read_to_string(&path) {
            Ok(text) => Ok(text),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(StoreError::NotFound(id.to_string())),
            Err(e) => Err(e.into()),
        }
    }
}
