//! Worksheet storage: an in-memory table, optionally mirrored to one JSON
//! file per worksheet.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use stepcalc::worksheet::{load, save, SessionEvent, Worksheet};
use tokio::sync::{Mutex, RwLock};

pub(crate) struct Entry {
    pub worksheet: Worksheet,
    pub events: Vec<SessionEvent>,
}

/// Mutations of one worksheet are serialized by its entry lock; different
/// worksheets never contend.
pub struct Store {
    dir: Option<PathBuf>,
    entries: RwLock<BTreeMap<String, Arc<Mutex<Entry>>>>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl Store {
    pub fn in_memory() -> Self {
        Store {
            dir: None,
            entries: RwLock::new(BTreeMap::new()),
        }
    }

    /// Opens a storage directory, creating it if needed, and loads every
    /// `*.json` worksheet in it. Unreadable documents are reported, not
    /// skipped silently.
    pub async fn open(dir: impl AsRef<Path>) -> io::Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        tokio::fs::create_dir_all(&dir).await?;
        let mut entries = BTreeMap::new();
        let mut listing = tokio::fs::read_dir(&dir).await?;
        while let Some(item) = listing.next_entry().await? {
            let path = item.path();
            let Some(id) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(".json"))
            else {
                continue;
            };
            if !valid_id(id) {
                continue;
            }
            let text = tokio::fs::read_to_string(&path).await?;
            let worksheet = load(&text).map_err(|e| {
                io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display()))
            })?;
            let entry = Entry {
                worksheet,
                events: Vec::new(),
            };
            entries.insert(id.to_string(), Arc::new(Mutex::new(entry)));
        }
        Ok(Store {
            dir: Some(dir),
            entries: RwLock::new(entries),
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    async fn persist(&self, id: &str, w: &Worksheet) -> io::Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let tmp = dir.join(format!(".{id}.json.tmp"));
        tokio::fs::write(&tmp, save(w)).await?;
        tokio::fs::rename(&tmp, dir.join(format!("{id}.json"))).await
    }

    pub async fn insert(&self, w: Worksheet) -> io::Result<String> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        self.persist(&id, &w).await?;
        let entry = Entry {
            worksheet: w,
            events: Vec::new(),
        };
        self.entries
            .write()
            .await
            .insert(id.clone(), Arc::new(Mutex::new(entry)));
        Ok(id)
    }

    pub(crate) async fn entry(&self, id: &str) -> Option<Arc<Mutex<Entry>>> {
        self.entries.read().await.get(id).cloned()
    }

    pub async fn get(&self, id: &str) -> Option<Worksheet> {
        let entry = self.entry(id).await?;
        let guard = entry.lock().await;
        Some(guard.worksheet.clone())
    }

    pub async fn list(&self) -> Vec<(String, Worksheet)> {
        let entries: Vec<_> = self
            .entries
            .read()
            .await
            .iter()
            .map(|(id, e)| (id.clone(), e.clone()))
            .collect();
        let mut out = Vec::new();
        for (id, e) in entries {
            out.push((id, e.lock().await.worksheet.clone()));
        }
        out
    }

    /// Stores the result of a mutation made under the entry's lock. The
    /// file is written before the in-memory copy changes, so readers only
    /// ever see saved revisions.
    pub(crate) async fn commit(
        &self,
        id: &str,
        entry: &mut Entry,
        w: Worksheet,
        event: SessionEvent,
    ) -> io::Result<()> {
        if w != entry.worksheet {
            self.persist(id, &w).await?;
        }
        entry.worksheet = w;
        entry.events.push(event);
        Ok(())
    }
}
