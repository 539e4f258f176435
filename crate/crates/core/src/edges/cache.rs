use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

/// Pair-score cache keyed by `(scorer id, pair content key)`.
///
/// On disk there is one append-only file per scorer, named after the
/// scorer id, with one `<pair key>\t<probability>` record per line.
/// Probabilities are written in shortest round-trip form so reloaded
/// values are bit-identical. Unparseable lines (e.g. a torn final write)
/// are skipped.
#[derive(Debug)]
pub struct PairCache {
    dir: Option<PathBuf>,
    scorers: Mutex<HashMap<String, ScorerEntries>>,
}

#[derive(Debug)]
struct ScorerEntries {
    scores: HashMap<String, f64>,
    file: Option<File>,
}

fn file_name(scorer_id: &str) -> String {
    let readable: String = scorer_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .take(48)
        .collect();
    let digest = crate::checksum::sha256_hex(scorer_id.as_bytes());
    format!("{readable}-{}.pairs", &digest[..12])
}

impl PairCache {
    pub fn in_memory() -> Self {
        PairCache {
            dir: None,
            scorers: Mutex::new(HashMap::new()),
        }
    }

    pub fn open(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(PairCache {
            dir: Some(dir.to_path_buf()),
            scorers: Mutex::new(HashMap::new()),
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn load(&self, scorer_id: &str) -> std::io::Result<ScorerEntries> {
        let Some(dir) = &self.dir else {
            return Ok(ScorerEntries {
                scores: HashMap::new(),
                file: None,
            });
        };
        let path = dir.join(file_name(scorer_id));
        let mut scores = HashMap::new();
        let raw = if path.exists() {
            std::fs::read_to_string(&path)?
        } else {
            String::new()
        };
        let mut skipped = 0usize;
        for line in raw.lines() {
            let parsed = line
                .split_once('\t')
                .and_then(|(k, p)| p.parse::<f64>().ok().map(|p| (k.to_string(), p)));
            match parsed {
                Some((k, p)) if k.len() == 64 => {
                    scores.insert(k, p);
                }
                _ => skipped += 1,
            }
        }
        if skipped > 0 {
            log::warn!("{}: skipped {skipped} unreadable cache record(s)", path.display());
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&path)?;
        if !raw.is_empty() && !raw.ends_with('\n') {
            file.write_all(b"\n")?;
        }
        Ok(ScorerEntries {
            scores,
            file: Some(file),
        })
    }

    fn with_entries<T>(
        &self,
        scorer_id: &str,
        f: impl FnOnce(&mut ScorerEntries) -> std::io::Result<T>,
    ) -> std::io::Result<T> {
        let mut guard = self.scorers.lock().unwrap_or_else(|e| e.into_inner());
        if !guard.contains_key(scorer_id) {
            let entries = self.load(scorer_id)?;
            guard.insert(scorer_id.to_string(), entries);
        }
        f(guard.get_mut(scorer_id).expect("just inserted"))
    }

    pub fn get(&self, scorer_id: &str, key: &str) -> std::io::Result<Option<f64>> {
        self.with_entries(scorer_id, |e| Ok(e.scores.get(key).copied()))
    }

    pub fn insert_many(&self, scorer_id: &str, records: &[(String, f64)]) -> std::io::Result<()> {
        self.with_entries(scorer_id, |e| {
            let mut buf = String::new();
            for (key, p) in records {
                if e.scores.insert(key.clone(), *p).is_none() {
                    buf.push_str(&format!("{key}\t{p}\n"));
                }
            }
            if let Some(file) = e.file.as_mut() {
                file.write_all(buf.as_bytes())?;
                file.flush()?;
            }
            Ok(())
        })
    }

    pub fn len(&self, scorer_id: &str) -> std::io::Result<usize> {
        self.with_entries(scorer_id, |e| Ok(e.scores.len()))
    }
}
