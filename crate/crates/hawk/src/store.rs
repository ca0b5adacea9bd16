//! File-backed service state.
//!
//! Layout under the data directory:
//! `reports.jsonl` and `ledger.jsonl` (append-only logs),
//! `optimizer.jsonl` (threshold changes), `submissions/<reportId>.json`
//! (match documents as received) and `corpus/{matches,labels}` (confirmed
//! matches in dataset layout).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SubsecRound, Utc};
use serde::{Deserialize, Serialize};

use hawk_core::{CheatReport, Evidence, MvinModel, Objective};
use hawk_replay::io::{labels_path, match_path, write_labels, write_match};
use hawk_replay::{parse_match_json, CheatType, LabelSet, MatchRecord, PlayerLabel, SteamId};

use crate::error::ServiceError;

pub const REPORTS_LOG: &str = "reports.jsonl";
pub const LEDGER_LOG: &str = "ledger.jsonl";
pub const OPTIMIZER_LOG: &str = "optimizer.jsonl";
pub const SUBMISSIONS_DIR: &str = "submissions";
pub const CORPUS_DIR: &str = "corpus";
pub const MODEL_DIR: &str = "model";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GmVerdict {
    #[serde(alias = "confirm")]
    Confirmed,
    #[serde(alias = "reject")]
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerdictRecord {
    pub report_id: String,
    pub match_id: String,
    pub steam_id: SteamId,
    pub gm_verdict: GmVerdict,
    pub gm_id: String,
    pub cheat_type: CheatType,
    pub timestamp: DateTime<Utc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlayerEvidence {
    pub steam_id: SteamId,
    pub evidence: Evidence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StoredReport {
    pub report: CheatReport,
    pub evidence: Vec<PlayerEvidence>,
}

impl StoredReport {
    pub fn evidence_for(&self, id: SteamId) -> Option<&Evidence> {
        self.evidence.iter().find(|e| e.steam_id == id).map(|e| &e.evidence)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimizerRecord {
    pub model_version: String,
    pub objective: Objective,
    pub mvin: MvinModel,
    pub timestamp: DateTime<Utc>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BannedEntry {
    pub match_id: String,
    pub steam_id: SteamId,
}

/// Derived state that a ledger replay must reproduce exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LedgerState {
    pub banned: Vec<BannedEntry>,
    pub decisions: Vec<VerdictRecord>,
    pub corpus_matches: Vec<String>,
}

pub fn now() -> DateTime<Utc> {
    Utc::now().trunc_subsecs(3)
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, ServiceError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let f = File::open(path).map_err(|e| ServiceError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| ServiceError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let v = serde_json::from_str(&line)
            .map_err(|e| ServiceError::Corrupt(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(v);
    }
    Ok(out)
}

fn open_append(path: &Path) -> Result<File, ServiceError> {
    OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| ServiceError::io(path, e))
}

fn append_line<T: Serialize>(f: &mut File, path: &Path, v: &T) -> Result<(), ServiceError> {
    let mut line = serde_json::to_vec(v).map_err(|e| ServiceError::Corrupt(e.to_string()))?;
    line.push(b'\n');
    f.write_all(&line).map_err(|e| ServiceError::io(path, e))?;
    f.sync_data().map_err(|e| ServiceError::io(path, e))
}

pub struct Store {
    root: PathBuf,
    reports: HashMap<String, StoredReport>,
    order: Vec<String>,
    decisions: BTreeMap<(String, SteamId), VerdictRecord>,
    ledger: File,
    reports_log: File,
    optimizer_log: File,
}

impl Store {
    /// Open or create a data directory and replay its logs.
    pub fn open(root: &Path) -> Result<Self, ServiceError> {
        for d in [root.to_path_buf(), root.join(SUBMISSIONS_DIR), root.join(CORPUS_DIR)] {
            fs::create_dir_all(&d).map_err(|e| ServiceError::io(&d, e))?;
        }
        let mut reports = HashMap::new();
        let mut order = Vec::new();
        for r in read_jsonl::<StoredReport>(&root.join(REPORTS_LOG))? {
            order.push(r.report.report_id.clone());
            reports.insert(r.report.report_id.clone(), r);
        }
        let mut store = Store {
            root: root.to_path_buf(),
            reports,
            order,
            decisions: BTreeMap::new(),
            ledger: open_append(&root.join(LEDGER_LOG))?,
            reports_log: open_append(&root.join(REPORTS_LOG))?,
            optimizer_log: open_append(&root.join(OPTIMIZER_LOG))?,
        };
        let mut touched = BTreeSet::new();
        for rec in read_jsonl::<VerdictRecord>(&root.join(LEDGER_LOG))? {
            let key = (rec.report_id.clone(), rec.steam_id);
            if store.decisions.contains_key(&key) {
                return Err(ServiceError::Corrupt(format!(
                    "ledger decides {} / {} twice",
                    rec.report_id, rec.steam_id
                )));
            }
            if rec.gm_verdict == GmVerdict::Confirmed {
                touched.insert(rec.report_id.clone());
            }
            store.decisions.insert(key, rec);
        }
        // finish corpus writes interrupted by a crash
        for report_id in touched {
            store.sync_corpus(&report_id)?;
        }
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn model_dir(&self) -> PathBuf {
        self.root.join(MODEL_DIR)
    }

    pub fn corpus_dir(&self) -> PathBuf {
        self.root.join(CORPUS_DIR)
    }

    fn submission_path(&self, report_id: &str) -> PathBuf {
        self.root.join(SUBMISSIONS_DIR).join(format!("{report_id}.json"))
    }

    pub fn add_report(&mut self, stored: StoredReport, m: &MatchRecord) -> Result<(), ServiceError> {
        let id = stored.report.report_id.clone();
        if self.reports.contains_key(&id) {
            return Err(ServiceError::Corrupt(format!("duplicate report id {id}")));
        }
        let p = self.submission_path(&id);
        let tmp = p.with_extension("json.tmp");
        fs::write(&tmp, hawk_replay::match_to_json(m)).map_err(|e| ServiceError::io(&tmp, e))?;
        fs::rename(&tmp, &p).map_err(|e| ServiceError::io(&p, e))?;
        let path = self.root.join(REPORTS_LOG);
        append_line(&mut self.reports_log, &path, &stored)?;
        self.order.push(id.clone());
        self.reports.insert(id, stored);
        Ok(())
    }

    pub fn report(&self, id: &str) -> Option<&StoredReport> {
        self.reports.get(id)
    }

    /// Reports in submission order.
    pub fn reports(&self) -> impl Iterator<Item = &StoredReport> {
        self.order.iter().filter_map(|id| self.reports.get(id))
    }

    pub fn decision(&self, report_id: &str, steam_id: SteamId) -> Option<&VerdictRecord> {
        self.decisions.get(&(report_id.to_string(), steam_id))
    }

    /// Append a verdict and apply its side effect. The caller has checked
    /// that the entry exists and is pending.
    pub fn record_verdict(&mut self, rec: VerdictRecord) -> Result<VerdictRecord, ServiceError> {
        let key = (rec.report_id.clone(), rec.steam_id);
        if let Some(prev) = self.decisions.get(&key) {
            return Err(ServiceError::AlreadyDecided {
                report_id: prev.report_id.clone(),
                steam_id: prev.steam_id,
            });
        }
        let path = self.root.join(LEDGER_LOG);
        append_line(&mut self.ledger, &path, &rec)?;
        self.decisions.insert(key, rec.clone());
        if rec.gm_verdict == GmVerdict::Confirmed {
            self.sync_corpus(&rec.report_id)?;
        }
        Ok(rec)
    }

    /// Write the submitted match and its labels into the corpus. Every
    /// confirmed player of the report is a cheater, everyone else honest.
    fn sync_corpus(&self, report_id: &str) -> Result<(), ServiceError> {
        let sub = self.submission_path(report_id);
        let bytes = fs::read(&sub).map_err(|e| ServiceError::io(&sub, e))?;
        let m = parse_match_json(&bytes).map_err(|e| ServiceError::Corrupt(format!("{}: {e}", sub.display())))?;
        let mut labels = Vec::with_capacity(m.players.len());
        for p in &m.players {
            let confirmed = self
                .decision(report_id, p.steam_id)
                .filter(|d| d.gm_verdict == GmVerdict::Confirmed);
            labels.push(PlayerLabel {
                steam_id: p.steam_id,
                cheater: confirmed.is_some(),
                cheat_type: confirmed.map(|d| d.cheat_type).unwrap_or(CheatType::None),
                ban_date_utc: confirmed.map(|d| d.timestamp),
            });
        }
        let set = LabelSet {
            match_id: m.match_id.clone(),
            labels,
        };
        let corpus = self.corpus_dir();
        let lp = labels_path(&corpus, &m.match_id);
        let same = fs::read(&lp)
            .ok()
            .and_then(|b| hawk_replay::parse_labels_json(&b).ok())
            .is_some_and(|old| old == set);
        if !same || !match_path(&corpus, &m.match_id).exists() {
            write_match(&corpus, &m)?;
            write_labels(&corpus, &set)?;
        }
        Ok(())
    }

    pub fn banned(&self) -> Vec<BannedEntry> {
        let set: BTreeSet<BannedEntry> = self
            .decisions
            .values()
            .filter(|d| d.gm_verdict == GmVerdict::Confirmed)
            .map(|d| BannedEntry {
                match_id: d.match_id.clone(),
                steam_id: d.steam_id,
            })
            .collect();
        set.into_iter().collect()
    }

    pub fn corpus_matches(&self) -> Result<Vec<String>, ServiceError> {
        let files = hawk_replay::io::match_files(&self.corpus_dir())?;
        Ok(files
            .iter()
            .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
            .collect())
    }

    pub fn state(&self) -> Result<LedgerState, ServiceError> {
        Ok(LedgerState {
            banned: self.banned(),
            decisions: self.decisions.values().cloned().collect(),
            corpus_matches: self.corpus_matches()?,
        })
    }

    pub fn record_optimizer(&mut self, rec: &OptimizerRecord) -> Result<(), ServiceError> {
        let path = self.root.join(OPTIMIZER_LOG);
        append_line(&mut self.optimizer_log, &path, rec)
    }

    /// Latest threshold setting recorded for the given model version.
    pub fn last_optimizer(&self, model_version: &str) -> Result<Option<OptimizerRecord>, ServiceError> {
        Ok(read_jsonl::<OptimizerRecord>(&self.root.join(OPTIMIZER_LOG))?
            .into_iter()
            .rev()
            .find(|r| r.model_version == model_version))
    }
}
