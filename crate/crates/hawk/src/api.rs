//! HTTP/JSON API over the model bundle and the store.

use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path as UrlPath, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use log::info;
use serde::{Deserialize, Serialize};

use hawk_core::report::evidence;
use hawk_core::{
    CheatReport, ConfusionCounts, CoreError, Metrics, ModelBundle, MvinModel, Objective, PlayerVerdict,
};
use hawk_replay::{parse_match_json, CheatType, MatchRecord, SteamId};

use crate::error::ServiceError;
use crate::store::{
    now, BannedEntry, GmVerdict, OptimizerRecord, PlayerEvidence, Store, StoredReport, VerdictRecord,
};

const BODY_LIMIT: usize = 512 * 1024 * 1024;

pub struct AppState {
    pub store: RwLock<Store>,
    pub bundle: RwLock<Option<Arc<ModelBundle>>>,
    pub model_dir: PathBuf,
    pub token: Option<String>,
}

pub type Shared = Arc<AppState>;

fn lock_err<T>(_: T) -> ServiceError {
    ServiceError::Corrupt("lock poisoned".into())
}

impl AppState {
    /// Open the store and load the bundle from `model_dir` if it exists.
    pub fn open(data_dir: &Path, model_dir: Option<PathBuf>, token: Option<String>) -> Result<Shared, ServiceError> {
        let store = Store::open(data_dir)?;
        let model_dir = model_dir.unwrap_or_else(|| store.model_dir());
        let state = Arc::new(AppState {
            store: RwLock::new(store),
            bundle: RwLock::new(None),
            model_dir,
            token: token.filter(|t| !t.is_empty()),
        });
        if state.model_dir.join("manifest.json").exists() {
            state.reload_model()?;
        }
        Ok(state)
    }

    /// Load the bundle from disk, apply the last recorded threshold setting
    /// for its version, and swap it in.
    pub fn reload_model(&self) -> Result<String, ServiceError> {
        let mut bundle = ModelBundle::load(&self.model_dir)?;
        if let Some(rec) = self.store.read().map_err(lock_err)?.last_optimizer(&bundle.version)? {
            bundle.mvin = rec.mvin;
        }
        let version = bundle.version.clone();
        *self.bundle.write().map_err(lock_err)? = Some(Arc::new(bundle));
        info!("model {version} loaded from {}", self.model_dir.display());
        Ok(version)
    }

    pub fn bundle(&self) -> Result<Option<Arc<ModelBundle>>, ServiceError> {
        Ok(self.bundle.read().map_err(lock_err)?.clone())
    }

    fn require_bundle(&self) -> Result<Arc<ModelBundle>, ServiceError> {
        self.bundle()?.ok_or(ServiceError::ModelNotLoaded)
    }
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/matches", post(post_match))
        .route("/reports/{id}", get(get_report))
        .route("/flagged", get(get_flagged))
        .route("/verdicts", post(post_verdict))
        .route("/optimizer", post(post_optimizer))
        .route("/banned", get(get_banned))
        .route("/model/reload", post(post_reload))
        .layer(middleware::from_fn_with_state(state.clone(), auth))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

async fn auth(State(state): State<Shared>, req: Request, next: Next) -> Response {
    if let Some(token) = &state.token {
        let ok = req
            .headers()
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .is_some_and(|t| t == token);
        if !ok {
            return ServiceError::Unauthorized.into_response();
        }
    }
    next.run(req).await
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T, ServiceError> {
    let mut de = serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(&mut de).map_err(|e| ServiceError::Schema {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ServiceError::Corrupt(format!("worker failed: {e}")))?
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Health {
    model_loaded: bool,
    model_version: Option<String>,
}

async fn health(State(state): State<Shared>) -> Result<Json<Health>, ServiceError> {
    let b = state.bundle()?;
    Ok(Json(Health {
        model_loaded: b.is_some(),
        model_version: b.map(|b| b.version.clone()),
    }))
}

/// Extract, embed and decide every player of a match document.
pub fn detect_report(bundle: &ModelBundle, m: &MatchRecord) -> Result<StoredReport, ServiceError> {
    let players = bundle.detect_match(m)?;
    let evidence = players
        .iter()
        .map(|p| {
            Ok(PlayerEvidence {
                steam_id: p.steam_id,
                evidence: evidence(bundle, m, p.steam_id)?,
            })
        })
        .collect::<Result<Vec<_>, CoreError>>()?;
    Ok(StoredReport {
        report: CheatReport {
            report_id: uuid::Uuid::new_v4().to_string(),
            match_id: m.match_id.clone(),
            created_utc: now(),
            model_version: bundle.version.clone(),
            players,
        },
        evidence,
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Submitted {
    report_id: String,
    report: CheatReport,
}

async fn post_match(State(state): State<Shared>, body: Bytes) -> Result<impl IntoResponse, ServiceError> {
    let bundle = state.require_bundle()?;
    let (m, stored) = blocking(move || {
        let m = parse_match_json(&body)?;
        let stored = detect_report(&bundle, &m)?;
        Ok((m, stored))
    })
    .await?;
    let report = stored.report.clone();
    state.store.write().map_err(lock_err)?.add_report(stored, &m)?;
    info!("report {} for match {}", report.report_id, report.match_id);
    Ok((
        StatusCode::CREATED,
        Json(Submitted {
            report_id: report.report_id.clone(),
            report,
        }),
    ))
}

async fn get_report(State(state): State<Shared>, UrlPath(id): UrlPath<String>) -> Result<Json<CheatReport>, ServiceError> {
    let store = state.store.read().map_err(lock_err)?;
    let r = store.report(&id).ok_or_else(|| ServiceError::UnknownReport(id.clone()))?;
    Ok(Json(r.report.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    #[default]
    Pending,
    Confirmed,
    Rejected,
    All,
}

#[derive(Deserialize)]
struct FlaggedQuery {
    #[serde(default)]
    status: EntryStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlaggedEntry {
    pub report_id: String,
    pub match_id: String,
    pub steam_id: SteamId,
    pub created_utc: chrono::DateTime<chrono::Utc>,
    pub status: EntryStatus,
    pub w: f64,
    pub epsilon: f64,
    pub verdict: PlayerVerdict,
    pub evidence: Option<hawk_core::Evidence>,
}

/// Re-decide a stored verdict under the current fusion model.
fn redecide(v: &PlayerVerdict, mvin: Option<&MvinModel>) -> PlayerVerdict {
    let mut v = v.clone();
    if let Some(m) = mvin {
        let (w, d) = m.decide(&v.triple(false));
        v.w = w;
        v.epsilon = m.epsilon;
        v.d_hawk = d;
    }
    v
}

/// Flagged players ordered by W descending. Decided entries are listed
/// whether or not the current threshold still flags them.
pub fn flagged_entries(store: &Store, mvin: Option<&MvinModel>, status: EntryStatus) -> Vec<FlaggedEntry> {
    let mut out = Vec::new();
    for r in store.reports() {
        for p in &r.report.players {
            let v = redecide(p, mvin);
            let st = match store.decision(&r.report.report_id, p.steam_id) {
                Some(d) if d.gm_verdict == GmVerdict::Confirmed => EntryStatus::Confirmed,
                Some(_) => EntryStatus::Rejected,
                None if v.d_hawk => EntryStatus::Pending,
                None => continue,
            };
            if status != EntryStatus::All && status != st {
                continue;
            }
            out.push(FlaggedEntry {
                report_id: r.report.report_id.clone(),
                match_id: r.report.match_id.clone(),
                steam_id: p.steam_id,
                created_utc: r.report.created_utc,
                status: st,
                w: v.w,
                epsilon: v.epsilon,
                verdict: v,
                evidence: r.evidence_for(p.steam_id).cloned(),
            });
        }
    }
    out.sort_by(|a, b| {
        b.w.total_cmp(&a.w)
            .then_with(|| a.created_utc.cmp(&b.created_utc))
            .then_with(|| a.report_id.cmp(&b.report_id))
            .then_with(|| a.steam_id.cmp(&b.steam_id))
    });
    out
}

async fn get_flagged(
    State(state): State<Shared>,
    Query(q): Query<FlaggedQuery>,
) -> Result<Json<Vec<FlaggedEntry>>, ServiceError> {
    let bundle = state.bundle()?;
    let store = state.store.read().map_err(lock_err)?;
    Ok(Json(flagged_entries(&store, bundle.as_ref().map(|b| &b.mvin), q.status)))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct VerdictRequest {
    pub report_id: String,
    pub steam_id: SteamId,
    pub verdict: GmVerdict,
    #[serde(default)]
    pub gm_id: Option<String>,
    #[serde(default)]
    pub cheat_type: Option<CheatType>,
}

async fn post_verdict(State(state): State<Shared>, body: Bytes) -> Result<impl IntoResponse, ServiceError> {
    let req: VerdictRequest = parse_body(&body)?;
    if req.cheat_type == Some(CheatType::None) {
        return Err(ServiceError::BadRequest("cheatType of a verdict cannot be none".into()));
    }
    let bundle = state.bundle()?;
    let mut store = state.store.write().map_err(lock_err)?;
    let report = store
        .report(&req.report_id)
        .ok_or_else(|| ServiceError::UnknownReport(req.report_id.clone()))?;
    let not_flagged = || ServiceError::NotFlagged {
        report_id: req.report_id.clone(),
        steam_id: req.steam_id,
    };
    let player = report
        .report
        .players
        .iter()
        .find(|p| p.steam_id == req.steam_id)
        .ok_or_else(not_flagged)?;
    if store.decision(&req.report_id, req.steam_id).is_some() {
        return Err(ServiceError::AlreadyDecided {
            report_id: req.report_id.clone(),
            steam_id: req.steam_id,
        });
    }
    if !redecide(player, bundle.as_ref().map(|b| &b.mvin)).d_hawk {
        return Err(not_flagged());
    }
    let rec = VerdictRecord {
        report_id: req.report_id.clone(),
        match_id: report.report.match_id.clone(),
        steam_id: req.steam_id,
        gm_verdict: req.verdict,
        gm_id: req.gm_id.clone().unwrap_or_else(|| "anonymous".into()),
        cheat_type: req.cheat_type.unwrap_or(CheatType::Aimbot),
        timestamp: now(),
    };
    let rec = store.record_verdict(rec)?;
    info!("{:?} {} in report {}", rec.gm_verdict, rec.steam_id, rec.report_id);
    Ok((StatusCode::CREATED, Json(rec)))
}

/// Either `"accuracy-subject-to-recall:0.75"` or `{"kind": ..., "r": ...}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ObjectiveInput {
    Name(String),
    Spec(Objective),
}

impl ObjectiveInput {
    pub fn resolve(self) -> Result<Objective, ServiceError> {
        let o = match self {
            ObjectiveInput::Name(s) => s.parse().map_err(|e: CoreError| ServiceError::BadRequest(e.to_string()))?,
            ObjectiveInput::Spec(o) => o,
        };
        o.validate().map_err(|e| ServiceError::BadRequest(e.to_string()))?;
        Ok(o)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerRequest {
    pub objective: ObjectiveInput,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ThresholdSetting {
    pub objective: Objective,
    pub lambda: [f64; 3],
    pub epsilon: f64,
    pub counts: ConfusionCounts,
    pub metrics: Metrics,
    pub pending: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimizerResponse {
    pub model_version: String,
    pub old: ThresholdSetting,
    pub new: ThresholdSetting,
}

fn setting(bundle: &ModelBundle, mvin: &MvinModel, store: &Store) -> ThresholdSetting {
    let counts = mvin.confusion(&bundle.validation);
    ThresholdSetting {
        objective: mvin.objective,
        lambda: mvin.lambda,
        epsilon: mvin.epsilon,
        counts,
        metrics: counts.metrics(),
        pending: flagged_entries(store, Some(mvin), EntryStatus::Pending).len(),
    }
}

async fn post_optimizer(State(state): State<Shared>, body: Bytes) -> Result<Json<OptimizerResponse>, ServiceError> {
    let req: OptimizerRequest = parse_body(&body)?;
    let objective = req.objective.resolve()?;
    let bundle = state.require_bundle()?;
    let old = bundle.clone();
    let fresh = blocking(move || {
        let mut b = (*old).clone();
        b.reoptimize(objective).map_err(|e| match e {
            CoreError::InfeasibleConstraint { recall } => ServiceError::InfeasibleConstraint { recall },
            e => ServiceError::Core(e),
        })?;
        Ok(b)
    })
    .await?;
    let mut store = state.store.write().map_err(lock_err)?;
    let response = OptimizerResponse {
        model_version: fresh.version.clone(),
        old: setting(&bundle, &bundle.mvin, &store),
        new: setting(&fresh, &fresh.mvin, &store),
    };
    store.record_optimizer(&OptimizerRecord {
        model_version: fresh.version.clone(),
        objective,
        mvin: fresh.mvin.clone(),
        timestamp: now(),
    })?;
    // swap while still holding the store lock so verdicts see one model
    *state.bundle.write().map_err(lock_err)? = Some(Arc::new(fresh));
    Ok(Json(response))
}

async fn get_banned(State(state): State<Shared>) -> Result<Json<Vec<BannedEntry>>, ServiceError> {
    Ok(Json(state.store.read().map_err(lock_err)?.banned()))
}

async fn post_reload(State(state): State<Shared>) -> Result<Json<serde_json::Value>, ServiceError> {
    let s = state.clone();
    let version = blocking(move || s.reload_model()).await?;
    Ok(Json(serde_json::json!({ "modelVersion": version })))
}

pub struct ServeConfig {
    pub data_dir: PathBuf,
    pub model_dir: Option<PathBuf>,
    pub bind: String,
    pub token: Option<String>,
}

pub async fn serve(cfg: ServeConfig) -> Result<(), ServiceError> {
    let state = AppState::open(&cfg.data_dir, cfg.model_dir, cfg.token)?;
    let listener = tokio::net::TcpListener::bind(&cfg.bind)
        .await
        .map_err(|e| ServiceError::BadRequest(format!("cannot bind {}: {e}", cfg.bind)))?;
    info!("listening on {}", cfg.bind);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ServiceError::Corrupt(format!("server failed: {e}")))
}
