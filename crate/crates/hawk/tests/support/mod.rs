#![allow(dead_code)]

use std::path::Path;
use std::sync::OnceLock;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use hawk_core::{dataset_samples, train_pipeline, ModelBundle, PipelineConfig};
use hawk_replay::synth::{generate_corpus, CorpusSpec, ProfileKind};
use hawk_replay::{LabelSet, MatchRecord};

pub fn aimbot_corpus(matches: usize, sophistication: f64, seed: u64) -> Vec<(MatchRecord, LabelSet)> {
    let spec = CorpusSpec {
        matches,
        players: 10,
        cheaters: vec![(ProfileKind::Aimbot, 1.0)],
        sophistication,
        ..CorpusSpec::default()
    };
    generate_corpus(&spec, seed).unwrap()
}

/// A small blatant-aimbot bundle shared by the tests of one binary.
pub fn bundle() -> &'static ModelBundle {
    static B: OnceLock<ModelBundle> = OnceLock::new();
    B.get_or_init(|| {
        let cfg = PipelineConfig::desk().with_seed(11);
        let train = dataset_samples(&aimbot_corpus(30, 0.0, 101), &cfg.features).unwrap();
        let val = dataset_samples(&aimbot_corpus(12, 0.0, 102), &cfg.features).unwrap();
        train_pipeline(&train, &val, &cfg).unwrap()
    })
}

/// Fresh matches the bundle has not seen.
pub fn unseen_matches() -> Vec<(MatchRecord, LabelSet)> {
    aimbot_corpus(4, 0.0, 103)
}

pub fn install_bundle(data_dir: &Path) {
    bundle().save(&data_dir.join(hawk::store::MODEL_DIR)).unwrap();
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<Vec<u8>>, token: Option<&str>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map(Body::from).unwrap_or_else(Body::empty)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    (status, v)
}

pub fn json(v: Value) -> Option<Vec<u8>> {
    Some(serde_json::to_vec(&v).unwrap())
}
