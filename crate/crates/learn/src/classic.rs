//! Classic binary classifiers sharing one fit / score / decide interface.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};
use crate::layers::{sigmoid, Activation};
use crate::loss::ClassWeights;
use crate::net::BinaryNet;
use crate::optim::OptimizerConfig;
use crate::train::{train_binary, BinaryModel, TrainConfig};
use crate::tree::{check_xy, DecisionTree, Forest, ForestConfig, TreeConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassicKind {
    Logreg,
    GaussianNb,
    Qda,
    LinearSvm,
    Mlp,
    RandomForest,
    DecisionTree,
}

impl ClassicKind {
    pub const ALL: [ClassicKind; 7] = [
        ClassicKind::Mlp,
        ClassicKind::Logreg,
        ClassicKind::RandomForest,
        ClassicKind::LinearSvm,
        ClassicKind::GaussianNb,
        ClassicKind::Qda,
        ClassicKind::DecisionTree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassicKind::Logreg => "logreg",
            ClassicKind::GaussianNb => "gaussian-nb",
            ClassicKind::Qda => "qda",
            ClassicKind::LinearSvm => "linear-svm",
            ClassicKind::Mlp => "mlp",
            ClassicKind::RandomForest => "random-forest",
            ClassicKind::DecisionTree => "decision-tree",
        }
    }

    /// Tree kinds are scale invariant and take raw features.
    pub fn is_tree(self) -> bool {
        matches!(self, ClassicKind::RandomForest | ClassicKind::DecisionTree)
    }
}

impl std::fmt::Display for ClassicKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ClassicKind {
    type Err = LearnError;
    fn from_str(s: &str) -> Result<Self> {
        ClassicKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| LearnError::Config(format!("unknown classifier kind {s:?}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinearConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ClassicConfig {
    pub class_weights: ClassWeights,
    pub logreg: LinearConfig,
    pub svm: LinearConfig,
    pub var_floor: f64,
    pub qda_reg: f64,
    pub mlp_hidden: Vec<usize>,
    pub mlp_train: TrainConfig,
    pub forest: ForestConfig,
    pub tree: TreeConfig,
    pub seed: u64,
}

impl Default for ClassicConfig {
    fn default() -> Self {
        ClassicConfig {
            class_weights: ClassWeights::default(),
            logreg: LinearConfig {
                learning_rate: 0.5,
                epochs: 500,
                l2: 1e-4,
            },
            svm: LinearConfig {
                learning_rate: 0.05,
                epochs: 500,
                l2: 1e-3,
            },
            var_floor: 1e-9,
            qda_reg: 1e-6,
            mlp_hidden: vec![16, 8],
            mlp_train: TrainConfig {
                epochs: 100,
                batch_size: 32,
                optimizer: OptimizerConfig {
                    learning_rate: 1e-2,
                    ..OptimizerConfig::default()
                },
                ..TrainConfig::default()
            },
            forest: ForestConfig::default(),
            tree: TreeConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub log_prior: f64,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QdaClass {
    pub log_prior: f64,
    pub mean: Vec<f64>,
    /// Lower Cholesky factor of the regularized covariance, row major.
    pub chol: Vec<f64>,
    pub log_det: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClassicModel {
    Logreg { w: Vec<f64>, b: f64 },
    GaussianNb { classes: [Gaussian; 2] },
    Qda { classes: Vec<QdaClass> },
    LinearSvm { w: Vec<f64>, b: f64 },
    Mlp { net: BinaryNet },
    RandomForest { forest: Forest },
    DecisionTree { tree: DecisionTree },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicClassifier {
    pub kind: ClassicKind,
    pub model: ClassicModel,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn split_classes<'a>(x: &'a [Vec<f64>], y: &[bool]) -> [Vec<&'a [f64]>; 2] {
    let mut out = [Vec::new(), Vec::new()];
    for (r, &l) in x.iter().zip(y) {
        out[l as usize].push(r.as_slice());
    }
    out
}

fn fit_linear(x: &[Vec<f64>], y: &[bool], cfg: &LinearConfig, w8: ClassWeights, hinge: bool) -> (Vec<f64>, f64) {
    let d = x[0].len();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let total: f64 = y.iter().map(|&l| w8.of(l)).sum();
    for _ in 0..cfg.epochs {
        let mut gw = vec![0.0; d];
        let mut gb = 0.0;
        for (r, &l) in x.iter().zip(y) {
            let z = dot(&w, r) + b;
            let g = if hinge {
                let s = if l { 1.0 } else { -1.0 };
                if s * z < 1.0 {
                    -s
                } else {
                    0.0
                }
            } else {
                sigmoid(z) - if l { 1.0 } else { 0.0 }
            } * w8.of(l);
            if g != 0.0 {
                for (a, v) in gw.iter_mut().zip(r) {
                    *a += g * v;
                }
                gb += g;
            }
        }
        for (wj, gj) in w.iter_mut().zip(&gw) {
            *wj -= cfg.learning_rate * (gj / total + cfg.l2 * *wj);
        }
        b -= cfg.learning_rate * gb / total;
    }
    (w, b)
}

fn fit_gaussian(rows: &[&[f64]], n: usize, floor: f64) -> Gaussian {
    let d = rows[0].len();
    let m = rows.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / m).collect();
    let var = (0..d)
        .map(|j| rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / m + floor)
        .collect();
    Gaussian {
        log_prior: (m / n as f64).ln(),
        mean,
        var,
    }
}

fn gaussian_loglik(g: &Gaussian, x: &[f64]) -> f64 {
    g.log_prior
        + x.iter()
            .zip(g.mean.iter().zip(&g.var))
            .map(|(v, (m, s))| -0.5 * ((v - m).powi(2) / s + (2.0 * std::f64::consts::PI * s).ln()))
            .sum::<f64>()
}

fn fit_qda_class(rows: &[&[f64]], n: usize, reg: f64, class: usize) -> Result<QdaClass> {
    let d = rows[0].len();
    let m = rows.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / m).collect();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for r in rows {
        let c = DVector::from_iterator(d, r.iter().zip(&mean).map(|(a, b)| a - b));
        cov += &c * c.transpose();
    }
    cov /= m;
    for i in 0..d {
        cov[(i, i)] += reg;
    }
    let scale = cov.trace() / d as f64;
    let chol = cov.cholesky().ok_or(LearnError::SingularCovariance { class })?;
    let l = chol.l();
    let log_det = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
    if !log_det.is_finite() || l.diagonal().iter().any(|v| v * v <= f64::EPSILON * scale) {
        return Err(LearnError::SingularCovariance { class });
    }
    let mut flat = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            flat.push(l[(i, j)]);
        }
    }
    Ok(QdaClass {
        log_prior: (m / n as f64).ln(),
        mean,
        chol: flat,
        log_det,
    })
}

fn qda_loglik(c: &QdaClass, x: &[f64]) -> f64 {
    let d = c.mean.len();
    // forward substitution: L z = x - mean
    let mut z = vec![0.0; d];
    for i in 0..d {
        let mut s = x[i] - c.mean[i];
        for j in 0..i {
            s -= c.chol[i * d + j] * z[j];
        }
        z[i] = s / c.chol[i * d + i];
    }
    c.log_prior - 0.5 * (dot(&z, &z) + c.log_det + d as f64 * (2.0 * std::f64::consts::PI).ln())
}

impl ClassicClassifier {
    pub fn fit(kind: ClassicKind, cfg: &ClassicConfig, x: &[Vec<f64>], y: &[bool]) -> Result<Self> {
        check_xy(x, y)?;
        let n = x.len();
        let model = match kind {
            ClassicKind::Logreg => {
                let (w, b) = fit_linear(x, y, &cfg.logreg, cfg.class_weights, false);
                ClassicModel::Logreg { w, b }
            }
            ClassicKind::LinearSvm => {
                let (w, b) = fit_linear(x, y, &cfg.svm, cfg.class_weights, true);
                ClassicModel::LinearSvm { w, b }
            }
            ClassicKind::GaussianNb | ClassicKind::Qda => {
                let parts = split_classes(x, y);
                for (c, p) in parts.iter().enumerate() {
                    if p.len() < 2 {
                        return Err(LearnError::DegenerateClass(format!("{kind} needs two samples of class {c}")));
                    }
                }
                if kind == ClassicKind::GaussianNb {
                    ClassicModel::GaussianNb {
                        classes: [fit_gaussian(&parts[0], n, cfg.var_floor), fit_gaussian(&parts[1], n, cfg.var_floor)],
                    }
                } else {
                    ClassicModel::Qda {
                        classes: vec![fit_qda_class(&parts[0], n, cfg.qda_reg, 0)?, fit_qda_class(&parts[1], n, cfg.qda_reg, 1)?],
                    }
                }
            }
            ClassicKind::Mlp => {
                let mut net = BinaryNet::new(x[0].len(), &cfg.mlp_hidden, Activation::Elu, cfg.seed);
                let tc = TrainConfig {
                    seed: cfg.seed,
                    class_weights: cfg.class_weights,
                    ..cfg.mlp_train.clone()
                };
                train_binary(&mut net, x, y, &tc)?;
                ClassicModel::Mlp { net }
            }
            ClassicKind::RandomForest => {
                let mut forest = Forest::new(ForestConfig {
                    seed: cfg.seed,
                    ..cfg.forest.clone()
                });
                forest.fit(x, y)?;
                ClassicModel::RandomForest { forest }
            }
            ClassicKind::DecisionTree => ClassicModel::DecisionTree {
                tree: DecisionTree::fit(x, y, &cfg.tree, cfg.seed)?,
            },
        };
        Ok(ClassicClassifier { kind, model })
    }

    /// Confidence for class 1 in [0, 1].
    pub fn score(&self, x: &[f64]) -> f64 {
        match &self.model {
            ClassicModel::Logreg { w, b } | ClassicModel::LinearSvm { w, b } => sigmoid(dot(w, x) + b),
            ClassicModel::GaussianNb { classes } => sigmoid(gaussian_loglik(&classes[1], x) - gaussian_loglik(&classes[0], x)),
            ClassicModel::Qda { classes } => sigmoid(qda_loglik(&classes[1], x) - qda_loglik(&classes[0], x)),
            ClassicModel::Mlp { net } => net.predict(&x.to_vec()),
            ClassicModel::RandomForest { forest } => forest.predict_proba(x).map(|p| p[1]).unwrap_or(0.0),
            ClassicModel::DecisionTree { tree } => tree.p1(x),
        }
    }

    pub fn decide(&self, x: &[f64]) -> bool {
        self.score(x) > 0.5
    }
}
