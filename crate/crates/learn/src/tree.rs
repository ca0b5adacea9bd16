//! CART classification trees (Gini impurity) and random forests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum Node {
    Leaf {
        p1: f64,
    },
    Split {
        feature: usize,
        /// Samples with `x[feature] <= threshold` go left.
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "mode", content = "value")]
pub enum MaxFeatures {
    All,
    Sqrt,
    Fraction(f64),
}

impl MaxFeatures {
    pub fn count(&self, d: usize) -> usize {
        let k = match self {
            MaxFeatures::All => d,
            MaxFeatures::Sqrt => (d as f64).sqrt().round() as usize,
            MaxFeatures::Fraction(f) => (f * d as f64).round() as usize,
        };
        k.clamp(1, d.max(1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 12,
            min_samples_split: 2,
            max_features: MaxFeatures::All,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

fn gini(pos: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    let p = pos / n;
    2.0 * p * (1.0 - p)
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [bool],
    cfg: &'a TreeConfig,
    k: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn build<R: Rng>(&mut self, idx: &mut [usize], depth: usize, rng: &mut R) -> usize {
        let n = idx.len();
        let pos = idx.iter().filter(|&&i| self.y[i]).count();
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            p1: pos as f64 / n as f64,
        });
        if pos == 0 || pos == n || depth >= self.cfg.max_depth || n < self.cfg.min_samples_split {
            return id;
        }
        let d = self.x[idx[0]].len();
        let mut features: Vec<usize> = (0..d).collect();
        features.shuffle(rng);
        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted = idx.to_vec();
        for (tried, &f) in features.iter().enumerate() {
            if tried >= self.k && best.is_some() {
                break;
            }
            sorted.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let mut left_pos = 0usize;
            for s in 0..n - 1 {
                if self.y[sorted[s]] {
                    left_pos += 1;
                }
                let v = self.x[sorted[s]][f];
                if v == self.x[sorted[s + 1]][f] {
                    continue;
                }
                let nl = (s + 1) as f64;
                let nr = (n - s - 1) as f64;
                let imp = nl * gini(left_pos as f64, nl) + nr * gini((pos - left_pos) as f64, nr);
                if best.is_none_or(|(b, _, _)| imp < b) {
                    best = Some((imp, f, v));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return id;
        };
        let mut split = 0;
        for j in 0..n {
            if self.x[idx[j]][feature] <= threshold {
                idx.swap(split, j);
                split += 1;
            }
        }
        let (l, r) = idx.split_at_mut(split);
        let left = self.build(l, depth + 1, rng);
        let right = self.build(r, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

impl DecisionTree {
    /// A single leaf predicting class 1 with probability `p1`.
    pub fn constant(p1: f64) -> Self {
        DecisionTree {
            nodes: vec![Node::Leaf { p1 }],
        }
    }

    /// Fit on the rows listed in `idx` (repeats allowed).
    pub fn fit_indices<R: Rng>(x: &[Vec<f64>], y: &[bool], idx: &[usize], cfg: &TreeConfig, rng: &mut R) -> Result<Self> {
        if idx.is_empty() {
            return Err(LearnError::Shape("no training rows".into()));
        }
        let d = x[idx[0]].len();
        let mut b = Builder {
            x,
            y,
            cfg,
            k: cfg.max_features.count(d),
            nodes: Vec::new(),
        };
        let mut work = idx.to_vec();
        b.build(&mut work, 0, rng);
        Ok(DecisionTree { nodes: b.nodes })
    }

    pub fn fit(x: &[Vec<f64>], y: &[bool], cfg: &TreeConfig, seed: u64) -> Result<Self> {
        check_xy(x, y)?;
        let idx: Vec<usize> = (0..x.len()).collect();
        Self::fit_indices(x, y, &idx, cfg, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn p1(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { p1 } => return *p1,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn predict_proba(&self, x: &[f64]) -> [f64; 2] {
        let p = self.p1(x);
        [1.0 - p, p]
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }
}

pub(crate) fn check_xy(x: &[Vec<f64>], y: &[bool]) -> Result<()> {
    if x.is_empty() {
        return Err(LearnError::Shape("no training rows".into()));
    }
    if x.len() != y.len() {
        return Err(LearnError::Shape(format!("{} rows, {} labels", x.len(), y.len())));
    }
    let d = x[0].len();
    if let Some(r) = x.iter().find(|r| r.len() != d) {
        return Err(LearnError::Shape(format!("row width {} != {}", r.len(), d)));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(LearnError::Shape("non-finite feature value".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub tree: TreeConfig,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            tree: TreeConfig {
                max_features: MaxFeatures::Sqrt,
                ..TreeConfig::default()
            },
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub config: ForestConfig,
    pub trees: Vec<DecisionTree>,
}

impl Forest {
    pub fn new(config: ForestConfig) -> Self {
        Forest { config, trees: Vec::new() }
    }

    pub fn from_trees(trees: Vec<DecisionTree>) -> Self {
        Forest {
            config: ForestConfig {
                n_trees: trees.len(),
                ..ForestConfig::default()
            },
            trees,
        }
    }

    pub fn fit(&mut self, x: &[Vec<f64>], y: &[bool]) -> Result<()> {
        check_xy(x, y)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let n = x.len();
        let mut trees = Vec::with_capacity(self.config.n_trees);
        for _ in 0..self.config.n_trees {
            let idx: Vec<usize> = if self.config.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            trees.push(DecisionTree::fit_indices(x, y, &idx, &self.config.tree, &mut rng)?);
        }
        self.trees = trees;
        Ok(())
    }

    pub fn is_trained(&self) -> bool {
        !self.trees.is_empty()
    }

    /// Mean of the per-tree class distributions.
    pub fn predict_proba(&self, x: &[f64]) -> Result<[f64; 2]> {
        if self.trees.is_empty() {
            return Err(LearnError::UntrainedModel);
        }
        let p1 = self.trees.iter().map(|t| t.p1(x)).sum::<f64>() / self.trees.len() as f64;
        Ok([1.0 - p1, p1])
    }

    /// Class with the highest mean probability; ties go to class 0.
    pub fn decide(&self, x: &[f64]) -> Result<(bool, f64)> {
        let p = self.predict_proba(x)?;
        Ok((p[1] > p[0], p[1]))
    }
}
