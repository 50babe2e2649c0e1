//! Versioned plain-text persistence for trained stationary models.
//!
//! ```text
//! geojam-model v1
//! features rss distance_to_target ...
//! transform pca
//! means ...
//! stds ...
//! zero_variance 0 0 1 ...
//! n_components 1
//! eigenvalues ...
//! component ...
//! forest n_trees 100 max_depth 10 min_samples_split 2 seed 7 n_features 1 degenerate 0
//! tree 37
//! S <feature> <threshold> <left> <right>
//! L <non-jammed count> <jammed count> <class>
//! ...
//! end
//! ```
//!
//! Floats use shortest round-trip formatting, so save/load is exact.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use geojam_core::signal::MODEL_FEATURES;
use geojam_core::stationary::{
    FeatureTransform, Forest, ForestParams, Node, PcaModel, Standardizer, StationaryModel, Tree,
};

use crate::csv_io::{num, write_text};
use crate::error::{Error, Result};

const MAGIC: &str = "geojam-model v1";

fn join(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ")
}

pub fn model_to_string(model: &StationaryModel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "features {}", MODEL_FEATURES.join(" "));
    let scaler = match &model.transform {
        FeatureTransform::Standardize(z) => {
            let _ = writeln!(s, "transform standardize");
            z
        }
        FeatureTransform::Pca(p) => {
            let _ = writeln!(s, "transform pca");
            &p.scaler
        }
    };
    let _ = writeln!(s, "means {}", join(&scaler.means));
    let _ = writeln!(s, "stds {}", join(&scaler.stds));
    let zv: Vec<&str> = scaler
        .zero_variance
        .iter()
        .map(|z| if *z { "1" } else { "0" })
        .collect();
    let _ = writeln!(s, "zero_variance {}", zv.join(" "));
    if let FeatureTransform::Pca(p) = &model.transform {
        let _ = writeln!(s, "n_components {}", p.n_components);
        let _ = writeln!(s, "eigenvalues {}", join(&p.eigenvalues));
        for c in &p.components {
            let _ = writeln!(s, "component {}", join(c));
        }
    }
    let f = &model.forest;
    let _ = writeln!(
        s,
        "forest n_trees {} max_depth {} min_samples_split {} seed {} n_features {} degenerate {}",
        f.params.n_trees,
        f.params.max_depth,
        f.params.min_samples_split,
        f.params.seed,
        f.n_features,
        f.degenerate as u8
    );
    for t in &f.trees {
        let _ = writeln!(s, "tree {}", t.nodes.len());
        for n in &t.nodes {
            match n {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let _ = writeln!(s, "S {feature} {} {left} {right}", num(*threshold));
                }
                Node::Leaf { counts, class } => {
                    let _ = writeln!(s, "L {} {} {}", counts[0], counts[1], *class as u8);
                }
            }
        }
    }
    let _ = writeln!(s, "end");
    s
}

pub fn save_model(path: &Path, model: &StationaryModel) -> Result<()> {
    write_text(path, &model_to_string(model))
}

pub fn load_model(path: &Path) -> Result<StationaryModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text).map_err(|e| match e {
        Error::Schema(msg) => Error::Schema(format!("{}: {msg}", path.display())),
        other => other,
    })
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, msg: impl std::fmt::Display) -> Error {
        Error::Schema(format!("model line {}: {msg}", self.line))
    }

    fn next(&mut self) -> Result<&'a str> {
        match self.it.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l.trim_end())
            }
            None => Err(Error::Schema("model file truncated".into())),
        }
    }

    /// Next line, which must start with `key`; returns the remaining fields.
    fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let l = self.next()?;
        let mut fields = l.split_ascii_whitespace();
        if fields.next() != Some(key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        Ok(fields.collect())
    }

    fn parse<T: FromStr>(&self, s: &str) -> Result<T> {
        s.parse()
            .map_err(|_| self.err(format!("cannot parse `{s}`")))
    }

    fn floats(&mut self, key: &str, len: usize) -> Result<Vec<f64>> {
        let f = self.keyed(key)?;
        if f.len() != len {
            return Err(self.err(format!("`{key}` needs {len} values, found {}", f.len())));
        }
        f.iter().map(|s| self.parse(s)).collect()
    }
}

pub fn parse_model(text: &str) -> Result<StationaryModel> {
    let mut l = Lines {
        it: text.lines().enumerate(),
        line: 0,
    };
    if l.next()? != MAGIC {
        return Err(l.err(format!("not a `{MAGIC}` model file")));
    }
    let features = l.keyed("features")?;
    if features != MODEL_FEATURES {
        return Err(l.err(format!(
            "model features {features:?} do not match {MODEL_FEATURES:?}"
        )));
    }
    let d = MODEL_FEATURES.len();
    let kind = l.keyed("transform")?;
    let means = l.floats("means", d)?;
    let stds = l.floats("stds", d)?;
    let zero_variance = l
        .keyed("zero_variance")?
        .iter()
        .map(|s| match *s {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(l.err("zero_variance entries must be 0 or 1")),
        })
        .collect::<Result<Vec<_>>>()?;
    if zero_variance.len() != d {
        return Err(l.err("zero_variance has the wrong length"));
    }
    let scaler = Standardizer {
        means,
        stds,
        zero_variance,
    };
    let transform = match kind.as_slice() {
        ["standardize"] => FeatureTransform::Standardize(scaler),
        ["pca"] => {
            let k = l.keyed("n_components")?;
            let n_components: usize = match k.as_slice() {
                [v] => l.parse(v)?,
                _ => return Err(l.err("n_components takes one value")),
            };
            if n_components == 0 || n_components > d {
                return Err(l.err("n_components out of range"));
            }
            let eigenvalues = l.floats("eigenvalues", d)?;
            let components = (0..n_components)
                .map(|_| l.floats("component", d))
                .collect::<Result<Vec<_>>>()?;
            FeatureTransform::Pca(PcaModel {
                scaler,
                components,
                eigenvalues,
                n_components,
            })
        }
        _ => return Err(l.err("transform must be `standardize` or `pca`")),
    };

    let f = l.keyed("forest")?;
    let mut vals = [0u64; 6];
    let names = [
        "n_trees",
        "max_depth",
        "min_samples_split",
        "seed",
        "n_features",
        "degenerate",
    ];
    if f.len() != 12 {
        return Err(l.err("malformed forest line"));
    }
    for (i, name) in names.iter().enumerate() {
        if f[2 * i] != *name {
            return Err(l.err(format!("expected `{name}`")));
        }
        vals[i] = l.parse(f[2 * i + 1])?;
    }
    let params = ForestParams {
        n_trees: vals[0] as usize,
        max_depth: vals[1] as usize,
        min_samples_split: vals[2] as usize,
        seed: vals[3],
    };
    let n_features = vals[4] as usize;
    if n_features != transform.n_outputs() {
        return Err(l.err("forest width does not match the transform"));
    }
    let mut trees = Vec::with_capacity(params.n_trees);
    for _ in 0..params.n_trees {
        let h = l.keyed("tree")?;
        let count: usize = match h.as_slice() {
            [v] => l.parse(v)?,
            _ => return Err(l.err("tree takes a node count")),
        };
        let mut nodes = Vec::with_capacity(count);
        for _ in 0..count {
            let line = l.next()?;
            let f: Vec<&str> = line.split_ascii_whitespace().collect();
            let node = match f.as_slice() {
                ["S", feat, thr, left, right] => Node::Split {
                    feature: l.parse(feat)?,
                    threshold: l.parse(thr)?,
                    left: l.parse(left)?,
                    right: l.parse(right)?,
                },
                ["L", c0, c1, class] => Node::Leaf {
                    counts: [l.parse(c0)?, l.parse(c1)?],
                    class: l.parse::<u8>(class)? == 1,
                },
                _ => return Err(l.err("malformed tree node")),
            };
            nodes.push(node);
        }
        check_tree(&nodes, n_features).map_err(|m| l.err(m))?;
        trees.push(Tree { nodes });
    }
    if l.next()? != "end" {
        return Err(l.err("expected `end`"));
    }
    Ok(StationaryModel {
        transform,
        forest: Forest {
            trees,
            n_features,
            params,
            degenerate: vals[5] != 0,
        },
    })
}

/// Rejects node arenas that would loop or index out of bounds.
fn check_tree(nodes: &[Node], n_features: usize) -> std::result::Result<(), &'static str> {
    if nodes.is_empty() {
        return Err("empty tree");
    }
    for (i, n) in nodes.iter().enumerate() {
        if let Node::Split {
            feature,
            left,
            right,
            ..
        } = *n
        {
            if feature >= n_features {
                return Err("split feature out of range");
            }
            if left <= i || right <= i || left >= nodes.len() || right >= nodes.len() {
                return Err("child index out of range");
            }
        }
    }
    Ok(())
}
