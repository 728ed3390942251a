//! Run configuration: a flat `key = value` format covering every stage, plus
//! the shared training-loop knobs.
//!
//! Unknown keys are errors; every run writes its fully resolved config next
//! to its outputs so reports are self-describing.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::nn::OptimizerKind;

/// Shared training-loop parameters.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub steps: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub optimizer: OptimizerKind,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            steps: 1000,
            batch_size: 128,
            lr: 1e-3,
            optimizer: OptimizerKind::Adam,
            seed: 0,
        }
    }
}

macro_rules! run_config {
    ($(($field:ident, $key:literal, $ty:ty, $default:expr, $doc:literal)),+ $(,)?) => {
        /// Resolved configuration for a CLI run.
        #[derive(Debug, Clone)]
        pub struct RunConfig {
            $(#[doc = $doc] pub $field: $ty),+
        }

        impl Default for RunConfig {
            fn default() -> Self {
                RunConfig { $($field: $default),+ }
            }
        }

        impl RunConfig {
            /// Applies one `key = value` assignment. Unknown keys are errors.
            pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
                match key {
                    $($key => {
                        self.$field = parse_value::<$ty>(key, value)?;
                        Ok(())
                    })+
                    _ => Err(Error::Config(format!("unknown config key `{key}`"))),
                }
            }

            /// Every key with its current value, sorted by key.
            pub fn entries(&self) -> BTreeMap<String, String> {
                let mut map = BTreeMap::new();
                $(map.insert($key.to_string(), format_value(&self.$field));)+
                map
            }
        }
    };
}

run_config![
    (seed, "seed", u64, 0, "root seed for every random draw in the run"),
    (out_dir, "out", PathBuf, PathBuf::from("out"), "output directory"),
    (
        budget_bytes,
        "budget_bytes",
        Option<u128>,
        None,
        "memory budget enforced when building transition schedules"
    ),
    (
        parallel,
        "parallel",
        bool,
        false,
        "allow multi-threaded stages; timing commands refuse to run when set"
    ),
    (graph_rows, "graph.rows", usize, 0, "grid rows (synthetic graph)"),
    (graph_cols, "graph.cols", usize, 0, "grid cols (synthetic graph)"),
    (
        graph_edges,
        "graph.edges",
        Option<PathBuf>,
        None,
        "edge file (`u,v` per line); overrides the grid spec"
    ),
    (
        graph_coords,
        "graph.coords",
        Option<PathBuf>,
        None,
        "coordinate file (`id,x,y` per line)"
    ),
    (data_n, "data.n", usize, 2000, "number of synthetic paths"),
    (
        data_p_detour,
        "data.p_detour",
        f64,
        0.2,
        "detour probability of the noisy-shortest-path policy"
    ),
    (data_max_len, "data.max_len", usize, 64, "maximum path length in vertices"),
    (gpd_t, "gpd.t", usize, 100, "graph-space diffusion steps"),
    (gpd_tau, "gpd.tau", f64, 0.1, "heat time per diffusion step"),
    (gpd_c1, "gpd.c1", usize, 64, "denoiser channels at full resolution"),
    (gpd_c2, "gpd.c2", usize, 128, "denoiser channels at half resolution"),
    (gpd_temb, "gpd.temb", usize, 64, "timestep embedding width"),
    (gpd_steps, "gpd.steps", usize, 600, "training steps"),
    (gpd_batch, "gpd.batch", usize, 32, "training batch size"),
    (gpd_lr, "gpd.lr", f64, 1e-3, "learning rate"),
    (vae_dmodel, "vae.d_model", usize, 128, "transformer width"),
    (vae_heads, "vae.heads", usize, 8, "attention heads"),
    (vae_layers, "vae.layers", usize, 3, "encoder and decoder layers"),
    (vae_latent, "vae.latent_c", usize, 64, "latent channels per latent token"),
    (vae_ff_mult, "vae.ff_mult", usize, 4, "feed-forward width multiplier"),
    (vae_lambda, "vae.lambda", f64, 1e-3, "KL weight in the VAE loss"),
    (vae_epochs, "vae.epochs", usize, 30, "training epochs"),
    (vae_batch, "vae.batch", usize, 64, "training batch size"),
    (vae_lr, "vae.lr", f64, 1e-3, "learning rate"),
    (
        vae_optimizer,
        "vae.optimizer",
        OptimizerKind,
        OptimizerKind::Adam,
        "adam or sgd"
    ),
    (
        vae_target_acc,
        "vae.target_acc",
        f64,
        0.995,
        "early-stop validation reconstruction accuracy"
    ),
    (ldm_t, "ldm.t", usize, 50, "latent diffusion timesteps"),
    (ldm_beta_min, "ldm.beta_min", f64, 1e-4, "noise schedule start"),
    (ldm_beta_max, "ldm.beta_max", f64, 0.2, "noise schedule end"),
    (ldm_hidden, "ldm.hidden", usize, 256, "residual block channels"),
    (ldm_blocks, "ldm.blocks", usize, 4, "residual blocks"),
    (ldm_temb, "ldm.temb", usize, 64, "timestep embedding width"),
    (ldm_steps, "ldm.steps", usize, 4000, "training steps"),
    (ldm_batch, "ldm.batch", usize, 128, "training batch size"),
    (ldm_lr, "ldm.lr", f64, 1e-3, "learning rate"),
    (sample_n, "sample.n", usize, 100, "paths to generate"),
    (sample_max_len, "sample.max_len", usize, 64, "generation length cap"),
    (eval_n, "eval.n", usize, 50, "test paths scored during evaluation"),
    (
        eval_k_latents,
        "eval.k_latents",
        usize,
        8,
        "latents drawn from the diffusion prior per path for the LPD likelihood"
    ),
    (
        bench_lengths,
        "bench.lengths",
        Vec<usize>,
        vec![8, 16, 32, 64],
        "target lengths swept by the sampling benchmark"
    ),
    (bench_repeats, "bench.repeats", usize, 5, "timed repeats per point (median reported)"),
    (stochastic, "stochastic", bool, false, "draw final vertices instead of argmax"),
    (cond, "cond", bool, false, "conditional (origin/destination) mode"),
    (ori, "ori", Option<u32>, None, "origin vertex for planning"),
    (dst, "dst", Option<u32>, None, "destination vertex for planning"),
];

impl RunConfig {
    /// Parses a flat `key = value` config document.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The fully resolved config as `key = value` lines.
    pub fn resolved(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    /// Checks cross-field requirements. The graph spec is mandatory: either
    /// both grid dimensions or both graph files.
    pub fn validate(&self) -> Result<()> {
        let grid = self.graph_rows >= 2 && self.graph_cols >= 2;
        let files = self.graph_edges.is_some() && self.graph_coords.is_some();
        if !grid && !files {
            return Err(Error::Config(
                "missing graph spec: set `graph.rows` and `graph.cols` (>= 2), or `graph.edges` and `graph.coords`"
                    .into(),
            ));
        }
        if self.data_max_len < 2 {
            return Err(Error::Config("data.max_len must be >= 2".into()));
        }
        Ok(())
    }

    /// Loads or builds the graph this config describes.
    pub fn build_graph(&self) -> Result<crate::graph::Graph> {
        self.validate()?;
        if let (Some(e), Some(c)) = (&self.graph_edges, &self.graph_coords) {
            crate::graph::load_graph(e, c)
        } else {
            crate::graph::make_grid_graph(self.graph_rows, self.graph_cols)
        }
    }
}

trait ConfigValue: Sized {
    fn parse_cfg(s: &str) -> Option<Self>;
    fn format_cfg(&self) -> String;
}

fn parse_value<T: ConfigValue>(key: &str, s: &str) -> Result<T> {
    T::parse_cfg(s).ok_or_else(|| Error::Config(format!("bad value `{s}` for key `{key}`")))
}

fn format_value<T: ConfigValue>(v: &T) -> String {
    v.format_cfg()
}

macro_rules! via_fromstr {
    ($($ty:ty),+) => {
        $(impl ConfigValue for $ty {
            fn parse_cfg(s: &str) -> Option<Self> {
                s.parse().ok()
            }
            fn format_cfg(&self) -> String {
                self.to_string()
            }
        })+
    };
}

via_fromstr!(u32, u64, u128, usize, f64, bool);

impl ConfigValue for PathBuf {
    fn parse_cfg(s: &str) -> Option<Self> {
        Some(PathBuf::from(s))
    }
    fn format_cfg(&self) -> String {
        self.display().to_string()
    }
}

impl ConfigValue for OptimizerKind {
    fn parse_cfg(s: &str) -> Option<Self> {
        match s {
            "adam" => Some(OptimizerKind::Adam),
            "sgd" => Some(OptimizerKind::Sgd),
            _ => None,
        }
    }
    fn format_cfg(&self) -> String {
        match self {
            OptimizerKind::Adam => "adam".into(),
            OptimizerKind::Sgd => "sgd".into(),
        }
    }
}

impl<T: ConfigValue> ConfigValue for Option<T> {
    fn parse_cfg(s: &str) -> Option<Self> {
        if s == "none" || s.is_empty() {
            Some(None)
        } else {
            T::parse_cfg(s).map(Some)
        }
    }
    fn format_cfg(&self) -> String {
        match self {
            None => "none".into(),
            Some(v) => v.format_cfg(),
        }
    }
}

impl ConfigValue for Vec<usize> {
    fn parse_cfg(s: &str) -> Option<Self> {
        s.split(',')
            .map(|p| p.trim().parse().ok())
            .collect::<Option<Vec<usize>>>()
            .filter(|v| !v.is_empty())
    }
    fn format_cfg(&self) -> String {
        self.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        let cfg = RunConfig::parse(
            "graph.rows = 8\ngraph.cols = 8\nseed = 7\nbench.lengths = 4, 8, 12\n# comment\n",
        )
        .unwrap();
        assert_eq!(cfg.graph_rows, 8);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.bench_lengths, vec![4, 8, 12]);
        let again = RunConfig::parse(&cfg.resolved()).unwrap();
        assert_eq!(again.resolved(), cfg.resolved());
    }

    #[test]
    fn unknown_key_is_error() {
        let err = RunConfig::parse("grpah.rows = 8").unwrap_err();
        assert!(err.to_string().contains("grpah.rows"));
    }

    #[test]
    fn missing_graph_spec_is_named() {
        let cfg = RunConfig::parse("seed = 1").unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("graph.rows"));
    }

    #[test]
    fn bad_value_is_error() {
        let err = RunConfig::parse("seed = pineapple").unwrap_err();
        assert!(err.to_string().contains("seed"));
    }
}
