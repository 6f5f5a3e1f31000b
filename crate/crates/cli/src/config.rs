use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use storyrec_core::config::{ModelParams, StoryParams, Thresholds};

#[derive(Debug, Parser)]
#[command(name = "storyrec", version, about = "Latent-dimension movie recommendations told as stories")]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Load the ratings, factorize them and write a snapshot.
    Preprocess,
    /// Per-user degree sums over like and dislike regions, as CSV plus a summary.
    Validate {
        /// CSV destination; the summary is written next to it as JSON.
        #[arg(long, env = "STORYREC_OUT", default_value = "validation.csv")]
        out: PathBuf,
    },
    /// Print stories for one user as JSON lines.
    Recommend {
        #[arg(long, env = "STORYREC_USER")]
        user: u32,
        #[arg(long, env = "STORYREC_STORIES", default_value_t = 5)]
        stories: usize,
        /// Familiar preference in [0, 1].
        #[arg(long = "f", env = "STORYREC_F", default_value_t = 0.5)]
        familiar: f64,
        /// Typical preference in [0, 1].
        #[arg(long = "t", env = "STORYREC_T", default_value_t = 0.5)]
        typical: f64,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "STORYREC_LISTEN", default_value = "127.0.0.1:8080")]
        listen: String,
    },
}

/// Parameters shared by every command. Each can be given as a flag or as
/// the `STORYREC_*` environment variable; the flag wins.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ConfigArgs {
    #[arg(long, global = true, env = "STORYREC_DATA_DIR", default_value = "data/ml-100k")]
    pub data_dir: PathBuf,
    #[arg(long, global = true, env = "STORYREC_SNAPSHOT", default_value = "data/storyrec.snap")]
    pub snapshot: PathBuf,
    /// Truncation rank; defaults to 20 for preprocess and to the snapshot's rank otherwise.
    #[arg(long, global = true, env = "STORYREC_K")]
    pub k: Option<usize>,
    #[arg(long, global = true, env = "STORYREC_TAU_PLUS", default_value_t = Thresholds::VALIDATION.like)]
    pub tau_plus: f64,
    #[arg(long, global = true, env = "STORYREC_TAU_MINUS", default_value_t = Thresholds::VALIDATION.dislike)]
    pub tau_minus: f64,
    #[arg(long, global = true, env = "STORYREC_TAU_R", default_value_t = 0.0)]
    pub tau_r: f64,
    /// Adjusted rating above which a similar user's rating recommends a movie.
    #[arg(long, global = true, env = "STORYREC_WC", default_value_t = 3.0)]
    pub wc: f64,
    #[arg(long, global = true, env = "STORYREC_W_PLUS", default_value_t = 5.0)]
    pub w_plus: f64,
    #[arg(long, global = true, env = "STORYREC_W_O", default_value_t = 10.0)]
    pub w_o: f64,
    #[arg(long, global = true, env = "STORYREC_W_THETA", default_value_t = 10.0)]
    pub w_theta: f64,
    #[arg(long, global = true, env = "STORYREC_W_INT", default_value_t = 1.0)]
    pub w_int: f64,
    #[arg(long, global = true, env = "STORYREC_TAU_V", default_value_t = 0.5)]
    pub tau_v: f64,
    #[arg(long, global = true, env = "STORYREC_TAU_S", default_value_t = 0.1)]
    pub tau_s: f64,
    #[arg(long, global = true, env = "STORYREC_RHO", default_value_t = 1.0 / 3.0)]
    pub rho: f64,
    #[arg(long, global = true, env = "STORYREC_MAX_DIMS", default_value_t = 8)]
    pub max_dims: usize,
    #[arg(long, global = true, env = "STORYREC_MIN_DIMS", default_value_t = 3)]
    pub min_dims: usize,
    /// Keep the given thresholds for every user instead of relaxing them
    /// when a user's groups come out empty.
    #[arg(long, global = true, env = "STORYREC_FIXED_THRESHOLDS")]
    pub fixed_thresholds: bool,
    /// Events per story.
    #[arg(long = "T", global = true, env = "STORYREC_LENGTH", default_value_t = 5)]
    pub length: usize,
    #[arg(long, global = true, env = "STORYREC_DELTA_W", default_value_t = 0.1)]
    pub delta_w: f64,
    #[arg(long, global = true, env = "STORYREC_DELTA", default_value_t = 0.15)]
    pub delta: f64,
    #[arg(long, global = true, env = "STORYREC_ALPHA_UP", default_value_t = 1.0)]
    pub alpha_up: f64,
    #[arg(long, global = true, env = "STORYREC_ALPHA_DOWN", default_value_t = 0.9)]
    pub alpha_down: f64,
    #[arg(long, global = true, env = "STORYREC_EPSILON", default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, global = true, env = "STORYREC_MAX_RETRIES", default_value_t = 20)]
    pub max_retries: usize,
    #[arg(long, global = true, env = "STORYREC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Treat unknown user ids as new users with no ratings.
    #[arg(long, global = true, env = "STORYREC_ALLOW_NEW_USERS")]
    pub allow_new_users: bool,
}

pub const DEFAULT_K: usize = 20;

impl ConfigArgs {
    /// Model parameters with `k` resolved by the caller.
    pub fn model_params(&self, k: usize) -> ModelParams {
        ModelParams {
            k,
            thresholds: Thresholds {
                like: self.tau_plus,
                dislike: self.tau_minus,
                recommend: self.tau_r,
            },
            positive_rating: self.wc,
            w_plus: self.w_plus,
            w_overlap: self.w_o,
            w_theta: self.w_theta,
            w_interactive: self.w_int,
            tau_v_ratio: self.tau_v,
            tau_s: self.tau_s,
            rho: self.rho,
            max_dims: self.max_dims,
            min_dims: self.min_dims,
            adaptive_thresholds: !self.fixed_thresholds,
            ..ModelParams::default()
        }
    }

    pub fn story_params(&self) -> StoryParams {
        StoryParams {
            length: self.length,
            window_frac: self.delta_w,
            thumb_radius_frac: self.delta,
            alpha_up: self.alpha_up,
            alpha_down: self.alpha_down,
            epsilon_frac: self.epsilon,
            max_retries: self.max_retries,
            ..StoryParams::default()
        }
    }
}

/// What a command actually runs with, echoed at startup.
#[derive(Debug, Serialize)]
pub struct EffectiveConfig<'a> {
    pub command: &'static str,
    pub data_dir: &'a std::path::Path,
    pub snapshot: &'a std::path::Path,
    pub seed: u64,
    pub allow_new_users: bool,
    pub model: &'a ModelParams,
    pub story: &'a StoryParams,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub extra: serde_json::Value,
}
