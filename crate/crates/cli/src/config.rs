//! Run configuration: a TOML file with per-stage sections, every field
//! optional with documented defaults. Command-line flags override the file.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use guda_core::env::{EnvModel, EnvOverrides, MazeSpec, REGISTERED_TASKS};
use guda_core::learner::TrainConfig;
use guda_core::sampling::{AugmentationRule, RuleKind};

use crate::pipeline::PipelineError;

/// Which augmentation strategy a pipeline cell runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Strategy {
    /// Guided sampling rules.
    Guda,
    /// Uniform-random parameter draws.
    Random,
    /// No augmentation: train on the demonstrations alone.
    None,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Guda => "guda",
            Strategy::Random => "random",
            Strategy::None => "none",
        }
    }

    pub const ALL: [Strategy; 3] = [Strategy::Guda, Strategy::Random, Strategy::None];
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub task: Option<String>,
    pub out: Option<PathBuf>,
    pub seeds: Option<Vec<u64>>,
    /// Optional maze layout text file overriding the built-in layout.
    pub maze_layout: Option<PathBuf>,
    #[serde(default)]
    pub demo: DemoSection,
    #[serde(default)]
    pub rule: RuleSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub eval: EvalSection,
    #[serde(default)]
    pub report: ReportSection,
    #[serde(default)]
    pub env: EnvSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DemoSection {
    pub episodes: Option<usize>,
    pub noise: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RuleSection {
    /// Rule name: random, guided-maze, guided-antmaze, guided-parking,
    /// guided-soccer. Defaults to the task's guided rule.
    pub name: Option<String>,
    /// Source window length; 0 or absent means the rule default.
    pub k: Option<usize>,
    /// Target augmented transition count.
    pub n: Option<usize>,
    pub angular_sigma: Option<f64>,
    pub positional_sigma: Option<f64>,
    pub max_retries: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub steps: Option<usize>,
    pub hidden: Option<Vec<usize>>,
    pub init_scale: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub episodes: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    pub bootstrap_resamples: Option<usize>,
    pub confidence_level: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct EnvSection {
    pub dt: Option<f64>,
    pub friction: Option<f64>,
    pub v_max: Option<f64>,
    pub goal_radius: Option<f64>,
    pub horizon: Option<usize>,
    pub gamma: Option<f64>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub task: String,
    pub out: PathBuf,
    pub seeds: Vec<u64>,
    pub maze_layout: Option<PathBuf>,
    pub demo_episodes: usize,
    pub demo_noise: f64,
    pub demo_seed: u64,
    pub rule_name: Option<String>,
    pub segment_len: Option<usize>,
    pub target_transitions: usize,
    pub angular_sigma: Option<f64>,
    pub positional_sigma: Option<f64>,
    pub max_retries: Option<usize>,
    pub train: TrainConfig,
    pub eval_episodes: usize,
    pub bootstrap_resamples: usize,
    pub confidence_level: f64,
    pub env_overrides: EnvOverrides,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            task: "maze-umaze".to_string(),
            out: PathBuf::from("runs"),
            seeds: (0..10).collect(),
            maze_layout: None,
            demo_episodes: 5,
            demo_noise: 0.5,
            demo_seed: 1234,
            rule_name: None,
            segment_len: None,
            target_transitions: 50_000,
            angular_sigma: None,
            positional_sigma: None,
            max_retries: None,
            train: TrainConfig::default(),
            eval_episodes: 100,
            bootstrap_resamples: 2000,
            confidence_level: 0.95,
            env_overrides: EnvOverrides::default(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let file: FileConfig = toml::from_str(&text)
            .map_err(|e| PipelineError::Config(format!("bad config {}: {e}", path.display())))?;
        Ok(Self::from_sections(file))
    }

    pub fn from_sections(file: FileConfig) -> RunConfig {
        let d = RunConfig::default();
        RunConfig {
            task: file.task.unwrap_or(d.task),
            out: file.out.unwrap_or(d.out),
            seeds: file.seeds.unwrap_or(d.seeds),
            maze_layout: file.maze_layout,
            demo_episodes: file.demo.episodes.unwrap_or(d.demo_episodes),
            demo_noise: file.demo.noise.unwrap_or(d.demo_noise),
            demo_seed: file.demo.seed.unwrap_or(d.demo_seed),
            rule_name: file.rule.name,
            segment_len: file.rule.k.filter(|k| *k > 0),
            target_transitions: file.rule.n.unwrap_or(d.target_transitions),
            angular_sigma: file.rule.angular_sigma,
            positional_sigma: file.rule.positional_sigma,
            max_retries: file.rule.max_retries,
            train: TrainConfig {
                learning_rate: file.train.learning_rate.unwrap_or(d.train.learning_rate),
                batch_size: file.train.batch_size.unwrap_or(d.train.batch_size),
                steps: file.train.steps.unwrap_or(d.train.steps),
                hidden: file.train.hidden.unwrap_or(d.train.hidden),
                init_scale: file.train.init_scale.unwrap_or(d.train.init_scale),
                seed: 0,
            },
            eval_episodes: file.eval.episodes.unwrap_or(d.eval_episodes),
            bootstrap_resamples: file.report.bootstrap_resamples.unwrap_or(d.bootstrap_resamples),
            confidence_level: file.report.confidence_level.unwrap_or(d.confidence_level),
            env_overrides: EnvOverrides {
                dt: file.env.dt,
                friction: file.env.friction,
                v_max: file.env.v_max,
                goal_radius: file.env.goal_radius,
                horizon: file.env.horizon,
                gamma: file.env.gamma,
            },
        }
    }

    /// Build the task model, honoring a custom maze layout file if set.
    pub fn env(&self) -> Result<EnvModel, PipelineError> {
        if let Some(layout_path) = &self.maze_layout {
            if !self.task.starts_with("maze-") {
                return Err(PipelineError::Config(format!(
                    "maze_layout set but task '{}' is not a maze",
                    self.task
                )));
            }
            let text = std::fs::read_to_string(layout_path).map_err(|e| {
                PipelineError::Config(format!("cannot read maze layout {}: {e}", layout_path.display()))
            })?;
            let spec = MazeSpec::parse(&text)
                .map_err(|e| PipelineError::Config(format!("bad maze layout: {e}")))?;
            return EnvModel::from_maze(&self.task, spec, self.env_overrides)
                .map_err(|e| PipelineError::Config(e.to_string()));
        }
        if !REGISTERED_TASKS.contains(&self.task.as_str()) {
            return Err(PipelineError::Config(format!(
                "unknown task '{}'; registered: {}",
                self.task,
                REGISTERED_TASKS.join(", ")
            )));
        }
        EnvModel::for_task_with(&self.task, self.env_overrides)
            .map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// Resolve the augmentation rule for a strategy, applying config
    /// overrides on top of the task defaults.
    pub fn rule_for(&self, env: &EnvModel, strategy: Strategy) -> Result<AugmentationRule, PipelineError> {
        let mut rule = match strategy {
            Strategy::Random => AugmentationRule::random_for(env),
            Strategy::None | Strategy::Guda => AugmentationRule::guided_for(env),
        };
        if strategy == Strategy::Guda {
            if let Some(name) = &self.rule_name {
                let kind = RuleKind::from_name(name).map_err(|e| PipelineError::Config(e.to_string()))?;
                rule.kind = kind;
            }
        }
        if let Some(k) = self.segment_len {
            rule.segment_len = k;
        }
        if let Some(s) = self.angular_sigma {
            rule.angular_sigma = s;
        }
        if let Some(s) = self.positional_sigma {
            rule.positional_sigma = s;
        }
        if let Some(r) = self.max_retries {
            rule.max_retries = r;
        }
        if !rule.applicable(env) {
            return Err(PipelineError::Config(format!(
                "rule '{}' does not apply to task '{}'",
                rule.kind.name(),
                self.task
            )));
        }
        Ok(rule)
    }

    /// Augmented transition target for a strategy; the no-augmentation
    /// baseline is the n = 0 edge of the same pipeline.
    pub fn target_for(&self, strategy: Strategy) -> usize {
        match strategy {
            Strategy::None => 0,
            _ => self.target_transitions,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let cfg = RunConfig::default();
        let env = cfg.env().unwrap();
        assert_eq!(env.task, "maze-umaze");
        let rule = cfg.rule_for(&env, Strategy::Guda).unwrap();
        assert_eq!(rule.kind, RuleKind::GuidedMaze);
        assert_eq!(rule.segment_len, 16);
        assert_eq!(cfg.target_for(Strategy::None), 0);
    }

    #[test]
    fn toml_overrides_apply() {
        let file: FileConfig = toml::from_str(
            r#"
task = "parking"
seeds = [3, 4]

[rule]
n = 1000
angular_sigma = 0.05

[train]
steps = 500

[env]
horizon = 80
"#,
        )
        .unwrap();
        let cfg = RunConfig::from_sections(file);
        assert_eq!(cfg.task, "parking");
        assert_eq!(cfg.seeds, vec![3, 4]);
        assert_eq!(cfg.target_transitions, 1000);
        assert_eq!(cfg.train.steps, 500);
        let env = cfg.env().unwrap();
        assert_eq!(env.mdp.horizon, 80);
        let rule = cfg.rule_for(&env, Strategy::Guda).unwrap();
        assert_eq!(rule.kind, RuleKind::GuidedParking);
        assert_eq!(rule.angular_sigma, 0.05);
        // The random baseline keeps the same overrides but swaps the kind.
        let random = cfg.rule_for(&env, Strategy::Random).unwrap();
        assert_eq!(random.kind, RuleKind::RandomDa);
        assert_eq!(random.angular_sigma, 0.05);
    }

    #[test]
    fn unknown_fields_and_tasks_are_config_errors() {
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
        let cfg = RunConfig {
            task: "maze-wat".into(),
            ..RunConfig::default()
        };
        assert!(matches!(cfg.env(), Err(PipelineError::Config(_))));
    }

    #[test]
    fn guided_rule_name_override_checks_applicability() {
        let cfg = RunConfig {
            task: "parking".into(),
            rule_name: Some("guided-maze".into()),
            ..RunConfig::default()
        };
        let env = cfg.env().unwrap();
        assert!(matches!(
            cfg.rule_for(&env, Strategy::Guda),
            Err(PipelineError::Config(_))
        ));
        // Antmaze-style override on a maze task is fine.
        let cfg = RunConfig {
            task: "maze-medium".into(),
            rule_name: Some("guided-antmaze".into()),
            ..RunConfig::default()
        };
        let env = cfg.env().unwrap();
        let rule = cfg.rule_for(&env, Strategy::Guda).unwrap();
        assert_eq!(rule.kind, RuleKind::GuidedAntmazeStyle);
    }
}
