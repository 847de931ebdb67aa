use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::anneal::{LayeredParams, MultiSaParams};
use crate::classical::GaParams;
use crate::model::{
    builtin_instance, generate_scaling_instance, BuiltinInstance, ConstraintSet, WorkflowInstance, SCALING_SIZES,
};
use crate::report::names;
use crate::strategy::StrategyConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    /// Progressive constraint activation.
    Exp0,
    /// Penalty multiplier sweep.
    Exp1,
    /// Ground-truth validation.
    Exp2,
    /// Scaling.
    Exp3,
}

impl ExperimentId {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exp0 => "exp0",
            Self::Exp1 => "exp1",
            Self::Exp2 => "exp2",
            Self::Exp3 => "exp3",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = PlanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exp0" => Ok(Self::Exp0),
            "exp1" => Ok(Self::Exp1),
            "exp2" => Ok(Self::Exp2),
            "exp3" => Ok(Self::Exp3),
            other => Err(PlanError::UnknownExperiment(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolverKind {
    Exact,
    Heft,
    Ga,
    QuboSa,
    QuboMultiSa,
    QuboLayered,
    Strategy(StrategyConfig),
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact => names::EXACT,
            Self::Heft => names::HEFT,
            Self::Ga => names::GA,
            Self::QuboSa => names::QUBO_SA,
            Self::QuboMultiSa => names::QUBO_MULTI_SA,
            Self::QuboLayered => names::QUBO_LAYERED,
            Self::Strategy(c) => c.name(),
        }
    }

    /// Whether the result depends on the penalty multiplier of the cell.
    pub fn uses_alpha(&self) -> bool {
        matches!(self, Self::QuboSa)
    }

    /// Solver names accepted on the command line.
    pub fn parse(name: &str) -> Option<Self> {
        let base = match name {
            names::EXACT => Self::Exact,
            names::HEFT => Self::Heft,
            names::GA => Self::Ga,
            names::QUBO_SA | "sa" => Self::QuboSa,
            names::QUBO_MULTI_SA | "multi-sa" => Self::QuboMultiSa,
            names::QUBO_LAYERED | "layered" => Self::QuboLayered,
            other => {
                return StrategyConfig::all()
                    .into_iter()
                    .find(|c| c.name() == other)
                    .map(Self::Strategy)
            }
        };
        Some(base)
    }

    /// The six solver families compared in every experiment.
    pub fn core() -> Vec<Self> {
        vec![
            Self::Exact,
            Self::Heft,
            Self::Ga,
            Self::QuboSa,
            Self::QuboMultiSa,
            Self::QuboLayered,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverEntry {
    pub solver: SolverKind,
    pub runs: usize,
}

impl SolverEntry {
    pub fn new(solver: SolverKind, runs: usize) -> Self {
        Self { solver, runs }
    }
}

/// How `runtime_ms` is filled in. `Disabled` writes zero so that results
/// files are byte-identical across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    Wall,
    Disabled,
}

/// One row group of an experiment: which constraints are active and, for
/// penalty sweeps, which multiplier the annealer uses.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    /// `stage-or-α` column value.
    pub key: String,
    pub constraints: ConstraintSet,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub id: ExperimentId,
    pub solvers: Vec<SolverEntry>,
    pub instances: Vec<WorkflowInstance>,
    pub settings: Vec<Setting>,
    /// Multiplier for the annealers when a setting does not fix one.
    pub default_alpha: f64,
    pub base_seed: u64,
    pub timing: Timing,
    pub exact_timeout: Duration,
    pub ga: GaParams,
    pub multi_sa: MultiSaParams,
    pub layered: LayeredParams,
    pub parallel: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("plan has no solvers")]
    NoSolvers,
    #[error("plan has no instances")]
    NoInstances,
    #[error("plan has no settings")]
    NoSettings,
    #[error("solver `{0}` is scheduled for zero runs")]
    ZeroRuns(String),
    #[error("setting `{0}` has an invalid constraint set (communication requires dependency)")]
    InvalidConstraints(String),
    #[error("penalty multiplier must be positive, got {0}")]
    BadAlpha(f64),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
}

pub const PENALTY_SWEEP: [f64; 6] = [0.05, 0.1, 0.5, 1.0, 2.0, 5.0];
/// Key used for α-independent rows of a penalty sweep.
pub const REFERENCE_KEY: &str = "ref";
pub const FULL_KEY: &str = "full";

fn full_setting() -> Vec<Setting> {
    vec![Setting {
        key: FULL_KEY.to_string(),
        constraints: ConstraintSet::all(),
        alpha: None,
    }]
}

impl ExperimentPlan {
    fn base(id: ExperimentId, instances: Vec<WorkflowInstance>, settings: Vec<Setting>) -> Self {
        Self {
            id,
            solvers: Vec::new(),
            instances,
            settings,
            default_alpha: 1.0,
            base_seed: 0,
            timing: Timing::Wall,
            exact_timeout: Duration::from_secs(300),
            ga: GaParams::default(),
            multi_sa: MultiSaParams::default(),
            layered: LayeredParams::default(),
            parallel: true,
        }
    }

    /// Six-stage constraint ladder on Medium_6T, one run per solver.
    pub fn progressive() -> Self {
        let settings = ConstraintSet::progressive_stages()
            .into_iter()
            .map(|(name, constraints)| Setting {
                key: name.to_string(),
                constraints,
                alpha: None,
            })
            .collect();
        let mut plan = Self::base(
            ExperimentId::Exp0,
            vec![builtin_instance(BuiltinInstance::Medium6T)],
            settings,
        );
        plan.solvers = SolverKind::core().into_iter().map(|s| SolverEntry::new(s, 1)).collect();
        plan
    }

    /// Annealer multiplier sweep on Medium_6T, three runs per multiplier; the
    /// other solvers appear once under the reference key.
    pub fn penalty_sweep() -> Self {
        let mut settings: Vec<Setting> = PENALTY_SWEEP
            .iter()
            .map(|&a| Setting {
                key: format!("{a}"),
                constraints: ConstraintSet::all(),
                alpha: Some(a),
            })
            .collect();
        settings.push(Setting {
            key: REFERENCE_KEY.to_string(),
            constraints: ConstraintSet::all(),
            alpha: None,
        });
        let mut plan = Self::base(
            ExperimentId::Exp1,
            vec![builtin_instance(BuiltinInstance::Medium6T)],
            settings,
        );
        plan.solvers = vec![
            SolverEntry::new(SolverKind::Exact, 1),
            SolverEntry::new(SolverKind::Heft, 1),
            SolverEntry::new(SolverKind::Ga, 1),
            SolverEntry::new(SolverKind::QuboSa, 3),
            SolverEntry::new(SolverKind::QuboMultiSa, 3),
            SolverEntry::new(SolverKind::QuboLayered, 3),
        ];
        plan
    }

    /// W1 and W2 under all constraints, with the five strategies.
    pub fn validation() -> Self {
        let mut plan = Self::base(
            ExperimentId::Exp2,
            vec![
                builtin_instance(BuiltinInstance::W1),
                builtin_instance(BuiltinInstance::W2),
            ],
            full_setting(),
        );
        plan.solvers = vec![
            SolverEntry::new(SolverKind::Exact, 1),
            SolverEntry::new(SolverKind::Heft, 1),
            SolverEntry::new(SolverKind::Ga, 3),
            SolverEntry::new(SolverKind::QuboSa, 5),
            SolverEntry::new(SolverKind::QuboMultiSa, 3),
            SolverEntry::new(SolverKind::QuboLayered, 2),
        ];
        plan.solvers.extend(
            StrategyConfig::all()
                .into_iter()
                .map(|c| SolverEntry::new(SolverKind::Strategy(c), 5)),
        );
        plan
    }

    /// Three generated instances per size, seeded `base_seed + k`.
    pub fn scaling(base_seed: u64) -> Self {
        let instances = SCALING_SIZES
            .iter()
            .flat_map(|&n| {
                (0..3).map(move |k| generate_scaling_instance(n, base_seed + k).expect("supported scaling size"))
            })
            .collect();
        let mut plan = Self::base(ExperimentId::Exp3, instances, full_setting());
        plan.base_seed = base_seed;
        plan.solvers = vec![
            SolverEntry::new(SolverKind::Exact, 1),
            SolverEntry::new(SolverKind::Heft, 1),
            SolverEntry::new(SolverKind::Ga, 1),
            SolverEntry::new(SolverKind::QuboSa, 3),
            SolverEntry::new(SolverKind::QuboMultiSa, 3),
            SolverEntry::new(SolverKind::QuboLayered, 1),
            SolverEntry::new(SolverKind::Strategy(StrategyConfig::hybrid_repair()), 3),
        ];
        plan
    }

    pub fn for_id(id: ExperimentId) -> Self {
        match id {
            ExperimentId::Exp0 => Self::progressive(),
            ExperimentId::Exp1 => Self::penalty_sweep(),
            ExperimentId::Exp2 => Self::validation(),
            ExperimentId::Exp3 => Self::scaling(0),
        }
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn with_timing(mut self, timing: Timing) -> Self {
        self.timing = timing;
        self
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if self.solvers.is_empty() {
            return Err(PlanError::NoSolvers);
        }
        if self.instances.is_empty() {
            return Err(PlanError::NoInstances);
        }
        if self.settings.is_empty() {
            return Err(PlanError::NoSettings);
        }
        if let Some(e) = self.solvers.iter().find(|e| e.runs == 0) {
            return Err(PlanError::ZeroRuns(e.solver.name().to_string()));
        }
        if let Some(s) = self.settings.iter().find(|s| !s.constraints.is_valid()) {
            return Err(PlanError::InvalidConstraints(s.key.clone()));
        }
        for a in self.settings.iter().filter_map(|s| s.alpha).chain([self.default_alpha]) {
            if !(a > 0.0 && a.is_finite()) {
                return Err(PlanError::BadAlpha(a));
            }
        }
        Ok(())
    }

    /// Whether `solver` runs under `setting`. In a sweep, multiplier-dependent
    /// solvers run only under multiplier settings and everything else only
    /// under the reference setting.
    pub fn runs_in(&self, solver: &SolverKind, setting: &Setting) -> bool {
        let sweep = self.settings.iter().any(|s| s.alpha.is_some());
        if !sweep {
            return true;
        }
        solver.uses_alpha() == setting.alpha.is_some()
    }

    /// Every (instance, setting, solver, run) combination, in output order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for (instance, _) in self.instances.iter().enumerate() {
            for (setting, s) in self.settings.iter().enumerate() {
                for (solver, entry) in self.solvers.iter().enumerate() {
                    if !self.runs_in(&entry.solver, s) {
                        continue;
                    }
                    for run in 0..entry.runs {
                        cells.push(Cell {
                            instance,
                            setting,
                            solver,
                            seed: self.base_seed + run as u64,
                        });
                    }
                }
            }
        }
        cells
    }
}

/// Indices into the plan plus the seed of one solver call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub instance: usize,
    pub setting: usize,
    pub solver: usize,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_counts_follow_run_counts() {
        assert_eq!(ExperimentPlan::progressive().cells().len(), 6 * 6);
        // 6 multipliers x 3 annealer runs + reference 1 + 1 + 1 + 3 + 3
        assert_eq!(ExperimentPlan::penalty_sweep().cells().len(), 18 + 9);
        // per instance 1 + 1 + 3 + 5 + 3 + 2 + 5 x 5
        assert_eq!(ExperimentPlan::validation().cells().len(), 2 * 40);
        // per instance 1 + 1 + 1 + 3 + 3 + 1 + 3
        assert_eq!(ExperimentPlan::scaling(0).cells().len(), 12 * 13);
    }

    #[test]
    fn validation_errors() {
        let mut p = ExperimentPlan::validation();
        p.solvers.clear();
        assert_eq!(p.validate(), Err(PlanError::NoSolvers));
        let mut p = ExperimentPlan::validation();
        p.instances.clear();
        assert_eq!(p.validate(), Err(PlanError::NoInstances));
        let mut p = ExperimentPlan::validation();
        p.solvers[0].runs = 0;
        assert_eq!(p.validate(), Err(PlanError::ZeroRuns("exact".into())));
        let mut p = ExperimentPlan::validation();
        p.settings[0].constraints.dependency = false;
        assert!(matches!(p.validate(), Err(PlanError::InvalidConstraints(_))));
        assert!(ExperimentPlan::penalty_sweep().validate().is_ok());
    }

    #[test]
    fn stages_are_cumulative() {
        let p = ExperimentPlan::progressive();
        let count = |c: &ConstraintSet| {
            [c.assignment, c.capacity, c.feature, c.dependency, c.communication]
                .iter()
                .filter(|b| **b)
                .count()
        };
        for (k, s) in p.settings.iter().enumerate() {
            assert_eq!(count(&s.constraints), k);
        }
    }

    #[test]
    fn solver_names_parse() {
        for kind in SolverKind::core() {
            assert_eq!(SolverKind::parse(kind.name()), Some(kind));
        }
        assert_eq!(
            SolverKind::parse("two-stage"),
            Some(SolverKind::Strategy(StrategyConfig::two_stage()))
        );
        assert_eq!(SolverKind::parse("cp-sat"), None);
    }
}
