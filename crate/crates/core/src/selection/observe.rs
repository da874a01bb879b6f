use crate::parallel::Jobs;

/// What a procedure is doing with the cultures it reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Scaler statistics are computed from these cultures.
    Scale,
    /// Hyperboxes and experts are fitted on these cultures.
    Fit,
    /// Feature correlations are computed from these cultures.
    Rank,
    /// Held-out cultures scored by a fitted model.
    Evaluate,
}

impl Stage {
    /// Stages whose data shapes a model, as opposed to only scoring it.
    pub fn is_training(self) -> bool {
        !matches!(self, Stage::Evaluate)
    }
}

/// Receives every data access made by the model-selection procedures.
///
/// `scope` lists the fold indices from the outermost cross-validation
/// inwards, e.g. `[2, 4]` is inner fold 4 of outer fold 2.
pub trait Observer: Sync {
    fn observe(&self, scope: &[usize], stage: Stage, cultures: &[String]);
}

/// Observer that ignores everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoObserver;

impl Observer for NoObserver {
    fn observe(&self, _: &[usize], _: Stage, _: &[String]) {}
}

/// Prefixes the scope with a fold index.
pub(crate) struct Scoped<'a> {
    pub parent: &'a dyn Observer,
    pub fold: usize,
}

impl Observer for Scoped<'_> {
    fn observe(&self, scope: &[usize], stage: Stage, cultures: &[String]) {
        let mut full = Vec::with_capacity(scope.len() + 1);
        full.push(self.fold);
        full.extend_from_slice(scope);
        self.parent.observe(&full, stage, cultures);
    }
}

/// Execution options shared by the evaluation procedures.
#[derive(Clone, Copy)]
pub struct EvalOptions<'a> {
    pub jobs: Jobs,
    pub observer: &'a dyn Observer,
}

impl Default for EvalOptions<'_> {
    fn default() -> Self {
        EvalOptions {
            jobs: Jobs::Auto,
            observer: &NoObserver,
        }
    }
}

impl<'a> EvalOptions<'a> {
    pub fn with_jobs(jobs: Jobs) -> Self {
        EvalOptions {
            jobs,
            ..Default::default()
        }
    }

    pub(crate) fn scoped<'b>(&self, scope: &'b Scoped<'b>) -> EvalOptions<'b>
    where
        'a: 'b,
    {
        EvalOptions {
            jobs: self.jobs,
            observer: scope,
        }
    }
}
