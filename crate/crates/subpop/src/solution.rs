//! Candidate solutions.

use crate::problem::Problem;

/// A candidate solution: decision vector plus, once evaluated, its objective
/// vector and feasibility record.
///
/// The objective vector is write-once: it is set at evaluation time and never
/// mutated afterwards, so a `Solution` can be shared freely between archives
/// and populations without aliasing hazards.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    x: Vec<f64>,
    f: Option<Vec<f64>>,
    feasible: bool,
    bound_violation: f64,
    origin: Option<usize>,
}

impl Solution {
    /// Wraps a decision vector without evaluating it, recording feasibility
    /// against `problem`'s box.
    pub fn unevaluated<P: Problem + ?Sized>(x: Vec<f64>, problem: &P) -> Self {
        let violation = problem.bound_violation(&x);
        Self {
            x,
            f: None,
            feasible: violation == 0.0,
            bound_violation: violation,
            origin: None,
        }
    }

    /// Wraps and immediately evaluates a decision vector.
    pub fn evaluated<P: Problem + ?Sized>(x: Vec<f64>, problem: &P) -> Self {
        let mut s = Self::unevaluated(x, problem);
        s.evaluate(problem);
        s
    }

    /// Evaluates the solution if it has no objective vector yet; a second
    /// call is a no-op, preserving the write-once contract.
    pub fn evaluate<P: Problem + ?Sized>(&mut self, problem: &P) {
        if self.f.is_none() {
            self.f = Some(problem.evaluate(&self.x));
        }
    }

    /// Decision vector.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Objective vector, if evaluated.
    pub fn objectives(&self) -> Option<&[f64]> {
        self.f.as_deref()
    }

    /// Objective vector; panics if the solution was never evaluated.
    ///
    /// Generation steps evaluate every trial on creation, so inside the
    /// algorithms this accessor is the convenient form.
    pub fn f(&self) -> &[f64] {
        self.f.as_deref().expect("solution not evaluated")
    }

    /// Whether the decision vector lies inside the problem box.
    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    /// Total box-constraint violation (0 when feasible).
    pub fn bound_violation(&self) -> f64 {
        self.bound_violation
    }

    /// Index of the subpopulation that created this solution, if tracked.
    pub fn origin(&self) -> Option<usize> {
        self.origin
    }

    /// Tags the creating subpopulation; used for mixture accounting.
    pub fn set_origin(&mut self, subpop: usize) {
        self.origin = Some(subpop);
    }
}
