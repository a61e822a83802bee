//! Gradient descent on a topology-aware total loss over a fixed simplicial
//! complex, with the bookkeeping needed to check the convergence argument
//! step by step.
//!
//! The model is the identity: the parameters `W` are the vertex values of a
//! lower-star filtration, clamped to `[0, 1]`. The loss is
//!
//! ```text
//! G(W) = s · Σ_v (W_v − target_v)²  +  λ · L_topo(W)
//! ```
//!
//! where `L_topo` is the cheapest injective matching of the target
//! diagram's off-diagonal points into the diagram of `W`. During a step the
//! matching and the critical vertices are held fixed, which turns `G` into a
//! quadratic `G_t`; the configuration is refreshed afterwards.

use rand::Rng;

use crate::error::{Result, TopoError};
use crate::format::format_float;
use crate::geometry::Simplex;
use crate::metrics::{injective_matching_cost, DiagramPointRef};
use crate::persistence::{closure, compute_persistence, lower_star_filtration, PersistenceDiagram};

/// Death given to essential bars, the top of the parameter range.
pub const ESSENTIAL_CAP: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ToyProblem {
    complex: Vec<Simplex>,
    targets: Vec<f64>,
    supv_weight: f64,
    initial: Option<Vec<f64>>,
    target_diagram: PersistenceDiagram,
}

fn check_unit(name: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(i) => Err(TopoError::InvalidInput(format!("{name}[{i}] = {} is outside [0, 1]", values[i]))),
        None => Ok(()),
    }
}

impl ToyProblem {
    /// `complex` is closed under faces here; its vertices must be
    /// `0..targets.len()`.
    pub fn new(complex: &[Simplex], targets: Vec<f64>, supv_weight: f64) -> Result<Self> {
        let complex = closure(complex);
        let n = targets.len();
        let vertices: Vec<usize> = complex.iter().filter(|s| s.dim() == 0).map(|s| s.vertices()[0]).collect();
        if vertices != (0..n).collect::<Vec<_>>() {
            return Err(TopoError::InvalidInput(format!("complex vertices must be exactly 0..{n}")));
        }
        check_unit("target", &targets)?;
        if !(supv_weight >= 0.0) || !supv_weight.is_finite() {
            return Err(TopoError::InvalidInput("supervision weight must be finite and non-negative".into()));
        }
        let target_diagram =
            compute_persistence(&lower_star_filtration(&complex, &targets)?)?.capped(ESSENTIAL_CAP).without_diagonal();
        Ok(Self { complex, targets, supv_weight, initial: None, target_diagram })
    }

    pub fn with_initial(mut self, initial: Vec<f64>) -> Result<Self> {
        if initial.len() != self.targets.len() {
            return Err(TopoError::DimensionMismatch(format!(
                "{} initial values for {} vertices",
                initial.len(),
                self.targets.len()
            )));
        }
        check_unit("initial", &initial)?;
        self.initial = Some(initial);
        Ok(self)
    }

    pub fn complex(&self) -> &[Simplex] {
        &self.complex
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn supv_weight(&self) -> f64 {
        self.supv_weight
    }

    pub fn initial(&self) -> Option<&[f64]> {
        self.initial.as_deref()
    }

    /// Off-diagonal points of the target diagram, essential bars capped.
    pub fn target_diagram(&self) -> &PersistenceDiagram {
        &self.target_diagram
    }

    pub fn vertex_count(&self) -> usize {
        self.targets.len()
    }

    pub fn supervision_loss(&self, w: &[f64]) -> f64 {
        self.supv_weight * w.iter().zip(&self.targets).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// The largest step allowed by [`step_size_bound`].
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub lambda_topo: f64,
    pub epsilon: f64,
    pub eta: StepSize,
    pub max_iters: usize,
    /// Iterations between diagram and matching refreshes; 1 refreshes after
    /// every step.
    pub persloss_period: usize,
    /// Seeds the random start when the problem has no initial values.
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            lambda_topo: 1.0,
            epsilon: 1e-2,
            eta: StepSize::Auto,
            max_iters: 1_000_000,
            persloss_period: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremConstants {
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    pub b: usize,
    pub lambda: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Bounds for the quadratic supervision loss on `[0, 1]^n` and the derived
/// constants of the total loss.
pub fn estimate_constants(problem: &ToyProblem, lambda: f64) -> TheoremConstants {
    let s = problem.supv_weight;
    let n = problem.vertex_count() as f64;
    let (l0, l1, l2) = (s * n, 2.0 * s * n.sqrt(), 2.0 * s);
    let b = problem.target_diagram.len();
    let lb = lambda * b as f64;
    TheoremConstants { l0, l1, l2, b, lambda, c0: l0 + lb, c1: l1 + 2.0 * lb, c2: l2 + 5.0 * lb }
}

/// `min{1/(2·l2 + 10·λ·B), ε/(4096·λ²·B²)}`; the second term drops out when
/// `λ·B = 0`.
pub fn step_size_bound(c: &TheoremConstants, epsilon: f64) -> f64 {
    let lb = c.lambda * c.b as f64;
    let first = 1.0 / (2.0 * c.l2 + 10.0 * lb);
    let second = if lb == 0.0 { f64::INFINITY } else { epsilon / (4096.0 * lb * lb) };
    first.min(second)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Held {
    Vertex(usize),
    Const(f64),
}

impl Held {
    fn at(self, w: &[f64]) -> f64 {
        match self {
            Held::Vertex(v) => w[v],
            Held::Const(c) => c,
        }
    }
}

/// One target point and what it is matched to, frozen as vertex references.
#[derive(Debug, Clone, Copy, PartialEq)]
struct HeldTerm {
    birth: f64,
    death: f64,
    pred_birth: Held,
    pred_death: Held,
}

/// Matching and critical vertices at one parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    terms: Vec<HeldTerm>,
    /// Target points matched to a real point rather than the diagonal.
    pub matched: usize,
}

impl Configuration {
    fn topo(&self, w: &[f64]) -> f64 {
        self.terms.iter().map(|t| (t.birth - t.pred_birth.at(w)).powi(2) + (t.death - t.pred_death.at(w)).powi(2)).sum()
    }

    fn topo_gradient(&self, w: &[f64], out: &mut [f64]) {
        for t in &self.terms {
            if let Held::Vertex(v) = t.pred_birth {
                out[v] += 2.0 * (w[v] - t.birth);
            }
            if let Held::Vertex(v) = t.pred_death {
                out[v] += 2.0 * (w[v] - t.death);
            }
        }
    }
}

/// Diagram of `w`, optimal injective matching of the target into it, and the
/// critical vertices of the matched points.
pub fn configuration(problem: &ToyProblem, w: &[f64]) -> Result<Configuration> {
    let dgm = compute_persistence(&lower_star_filtration(&problem.complex, w)?)?.capped(ESSENTIAL_CAP);
    let m = injective_matching_cost(&dgm, &problem.target_diagram);
    let mut terms = Vec::with_capacity(m.pairs.len());
    let mut matched = 0;
    for (src, dst) in &m.pairs {
        let DiagramPointRef::B(i) = *src else { unreachable!() };
        let g = &problem.target_diagram.pairs[i];
        let (pred_birth, pred_death) = match *dst {
            DiagramPointRef::A(j) => {
                matched += 1;
                let p = &dgm.pairs[j];
                let b = Held::Vertex(p.birth_vertex.expect("lower-star pairs carry vertices"));
                let d = match p.death_vertex {
                    Some(v) if !p.is_essential() => Held::Vertex(v),
                    _ => Held::Const(ESSENTIAL_CAP),
                };
                (b, d)
            }
            _ => {
                let mid = 0.5 * (g.birth + g.death);
                (Held::Const(mid), Held::Const(mid))
            }
        };
        terms.push(HeldTerm { birth: g.birth, death: g.death, pred_birth, pred_death });
    }
    Ok(Configuration { terms, matched })
}

/// `G_t(W)` for the configuration `cfg` and its gradient.
fn held_loss(problem: &ToyProblem, cfg: &Configuration, w: &[f64], lambda: f64) -> (f64, f64) {
    let supv = problem.supervision_loss(w);
    let topo = cfg.topo(w);
    (supv + lambda * topo, topo)
}

/// Gradient of `G_t` at `w` with the configuration held fixed.
pub fn held_gradient(problem: &ToyProblem, cfg: &Configuration, w: &[f64], lambda: f64) -> Vec<f64> {
    let mut topo = vec![0.0; w.len()];
    cfg.topo_gradient(w, &mut topo);
    w.iter()
        .zip(&problem.targets)
        .zip(&topo)
        .map(|((a, t), g)| 2.0 * problem.supv_weight * (a - t) + lambda * g)
        .collect()
}

/// `G_t(W)` evaluated against a given configuration.
pub fn held_total_loss(problem: &ToyProblem, cfg: &Configuration, w: &[f64], lambda: f64) -> f64 {
    held_loss(problem, cfg, w, lambda).0
}

/// Total loss with a freshly computed configuration, and that configuration.
pub fn total_loss(problem: &ToyProblem, w: &[f64], lambda: f64) -> Result<(f64, Configuration)> {
    if w.len() != problem.vertex_count() {
        return Err(TopoError::DimensionMismatch(format!(
            "{} values for {} vertices",
            w.len(),
            problem.vertex_count()
        )));
    }
    let cfg = configuration(problem, w)?;
    Ok((held_loss(problem, &cfg, w, lambda).0, cfg))
}

/// One iteration `t`: `G_t(W_t) → G_t(W_{t+1}) → G_{t+1}(W_{t+1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub g_t_wt: f64,
    pub g_t_wt1: f64,
    pub g_t1_wt1: f64,
    pub step_norm: f64,
    /// Supervision loss at `W_{t+1}`.
    pub l_supv: f64,
    /// `L_topo` at `W_{t+1}` under the configuration of step `t`.
    pub l_topo_held: f64,
    /// `L_topo` at `W_{t+1}` under its own configuration.
    pub l_topo_refreshed: f64,
    /// Target points matched off the diagonal after the refresh.
    pub matched: usize,
    pub refreshed: bool,
}

impl TraceRow {
    /// `G_t(W_t) − G_t(W_{t+1})`.
    pub fn step_decrease(&self) -> f64 {
        self.g_t_wt - self.g_t_wt1
    }

    /// `G_t(W_t) − G_{t+1}(W_{t+1})`.
    pub fn net_decrease(&self) -> f64 {
        self.g_t_wt - self.g_t1_wt1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossTrace {
    pub rows: Vec<TraceRow>,
    pub eta: f64,
}

impl LossTrace {
    pub const CSV_HEADER: &'static str =
        "t,G_t(W_t),G_t(W_{t+1}),G_{t+1}(W_{t+1}),step_norm,L_supv,L_topo_held,L_topo_refreshed";

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cells = [r.g_t_wt, r.g_t_wt1, r.g_t1_wt1, r.step_norm, r.l_supv, r.l_topo_held, r.l_topo_refreshed];
            out.push_str(&r.t.to_string());
            for c in cells {
                out.push(',');
                out.push_str(&format_float(c));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The step decrease fell below ε.
    Converged,
    MaxIters,
    /// A loss became non-finite at this iteration; the trace stops there.
    NonFiniteLoss(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOutcome {
    pub w: Vec<f64>,
    pub trace: LossTrace,
    pub stop: StopReason,
    pub constants: TheoremConstants,
}

/// Runs the two-step descent: a gradient step on the held quadratic `G_t`
/// followed by clamping to `[0, 1]`, then a configuration refresh every
/// `persloss_period` iterations. Stops once `G_t(W_t) − G_t(W_{t+1}) < ε`.
pub fn optimize(problem: &ToyProblem, cfg: &OptimizerConfig) -> Result<OptimizeOutcome> {
    if !(cfg.epsilon > 0.0) || !(cfg.lambda_topo >= 0.0) || cfg.persloss_period == 0 {
        return Err(TopoError::InvalidInput("need ε > 0, λ ≥ 0 and a positive refresh period".into()));
    }
    let constants = estimate_constants(problem, cfg.lambda_topo);
    let eta = match cfg.eta {
        StepSize::Auto => step_size_bound(&constants, cfg.epsilon),
        StepSize::Fixed(e) if e > 0.0 && e.is_finite() => e,
        StepSize::Fixed(e) => return Err(TopoError::InvalidInput(format!("step size {e} must be positive"))),
    };
    let lambda = cfg.lambda_topo;
    let mut w: Vec<f64> = match &problem.initial {
        Some(init) => init.clone(),
        None => {
            let mut rng = crate::fixtures::rng(cfg.seed);
            (0..problem.vertex_count()).map(|_| rng.random_range(0.0..=1.0)).collect()
        }
    };
    let mut config = configuration(problem, &w)?;
    let mut rows = Vec::new();
    let mut stop = StopReason::MaxIters;
    for t in 0..cfg.max_iters {
        let (g_t_wt, _) = held_loss(problem, &config, &w, lambda);
        let grad = held_gradient(problem, &config, &w, lambda);
        let next: Vec<f64> = w.iter().zip(&grad).map(|(x, g)| (x - eta * g).clamp(0.0, 1.0)).collect();
        let (g_t_wt1, l_topo_held) = held_loss(problem, &config, &next, lambda);
        let refreshed = (t + 1) % cfg.persloss_period == 0;
        if refreshed {
            config = configuration(problem, &next)?;
        }
        let (g_t1_wt1, l_topo_refreshed) = held_loss(problem, &config, &next, lambda);
        let step_norm = w.iter().zip(&next).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let row = TraceRow {
            t,
            g_t_wt,
            g_t_wt1,
            g_t1_wt1,
            step_norm,
            l_supv: problem.supervision_loss(&next),
            l_topo_held,
            l_topo_refreshed,
            matched: config.matched,
            refreshed,
        };
        let finite = [g_t_wt, g_t_wt1, g_t1_wt1, step_norm].iter().all(|v| v.is_finite());
        if !finite {
            stop = StopReason::NonFiniteLoss(t);
            break;
        }
        rows.push(row);
        w = next;
        if row.step_decrease() < cfg.epsilon {
            stop = StopReason::Converged;
            break;
        }
    }
    Ok(OptimizeOutcome { w, trace: LossTrace { rows, eta }, stop, constants })
}

/// Slack added to both sides of the per-iteration checks.
pub const LEMMA_SLACK: f64 = 1e-9;

/// Per iteration: `‖W_{t+1} − W_t‖ ≤ 2·√(η·(G_t(W_t) − G_t(W_{t+1})))`.
/// A step that increases `G_t` fails outright.
pub fn verify_lemma2(trace: &LossTrace, eta: f64) -> Vec<bool> {
    trace
        .rows
        .iter()
        .map(|r| {
            let d = r.step_decrease();
            d >= -LEMMA_SLACK && r.step_norm <= 2.0 * (eta * d.max(0.0)).sqrt() + LEMMA_SLACK
        })
        .collect()
}

/// Per iteration: the topological loss moves by at most
/// `16·B·√(η·(G_t(W_t) − G_t(W_{t+1})))` when the configuration is
/// refreshed, in either direction.
pub fn verify_lemma3(trace: &LossTrace, constants: &TheoremConstants) -> Vec<bool> {
    trace
        .rows
        .iter()
        .map(|r| {
            let bound = 16.0 * constants.b as f64 * (trace.eta * r.step_decrease().max(0.0)).sqrt();
            (r.l_topo_held - r.l_topo_refreshed).abs() <= bound + LEMMA_SLACK
        })
        .collect()
}

/// Per iteration before the stop: `G_t(W_t) − G_{t+1}(W_{t+1}) ≥ ε/2`.
pub fn verify_net_decrease(trace: &LossTrace, epsilon: f64) -> Vec<bool> {
    trace
        .rows
        .iter()
        .filter(|r| r.step_decrease() >= epsilon)
        .map(|r| r.net_decrease() >= epsilon / 2.0 - LEMMA_SLACK)
        .collect()
}

/// Iterations allowed by the convergence bound, `⌈2·C0/ε⌉`.
pub fn iteration_bound(constants: &TheoremConstants, epsilon: f64) -> usize {
    (2.0 * constants.c0 / epsilon).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v).unwrap()
    }

    fn path4(targets: Vec<f64>) -> ToyProblem {
        ToyProblem::new(&[s(&[0, 1]), s(&[1, 2]), s(&[2, 3])], targets, 1.0).unwrap()
    }

    #[test]
    fn step_size_examples() {
        let c = TheoremConstants { l0: 0.0, l1: 0.0, l2: 1.0, b: 3, lambda: 1.0, c0: 0.0, c1: 0.0, c2: 0.0 };
        let eta = step_size_bound(&c, 0.01);
        assert!((eta - 0.01 / 36864.0).abs() < 1e-18);
        assert!((eta - 2.7127e-7).abs() < 1e-10);
        assert_eq!(step_size_bound(&c, 0.02), 2.0 * eta);
        let c0 = TheoremConstants { lambda: 0.0, ..c };
        assert_eq!(step_size_bound(&c0, 0.01), 0.5);
    }

    #[test]
    fn constants_examples() {
        let p = path4(vec![0.0, 0.5, 0.2, 0.9]);
        let c = estimate_constants(&p, 1.0);
        assert_eq!((c.l0, c.l1, c.l2), (4.0, 4.0, 2.0));
        // (0, cap) essential, (0.2, 0.5) finite
        assert_eq!(c.b, 2);
        assert_eq!(c.c2, c.l2 + 5.0 * 2.0);
        assert_eq!(c.c0, 4.0 + 2.0);
        assert_eq!(c.c1, 4.0 + 4.0);
    }

    #[test]
    fn loss_at_target_is_zero() {
        let p = path4(vec![0.0, 0.5, 0.2, 0.9]);
        let (g, cfg) = total_loss(&p, &[0.0, 0.5, 0.2, 0.9], 1.0).unwrap();
        assert_eq!(g, 0.0);
        assert_eq!(cfg.matched, 2);
        let (g0, _) = total_loss(&p, &[0.3, 0.1, 0.2, 0.4], 0.0).unwrap();
        assert_eq!(g0, p.supervision_loss(&[0.3, 0.1, 0.2, 0.4]));
    }

    #[test]
    fn converged_start_stops_immediately() {
        let p = path4(vec![0.0, 0.5, 0.2, 0.9]).with_initial(vec![0.0, 0.5, 0.2, 0.9]).unwrap();
        let out = optimize(&p, &OptimizerConfig::default()).unwrap();
        assert_eq!(out.stop, StopReason::Converged);
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.trace.rows[0].g_t_wt, 0.0);
        assert!(verify_lemma2(&out.trace, out.trace.eta).iter().all(|&ok| ok));
    }

    #[test]
    fn supervision_only_matches_closed_form() {
        let targets = vec![0.1, 0.7, 0.4, 0.9];
        let w0 = vec![0.8, 0.2, 0.5, 0.3];
        let p = path4(targets.clone()).with_initial(w0.clone()).unwrap();
        let cfg = OptimizerConfig { lambda_topo: 0.0, epsilon: 1e-9, max_iters: 50, ..Default::default() };
        let out = optimize(&p, &cfg).unwrap();
        assert_eq!(out.trace.eta, 0.25);
        let q: f64 = 1.0 - 2.0 * p.supv_weight() * out.trace.eta;
        let steps = out.trace.len() as i32;
        for v in 0..4 {
            let expected = targets[v] + q.powi(steps) * (w0[v] - targets[v]);
            assert!((out.w[v] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn held_gradient_matches_differences() {
        let p = path4(vec![0.0, 0.5, 0.2, 0.9]);
        let w = [0.31, 0.12, 0.27, 0.44];
        let cfg = configuration(&p, &w).unwrap();
        let g = held_gradient(&p, &cfg, &w, 1.5);
        let h = 1e-6;
        for v in 0..4 {
            let mut a = w;
            let mut b = w;
            a[v] += h;
            b[v] -= h;
            let fd = (held_total_loss(&p, &cfg, &a, 1.5) - held_total_loss(&p, &cfg, &b, 1.5)) / (2.0 * h);
            assert!((fd - g[v]).abs() <= 1e-5 * g[v].abs().max(1e-3));
        }
    }

    #[test]
    fn trace_csv_layout() {
        let p = path4(vec![0.0, 0.5, 0.2, 0.9]).with_initial(vec![0.5; 4]).unwrap();
        let cfg = OptimizerConfig { max_iters: 3, epsilon: 1e-12, eta: StepSize::Fixed(0.05), ..Default::default() };
        let out = optimize(&p, &cfg).unwrap();
        let csv = out.trace.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], LossTrace::CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 8));
        assert!(lines[1].starts_with("0,"));
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(ToyProblem::new(&[s(&[0, 2])], vec![0.0, 0.1, 0.2], 1.0).is_err());
        assert!(ToyProblem::new(&[s(&[0, 1])], vec![0.0, 1.5], 1.0).is_err());
        assert!(path4(vec![0.0; 4]).with_initial(vec![0.0; 3]).is_err());
    }
}
