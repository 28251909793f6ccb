//! Search heuristics: maximum-reward and terminal-reward-MDP bounds for
//! policy finding, periodic state-revelation bounds for upper-bound mode,
//! and the horizon-reduction tables that compose them.

use crate::model::{DecPomdp, MdpTable};
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

/// Which tail bound closes a horizon-reduced subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeuristicKind {
    /// Bound the tail by (tail length) * r_max per stage.
    MaxR,
    /// Bound the tail by the fully-observable MDP value.
    MdpTerminal,
    /// Periodic state revelation: reveal the state every `r` stages.
    TrReveal(RevealVariant),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevealVariant {
    /// Policies may depend on the revealed state immediately.
    AtR,
    /// The revealed state may be used only from the following stage; the
    /// stage-0 action of each tail problem is tied across states (Eq. per
    /// joint belief: max over joint actions of the belief-weighted bound).
    AtRPlus1,
}

/// Full heuristic configuration for one solver run.
#[derive(Debug, Clone, Copy)]
pub struct HeuristicSpec {
    pub kind: HeuristicKind,
    /// Reduction horizon: subproblems are searched over at most `r` stages.
    pub r: usize,
    /// Abort cap for each subproblem search (expansions).
    pub abort_cap: u64,
}

impl HeuristicSpec {
    pub fn new(kind: HeuristicKind, r: usize) -> Self {
        HeuristicSpec { kind, r, abort_cap: 200 }
    }
    /// Every spec built here yields admissible node bounds over the searched
    /// cluster-policy space; only TrReveal participates in upper-bound
    /// certification.
    pub fn certifies_upper_bound(&self) -> bool {
        matches!(self.kind, HeuristicKind::TrReveal(_))
    }
}

/// Terminal reward attached at the end of a reduced-horizon subproblem.
#[derive(Debug)]
pub enum TerminalTable {
    Zero,
    /// V(s): per-state upper bound on the tail value.
    PerState(Vec<f64>),
    /// Q(s, ja): tail bounds with the stage-0 joint action tied per belief.
    /// Entries are computed lazily; `vbar` and `mdp_bound` are eager bounds.
    BeliefMax(BeliefMaxTable),
}

#[derive(Debug)]
pub struct BeliefMaxTable {
    pub tail: usize,
    /// mdp_bound[s][ja] = R(s,ja) + sum_s' T * Q_MDP(s', tail-1): the
    /// prescreening order and a valid stand-in for uncomputed entries.
    pub mdp_bound: Vec<Vec<f64>>,
    /// Per-state relaxation max_ja mdp_bound, used by one-step lookaheads.
    pub vbar: Vec<f64>,
    /// Exact entries filled on demand: (s, ja) -> bound.
    pub q: RefCell<HashMap<(u32, u32), f64>>,
}

impl TerminalTable {
    pub fn tail(&self) -> usize {
        match self {
            TerminalTable::Zero => 0,
            TerminalTable::PerState(_) => usize::MAX, // not meaningful here
            TerminalTable::BeliefMax(t) => t.tail,
        }
    }
    /// Per-state upper bound used when the belief structure is unavailable.
    pub fn state_bound(&self, s: usize) -> f64 {
        match self {
            TerminalTable::Zero => 0.0,
            TerminalTable::PerState(v) => v[s],
            TerminalTable::BeliefMax(t) => t.vbar[s],
        }
    }
    pub fn is_zero(&self) -> bool {
        matches!(self, TerminalTable::Zero)
    }
}

/// Constant max-reward tail: V(s) = tail * r_max.
pub fn maxr_terminal(model: &DecPomdp, tail: usize) -> TerminalTable {
    if tail == 0 {
        return TerminalTable::Zero;
    }
    TerminalTable::PerState(vec![tail as f64 * model.r_max; model.n_states()])
}

/// MDP tail: V(s) = Q_MDP(s, tail).
pub fn mdp_terminal(mdp: &MdpTable, tail: usize) -> TerminalTable {
    if tail == 0 {
        return TerminalTable::Zero;
    }
    TerminalTable::PerState(mdp.values[tail].clone())
}

/// mdp_bound[s][ja] for a given tail: the one-step MDP relaxation used both
/// for prescreening reveal-at-r+1 entries and as their stand-in bound.
pub fn mdp_action_bounds(model: &DecPomdp, mdp: &MdpTable, tail: usize) -> Vec<Vec<f64>> {
    let n_s = model.n_states();
    let n_ja = model.n_joint_actions();
    let mut out = vec![vec![0.0; n_ja]; n_s];
    for s in 0..n_s {
        for ja in 0..n_ja {
            let mut q = model.reward(s, ja);
            if tail >= 1 {
                for &(sp, p) in model.successors(s, ja) {
                    q += p * mdp.value(sp as usize, tail - 1);
                }
            }
            out[s][ja] = q;
        }
    }
    out
}

/// One-step lookahead tables for a reduced subproblem of `horizon` stages with
/// terminal `term`: la[m][s][ja] = R(s,ja) + sum T * qbar(s', m-1), where
/// qbar(s, 0) is the per-state terminal bound and qbar(s,m) = max_ja la.
/// These are the node bounds inside subproblem searches (state-revealed after
/// one step, hence admissible).
#[derive(Debug)]
pub struct LookaheadTable {
    /// la[m][s][ja] for m = 1..=horizon
    pub la: Vec<Vec<Vec<f64>>>,
    /// qbar[m][s] for m = 0..=horizon
    pub qbar: Vec<Vec<f64>>,
}

impl LookaheadTable {
    pub fn build(model: &DecPomdp, term: &TerminalTable, horizon: usize) -> Rc<LookaheadTable> {
        let n_s = model.n_states();
        let n_ja = model.n_joint_actions();
        let mut qbar = Vec::with_capacity(horizon + 1);
        qbar.push((0..n_s).map(|s| term.state_bound(s)).collect::<Vec<_>>());
        let mut la = vec![Vec::new()];
        for m in 1..=horizon {
            let prev = &qbar[m - 1];
            let mut lam = vec![vec![0.0; n_ja]; n_s];
            let mut qm = vec![f64::NEG_INFINITY; n_s];
            for s in 0..n_s {
                for ja in 0..n_ja {
                    let mut q = model.reward(s, ja);
                    for &(sp, p) in model.successors(s, ja) {
                        q += p * prev[sp as usize];
                    }
                    lam[s][ja] = q;
                    if q > qm[s] {
                        qm[s] = q;
                    }
                }
            }
            la.push(lam);
            qbar.push(qm);
        }
        Rc::new(LookaheadTable { la, qbar })
    }

    /// max over joint actions consistent with `forced` of the belief-weighted
    /// lookahead at `m` remaining stages. `forced[agent]` constrains a local
    /// action; beliefs are sparse (state, mass) lists and need not be
    /// normalized (the result scales with the mass).
    pub fn belief_bound(
        &self,
        model: &DecPomdp,
        belief: &[(u32, f64)],
        m: usize,
        forced: &[Option<usize>],
    ) -> f64 {
        if m == 0 {
            return belief
                .iter()
                .map(|&(s, p)| p * self.qbar[0][s as usize])
                .sum();
        }
        let lam = &self.la[m];
        let mut best = f64::NEG_INFINITY;
        for ja in consistent_actions(model, forced) {
            let v: f64 = belief.iter().map(|&(s, p)| p * lam[s as usize][ja]).sum();
            if v > best {
                best = v;
            }
        }
        best
    }
}

/// Joint actions consistent with per-agent forced local actions.
pub fn consistent_actions(model: &DecPomdp, forced: &[Option<usize>]) -> Vec<usize> {
    let mut out = vec![0usize];
    for (i, f) in forced.iter().enumerate() {
        let n = model.n_local_actions(i);
        let mut next = Vec::with_capacity(out.len() * n);
        for base in out {
            match f {
                Some(a) => next.push(base * n + a),
                None => {
                    for a in 0..n {
                        next.push(base * n + a);
                    }
                }
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mdp_value, parse_dpomdp, Horizon};

    #[test]
    fn maxr_is_tail_times_rmax() {
        let m = parse_dpomdp(crate::testdata::DECTIGER, "dectiger").unwrap();
        match maxr_terminal(&m, 3) {
            TerminalTable::PerState(v) => {
                assert!(v.iter().all(|&x| (x - 60.0).abs() < 1e-12));
            }
            _ => panic!("expected per-state table"),
        }
        assert!(maxr_terminal(&m, 0).is_zero());
    }

    #[test]
    fn mdp_terminal_matches_backward_induction() {
        let m = parse_dpomdp(crate::testdata::DECTIGER, "dectiger").unwrap();
        let q = mdp_value(&m, Horizon::new(5).unwrap());
        match mdp_terminal(&q, 5) {
            TerminalTable::PerState(v) => {
                // the MDP opens the correct door every stage
                assert!((v[0] - 100.0).abs() < 1e-9);
                assert!((v[1] - 100.0).abs() < 1e-9);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn mdp_dominates_nothing_above_maxr() {
        let m = parse_dpomdp(crate::testdata::DECTIGER, "dectiger").unwrap();
        let q = mdp_value(&m, Horizon::new(6).unwrap());
        for tail in 1..=6usize {
            let (TerminalTable::PerState(md), TerminalTable::PerState(mx)) =
                (mdp_terminal(&q, tail), maxr_terminal(&m, tail))
            else {
                panic!()
            };
            for s in 0..m.n_states() {
                assert!(md[s] <= mx[s] + 1e-12);
            }
        }
    }

    #[test]
    fn lookahead_horizon_one_is_closed_form() {
        let m = parse_dpomdp(crate::testdata::DECTIGER, "dectiger").unwrap();
        let la = LookaheadTable::build(&m, &TerminalTable::Zero, 1);
        let belief = vec![(0u32, 0.5), (1u32, 0.5)];
        let v = la.belief_bound(&m, &belief, 1, &[None, None]);
        // best single joint action from the uniform belief: listen-listen (-2)
        assert!((v + 2.0).abs() < 1e-12);
        let forced = la.belief_bound(&m, &belief, 1, &[Some(1), None]);
        // forcing open-left: best partner reply is listen: 0.5*(-101) + 0.5*9
        assert!((forced + 46.0).abs() < 1e-12);
    }
}
