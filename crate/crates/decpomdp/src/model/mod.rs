//! Dec-POMDP data model, exact policy evaluation and MDP backward induction.

mod parse;

pub use parse::parse_dpomdp;

use crate::error::{Error, Result};

pub const ROW_SUM_TOL: f64 = 1e-9;

/// Immutable model. Probabilities are stored densely per (state, joint action)
/// with sparse successor lists for propagation.
#[derive(Debug, Clone)]
pub struct DecPomdp {
    pub name: String,
    pub n_agents: usize,
    pub states: Vec<String>,
    /// Local action names, per agent.
    pub actions: Vec<Vec<String>>,
    /// Local observation names, per agent.
    pub observations: Vec<Vec<String>>,
    pub initial_belief: Vec<f64>,
    /// Parsed but unused: planning is finite-horizon and undiscounted.
    pub discount: f64,
    pub r_max: f64,
    /// Non-fatal notes produced while loading (e.g. an ignored discount).
    pub warnings: Vec<String>,
    /// reward[s][ja]
    reward: Vec<Vec<f64>>,
    /// transition[s][ja] -> sparse (s', p)
    transition: Vec<Vec<Vec<(u32, f64)>>>,
    /// observation[ja][s'] -> sparse (jo, p)
    observation: Vec<Vec<Vec<(u32, f64)>>>,
    /// step[s][ja] -> sparse (s', jo, p) with p = T(s'|s,ja) * O(jo|ja,s')
    step: Vec<Vec<Vec<(u32, u32, f64)>>>,
}

impl DecPomdp {
    /// Builds a model from dense tables, validating all stochastic rows.
    ///
    /// `t_dense[ja][s][s']`, `o_dense[ja][s'][jo]`, `reward[s][ja]`.
    pub fn from_tables(
        name: String,
        states: Vec<String>,
        actions: Vec<Vec<String>>,
        observations: Vec<Vec<String>>,
        initial_belief: Vec<f64>,
        discount: f64,
        t_dense: Vec<Vec<Vec<f64>>>,
        o_dense: Vec<Vec<Vec<f64>>>,
        reward: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n_states = states.len();
        let n_agents = actions.len();
        let n_ja: usize = actions.iter().map(Vec::len).product();
        let n_jo: usize = observations.iter().map(Vec::len).product();

        let bsum: f64 = initial_belief.iter().sum();
        if (bsum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::Validation(format!("initial belief sums to {bsum}")));
        }
        if initial_belief.iter().any(|&p| !(0.0..=1.0 + ROW_SUM_TOL).contains(&p)) {
            return Err(Error::Validation("initial belief has entries outside [0,1]".into()));
        }

        let mut transition = vec![vec![Vec::new(); n_ja]; n_states];
        let mut observation = vec![vec![Vec::new(); n_states]; n_ja];
        for ja in 0..n_ja {
            for s in 0..n_states {
                let row = &t_dense[ja][s];
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::Validation(format!(
                        "transition row T(.|{}, {}) sums to {sum}",
                        states[s],
                        joint_action_name(&actions, ja)
                    )));
                }
                for (sp, &p) in row.iter().enumerate() {
                    if p < -ROW_SUM_TOL || p > 1.0 + ROW_SUM_TOL {
                        return Err(Error::Validation(format!(
                            "transition probability {p} outside [0,1]"
                        )));
                    }
                    if p > 0.0 {
                        transition[s][ja].push((sp as u32, p));
                    }
                }
            }
            for sp in 0..n_states {
                let row = &o_dense[ja][sp];
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::Validation(format!(
                        "observation row O(.|{}, {}) sums to {sum}",
                        joint_action_name(&actions, ja),
                        states[sp]
                    )));
                }
                for (jo, &p) in row.iter().enumerate() {
                    if p < -ROW_SUM_TOL || p > 1.0 + ROW_SUM_TOL {
                        return Err(Error::Validation(format!(
                            "observation probability {p} outside [0,1]"
                        )));
                    }
                    if p > 0.0 {
                        observation[ja][sp].push((jo as u32, p));
                    }
                }
            }
        }

        let r_max = reward
            .iter()
            .flat_map(|r| r.iter())
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);

        let mut step = vec![vec![Vec::new(); n_ja]; n_states];
        for s in 0..n_states {
            for ja in 0..n_ja {
                let mut entries = Vec::new();
                for &(sp, pt) in &transition[s][ja] {
                    for &(jo, po) in &observation[ja][sp as usize] {
                        entries.push((sp, jo, pt * po));
                    }
                }
                step[s][ja] = entries;
            }
        }

        let _ = n_jo;
        Ok(DecPomdp {
            name,
            n_agents,
            states,
            actions,
            observations,
            initial_belief,
            discount,
            r_max,
            warnings: Vec::new(),
            reward,
            transition,
            observation,
            step,
        })
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }
    pub fn n_joint_actions(&self) -> usize {
        self.actions.iter().map(Vec::len).product()
    }
    pub fn n_joint_observations(&self) -> usize {
        self.observations.iter().map(Vec::len).product()
    }
    pub fn n_local_actions(&self, agent: usize) -> usize {
        self.actions[agent].len()
    }
    pub fn n_local_observations(&self, agent: usize) -> usize {
        self.observations[agent].len()
    }

    #[inline]
    pub fn reward(&self, s: usize, ja: usize) -> f64 {
        self.reward[s][ja]
    }
    #[inline]
    pub fn successors(&self, s: usize, ja: usize) -> &[(u32, f64)] {
        &self.transition[s][ja]
    }
    #[inline]
    pub fn obs_row(&self, ja: usize, sp: usize) -> &[(u32, f64)] {
        &self.observation[ja][sp]
    }
    /// Combined transition-observation step, the propagation inner loop.
    #[inline]
    pub fn step_row(&self, s: usize, ja: usize) -> &[(u32, u32, f64)] {
        &self.step[s][ja]
    }

    /// Packs local actions into a joint action index (row-major, agent 0 outermost).
    pub fn joint_action(&self, local: &[usize]) -> usize {
        let mut ja = 0;
        for (i, &a) in local.iter().enumerate() {
            ja = ja * self.actions[i].len() + a;
        }
        ja
    }

    /// Splits a joint action index into local actions.
    pub fn split_action(&self, mut ja: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_agents];
        for i in (0..self.n_agents).rev() {
            let n = self.actions[i].len();
            out[i] = ja % n;
            ja /= n;
        }
        out
    }

    pub fn joint_observation(&self, local: &[usize]) -> usize {
        let mut jo = 0;
        for (i, &o) in local.iter().enumerate() {
            jo = jo * self.observations[i].len() + o;
        }
        jo
    }

    pub fn split_observation(&self, mut jo: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_agents];
        for i in (0..self.n_agents).rev() {
            let n = self.observations[i].len();
            out[i] = jo % n;
            jo /= n;
        }
        out
    }

    /// Local observation of `agent` inside a joint observation index.
    #[inline]
    pub fn local_obs(&self, jo: u32, agent: usize) -> u16 {
        let mut v = jo as usize;
        for i in (agent + 1..self.n_agents).rev() {
            v /= self.observations[i].len();
        }
        (v % self.observations[agent].len()) as u16
    }
}

fn joint_action_name(actions: &[Vec<String>], ja: usize) -> String {
    let mut idx = ja;
    let mut parts = vec![String::new(); actions.len()];
    for i in (0..actions.len()).rev() {
        let n = actions[i].len();
        parts[i] = actions[i][idx % n].clone();
        idx /= n;
    }
    parts.join(" ")
}

/// Number of stages; stages run 0..h-1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Horizon(u32);

impl Horizon {
    pub fn new(h: u32) -> Result<Self> {
        if h == 0 {
            return Err(Error::Invalid("horizon must be >= 1".into()));
        }
        Ok(Horizon(h))
    }
    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

/// Q_MDP(s, h') for 0 <= h' <= h of the fully-observable centralized MDP.
#[derive(Debug, Clone)]
pub struct MdpTable {
    /// values[h'][s]
    pub values: Vec<Vec<f64>>,
}

impl MdpTable {
    #[inline]
    pub fn value(&self, s: usize, tail: usize) -> f64 {
        self.values[tail][s]
    }
    pub fn belief_value(&self, belief: &[f64], tail: usize) -> f64 {
        belief
            .iter()
            .zip(&self.values[tail])
            .map(|(b, v)| b * v)
            .sum()
    }
}

/// Backward induction: Q_MDP(s,0) = 0, Q_MDP(s,h') = max_a R(s,a) + sum T * Q_MDP(.,h'-1).
pub fn mdp_value(model: &DecPomdp, h: Horizon) -> MdpTable {
    let n_s = model.n_states();
    let n_ja = model.n_joint_actions();
    let mut values = Vec::with_capacity(h.get() + 1);
    values.push(vec![0.0; n_s]);
    for hp in 1..=h.get() {
        let prev = &values[hp - 1];
        let mut cur = vec![f64::NEG_INFINITY; n_s];
        for s in 0..n_s {
            for ja in 0..n_ja {
                let mut q = model.reward(s, ja);
                for &(sp, p) in model.successors(s, ja) {
                    q += p * prev[sp as usize];
                }
                if q > cur[s] {
                    cur[s] = q;
                }
            }
        }
        values.push(cur);
    }
    MdpTable { values }
}

/// Exact value of the uniform-random policy: per-agent uniform action choice at
/// every stage, evaluated by state-marginal propagation (observations marginalize out).
pub fn random_policy_value(model: &DecPomdp, h: Horizon) -> f64 {
    let n_s = model.n_states();
    let n_ja = model.n_joint_actions();
    let w = 1.0 / n_ja as f64;
    let mut rho = model.initial_belief.clone();
    let mut total = 0.0;
    for _ in 0..h.get() {
        let mut next = vec![0.0; n_s];
        for s in 0..n_s {
            let p_s = rho[s];
            if p_s == 0.0 {
                continue;
            }
            for ja in 0..n_ja {
                total += p_s * w * model.reward(s, ja);
                for &(sp, p) in model.successors(s, ja) {
                    next[sp as usize] += p_s * w * p;
                }
            }
        }
        rho = next;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_identity() -> DecPomdp {
        // 2 agents, 2 states, deterministic identity transitions
        let t = vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]; 4];
        let o = vec![vec![vec![0.25; 4]; 2]; 4];
        let r = vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 2.0]];
        DecPomdp::from_tables(
            "tiny".into(),
            vec!["s0".into(), "s1".into()],
            vec![vec!["a".into(), "b".into()], vec!["a".into(), "b".into()]],
            vec![vec!["x".into(), "y".into()], vec!["x".into(), "y".into()]],
            vec![0.5, 0.5],
            1.0,
            t,
            o,
            r,
        )
        .unwrap()
    }

    #[test]
    fn mdp_zero_horizon_tail_is_zero() {
        let m = tiny_identity();
        let q = mdp_value(&m, Horizon::new(3).unwrap());
        assert!(q.values[0].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mdp_accumulates_best_fixed_action() {
        let m = tiny_identity();
        let q = mdp_value(&m, Horizon::new(5).unwrap());
        // s0 earns 1 per stage via (a,a), s1 earns 2 via (b,b)
        assert!((q.value(0, 5) - 5.0).abs() < 1e-12);
        assert!((q.value(1, 5) - 10.0).abs() < 1e-12);
        assert!((q.belief_value(&m.initial_belief, 5) - 7.5).abs() < 1e-12);
    }

    #[test]
    fn mdp_capped_by_rmax() {
        let m = tiny_identity();
        let q = mdp_value(&m, Horizon::new(7).unwrap());
        for hp in 0..=7 {
            for s in 0..2 {
                assert!(q.value(s, hp) <= hp as f64 * m.r_max + 1e-12);
            }
        }
    }

    #[test]
    fn random_value_mixes_rewards() {
        let m = tiny_identity();
        // identity transitions: each stage contributes mean reward of the state
        let v = random_policy_value(&m, Horizon::new(4).unwrap());
        let per_stage = 0.5 * (1.0 / 4.0) + 0.5 * (2.0 / 4.0);
        assert!((v - 4.0 * per_stage).abs() < 1e-12);
    }

    #[test]
    fn row_sum_violation_is_reported() {
        let mut t = vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]; 4];
        t[2][1][1] = 0.9;
        let o = vec![vec![vec![0.25; 4]; 2]; 4];
        let r = vec![vec![0.0; 4]; 2];
        let err = DecPomdp::from_tables(
            "bad".into(),
            vec!["s0".into(), "s1".into()],
            vec![vec!["a".into(), "b".into()], vec!["a".into(), "b".into()]],
            vec![vec!["x".into(), "y".into()], vec!["x".into(), "y".into()]],
            vec![0.5, 0.5],
            1.0,
            t,
            o,
            r,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sums to 0.9"), "{msg}");
        assert!(msg.contains("s1"), "{msg}");
    }
}
