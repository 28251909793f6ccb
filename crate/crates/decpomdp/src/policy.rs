//! Cluster policies and exact policy evaluation by occupancy propagation.

use crate::clustering::{pack_key, unpack_cluster, unpack_state, Occupancy, StageClustering};
use crate::error::{Error, Result};
use crate::model::{DecPomdp, Horizon};
use std::collections::HashMap;

/// A fully specified joint policy over per-stage cluster partitions.
#[derive(Debug, Clone)]
pub struct ClusterPolicy {
    /// Clusterings for stages 0..h-1; stage 0 is the trivial root partition.
    pub stages: Vec<StageClustering>,
    /// actions[stage][agent][cluster] -> local action index.
    pub actions: Vec<Vec<Vec<usize>>>,
}

impl ClusterPolicy {
    pub fn horizon(&self) -> usize {
        self.stages.len()
    }
}

/// Exact expected value of a cluster policy, plus the per-stage occupancies
/// (the table at index t describes stage t before acting).
pub fn evaluate_policy(
    model: &DecPomdp,
    policy: &ClusterPolicy,
    h: Horizon,
) -> Result<(f64, Vec<Occupancy>)> {
    let h = h.get();
    if policy.stages.len() < h || policy.actions.len() < h {
        return Err(Error::Invalid(format!(
            "policy covers {} stages but horizon is {h}",
            policy.stages.len()
        )));
    }
    let n = model.n_agents;
    let mut occ = Occupancy::root(model);
    let mut tables = Vec::with_capacity(h);
    let mut total = 0.0;
    for t in 0..h {
        let acts = &policy.actions[t];
        for (i, per_agent) in acts.iter().enumerate() {
            if per_agent.len() < policy.stages[t].agents[i].len() {
                return Err(Error::MissingAction { agent: i, stage: t });
            }
        }
        let mut stage_reward = 0.0;
        let mut next: HashMap<u128, f64> = HashMap::new();
        let last = t + 1 == h;
        for &(key, p) in &occ.entries {
            let s = unpack_state(key) as usize;
            let local: Vec<usize> = (0..n)
                .map(|i| acts[i][unpack_cluster(key, i, n) as usize])
                .collect();
            let ja = model.joint_action(&local);
            stage_reward += p * model.reward(s, ja);
            if last {
                continue;
            }
            let succ = &policy.stages[t + 1];
            let mut cand = vec![0u32; n];
            for &(sp, jo, q) in model.step_row(s, ja) {
                for (i, c) in cand.iter_mut().enumerate() {
                    let prev_c = unpack_cluster(key, i, n) as usize;
                    *c = succ.agents[i].from_prev[prev_c][model.local_obs(jo, i) as usize];
                }
                *next.entry(pack_key(&cand, sp)).or_insert(0.0) += p * q;
            }
        }
        total += stage_reward;
        tables.push(occ.clone());
        if !last {
            let mut entries: Vec<(u128, f64)> = next.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            occ = Occupancy {
                stage: t + 1,
                entries,
                accumulated_reward: occ.accumulated_reward + stage_reward,
            };
        }
    }
    Ok((total, tables))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{cluster_stage, MergeMode};

    /// Builds the all-listen DecTiger-style policy over plain windows.
    fn listen_policy(model: &DecPomdp, h: usize, k: usize, action: usize) -> ClusterPolicy {
        let mut stages = vec![StageClustering::root(model.n_agents)];
        let mut actions: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut occ = Occupancy::root(model);
        for t in 0..h {
            let acts: Vec<Vec<usize>> = stages[t]
                .agents
                .iter()
                .map(|a| vec![action; a.len()])
                .collect();
            actions.push(acts.clone());
            if t + 1 < h {
                let step = cluster_stage(
                    model,
                    &stages[t],
                    &occ,
                    &acts,
                    k,
                    MergeMode::PlainWindow,
                );
                stages.push(step.clustering);
                occ = step.occupancy;
            }
        }
        ClusterPolicy { stages, actions }
    }

    #[test]
    fn two_listens_cost_four() {
        let text = crate::testdata::DECTIGER;
        let model = crate::parse_dpomdp(text, "dectiger").unwrap();
        let policy = listen_policy(&model, 2, 1, 0);
        let (v, tables) = evaluate_policy(&model, &policy, Horizon::new(2).unwrap()).unwrap();
        assert!((v + 4.0).abs() < 1e-9, "{v}");
        assert_eq!(tables.len(), 2);
        for t in &tables {
            assert!((t.total_mass() - 1.0).abs() < 1e-9);
        }
    }
}
