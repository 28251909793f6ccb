//! Observation-window clustering: plain sliding k-window memory, lossless
//! clustered sliding window memory (suffix equivalence over conditional
//! beliefs), and probability-based approximate merging.

use crate::error::{Error, Result};
use crate::model::DecPomdp;
use std::collections::HashMap;

/// Max-norm tolerance under which two conditional distributions count as equal.
pub const BELIEF_TOL: f64 = 1e-8;

pub type Obs = u16;

/// A cluster is the set of local observation histories ending in this suffix
/// (most recent observation last). The empty suffix covers every history.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct ClusterId(pub Vec<Obs>);

impl ClusterId {
    pub fn empty() -> Self {
        ClusterId(Vec::new())
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    /// Appends an observation and keeps at most the last `k` entries.
    pub fn extend_window(&self, obs: Obs, k: usize) -> ClusterId {
        let mut v = self.0.clone();
        v.push(obs);
        let start = v.len().saturating_sub(k);
        ClusterId(v[start..].to_vec())
    }
    /// The last `n` observations (all of them when `n >= len`).
    pub fn suffix(&self, n: usize) -> &[Obs] {
        &self.0[self.0.len().saturating_sub(n)..]
    }
    pub fn has_suffix(&self, suf: &[Obs]) -> bool {
        self.0.len() >= suf.len() && &self.0[self.0.len() - suf.len()..] == suf
    }
}

/// Sliding k-window memory: the cluster of a history is its last min(t,k)
/// observations.
pub fn sliding_window_cluster(loh: &[Obs], k: usize) -> ClusterId {
    let start = loh.len().saturating_sub(k);
    ClusterId(loh[start..].to_vec())
}

/// One agent's partition at a stage, plus the successor map from the previous
/// stage's clusters.
#[derive(Debug, Clone)]
pub struct AgentClusters {
    /// Cluster ids in expansion order (descending reachability probability,
    /// ties by lexicographic suffix).
    pub ids: Vec<ClusterId>,
    /// Reachability probability of each cluster under the prefix policy.
    pub prob: Vec<f64>,
    /// successor[prev_cluster_index][obs] = cluster index at this stage.
    pub from_prev: Vec<Vec<u32>>,
}

impl AgentClusters {
    pub fn len(&self) -> usize {
        self.ids.len()
    }
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Joint clustering for one stage.
#[derive(Debug, Clone)]
pub struct StageClustering {
    pub stage: usize,
    pub agents: Vec<AgentClusters>,
}

impl StageClustering {
    /// The trivial stage-0 clustering: one empty-suffix cluster per agent.
    pub fn root(n_agents: usize) -> Self {
        StageClustering {
            stage: 0,
            agents: (0..n_agents)
                .map(|_| AgentClusters {
                    ids: vec![ClusterId::empty()],
                    prob: vec![1.0],
                    from_prev: Vec::new(),
                })
                .collect(),
        }
    }
}

/// Key packing for joint (clusters, state) occupancy entries. Supports up to
/// six agents with 2^18 clusters per agent and 2^18 states.
#[inline]
pub fn pack_key(clusters: &[u32], state: u32) -> u128 {
    debug_assert!(clusters.len() <= 6);
    let mut key: u128 = 0;
    for &c in clusters {
        debug_assert!(c < (1 << 18));
        key = (key << 18) | c as u128;
    }
    (key << 18) | state as u128
}

#[inline]
pub fn unpack_state(key: u128) -> u32 {
    (key & ((1 << 18) - 1)) as u32
}

#[inline]
pub fn unpack_cluster(key: u128, agent: usize, n_agents: usize) -> u32 {
    let shift = 18 * (n_agents - agent);
    ((key >> shift) & ((1 << 18) - 1)) as u32
}

/// Exact joint distribution over (cluster tuple, state) at a stage, stored in
/// canonical sorted order so every consumer enumerates deterministically.
#[derive(Debug, Clone)]
pub struct Occupancy {
    pub stage: usize,
    /// Sorted by packed key.
    pub entries: Vec<(u128, f64)>,
    /// Expected reward accumulated over stages 0..stage-1.
    pub accumulated_reward: f64,
}

impl Occupancy {
    pub fn root(model: &DecPomdp) -> Self {
        let zeros = vec![0u32; model.n_agents];
        let mut entries: Vec<(u128, f64)> = model
            .initial_belief
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(s, &p)| (pack_key(&zeros, s as u32), p))
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        Occupancy {
            stage: 0,
            entries,
            accumulated_reward: 0.0,
        }
    }

    /// Starts a sub-problem from a revealed belief over states.
    pub fn from_belief(n_agents: usize, belief: &[(u32, f64)]) -> Self {
        let zeros = vec![0u32; n_agents];
        let mut entries: Vec<(u128, f64)> = belief
            .iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|&(s, p)| (pack_key(&zeros, s), p))
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        Occupancy {
            stage: 0,
            entries,
            accumulated_reward: 0.0,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// Marginal probability of each cluster of one agent.
    pub fn cluster_marginals(&self, agent: usize, n_agents: usize, n_clusters: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_clusters];
        for &(key, p) in &self.entries {
            out[unpack_cluster(key, agent, n_agents) as usize] += p;
        }
        out
    }
}

/// How `cluster_stage` coarsens the f-extension candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MergeMode {
    /// Plain sliding k-window memory: candidates are kept as-is.
    PlainWindow,
    /// Clustered sliding window memory: merge suffix-equivalence classes,
    /// optionally with probability-based merging below `p_max`.
    Clustered { p_max: Option<f64> },
}

/// The f-extension candidates of one agent: windows at stage t obtained from
/// (previous cluster, observation) pairs by append-and-truncate, deduplicated.
#[derive(Debug)]
pub struct FExtension {
    /// Candidate window ids, interned.
    pub ids: Vec<ClusterId>,
    /// map (prev_cluster, obs) -> candidate index (u32::MAX when unreachable).
    pub assign: Vec<Vec<u32>>,
}

/// Computes the candidate windows at stage `t` for one agent from the previous
/// stage's clusters. Only (cluster, observation) pairs listed in `reachable`
/// are materialized; the rest are filled in after merging.
pub fn f_extend(
    prev: &AgentClusters,
    n_obs: usize,
    k: usize,
    reachable: impl Fn(usize, usize) -> bool,
) -> FExtension {
    let mut ids: Vec<ClusterId> = Vec::new();
    let mut index: HashMap<ClusterId, u32> = HashMap::new();
    let mut assign = vec![vec![u32::MAX; n_obs]; prev.ids.len()];
    for (c, id) in prev.ids.iter().enumerate() {
        for o in 0..n_obs {
            if !reachable(c, o) {
                continue;
            }
            let w = id.extend_window(o as Obs, k);
            let idx = *index.entry(w.clone()).or_insert_with(|| {
                ids.push(w.clone());
                (ids.len() - 1) as u32
            });
            assign[c][o] = idx;
        }
    }
    FExtension { ids, assign }
}

/// Normalized conditional distributions used by the suffix-equivalence test:
/// for each candidate window of one agent, the joint distribution over
/// (state, other agents' f-extension classes).
#[derive(Debug)]
pub struct SuffixBeliefs {
    /// One sorted sparse distribution per candidate (key = pack of others'
    /// candidate indices and state), unnormalized (mass = candidate prob).
    pub per_candidate: Vec<Vec<(u128, f64)>>,
    pub prob: Vec<f64>,
}

impl SuffixBeliefs {
    /// Aggregates candidates into one normalized distribution.
    fn aggregate(&self, members: &[usize]) -> (Vec<(u128, f64)>, f64) {
        let mut acc: HashMap<u128, f64> = HashMap::new();
        let mut mass = 0.0;
        for &m in members {
            mass += self.prob[m];
            for &(key, p) in &self.per_candidate[m] {
                *acc.entry(key).or_insert(0.0) += p;
            }
        }
        let mut v: Vec<(u128, f64)> = acc.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        if mass > 0.0 {
            for e in v.iter_mut() {
                e.1 /= mass;
            }
        }
        (v, mass)
    }
}

fn beliefs_equal(a: &[(u128, f64)], b: &[(u128, f64)]) -> bool {
    let mut i = 0;
    let mut j = 0;
    while i < a.len() || j < b.len() {
        if i < a.len() && (j == b.len() || a[i].0 < b[j].0) {
            if a[i].1.abs() > BELIEF_TOL {
                return false;
            }
            i += 1;
        } else if j < b.len() && (i == a.len() || b[j].0 < a[i].0) {
            if b[j].1.abs() > BELIEF_TOL {
                return false;
            }
            j += 1;
        } else {
            if (a[i].1 - b[j].1).abs() > BELIEF_TOL {
                return false;
            }
            i += 1;
            j += 1;
        }
    }
    true
}

/// Output of one stage-boundary clustering step.
pub struct StageStep {
    pub clustering: StageClustering,
    pub occupancy: Occupancy,
}

/// Builds the stage-t clustering from the stage-(t-1) occupancy and the prefix
/// policy's actions at stage t-1, then propagates the occupancy to stage t.
///
/// `actions[agent][cluster]` are the stage-(t-1) local actions. Merging
/// proceeds coarsest-first: for every common suffix, the whole candidate group
/// merges iff all its conditional beliefs agree at every suffix length
/// (or its probability is below `p_max`).
pub fn cluster_stage(
    model: &DecPomdp,
    prev: &StageClustering,
    occupancy: &Occupancy,
    actions: &[Vec<usize>],
    k: usize,
    mode: MergeMode,
) -> StageStep {
    let n = model.n_agents;
    let t = prev.stage + 1;

    // Which (cluster, obs) pairs of each agent carry positive probability.
    // First pass: per-entry joint actions and one propagation to find support.
    let mut reach: Vec<Vec<Vec<bool>>> = (0..n)
        .map(|i| vec![vec![false; model.n_local_observations(i)]; prev.agents[i].len()])
        .collect();
    let mut stage_reward = 0.0;
    for &(key, p) in &occupancy.entries {
        let s = unpack_state(key) as usize;
        let local: Vec<usize> = (0..n)
            .map(|i| actions[i][unpack_cluster(key, i, n) as usize])
            .collect();
        let ja = model.joint_action(&local);
        stage_reward += p * model.reward(s, ja);
        for &(_sp, jo, q) in model.step_row(s, ja) {
            if q <= 0.0 {
                continue;
            }
            for (i, reach_i) in reach.iter_mut().enumerate() {
                let c = unpack_cluster(key, i, n) as usize;
                reach_i[c][model.local_obs(jo, i) as usize] = true;
            }
        }
    }

    // F-extension candidates per agent.
    let fext: Vec<FExtension> = (0..n)
        .map(|i| {
            f_extend(&prev.agents[i], model.n_local_observations(i), k, |c, o| {
                reach[i][c][o]
            })
        })
        .collect();

    // Second pass: joint candidate occupancy and per-agent candidate beliefs.
    let mut joint: HashMap<u128, f64> = HashMap::new();
    let mut beliefs: Vec<SuffixBeliefs> = fext
        .iter()
        .map(|f| SuffixBeliefs {
            per_candidate: vec![Vec::new(); f.ids.len()],
            prob: vec![0.0; f.ids.len()],
        })
        .collect();
    let mut belief_acc: Vec<Vec<HashMap<u128, f64>>> = fext
        .iter()
        .map(|f| vec![HashMap::new(); f.ids.len()])
        .collect();
    let mut cand = vec![0u32; n];
    for &(key, p) in &occupancy.entries {
        let s = unpack_state(key) as usize;
        let local: Vec<usize> = (0..n)
            .map(|i| actions[i][unpack_cluster(key, i, n) as usize])
            .collect();
        let ja = model.joint_action(&local);
        for &(sp, jo, q) in model.step_row(s, ja) {
            let w = p * q;
            if w <= 0.0 {
                continue;
            }
            for (i, cd) in cand.iter_mut().enumerate() {
                let c = unpack_cluster(key, i, n) as usize;
                *cd = fext[i].assign[c][model.local_obs(jo, i) as usize];
            }
            *joint.entry(pack_key(&cand, sp)).or_insert(0.0) += w;
            for i in 0..n {
                let others: Vec<u32> = (0..n).filter(|&j| j != i).map(|j| cand[j]).collect();
                let okey = pack_key(&others, sp);
                *belief_acc[i][cand[i] as usize].entry(okey).or_insert(0.0) += w;
                beliefs[i].prob[cand[i] as usize] += w;
            }
        }
    }
    for (i, acc) in belief_acc.into_iter().enumerate() {
        for (c, map) in acc.into_iter().enumerate() {
            let mut v: Vec<(u128, f64)> = map.into_iter().collect();
            v.sort_by(|a, b| a.0.cmp(&b.0));
            beliefs[i].per_candidate[c] = v;
        }
    }
    // Candidate probabilities are accumulated n times the stage mass; each
    // agent's `prob` already sums to the total mass once, so nothing to fix.

    // Merge candidates per agent.
    let window_len = t.min(k);
    let mut final_agents: Vec<AgentClusters> = Vec::with_capacity(n);
    let mut remap: Vec<Vec<u32>> = Vec::with_capacity(n);
    for i in 0..n {
        let (clusters, map) = merge_agent(&fext[i], &beliefs[i], window_len, mode);
        // from_prev: previous cluster x obs -> final cluster index
        let mut from_prev = vec![vec![u32::MAX; model.n_local_observations(i)]; prev.agents[i].len()];
        for (c, row) in fext[i].assign.iter().enumerate() {
            for (o, &cd) in row.iter().enumerate() {
                if cd != u32::MAX {
                    from_prev[c][o] = map[cd as usize];
                }
            }
        }
        // unreachable pairs: longest shared suffix with a final cluster
        for (c, row) in from_prev.iter_mut().enumerate() {
            for (o, slot) in row.iter_mut().enumerate() {
                if *slot == u32::MAX {
                    let w = prev.agents[i].ids[c].extend_window(o as Obs, k);
                    *slot = closest_cluster(&clusters.ids, &w);
                }
            }
        }
        let mut agent = clusters;
        agent.from_prev = from_prev;
        final_agents.push(agent);
        remap.push(map);
    }

    // Relabel the joint occupancy onto merged clusters.
    let mut relabeled: HashMap<u128, f64> = HashMap::with_capacity(joint.len());
    for (key, p) in joint {
        let s = unpack_state(key);
        for (i, r) in remap.iter().enumerate() {
            cand[i] = r[unpack_cluster(key, i, n) as usize];
        }
        *relabeled.entry(pack_key(&cand, s)).or_insert(0.0) += p;
    }
    let mut entries: Vec<(u128, f64)> = relabeled.into_iter().collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));

    StageStep {
        clustering: StageClustering {
            stage: t,
            agents: final_agents,
        },
        occupancy: Occupancy {
            stage: t,
            entries,
            accumulated_reward: occupancy.accumulated_reward + stage_reward,
        },
    }
}

/// Index of the final cluster whose id shares the longest suffix with `w`
/// (ties broken by expansion order).
fn closest_cluster(ids: &[ClusterId], w: &ClusterId) -> u32 {
    let mut best = 0u32;
    let mut best_len = -1i64;
    for (idx, id) in ids.iter().enumerate() {
        let mut l = 0;
        while l < id.len() && l < w.len() && id.0[id.len() - 1 - l] == w.0[w.len() - 1 - l] {
            l += 1;
        }
        // only clusters whose id is a full suffix of the shared part qualify
        if l == id.len() && l as i64 > best_len {
            best_len = l as i64;
            best = idx as u32;
        }
    }
    best
}

/// Merges the candidates of one agent into final clusters.
/// Returns the final clusters (in expansion order) and the candidate-to-final map.
fn merge_agent(
    fext: &FExtension,
    beliefs: &SuffixBeliefs,
    window_len: usize,
    mode: MergeMode,
) -> (AgentClusters, Vec<u32>) {
    let n_cand = fext.ids.len();
    let mut owner: Vec<Option<ClusterId>> = vec![None; n_cand];

    match mode {
        MergeMode::PlainWindow => {
            for (c, id) in fext.ids.iter().enumerate() {
                owner[c] = Some(id.clone());
            }
        }
        MergeMode::Clustered { p_max } => {
            // Coarsest first: suffix length 0 (merge all) upward.
            for len in 0..=window_len {
                // group unassigned candidates by their length-`len` suffix;
                // a group also includes already-merged members only via their
                // original candidates, which is equivalent because merging is
                // determined by window-level beliefs alone.
                let mut groups: HashMap<Vec<Obs>, Vec<usize>> = HashMap::new();
                for (c, id) in fext.ids.iter().enumerate() {
                    if owner[c].is_some() {
                        continue;
                    }
                    if id.len() < len {
                        continue;
                    }
                    groups.entry(id.suffix(len).to_vec()).or_default().push(c);
                }
                let mut keys: Vec<Vec<Obs>> = groups.keys().cloned().collect();
                keys.sort();
                for keysuf in keys {
                    let members = &groups[&keysuf];
                    // Every candidate with this suffix must be in the group;
                    // candidates already owned by a shorter suffix would make
                    // the partition inconsistent, but suffix-freeness of the
                    // accepted ids prevents that.
                    if members.len() == 1 && fext.ids[members[0]].len() == len {
                        owner[members[0]] = Some(fext.ids[members[0]].clone());
                        continue;
                    }
                    let total: f64 = members.iter().map(|&m| beliefs.prob[m]).sum();
                    let prob_ok = p_max.map(|pm| total <= pm + 1e-15).unwrap_or(false);
                    if prob_ok || group_equivalent(fext, beliefs, members, &keysuf, window_len) {
                        for &m in members {
                            owner[m] = Some(ClusterId(keysuf.clone()));
                        }
                    }
                }
            }
            // anything left keeps its own window id
            for (c, id) in fext.ids.iter().enumerate() {
                if owner[c].is_none() {
                    owner[c] = Some(id.clone());
                }
            }
        }
    }

    // Collect final clusters with probabilities.
    let mut by_id: HashMap<ClusterId, (f64, Vec<usize>)> = HashMap::new();
    for (c, id) in owner.iter().enumerate() {
        let id = id.clone().unwrap();
        let e = by_id.entry(id).or_insert((0.0, Vec::new()));
        e.0 += beliefs.prob[c];
        e.1.push(c);
    }
    let mut finals: Vec<(ClusterId, f64)> = by_id.iter().map(|(id, (p, _))| (id.clone(), *p)).collect();
    // expansion order: descending probability, ties lexicographic by suffix
    finals.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    let index: HashMap<ClusterId, u32> = finals
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (id.clone(), i as u32))
        .collect();
    let mut map = vec![0u32; n_cand];
    for (c, id) in owner.iter().enumerate() {
        map[c] = index[id.as_ref().unwrap()];
    }
    (
        AgentClusters {
            ids: finals.iter().map(|(id, _)| id.clone()).collect(),
            prob: finals.iter().map(|(_, p)| *p).collect(),
            from_prev: Vec::new(),
        },
        map,
    )
}

/// The all-suffix-lengths belief-equivalence test for one candidate group.
/// For every window length exceeding the shared suffix, the group's candidates
/// are keyed by their own suffix of that length; all keyed aggregates must
/// carry identical conditional beliefs. Zero-probability keys match anything.
fn group_equivalent(
    fext: &FExtension,
    beliefs: &SuffixBeliefs,
    members: &[usize],
    shared: &[Obs],
    window_len: usize,
) -> bool {
    for lambda in shared.len() + 1..=window_len {
        let mut keyed: HashMap<Vec<Obs>, Vec<usize>> = HashMap::new();
        for &m in members {
            let id = &fext.ids[m];
            let key = id.suffix(lambda.min(id.len())).to_vec();
            keyed.entry(key).or_default().push(m);
        }
        if keyed.len() <= 1 {
            continue;
        }
        let mut reference: Option<Vec<(u128, f64)>> = None;
        for group in keyed.values() {
            let (dist, mass) = beliefs.aggregate(group);
            if mass <= 0.0 {
                continue;
            }
            match &reference {
                None => reference = Some(dist),
                Some(r) => {
                    if !beliefs_equal(r, &dist) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sliding_window_truncates() {
        assert_eq!(sliding_window_cluster(&[0, 1, 1], 2), ClusterId(vec![1, 1]));
        assert_eq!(sliding_window_cluster(&[1], 3), ClusterId(vec![1]));
        assert_eq!(sliding_window_cluster(&[], 2), ClusterId::empty());
    }

    #[test]
    fn extend_window_appends_and_truncates() {
        let c = ClusterId(vec![0, 0]);
        assert_eq!(c.extend_window(1, 2), ClusterId(vec![0, 1]));
        let merged = ClusterId::empty();
        assert_eq!(merged.extend_window(0, 2), ClusterId(vec![0]));
        // distinct windows [0,0] and [1,0] both extend to [0,0] under k=2 with obs 0
        let a = ClusterId(vec![0, 0]).extend_window(0, 2);
        let b = ClusterId(vec![1, 0]).extend_window(0, 2);
        assert_eq!(a, b);
        assert_eq!(a, ClusterId(vec![0, 0]));
    }

    #[test]
    fn f_extend_dedups_forced_merges() {
        let prev = AgentClusters {
            ids: vec![ClusterId(vec![0, 0]), ClusterId(vec![1, 0])],
            prob: vec![0.5, 0.5],
            from_prev: Vec::new(),
        };
        let f = f_extend(&prev, 2, 2, |_, _| true);
        // candidates: from [0,0]: [0,0],[0,1]; from [1,0]: [0,0],[0,1] -> dedup to 2
        assert_eq!(f.ids.len(), 2);
        assert_eq!(f.assign[0][0], f.assign[1][0]);
    }

    #[test]
    fn closest_cluster_prefers_longest_suffix() {
        let ids = vec![ClusterId(vec![1]), ClusterId(vec![0, 0]), ClusterId::empty()];
        // w = [1,0]: suffix [0] matches no id fully except []; [0,0] needs last two
        let w = ClusterId(vec![1, 0]);
        assert_eq!(closest_cluster(&ids, &w), 2);
        let w2 = ClusterId(vec![0, 1]);
        assert_eq!(closest_cluster(&ids, &w2), 0);
    }
}
