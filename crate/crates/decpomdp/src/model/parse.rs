//! Parser for Cassandra-style `.dpomdp` model files.

use super::DecPomdp;
use crate::error::{Error, Result};
use std::collections::HashMap;

#[derive(Debug, Clone)]
struct Tok {
    text: String,
    line: usize,
}

struct Cursor {
    toks: Vec<Tok>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }
    fn line(&self) -> usize {
        self.peek().map(|t| t.line).unwrap_or_else(|| {
            self.toks.last().map(|t| t.line).unwrap_or(0)
        })
    }
    fn expect_colon(&mut self) -> Result<()> {
        match self.next() {
            Some(t) if t.text == ":" => Ok(()),
            Some(t) => Err(perr(t.line, format!("expected ':' but found '{}'", t.text))),
            None => Err(perr(self.line(), "unexpected end of input".into())),
        }
    }
    fn eat_colon(&mut self) -> bool {
        if self.peek().map(|t| t.text == ":").unwrap_or(false) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    /// Tokens remaining on the same input line as the previous token.
    fn rest_of_line(&mut self, line: usize) -> Vec<Tok> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if t.line != line {
                break;
            }
            out.push(self.next().unwrap());
        }
        out
    }
}

fn perr(line: usize, msg: String) -> Error {
    Error::Parse { line, msg }
}

fn tokenize(text: &str) -> Cursor {
    let mut toks = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = match raw_line.find('#') {
            Some(k) => &raw_line[..k],
            None => raw_line,
        };
        for piece in content.split_whitespace() {
            let mut rest = piece;
            while let Some(k) = rest.find(':') {
                let (before, after) = rest.split_at(k);
                if !before.is_empty() {
                    toks.push(Tok { text: before.to_string(), line });
                }
                toks.push(Tok { text: ":".to_string(), line });
                rest = &after[1..];
            }
            if !rest.is_empty() {
                toks.push(Tok { text: rest.to_string(), line });
            }
        }
    }
    Cursor { toks, pos: 0 }
}

/// Index set referenced by one entry spec position.
enum Spec {
    All,
    One(usize),
}

impl Spec {
    fn iter(&self, n: usize) -> Box<dyn Iterator<Item = usize>> {
        match self {
            Spec::All => Box::new(0..n),
            Spec::One(i) => Box::new(std::iter::once(*i)),
        }
    }
}

fn resolve(tok: &Tok, names: &[String], what: &str) -> Result<Spec> {
    if tok.text == "*" {
        return Ok(Spec::All);
    }
    if let Ok(i) = tok.text.parse::<usize>() {
        if i < names.len() {
            return Ok(Spec::One(i));
        }
        return Err(perr(tok.line, format!("{what} index {i} out of range")));
    }
    match names.iter().position(|n| n == &tok.text) {
        Some(i) => Ok(Spec::One(i)),
        None => Err(perr(tok.line, format!("unknown {what} identifier '{}'", tok.text))),
    }
}

fn parse_f64(tok: &Tok) -> Result<f64> {
    tok.text
        .parse::<f64>()
        .map_err(|_| perr(tok.line, format!("expected a number, found '{}'", tok.text)))
}

/// Reward overrides with replacement semantics, folded by expectation at the end.
#[derive(Default)]
struct RCell {
    base: Option<f64>,
    per_sp: HashMap<usize, SpCell>,
}
#[derive(Default)]
struct SpCell {
    base: Option<f64>,
    per_o: HashMap<usize, f64>,
}

struct Builder {
    n_agents: usize,
    states: Vec<String>,
    actions: Vec<Vec<String>>,
    observations: Vec<Vec<String>>,
    start: Option<Vec<f64>>,
    discount: f64,
    cost: bool,
    t: Vec<Vec<Vec<f64>>>,
    o: Vec<Vec<Vec<f64>>>,
    r: HashMap<(usize, usize), RCell>,
    warnings: Vec<String>,
}

impl Builder {
    fn n_ja(&self) -> usize {
        self.actions.iter().map(Vec::len).product()
    }
    fn n_jo(&self) -> usize {
        self.observations.iter().map(Vec::len).product()
    }

    /// Reads a joint-action (or joint-observation) spec: either a single `*`
    /// or one token per agent; returns the list of joint indices.
    fn joint_spec(
        &self,
        cur: &mut Cursor,
        per_agent: &[Vec<String>],
        what: &str,
    ) -> Result<Vec<usize>> {
        let mut toks = Vec::new();
        loop {
            match cur.peek() {
                Some(t) if t.text == ":" => break,
                Some(_) => toks.push(cur.next().unwrap()),
                None => break,
            }
        }
        if toks.is_empty() {
            return Err(perr(cur.line(), format!("missing {what} specification")));
        }
        if toks.len() == 1 && toks[0].text == "*" {
            let n: usize = per_agent.iter().map(Vec::len).product();
            return Ok((0..n).collect());
        }
        if toks.len() != self.n_agents {
            return Err(perr(
                toks[0].line,
                format!(
                    "joint {what} lists {} entries but the model has {} agents",
                    toks.len(),
                    self.n_agents
                ),
            ));
        }
        let mut sets = Vec::new();
        for (i, t) in toks.iter().enumerate() {
            sets.push(resolve(t, &per_agent[i], what)?);
        }
        let mut joints = vec![0usize];
        for (i, spec) in sets.iter().enumerate() {
            let n = per_agent[i].len();
            let mut next = Vec::new();
            for j in joints {
                for v in spec.iter(n) {
                    next.push(j * n + v);
                }
            }
            joints = next;
        }
        Ok(joints)
    }

    fn state_spec(&self, cur: &mut Cursor) -> Result<Spec> {
        let t = cur
            .next()
            .ok_or_else(|| perr(0, "unexpected end of input in state spec".into()))?;
        resolve(&t, &self.states, "state")
    }
}

/// Parses `.dpomdp` text into a validated model. `name` labels error messages
/// and run records; it is typically the file stem.
pub fn parse_dpomdp(text: &str, name: &str) -> Result<DecPomdp> {
    let mut cur = tokenize(text);
    let mut b = Builder {
        n_agents: 0,
        states: Vec::new(),
        actions: Vec::new(),
        observations: Vec::new(),
        start: None,
        discount: 1.0,
        cost: false,
        t: Vec::new(),
        o: Vec::new(),
        r: HashMap::new(),
        warnings: Vec::new(),
    };

    while let Some(tok) = cur.next() {
        let line = tok.line;
        match tok.text.as_str() {
            "agents" => {
                cur.expect_colon()?;
                let toks = cur.rest_of_line(line);
                if toks.is_empty() {
                    return Err(perr(line, "agents: expects a count or names".into()));
                }
                if toks.len() == 1 {
                    if let Ok(n) = toks[0].text.parse::<usize>() {
                        b.n_agents = n;
                        continue;
                    }
                }
                b.n_agents = toks.len();
            }
            "discount" => {
                cur.expect_colon()?;
                let t = cur.next().ok_or_else(|| perr(line, "missing discount".into()))?;
                b.discount = parse_f64(&t)?;
                if (b.discount - 1.0).abs() > 1e-12 {
                    b.warnings.push(format!(
                        "discount {} ignored: planning is finite-horizon and undiscounted",
                        b.discount
                    ));
                }
            }
            "values" => {
                cur.expect_colon()?;
                let t = cur.next().ok_or_else(|| perr(line, "missing values kind".into()))?;
                match t.text.as_str() {
                    "reward" => b.cost = false,
                    "cost" => b.cost = true,
                    other => return Err(perr(t.line, format!("values: expected reward|cost, found '{other}'"))),
                }
            }
            "states" => {
                cur.expect_colon()?;
                let toks = cur.rest_of_line(line);
                if toks.len() == 1 {
                    if let Ok(n) = toks[0].text.parse::<usize>() {
                        b.states = (0..n).map(|i| format!("s{i}")).collect();
                        continue;
                    }
                }
                if toks.is_empty() {
                    return Err(perr(line, "states: expects a count or names".into()));
                }
                b.states = toks.into_iter().map(|t| t.text).collect();
            }
            "actions" | "observations" => {
                let is_actions = tok.text == "actions";
                cur.expect_colon()?;
                if b.n_agents == 0 {
                    return Err(perr(line, "agents: must come before actions/observations".into()));
                }
                let mut per_agent = Vec::new();
                for a in 0..b.n_agents {
                    let l = cur
                        .peek()
                        .ok_or_else(|| perr(line, "missing per-agent list".into()))?
                        .line;
                    let toks = cur.rest_of_line(l);
                    if toks.is_empty() {
                        return Err(perr(l, format!("agent {a}: empty list")));
                    }
                    if toks.len() == 1 {
                        if let Ok(n) = toks[0].text.parse::<usize>() {
                            let prefix = if is_actions { "a" } else { "o" };
                            per_agent.push((0..n).map(|i| format!("{prefix}{i}")).collect());
                            continue;
                        }
                    }
                    per_agent.push(toks.into_iter().map(|t| t.text).collect());
                }
                if is_actions {
                    b.actions = per_agent;
                } else {
                    b.observations = per_agent;
                }
            }
            "start" => {
                // forms: numbers | uniform | <state> | include/exclude lists
                let explicit_colon = cur.eat_colon();
                let _ = explicit_colon;
                let first = cur
                    .peek()
                    .ok_or_else(|| perr(line, "missing start specification".into()))?
                    .clone();
                let n_s = b.states.len();
                if n_s == 0 {
                    return Err(perr(line, "states: must come before start".into()));
                }
                match first.text.as_str() {
                    "uniform" => {
                        cur.next();
                        b.start = Some(vec![1.0 / n_s as f64; n_s]);
                    }
                    "include" | "exclude" => {
                        cur.next();
                        cur.eat_colon();
                        let toks = cur.rest_of_line(first.line);
                        let mut mask = vec![first.text == "exclude"; n_s];
                        for t in &toks {
                            match resolve(t, &b.states, "state")? {
                                Spec::One(i) => mask[i] = first.text == "include",
                                Spec::All => {
                                    for m in mask.iter_mut() {
                                        *m = first.text == "include";
                                    }
                                }
                            }
                        }
                        let count = mask.iter().filter(|&&m| m).count();
                        if count == 0 {
                            return Err(perr(first.line, "start include/exclude leaves no states".into()));
                        }
                        b.start = Some(
                            mask.iter()
                                .map(|&m| if m { 1.0 / count as f64 } else { 0.0 })
                                .collect(),
                        );
                    }
                    _ => {
                        if first.text.parse::<f64>().is_ok() && first.text.parse::<usize>().is_err() {
                            // fractional number: explicit distribution
                            let mut belief = Vec::with_capacity(n_s);
                            while belief.len() < n_s {
                                let t = cur
                                    .next()
                                    .ok_or_else(|| perr(line, "start distribution too short".into()))?;
                                belief.push(parse_f64(&t)?);
                            }
                            b.start = Some(belief);
                        } else if let Ok(v) = first.text.parse::<usize>() {
                            // ambiguous: single index or distribution of integers (0/1)
                            let toks = cur.rest_of_line(first.line);
                            if toks.len() >= n_s {
                                let mut belief = Vec::with_capacity(n_s);
                                for t in toks.iter().take(n_s) {
                                    belief.push(parse_f64(t)?);
                                }
                                b.start = Some(belief);
                            } else {
                                if v >= n_s {
                                    return Err(perr(first.line, format!("start state index {v} out of range")));
                                }
                                let mut belief = vec![0.0; n_s];
                                belief[v] = 1.0;
                                b.start = Some(belief);
                            }
                        } else {
                            cur.next();
                            let mut belief = vec![0.0; n_s];
                            match resolve(&first, &b.states, "state")? {
                                Spec::One(i) => belief[i] = 1.0,
                                Spec::All => belief = vec![1.0 / n_s as f64; n_s],
                            }
                            b.start = Some(belief);
                        }
                    }
                }
            }
            "T" => {
                ensure_tables(&mut b, line)?;
                cur.expect_colon()?;
                let jas = b.joint_spec(&mut cur, &b.actions, "action")?;
                let n_s = b.states.len();
                let whole_table = matches!(
                    cur.peek().map(|t| t.text.as_str()),
                    Some("uniform") | Some("identity")
                ) || {
                    // trailing colon followed by a whole-table keyword
                    let saved = cur.pos;
                    let r = cur.eat_colon()
                        && matches!(
                            cur.peek().map(|t| t.text.as_str()),
                            Some("uniform") | Some("identity")
                        );
                    cur.pos = saved;
                    r
                };
                if !whole_table && cur.eat_colon() {
                    let s_spec = b.state_spec(&mut cur)?;
                    if cur.eat_colon() {
                        // T: ja : s : s' [:] p
                        let sp_spec = b.state_spec(&mut cur)?;
                        cur.eat_colon();
                        let t = cur.next().ok_or_else(|| perr(line, "missing probability".into()))?;
                        let p = parse_f64(&t)?;
                        for &ja in &jas {
                            for s in s_spec.iter(n_s) {
                                for sp in sp_spec.iter(n_s) {
                                    b.t[ja][s][sp] = p;
                                }
                            }
                        }
                    } else {
                        // T: ja : s  followed by a row of n_states numbers or 'uniform'
                        let row = read_row(&mut cur, n_s, line)?;
                        for &ja in &jas {
                            for s in s_spec.iter(n_s) {
                                b.t[ja][s].clone_from(&row);
                            }
                        }
                    }
                } else {
                    // T: ja  followed by uniform | identity | matrix
                    cur.eat_colon();
                    match cur.peek().map(|t| t.text.clone()).as_deref() {
                        Some("uniform") => {
                            cur.next();
                            for &ja in &jas {
                                for s in 0..n_s {
                                    b.t[ja][s] = vec![1.0 / n_s as f64; n_s];
                                }
                            }
                        }
                        Some("identity") => {
                            cur.next();
                            for &ja in &jas {
                                for s in 0..n_s {
                                    let mut row = vec![0.0; n_s];
                                    row[s] = 1.0;
                                    b.t[ja][s] = row;
                                }
                            }
                        }
                        _ => {
                            for s in 0..n_s {
                                let row = read_row(&mut cur, n_s, line)?;
                                for &ja in &jas {
                                    b.t[ja][s].clone_from(&row);
                                }
                            }
                        }
                    }
                }
            }
            "O" => {
                ensure_tables(&mut b, line)?;
                cur.expect_colon()?;
                let jas = b.joint_spec(&mut cur, &b.actions, "action")?;
                let n_s = b.states.len();
                let n_jo = b.n_jo();
                let whole_table = matches!(cur.peek().map(|t| t.text.as_str()), Some("uniform")) || {
                    let saved = cur.pos;
                    let r = cur.eat_colon()
                        && matches!(cur.peek().map(|t| t.text.as_str()), Some("uniform"));
                    cur.pos = saved;
                    r
                };
                if !whole_table && cur.eat_colon() {
                    let sp_spec = b.state_spec(&mut cur)?;
                    if cur.eat_colon() {
                        // O: ja : s' : jo [:] p
                        let jos = b.joint_spec(&mut cur, &b.observations, "observation")?;
                        cur.eat_colon();
                        let t = cur.next().ok_or_else(|| perr(line, "missing probability".into()))?;
                        let p = parse_f64(&t)?;
                        for &ja in &jas {
                            for sp in sp_spec.iter(n_s) {
                                for &jo in &jos {
                                    b.o[ja][sp][jo] = p;
                                }
                            }
                        }
                    } else {
                        let row = read_row(&mut cur, n_jo, line)?;
                        for &ja in &jas {
                            for sp in sp_spec.iter(n_s) {
                                b.o[ja][sp].clone_from(&row);
                            }
                        }
                    }
                } else {
                    cur.eat_colon();
                    match cur.peek().map(|t| t.text.clone()).as_deref() {
                        Some("uniform") => {
                            cur.next();
                            for &ja in &jas {
                                for sp in 0..n_s {
                                    b.o[ja][sp] = vec![1.0 / n_jo as f64; n_jo];
                                }
                            }
                        }
                        _ => {
                            for sp in 0..n_s {
                                let row = read_row(&mut cur, n_jo, line)?;
                                for &ja in &jas {
                                    b.o[ja][sp].clone_from(&row);
                                }
                            }
                        }
                    }
                }
            }
            "R" => {
                ensure_tables(&mut b, line)?;
                cur.expect_colon()?;
                let jas = b.joint_spec(&mut cur, &b.actions, "action")?;
                let n_s = b.states.len();
                if !cur.eat_colon() {
                    return Err(perr(line, "R: entry needs at least a state spec".into()));
                }
                let s_spec = b.state_spec(&mut cur)?;
                if !cur.eat_colon() {
                    return Err(perr(line, "R: entry needs an end-state spec (use '*')".into()));
                }
                let sp_tok = cur
                    .next()
                    .ok_or_else(|| perr(line, "missing end-state spec".into()))?;
                let sp_spec = resolve(&sp_tok, &b.states, "state")?;
                if cur.eat_colon() {
                    let jos = b.joint_spec(&mut cur, &b.observations, "observation")?;
                    cur.eat_colon();
                    let t = cur.next().ok_or_else(|| perr(line, "missing reward value".into()))?;
                    let v = parse_f64(&t)?;
                    let jo_all = jos.len() == b.n_jo();
                    for &ja in &jas {
                        for s in s_spec.iter(n_s) {
                            let cell = b.r.entry((ja, s)).or_default();
                            if matches!(sp_spec, Spec::All) && jo_all {
                                cell.base = Some(v);
                                cell.per_sp.clear();
                            } else {
                                for sp in sp_spec.iter(n_s) {
                                    let spc = cell.per_sp.entry(sp).or_default();
                                    if jo_all {
                                        spc.base = Some(v);
                                        spc.per_o.clear();
                                    } else {
                                        for &jo in &jos {
                                            spc.per_o.insert(jo, v);
                                        }
                                    }
                                }
                            }
                        }
                    }
                } else {
                    // R: ja : s : s'  with the value right after (no obs spec)
                    let t = cur.next().ok_or_else(|| perr(line, "missing reward value".into()))?;
                    let v = parse_f64(&t)?;
                    for &ja in &jas {
                        for s in s_spec.iter(n_s) {
                            let cell = b.r.entry((ja, s)).or_default();
                            if matches!(sp_spec, Spec::All) {
                                cell.base = Some(v);
                                cell.per_sp.clear();
                            } else {
                                for sp in sp_spec.iter(n_s) {
                                    let spc = cell.per_sp.entry(sp).or_default();
                                    spc.base = Some(v);
                                    spc.per_o.clear();
                                }
                            }
                        }
                    }
                }
            }
            other => {
                return Err(perr(line, format!("unexpected token '{other}'")));
            }
        }
    }

    finish(b, name)
}

fn ensure_tables(b: &mut Builder, line: usize) -> Result<()> {
    if b.n_agents == 0 || b.states.is_empty() || b.actions.is_empty() || b.observations.is_empty() {
        return Err(perr(
            line,
            "T/O/R entries require agents, states, actions and observations to be declared first".into(),
        ));
    }
    if b.actions.len() != b.n_agents || b.observations.len() != b.n_agents {
        return Err(perr(
            line,
            format!(
                "agent count mismatch: {} agents but {} action lists / {} observation lists",
                b.n_agents,
                b.actions.len(),
                b.observations.len()
            ),
        ));
    }
    if b.t.is_empty() {
        let n_s = b.states.len();
        b.t = vec![vec![vec![0.0; n_s]; n_s]; b.n_ja()];
        b.o = vec![vec![vec![0.0; b.n_jo()]; n_s]; b.n_ja()];
    }
    Ok(())
}

fn read_row(cur: &mut Cursor, n: usize, line: usize) -> Result<Vec<f64>> {
    if cur.peek().map(|t| t.text == "uniform").unwrap_or(false) {
        cur.next();
        return Ok(vec![1.0 / n as f64; n]);
    }
    let mut row = Vec::with_capacity(n);
    while row.len() < n {
        let t = cur
            .next()
            .ok_or_else(|| perr(line, format!("row ended after {} of {} entries", row.len(), n)))?;
        row.push(parse_f64(&t)?);
    }
    Ok(row)
}

fn finish(b: Builder, name: &str) -> Result<DecPomdp> {
    if b.n_agents == 0 {
        return Err(perr(0, "missing agents: declaration".into()));
    }
    if b.t.is_empty() {
        return Err(perr(0, "model has no T/O entries".into()));
    }
    let start = b
        .start
        .clone()
        .ok_or_else(|| perr(0, "missing start: declaration".into()))?;
    let n_s = b.states.len();
    let n_ja = b.n_ja();
    let sign = if b.cost { -1.0 } else { 1.0 };

    // Fold reward overrides into expected immediate reward R(s, ja).
    let mut reward = vec![vec![0.0; n_ja]; n_s];
    for (&(ja, s), cell) in &b.r {
        let mut acc = 0.0;
        let base = cell.base.unwrap_or(0.0);
        // expectation over s' and o under T and O
        let trow: Vec<(usize, f64)> = b.t[ja][s]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(sp, &p)| (sp, p))
            .collect();
        for (sp, pt) in trow {
            let v_sp = match cell.per_sp.get(&sp) {
                None => base,
                Some(spc) => {
                    if spc.per_o.is_empty() {
                        spc.base.unwrap_or(base)
                    } else {
                        let mut acc_o = 0.0;
                        for (jo, po) in b.o[ja][sp].iter().enumerate() {
                            if *po > 0.0 {
                                let v = spc.per_o.get(&jo).copied().unwrap_or(spc.base.unwrap_or(base));
                                acc_o += po * v;
                            }
                        }
                        acc_o
                    }
                }
            };
            acc += pt * v_sp;
        }
        reward[s][ja] = sign * acc;
    }

    let mut model = DecPomdp::from_tables(
        name.to_string(),
        b.states,
        b.actions,
        b.observations,
        start,
        b.discount,
        b.t,
        b.o,
        reward,
    )?;
    model.warnings = b.warnings;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mdp_value, Horizon};

    const MINI: &str = r#"
# minimal deterministic-identity model
agents: 2
discount: 1
values: reward
states: left right
start:
uniform
actions:
stay flip
stay flip
observations:
o0 o1
o0 o1
T: * :
uniform
T: stay stay :
identity
O: * :
uniform
R: stay stay : left : * : * : 1.0
"#;

    #[test]
    fn parses_minimal_identity_model() {
        let m = parse_dpomdp(MINI, "mini").unwrap();
        assert_eq!(m.n_agents, 2);
        assert_eq!(m.n_states(), 2);
        assert_eq!(m.n_joint_actions(), 4);
        // identity for stay-stay
        assert_eq!(m.successors(0, 0), &[(0, 1.0)]);
        // uniform for the rest
        assert_eq!(m.successors(0, 3).len(), 2);
        assert!((m.reward(0, 0) - 1.0).abs() < 1e-12);
        assert_eq!(m.r_max, 1.0);
    }

    #[test]
    fn cost_values_negate() {
        let text = MINI.replace("values: reward", "values: cost");
        let m = parse_dpomdp(&text, "mini").unwrap();
        assert!((m.reward(0, 0) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_row_sum_names_the_row() {
        let text = MINI.replace(
            "T: stay stay :\nidentity",
            "T: stay stay : left : left : 0.9\nT: stay stay : left : right : 0.0\nT: stay stay : right : right : 1.0\nT: stay stay : right : left : 0.0",
        );
        let err = parse_dpomdp(&text, "mini").unwrap_err();
        assert!(err.to_string().contains("sums to 0.9"), "{err}");
    }

    #[test]
    fn unknown_identifier_is_an_error() {
        let text = MINI.replace("R: stay stay : left", "R: stay stay : middle");
        let err = parse_dpomdp(&text, "mini").unwrap_err();
        assert!(err.to_string().contains("unknown state identifier"), "{err}");
    }

    #[test]
    fn agent_count_mismatch_is_an_error() {
        let text = MINI.replace("T: stay stay :\nidentity", "T: stay stay stay :\nidentity");
        let err = parse_dpomdp(&text, "mini").unwrap_err();
        assert!(err.to_string().contains("2 agents"), "{err}");
    }

    #[test]
    fn discount_warning_is_recorded() {
        let text = MINI.replace("discount: 1", "discount: 0.95");
        let m = parse_dpomdp(&text, "mini").unwrap();
        assert_eq!(m.warnings.len(), 1);
        let q = mdp_value(&m, Horizon::new(2).unwrap());
        // undiscounted despite discount field: 0.5*2 + 0.5*0.5
        assert!((q.belief_value(&m.initial_belief, 2) - 1.25).abs() < 1e-12);
    }
}
