#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use storyreader::action_core::{ActionId, Domain, State};
use storyreader::narrative::History;
use storyreader::reader::{check_model, interpret, Config, Interpretation, Model};
use storyreader::story::{load_story, Sources, Story};

pub const EXAMPLES: [&str; 4] = [
    include_str!("../../assets/example1.story"),
    include_str!("../../assets/example2.story"),
    include_str!("../../assets/example3.story"),
    include_str!("../../assets/example4.story"),
];

pub const EXAMPLE1_TRACE: &str = include_str!("../../assets/example1.trace");

pub fn example(n: usize) -> Story {
    load_story(EXAMPLES[n - 1], &Sources::default()).expect("bundled story loads")
}

pub fn run_example(n: usize) -> (Story, Interpretation) {
    let st = example(n);
    let r = interpret(&st.domain, &st.history, &Config::default());
    (st, r)
}

pub fn atoms_at(d: &Domain, m: &Model, i: usize) -> Vec<String> {
    m.occurrences.get(i).map(|o| o.iter().map(|x| x.to_term(d).to_string()).collect()).unwrap_or_default()
}

pub fn has(d: &Domain, m: &Model, atom: &str, i: usize) -> bool {
    atoms_at(d, m, i).iter().any(|a| a == atom)
}

// ---------------------------------------------------------------------
// Random micro-domains and a brute-force transition oracle.
// ---------------------------------------------------------------------

const OBJS: [&str; 2] = ["o1", "o2"];

/// A fluent or action template with an optional `X` argument, or a
/// constant argument.
#[derive(Debug, Clone)]
struct Tpl {
    name: &'static str,
    arg: Option<&'static str>,
}

impl Tpl {
    fn text(&self) -> String {
        match self.arg {
            Some(a) => format!("{}({a})", self.name),
            None => self.name.to_string(),
        }
    }

    fn ground(&self, x: &str) -> String {
        match self.arg {
            Some("X") => format!("{}({x})", self.name),
            Some(c) => format!("{}({c})", self.name),
            None => self.name.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Lit {
    tpl: Tpl,
    value: bool,
}

impl Lit {
    fn text(&self) -> String {
        if self.value {
            self.tpl.text()
        } else {
            format!("-{}", self.tpl.text())
        }
    }
}

#[derive(Debug, Clone)]
struct CausalSpec {
    effects: Vec<Lit>,
    trigger: Tpl,
    blocker: Option<Tpl>,
    body: Vec<Lit>,
}

#[derive(Debug, Clone)]
struct ChoiceSpec {
    trigger: Tpl,
    body: Vec<Lit>,
}

#[derive(Debug, Clone)]
struct RuleSpec {
    head: Tpl,
    body: Vec<Lit>,
}

/// A random domain over two objects with inertial `p(obj)`, `r(obj)`, `q`,
/// defined `d1(obj)`, `d2`, and exogenous `a(obj)`, `b`, `c(obj)`.
#[derive(Debug, Clone)]
pub struct Micro {
    pub text: String,
    causal: Vec<CausalSpec>,
    choices: Vec<ChoiceSpec>,
    sel: Vec<&'static str>,
    rules: Vec<RuleSpec>,
    impossible: Vec<(Tpl, Vec<Lit>)>,
    /// Ground fluent names in oracle bit order.
    pub fluents: Vec<String>,
    pub inertial: Vec<bool>,
    pub actions: Vec<String>,
}

fn t(name: &'static str, arg: Option<&'static str>) -> Tpl {
    Tpl { name, arg }
}

fn inertial_tpls() -> Vec<Tpl> {
    vec![t("p", Some("X")), t("r", Some("X")), t("q", None), t("p", Some("o1")), t("r", Some("o2"))]
}

fn action_tpls() -> Vec<Tpl> {
    vec![t("a", Some("X")), t("b", None), t("c", Some("X")), t("a", Some("o1"))]
}

fn lits(rng: &mut StdRng, pool: &[Tpl], max: usize) -> Vec<Lit> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| Lit { tpl: pool.choose(rng).unwrap().clone(), value: rng.gen() }).collect()
}

impl Micro {
    pub fn random(rng: &mut StdRng) -> Micro {
        let inert = inertial_tpls();
        let acts = action_tpls();
        let mut causal = Vec::new();
        for _ in 0..rng.gen_range(1..=5) {
            let trigger = acts.choose(rng).unwrap().clone();
            let blocker = if rng.gen_bool(0.3) {
                Some(acts.iter().filter(|a| a.name != trigger.name).collect::<Vec<_>>().choose(rng).unwrap().to_owned().clone())
            } else {
                None
            };
            let mut effects = lits(rng, &inert, 2);
            if effects.is_empty() {
                effects.push(Lit { tpl: inert[0].clone(), value: true });
            }
            let mut body_pool = inert.clone();
            body_pool.extend([t("d1", Some("X")), t("d2", None)]);
            causal.push(CausalSpec { effects, trigger, blocker, body: lits(rng, &body_pool, 2) });
        }
        let mut choices = Vec::new();
        if rng.gen_bool(0.5) {
            choices.push(ChoiceSpec { trigger: acts.choose(rng).unwrap().clone(), body: lits(rng, &inert, 1) });
        }
        let sel: Vec<&'static str> = OBJS.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        let mut rules = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            let mut body = lits(rng, &inert, 2);
            if body.is_empty() {
                body.push(Lit { tpl: inert[0].clone(), value: true });
            }
            rules.push(RuleSpec { head: t("d1", Some("X")), body });
        }
        for _ in 0..rng.gen_range(0..=2) {
            let mut pool = inert.clone();
            pool.extend([t("d1", Some("X")), t("d1", Some("o1"))]);
            let mut body = lits(rng, &pool, 2);
            if body.is_empty() {
                body.push(Lit { tpl: t("q", None), value: true });
            }
            rules.push(RuleSpec { head: t("d2", None), body });
        }
        let mut impossible = Vec::new();
        if rng.gen_bool(0.4) {
            let mut body = lits(rng, &inert, 2);
            if body.is_empty() {
                body.push(Lit { tpl: t("q", None), value: true });
            }
            impossible.push((acts.choose(rng).unwrap().clone(), body));
        }

        let mut text = String::from(
            "sort obj\ninstance o1 obj\ninstance o2 obj\nvar X obj\nvar Y obj\n\
             fluent p(obj) inertial physical\nfluent r(obj) inertial physical\nfluent q inertial physical\n\
             fluent d1(obj) defined physical\nfluent d2 defined physical\n\
             action a(obj) exogenous\naction b exogenous\naction c(obj) exogenous\n",
        );
        for s in &sel {
            text.push_str(&format!("static sel({s})\n"));
        }
        if sel.is_empty() {
            text.push_str("static sel(X) <- X != X\n");
        }
        for c in &causal {
            let eff: Vec<String> = c.effects.iter().map(Lit::text).collect();
            let mut trig = c.trigger.text();
            if let Some(b) = &c.blocker {
                trig.push_str(&format!(", not {}", b.text()));
            }
            text.push_str(&format!("causes {} on {trig}", eff.join(", ")));
            if !c.body.is_empty() {
                let body: Vec<String> = c.body.iter().map(Lit::text).collect();
                text.push_str(&format!(" if {}", body.join(", ")));
            }
            text.push('\n');
        }
        for c in &choices {
            text.push_str(&format!("choice r(Y) for sel(Y) on {}", c.trigger.text()));
            if !c.body.is_empty() {
                let body: Vec<String> = c.body.iter().map(Lit::text).collect();
                text.push_str(&format!(" if {}", body.join(", ")));
            }
            text.push('\n');
        }
        for r in &rules {
            let body: Vec<String> = r.body.iter().map(Lit::text).collect();
            text.push_str(&format!("if {} <- {}\n", r.head.text(), body.join(", ")));
        }
        for (a, body) in &impossible {
            let b: Vec<String> = body.iter().map(Lit::text).collect();
            text.push_str(&format!("impossible_if {} <- {}\n", a.text(), b.join(", ")));
        }

        let mut fluents = Vec::new();
        let mut inertial = Vec::new();
        for n in ["p", "r"] {
            for o in OBJS {
                fluents.push(format!("{n}({o})"));
                inertial.push(true);
            }
        }
        fluents.push("q".into());
        inertial.push(true);
        for o in OBJS {
            fluents.push(format!("d1({o})"));
            inertial.push(false);
        }
        fluents.push("d2".into());
        inertial.push(false);
        let actions = vec!["a(o1)".into(), "a(o2)".into(), "b".into(), "c(o1)".into(), "c(o2)".into()];
        Micro { text, causal, choices, sel, rules, impossible, fluents, inertial, actions }
    }

    fn bit(&self, name: &str) -> usize {
        self.fluents.iter().position(|f| f == name).unwrap_or_else(|| panic!("no fluent {name}"))
    }

    fn holds(&self, s: u32, l: &Lit, x: &str) -> bool {
        ((s >> self.bit(&l.tpl.ground(x))) & 1 == 1) == l.value
    }

    /// Defined fluents recomputed from the inertial bits of `s`: `d1` rules
    /// mention only inertial fluents and `d2` rules only `d1`, so two
    /// passes in order suffice.
    pub fn close(&self, mut s: u32) -> u32 {
        for (i, inert) in self.inertial.iter().enumerate() {
            if !inert {
                s &= !(1 << i);
            }
        }
        for head in ["d1", "d2"] {
            for r in self.rules.iter().filter(|r| r.head.name == head) {
                for x in OBJS {
                    if r.body.iter().all(|l| self.holds(s, l, x)) {
                        s |= 1 << self.bit(&r.head.ground(x));
                    }
                }
            }
        }
        s
    }

    pub fn executable(&self, s: u32, action: &str) -> bool {
        !self.impossible.iter().any(|(a, body)| {
            OBJS.iter().any(|x| a.ground(x) == action && body.iter().all(|l| self.holds(s, l, x)))
        })
    }

    /// Successors of `s` under the action set `occ`, by checking all 2^n
    /// candidate states against the definition: closed, direct effects hold,
    /// exactly one option of each fired choice holds, every other inertial
    /// fluent keeps its value.
    pub fn successors(&self, s: u32, occ: &[String]) -> BTreeSet<u32> {
        let fires = |trigger: &Tpl, blocker: &Option<Tpl>, body: &[Lit], x: &str| {
            occ.contains(&trigger.ground(x))
                && !blocker.as_ref().is_some_and(|b| occ.contains(&b.ground(x)))
                && body.iter().all(|l| self.holds(s, l, x))
        };
        let mut forced: HashMap<usize, bool> = HashMap::new();
        for c in &self.causal {
            for x in OBJS {
                if fires(&c.trigger, &c.blocker, &c.body, x) {
                    for e in &c.effects {
                        let f = self.bit(&e.tpl.ground(x));
                        if forced.insert(f, e.value).is_some_and(|v| v != e.value) {
                            return BTreeSet::new();
                        }
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for c in &self.choices {
            for x in OBJS {
                if fires(&c.trigger, &None, &c.body, x) {
                    groups.push(self.sel.iter().map(|o| self.bit(&format!("r({o})"))).collect());
                }
            }
        }
        let mut out = BTreeSet::new();
        for cand in 0..(1u32 << self.fluents.len()) {
            if self.close(cand) != cand {
                continue;
            }
            let bit = |f: usize| (cand >> f) & 1 == 1;
            if !forced.iter().all(|(&f, &v)| bit(f) == v) {
                continue;
            }
            if !groups.iter().all(|g| g.iter().filter(|&&f| bit(f)).count() == 1) {
                continue;
            }
            let frame_ok = (0..self.fluents.len()).all(|f| {
                !self.inertial[f]
                    || forced.contains_key(&f)
                    || groups.iter().any(|g| g.contains(&f))
                    || bit(f) == ((s >> f) & 1 == 1)
            });
            if frame_ok {
                out.insert(cand);
            }
        }
        out
    }

    pub fn to_state(&self, d: &Domain, s: u32) -> State {
        let mut st = State::empty(d.num_fluents());
        for (i, name) in self.fluents.iter().enumerate() {
            let id = d.fluent_id(&name.parse_term()).expect("fluent grounded");
            st.set(id, (s >> i) & 1 == 1);
        }
        st
    }

    pub fn mask(&self, d: &Domain, st: &State) -> u32 {
        let mut s = 0;
        for (i, name) in self.fluents.iter().enumerate() {
            if st.holds(d.fluent_id(&name.parse_term()).unwrap()) {
                s |= 1 << i;
            }
        }
        s
    }
}

pub trait ParseTerm {
    fn parse_term(&self) -> storyreader::term::Term;
}

impl ParseTerm for String {
    fn parse_term(&self) -> storyreader::term::Term {
        storyreader::term::Term::parse(self).unwrap()
    }
}

/// Compares `Domain::successors` with the brute-force oracle on one random
/// micro-domain: several random states, every action subset.
pub fn transition_oracle(seed: u64) -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let m = Micro::random(&mut rng);
    let d = storyreader::action_core::load_domain(&m.text).map_err(|e| format!("{e}\n{}", m.text))?;
    if d.num_fluents() != m.fluents.len() {
        return Err(format!("fluent count {} != {}", d.num_fluents(), m.fluents.len()));
    }
    for _ in 0..4 {
        let raw: u32 = rng.gen_range(0..(1 << m.fluents.len()));
        let s = m.close(raw);
        let st = m.to_state(&d, s);
        if d.closure(st.clone()) != st {
            return Err(format!("closure disagrees on state {s:b}\n{}", m.text));
        }
        for mask in 0..(1u32 << m.actions.len()) {
            let occ: Vec<String> =
                m.actions.iter().enumerate().filter(|(i, _)| (mask >> i) & 1 == 1).map(|(_, a)| a.clone()).collect();
            let ids: Vec<ActionId> = occ.iter().map(|a| d.action_id(&a.parse_term()).unwrap()).collect();
            let expect_exec = occ.iter().all(|a| m.executable(s, a));
            if d.legal(&st, &ids) != expect_exec {
                return Err(format!("executability of {occ:?} in {s:b} differs\n{}", m.text));
            }
            let got: BTreeSet<u32> = d.successors(&st, &ids).iter().map(|x| m.mask(&d, x)).collect();
            let want = m.successors(s, &occ);
            if got != want {
                return Err(format!("successors of {s:b} under {occ:?}: got {got:?}, want {want:?}\n{}", m.text));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Tiny histories over micro-domains: exhaustive interpretation oracle.
// ---------------------------------------------------------------------

/// A random story of up to three steps over a micro-domain, with a horizon
/// of at most 8 and an abduction budget of at most 2.
pub struct TinyCase {
    pub micro: Micro,
    pub narrative: String,
    pub cfg: Config,
}

pub fn tiny_case(seed: u64) -> TinyCase {
    let mut rng = StdRng::seed_from_u64(seed);
    let micro = Micro::random(&mut rng);
    let steps = rng.gen_range(1..=3);
    let mut narrative = String::new();
    for s in 0..steps {
        for _ in 0..rng.gen_range(0..=1) {
            let a = micro.actions.choose(&mut rng).unwrap();
            narrative.push_str(&format!("hpd {a} {} {s}\n", rng.gen_bool(0.75)));
        }
        for _ in 0..rng.gen_range(0..=1) {
            let f = ["p(o1)", "p(o2)", "r(o1)", "q", "d2"].choose(&mut rng).unwrap();
            narrative.push_str(&format!("obs {f} {} {s}\n", rng.gen_bool(0.5)));
        }
        if s > 0 && rng.gen_bool(0.25) {
            narrative.push_str(&format!("next {} {s}\n", s - 1));
        }
    }
    // make sure the last step is mentioned
    if !narrative.contains(&format!(" {}\n", steps - 1)) {
        narrative.push_str(&format!("obs q {} {}\n", rng.gen_bool(0.5), steps - 1));
    }
    let cfg = Config {
        horizon: rng.gen_range(1..=8),
        max_models: None,
        parallelism: 1,
        max_abductions: rng.gen_range(0..=2),
    };
    TinyCase { micro, narrative, cfg }
}

pub fn load_tiny(c: &TinyCase) -> Option<Story> {
    let src = Sources { domain: Some(&c.micro.text), ..Sources::default() };
    load_story(&c.narrative, &src).ok()
}

/// Every strictly increasing tuple in `0..=horizon` of length `len` that
/// respects the `next` pairs, by filtering all tuples.
pub fn brute_mappings(len: usize, next: &[(usize, usize)], horizon: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = (horizon + 1).pow(len as u32);
    for code in 0..total {
        let mut m = Vec::with_capacity(len);
        let mut c = code;
        for _ in 0..len {
            m.push(c % (horizon + 1));
            c /= horizon + 1;
        }
        if m.windows(2).all(|w| w[0] < w[1]) && next.iter().all(|&(s, s1)| m[s1] == m[s] + 1) {
            out.push(m);
        }
    }
    out.sort();
    out
}

/// (mapping, abduced) pairs of all models of a history over a domain
/// without agents. Enumerates every mapping and every placement of up to
/// `budget` abduced exogenous actions, replays each candidate, and keeps
/// the subset-minimal ones.
pub fn brute_models(d: &Domain, h: &History, cfg: &Config) -> BTreeSet<(Vec<usize>, Vec<(usize, ActionId)>)> {
    let exo: Vec<ActionId> = d.exogenous_actions().collect();
    let mut found: Vec<(Vec<usize>, Vec<(usize, ActionId)>)> = Vec::new();
    for mapping in brute_mappings(h.len(), &h.next, cfg.horizon) {
        let last = *mapping.last().unwrap();
        // abductions are only made while a story step is still ahead
        let slots: Vec<(usize, ActionId)> = (0..last).flat_map(|i| exo.iter().map(move |&a| (i, a))).collect();
        let mut sets: Vec<Vec<(usize, ActionId)>> = vec![Vec::new()];
        for k in 1..=cfg.max_abductions {
            sets.extend(combinations(&slots, k));
        }
        let mut reached: HashMap<Vec<(usize, ActionId)>, bool> = HashMap::new();
        for set in sets {
            let ok = replay_tiny(d, h, &mapping, &set);
            reached.insert(set.clone(), ok);
            if ok {
                found.push((mapping.clone(), set));
            }
        }
    }
    let all = found.clone();
    found
        .into_iter()
        .filter(|(m, ab)| {
            !all.iter().any(|(m2, ab2)| m2 == m && ab2.len() < ab.len() && ab2.iter().all(|x| ab.contains(x)))
        })
        .collect()
}

fn combinations<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, x.clone());
            out.push(rest);
        }
    }
    out
}

/// Whether some trajectory realizes `mapping` with exactly the abduced
/// actions in `set`.
fn replay_tiny(d: &Domain, h: &History, mapping: &[usize], set: &[(usize, ActionId)]) -> bool {
    let last = *mapping.last().unwrap();
    let mut frontier = vec![d.initial_state(&h.initial_overrides())];
    for i in 0..=last {
        let story = mapping.iter().position(|&m| m == i);
        let mut base: Vec<ActionId> = Vec::new();
        if let Some(s) = story {
            base.extend(h.hpd[s].iter().filter(|(_, v)| *v).map(|(a, _)| *a));
        }
        base.sort_unstable();
        base.dedup();
        let extra: Vec<ActionId> = set.iter().filter(|(j, _)| *j == i).map(|(_, a)| *a).collect();
        if extra.iter().any(|a| base.contains(a)) {
            return false;
        }
        if let Some(s) = story {
            if h.hpd[s].iter().any(|&(a, v)| !v && extra.contains(&a)) {
                return false;
            }
        }
        let mut next = Vec::new();
        for w in &frontier {
            if let Some(s) = story {
                if !w.satisfies(&h.obs[s]) || h.hpd[s].iter().any(|&(a, v)| !v && base.contains(&a)) {
                    continue;
                }
            }
            let mut occ = base.clone();
            occ.extend(&extra);
            if i < last && occ.is_empty() {
                continue;
            }
            if i == last {
                // the last story step only needs its facts to hold
                if d.legal(w, &occ) && (occ.is_empty() || !d.successors(w, &occ).is_empty()) {
                    return true;
                }
                continue;
            }
            if !d.legal(w, &occ) {
                continue;
            }
            let plain = d.successors(w, &base);
            let effective = extra.iter().all(|&a| {
                let mut one = base.clone();
                one.push(a);
                d.legal(w, &one) && {
                    let s1 = d.successors(w, &one);
                    !s1.is_empty() && s1 != plain
                }
            });
            if !effective {
                continue;
            }
            next.extend(d.successors(w, &occ));
        }
        next.sort();
        next.dedup();
        frontier = next;
        if frontier.is_empty() {
            return false;
        }
    }
    false
}

/// Checks the reader against the exhaustive oracle on one tiny case and
/// verifies every model with the independent model checker.
pub fn tiny_oracle(seed: u64) -> Result<(), String> {
    let c = tiny_case(seed);
    let Some(st) = load_tiny(&c) else {
        return Ok(());
    };
    let r = interpret(&st.domain, &st.history, &c.cfg);
    for m in &r.models {
        check_model(&st.domain, &st.history, m).map_err(|e| format!("seed {seed}: {e}\n{}", c.narrative))?;
        if !m.mapping.windows(2).all(|w| w[0] < w[1]) {
            return Err(format!("seed {seed}: mapping not monotone"));
        }
        let last = *m.mapping.last().unwrap();
        if m.occurrences[..last].iter().any(|o| o.is_empty()) {
            return Err(format!("seed {seed}: gap before the last story step"));
        }
    }
    let got: BTreeSet<(Vec<usize>, Vec<(usize, ActionId)>)> =
        r.models.iter().map(|m| (m.mapping.clone(), m.abduced.clone())).collect();
    let want = brute_models(&st.domain, &st.history, &c.cfg);
    if got != want {
        return Err(format!(
            "seed {seed}: reader {got:?} vs oracle {want:?}\nhorizon {} budget {}\n{}\n{}",
            c.cfg.horizon, c.cfg.max_abductions, c.narrative, c.micro.text
        ));
    }
    Ok(())
}
