//! One line per acceptance criterion, then a single assertion over all.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use storyreader::action_core::{ActionId, Domain};
use storyreader::golden::{parse_trace, trace_atoms};
use storyreader::intentions::Occurrence;
use storyreader::narrative::Narrative;
use storyreader::qa::{answer, answer_occur, answer_when, parse_question, Aggregate, ModelAnswer, Verdict};
use storyreader::reader::{check_model, interpret_fixed, Config, Fixed, Model};

use common::{has, run_example, EXAMPLES, EXAMPLE1_TRACE};

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_normal_trace() -> Check {
    let t = Instant::now();
    let (st, r) = run_example(1);
    let elapsed = t.elapsed();
    ensure(r.models.len() == 1, || format!("{} models", r.models.len()))?;
    let want: BTreeSet<String> = parse_trace(EXAMPLE1_TRACE).map_err(|e| e.to_string())?.into_iter().collect();
    let got: BTreeSet<String> = trace_atoms(&st.domain, &r.models[0]).into_iter().collect();
    ensure(got == want, || {
        format!("missing {:?}, extra {:?}", want.difference(&got).collect::<Vec<_>>(), got.difference(&want).collect::<Vec<_>>())
    })?;
    ensure(r.models[0].occurrences.len() == 33, || format!("{} occurrence steps", r.models[0].occurrences.len()))?;
    ensure(elapsed.as_secs_f64() < 5.0, || format!("took {elapsed:?}"))
}

fn serendipity() -> Check {
    let (st, r) = run_example(2);
    let d = &st.domain;
    ensure(r.models.len() == 7, || format!("{} models", r.models.len()))?;
    let pay = d.action_id(&"pay(owner,b)".parse().unwrap()).unwrap();
    let mut steps: Vec<usize> = r.models.iter().flat_map(|m| m.steps_of(&Occurrence::Physical(pay))).collect();
    steps.sort_unstable();
    ensure(steps == (12..=18).collect::<Vec<_>>(), || format!("pay(owner,b) at {steps:?}"))?;
    let tail = [
        ("stop(waitress,w_act(waitress,nicole,lentil_soup,lentil_soup))", 20),
        ("start(nicole,c_subact_2(nicole,waitress))", 21),
        ("stop(nicole,c_subact_2(nicole,waitress))", 22),
        ("leave(nicole)", 25),
        ("stop(nicole,c_act(nicole,veg_r,waitress,lentil_soup))", 26),
    ];
    for (k, m) in r.models.iter().enumerate() {
        for (atom, i) in tail {
            ensure(has(d, m, atom, i), || format!("model {} lacks {atom} at {i}", k + 1))?;
        }
    }
    for (q, want) in [("occur leave(nicole)", Verdict::Yes), ("occur pay(nicole,b)", Verdict::No)] {
        let a = answer(d, &r.models, &parse_question(q).unwrap()).map_err(|e| e.to_string())?;
        ensure(a.per_model.iter().all(|x| *x == ModelAnswer::Occur(want)), || format!("{q}: {:?}", a.per_model))?;
        ensure(a.aggregate == Aggregate::Unanimous { answer: ModelAnswer::Occur(want) }, || format!("{q}: {:?}", a.aggregate))?;
    }
    Ok(())
}

fn without(d: &Domain, m: &Model, name: &str) -> Vec<Vec<String>> {
    m.occurrences
        .iter()
        .map(|o| o.iter().map(|x| x.to_term(d).to_string()).filter(|s| !s.starts_with(name)).collect())
        .collect()
}

fn futility() -> Check {
    let (st, r) = run_example(3);
    let d = &st.domain;
    ensure(!r.models.is_empty(), || "no models".into())?;
    for (k, m) in r.models.iter().enumerate() {
        ensure(has(d, m, "stop(nicole,c_act(nicole,veg_r,waitress,lentil_soup))", 10), || format!("model {}: no stop at 10", k + 1))?;
        ensure(has(d, m, "replan(nicole,satiated_and_out(nicole))", 11), || format!("model {}: no replan at 11", k + 1))?;
        for (i, occ) in m.occurrences.iter().enumerate() {
            for o in occ {
                let s = o.to_term(d).to_string();
                let banned = ["eat(nicole", "pay(nicole", "leave(nicole"].iter().any(|p| s.starts_with(p));
                ensure(!banned, || format!("model {}: {s} at {i}", k + 1))?;
            }
        }
        ensure(
            m.abduced.len() == 1 && d.action_term(m.abduced[0].1).functor == "make_unavailable",
            || format!("model {}: abduced {:?}", k + 1, m.abduced),
        )?;
    }
    let base = without(d, &r.models[0], "make_unavailable");
    ensure(r.models.iter().all(|m| without(d, m, "make_unavailable") == base), || "models differ beyond make_unavailable".into())?;
    let placements: BTreeSet<usize> = r.models.iter().map(|m| m.abduced[0].0).collect();
    ensure(placements.len() == r.models.len(), || "duplicate placements".into())
}

fn diagnosis() -> Check {
    let (st, r) = run_example(4);
    let d = &st.domain;
    ensure(r.models.len() == 2, || format!("{} models", r.models.len()))?;
    let at = |m: &Model| m.abduced.iter().map(|&(i, a)| (i, d.action_term(a).to_string())).collect::<Vec<_>>();
    let first = r.models.iter().position(|m| at(m) == [(11, "interference".to_string())]).ok_or("no interference at 11")?;
    let second = r.models.iter().position(|m| at(m) == [(13, "interference".to_string())]).ok_or("no interference at 13")?;
    let (m1, m2) = (&r.models[first], &r.models[second]);
    ensure(has(d, m1, "order(nicole,lentil_soup,waitress)", 11), || "order not at 11".into())?;
    ensure(has(d, m1, "start(waitress,w_act(waitress,nicole,miso_soup,miso_soup))", 4), || "AS1 waiter activity".into())?;
    ensure(has(d, m2, "request(waitress,lentil_soup,cook1)", 13), || "request not at 13".into())?;
    ensure(has(d, m2, "start(waitress,w_act(waitress,nicole,lentil_soup,miso_soup))", 4), || "AS2 waiter activity".into())?;
    ensure(has(d, m2, "start(cook1,ck_act(cook1,miso_soup,waitress))", 15), || "AS2 cook activity".into())?;
    let q = parse_question("occur request(waitress,lentil_soup,cook1)").unwrap();
    let a = answer(d, &r.models, &q).map_err(|e| e.to_string())?;
    let Aggregate::Depends { cases } = &a.aggregate else {
        return Err(format!("aggregate {:?}", a.aggregate));
    };
    ensure(cases.len() == 2, || format!("{cases:?}"))?;
    ensure(a.per_model[first] != ModelAnswer::Occur(Verdict::Yes), || "AS1 answered yes".into())?;
    ensure(a.per_model[second] == ModelAnswer::Occur(Verdict::Yes), || "AS2 not yes".into())
}

fn all_bundled() -> Vec<(storyreader::story::Story, Vec<Model>)> {
    (1..=4)
        .map(|n| {
            let (st, r) = run_example(n);
            (st, r.models)
        })
        .collect()
}

fn transition_oracle() -> Check {
    for seed in 0..200 {
        common::transition_oracle(seed).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(())
}

fn replay() -> Check {
    for (n, (st, models)) in all_bundled().iter().enumerate() {
        for (k, m) in models.iter().enumerate() {
            check_model(&st.domain, &st.history, m).map_err(|e| format!("example {} model {}: {e}", n + 1, k + 1))?;
        }
    }
    Ok(())
}

fn minimality_witness() -> Check {
    let cfg = Config::default();
    for (n, (st, models)) in all_bundled().iter().enumerate() {
        for (k, m) in models.iter().enumerate() {
            let fixed = Fixed { mapping: m.mapping.clone(), choices: m.activity_choices.clone(), abduced: m.abduced.clone() };
            let again = interpret_fixed(&st.domain, &st.history, &cfg, &fixed);
            ensure(again.models.contains(m), || format!("example {} model {} not reproduced", n + 1, k + 1))?;
            for drop in 0..m.abduced.len() {
                let mut fewer = fixed.clone();
                fewer.abduced.remove(drop);
                let r = interpret_fixed(&st.domain, &st.history, &cfg, &fewer);
                ensure(r.models.is_empty(), || format!("example {} model {}: abduced set not minimal", n + 1, k + 1))?;
            }
        }
    }
    Ok(())
}

fn mental_invariants() -> Check {
    for (n, (st, models)) in all_bundled().iter().enumerate() {
        let d = &st.domain;
        for (k, m) in models.iter().enumerate() {
            for (i, s) in m.trajectory.iter().enumerate() {
                for ag in 0..d.agents().len() {
                    let tops = s.mind.top_goals(d, ag);
                    ensure(tops.len() <= 1, || format!("example {} model {} step {i}: {} top goals", n + 1, k + 1, tops.len()))?;
                }
                let Some(occ) = m.occurrences.get(i) else { continue };
                for o in occ {
                    let Occurrence::Physical(a) = o else { continue };
                    for ag in d.agent_actors(*a) {
                        let justified = s.mind.running().any(|mm| {
                            d.activity(mm).actor == ag && s.mind.in_progress(d, mm) && s.mind.next_action(d, mm) == Some(*o)
                        });
                        ensure(justified, || format!("example {} model {} step {i}: {} unjustified", n + 1, k + 1, o.to_term(d)))?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn tiny_histories() -> Check {
    for seed in 0..1000 {
        common::tiny_oracle(seed)?;
    }
    Ok(())
}

fn round_trip() -> Check {
    let mut texts: Vec<&str> = EXAMPLES.to_vec();
    texts.push(include_str!("../assets/example1_frames.story"));
    for (k, text) in texts.iter().enumerate() {
        let n = Narrative::parse(text).map_err(|e| e.to_string())?;
        let printed = n.to_string();
        let again = Narrative::parse(&printed).map_err(|e| format!("narrative {}: reprint fails: {e}", k + 1))?;
        ensure(again == n, || format!("narrative {} changes on reprint", k + 1))?;
        ensure(again.to_string() == printed, || format!("narrative {} print unstable", k + 1))?;
    }
    Ok(())
}

/// Whether inserting `a` at step `j` breaks legality, the one-action-per-
/// agent limit or justification.
fn insertion_violates(d: &Domain, m: &Model, j: usize, a: ActionId) -> bool {
    let s = &m.trajectory[j];
    let occ: &[Occurrence] = m.occurrences.get(j).map_or(&[], |o| o.as_slice());
    let mut phys: Vec<ActionId> = occ
        .iter()
        .filter_map(|o| match o {
            Occurrence::Physical(x) => Some(*x),
            Occurrence::Mental(_) => None,
        })
        .collect();
    phys.push(a);
    if !d.legal(&s.world, &phys) {
        return true;
    }
    let busy = |ag| {
        occ.iter().any(|o| match o {
            Occurrence::Mental(ma) => ma.agent() == ag,
            Occurrence::Physical(x) => d.agent_actors(*x).any(|y| y == ag),
        })
    };
    d.agent_actors(a).any(|ag| {
        busy(ag)
            || !s.mind.running().any(|mm| {
                d.activity(mm).actor == ag
                    && s.mind.in_progress(d, mm)
                    && s.mind.next_action(d, mm) == Some(Occurrence::Physical(a))
            })
    })
}

fn qa_exclusivity() -> Check {
    let bundled = all_bundled();
    let mut rng = StdRng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 500 {
        let (st, models) = bundled.choose(&mut rng).unwrap();
        let d = &st.domain;
        let m = models.choose(&mut rng).unwrap();
        let a: ActionId = rng.gen_range(0..d.num_actions());
        let v = answer_occur(d, m, a);
        let occurs = m.occurrences.iter().any(|o| o.contains(&Occurrence::Physical(a)));
        let yes = v == Verdict::Yes;
        let no = v == Verdict::No;
        ensure(!(yes && no), || "both yes and no".into())?;
        ensure(yes == occurs, || format!("{}: verdict {v} but occurs={occurs}", d.action_term(a)))?;
        ensure(yes == !answer_when(m, a).is_empty(), || format!("{}: occur and when disagree", d.action_term(a)))?;
        if no {
            let sound = (0..=m.last_step()).all(|j| insertion_violates(d, m, j, a));
            ensure(sound, || format!("{}: `no` but insertion is possible", d.action_term(a)))?;
        }
        checked += 1;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> Check)> = vec![
        ("1 golden normal trace", golden_normal_trace),
        ("2 serendipity", serendipity),
        ("3 futility", futility),
        ("4 diagnosis", diagnosis),
        ("5a transition oracle, 200 micro-domains", transition_oracle),
        ("5b replay of every model", replay),
        ("5c abduction minimality witness", minimality_witness),
        ("5d single top goal and justified occurrences", mental_invariants),
        ("5e mappings and no-gap, 1000 tiny histories", tiny_histories),
        ("6a narrative parse/print/parse", round_trip),
        ("6b occur exclusivity, 500 pairs", qa_exclusivity),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS  {name}"),
            Err(e) => {
                println!("FAIL  {name}: {e}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
