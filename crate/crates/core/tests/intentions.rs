use storyreader::action_core::{load_domain, Domain, State};
use storyreader::intentions::{MentalAction, MentalState, Occurrence};
use storyreader::term::Term;

// One agent with a top activity whose second component is a sub-activity.
const NESTED: &str = "\
sort person
instance ann person
var P person
fluent did_a(person) inertial physical
fluent did_b(person) inertial physical
fluent did_c(person) inertial physical
fluent did_d(person) inertial physical
action a(person) agent actor=1
action b(person) agent actor=1
action c(person) agent actor=1
action d(person) agent actor=1
causes did_a(P) on a(P)
causes did_b(P) on b(P)
causes did_c(P) on c(P)
causes did_d(P) on d(P)
activity top(P)
  actor P
  goal did_d(P)
  component 1 a(P)
  component 2 sub(P)
  component 3 d(P)
end
activity sub(P)
  actor P
  goal did_c(P)
  component 1 b(P)
  component 2 c(P)
end
";

fn t(s: &str) -> Term {
    s.parse().unwrap()
}

struct Fix {
    d: Domain,
    ann: usize,
    top: usize,
    sub: usize,
}

fn fix() -> Fix {
    let d = load_domain(NESTED).unwrap();
    let ann = d.agent_id("ann").unwrap();
    let top = d.activity_id(&t("top(ann)")).unwrap();
    let sub = d.activity_id(&t("sub(ann)")).unwrap();
    Fix { d, ann, top, sub }
}

fn phys(d: &Domain, s: &str) -> Occurrence {
    Occurrence::Physical(d.action_id(&t(s)).unwrap())
}

/// Performs the intended action of `top`, evolving the world too.
fn step(f: &Fix, world: &State, mind: &MentalState) -> (State, MentalState, Occurrence) {
    let occ = mind.next_action(&f.d, f.top).expect("something intended");
    let next_world = match occ {
        Occurrence::Physical(a) => f.d.successors(world, &[a]).pop().unwrap(),
        Occurrence::Mental(_) => world.clone(),
    };
    let next_mind = mind.apply(&f.d, &[occ], &next_world);
    (next_world, next_mind, occ)
}

#[test]
fn plan_runs_through_the_sub_activity() {
    let f = fix();
    let d = &f.d;
    let mut world = d.initial_state(&[]);
    let mut mind = MentalState::initial(d);
    assert_eq!(mind.next_action(d, f.top), None);
    mind = mind.apply(d, &[Occurrence::Mental(MentalAction::Start(f.ann, f.top))], &world);
    assert_eq!(mind.status(f.top), 0);
    assert!(mind.active_goal(f.ann, d.activity(f.top).goal));

    let mut trace = Vec::new();
    for _ in 0..6 {
        let (w, m, occ) = step(&f, &world, &mind);
        trace.push(occ.to_term(d).to_string());
        world = w;
        mind = m;
    }
    assert_eq!(
        trace,
        ["a(ann)", "start(ann,sub(ann))", "b(ann)", "c(ann)", "stop(ann,sub(ann))", "d(ann)"]
    );
    // a finished top activity intends nothing further; stopping it is up to the reader
    assert_eq!(mind.next_action(d, f.top), None);
    mind = mind.apply(d, &[Occurrence::Mental(MentalAction::Stop(f.ann, f.top))], &world);
    assert!(!mind.active(f.top));
    assert!(!mind.active(f.sub));
    // goal reached, so nothing is left selected
    assert!(mind.active_goals().next().is_none());
}

#[test]
fn sub_activity_counts_as_minor_and_descendant() {
    let f = fix();
    let d = &f.d;
    let world = d.initial_state(&[]);
    let mut mind = MentalState::initial(d);
    for occ in [
        Occurrence::Mental(MentalAction::Start(f.ann, f.top)),
        phys(d, "a(ann)"),
        Occurrence::Mental(MentalAction::Start(f.ann, f.sub)),
    ] {
        mind = mind.apply(d, &[occ], &world);
    }
    assert!(mind.minor(d, f.sub));
    assert!(!mind.minor(d, f.top));
    assert!(mind.is_descendant(d, f.sub, f.top));
    assert_eq!(mind.top_activities(d, f.ann), vec![f.top]);
    assert!(mind.in_progress(d, f.sub));
}

#[test]
fn stopping_the_top_stops_descendants_and_keeps_its_goal() {
    let f = fix();
    let d = &f.d;
    let world = d.initial_state(&[]);
    let mut mind = MentalState::initial(d);
    for occ in [
        Occurrence::Mental(MentalAction::Start(f.ann, f.top)),
        phys(d, "a(ann)"),
        Occurrence::Mental(MentalAction::Start(f.ann, f.sub)),
        phys(d, "b(ann)"),
    ] {
        mind = mind.apply(d, &[occ], &world);
    }
    assert_eq!(mind.status(f.sub), 1);
    let stopped = mind.apply(d, &[Occurrence::Mental(MentalAction::Stop(f.ann, f.top))], &world);
    assert!(!stopped.active(f.top));
    assert!(!stopped.active(f.sub));
    assert!(stopped.active_goal(f.ann, d.activity(f.top).goal));
    assert!(!stopped.active_goal(f.ann, d.activity(f.sub).goal));
}

#[test]
fn stopping_a_minor_activity_advances_its_parent() {
    let f = fix();
    let d = &f.d;
    let world = d.initial_state(&[]);
    let mut mind = MentalState::initial(d);
    for occ in [
        Occurrence::Mental(MentalAction::Start(f.ann, f.top)),
        phys(d, "a(ann)"),
        Occurrence::Mental(MentalAction::Start(f.ann, f.sub)),
        Occurrence::Mental(MentalAction::Stop(f.ann, f.sub)),
    ] {
        mind = mind.apply(d, &[occ], &world);
    }
    assert_eq!(mind.status(f.top), 2);
    assert_eq!(mind.next_action(d, f.top), Some(phys(d, "d(ann)")));
}

#[test]
fn unrelated_action_does_not_advance_the_plan() {
    let f = fix();
    let d = &f.d;
    let world = d.initial_state(&[]);
    let mut mind = MentalState::initial(d);
    mind = mind.apply(d, &[Occurrence::Mental(MentalAction::Start(f.ann, f.top))], &world);
    let after = mind.apply(d, &[phys(d, "d(ann)")], &world);
    assert_eq!(after.status(f.top), 0);
}

#[test]
fn mental_legality() {
    let f = fix();
    let d = &f.d;
    let world = d.initial_state(&[]);
    let goal = d.activity(f.top).goal;
    let mind = MentalState::initial(d);
    assert!(mind.mental_legal(d, &world, MentalAction::Select(f.ann, goal)));
    assert!(mind.mental_legal(d, &world, MentalAction::Start(f.ann, f.top)));
    assert!(!mind.mental_legal(d, &world, MentalAction::Stop(f.ann, f.top)));
    assert!(!mind.mental_legal(d, &world, MentalAction::Abandon(f.ann, goal)));
    assert!(!mind.mental_legal(d, &world, MentalAction::Replan(f.ann, goal)));

    let selected = mind.apply(d, &[Occurrence::Mental(MentalAction::Select(f.ann, goal))], &world);
    assert!(selected.mental_legal(d, &world, MentalAction::Replan(f.ann, goal)));
    assert!(selected.mental_legal(d, &world, MentalAction::Abandon(f.ann, goal)));
    let replanned = selected.apply(d, &[Occurrence::Mental(MentalAction::Replan(f.ann, goal))], &world);
    assert!(!replanned.mental_legal(d, &world, MentalAction::Replan(f.ann, goal)));

    // a goal that already holds cannot be selected
    let mut done = world.clone();
    done.set(goal, true);
    assert!(!mind.mental_legal(d, &done, MentalAction::Select(f.ann, goal)));
}
