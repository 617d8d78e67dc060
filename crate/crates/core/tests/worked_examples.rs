use rentdiv_core::{
    budget_aware_ef, combined_solve, initial_ef_allocation, maximin_rents, minspread_rents, oracle_solve, scc_max_rent,
    utilities, Bound, CertificateKind, ComponentSubproblem, Instance, Objective, ObjectiveValue, OracleObjective,
    Rational, RawInstance, SolveStatus,
};

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| int(v)).collect()
}

fn finite(values: &[i64]) -> Vec<Bound> {
    values.iter().map(|&v| Bound::Finite(int(v))).collect()
}

fn four_rooms() -> Instance {
    let v = [[20, 0, 20, 0], [0, 19, 0, 0], [5, 0, 5, 0], [0, 0, 0, 2]];
    RawInstance::new(v.iter().map(|row| ints(row)).collect(), int(4))
        .lower_bounds(finite(&[0, 0, 0, 2]))
        .upper_bounds(finite(&[2, 2, 2, 2]))
        .validate()
        .unwrap()
}

fn two_rooms() -> RawInstance {
    RawInstance::new(vec![ints(&[10, 2]), ints(&[4, 6])], int(8))
}

#[test]
fn leximin_does_not_minimize_spread() {
    let inst = four_rooms();
    let lex = combined_solve(&inst, Objective::Leximin).unwrap();
    let lex_alloc = lex.allocation.unwrap();
    assert_eq!(lex_alloc.rents, ints(&[0, 2, 0, 2]));
    assert_eq!(utilities(&inst, &lex_alloc).0, ints(&[20, 17, 5, 0]));

    let spread = combined_solve(&inst, Objective::MinSpread).unwrap();
    let spread_alloc = spread.allocation.unwrap();
    assert_eq!(spread_alloc.rents, ints(&[1, 0, 1, 2]));
    assert_eq!(utilities(&inst, &spread_alloc).0, ints(&[19, 19, 4, 0]));

    assert_eq!(utilities(&inst, &lex_alloc).spread(), int(20));
    assert_eq!(spread.objective_value, ObjectiveValue::Scalar(int(19)));
}

#[test]
fn oracle_agrees_on_the_four_room_example() {
    let inst = four_rooms();
    let lex = oracle_solve(&inst, OracleObjective::Leximin).unwrap();
    assert_eq!(lex.value, ObjectiveValue::Vector(ints(&[0, 5, 17, 20])));
    let spread = oracle_solve(&inst, OracleObjective::MinSpread).unwrap();
    assert_eq!(spread.value, ObjectiveValue::Scalar(int(19)));
}

#[test]
fn two_room_objectives() {
    let inst = two_rooms().validate().unwrap();
    assert_eq!(initial_ef_allocation(&inst).unwrap().rents, ints(&[4, 4]));
    let best = maximin_rents(&inst, None).unwrap();
    assert_eq!(best.allocation.unwrap().rents, ints(&[6, 2]));
    assert_eq!(best.objective_value, ObjectiveValue::Scalar(int(4)));

    let capped = two_rooms().upper_bounds(finite(&[5, 5])).validate().unwrap();
    let spread = minspread_rents(&capped, None).unwrap();
    assert_eq!(spread.allocation.unwrap().rents, ints(&[5, 3]));
    assert_eq!(spread.objective_value, ObjectiveValue::Scalar(int(2)));
}

#[test]
fn infeasibility_kinds() {
    let pinned = two_rooms().lower_bounds(finite(&[0, 3])).upper_bounds(finite(&[0, 8])).validate().unwrap();
    let out = combined_solve(&pinned, Objective::Any).unwrap();
    assert_eq!(out.status, SolveStatus::Infeasible);
    assert_eq!(out.certificate.unwrap().kind, CertificateKind::EnvyPathViolation);

    let mut raw = two_rooms().budgets(vec![finite(&[6, 5]), finite(&[5, 3])]);
    raw.total_rent = int(10);
    let poor = raw.validate().unwrap();
    let out = budget_aware_ef(&poor, Objective::Any).unwrap();
    assert_eq!(out.certificate.unwrap().kind, CertificateKind::BudgetCapViolation);

    let crossed = two_rooms().lower_bounds(finite(&[5, 5])).validate();
    assert!(crossed.is_err());
}

#[test]
fn tied_pair_rises_to_both_budgets() {
    let inst = RawInstance::new(vec![ints(&[5, 5]), ints(&[5, 5])], int(6))
        .budgets(vec![finite(&[3, 4]), finite(&[4, 3])])
        .validate()
        .unwrap();
    let start = initial_ef_allocation(&inst.unconstrained()).unwrap();
    let sub = ComponentSubproblem::new(&inst, &start, &[0, 1]);
    let best = scc_max_rent(&sub).unwrap();
    assert_eq!(best.delta, Bound::Finite(int(8)));
    assert_eq!(best.allocation.rents, ints(&[4, 4]));
}
