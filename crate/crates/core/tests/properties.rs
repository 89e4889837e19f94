use proptest::prelude::*;

use tspef::consys::{
    build_lap_polytope, build_q0_triplet, build_q1bar, build_q2bar, objective_on_w, triplet_cost_vector,
    Cmp, ConstraintSystem, Family, LinRow, Objective, VarId,
};
use tspef::instances::{
    all_tours, assignment_to_tour, brute_force_lap, brute_force_tsp, permutations, tour_cost,
    tour_to_assignment, tour_to_legs, Matrix, Tour, TspInstance,
};
use tspef::lp::{enumerate_vertices, enumerate_vertices_by_pivoting, solve, DEFAULT_BASIS_GUARD};
use tspef::projection::{lift_w_to_x, lift_w_to_y};
use tspef::rational::int;

fn matrix(size: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(0i64..=100, size * size)
        .prop_map(move |v| Matrix::from_fn(size, |i, j| int(v[i * size + j])))
}

fn instance(n: usize) -> impl Strategy<Value = TspInstance> {
    matrix(n).prop_map(move |d| {
        let d = Matrix::from_fn(n, |i, j| if i == j { int(0) } else { d.get(i, j).clone() });
        TspInstance::new(d).unwrap()
    })
}

fn tour(max_m: usize) -> impl Strategy<Value = Tour> {
    (1..=max_m)
        .prop_flat_map(|m| Just((1..=m).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|order| Tour::new(order).unwrap())
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tour_assignment_round_trip(t in tour(7)) {
        let w = tour_to_assignment(&t);
        prop_assert!(w.is_permutation());
        prop_assert_eq!(assignment_to_tour(&w).unwrap(), t);
    }

    #[test]
    fn triplet_lift_has_one_triplet_per_stage_triple(t in tour(7).prop_filter("m >= 4", |t| t.m() >= 4)) {
        let x = lift_w_to_x(&tour_to_assignment(&t)).unwrap();
        prop_assert_eq!(x.support().len(), binomial(t.m(), 3));
    }

    #[test]
    fn applied_costs_match_tour_cost(inst in (5usize..=6).prop_flat_map(instance), seed in any::<u64>()) {
        let tours = all_tours(inst.m());
        let t = &tours[(seed % tours.len() as u64) as usize];
        let x = lift_w_to_x(&tour_to_assignment(t)).unwrap();
        let obj = triplet_cost_vector(&inst).unwrap();
        let got = obj.value(|v| match v {
            VarId::X(tr) => x.get(tr).cloned().unwrap_or_else(|| int(0)),
            _ => int(0),
        });
        prop_assert_eq!(got, tour_cost(&inst, t).unwrap());
    }

    #[test]
    fn solves_are_certified_exactly(c in matrix(3), signs in prop::collection::vec(-5i64..=5, 12)) {
        let q = build_q1bar(4).unwrap();
        let mut obj = objective_on_w(&c);
        for (k, (i, j)) in tspef::instances::LegVector::pairs(4).into_iter().enumerate() {
            obj = obj.plus(&Objective::new([(VarId::Y(i, j), int(signs[k]))]));
        }
        let sol = solve(&q, &obj).unwrap();
        prop_assert!(sol.is_optimal());
        sol.certify(&q, &obj).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn simplex_matches_brute_force_lap(c in (1usize..=5).prop_flat_map(matrix)) {
        let m = c.size();
        let sol = solve(&build_lap_polytope(m).unwrap(), &objective_on_w(&c)).unwrap();
        let (_, oracle) = brute_force_lap(&c).unwrap();
        prop_assert_eq!(sol.objective_value, Some(oracle));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lp0_is_a_lower_bound(inst in instance(5)) {
        let row = tspef::verify::lp0_bound(&inst).unwrap();
        prop_assert!(row.holds());
        let (_, best) = brute_force_tsp(&inst).unwrap();
        prop_assert_eq!(row.tour, best);
    }

    #[test]
    fn enumerators_agree_on_cut_squares(cuts in prop::collection::vec((1i64..=4, 1i64..=4, 2i64..=8), 0..4)) {
        let (a, b) = (VarId::w(1, 1), VarId::w(1, 2));
        let mut s = ConstraintSystem::new();
        s.add_var(a, true);
        s.add_var(b, true);
        s.add_row(LinRow::new("a", [(a, int(1))], Cmp::Le, int(3))).unwrap();
        s.add_row(LinRow::new("b", [(b, int(1))], Cmp::Le, int(3))).unwrap();
        for (k, (p, q, r)) in cuts.into_iter().enumerate() {
            s.add_row(LinRow::new(format!("cut[{k}]"), [(a, int(p)), (b, int(q))], Cmp::Le, int(r))).unwrap();
        }
        let ex = enumerate_vertices(&s, DEFAULT_BASIS_GUARD).unwrap();
        let pv = enumerate_vertices_by_pivoting(&s, DEFAULT_BASIS_GUARD).unwrap();
        prop_assert_eq!(ex.vertices, pv.vertices);
    }
}

#[test]
fn permutation_vertex_bijection() {
    for m in 1..=6 {
        let perms = permutations(m);
        assert_eq!(perms.len(), (1..=m).product::<usize>());
        let mut images: Vec<_> = perms
            .iter()
            .map(|p| tour_to_assignment(&Tour::new(p.clone()).unwrap()))
            .collect();
        for (p, w) in perms.iter().zip(&images) {
            assert_eq!(assignment_to_tour(w).unwrap().order(), p.as_slice());
        }
        images.sort_by_key(|w| format!("{w:?}"));
        images.dedup();
        assert_eq!(images.len(), perms.len());
    }
}

#[test]
fn leg_lift_coherence() {
    for m in 1..=6 {
        for t in all_tours(m) {
            let w = tour_to_assignment(&t);
            let via_tour = tour_to_legs(&assignment_to_tour(&w).unwrap(), m + 1).unwrap();
            assert_eq!(lift_w_to_y(&w).unwrap(), via_tour, "{t}");
        }
    }
}

#[test]
fn builder_counts() {
    for n in 4..=7 {
        let m = n - 1;
        let q1 = build_q1bar(n).unwrap();
        assert_eq!(q1.count_family(Family::W), m * m);
        assert_eq!(q1.count_family(Family::Y), n * (n - 1));
        assert_eq!(q1.eq_row_count(), 4 * m + 1);
        assert_eq!(q1.le_row_count(), m * (m - 1) * (m - 1));
        assert_eq!(q1.nonneg().len(), q1.var_count());
        if m < 4 {
            assert!(build_q0_triplet(m).is_err());
            continue;
        }

        let triplets = binomial(m, 3) * m * (m - 1) * (m - 2);
        let q0 = build_q0_triplet(m).unwrap();
        assert_eq!(q0.count_family(Family::X), triplets);
        assert_eq!(q0.eq_row_count(), 2 * m);
        assert_eq!(q0.le_row_count(), 4 * triplets);

        let q2 = build_q2bar(n).unwrap();
        assert_eq!(q2.var_count(), m * m + n * (n - 1) + triplets);
        assert_eq!(q2.row_count(), q0.row_count() + q1.row_count() - 2 * m);
    }
    assert_eq!(build_q0_triplet(4).unwrap().count_family(Family::X), 96);
    assert_eq!(build_q0_triplet(5).unwrap().count_family(Family::X), 600);
}

#[test]
fn leg_extension_vertices_small() {
    // counts cross-checked with cddlib
    let v = enumerate_vertices_by_pivoting(&build_q1bar(3).unwrap(), DEFAULT_BASIS_GUARD).unwrap();
    assert_eq!((v.len(), v.integral_count()), (4, 2));
    let e = enumerate_vertices(&build_q1bar(3).unwrap(), DEFAULT_BASIS_GUARD).unwrap();
    assert_eq!(e.vertices, v.vertices);
}

#[test]
fn leg_extension_vertices_n4() {
    // counts cross-checked with cddlib; exhaustive bases would be C(33, 24)
    let v = enumerate_vertices_by_pivoting(&build_q1bar(4).unwrap(), DEFAULT_BASIS_GUARD).unwrap();
    assert_eq!(v.len(), 228);
    assert_eq!(v.integral_count(), 6);
    assert!(matches!(
        enumerate_vertices(&build_q1bar(4).unwrap(), DEFAULT_BASIS_GUARD),
        Err(tspef::Error::EnumerationRefused(_))
    ));
}

#[test]
fn triplet_vertex_probe_is_reported() {
    let v = tspef::verify::probe_triplet_vertices(4, 3).unwrap();
    assert_eq!(v["probes"], 4);
    assert!(v["fractional_optima"].as_u64().unwrap() <= 4);
}
