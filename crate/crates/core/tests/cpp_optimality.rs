mod support;

use navtest::cpp::solve_cpp;
use navtest::navgraph::{covers, path_set_cost};
use support::oracle::{min_covering_walk_cost, random_strong_graphs};

#[test]
fn matches_brute_force_on_small_graphs() {
    for (i, g) in random_strong_graphs(2024, 200, 6).iter().enumerate() {
        let sol = solve_cpp(g).unwrap();
        let best = min_covering_walk_cost(g).unwrap();
        assert_eq!(sol.total_cost, best, "instance {i}: {:?}", g.edges());
        assert!(covers(g, &sol.paths), "instance {i}");
        assert!(sol.tour.len() >= g.edges().len());
        assert!(path_set_cost(&sol.paths) <= sol.total_cost);
    }
}

#[test]
fn tour_is_a_closed_walk_using_every_edge() {
    for g in random_strong_graphs(7, 100, 8) {
        let sol = solve_cpp(&g).unwrap();
        let ends = g.endpoints();
        let pos = |id: &str| g.edge_position(id).unwrap();
        let mut at = g.home_index();
        for id in &sol.tour {
            let (from, to) = ends[pos(id.as_str())];
            assert_eq!(from, at);
            at = to;
        }
        assert_eq!(at, g.home_index());
        for e in g.edges() {
            assert!(sol.tour.contains(&e.id));
        }
    }
}

#[test]
fn oracle_sanity() {
    let g = navtest::fixtures::figure1::<navtest::Rational>();
    let aug = navtest::navgraph::make_strongly_connected(&g).unwrap();
    assert_eq!(min_covering_walk_cost(&aug), Some(navtest::Rational::from_integer(10)));
}
