//! The files under `instances/` are the canonical serialization of the
//! corpus generators.

use std::path::{Path, PathBuf};

use rbgame::corpus::{
    canonical_knapsack_game, infeasible_player, matching_pennies, random_knapsack_game,
    GeneratorSpec,
};
use rbgame::game::GameModel;
use rbgame::models::InstanceDocument;

fn path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../instances")
        .join(name)
}

fn assert_golden(name: &str, doc: InstanceDocument) {
    let text = std::fs::read_to_string(path(name)).unwrap();
    assert_eq!(text, doc.to_json(), "{name}");
    assert_eq!(InstanceDocument::load(&path(name)).unwrap(), doc);
}

#[test]
fn fixed_instances() {
    assert_golden(
        "knapsack_canonical.json",
        InstanceDocument::from_game("knapsack_canonical", &canonical_knapsack_game()),
    );
    assert_golden(
        "matching_pennies.json",
        InstanceDocument::from_game("matching_pennies", &matching_pennies()),
    );
    let g = GameModel::new(vec![infeasible_player()]).unwrap();
    assert_golden(
        "infeasible_player.json",
        InstanceDocument::from_game("infeasible_player", &g),
    );
}

#[test]
fn random_instances() {
    for (seed, n, m) in [(1u64, 2usize, 3usize), (2, 3, 4), (3, 2, 10)] {
        let name = format!("knapsack_s{seed}_n{n}_m{m}");
        let g = random_knapsack_game(&GeneratorSpec::new(seed, n, m, 5));
        assert_golden(
            &format!("random/{name}.json"),
            InstanceDocument::from_game(name, &g),
        );
    }
}

#[test]
fn knapsack_document_loads_to_the_game() {
    let g = InstanceDocument::load(&path("knapsack_canonical.json"))
        .unwrap()
        .to_game()
        .unwrap();
    assert_eq!(g, canonical_knapsack_game());
}
