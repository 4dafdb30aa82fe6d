//! Load the shipped case files, check radiality and query subtrees.

use microdispatch::grid::{fixture_path, load_case, subtree_of, validate_radial};

fn main() -> anyhow::Result<()> {
    for name in ["two_bus.json", "lv_microgrid.json", "feeder69.json"] {
        let case = load_case(fixture_path(name))?;
        let order = validate_radial(&case)?;
        println!(
            "{name}: {} buses, {} branch{}, root bus {}",
            case.buses.len(),
            order.len(),
            if order.len() == 1 { "" } else { "es" },
            case.buses[case.root()].id
        );
        println!("  sweep order (first 8 branch ids): {:?}", &order[..order.len().min(8)]);

        // Subtree of the first branch leaving the root.
        let first = order[0];
        let sub = subtree_of(&case, first)?;
        println!(
            "  branch {first} feeds {} bus(es){}",
            sub.len(),
            if sub.len() <= 10 {
                format!(": {:?}", sub.iter().collect::<Vec<_>>())
            } else {
                String::new()
            }
        );
    }
    Ok(())
}
