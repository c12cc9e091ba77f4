use tautfiber::{
    enumerate_admissible_vertex_surfaces_with_budget, enumerate_vertex_surfaces_with_budget,
    Triangulation,
};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let name = args.get(1).map(String::as_str).unwrap_or("trefoil");
    let mode = args.get(2).map(String::as_str).unwrap_or("admissible");
    let cap: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let text = match name {
        "fig8" => include_str!("../../../corpus/fig8.tri"),
        "trefoil" => include_str!("../../../corpus/trefoil.tri"),
        "fig8_ideal" => include_str!("../../../corpus/fig8_ideal.tri"),
        other => panic!("unknown table {other}"),
    };
    let tri = Triangulation::from_text(text).unwrap();
    let start = std::time::Instant::now();
    let result = if mode == "full" {
        enumerate_vertex_surfaces_with_budget(&tri, cap)
    } else {
        enumerate_admissible_vertex_surfaces_with_budget(&tri, cap)
    };
    match result {
        Ok(rays) => println!(
            "{name} ({mode}): {} rays ({} admissible) in {:?}",
            rays.len(),
            rays.iter().filter(|r| r.admissible).count(),
            start.elapsed()
        ),
        Err(e) => println!("{name} ({mode}): failed after {:?}: {e}", start.elapsed()),
    }
}
