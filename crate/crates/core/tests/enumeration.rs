mod common;

use tautfiber::normal::{is_admissible, matching_system, vertex_link_coords};
use tautfiber::{enumerate_admissible_vertex_surfaces, enumerate_vertex_surfaces, Triangulation};

const BALL: &str = include_str!("../../../corpus/ball.tri");
const SOLID_TORUS: &str = include_str!("../../../corpus/solidtorus.tri");
const FIG8_IDEAL: &str = include_str!("../../../corpus/fig8_ideal.tri");
const LENS4: &str = include_str!("../../../corpus/lens4.tri");
const LENS5: &str = include_str!("../../../corpus/lens5.tri");

/// The enumerator must agree exactly with the brute-force oracle on every
/// small corpus entry. The oracle scans a box that provably contains a
/// primitive representative of each ray the enumerator produced, so a miss on
/// either side is a mismatch here.
#[test]
fn matches_brute_force_oracle() {
    for (name, text, bound) in [
        ("ball", BALL, 2),
        ("solidtorus", SOLID_TORUS, 3),
        ("fig8_ideal", FIG8_IDEAL, 3),
        ("lens4", LENS4, 4),
        ("lens5", LENS5, 4),
    ] {
        let tri = Triangulation::from_text(text).unwrap();
        let fast = enumerate_vertex_surfaces(&tri).unwrap();
        let slow = common::brute_force_vertex_rays(&tri, bound);

        let max_coord = fast
            .iter()
            .flat_map(|r| r.coords.0.iter().copied())
            .max()
            .unwrap_or(0);
        assert!(max_coord <= bound, "{name}: oracle box too small");

        let fast_coords: Vec<_> = fast.iter().map(|r| r.coords.clone()).collect();
        assert_eq!(fast_coords, slow, "{name}: ray sets differ");
        for r in &fast {
            assert_eq!(r.admissible, is_admissible(&r.coords), "{name}");
        }
    }
}

#[test]
fn frozen_ray_counts() {
    for (name, text, total, admissible) in [
        ("ball", BALL, 7, 7),
        ("solidtorus", SOLID_TORUS, 5, 4),
        ("fig8_ideal", FIG8_IDEAL, 6, 1),
        ("lens4", LENS4, 3, 2),
        ("lens5", LENS5, 4, 1),
    ] {
        let tri = Triangulation::from_text(text).unwrap();
        let rays = enumerate_vertex_surfaces(&tri).unwrap();
        assert_eq!(rays.len(), total, "{name}: total");
        assert_eq!(
            rays.iter().filter(|r| r.admissible).count(),
            admissible,
            "{name}: admissible"
        );
    }
}

/// Every vertex link in the small corpus is itself a vertex surface, and
/// every enumerated ray satisfies the matching system.
#[test]
fn links_appear_and_rays_match() {
    for text in [BALL, SOLID_TORUS, FIG8_IDEAL, LENS4, LENS5] {
        let tri = Triangulation::from_text(text).unwrap();
        let system = matching_system(&tri);
        let rays = enumerate_vertex_surfaces(&tri).unwrap();
        for r in &rays {
            assert!(system.is_satisfied(&r.coords));
        }
        for class in 0..tri.vertex_classes().len() {
            let link = vertex_link_coords(&tri, class).primitive();
            assert!(
                rays.iter().any(|r| r.coords == link),
                "vertex link missing from ray list"
            );
        }
    }
}

/// The admissible-only run must agree with filtering the full vertex list.
#[test]
fn admissible_path_equals_filtered_full() {
    for text in [BALL, SOLID_TORUS, FIG8_IDEAL, LENS4, LENS5] {
        let tri = Triangulation::from_text(text).unwrap();
        let full = enumerate_vertex_surfaces(&tri).unwrap();
        let filtered: Vec<_> = full.into_iter().filter(|r| r.admissible).collect();
        let admissible = enumerate_admissible_vertex_surfaces(&tri).unwrap();
        assert_eq!(admissible, filtered);
    }
}

/// The larger material tables are out of reach for the unfiltered cone but
/// enumerate quickly in admissible-only mode; counts are frozen.
#[test]
fn material_tables_enumerate() {
    for (name, text, expect) in [
        ("fig8", include_str!("../../../corpus/fig8.tri"), 243),
        ("trefoil", include_str!("../../../corpus/trefoil.tri"), 99),
    ] {
        let tri = Triangulation::from_text(text).unwrap();
        let rays = enumerate_admissible_vertex_surfaces(&tri).unwrap();
        assert_eq!(rays.len(), expect, "{name}");
        let system = matching_system(&tri);
        for r in &rays {
            assert!(r.admissible);
            assert!(system.is_satisfied(&r.coords));
            assert!(r.coords.is_nonnegative() && !r.coords.is_zero());
        }
    }
}
