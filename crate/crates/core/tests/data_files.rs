use std::path::{Path, PathBuf};

use dualis::algebra::find_isomorphism;
use dualis::fol::{corpus, parse_fo};
use dualis::io::{read_file, read_heyting, read_lattice, read_ring};
use dualis::order::Lattice;
use dualis::prop::PropTheory;
use dualis::ring::FinCommRing;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

#[test]
fn ring_files() {
    let z12 = read_ring(&data("zmod12.ring")).unwrap();
    assert_eq!(z12, FinCommRing::zmod(12));
    let p = read_ring(&data("z12xf4.ring")).unwrap();
    assert!(find_isomorphism(&p, &FinCommRing::zmod(12).product(&FinCommRing::f4())).is_some());
    let z6 = read_ring(&data("z2xz3.ring")).unwrap();
    assert!(find_isomorphism(&z6, &FinCommRing::zmod(6)).is_some());
    assert_eq!(read_ring(&data("dual4.ring")).unwrap(), FinCommRing::dual_numbers(4));
    assert!(read_ring(&data("z2_named.ring")).is_ok());
    let e = read_ring(&data("not_assoc.ring")).unwrap_err();
    assert!(e.to_string().contains("associativity"));
}

#[test]
fn lattice_files() {
    assert!(find_isomorphism(&read_lattice(&data("diamond.lat")).unwrap(), &Lattice::powerset(2)).is_some());
    assert_eq!(read_lattice(&data("vee.lat")).unwrap().len(), 5);
    assert_eq!(read_lattice(&data("chain2_tables.lat")).unwrap().len(), 2);
    assert_eq!(read_lattice(&data("m3.lat")).unwrap(), Lattice::m3());
    assert!(read_heyting(&data("n5.lat")).is_err());
    assert!(read_heyting(&data("chain3.lat")).is_ok());
}

#[test]
fn theory_files_match_the_corpus() {
    for name in ["theory_pq.thy", "theory_pqr.thy"] {
        assert!(PropTheory::parse(&read_file(&data(name)).unwrap()).is_ok());
    }
    let files = ["pure_sets.fol", "unary.fol", "graph.fol", "linear_order.fol", "successor.fol"];
    for (file, (_, t)) in files.iter().zip(corpus::all()) {
        let parsed = parse_fo(&read_file(&data(file)).unwrap()).unwrap();
        assert_eq!(parsed.to_text(), t.to_text(), "{file}");
    }
}
