use g2hash::graph::{
    build_graph, find_path, replay_path, verify_connectivity, verify_counts, verify_edges, x5_minus_x, ExportFormat,
    GraphSnapshot, Model, PathStep, Vertex,
};

fn g13_names(g: &GraphSnapshot) -> [Vertex; 4] {
    let j1 = Model::Jacobian(x5_minus_x(g.field()).unwrap()).vertex().unwrap();
    let a = g.index_of(&j1).unwrap();
    let m = g.multiplicities();
    let jac: Vec<usize> = (0..4).filter(|&i| i != a && g.vertices()[i].is_jacobian()).collect();
    let (b, c) = if m.get(&(a, jac[0])) == Some(&4) { (jac[0], jac[1]) } else { (jac[1], jac[0]) };
    let e = (0..4).find(|&i| !g.vertices()[i].is_jacobian()).unwrap();
    [a, b, c, e].map(|i| g.vertices()[i].clone())
}

#[test]
fn small_primes_pass_every_check() {
    for p in [7, 11, 17, 19, 23, 29, 31] {
        let g = build_graph(p).unwrap();
        for r in [verify_counts(&g), verify_edges(&g), verify_connectivity(&g)] {
            let r = r.unwrap();
            assert!(r.all_pass(), "{r}");
            for line in &r.0 {
                assert!(line.to_string().starts_with(&format!("CHECK {} p={p} PASS", line.name)));
            }
        }
    }
}

#[test]
fn path_through_the_middle_vertex() {
    let g = build_graph(13).unwrap();
    let [j1, j2, j3, _] = g13_names(&g);
    let path = find_path(&g, &j1, &j3, false).unwrap().unwrap();
    assert_eq!(path.len(), 2);
    let PathStep::Edge(k) = path[0] else { panic!("edge step expected") };
    let mid = g2hash::graph::apply_kernel(&g.models()[g.index_of(&j1).unwrap()], k).unwrap().0;
    assert_eq!(mid, j2);
    assert_eq!(replay_path(&g, &j1, &path).unwrap(), j3);
}

#[test]
fn good_paths_replay() {
    let g = build_graph(23).unwrap();
    let jac: Vec<&Vertex> = g.vertices().iter().filter(|v| v.is_jacobian()).collect();
    for a in &jac {
        for b in jac.iter().step_by(3) {
            let path = find_path(&g, a, b, true).unwrap().expect("reachable");
            assert!(path.iter().skip(1).all(|s| matches!(s, PathStep::Digit(_))));
            assert_eq!(&&replay_path(&g, a, &path).unwrap(), b);
        }
    }
}

#[test]
fn exports_are_stable() {
    let a = build_graph(29).unwrap();
    let b = build_graph(29).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.export(ExportFormat::Json), b.export(ExportFormat::Json));
    assert_eq!(GraphSnapshot::from_json(&a.to_json()).unwrap(), a);
    let dot = String::from_utf8(build_graph(13).unwrap().export(ExportFormat::Dot)).unwrap();
    assert!(dot.starts_with("digraph G13 {"));
    assert!(dot.contains("[label=\"10\", multiplicity=10]"));
    assert!(dot.contains("[label=\"9\", multiplicity=9]"));
}

#[test]
fn g13_edge_counts_into_products() {
    let g = build_graph(13).unwrap();
    let names = g13_names(&g);
    let e = g.index_of(&names[3]).unwrap();
    let into_e: Vec<usize> = names[..3]
        .iter()
        .map(|v| g.out_edges(g.index_of(v).unwrap()).iter().filter(|x| x.to == e).count())
        .collect();
    assert_eq!(into_e, [6, 3, 2]);
    let out_of_e = g.out_edges(e).iter().filter(|x| x.to != e).count();
    assert_eq!(out_of_e, 5);
}
