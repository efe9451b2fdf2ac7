#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::PathBuf;

use rand::Rng;
use strictify::kan::{ColimitPresentation, SetDiagram, Transition};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Classes of the disjoint union under zigzags of transitions, found by
/// breadth-first search over the undirected element graph.
pub fn zigzag_classes(d: &SetDiagram) -> Vec<Vec<(usize, usize)>> {
    let nodes: Vec<(usize, usize)> = d
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(o, &n)| (0..n).map(move |e| (o, e)))
        .collect();
    let neighbours = |v: (usize, usize)| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for t in &d.arrows {
            if t.from == v.0 {
                out.push((t.to, t.map[v.1]));
            }
            if t.to == v.0 {
                out.extend(t.map.iter().enumerate().filter(|(_, &y)| y == v.1).map(|(x, _)| (t.from, x)));
            }
        }
        out
    };
    let mut seen = std::collections::BTreeSet::new();
    let mut classes = Vec::new();
    for &start in &nodes {
        if !seen.insert(start) {
            continue;
        }
        let mut class = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in neighbours(v) {
                if seen.insert(w) {
                    class.push(w);
                    queue.push_back(w);
                }
            }
        }
        class.sort();
        classes.push(class);
    }
    classes.sort();
    classes
}

pub fn presented_classes(c: &ColimitPresentation) -> Vec<Vec<(usize, usize)>> {
    let mut classes = vec![Vec::new(); c.class_count()];
    for (o, row) in c.class_of.iter().enumerate() {
        for (e, &k) in row.iter().enumerate() {
            classes[k].push((o, e));
        }
    }
    classes.sort();
    classes
}

/// Up to `max_objects` sets of size at most 4 and up to `max_arrows`
/// transitions. Maps into an empty set are only drawn from empty sets.
pub fn random_diagram(rng: &mut impl Rng, max_objects: usize, max_arrows: usize) -> SetDiagram {
    let n = rng.gen_range(0..=max_objects);
    let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
    let mut arrows = Vec::new();
    if n > 0 {
        for _ in 0..rng.gen_range(0..=max_arrows) {
            let (from, to) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if sizes[to] == 0 && sizes[from] > 0 {
                continue;
            }
            let map = (0..sizes[from]).map(|_| rng.gen_range(0..sizes[to])).collect();
            arrows.push(Transition { from, to, map });
        }
    }
    SetDiagram { sizes, arrows }
}
