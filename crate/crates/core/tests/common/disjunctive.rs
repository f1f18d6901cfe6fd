use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nsplace_core::design::Design;

/// Exact optimum of the legalization objective by brute force over the
/// discrete choices: every orientation of every movable part and every one
/// of the four separating directions per pair, each closed by an LP solved
/// with an independent solver. Exponential; meant for ≤ 4 components.
pub fn disjunctive_optimum(d: &Design) -> Option<f64> {
    let n = d.components.len();
    let movable: Vec<usize> = (0..n).filter(|&i| !d.components[i].is_fixed()).collect();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| !(d.components[i].is_fixed() && d.components[j].is_fixed())).collect();
    // Square parts pack the same way in either orientation, so a direction
    // choice that fails once fails for every rotation.
    let square = d.components.iter().all(|c| c.width == c.height);
    let mut dead = vec![false; 1usize << (2 * pairs.len())];
    let mut best: Option<f64> = None;
    for rot_mask in 0..(1u32 << movable.len()) {
        let rot: Vec<bool> = (0..n)
            .map(|i| match d.components[i].fixed {
                Some(p) => p.r.bit() == 1,
                None => rot_mask >> movable.iter().position(|&m| m == i).unwrap() & 1 == 1,
            })
            .collect();
        for dir_code in 0..(1u64 << (2 * pairs.len())) {
            if dead[dir_code as usize] {
                continue;
            }
            match solve_fixed(d, &rot, &pairs, dir_code) {
                Some(v) => best = Some(best.map_or(v, |b: f64| b.min(v))),
                None => dead[dir_code as usize] = square,
            }
        }
    }
    best
}

fn solve_fixed(d: &Design, rot: &[bool], pairs: &[(usize, usize)], dir_code: u64) -> Option<f64> {
    let (bw, bh) = (d.board.width, d.board.height);
    let dims = |i: usize| {
        let c = &d.components[i];
        if rot[i] { (c.height, c.width) } else { (c.width, c.height) }
    };
    let mut pb = Problem::new(OptimizationDirection::Minimize);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, c) in d.components.iter().enumerate() {
        let (w, h) = dims(i);
        match c.fixed {
            Some(p) => {
                xs.push(pb.add_var(0.0, (p.x, p.x)));
                ys.push(pb.add_var(0.0, (p.y, p.y)));
            }
            None => {
                if w > bw || h > bh {
                    return None;
                }
                xs.push(pb.add_var(0.0, (0.0, bw - w)));
                ys.push(pb.add_var(0.0, (0.0, bh - h)));
            }
        }
    }
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let (wi, hi) = dims(i);
        let (wj, hj) = dims(j);
        match (dir_code >> (2 * k)) & 3 {
            0 => pb.add_constraint(&[(xs[i], 1.0), (xs[j], -1.0)], ComparisonOp::Le, -wi),
            1 => pb.add_constraint(&[(xs[j], 1.0), (xs[i], -1.0)], ComparisonOp::Le, -wj),
            2 => pb.add_constraint(&[(ys[i], 1.0), (ys[j], -1.0)], ComparisonOp::Le, -hi),
            _ => pb.add_constraint(&[(ys[j], 1.0), (ys[i], -1.0)], ComparisonOp::Le, -hj),
        }
    }
    if d.nets.is_empty() {
        return pb.solve().ok().map(|_| 0.0);
    }
    let hmax = pb.add_var(1.0, (0.0, f64::INFINITY));
    let hmin = pb.add_var(-1.0, (0.0, f64::INFINITY));
    for net in &d.nets {
        let ux = pb.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        let lx = pb.add_var(-1.0, (f64::NEG_INFINITY, f64::INFINITY));
        let uy = pb.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        let ly = pb.add_var(-1.0, (f64::NEG_INFINITY, f64::INFINITY));
        for r in &net.pins {
            let c = &d.components[r.comp];
            let o = c.pins[r.pin].offset;
            // Rotated by 90° counterclockwise about the footprint, then
            // shifted back so the lower-left corner stays the origin.
            let (ox, oy) = if rot[r.comp] { (c.height - o.y, o.x) } else { (o.x, o.y) };
            pb.add_constraint(&[(ux, 1.0), (xs[r.comp], -1.0)], ComparisonOp::Ge, ox);
            pb.add_constraint(&[(lx, 1.0), (xs[r.comp], -1.0)], ComparisonOp::Le, ox);
            pb.add_constraint(&[(uy, 1.0), (ys[r.comp], -1.0)], ComparisonOp::Ge, oy);
            pb.add_constraint(&[(ly, 1.0), (ys[r.comp], -1.0)], ComparisonOp::Le, oy);
        }
        let span = [(ux, 1.0), (lx, -1.0), (uy, 1.0), (ly, -1.0)];
        let mut upper = vec![(hmax, 1.0)];
        upper.extend(span.iter().map(|&(v, c)| (v, -c)));
        pb.add_constraint(&upper, ComparisonOp::Ge, 0.0);
        let mut lower = vec![(hmin, 1.0)];
        lower.extend(span.iter().map(|&(v, c)| (v, -c)));
        pb.add_constraint(&lower, ComparisonOp::Le, 0.0);
    }
    pb.solve().ok().map(|s| s.objective())
}
