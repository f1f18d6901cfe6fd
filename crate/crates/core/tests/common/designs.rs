use nsplace_core::design::{Board, Component, Design, Net, Orientation, PinDef, PinRef, Placement, Pose};
use nsplace_core::geometry::Point;
use rand::Rng;

pub fn comp(id: &str, w: f64, h: f64, pins: &[(f64, f64)]) -> Component {
    Component {
        id: id.to_string(),
        width: w,
        height: h,
        fixed: None,
        pins: pins.iter().enumerate().map(|(k, &(x, y))| PinDef { id: format!("p{k}"), offset: Point::new(x, y) }).collect(),
    }
}

pub fn net(id: &str, pins: &[(usize, usize)]) -> Net {
    Net { id: id.to_string(), pins: pins.iter().map(|&(comp, pin)| PinRef { comp, pin }).collect() }
}

/// Random design: `n` components of 2–8 mm with 2–4 pins each, `m` nets of
/// 2–4 pins on distinct components, board sized for about 30% utilization.
pub fn random_design(rng: &mut impl Rng, n: usize, m: usize, fixed: usize) -> Design {
    let mut comps: Vec<Component> = (0..n)
        .map(|i| {
            let w = rng.random_range(2.0..8.0_f64).round();
            let h = rng.random_range(2.0..8.0_f64).round();
            let k = rng.random_range(2..=4);
            let pins: Vec<(f64, f64)> = (0..k).map(|_| (rng.random_range(0.0..=w), rng.random_range(0.0..=h))).collect();
            comp(&format!("c{i}"), w, h, &pins)
        })
        .collect();
    let area: f64 = comps.iter().map(|c| c.width * c.height).sum();
    let side = (area / 0.3).sqrt().ceil().max(20.0);
    let board = Board { width: side, height: side, layers: 2 };
    for c in comps.iter_mut().take(fixed) {
        let x = rng.random_range(0.0..=side - c.width);
        let y = rng.random_range(0.0..=side - c.height);
        c.fixed = Some(Pose::new(x, y, Orientation::R0));
    }
    let nets = (0..m)
        .map(|e| {
            let k = rng.random_range(2..=4.min(n));
            let mut chosen: Vec<usize> = Vec::new();
            while chosen.len() < k {
                let c = rng.random_range(0..n);
                if !chosen.contains(&c) {
                    chosen.push(c);
                }
            }
            let pins: Vec<(usize, usize)> = chosen.iter().map(|&c| (c, rng.random_range(0..comps[c].pins.len()))).collect();
            net(&format!("n{e}"), &pins)
        })
        .collect();
    Design::new(board, comps, nets).expect("generated design is valid")
}

/// Uniformly random in-board poses; fixed components at their locks.
pub fn random_placement(rng: &mut impl Rng, d: &Design) -> Placement {
    let poses = d
        .components
        .iter()
        .map(|c| {
            c.fixed.unwrap_or_else(|| {
                let r = if rng.random_bool(0.5) { Orientation::R90 } else { Orientation::R0 };
                let (w, h) = c.dims(r);
                Pose::new(rng.random_range(0.0..=d.board.width - w), rng.random_range(0.0..=d.board.height - h), r)
            })
        })
        .collect();
    Placement::new(poses)
}

/// 2–`max_comps` unit squares with 1–2 pins at offsets on a `pin_step`
/// grid, 1–6 nets, a half-millimeter board just large enough to pack them,
/// and optionally the first component locked on the grid.
pub fn random_unit_instance(rng: &mut impl Rng, max_comps: usize, pin_step: f64) -> Design {
    let n = rng.random_range(2..=max_comps);
    let steps = (1.0 / pin_step).round() as u8;
    let half = |rng: &mut dyn rand::RngCore| f64::from(rng.random_range(0..=steps)) * pin_step;
    let mut comps: Vec<Component> = (0..n)
        .map(|i| {
            let k = rng.random_range(1..=2);
            let pins: Vec<(f64, f64)> = (0..k).map(|_| (half(rng), half(rng))).collect();
            comp(&format!("u{i}"), 1.0, 1.0, &pins)
        })
        .collect();
    let side = match n {
        2 => 2.0,
        3 | 4 => 2.5,
        _ => 3.0,
    };
    let board = Board { width: side, height: side, layers: 2 };
    if rng.random_bool(0.3) {
        let x = f64::from(rng.random_range(0..=((side - 1.0) * 2.0) as u8)) * 0.5;
        let y = f64::from(rng.random_range(0..=((side - 1.0) * 2.0) as u8)) * 0.5;
        comps[0].fixed = Some(Pose::new(x, y, Orientation::R0));
    }
    let m = rng.random_range(1..=6);
    let nets = (0..m)
        .map(|e| {
            let k = rng.random_range(2..=3.min(n));
            let mut chosen: Vec<usize> = Vec::new();
            while chosen.len() < k {
                let c = rng.random_range(0..n);
                if !chosen.contains(&c) {
                    chosen.push(c);
                }
            }
            let pins: Vec<(usize, usize)> = chosen.iter().map(|&c| (c, rng.random_range(0..comps[c].pins.len()))).collect();
            net(&format!("n{e}"), &pins)
        })
        .collect();
    Design::new(board, comps, nets).expect("generated design is valid")
}
