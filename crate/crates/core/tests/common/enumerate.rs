use nsplace_core::design::Design;

/// Pin position under the 90° counterclockwise rule, written out directly.
fn pin_at(x: f64, y: f64, rot: bool, w_h: (f64, f64), off: (f64, f64)) -> (f64, f64) {
    if rot {
        (x + w_h.1 - off.1, y + off.0)
    } else {
        (x + off.0, y + off.1)
    }
}

struct Enum<'a> {
    d: &'a Design,
    step: f64,
    // (x, y, rot) per component so far.
    chosen: Vec<(f64, f64, bool)>,
    best: f64,
}

impl Enum<'_> {
    fn dims(&self, i: usize, rot: bool) -> (f64, f64) {
        let c = &self.d.components[i];
        if rot { (c.height, c.width) } else { (c.width, c.height) }
    }

    fn cost(&self) -> f64 {
        let mut hp = Vec::new();
        for net in &self.d.nets {
            let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for r in &net.pins {
                let c = &self.d.components[r.comp];
                let (x, y, rot) = self.chosen[r.comp];
                let o = c.pins[r.pin].offset;
                let (px, py) = pin_at(x, y, rot, (c.width, c.height), (o.x, o.y));
                x0 = x0.min(px);
                x1 = x1.max(px);
                y0 = y0.min(py);
                y1 = y1.max(py);
            }
            hp.push(x1 - x0 + y1 - y0);
        }
        if hp.is_empty() {
            return 0.0;
        }
        let max = hp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = hp.iter().cloned().fold(f64::INFINITY, f64::min);
        hp.iter().sum::<f64>() + max - min
    }

    fn disjoint(&self, i: usize, x: f64, y: f64, rot: bool) -> bool {
        let (w, h) = self.dims(i, rot);
        self.chosen.iter().enumerate().all(|(j, &(xj, yj, rj))| {
            let (wj, hj) = self.dims(j, rj);
            x + w <= xj || xj + wj <= x || y + h <= yj || yj + hj <= y
        })
    }

    fn go(&mut self, i: usize) {
        let d = self.d;
        if i == d.components.len() {
            self.best = self.best.min(self.cost());
            return;
        }
        let c = &d.components[i];
        if let Some(p) = c.fixed {
            let rot = p.r.bit() == 1;
            if self.disjoint(i, p.x, p.y, rot) {
                self.chosen.push((p.x, p.y, rot));
                self.go(i + 1);
                self.chosen.pop();
            }
            return;
        }
        for rot in [false, true] {
            let (w, h) = self.dims(i, rot);
            let nx = ((d.board.width - w) / self.step).floor() as usize;
            let ny = ((d.board.height - h) / self.step).floor() as usize;
            for a in 0..=nx {
                for b in 0..=ny {
                    let (x, y) = (a as f64 * self.step, b as f64 * self.step);
                    if self.disjoint(i, x, y, rot) {
                        self.chosen.push((x, y, rot));
                        self.go(i + 1);
                        self.chosen.pop();
                    }
                }
            }
        }
    }
}

/// Minimum of `Σ hpwl + (max hpwl − min hpwl)` over every non-overlapping
/// placement with corners on a `step` grid and both orientations; `None`
/// when nothing fits.
pub fn enumerate_optimum(d: &Design, step: f64) -> Option<f64> {
    let mut e = Enum { d, step, chosen: Vec::new(), best: f64::INFINITY };
    e.go(0);
    e.best.is_finite().then_some(e.best)
}

/// The same objective evaluated at an arbitrary placement.
pub fn placement_cost(d: &Design, p: &nsplace_core::design::Placement) -> f64 {
    let chosen = p.poses.iter().map(|q| (q.x, q.y, q.r.bit() == 1)).collect();
    Enum { d, step: 1.0, chosen, best: f64::INFINITY }.cost()
}
