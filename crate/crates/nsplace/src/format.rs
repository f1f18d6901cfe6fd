//! Line-oriented design and placement files.
//!
//! ```text
//! board <W> <H> <layers>
//! comp <id> <w> <h> [fixed <x> <y> <r>]
//! pin <comp-id> <pin-id> <ox> <oy>
//! net <id> <comp-id>.<pin-id> ...
//! place <comp-id> <x> <y> <r>
//! ```
//!
//! `#` starts a comment. Statements may come in any order; references are
//! resolved after the whole file is read. Numbers are written with Rust's
//! shortest round-trip formatting, so a serialized value reparses exactly.

use std::collections::HashMap;
use std::fmt::Write as _;

use nsplace_core::{Board, Component, Design, DesignError, Net, Orientation, PinDef, PinRef, Placement, Point, Pose};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: net {net} references unknown pin {pin}")]
    UnresolvedReference { line: usize, net: String, pin: String },
    #[error("line {line}: pin {pin} belongs to unknown component {comp}")]
    UnknownComponent { line: usize, comp: String, pin: String },
    #[error("line {line}: nonpositive dimension")]
    NonPositiveDimension { line: usize },
    #[error("placement: {0}")]
    Placement(String),
    #[error(transparent)]
    Design(#[from] DesignError),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

/// Non-comment, non-blank lines as `(1-based line number, tokens)`.
fn statements(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn number(line: usize, token: &str) -> Result<f64, FormatError> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(syntax(line, format!("expected a number, found {token:?}"))),
    }
}

fn orientation(line: usize, token: &str) -> Result<Orientation, FormatError> {
    token.parse::<u8>().ok().and_then(Orientation::from_bit).ok_or_else(|| syntax(line, format!("orientation must be 0 or 1, found {token:?}")))
}

fn arity(line: usize, tokens: &[&str], allowed: &[usize]) -> Result<(), FormatError> {
    if allowed.contains(&tokens.len()) {
        Ok(())
    } else {
        Err(syntax(line, format!("malformed {} statement", tokens[0])))
    }
}

pub fn parse_design(text: &str) -> Result<Design, FormatError> {
    let mut board: Option<Board> = None;
    let mut comps: Vec<(usize, Component)> = Vec::new();
    let mut pins: Vec<(usize, String, PinDef)> = Vec::new();
    let mut nets: Vec<(usize, String, Vec<(String, String)>)> = Vec::new();

    for (line, t) in statements(text) {
        match t[0] {
            "board" => {
                arity(line, &t, &[4])?;
                if board.is_some() {
                    return Err(syntax(line, "second board statement"));
                }
                let (width, height) = (number(line, t[1])?, number(line, t[2])?);
                if !(width > 0.0 && height > 0.0) {
                    return Err(FormatError::NonPositiveDimension { line });
                }
                let layers = t[3].parse::<u32>().ok().filter(|&l| l > 0).ok_or_else(|| syntax(line, "layers must be a positive integer"))?;
                board = Some(Board { width, height, layers });
            }
            "comp" => {
                arity(line, &t, &[4, 8])?;
                let (width, height) = (number(line, t[2])?, number(line, t[3])?);
                if !(width > 0.0 && height > 0.0) {
                    return Err(FormatError::NonPositiveDimension { line });
                }
                let fixed = if t.len() == 8 {
                    if t[4] != "fixed" {
                        return Err(syntax(line, format!("expected `fixed`, found {:?}", t[4])));
                    }
                    Some(Pose::new(number(line, t[5])?, number(line, t[6])?, orientation(line, t[7])?))
                } else {
                    None
                };
                comps.push((line, Component { id: t[1].to_string(), width, height, fixed, pins: Vec::new() }));
            }
            "pin" => {
                arity(line, &t, &[5])?;
                let offset = Point::new(number(line, t[3])?, number(line, t[4])?);
                pins.push((line, t[1].to_string(), PinDef { id: t[2].to_string(), offset }));
            }
            "net" => {
                let mut refs = Vec::with_capacity(t.len() - 2);
                for r in &t[2..] {
                    let (c, p) = r.split_once('.').ok_or_else(|| syntax(line, format!("pin reference {r:?} is not <comp>.<pin>")))?;
                    refs.push((c.to_string(), p.to_string()));
                }
                nets.push((line, t.get(1).ok_or_else(|| syntax(line, "net without an id"))?.to_string(), refs));
            }
            other => return Err(syntax(line, format!("unknown statement {other:?}"))),
        }
    }

    let board = board.ok_or_else(|| syntax(0, "missing board statement"))?;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut components = Vec::with_capacity(comps.len());
    for (line, c) in comps {
        if index.insert(c.id.clone(), components.len()).is_some() {
            return Err(syntax(line, format!("duplicate component {}", c.id)));
        }
        components.push(c);
    }
    for (line, comp, pin) in pins {
        let Some(&i) = index.get(&comp) else {
            return Err(FormatError::UnknownComponent { line, comp, pin: pin.id });
        };
        components[i].pins.push(pin);
    }
    let mut resolved = Vec::with_capacity(nets.len());
    for (line, id, refs) in nets {
        let mut out = Vec::with_capacity(refs.len());
        for (c, p) in refs {
            let r = index.get(&c).and_then(|&ci| components[ci].pin_index(&p).map(|pi| PinRef { comp: ci, pin: pi }));
            match r {
                Some(r) => out.push(r),
                None => return Err(FormatError::UnresolvedReference { line, net: id, pin: format!("{c}.{p}") }),
            }
        }
        resolved.push(Net { id, pins: out });
    }
    Ok(Design::new(board, components, resolved)?)
}

pub fn serialize_design(d: &Design) -> String {
    let mut s = String::new();
    let b = &d.board;
    let _ = writeln!(s, "board {} {} {}", b.width, b.height, b.layers);
    for c in &d.components {
        let _ = write!(s, "comp {} {} {}", c.id, c.width, c.height);
        if let Some(f) = c.fixed {
            let _ = write!(s, " fixed {} {} {}", f.x, f.y, f.r.bit());
        }
        s.push('\n');
    }
    for c in &d.components {
        for p in &c.pins {
            let _ = writeln!(s, "pin {} {} {} {}", c.id, p.id, p.offset.x, p.offset.y);
        }
    }
    for n in &d.nets {
        let _ = write!(s, "net {}", n.id);
        for r in &n.pins {
            let c = &d.components[r.comp];
            let _ = write!(s, " {}.{}", c.id, c.pins[r.pin].id);
        }
        s.push('\n');
    }
    s
}

/// Parse a placement for `design`. Every component needs exactly one line
/// and fixed components must sit at their locked pose.
pub fn parse_placement(text: &str, design: &Design) -> Result<Placement, FormatError> {
    let mut poses: Vec<Option<Pose>> = vec![None; design.components.len()];
    for (line, t) in statements(text) {
        if t[0] != "place" {
            return Err(syntax(line, format!("unknown statement {:?}", t[0])));
        }
        arity(line, &t, &[5])?;
        let i = design.component_index(t[1]).ok_or_else(|| syntax(line, format!("unknown component {}", t[1])))?;
        if poses[i].is_some() {
            return Err(syntax(line, format!("component {} placed twice", t[1])));
        }
        poses[i] = Some(Pose::new(number(line, t[2])?, number(line, t[3])?, orientation(line, t[4])?));
    }
    let poses = poses
        .into_iter()
        .zip(&design.components)
        .map(|(p, c)| p.ok_or_else(|| FormatError::Placement(format!("component {} has no place line", c.id))))
        .collect::<Result<Vec<_>, _>>()?;
    let placement = Placement::new(poses);
    placement.check(design)?;
    Ok(placement)
}

pub fn serialize_placement(design: &Design, placement: &Placement) -> String {
    let mut s = String::new();
    for (c, p) in design.components.iter().zip(&placement.poses) {
        let _ = writeln!(s, "place {} {} {} {}", c.id, p.x, p.y, p.r.bit());
    }
    s
}
