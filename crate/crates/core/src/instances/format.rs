//! Line-oriented text format for instances and packings.
//!
//! ```text
//! strip <W> <n> <rot:0|1>
//! <id> <w> <h>              (n lines)
//! place <id> <x> <y> <rot:0|1>   (optional packing lines)
//! ```
//!
//! Chosen for diff-ability and hand-editing of fixtures. Writing then
//! reading is the identity.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Instance, Packing, Placement, Rect};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_i64(tok: &str, line: usize, what: &str) -> Result<i64> {
    tok.parse::<i64>()
        .map_err(|_| perr(line, format!("bad {what}: {tok:?}")))
}

fn parse_flag(tok: &str, line: usize, what: &str) -> Result<bool> {
    match tok {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(perr(line, format!("bad {what}: {tok:?} (want 0 or 1)"))),
    }
}

/// Parses a document into an instance and its placement lines (possibly
/// empty).
pub fn parse_document(text: &str) -> Result<(Instance, Packing)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (lno, header) = lines
        .next()
        .ok_or_else(|| perr(1, "missing `strip` header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "strip" {
        return Err(perr(lno, "expected `strip <W> <n> <rot>`"));
    }
    let width = parse_i64(toks[1], lno, "width")?;
    let n = parse_i64(toks[2], lno, "count")?;
    if n < 0 {
        return Err(perr(lno, "negative rect count"));
    }
    let allow_rotations = parse_flag(toks[3], lno, "rotation flag")?;

    let mut rects: Vec<Option<Rect>> = vec![None; n as usize];
    for _ in 0..n {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| perr(usize::MAX, format!("expected {n} rect lines")))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(perr(lno, "expected `<id> <w> <h>`"));
        }
        let id = parse_i64(toks[0], lno, "id")?;
        let w = parse_i64(toks[1], lno, "width")?;
        let h = parse_i64(toks[2], lno, "height")?;
        if id < 0 || id >= n {
            return Err(perr(lno, format!("id {id} outside 0..{n}")));
        }
        let slot = &mut rects[id as usize];
        if slot.is_some() {
            return Err(perr(lno, format!("duplicate id {id}")));
        }
        if w < 1 || h < 1 {
            return Err(perr(lno, format!("non-positive sides {w}x{h}")));
        }
        let fits = if allow_rotations { w.min(h) <= width } else { w <= width };
        if !fits {
            return Err(perr(lno, format!("rect {id} width {w} exceeds strip {width}")));
        }
        *slot = Some(Rect::new(id as usize, w, h));
    }
    let rects: Vec<Rect> = rects.into_iter().map(Option::unwrap).collect();
    let instance = Instance::new(width, rects, allow_rotations)
        .map_err(|e| perr(1, e.to_string()))?;

    let mut placements = Vec::new();
    for (lno, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.first() != Some(&"place") {
            return Err(perr(lno, format!("unexpected line {line:?}")));
        }
        if toks.len() != 5 {
            return Err(perr(lno, "expected `place <id> <x> <y> <rot>`"));
        }
        let id = parse_i64(toks[1], lno, "id")?;
        if id < 0 || id >= n {
            return Err(perr(lno, format!("placement id {id} outside 0..{n}")));
        }
        let x = parse_i64(toks[2], lno, "x")?;
        let y = parse_i64(toks[3], lno, "y")?;
        let rotated = parse_flag(toks[4], lno, "rotation flag")?;
        placements.push(Placement {
            rect_id: id as usize,
            x,
            y,
            rotated,
        });
    }
    Ok((instance, Packing::new(placements)))
}

/// Serializes the instance header and rect lines.
pub fn format_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "strip {} {} {}\n",
        inst.width,
        inst.len(),
        if inst.allow_rotations { 1 } else { 0 }
    ));
    for r in &inst.rects {
        out.push_str(&format!("{} {} {}\n", r.id, r.w, r.h));
    }
    out
}

/// Serializes instance plus placement lines.
pub fn format_packing(inst: &Instance, packing: &Packing) -> String {
    let mut out = format_instance(inst);
    for p in &packing.placements {
        out.push_str(&format!(
            "place {} {} {} {}\n",
            p.rect_id,
            p.x,
            p.y,
            if p.rotated { 1 } else { 0 }
        ));
    }
    out
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)?;
    Ok(parse_document(&text)?.0)
}

pub fn read_packing(path: &Path) -> Result<(Instance, Packing)> {
    let text = fs::read_to_string(path)?;
    parse_document(&text)
}

pub fn write_instance(inst: &Instance, path: &Path) -> Result<()> {
    fs::write(path, format_instance(inst))?;
    Ok(())
}

pub fn write_packing(inst: &Instance, packing: &Packing, path: &Path) -> Result<()> {
    fs::write(path, format_packing(inst, packing))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let inst = Instance::new(
            12,
            vec![Rect::new(0, 3, 4), Rect::new(1, 12, 1)],
            false,
        )
        .unwrap();
        let packing = Packing::new(vec![Placement::new(0, 0, 0), Placement::new(1, 0, 4)]);
        let text = format_packing(&inst, &packing);
        let (i2, p2) = parse_document(&text).unwrap();
        assert_eq!(inst, i2);
        assert_eq!(packing, p2);
        assert_eq!(text, format_packing(&i2, &p2));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "strip 10 2 0\n0 3 4\n0 2 2\n";
        match parse_document(bad) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("duplicate"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        let too_wide = "strip 10 1 0\n0 11 4\n";
        assert!(matches!(
            parse_document(too_wide),
            Err(Error::Parse { line: 2, .. })
        ));

        let junk = "strip 10 1 0\n0 1 1\nnoise here\n";
        assert!(matches!(
            parse_document(junk),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn rotated_instances_accept_tall_rects() {
        let doc = "strip 10 1 1\n0 12 3\n";
        let (inst, _) = parse_document(doc).unwrap();
        assert!(inst.allow_rotations);
        assert_eq!(inst.rects[0].w, 12);
    }
}
