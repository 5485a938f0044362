//! Pictures of single configurations: plain text and SVG.
//!
//! Row `m-1` is drawn at the top so the door at (0,0) sits in the lower-left
//! corner. With `frames` set and the configuration an InitGather one, the
//! lines L and L' and the containing rectangle are overlaid.

use std::fmt::Write;

use crate::config::{detect_init_gather, Configuration, GatherFrame};
use crate::grid::{Axis, Line, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderOptions {
    pub frames: bool,
}

fn glyph(cfg: &Configuration, v: Vertex, frame: Option<&GatherFrame>) -> char {
    let on = |p: Option<Vertex>| p == Some(v);
    let (r1, r2) = (on(cfg.r1.position()), on(cfg.r2.position()));
    let res = cfg.res.position == v;
    match (r1, r2, res) {
        (true, true, _) => '&',
        (true, false, true) | (false, true, true) => '@',
        (true, false, false) => '1',
        (false, true, false) => '2',
        (false, false, true) => 'R',
        (false, false, false) => match frame {
            None => '.',
            Some(f) => {
                let on_line = |l: Line| l.contains(v).then_some(l.axis);
                match (on_line(f.l), on_line(f.lp)) {
                    (Some(_), Some(_)) => '+',
                    (Some(Axis::Row), None) | (None, Some(Axis::Row)) => '-',
                    (Some(Axis::Col), None) | (None, Some(Axis::Col)) => '|',
                    (None, None) if f.r_con.contains(v) => ':',
                    (None, None) => '.',
                }
            }
        },
    }
}

pub fn render_ascii(cfg: &Configuration, opts: RenderOptions) -> String {
    let g = &cfg.grid;
    let frame = opts.frames.then(|| detect_init_gather(cfg)).flatten();
    let mut out = String::new();
    for y in (0..g.m()).rev() {
        for x in 0..g.n() {
            let v = Vertex::new(x, y);
            let c = glyph(cfg, v, frame.as_ref());
            if v == g.door() {
                let _ = write!(out, "[{c}]");
            } else {
                let _ = write!(out, " {c} ");
            }
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
    }
    let outside: Vec<&str> = [(cfg.r1.position(), "r1"), (cfg.r2.position(), "r2")]
        .iter()
        .filter(|(p, _)| p.is_none())
        .map(|(_, name)| *name)
        .collect();
    let _ = write!(
        out,
        "round {}  res {}{}  stay {}",
        cfg.round,
        cfg.res.position,
        if cfg.res.fixed { " fixed" } else { "" },
        cfg.res.stay_count
    );
    if !outside.is_empty() {
        let _ = write!(out, "  outside: {}", outside.join(" "));
    }
    out.push('\n');
    out
}

const CELL: i32 = 40;
const PAD: i32 = 20;

pub fn render_svg(cfg: &Configuration, opts: RenderOptions) -> String {
    let g = &cfg.grid;
    let (w, h) = ((g.n() - 1) * CELL + 2 * PAD, (g.m() - 1) * CELL + 2 * PAD);
    let px = |v: Vertex| (PAD + v.x * CELL, PAD + (g.m() - 1 - v.y) * CELL);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for y in 0..g.m() {
        let (x0, py) = px(Vertex::new(0, y));
        let (x1, _) = px(Vertex::new(g.n() - 1, y));
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{py}" x2="{x1}" y2="{py}" stroke="#bbb"/>"##
        );
    }
    for x in 0..g.n() {
        let (pxx, y0) = px(Vertex::new(x, 0));
        let (_, y1) = px(Vertex::new(x, g.m() - 1));
        let _ = writeln!(
            s,
            r##"<line x1="{pxx}" y1="{y0}" x2="{pxx}" y2="{y1}" stroke="#bbb"/>"##
        );
    }
    let (dx, dy) = px(g.door());
    let _ = writeln!(
        s,
        r##"<rect class="door" x="{}" y="{}" width="24" height="24" fill="none" stroke="#2a7" stroke-width="3"/>"##,
        dx - 12,
        dy - 12
    );

    if let Some(f) = opts.frames.then(|| detect_init_gather(cfg)).flatten() {
        let (a, b) = (
            px(Vertex::new(f.r_con.x.0, f.r_con.y.1)),
            px(Vertex::new(f.r_con.x.1, f.r_con.y.0)),
        );
        let _ = writeln!(
            s,
            r##"<rect class="r-con" x="{}" y="{}" width="{}" height="{}" fill="#fe8" fill-opacity="0.3" stroke="#c90" stroke-dasharray="4 3"/>"##,
            a.0 - 8,
            a.1 - 8,
            b.0 - a.0 + 16,
            b.1 - a.1 + 16
        );
        for (line, class) in [(f.l, "l"), (f.lp, "l-prime")] {
            let (p, q) = match line.axis {
                Axis::Row => (
                    px(Vertex::new(0, line.index)),
                    px(Vertex::new(g.n() - 1, line.index)),
                ),
                Axis::Col => (
                    px(Vertex::new(line.index, 0)),
                    px(Vertex::new(line.index, g.m() - 1)),
                ),
            };
            let _ = writeln!(
                s,
                r##"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#c33" stroke-width="2" stroke-dasharray="6 3"/>"##,
                p.0, p.1, q.0, q.1
            );
        }
    }

    let (rx, ry) = px(cfg.res.position);
    let fill = if cfg.res.fixed { "#333" } else { "#e60" };
    let _ = writeln!(
        s,
        r#"<rect class="res" x="{}" y="{}" width="16" height="16" fill="{fill}"/>"#,
        rx - 8,
        ry - 8
    );
    for (pos, name, color) in [
        (cfg.r1.position(), "r1", "#36c"),
        (cfg.r2.position(), "r2", "#93c"),
    ] {
        if let Some(v) = pos {
            let (cx, cy) = px(v);
            let _ = writeln!(
                s,
                r#"<circle class="{name}" cx="{cx}" cy="{cy}" r="11" fill="none" stroke="{color}" stroke-width="3"/>"#
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
