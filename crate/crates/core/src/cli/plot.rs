//! SVG rendering of a transcript as a ballot-by-candidate grid.
//!
//! One column per candidate followed by the consolidated and tuned group
//! columns (on a grey background); one row per ballot, top to bottom in
//! counting order. A filled cell is a vote. In every column the run with the
//! smaller exact significance of the two longest runs is traced by a red
//! line. Headers of the precinct leaders are bold.

use std::fmt::Write as _;

use crate::error::Result;
use crate::flagseq::{
    candidate_flags, consolidated_flags, rank_candidates, run_stats, tuned_flags, FlagSequence,
    FlagState, Transcript,
};
use crate::runstats::{exact_longest_run_alpha, BernoulliModel};

const COLUMN_WIDTH: f64 = 14.0;
const COLUMN_GAP: f64 = 4.0;
const ROW_HEIGHT: f64 = 2.0;
const HEADER_HEIGHT: f64 = 130.0;
const MARGIN: f64 = 10.0;
const VOTE_COLOR: &str = "#1f2d3d";
const GROUP_BACKGROUND: &str = "#d5d8dc";
const RUN_COLOR: &str = "#e74c3c";

struct Column {
    title: String,
    flags: FlagSequence,
    bold: bool,
    group: bool,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Span of the less probable of the two longest runs.
fn least_probable_run(flags: &FlagSequence) -> Result<Option<std::ops::Range<usize>>> {
    let stats = run_stats(flags)?;
    let mut best: Option<(f64, FlagState)> = None;
    for state in [FlagState::One, FlagState::Zero] {
        let s = stats.longest(state);
        if s == 0 {
            continue;
        }
        let model = BernoulliModel::fit(flags, state)?;
        let alpha = exact_longest_run_alpha(&model, s)?.alpha;
        if best.is_none_or(|(a, _)| alpha < a) {
            best = Some((alpha, state));
        }
    }
    Ok(best.and_then(|(_, state)| flags.longest_run_span(state)))
}

pub fn plot_svg(transcript: &Transcript, top_k: usize, tuned_top_k: usize) -> Result<String> {
    let ranking = rank_candidates(transcript)?;
    let leaders = ranking.leaders(top_k.min(transcript.c()))?;
    let mut columns: Vec<Column> = transcript
        .candidates()
        .iter()
        .enumerate()
        .map(|(i, label)| {
            Ok(Column {
                title: label.clone(),
                flags: candidate_flags(transcript, label)?,
                bold: leaders.indices.contains(&i),
                group: false,
            })
        })
        .collect::<Result<_>>()?;
    if top_k <= transcript.c() {
        columns.push(Column {
            title: format!("all top {top_k}"),
            flags: consolidated_flags(transcript, top_k)?.flags,
            bold: false,
            group: true,
        });
    }
    if tuned_top_k <= transcript.c() {
        columns.push(Column {
            title: format!("only top {tuned_top_k}"),
            flags: tuned_flags(transcript, tuned_top_k)?.flags,
            bold: false,
            group: true,
        });
    }

    let n = transcript.n();
    let width = 2.0 * MARGIN + columns.len() as f64 * (COLUMN_WIDTH + COLUMN_GAP);
    let height = 2.0 * MARGIN + HEADER_HEIGHT + n as f64 * ROW_HEIGHT;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN:.0}" y="{:.0}" font-size="12">Precinct {} (n = {n})</text>"#,
        MARGIN + 12.0,
        escape(transcript.precinct_id())
    );

    let top = MARGIN + HEADER_HEIGHT;
    for (k, col) in columns.iter().enumerate() {
        let x = MARGIN + k as f64 * (COLUMN_WIDTH + COLUMN_GAP);
        let cx = x + COLUMN_WIDTH / 2.0;
        let weight = if col.bold { "bold" } else { "normal" };
        let _ = writeln!(
            svg,
            r#"<text transform="translate({:.1},{:.1}) rotate(-90)" font-weight="{weight}">{}</text>"#,
            cx + 4.0,
            top - 4.0,
            escape(&col.title)
        );
        if col.group {
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.1}" y="{top:.1}" width="{COLUMN_WIDTH:.1}" height="{:.1}" fill="{GROUP_BACKGROUND}"/>"#,
                n as f64 * ROW_HEIGHT
            );
        }
        for (state, span) in col.flags.runs() {
            if state == FlagState::One {
                let _ = writeln!(
                    svg,
                    r#"<rect x="{x:.1}" y="{:.1}" width="{COLUMN_WIDTH:.1}" height="{:.1}" fill="{VOTE_COLOR}"/>"#,
                    top + span.start as f64 * ROW_HEIGHT,
                    span.len() as f64 * ROW_HEIGHT
                );
            }
        }
        if let Some(span) = least_probable_run(&col.flags)? {
            let _ = writeln!(
                svg,
                r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="{RUN_COLOR}" stroke-width="3"/>"#,
                top + span.start as f64 * ROW_HEIGHT,
                top + span.end as f64 * ROW_HEIGHT
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Transcript {
        Transcript::from_ballots(
            "toy",
            vec!["A".into(), "B".into(), "C".into()],
            5,
            [vec![0, 1], vec![0], vec![2]],
        )
        .unwrap()
    }

    #[test]
    fn toy_grid() {
        let svg = plot_svg(&toy(), 2, 3).unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("rotate(-90)").count(), 5);
        // header + three ballot rows
        assert!(svg.contains(&format!(
            r#"height="{:.0}""#,
            2.0 * MARGIN + HEADER_HEIGHT + 3.0 * ROW_HEIGHT
        )));
        assert_eq!(svg.matches(r#"font-weight="bold""#).count(), 2);
        assert_eq!(plot_svg(&toy(), 2, 3).unwrap(), svg);
    }

    #[test]
    fn escapes_labels() {
        let t = Transcript::from_ballots("<p>", vec!["A&B".into()], 5, [vec![0]]).unwrap();
        let svg = plot_svg(&t, 5, 6).unwrap();
        assert!(svg.contains("A&amp;B") && svg.contains("&lt;p&gt;"));
    }
}
