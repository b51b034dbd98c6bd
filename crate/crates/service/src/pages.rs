//! Static lab pages. The same HTML is served by the service and written
//! into the offline bundle; only the link style differs.

use vmlab_core::InstrumentKind;

pub const LAB_JS: &str = include_str!("../assets/lab.js");
pub const LAB_CSS: &str = include_str!("../assets/lab.css");

pub const LAB_TITLE: &str = "Virtual Metrology Lab";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkStyle {
    /// Absolute paths served by the HTTP service.
    Served,
    /// Relative file names inside an exported bundle.
    Offline,
}

impl LinkStyle {
    fn home(self) -> &'static str {
        match self {
            LinkStyle::Served => "/",
            LinkStyle::Offline => "index.html",
        }
    }

    fn safety(self) -> &'static str {
        match self {
            LinkStyle::Served => "/safety",
            LinkStyle::Offline => "safety.html",
        }
    }

    fn lab(self, kind: InstrumentKind) -> String {
        match self {
            LinkStyle::Served => format!("/lab/{}", kind.slug()),
            LinkStyle::Offline => offline_lab_file(kind),
        }
    }

    fn asset(self, name: &str) -> String {
        match self {
            LinkStyle::Served => format!("/assets/{name}"),
            LinkStyle::Offline => format!("assets/{name}"),
        }
    }
}

pub fn offline_lab_file(kind: InstrumentKind) -> String {
    format!("lab-{}.html", kind.slug())
}

/// Menu entries in display order.
pub fn menu_entries() -> Vec<&'static str> {
    let mut entries = vec!["Home", "Safety rules"];
    entries.extend(InstrumentKind::ALL.iter().map(|k| k.display_name()));
    entries
}

fn nav(style: LinkStyle) -> String {
    let mut items = vec![
        format!(r#"<li><a href="{}">Home</a></li>"#, style.home()),
        format!(r#"<li><a href="{}">Safety rules</a></li>"#, style.safety()),
    ];
    items.extend(
        InstrumentKind::ALL
            .iter()
            .map(|k| format!(r#"<li><a href="{}">{}</a></li>"#, style.lab(*k), k.display_name())),
    );
    format!(
        "<nav class=\"menu\"><h2>Main Menu</h2><ul>\n{}\n</ul></nav>",
        items.join("\n")
    )
}

fn page(style: LinkStyle, title: &str, body_attrs: &str, main: &str, scripts: &str) -> String {
    format!(
        r#"<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<meta name="viewport" content="width=device-width, initial-scale=1">
<title>{title} · {LAB_TITLE}</title>
<link rel="stylesheet" href="{css}">
</head>
<body{body_attrs}>
<header><h1>{LAB_TITLE}</h1></header>
<div class="layout">
{nav}
<main>
{main}
</main>
</div>
{scripts}</body>
</html>
"#,
        css = style.asset("lab.css"),
        nav = nav(style),
    )
}

pub fn home_page(style: LinkStyle) -> String {
    let cards: String = InstrumentKind::ALL
        .iter()
        .map(|k| {
            format!(
                "<li><a href=\"{}\">{}</a></li>\n",
                style.lab(*k),
                k.display_name()
            )
        })
        .collect();
    let main = format!(
        r#"<h2>Welcome</h2>
<p>Practise reading four dimensional-measurement instruments used for length and angle measurement.
Each lab page shows an instrument you can move by dragging its moving scale.</p>
<ul class="instruments">
{cards}</ul>
<p>Read the <a href="{safety}">safety rules</a> before working in the physical laboratory.</p>"#,
        safety = style.safety()
    );
    page(style, "Home", "", &main, "")
}

const SAFETY_SECTIONS: [(&str, &[&str]); 7] = [
    (
        "Laboratory safety",
        &[
            "Work in the laboratory only when an instructor is present.",
            "Keep benches, walkways and exits clear.",
        ],
    ),
    (
        "Emergency response",
        &[
            "Know where the exits, fire extinguishers, first-aid kit and emergency stop switches are.",
            "Report every accident or injury to the instructor at once.",
        ],
    ),
    (
        "Personal and general laboratory safety",
        &[
            "Wear safety glasses and closed shoes; tie back long hair and remove loose jewellery.",
            "No eating or drinking in the laboratory.",
        ],
    ),
    (
        "Electrical safety",
        &[
            "Inspect cables and plugs before use and never handle equipment with wet hands.",
            "Switch off and unplug instruments before cleaning or adjusting them.",
        ],
    ),
    (
        "Mechanical safety",
        &[
            "Handle sharp caliper jaws and anvils with care and keep fingers clear of moving parts.",
            "Secure workpieces before measuring; never measure parts on a running machine.",
        ],
    ),
    (
        "Chemical safety",
        &[
            "Use cleaning solvents and rust inhibitors only in ventilated areas and with gloves.",
            "Label every container and follow the disposal instructions.",
        ],
    ),
    (
        "Additional safety guidelines",
        &[
            "Return instruments to their cases and keep precision surfaces clean and dry.",
            "Ask the instructor whenever a procedure is unclear.",
        ],
    ),
];

pub fn safety_page(style: LinkStyle) -> String {
    let sections: String = SAFETY_SECTIONS
        .iter()
        .map(|(title, rules)| {
            let items: String = rules.iter().map(|r| format!("<li>{r}</li>")).collect();
            format!("<section><h3>{title}</h3><ul>{items}</ul></section>\n")
        })
        .collect();
    let main = format!("<h2>Safety rules</h2>\n{sections}");
    page(style, "Safety rules", "", &main, "")
}

pub fn lab_page(kind: InstrumentKind, style: LinkStyle) -> String {
    let offline = style == LinkStyle::Offline;
    let name = kind.display_name();
    let quiz = if offline {
        String::new()
    } else {
        r#"<label><input type="radio" name="mode" value="quiz"> Test yourself</label>"#.to_owned()
    };
    let main = format!(
        r##"<h2>{name}</h2>
<div class="controls">
<label><input type="radio" name="mode" value="explore" checked> Explore</label>
{quiz}
<label><input type="checkbox" id="show-reading"> Show reading</label>
<button type="button" id="reset">Reset</button>
<button type="button" id="next" hidden>New exercise</button>
</div>
<div id="stage" class="stage" aria-label="{name}"></div>
<p id="reading" class="reading"></p>
<form id="answer-form" class="answer" hidden>
<label>{name} reading <input type="text" id="answer" autocomplete="off" inputmode="decimal"></label>
<span class="hint">press Enter to submit</span>
</form>
<p id="feedback" class="feedback" role="status"></p>
<p id="stats" class="stats"></p>
<p class="resources">Quick-reference manual: <a href="#" aria-disabled="true">not available</a> · Video: <a href="#" aria-disabled="true">not available</a></p>"##
    );
    let mut scripts = String::new();
    if offline {
        scripts.push_str("<script src=\"templates/templates.js\"></script>\n");
    }
    scripts.push_str(&format!("<script src=\"{}\"></script>\n", style.asset("lab.js")));
    let attrs = format!(r#" data-kind="{}" data-offline="{offline}""#, kind.slug());
    page(style, name, &attrs, &main, &scripts)
}
