//! Offline bundle: the lab pages plus precomputed templates, viewable from
//! the file system without the service.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use vmlab_core::InstrumentKind;

use crate::api::template_json;
use crate::pages::{self, LinkStyle};

/// Writes the bundle into `out` and returns the files written, relative to `out`.
pub fn export_bundle(out: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<(PathBuf, Vec<u8>)> = vec![
        ("index.html".into(), pages::home_page(LinkStyle::Offline).into_bytes()),
        ("safety.html".into(), pages::safety_page(LinkStyle::Offline).into_bytes()),
        ("assets/lab.js".into(), pages::LAB_JS.as_bytes().to_vec()),
        ("assets/lab.css".into(), pages::LAB_CSS.as_bytes().to_vec()),
    ];
    let mut script = String::from("window.VMLAB_TEMPLATES = {\n");
    for kind in InstrumentKind::ALL {
        let json = template_json(kind);
        script.push_str(&format!(
            "  \"{}\": {},\n",
            kind.slug(),
            std::str::from_utf8(&json).expect("json is utf-8")
        ));
        files.push((format!("templates/{}.json", kind.slug()).into(), json));
        files.push((
            pages::offline_lab_file(kind).into(),
            pages::lab_page(kind, LinkStyle::Offline).into_bytes(),
        ));
    }
    script.push_str("};\n");
    files.push(("templates/templates.js".into(), script.into_bytes()));

    for dir in ["assets", "templates"] {
        fs::create_dir_all(out.join(dir))?;
    }
    for (rel, body) in &files {
        fs::write(out.join(rel), body)?;
    }
    Ok(files.into_iter().map(|(rel, _)| rel).collect())
}
