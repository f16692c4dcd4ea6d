use std::process::Command;

fn main() {
    let pkg = env!("CARGO_PKG_VERSION");
    let described = Command::new("git")
        .args(["describe", "--tags", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty());
    let version = match described {
        // tagless repositories only yield the abbreviated hash
        Some(d) if !d.starts_with('v') => format!("v{pkg}-g{d}"),
        Some(d) => d,
        None => format!("v{pkg}"),
    };
    println!("cargo:rustc-env=APWB_VERSION={version}");
    println!("cargo:rerun-if-changed=build.rs");
}
