//! Figure configs compiled into the binary.

const BUNDLED: [(&str, &str); 8] = [
    ("fig1b", include_str!("../../../configs/fig1b.toml")),
    ("fig2a", include_str!("../../../configs/fig2a.toml")),
    ("fig2b", include_str!("../../../configs/fig2b.toml")),
    ("fig3a", include_str!("../../../configs/fig3a.toml")),
    ("fig3d", include_str!("../../../configs/fig3d.toml")),
    ("fig3e", include_str!("../../../configs/fig3e.toml")),
    ("fig4a", include_str!("../../../configs/fig4a.toml")),
    ("fig4b", include_str!("../../../configs/fig4b.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
