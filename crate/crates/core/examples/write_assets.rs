//! Regenerate the bundled benchmark images (assets/images/*.pgm).
//!
//! Usage: cargo run -p mapi --example write_assets [dir]

fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../assets/images").to_string());
    mapi::pca::samples::write_bundled_images(std::path::Path::new(&dir)).expect("write images");
    println!("wrote bundled images to {dir}");
}
