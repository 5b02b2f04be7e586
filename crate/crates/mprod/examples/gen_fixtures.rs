//! Regenerates the bundled reference fixtures under `fixtures/`.

use mprod::deblur;
use mprod::fixtures;
use mprod::io;

fn main() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    io::write_tensor(dir.join("a.mt3d"), &fixtures::a()).unwrap();
    io::write_tensor(dir.join("b.mt3d"), &fixtures::b()).unwrap();
    io::write_tensor(dir.join("c.mt3d"), &fixtures::c()).unwrap();
    io::write_tensor(dir.join("p.mt3d"), &fixtures::preconditioner()).unwrap();
    io::write_transform(dir.join("m.mmat"), &fixtures::transform()).unwrap();
    let img = deblur::tensor_to_image(&deblur::synthetic_image(64, 64)).unwrap();
    io::write_image(dir.join("test.ppm"), &img).unwrap();
    println!("fixtures written to {}", dir.display());
}
