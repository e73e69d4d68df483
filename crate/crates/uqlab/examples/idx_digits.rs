//! Reads image/label pairs in the big-endian IDX container used by the
//! classic digit datasets. The example writes a tiny two-image fixture,
//! loads it back, and shows the one-hot targets the loader builds; point
//! the ood-classify experiment at real files with the idx_* keys to run
//! the same path at full scale.

use uqlab::load_idx;

fn main() -> uqlab::Result<()> {
    let dir = std::env::temp_dir().join("uqlab-idx-demo");
    std::fs::create_dir_all(&dir)?;

    // Magic 0x00000803, two 4x4 images, pixels row-major.
    let mut images: Vec<u8> = Vec::new();
    images.extend_from_slice(&0x0000_0803u32.to_be_bytes());
    images.extend_from_slice(&2u32.to_be_bytes());
    images.extend_from_slice(&4u32.to_be_bytes());
    images.extend_from_slice(&4u32.to_be_bytes());
    images.extend((0..16).map(|i| (i * 17) as u8));
    images.extend(std::iter::repeat(255u8).take(16));

    // Magic 0x00000801, two labels.
    let mut labels: Vec<u8> = Vec::new();
    labels.extend_from_slice(&0x0000_0801u32.to_be_bytes());
    labels.extend_from_slice(&2u32.to_be_bytes());
    labels.extend_from_slice(&[3u8, 0u8]);

    let images_path = dir.join("demo-images.idx");
    let labels_path = dir.join("demo-labels.idx");
    std::fs::write(&images_path, &images)?;
    std::fs::write(&labels_path, &labels)?;

    let set = load_idx(&images_path, &labels_path)?;
    println!("loaded {} images of {} pixels each", set.inputs.rows(), set.inputs.cols());
    println!("pixel values are scaled to [0, 1]: first image row 0 = {:?}", &set.inputs.row(0)[..4]);
    println!("labels become one-hot rows over {} classes:", set.targets.cols());
    for r in 0..set.targets.rows() {
        println!("  image {r}: {:?}", set.targets.row(r));
    }

    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
