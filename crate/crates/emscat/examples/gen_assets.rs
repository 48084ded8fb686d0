//! Regenerate the mesh assets shipped with the example configurations.
//! Spheres are volume-matched to their nominal radius.
use emscat::mesh::{gen, io};

fn main() {
    let out = std::path::Path::new("assets/meshes");
    std::fs::create_dir_all(out).unwrap();
    let vol = |r: f64| 4.0 / 3.0 * std::f64::consts::PI * r * r * r;

    let sphere = gen::sphere_1220(0.5).scaled_to_volume(vol(0.5));
    io::save_gmsh_v2(out.join("sphere_r0.5_f1220.msh"), &[&sphere]).unwrap();

    let coarse = gen::icosphere(0.5, 2).scaled_to_volume(vol(0.5));
    io::save_gmsh_v2(out.join("sphere_r0.5_f320.msh"), &[&coarse]).unwrap();

    for (i, m) in gen::grid_array(&coarse, 2, 2, 2.0, 2.0)
        .into_iter()
        .enumerate()
    {
        io::save_gmsh_v2(out.join(format!("array2x2_s{i}.msh")), &[&m]).unwrap();
    }

    let ico = gen::icosahedron(1.0);
    io::save_gmsh_v2(out.join("icosahedron_r1.msh"), &[&ico]).unwrap();
    std::fs::write(out.join("icosahedron_r1.obj"), io::to_obj(&[&ico])).unwrap();
    println!("assets written to {}", out.display());
}
