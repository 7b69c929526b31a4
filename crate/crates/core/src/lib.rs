pub mod camera;
pub mod cone;
pub mod diagram;
pub mod geom;
pub mod group;
pub mod knot;
pub mod protocol;
pub mod regions;
pub mod render;
pub mod scene;
pub mod transport;
pub mod tube;
