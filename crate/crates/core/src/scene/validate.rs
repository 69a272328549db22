use std::collections::{HashMap, HashSet};

use super::{
    ForceKind, Location, ObjectSpec, Physics, PrimitiveKind, SceneError, SceneErrorKind, SceneSpec,
    Source, Vec3, AUTO_DOMAIN_NAME, DEFAULT_ELASTICITY, DEFAULT_MASS,
};
use crate::assets::AssetCatalog;

const UNIT_TOLERANCE: f64 = 1e-9;
const MIN_DIMENSION: u32 = 64;
const MAX_NAME_LEN: usize = 64;

/// Field path -> DSL source position.
#[derive(Debug, Default)]
pub(crate) struct Spans(HashMap<String, (usize, usize)>);

impl Spans {
    pub(crate) fn insert(&mut self, path: &str, line: usize, column: usize) {
        self.0.insert(path.to_string(), (line, column));
    }

    /// Position of `path`, falling back to the closest recorded ancestor.
    fn find(&self, path: &str) -> Option<(usize, usize)> {
        let mut path = path;
        loop {
            if let Some(pos) = self.0.get(path) {
                return Some(*pos);
            }
            let cut = path.rfind(['.', '['])?;
            path = &path[..cut];
        }
    }
}

#[derive(Debug)]
pub(crate) struct Issue {
    kind: SceneErrorKind,
    path: String,
    message: String,
}

impl Issue {
    fn new(kind: SceneErrorKind, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { kind, path: path.into(), message: message.into() }
    }

    fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(SceneErrorKind::Invalid, path, message)
    }

    pub(crate) fn locate(self, spans: &Spans) -> SceneError {
        let location = match spans.find(&self.path) {
            Some((line, column)) => Location::Text { line, column },
            None => Location::Field(self.path),
        };
        SceneError { kind: self.kind, location, message: self.message }
    }

    pub(crate) fn into_field_error(self) -> SceneError {
        SceneError::at_field(self.kind, self.path, self.message)
    }
}

/// Check every invariant of `spec`, returning its canonical form (defaults
/// materialised, fluid domain inserted where needed).
pub fn validate(spec: SceneSpec, catalog: &AssetCatalog) -> Result<SceneSpec, SceneError> {
    finalize(spec, catalog).map_err(Issue::into_field_error)
}

pub(crate) fn finalize(mut spec: SceneSpec, catalog: &AssetCatalog) -> Result<SceneSpec, Issue> {
    if !is_identifier(&spec.name, true) {
        return Err(Issue::invalid("name", format!("scene name `{}` is not a valid identifier", spec.name)));
    }
    if spec.frames < 1 {
        return Err(Issue::invalid("frames", "frames must be at least 1"));
    }
    if spec.fps < 1 {
        return Err(Issue::invalid("fps", "fps must be at least 1"));
    }
    let (w, h) = spec.resolution;
    for (value, axis) in [(w, "width"), (h, "height")] {
        if value < MIN_DIMENSION || value % 2 != 0 {
            return Err(Issue::invalid(
                "resolution",
                format!("{axis} {value} must be even and at least {MIN_DIMENSION}"),
            ));
        }
    }
    if !spec.world.dimensions.iter().all(|d| d.is_finite() && *d > 0.0) {
        return Err(Issue::invalid("world.dimensions", "world dimensions must be finite and strictly positive"));
    }

    let camera = spec.camera;
    if !finite3(camera.position) {
        return Err(Issue::invalid("camera.position", "camera position must be finite"));
    }
    if !finite3(camera.look_at) {
        return Err(Issue::invalid("camera.look_at", "camera look_at must be finite"));
    }
    if camera.position == camera.look_at {
        return Err(Issue::invalid("camera.look_at", "camera position and look_at coincide"));
    }

    if let Some(floor) = &spec.floor {
        if !(0.0..=1.0).contains(&floor.elasticity) {
            return Err(Issue::invalid("floor.elasticity", "floor elasticity must lie in [0, 1]"));
        }
    }

    let mut names = HashSet::new();
    for (i, object) in spec.objects.iter_mut().enumerate() {
        let path = format!("objects[{i}]");
        if !names.insert(object.name.clone()) {
            return Err(Issue::new(
                SceneErrorKind::DuplicateObject,
                format!("{path}.name"),
                format!("duplicate object name `{}`", object.name),
            ));
        }
        check_object(object, &path, catalog, camera.position)?;
    }

    let mut gravity_seen = false;
    for (i, force) in spec.forces.iter().enumerate() {
        let path = format!("forces[{i}]");
        if !finite3(force.direction) {
            return Err(Issue::invalid(format!("{path}.direction"), "direction must be finite"));
        }
        let norm = force.direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Issue::invalid(
                format!("{path}.direction"),
                format!("direction must be a unit vector (norm is {norm})"),
            ));
        }
        if !force.strength.is_finite() || force.strength < 0.0 {
            return Err(Issue::invalid(format!("{path}.strength"), "strength must be finite and non-negative"));
        }
        if force.kind == ForceKind::GravityOverride {
            if gravity_seen {
                return Err(Issue::invalid(path, "at most one gravity override is allowed"));
            }
            gravity_seen = true;
        }
    }

    if let Some(gravity) = spec.gravity() {
        let straight_down = gravity.direction == [0.0, 0.0, -1.0] && gravity.strength > 0.0;
        if let Some(i) = spec.objects.iter().position(|o| o.throw_at_camera) {
            if !straight_down {
                return Err(Issue::invalid(
                    format!("objects[{i}].throw_at_camera"),
                    "throw_at_camera needs gravity pointing straight down (0 0 -1) with positive strength",
                ));
            }
        }
    }

    insert_fluid_domain(&mut spec);
    check_liquid_enclosure(&spec)?;
    Ok(spec)
}

fn check_object(object: &mut ObjectSpec, path: &str, catalog: &AssetCatalog, camera: Vec3) -> Result<(), Issue> {
    if !is_identifier(&object.name, false) {
        return Err(Issue::invalid(
            format!("{path}.name"),
            format!("object name `{}` must match [A-Za-z_][A-Za-z0-9_]*", object.name),
        ));
    }
    if let Source::Asset(key) = &object.source {
        if !catalog.contains(key) {
            return Err(Issue::new(
                SceneErrorKind::UnknownAsset,
                format!("{path}.source"),
                format!("asset `{key}` is not in the asset catalog"),
            ));
        }
    }
    if !object.size.is_finite() || object.size <= 0.0 {
        return Err(Issue::invalid(format!("{path}.size"), "size must be finite and positive"));
    }
    if !finite3(object.position) {
        return Err(Issue::invalid(format!("{path}.position"), "position must be finite"));
    }

    let rigid = object.physics.is_rigid();
    let active = object.physics == Physics::RigidActive;
    let only = |field: &str, what: &str| {
        Issue::invalid(format!("{path}.{field}"), format!("`{field}` is only valid for {what} objects"))
    };

    match object.mass {
        Some(_) if !rigid => return Err(only("mass", "rigid")),
        Some(m) if !m.is_finite() || m <= 0.0 => {
            return Err(Issue::invalid(format!("{path}.mass"), "mass must be finite and positive"))
        }
        None if rigid => object.mass = Some(DEFAULT_MASS),
        _ => {}
    }
    match object.elasticity {
        Some(_) if !rigid => return Err(only("elasticity", "rigid")),
        Some(e) if !(0.0..=1.0).contains(&e) => {
            return Err(Issue::invalid(format!("{path}.elasticity"), "elasticity must lie in [0, 1]"))
        }
        None if rigid => object.elasticity = Some(DEFAULT_ELASTICITY),
        _ => {}
    }
    if let Some(v) = object.initial_velocity {
        if !active {
            return Err(only("initial_velocity", "rigid-active"));
        }
        if !finite3(v) {
            return Err(Issue::invalid(format!("{path}.initial_velocity"), "velocity must be finite"));
        }
    }
    if let Some(r) = object.initial_rotation {
        if !active {
            return Err(only("initial_rotation", "rigid-active"));
        }
        if !finite3(r) {
            return Err(Issue::invalid(format!("{path}.initial_rotation"), "rotation must be finite"));
        }
    }
    if object.throw_at_camera {
        if !active {
            return Err(only("throw_at_camera", "rigid-active"));
        }
        if object.initial_velocity.is_some() {
            return Err(Issue::invalid(
                format!("{path}.throw_at_camera"),
                "throw_at_camera and initial_velocity are mutually exclusive",
            ));
        }
        if object.position[2] <= camera[2] {
            return Err(Issue::invalid(
                format!("{path}.throw_at_camera"),
                "a thrown object must start above the camera height",
            ));
        }
    }
    if object.pin.is_some() && object.physics != Physics::Cloth {
        return Err(only("pin", "cloth"));
    }
    Ok(())
}

fn insert_fluid_domain(spec: &mut SceneSpec) {
    let has_flow = spec.objects.iter().any(|o| o.physics == Physics::LiquidFlow);
    let has_domain = spec.objects.iter().any(|o| o.physics == Physics::LiquidDomain);
    if !has_flow || has_domain {
        return;
    }
    let mut name = AUTO_DOMAIN_NAME.to_string();
    let mut n = 2;
    while spec.objects.iter().any(|o| o.name == name) {
        name = format!("{AUTO_DOMAIN_NAME}_{n}");
        n += 1;
    }
    let size = spec.world.dimensions.iter().copied().fold(0.0, f64::max);
    let mut domain = ObjectSpec::new(name, [0.0, 0.0, size / 2.0]);
    domain.source = Source::Primitive(PrimitiveKind::Cube);
    domain.size = size;
    domain.physics = Physics::LiquidDomain;
    spec.objects.push(domain);
}

fn check_liquid_enclosure(spec: &SceneSpec) -> Result<(), Issue> {
    let domains: Vec<&ObjectSpec> = spec.objects.iter().filter(|o| o.physics == Physics::LiquidDomain).collect();
    for (i, object) in spec.objects.iter().enumerate() {
        if object.physics != Physics::LiquidFlow {
            continue;
        }
        let inside = domains.iter().any(|d| {
            (0..3).all(|k| (object.position[k] - d.position[k]).abs() <= d.size / 2.0)
        });
        if !inside {
            return Err(Issue::invalid(
                format!("objects[{i}].position"),
                format!("liquid object `{}` lies outside every fluid domain", object.name),
            ));
        }
    }
    Ok(())
}

fn finite3(v: Vec3) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn is_identifier(name: &str, allow_hyphen: bool) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else { return false };
    name.len() <= MAX_NAME_LEN
        && (first.is_ascii_alphabetic() || first == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || (allow_hyphen && c == '-'))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{CameraSpec, FloorSpec, ForceSpec, WorldConfig};

    fn base() -> SceneSpec {
        SceneSpec {
            name: "t".into(),
            frames: 8,
            fps: 24,
            resolution: (128, 96),
            camera: CameraSpec { position: [0.0, -10.0, 2.0], look_at: [0.0, 0.0, 1.0] },
            objects: vec![],
            forces: vec![],
            floor: Some(FloorSpec::default()),
            world: WorldConfig::default(),
        }
    }

    fn err(spec: SceneSpec) -> SceneError {
        validate(spec, &AssetCatalog::builtin()).unwrap_err()
    }

    #[test]
    fn resolution_must_be_even_and_large_enough() {
        let mut s = base();
        s.resolution = (63, 96);
        assert_eq!(err(s.clone()).location, Location::Field("resolution".into()));
        s.resolution = (130, 97);
        err(s);
    }

    #[test]
    fn zero_frames_rejected() {
        let mut s = base();
        s.frames = 0;
        assert_eq!(err(s).location, Location::Field("frames".into()));
    }

    #[test]
    fn camera_must_look_somewhere() {
        let mut s = base();
        s.camera.look_at = s.camera.position;
        err(s);
    }

    #[test]
    fn rigid_defaults_materialised() {
        let mut s = base();
        let mut ball = ObjectSpec::new("ball", [0.0, 0.0, 4.0]);
        ball.physics = Physics::RigidActive;
        s.objects.push(ball);
        let v = validate(s, &AssetCatalog::builtin()).unwrap();
        assert_eq!(v.objects[0].mass, Some(1.0));
        assert_eq!(v.objects[0].elasticity, Some(0.5));
    }

    #[test]
    fn mass_on_cloth_rejected() {
        let mut flag = ObjectSpec::new("flag", [0.0, 0.0, 2.0]);
        flag.physics = Physics::Cloth;
        flag.mass = Some(0.2);
        assert_eq!(err(base().clone_with(flag)).location, Location::Field("objects[0].mass".into()));
    }

    trait With {
        fn clone_with(&self, o: ObjectSpec) -> SceneSpec;
    }

    impl With for SceneSpec {
        fn clone_with(&self, o: ObjectSpec) -> SceneSpec {
            let mut s = self.clone();
            s.objects.push(o);
            s
        }
    }

    #[test]
    fn unknown_asset_is_an_error() {
        let mut o = ObjectSpec::new("ship", [0.0; 3]);
        o.source = Source::Asset("spaceship".into());
        let e = err(base().clone_with(o));
        assert_eq!(e.kind, SceneErrorKind::UnknownAsset);
        assert_eq!(e.location, Location::Field("objects[0].source".into()));
    }

    #[test]
    fn elasticity_range() {
        let mut o = ObjectSpec::new("b", [0.0; 3]);
        o.physics = Physics::RigidActive;
        o.elasticity = Some(1.5);
        err(base().clone_with(o));
    }

    #[test]
    fn non_unit_wind_rejected() {
        let mut s = base();
        s.forces.push(ForceSpec { kind: ForceKind::Wind, direction: [1.0, 1.0, 0.0], strength: 5.0 });
        assert_eq!(err(s).location, Location::Field("forces[0].direction".into()));
    }

    #[test]
    fn negative_wind_rejected() {
        let mut s = base();
        s.forces.push(ForceSpec { kind: ForceKind::Wind, direction: [1.0, 0.0, 0.0], strength: -1.0 });
        err(s);
    }

    #[test]
    fn liquid_gets_domain() {
        let mut o = ObjectSpec::new("water", [0.0, 0.0, 2.0]);
        o.physics = Physics::LiquidFlow;
        let v = validate(base().clone_with(o), &AssetCatalog::builtin()).unwrap();
        let domain = v.object(AUTO_DOMAIN_NAME).unwrap();
        assert_eq!(domain.physics, Physics::LiquidDomain);
        assert_eq!(domain.size, 30.0);
        // idempotent
        let again = validate(v.clone(), &AssetCatalog::builtin()).unwrap();
        assert_eq!(again, v);
    }

    #[test]
    fn liquid_outside_domain_rejected() {
        let mut s = base();
        let mut d = ObjectSpec::new("tank", [0.0, 0.0, 1.0]);
        d.physics = Physics::LiquidDomain;
        d.size = 2.0;
        let mut w = ObjectSpec::new("water", [5.0, 0.0, 1.0]);
        w.physics = Physics::LiquidFlow;
        s.objects = vec![d, w];
        assert_eq!(err(s).location, Location::Field("objects[1].position".into()));
    }

    #[test]
    fn throw_requires_height_above_camera() {
        let mut o = ObjectSpec::new("ball", [0.0, 0.0, 1.0]);
        o.physics = Physics::RigidActive;
        o.throw_at_camera = true;
        err(base().clone_with(o));
    }

    #[test]
    fn span_lookup_walks_ancestors() {
        let mut spans = Spans::default();
        spans.insert("objects[0]", 3, 8);
        assert_eq!(spans.find("objects[0].mass"), Some((3, 8)));
        assert_eq!(spans.find("forces[1].direction"), None);
    }
}
