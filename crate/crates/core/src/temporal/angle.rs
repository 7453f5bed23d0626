use super::TemporalError;

/// Planar angle, degrees, between the travel direction and the horizontal
/// line of sight from the drone to the base station.
///
/// 0° far before the array, 90° abeam of it (boresight crossing for a
/// trajectory parallel to the array), 180° far past it.
pub fn angle_to_bs(position: [f64; 3], bs: [f64; 3], direction: [f64; 3]) -> Result<f64, TemporalError> {
    let los = [bs[0] - position[0], bs[1] - position[1]];
    let dir = [direction[0], direction[1]];
    let nl = los[0].hypot(los[1]);
    let nd = dir[0].hypot(dir[1]);
    if !(nl > 1e-12) {
        return Err(TemporalError::Geometry("drone directly above the base station".into()));
    }
    if !(nd > 1e-12) {
        return Err(TemporalError::Geometry("trajectory direction has no horizontal component".into()));
    }
    let c = ((los[0] * dir[0] + los[1] * dir[1]) / (nl * nd)).clamp(-1.0, 1.0);
    Ok(c.acos().to_degrees())
}
