#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace trackfuse {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// SE(3) pose: p_out = rotation * p_in + translation. Units are meters.
struct RigidTransform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static RigidTransform identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

    Mat4 matrix() const;
    static RigidTransform from_matrix(const Mat4& m);
};

/// compose(a, b) applies b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

RigidTransform invert(const RigidTransform& t);

/// Frobenius deviation of R^T R from the identity.
double orthonormality_drift(const Mat3& r);

/// Nearest rotation matrix (SVD projection, det forced to +1).
Mat3 orthonormalize(const Mat3& r);

/// Rotation by `angle_rad` about a (not necessarily unit) axis.
Mat3 axis_angle(const Vec3& axis, double angle_rad);

/// Angle in radians between two rotations.
double rotation_angle_between(const Mat3& a, const Mat3& b);

/// Angle in radians between two directions (inputs need not be unit).
double angle_between(const Vec3& a, const Vec3& b);

/// Camera-to-world pose with the usual vision convention: camera x right,
/// y down, z forward (toward `target`). `up_hint` fixes the roll.
RigidTransform look_at(const Vec3& eye, const Vec3& target, const Vec3& up_hint);

} // namespace trackfuse
