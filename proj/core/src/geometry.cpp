#include "trackfuse/geometry.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "trackfuse/errors.hpp"

namespace trackfuse {

namespace {
constexpr double kDriftTolerance = 1e-9;
}

Mat4 RigidTransform::matrix() const {
    Mat4 m = Mat4::Identity();
    m.block<3, 3>(0, 0) = rotation;
    m.block<3, 1>(0, 3) = translation;
    return m;
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
    RigidTransform t;
    t.rotation = m.block<3, 3>(0, 0);
    t.translation = m.block<3, 1>(0, 3);
    return t;
}

double orthonormality_drift(const Mat3& r) {
    return (r.transpose() * r - Mat3::Identity()).norm();
}

Mat3 orthonormalize(const Mat3& r) {
    Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    Mat3 v = svd.matrixV();
    Mat3 result = u * v.transpose();
    if (result.determinant() < 0) {
        u.col(2) *= -1.0;
        result = u * v.transpose();
    }
    return result;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
    RigidTransform out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    if (orthonormality_drift(out.rotation) > kDriftTolerance) {
        out.rotation = orthonormalize(out.rotation);
    }
    return out;
}

RigidTransform invert(const RigidTransform& t) {
    RigidTransform out;
    out.rotation = t.rotation.transpose();
    out.translation = -(out.rotation * t.translation);
    return out;
}

Mat3 axis_angle(const Vec3& axis, double angle_rad) {
    const double n = axis.norm();
    if (n == 0.0) throw InvalidInput("axis_angle: zero axis");
    return Eigen::AngleAxisd(angle_rad, axis / n).toRotationMatrix();
}

double rotation_angle_between(const Mat3& a, const Mat3& b) {
    const Mat3 rel = a.transpose() * b;
    double c = (rel.trace() - 1.0) / 2.0;
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

double angle_between(const Vec3& a, const Vec3& b) {
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) throw InvalidInput("angle_between: zero vector");
    double c = a.dot(b) / (na * nb);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

RigidTransform look_at(const Vec3& eye, const Vec3& target, const Vec3& up_hint) {
    Vec3 forward = target - eye;
    const double n = forward.norm();
    if (n == 0.0) throw InvalidInput("look_at: eye equals target");
    forward /= n;

    Vec3 right = forward.cross(up_hint);
    if (right.norm() < 1e-12) {
        // forward parallel to the up hint; pick any orthogonal axis
        right = forward.cross(Vec3::UnitX());
        if (right.norm() < 1e-12) right = forward.cross(Vec3::UnitY());
    }
    right.normalize();
    const Vec3 down = forward.cross(right);

    RigidTransform t;
    t.rotation.col(0) = right;
    t.rotation.col(1) = down;
    t.rotation.col(2) = forward;
    t.translation = eye;
    return t;
}

} // namespace trackfuse
