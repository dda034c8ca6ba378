#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace fwmav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

struct NonSkewError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidRotationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Proper rotation matrix. Construction validates orthogonality and
/// determinant to 1e-9; internal operations that preserve the invariants
/// bypass the check.
class Rotation {
public:
    Rotation() : m_(Mat3::Identity()) {}
    explicit Rotation(const Mat3& m);

    static Rotation identity() { return Rotation(); }

    /// Wraps a matrix without validation. For integrator internals that
    /// evaluate the vector field at non-orthogonal stage matrices.
    static Rotation unsafe(const Mat3& m) { return Rotation(m, unchecked_t{}); }

    const Mat3& matrix() const { return m_; }

    Rotation transposed() const { return Rotation(m_.transpose(), unchecked_t{}); }

    Vec3 operator*(const Vec3& v) const { return m_ * v; }
    Rotation operator*(const Rotation& o) const {
        return Rotation(m_ * o.m_, unchecked_t{});
    }

    double orthogonality_error() const {
        return (m_.transpose() * m_ - Mat3::Identity()).norm();
    }

private:
    friend Rotation exp_so3(const Vec3&);
    friend Rotation project_so3(const Mat3&);
    struct unchecked_t {};
    Rotation(const Mat3& m, unchecked_t) : m_(m) {}
    Mat3 m_;
};

/// Skew-symmetric cross-product matrix: hat(v) * w == v x w.
Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws NonSkewError if ||S + S^T||_F > 1e-8.
Vec3 vee(const Mat3& S);

/// Rodrigues exponential, series branch below angle 1e-4.
Rotation exp_so3(const Vec3& v);

/// Principal logarithm, ||result|| in [0, pi]. At angle pi the axis is taken
/// from the symmetric part; sign convention: first nonzero component positive.
Vec3 log_so3(const Rotation& R);

/// Nearest rotation in Frobenius norm (polar factor via SVD).
/// Throws DegenerateMatrixError if det(M) <= 1e-12.
Rotation project_so3(const Mat3& M);

/// Right Jacobian J_r(theta): for R(t) = R0 * exp_so3(theta(t)) the body
/// angular velocity satisfies omega = J_r(theta) * theta_dot.
Mat3 dexp_right(const Vec3& theta);

/// Inverse right Jacobian: theta_dot = dexpinv_right(theta) * omega.
Mat3 dexpinv_right(const Vec3& theta);

}  // namespace fwmav
