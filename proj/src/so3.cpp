#include "fwmav/so3.hpp"

#include <cmath>

namespace fwmav {

namespace {
constexpr double kSmallAngle = 1e-4;
}

Rotation::Rotation(const Mat3& m) : m_(m) {
    const double orth = (m.transpose() * m - Mat3::Identity()).norm();
    const double det = m.determinant();
    if (orth > 1e-9 || std::abs(det - 1.0) > 1e-9) {
        throw InvalidRotationError("matrix is not a rotation (orthogonality " +
                                   std::to_string(orth) + ", det " +
                                   std::to_string(det) + ")");
    }
}

Mat3 hat(const Vec3& v) {
    Mat3 S;
    S << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return S;
}

Vec3 vee(const Mat3& S) {
    if ((S + S.transpose()).norm() > 1e-8) {
        throw NonSkewError("matrix is not skew-symmetric");
    }
    return Vec3(S(2, 1), S(0, 2), S(1, 0));
}

Rotation exp_so3(const Vec3& v) {
    const double angle = v.norm();
    double c1;  // sin(a)/a
    double c2;  // (1-cos(a))/a^2
    if (angle < kSmallAngle) {
        const double a2 = angle * angle;
        c1 = 1.0 - a2 / 6.0;
        c2 = 0.5 - a2 / 24.0;
    } else {
        c1 = std::sin(angle) / angle;
        c2 = (1.0 - std::cos(angle)) / (angle * angle);
    }
    const Mat3 V = hat(v);
    const Mat3 R = Mat3::Identity() + c1 * V + c2 * V * V;
    return Rotation(R, Rotation::unchecked_t{});
}

Vec3 log_so3(const Rotation& Rin) {
    const Mat3& R = Rin.matrix();
    const double cos_angle =
        std::clamp((R.trace() - 1.0) / 2.0, -1.0, 1.0);
    const double angle = std::acos(cos_angle);
    const Vec3 w = vee((R - R.transpose()) / 2.0);  // sin(angle) * axis

    if (angle < kSmallAngle) {
        const double a2 = angle * angle;
        return w * (1.0 + a2 / 6.0 + 7.0 * a2 * a2 / 360.0);
    }
    if (angle < 3.0) {
        return w * (angle / std::sin(angle));
    }
    // Near pi: axis*axis^T = I + ((R + R^T)/2 - I) / (1 - cos(angle)).
    const Mat3 K = Mat3::Identity() +
                   ((R + R.transpose()) / 2.0 - Mat3::Identity()) /
                       (1.0 - cos_angle);
    int j = 0;
    K.diagonal().maxCoeff(&j);
    Vec3 axis = K.col(j) / std::sqrt(K(j, j));
    if (w.norm() > 1e-10) {
        if (axis.dot(w) < 0.0) axis = -axis;
    } else {
        for (int i = 0; i < 3; ++i) {
            if (std::abs(axis[i]) > 1e-12) {
                if (axis[i] < 0.0) axis = -axis;
                break;
            }
        }
    }
    return angle * axis;
}

Rotation project_so3(const Mat3& M) {
    if (M.determinant() <= 1e-12) {
        throw DegenerateMatrixError("matrix determinant not positive");
    }
    Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 R = svd.matrixU() * svd.matrixV().transpose();
    if (R.determinant() < 0.0) {
        Mat3 D = Mat3::Identity();
        D(2, 2) = -1.0;
        R = svd.matrixU() * D * svd.matrixV().transpose();
    }
    return Rotation(R, Rotation::unchecked_t{});
}

Mat3 dexp_right(const Vec3& theta) {
    const double a = theta.norm();
    double c1;  // (1-cos(a))/a^2
    double c2;  // (a-sin(a))/a^3
    if (a < kSmallAngle) {
        const double a2 = a * a;
        c1 = 0.5 - a2 / 24.0;
        c2 = 1.0 / 6.0 - a2 / 120.0;
    } else {
        c1 = (1.0 - std::cos(a)) / (a * a);
        c2 = (a - std::sin(a)) / (a * a * a);
    }
    const Mat3 T = hat(theta);
    return Mat3::Identity() - c1 * T + c2 * T * T;
}

Mat3 dexpinv_right(const Vec3& theta) {
    const double a = theta.norm();
    double c;  // 1/a^2 - (1+cos(a)) / (2 a sin(a))
    if (a < kSmallAngle) {
        c = 1.0 / 12.0 + a * a / 720.0;
    } else {
        c = 1.0 / (a * a) -
            (1.0 + std::cos(a)) / (2.0 * a * std::sin(a));
    }
    const Mat3 T = hat(theta);
    return Mat3::Identity() + 0.5 * T + c * T * T;
}

}  // namespace fwmav
