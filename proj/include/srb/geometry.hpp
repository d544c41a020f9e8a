#ifndef SRB_GEOMETRY_HPP
#define SRB_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstddef>

#include "srb/error.hpp"

namespace srb {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }

    Vec3 normalized() const {
        double n = norm();
        if (n == 0.0) {
            throw Error(errc::invalid_input, "cannot normalize zero vector");
        }
        return {x / n, y / n, z / n};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Unit quaternion, canonical sign w >= 0 after canonicalized().
struct Quaternion {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double w = 1.0;

    Quaternion() = default;
    Quaternion(double x_, double y_, double z_, double w_) : x(x_), y(y_), z(z_), w(w_) {}

    double norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }
    double dot(const Quaternion& o) const { return x * o.x + y * o.y + z * o.z + w * o.w; }

    Quaternion normalized() const {
        double n = norm();
        if (n == 0.0) {
            throw Error(errc::invalid_input, "cannot normalize zero quaternion");
        }
        return {x / n, y / n, z / n, w / n};
    }

    // Sign convention: w >= 0; ties broken on the first nonzero component.
    Quaternion canonicalized() const {
        bool flip = false;
        if (w < 0.0) {
            flip = true;
        } else if (w == 0.0) {
            if (x < 0.0) flip = true;
            else if (x == 0.0 && y < 0.0) flip = true;
            else if (x == 0.0 && y == 0.0 && z < 0.0) flip = true;
        }
        return flip ? Quaternion{-x, -y, -z, -w} : *this;
    }

    Quaternion operator*(const Quaternion& o) const {
        return {w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w,
                w * o.w - x * o.x - y * o.y - z * o.z};
    }

    Quaternion conjugate() const { return {-x, -y, -z, w}; }

    bool is_unit(double tol = 1e-6) const { return std::abs(norm() - 1.0) <= tol; }
};

// 4x4 homogeneous transform, row-major, column-vector convention (p' = M * p).
struct Mat4 {
    std::array<double, 16> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};

    static Mat4 identity() { return Mat4{}; }

    static Mat4 translation(const Vec3& t) {
        Mat4 r;
        r.m[3] = t.x;
        r.m[7] = t.y;
        r.m[11] = t.z;
        return r;
    }

    double& at(int row, int col) { return m[static_cast<size_t>(row * 4 + col)]; }
    double at(int row, int col) const { return m[static_cast<size_t>(row * 4 + col)]; }

    Vec3 translation_part() const { return {m[3], m[7], m[11]}; }

    void set_translation(const Vec3& t) {
        m[3] = t.x;
        m[7] = t.y;
        m[11] = t.z;
    }

    Mat4 operator*(const Mat4& o) const {
        Mat4 r;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                double s = 0.0;
                for (int k = 0; k < 4; ++k) {
                    s += at(i, k) * o.at(k, j);
                }
                r.at(i, j) = s;
            }
        }
        return r;
    }

    Vec3 transform_point(const Vec3& p) const {
        return {m[0] * p.x + m[1] * p.y + m[2] * p.z + m[3],
                m[4] * p.x + m[5] * p.y + m[6] * p.z + m[7],
                m[8] * p.x + m[9] * p.y + m[10] * p.z + m[11]};
    }

    Vec3 rotate_vector(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[4] * v.x + m[5] * v.y + m[6] * v.z,
                m[8] * v.x + m[9] * v.y + m[10] * v.z};
    }

    bool has_affine_bottom_row() const {
        return m[12] == 0.0 && m[13] == 0.0 && m[14] == 0.0 && m[15] == 1.0;
    }

    // Rotation block orthonormal with determinant +1, bottom row (0,0,0,1).
    bool is_rigid(double tol = 1e-9) const {
        if (!has_affine_bottom_row()) return false;
        Vec3 r0{m[0], m[1], m[2]};
        Vec3 r1{m[4], m[5], m[6]};
        Vec3 r2{m[8], m[9], m[10]};
        if (std::abs(r0.dot(r0) - 1.0) > tol) return false;
        if (std::abs(r1.dot(r1) - 1.0) > tol) return false;
        if (std::abs(r2.dot(r2) - 1.0) > tol) return false;
        if (std::abs(r0.dot(r1)) > tol) return false;
        if (std::abs(r0.dot(r2)) > tol) return false;
        if (std::abs(r1.dot(r2)) > tol) return false;
        double det = r0.dot(r1.cross(r2));
        return std::abs(det - 1.0) <= tol;
    }

    double frobenius_distance(const Mat4& o) const {
        double s = 0.0;
        for (size_t i = 0; i < 16; ++i) {
            double d = m[i] - o.m[i];
            s += d * d;
        }
        return std::sqrt(s);
    }

    double max_abs_diff(const Mat4& o) const {
        double r = 0.0;
        for (size_t i = 0; i < 16; ++i) {
            r = std::max(r, std::abs(m[i] - o.m[i]));
        }
        return r;
    }
};

inline Mat4 quat_to_matrix(const Quaternion& q) {
    if (!q.is_unit(1e-6)) {
        throw Error(errc::invalid_input, "quaternion is not unit norm");
    }
    Quaternion u = q.normalized();
    double xx = u.x * u.x, yy = u.y * u.y, zz = u.z * u.z;
    double xy = u.x * u.y, xz = u.x * u.z, yz = u.y * u.z;
    double wx = u.w * u.x, wy = u.w * u.y, wz = u.w * u.z;
    Mat4 r;
    r.m = {1 - 2 * (yy + zz), 2 * (xy - wz),     2 * (xz + wy),     0,
           2 * (xy + wz),     1 - 2 * (xx + zz), 2 * (yz - wx),     0,
           2 * (xz - wy),     2 * (yz + wx),     1 - 2 * (xx + yy), 0,
           0,                 0,                 0,                 1};
    return r;
}

// Shepperd's method: pick the largest of trace / diagonal entries.
inline Quaternion matrix_to_quat(const Mat4& m) {
    if (!m.is_rigid(1e-6)) {
        throw Error(errc::invalid_input, "rotation block is not orthonormal");
    }
    double t = m.at(0, 0) + m.at(1, 1) + m.at(2, 2);
    Quaternion q;
    if (t > m.at(0, 0) && t > m.at(1, 1) && t > m.at(2, 2)) {
        double s = std::sqrt(t + 1.0) * 2.0;
        q.w = 0.25 * s;
        q.x = (m.at(2, 1) - m.at(1, 2)) / s;
        q.y = (m.at(0, 2) - m.at(2, 0)) / s;
        q.z = (m.at(1, 0) - m.at(0, 1)) / s;
    } else if (m.at(0, 0) > m.at(1, 1) && m.at(0, 0) > m.at(2, 2)) {
        double s = std::sqrt(1.0 + m.at(0, 0) - m.at(1, 1) - m.at(2, 2)) * 2.0;
        q.x = 0.25 * s;
        q.w = (m.at(2, 1) - m.at(1, 2)) / s;
        q.y = (m.at(0, 1) + m.at(1, 0)) / s;
        q.z = (m.at(0, 2) + m.at(2, 0)) / s;
    } else if (m.at(1, 1) > m.at(2, 2)) {
        double s = std::sqrt(1.0 + m.at(1, 1) - m.at(0, 0) - m.at(2, 2)) * 2.0;
        q.y = 0.25 * s;
        q.w = (m.at(0, 2) - m.at(2, 0)) / s;
        q.x = (m.at(0, 1) + m.at(1, 0)) / s;
        q.z = (m.at(1, 2) + m.at(2, 1)) / s;
    } else {
        double s = std::sqrt(1.0 + m.at(2, 2) - m.at(0, 0) - m.at(1, 1)) * 2.0;
        q.z = 0.25 * s;
        q.w = (m.at(1, 0) - m.at(0, 1)) / s;
        q.x = (m.at(0, 2) + m.at(2, 0)) / s;
        q.y = (m.at(1, 2) + m.at(2, 1)) / s;
    }
    return q.normalized().canonicalized();
}

inline Mat4 rotation_x(double a) {
    Mat4 r;
    double c = std::cos(a), s = std::sin(a);
    r.at(1, 1) = c;
    r.at(1, 2) = -s;
    r.at(2, 1) = s;
    r.at(2, 2) = c;
    return r;
}

inline Mat4 rotation_y(double a) {
    Mat4 r;
    double c = std::cos(a), s = std::sin(a);
    r.at(0, 0) = c;
    r.at(0, 2) = s;
    r.at(2, 0) = -s;
    r.at(2, 2) = c;
    return r;
}

inline Mat4 rotation_z(double a) {
    Mat4 r;
    double c = std::cos(a), s = std::sin(a);
    r.at(0, 0) = c;
    r.at(0, 1) = -s;
    r.at(1, 0) = s;
    r.at(1, 1) = c;
    return r;
}

// URDF fixed-axis convention: R = Rz(yaw) * Ry(pitch) * Rx(roll).
inline Mat4 rpy_to_matrix(double roll, double pitch, double yaw) {
    return rotation_z(yaw) * rotation_y(pitch) * rotation_x(roll);
}

// Inverse of rpy_to_matrix away from pitch = +-pi/2.
inline void matrix_to_rpy(const Mat4& m, double& roll, double& pitch, double& yaw) {
    pitch = std::asin(std::clamp(-m.at(2, 0), -1.0, 1.0));
    roll = std::atan2(m.at(2, 1), m.at(2, 2));
    yaw = std::atan2(m.at(1, 0), m.at(0, 0));
}

inline Quaternion axis_angle_to_quat(const Vec3& axis, double angle) {
    Vec3 a = axis.normalized();
    double h = angle * 0.5;
    double s = std::sin(h);
    return Quaternion{a.x * s, a.y * s, a.z * s, std::cos(h)}.normalized();
}

// Rodrigues rotation about a unit axis.
inline Mat4 axis_angle_to_matrix(const Vec3& axis, double angle) {
    return quat_to_matrix(axis_angle_to_quat(axis, angle));
}

inline Quaternion slerp(const Quaternion& q0, const Quaternion& q1, double t) {
    if (t < 0.0 || t > 1.0) {
        throw Error(errc::invalid_input, "slerp parameter outside [0,1]");
    }
    Quaternion a = q0.normalized();
    Quaternion b = q1.normalized();
    double d = a.dot(b);
    if (d < 0.0) {
        b = {-b.x, -b.y, -b.z, -b.w};
        d = -d;
    }
    if (d > 1.0 - 1e-9) {
        // Nearly parallel: normalized linear interpolation.
        Quaternion r{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y),
                     a.z + t * (b.z - a.z), a.w + t * (b.w - a.w)};
        return r.normalized();
    }
    double theta = std::acos(std::clamp(d, -1.0, 1.0));
    double s = std::sin(theta);
    double w0 = std::sin((1.0 - t) * theta) / s;
    double w1 = std::sin(t * theta) / s;
    Quaternion r{w0 * a.x + w1 * b.x, w0 * a.y + w1 * b.y,
                 w0 * a.z + w1 * b.z, w0 * a.w + w1 * b.w};
    return r.normalized();
}

inline double quat_angle(const Quaternion& a, const Quaternion& b) {
    double d = std::abs(a.normalized().dot(b.normalized()));
    return 2.0 * std::acos(std::clamp(d, 0.0, 1.0));
}

inline Mat4 compose(const Mat4& a, const Mat4& b) { return a * b; }

inline Mat4 invert(const Mat4& a) {
    if (a.is_rigid(1e-9)) {
        // Transpose rotation, negate-rotate translation.
        Mat4 r;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                r.at(i, j) = a.at(j, i);
            }
        }
        Vec3 t = a.translation_part();
        r.at(0, 3) = -(r.at(0, 0) * t.x + r.at(0, 1) * t.y + r.at(0, 2) * t.z);
        r.at(1, 3) = -(r.at(1, 0) * t.x + r.at(1, 1) * t.y + r.at(1, 2) * t.z);
        r.at(2, 3) = -(r.at(2, 0) * t.x + r.at(2, 1) * t.y + r.at(2, 2) * t.z);
        return r;
    }
    // General path: Gauss-Jordan with partial pivoting.
    std::array<std::array<double, 8>, 4> aug{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            aug[static_cast<size_t>(i)][static_cast<size_t>(j)] = a.at(i, j);
        }
        aug[static_cast<size_t>(i)][static_cast<size_t>(i + 4)] = 1.0;
    }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r) {
            if (std::abs(aug[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
                std::abs(aug[static_cast<size_t>(pivot)][static_cast<size_t>(col)])) {
                pivot = r;
            }
        }
        double p = aug[static_cast<size_t>(pivot)][static_cast<size_t>(col)];
        if (std::abs(p) < 1e-12) {
            throw Error(errc::invalid_input, "matrix is singular");
        }
        std::swap(aug[static_cast<size_t>(pivot)], aug[static_cast<size_t>(col)]);
        for (int j = 0; j < 8; ++j) {
            aug[static_cast<size_t>(col)][static_cast<size_t>(j)] /= p;
        }
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            double f = aug[static_cast<size_t>(r)][static_cast<size_t>(col)];
            for (int j = 0; j < 8; ++j) {
                aug[static_cast<size_t>(r)][static_cast<size_t>(j)] -=
                    f * aug[static_cast<size_t>(col)][static_cast<size_t>(j)];
            }
        }
    }
    Mat4 r;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            r.at(i, j) = aug[static_cast<size_t>(i)][static_cast<size_t>(j + 4)];
        }
    }
    return r;
}

// Rigid transform from translation + unit quaternion.
inline Mat4 make_transform(const Vec3& t, const Quaternion& q) {
    Mat4 m = quat_to_matrix(q);
    m.set_translation(t);
    return m;
}

} // namespace srb

#endif
