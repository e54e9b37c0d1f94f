#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace nqw {

using cplx = std::complex<double>;

/// Two-component amplitude (u, v) = (spin up, spin down) at one lattice site.
struct Spinor {
    cplx u{};
    cplx v{};

    double norm2() const noexcept { return std::norm(u) + std::norm(v); }
    bool is_zero() const noexcept { return u == cplx{} && v == cplx{}; }
    bool is_finite() const noexcept {
        return std::isfinite(u.real()) && std::isfinite(u.imag()) &&
               std::isfinite(v.real()) && std::isfinite(v.imag());
    }

    Spinor& operator+=(const Spinor& o) noexcept {
        u += o.u;
        v += o.v;
        return *this;
    }
    friend Spinor operator+(Spinor a, const Spinor& b) noexcept { return a += b; }
    friend Spinor operator*(cplx s, const Spinor& a) noexcept { return {s * a.u, s * a.v}; }
    friend bool operator==(const Spinor&, const Spinor&) = default;
};

/// Dense 2×2 complex matrix, row-major.
struct Mat2 {
    cplx a00{}, a01{}, a10{}, a11{};

    static constexpr Mat2 identity() noexcept { return {1.0, 0.0, 0.0, 1.0}; }

    Mat2 adjoint() const noexcept {
        return {std::conj(a00), std::conj(a10), std::conj(a01), std::conj(a11)};
    }
    cplx det() const noexcept { return a00 * a11 - a01 * a10; }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) noexcept {
        return {x.a00 * y.a00 + x.a01 * y.a10, x.a00 * y.a01 + x.a01 * y.a11,
                x.a10 * y.a00 + x.a11 * y.a10, x.a10 * y.a01 + x.a11 * y.a11};
    }
    friend Spinor operator*(const Mat2& m, const Spinor& s) noexcept {
        return {m.a00 * s.u + m.a01 * s.v, m.a10 * s.u + m.a11 * s.v};
    }
    friend Mat2 operator*(cplx s, const Mat2& m) noexcept {
        return {s * m.a00, s * m.a01, s * m.a10, s * m.a11};
    }
    friend Mat2 operator+(const Mat2& x, const Mat2& y) noexcept {
        return {x.a00 + y.a00, x.a01 + y.a01, x.a10 + y.a10, x.a11 + y.a11};
    }
    friend Mat2 operator-(const Mat2& x, const Mat2& y) noexcept {
        return {x.a00 - y.a00, x.a01 - y.a01, x.a10 - y.a10, x.a11 - y.a11};
    }
    friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// Largest entrywise modulus of x − y.
inline double max_abs_diff(const Mat2& x, const Mat2& y) noexcept {
    const Mat2 d = x - y;
    return std::max({std::abs(d.a00), std::abs(d.a01), std::abs(d.a10), std::abs(d.a11)});
}

namespace pauli {
inline constexpr Mat2 sigma1{0.0, 1.0, 1.0, 0.0};
inline constexpr Mat2 sigma2{0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0};
inline constexpr Mat2 sigma3{1.0, 0.0, 0.0, -1.0};
}  // namespace pauli

/// exp(−i φ σ / 2) for a Pauli matrix σ.
inline Mat2 pauli_rotation(const Mat2& sigma, double phi) noexcept {
    return cplx{std::cos(phi / 2), 0.0} * Mat2::identity() +
           cplx{0.0, -std::sin(phi / 2)} * sigma;
}

}  // namespace nqw
