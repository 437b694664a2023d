// qstate.cpp: Qubit state representations, spectral data and trace distance

#include "qflow/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qflow {

namespace {

std::string describe(const std::string& op, const std::string& what, std::optional<double> time) {
    std::ostringstream os;
    os << op << ": " << what;
    if (time) {
        os.precision(17);
        os << " (t = " << *time << ")";
    }
    return os.str();
}

double wrap_two_pi(double phi) {
    double w = std::fmod(phi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    if (w >= 2.0 * kPi) w = 0.0;
    return w;
}

}  // namespace

NumericalError::NumericalError(std::string operation, std::string what, std::optional<double> time)
    : std::runtime_error(describe(operation, what, time)), operation_(std::move(operation)), time_(time) {}

double Mat2::max_abs() const {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
}

Mat2& Mat2::operator+=(const Mat2& o) {
    for (int k = 0; k < 4; ++k) a[k] += o.a[k];
    return *this;
}

Mat2& Mat2::operator-=(const Mat2& o) {
    for (int k = 0; k < 4; ++k) a[k] -= o.a[k];
    return *this;
}

Mat2& Mat2::operator*=(cplx s) {
    for (auto& v : a) v *= s;
    return *this;
}

Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {{l(0, 0) * r(0, 0) + l(0, 1) * r(1, 0), l(0, 0) * r(0, 1) + l(0, 1) * r(1, 1),
             l(1, 0) * r(0, 0) + l(1, 1) * r(1, 0), l(1, 0) * r(0, 1) + l(1, 1) * r(1, 1)}};
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

double BlochVector::transverse() const { return std::hypot(x, y); }

PolarBloch to_polar(const BlochVector& b) {
    PolarBloch p;
    p.r = b.norm();
    p.theta = std::atan2(b.transverse(), b.z);
    p.phi = wrap_two_pi(std::atan2(b.y, b.x));
    return p;
}

BlochVector to_cartesian(const PolarBloch& p) {
    const double s = std::sin(p.theta);
    return {p.r * s * std::cos(p.phi), p.r * s * std::sin(p.phi), p.r * std::cos(p.theta)};
}

PolarBloch InitialStateSpec::bloch() const {
    double theta = std::fmod(2.0 * vartheta0, 2.0 * kPi);
    double phi = varphi0;
    if (theta < 0.0) theta += 2.0 * kPi;
    if (theta > kPi) {
        theta = 2.0 * kPi - theta;
        phi += kPi;
    }
    return {z, theta, wrap_two_pi(phi)};
}

DensityMatrix::DensityMatrix() : m_{{0.0, 0.0, 0.0, 1.0}} {}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(Mat2{{0.5, 0.0, 0.0, 0.5}}); }

DensityMatrix DensityMatrix::from_matrix(const Mat2& m) {
    const double scale = std::max(1.0, m.max_abs());
    const double tol = kHermitianTol * scale;
    if (std::abs(m(0, 0).imag()) > tol || std::abs(m(1, 1).imag()) > tol ||
        std::abs(m(0, 1) - std::conj(m(1, 0))) > tol) {
        throw InvalidState("density matrix is not Hermitian");
    }
    if (std::abs(m.trace() - 1.0) > tol) {
        throw InvalidState("density matrix trace differs from 1");
    }
    const cplx off = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
    return DensityMatrix(Mat2{{m(0, 0).real(), off, std::conj(off), m(1, 1).real()}});
}

BlochVector DensityMatrix::bloch() const {
    return {2.0 * m_(0, 1).real(), -2.0 * m_(0, 1).imag(), m_(0, 0).real() - m_(1, 1).real()};
}

double DensityMatrix::purity() const {
    const double a = m_(0, 0).real();
    const double d = m_(1, 1).real();
    return a * a + d * d + 2.0 * std::norm(m_(0, 1));
}

std::array<double, 2> DensityMatrix::eigenvalues() const {
    const double mean = 0.5 * (m_(0, 0).real() + m_(1, 1).real());
    const double half_diff = 0.5 * (m_(0, 0).real() - m_(1, 1).real());
    const double rad = std::hypot(half_diff, std::abs(m_(0, 1)));
    return {mean - rad, mean + rad};
}

DensityMatrix density_from_bloch(const BlochVector& b) {
    if (!(b.norm() <= 1.0 + kPhysicalityTol)) {
        throw InvalidState("Bloch vector outside the unit ball");
    }
    const cplx off(0.5 * b.x, -0.5 * b.y);
    return DensityMatrix::from_matrix(Mat2{{0.5 * (1.0 + b.z), off, std::conj(off), 0.5 * (1.0 - b.z)}});
}

BlochVector bloch_from_density(const DensityMatrix& rho) { return rho.bloch(); }

DensityMatrix initial_state(const InitialStateSpec& spec) {
    if (!(spec.z >= 0.0 && spec.z <= 1.0)) {
        throw InvalidState("mixing weight z must lie in [0,1]");
    }
    const double c = std::cos(spec.vartheta0);
    const double s = std::sin(spec.vartheta0);
    const cplx e = std::polar(1.0, spec.varphi0);
    const double mix = 0.5 * (1.0 - spec.z);
    // |xi><xi| = [[c^2, c s e^{-i phi}], [c s e^{i phi}, s^2]]
    const cplx off = spec.z * c * s * std::conj(e);
    return DensityMatrix::from_matrix(Mat2{{mix + spec.z * c * c, off, std::conj(off), mix + spec.z * s * s}});
}

SpectralDecomposition eigendecompose(const DensityMatrix& rho, BasisMode mode, double literal_phase) {
    const BlochVector b = rho.bloch();
    const double r = b.norm();

    SpectralDecomposition d;
    d.eps_plus = 0.5 * (1.0 + r);
    d.eps_minus = 0.5 * (1.0 - r);
    d.degenerate = r < kDegeneracyTol;
    d.theta_t = std::atan2(b.transverse(), b.z);

    const double ch = std::cos(0.5 * d.theta_t);
    const double sh = std::sin(0.5 * d.theta_t);

    if (mode == BasisMode::literal) {
        d.phase = literal_phase;
        const cplx e = std::polar(1.0, literal_phase);
        d.psi_plus = {sh, ch * e};
        d.psi_minus = {-ch, sh * e};
        return d;
    }

    d.phase = std::atan2(b.y, b.x);
    const cplx e = std::polar(1.0, d.phase);
    d.psi_plus = {ch, sh * e};
    d.psi_minus = {sh, -ch * e};

    if (!d.degenerate) {
        const Mat2& m = rho.matrix();
        auto residual = [&](const std::array<cplx, 2>& v, double eps) {
            const cplx r0 = m(0, 0) * v[0] + m(0, 1) * v[1] - eps * v[0];
            const cplx r1 = m(1, 0) * v[0] + m(1, 1) * v[1] - eps * v[1];
            return std::max(std::abs(r0), std::abs(r1));
        };
        const double res = std::max(residual(d.psi_plus, d.eps_plus), residual(d.psi_minus, d.eps_minus));
        if (res > 1e-10) {
            throw NumericalError("eigendecompose", "eigenvector residual " + std::to_string(res));
        }
    }
    return d;
}

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
    const Mat2 diff = rho1.matrix() - rho2.matrix();
    const double mean = 0.5 * (diff(0, 0).real() + diff(1, 1).real());
    const double rad = std::hypot(0.5 * (diff(0, 0).real() - diff(1, 1).real()), std::abs(diff(0, 1)));
    return 0.5 * (std::abs(mean + rad) + std::abs(mean - rad));
}

}  // namespace qflow
