// qstate.hpp: Qubit state representations, spectral data and trace distance

#pragma once

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace qflow {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Tolerances shared across the library.
inline constexpr double kPhysicalityTol = 1e-9;   // |r| <= 1 + tol
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDegeneracyTol = 1e-9;    // |r| below this: eigenbasis undefined
inline constexpr double kPositivityTol = 1e-9;    // eigenvalues >= -tol

class InvalidState : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a numerical procedure cannot produce a meaningful value
// (pole of a rate, degenerate eigenbasis, rejected step, ...).
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string operation, std::string what, std::optional<double> time = {});

    const std::string& operation() const { return operation_; }
    std::optional<double> time() const { return time_; }

private:
    std::string operation_;
    std::optional<double> time_;
};

// Plain 2x2 complex matrix, row-major.
struct Mat2 {
    std::array<cplx, 4> a{};

    cplx& operator()(int i, int j) { return a[2 * i + j]; }
    const cplx& operator()(int i, int j) const { return a[2 * i + j]; }

    cplx trace() const { return a[0] + a[3]; }
    Mat2 adjoint() const { return {{std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}}; }
    double max_abs() const;

    static Mat2 identity() { return {{1.0, 0.0, 0.0, 1.0}}; }

    Mat2& operator+=(const Mat2& o);
    Mat2& operator-=(const Mat2& o);
    Mat2& operator*=(cplx s);

    friend Mat2 operator+(Mat2 l, const Mat2& r) { return l += r; }
    friend Mat2 operator-(Mat2 l, const Mat2& r) { return l -= r; }
    friend Mat2 operator*(Mat2 m, cplx s) { return m *= s; }
    friend Mat2 operator*(cplx s, Mat2 m) { return m *= s; }
    friend Mat2 operator*(const Mat2& l, const Mat2& r);
};

namespace ops {
// Basis ordering: index 0 = excited |0>, index 1 = ground |1>.
inline Mat2 sigma_plus() { return {{0.0, 1.0, 0.0, 0.0}}; }
inline Mat2 sigma_minus() { return {{0.0, 0.0, 1.0, 0.0}}; }
inline Mat2 excited_projector() { return {{1.0, 0.0, 0.0, 0.0}}; }
inline Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y - y * x; }
}  // namespace ops

struct BlochVector {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    double norm() const;
    double transverse() const;  // sqrt(x^2 + y^2)

    friend BlochVector operator-(const BlochVector& l, const BlochVector& r) {
        return {l.x - r.x, l.y - r.y, l.z - r.z};
    }
    friend double dot(const BlochVector& l, const BlochVector& r) { return l.x * r.x + l.y * r.y + l.z * r.z; }
};

// Spherical Bloch coordinates: r in [0,1], theta in [0,pi], phi in [0,2pi).
struct PolarBloch {
    double r{0.0};
    double theta{0.0};
    double phi{0.0};
};

PolarBloch to_polar(const BlochVector& b);
BlochVector to_cartesian(const PolarBloch& p);

// rho(0) = (1-z)/2 I + z |xi><xi|,  |xi> = cos(vartheta0)|0> + sin(vartheta0) e^{i varphi0}|1>.
struct InitialStateSpec {
    double z{1.0};
    double vartheta0{0.0};
    double varphi0{0.0};

    // r0 = z, theta0 = 2 vartheta0, phi0 = varphi0, folded back into the canonical ranges.
    PolarBloch bloch() const;
};

// Hermitian, unit-trace 2x2 matrix. Positivity is not enforced: models that can
// leave the state space return such matrices and callers inspect min_eigenvalue().
class DensityMatrix {
public:
    // Ground state diag(0,1), the steady state of both damping models.
    DensityMatrix();

    // Validates hermiticity and unit trace to kHermitianTol; the result is
    // exactly Hermitian (the off-diagonal pair is symmetrised).
    static DensityMatrix from_matrix(const Mat2& m);

    static DensityMatrix ground() { return DensityMatrix(); }
    static DensityMatrix maximally_mixed();

    const Mat2& matrix() const { return m_; }
    cplx operator()(int i, int j) const { return m_(i, j); }

    BlochVector bloch() const;
    double purity() const;
    std::array<double, 2> eigenvalues() const;  // ascending
    double min_eigenvalue() const { return eigenvalues()[0]; }
    bool is_positive(double tol = kPositivityTol) const { return min_eigenvalue() >= -tol; }

private:
    explicit DensityMatrix(const Mat2& m) : m_(m) {}
    Mat2 m_;
};

// rho = (1 + r.sigma)/2. Throws InvalidState if |b| > 1 + kPhysicalityTol.
DensityMatrix density_from_bloch(const BlochVector& b);
BlochVector bloch_from_density(const DensityMatrix& rho);

// Throws InvalidState for z outside [0,1].
DensityMatrix initial_state(const InitialStateSpec& spec);

enum class BasisMode {
    literal,   // closed-form eigenvectors tied to the azimuth omega0 t + phi0
    spectral,  // true eigenvectors of rho
};

struct SpectralDecomposition {
    double eps_plus{0.5};
    double eps_minus{0.5};
    double theta_t{0.0};  // instantaneous polar angle in [0, pi]
    double phase{0.0};    // azimuthal phase entering the eigenvectors
    bool degenerate{false};
    std::array<cplx, 2> psi_plus{};
    std::array<cplx, 2> psi_minus{};
};

// literal:  psi+ = (sin(th/2), cos(th/2) e^{i phase}),  psi- = (-cos(th/2), sin(th/2) e^{i phase}),
//           with phase = literal_phase (the caller's omega0 t + phi0).
// spectral: psi+ = (cos(th/2), sin(th/2) e^{i phi}), psi- = (sin(th/2), -cos(th/2) e^{i phi}),
//           phi the Bloch azimuth; rho psi = eps psi is checked to 1e-10.
SpectralDecomposition eigendecompose(const DensityMatrix& rho, BasisMode mode, double literal_phase = 0.0);

// D = 1/2 sum |eigenvalues of (rho1 - rho2)|.
double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);

}  // namespace qflow
