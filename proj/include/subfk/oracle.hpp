/*
 * Dense periodic-grid discretizations of h = (1/2)(p - a)^2 and of the
 * Z_p spin operator, with exact functional calculus by eigendecomposition.
 *
 * Layout: a grid vector has n^d sites, site index i0 + n i1 + n^2 i2 with
 * x_i = -L + i h, h = 2L/n. Spin operators stack p copies, entry
 * (alpha-1) * n^d + site.
 */
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "subfk/bernstein.hpp"
#include "subfk/common.hpp"
#include "subfk/fields.hpp"
#include "subfk/spin.hpp"

namespace subfk {

struct GridSpec {
    int d = 1;
    int n = 32;
    double L = 8.0;

    GridSpec() = default;
    GridSpec(int d_, int n_, double L_);

    size_t sites() const;
    double spacing() const { return 2.0 * L / n; }
    double cell_volume() const;
    Vec point(size_t site) const;
};

// Dense budget: n^d * p above this is refused.
inline constexpr size_t kDenseBudget = 4096;

enum class KineticScheme {
    Spectral,   // Fourier symbol for p, a by collocation: (1/2) sum (P - A)^2
    LinkPhase,  // nearest-neighbour hopping with phases exp(-i h a(midpoint))
};

struct GridOperator {
    Eigen::MatrixXcd matrix;
    GridSpec grid;
    int spin_p = 1;
    double shift = 0.0;  // spectral shift already subtracted (psi_of_operator)

    Eigen::Index dim() const { return matrix.rows(); }
};

struct HermitianEigen {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXcd vectors;
};

// LAPACK zheevd; throws Error on failure.
HermitianEigen eigh(const Eigen::MatrixXcd& m);

double hermiticity_defect(const Eigen::MatrixXcd& m);

GridOperator discretize_h(const GridSpec& grid, const FieldSpec& field,
                          KineticScheme scheme = KineticScheme::Spectral);

// h (x) 1 + U(x, alpha) + sum_beta U_beta(x, alpha) |x,alpha><x,alpha+beta|.
// Throws Error when the result is not Hermitian.
GridOperator discretize_spin(const GridSpec& grid, const SpinCoupling& coupling, const FieldSpec& field,
                             KineticScheme scheme = KineticScheme::Spectral);

enum class ShiftMode {
    None,                // negative spectrum is an error
    InfSpecIfNegative,   // subtract inf spec when it is negative
    Fixed,               // subtract the given value
};

// Psi(op - shift) by eigendecomposition. Eigenvalues in [-1e-10, 0) are
// clamped to 0, lower ones throw.
GridOperator psi_of_operator(const GridOperator& op, const BernsteinFunction& psi,
                             ShiftMode mode = ShiftMode::None, double fixed_shift = 0.0);

// Site samples of V repeated over the spin copies.
Eigen::VectorXd sample_potential(const GridSpec& grid, const ScalarField& V, int spin_p = 1);
Eigen::VectorXcd sample_function(const GridSpec& grid, const std::function<cplx(const Vec&)>& f);
// f(x, alpha) for alpha = 1..p in the spin layout
Eigen::VectorXcd sample_spin_function(const GridSpec& grid, int p, const std::function<cplx(const Vec&, int)>& f);

// e^{-t(op + V)} kept in diagonal form.
class GridSemigroup {
public:
    GridSemigroup(const GridOperator& op, const Eigen::VectorXd& V = {});

    Eigen::MatrixXcd matrix(double t) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v, double t) const;
    // (f, e^{-tH} g) with the cell volume as quadrature weight
    cplx matrix_element(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g, double t) const;
    double ground_energy() const { return eig_.values(0); }
    const HermitianEigen& eigen() const { return eig_; }
    const GridSpec& grid() const { return grid_; }

private:
    HermitianEigen eig_;
    GridSpec grid_;
};

Eigen::MatrixXcd semigroup_matrix(const GridOperator& op, const Eigen::VectorXd& V, double t);

// min eigenvalue of op + V
double ground_energy(const GridOperator& op, const Eigen::VectorXd& V = {});

// (f, g) on the grid
cplx grid_inner(const GridSpec& grid, const Eigen::VectorXcd& f, const Eigen::VectorXcd& g);

}  // namespace subfk
